import logging
from pydantic import BaseModel, Field
import constants.configs as configs
from modules.enums.grid_alignment import GridAlignment
from modules.enums.shift_regime import ShiftRegime


class SequenceManifest(BaseModel):
    """
    Plain-text manifest (key=value lines) stored next to the frames of a sequence directory.
    """

    frame_count: int = Field(ge=1)
    reference_index: int = Field(default=0, ge=0)
    alpha: int = Field(default=1, ge=1)
    seed: int = configs.DEFAULT_SEED
    shift_regime: ShiftRegime = ShiftRegime.SUBPIXEL_BICUBIC
    grid_alignment: GridAlignment = GridAlignment.ORIGIN

    def __str__(self):
        return self.to_text()

    def to_text(self) -> str:
        return "\n".join(
            [
                f"frame_count={self.frame_count}",
                f"reference_index={self.reference_index}",
                f"alpha={self.alpha}",
                f"seed={self.seed}",
                f"shift_regime={self.shift_regime.value['name']}",
                f"grid_alignment={self.grid_alignment.value}",
            ]
        ) + "\n"

    @staticmethod
    def from_text(text: str) -> "SequenceManifest":
        """
        Parses key=value lines; blank lines and ``#`` comments are ignored.
        """
        values = {}
        for line in text.splitlines():
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, separator, value = line.partition("=")
            if not separator:
                logging.error(f"Malformed manifest line: {line}")
                raise ValueError(f"Malformed manifest line: {line}")
            values[key.strip()] = value.strip()

        if "frame_count" not in values:
            logging.error("Sequence manifest is missing frame_count")
            raise ValueError("Sequence manifest is missing frame_count")
        if "shift_regime" in values:
            values["shift_regime"] = ShiftRegime.get_regime_by_name(values["shift_regime"])
        if "grid_alignment" in values:
            values["grid_alignment"] = GridAlignment(values["grid_alignment"])
        return SequenceManifest(**values)
