from enum import Enum


class ShiftRegime(Enum):
    """
    Enum for how a synthetic sequence was shifted on the HR grid.
    """

    HR_INTEGER = {"name": "hr_integer", "exact_recovery": True}
    SUBPIXEL_BICUBIC = {"name": "subpixel_bicubic", "exact_recovery": False}
    # frames degraded as given; their motion is whatever the source footage contains
    SOURCE_MOTION = {"name": "source_motion", "exact_recovery": False}

    @staticmethod
    def get_regime_by_name(regime_name: str) -> "ShiftRegime":
        for regime in ShiftRegime:
            if regime.value["name"] == regime_name:
                return regime

        raise ValueError(f"Unknown shift regime: {regime_name}")

    @staticmethod
    def is_exact(regime: "ShiftRegime") -> bool:
        return regime.value["exact_recovery"]
