import os
import logging
from typing import Any, Optional
from pydantic import BaseModel, Field
import constants.configs as configs


class RunManifest(BaseModel):
    """
    Record of one CLI run, written as JSON next to its outputs. ``parameters`` holds every resolved
    command argument, so ``main.py replay`` can re-run the command as recorded.
    """

    command: str
    parameters: dict[str, Any] = Field(default_factory=dict)
    inputs: list[str] = Field(default_factory=list)
    outputs: list[str] = Field(default_factory=list)
    seed: Optional[int] = None
    toolkit_version: str = configs.TOOLKIT_VERSION
    started_at: str = ""
    duration_seconds: float = 0.0
    duration: str = ""
    exit_code: int = 0

    def __str__(self):
        return self.model_dump_json(indent=2)

    def save(self, path: str) -> str:
        folder = os.path.dirname(path)
        if folder:
            os.makedirs(folder, exist_ok=True)
        with open(path, "w", encoding="utf-8") as manifest_file:
            manifest_file.write(self.model_dump_json(indent=2))
        logging.info(f"Run manifest written to {path}")
        return path

    @staticmethod
    def load(path: str) -> "RunManifest":
        if not os.path.exists(path):
            logging.error(f"File not found: {path}")
            raise FileNotFoundError(f"File not found: {path}")
        with open(path, encoding="utf-8") as manifest_file:
            return RunManifest.model_validate_json(manifest_file.read())
