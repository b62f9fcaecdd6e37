from typing import Optional
from pydantic import BaseModel, ConfigDict, Field, field_validator
from modules.core.models.image_grid import ImageGrid
from modules.operators.schemas.blur_spec import BlurSpec


class SyntheticSequenceSpec(BaseModel):
    """
    Ground-truth harness: an HR source and per-frame global shifts (LR pixel units). The first
    shift belongs to the reference frame and must be (0, 0).
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    hr_source: ImageGrid
    shifts: list[tuple[float, float]]
    alpha: int = Field(ge=1)
    blur: Optional[BlurSpec] = None

    @field_validator("shifts")
    @classmethod
    def check_shifts(cls, shifts: list[tuple[float, float]]) -> list[tuple[float, float]]:
        if not shifts:
            raise ValueError("At least one shift is required")
        if tuple(shifts[0]) != (0.0, 0.0):
            raise ValueError(f"The first (reference) shift must be (0, 0), got {shifts[0]}")
        return shifts
