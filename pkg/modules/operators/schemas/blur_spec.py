import math
from typing import Optional
from pydantic import BaseModel, ConfigDict, Field
import constants.configs as configs


class BlurSpec(BaseModel):
    """
    Truncated, normalized Gaussian blur (operator K).
    """

    model_config = ConfigDict(frozen=True)

    sigma: float = Field(gt=0.0)
    radius: Optional[int] = Field(default=None, ge=0)

    @property
    def effective_radius(self) -> int:
        if self.radius is not None:
            return self.radius
        return int(math.ceil(configs.GAUSSIAN_TRUNCATE_SIGMAS * self.sigma))
