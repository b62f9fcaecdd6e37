import logging
import math
from pydantic import BaseModel, ConfigDict, Field
from modules.core.models.sampling_kernel import SamplingKernel
from modules.enums.grid_alignment import GridAlignment
from modules.enums.kernel_kind import KernelKind


class SpmcConfig(BaseModel):
    """
    Configuration of the sub-pixel motion compensation layer. The layer itself has no trainable parameters.
    """

    model_config = ConfigDict(frozen=True)

    alpha: float = Field(gt=0.0)
    kernel: KernelKind = KernelKind.BILINEAR
    center_aligned: bool = False

    @property
    def sampling_kernel(self) -> SamplingKernel:
        return SamplingKernel.from_kind(self.kernel)

    @property
    def grid_alignment(self) -> GridAlignment:
        return GridAlignment.CENTER if self.center_aligned else GridAlignment.ORIGIN

    def hr_size(self, width: int, height: int) -> tuple[int, int]:
        """
        HR output size (round(w * alpha), round(h * alpha)).
        """
        hr_width = int(math.floor(width * self.alpha + 0.5))
        hr_height = int(math.floor(height * self.alpha + 0.5))
        if hr_width < 1 or hr_height < 1:
            logging.error(f"alpha={self.alpha} maps {width}x{height} to an empty HR grid")
            raise ValueError(f"alpha={self.alpha} maps {width}x{height} to an empty HR grid")
        return hr_width, hr_height
