from pydantic import BaseModel, ConfigDict, Field
import constants.configs as configs
from modules.core.models.sampling_kernel import SamplingKernel
from modules.enums.kernel_kind import KernelKind


class FlowEstimationConfig(BaseModel):
    """
    Settings of the coarse-to-fine flow estimator that minimizes the unsupervised warping loss.
    """

    model_config = ConfigDict(frozen=True)

    pyramid_levels: int = Field(default=configs.DEFAULT_PYRAMID_LEVELS, ge=1)
    iterations_per_level: int = Field(default=configs.DEFAULT_ITERATIONS_PER_LEVEL, ge=0)
    step_size: float = Field(default=configs.DEFAULT_FLOW_STEP_SIZE, gt=0.0)
    lambda1: float = Field(default=configs.DEFAULT_LAMBDA1, ge=0.0)
    kernel: KernelKind = KernelKind.BILINEAR
    epsilon: float = Field(default=configs.CHARBONNIER_EPSILON, gt=0.0)
    use_preconditioner: bool = True

    @property
    def sampling_kernel(self) -> SamplingKernel:
        return SamplingKernel.from_kind(self.kernel)
