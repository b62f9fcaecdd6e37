from pydantic import BaseModel, ConfigDict, Field
import constants.configs as configs
from modules.enums.alignment_mode import AlignmentMode
from modules.enums.hole_fill_policy import HoleFillPolicy
from modules.enums.kernel_kind import KernelKind
from modules.enums.solver_mode import SolverMode
from modules.spmc.schemas.spmc_config import SpmcConfig


class ReconstructionConfig(BaseModel):
    """
    Settings of the multi-frame HR reconstruction.
    """

    model_config = ConfigDict(frozen=True)

    alpha: float = Field(ge=1.0)
    alignment: AlignmentMode = AlignmentMode.SPMC
    solver: SolverMode = SolverMode.SHIFT_AND_ADD
    tikhonov_eps: float = Field(default=configs.DEFAULT_TIKHONOV_EPS, ge=0.0)
    cg_max_iters: int = Field(default=configs.DEFAULT_CG_MAX_ITERS, ge=1)
    cg_tolerance: float = Field(default=configs.DEFAULT_CG_TOLERANCE, gt=0.0)
    hole_fill: HoleFillPolicy = HoleFillPolicy.BICUBIC_REFERENCE
    kernel: KernelKind = KernelKind.BILINEAR
    center_aligned: bool = False

    @property
    def spmc_config(self) -> SpmcConfig:
        return SpmcConfig(alpha=self.alpha, kernel=self.kernel, center_aligned=self.center_aligned)
