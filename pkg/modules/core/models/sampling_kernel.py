import numpy as np
import constants.configs as configs
from modules.enums.kernel_kind import KernelKind


class SamplingKernel(object):
    """
    Separable interpolation kernel M(x) with its support radius and derivative M'(x).

    Bilinear: M(x) = max(0, 1 - |x|), support 1. M' is -sign(x) on 0 < |x| < 1 and 0
    elsewhere (0 at the kinks |x| in {0, 1}).
    Bicubic: Keys kernel with a = -0.5 (Catmull-Rom), support 2, continuously differentiable.
    """

    kind: KernelKind
    support: int

    def __init__(self, kind: KernelKind):
        """
        Initializes the Sampling Kernel.
        """
        self.kind = kind
        self.support = 1 if kind == KernelKind.BILINEAR else 2

    def __str__(self):
        return f"SamplingKernel({self.kind.value}, support={self.support})"

    def value(self, x) -> np.ndarray:
        x = np.abs(np.asarray(x, dtype=np.float64))
        if self.kind == KernelKind.BILINEAR:
            return np.maximum(0.0, 1.0 - x)

        a = configs.BICUBIC_A
        near = ((a + 2.0) * x - (a + 3.0)) * x * x + 1.0
        far = ((a * x - 5.0 * a) * x + 8.0 * a) * x - 4.0 * a
        return np.where(x <= 1.0, near, np.where(x < 2.0, far, 0.0))

    def derivative(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        ax = np.abs(x)
        sign = np.sign(x)
        if self.kind == KernelKind.BILINEAR:
            return np.where((ax > 0.0) & (ax < 1.0), -sign, 0.0)

        a = configs.BICUBIC_A
        near = (3.0 * (a + 2.0) * ax - 2.0 * (a + 3.0)) * ax
        far = (3.0 * a * ax - 10.0 * a) * ax + 8.0 * a
        return sign * np.where(ax <= 1.0, near, np.where(ax < 2.0, far, 0.0))

    @staticmethod
    def from_kind(kind: KernelKind) -> "SamplingKernel":
        return _KERNELS[kind]

    @staticmethod
    def bilinear() -> "SamplingKernel":
        return _KERNELS[KernelKind.BILINEAR]

    @staticmethod
    def bicubic() -> "SamplingKernel":
        return _KERNELS[KernelKind.BICUBIC]


_KERNELS = {kind: SamplingKernel(kind) for kind in KernelKind}
