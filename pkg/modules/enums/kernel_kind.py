from enum import Enum


class KernelKind(Enum):
    """
    Enum for the interpolation kernels available to samplers and splatters.
    """

    BILINEAR = "bilinear"
    BICUBIC = "bicubic"

    @staticmethod
    def get_kind_by_name(kind_name: str) -> "KernelKind":
        """
        Get the KernelKind by its CLI name.

        Args:
            kind_name (str): The kernel name ("bilinear" or "bicubic").

        Returns:
            KernelKind: The kernel kind.
        """
        for kind in KernelKind:
            if kind.value == kind_name.lower():
                return kind

        raise ValueError(f"Unknown kernel: {kind_name}")
