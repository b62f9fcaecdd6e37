from enum import Enum


class GridAlignment(Enum):
    """
    Enum for the LR <-> HR pixel-center conventions.

    ORIGIN maps HR pixel q to LR coordinate q / alpha (pixel 0 shared by both grids).
    CENTER maps HR pixel q to LR coordinate (q + 0.5) / alpha - 0.5 (grid centers shared).
    """

    ORIGIN = "origin"
    CENTER = "center"

    def hr_offset(self, alpha: float) -> float:
        """
        Offset added to alpha * x_lr to obtain the HR coordinate.
        """
        return 0.0 if self == GridAlignment.ORIGIN else (alpha - 1.0) / 2.0
