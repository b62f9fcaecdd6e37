from enum import Enum


class AlignmentMode(Enum):
    """
    Enum for the frame alignment backends.
    """

    SPMC = {
        "name": "spmc",
        "description": "Sub-pixel motion compensation: forward splat onto the HR grid using F_{i->0}",
    }
    BW = {
        "name": "bw",
        "description": "LR backward warp using F_{0->i}, followed by bicubic upsampling",
    }

    @staticmethod
    def get_mode_by_name(mode_name: str) -> "AlignmentMode":
        """
        Get the AlignmentMode by its CLI name.

        Args:
            mode_name (str): The mode name ("spmc" or "bw").

        Returns:
            AlignmentMode: The alignment mode.
        """
        for mode in AlignmentMode:
            if mode.value["name"] == mode_name.lower():
                return mode

        raise ValueError(f"Unknown alignment mode: {mode_name}")
