from enum import Enum


class SolverMode(Enum):
    """
    Enum for the HR reconstruction solvers.
    """

    SHIFT_AND_ADD = {"name": "sna", "description": "Feed-forward shift-and-add"}
    CONJUGATE_GRADIENT = {"name": "cg", "description": "Conjugate gradient on the L2 normal equations"}

    @staticmethod
    def get_mode_by_name(mode_name: str) -> "SolverMode":
        """
        Get the SolverMode by its CLI name.

        Args:
            mode_name (str): The solver name ("sna" or "cg").

        Returns:
            SolverMode: The solver mode.
        """
        for mode in SolverMode:
            if mode.value["name"] == mode_name.lower():
                return mode

        raise ValueError(f"Unknown solver: {mode_name}")
