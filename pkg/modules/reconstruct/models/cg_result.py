from modules.core.models.image_grid import ImageGrid


class CgResult(object):
    """
    Outcome of the conjugate gradient solve: the estimate, its relative residual history
    (index 0 is the starting point) and whether the tolerance was met.
    """

    solution: ImageGrid
    residual_history: list[float]
    iterations: int
    converged: bool

    def __init__(self, solution: ImageGrid, residual_history: list[float], iterations: int, converged: bool):
        """
        Initializes the CG Result.
        """
        self.solution = solution
        self.residual_history = residual_history
        self.iterations = iterations
        self.converged = converged

    def __str__(self):
        return f"CgResult(iterations={self.iterations}, converged={self.converged}, residual={self.final_residual:.3e})"

    @property
    def final_residual(self) -> float:
        return self.residual_history[-1]
