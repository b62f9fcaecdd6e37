class CheckResult(object):
    """
    Outcome of one verification property: the worst error over all trials against its tolerance.
    """

    suite: str
    name: str
    trials: int
    max_error: float
    tolerance: float
    passed: bool
    seconds: float

    def __init__(self, suite: str, name: str, trials: int, max_error: float, tolerance: float, seconds: float = 0.0):
        """
        Initializes the Check Result. ``passed`` is max_error <= tolerance.
        """
        self.suite = suite
        self.name = name
        self.trials = trials
        self.max_error = float(max_error)
        self.tolerance = float(tolerance)
        self.passed = self.max_error <= self.tolerance
        self.seconds = seconds

    def __str__(self):
        status = "PASS" if self.passed else "FAIL"
        return f"{status} {self.suite}.{self.name}: max_error={self.max_error:.3e} tolerance={self.tolerance:.1e} trials={self.trials}"

    def as_dict(self) -> dict:
        return {
            "suite": self.suite,
            "name": self.name,
            "trials": self.trials,
            "max_error": self.max_error,
            "tolerance": self.tolerance,
            "passed": self.passed,
            "seconds": self.seconds,
        }
