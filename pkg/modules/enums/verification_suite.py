from enum import Enum


class VerificationSuite(Enum):
    """
    Enum for the built-in verification suites.
    """

    ADJOINT = "adjoint"
    GRADCHECK = "gradcheck"
    RECOVERY = "recovery"
    ALL = "all"

    @staticmethod
    def get_suite_by_name(suite_name: str) -> "VerificationSuite":
        for suite in VerificationSuite:
            if suite.value == suite_name.lower():
                return suite

        raise ValueError(f"Unknown verification suite: {suite_name}")

    def expand(self) -> list["VerificationSuite"]:
        """
        Returns the concrete suites this value stands for.
        """
        if self == VerificationSuite.ALL:
            return [VerificationSuite.ADJOINT, VerificationSuite.GRADCHECK, VerificationSuite.RECOVERY]
        return [self]
