from enum import Enum


class DegradationMethod(Enum):
    """
    Enum for the HR -> LR degradation methods.
    """

    BICUBIC_CHAIN = "bicubic"
    EXACT_MODEL = "exact"

    @staticmethod
    def get_method_by_name(method_name: str) -> "DegradationMethod":
        for method in DegradationMethod:
            if method.value == method_name.lower():
                return method

        raise ValueError(f"Unknown degradation method: {method_name}")
