from enum import Enum


class HoleFillPolicy(Enum):
    """
    Enum for the treatment of HR pixels that receive no splat weight.
    """

    ZERO = "zero"
    BICUBIC_REFERENCE = "bicubic"

    @staticmethod
    def get_policy_by_name(policy_name: str) -> "HoleFillPolicy":
        for policy in HoleFillPolicy:
            if policy.value == policy_name.lower():
                return policy

        raise ValueError(f"Unknown hole fill policy: {policy_name}")
