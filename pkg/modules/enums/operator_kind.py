from enum import Enum


class OperatorKind(Enum):
    """
    Enum for the linear operators of the imaging model.
    """

    DECIMATION = "S"
    ZERO_UPSAMPLING = "S^T"
    BACKWARD_WARP = "W"
    FORWARD_WARP = "W^T"
    GAUSSIAN_BLUR = "K"

    @staticmethod
    def get_kind_by_symbol(symbol: str) -> "OperatorKind":
        for kind in OperatorKind:
            if kind.value == symbol:
                return kind

        raise ValueError(f"Unknown operator: {symbol}")
