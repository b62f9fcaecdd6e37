import logging
import numpy as np


class FlowField(object):
    """
    Per-pixel motion vectors (u, v) in source-grid pixel units.

    ``u`` is the horizontal and ``v`` the vertical displacement, both read-only
    float64 arrays of shape (height, width).
    """

    width: int
    height: int
    u: np.ndarray
    v: np.ndarray

    def __init__(self, u, v):
        """
        Initializes the Flow Field (arrays are copied).
        """
        u_array = np.array(u, dtype=np.float64)
        v_array = np.array(v, dtype=np.float64)
        if u_array.ndim != 2 or u_array.shape != v_array.shape or u_array.size == 0:
            logging.error(f"Flow components must be equal non-empty 2-D arrays, got {u_array.shape} and {v_array.shape}")
            raise ValueError(f"Flow components must be equal non-empty 2-D arrays, got {u_array.shape} and {v_array.shape}")
        if not (np.all(np.isfinite(u_array)) and np.all(np.isfinite(v_array))):
            logging.error("Flow values must be finite")
            raise ValueError("Flow values must be finite")

        u_array.flags.writeable = False
        v_array.flags.writeable = False
        self.u = u_array
        self.v = v_array
        self.height, self.width = u_array.shape

    def __str__(self):
        return f"FlowField({self.width}x{self.height}, mean=({self.u.mean():.4f}, {self.v.mean():.4f}))"

    @property
    def shape(self) -> tuple[int, int]:
        return (self.height, self.width)

    def matches(self, image) -> bool:
        return self.width == image.width and self.height == image.height

    def negated(self) -> "FlowField":
        return FlowField(-self.u, -self.v)

    def magnitude(self) -> np.ndarray:
        return np.hypot(self.u, self.v)

    @staticmethod
    def zeros(width: int, height: int) -> "FlowField":
        return FlowField(np.zeros((height, width)), np.zeros((height, width)))

    @staticmethod
    def constant(width: int, height: int, du: float, dv: float) -> "FlowField":
        return FlowField(np.full((height, width), float(du)), np.full((height, width), float(dv)))

    @staticmethod
    def endpoint_error(estimated: "FlowField", truth: "FlowField") -> np.ndarray:
        """
        Per-pixel Euclidean distance between two flow fields.
        """
        if estimated.shape != truth.shape:
            logging.error(f"Flow shapes differ: {estimated.shape} vs {truth.shape}")
            raise ValueError(f"Flow shapes differ: {estimated.shape} vs {truth.shape}")
        return np.hypot(estimated.u - truth.u, estimated.v - truth.v)
