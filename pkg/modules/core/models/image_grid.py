import logging
import numpy as np


class ImageGrid(object):
    """
    Single-channel 2-D scalar field with explicit width/height.

    Pixel p sits at integer coordinates (x_p, y_p): origin top-left, x to the right
    (columns), y downwards (rows). ``data`` is a read-only row-major float64 array of
    shape (height, width).
    """

    width: int
    height: int
    data: np.ndarray

    def __init__(self, data):
        """
        Initializes the Image Grid from a 2-D array-like (copied).
        """
        array = np.array(data, dtype=np.float64)
        if array.ndim != 2 or array.shape[0] < 1 or array.shape[1] < 1:
            logging.error(f"ImageGrid needs a non-empty 2-D array, got shape {array.shape}")
            raise ValueError(f"ImageGrid needs a non-empty 2-D array, got shape {array.shape}")
        if not np.all(np.isfinite(array)):
            logging.error("ImageGrid values must be finite")
            raise ValueError("ImageGrid values must be finite")

        array.flags.writeable = False
        self.data = array
        self.height, self.width = array.shape

    def __str__(self):
        return f"ImageGrid({self.width}x{self.height}, min={self.data.min():.6g}, max={self.data.max():.6g})"

    @property
    def shape(self) -> tuple[int, int]:
        return (self.height, self.width)

    @property
    def flat(self) -> np.ndarray:
        return self.data.ravel()

    def same_shape(self, other) -> bool:
        return self.width == other.width and self.height == other.height

    def with_data(self, data) -> "ImageGrid":
        return ImageGrid(data)

    @staticmethod
    def zeros(width: int, height: int) -> "ImageGrid":
        return ImageGrid(np.zeros((height, width)))

    @staticmethod
    def ones(width: int, height: int) -> "ImageGrid":
        return ImageGrid(np.ones((height, width)))

    @staticmethod
    def from_flat(width: int, height: int, values) -> "ImageGrid":
        """
        Builds a grid from a row-major flat vector of length width * height.
        """
        values = np.asarray(values, dtype=np.float64)
        if values.size != width * height:
            logging.error(f"Expected {width * height} values, got {values.size}")
            raise ValueError(f"Expected {width * height} values, got {values.size}")
        return ImageGrid(values.reshape(height, width))
