import logging
import numpy as np
import constants.configs as configs
from modules.core.models.image_grid import ImageGrid
from modules.core.models.sampling_kernel import SamplingKernel


class SamplingService:
    """
    Service class for kernel-weighted gather (sampling) and scatter (splatting) on pixel grids.

    Out-of-bounds source or destination pixels contribute nothing (zero padding), which keeps
    every gather the exact transpose of the splat with the same coordinates.
    """

    @staticmethod
    def kernel_taps(
        coordinates: np.ndarray,
        kernel: SamplingKernel,
        derivative: bool = False,
    ) -> tuple[np.ndarray, np.ndarray]:
        """
        Integer tap positions and their kernel weights for each real coordinate.

        Args:
            coordinates (np.ndarray): Flat array of N real coordinates.
            kernel (SamplingKernel): The interpolation kernel.
            derivative (bool): Return M'(c - k) instead of M(c - k).

        Returns:
            tuple[np.ndarray, np.ndarray]: (N, 2*support) tap indices and weights.
        """
        base = np.floor(coordinates).astype(np.int64) - kernel.support + 1
        taps = base[:, None] + np.arange(2 * kernel.support, dtype=np.int64)[None, :]
        distance = coordinates[:, None] - taps
        weights = kernel.derivative(distance) if derivative else kernel.value(distance)
        return taps, weights

    @staticmethod
    def _clipped_taps(coordinates, kernel, size, derivative):
        taps, weights = SamplingService.kernel_taps(coordinates, kernel, derivative)
        valid = (taps >= 0) & (taps < size)
        return np.clip(taps, 0, size - 1), np.where(valid, weights, 0.0), valid

    @staticmethod
    def gather(
        data: np.ndarray,
        xs: np.ndarray,
        ys: np.ndarray,
        kernel: SamplingKernel,
        derivative_x: bool = False,
        derivative_y: bool = False,
    ) -> np.ndarray:
        """
        Samples ``data`` at the real coordinates (xs, ys): sum over taps of value * M(xs - x_q) * M(ys - y_q).

        With ``derivative_x``/``derivative_y`` the corresponding factor is replaced by M'.

        Returns:
            np.ndarray: Samples with the shape of ``xs``.
        """
        height, width = data.shape
        shape = np.shape(xs)
        flat_x = np.asarray(xs, dtype=np.float64).ravel()
        flat_y = np.asarray(ys, dtype=np.float64).ravel()

        tap_x, weight_x, _ = SamplingService._clipped_taps(flat_x, kernel, width, derivative_x)
        tap_y, weight_y, _ = SamplingService._clipped_taps(flat_y, kernel, height, derivative_y)

        values = data[tap_y[:, :, None], tap_x[:, None, :]]
        samples = np.einsum("nj,nji,ni->n", weight_y, values, weight_x)
        return samples.reshape(shape)

    @staticmethod
    def splat(
        values: np.ndarray,
        xs: np.ndarray,
        ys: np.ndarray,
        kernel: SamplingKernel,
        out_width: int,
        out_height: int,
    ) -> np.ndarray:
        """
        Scatters each value onto the output grid with weights M(xs - x_q) * M(ys - y_q).

        Accumulation goes through ``np.add.at`` in source order, so the result is bitwise
        deterministic for fixed inputs. Contributions landing outside the grid are dropped.

        Returns:
            np.ndarray: Accumulated (out_height, out_width) array.
        """
        flat_values = np.asarray(values, dtype=np.float64).ravel()
        flat_x = np.asarray(xs, dtype=np.float64).ravel()
        flat_y = np.asarray(ys, dtype=np.float64).ravel()

        tap_x, weight_x, valid_x = SamplingService._clipped_taps(flat_x, kernel, out_width, False)
        tap_y, weight_y, valid_y = SamplingService._clipped_taps(flat_y, kernel, out_height, False)

        contributions = flat_values[:, None, None] * weight_y[:, :, None] * weight_x[:, None, :]
        mask = valid_y[:, :, None] & valid_x[:, None, :]
        targets = tap_y[:, :, None] * out_width + tap_x[:, None, :]

        accumulator = np.zeros(out_width * out_height, dtype=np.float64)
        np.add.at(accumulator, targets[mask], contributions[mask])
        return accumulator.reshape(out_height, out_width)

    @staticmethod
    def pixel_coordinates(width: int, height: int) -> tuple[np.ndarray, np.ndarray]:
        """
        Integer pixel coordinates (x_p, y_p) as float arrays of shape (height, width).
        """
        ys, xs = np.mgrid[0:height, 0:width]
        return xs.astype(np.float64), ys.astype(np.float64)

    @staticmethod
    def sample_at(img: ImageGrid, x: float, y: float, kernel: SamplingKernel) -> float:
        """
        Kernel-weighted sample of ``img`` at a real coordinate; out-of-bounds pixels count as 0.

        Args:
            img (ImageGrid): The source image.
            x (float): Horizontal coordinate (column units).
            y (float): Vertical coordinate (row units).
            kernel (SamplingKernel): The interpolation kernel.

        Returns:
            float: The interpolated value.
        """
        sample = SamplingService.gather(img.data, np.array([x]), np.array([y]), kernel)
        return float(sample[0])

    @staticmethod
    def to_luminance(r: ImageGrid, g: ImageGrid, b: ImageGrid) -> ImageGrid:
        """
        BT.601 luminance Y = 0.299 R + 0.587 G + 0.114 B, clamped to [0, 1].
        """
        if not (r.same_shape(g) and r.same_shape(b)):
            logging.error(f"Channel dimensions differ: {r.shape}, {g.shape}, {b.shape}")
            raise ValueError(f"Channel dimensions differ: {r.shape}, {g.shape}, {b.shape}")

        wr, wg, wb = configs.LUMINANCE_WEIGHTS
        return ImageGrid(np.clip(wr * r.data + wg * g.data + wb * b.data, 0.0, 1.0))
