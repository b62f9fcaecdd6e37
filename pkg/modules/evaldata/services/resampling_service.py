import logging
import numpy as np
from modules.core.models.image_grid import ImageGrid
from modules.core.models.sampling_kernel import SamplingKernel
from modules.enums.grid_alignment import GridAlignment


class ResamplingService:
    """
    Service class for separable bicubic (Keys, a = -0.5) resizing.

    Each axis is resampled with a dense (out x in) matrix whose rows hold the kernel weights of one
    output sample. Taps falling outside the input are clamped to the edge and every row is normalized
    to sum to 1, so constant images stay constant. When shrinking, the kernel is stretched by the
    inverse scale (antialiasing prefilter).
    """

    @staticmethod
    def bicubic_resize(
        img: ImageGrid,
        out_width: int,
        out_height: int,
        alignment: GridAlignment = GridAlignment.CENTER,
    ) -> ImageGrid:
        """
        Resizes ``img`` to ``out_width`` x ``out_height``.

        Args:
            img (ImageGrid): The source image.
            out_width (int): Output width.
            out_height (int): Output height.
            alignment (GridAlignment): Pixel-center convention between the two grids.

        Returns:
            ImageGrid: The resampled image.
        """
        if out_width < 1 or out_height < 1:
            logging.error(f"Invalid output size {out_width}x{out_height}")
            raise ValueError(f"Invalid output size {out_width}x{out_height}")

        rows = ResamplingService.resampling_matrix(img.height, out_height, alignment)
        columns = ResamplingService.resampling_matrix(img.width, out_width, alignment)
        return ImageGrid(rows @ img.data @ columns.T)

    @staticmethod
    def resampling_matrix(in_size: int, out_size: int, alignment: GridAlignment) -> np.ndarray:
        """
        The (out_size, in_size) 1-D bicubic resampling matrix.
        """
        scale = out_size / in_size
        positions = np.arange(out_size, dtype=np.float64)
        if alignment == GridAlignment.ORIGIN:
            centers = positions / scale
        else:
            centers = (positions + 0.5) / scale - 0.5

        kernel = SamplingKernel.bicubic()
        stretch = min(scale, 1.0)
        support = kernel.support / stretch
        tap_count = int(np.ceil(2.0 * support)) + 1

        first = np.floor(centers - support).astype(np.int64) + 1
        taps = first[:, None] + np.arange(tap_count, dtype=np.int64)[None, :]
        weights = kernel.value((centers[:, None] - taps) * stretch)

        matrix = np.zeros((out_size, in_size), dtype=np.float64)
        output_rows = np.repeat(np.arange(out_size), tap_count)
        np.add.at(matrix, (output_rows, np.clip(taps, 0, in_size - 1).ravel()), weights.ravel())
        return matrix / matrix.sum(axis=1, keepdims=True)

    @staticmethod
    def upscale(img: ImageGrid, alpha: float, alignment: GridAlignment = GridAlignment.CENTER) -> ImageGrid:
        """
        Bicubic x alpha with the output size rounded half up.
        """
        out_width = int(np.floor(img.width * alpha + 0.5))
        out_height = int(np.floor(img.height * alpha + 0.5))
        return ResamplingService.bicubic_resize(img, out_width, out_height, alignment)
