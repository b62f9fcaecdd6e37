import logging
import numpy as np
from scipy import ndimage
from modules.core.models.flow_field import FlowField
from modules.core.models.image_grid import ImageGrid
from modules.core.models.sampling_kernel import SamplingKernel
from modules.core.services.sampling_service import SamplingService
from modules.operators.schemas.blur_spec import BlurSpec
from modules.operators.schemas.decimation_factor import DecimationFactor


class OperatorsService:
    """
    Service class for the linear operators of the LR imaging model: decimation S, zero-upsampling S^T,
    backward warp W, forward warp W^T and Gaussian blur K. All use zero padding at the borders.
    """

    @staticmethod
    def decimate(img: ImageGrid, factor: DecimationFactor) -> ImageGrid:
        """
        Keeps every alpha-th sample on both axes, starting at index 0.

        Args:
            img (ImageGrid): HR image whose sides are divisible by alpha.
            factor (DecimationFactor): The scale factor.

        Returns:
            ImageGrid: The (w/alpha) x (h/alpha) image.
        """
        alpha = factor.alpha
        if img.width % alpha or img.height % alpha:
            logging.error(f"Image {img.width}x{img.height} is not divisible by alpha={alpha}")
            raise ValueError(f"Image {img.width}x{img.height} is not divisible by alpha={alpha}")
        return ImageGrid(img.data[::alpha, ::alpha])

    @staticmethod
    def zero_upsample(img: ImageGrid, factor: DecimationFactor) -> ImageGrid:
        """
        Transpose of ``decimate``: places input pixel p at alpha * p and zeros elsewhere.
        """
        alpha = factor.alpha
        upsampled = np.zeros((img.height * alpha, img.width * alpha))
        upsampled[::alpha, ::alpha] = img.data
        return ImageGrid(upsampled)

    @staticmethod
    def backward_warp(img: ImageGrid, flow: FlowField, kernel: SamplingKernel) -> ImageGrid:
        """
        Gather warp: out[p] = sample_at(img, x_p + u_p, y_p + v_p).
        """
        OperatorsService._check_flow(img, flow)
        xs, ys = SamplingService.pixel_coordinates(img.width, img.height)
        return ImageGrid(SamplingService.gather(img.data, xs + flow.u, ys + flow.v, kernel))

    @staticmethod
    def forward_warp(img: ImageGrid, flow: FlowField, kernel: SamplingKernel) -> ImageGrid:
        """
        Scatter warp, the exact transpose of ``backward_warp``: each source pixel p splats img[p]
        with weights M(x_p + u_p - x_q) M(y_p + v_p - y_q). Out-of-bounds portions are dropped.
        """
        OperatorsService._check_flow(img, flow)
        xs, ys = SamplingService.pixel_coordinates(img.width, img.height)
        return ImageGrid(SamplingService.splat(img.data, xs + flow.u, ys + flow.v, kernel, img.width, img.height))

    @staticmethod
    def gaussian_kernel_1d(spec: BlurSpec) -> np.ndarray:
        """
        Normalized, symmetric, truncated 1-D Gaussian taps of length 2 * radius + 1.
        """
        radius = spec.effective_radius
        offsets = np.arange(-radius, radius + 1, dtype=np.float64)
        taps = np.exp(-0.5 * (offsets / spec.sigma) ** 2)
        return taps / taps.sum()

    @staticmethod
    def gaussian_blur(img: ImageGrid, spec: BlurSpec) -> ImageGrid:
        """
        Separable convolution with the truncated Gaussian, zero-padded (self-adjoint).
        """
        taps = OperatorsService.gaussian_kernel_1d(spec)
        blurred = ndimage.correlate1d(img.data, taps, axis=1, mode="constant", cval=0.0)
        blurred = ndimage.correlate1d(blurred, taps, axis=0, mode="constant", cval=0.0)
        return ImageGrid(blurred)

    @staticmethod
    def _check_flow(img: ImageGrid, flow: FlowField):
        if not flow.matches(img):
            logging.error(f"Flow {flow.width}x{flow.height} does not match image {img.width}x{img.height}")
            raise ValueError(f"Flow {flow.width}x{flow.height} does not match image {img.width}x{img.height}")
