import logging
import numpy as np
from scipy import ndimage
import constants.configs as configs
from modules.core.models.image_grid import ImageGrid


class MetricsService:
    """
    Service class for full-reference image quality metrics.
    """

    @staticmethod
    def psnr(a: ImageGrid, b: ImageGrid, peak: float = 1.0) -> float:
        """
        Peak signal-to-noise ratio 10 log10(peak^2 / MSE) in dB, capped at 99 dB (identical images).

        Args:
            a (ImageGrid): First image.
            b (ImageGrid): Second image.
            peak (float): Peak signal value.

        Returns:
            float: PSNR in dB.
        """
        MetricsService._check_pair(a, b)
        if peak <= 0.0:
            logging.error(f"PSNR peak must be positive, got {peak}")
            raise ValueError(f"PSNR peak must be positive, got {peak}")

        mse = float(np.mean((a.data - b.data) ** 2))
        if mse == 0.0:
            return configs.PSNR_CAP_DB
        return min(10.0 * np.log10(peak * peak / mse), configs.PSNR_CAP_DB)

    @staticmethod
    def ssim(a: ImageGrid, b: ImageGrid, dynamic_range: float = 1.0) -> float:
        """
        Mean structural similarity over the valid region of an 11x11 Gaussian window (sigma 1.5).

        Args:
            a (ImageGrid): First image, at least 11x11.
            b (ImageGrid): Second image.
            dynamic_range (float): L in C1 = (K1 L)^2 and C2 = (K2 L)^2.

        Returns:
            float: SSIM in [-1, 1].
        """
        MetricsService._check_pair(a, b)
        window = configs.SSIM_WINDOW_SIZE
        if min(a.width, a.height) < window:
            logging.error(f"SSIM needs images of at least {window}x{window}, got {a.width}x{a.height}")
            raise ValueError(f"SSIM needs images of at least {window}x{window}, got {a.width}x{a.height}")

        c1 = (configs.SSIM_K1 * dynamic_range) ** 2
        c2 = (configs.SSIM_K2 * dynamic_range) ** 2
        x, y = a.data, b.data

        mu_x = MetricsService._window_mean(x)
        mu_y = MetricsService._window_mean(y)
        var_x = MetricsService._window_mean(x * x) - mu_x * mu_x
        var_y = MetricsService._window_mean(y * y) - mu_y * mu_y
        cov_xy = MetricsService._window_mean(x * y) - mu_x * mu_y

        ssim_map = ((2.0 * mu_x * mu_y + c1) * (2.0 * cov_xy + c2)) / (
            (mu_x * mu_x + mu_y * mu_y + c1) * (var_x + var_y + c2)
        )
        return float(np.mean(ssim_map))

    @staticmethod
    def crop_border(img: ImageGrid, border: int) -> ImageGrid:
        """
        Central crop removing ``border`` pixels from each side.
        """
        if border < 0 or 2 * border >= min(img.width, img.height):
            logging.error(f"Cannot crop {border} px from each side of a {img.width}x{img.height} image")
            raise ValueError(f"Cannot crop {border} px from each side of a {img.width}x{img.height} image")
        if border == 0:
            return img
        return ImageGrid(img.data[border:-border, border:-border])

    @staticmethod
    def _window_mean(data: np.ndarray) -> np.ndarray:
        # Local Gaussian mean restricted to windows that fit inside the image.
        radius = configs.SSIM_WINDOW_SIZE // 2
        offsets = np.arange(-radius, radius + 1, dtype=np.float64)
        taps = np.exp(-0.5 * (offsets / configs.SSIM_SIGMA) ** 2)
        taps /= taps.sum()

        filtered = ndimage.correlate1d(data, taps, axis=1, mode="constant", cval=0.0)
        filtered = ndimage.correlate1d(filtered, taps, axis=0, mode="constant", cval=0.0)
        return filtered[radius:-radius, radius:-radius]

    @staticmethod
    def _check_pair(a: ImageGrid, b: ImageGrid):
        if not a.same_shape(b):
            logging.error(f"Image dimensions differ: {a.shape} vs {b.shape}")
            raise ValueError(f"Image dimensions differ: {a.shape} vs {b.shape}")
