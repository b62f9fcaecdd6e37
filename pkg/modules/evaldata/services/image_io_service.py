import os
import logging
import numpy as np
from PIL import Image
import constants.configs as configs
from modules.core.models.image_grid import ImageGrid
from modules.core.services.sampling_service import SamplingService


class ImageIoService:
    """
    Service class to read and write 8-bit grayscale/RGB images (PNG, PGM) as intensities in [0, 1].
    """

    @staticmethod
    def read_image(path: str) -> ImageGrid:
        """
        Reads an image; color images are converted to BT.601 luminance.

        Args:
            path (str): PNG or PGM file path.

        Returns:
            ImageGrid: Intensities scaled to [0, 1].
        """
        if not os.path.exists(path):
            logging.error(f"File not found: {path}")
            raise FileNotFoundError(f"File not found: {path}")

        try:
            with Image.open(path) as image:
                if image.mode in ("RGB", "RGBA", "P", "CMYK", "YCbCr"):
                    rgb = np.asarray(image.convert("RGB"), dtype=np.float64) / configs.INTENSITY_MAX_8BIT
                    return SamplingService.to_luminance(ImageGrid(rgb[:, :, 0]), ImageGrid(rgb[:, :, 1]), ImageGrid(rgb[:, :, 2]))
                gray = np.asarray(image.convert("L"), dtype=np.float64)
        except OSError as e:
            logging.error(f"Error reading the image file {path}: {e}")
            raise ValueError(f"Error reading the image file {path}: {e}")

        return ImageGrid(gray / configs.INTENSITY_MAX_8BIT)

    @staticmethod
    def write_image(path: str, img: ImageGrid) -> str:
        """
        Writes ``img`` as an 8-bit grayscale image; the format follows the extension (.png or .pgm).
        Values are clamped to [0, 1] and rounded to the nearest 1/255 step.

        Returns:
            str: The written path.
        """
        folder = os.path.dirname(path)
        if folder:
            os.makedirs(folder, exist_ok=True)

        Image.fromarray(ImageIoService.quantize(img)).save(path)
        logging.debug(f"Image {img.width}x{img.height} written to {path}")
        return path

    @staticmethod
    def quantize(img: ImageGrid) -> np.ndarray:
        scaled = np.clip(img.data, 0.0, 1.0) * configs.INTENSITY_MAX_8BIT
        return np.rint(scaled).astype(np.uint8)

    @staticmethod
    def list_frames(folder: str) -> list[str]:
        """
        Image files of ``folder`` (png, pgm) in name order.
        """
        if not os.path.isdir(folder):
            logging.error(f"Folder not found: {folder}")
            raise FileNotFoundError(f"Folder not found: {folder}")

        names = sorted(name for name in os.listdir(folder) if os.path.splitext(name)[1].lower() in (".png", ".pgm"))
        return [os.path.join(folder, name) for name in names]
