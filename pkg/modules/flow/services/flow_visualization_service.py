import os
import logging
import numpy as np
from matplotlib import colors as mcolors
from matplotlib import image as mimage
from modules.core.models.flow_field import FlowField


class FlowVisualizationService:
    """
    Service class for color-coding flow fields.
    """

    @staticmethod
    def flow_to_rgb(flow: FlowField, max_magnitude: float = None) -> np.ndarray:
        """
        Hue encodes the direction, value the magnitude normalized by ``max_magnitude``
        (the largest magnitude in the field when not given); saturation is 1.

        Returns:
            np.ndarray: (height, width, 3) RGB array in [0, 1].
        """
        magnitude = flow.magnitude()
        scale = float(max_magnitude) if max_magnitude is not None else float(magnitude.max())
        if scale <= 0.0:
            scale = 1.0

        hue = (np.arctan2(flow.v, flow.u) / (2.0 * np.pi)) % 1.0
        value = np.clip(magnitude / scale, 0.0, 1.0)
        hsv = np.stack([hue, np.ones_like(hue), value], axis=-1)
        return mcolors.hsv_to_rgb(hsv)

    @staticmethod
    def save_flow_image(path: str, flow: FlowField, max_magnitude: float = None) -> str:
        """
        Writes the color-coded flow as a PNG.

        Returns:
            str: The written path.
        """
        folder = os.path.dirname(path)
        if folder:
            os.makedirs(folder, exist_ok=True)

        mimage.imsave(path, FlowVisualizationService.flow_to_rgb(flow, max_magnitude))
        logging.info(f"Flow visualization written to {path}")
        return path
