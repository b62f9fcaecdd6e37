import os
import logging
import numpy as np
import constants.configs as configs
from modules.core.models.flow_field import FlowField


class FloFileService:
    """
    Service class to read and write Middlebury ``.flo`` files.

    Layout: float32 tag 202021.25, int32 width, int32 height, then row-major interleaved (u, v)
    float32 values, all little-endian.
    """

    @staticmethod
    def write_flo(path: str, flow: FlowField) -> str:
        """
        Writes ``flow`` to ``path`` (parent folders are created).

        Values are stored as float32, so only float32-representable flows round-trip bit-exactly.

        Returns:
            str: The written path.
        """
        folder = os.path.dirname(path)
        if folder:
            os.makedirs(folder, exist_ok=True)

        interleaved = np.stack([flow.u, flow.v], axis=-1).astype("<f4")
        with open(path, "wb") as flo_file:
            np.array([configs.FLO_TAG], dtype="<f4").tofile(flo_file)
            np.array([flow.width, flow.height], dtype="<i4").tofile(flo_file)
            interleaved.tofile(flo_file)

        logging.debug(f"Flow {flow.width}x{flow.height} written to {path}")
        return path

    @staticmethod
    def read_flo(path: str) -> FlowField:
        """
        Reads a ``.flo`` file.

        Args:
            path (str): The file path.

        Returns:
            FlowField: The stored flow, widened to float64.
        """
        if not os.path.exists(path):
            logging.error(f"File not found: {path}")
            raise FileNotFoundError(f"File not found: {path}")

        with open(path, "rb") as flo_file:
            tag = np.fromfile(flo_file, dtype="<f4", count=1)
            if tag.size != 1 or tag[0] != np.float32(configs.FLO_TAG):
                logging.error(f"Invalid .flo tag in {path}")
                raise ValueError(f"Invalid .flo tag in {path}")

            size = np.fromfile(flo_file, dtype="<i4", count=2)
            if size.size != 2 or size[0] <= 0 or size[1] <= 0:
                logging.error(f"Invalid .flo dimensions in {path}: {size}")
                raise ValueError(f"Invalid .flo dimensions in {path}: {size}")
            width, height = int(size[0]), int(size[1])

            values = np.fromfile(flo_file, dtype="<f4", count=width * height * 2)
            if values.size != width * height * 2:
                logging.error(f"Truncated .flo file {path}: expected {width * height * 2} values, got {values.size}")
                raise ValueError(f"Truncated .flo file {path}: expected {width * height * 2} values, got {values.size}")

        interleaved = values.reshape(height, width, 2).astype(np.float64)
        return FlowField(interleaved[:, :, 0], interleaved[:, :, 1])
