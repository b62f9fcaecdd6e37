import os
import logging
from typing import Optional
import constants.configs as configs
from modules.core.models.flow_field import FlowField
from modules.core.models.image_grid import ImageGrid
from modules.core.models.image_sequence import ImageSequence
from modules.evaldata.schemas.sequence_manifest import SequenceManifest
from modules.evaldata.services.image_io_service import ImageIoService
from modules.flow.services.flo_file_service import FloFileService


class SequenceDirectoryService:
    """
    Service class for sequence directories: ``frame_0000.png``... plus ``sequence.txt``, an optional
    ``hr.png`` ground truth and optional ``flow_{offset}_to_ref.flo`` files holding F_{i->0}.
    """

    @staticmethod
    def write_sequence(
        folder: str,
        sequence: ImageSequence,
        manifest: SequenceManifest,
        hr: Optional[ImageGrid] = None,
        flows: Optional[list[Optional[FlowField]]] = None,
        reverse_flows: Optional[list[Optional[FlowField]]] = None,
    ) -> list[str]:
        """
        Writes frames, manifest and the optional ground truth and flows. ``flows`` hold F_{i->0},
        ``reverse_flows`` F_{0->i} (stored as ``flow_ref_to_{offset}.flo``).

        Returns:
            list[str]: Written file paths.
        """
        os.makedirs(folder, exist_ok=True)
        written = []
        for index, frame in enumerate(sequence.frames):
            written.append(ImageIoService.write_image(os.path.join(folder, configs.FRAME_FILE_PATTERN.format(index=index)), frame))

        manifest_path = os.path.join(folder, configs.SEQUENCE_MANIFEST_FILE)
        with open(manifest_path, "w", encoding="utf-8") as manifest_file:
            manifest_file.write(manifest.to_text())
        written.append(manifest_path)

        if hr is not None:
            written.append(ImageIoService.write_image(os.path.join(folder, configs.HR_TRUTH_FILE), hr))
        if flows is not None:
            for index, flow in enumerate(flows):
                if index == sequence.reference_index or flow is None:
                    continue
                written.append(FloFileService.write_flo(SequenceDirectoryService.flow_path(folder, sequence.offset_of(index)), flow))
        if reverse_flows is not None:
            for index, flow in enumerate(reverse_flows):
                if index == sequence.reference_index or flow is None:
                    continue
                written.append(FloFileService.write_flo(SequenceDirectoryService.flow_path(folder, sequence.offset_of(index), True), flow))

        logging.info(f"Sequence written to {folder} ({len(written)} files)")
        return written

    @staticmethod
    def read_sequence(folder: str) -> tuple[ImageSequence, SequenceManifest]:
        """
        Reads a sequence directory. Without ``sequence.txt`` every image of the folder is a frame
        and the first one is the reference.
        """
        manifest_path = os.path.join(folder, configs.SEQUENCE_MANIFEST_FILE)
        if os.path.exists(manifest_path):
            with open(manifest_path, encoding="utf-8") as manifest_file:
                manifest = SequenceManifest.from_text(manifest_file.read())
            paths = [os.path.join(folder, configs.FRAME_FILE_PATTERN.format(index=index)) for index in range(manifest.frame_count)]
        else:
            paths = [path for path in ImageIoService.list_frames(folder) if os.path.basename(path) != configs.HR_TRUTH_FILE]
            if not paths:
                logging.error(f"No frames found in {folder}")
                raise FileNotFoundError(f"No frames found in {folder}")
            manifest = SequenceManifest(frame_count=len(paths))

        frames = [ImageIoService.read_image(path) for path in paths]
        return ImageSequence(frames, manifest.reference_index), manifest

    @staticmethod
    def read_ground_truth(folder: str) -> Optional[ImageGrid]:
        path = os.path.join(folder, configs.HR_TRUTH_FILE)
        return ImageIoService.read_image(path) if os.path.exists(path) else None

    @staticmethod
    def read_flows(folder: str, sequence: ImageSequence, from_reference: bool = False) -> list[Optional[FlowField]]:
        """
        Flows aligned with the frames (``None`` for the reference): F_{i->0}, or F_{0->i} with ``from_reference``.
        """
        flows = []
        for index in range(len(sequence)):
            if index == sequence.reference_index:
                flows.append(None)
                continue
            path = SequenceDirectoryService.flow_path(folder, sequence.offset_of(index), from_reference)
            if not os.path.exists(path):
                logging.error(f"Missing flow file for frame {index}: {path}")
                raise FileNotFoundError(f"Missing flow file for frame {index}: {path}")
            flows.append(FloFileService.read_flo(path))
        return flows

    @staticmethod
    def flow_path(folder: str, offset: int, from_reference: bool = False) -> str:
        pattern = configs.FLOW_FROM_REF_FILE_PATTERN if from_reference else configs.FLOW_FILE_PATTERN
        return os.path.join(folder, pattern.format(offset=offset))
