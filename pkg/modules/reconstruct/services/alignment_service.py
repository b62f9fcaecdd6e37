import logging
from typing import Optional
import numpy as np
from modules.core.models.flow_field import FlowField
from modules.core.models.image_grid import ImageGrid
from modules.core.models.image_sequence import ImageSequence
from modules.enums.alignment_mode import AlignmentMode
from modules.evaldata.services.resampling_service import ResamplingService
from modules.operators.services.operators_service import OperatorsService
from modules.reconstruct.models.aligned_stack import AlignedStack
from modules.reconstruct.schemas.reconstruction_config import ReconstructionConfig
from modules.spmc.services.spmc_layer_service import SpmcLayerService


class AlignmentService:
    """
    Service class that motion-compensates every frame of a sequence onto the HR reference grid.
    """

    @staticmethod
    def align_stack(seq: ImageSequence, flows: list[Optional[FlowField]], cfg: ReconstructionConfig) -> AlignedStack:
        """
        Aligns the sequence with the backend selected by ``cfg.alignment``.

        SPMC: J^H_i = spmc_forward(I^L_i, F_{i->0}), weight_i = spmc_weight_map(F_{i->0}).
        BW: J^H_i = bicubic x alpha of backward_warp(I^L_i, F_{0->i}), weight_i = 1.

        Args:
            seq (ImageSequence): The LR frames.
            flows (list[FlowField | None]): One flow per frame in the orientation of the backend;
                the reference entry is ignored (zero flow).
            cfg (ReconstructionConfig): Scale factor, backend and kernel.

        Returns:
            AlignedStack: HR frames, weights and the upsampled reference.
        """
        resolved = AlignmentService.resolve_flows(seq, flows)
        spmc_cfg = cfg.spmc_config
        hr_width, hr_height = spmc_cfg.hr_size(seq.width, seq.height)
        reference_upsampled = ResamplingService.bicubic_resize(seq.reference, hr_width, hr_height, spmc_cfg.grid_alignment)

        frames, weights = [], []
        for frame, flow in zip(seq.frames, resolved):
            if cfg.alignment == AlignmentMode.SPMC:
                frames.append(SpmcLayerService.spmc_forward(frame, flow, spmc_cfg))
                weights.append(SpmcLayerService.spmc_weight_map(flow, spmc_cfg))
            else:
                warped = OperatorsService.backward_warp(frame, flow, spmc_cfg.sampling_kernel)
                frames.append(ResamplingService.bicubic_resize(warped, hr_width, hr_height, spmc_cfg.grid_alignment))
                weights.append(ImageGrid.ones(hr_width, hr_height))

        offsets = [seq.offset_of(index) for index in range(len(seq))]
        logging.info(f"Aligned {len(frames)} frames to {hr_width}x{hr_height} with {cfg.alignment.value['name']}")
        return AlignedStack(frames, weights, reference_upsampled, offsets, cfg.alignment)

    @staticmethod
    def resolve_flows(seq: ImageSequence, flows: list[Optional[FlowField]]) -> list[FlowField]:
        """
        Checks one flow per frame and replaces the reference entry by zero flow.
        """
        if len(flows) != len(seq):
            logging.error(f"Expected {len(seq)} flows (one per frame), got {len(flows)}")
            raise ValueError(f"Expected {len(seq)} flows (one per frame), got {len(flows)}")

        resolved = []
        for index, flow in enumerate(flows):
            if index == seq.reference_index:
                if flow is not None and (np.any(flow.u) or np.any(flow.v)):
                    logging.warning("Ignoring a nonzero flow given for the reference frame")
                resolved.append(FlowField.zeros(seq.width, seq.height))
                continue
            if flow is None:
                logging.error(f"Missing flow for frame {index}")
                raise ValueError(f"Missing flow for frame {index}")
            if not flow.matches(seq.reference):
                logging.error(f"Flow {index} is {flow.width}x{flow.height}, frames are {seq.width}x{seq.height}")
                raise ValueError(f"Flow {index} is {flow.width}x{flow.height}, frames are {seq.width}x{seq.height}")
            resolved.append(flow)
        return resolved
