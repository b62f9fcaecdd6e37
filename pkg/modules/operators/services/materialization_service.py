import logging
from typing import Callable, Optional
import numpy as np
import constants.configs as configs
from modules.core.models.flow_field import FlowField
from modules.core.models.image_grid import ImageGrid
from modules.core.models.sampling_kernel import SamplingKernel
from modules.enums.operator_kind import OperatorKind
from modules.operators.schemas.blur_spec import BlurSpec
from modules.operators.schemas.decimation_factor import DecimationFactor
from modules.operators.services.operators_service import OperatorsService


class MaterializationService:
    """
    Builds explicit matrices of the imaging-model operators on small grids (test scale only).
    """

    @staticmethod
    def materialize_operator(
        kind: OperatorKind,
        width: int,
        height: int,
        factor: Optional[DecimationFactor] = None,
        flow: Optional[FlowField] = None,
        kernel: Optional[SamplingKernel] = None,
        blur: Optional[BlurSpec] = None,
    ) -> np.ndarray:
        """
        Dense matrix whose column j is the row-major flattening of the operator applied to basis image e_j.

        Args:
            kind (OperatorKind): Which operator to materialize.
            width (int): Width of the operator's input grid.
            height (int): Height of the operator's input grid.
            factor (DecimationFactor, optional): Needed for S and S^T.
            flow (FlowField, optional): Needed for W and W^T; must be width x height.
            kernel (SamplingKernel, optional): Kernel for W and W^T. Defaults to bilinear.
            blur (BlurSpec, optional): Needed for K.

        Returns:
            np.ndarray: (output pixels) x (input pixels) matrix.
        """
        limit = configs.MATERIALIZE_MAX_SIDE
        if width > limit or height > limit:
            logging.error(f"Materialization is capped at {limit}x{limit}, got {width}x{height}")
            raise ValueError(f"Materialization is capped at {limit}x{limit}, got {width}x{height}")

        apply = MaterializationService._operator(kind, factor, flow, kernel or SamplingKernel.bilinear(), blur)

        columns = []
        for j in range(width * height):
            basis = np.zeros(width * height)
            basis[j] = 1.0
            columns.append(apply(ImageGrid.from_flat(width, height, basis)).flat)
        return np.stack(columns, axis=1)

    @staticmethod
    def _operator(kind, factor, flow, kernel, blur) -> Callable[[ImageGrid], ImageGrid]:
        missing = None
        if kind in (OperatorKind.DECIMATION, OperatorKind.ZERO_UPSAMPLING) and factor is None:
            missing = "a decimation factor"
        elif kind in (OperatorKind.BACKWARD_WARP, OperatorKind.FORWARD_WARP) and flow is None:
            missing = "a flow field"
        elif kind == OperatorKind.GAUSSIAN_BLUR and blur is None:
            missing = "a blur spec"
        if missing:
            logging.error(f"{kind.value} needs {missing}")
            raise ValueError(f"{kind.value} needs {missing}")

        operators = {
            OperatorKind.DECIMATION: lambda img: OperatorsService.decimate(img, factor),
            OperatorKind.ZERO_UPSAMPLING: lambda img: OperatorsService.zero_upsample(img, factor),
            OperatorKind.BACKWARD_WARP: lambda img: OperatorsService.backward_warp(img, flow, kernel),
            OperatorKind.FORWARD_WARP: lambda img: OperatorsService.forward_warp(img, flow, kernel),
            OperatorKind.GAUSSIAN_BLUR: lambda img: OperatorsService.gaussian_blur(img, blur),
        }
        return operators[kind]
