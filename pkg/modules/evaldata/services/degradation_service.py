import logging
import numpy as np
import constants.configs as configs
from modules.core.models.flow_field import FlowField
from modules.core.models.image_grid import ImageGrid
from modules.core.models.image_sequence import ImageSequence
from modules.core.models.sampling_kernel import SamplingKernel
from modules.enums.degradation_method import DegradationMethod
from modules.enums.grid_alignment import GridAlignment
from modules.enums.shift_regime import ShiftRegime
from modules.evaldata.models.synthetic_sequence import SyntheticSequence
from modules.evaldata.schemas.degradation_spec import DegradationSpec
from modules.evaldata.schemas.synthetic_sequence_spec import SyntheticSequenceSpec
from modules.evaldata.services.resampling_service import ResamplingService
from modules.operators.schemas.decimation_factor import DecimationFactor
from modules.operators.services.operators_service import OperatorsService


class DegradationService:
    """
    Service class to synthesize LR data from HR images.
    """

    @staticmethod
    def degrade(hr: ImageGrid, spec: DegradationSpec) -> ImageGrid:
        """
        Applies ``spec.method``: bicubic downscaling, or blur (optional) followed by decimation.
        """
        if spec.method == DegradationMethod.BICUBIC_CHAIN:
            return DegradationService.degrade_bicubic(hr, spec)
        return DegradationService.degrade_exact(hr, spec)

    @staticmethod
    def degrade_bicubic(hr: ImageGrid, spec: DegradationSpec) -> ImageGrid:
        """
        Bicubic (Catmull-Rom) downscaling by ``spec.alpha`` with a kernel stretched to the factor,
        plus Gaussian noise of ``spec.noise_sigma`` drawn from ``spec.seed``.

        Args:
            hr (ImageGrid): HR image whose sides are divisible by alpha.
            spec (DegradationSpec): Degradation settings.

        Returns:
            ImageGrid: The (w / alpha) x (h / alpha) LR image.
        """
        DegradationService._check_divisible(hr, spec.alpha)
        lr = ResamplingService.bicubic_resize(hr, hr.width // spec.alpha, hr.height // spec.alpha, GridAlignment.CENTER)
        return DegradationService.add_noise(lr, spec.noise_sigma, spec.seed)

    @staticmethod
    def degrade_exact(hr: ImageGrid, spec: DegradationSpec) -> ImageGrid:
        """
        Imaging model S K I^H (+ noise): optional Gaussian blur, then decimation keeping phase 0.
        """
        DegradationService._check_divisible(hr, spec.alpha)
        blurred = OperatorsService.gaussian_blur(hr, spec.blur) if spec.blur is not None else hr
        lr = OperatorsService.decimate(blurred, DecimationFactor(alpha=spec.alpha))
        return DegradationService.add_noise(lr, spec.noise_sigma, spec.seed)

    @staticmethod
    def add_noise(img: ImageGrid, sigma: float, seed: int) -> ImageGrid:
        if sigma <= 0.0:
            return img
        rng = np.random.default_rng(seed)
        return ImageGrid(img.data + rng.normal(0.0, sigma, size=img.shape))

    @staticmethod
    def make_exact_sequence(spec: SyntheticSequenceSpec) -> SyntheticSequence:
        """
        Generates frame_i = S K shift(hr, alpha * d_i) with true flow F_{i->0} = d_i, so that
        frame_i[p] = hr[alpha * (p + d_i)] when all HR shifts alpha * d_i are integers.

        HR-integer shifts are applied by exact index shifting (zero padding); any other shift
        makes the whole sequence fall back to bicubic interpolation, which the returned
        regime records.

        Args:
            spec (SyntheticSequenceSpec): HR source, LR-unit shifts and scale factor.

        Returns:
            SyntheticSequence: The frames (reference first), true flows and shift regime.
        """
        hr = spec.hr_source
        DegradationService._check_divisible(hr, spec.alpha)

        hr_shifts = [(spec.alpha * dx, spec.alpha * dy) for dx, dy in spec.shifts]
        for hr_dx, hr_dy in hr_shifts:
            if abs(hr_dx) >= hr.width or abs(hr_dy) >= hr.height:
                logging.error(f"Shift ({hr_dx}, {hr_dy}) HR px is out of range for a {hr.width}x{hr.height} image")
                raise ValueError(f"Shift ({hr_dx}, {hr_dy}) HR px is out of range for a {hr.width}x{hr.height} image")

        integer = all(DegradationService._is_integer(value) for shift in hr_shifts for value in shift)
        regime = ShiftRegime.HR_INTEGER if integer else ShiftRegime.SUBPIXEL_BICUBIC
        if not integer:
            logging.warning("Shifts are not HR-integer: frames use bicubic shifting, exact recovery does not apply")

        factor = DecimationFactor(alpha=spec.alpha)
        lr_width, lr_height = hr.width // spec.alpha, hr.height // spec.alpha
        frames, flows = [], []
        for (dx, dy), (hr_dx, hr_dy) in zip(spec.shifts, hr_shifts):
            shifted = DegradationService.shift_image(hr, hr_dx, hr_dy, regime)
            if spec.blur is not None:
                shifted = OperatorsService.gaussian_blur(shifted, spec.blur)
            frames.append(OperatorsService.decimate(shifted, factor))
            flows.append(FlowField.constant(lr_width, lr_height, dx, dy))

        logging.info(f"Synthetic sequence: {len(frames)} frames {lr_width}x{lr_height}, alpha={spec.alpha}, regime={regime.value['name']}")
        return SyntheticSequence(ImageSequence(frames, 0), flows, regime, spec.alpha)

    @staticmethod
    def shift_image(img: ImageGrid, dx: float, dy: float, regime: ShiftRegime) -> ImageGrid:
        """
        out[q] = img[q + (dx, dy)] with zero padding: integer index shifting in the HR-integer
        regime, bicubic sampling otherwise.
        """
        if regime == ShiftRegime.HR_INTEGER:
            shift_x, shift_y = int(round(dx)), int(round(dy))
            shifted = np.zeros_like(img.data)
            source = img.data[max(shift_y, 0):img.height + min(shift_y, 0), max(shift_x, 0):img.width + min(shift_x, 0)]
            shifted[max(-shift_y, 0):max(-shift_y, 0) + source.shape[0], max(-shift_x, 0):max(-shift_x, 0) + source.shape[1]] = source
            return ImageGrid(shifted)

        flow = FlowField.constant(img.width, img.height, dx, dy)
        return OperatorsService.backward_warp(img, flow, SamplingKernel.bicubic())

    @staticmethod
    def _is_integer(value: float) -> bool:
        return abs(value - round(value)) <= configs.INTEGER_SHIFT_TOLERANCE

    @staticmethod
    def _check_divisible(img: ImageGrid, alpha: int):
        if img.width % alpha or img.height % alpha:
            logging.error(f"Image {img.width}x{img.height} is not divisible by alpha={alpha}")
            raise ValueError(f"Image {img.width}x{img.height} is not divisible by alpha={alpha}")
