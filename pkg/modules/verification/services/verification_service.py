import logging
import time
from typing import Callable
import numpy as np
import pandas as pd
import constants.configs as configs
from modules.core.models.flow_field import FlowField
from modules.core.models.image_grid import ImageGrid
from modules.core.models.image_sequence import ImageSequence
from modules.core.models.sampling_kernel import SamplingKernel
from modules.enums.hole_fill_policy import HoleFillPolicy
from modules.enums.kernel_kind import KernelKind
from modules.enums.operator_kind import OperatorKind
from modules.enums.solver_mode import SolverMode
from modules.enums.verification_suite import VerificationSuite
from modules.evaldata.schemas.synthetic_sequence_spec import SyntheticSequenceSpec
from modules.evaldata.services.degradation_service import DegradationService
from modules.evaldata.services.metrics_service import MetricsService
from modules.flow.services.warp_loss_service import WarpLossService
from modules.operators.schemas.blur_spec import BlurSpec
from modules.operators.schemas.decimation_factor import DecimationFactor
from modules.operators.services.materialization_service import MaterializationService
from modules.operators.services.operators_service import OperatorsService
from modules.reconstruct.schemas.reconstruction_config import ReconstructionConfig
from modules.reconstruct.services.alignment_service import AlignmentService
from modules.reconstruct.services.reconstruction_service import ReconstructionService
from modules.spmc.schemas.spmc_config import SpmcConfig
from modules.spmc.services.spmc_layer_service import SpmcLayerService
from modules.verification.models.check_result import CheckResult

ADJOINT_SIDE = 8
GRADCHECK_SIDE = 6
RECOVERY_HR_SIDE = 32


class VerificationService:
    """
    Randomized property checks of the operators, gradients and the exact-recovery round trip.

    Every check runs ``trials`` seeded instances and reports the worst error against a fixed tolerance.
    """

    @staticmethod
    def run(suite: VerificationSuite, seed: int = configs.DEFAULT_SEED, trials: int = configs.VERIFY_DEFAULT_TRIALS) -> list[CheckResult]:
        """
        Runs one suite (or all of them).

        Args:
            suite (VerificationSuite): Which properties to check.
            seed (int): Seed of the random instances.
            trials (int): Instances per property.

        Returns:
            list[CheckResult]: One result per property.
        """
        if trials < 1:
            logging.error(f"Trials must be positive, got {trials}")
            raise ValueError(f"Trials must be positive, got {trials}")

        runners = {
            VerificationSuite.ADJOINT: VerificationService.run_adjoint_suite,
            VerificationSuite.GRADCHECK: VerificationService.run_gradcheck_suite,
            VerificationSuite.RECOVERY: VerificationService.run_recovery_suite,
        }
        results = []
        for concrete in suite.expand():
            results.extend(runners[concrete](np.random.default_rng(seed), trials))

        for result in results:
            if result.passed:
                logging.info(str(result))
            else:
                logging.error(str(result))
        return results

    @staticmethod
    def report_frame(results: list[CheckResult]) -> pd.DataFrame:
        return pd.DataFrame([result.as_dict() for result in results])

    @staticmethod
    def all_passed(results: list[CheckResult]) -> bool:
        return all(result.passed for result in results)

    # Adjoint and identity checks

    @staticmethod
    def run_adjoint_suite(rng: np.random.Generator, trials: int) -> list[CheckResult]:
        side = ADJOINT_SIDE
        tolerance = configs.VERIFY_ADJOINT_TOLERANCE
        factor = DecimationFactor(alpha=2)

        def decimation_gap():
            x = rng.standard_normal((side, side))
            y = rng.standard_normal((side // 2, side // 2))
            left = np.vdot(OperatorsService.decimate(ImageGrid(x), factor).data, y)
            right = np.vdot(x, OperatorsService.zero_upsample(ImageGrid(y), factor).data)
            return abs(left - right)

        def warp_gap(kernel: SamplingKernel):
            def gap():
                x, y = rng.standard_normal((side, side)), rng.standard_normal((side, side))
                flow = VerificationService._random_flow(rng, side, side, 2.0)
                left = np.vdot(OperatorsService.backward_warp(ImageGrid(x), flow, kernel).data, y)
                right = np.vdot(x, OperatorsService.forward_warp(ImageGrid(y), flow, kernel).data)
                return abs(left - right)
            return gap

        def blur_gap():
            x, y = rng.standard_normal((side, side)), rng.standard_normal((side, side))
            spec = BlurSpec(sigma=float(rng.uniform(0.5, 2.0)))
            left = np.vdot(OperatorsService.gaussian_blur(ImageGrid(x), spec).data, y)
            right = np.vdot(x, OperatorsService.gaussian_blur(ImageGrid(y), spec).data)
            return abs(left - right)

        def spmc_gap():
            cfg = SpmcConfig(
                alpha=float(rng.choice([1.5, 2.0, 3.0])),
                kernel=KernelKind.BICUBIC if rng.random() < 0.5 else KernelKind.BILINEAR,
                center_aligned=bool(rng.random() < 0.5),
            )
            hr_width, hr_height = cfg.hr_size(side, side)
            x = rng.standard_normal((side, side))
            y = rng.standard_normal((hr_height, hr_width))
            flow = VerificationService._random_flow(rng, side, side, 2.0)
            left = np.vdot(SpmcLayerService.spmc_forward(ImageGrid(x), flow, cfg).data, y)
            right = np.vdot(x, SpmcLayerService.spmc_adjoint(ImageGrid(y), flow, cfg).data)
            return abs(left - right)

        def normal_operator_gap():
            cfg = SpmcConfig(alpha=2.0)
            flows = [FlowField.zeros(side, side), VerificationService._random_flow(rng, side, side, 1.0)]
            x = rng.standard_normal((2 * side, 2 * side))
            y = rng.standard_normal((2 * side, 2 * side))
            eps = configs.DEFAULT_TIKHONOV_EPS
            left = np.vdot(ReconstructionService.apply_normal_operator(x, flows, cfg, eps), y)
            right = np.vdot(x, ReconstructionService.apply_normal_operator(y, flows, cfg, eps))
            return abs(left - right)

        def materialized_transpose_gap():
            flow = VerificationService._random_flow(rng, side, side, 2.0)
            warp = MaterializationService.materialize_operator(OperatorKind.BACKWARD_WARP, side, side, flow=flow)
            splat = MaterializationService.materialize_operator(OperatorKind.FORWARD_WARP, side, side, flow=flow)
            return float(np.max(np.abs(warp.T - splat)))

        identity_trials = min(trials, configs.VERIFY_IDENTITY_TRIALS)

        def spmc_unit_scale_gap():
            img = ImageGrid(rng.standard_normal((side, side)))
            flow = VerificationService._random_flow(rng, side, side, 2.0)
            spmc = SpmcLayerService.spmc_forward(img, flow, SpmcConfig(alpha=1.0))
            warp = OperatorsService.forward_warp(img, flow, SamplingKernel.bilinear())
            return float(np.max(np.abs(spmc.data - warp.data)))

        def spmc_zero_flow_gap():
            alpha = int(rng.integers(1, 5))
            img = ImageGrid(rng.standard_normal((side, side)))
            spmc = SpmcLayerService.spmc_forward(img, FlowField.zeros(side, side), SpmcConfig(alpha=float(alpha)))
            upsampled = OperatorsService.zero_upsample(img, DecimationFactor(alpha=alpha))
            return float(np.max(np.abs(spmc.data - upsampled.data)))

        return [
            VerificationService._check("adjoint", "decimation", trials, tolerance, decimation_gap),
            VerificationService._check("adjoint", "warp_bilinear", trials, tolerance, warp_gap(SamplingKernel.bilinear())),
            VerificationService._check("adjoint", "warp_bicubic", trials, tolerance, warp_gap(SamplingKernel.bicubic())),
            VerificationService._check("adjoint", "gaussian_blur", trials, tolerance, blur_gap),
            VerificationService._check("adjoint", "spmc", trials, tolerance, spmc_gap),
            VerificationService._check("adjoint", "normal_operator_symmetry", trials, tolerance, normal_operator_gap),
            VerificationService._check("adjoint", "materialized_warp_transpose", trials, tolerance, materialized_transpose_gap),
            VerificationService._check("adjoint", "spmc_unit_scale_is_forward_warp", identity_trials, 0.0, spmc_unit_scale_gap),
            VerificationService._check("adjoint", "spmc_zero_flow_is_zero_upsample", identity_trials, 0.0, spmc_zero_flow_gap),
        ]

    # Gradient checks

    @staticmethod
    def run_gradcheck_suite(rng: np.random.Generator, trials: int) -> list[CheckResult]:
        side = GRADCHECK_SIDE
        step = configs.VERIFY_FD_STEP

        def random_layer():
            cfg = SpmcConfig(
                alpha=float(rng.choice([1.0, 2.0, 3.0])),
                kernel=KernelKind.BICUBIC if rng.random() < 0.5 else KernelKind.BILINEAR,
            )
            img = ImageGrid(rng.standard_normal((side, side)))
            flow = VerificationService._kink_free_flow(rng, side, side, cfg.alpha)
            hr_width, hr_height = cfg.hr_size(side, side)
            upstream = ImageGrid(rng.standard_normal((hr_height, hr_width)))
            return cfg, img, flow, upstream

        def layer_loss(img, flow, cfg, upstream):
            return float(np.vdot(SpmcLayerService.spmc_forward(img, flow, cfg).data, upstream.data))

        def image_gradient_error():
            cfg, img, flow, upstream = random_layer()
            analytic = SpmcLayerService.spmc_backward(img, flow, cfg, upstream).d_image.data
            numeric = VerificationService._central_differences(
                img.data, lambda data: layer_loss(ImageGrid(data), flow, cfg, upstream), step
            )
            return VerificationService._relative_error(analytic, numeric)

        def flow_gradient_error():
            cfg, img, flow, upstream = random_layer()
            gradients = SpmcLayerService.spmc_backward(img, flow, cfg, upstream)
            numeric_u = VerificationService._central_differences(
                flow.u, lambda u: layer_loss(img, FlowField(u, flow.v), cfg, upstream), step
            )
            numeric_v = VerificationService._central_differences(
                flow.v, lambda v: layer_loss(img, FlowField(flow.u, v), cfg, upstream), step
            )
            return max(
                VerificationService._relative_error(gradients.d_flow_u.data, numeric_u),
                VerificationService._relative_error(gradients.d_flow_v.data, numeric_v),
            )

        def warp_loss_gradient_error():
            warp_side = ADJOINT_SIDE
            smooth = BlurSpec(sigma=1.0)
            ref = OperatorsService.gaussian_blur(ImageGrid(rng.random((warp_side, warp_side))), smooth)
            target = OperatorsService.gaussian_blur(ImageGrid(rng.random((warp_side, warp_side))), smooth)
            flow = VerificationService._kink_free_flow(rng, warp_side, warp_side, 1.0)
            kernel = SamplingKernel.bilinear()
            eps = configs.VERIFY_WARP_EPSILON
            lambda1 = configs.DEFAULT_LAMBDA1

            def loss(u, v):
                return WarpLossService.warp_loss(ref, target, FlowField(u, v), lambda1, kernel, eps).total

            _, grad_u, grad_v = WarpLossService.warp_loss_gradient(ref, target, flow, lambda1, kernel, eps)
            numeric_u = VerificationService._central_differences(flow.u, lambda u: loss(u, flow.v), step)
            numeric_v = VerificationService._central_differences(flow.v, lambda v: loss(flow.u, v), step)
            return max(
                VerificationService._relative_error(grad_u, numeric_u),
                VerificationService._relative_error(grad_v, numeric_v),
            )

        return [
            VerificationService._check("gradcheck", "spmc_image_gradient", trials, configs.VERIFY_IMAGE_GRADIENT_TOLERANCE, image_gradient_error),
            VerificationService._check("gradcheck", "spmc_flow_gradient", trials, configs.VERIFY_FLOW_GRADIENT_TOLERANCE, flow_gradient_error),
            VerificationService._check("gradcheck", "warp_loss_gradient", trials, configs.VERIFY_WARP_GRADIENT_TOLERANCE, warp_loss_gradient_error),
        ]

    # Exact recovery checks

    @staticmethod
    def run_recovery_suite(rng: np.random.Generator, trials: int) -> list[CheckResult]:
        tolerance = configs.VERIFY_RECOVERY_TOLERANCE

        def recovery_error(alpha: int):
            def error():
                hr = ImageGrid(rng.random((RECOVERY_HR_SIDE, RECOVERY_HR_SIDE)))
                reconstruction = VerificationService._exact_cover_reconstruction(hr, alpha, SolverMode.SHIFT_AND_ADD)
                return VerificationService._interior_error(reconstruction, hr, alpha)
            return error

        def psnr_shortfall():
            hr = ImageGrid(rng.random((RECOVERY_HR_SIDE, RECOVERY_HR_SIDE)))
            reconstruction = VerificationService._exact_cover_reconstruction(hr, 2, SolverMode.SHIFT_AND_ADD)
            border = 2
            psnr = MetricsService.psnr(MetricsService.crop_border(reconstruction, border), MetricsService.crop_border(hr, border))
            return configs.PSNR_CAP_DB - psnr

        def cg_gap():
            hr = ImageGrid(rng.random((RECOVERY_HR_SIDE, RECOVERY_HR_SIDE)))
            fused = VerificationService._exact_cover_reconstruction(hr, 2, SolverMode.SHIFT_AND_ADD)
            solved = VerificationService._exact_cover_reconstruction(hr, 2, SolverMode.CONJUGATE_GRADIENT)
            return float(np.max(np.abs(fused.data - solved.data)))

        def duplicated_reference_gap():
            reference = ImageGrid(rng.random((RECOVERY_HR_SIDE // 2, RECOVERY_HR_SIDE // 2)))
            copies = int(rng.integers(2, 6))
            cfg = ReconstructionConfig(alpha=2.0, hole_fill=HoleFillPolicy.ZERO)
            single = ReconstructionService.shift_and_add(
                AlignmentService.align_stack(ImageSequence([reference]), [None], cfg), cfg
            )
            zero_flow = FlowField.zeros(reference.width, reference.height)
            repeated = ReconstructionService.shift_and_add(
                AlignmentService.align_stack(ImageSequence([reference] * copies), [None] + [zero_flow] * (copies - 1), cfg), cfg
            )
            return float(np.max(np.abs(single.data - repeated.data)))

        return [
            VerificationService._check("recovery", "exact_cover_alpha2", trials, tolerance, recovery_error(2)),
            VerificationService._check("recovery", "exact_cover_alpha4", trials, tolerance, recovery_error(4)),
            VerificationService._check("recovery", "psnr_reaches_cap", trials, 0.0, psnr_shortfall),
            VerificationService._check("recovery", "cg_matches_shift_and_add", trials, 1e-6, cg_gap),
            VerificationService._check("recovery", "duplicated_reference", trials, 1e-12, duplicated_reference_gap),
        ]

    @staticmethod
    def phase_covering_shifts(alpha: int) -> list[tuple[float, float]]:
        """
        All alpha^2 shifts (j / alpha, i / alpha), reference (0, 0) first.
        """
        return [(j / alpha, i / alpha) for i in range(alpha) for j in range(alpha)]

    @staticmethod
    def _exact_cover_reconstruction(hr: ImageGrid, alpha: int, solver: SolverMode) -> ImageGrid:
        synthetic = DegradationService.make_exact_sequence(
            SyntheticSequenceSpec(hr_source=hr, shifts=VerificationService.phase_covering_shifts(alpha), alpha=alpha)
        )
        cfg = ReconstructionConfig(alpha=float(alpha), solver=solver, tikhonov_eps=0.0, hole_fill=HoleFillPolicy.ZERO)
        return ReconstructionService.reconstruct(synthetic.sequence, synthetic.flows, cfg)

    @staticmethod
    def _interior_error(estimate: ImageGrid, truth: ImageGrid, border: int) -> float:
        return float(np.max(np.abs(MetricsService.crop_border(estimate, border).data - MetricsService.crop_border(truth, border).data)))

    @staticmethod
    def _check(suite: str, name: str, trials: int, tolerance: float, measure: Callable[[], float]) -> CheckResult:
        start = time.perf_counter()
        worst = max(measure() for _ in range(trials))
        return CheckResult(suite, name, trials, worst, tolerance, time.perf_counter() - start)

    @staticmethod
    def _random_flow(rng: np.random.Generator, width: int, height: int, magnitude: float) -> FlowField:
        return FlowField(
            rng.uniform(-magnitude, magnitude, (height, width)),
            rng.uniform(-magnitude, magnitude, (height, width)),
        )

    @staticmethod
    def _kink_free_flow(rng: np.random.Generator, width: int, height: int, alpha: float) -> FlowField:
        # Sampling positions alpha * (x + u) keep at least the kink margin from every integer.
        margin = configs.VERIFY_KINK_MARGIN
        xs, ys = np.meshgrid(np.arange(width, dtype=np.float64), np.arange(height, dtype=np.float64))
        target_x = alpha * xs + rng.integers(-2, 2, (height, width)) + rng.uniform(margin, 1.0 - margin, (height, width))
        target_y = alpha * ys + rng.integers(-2, 2, (height, width)) + rng.uniform(margin, 1.0 - margin, (height, width))
        return FlowField(target_x / alpha - xs, target_y / alpha - ys)

    @staticmethod
    def _central_differences(values: np.ndarray, loss: Callable[[np.ndarray], float], step: float) -> np.ndarray:
        gradient = np.zeros_like(values)
        for index in np.ndindex(values.shape):
            plus, minus = np.array(values), np.array(values)
            plus[index] += step
            minus[index] -= step
            gradient[index] = (loss(plus) - loss(minus)) / (2.0 * step)
        return gradient

    @staticmethod
    def _relative_error(analytic: np.ndarray, numeric: np.ndarray) -> float:
        # max-norm error over the largest numeric entry; the floor only guards an all-zero gradient
        scale = max(float(np.max(np.abs(numeric))), configs.VERIFY_GRADIENT_SCALE_FLOOR)
        return float(np.max(np.abs(analytic - numeric))) / scale
