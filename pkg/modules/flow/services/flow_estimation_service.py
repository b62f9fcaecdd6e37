import logging
import numpy as np
from scipy import sparse
from scipy.sparse import linalg
import constants.configs as configs
from modules.core.models.flow_field import FlowField
from modules.core.models.image_grid import ImageGrid
from modules.core.models.sampling_kernel import SamplingKernel
from modules.core.services.sampling_service import SamplingService
from modules.flow.models.flow_refinement_result import FlowRefinementResult
from modules.flow.models.warp_loss_report import WarpLossReport
from modules.flow.schemas.flow_estimation_config import FlowEstimationConfig
from modules.flow.services.warp_loss_service import WarpLossService
from modules.operators.schemas.blur_spec import BlurSpec
from modules.operators.services.operators_service import OperatorsService


class FlowEstimationService:
    """
    Classical motion estimation: descent on the smoothed warping loss with Armijo backtracking,
    wrapped in a coarse-to-fine image pyramid.
    """

    @staticmethod
    def refine_flow(ref: ImageGrid, target: ImageGrid, init: FlowField, cfg: FlowEstimationConfig) -> FlowField:
        """
        Refines ``init`` (F_{i->0}) by minimizing the warping loss between ``ref`` and ``target``.
        """
        return FlowEstimationService.refine_flow_with_trace(ref, target, init, cfg).flow

    @staticmethod
    def refine_flow_with_trace(
        ref: ImageGrid,
        target: ImageGrid,
        init: FlowField,
        cfg: FlowEstimationConfig,
        level: int = 0,
    ) -> FlowRefinementResult:
        """
        Refines ``init`` and records the smoothed loss of every accepted iterate.

        Each iteration moves along a Gauss-Newton direction of the reweighted loss (or the plain
        negative gradient when ``use_preconditioner`` is off) and halves the step until the Armijo
        condition holds, so the recorded totals never increase. The returned
        flow also never has a larger exact (unsmoothed) loss than ``init``.

        Args:
            ref (ImageGrid): Reference frame I_0.
            target (ImageGrid): Frame I_i.
            init (FlowField): Initial F_{i->0}.
            cfg (FlowEstimationConfig): Optimizer settings.
            level (int): Pyramid level recorded in the trace.

        Returns:
            FlowRefinementResult: Refined flow and its loss trace.
        """
        if not ref.same_shape(target) or not init.matches(ref):
            logging.error(f"Shape mismatch: ref {ref.shape}, target {target.shape}, flow {init.shape}")
            raise ValueError(f"Shape mismatch: ref {ref.shape}, target {target.shape}, flow {init.shape}")

        kernel = cfg.sampling_kernel
        u, v = np.array(init.u), np.array(init.v)
        report, grad_u, grad_v = WarpLossService.warp_loss_gradient(ref, target, init, cfg.lambda1, kernel, cfg.epsilon)
        trace = [(level, report)]

        for iteration in range(cfg.iterations_per_level):
            if cfg.use_preconditioner:
                dir_u, dir_v = FlowEstimationService._gauss_newton_direction(
                    ref, target, FlowField(u, v), grad_u, grad_v, cfg
                )
            else:
                dir_u, dir_v = -grad_u, -grad_v

            slope = float(np.sum(grad_u * dir_u) + np.sum(grad_v * dir_v))
            if not slope < 0.0:
                logging.debug(f"Level {level}: stationary point reached at iteration {iteration}")
                break

            step = FlowEstimationService._armijo_step(ref, target, u, v, dir_u, dir_v, slope, report.total, cfg)
            if step is None:
                logging.debug(f"Level {level}: line search stalled at iteration {iteration}")
                break

            u, v = u + step * dir_u, v + step * dir_v
            report, grad_u, grad_v = WarpLossService.warp_loss_gradient(
                ref, target, FlowField(u, v), cfg.lambda1, kernel, cfg.epsilon
            )
            trace.append((level, report))
            logging.debug(f"Level {level} iteration {iteration}: step={step:.4g} {report}")

        refined = FlowField(u, v)
        initial_exact = WarpLossService.warp_loss(ref, target, init, cfg.lambda1, kernel).total
        refined_exact = WarpLossService.warp_loss(ref, target, refined, cfg.lambda1, kernel).total
        if refined_exact > initial_exact:
            logging.warning(f"Level {level}: refined flow raised the exact loss ({refined_exact:.6g} > {initial_exact:.6g}), keeping the initial flow")
            return FlowRefinementResult(init, trace[:1])
        return FlowRefinementResult(refined, trace)

    @staticmethod
    def estimate_flow_pyramidal(ref: ImageGrid, target: ImageGrid, cfg: FlowEstimationConfig) -> FlowField:
        """
        Coarse-to-fine estimate of F_{i->0} starting from zero flow at the coarsest level.
        """
        return FlowEstimationService.estimate_flow_pyramidal_with_trace(ref, target, cfg).flow

    @staticmethod
    def estimate_flow_pyramidal_with_trace(
        ref: ImageGrid,
        target: ImageGrid,
        cfg: FlowEstimationConfig,
    ) -> FlowRefinementResult:
        """
        Builds a factor-2 Gaussian pyramid, refines per level from coarse to fine and
        upsamples the flow (values x2) between levels.

        Returns:
            FlowRefinementResult: Finest-level flow and the concatenated trace of all levels.
        """
        if not ref.same_shape(target):
            logging.error(f"Frame sizes differ: {ref.shape} vs {target.shape}")
            raise ValueError(f"Frame sizes differ: {ref.shape} vs {target.shape}")
        minimum_side = 2 ** (cfg.pyramid_levels - 1)
        if min(ref.width, ref.height) < minimum_side:
            logging.error(f"Image {ref.width}x{ref.height} too small for {cfg.pyramid_levels} pyramid levels")
            raise ValueError(f"Image {ref.width}x{ref.height} too small for {cfg.pyramid_levels} pyramid levels")

        ref_pyramid = FlowEstimationService.build_pyramid(ref, cfg.pyramid_levels)
        target_pyramid = FlowEstimationService.build_pyramid(target, cfg.pyramid_levels)

        coarsest = ref_pyramid[-1]
        flow = FlowField.zeros(coarsest.width, coarsest.height)
        trace: list[tuple[int, WarpLossReport]] = []
        for level in reversed(range(cfg.pyramid_levels)):
            level_ref, level_target = ref_pyramid[level], target_pyramid[level]
            if not flow.matches(level_ref):
                flow = FlowEstimationService.upsample_flow(flow, level_ref.width, level_ref.height)

            result = FlowEstimationService.refine_flow_with_trace(level_ref, level_target, flow, cfg, level)
            flow = result.flow
            trace.extend(result.trace)
            logging.info(f"Pyramid level {level} ({level_ref.width}x{level_ref.height}): {result.trace[-1][1]}")

        return FlowRefinementResult(flow, trace)

    @staticmethod
    def build_pyramid(img: ImageGrid, levels: int) -> list[ImageGrid]:
        """
        Level 0 is ``img``; each further level is Gaussian-blurred and subsampled by 2 (keeping index 0).
        """
        antialias = BlurSpec(sigma=configs.PYRAMID_ANTIALIAS_SIGMA)
        pyramid = [img]
        for _ in range(levels - 1):
            blurred = OperatorsService.gaussian_blur(pyramid[-1], antialias)
            pyramid.append(ImageGrid(blurred.data[::2, ::2]))
        return pyramid

    @staticmethod
    def upsample_flow(flow: FlowField, width: int, height: int) -> FlowField:
        """
        Bilinear upsampling of (u, v) to ``width`` x ``height`` (fine pixel x reads coarse x / 2,
        clamped to the coarse grid), with the vectors scaled by 2.
        """
        xs, ys = SamplingService.pixel_coordinates(width, height)
        coarse_x = np.clip(xs / 2.0, 0.0, flow.width - 1.0)
        coarse_y = np.clip(ys / 2.0, 0.0, flow.height - 1.0)
        kernel = SamplingKernel.bilinear()
        u = SamplingService.gather(flow.u, coarse_x, coarse_y, kernel)
        v = SamplingService.gather(flow.v, coarse_x, coarse_y, kernel)
        return FlowField(2.0 * u, 2.0 * v)

    @staticmethod
    def _armijo_step(ref, target, u, v, dir_u, dir_v, slope, current_total, cfg: FlowEstimationConfig):
        step = cfg.step_size
        kernel = cfg.sampling_kernel
        for _ in range(configs.ARMIJO_MAX_HALVINGS):
            candidate = FlowField(u + step * dir_u, v + step * dir_v)
            candidate_total = WarpLossService.warp_loss(ref, target, candidate, cfg.lambda1, kernel, cfg.epsilon).total
            if candidate_total <= current_total + configs.ARMIJO_C * step * slope:
                return step
            step *= configs.ARMIJO_SHRINK
        return None

    @staticmethod
    def _gauss_newton_direction(ref, target, flow: FlowField, grad_u, grad_v, cfg: FlowEstimationConfig):
        # IRLS Gauss-Newton system over all pixels: a 2x2 data block w J J^T per pixel, the reweighted
        # TV term as a weighted Laplacian per component, and damping. Solved by Jacobi-preconditioned CG
        # from zero, so any truncated solve is still a descent direction.
        residual, warp_dx, warp_dy = WarpLossService.linearize(ref, target, flow, cfg.sampling_kernel)
        data_weight = 1.0 / np.sqrt(residual * residual + cfg.epsilon * cfg.epsilon)
        damping = configs.PRECONDITIONER_DAMPING

        h_uu = sparse.diags((data_weight * warp_dx * warp_dx).ravel() + damping)
        h_vv = sparse.diags((data_weight * warp_dy * warp_dy).ravel() + damping)
        h_uv = sparse.diags((data_weight * warp_dx * warp_dy).ravel())
        if cfg.lambda1 > 0.0:
            h_uu = h_uu + cfg.lambda1 * FlowEstimationService._tv_laplacian(flow.u, cfg.epsilon)
            h_vv = h_vv + cfg.lambda1 * FlowEstimationService._tv_laplacian(flow.v, cfg.epsilon)

        system = sparse.bmat([[h_uu, h_uv], [h_uv, h_vv]], format="csr")
        rhs = -np.concatenate([grad_u.ravel(), grad_v.ravel()])
        jacobi = sparse.diags(1.0 / system.diagonal())
        direction, info = linalg.cg(
            system,
            rhs,
            rtol=configs.FLOW_DIRECTION_CG_RTOL,
            maxiter=configs.FLOW_DIRECTION_CG_MAX_ITERS,
            M=jacobi,
        )
        if info > 0:
            logging.debug(f"Direction solve stopped after {info} CG iterations")

        pixels = grad_u.size
        return direction[:pixels].reshape(grad_u.shape), direction[pixels:].reshape(grad_v.shape)

    @staticmethod
    def _tv_laplacian(component: np.ndarray, epsilon: float) -> sparse.csr_matrix:
        """
        D_x^T diag(w_x) D_x + D_y^T diag(w_y) D_y on the row-major flattened component, with the
        IRLS weights w = 1 / sqrt(d^2 + eps^2) of its forward differences d.
        """
        height, width = component.shape
        dx, dy = WarpLossService.forward_differences(component)
        laplacian = sparse.csr_matrix((height * width, height * width))
        if width > 1:
            weight_x = 1.0 / np.sqrt(dx[:, :-1] ** 2 + epsilon * epsilon)
            diff_x = sparse.kron(sparse.identity(height), FlowEstimationService._difference_matrix(width), format="csr")
            laplacian = laplacian + diff_x.T @ sparse.diags(weight_x.ravel()) @ diff_x
        if height > 1:
            weight_y = 1.0 / np.sqrt(dy[:-1, :] ** 2 + epsilon * epsilon)
            diff_y = sparse.kron(FlowEstimationService._difference_matrix(height), sparse.identity(width), format="csr")
            laplacian = laplacian + diff_y.T @ sparse.diags(weight_y.ravel()) @ diff_y
        return sparse.csr_matrix(laplacian)

    @staticmethod
    def _difference_matrix(size: int) -> sparse.csr_matrix:
        # (size - 1) x size forward differences
        ones = np.ones(size - 1)
        return sparse.diags([-ones, ones], [0, 1], shape=(size - 1, size), format="csr")
