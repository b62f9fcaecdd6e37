import logging
from typing import Optional
import numpy as np
import pandas as pd
import constants.configs as configs
from modules.core.models.flow_field import FlowField
from modules.core.models.image_grid import ImageGrid
from modules.core.models.image_sequence import ImageSequence
from modules.enums.alignment_mode import AlignmentMode
from modules.enums.hole_fill_policy import HoleFillPolicy
from modules.enums.solver_mode import SolverMode
from modules.reconstruct.models.aligned_stack import AlignedStack
from modules.reconstruct.models.cg_result import CgResult
from modules.reconstruct.schemas.reconstruction_config import ReconstructionConfig
from modules.reconstruct.services.alignment_service import AlignmentService
from modules.spmc.schemas.spmc_config import SpmcConfig
from modules.spmc.services.spmc_layer_service import SpmcLayerService


class ReconstructionService:
    """
    Service class for classical multi-frame HR reconstruction: feed-forward shift-and-add over an
    aligned stack, and conjugate gradient on the L2 normal equations of the imaging model.
    """

    @staticmethod
    def reconstruct(seq: ImageSequence, flows: list[Optional[FlowField]], cfg: ReconstructionConfig) -> ImageGrid:
        """
        Runs the solver selected by ``cfg.solver``.
        """
        if cfg.solver == SolverMode.CONJUGATE_GRADIENT:
            return ReconstructionService.solve_normal_equations(seq, flows, cfg)
        return ReconstructionService.shift_and_add(AlignmentService.align_stack(seq, flows, cfg), cfg)

    @staticmethod
    def shift_and_add(stack: AlignedStack, cfg: ReconstructionConfig) -> ImageGrid:
        """
        out[q] = sum_i J^H_i[q] / sum_i weight_i[q] where the denominator exceeds 1e-8; other pixels
        are holes filled by ``cfg.hole_fill`` (zero or the bicubic-upsampled reference).

        Args:
            stack (AlignedStack): Aligned frames and weights.
            cfg (ReconstructionConfig): Hole-fill policy.

        Returns:
            ImageGrid: The HR estimate.
        """
        if len(stack) == 0:
            logging.error("Cannot fuse an empty stack")
            raise ValueError("Cannot fuse an empty stack")

        numerator = np.zeros((stack.height, stack.width))
        denominator = np.zeros((stack.height, stack.width))
        for frame, weight in zip(stack.frames, stack.weights):
            numerator += frame.data
            denominator += weight.data

        covered = denominator > configs.HOLE_DENOMINATOR_THRESHOLD
        fused = np.divide(numerator, denominator, out=np.zeros_like(numerator), where=covered)

        holes = int(np.count_nonzero(~covered))
        if holes:
            if cfg.hole_fill == HoleFillPolicy.BICUBIC_REFERENCE:
                fused[~covered] = stack.reference_upsampled.data[~covered]
            logging.warning(f"{holes} HR pixels received no samples, filled with {cfg.hole_fill.value}")
        return ImageGrid(fused)

    @staticmethod
    def progressive_shift_and_add(
        stack: AlignedStack,
        cfg: ReconstructionConfig,
        order: Optional[list[int]] = None,
    ) -> list[ImageGrid]:
        """
        One estimate per time step: step k fuses the first k + 1 stack positions of ``order``
        (defaults to the temporal order, reference first).

        Returns:
            list[ImageGrid]: Progressive HR estimates; the last one fuses the whole stack.
        """
        order = order if order is not None else stack.temporal_order()
        if sorted(order) != list(range(len(stack))):
            logging.error(f"Order {order} is not a permutation of the {len(stack)} stack positions")
            raise ValueError(f"Order {order} is not a permutation of the {len(stack)} stack positions")
        return [ReconstructionService.shift_and_add(stack.subset(order[: step + 1]), cfg) for step in range(len(order))]

    @staticmethod
    def solve_normal_equations(seq: ImageSequence, flows: list[Optional[FlowField]], cfg: ReconstructionConfig) -> ImageGrid:
        """
        Solves (sum_i G_i^T G_i + eps I) x = sum_i G_i^T I^L_i by conjugate gradient, where G_i is the
        gather adjoint of the SPMC splat with F_{i->0}. See ``solve_normal_equations_with_report``.
        """
        return ReconstructionService.solve_normal_equations_with_report(seq, flows, cfg).solution

    @staticmethod
    def solve_normal_equations_with_report(
        seq: ImageSequence,
        flows: list[Optional[FlowField]],
        cfg: ReconstructionConfig,
    ) -> CgResult:
        """
        Matrix-free conjugate gradient from x0 = 0, stopping when ||r|| / ||b|| <= ``cfg.cg_tolerance``
        or after ``cfg.cg_max_iters`` iterations. Non-convergence is logged and reported, not raised.

        Args:
            seq (ImageSequence): The LR frames.
            flows (list[FlowField | None]): F_{i->0} per frame (reference entry ignored).
            cfg (ReconstructionConfig): Scale factor, kernel, eps and stopping rule.

        Returns:
            CgResult: Solution and relative residual history.
        """
        if cfg.alignment != AlignmentMode.SPMC:
            logging.error("The conjugate gradient solver needs SPMC alignment")
            raise ValueError("The conjugate gradient solver needs SPMC alignment")

        resolved = AlignmentService.resolve_flows(seq, flows)
        spmc_cfg = cfg.spmc_config
        hr_width, hr_height = spmc_cfg.hr_size(seq.width, seq.height)
        rhs = np.zeros((hr_height, hr_width))
        for frame, flow in zip(seq.frames, resolved):
            rhs += SpmcLayerService.spmc_forward(frame, flow, spmc_cfg).data

        def apply(x: np.ndarray) -> np.ndarray:
            return ReconstructionService.apply_normal_operator(x, resolved, spmc_cfg, cfg.tikhonov_eps)

        # Conjugate gradient (x0 = 0, so r0 = b)
        x = np.zeros_like(rhs)
        rhs_norm = float(np.sqrt(np.sum(rhs * rhs)))
        if rhs_norm == 0.0:
            return CgResult(ImageGrid(x), [0.0], 0, True)

        r = rhs.copy()
        p = r.copy()
        rs_old = float(np.sum(r * r))
        history = [np.sqrt(rs_old) / rhs_norm]
        iterations = 0
        while history[-1] > cfg.cg_tolerance and iterations < cfg.cg_max_iters:
            ap = apply(p)
            curvature = float(np.sum(p * ap))
            if curvature <= 0.0:
                logging.warning(f"CG stopped on non-positive curvature {curvature:.3e} at iteration {iterations}")
                break

            step = rs_old / curvature
            x = x + step * p
            r = r - step * ap
            rs_new = float(np.sum(r * r))
            history.append(np.sqrt(rs_new) / rhs_norm)
            iterations += 1

            p = r + (rs_new / rs_old) * p
            rs_old = rs_new
            logging.debug(f"CG iteration {iterations}: relative residual {history[-1]:.3e}")

        converged = bool(history[-1] <= cfg.cg_tolerance)
        if converged:
            logging.info(f"CG converged in {iterations} iterations (relative residual {history[-1]:.3e})")
        else:
            logging.warning(f"CG did not converge in {iterations} iterations (relative residual {history[-1]:.3e})")
        return CgResult(ImageGrid(x), [float(value) for value in history], iterations, converged)

    @staticmethod
    def apply_normal_operator(x: np.ndarray, flows: list[FlowField], spmc_cfg: SpmcConfig, tikhonov_eps: float) -> np.ndarray:
        """
        A x = sum_i spmc_forward(spmc_adjoint(x, F_i), F_i) + eps x on an HR array.
        """
        hr = ImageGrid(x)
        result = tikhonov_eps * x
        for flow in flows:
            lr = SpmcLayerService.spmc_adjoint(hr, flow, spmc_cfg)
            result = result + SpmcLayerService.spmc_forward(lr, flow, spmc_cfg).data
        return result

    @staticmethod
    def coverage_statistics(stack: AlignedStack) -> pd.DataFrame:
        """
        Per-frame splat coverage plus a final ``fused`` row for the summed weights.

        Columns: frame, offset, nonzero_fraction (share of nonzero J^H_i pixels), covered_fraction
        (share of pixels with weight above the hole threshold), weight_min, weight_mean, weight_max.
        The hole fraction of the fused result is 1 - covered_fraction of the ``fused`` row.
        """
        threshold = configs.HOLE_DENOMINATOR_THRESHOLD
        rows = []
        for position, (frame, weight) in enumerate(zip(stack.frames, stack.weights)):
            rows.append(
                {
                    "frame": str(position),
                    "offset": stack.offsets[position],
                    "nonzero_fraction": float(np.count_nonzero(frame.data)) / frame.data.size,
                    "covered_fraction": float(np.mean(weight.data > threshold)),
                    "weight_min": float(weight.data.min()),
                    "weight_mean": float(weight.data.mean()),
                    "weight_max": float(weight.data.max()),
                }
            )

        fused_numerator = np.sum([frame.data for frame in stack.frames], axis=0)
        fused_weight = np.sum([weight.data for weight in stack.weights], axis=0)
        rows.append(
            {
                "frame": "fused",
                "offset": 0,
                "nonzero_fraction": float(np.count_nonzero(fused_numerator)) / fused_numerator.size,
                "covered_fraction": float(np.mean(fused_weight > threshold)),
                "weight_min": float(fused_weight.min()),
                "weight_mean": float(fused_weight.mean()),
                "weight_max": float(fused_weight.max()),
            }
        )
        return pd.DataFrame(rows)

    @staticmethod
    def hole_fraction(stack: AlignedStack) -> float:
        fused_weight = np.sum([weight.data for weight in stack.weights], axis=0)
        return float(np.mean(fused_weight <= configs.HOLE_DENOMINATOR_THRESHOLD))
