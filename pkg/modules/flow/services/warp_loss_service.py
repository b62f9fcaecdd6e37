import logging
from typing import Optional
import numpy as np
import constants.configs as configs
from modules.core.models.flow_field import FlowField
from modules.core.models.image_grid import ImageGrid
from modules.core.models.image_sequence import ImageSequence
from modules.core.models.sampling_kernel import SamplingKernel
from modules.core.services.sampling_service import SamplingService
from modules.enums.kernel_kind import KernelKind
from modules.flow.models.warp_loss_report import WarpLossReport


class WarpLossService:
    """
    Service class for the unsupervised warping loss

        sum_p |target[p] - W(ref, F)[p]| + lambda1 * TV(F)

    where W is the backward warp of the reference with F = F_{i->0} and TV is the anisotropic total
    variation of (u, v) with forward differences (last row/column contribute 0).

    With ``epsilon > 0`` both absolute values are smoothed to sqrt(x^2 + eps^2) - eps.
    """

    @staticmethod
    def penalty(x: np.ndarray, epsilon: float) -> np.ndarray:
        if epsilon > 0.0:
            return np.sqrt(x * x + epsilon * epsilon) - epsilon
        return np.abs(x)

    @staticmethod
    def penalty_slope(x: np.ndarray, epsilon: float) -> np.ndarray:
        # sign(0) = 0 for the unsmoothed subgradient
        if epsilon > 0.0:
            return x / np.sqrt(x * x + epsilon * epsilon)
        return np.sign(x)

    @staticmethod
    def forward_differences(field: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        dx = np.zeros_like(field)
        dy = np.zeros_like(field)
        dx[:, :-1] = field[:, 1:] - field[:, :-1]
        dy[:-1, :] = field[1:, :] - field[:-1, :]
        return dx, dy

    @staticmethod
    def warp_loss(
        ref: ImageGrid,
        target: ImageGrid,
        flow: FlowField,
        lambda1: float = configs.DEFAULT_LAMBDA1,
        kernel: Optional[SamplingKernel] = None,
        epsilon: float = 0.0,
    ) -> WarpLossReport:
        """
        Evaluates the warping loss of ``flow`` (orientation F_{i->0}: target coordinates into the reference).

        Args:
            ref (ImageGrid): Reference frame I_0.
            target (ImageGrid): Frame I_i.
            flow (FlowField): F_{i->0}.
            lambda1 (float): TV weight.
            kernel (SamplingKernel, optional): Warp kernel. Defaults to bilinear.
            epsilon (float): Charbonnier smoothing; 0 evaluates the exact L1 terms.

        Returns:
            WarpLossReport: data term, TV term and total.
        """
        WarpLossService._check_inputs(ref, target, flow)
        residual = WarpLossService._residual(ref, target, flow, kernel or SamplingKernel.bilinear())
        return WarpLossReport(
            data_term=WarpLossService.penalty(residual, epsilon).sum(),
            tv_term=WarpLossService._total_variation(flow, epsilon),
            lambda1=lambda1,
        )

    @staticmethod
    def warp_loss_gradient(
        ref: ImageGrid,
        target: ImageGrid,
        flow: FlowField,
        lambda1: float = configs.DEFAULT_LAMBDA1,
        kernel: Optional[SamplingKernel] = None,
        epsilon: float = configs.CHARBONNIER_EPSILON,
    ) -> tuple[WarpLossReport, np.ndarray, np.ndarray]:
        """
        Warping loss together with its analytic gradient w.r.t. (u, v).

        The data-term gradient goes through the sampler derivative:
        d/du_p = -psi'(r_p) * sum_q ref[q] M'(x_p + u_p - x_q) M(y_p + v_p - y_q).

        Returns:
            tuple[WarpLossReport, np.ndarray, np.ndarray]: (report, dL/du, dL/dv).
        """
        WarpLossService._check_inputs(ref, target, flow)
        residual, warp_dx, warp_dy = WarpLossService.linearize(ref, target, flow, kernel or SamplingKernel.bilinear())
        slope = WarpLossService.penalty_slope(residual, epsilon)

        grad_u = -slope * warp_dx + lambda1 * WarpLossService._tv_gradient(flow.u, epsilon)
        grad_v = -slope * warp_dy + lambda1 * WarpLossService._tv_gradient(flow.v, epsilon)

        report = WarpLossReport(
            data_term=WarpLossService.penalty(residual, epsilon).sum(),
            tv_term=WarpLossService._total_variation(flow, epsilon),
            lambda1=lambda1,
        )
        return report, grad_u, grad_v

    @staticmethod
    def sequence_warp_loss(
        seq: ImageSequence,
        flows: list[Optional[FlowField]],
        lambda1: float = configs.DEFAULT_LAMBDA1,
        kernel: Optional[SamplingKernel] = None,
        epsilon: float = 0.0,
    ) -> WarpLossReport:
        """
        Sums ``warp_loss`` over every non-reference frame of the sequence.

        Args:
            seq (ImageSequence): The LR sequence.
            flows (list[FlowField | None]): F_{i->0} per frame; the reference entry is ignored.
        """
        if len(flows) != len(seq):
            logging.error(f"Expected {len(seq)} flows, got {len(flows)}")
            raise ValueError(f"Expected {len(seq)} flows, got {len(flows)}")

        total = WarpLossReport(0.0, 0.0, lambda1)
        for index, frame in enumerate(seq.frames):
            if index == seq.reference_index:
                continue
            if flows[index] is None:
                logging.error(f"Missing flow for frame {index}")
                raise ValueError(f"Missing flow for frame {index}")
            total = total + WarpLossService.warp_loss(seq.reference, frame, flows[index], lambda1, kernel, epsilon)
        return total

    @staticmethod
    def linearize(
        ref: ImageGrid,
        target: ImageGrid,
        flow: FlowField,
        kernel: SamplingKernel,
    ) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """
        Residual target - W(ref, F) and the partial derivatives of W(ref, F) w.r.t. u and v.

        The bilinear M' is 0 at its kinks, so a sample landing exactly on a pixel column (row) would
        get a zero derivative along x (y). There the mean of the two one-sided slopes is used, which
        is the central difference of ``ref``. Every other position keeps the analytic derivative.
        """
        xs, ys = SamplingService.pixel_coordinates(ref.width, ref.height)
        sample_x, sample_y = xs + flow.u, ys + flow.v
        residual = target.data - SamplingService.gather(ref.data, sample_x, sample_y, kernel)
        warp_dx = SamplingService.gather(ref.data, sample_x, sample_y, kernel, derivative_x=True)
        warp_dy = SamplingService.gather(ref.data, sample_x, sample_y, kernel, derivative_y=True)

        if kernel.kind == KernelKind.BILINEAR:
            on_column = np.floor(sample_x) == sample_x
            if on_column.any():
                left = SamplingService.gather(ref.data, sample_x - 0.5, sample_y, kernel, derivative_x=True)
                right = SamplingService.gather(ref.data, sample_x + 0.5, sample_y, kernel, derivative_x=True)
                warp_dx = np.where(on_column, 0.5 * (left + right), warp_dx)
            on_row = np.floor(sample_y) == sample_y
            if on_row.any():
                above = SamplingService.gather(ref.data, sample_x, sample_y - 0.5, kernel, derivative_y=True)
                below = SamplingService.gather(ref.data, sample_x, sample_y + 0.5, kernel, derivative_y=True)
                warp_dy = np.where(on_row, 0.5 * (above + below), warp_dy)
        return residual, warp_dx, warp_dy

    @staticmethod
    def _residual(ref: ImageGrid, target: ImageGrid, flow: FlowField, kernel: SamplingKernel) -> np.ndarray:
        xs, ys = SamplingService.pixel_coordinates(ref.width, ref.height)
        return target.data - SamplingService.gather(ref.data, xs + flow.u, ys + flow.v, kernel)

    @staticmethod
    def _total_variation(flow: FlowField, epsilon: float) -> float:
        total = 0.0
        for component in (flow.u, flow.v):
            dx, dy = WarpLossService.forward_differences(component)
            total += WarpLossService.penalty(dx, epsilon)[:, :-1].sum()
            total += WarpLossService.penalty(dy, epsilon)[:-1, :].sum()
        return float(total)

    @staticmethod
    def _tv_gradient(component: np.ndarray, epsilon: float) -> np.ndarray:
        dx, dy = WarpLossService.forward_differences(component)
        slope_x = WarpLossService.penalty_slope(dx[:, :-1], epsilon)
        slope_y = WarpLossService.penalty_slope(dy[:-1, :], epsilon)

        gradient = np.zeros_like(component)
        gradient[:, :-1] -= slope_x
        gradient[:, 1:] += slope_x
        gradient[:-1, :] -= slope_y
        gradient[1:, :] += slope_y
        return gradient

    @staticmethod
    def _check_inputs(ref: ImageGrid, target: ImageGrid, flow: FlowField):
        if not ref.same_shape(target) or not flow.matches(ref):
            logging.error(f"Shape mismatch: ref {ref.shape}, target {target.shape}, flow {flow.shape}")
            raise ValueError(f"Shape mismatch: ref {ref.shape}, target {target.shape}, flow {flow.shape}")
