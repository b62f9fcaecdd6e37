import logging
import numpy as np
import constants.configs as configs
from modules.core.models.image_grid import ImageGrid


class SrLossService:
    """
    Service class for the training objectives, evaluated as plain functionals.
    """

    @staticmethod
    def kappa_weights(half_span: int) -> list[float]:
        """
        kappa_i for i = -T..T, linear from 0.5 at -T to 1.0 at T; [1.0] when T = 0.
        """
        if half_span < 0:
            logging.error(f"Half span must be non-negative, got {half_span}")
            raise ValueError(f"Half span must be non-negative, got {half_span}")
        if half_span == 0:
            return [configs.KAPPA_LAST]
        return [
            configs.KAPPA_FIRST + (configs.KAPPA_LAST - configs.KAPPA_FIRST) * (i + half_span) / (2 * half_span)
            for i in range(-half_span, half_span + 1)
        ]

    @staticmethod
    def weighted_sr_loss(outputs: list[ImageGrid], truth: ImageGrid, half_span: int) -> float:
        """
        sum_i kappa_i ||truth - outputs_i||_2^2 over the 2T + 1 per-step estimates (i = -T..T).

        Args:
            outputs (list[ImageGrid]): HR estimates ordered i = -T..T.
            truth (ImageGrid): HR ground truth.
            half_span (int): T.

        Returns:
            float: The weighted loss.
        """
        kappas = SrLossService.kappa_weights(half_span)
        if len(outputs) != len(kappas):
            logging.error(f"Expected {len(kappas)} outputs for T={half_span}, got {len(outputs)}")
            raise ValueError(f"Expected {len(kappas)} outputs for T={half_span}, got {len(outputs)}")

        loss = 0.0
        for kappa, output in zip(kappas, outputs):
            if not output.same_shape(truth):
                logging.error(f"Output {output.shape} differs from ground truth {truth.shape}")
                raise ValueError(f"Output {output.shape} differs from ground truth {truth.shape}")
            loss += kappa * float(np.sum((truth.data - output.data) ** 2))
        return loss

    @staticmethod
    def total_loss(sr_loss: float, me_loss: float, lambda2: float = configs.DEFAULT_LAMBDA2) -> float:
        """
        sr_loss + lambda2 * me_loss.
        """
        if sr_loss < 0.0 or me_loss < 0.0 or lambda2 < 0.0:
            logging.error(f"Loss components must be non-negative: sr={sr_loss}, me={me_loss}, lambda2={lambda2}")
            raise ValueError(f"Loss components must be non-negative: sr={sr_loss}, me={me_loss}, lambda2={lambda2}")
        return sr_loss + lambda2 * me_loss
