import logging
import numpy as np
from modules.core.models.flow_field import FlowField
from modules.core.models.image_grid import ImageGrid
from modules.core.services.sampling_service import SamplingService
from modules.spmc.models.spmc_gradients import SpmcGradients
from modules.spmc.schemas.spmc_config import SpmcConfig


class SpmcLayerService:
    """
    Sub-pixel motion compensation layer: a sampling grid generator followed by a forward-splat
    sampler onto the enlarged grid, with analytic gradients w.r.t. the LR image and the flow.
    """

    @staticmethod
    def spmc_grid(flow: FlowField, cfg: SpmcConfig) -> tuple[np.ndarray, np.ndarray]:
        """
        HR coordinates x^s_p = alpha (x_p + u_p), y^s_p = alpha (y_p + v_p) of every LR pixel.

        With ``cfg.center_aligned`` the offset (alpha - 1) / 2 is added to both coordinates.

        Returns:
            tuple[np.ndarray, np.ndarray]: (x^s, y^s), each of the flow's shape.
        """
        xs, ys = SamplingService.pixel_coordinates(flow.width, flow.height)
        offset = cfg.grid_alignment.hr_offset(cfg.alpha)
        return cfg.alpha * (xs + flow.u) + offset, cfg.alpha * (ys + flow.v) + offset

    @staticmethod
    def spmc_forward(img: ImageGrid, flow: FlowField, cfg: SpmcConfig) -> ImageGrid:
        """
        J^H_q = sum_p J^L_p M(x^s_p - x_q) M(y^s_p - y_q), a scatter of LR pixels onto the HR grid.

        Args:
            img (ImageGrid): LR image J^L.
            flow (FlowField): Flow F_{i->0} defined over the LR grid.
            cfg (SpmcConfig): Scale factor and kernel.

        Returns:
            ImageGrid: HR image of size round(w * alpha) x round(h * alpha).
        """
        SpmcLayerService._check_flow(img, flow)
        hr_width, hr_height = cfg.hr_size(img.width, img.height)
        xs, ys = SpmcLayerService.spmc_grid(flow, cfg)
        return ImageGrid(SamplingService.splat(img.data, xs, ys, cfg.sampling_kernel, hr_width, hr_height))

    @staticmethod
    def spmc_adjoint(hr: ImageGrid, flow: FlowField, cfg: SpmcConfig) -> ImageGrid:
        """
        Transpose of the splat: LR image whose pixel p samples ``hr`` at (x^s_p, y^s_p).
        """
        hr_width, hr_height = cfg.hr_size(flow.width, flow.height)
        if hr.width != hr_width or hr.height != hr_height:
            logging.error(f"HR grid {hr.width}x{hr.height} does not match the layer output {hr_width}x{hr_height}")
            raise ValueError(f"HR grid {hr.width}x{hr.height} does not match the layer output {hr_width}x{hr_height}")
        xs, ys = SpmcLayerService.spmc_grid(flow, cfg)
        return ImageGrid(SamplingService.gather(hr.data, xs, ys, cfg.sampling_kernel))

    @staticmethod
    def spmc_backward(img: ImageGrid, flow: FlowField, cfg: SpmcConfig, upstream: ImageGrid) -> SpmcGradients:
        """
        Back-propagates dL/dJ^H through the layer.

        d_image[p]  = sum_q upstream[q] M(x^s_p - x_q) M(y^s_p - y_q)
        d_flow_u[p] = alpha J^L_p sum_q upstream[q] M'(x^s_p - x_q) M(y^s_p - y_q)
        d_flow_v[p] = alpha J^L_p sum_q upstream[q] M(x^s_p - x_q) M'(y^s_p - y_q)

        The flow gradient vanishes wherever J^L_p == 0; at the bilinear kinks M' is taken as 0.
        """
        SpmcLayerService._check_flow(img, flow)
        d_image = SpmcLayerService.spmc_adjoint(upstream, flow, cfg)

        xs, ys = SpmcLayerService.spmc_grid(flow, cfg)
        kernel = cfg.sampling_kernel
        slope_x = SamplingService.gather(upstream.data, xs, ys, kernel, derivative_x=True)
        slope_y = SamplingService.gather(upstream.data, xs, ys, kernel, derivative_y=True)

        return SpmcGradients(
            d_image=d_image,
            d_flow_u=ImageGrid(cfg.alpha * img.data * slope_x),
            d_flow_v=ImageGrid(cfg.alpha * img.data * slope_y),
        )

    @staticmethod
    def spmc_weight_map(flow: FlowField, cfg: SpmcConfig) -> ImageGrid:
        """
        Accumulated splat weight per HR pixel: ``spmc_forward`` of the all-ones LR image.
        """
        return SpmcLayerService.spmc_forward(ImageGrid.ones(flow.width, flow.height), flow, cfg)

    @staticmethod
    def _check_flow(img: ImageGrid, flow: FlowField):
        if not flow.matches(img):
            logging.error(f"Flow {flow.width}x{flow.height} does not match image {img.width}x{img.height}")
            raise ValueError(f"Flow {flow.width}x{flow.height} does not match image {img.width}x{img.height}")
