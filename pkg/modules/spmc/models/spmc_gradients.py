from modules.core.models.image_grid import ImageGrid


class SpmcGradients(object):
    """
    Sensitivities of a scalar loss w.r.t. the LR inputs of the SPMC layer.
    """

    d_image: ImageGrid
    d_flow_u: ImageGrid
    d_flow_v: ImageGrid

    def __init__(self, d_image: ImageGrid, d_flow_u: ImageGrid, d_flow_v: ImageGrid):
        """
        Initializes the SPMC Gradients.
        """
        self.d_image = d_image
        self.d_flow_u = d_flow_u
        self.d_flow_v = d_flow_v

    def __str__(self):
        return f"SpmcGradients(image={self.d_image}, flow_u={self.d_flow_u}, flow_v={self.d_flow_v})"
