from typing import Optional
import numpy as np
import pytest
from modules.core.models.image_grid import ImageGrid
from modules.evaldata.schemas.synthetic_sequence_spec import SyntheticSequenceSpec
from modules.evaldata.services.degradation_service import DegradationService
from modules.operators.schemas.blur_spec import BlurSpec
from modules.operators.services.operators_service import OperatorsService
from modules.verification.services.verification_service import VerificationService


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def make_texture():
    """
    Factory for smooth random textures rescaled to [0, 1].
    """

    def factory(side: int = 64, sigma: float = 2.0, seed: int = 0) -> ImageGrid:
        pad = int(np.ceil(3 * sigma))
        noise = ImageGrid(np.random.default_rng(seed).random((side + 2 * pad, side + 2 * pad)))
        # zero padding darkens the border, so blur a larger field and crop
        blurred = OperatorsService.gaussian_blur(noise, BlurSpec(sigma=sigma)).data[pad:-pad, pad:-pad]
        low, high = blurred.min(), blurred.max()
        return ImageGrid((blurred - low) / (high - low))

    return factory


@pytest.fixture
def make_exact_cover(make_texture):
    """
    Factory for exact-cover synthetic sequences: all alpha^2 decimation phases of an HR image.
    The HR image is white noise, or a smooth texture when ``texture_sigma`` is given.
    """

    def factory(alpha: int = 2, hr_side: int = 32, seed: int = 0, texture_sigma: Optional[float] = None):
        if texture_sigma is None:
            hr = ImageGrid(np.random.default_rng(seed).random((hr_side, hr_side)))
        else:
            hr = make_texture(side=hr_side, sigma=texture_sigma, seed=seed)
        shifts = VerificationService.phase_covering_shifts(alpha)
        synthetic = DegradationService.make_exact_sequence(SyntheticSequenceSpec(hr_source=hr, shifts=shifts, alpha=alpha))
        return hr, synthetic

    return factory
