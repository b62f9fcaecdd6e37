import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal
from pydantic import ValidationError
from modules.core.models.flow_field import FlowField
from modules.core.models.image_grid import ImageGrid
from modules.core.models.sampling_kernel import SamplingKernel
from modules.enums.kernel_kind import KernelKind
from modules.enums.operator_kind import OperatorKind
from modules.operators.schemas.blur_spec import BlurSpec
from modules.operators.schemas.decimation_factor import DecimationFactor
from modules.operators.services.materialization_service import MaterializationService
from modules.operators.services.operators_service import OperatorsService


def random_image(rng, width, height):
    return ImageGrid(rng.standard_normal((height, width)))


def random_flow(rng, width, height, scale=1.5):
    return FlowField(rng.uniform(-scale, scale, (height, width)), rng.uniform(-scale, scale, (height, width)))


class TestDecimation:
    def test_keeps_phase_zero(self):
        img = ImageGrid(np.arange(16.0).reshape(4, 4))
        assert_array_equal(OperatorsService.decimate(img, DecimationFactor(alpha=2)).data, [[0.0, 2.0], [8.0, 10.0]])

    def test_rejects_indivisible_size(self):
        with pytest.raises(ValueError):
            OperatorsService.decimate(ImageGrid.zeros(5, 4), DecimationFactor(alpha=2))

    def test_zero_upsample_places_samples_on_lattice(self):
        upsampled = OperatorsService.zero_upsample(ImageGrid([[1.0, 2.0]]), DecimationFactor(alpha=3))
        assert upsampled.shape == (3, 6)
        assert upsampled.data[0, 0] == 1.0 and upsampled.data[0, 3] == 2.0
        assert upsampled.data.sum() == 3.0

    def test_zero_upsample_is_transpose_of_decimate(self, rng):
        factor = DecimationFactor(alpha=3)
        hr = random_image(rng, 9, 6)
        lr = random_image(rng, 3, 2)
        left = np.vdot(OperatorsService.decimate(hr, factor).data, lr.data)
        right = np.vdot(hr.data, OperatorsService.zero_upsample(lr, factor).data)
        assert left == pytest.approx(right, abs=1e-12)

    def test_factor_must_be_positive(self):
        with pytest.raises(ValidationError):
            DecimationFactor(alpha=0)


class TestWarp:
    def test_zero_flow_is_identity(self, rng):
        img = random_image(rng, 6, 5)
        for kind in KernelKind:
            warped = OperatorsService.backward_warp(img, FlowField.zeros(6, 5), SamplingKernel.from_kind(kind))
            assert_allclose(warped.data, img.data, atol=1e-15)

    def test_integer_shift_pulls_from_the_right(self):
        img = ImageGrid(np.arange(12.0).reshape(3, 4))
        warped = OperatorsService.backward_warp(img, FlowField.constant(4, 3, 1.0, 0.0), SamplingKernel.bilinear())
        assert_array_equal(warped.data[:, :3], img.data[:, 1:])
        assert_array_equal(warped.data[:, 3], 0.0)

    @pytest.mark.parametrize("kind", list(KernelKind))
    def test_forward_warp_is_transpose_of_backward_warp(self, kind, rng):
        kernel = SamplingKernel.from_kind(kind)
        flow = random_flow(rng, 7, 6)
        x = random_image(rng, 7, 6)
        y = random_image(rng, 7, 6)
        left = np.vdot(OperatorsService.backward_warp(x, flow, kernel).data, y.data)
        right = np.vdot(x.data, OperatorsService.forward_warp(y, flow, kernel).data)
        assert left == pytest.approx(right, abs=1e-10)

    @pytest.mark.parametrize("kind", list(KernelKind))
    def test_forward_warp_preserves_mass_when_splats_stay_inside(self, kind, rng):
        data = np.zeros((14, 14))
        data[5:9, 5:9] = rng.uniform(0.1, 1.0, (4, 4))
        splatted = OperatorsService.forward_warp(ImageGrid(data), random_flow(rng, 14, 14, scale=0.99), SamplingKernel.from_kind(kind))
        assert splatted.data.sum() == pytest.approx(data.sum(), abs=1e-10)

    def test_forward_warp_with_integer_flow_permutes_pixels(self, rng):
        img = random_image(rng, 6, 6)
        targets = rng.permutation(36)
        ys, xs = np.divmod(np.arange(36), 6)
        flow = FlowField((targets % 6 - xs).reshape(6, 6).astype(float), (targets // 6 - ys).reshape(6, 6).astype(float))

        splatted = OperatorsService.forward_warp(img, flow, SamplingKernel.bilinear())
        assert_array_equal(splatted.flat[targets], img.flat)

    def test_flow_size_must_match(self):
        with pytest.raises(ValueError):
            OperatorsService.backward_warp(ImageGrid.zeros(4, 4), FlowField.zeros(3, 4), SamplingKernel.bilinear())


class TestGaussianBlur:
    def test_kernel_is_normalized_and_symmetric(self):
        taps = OperatorsService.gaussian_kernel_1d(BlurSpec(sigma=1.2))
        assert len(taps) == 2 * 4 + 1
        assert taps.sum() == pytest.approx(1.0)
        assert_allclose(taps, taps[::-1])

    def test_explicit_radius(self):
        assert len(OperatorsService.gaussian_kernel_1d(BlurSpec(sigma=2.0, radius=1))) == 3

    def test_constant_interior_is_preserved(self):
        blurred = OperatorsService.gaussian_blur(ImageGrid.ones(20, 20), BlurSpec(sigma=1.0))
        assert_allclose(blurred.data[5:15, 5:15], 1.0)
        assert blurred.data[0, 0] < 1.0

    def test_blur_is_self_adjoint(self, rng):
        spec = BlurSpec(sigma=1.5)
        x = random_image(rng, 9, 8)
        y = random_image(rng, 9, 8)
        left = np.vdot(OperatorsService.gaussian_blur(x, spec).data, y.data)
        right = np.vdot(x.data, OperatorsService.gaussian_blur(y, spec).data)
        assert left == pytest.approx(right, abs=1e-12)

    def test_sigma_must_be_positive(self):
        with pytest.raises(ValidationError):
            BlurSpec(sigma=0.0)


class TestMaterialization:
    def test_decimation_matrix(self):
        matrix = MaterializationService.materialize_operator(OperatorKind.DECIMATION, 4, 2, factor=DecimationFactor(alpha=2))
        assert matrix.shape == (2, 8)
        assert_array_equal(matrix.sum(axis=1), [1.0, 1.0])
        assert matrix[0, 0] == 1.0 and matrix[1, 2] == 1.0

    def test_forward_warp_matrix_is_transpose(self, rng):
        flow = random_flow(rng, 4, 3)
        backward = MaterializationService.materialize_operator(OperatorKind.BACKWARD_WARP, 4, 3, flow=flow)
        forward = MaterializationService.materialize_operator(OperatorKind.FORWARD_WARP, 4, 3, flow=flow)
        assert_allclose(forward, backward.T, atol=1e-14)

    def test_blur_matrix_is_symmetric(self):
        matrix = MaterializationService.materialize_operator(OperatorKind.GAUSSIAN_BLUR, 5, 4, blur=BlurSpec(sigma=1.0))
        assert_allclose(matrix, matrix.T, atol=1e-15)

    def test_normal_operator_is_diagonal_for_integer_flow(self, rng):
        flow = FlowField(rng.integers(-1, 2, (8, 8)).astype(float), rng.integers(-1, 2, (8, 8)).astype(float))
        warp = MaterializationService.materialize_operator(OperatorKind.BACKWARD_WARP, 8, 8, flow=flow)
        decimation = MaterializationService.materialize_operator(OperatorKind.DECIMATION, 8, 8, factor=DecimationFactor(alpha=2))
        system = warp.T @ decimation.T @ decimation @ warp
        assert np.count_nonzero(system - np.diag(np.diag(system))) == 0
        assert np.all(np.isin(np.diag(system), [0.0, 1.0, 2.0, 3.0, 4.0, 5.0]))

    def test_size_is_capped(self):
        with pytest.raises(ValueError):
            MaterializationService.materialize_operator(OperatorKind.DECIMATION, 17, 2, factor=DecimationFactor(alpha=1))

    def test_missing_operand_raises(self):
        with pytest.raises(ValueError):
            MaterializationService.materialize_operator(OperatorKind.BACKWARD_WARP, 4, 4)
