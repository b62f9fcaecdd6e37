import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal
from modules.core.models.flow_field import FlowField
from modules.core.models.image_grid import ImageGrid
from modules.core.models.image_sequence import ImageSequence
from modules.core.models.sampling_kernel import SamplingKernel
from modules.core.services.sampling_service import SamplingService
from modules.enums.kernel_kind import KernelKind


class TestImageGrid:
    def test_copies_and_freezes_data(self):
        source = np.arange(6.0).reshape(2, 3)
        grid = ImageGrid(source)
        source[0, 0] = 99.0

        assert grid.width == 3 and grid.height == 2
        assert grid.data[0, 0] == 0.0
        with pytest.raises(ValueError):
            grid.data[0, 0] = 1.0

    @pytest.mark.parametrize("data", [np.zeros((0, 3)), np.zeros(4), np.array([[1.0, np.nan]]), np.array([[np.inf]])])
    def test_rejects_invalid_data(self, data):
        with pytest.raises(ValueError):
            ImageGrid(data)

    def test_from_flat_is_row_major(self):
        grid = ImageGrid.from_flat(3, 2, [0, 1, 2, 3, 4, 5])
        assert grid.data[1, 0] == 3.0
        assert_array_equal(grid.flat, np.arange(6.0))

    def test_from_flat_size_mismatch(self):
        with pytest.raises(ValueError):
            ImageGrid.from_flat(3, 2, [0, 1, 2])


class TestFlowField:
    def test_components_must_match(self):
        with pytest.raises(ValueError):
            FlowField(np.zeros((2, 3)), np.zeros((3, 2)))

    def test_constant_and_negated(self):
        flow = FlowField.constant(4, 3, 0.5, -1.0)
        assert flow.shape == (3, 4)
        assert_array_equal(flow.negated().u, np.full((3, 4), -0.5))
        assert_array_equal(flow.negated().v, np.full((3, 4), 1.0))

    def test_endpoint_error(self):
        truth = FlowField.constant(2, 2, 3.0, 4.0)
        assert_allclose(FlowField.endpoint_error(FlowField.zeros(2, 2), truth), np.full((2, 2), 5.0))


class TestImageSequence:
    def test_temporal_order_prefers_negative_offsets_on_ties(self):
        frames = [ImageGrid(np.full((2, 2), float(i))) for i in range(5)]
        sequence = ImageSequence(frames, reference_index=2)
        assert sequence.temporal_order() == [2, 1, 3, 0, 4]
        assert sequence.offset_of(0) == -2

    def test_rejects_mixed_sizes_and_bad_reference(self):
        with pytest.raises(ValueError):
            ImageSequence([ImageGrid.zeros(2, 2), ImageGrid.zeros(3, 2)])
        with pytest.raises(ValueError):
            ImageSequence([ImageGrid.zeros(2, 2)], reference_index=1)
        with pytest.raises(ValueError):
            ImageSequence([])

    def test_subset_keeps_reference(self):
        sequence = ImageSequence([ImageGrid(np.full((2, 2), float(i))) for i in range(4)], reference_index=1)
        subset = sequence.subset([1, 3])
        assert len(subset) == 2 and subset.reference_index == 0
        with pytest.raises(ValueError):
            sequence.subset([0, 2])


class TestSamplingKernel:
    def test_bilinear_values_and_kinks(self):
        kernel = SamplingKernel.bilinear()
        assert_allclose(kernel.value([0.0, 0.5, -0.5, 1.0, 1.5]), [1.0, 0.5, 0.5, 0.0, 0.0])
        assert_array_equal(kernel.derivative([0.0, 0.25, -0.25, 1.0]), [0.0, -1.0, 1.0, 0.0])

    def test_bicubic_interpolates(self):
        kernel = SamplingKernel.from_kind(KernelKind.BICUBIC)
        assert_allclose(kernel.value([0.0, 1.0, -1.0, 2.0, 2.5]), [1.0, 0.0, 0.0, 0.0, 0.0], atol=1e-15)

    @pytest.mark.parametrize("kind", list(KernelKind))
    def test_partition_of_unity(self, kind, rng):
        kernel = SamplingKernel.from_kind(kind)
        t = rng.uniform(-3.0, 3.0, 1000)
        taps = np.arange(-6, 7)
        sums = kernel.value(t[:, None] - taps[None, :]).sum(axis=1)
        assert_allclose(sums, 1.0, atol=1e-12)

    @pytest.mark.parametrize("kind", list(KernelKind))
    def test_derivative_matches_finite_differences(self, kind):
        kernel = SamplingKernel.from_kind(kind)
        x = np.array([-1.7, -0.6, -0.3, 0.2, 0.45, 1.3])
        h = 1e-6
        numeric = (kernel.value(x + h) - kernel.value(x - h)) / (2 * h)
        assert_allclose(kernel.derivative(x), numeric, atol=1e-6)


class TestSamplingService:
    def test_sample_at_integer_and_midpoint(self):
        img = ImageGrid([[0.0, 2.0], [4.0, 6.0]])
        kernel = SamplingKernel.bilinear()
        assert SamplingService.sample_at(img, 1.0, 1.0, kernel) == 6.0
        assert SamplingService.sample_at(img, 0.5, 0.5, kernel) == pytest.approx(3.0)

    def test_bilinear_sample_at_reproduces_affine_fields(self, rng):
        ys, xs = np.mgrid[0:7, 0:9].astype(float)
        img = ImageGrid(0.3 - 1.2 * xs + 2.5 * ys)
        kernel = SamplingKernel.bilinear()
        for x, y in zip(rng.uniform(0.0, 8.0, 200), rng.uniform(0.0, 6.0, 200)):
            assert SamplingService.sample_at(img, x, y, kernel) == pytest.approx(0.3 - 1.2 * x + 2.5 * y, abs=1e-12)

    def test_sample_at_uses_zero_padding(self):
        img = ImageGrid([[2.0, 2.0], [2.0, 2.0]])
        kernel = SamplingKernel.bilinear()
        assert SamplingService.sample_at(img, -0.5, 0.0, kernel) == pytest.approx(1.0)
        assert SamplingService.sample_at(img, 10.0, 0.0, kernel) == 0.0

    @pytest.mark.parametrize("kind", list(KernelKind))
    def test_gather_is_transpose_of_splat(self, kind, rng):
        kernel = SamplingKernel.from_kind(kind)
        data = rng.standard_normal((7, 9))
        xs = rng.uniform(-2.0, 10.0, (5, 6))
        ys = rng.uniform(-2.0, 8.0, (5, 6))
        values = rng.standard_normal((5, 6))

        gathered = SamplingService.gather(data, xs, ys, kernel)
        splatted = SamplingService.splat(values, xs, ys, kernel, 9, 7)
        assert np.vdot(gathered, values) == pytest.approx(np.vdot(data, splatted), abs=1e-10)

    def test_splat_is_deterministic(self, rng):
        values = rng.standard_normal((6, 6))
        xs = rng.uniform(0.0, 5.0, (6, 6))
        ys = rng.uniform(0.0, 5.0, (6, 6))
        kernel = SamplingKernel.bilinear()
        assert_array_equal(SamplingService.splat(values, xs, ys, kernel, 6, 6), SamplingService.splat(values, xs, ys, kernel, 6, 6))

    def test_to_luminance(self):
        r, g, b = ImageGrid.ones(2, 2), ImageGrid.zeros(2, 2), ImageGrid.zeros(2, 2)
        assert_allclose(SamplingService.to_luminance(r, g, b).data, 0.299)
        with pytest.raises(ValueError):
            SamplingService.to_luminance(r, ImageGrid.zeros(3, 2), b)
