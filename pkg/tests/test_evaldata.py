import os
import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal
from PIL import Image
from pydantic import ValidationError
from modules.core.models.flow_field import FlowField
from modules.core.models.image_grid import ImageGrid
from modules.core.models.image_sequence import ImageSequence
from modules.enums.degradation_method import DegradationMethod
from modules.enums.grid_alignment import GridAlignment
from modules.enums.shift_regime import ShiftRegime
from modules.evaldata.schemas.degradation_spec import DegradationSpec
from modules.evaldata.schemas.sequence_manifest import SequenceManifest
from modules.evaldata.schemas.synthetic_sequence_spec import SyntheticSequenceSpec
from modules.evaldata.services.degradation_service import DegradationService
from modules.evaldata.services.image_io_service import ImageIoService
from modules.evaldata.services.metrics_service import MetricsService
from modules.evaldata.services.resampling_service import ResamplingService
from modules.evaldata.services.sequence_directory_service import SequenceDirectoryService
from modules.operators.schemas.blur_spec import BlurSpec


def quantized(rng, width, height):
    return ImageGrid(rng.integers(0, 256, (height, width)) / 255.0)


class TestDegradation:
    def test_constant_image_stays_constant(self):
        lr = DegradationService.degrade(ImageGrid(np.full((16, 16), 0.4)), DegradationSpec(alpha=4))
        assert lr.shape == (4, 4)
        assert_allclose(lr.data, 0.4)

    def test_full_hd_quarter_frame(self):
        lr = DegradationService.degrade(ImageGrid.zeros(960, 540), DegradationSpec(alpha=4))
        assert (lr.width, lr.height) == (240, 135)

    def test_noise_is_seeded(self, make_texture):
        hr = make_texture(side=16)
        first = DegradationService.degrade(hr, DegradationSpec(alpha=2, noise_sigma=0.05, seed=3))
        again = DegradationService.degrade(hr, DegradationSpec(alpha=2, noise_sigma=0.05, seed=3))
        other = DegradationService.degrade(hr, DegradationSpec(alpha=2, noise_sigma=0.05, seed=4))
        assert_array_equal(first.data, again.data)
        assert not np.array_equal(first.data, other.data)

    def test_indivisible_size(self):
        with pytest.raises(ValueError):
            DegradationService.degrade(ImageGrid.zeros(10, 8), DegradationSpec(alpha=4))

    def test_bicubic_factor_range(self):
        with pytest.raises(ValidationError):
            DegradationSpec(alpha=5)
        assert DegradationSpec(alpha=5, method=DegradationMethod.EXACT_MODEL).alpha == 5

    def test_exact_model_without_blur_is_decimation(self, rng):
        hr = ImageGrid(rng.random((8, 8)))
        lr = DegradationService.degrade(hr, DegradationSpec(alpha=2, method=DegradationMethod.EXACT_MODEL))
        assert_array_equal(lr.data, hr.data[::2, ::2])

    def test_exact_model_with_blur(self, rng):
        hr = ImageGrid(rng.random((8, 8)))
        spec = DegradationSpec(alpha=2, method=DegradationMethod.EXACT_MODEL, blur=BlurSpec(sigma=1.0))
        assert not np.array_equal(DegradationService.degrade(hr, spec).data, hr.data[::2, ::2])

    def test_band_limited_round_trip(self, make_texture):
        hr = make_texture(side=64, sigma=4.0, seed=11)
        lr = DegradationService.degrade(hr, DegradationSpec(alpha=2))
        restored = ResamplingService.upscale(lr, 2, GridAlignment.CENTER)
        assert MetricsService.psnr(MetricsService.crop_border(restored, 8), MetricsService.crop_border(hr, 8)) >= 35.0

    def test_origin_upscale_keeps_lattice_samples(self, rng):
        lr = ImageGrid(rng.random((5, 6)))
        upscaled = ResamplingService.upscale(lr, 3, GridAlignment.ORIGIN)
        assert upscaled.shape == (15, 18)
        assert_allclose(upscaled.data[::3, ::3], lr.data, atol=1e-12)

    def test_resampling_rows_are_normalized(self):
        matrix = ResamplingService.resampling_matrix(12, 5, GridAlignment.CENTER)
        assert matrix.shape == (5, 12)
        assert_allclose(matrix.sum(axis=1), 1.0)


class TestExactSequence:
    def test_frames_are_decimation_phases(self, rng):
        hr = ImageGrid(rng.random((8, 8)))
        spec = SyntheticSequenceSpec(hr_source=hr, shifts=[(0.0, 0.0), (0.5, 0.0), (0.0, 0.5), (0.5, 0.5)], alpha=2)
        synthetic = DegradationService.make_exact_sequence(spec)

        frames = synthetic.sequence.frames
        assert_array_equal(frames[0].data, hr.data[0::2, 0::2])
        assert_array_equal(frames[1].data, hr.data[0::2, 1::2])
        assert_array_equal(frames[2].data, hr.data[1::2, 0::2])
        assert_array_equal(frames[3].data, hr.data[1::2, 1::2])
        assert_array_equal(synthetic.flows[1].u, 0.5)
        assert_array_equal(synthetic.flows[1].v, 0.0)
        assert synthetic.shift_regime == ShiftRegime.HR_INTEGER
        assert synthetic.exact_recovery
        assert synthetic.metadata()["alpha"] == 2

    def test_integer_shift_pads_with_zeros(self, rng):
        hr = ImageGrid(rng.uniform(0.1, 1.0, (8, 8)))
        synthetic = DegradationService.make_exact_sequence(SyntheticSequenceSpec(hr_source=hr, shifts=[(0, 0), (1, 0)], alpha=2))
        shifted = synthetic.sequence.frames[1].data
        assert_array_equal(shifted[:, :3], hr.data[::2, 2::2])
        assert_array_equal(shifted[:, 3], 0.0)

    def test_subpixel_hr_shift_falls_back_to_bicubic(self, rng):
        hr = ImageGrid(rng.random((8, 8)))
        synthetic = DegradationService.make_exact_sequence(SyntheticSequenceSpec(hr_source=hr, shifts=[(0, 0), (0.3, 0.0)], alpha=2))
        assert synthetic.shift_regime == ShiftRegime.SUBPIXEL_BICUBIC
        assert not synthetic.exact_recovery

    def test_shift_out_of_range(self, rng):
        hr = ImageGrid(rng.random((8, 8)))
        with pytest.raises(ValueError):
            DegradationService.make_exact_sequence(SyntheticSequenceSpec(hr_source=hr, shifts=[(0, 0), (4.0, 0.0)], alpha=2))

    def test_reference_shift_must_be_zero(self, rng):
        with pytest.raises(ValidationError):
            SyntheticSequenceSpec(hr_source=ImageGrid.zeros(4, 4), shifts=[(0.5, 0.0)], alpha=2)
        with pytest.raises(ValidationError):
            SyntheticSequenceSpec(hr_source=ImageGrid.zeros(4, 4), shifts=[], alpha=2)


class TestMetrics:
    def test_psnr(self):
        a = ImageGrid.zeros(4, 4)
        assert MetricsService.psnr(a, a) == 99.0
        assert MetricsService.psnr(a, ImageGrid(np.full((4, 4), 0.1))) == pytest.approx(20.0)
        assert MetricsService.psnr(a, ImageGrid(np.full((4, 4), 25.5)), peak=255.0) == pytest.approx(20.0)

    def test_psnr_errors(self):
        with pytest.raises(ValueError):
            MetricsService.psnr(ImageGrid.zeros(4, 4), ImageGrid.zeros(4, 4), peak=0.0)
        with pytest.raises(ValueError):
            MetricsService.psnr(ImageGrid.zeros(4, 4), ImageGrid.zeros(5, 4))

    def test_ssim(self, make_texture):
        texture = make_texture(side=24)
        assert MetricsService.ssim(texture, texture) == pytest.approx(1.0)
        assert MetricsService.ssim(texture, ImageGrid(np.full((24, 24), 0.5))) < 0.5

    def test_ssim_needs_a_full_window(self):
        with pytest.raises(ValueError):
            MetricsService.ssim(ImageGrid.zeros(10, 10), ImageGrid.zeros(10, 10))

    def test_crop_border(self):
        img = ImageGrid(np.arange(100.0).reshape(10, 10))
        assert MetricsService.crop_border(img, 0) is img
        cropped = MetricsService.crop_border(img, 2)
        assert cropped.shape == (6, 6) and cropped.data[0, 0] == 22.0
        for border in (-1, 5):
            with pytest.raises(ValueError):
                MetricsService.crop_border(img, border)


class TestImageIo:
    @pytest.mark.parametrize("extension", ["png", "pgm"])
    def test_grayscale_round_trip(self, extension, tmp_path, rng):
        img = quantized(rng, 7, 5)
        path = ImageIoService.write_image(str(tmp_path / f"frame.{extension}"), img)
        assert_array_equal(ImageIoService.read_image(path).data, img.data)

    def test_color_is_read_as_luminance(self, tmp_path):
        rgb = np.zeros((2, 2, 3), dtype=np.uint8)
        rgb[:, :, 0] = 255
        Image.fromarray(rgb).save(tmp_path / "red.png")
        assert_allclose(ImageIoService.read_image(str(tmp_path / "red.png")).data, 0.299)

    def test_quantize_clamps(self):
        assert_array_equal(ImageIoService.quantize(ImageGrid([[-0.5, 0.5, 2.0]])), [[0, 128, 255]])

    def test_read_errors(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            ImageIoService.read_image(str(tmp_path / "missing.png"))
        (tmp_path / "broken.png").write_bytes(b"not an image")
        with pytest.raises(ValueError):
            ImageIoService.read_image(str(tmp_path / "broken.png"))

    def test_list_frames(self, tmp_path):
        for name in ("b.png", "a.pgm", "notes.txt"):
            (tmp_path / name).write_bytes(b"")
        assert [os.path.basename(path) for path in ImageIoService.list_frames(str(tmp_path))] == ["a.pgm", "b.png"]
        with pytest.raises(FileNotFoundError):
            ImageIoService.list_frames(str(tmp_path / "missing"))


class TestSequenceDirectory:
    def test_round_trip(self, tmp_path, rng):
        frames = [quantized(rng, 6, 4) for _ in range(3)]
        sequence = ImageSequence(frames, reference_index=1)
        flows = [FlowField.constant(6, 4, 0.5, 0.0), None, FlowField.constant(6, 4, -0.25, 1.0)]
        reverse_flows = [None if flow is None else flow.negated() for flow in flows]
        manifest = SequenceManifest(frame_count=3, reference_index=1, alpha=2, shift_regime=ShiftRegime.HR_INTEGER)
        hr = quantized(rng, 12, 8)

        folder = str(tmp_path / "seq")
        SequenceDirectoryService.write_sequence(folder, sequence, manifest, hr=hr, flows=flows, reverse_flows=reverse_flows)
        assert os.path.exists(os.path.join(folder, "flow_-1_to_ref.flo"))
        assert os.path.exists(os.path.join(folder, "flow_ref_to_1.flo"))

        restored, restored_manifest = SequenceDirectoryService.read_sequence(folder)
        assert restored_manifest == manifest
        assert restored.reference_index == 1
        for original, loaded in zip(frames, restored.frames):
            assert_array_equal(loaded.data, original.data)
        assert_array_equal(SequenceDirectoryService.read_ground_truth(folder).data, hr.data)

        loaded_flows = SequenceDirectoryService.read_flows(folder, restored)
        assert loaded_flows[1] is None
        assert_array_equal(loaded_flows[2].u, -0.25)
        loaded_reverse = SequenceDirectoryService.read_flows(folder, restored, from_reference=True)
        assert_array_equal(loaded_reverse[0].u, -0.5)

    def test_missing_flow_file(self, tmp_path, rng):
        sequence = ImageSequence([quantized(rng, 4, 4), quantized(rng, 4, 4)])
        folder = str(tmp_path / "seq")
        SequenceDirectoryService.write_sequence(folder, sequence, SequenceManifest(frame_count=2))
        assert SequenceDirectoryService.read_ground_truth(folder) is None
        with pytest.raises(FileNotFoundError):
            SequenceDirectoryService.read_flows(folder, sequence)

    def test_folder_without_manifest(self, tmp_path, rng):
        for name in ("frame_a.png", "frame_b.png", "hr.png"):
            ImageIoService.write_image(str(tmp_path / name), quantized(rng, 4, 4))
        sequence, manifest = SequenceDirectoryService.read_sequence(str(tmp_path))
        assert len(sequence) == 2 and manifest.frame_count == 2 and sequence.reference_index == 0

    def test_empty_folder(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            SequenceDirectoryService.read_sequence(str(tmp_path))


class TestSequenceManifest:
    def test_text_round_trip(self):
        manifest = SequenceManifest(frame_count=5, reference_index=2, alpha=4, seed=9, grid_alignment=GridAlignment.CENTER)
        assert SequenceManifest.from_text(manifest.to_text()) == manifest
        assert "grid_alignment=center" in manifest.to_text()

    def test_parsing_ignores_comments(self):
        manifest = SequenceManifest.from_text("# generated\n\nframe_count=3\nalpha=2\n")
        assert manifest.frame_count == 3 and manifest.alpha == 2 and manifest.reference_index == 0

    @pytest.mark.parametrize("text", ["alpha=2\n", "frame_count=3\nbroken line\n"])
    def test_invalid_text(self, text):
        with pytest.raises(ValueError):
            SequenceManifest.from_text(text)
