import os
import json
import numpy as np
import pytest
import constants.configs as configs
from main import main
from modules.cli.services.cli_commands_service import CliCommandsService
from modules.cli.utils.timing_utils import TimingUtils
from modules.core.models.flow_field import FlowField
from modules.core.models.sampling_kernel import SamplingKernel
from modules.evaldata.services.image_io_service import ImageIoService
from modules.flow.services.flo_file_service import FloFileService
from modules.logger.services.logger_service import LoggerService
from modules.operators.services.operators_service import OperatorsService


def parse(output: str) -> dict:
    values = {}
    for line in output.splitlines():
        if " " in line or "=" not in line:
            continue
        key, _, value = line.partition("=")
        values[key] = value
    return values


@pytest.fixture
def workspace(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    return tmp_path


@pytest.fixture
def hr_folder(workspace, make_texture):
    folder = workspace / "hr"
    for index in range(2):
        ImageIoService.write_image(str(folder / f"frame_{index}.png"), make_texture(side=32, seed=index))
    return folder


@pytest.fixture
def exact_sequence(workspace, hr_folder, capsys):
    shifts = workspace / "shifts.txt"
    shifts.write_text("# dx dy\n0 0\n0.5 0\n0 0.5\n0.5 0.5\n")
    out_dir = workspace / "seq"
    assert main(["degrade", str(hr_folder), str(out_dir), "--method", "exact", "--alpha", "2", "--shifts", str(shifts)]) == 0
    capsys.readouterr()
    return out_dir


class TestEval:
    def test_identical_images(self, workspace, make_texture, capsys):
        path = ImageIoService.write_image(str(workspace / "a.png"), make_texture(side=24))
        assert main(["eval", path, path, "--manifest", str(workspace / "eval.json")]) == 0
        values = parse(capsys.readouterr().out)
        assert values["psnr"] == "99.0000"
        assert values["ssim"] == "1.0000"
        assert values["border"] == "0"

    def test_single_metric_and_border(self, workspace, make_texture, capsys):
        a = ImageIoService.write_image(str(workspace / "a.png"), make_texture(side=24, seed=1))
        b = ImageIoService.write_image(str(workspace / "b.png"), make_texture(side=24, seed=2))
        assert main(["eval", a, b, "--metric", "psnr", "--border", "4"]) == 0
        values = parse(capsys.readouterr().out)
        assert float(values["psnr"]) < 99.0
        assert "ssim" not in values
        assert values["border"] == "4"
        assert os.path.exists(os.path.join(configs.OUTPUT_FOLDER, "eval_run_manifest.json"))

    def test_size_mismatch_is_a_usage_error(self, workspace, make_texture, capsys):
        a = ImageIoService.write_image(str(workspace / "a.png"), make_texture(side=24))
        b = ImageIoService.write_image(str(workspace / "b.png"), make_texture(side=16))
        assert main(["eval", a, b]) == 2
        assert capsys.readouterr().out.startswith("error=")

    def test_manifest_contents(self, workspace, make_texture, capsys):
        path = ImageIoService.write_image(str(workspace / "a.png"), make_texture(side=24))
        manifest_path = workspace / "runs" / "eval.json"
        main(["eval", path, path, "--manifest", str(manifest_path)])
        manifest = json.loads(manifest_path.read_text())
        assert manifest["command"] == "eval"
        assert manifest["parameters"]["img_a"] == path
        assert manifest["exit_code"] == 0
        assert manifest["toolkit_version"] == configs.TOOLKIT_VERSION
        assert manifest["duration"].startswith("PT") and manifest["duration"].endswith("S")
        assert manifest["duration_seconds"] >= 0.0
        assert "log_level" not in manifest["parameters"]


class TestDegrade:
    def test_bicubic_quarter_resolution(self, workspace, hr_folder, capsys):
        out_dir = workspace / "lr"
        assert main(["degrade", str(hr_folder), str(out_dir), "--alpha", "4"]) == 0
        values = parse(capsys.readouterr().out)
        assert values["frames"] == "2"
        assert (values["lr_width"], values["lr_height"]) == ("8", "8")
        assert ImageIoService.read_image(str(out_dir / "frame_0001.png")).shape == (8, 8)
        assert "grid_alignment=center" in (out_dir / "sequence.txt").read_text()
        assert values["shift_regime"] == "source_motion"
        assert (out_dir / "hr.png").exists()
        assert (out_dir / "run_manifest.json").exists()

    def test_exact_shifts_write_true_flows(self, exact_sequence):
        flow = FloFileService.read_flo(str(exact_sequence / "flow_3_to_ref.flo"))
        assert flow.shape == (16, 16)
        assert flow.u[0, 0] == 0.5 and flow.v[0, 0] == 0.5
        assert FloFileService.read_flo(str(exact_sequence / "flow_ref_to_1.flo")).u[0, 0] == -0.5
        assert "shift_regime=hr_integer" in (exact_sequence / "sequence.txt").read_text()

    def test_exact_method_without_shifts_keeps_source_motion(self, workspace, hr_folder, capsys):
        out_dir = workspace / "exact"
        assert main(["degrade", str(hr_folder), str(out_dir), "--method", "exact", "--alpha", "2"]) == 0
        text = (out_dir / "sequence.txt").read_text()
        assert "shift_regime=source_motion" in text
        assert "grid_alignment=origin" in text

    def test_shifts_need_the_exact_method(self, workspace, hr_folder, capsys):
        shifts = workspace / "shifts.txt"
        shifts.write_text("0 0\n0.5 0\n")
        assert main(["degrade", str(hr_folder), str(workspace / "lr"), "--shifts", str(shifts)]) == 2

    def test_replay_reproduces_noisy_frames(self, workspace, hr_folder, capsys):
        out_dir = workspace / "noisy"
        manifest = workspace / "degrade.json"
        assert main(["degrade", str(hr_folder), str(out_dir), "--alpha", "2", "--noise-sigma", "0.05", "--seed", "7", "--manifest", str(manifest)]) == 0
        first = ImageIoService.read_image(str(out_dir / "frame_0000.png")).data.copy()
        os.remove(out_dir / "frame_0000.png")

        assert main(["replay", str(manifest)]) == 0
        assert (ImageIoService.read_image(str(out_dir / "frame_0000.png")).data == first).all()


class TestReconstruct:
    def test_true_flows_recover_the_ground_truth(self, workspace, exact_sequence, capsys):
        assert main(["reconstruct", str(exact_sequence), "--out", "rec.png", "--flows", "true"]) == 0
        values = parse(capsys.readouterr().out)
        assert (values["width"], values["height"]) == ("32", "32")
        assert values["frames"] == "4"
        assert values["border"] == "2"
        assert values["psnr"] == "99.0000"
        assert values["hole_fraction"] == "0.0000"
        assert float(values["bicubic_psnr"]) < 99.0
        assert (workspace / "rec.png").exists()
        assert (workspace / "rec_coverage.csv").exists()

    def test_backward_warping_is_worse(self, workspace, exact_sequence, capsys):
        main(["reconstruct", str(exact_sequence), "--out", "spmc.png", "--flows", "true"])
        spmc = parse(capsys.readouterr().out)
        assert main(["reconstruct", str(exact_sequence), "--out", "bw.png", "--flows", "true", "--align", "bw"]) == 0
        bw = parse(capsys.readouterr().out)
        assert bw["alignment"] == "bw"
        assert float(spmc["psnr"]) - float(bw["psnr"]) >= 3.0

    def test_fewer_frames_leave_holes(self, workspace, exact_sequence, capsys):
        assert main(["reconstruct", str(exact_sequence), "--out", "one.png", "--flows", "true", "--frames", "1"]) == 0
        values = parse(capsys.readouterr().out)
        assert values["frames"] == "1"
        assert values["hole_fraction"] == "0.7500"
        assert float(values["psnr"]) < 99.0

    def test_conjugate_gradient(self, workspace, exact_sequence, capsys):
        args = ["reconstruct", str(exact_sequence), "--out", "cg.png", "--flows", "true", "--solver", "cg", "--tikhonov-eps", "0"]
        assert main(args) == 0
        values = parse(capsys.readouterr().out)
        assert values["cg_converged"] == "true"
        assert values["psnr"] == "99.0000"

    def test_numpy_scalars_are_printed_like_builtins(self, capsys):
        CliCommandsService.emit("cg_converged", np.bool_(True))
        CliCommandsService.emit("psnr", np.float64(31.234567))
        assert capsys.readouterr().out.splitlines() == ["cg_converged=true", "psnr=31.2346"]

    def test_missing_flow_files(self, workspace, hr_folder, capsys):
        main(["degrade", str(hr_folder), str(workspace / "lr"), "--alpha", "2"])
        capsys.readouterr()
        assert main(["reconstruct", str(workspace / "lr"), "--out", "rec.png", "--flows", "true"]) == 2
        assert capsys.readouterr().out.startswith("error=")


class TestFlow:
    def test_identical_frames(self, workspace, make_texture, capsys):
        path = ImageIoService.write_image(str(workspace / "a.png"), make_texture(side=16))
        assert main(["flow", path, path, "--out", "flows/f.flo", "--levels", "2", "--vis", "flows/f.png"]) == 0
        output = capsys.readouterr().out
        values = parse(output)
        assert values["mean_magnitude"] == "0.0000"
        assert "level=1 iteration=0" in output
        assert (workspace / "flows" / "f.flo").exists()
        assert (workspace / "flows" / "f_trace.csv").exists()
        assert (workspace / "flows" / "f.png").exists()
        assert (workspace / "flows" / "f_run_manifest.json").exists()

    def test_shifted_pair_gives_the_shift(self, workspace, make_texture, capsys):
        ref = make_texture(side=32, sigma=2.0, seed=3)
        target = OperatorsService.backward_warp(ref, FlowField.constant(32, 32, 1.0, 0.0), SamplingKernel.bilinear())
        ref_path = ImageIoService.write_image(str(workspace / "ref.png"), ref)
        target_path = ImageIoService.write_image(str(workspace / "target.png"), target)

        assert main(["flow", ref_path, target_path, "--out", "shift.flo", "--levels", "2"]) == 0
        values = parse(capsys.readouterr().out)
        assert 0.7 < float(values["mean_magnitude"]) < 1.3
        interior = FloFileService.read_flo(str(workspace / "shift.flo")).u[8:-8, 8:-8]
        assert abs(float(interior.mean()) - 1.0) < 0.2


class TestVerify:
    def test_passing_suite(self, workspace, capsys):
        report = workspace / "report.csv"
        args = ["verify", "--suite", "adjoint", "--trials", "2", "--report", str(report), "--manifest", str(workspace / "v.json")]
        assert main(args) == 0
        output = capsys.readouterr().out
        assert "check=adjoint.decimation" in output
        assert parse(output)["passed"] == "true"
        assert report.exists()

    def test_failing_suite(self, workspace, capsys, monkeypatch):
        monkeypatch.setattr(configs, "VERIFY_ADJOINT_TOLERANCE", -1.0)
        assert main(["verify", "--suite", "adjoint", "--trials", "1", "--manifest", str(workspace / "v.json")]) == 1
        values = parse(capsys.readouterr().out)
        assert values["passed"] == "false"
        assert "adjoint.decimation" in values["failed"]

    def test_unknown_suite(self, workspace):
        with pytest.raises(SystemExit) as error:
            main(["verify", "--suite", "speed"])
        assert error.value.code == 2


class TestTiming:
    @pytest.mark.parametrize(
        "seconds, expected",
        [(0.0, "PT0.000S"), (0.5, "PT0.500S"), (120.0, "PT2M0.000S"), (3723.25, "PT1H2M3.250S"), (59.9996, "PT1M0.000S")],
    )
    def test_iso_durations(self, seconds, expected):
        assert TimingUtils.format_duration(seconds) == expected

    def test_negative_duration(self):
        with pytest.raises(ValueError):
            TimingUtils.format_duration(-1.0)

    def test_start_marks(self):
        started, started_at = TimingUtils.start()
        assert TimingUtils.elapsed_since(started) >= 0.0
        assert "T" in started_at and len(started_at) == 19


class TestLogging:
    def test_level_names(self):
        assert LoggerService.parse_level("debug") == 10
        assert LoggerService.parse_level("WARNING") == 30
        with pytest.raises(ValueError):
            LoggerService.parse_level("chatty")

    def test_unknown_log_level_is_a_usage_error(self, workspace, make_texture, capsys):
        path = ImageIoService.write_image(str(workspace / "a.png"), make_texture(side=16))
        assert main(["--log-level", "chatty", "eval", path, path]) == 2
        assert capsys.readouterr().out.startswith("error=Unknown log level")
