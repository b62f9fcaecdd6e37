import os
import math
import logging
from typing import Any, Optional
import numpy as np
import pandas as pd
import constants.configs as configs
from modules.cli.schemas.run_manifest import RunManifest
from modules.cli.utils.timing_utils import TimingUtils
from modules.core.models.flow_field import FlowField
from modules.core.models.image_sequence import ImageSequence
from modules.enums.alignment_mode import AlignmentMode
from modules.enums.degradation_method import DegradationMethod
from modules.enums.grid_alignment import GridAlignment
from modules.enums.hole_fill_policy import HoleFillPolicy
from modules.enums.kernel_kind import KernelKind
from modules.enums.shift_regime import ShiftRegime
from modules.enums.solver_mode import SolverMode
from modules.enums.verification_suite import VerificationSuite
from modules.evaldata.schemas.degradation_spec import DegradationSpec
from modules.evaldata.schemas.sequence_manifest import SequenceManifest
from modules.evaldata.schemas.synthetic_sequence_spec import SyntheticSequenceSpec
from modules.evaldata.services.degradation_service import DegradationService
from modules.evaldata.services.image_io_service import ImageIoService
from modules.evaldata.services.metrics_service import MetricsService
from modules.evaldata.services.sequence_directory_service import SequenceDirectoryService
from modules.flow.schemas.flow_estimation_config import FlowEstimationConfig
from modules.flow.services.flo_file_service import FloFileService
from modules.flow.services.flow_estimation_service import FlowEstimationService
from modules.flow.services.flow_visualization_service import FlowVisualizationService
from modules.logger.services.logger_service import LoggerService
from modules.operators.schemas.blur_spec import BlurSpec
from modules.reconstruct.schemas.reconstruction_config import ReconstructionConfig
from modules.reconstruct.services.alignment_service import AlignmentService
from modules.reconstruct.services.reconstruction_service import ReconstructionService
from modules.verification.services.verification_service import VerificationService

EXIT_SUCCESS = 0
EXIT_VERIFICATION_FAILED = 1
EXIT_USAGE_ERROR = 2


class CliCommandsService:
    """
    Service class with one method per CLI command. Results are printed as key=value lines on stdout
    and every run records a RunManifest next to its outputs.
    """

    @staticmethod
    def run_command(command: str, parameters: dict[str, Any]) -> int:
        """
        Dispatches ``command`` with its keyword parameters (as parsed or as recorded in a manifest).

        Returns:
            int: The process exit code.
        """
        handlers = {
            "degrade": CliCommandsService.cmd_degrade,
            "flow": CliCommandsService.cmd_flow,
            "reconstruct": CliCommandsService.cmd_reconstruct,
            "eval": CliCommandsService.cmd_eval,
            "verify": CliCommandsService.cmd_verify,
        }
        if command not in handlers:
            logging.error(f"Unknown command: {command}")
            raise ValueError(f"Unknown command: {command}")
        return handlers[command](**parameters)

    @staticmethod
    def cmd_replay(manifest_path: str) -> int:
        """
        Re-runs the command recorded in a run manifest with its recorded parameters (seed included).
        """
        manifest = RunManifest.load(manifest_path)
        logging.info(f"Replaying '{manifest.command}' recorded at {manifest.started_at}")
        return CliCommandsService.run_command(manifest.command, manifest.parameters)

    @staticmethod
    def cmd_degrade(
        in_dir: str,
        out_dir: str,
        alpha: int = 4,
        method: str = DegradationMethod.BICUBIC_CHAIN.value,
        noise_sigma: float = 0.0,
        seed: int = configs.DEFAULT_SEED,
        blur_sigma: Optional[float] = None,
        shifts: Optional[str] = None,
        manifest: Optional[str] = None,
    ) -> int:
        """
        Degrades a folder of HR frames into an LR sequence directory.

        With ``shifts`` (exact method only) the first HR frame is shifted per line of the shifts file
        and decimated; the true flows are written as ``.flo`` files in both orientations.
        """
        parameters = dict(locals())
        started, started_at = TimingUtils.start()

        hr_paths = [path for path in ImageIoService.list_frames(in_dir) if os.path.basename(path) != configs.HR_TRUTH_FILE]
        if not hr_paths:
            logging.error(f"No frames found in {in_dir}")
            raise FileNotFoundError(f"No frames found in {in_dir}")

        degradation_method = DegradationMethod.get_method_by_name(method)
        blur = BlurSpec(sigma=blur_sigma) if blur_sigma else None
        inputs = list(hr_paths)
        flows, reverse_flows = None, None

        if shifts is not None:
            if degradation_method != DegradationMethod.EXACT_MODEL:
                logging.error("A shifts file needs --method exact")
                raise ValueError("A shifts file needs --method exact")
            hr_truth = ImageIoService.read_image(hr_paths[0])
            synthetic = DegradationService.make_exact_sequence(
                SyntheticSequenceSpec(hr_source=hr_truth, shifts=CliCommandsService.read_shifts(shifts), alpha=alpha, blur=blur)
            )
            frames = [
                DegradationService.add_noise(frame, noise_sigma, seed + index)
                for index, frame in enumerate(synthetic.sequence.frames)
            ]
            flows = synthetic.flows
            reverse_flows = [flow.negated() for flow in flows]
            regime = synthetic.shift_regime
            inputs = [hr_paths[0], shifts]
        else:
            hr_truth = None
            frames = []
            for index, path in enumerate(hr_paths):
                hr = ImageIoService.read_image(path)
                if hr_truth is None:
                    hr_truth = hr
                spec = DegradationSpec(alpha=alpha, method=degradation_method, blur=blur, noise_sigma=noise_sigma, seed=seed + index)
                frames.append(DegradationService.degrade(hr, spec))
            regime = ShiftRegime.SOURCE_MOTION

        grid_alignment = GridAlignment.CENTER if degradation_method == DegradationMethod.BICUBIC_CHAIN else GridAlignment.ORIGIN
        sequence = ImageSequence(frames, 0)
        sequence_manifest = SequenceManifest(
            frame_count=len(frames),
            reference_index=0,
            alpha=alpha,
            seed=seed,
            shift_regime=regime,
            grid_alignment=grid_alignment,
        )
        outputs = SequenceDirectoryService.write_sequence(out_dir, sequence, sequence_manifest, hr_truth, flows, reverse_flows)

        CliCommandsService.emit("frames", len(frames))
        CliCommandsService.emit("lr_width", sequence.width)
        CliCommandsService.emit("lr_height", sequence.height)
        CliCommandsService.emit("alpha", alpha)
        CliCommandsService.emit("method", degradation_method.value)
        CliCommandsService.emit("shift_regime", regime.value["name"])
        CliCommandsService.emit("seed", seed)
        CliCommandsService.emit("out_dir", out_dir)

        manifest_path = manifest or os.path.join(out_dir, configs.RUN_MANIFEST_FILE)
        return CliCommandsService._finish("degrade", parameters, inputs, outputs, seed, started, started_at, EXIT_SUCCESS, manifest_path)

    @staticmethod
    def cmd_flow(
        ref_frame: str,
        target_frame: str,
        out: str,
        levels: int = configs.DEFAULT_PYRAMID_LEVELS,
        iters: int = configs.DEFAULT_ITERATIONS_PER_LEVEL,
        lambda1: float = configs.DEFAULT_LAMBDA1,
        kernel: str = KernelKind.BILINEAR.value,
        vis: Optional[str] = None,
        trace: Optional[str] = None,
        manifest: Optional[str] = None,
    ) -> int:
        """
        Estimates F_{target->ref} coarse-to-fine, writes it as ``.flo`` and prints the loss trace.
        """
        parameters = dict(locals())
        started, started_at = TimingUtils.start()

        ref = ImageIoService.read_image(ref_frame)
        target = ImageIoService.read_image(target_frame)
        cfg = FlowEstimationConfig(
            pyramid_levels=levels,
            iterations_per_level=iters,
            lambda1=lambda1,
            kernel=KernelKind.get_kind_by_name(kernel),
        )
        result = FlowEstimationService.estimate_flow_pyramidal_with_trace(ref, target, cfg)

        trace_frame = result.trace_frame()
        for row in trace_frame.itertuples(index=False):
            print(
                f"level={row.level} iteration={row.iteration} data_term={row.data_term:.6f} "
                f"tv_term={row.tv_term:.6f} total={row.total:.6f}"
            )

        outputs = [FloFileService.write_flo(out, result.flow)]
        trace_path = trace or os.path.splitext(out)[0] + configs.FLOW_TRACE_SUFFIX
        trace_frame.to_csv(trace_path, index=False)
        outputs.append(trace_path)
        if vis:
            outputs.append(FlowVisualizationService.save_flow_image(vis, result.flow))

        CliCommandsService.emit("flow", out)
        CliCommandsService.emit("mean_magnitude", float(result.flow.magnitude().mean()))
        CliCommandsService.emit("final_total", result.trace[-1][1].total)

        manifest_path = manifest or os.path.splitext(out)[0] + "_" + configs.RUN_MANIFEST_FILE
        return CliCommandsService._finish(
            "flow", parameters, [ref_frame, target_frame], outputs, None, started, started_at, EXIT_SUCCESS, manifest_path
        )

    @staticmethod
    def cmd_reconstruct(
        seq_dir: str,
        out: str,
        alpha: Optional[float] = None,
        align: str = "spmc",
        solver: str = "sna",
        flows: str = "auto",
        frames: Optional[int] = None,
        hole_fill: str = HoleFillPolicy.BICUBIC_REFERENCE.value,
        kernel: str = KernelKind.BILINEAR.value,
        center_aligned: Optional[bool] = None,
        tikhonov_eps: float = configs.DEFAULT_TIKHONOV_EPS,
        cg_max_iters: int = configs.DEFAULT_CG_MAX_ITERS,
        cg_tolerance: float = configs.DEFAULT_CG_TOLERANCE,
        levels: int = configs.DEFAULT_PYRAMID_LEVELS,
        iters: int = configs.DEFAULT_ITERATIONS_PER_LEVEL,
        lambda1: float = configs.DEFAULT_LAMBDA1,
        border: Optional[int] = None,
        coverage: Optional[str] = None,
        manifest: Optional[str] = None,
    ) -> int:
        """
        Reconstructs the HR reference frame of a sequence directory.

        ``flows`` is ``auto`` (estimate), ``true`` (flow files of the sequence directory) or a folder of
        flow files. SPMC alignment uses F_{i->0}; BW alignment uses F_{0->i}. When ``hr.png`` is present
        the reconstruction and the bicubic baseline are scored against it after cropping ``border``
        pixels (default: ceil(alpha)).
        """
        parameters = dict(locals())
        started, started_at = TimingUtils.start()

        sequence, sequence_manifest = SequenceDirectoryService.read_sequence(seq_dir)
        alignment = AlignmentMode.get_mode_by_name(align)
        cfg = ReconstructionConfig(
            alpha=float(alpha if alpha is not None else sequence_manifest.alpha),
            alignment=alignment,
            solver=SolverMode.get_mode_by_name(solver),
            tikhonov_eps=tikhonov_eps,
            cg_max_iters=cg_max_iters,
            cg_tolerance=cg_tolerance,
            hole_fill=HoleFillPolicy.get_policy_by_name(hole_fill),
            kernel=KernelKind.get_kind_by_name(kernel),
            center_aligned=center_aligned if center_aligned is not None else sequence_manifest.grid_alignment == GridAlignment.CENTER,
        )

        frame_flows = CliCommandsService._resolve_flows(seq_dir, sequence, flows, alignment, levels, iters, lambda1, kernel)
        indices = list(range(len(sequence)))
        if frames is not None:
            if frames < 1:
                logging.error(f"--frames must be positive, got {frames}")
                raise ValueError(f"--frames must be positive, got {frames}")
            indices = sorted(sequence.temporal_order()[:frames])
        selected = sequence.subset(indices)
        selected_flows = [frame_flows[index] for index in indices]

        stack = AlignmentService.align_stack(selected, selected_flows, cfg)
        if cfg.solver == SolverMode.CONJUGATE_GRADIENT:
            cg_result = ReconstructionService.solve_normal_equations_with_report(selected, selected_flows, cfg)
            estimate = cg_result.solution
            CliCommandsService.emit("cg_iterations", cg_result.iterations)
            CliCommandsService.emit("cg_converged", cg_result.converged)
            CliCommandsService.emit("cg_residual", f"{cg_result.final_residual:.3e}")
        else:
            estimate = ReconstructionService.shift_and_add(stack, cfg)

        outputs = [ImageIoService.write_image(out, estimate)]
        coverage_path = coverage or os.path.splitext(out)[0] + configs.COVERAGE_SUFFIX
        ReconstructionService.coverage_statistics(stack).to_csv(coverage_path, index=False)
        outputs.append(coverage_path)

        CliCommandsService.emit("out", out)
        CliCommandsService.emit("width", estimate.width)
        CliCommandsService.emit("height", estimate.height)
        CliCommandsService.emit("frames", len(selected))
        CliCommandsService.emit("alignment", alignment.value["name"])
        CliCommandsService.emit("solver", cfg.solver.value["name"])
        CliCommandsService.emit("flows", flows)
        CliCommandsService.emit("hole_fraction", ReconstructionService.hole_fraction(stack))

        truth = SequenceDirectoryService.read_ground_truth(seq_dir)
        inputs = [seq_dir]
        if truth is not None and truth.same_shape(estimate):
            crop = border if border is not None else int(math.ceil(cfg.alpha))
            CliCommandsService.emit("border", crop)
            CliCommandsService._emit_scores("", estimate, truth, crop)
            CliCommandsService._emit_scores("bicubic_", stack.reference_upsampled, truth, crop)
        elif truth is not None:
            logging.warning(f"Ground truth {truth.shape} does not match the reconstruction {estimate.shape}, skipping metrics")

        manifest_path = manifest or os.path.splitext(out)[0] + "_" + configs.RUN_MANIFEST_FILE
        return CliCommandsService._finish(
            "reconstruct", parameters, inputs, outputs, sequence_manifest.seed, started, started_at, EXIT_SUCCESS, manifest_path
        )

    @staticmethod
    def cmd_eval(
        img_a: str,
        img_b: str,
        border: int = configs.DEFAULT_CROP_BORDER,
        metric: str = "both",
        peak: float = 1.0,
        manifest: Optional[str] = None,
    ) -> int:
        """
        Prints PSNR and/or SSIM of two images after cropping ``border`` pixels from each side.
        """
        parameters = dict(locals())
        started, started_at = TimingUtils.start()

        if metric not in ("psnr", "ssim", "both"):
            logging.error(f"Unknown metric: {metric}")
            raise ValueError(f"Unknown metric: {metric}")

        a = MetricsService.crop_border(ImageIoService.read_image(img_a), border)
        b = MetricsService.crop_border(ImageIoService.read_image(img_b), border)
        if metric in ("psnr", "both"):
            CliCommandsService.emit("psnr", MetricsService.psnr(a, b, peak))
        if metric in ("ssim", "both"):
            CliCommandsService.emit("ssim", MetricsService.ssim(a, b, peak))
        CliCommandsService.emit("border", border)

        manifest_path = manifest or os.path.join(configs.OUTPUT_FOLDER, "eval_" + configs.RUN_MANIFEST_FILE)
        return CliCommandsService._finish("eval", parameters, [img_a, img_b], [], None, started, started_at, EXIT_SUCCESS, manifest_path)

    @staticmethod
    def cmd_verify(
        suite: str = VerificationSuite.ALL.value,
        seed: int = configs.DEFAULT_SEED,
        trials: int = configs.VERIFY_DEFAULT_TRIALS,
        report: Optional[str] = None,
        manifest: Optional[str] = None,
    ) -> int:
        """
        Runs the verification suites; exit code 0 iff every check passes, 1 otherwise.
        """
        parameters = dict(locals())
        started, started_at = TimingUtils.start()

        results = VerificationService.run(VerificationSuite.get_suite_by_name(suite), seed, trials)
        for result in results:
            print(
                f"check={result.suite}.{result.name} max_error={result.max_error:.3e} "
                f"tolerance={result.tolerance:.1e} trials={result.trials} passed={str(result.passed).lower()}"
            )

        outputs = []
        if report:
            VerificationService.report_frame(results).to_csv(report, index=False)
            outputs.append(report)

        passed = VerificationService.all_passed(results)
        failed = [f"{result.suite}.{result.name}" for result in results if not result.passed]
        CliCommandsService.emit("passed", passed)
        if failed:
            CliCommandsService.emit("failed", ",".join(failed))

        exit_code = EXIT_SUCCESS if passed else EXIT_VERIFICATION_FAILED
        manifest_path = manifest or os.path.join(configs.OUTPUT_FOLDER, "verify_" + configs.RUN_MANIFEST_FILE)
        return CliCommandsService._finish("verify", parameters, [], outputs, seed, started, started_at, exit_code, manifest_path)

    @staticmethod
    def read_shifts(path: str) -> list[tuple[float, float]]:
        """
        Reads one "dx dy" (or "dx,dy") shift per line, in LR pixel units; ``#`` starts a comment.
        """
        if not os.path.exists(path):
            logging.error(f"File not found: {path}")
            raise FileNotFoundError(f"File not found: {path}")

        table = pd.read_csv(path, sep=r"[,\s]+", header=None, comment="#", engine="python")
        if table.shape[1] != 2:
            logging.error(f"Shifts file {path} must have two columns, got {table.shape[1]}")
            raise ValueError(f"Shifts file {path} must have two columns, got {table.shape[1]}")
        return [(float(dx), float(dy)) for dx, dy in table.itertuples(index=False)]

    @staticmethod
    def emit(key: str, value) -> None:
        """
        Prints one machine-readable ``key=value`` line (floats with 4 decimals, booleans lower-case).
        """
        if isinstance(value, (bool, np.bool_)):
            text = str(bool(value)).lower()
        elif isinstance(value, (float, np.floating)):
            text = f"{value:.4f}"
        else:
            text = str(value)
        print(f"{key}={LoggerService.log_and_return(text, key)}")

    @staticmethod
    def _emit_scores(prefix: str, estimate, truth, border: int) -> None:
        cropped_estimate = MetricsService.crop_border(estimate, border)
        cropped_truth = MetricsService.crop_border(truth, border)
        CliCommandsService.emit(f"{prefix}psnr", MetricsService.psnr(cropped_estimate, cropped_truth))
        if min(cropped_truth.width, cropped_truth.height) >= configs.SSIM_WINDOW_SIZE:
            CliCommandsService.emit(f"{prefix}ssim", MetricsService.ssim(cropped_estimate, cropped_truth))

    @staticmethod
    def _resolve_flows(
        seq_dir: str,
        sequence: ImageSequence,
        flows: str,
        alignment: AlignmentMode,
        levels: int,
        iters: int,
        lambda1: float,
        kernel: str,
    ) -> list[Optional[FlowField]]:
        # SPMC consumes F_{i->0}, BW consumes F_{0->i}.
        from_reference = alignment == AlignmentMode.BW
        if flows == "auto":
            cfg = FlowEstimationConfig(
                pyramid_levels=levels,
                iterations_per_level=iters,
                lambda1=lambda1,
                kernel=KernelKind.get_kind_by_name(kernel),
            )
            estimated = []
            for index, frame in enumerate(sequence.frames):
                if index == sequence.reference_index:
                    estimated.append(None)
                elif from_reference:
                    estimated.append(FlowEstimationService.estimate_flow_pyramidal(frame, sequence.reference, cfg))
                else:
                    estimated.append(FlowEstimationService.estimate_flow_pyramidal(sequence.reference, frame, cfg))
            return estimated

        folder = seq_dir if flows == "true" else flows
        if not from_reference:
            return SequenceDirectoryService.read_flows(folder, sequence)
        try:
            return SequenceDirectoryService.read_flows(folder, sequence, from_reference=True)
        except FileNotFoundError:
            logging.warning("No F_{0->i} files found, using the negated F_{i->0} flows")
            forward = SequenceDirectoryService.read_flows(folder, sequence)
            return [flow.negated() if flow is not None else None for flow in forward]

    @staticmethod
    def _finish(
        command: str,
        parameters: dict[str, Any],
        inputs: list[str],
        outputs: list[str],
        seed: Optional[int],
        started: float,
        started_at: str,
        exit_code: int,
        manifest_path: str,
    ) -> int:
        elapsed = TimingUtils.elapsed_since(started)
        RunManifest(
            command=command,
            parameters=parameters,
            inputs=inputs,
            outputs=outputs,
            seed=seed,
            started_at=started_at,
            duration_seconds=elapsed,
            duration=TimingUtils.format_duration(elapsed),
            exit_code=exit_code,
        ).save(manifest_path)
        CliCommandsService.emit("manifest", manifest_path)
        logging.info(f"Command '{command}' finished in {TimingUtils.format_duration(elapsed)} with exit code {exit_code}")
        return exit_code
