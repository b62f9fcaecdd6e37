import sys
import logging
import argparse
import constants.configs as configs
from modules.cli.services.cli_commands_service import CliCommandsService, EXIT_USAGE_ERROR
from modules.enums.verification_suite import VerificationSuite
from modules.logger.services.logger_service import LoggerService


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="main.py",
        description="Multi-frame video super-resolution toolkit (SPMC alignment, shift-and-add and CG reconstruction).",
    )
    parser.add_argument("--log-level", default=configs.LOG_LEVEL, help="Logging level (DEBUG, INFO, WARNING, ...)")
    parser.add_argument("--log-file", default=configs.LOG_FILE, help="Log file path; empty string logs to stderr only")
    commands = parser.add_subparsers(dest="command", required=True)

    degrade = commands.add_parser("degrade", help="Degrade a folder of HR frames into an LR sequence directory")
    degrade.add_argument("in_dir")
    degrade.add_argument("out_dir")
    degrade.add_argument("--alpha", type=int, default=4)
    degrade.add_argument("--method", choices=["bicubic", "exact"], default="bicubic")
    degrade.add_argument("--noise-sigma", type=float, default=0.0)
    degrade.add_argument("--seed", type=int, default=configs.DEFAULT_SEED)
    degrade.add_argument("--blur-sigma", type=float, default=None)
    degrade.add_argument("--shifts", default=None, help="File of 'dx dy' LR shifts (exact method); emits true .flo files")
    degrade.add_argument("--manifest", default=None)

    flow = commands.add_parser("flow", help="Estimate F_{target->ref} and write it as .flo")
    flow.add_argument("ref_frame")
    flow.add_argument("target_frame")
    flow.add_argument("--out", required=True)
    flow.add_argument("--levels", type=int, default=configs.DEFAULT_PYRAMID_LEVELS)
    flow.add_argument("--iters", type=int, default=configs.DEFAULT_ITERATIONS_PER_LEVEL)
    flow.add_argument("--lambda1", type=float, default=configs.DEFAULT_LAMBDA1)
    flow.add_argument("--kernel", choices=["bilinear", "bicubic"], default="bilinear")
    flow.add_argument("--vis", default=None, help="Write a color-coded flow PNG")
    flow.add_argument("--trace", default=None, help="Loss trace CSV path")
    flow.add_argument("--manifest", default=None)

    reconstruct = commands.add_parser("reconstruct", help="Reconstruct the HR reference frame of a sequence directory")
    reconstruct.add_argument("seq_dir")
    reconstruct.add_argument("--out", required=True)
    reconstruct.add_argument("--alpha", type=float, default=None)
    reconstruct.add_argument("--align", choices=["spmc", "bw"], default="spmc")
    reconstruct.add_argument("--solver", choices=["sna", "cg"], default="sna")
    reconstruct.add_argument("--flows", default="auto", help="'auto', 'true' (flows of the sequence directory) or a folder")
    reconstruct.add_argument("--frames", type=int, default=None, help="Use the N frames closest to the reference")
    reconstruct.add_argument("--hole-fill", choices=["zero", "bicubic"], default="bicubic")
    reconstruct.add_argument("--kernel", choices=["bilinear", "bicubic"], default="bilinear")
    reconstruct.add_argument("--center-aligned", action=argparse.BooleanOptionalAction, default=None)
    reconstruct.add_argument("--tikhonov-eps", type=float, default=configs.DEFAULT_TIKHONOV_EPS)
    reconstruct.add_argument("--cg-max-iters", type=int, default=configs.DEFAULT_CG_MAX_ITERS)
    reconstruct.add_argument("--cg-tolerance", type=float, default=configs.DEFAULT_CG_TOLERANCE)
    reconstruct.add_argument("--levels", type=int, default=configs.DEFAULT_PYRAMID_LEVELS)
    reconstruct.add_argument("--iters", type=int, default=configs.DEFAULT_ITERATIONS_PER_LEVEL)
    reconstruct.add_argument("--lambda1", type=float, default=configs.DEFAULT_LAMBDA1)
    reconstruct.add_argument("--border", type=int, default=None)
    reconstruct.add_argument("--coverage", default=None, help="Coverage statistics CSV path")
    reconstruct.add_argument("--manifest", default=None)

    evaluate = commands.add_parser("eval", help="PSNR/SSIM between two images")
    evaluate.add_argument("img_a")
    evaluate.add_argument("img_b")
    evaluate.add_argument("--border", type=int, default=configs.DEFAULT_CROP_BORDER)
    evaluate.add_argument("--metric", choices=["psnr", "ssim", "both"], default="both")
    evaluate.add_argument("--peak", type=float, default=1.0)
    evaluate.add_argument("--manifest", default=None)

    verify = commands.add_parser("verify", help="Run the built-in verification suites")
    verify.add_argument("--suite", choices=[suite.value for suite in VerificationSuite], default=VerificationSuite.ALL.value)
    verify.add_argument("--seed", type=int, default=configs.DEFAULT_SEED)
    verify.add_argument("--trials", type=int, default=configs.VERIFY_DEFAULT_TRIALS)
    verify.add_argument("--report", default=None, help="Per-check CSV report path")
    verify.add_argument("--manifest", default=None)

    replay = commands.add_parser("replay", help="Re-run a command from its run manifest")
    replay.add_argument("manifest_path")

    return parser


def main(argv: list[str] = None) -> int:
    args = build_parser().parse_args(argv)
    parameters = vars(args)
    command = parameters.pop("command")

    # Config logs
    try:
        LoggerService.init(file_to_log=parameters.pop("log_file"), level=parameters.pop("log_level"))
    except ValueError as e:
        print(f"error={e}")
        return EXIT_USAGE_ERROR
    logging.info(f"Main START - {command}")

    try:
        if command == "replay":
            exit_code = CliCommandsService.cmd_replay(parameters["manifest_path"])
        else:
            exit_code = CliCommandsService.run_command(command, parameters)
    except (ValueError, FileNotFoundError, OSError) as e:
        logging.error(f"{command} failed: {e}")
        print(f"error={e}")
        exit_code = EXIT_USAGE_ERROR

    logging.info(f"Main END - exit code {exit_code}")
    return exit_code


if __name__ == "__main__":
    sys.exit(main())
