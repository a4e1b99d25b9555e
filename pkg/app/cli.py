"""
Command-line harness.

    python -m app single     [--theta ...] [--phi ...] [--shots N] ...
    python -m app two-qubit  [--angles T1,P1,T2,P2 ...] [--visibility V] ...
    python -m app bounds     [--theta-step DEG] [--random-maps N] ...

Options resolve as: explicit flag > ``--config`` file > environment > default.
Exit status is 0 on success, 2 for toolkit errors (bad parameters, I/O
failures) and 1 for anything unexpected.
"""

import argparse
import logging
import re
import sys
from collections.abc import Callable
from pathlib import Path
from typing import Any

from pydantic import BaseModel
from pydantic import ValidationError as PydanticValidationError

from app.config import Settings, get_settings, load_config_file, merge_options
from app.core.context import run_context
from app.core.exceptions import AppException, ValidationException
from app.core.logging import get_logger, setup_logging
from app.schemas.experiment_schema import BoundsParams, SingleQubitParams, TwoQubitParams
from app.services.bounds_service import BoundsExperiment
from app.services.result_writer import ResultWriter
from app.services.single_qubit_service import SingleQubitExperiment
from app.services.two_qubit_service import TwoQubitExperiment

logger = get_logger(__name__)

EXIT_OK = 0
EXIT_UNEXPECTED = 1
EXIT_APP_ERROR = 2

# Option keys (flag names with underscores) accepted per command
_COMMAND_KEYS: dict[str, set[str]] = {
    "single": {"theta", "phi", "shots", "attenuation_error", "mean_source", "seed", "dump_states"},
    "two-qubit": {"angles", "shots", "visibility", "mean_source", "seed", "dump_states"},
    "bounds": {"theta", "theta_step", "random_maps", "haar_samples", "seed"},
}

# Options that shape the run rather than the experiment; also readable from --config
_RUN_KEYS = {"out", "log_level", "log_format"}

DEFAULT_OUT = Path("results")

# Option key -> params field, where they differ
_FIELD_NAMES = {
    "theta": "thetas_deg",
    "phi": "phis_deg",
    "angles": "quadruples",
    "theta_step": "theta_step_deg",
}

_SEPARATORS = re.compile(r"[,\s]+")


# ── Parser ─────────────────────────────────────────────────────────────


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qfilter",
        description="Conditional orthogonalization experiments by quantum filtering.",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    single = subparsers.add_parser("single", help="Single-qubit orthogonalization grid")
    single.add_argument("--theta", type=float, nargs="+", help="Polar angles, degrees")
    single.add_argument("--phi", type=float, nargs="+", help="Azimuths, degrees")
    single.add_argument("--shots", type=int, help="Copies per basis setting")
    single.add_argument("--attenuation-error", type=float, help="Additive attenuation error")
    single.add_argument("--mean-source", choices=["known", "measured"])
    _add_common(single, dump_states=True)

    two = subparsers.add_parser("two-qubit", help="Local orthogonalization of entangled pairs")
    two.add_argument(
        "--angles",
        action="append",
        metavar="T1,P1,T2,P2",
        help="Preparation angles in degrees; repeat for several rows",
    )
    two.add_argument("--shots", type=int, help="Copies per basis setting")
    two.add_argument("--visibility", type=float, help="CZ interference visibility")
    two.add_argument("--mean-source", choices=["known", "measured"])
    _add_common(two, dump_states=True)

    bounds = subparsers.add_parser("bounds", help="Deterministic bound sweep and Haar benchmark")
    bounds.add_argument("--theta", type=float, nargs="+", help="Explicit angles, degrees")
    bounds.add_argument("--theta-step", type=float, help="Grid step, degrees")
    bounds.add_argument("--random-maps", type=int, help="Random channels per sweep")
    bounds.add_argument("--haar-samples", type=int, help="Haar samples per channel")
    _add_common(bounds, dump_states=False)

    return parser


def _add_common(sub: argparse.ArgumentParser, dump_states: bool) -> None:
    sub.add_argument("--seed", type=int, help="Master PRNG seed")
    sub.add_argument("--out", type=Path, default=None, help="Output directory (default: results)")
    sub.add_argument("--config", type=Path, help="KEY=VALUE file with option defaults")
    sub.add_argument("--log-level", default=None)
    sub.add_argument("--log-format", choices=["json", "console"], default=None)
    if dump_states:
        sub.add_argument(
            "--dump-states",
            action="store_const",
            const=True,
            default=None,
            help="Also write reconstructed density matrices to states.json",
        )


# ── Option resolution ──────────────────────────────────────────────────


def _floats(value: Any) -> list[float]:
    if isinstance(value, str):
        return [float(v) for v in _SEPARATORS.split(value.strip()) if v]
    return [float(v) for v in value]


def _quadruples(value: Any) -> list[dict[str, float]]:
    groups = value.split(";") if isinstance(value, str) else value
    result = []
    for group in groups:
        numbers = _floats(group)
        if len(numbers) != 4:
            raise ValidationException(
                message="Angle rows need four values: theta1,phi1,theta2,phi2.",
                details={"value": str(group)},
            )
        result.append(dict(zip(("theta1", "phi1", "theta2", "phi2"), numbers)))
    return result


_CONVERTERS: dict[str, Callable[[Any], Any]] = {
    "theta": _floats,
    "phi": _floats,
    "angles": _quadruples,
}


def _defaults(command: str, settings: Settings) -> dict[str, Any]:
    common = {"seed": settings.default_seed}
    if command == "single":
        return common | {
            "shots": settings.default_shots,
            "attenuation_error": settings.default_attenuation_error,
            "mean_source": settings.default_mean_source,
        }
    if command == "two-qubit":
        return common | {
            "shots": settings.default_shots,
            "visibility": settings.default_visibility,
            "mean_source": settings.default_mean_source,
        }
    return common | {
        "theta_step": settings.default_theta_step_deg,
        "random_maps": settings.default_random_maps,
        "haar_samples": settings.default_haar_samples,
    }


def _config_values(args: argparse.Namespace) -> dict[str, Any]:
    return load_config_file(args.config) if args.config else {}


def resolve_options(
    args: argparse.Namespace,
    settings: Settings,
    file_values: dict[str, Any] | None = None,
) -> dict[str, Any]:
    """Merge defaults, config file and flags into params field values."""
    known = _COMMAND_KEYS[args.command]
    flags = {key: getattr(args, key, None) for key in known}
    if file_values is None:
        file_values = _config_values(args)
    experiment_values = {k: v for k, v in file_values.items() if k not in _RUN_KEYS}
    merged = _defaults(args.command, settings) | merge_options(flags, experiment_values, known)

    fields: dict[str, Any] = {}
    for key, value in merged.items():
        converter = _CONVERTERS.get(key)
        try:
            fields[_FIELD_NAMES.get(key, key)] = converter(value) if converter else value
        except ValueError as exc:
            raise ValidationException(
                message=f"Option '{key}' has an invalid value.",
                details={"key": key, "value": str(value)},
            ) from exc
    return fields


def resolve_run_options(
    args: argparse.Namespace,
    settings: Settings,
    file_values: dict[str, Any] | None = None,
) -> dict[str, Any]:
    """Output directory and logging options: flag > config file > settings."""
    if file_values is None:
        file_values = _config_values(args)
    flags = {key: getattr(args, key, None) for key in _RUN_KEYS}
    run_values = {k: v for k, v in file_values.items() if k in _RUN_KEYS}
    defaults = {"out": DEFAULT_OUT, "log_level": settings.log_level, "log_format": settings.log_format}
    merged = defaults | merge_options(flags, run_values, _RUN_KEYS)

    level = str(merged["log_level"]).upper()
    if level not in logging.getLevelNamesMapping():
        raise ValidationException(
            message=f"Unknown log level '{merged['log_level']}'.",
            details={"log_level": level},
        )
    if merged["log_format"] not in ("json", "console"):
        raise ValidationException(
            message=f"Unknown log format '{merged['log_format']}'.",
            details={"log_format": merged["log_format"]},
        )
    return {"out": Path(merged["out"]), "log_level": level, "log_format": merged["log_format"]}


# ── Entry point ────────────────────────────────────────────────────────

_PARAMS: dict[str, type[BaseModel]] = {
    "single": SingleQubitParams,
    "two-qubit": TwoQubitParams,
    "bounds": BoundsParams,
}


def run_command(
    args: argparse.Namespace,
    settings: Settings,
    file_values: dict[str, Any] | None = None,
) -> list[Path]:
    """Validate options, run the experiment and write its files."""
    if file_values is None:
        file_values = _config_values(args)
    out = resolve_run_options(args, settings, file_values)["out"]
    try:
        params = _PARAMS[args.command].model_validate(resolve_options(args, settings, file_values))
    except PydanticValidationError as exc:
        raise ValidationException(
            message="Invalid experiment parameters.",
            details={"errors": [e["msg"] for e in exc.errors()]},
        ) from exc

    writer = ResultWriter(out)
    with run_context(command=args.command, seed=params.seed):
        if isinstance(params, SingleQubitParams):
            return writer.write_single(SingleQubitExperiment(settings).run(params))
        if isinstance(params, TwoQubitParams):
            return writer.write_two_qubit(TwoQubitExperiment(settings).run(params))
        return writer.write_bounds(BoundsExperiment(settings).run(params))


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    settings = get_settings()

    try:
        file_values = _config_values(args)
        run_options = resolve_run_options(args, settings, file_values)
    except AppException as exc:
        setup_logging(level=settings.log_level, log_format=settings.log_format)
        return _report(exc)
    setup_logging(level=run_options["log_level"], log_format=run_options["log_format"])

    try:
        paths = run_command(args, settings, file_values)
    except AppException as exc:
        return _report(exc)
    except Exception:
        logger.critical("Unhandled exception", exc_info=True)
        return EXIT_UNEXPECTED

    logger.info("Results written", extra={"files": [str(p) for p in paths]})
    return EXIT_OK


def _report(exc: AppException) -> int:
    logger.error(
        "Command failed",
        extra={"error_code": exc.error_code, "error_message": exc.message, "details": exc.details},
    )
    print(f"error [{exc.error_code}]: {exc.message}", file=sys.stderr)
    return EXIT_APP_ERROR
