"""
Command-line runner: INI configuration, output directory, report files and exit status.
"""
import argparse
import configparser
import hashlib
import json
import math
import time
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from dotenv import load_dotenv
from pydantic import ValidationError

from ..models.params import SUBCOMMANDS, RunConfig, section_names
from ..models.schema import RunReport, build_run_report
from .config import REPORT_SCHEMA_VERSION, get_data_dir, get_log_level
from .error import ConfigError, handle_error
from .logger import get_logger, setup_logger
from .pipelines import RunContext, get_pipeline

logger = get_logger(__name__)

# INI sections nested below [problem]
NESTED_SECTIONS = {"density": "problem"}
RUN_SECTION = "run"


def _load_env() -> None:
    """Load .env from the project root, then from the current directory."""
    project_root = Path(__file__).parent.parent.parent
    env_file = project_root / ".env"
    if env_file.exists():
        load_dotenv(env_file, override=False)
    load_dotenv(override=False)


def parse_args(argv: Optional[Sequence[str]] = None) -> argparse.Namespace:
    parser = argparse.ArgumentParser(
        prog="lpdual",
        description="Numerical lab for the L_p dual Minkowski problem and its Monge-Ampere PDE",
    )
    parser.add_argument("subcommand", choices=SUBCOMMANDS, help="Pipeline to run")
    parser.add_argument("--config", type=str, default=None, help="INI configuration file")
    parser.add_argument("--grid", type=int, default=None, help="Grid N (overrides the file)")
    parser.add_argument("--out", type=str, default=None, help="Output directory")
    parser.add_argument("--seed", type=int, default=None, help="Seed for randomized checks")
    parser.add_argument(
        "--log-level",
        type=str,
        default=get_log_level(),
        choices=["DEBUG", "INFO", "WARNING", "ERROR"],
        help="Logging level (default: LPDUAL_LOG_LEVEL or INFO)",
    )
    parser.add_argument(
        "--log-file",
        type=str,
        default=None,
        help="Log file path (default: <out>/lpdual.log)",
    )
    return parser.parse_args(argv)


def _parse_scalar(raw: str) -> Any:
    text = raw.strip()
    lowered = text.lower()
    if lowered in ("", "none", "null"):
        return None
    if lowered in ("true", "false"):
        return lowered == "true"
    for cast in (int, float):
        try:
            return cast(text)
        except ValueError:
            continue
    return text


def _parse_value(raw: str) -> Any:
    """
    INI value to a Python value.

    "a, b" is a tuple, "a, b; c, d" a tuple of tuples; a single-element
    tuple needs a trailing comma.
    """
    text = raw.strip()
    if ";" in text:
        return tuple(_parse_value(part if "," in part else part + ",")
                     for part in text.split(";") if part.strip())
    if "," in text:
        return tuple(_parse_scalar(part) for part in text.split(",") if part.strip())
    return _parse_scalar(text)


def load_config_file(path: str) -> Dict[str, Any]:
    """
    Read an INI file into the nested dictionary RunConfig validates.

    Raises:
        ConfigError: missing file, parse error or unknown section
    """
    file_path = Path(path)
    if not file_path.exists():
        raise ConfigError(f"configuration file not found: {path}")
    parser = configparser.ConfigParser()
    try:
        parser.read(file_path, encoding="utf-8")
    except configparser.Error as e:
        raise ConfigError(f"cannot parse {path}: {e}") from e

    known = set(section_names()) | {RUN_SECTION}
    data: Dict[str, Any] = {}
    for section in parser.sections():
        if section not in known:
            raise ConfigError(f"unknown section [{section}] in {path}; expected {sorted(known)}")
        values = {key: _parse_value(raw) for key, raw in parser.items(section)}
        if section == RUN_SECTION:
            data.update(values)
        elif section in NESTED_SECTIONS:
            data.setdefault(NESTED_SECTIONS[section], {})[section] = values
        else:
            data.setdefault(section, {}).update(values)
    return data


def build_config(args: argparse.Namespace) -> RunConfig:
    """
    Command line over file over environment over built-in defaults.

    Raises:
        ConfigError: any validation failure
    """
    data = load_config_file(args.config) if args.config else {}
    data["subcommand"] = args.subcommand
    if args.grid is not None:
        data.setdefault("grid", {})["N"] = args.grid
    if args.seed is not None:
        data["seed"] = args.seed
    if args.out is not None:
        data["out"] = args.out
    try:
        return RunConfig.model_validate(data)
    except ValidationError as e:
        raise ConfigError(f"invalid configuration: {e}", details={"errors": e.errors()}) from e


def config_hash(config: RunConfig) -> str:
    payload = config.model_dump(mode="json", exclude={"out"})
    return hashlib.sha1(json.dumps(payload, sort_keys=True).encode()).hexdigest()[:8]


def output_dir(config: RunConfig) -> Path:
    if config.out:
        return Path(config.out)
    return get_data_dir() / "runs" / f"{config.subcommand}_{config_hash(config)}"


def _jsonable(value: Any) -> Any:
    """numpy scalars and arrays to Python values; non-finite floats to strings."""
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return _jsonable(value.tolist())
    if isinstance(value, np.generic):
        return _jsonable(value.item())
    if isinstance(value, float) and not math.isfinite(value):
        return str(value)
    if isinstance(value, Path):
        return str(value)
    return value


def split_timing(value: Any, path: str = "") -> Tuple[Any, Dict[str, float]]:
    """Remove every wall_time entry; return the stripped copy and the timings by path."""
    timing: Dict[str, float] = {}
    if isinstance(value, dict):
        out = {}
        for key, item in value.items():
            where = f"{path}.{key}" if path else str(key)
            if key == "wall_time":
                timing[path or key] = float(item)
                continue
            out[key], inner = split_timing(item, where)
            timing.update(inner)
        return out, timing
    if isinstance(value, list):
        items = []
        for i, item in enumerate(value):
            stripped, inner = split_timing(item, f"{path}[{i}]")
            items.append(stripped)
            timing.update(inner)
        return items, timing
    return value, timing


def exit_code(properties: List[Dict[str, Any]], error: Optional[Dict[str, Any]]) -> int:
    """Error class first; then 2 for a failed convergence property, 1 for any other failure."""
    if error is not None:
        return int(error["exit_code"])
    failed = [p["name"] for p in properties if not p["passed"]]
    if any(name.startswith("converged.") for name in failed):
        return 2
    return 1 if failed else 0


def write_json(data: Any, path: Path) -> None:
    path.write_text(json.dumps(_jsonable(data), indent=2) + "\n", encoding="utf-8")


def run(config: RunConfig, out_dir: Path) -> RunReport:
    """Run one pipeline and write report.json and timing.json into out_dir."""
    out_dir.mkdir(parents=True, exist_ok=True)
    ctx = RunContext(config=config, out_dir=out_dir)
    start = time.perf_counter()
    results: Dict[str, Any] = {}
    error: Optional[Dict[str, Any]] = None
    try:
        results = get_pipeline(config.subcommand)(ctx)
    except Exception as e:
        error = handle_error(e, logger, context={"subcommand": config.subcommand})
    total = time.perf_counter() - start

    grid = ctx.__dict__.get("grid")
    results, timing = split_timing(_jsonable(results))
    code = exit_code(ctx.properties, error)
    report = build_run_report(
        schema_version=REPORT_SCHEMA_VERSION,
        subcommand=config.subcommand,
        config=config.model_dump(mode="json"),
        grid=grid.describe() if grid is not None else {},
        results={**results, "files": ctx.files},
        properties=ctx.properties,
        exit_code=code,
        error=error,
    )
    write_json(report, out_dir / "report.json")
    write_json({"total": total, "solves": timing}, out_dir / "timing.json")

    failed = [p["name"] for p in ctx.properties if not p["passed"]]
    if error is not None:
        logger.error(f"Run {config.subcommand} failed ({error['error_type']}); exit {code}")
    elif failed:
        logger.warning(f"Run {config.subcommand}: {len(failed)} properties failed: {failed}")
    else:
        logger.info(f"Run {config.subcommand}: {len(ctx.properties)} properties passed")
    logger.info(f"Report: {out_dir / 'report.json'} ({total:.2f}s)")
    return report


def main(argv: Optional[Sequence[str]] = None) -> int:
    """CLI entry point; returns the process exit status."""
    _load_env()
    args = parse_args(argv)
    log_file = Path(args.log_file) if args.log_file else None
    try:
        config = build_config(args)
    except Exception as e:
        setup_logger(level=args.log_level, log_file=log_file)
        return handle_error(e, logger)["exit_code"]

    out_dir = output_dir(config)
    setup_logger(level=args.log_level, log_file=log_file or out_dir / "lpdual.log")
    logger.info(f"Subcommand {config.subcommand}, output directory {out_dir}")
    report = run(config, out_dir)
    return report["exit_code"]
