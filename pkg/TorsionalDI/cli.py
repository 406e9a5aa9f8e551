"""
Command line front end: simulate captures, image a capture pair, sweep defect positions.

    torsional-di simulate SCENARIO -o OUT
    torsional-di locate SCENARIO BASELINE DAMAGE -o OUT [--window-samples W] [--grid RxC] [--truncate-us T] [--parallel]
    torsional-di sweep SCENARIO -o OUT --position Z_MM:THETA_DEG [...] [--jobs N]

Physical parameters come only from the scenario file; flags change analysis knobs.
Exit status: 0 success, 1 usage error, 2 invalid data or configuration, 3 internal error.
"""

from typing import Optional, Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
import argparse
import csv
import json
import logging
import os
import sys

from ._metadata import __version__
from .acquisition_io import MapFormat, export_map, parse_capture, write_capture, write_report
from .di_engine import DIParams, GridSpec, LocalizationReport, compute_di_map, localize, scaled_window_length
from .geometry import SurfacePoint
from .scenario import ScenarioConfig, ScenarioError, load_scenario
from .simulator import WaveformSet, simulate, simulate_pair

__all__ = [
    "EXIT_OK",
    "EXIT_USAGE",
    "EXIT_DATA",
    "EXIT_INTERNAL",
    "build_parser",
    "main",
]

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_INTERNAL = 3

BASELINE_FILE = "baseline.tgwc"
DAMAGE_FILE = "damage.tgwc"
MAP_STEM = "di_map"
REPORT_FILE = "report.json"
MANIFEST_FILE = "manifest.json"
SWEEP_FILE = "sweep.csv"
SWEEP_COLUMNS = (
    "index",
    "true_z_mm",
    "true_theta_deg",
    "estimated_z_mm",
    "estimated_theta_deg",
    "error_mm",
    "status",
)

# %% --------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _position(text: str) -> SurfacePoint:
    z_mm, sep, theta = text.partition(":")
    try:
        if not sep:
            raise ValueError
        return SurfacePoint.from_mm(float(z_mm), float(theta))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected Z_MM:THETA_DEG, got {text!r}") from None


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return value


def _grid_shape(text: str) -> tuple:
    rows, sep, cols = text.lower().partition("x")
    try:
        if not sep:
            raise ValueError
        shape = int(rows), int(cols)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected ROWSxCOLS, got {text!r}") from None
    if min(shape) < 1:
        raise argparse.ArgumentTypeError(f"expected ROWSxCOLS with positive sizes, got {text!r}")
    return shape


def _timestamp() -> str:
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    moment = datetime.now(timezone.utc) if epoch is None else datetime.fromtimestamp(int(epoch), timezone.utc)
    return moment.isoformat(timespec="seconds")


def _write_manifest(out_dir: Path, command: str, argv: Sequence[str], config: ScenarioConfig, started: str, files):
    manifest = {
        "command": command,
        "argv": list(argv),
        "scenario": config.source,
        "output_dir": str(out_dir),
        "version": __version__,
        "rng_seed": config.rng_seed,
        "started": started,
        "finished": _timestamp(),
        "files": sorted(files),
    }
    (out_dir / MANIFEST_FILE).write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")


def _output_dir(path: str) -> Path:
    out_dir = Path(path)
    out_dir.mkdir(parents=True, exist_ok=True)
    return out_dir


# %% --------------------------------------------------------------------------


@dataclass(frozen=True)
class AnalysisOptions:
    """
    Analysis knobs set from the command line.

    Args:
        window (int, optional):        Window length in samples of the data; None scales the scenario
                                       window to the capture's sampling rate.
        parallel (bool, optional):     Multithreaded DI kernel.
        truncate_us (float, optional): Keep only the first microseconds of every trace.
        grid (tuple, optional):        (rows, cols) replacing the scenario grid.
    """

    window: Optional[int] = None
    parallel: bool = False
    truncate_us: Optional[float] = None
    grid: Optional[tuple] = None

    @classmethod
    def from_args(cls, args) -> "AnalysisOptions":
        return cls(args.window, args.parallel, args.truncate_us, args.grid)


def _image(
    config: ScenarioConfig,
    baseline: WaveformSet,
    damage: WaveformSet,
    out_dir: Path,
    options: AnalysisOptions,
) -> LocalizationReport:
    config.check_capture(baseline, "baseline capture")
    config.check_capture(damage, "damage capture")
    if options.truncate_us is not None:
        baseline = baseline.truncated(options.truncate_us * 1.0e-6)
        damage = damage.truncated(options.truncate_us * 1.0e-6)
    window = options.window
    if window is None:
        window = scaled_window_length(
            config.di_params.window_length_samples, config.acquisition.sampling_rate, baseline.sampling_rate
        )
    params = DIParams(config.di_params.group_velocity, window)
    grid = config.grid if options.grid is None else GridSpec.with_layout(config.layout, *options.grid)
    di_map = compute_di_map(baseline, damage, config.layout, config.pipe, grid, params, parallel=options.parallel)
    report = localize(di_map, config.truth, config.pipe)

    export_map(di_map, MapFormat.CSV, out_dir / f"{MAP_STEM}.csv")
    export_map(di_map, MapFormat.PGM, out_dir / f"{MAP_STEM}.pgm")
    extra = {"window_length_samples": window, "num_samples": baseline.num_samples}
    write_report(report, out_dir / REPORT_FILE, extra)
    return report


def _summary(report: LocalizationReport) -> str:
    if not report.located:
        return report.status.value
    text = f"estimated defect at {report.estimated} (peak {report.peak_value:.6g})"
    if report.error is not None:
        text += f", truth {report.truth}, error {report.error * 1.0e3:.1f} mm"
    return text


def cmd_simulate(args) -> int:
    started = _timestamp()
    config = load_scenario(args.scenario)
    out_dir = _output_dir(args.output)
    files = [BASELINE_FILE]
    if config.defect is None:
        logger.warning("scenario has no defect section; only %s is written, locate needs a damage set", BASELINE_FILE)
        baseline = simulate(
            config.pipe, config.layout, config.excitation, config.propagation, config.acquisition, None, config.rng_seed
        )
        write_capture(baseline, out_dir / BASELINE_FILE)
    else:
        baseline, damage = simulate_pair(
            config.pipe,
            config.layout,
            config.excitation,
            config.propagation,
            config.acquisition,
            config.defect,
            config.rng_seed,
        )
        write_capture(baseline, out_dir / BASELINE_FILE)
        write_capture(damage, out_dir / DAMAGE_FILE)
        files.append(DAMAGE_FILE)
    _write_manifest(out_dir, "simulate", args.argv, config, started, files)
    print(f"wrote {', '.join(files)} ({baseline.num_receivers} channels x {baseline.num_samples} samples) to {out_dir}")
    return EXIT_OK


def cmd_locate(args) -> int:
    started = _timestamp()
    config = load_scenario(args.scenario)
    baseline = parse_capture(args.baseline, config.layout)
    damage = parse_capture(args.damage, config.layout)
    out_dir = _output_dir(args.output)
    report = _image(config, baseline, damage, out_dir, AnalysisOptions.from_args(args))
    files = [f"{MAP_STEM}.csv", f"{MAP_STEM}.pgm", REPORT_FILE]
    _write_manifest(out_dir, "locate", args.argv, config, started, files)
    print(_summary(report))
    return EXIT_OK


def _sweep_position(job: tuple) -> dict:
    index, config, position, pos_dir, options = job
    row = {
        "index": index,
        "true_z_mm": position.z_mm,
        "true_theta_deg": position.theta,
        "estimated_z_mm": "",
        "estimated_theta_deg": "",
        "error_mm": "",
    }
    try:
        moved = config.with_defect_at(position)
        pos_dir = _output_dir(pos_dir)
        baseline, damage = simulate_pair(
            moved.pipe,
            moved.layout,
            moved.excitation,
            moved.propagation,
            moved.acquisition,
            moved.defect,
            moved.rng_seed,
        )
        write_capture(baseline, pos_dir / BASELINE_FILE)
        write_capture(damage, pos_dir / DAMAGE_FILE)
        report = _image(
            moved,
            parse_capture(pos_dir / BASELINE_FILE, moved.layout),
            parse_capture(pos_dir / DAMAGE_FILE, moved.layout),
            pos_dir,
            options,
        )
    except Exception as err:
        message = str(err).strip() or type(err).__name__
        logger.error("position %d %s failed: %s", index, position, message)
        row["status"] = f"error: {message.splitlines()[0]}"
        return row
    row["status"] = report.status.value
    if report.located:
        row["estimated_z_mm"] = report.estimated.z_mm
        row["estimated_theta_deg"] = report.estimated.theta
        row["error_mm"] = report.error * 1.0e3
    return row


def cmd_sweep(args) -> int:
    started = _timestamp()
    config = load_scenario(args.scenario)
    if config.defect is None:
        raise ScenarioError("defect", "a sweep needs a defect section to move")
    out_dir = _output_dir(args.output)
    jobs = [
        (k, config, position, out_dir / f"pos_{k:03d}", AnalysisOptions.from_args(args))
        for k, position in enumerate(args.position)
    ]
    if args.jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            rows = list(pool.map(_sweep_position, jobs))
    else:
        rows = [_sweep_position(job) for job in jobs]

    with open(out_dir / SWEEP_FILE, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=SWEEP_COLUMNS)
        writer.writeheader()
        writer.writerows(rows)
    _write_manifest(out_dir, "sweep", args.argv, config, started, [SWEEP_FILE])

    for row in rows:
        error = f"{row['error_mm']:.1f} mm" if row["error_mm"] != "" else "-"
        where = f"z={row['true_z_mm']:7.1f} mm  theta={row['true_theta_deg']:6.1f} deg"
        print(f"{row['index']:3d}  {where}  error={error}  {row['status']}")
    print(f"{len(rows)} positions written to {out_dir / SWEEP_FILE}")
    return EXIT_OK


# %% --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="torsional-di", description="Torsional guided-wave damage index imaging for pipes.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="-v for info, -vv for debug logging")
    commands = parser.add_subparsers(dest="command", required=True)

    sim = commands.add_parser("simulate", help="simulate baseline and damage captures from a scenario")
    sim.add_argument("scenario", help="scenario YAML file")
    sim.add_argument("-o", "--output", required=True, help="output directory")
    sim.set_defaults(handler=cmd_simulate)

    loc = commands.add_parser("locate", help="compute the DI map of a capture pair and localize the defect")
    loc.add_argument("scenario", help="scenario YAML file")
    loc.add_argument("baseline", help="baseline capture")
    loc.add_argument("damage", help="damage capture")
    loc.add_argument("-o", "--output", required=True, help="output directory")

    sweep = commands.add_parser("sweep", help="simulate and localize a list of defect positions")
    sweep.add_argument("scenario", help="scenario YAML file with a defect section")
    sweep.add_argument("-o", "--output", required=True, help="output directory")
    sweep.add_argument(
        "--position", type=_position, action="append", default=[], metavar="Z_MM:THETA_DEG", help="defect position"
    )
    sweep.add_argument("--jobs", type=_positive_int, default=1, help="positions processed in parallel")

    for sub in (loc, sweep):
        sub.add_argument(
            "--window-samples",
            "--window",
            dest="window",
            type=_positive_int,
            default=None,
            help="window length in samples of the data",
        )
        sub.add_argument("--grid", type=_grid_shape, default=None, metavar="RxC", help="image grid, e.g. 360x400")
        sub.add_argument("--parallel", action="store_true", help="multithreaded DI kernel")
        sub.add_argument("--truncate-us", type=float, default=None, help="keep only the first T microseconds")
    loc.set_defaults(handler=cmd_locate)
    sweep.set_defaults(handler=cmd_sweep)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as err:  # --help, --version and usage errors
        return EXIT_OK if err.code is None else int(err.code)
    args.argv = argv
    level = {0: logging.WARNING, 1: logging.INFO}.get(args.verbose, logging.DEBUG)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")

    try:
        return args.handler(args)
    except (ValueError, OSError) as err:
        logger.error("%s", str(err).strip())
        return EXIT_DATA
    except Exception as err:
        logger.debug("internal error", exc_info=True)
        logger.error("internal error: %s", err)
        return EXIT_INTERNAL
