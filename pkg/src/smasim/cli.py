"""Command-line front end.

::

    smasim run --config fig2 --out results/ --plots
    smasim run --config my.ini --trials 10000 --seed 7 --snr 0:5:20
    smasim validate --config my.ini
    smasim list-presets

Exit status: 0 success, 1 invalid configuration, 2 simulation/runtime failure.
"""

import argparse
from dataclasses import dataclass
import logging
import math
import os
import sys

from . import config as cfg
from .montecarlo import Metric, analytic_companion, run_scenario
from .plotscripts import FIGURE_FOR_EXPERIMENT, emit_plot_script

__all__ = ["RunConfig", "CSV_HEADER", "run", "write_csv", "csv_name", "format_number", "main"]

log = logging.getLogger("smasim")

CSV_HEADER = ("snr_db", "estimate", "standard_error", "trials_used", "analytic")

EXIT_OK, EXIT_INVALID, EXIT_RUNTIME = 0, 1, 2


@dataclass
class RunConfig:
    config: str
    out_dir: str = "."
    trials: int = None
    seed: int = None
    snr_grid_db: tuple = None
    emit_plots: bool = False
    workers: int = 1


def format_number(v) -> str:
    """9 significant digits, '.' decimal separator; ``nan``/``inf`` spelled out."""
    v = float(v)
    if math.isnan(v):
        return "nan"
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return f"{v:.9g}"


def csv_name(scn, metric: Metric) -> str:
    if metric is Metric.SUM_RATE:
        return f"sum_rate_{scn.name}.csv"
    user = metric.value.rsplit("_", 1)[1]
    return f"{scn.experiment}_{scn.name}_{user}.csv"


def write_csv(path, series, analytic) -> None:
    lines = [",".join(CSV_HEADER)]
    for p, a in zip(series.points, analytic):
        lines.append(",".join([format_number(p.snr_db), format_number(p.estimate),
                               format_number(p.standard_error), str(int(p.trials_used)),
                               format_number(a)]))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def _apply_overrides(scenarios, rc: RunConfig):
    changes = {}
    if rc.trials is not None:
        changes["trials"] = rc.trials
    if rc.seed is not None:
        changes["master_seed"] = rc.seed
    if rc.snr_grid_db is not None:
        changes["snr_grid_db"] = tuple(rc.snr_grid_db)
    if not changes:
        return scenarios
    try:
        return [s.with_overrides(**changes) for s in scenarios]
    except ValueError as exc:
        raise cfg.ConfigError("overrides", str(exc)) from exc


def load_scenarios(rc: RunConfig):
    return _apply_overrides(cfg.parse_config(cfg.load_config_text(rc.config)), rc)


def run(rc: RunConfig) -> int:
    """Execute every scenario of a config and write one CSV per series.

    On any failure, files written by this call are removed.
    """
    try:
        scenarios = load_scenarios(rc)
        if rc.workers is not None and rc.workers < 1:
            raise cfg.ConfigError("workers", "must be >= 1")
    except cfg.ConfigError as exc:
        log.error("invalid configuration: %s", exc)
        return EXIT_INVALID
    written = []
    try:
        os.makedirs(rc.out_dir, exist_ok=True)
        by_figure = {}
        for scn in scenarios:
            log.info("running %s (%s, %s, %d trials x %d SNR points)", scn.name, scn.scheme,
                     scn.experiment, scn.trials, len(scn.snr_grid_db))
            for metric, series in run_scenario(scn, workers=rc.workers).items():
                name = csv_name(scn, metric)
                path = os.path.join(rc.out_dir, name)
                ana = analytic_companion(scn, metric)
                written.append(path)
                write_csv(path, series, ana)
                by_figure.setdefault(FIGURE_FOR_EXPERIMENT[scn.experiment], []).append({
                    "file": name,
                    "scheme": scn.scheme,
                    "metric": metric.value,
                    "label": _label(scn, metric),
                    "has_analytic": not all(math.isnan(a) for a in ana),
                })
        if rc.emit_plots:
            for figure, entries in by_figure.items():
                path = os.path.join(rc.out_dir, f"plot_{figure}.py")
                written.append(path)
                with open(path, "w", encoding="utf-8", newline="\n") as fh:
                    fh.write(emit_plot_script(entries, figure))
    except Exception as exc:  # noqa: BLE001 -- any failure aborts the run cleanly
        log.error("run failed: %s", exc)
        for path in written:
            if os.path.exists(path):
                os.remove(path)
        return EXIT_RUNTIME
    return EXIT_OK


def _label(scn, metric):
    if metric is Metric.SUM_RATE:
        return f"{scn.scheme} Nr={scn.Nr}"
    user = metric.value.rsplit("_", 1)[1].upper().replace("UE", "UE-")
    return f"{scn.scheme} {user}"


def _build_parser():
    p = argparse.ArgumentParser(prog="smasim", description="SMA vs NOMA link-level simulator")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run the scenarios of a config file or preset")
    r.add_argument("--config", required=True, help="config file path or preset name (fig2, fig3, fig4)")
    r.add_argument("--trials", type=int, help="override trials per SNR point")
    r.add_argument("--seed", type=int, help="override master seed")
    r.add_argument("--snr", help="override SNR grid, e.g. 0:2:20 or '0, 10, 20'")
    r.add_argument("--out", default=".", help="output directory (default: current)")
    r.add_argument("--plots", action="store_true", help="also write plot_<figure>.py scripts")
    r.add_argument("--workers", type=int, default=1, help="worker processes (results do not depend on it)")

    v = sub.add_parser("validate", help="check a config file without running it")
    v.add_argument("--config", required=True)

    sub.add_parser("list-presets", help="list bundled figure presets")
    return p


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    if args.command == "list-presets":
        for name, desc in cfg.list_presets().items():
            print(f"{name}\t{desc}")
        return EXIT_OK
    if args.command == "validate":
        try:
            scenarios = cfg.parse_config(cfg.load_config_text(args.config))
        except cfg.ConfigError as exc:
            print(f"invalid: {exc}", file=sys.stderr)
            return EXIT_INVALID
        for s in scenarios:
            print(f"ok\t{s.name}\t{s.scheme}\t{s.experiment}\tNt={s.Nt} Nr={s.Nr} M={s.M}\t"
                  f"{len(s.snr_grid_db)} SNR points x {s.trials} trials")
        return EXIT_OK
    try:
        grid = cfg.parse_snr_grid(args.snr) if args.snr else None
    except ValueError as exc:
        print(f"invalid: --snr: {exc}", file=sys.stderr)
        return EXIT_INVALID
    rc = RunConfig(config=args.config, out_dir=args.out, trials=args.trials, seed=args.seed,
                   snr_grid_db=grid, emit_plots=args.plots, workers=args.workers)
    return run(rc)


if __name__ == "__main__":
    sys.exit(main())
