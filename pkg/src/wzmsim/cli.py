"""
Command-line front end.

    wzmsim scan    [--config F] [--t-steps N] [--nbar X ...] [--out CSV] [--svg SVG] [--verify] [--fringe CSV]
    wzmsim verify  [--config F] [--t-steps N] [--nbar X ...] [--out CSV]
    wzmsim fringe  [--config F] [--nbar X] [--t T] [--phi-steps N] [--no-balance] [--out CSV] [--svg SVG]

Exit codes: 0 success, 1 tolerance violation, 2 config error, 3 I/O error.
"""

import argparse
import logging
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from . import plotting
from .config import ScanConfig, load_config
from .errors import ConfigError, ConvergenceFailure, UndefinedCoherence
from .experiment import (
    ExperimentConfig,
    build_chain,
    fringe_scan,
    g1_closed_form,
    g1_from_moments,
    g1_nbar_form,
)
from .fock import truncation_check
from .modes import vacuum_moments

log = logging.getLogger("wzmsim")

EXIT_OK, EXIT_TOLERANCE, EXIT_CONFIG, EXIT_IO = 0, 1, 2, 3

SCAN_HEADER = "nbar1,t,g1,g1_route_moments,g1_route_closed,delta"
FRINGE_HEADER = "phi,I_plus,I_minus"
VERIFY_HEADER = ("nbar1,t,chi,status,cutoff,trunc_error,max_deviation,"
                 "n_s1_exact,n_s1_fock,n_s2_exact,n_s2_fock,cross_exact,cross_fock")


def fmt(x) -> str:
    return "%.17g" % x


def parallel_map(func, items, jobs=1):
    """Map over ``items`` in order; a process pool is used when jobs > 1."""
    items = list(items)
    if jobs <= 1 or len(items) <= 1:
        return [func(item) for item in items]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(func, items))


# ---------------------------------------------------------------- scan

@dataclass
class ScanResult:
    rows: list
    flagged: list = field(default_factory=list)
    undefined: list = field(default_factory=list)

    def curves(self):
        out = {}
        for nbar, t, g1, *_ in self.rows:
            ts, gs = out.setdefault(nbar, ([], []))
            ts.append(t)
            gs.append(g1)
        return {k: (np.array(t), np.array(g)) for k, (t, g) in out.items()}

    def to_csv(self) -> str:
        lines = [SCAN_HEADER]
        lines += [",".join(fmt(v) for v in row) for row in self.rows]
        return "\n".join(lines) + "\n"


def _scan_curve(task):
    nbar, t_grid = task
    chi = math.asinh(math.sqrt(nbar))
    rows = []
    for t in t_grid:
        g1 = g1_nbar_form(nbar, t)
        g_closed = g1_closed_form(chi, t)
        try:
            g_mom = g1_from_moments(vacuum_moments(build_chain(ExperimentConfig(chi, t))))
        except UndefinedCoherence:
            g_mom = math.nan
        delta = max(abs(g1 - g_mom), abs(g1 - g_closed), abs(g_mom - g_closed))
        rows.append((nbar, float(t), g1, g_mom, g_closed, delta))
    return rows


def run_scan(config: ScanConfig) -> ScanResult:
    t_grid = config.t_grid()
    curves = parallel_map(_scan_curve, [(n, t_grid) for n in config.nbar], config.jobs)
    result = ScanResult([row for curve in curves for row in curve])
    for row in result.rows:
        if math.isnan(row[3]):
            result.undefined.append(row)
        elif not row[5] < config.tol:
            result.flagged.append(row)
    return result


# ---------------------------------------------------------------- verify

@dataclass
class VerifyPoint:
    nbar1: float
    t: float
    chi: float
    status: str
    cutoff: Optional[int] = None
    trunc_error: float = math.nan
    max_deviation: float = math.nan
    exact: object = None
    fock: object = None
    note: str = ""

    def csv_row(self) -> str:
        def pair(attr):
            e = getattr(self.exact, attr) if self.exact is not None else math.nan
            f = getattr(self.fock, attr) if self.fock is not None else math.nan
            return [fmt(abs(e)), fmt(abs(f))]
        cells = [fmt(self.nbar1), fmt(self.t), fmt(self.chi), self.status,
                 "" if self.cutoff is None else str(self.cutoff),
                 fmt(self.trunc_error), fmt(self.max_deviation)]
        for attr in ("n_s1", "n_s2", "cross"):
            cells += pair(attr)
        return ",".join(cells)


@dataclass
class VerifyReport:
    points: List[VerifyPoint]

    @property
    def checked(self):
        return [p for p in self.points if p.status != "SKIPPED"]

    @property
    def failed(self):
        return [p for p in self.points if p.status in ("FAIL", "NOCONV")]

    def to_csv(self) -> str:
        return "\n".join([VERIFY_HEADER] + [p.csv_row() for p in self.points]) + "\n"


def _verify_point(task):
    nbar, t, oracle_tol, floor, cap = task
    cfg = ExperimentConfig.from_nbar(nbar, t)
    exact = vacuum_moments(build_chain(cfg))
    try:
        res = truncation_check(cfg, tol=oracle_tol, cap=cap)
    except ConvergenceFailure as exc:
        dev = exc.moments.max_deviation(exact) if exc.moments is not None else math.nan
        return VerifyPoint(nbar, t, cfg.chi, "NOCONV", cap, exc.error, dev, exact, exc.moments, str(exc))
    dev = res.moments.max_deviation(exact)
    status = "PASS" if dev <= max(floor, res.error) else "FAIL"
    return VerifyPoint(nbar, t, cfg.chi, status, res.cutoff, res.error, dev, exact, res.moments)


def run_verify(config: ScanConfig) -> VerifyReport:
    """Cross-check the exact backend against the Fock oracle where chi <= chi_max."""
    tasks, points = [], []
    for nbar in config.nbar:
        chi = math.asinh(math.sqrt(nbar))
        for t in config.t_grid():
            t = float(t)
            if chi > config.chi_max:
                points.append(VerifyPoint(nbar, t, chi, "SKIPPED",
                                          note=f"chi={chi:.4g} beyond oracle range {config.chi_max:g}"))
            else:
                points.append(None)
                tasks.append((nbar, t, config.oracle_tol, config.agreement_floor, config.cutoff_cap))
    done = iter(parallel_map(_verify_point, tasks, config.jobs))
    return VerifyReport([p if p is not None else next(done) for p in points])


# ---------------------------------------------------------------- fringe

@dataclass
class FringeReport:
    scan: object
    v_raw: float
    v_balanced: float
    g1: float

    def to_csv(self) -> str:
        s = self.scan
        lines = [FRINGE_HEADER]
        lines += [f"{fmt(p)},{fmt(a)},{fmt(b)}" for p, a, b in zip(s.phi, s.I_plus, s.I_minus)]
        lines.append(f"# V_raw={fmt(self.v_raw)},V_balanced={fmt(self.v_balanced)},g1={fmt(self.g1)}")
        return "\n".join(lines) + "\n"


def run_fringe(config: ScanConfig) -> FringeReport:
    fs = config.fringe_settings
    cfg = ExperimentConfig.from_nbar(fs.nbar1, fs.t)
    if cfg.chi == 0:
        raise ConfigError("fringe_settings.nbar1", "nbar1 = 0 leaves no signal light; coherence is undefined")
    moments = vacuum_moments(build_chain(cfg))
    phi = np.linspace(0.0, 2.0 * np.pi, int(fs.phi_steps))
    raw = fringe_scan(cfg, phi, balance=False, moments=moments)
    bal = fringe_scan(cfg, phi, balance=True, moments=moments)
    g1 = g1_from_moments(moments)
    return FringeReport(bal if fs.balance else raw, raw.visibility, bal.visibility, g1)


# ---------------------------------------------------------------- driver

def _write(path, text):
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    with open(path, "w", newline="\n") as fh:
        fh.write(text)


def _parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config file; flags override its values")
    common.add_argument("--out", help="CSV output path (default: stdout)")
    common.add_argument("--tol", type=float, help="comparison tolerance for this subcommand")
    common.add_argument("--jobs", type=int, help="worker processes for grid evaluation")
    common.add_argument("-v", "--verbose", action="store_true")

    grid = argparse.ArgumentParser(add_help=False)
    grid.add_argument("--t-steps", type=int, dest="t_steps", help="points in the uniform t grid")
    grid.add_argument("--nbar", type=float, nargs="+", help="idler-1 photon numbers")

    parser = argparse.ArgumentParser(prog="wzmsim", description="Induced coherence between two downconverter signal beams.")
    sub = parser.add_subparsers(dest="command", required=True)

    scan = sub.add_parser("scan", parents=[common, grid], help="g1 against t for several nbar1")
    scan.add_argument("--svg", help="write the coherence figure here")
    scan.add_argument("--verify", action="store_true", default=None, help="also cross-check with the Fock oracle")
    scan.add_argument("--fringe", help="also write the fringe CSV for the configured fringe point")

    verify = sub.add_parser("verify", parents=[common, grid], help="exact backend against the Fock oracle")
    verify.add_argument("--cap", type=int, help="Fock cutoff cap per mode")

    fringe = sub.add_parser("fringe", parents=[common], help="fringe scan at one (nbar1, t)")
    fringe.add_argument("--nbar", type=float)
    fringe.add_argument("--t", type=float)
    fringe.add_argument("--phi-steps", type=int, dest="phi_steps")
    fringe.add_argument("--no-balance", action="store_false", dest="balance", default=None)
    fringe.add_argument("--svg", help="write the fringe figure here")
    return parser


def _config_from_args(args) -> ScanConfig:
    config = load_config(args.config)
    o = dict(out=args.out, jobs=args.jobs)
    if args.command == "scan":
        o.update(t_steps=args.t_steps, nbar=args.nbar, svg=args.svg, verify=args.verify,
                 fringe=args.fringe, tol=args.tol)
    elif args.command == "verify":
        o.update(t_steps=args.t_steps, nbar=args.nbar, oracle_tol=args.tol, cutoff_cap=args.cap)
    else:
        o.update(svg=args.svg, fringe_nbar1=args.nbar, fringe_t=args.t,
                 fringe_phi_steps=args.phi_steps, fringe_balance=args.balance, fringe_tol=args.tol)
    return config.with_overrides(**o)


def _report_verify(report: VerifyReport) -> int:
    if not report.checked:
        log.warning("no verifiable points (every nbar1 is beyond the oracle range)")
        return EXIT_OK
    for p in report.points:
        if p.status == "SKIPPED":
            log.info("SKIPPED nbar1=%g t=%g: %s", p.nbar1, p.t, p.note)
        elif p.status != "PASS":
            log.error("%s nbar1=%g t=%g deviation=%.3g truncation=%.3g %s",
                      p.status, p.nbar1, p.t, p.max_deviation, p.trunc_error, p.note)
    n_fail = len(report.failed)
    log.info("verify: %d checked, %d failed, %d skipped", len(report.checked), n_fail,
             len(report.points) - len(report.checked))
    return EXIT_TOLERANCE if n_fail else EXIT_OK


def _fringe_status(report: FringeReport, config: ScanConfig) -> int:
    if abs(report.v_balanced - report.g1) > config.fringe_tol:
        log.error("balanced visibility %.17g differs from g1 %.17g", report.v_balanced, report.g1)
        return EXIT_TOLERANCE
    return EXIT_OK


def execute(config: ScanConfig, command: str) -> int:
    if command == "scan":
        result = run_scan(config)
        _write(config.out, result.to_csv())
        if config.svg:
            plotting.plot_coherence_curves(result.curves(), config.svg)
        status = EXIT_OK
        for row in result.undefined:
            log.warning("nbar1=%g t=%g: moments route undefined (no signal light)", row[0], row[1])
        for row in result.flagged:
            log.error("nbar1=%g t=%g: routes disagree by %.3g", row[0], row[1], row[5])
            status = EXIT_TOLERANCE
        if config.fringe:
            report = run_fringe(config)
            _write(config.fringe, report.to_csv())
            status = max(status, _fringe_status(report, config))
        if config.verify:
            status = max(status, _report_verify(run_verify(config)))
        return status
    if command == "verify":
        report = run_verify(config)
        _write(config.out, report.to_csv())
        return _report_verify(report)
    if command == "fringe":
        report = run_fringe(config)
        _write(config.out, report.to_csv())
        if config.svg:
            plotting.plot_fringe(report.scan, report.g1, config.svg)
        return _fringe_status(report, config)
    raise ConfigError("command", f"unknown subcommand {command!r}")


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s", stream=sys.stderr)
    try:
        config = _config_from_args(args)
        return execute(config, args.command)
    except ConfigError as exc:
        log.error("config error: %s", exc)
        return EXIT_CONFIG
    except OSError as exc:
        log.error("I/O error: %s: %s", exc.filename or "", exc.strerror or exc)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
