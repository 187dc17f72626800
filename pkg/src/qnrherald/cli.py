"""Command-line front end: data tables behind the heralding figures and the oracle gate.

Exit codes: 0 success, 1 invalid input, 2 verification failure.
"""
from __future__ import annotations

import argparse
import sys
from contextlib import contextmanager
from typing import Sequence

import numpy as np

from . import closed_form as cf
from . import oracle
from .model import (
    DEFAULT_TAIL_TOL,
    DetectorParams,
    QnrConfig,
    SourceParams,
    thermal_distribution,
    truncation_cutoff,
)
from .optimizer import find_fidelity_opt, optimize
from .tables import columns_for, quantize, write_table

EXIT_OK, EXIT_INVALID, EXIT_VERIFY_FAILED = 0, 1, 2

# Enumeration terms the distribution command is willing to spend on its oracle column.
DISTRIBUTION_ORACLE_BUDGET = 2_000_000


class UsageError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def parse_int_list(text: str) -> list[int]:
    try:
        values = [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"expected comma-separated integers, got {text!r}") from None
    if not values:
        raise UsageError("empty integer list")
    return values


def parse_modes_range(text: str) -> list[int]:
    """``start:stop[:stride]`` inclusive of ``stop``, or a comma list."""
    if ":" not in text:
        return parse_int_list(text)
    parts = text.split(":")
    try:
        nums = [int(p) for p in parts]
    except ValueError:
        raise UsageError(f"bad modes range {text!r}") from None
    if len(nums) not in (2, 3):
        raise UsageError(f"bad modes range {text!r}")
    start, stop = nums[0], nums[1]
    stride = nums[2] if len(nums) == 3 else 1
    if start < 1 or stop < start or stride < 1:
        raise UsageError(f"modes range needs 1 <= start <= stop and stride >= 1, got {text!r}")
    return list(range(start, stop + 1, stride))


def parse_grid(text: str) -> list[float]:
    """Comma list, ``start:stop:num`` (linear) or ``log:start:stop:num`` (geometric)."""
    try:
        if text.startswith("log:"):
            start, stop, num = text[4:].split(":")
            if float(start) <= 0 or float(stop) <= 0:
                raise UsageError(f"log grid needs positive end points, got {text!r}")
            values = np.geomspace(float(start), float(stop), int(num))
        elif ":" in text:
            start, stop, num = text.split(":")
            values = np.linspace(float(start), float(stop), int(num))
        else:
            values = [float(v) for v in text.split(",") if v.strip()]
    except UsageError:
        raise
    except ValueError:
        raise UsageError(f"bad grid {text!r}") from None
    grid = [quantize(v) for v in values]
    if not grid:
        raise UsageError(f"empty grid {text!r}")
    return grid


def _params(args) -> tuple[SourceParams, DetectorParams]:
    return SourceParams(args.mu), DetectorParams(args.eta, args.delta)


def _n_max(args, source: SourceParams) -> int:
    if args.n_max is not None:
        if args.n_max < 0:
            raise UsageError("--n-max must be >= 0")
        return args.n_max
    return truncation_cutoff(source, args.tail_tol)


def _base_row(modes: int, source: SourceParams, detector: DetectorParams) -> dict:
    try:
        fidelity = cf.single_photon_fidelity(modes, source, detector)
    except cf.DegenerateHeraldError:
        fidelity = None
    return {
        "m_modes": modes,
        "mu": source.mu,
        "eta": detector.eta,
        "delta": detector.delta,
        "p_click_1": cf.single_click_probability(modes, source, detector),
        "fidelity_1": fidelity,
    }


@contextmanager
def _output(path):
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def _emit(args, rows, extra_columns) -> None:
    with _output(args.out) as stream:
        write_table(rows, columns_for(extra_columns), args.format, stream)


def cmd_distribution(args) -> int:
    source, detector = _params(args)
    if args.n_display < 0:
        raise UsageError("--n-display must be >= 0")
    n_max = max(_n_max(args, source), args.n_display)
    thermal = thermal_distribution(source, n_max).probs
    rows = []
    for modes in parse_int_list(args.modes):
        QnrConfig(modes, 1)
        state = cf.heralded_distribution(modes, source, detector, n_max)
        oracle_probs = None
        if oracle.enumeration_cost(modes, n_max) <= args.oracle_budget:
            oracle_probs = oracle.exact_heralded_distribution(
                QnrConfig(modes, 1), source, detector, n_max).probs
        base = _base_row(modes, source, detector)
        for n in range(args.n_display + 1):
            rows.append(dict(base, n=n, n_max=n_max, thermal=thermal[n],
                             heralded=state.distribution[n],
                             oracle=None if oracle_probs is None else oracle_probs[n]))
    _emit(args, rows, ["n", "thermal", "heralded", "oracle", "n_max"])
    return EXIT_OK


def cmd_sweep_m(args) -> int:
    source, detector = _params(args)
    rows = [_base_row(m, source, detector) for m in parse_modes_range(args.modes_range)]
    _emit(args, rows, [])
    return EXIT_OK


def cmd_contour(args) -> int:
    source = SourceParams(args.mu)
    etas, deltas = parse_grid(args.eta_grid), parse_grid(args.delta_grid)
    if any(d <= 0 for d in deltas):
        raise UsageError("contour needs strictly positive delta values")
    rows = []
    for eta in etas:
        for delta in deltas:
            detector = DetectorParams(eta, delta)
            report = find_fidelity_opt(source, detector, args.search_bound)
            rows.append(dict(_base_row(report.m_fidelity_opt, source, detector),
                             m_fidelity_approx=report.m_fidelity_approx,
                             search_bound=report.search_bound))
    _emit(args, rows, ["m_fidelity_approx", "search_bound"])
    return EXIT_OK


def cmd_optimize(args) -> int:
    source, detector = _params(args)
    report = optimize(source, detector, args.search_bound)
    row = dict(_base_row(report.m_fidelity_opt, source, detector), **vars(report))
    _emit(args, [row], ["m_fidelity_opt", "fidelity_at_opt", "m_fidelity_approx",
                        "m_prob_local_max", "prob_at_local_max", "m_prob_approx",
                        "search_bound"])
    return EXIT_OK


def cmd_mc(args) -> int:
    source, detector = _params(args)
    config = QnrConfig(args.modes, args.clicks)
    mc = oracle.McConfig(args.trials, args.seed)
    estimate, stderr = oracle.mc_click_probability(config, source, detector, mc)
    exact = cf.click_probability(config, source, detector, _n_max(args, source))
    z = (estimate - exact) / stderr if stderr > 0 else None
    row = dict(_base_row(args.modes, source, detector), clicks=args.clicks, exact=exact,
               mc_estimate=estimate, mc_std_error=stderr, z_score=z,
               trials=args.trials, seed=args.seed)
    _emit(args, [row], ["clicks", "exact", "mc_estimate", "mc_std_error", "z_score",
                        "trials", "seed"])
    return EXIT_OK


def verify_grid(max_modes: int, n_max: int, mus, etas, deltas) -> list[dict]:
    """Closed form against exact enumeration at every grid point and click count."""
    rows = []
    for eta in etas:
        for delta in deltas:
            detector = DetectorParams(eta, delta)
            for modes in range(1, max_modes + 1):
                for mu in mus:
                    source = SourceParams(mu)
                    exact = oracle.exact_click_probabilities(modes, source, detector, n_max)
                    base = _base_row(modes, source, detector)
                    for clicks in range(modes + 1):
                        config = QnrConfig(modes, clicks)
                        closed = cf.click_probability(config, source, detector, n_max)
                        dev = abs(closed - exact[clicks])
                        ideal = None
                        if eta == 1.0 and delta == 0.0:
                            ideal = cf.click_probability_ideal(config, source, n_max)
                            dev = max(dev, abs(ideal - exact[clicks]))
                        rows.append(dict(base, clicks=clicks, closed_form=closed,
                                         oracle=exact[clicks], ideal=ideal, abs_dev=dev))
    return rows


def cmd_verify(args) -> int:
    if args.max_modes < 1 or args.n_max < 0:
        raise UsageError("--max-modes must be >= 1 and --n-max >= 0")
    oracle.ExactOracleConfig(max_photons=args.n_max, modes=args.max_modes)
    rows = verify_grid(args.max_modes, args.n_max, parse_grid(args.mus),
                       parse_grid(args.etas), parse_grid(args.deltas))
    _emit(args, rows, ["clicks", "closed_form", "oracle", "ideal", "abs_dev"])
    worst = max(r["abs_dev"] for r in rows)
    ok = worst <= args.tol
    print(f"verify: {len(rows)} points, max |closed-form - oracle| = {worst:.3e} "
          f"(tol {args.tol:.1e}) {'PASS' if ok else 'FAIL'}", file=sys.stderr)
    return EXIT_OK if ok else EXIT_VERIFY_FAILED


def build_parser() -> argparse.ArgumentParser:
    out = argparse.ArgumentParser(add_help=False)
    out.add_argument("--format", choices=("csv", "json"), default="csv")
    out.add_argument("--out", default=None, help="output path (default: stdout)")

    phys = argparse.ArgumentParser(add_help=False)
    phys.add_argument("--mu", type=float, default=1.0, help="mean pairs per pump pulse")
    phys.add_argument("--eta", type=float, default=0.8, help="detection efficiency")
    phys.add_argument("--delta", type=float, default=0.0005, help="dark-count probability per window")
    phys.add_argument("--n-max", type=int, default=None,
                      help="photon-number cutoff (default: from --tail-tol)")
    phys.add_argument("--tail-tol", type=float, default=DEFAULT_TAIL_TOL,
                      help="discarded thermal tail used to pick the cutoff")

    p = _Parser(prog="qnrherald", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    s = sub.add_parser("distribution", parents=[phys, out],
                       help="heralded photon-number distribution for given mode counts")
    s.add_argument("--modes", default="1,4,8", help="comma-separated mode counts")
    s.add_argument("--n-display", type=int, default=10)
    s.add_argument("--oracle-budget", type=int, default=DISTRIBUTION_ORACLE_BUDGET,
                   help="max enumeration terms for the oracle column (blank beyond)")
    s.set_defaults(func=cmd_distribution)

    s = sub.add_parser("sweep-m", parents=[phys, out],
                       help="single-click probability and fidelity versus mode count")
    s.add_argument("--modes-range", default="1:5000", help="start:stop[:stride], inclusive")
    s.set_defaults(func=cmd_sweep_m)

    s = sub.add_parser("contour", parents=[out],
                       help="fidelity-optimal mode count over an (eta, delta) grid")
    s.add_argument("--mu", type=float, default=1.0)
    s.add_argument("--eta-grid", default="0.5:0.95:10",
                   help="list a,b,c | start:stop:num | log:start:stop:num")
    s.add_argument("--delta-grid", default="log:1e-5:1e-2:13")
    s.add_argument("--search-bound", type=int, default=None,
                   help="largest M scanned (default ceil(4/delta) per point)")
    s.set_defaults(func=cmd_contour)

    s = sub.add_parser("optimize", parents=[phys, out],
                       help="integer optima of fidelity and single-click probability")
    s.add_argument("--search-bound", type=int, default=None)
    s.set_defaults(func=cmd_optimize)

    s = sub.add_parser("verify", parents=[out], help="closed form vs exact enumeration gate")
    s.add_argument("--max-modes", type=int, default=5)
    s.add_argument("--n-max", type=int, default=8)
    s.add_argument("--mus", default="0.2,1,2")
    s.add_argument("--etas", default="0.3,0.8,1")
    s.add_argument("--deltas", default="0,0.0005,0.01")
    s.add_argument("--tol", type=float, default=1e-9)
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("mc", parents=[phys, out], help="seeded Monte Carlo click probability")
    s.add_argument("--modes", type=int, default=8)
    s.add_argument("--clicks", type=int, default=1)
    s.add_argument("--trials", type=int, default=10**6)
    s.add_argument("--seed", type=int, required=True)
    s.set_defaults(func=cmd_mc)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return exc.code
    try:
        return args.func(args)
    except ValueError as exc:
        print(f"qnrherald {args.cmd}: error: {exc}", file=sys.stderr)
        return EXIT_INVALID
