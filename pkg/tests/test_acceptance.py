"""Exit criteria for the package, one check per criterion.

Each check prints a single ``[PASS]`` / ``[FAIL]`` line. Run directly with
``python tests/test_acceptance.py`` or through pytest.
"""
import math
import sys
import time

import pytest

from qnrherald.closed_form import (
    click_probability,
    click_probability_ideal,
    fidelity_large_M_limit,
    heralded_distribution,
    single_click_probability,
    single_photon_fidelity,
)
from qnrherald.model import DEFAULT_TAIL_TOL, DetectorParams, QnrConfig, SourceParams
from qnrherald.oracle import McConfig, exact_click_probabilities, mc_click_probability
from qnrherald.optimizer import (
    approx_fidelity_opt,
    approx_prob_local_max,
    find_fidelity_opt,
    find_prob_local_max,
)

SRC = SourceParams(1.0)
DET = DetectorParams(0.8, 0.0005)


def criterion_1():
    """Quoted point values at mu=1, eta=0.8, delta=0.0005, each to +-0.005."""
    quoted = {
        "P^1(1)": (single_click_probability(1, SRC, DET), 0.44),
        "P^4(1)": (single_click_probability(4, SRC, DET), 0.29),
        "P^8(1)": (single_click_probability(8, SRC, DET), 0.26),
        "F^1(1|1)": (heralded_distribution(1, SRC, DET).fidelity_to_single, 0.45),
        "F^4(1|1)": (heralded_distribution(4, SRC, DET).fidelity_to_single, 0.72),
        "F^8(1|1)": (heralded_distribution(8, SRC, DET).fidelity_to_single, 0.76),
    }
    bad = [f"{k}={v:.4f} (quoted {q})" for k, (v, q) in quoted.items() if abs(v - q) > 0.005]
    detail = "; ".join(bad) if bad else ", ".join(f"{k}={v:.4f}" for k, (v, _) in quoted.items())
    return not bad, detail


def criterion_2():
    """Integer scan puts the fidelity optimum at M=22 with F=0.78 +- 0.005, in under 1 s."""
    t0 = time.perf_counter()
    report = find_fidelity_opt(SRC, DET)
    elapsed = time.perf_counter() - t0
    ok = report.m_fidelity_opt == 22 and abs(report.fidelity_at_opt - 0.78) <= 0.005 and elapsed < 1.0
    return ok, f"M={report.m_fidelity_opt}, F={report.fidelity_at_opt:.4f}, {elapsed * 1e3:.0f} ms"


def criterion_3():
    """Scanned local maximum of P^M(1) over M=1..5000 within 5% of the continuous estimate."""
    t0 = time.perf_counter()
    report = find_prob_local_max(SRC, DET, 5000)
    elapsed = time.perf_counter() - t0
    approx = approx_prob_local_max(SRC, DET)
    m = report.m_prob_local_max
    ok = m is not None and abs(m - approx) / approx <= 0.05 and elapsed < 1.0
    rel = float("nan") if m is None else abs(m - approx) / approx
    return ok, (f"scan M={m}, estimate {approx:.1f} (quoted 'approximately 1102'), "
                f"rel. diff {rel:.2%}, {elapsed * 1e3:.0f} ms")


def criterion_4():
    """Closed form vs exact enumeration to 1e-10 over the full grid at n_max=25, in under 1 min."""
    t0 = time.perf_counter()
    worst = 0.0
    points = 0
    for eta in (0.3, 0.8, 1.0):
        for delta in (0.0, 0.0005, 0.01):
            det = DetectorParams(eta, delta)
            for modes in range(1, 6):
                for mu in (0.2, 1.0, 2.0):
                    src = SourceParams(mu)
                    exact = exact_click_probabilities(modes, src, det, 25)
                    for m in range(modes + 1):
                        closed = click_probability(QnrConfig(modes, m), src, det, 25)
                        worst = max(worst, abs(closed - exact[m]))
                        points += 1
    elapsed = time.perf_counter() - t0
    return worst <= 1e-10 and elapsed < 60, f"{points} points, max dev {worst:.2e}, {elapsed:.1f} s"


def criterion_5():
    """Limits: Stirling form (1e-12, M<=6); large-M fidelity (1e-4); normalisation (tail tol, M<=8)."""
    stirling_dev = 0.0
    for modes in range(1, 7):
        for mu in (0.2, 1.0, 2.0):
            src = SourceParams(mu)
            for m in range(modes + 1):
                cfg = QnrConfig(modes, m)
                stirling_dev = max(stirling_dev, abs(click_probability(cfg, src, DetectorParams(1.0, 0.0))
                                                     - click_probability_ideal(cfg, src)))
    limit = fidelity_large_M_limit(SRC, DET)
    f_big = single_photon_fidelity(10**7, SRC, DET)
    norm_dev = 0.0
    for modes in range(1, 9):
        for mu in (0.2, 1.0, 2.0):
            for eta, delta in ((0.8, 0.0005), (0.3, 0.01), (1.0, 0.0), (0.5, 0.05)):
                src, det = SourceParams(mu), DetectorParams(eta, delta)
                total = math.fsum(click_probability(QnrConfig(modes, m), src, det) for m in range(modes + 1))
                norm_dev = max(norm_dev, abs(total - 1.0))
    ok = (stirling_dev <= 1e-12 and abs(limit - 0.09) <= 1e-12 and abs(f_big - limit) <= 1e-4
          and norm_dev <= DEFAULT_TAIL_TOL)
    return ok, (f"(a) {stirling_dev:.1e}  (b) F^1e7={f_big:.6f} vs {limit:.6f}  "
                f"(c) max |sum-1|={norm_dev:.1e}")


def criterion_6():
    """Halving delta doubles the P estimate (1e-6 rel.) and scales the F estimate by sqrt 2 (1%)."""
    worst_p, worst_f = 0.0, 0.0
    for delta in (1e-3, 5e-4, 1e-4, 1e-5):
        for eta in (0.5, 0.8, 0.95):
            full, half = DetectorParams(eta, delta), DetectorParams(eta, delta / 2)
            ratio_p = approx_prob_local_max(SRC, half) / approx_prob_local_max(SRC, full)
            worst_p = max(worst_p, abs(ratio_p / 2 - 1))
            offset = eta * SRC.mu / (1 + (2 * eta - 1) * SRC.mu)
            ratio_f = (approx_fidelity_opt(SRC, half) - offset) / (approx_fidelity_opt(SRC, full) - offset)
            worst_f = max(worst_f, abs(ratio_f / math.sqrt(2) - 1))
    return worst_p <= 1e-6 and worst_f <= 0.01, f"P ratio err {worst_p:.1e}, F ratio err {worst_f:.2%}"


def criterion_7():
    """1e6 seeded trials at M=8, m=1 within 4 standard errors; same seed gives the same output."""
    cfg, mc = QnrConfig(8, 1), McConfig(10**6, 20180101)
    est, err = mc_click_probability(cfg, SRC, DET, mc)
    again = mc_click_probability(cfg, SRC, DET, mc)
    exact = click_probability(cfg, SRC, DET)
    z = abs(est - exact) / err
    return z <= 4 and again == (est, err), f"estimate {est:.5f} +- {err:.5f}, exact {exact:.5f}, |z|={z:.2f}"


def criterion_8():
    """Over eta x delta grid: scanned F optimum within +-2 of rounded estimate and below the P local max."""
    lines = []
    ok = True
    for eta in (0.5, 0.7, 0.9):
        for delta in (1e-4, 5e-4, 2e-3):
            det = DetectorParams(eta, delta)
            fid = find_fidelity_opt(SRC, det)
            prob = find_prob_local_max(SRC, det)
            good = (abs(fid.m_fidelity_opt - round(fid.m_fidelity_approx)) <= 2
                    and prob.m_prob_local_max is not None
                    and fid.m_fidelity_opt < prob.m_prob_local_max)
            ok &= good
            if not good:
                lines.append(f"eta={eta} delta={delta}: F opt {fid.m_fidelity_opt}, "
                             f"est {fid.m_fidelity_approx:.2f}, P max {prob.m_prob_local_max}")
    return ok, "; ".join(lines) if lines else "all 9 grid points"


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4,
            criterion_5, criterion_6, criterion_7, criterion_8]


def _line(index, ok, detail):
    return f"[{'PASS' if ok else 'FAIL'}] criterion {index}: {detail}"


@pytest.mark.parametrize("index", range(1, len(CRITERIA) + 1))
def test_criterion(index, capsys):
    check = CRITERIA[index - 1]
    ok, detail = check()
    with capsys.disabled():
        print("\n" + _line(index, ok, detail))
    assert ok, f"{check.__doc__.strip()} -> {detail}"


if __name__ == "__main__":
    results = [(i, *check()) for i, check in enumerate(CRITERIA, 1)]
    for i, ok, detail in results:
        print(_line(i, ok, detail))
    sys.exit(0 if all(ok for _, ok, _ in results) else 1)
