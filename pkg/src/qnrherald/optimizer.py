"""Integer optima over the number of modes, plus the continuous-M estimates.

The closed forms cost O(1) per M, so the optima are located by scanning
every integer M; the continuous approximations are only reported next to
the scanned values.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from .closed_form import single_click_probability, single_photon_fidelity
from .model import DetectorParams, SourceParams


class SearchBoundWarning(UserWarning):
    """The scanned optimum sits on the upper end of the search range."""


@dataclass(frozen=True)
class OptimaReport:
    search_bound: int
    m_fidelity_opt: int | None = None
    fidelity_at_opt: float | None = None
    m_fidelity_approx: float | None = None
    m_prob_local_max: int | None = None
    prob_at_local_max: float | None = None
    m_prob_approx: float | None = None


def _require_dark_counts(detector: DetectorParams) -> None:
    if detector.delta <= 0.0:
        raise ValueError("the continuous-M optimum only exists for delta > 0")


def approx_fidelity_opt(source: SourceParams, detector: DetectorParams) -> float:
    """Stationary point of the single-photon fidelity treated as a function of real M."""
    _require_dark_counts(detector)
    mu, eta, delta = source.mu, detector.eta, detector.delta
    offset = eta * mu / (1.0 + (2.0 * eta - 1.0) * mu)
    inner = (1.0 + (2.0 * eta - 1.0 - (eta - 1.0) * delta) * mu) / ((1.0 + eta * mu) * delta)
    return offset * (1.0 + math.sqrt(inner))


def approx_prob_local_max(source: SourceParams, detector: DetectorParams) -> float:
    """Small-delta estimate of where the single-click probability peaks again."""
    _require_dark_counts(detector)
    a = detector.eta * source.mu
    return (5.0 - a) / (2.0 * detector.delta * (3.0 + a))


def default_search_bound(detector: DetectorParams) -> int:
    _require_dark_counts(detector)
    return math.ceil(4.0 / detector.delta)


def _resolve_bound(detector: DetectorParams, search_bound: int | None, minimum: int) -> int:
    if search_bound is None:
        if detector.delta <= 0.0:
            raise ValueError("search_bound is required when delta = 0")
        search_bound = default_search_bound(detector)
    if search_bound < minimum:
        raise ValueError(f"search_bound must be >= {minimum}, got {search_bound!r}")
    return int(search_bound)


def find_fidelity_opt(source: SourceParams, detector: DetectorParams,
                      search_bound: int | None = None) -> OptimaReport:
    """Scan M = 1..search_bound for the largest single-photon fidelity (smallest M on ties)."""
    bound = _resolve_bound(detector, search_bound, 1)
    best_m, best_f = 1, single_photon_fidelity(1, source, detector)
    for m in range(2, bound + 1):
        f = single_photon_fidelity(m, source, detector)
        if f > best_f:
            best_m, best_f = m, f
    if best_m == bound:
        warnings.warn(
            f"fidelity optimum found at the search bound M={bound}; it may lie beyond",
            SearchBoundWarning,
            stacklevel=2,
        )
    approx = approx_fidelity_opt(source, detector) if detector.delta > 0 else None
    return OptimaReport(search_bound=bound, m_fidelity_opt=best_m,
                        fidelity_at_opt=best_f, m_fidelity_approx=approx)


def find_prob_local_max(source: SourceParams, detector: DetectorParams,
                        search_bound: int | None = None) -> OptimaReport:
    """First interior local maximum of the single-click probability after it starts falling.

    A candidate M needs P(M-1) < P(M) >= P(M+1) and at least one strict
    decrease somewhere before it, which skips the global maximum at small M.
    Returns a report with the probability fields left as None when no such
    point exists below ``search_bound``.
    """
    bound = _resolve_bound(detector, search_bound, 3)
    approx = approx_prob_local_max(source, detector) if detector.delta > 0 else None
    prev2 = single_click_probability(1, source, detector)
    prev = single_click_probability(2, source, detector)
    fallen = prev < prev2
    for m in range(2, bound):
        nxt = single_click_probability(m + 1, source, detector)
        if fallen and prev2 < prev >= nxt:
            return OptimaReport(search_bound=bound, m_prob_local_max=m,
                                prob_at_local_max=prev, m_prob_approx=approx)
        if nxt < prev:
            fallen = True
        prev2, prev = prev, nxt
    return OptimaReport(search_bound=bound, m_prob_approx=approx)


def optimize(source: SourceParams, detector: DetectorParams,
             search_bound: int | None = None) -> OptimaReport:
    fid = find_fidelity_opt(source, detector, search_bound)
    prob = find_prob_local_max(source, detector, max(fid.search_bound, 3))
    return OptimaReport(
        search_bound=fid.search_bound,
        m_fidelity_opt=fid.m_fidelity_opt,
        fidelity_at_opt=fid.fidelity_at_opt,
        m_fidelity_approx=fid.m_fidelity_approx,
        m_prob_local_max=prob.m_prob_local_max,
        prob_at_local_max=prob.prob_at_local_max,
        m_prob_approx=prob.m_prob_approx,
    )
