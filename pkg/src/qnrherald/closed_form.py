"""Analytic click statistics for equal splitting over M identical on-off detectors.

The single-click expressions are written in a cancellation-free form: the
bracket ``1/(1 + a(1 - 1/M)) - (1 - delta)/(1 + a)`` with ``a = eta*mu`` is
rearranged to ``(delta(1+a) + (1-delta)a/M) / ((1 + a - a/M)(1 + a))``,
which stays accurate at very large M and tiny delta.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from mpmath import mp, mpf

from .model import (
    DEFAULT_TAIL_TOL,
    DetectorParams,
    NumberDistribution,
    QnrConfig,
    SourceParams,
    thermal_distribution,
    truncation_cutoff,
)

# Above this many modes the alternating single-click series is replaced by the closed form.
LARGE_M_SWITCH = 10_000

# Decimal digits carried beyond the size of the largest inclusion-exclusion coefficient.
GUARD_DIGITS = 25


class DegenerateHeraldError(ValueError):
    """Conditioning on a click event that has zero probability."""


@dataclass(frozen=True)
class ClickStatistics:
    probability: float
    config: QnrConfig
    source: SourceParams
    detector: DetectorParams


@dataclass(frozen=True)
class HeraldedState:
    """Heralded-arm populations given exactly one click."""

    distribution: NumberDistribution
    herald_probability: float
    fidelity_to_single: float


def _default_n_max(source: SourceParams, n_max: int | None) -> int:
    if n_max is None:
        return truncation_cutoff(source, DEFAULT_TAIL_TOL)
    if n_max < 0:
        raise ValueError(f"n_max must be >= 0, got {n_max!r}")
    return int(n_max)


def _check_modes(modes: int) -> int:
    if isinstance(modes, bool) or int(modes) != modes or modes < 1:
        raise ValueError(f"modes must be an integer >= 1, got {modes!r}")
    return int(modes)


def stirling2(n: int, m: int) -> int:
    """Stirling number of the second kind, as an exact integer.

    >>> stirling2(4, 2)
    7
    """
    if n < 0 or m < 0:
        raise ValueError("stirling2 needs n >= 0 and m >= 0")
    if m > n:
        return 0
    if m == 0:
        return 1 if n == 0 else 0
    total = sum((-1) ** (m - j) * math.comb(m, j) * j**n for j in range(m + 1))
    return total // math.factorial(m)


def xi(modes: int, detector: DetectorParams) -> float:
    """Common prefactor M(1 - delta)**(M - 1) of the single-click terms."""
    modes = _check_modes(modes)
    return modes * math.exp((modes - 1) * math.log1p(-detector.delta))


def click_probability(
    config: QnrConfig,
    source: SourceParams,
    detector: DetectorParams,
    n_max: int | None = None,
) -> float:
    """Probability that exactly ``config.clicks`` of ``config.modes`` detectors fire.

    Inclusion-exclusion over the set of silent modes, evaluated on the
    thermal series truncated at ``n_max``. The alternating sum is carried
    out in extended precision with enough guard digits to absorb the
    largest binomial coefficient, then rounded once. Beyond
    ``LARGE_M_SWITCH`` modes the single-click case uses
    :func:`single_click_probability` (untruncated).
    """
    modes, clicks = config.modes, config.clicks
    if clicks == 1 and modes > LARGE_M_SWITCH:
        return single_click_probability(modes, source, detector)
    n_max = _default_n_max(source, n_max)
    peak_coeff = math.comb(modes, clicks) * math.comb(clicks, clicks // 2)
    with mp.workdps(GUARD_DIGITS + len(str(peak_coeff))):
        mu, eta, delta = mpf(source.mu), mpf(detector.eta), mpf(detector.delta)
        ratio = mu / (1 + mu)
        total = mpf(0)
        for j in range(clicks + 1):
            # sum_{n <= n_max} thermal(n) * base**n, as a finite geometric series
            x = ratio * ((1 - eta) + j * eta / modes)
            series = (1 - x ** (n_max + 1)) / ((1 - x) * (1 + mu))
            term = math.comb(clicks, j) * (1 - delta) ** (modes - j) * series
            total += -term if (clicks - j) % 2 else term
        prob = float(math.comb(modes, clicks) * total)
    return min(max(prob, 0.0), 1.0)


def click_statistics(config, source, detector, n_max=None) -> ClickStatistics:
    return ClickStatistics(click_probability(config, source, detector, n_max), config, source, detector)


def click_probability_ideal(config: QnrConfig, source: SourceParams, n_max: int | None = None) -> float:
    """Lossless, dark-count-free limit written with Stirling numbers.

    Each photon-number term ``M! S(n, m) / ((M - m)! M**n)`` is an exact
    rational and is rounded once.
    """
    modes, clicks = config.modes, config.clicks
    n_max = _default_n_max(source, n_max)
    thermal = thermal_distribution(source, n_max).probs
    falling = math.perm(modes, clicks)
    terms = [
        thermal[n] * ((falling * stirling2(n, clicks)) / modes**n)
        for n in range(clicks, n_max + 1)
    ]
    return math.fsum(terms)


def _bracket(modes: int, source: SourceParams, detector: DetectorParams) -> float:
    # single-click probability divided by xi
    a = detector.eta * source.mu
    delta = detector.delta
    num = delta * (1.0 + a) + (1.0 - delta) * a / modes
    return num / ((1.0 + a - a / modes) * (1.0 + a))


def single_click_probability(modes: int, source: SourceParams, detector: DetectorParams) -> float:
    """Exact (untruncated) probability of exactly one click among ``modes`` detectors."""
    modes = _check_modes(modes)
    return xi(modes, detector) * _bracket(modes, source, detector)


def _check_heraldable(source: SourceParams, detector: DetectorParams) -> None:
    if detector.delta == 0.0 and (detector.eta == 0.0 or source.mu == 0.0):
        raise DegenerateHeraldError(
            "a single click never occurs for these parameters "
            f"(mu={source.mu}, eta={detector.eta}, delta={detector.delta})"
        )


def single_photon_fidelity(modes: int, source: SourceParams, detector: DetectorParams) -> float:
    """Single-photon population of the state heralded by exactly one click."""
    modes = _check_modes(modes)
    _check_heraldable(source, detector)
    mu, eta, delta = source.mu, detector.eta, detector.delta
    c1 = mu / (1.0 + mu) ** 2
    return c1 * (eta / modes + delta * (1.0 - eta)) / _bracket(modes, source, detector)


def _single_click_given_n(n: np.ndarray, modes: int, detector: DetectorParams) -> np.ndarray:
    """[(1-eta) + eta/M]**n - (1-delta)(1-eta)**n, without the xi prefactor."""
    eta, delta = detector.eta, detector.delta
    lost = 1.0 - eta
    kept = lost + eta / modes
    lost_n = np.power(lost, n)
    if lost > 0.0:
        # x**n - y**n = -x**n expm1(n log1p(-(x-y)/x)) keeps precision when eta/M is tiny
        diff = -np.power(kept, n) * np.expm1(n * math.log1p(-(eta / modes) / kept))
    else:
        diff = np.power(kept, n) - lost_n
    return diff + delta * lost_n


def heralded_distribution(
    modes: int,
    source: SourceParams,
    detector: DetectorParams,
    n_max: int | None = None,
) -> HeraldedState:
    """Photon-number distribution of the heralded arm given exactly one click.

    Entries for n <= n_max are exact; they are normalised by the untruncated
    herald probability, so the vector sums to one minus a tail below the
    thermal truncation tolerance.
    """
    modes = _check_modes(modes)
    _check_heraldable(source, detector)
    n_max = _default_n_max(source, n_max)
    thermal = thermal_distribution(source, n_max).probs
    weights = thermal * _single_click_given_n(np.arange(n_max + 1), modes, detector)
    probs = np.clip(weights / _bracket(modes, source, detector), 0.0, None)
    dist = NumberDistribution(probs)
    fidelity = float(dist.probs[1]) if n_max >= 1 else 0.0
    return HeraldedState(dist, single_click_probability(modes, source, detector), fidelity)


def fidelity_large_M_limit(source: SourceParams, detector: DetectorParams) -> float:
    """Single-photon fidelity as M grows without bound, when dark counts dominate the click."""
    if detector.delta <= 0.0:
        raise ValueError("the large-M fidelity limit requires delta > 0")
    mu, eta = source.mu, detector.eta
    return mu * (1.0 + eta * mu) * (1.0 - eta) / (1.0 + mu) ** 2
