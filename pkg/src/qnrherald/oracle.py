"""Independent ground truth for the closed forms.

Two engines model the physical process directly, without any of the
algebra in :mod:`qnrherald.closed_form`:

* exact enumeration of where ``n`` photons land among ``M`` modes, followed
  by per-mode on-off detection (a mode holding ``k`` photons stays silent
  with probability ``(1 - delta)(1 - eta)**k``);
* seeded Monte Carlo sampling of pairs, splitting, loss and dark counts.

An independent dark-count event per mode reproduces the ``(1 - delta)``
factor of the no-click POVM element exactly, for any delta, so the two
descriptions agree without a small-delta approximation.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .model import (
    DetectorParams,
    NumberDistribution,
    QnrConfig,
    SourceParams,
    composition_count,
    compositions,
    multinomial_weights,
    thermal_distribution,
)

MAX_ENUMERATION = 10**8


class EnumerationBoundError(ValueError):
    pass


@dataclass(frozen=True)
class ExactOracleConfig:
    """Enumeration limits.

    ``method="assignments"`` walks all ``M**n`` placements of distinguishable
    photons. ``method="compositions"`` groups those placements by mode
    occupation and weights each group by its multinomial count; it is the
    same sum, ordered differently, and far cheaper. The bound applies to
    the number of terms the chosen method visits.
    """

    max_photons: int
    modes: int
    method: str = "compositions"

    def __post_init__(self):
        if self.max_photons < 0 or self.modes < 1:
            raise ValueError("need max_photons >= 0 and modes >= 1")
        if self.method not in ("compositions", "assignments"):
            raise ValueError(f"unknown enumeration method {self.method!r}")
        cost = enumeration_cost(self.modes, self.max_photons, self.method)
        if cost > MAX_ENUMERATION:
            raise EnumerationBoundError(
                f"{self.method} enumeration for M={self.modes}, n<={self.max_photons} "
                f"visits {cost} terms (limit {MAX_ENUMERATION})"
            )


def enumeration_cost(modes: int, max_photons: int, method: str = "compositions") -> int:
    if method == "assignments":
        return modes**max_photons
    # all occupations with total <= max_photons
    return composition_count(max_photons, modes + 1)


@dataclass(frozen=True)
class McConfig:
    trials: int
    seed: int

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if not (0 <= self.seed < 2**64):
            raise ValueError("seed must be an unsigned 64-bit integer")


def _silent_probability(occupations: np.ndarray, detector: DetectorParams) -> np.ndarray:
    return (1.0 - detector.delta) * np.power(1.0 - detector.eta, occupations)


def click_count_distribution(silent: np.ndarray) -> np.ndarray:
    """Distribution of the number of clicks for independent modes.

    ``silent`` has shape (rows, M) holding each mode's no-click probability;
    the result has shape (rows, M + 1). Built by convolving one mode at a
    time, which avoids listing the 2**M click patterns.
    """
    silent = np.atleast_2d(silent)
    rows, modes = silent.shape
    dist = np.zeros((rows, modes + 1))
    dist[:, 0] = 1.0
    for i in range(modes):
        q = silent[:, i : i + 1]
        shifted = np.zeros_like(dist)
        shifted[:, 1:] = dist[:, :-1]
        dist = dist * q + shifted * (1.0 - q)
    return dist


def click_patterns_bruteforce(silent: np.ndarray) -> np.ndarray:
    """Same as :func:`click_count_distribution` for one row, by listing every pattern."""
    silent = np.asarray(silent, dtype=float)
    modes = silent.size
    out = np.zeros(modes + 1)
    for pattern in itertools.product((0, 1), repeat=modes):
        p = 1.0
        for fired, q in zip(pattern, silent):
            p *= (1.0 - q) if fired else q
        out[sum(pattern)] += p
    return out


def _occupations_by_assignment(n: int, modes: int) -> tuple[np.ndarray, np.ndarray]:
    if n == 0:
        return np.zeros((1, modes), dtype=np.int64), np.ones(1)
    placements = np.array(list(itertools.product(range(modes), repeat=n)), dtype=np.int64)
    occ = np.zeros((placements.shape[0], modes), dtype=np.int64)
    for col in placements.T:
        occ[np.arange(placements.shape[0]), col] += 1
    return occ, np.full(placements.shape[0], 1.0 / modes**n)


def exact_click_given_n(n: int, config: ExactOracleConfig, detector: DetectorParams) -> np.ndarray:
    """Click-count distribution (index m = 0..M) when exactly ``n`` photons enter the splitter."""
    if n < 0:
        raise ValueError("n must be >= 0")
    if n > config.max_photons:
        raise EnumerationBoundError(f"n={n} exceeds max_photons={config.max_photons}")
    if config.method == "assignments":
        occ, weights = _occupations_by_assignment(n, config.modes)
    else:
        occ = compositions(n, config.modes)
        weights = multinomial_weights(occ)
    per_occupation = click_count_distribution(_silent_probability(occ, detector))
    return weights @ per_occupation


def _click_table(config: ExactOracleConfig, detector: DetectorParams) -> np.ndarray:
    return np.array([exact_click_given_n(n, config, detector) for n in range(config.max_photons + 1)])


def exact_click_probabilities(
    modes: int,
    source: SourceParams,
    detector: DetectorParams,
    n_max: int,
    method: str = "compositions",
) -> np.ndarray:
    """Probabilities of m = 0..M clicks on the thermal state truncated at ``n_max``."""
    config = ExactOracleConfig(max_photons=n_max, modes=modes, method=method)
    thermal = thermal_distribution(source, n_max).probs
    table = _click_table(config, detector)
    return np.array([math.fsum(thermal * table[:, m]) for m in range(modes + 1)])


def exact_click_probability(
    config: QnrConfig,
    source: SourceParams,
    detector: DetectorParams,
    n_max: int,
    method: str = "compositions",
) -> float:
    return float(exact_click_probabilities(config.modes, source, detector, n_max, method)[config.clicks])


def exact_heralded_distribution(
    config: QnrConfig,
    source: SourceParams,
    detector: DetectorParams,
    n_max: int,
    method: str = "compositions",
) -> NumberDistribution:
    """Heralded-arm populations given ``config.clicks`` clicks, for the state truncated at ``n_max``.

    Normalised over the retained photon numbers, so it sums to one exactly.
    """
    oracle = ExactOracleConfig(max_photons=n_max, modes=config.modes, method=method)
    thermal = thermal_distribution(source, n_max).probs
    joint = thermal * _click_table(oracle, detector)[:, config.clicks]
    total = math.fsum(joint)
    if total <= 0.0:
        raise ValueError("the heralding event has zero probability for these parameters")
    return NumberDistribution(joint / total)


_MC_CHUNK = 1 << 18


def _mc_click_counts(rng: np.random.Generator, size: int, modes: int,
                     source: SourceParams, detector: DetectorParams) -> np.ndarray:
    # thermal law is geometric on {0, 1, ...} with success probability 1/(1+mu)
    photons = rng.geometric(1.0 / (1.0 + source.mu), size=size) - 1
    total = int(photons.sum())
    owner = np.repeat(np.arange(size), photons)
    mode = rng.integers(0, modes, size=total)
    survived = rng.random(total) < detector.eta
    hit = np.unique(owner[survived] * modes + mode[survived])
    lit = np.bincount(hit // modes, minlength=size)
    dark = rng.binomial(modes - lit, detector.delta)
    return lit + dark


def mc_click_probability(
    config: QnrConfig,
    source: SourceParams,
    detector: DetectorParams,
    mc: McConfig,
) -> tuple[float, float]:
    """Fraction of simulated pump pulses giving exactly ``config.clicks`` clicks.

    Every photon is placed in a uniformly random mode and survives with
    probability ``eta``; a mode fires if a surviving photon reaches it or a
    dark count occurs. Trials run in fixed-size chunks from one PCG64
    stream, so the result depends only on ``(seed, trials)``.

    Returns ``(estimate, binomial standard error)``.
    """
    rng = np.random.Generator(np.random.PCG64(mc.seed))
    hits = 0
    done = 0
    while done < mc.trials:
        size = min(_MC_CHUNK, mc.trials - done)
        clicks = _mc_click_counts(rng, size, config.modes, source, detector)
        hits += int(np.count_nonzero(clicks == config.clicks))
        done += size
    p = hits / mc.trials
    return p, math.sqrt(p * (1.0 - p) / mc.trials)
