"""Parameter types, the thermal pair-number law and equal-splitting weights.

Everything downstream works on photon-number populations only: the
detection operators involved are diagonal in the number basis, so no
amplitudes or phases are ever carried around.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

DEFAULT_TAIL_TOL = 1e-12

# Factorial ratios are exact integers up to this photon number; log-space above.
EXACT_FACTORIAL_LIMIT = 20

# The on-off POVM with a (1 - delta) prefactor presumes rare dark counts.
SMALL_DELTA_WARN = 0.1


@dataclass(frozen=True)
class SourceParams:
    """Thermal pair source; ``mu`` is the mean number of pairs per pump pulse."""

    mu: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.mu) and self.mu >= 0):
            raise ValueError(f"mu must be a finite number >= 0, got {self.mu!r}")

    @property
    def ratio(self) -> float:
        """Geometric ratio mu/(1+mu) between consecutive thermal populations."""
        return self.mu / (1.0 + self.mu)


@dataclass(frozen=True)
class DetectorParams:
    """Identical on-off detectors: efficiency ``eta`` and dark-count probability ``delta``."""

    eta: float = 0.8
    delta: float = 0.0005

    def __post_init__(self):
        if not (0.0 <= self.eta <= 1.0):
            raise ValueError(f"eta must lie in [0, 1], got {self.eta!r}")
        if not (0.0 <= self.delta < 1.0):
            raise ValueError(f"delta must lie in [0, 1), got {self.delta!r}")
        if self.delta > SMALL_DELTA_WARN:
            warnings.warn(
                f"delta={self.delta} is not small; the on-off model still holds "
                "exactly but the continuous-M approximations lose accuracy",
                stacklevel=3,
            )


@dataclass(frozen=True)
class QnrConfig:
    """``modes`` detection modes of which exactly ``clicks`` fire."""

    modes: int
    clicks: int = 1

    def __post_init__(self):
        if isinstance(self.modes, bool) or int(self.modes) != self.modes or self.modes < 1:
            raise ValueError(f"modes must be an integer >= 1, got {self.modes!r}")
        if isinstance(self.clicks, bool) or int(self.clicks) != self.clicks:
            raise ValueError(f"clicks must be an integer, got {self.clicks!r}")
        if not (0 <= self.clicks <= self.modes):
            raise ValueError(f"clicks must satisfy 0 <= clicks <= modes, got {self.clicks!r}")
        object.__setattr__(self, "modes", int(self.modes))
        object.__setattr__(self, "clicks", int(self.clicks))

    @classmethod
    def from_layers(cls, layers: int, clicks: int = 1) -> "QnrConfig":
        """Binary tree of 50/50 splitters with ``layers`` levels, i.e. 2**layers modes."""
        if layers < 0:
            raise ValueError("layers must be >= 0")
        return cls(modes=2**layers, clicks=clicks)


@dataclass(frozen=True)
class NumberDistribution:
    """Populations p(n) for n = 0..n_max, stored densely and read-only."""

    probs: np.ndarray

    def __post_init__(self):
        arr = np.array(self.probs, dtype=float)
        if arr.ndim != 1 or arr.size == 0:
            raise ValueError("probs must be a non-empty 1-d sequence")
        if np.any(arr < 0):
            raise ValueError("probabilities must be non-negative")
        arr.setflags(write=False)
        object.__setattr__(self, "probs", arr)

    @property
    def n_max(self) -> int:
        return self.probs.size - 1

    def total(self) -> float:
        return math.fsum(self.probs)

    def __getitem__(self, n):
        return self.probs[n]

    def __len__(self):
        return self.probs.size


def thermal_distribution(source: SourceParams, n_max: int) -> NumberDistribution:
    """Thermal pair-number populations mu**n / (1+mu)**(1+n) for n <= n_max.

    The truncated entries sum to ``1 - (mu/(1+mu))**(n_max+1)``.
    """
    if n_max < 0:
        raise ValueError(f"n_max must be >= 0, got {n_max!r}")
    r = source.ratio
    n = np.arange(n_max + 1)
    return NumberDistribution(np.power(r, n) / (1.0 + source.mu))


def thermal_tail(source: SourceParams, n_max: int) -> float:
    """Probability mass above ``n_max``."""
    return source.ratio ** (n_max + 1)


def truncation_cutoff(source: SourceParams, tail_tol: float = DEFAULT_TAIL_TOL) -> int:
    """Smallest n_max whose discarded thermal tail is at most ``tail_tol``."""
    if not (0.0 < tail_tol < 1.0):
        raise ValueError(f"tail_tol must lie in (0, 1), got {tail_tol!r}")
    r = source.ratio
    if r == 0.0:
        return 0
    k = max(0, math.ceil(math.log(tail_tol) / math.log(r)) - 1)
    # log rounding can land one off either way
    while k > 0 and r**k <= tail_tol:
        k -= 1
    while r ** (k + 1) > tail_tol:
        k += 1
    return k


def _check_composition(composition: Sequence[int]) -> tuple[int, ...]:
    ks = tuple(int(k) for k in composition)
    if not ks:
        raise ValueError("composition needs at least one mode")
    if any(k < 0 for k in ks):
        raise ValueError(f"composition entries must be >= 0, got {composition!r}")
    return ks


def multinomial_weight(composition: Sequence[int]) -> float:
    """Probability n!/(M**n k_1!...k_M!) that equal splitting yields this occupation.

    ``M`` is ``len(composition)`` and ``n`` its sum.
    """
    ks = _check_composition(composition)
    n, modes = sum(ks), len(ks)
    if n <= EXACT_FACTORIAL_LIMIT:
        coeff = math.factorial(n)
        for k in ks:
            coeff //= math.factorial(k)
        return coeff / modes**n
    log_w = math.lgamma(n + 1) - sum(math.lgamma(k + 1) for k in ks) - n * math.log(modes)
    return math.exp(log_w)


_FACTORIALS = np.array([math.factorial(k) for k in range(EXACT_FACTORIAL_LIMIT + 1)], dtype=np.int64)


def multinomial_weights(compositions: np.ndarray) -> np.ndarray:
    """Vectorised :func:`multinomial_weight` over rows of a (count, M) integer array.

    All rows must share the same total.
    """
    comps = np.asarray(compositions, dtype=np.int64)
    if comps.ndim != 2 or comps.shape[0] == 0:
        raise ValueError("expected a non-empty (count, modes) array")
    if np.any(comps < 0):
        raise ValueError("composition entries must be >= 0")
    totals = comps.sum(axis=1)
    n = int(totals[0])
    if np.any(totals != n):
        raise ValueError("all compositions must share one photon number")
    modes = comps.shape[1]
    if n <= EXACT_FACTORIAL_LIMIT:
        coeff = np.full(comps.shape[0], _FACTORIALS[n], dtype=np.int64)
        for col in comps.T:
            coeff //= _FACTORIALS[col]
        return coeff.astype(float) / float(modes) ** n
    lgamma = np.vectorize(math.lgamma, otypes=[float])
    log_w = math.lgamma(n + 1) - lgamma(comps + 1).sum(axis=1) - n * math.log(modes)
    return np.exp(log_w)


@lru_cache(maxsize=256)
def _compositions_cached(n: int, modes: int) -> np.ndarray:
    if modes == 1:
        out = np.array([[n]], dtype=np.int64)
    else:
        blocks = []
        for first in range(n, -1, -1):
            rest = _compositions_cached(n - first, modes - 1)
            blocks.append(np.column_stack((np.full(rest.shape[0], first, dtype=np.int64), rest)))
        out = np.vstack(blocks)
    out.setflags(write=False)
    return out


def compositions(n: int, modes: int) -> np.ndarray:
    """All weak compositions of ``n`` into ``modes`` ordered parts, one per row."""
    if n < 0 or modes < 1:
        raise ValueError("need n >= 0 and modes >= 1")
    return _compositions_cached(int(n), int(modes))


def composition_count(n: int, modes: int) -> int:
    return math.comb(n + modes - 1, modes - 1)
