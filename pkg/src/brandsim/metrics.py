"""Observables: wish dispersion, brand shares, dominance, convergence."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError
from .model import Population


@dataclass(frozen=True)
class TimeSeriesRecord:
    """Per-step observables of a run."""

    t: int
    fluctuation: float
    shares: tuple[float, ...]
    dominant: int

    def __post_init__(self) -> None:
        if self.fluctuation < 0.0:
            raise ValueError("fluctuation must be non-negative")
        total = sum(self.shares)
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"shares must sum to 1, got {total!r}")
        if any(s < 0.0 or s > 1.0 for s in self.shares):
            raise ValueError("each share must lie in [0, 1]")
        if self.dominant != max(range(len(self.shares)), key=lambda b: (self.shares[b], -b)):
            raise ValueError("dominant must be the argmax share, ties to smallest index")


def fluctuation(pop: Population) -> float:
    """Mean wish distance over all unordered customer pairs.

    Computed through the per-slot dispersion identity
    ``sum_pairs (x_a - x_b)^2 = K * sum_a (x_a - mean)^2`` so the cost is
    O(K*S) instead of O(K^2*S).  Exactly zero iff all wishes are bitwise
    identical: rounding in the mean leaves a residue around 1e-30 for
    identical rows, so near-zero results get an exact equality check that
    pins the zero.
    """
    K = pop.num_customers
    if K < 2:
        raise ConfigurationError("fluctuation requires K >= 2")
    w = pop.wish_matrix
    dev = w - w.mean(axis=0)
    ss = float(np.einsum("ks,ks->", dev, dev))
    value = 2.0 * ss / (pop.schema.total_slots * (K - 1))
    if value < 1e-24 and (w == w[0]).all():
        return 0.0
    return value


def brand_shares(pop: Population) -> np.ndarray:
    """Fraction of customers affiliated with each brand."""
    counts = np.bincount(pop.affiliations, minlength=pop.num_brands)
    return counts / pop.num_customers


def consensus_reached(pop: Population, epsilon: float) -> bool:
    """True once the wish dispersion has dropped below ``epsilon``."""
    if not epsilon > 0.0:
        raise ConfigurationError(f"epsilon must be > 0, got {epsilon}")
    return fluctuation(pop) < epsilon


def dominant_brand(shares) -> int:
    """Index of the largest share, ties to the smallest index."""
    arr = np.asarray(shares, dtype=np.float64)
    if arr.size == 0:
        raise ConfigurationError("dominant_brand requires a non-empty share vector")
    return int(arr.argmax())


def snapshot(pop: Population, fluct: float | None = None) -> TimeSeriesRecord:
    """Freeze the current observables into a record."""
    f = fluctuation(pop) if fluct is None else fluct
    shares = brand_shares(pop)
    return TimeSeriesRecord(
        t=pop.t,
        fluctuation=f,
        shares=tuple(shares.tolist()),
        dominant=dominant_brand(shares),
    )
