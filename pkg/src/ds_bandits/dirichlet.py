"""Dirichlet weight draws and boundary-crossing probabilities.

The central object is the probability that a Dirichlet-weighted average
of fixed support points crosses a threshold,

    BCP(x, mu) = P(sum_i w_i x_i >= mu),    w ~ desired Dirichlet law.

For unit concentrations and distinct points the probability has an exact
closed form; it is numerically fragile (alternating signs), so the exact
route is paired with a Monte Carlo estimator and with cheap exponential
bounds in both directions.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "DirichletParams",
    "WeightVector",
    "PointSet",
    "DistinctPointsRequired",
    "BoundUndefinedError",
    "BcpCancellationWarning",
    "draw_dirichlet",
    "draw_dirichlet_many",
    "unit_exponentials",
    "bcp_exact",
    "bcp_monte_carlo",
    "bcp_lower_bound",
    "bcp_upper_bound_kinf",
]


class DistinctPointsRequired(ValueError):
    """The exact boundary-crossing form needs pairwise distinct points."""


class BoundUndefinedError(ValueError):
    """Requested bound is undefined for this point set and threshold."""


class BcpCancellationWarning(UserWarning):
    """Exact summation lost most of its significant digits."""


@dataclass(frozen=True)
class DirichletParams:
    """Integer concentration vector alpha, every entry >= 1."""

    alphas: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.alphas) == 0:
            raise ValueError("alphas must be nonempty")
        for a in self.alphas:
            if not isinstance(a, (int, np.integer)) or a < 1:
                raise ValueError(f"alphas must be integers >= 1, got {a!r}")
        object.__setattr__(self, "alphas", tuple(int(a) for a in self.alphas))

    @property
    def total(self) -> int:
        return sum(self.alphas)


@dataclass(frozen=True)
class WeightVector:
    """A point on the probability simplex."""

    weights: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        w = np.asarray(self.weights, dtype=float)
        if w.ndim != 1 or w.size == 0:
            raise ValueError("weights must be a nonempty vector")
        if np.any(w < 0.0):
            raise ValueError("weights must be nonnegative")
        if abs(float(w.sum()) - 1.0) > 1e-12:
            raise ValueError("weights must sum to one within 1e-12")
        object.__setattr__(self, "weights", w)

    def __len__(self) -> int:
        return self.weights.size


@dataclass(frozen=True)
class PointSet:
    """Support points plus the crossing threshold mu."""

    points: np.ndarray = field(repr=False)
    mu: float

    def __post_init__(self) -> None:
        x = np.asarray(self.points, dtype=float)
        if x.ndim != 1 or x.size == 0:
            raise ValueError("points must be a nonempty vector")
        if not np.all(np.isfinite(x)) or not math.isfinite(self.mu):
            raise ValueError("points and mu must be finite")
        object.__setattr__(self, "points", x)
        object.__setattr__(self, "mu", float(self.mu))

    @property
    def size(self) -> int:
        return self.points.size

    def is_distinct(self) -> bool:
        return np.unique(self.points).size == self.points.size


def unit_exponentials(size: int, rng: np.random.Generator) -> np.ndarray:
    """Unit-rate exponentials as -log(1 - U), U uniform on [0, 1).

    1 - U lies in (0, 1], so the logarithm never sees zero.  This fixed
    construction keeps draws reproducible across numpy versions, unlike
    the ziggurat-based generator methods.
    """
    u = rng.random(size)
    return -np.log1p(-u)


def draw_dirichlet_many(
    params: DirichletParams, size: int, rng: np.random.Generator
) -> np.ndarray:
    """A (size, k) matrix of Dirichlet(alpha) draws.

    Each Gamma(alpha_i, 1) variate is the sum of alpha_i unit
    exponentials, then the row is normalised.
    """
    if size < 1:
        raise ValueError("size must be >= 1")
    alphas = np.asarray(params.alphas)
    total = params.total
    e = unit_exponentials(size * total, rng).reshape(size, total)
    if np.all(alphas == 1):
        g = e
    else:
        starts = np.concatenate(([0], np.cumsum(alphas)[:-1]))
        g = np.add.reduceat(e, starts, axis=1)
    return g / g.sum(axis=1, keepdims=True)


def draw_dirichlet(params: DirichletParams, rng: np.random.Generator) -> WeightVector:
    """One Dirichlet(alpha) weight vector."""
    return WeightVector(draw_dirichlet_many(params, 1, rng)[0])


def bcp_exact(ps: PointSet) -> float:
    """Exact crossing probability for unit weights over distinct points.

    For n + 1 pairwise distinct points,

        P(sum w_i x_i >= mu) = sum_i (x_i - mu)_+^n / prod_{j!=i} (x_i - x_j).

    The terms alternate in sign and can cancel catastrophically, so they
    are accumulated with exact compensated summation and the result
    carries a cancellation warning when sum |term| > 1e6 * |result|.
    """
    if not ps.is_distinct():
        raise DistinctPointsRequired(
            "exact boundary-crossing form requires pairwise distinct points; "
            "use bcp_monte_carlo for tied points"
        )
    x = ps.points
    n = ps.size - 1
    terms = []
    for i in range(ps.size):
        top = x[i] - ps.mu
        if top < 0.0:
            continue
        if n == 0:
            terms.append(1.0)
            continue
        denom = np.prod(x[i] - np.delete(x, i))
        terms.append(top**n / denom)
    value = math.fsum(terms)
    magnitude = math.fsum(abs(t) for t in terms)
    if magnitude > 1e6 * max(abs(value), 1e-300):
        warnings.warn(
            "exact boundary-crossing sum is ill conditioned "
            f"(sum |terms| = {magnitude:.3g} vs result {value:.3g})",
            BcpCancellationWarning,
            stacklevel=2,
        )
    # Clamp absorbs floating-point residue just outside [0, 1].
    return min(max(value, 0.0), 1.0)


def bcp_monte_carlo(
    ps: PointSet,
    params: DirichletParams,
    draws: int,
    rng: np.random.Generator,
    chunk: int = 250_000,
) -> float:
    """Monte Carlo crossing frequency under Dirichlet(alpha) weights."""
    if len(params.alphas) != ps.size:
        raise ValueError("alphas and points must have matching length")
    if draws < 1:
        raise ValueError("draws must be >= 1")
    hits = 0
    done = 0
    while done < draws:
        m = min(chunk, draws - done)
        w = draw_dirichlet_many(params, m, rng)
        hits += int(np.count_nonzero(w @ ps.points >= ps.mu))
        done += m
    return hits / draws


def bcp_lower_bound(ps: PointSet) -> float:
    """Exponential lower bound exp(-sum_{x_i < xbar} (mu - x_i)_+ / (xbar - mu)).

    Requires max(points) > mu, otherwise the bound degenerates.
    """
    x = ps.points
    xbar = float(x.max())
    if xbar <= ps.mu:
        raise BoundUndefinedError(
            f"lower bound needs max(points) > mu, got max {xbar} vs mu {ps.mu}"
        )
    below = x[x < xbar]
    gap_sum = float(np.maximum(ps.mu - below, 0.0).sum())
    return math.exp(-gap_sum / (xbar - ps.mu))


def bcp_upper_bound_kinf(ps: PointSet, kinf_value: float) -> float:
    """Upper bound exp(-(n + 1) * kinf) for n + 1 support points.

    ``kinf_value`` is the dual divergence of the empirical distribution
    of the points from threshold mu (computed by the kinf module); this
    function only applies the exponential envelope.
    """
    if kinf_value < 0.0:
        raise ValueError("kinf_value must be nonnegative")
    return math.exp(-ps.size * kinf_value)
