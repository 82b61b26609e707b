"""Minimum divergence to push a mean above a target, and its uses.

For a discrete distribution nu supported below a bound B, the quantity

    kinf^B(nu, mu) = max over lambda in [0, 1/(B - mu)] of
                     E_nu[ log(1 - lambda (X - mu)) ]

is the dual form of the smallest KL divergence between nu and any
distribution supported on (-inf, B] with mean at least mu.  It drives
the exponential upper bound on boundary-crossing probabilities, the
empirical IMED baseline, and the asymptotic rate diagnostics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .distributions import Exponential, Gaussian, RewardModel
from .seeding import derive_seed, make_rng

__all__ = [
    "EmpiricalDist",
    "KinfResult",
    "CurvePoint",
    "QuantileCheck",
    "InfiniteBonusError",
    "kinf_dual",
    "kinf_parametric",
    "kl_bernoulli",
    "kl_gaussian",
    "kl_exponential",
    "necessary_bonus",
    "empirical_kinf",
    "empirical_kinf_curve",
    "loglog_slope",
    "quantile_condition_check",
]

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


class InfiniteBonusError(ValueError):
    """No finite bonus can make the target mean reachable."""


@dataclass(frozen=True)
class EmpiricalDist:
    """Finite discrete distribution: strictly increasing atoms, positive masses."""

    atoms: np.ndarray
    masses: np.ndarray

    def __post_init__(self) -> None:
        atoms = np.asarray(self.atoms, dtype=float)
        masses = np.asarray(self.masses, dtype=float)
        if atoms.ndim != 1 or atoms.size == 0 or atoms.shape != masses.shape:
            raise ValueError("atoms and masses must be matching nonempty vectors")
        if np.any(np.diff(atoms) <= 0.0):
            raise ValueError("atoms must be strictly increasing")
        if np.any(masses <= 0.0):
            raise ValueError("masses must be positive")
        if abs(float(masses.sum()) - 1.0) > 1e-9:
            raise ValueError("masses must sum to one")
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "masses", masses)

    @classmethod
    def from_samples(cls, values: np.ndarray) -> "EmpiricalDist":
        atoms, counts = np.unique(np.asarray(values, dtype=float), return_counts=True)
        return cls(atoms, counts / counts.sum())

    def mean(self) -> float:
        return float(self.atoms @ self.masses)

    @property
    def max_atom(self) -> float:
        return float(self.atoms[-1])


@dataclass(frozen=True)
class KinfResult:
    value: float
    lambda_star: float


def _golden_max(f, lo: float, hi: float, tol: float = 1e-10):
    """Golden-section search for the maximum of a unimodal f on [lo, hi]."""
    x1 = hi - _INV_PHI * (hi - lo)
    x2 = lo + _INV_PHI * (hi - lo)
    f1, f2 = f(x1), f(x2)
    while hi - lo > tol:
        if f1 >= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - _INV_PHI * (hi - lo)
            f1 = f(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + _INV_PHI * (hi - lo)
            f2 = f(x2)
    mid = 0.5 * (lo + hi)
    return mid, f(mid)


def kinf_dual(dist: EmpiricalDist, mu: float, bound: float) -> KinfResult:
    """Maximise the dual objective over lambda in [0, 1/(bound - mu)].

    The objective is concave with value 0 at lambda = 0, so the result
    is zero exactly when the distribution mean already reaches mu.
    """
    if bound <= mu:
        raise ValueError(f"bound must exceed mu, got bound {bound} vs mu {mu}")
    if dist.max_atom > bound:
        raise ValueError(
            f"bound {bound} must dominate the support (max atom {dist.max_atom})"
        )
    if dist.mean() >= mu:
        return KinfResult(0.0, 0.0)
    shifted = dist.atoms - mu
    masses = dist.masses

    def g(lam: float) -> float:
        arg = 1.0 - lam * shifted
        if np.any(arg <= 0.0):
            return -math.inf
        return float(masses @ np.log(arg))

    lam_max = 1.0 / (bound - mu)
    lam_star, val = _golden_max(g, 0.0, lam_max)
    return KinfResult(max(val, 0.0), lam_star)


def kl_bernoulli(p: float, q: float) -> float:
    """KL between Bernoulli(p) and Bernoulli(q), q interior."""
    if not 0.0 < q < 1.0:
        raise ValueError("q must lie in (0, 1)")
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    total = 0.0
    if p > 0.0:
        total += p * math.log(p / q)
    if p < 1.0:
        total += (1.0 - p) * math.log((1.0 - p) / (1.0 - q))
    return total


def kl_gaussian(m1: float, m2: float, sigma: float) -> float:
    """KL between Gaussians with common known sigma."""
    if sigma <= 0.0:
        raise ValueError("sigma must be positive")
    return (m1 - m2) ** 2 / (2.0 * sigma * sigma)


def kl_exponential(m1: float, m2: float) -> float:
    """KL between exponentials parameterised by their means."""
    if m1 <= 0.0 or m2 <= 0.0:
        raise ValueError("means must be positive")
    return math.log(m2 / m1) + m1 / m2 - 1.0


def kinf_parametric(model: RewardModel, mu: float) -> float:
    """Closed-form in-family kinf for exponential and Gaussian models."""
    if mu < model.mean():
        raise ValueError("target mean must not fall below the model mean")
    if isinstance(model, Exponential):
        # target mean mu corresponds to rate phi = 1/mu < theta
        ratio = 1.0 / (mu * model.rate)
        return ratio - math.log(ratio) - 1.0
    if isinstance(model, Gaussian):
        return (mu - model.loc) ** 2 / (2.0 * model.sigma**2)
    raise ValueError(f"no parametric kinf for kind {model.kind!r}")


def necessary_bonus(model: RewardModel, mu: float) -> float:
    """Smallest bonus level that keeps the target mean reachable.

    Equals mu + E[(mu - X)_+] / (1 - F(mu)); when all mass sits at or
    below mu no finite bonus works.
    """
    tail = 1.0 - model.cdf(mu)
    gap = model.positive_gap_mean(mu)
    if gap == 0.0:
        return mu
    if tail <= 0.0:
        raise InfiniteBonusError(
            f"no mass above mu={mu}; no finite bonus restores reachability"
        )
    return mu + gap / tail


@dataclass(frozen=True)
class CurvePoint:
    n: int
    mean_log_kinf: float
    stderr: float
    used_replications: int


def empirical_kinf(values, mu: float) -> KinfResult:
    """kinf of an observation set, bounded by its own maximum.

    The largest observation is set aside to act as the support bound and
    the remaining ones form the resampling distribution, the same split
    the sampling index applies to a reward history.  Keeping the maximum
    out of the atom set leaves the dual's right endpoint reachable, which
    is what drives the decay rates this estimator is meant to expose.
    With a single observation the constraint is vacuous and the value is 0.
    """
    xs = np.asarray(values, dtype=float)
    if xs.ndim != 1 or xs.size == 0:
        raise ValueError("values must be a nonempty vector")
    bound = float(xs.max())
    if bound <= mu:
        raise ValueError(f"no observation above mu={mu}; kinf undefined")
    if xs.size == 1:
        return KinfResult(0.0, 0.0)
    rest = np.delete(xs, int(np.argmax(xs)))
    return kinf_dual(EmpiricalDist.from_samples(rest), mu, bound)


def empirical_kinf_curve(
    model: RewardModel,
    mu: float,
    sample_sizes,
    replications: int,
    rng: np.random.Generator,
) -> list[CurvePoint]:
    """Mean log kinf of n-sample observation sets at each sample size.

    Each replicate draws n observations and evaluates empirical_kinf on
    them.  Replicates whose kinf is zero (sample mean already past mu) or
    undefined (no observation above mu) carry no rate information and
    are dropped from the average.
    """
    sizes = [int(n) for n in sample_sizes]
    if any(n < 1 for n in sizes):
        raise ValueError("sample sizes must be >= 1")
    if replications < 1:
        raise ValueError("replications must be >= 1")
    if mu <= model.mean():
        raise ValueError("mu must exceed the model mean, otherwise the curve degenerates")
    base = int(rng.integers(1 << 62))
    points = []
    for i, n in enumerate(sizes):
        logs = []
        for r in range(replications):
            cell = make_rng(derive_seed(base, i * replications + r))
            values = model.sample_n(cell, n)
            if float(values.max()) <= mu:
                continue
            res = empirical_kinf(values, mu)
            if res.value > 0.0:
                logs.append(math.log(res.value))
        if not logs:
            raise ValueError(f"no usable replicates at n={n}")
        arr = np.array(logs)
        stderr = float(arr.std(ddof=1) / math.sqrt(arr.size)) if arr.size > 1 else 0.0
        points.append(CurvePoint(n, float(arr.mean()), stderr, arr.size))
    return points


def loglog_slope(points) -> float:
    """OLS slope of mean log kinf against log log n."""
    ns = np.array([p.n for p in points], dtype=float)
    ys = np.array([p.mean_log_kinf for p in points])
    if ns.size < 2 or np.unique(ns).size < 2:
        raise ValueError("need at least two distinct sample sizes")
    if np.any(ns < 2):
        raise ValueError("sample sizes must be >= 2 for log log n")
    return float(np.polyfit(np.log(np.log(ns)), ys, 1)[0])


@dataclass(frozen=True)
class QuantileCheck:
    rho: float
    alpha: float
    bonus_level: float
    kinf_truncated: float
    kinf_family: float

    @property
    def holds(self) -> bool:
        return self.kinf_truncated <= self.kinf_family


_CHECK_GRID = 10_000


def quantile_condition_check(
    model: RewardModel, mu: float, alpha: float, rho: float
) -> QuantileCheck:
    """Compare kinf of the alpha-truncated model against the in-family rate.

    The truncated model is discretised on a uniform grid below the
    (1 - alpha)-quantile plus the CVaR atom, and its kinf is taken with
    the worst-case bonus level M = max(CVaR, mu + rho E[(mu - X)_+]).
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie in (0, 1)")
    if rho <= 0.0:
        raise ValueError("rho must be positive")
    if mu <= model.mean():
        raise ValueError("mu must exceed the model mean")
    kinf_family = kinf_parametric(model, mu)  # also validates the family
    q = model.quantile(1.0 - alpha)
    cvar = model.cvar(alpha)
    level = max(cvar, mu + rho * model.positive_gap_mean(mu))
    if isinstance(model, Exponential):
        lo = 0.0
    else:
        lo = model.quantile(1e-13)
    edges = np.linspace(lo, q, _CHECK_GRID + 1)
    probs = np.diff([model.cdf(e) for e in edges])
    probs[0] += model.cdf(lo)
    mids = 0.5 * (edges[:-1] + edges[1:])
    atoms = np.append(mids, cvar)
    masses = np.append(probs, alpha)
    keep = masses > 0.0
    masses = masses[keep] / masses[keep].sum()
    dist = EmpiricalDist(atoms[keep], masses)
    kinf_trunc = kinf_dual(dist, mu, bound=level).value
    return QuantileCheck(rho, alpha, level, kinf_trunc, kinf_family)
