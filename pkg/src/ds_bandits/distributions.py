"""Reward models for bandit arms.

Every model exposes the same small surface: sampling, mean, cdf,
quantile, CVaR, and the positive-gap mean E[(mu - X)_+] that the
data-dependent exploration bonuses are built from.  The upper CVaR at
level alpha is computed through the superquantile identity

    C_alpha = q + E[(X - q)_+] / alpha,   q = quantile(1 - alpha),

which handles atoms at the quantile by splitting their mass so the tail
holds exactly alpha.  ``truncate`` relocates that tail onto a single
atom at C_alpha, preserving the mean.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "RewardModel",
    "Bernoulli",
    "Uniform",
    "Gaussian",
    "Exponential",
    "GaussianMixture",
    "Empirical",
    "PointMassMixture",
    "TruncatedModel",
    "CsvFormatError",
    "truncate",
    "load_empirical",
    "model_from_dict",
    "model_to_dict",
    "norm_cdf",
    "norm_ppf",
]

_SQRT2 = math.sqrt(2.0)
_SQRT_TWO_PI = math.sqrt(2.0 * math.pi)


class CsvFormatError(ValueError):
    """Reward sample file violates the one-float-per-line format."""


def norm_cdf(x: float) -> float:
    # erfc form keeps full relative accuracy in the left tail
    return 0.5 * math.erfc(-x / _SQRT2)


def _norm_pdf(x: float) -> float:
    return math.exp(-0.5 * x * x) / _SQRT_TWO_PI


# Rational approximation coefficients (Acklam) for the inverse normal
# cdf, followed by one Halley refinement against erf-based norm_cdf.
_PPF_A = (-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
          1.383577518672690e+02, -3.066479806614716e+01, 2.506628277459239e+00)
_PPF_B = (-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
          6.680131188771972e+01, -1.328068155288572e+01)
_PPF_C = (-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
          -2.549732539343734e+00, 4.374664141464968e+00, 2.938163982698783e+00)
_PPF_D = (7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
          3.754408661907416e+00)


def norm_ppf(p: float) -> float:
    """Inverse standard normal cdf, absolute error well below 1e-9."""
    if not 0.0 < p < 1.0:
        raise ValueError(f"p must lie in (0, 1), got {p}")
    a, b, c, d = _PPF_A, _PPF_B, _PPF_C, _PPF_D
    p_low = 0.02425
    if p < p_low:
        q = math.sqrt(-2.0 * math.log(p))
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) / \
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0)
    elif p <= 1.0 - p_low:
        q = p - 0.5
        r = q * q
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q / \
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0)
    else:
        q = math.sqrt(-2.0 * math.log(1.0 - p))
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) / \
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0)
    err = norm_cdf(x) - p
    u = err * _SQRT_TWO_PI * math.exp(0.5 * x * x)
    return x - u / (1.0 + 0.5 * x * u)


class RewardModel:
    """Common interface for arm reward distributions."""

    kind: str = "abstract"

    def sample(self, rng: np.random.Generator) -> float:
        raise NotImplementedError

    def sample_n(self, rng: np.random.Generator, n: int) -> np.ndarray:
        return np.array([self.sample(rng) for _ in range(n)])

    def mean(self) -> float:
        raise NotImplementedError

    def cdf(self, x: float) -> float:
        """P(X <= x), right continuous."""
        raise NotImplementedError

    def quantile(self, beta: float) -> float:
        """inf{x : F(x) > beta} for beta in (0, 1)."""
        raise NotImplementedError

    def positive_gap_mean(self, mu: float) -> float:
        """E[(mu - X)_+]."""
        raise NotImplementedError

    def atom_mass(self, x: float) -> float:
        """P(X = x); zero for continuous models."""
        return 0.0

    def cvar(self, alpha: float) -> float:
        """Upper conditional value at risk at tail level alpha."""
        _check_level(alpha, "alpha")
        q = self.quantile(1.0 - alpha)
        # E[(X - q)_+] = mean - q + E[(q - X)_+]
        tail = self.mean() - q + self.positive_gap_mean(q)
        return q + max(tail, 0.0) / alpha


def _check_level(value: float, name: str) -> None:
    if not 0.0 < value < 1.0:
        raise ValueError(f"{name} must lie in (0, 1), got {value}")


@dataclass(frozen=True)
class Bernoulli(RewardModel):
    p: float
    kind: str = field(default="bernoulli", init=False, repr=False)

    def __post_init__(self) -> None:
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"p must lie in [0, 1], got {self.p}")

    def sample(self, rng: np.random.Generator) -> float:
        return 1.0 if rng.random() < self.p else 0.0

    def sample_n(self, rng: np.random.Generator, n: int) -> np.ndarray:
        return (rng.random(n) < self.p).astype(float)

    def mean(self) -> float:
        return self.p

    def cdf(self, x: float) -> float:
        if x < 0.0:
            return 0.0
        if x < 1.0:
            return 1.0 - self.p
        return 1.0

    def quantile(self, beta: float) -> float:
        _check_level(beta, "beta")
        return 0.0 if beta < 1.0 - self.p else 1.0

    def positive_gap_mean(self, mu: float) -> float:
        return (1.0 - self.p) * max(mu, 0.0) + self.p * max(mu - 1.0, 0.0)

    def atom_mass(self, x: float) -> float:
        if x == 0.0:
            return 1.0 - self.p
        if x == 1.0:
            return self.p
        return 0.0


@dataclass(frozen=True)
class Uniform(RewardModel):
    low: float
    high: float
    kind: str = field(default="uniform", init=False, repr=False)

    def __post_init__(self) -> None:
        if not self.low < self.high:
            raise ValueError("uniform needs low < high")

    def sample(self, rng: np.random.Generator) -> float:
        return float(rng.uniform(self.low, self.high))

    def sample_n(self, rng: np.random.Generator, n: int) -> np.ndarray:
        return rng.uniform(self.low, self.high, size=n)

    def mean(self) -> float:
        return 0.5 * (self.low + self.high)

    def cdf(self, x: float) -> float:
        if x <= self.low:
            return 0.0
        if x >= self.high:
            return 1.0
        return (x - self.low) / (self.high - self.low)

    def quantile(self, beta: float) -> float:
        _check_level(beta, "beta")
        return self.low + beta * (self.high - self.low)

    def positive_gap_mean(self, mu: float) -> float:
        if mu <= self.low:
            return 0.0
        if mu >= self.high:
            return mu - self.mean()
        return (mu - self.low) ** 2 / (2.0 * (self.high - self.low))


@dataclass(frozen=True)
class Gaussian(RewardModel):
    loc: float
    sigma: float
    kind: str = field(default="gaussian", init=False, repr=False)

    def __post_init__(self) -> None:
        if self.sigma <= 0.0:
            raise ValueError("sigma must be positive")

    def sample(self, rng: np.random.Generator) -> float:
        return float(rng.normal(self.loc, self.sigma))

    def sample_n(self, rng: np.random.Generator, n: int) -> np.ndarray:
        return rng.normal(self.loc, self.sigma, size=n)

    def mean(self) -> float:
        return self.loc

    def cdf(self, x: float) -> float:
        return norm_cdf((x - self.loc) / self.sigma)

    def quantile(self, beta: float) -> float:
        _check_level(beta, "beta")
        return self.loc + self.sigma * norm_ppf(beta)

    def positive_gap_mean(self, mu: float) -> float:
        z = (mu - self.loc) / self.sigma
        return (mu - self.loc) * norm_cdf(z) + self.sigma * _norm_pdf(z)


@dataclass(frozen=True)
class Exponential(RewardModel):
    """Exponential with rate theta (mean 1 / theta)."""

    rate: float
    kind: str = field(default="exponential", init=False, repr=False)

    def __post_init__(self) -> None:
        if self.rate <= 0.0:
            raise ValueError("rate must be positive")

    def sample(self, rng: np.random.Generator) -> float:
        return -math.log1p(-rng.random()) / self.rate

    def sample_n(self, rng: np.random.Generator, n: int) -> np.ndarray:
        return -np.log1p(-rng.random(n)) / self.rate

    def mean(self) -> float:
        return 1.0 / self.rate

    def cdf(self, x: float) -> float:
        if x <= 0.0:
            return 0.0
        return -math.expm1(-self.rate * x)

    def quantile(self, beta: float) -> float:
        _check_level(beta, "beta")
        return -math.log1p(-beta) / self.rate

    def positive_gap_mean(self, mu: float) -> float:
        if mu <= 0.0:
            return 0.0
        return mu + math.expm1(-self.rate * mu) / self.rate


def _bisect_quantile(cdf, beta: float, lo: float, hi: float) -> float:
    """Smallest x with cdf(x) > beta, located by monotone bisection."""
    while cdf(lo) > beta:
        lo -= max(1.0, hi - lo)
    while cdf(hi) <= beta:
        hi += max(1.0, hi - lo)
    while hi - lo > 1e-10:
        mid = 0.5 * (lo + hi)
        if cdf(mid) > beta:
            hi = mid
        else:
            lo = mid
    return hi


@dataclass(frozen=True)
class GaussianMixture(RewardModel):
    """Finite mixture of Gaussians; components are (weight, loc, sigma)."""

    components: tuple[tuple[float, float, float], ...]
    kind: str = field(default="gaussian_mixture", init=False, repr=False)

    def __post_init__(self) -> None:
        comps = tuple((float(w), float(m), float(s)) for w, m, s in self.components)
        if not comps:
            raise ValueError("mixture needs at least one component")
        if any(w <= 0.0 or s <= 0.0 for w, _, s in comps):
            raise ValueError("weights and sigmas must be positive")
        if abs(sum(w for w, _, _ in comps) - 1.0) > 1e-12:
            raise ValueError("mixture weights must sum to one")
        object.__setattr__(self, "components", comps)
        object.__setattr__(self, "_cumw", np.cumsum([w for w, _, _ in comps]))

    def sample(self, rng: np.random.Generator) -> float:
        i = int(np.searchsorted(self._cumw, rng.random(), side="right"))
        i = min(i, len(self.components) - 1)
        _, loc, sigma = self.components[i]
        return float(rng.normal(loc, sigma))

    def mean(self) -> float:
        return sum(w * m for w, m, _ in self.components)

    def cdf(self, x: float) -> float:
        return sum(w * norm_cdf((x - m) / s) for w, m, s in self.components)

    def quantile(self, beta: float) -> float:
        _check_level(beta, "beta")
        z = norm_ppf(beta)
        marks = [m + s * z for _, m, s in self.components]
        return _bisect_quantile(self.cdf, beta, min(marks), max(marks))

    def positive_gap_mean(self, mu: float) -> float:
        total = 0.0
        for w, m, s in self.components:
            z = (mu - m) / s
            total += w * ((mu - m) * norm_cdf(z) + s * _norm_pdf(z))
        return total


@dataclass(frozen=True)
class Empirical(RewardModel):
    """Uniform resampling law over observed values."""

    values: np.ndarray = field(repr=False)
    kind: str = field(default="empirical", init=False, repr=False)

    def __post_init__(self) -> None:
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 1 or v.size == 0:
            raise ValueError("empirical model needs at least one value")
        if not np.all(np.isfinite(v)):
            raise ValueError("empirical values must be finite")
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "_sorted", np.sort(v))

    def sample(self, rng: np.random.Generator) -> float:
        return float(self.values[rng.integers(self.values.size)])

    def sample_n(self, rng: np.random.Generator, n: int) -> np.ndarray:
        return self.values[rng.integers(self.values.size, size=n)]

    def mean(self) -> float:
        return float(self.values.mean())

    def cdf(self, x: float) -> float:
        return float(np.searchsorted(self._sorted, x, side="right")) / self.values.size

    def quantile(self, beta: float) -> float:
        _check_level(beta, "beta")
        n = self.values.size
        idx = min(int(math.floor(n * beta)), n - 1)
        return float(self._sorted[idx])

    def positive_gap_mean(self, mu: float) -> float:
        return float(np.maximum(mu - self.values, 0.0).mean())

    def atom_mass(self, x: float) -> float:
        return float(np.count_nonzero(self.values == x)) / self.values.size

    def summary(self) -> tuple[float, float, float]:
        """(min, mean, max) of the stored values."""
        return float(self._sorted[0]), self.mean(), float(self._sorted[-1])


@dataclass(frozen=True)
class PointMassMixture(RewardModel):
    """Atoms plus continuous parts; atoms are (value, mass), parts (weight, model)."""

    atoms: tuple[tuple[float, float], ...]
    parts: tuple[tuple[float, RewardModel], ...]
    kind: str = field(default="point_mass_mixture", init=False, repr=False)

    def __post_init__(self) -> None:
        atoms = tuple((float(x), float(m)) for x, m in self.atoms)
        parts = tuple((float(w), p) for w, p in self.parts)
        if not atoms and not parts:
            raise ValueError("mixture needs at least one component")
        masses = [m for _, m in atoms] + [w for w, _ in parts]
        if any(m <= 0.0 for m in masses):
            raise ValueError("atom masses and part weights must be positive")
        if abs(sum(masses) - 1.0) > 1e-12:
            raise ValueError("atom masses plus part weights must sum to one")
        if any(not math.isfinite(x) for x, _ in atoms):
            raise ValueError("atom values must be finite")
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "parts", parts)
        object.__setattr__(self, "_cum", np.cumsum(masses))

    def sample(self, rng: np.random.Generator) -> float:
        u = rng.random()
        i = int(np.searchsorted(self._cum, u, side="right"))
        i = min(i, len(self.atoms) + len(self.parts) - 1)
        if i < len(self.atoms):
            return self.atoms[i][0]
        return self.parts[i - len(self.atoms)][1].sample(rng)

    def mean(self) -> float:
        total = sum(x * m for x, m in self.atoms)
        return total + sum(w * p.mean() for w, p in self.parts)

    def cdf(self, x: float) -> float:
        total = sum(m for v, m in self.atoms if v <= x)
        return total + sum(w * p.cdf(x) for w, p in self.parts)

    def quantile(self, beta: float) -> float:
        _check_level(beta, "beta")
        marks = [v for v, _ in self.atoms]
        marks += [p.quantile(beta) for _, p in self.parts]
        return _bisect_quantile(self.cdf, beta, min(marks), max(marks))

    def positive_gap_mean(self, mu: float) -> float:
        total = sum(m * max(mu - v, 0.0) for v, m in self.atoms)
        return total + sum(w * p.positive_gap_mean(mu) for w, p in self.parts)

    def atom_mass(self, x: float) -> float:
        total = sum(m for v, m in self.atoms if v == x)
        return total + sum(w * p.atom_mass(x) for w, p in self.parts)


@dataclass(frozen=True)
class TruncatedModel:
    """Base model with its alpha-tail collapsed onto one atom at the CVaR.

    Mass above the (1 - alpha)-quantile, including the proportional share
    of any atom sitting exactly at the quantile, is relocated to a single
    atom of mass alpha at C_alpha(base).  The relocation preserves the
    mean by construction.
    """

    base: RewardModel
    alpha: float
    quantile_point: float
    cvar_atom: float

    def mean(self) -> float:
        return self.base.mean()

    def cdf(self, x: float) -> float:
        if x >= self.cvar_atom:
            return 1.0
        return min(self.base.cdf(x), 1.0 - self.alpha)

    def sample(self, rng: np.random.Generator) -> float:
        x = self.base.sample(rng)
        q = self.quantile_point
        if x > q:
            return self.cvar_atom
        if x < q:
            return x
        m = self.base.atom_mass(q)
        if m == 0.0:
            return x
        below = self.base.cdf(q) - m
        keep = ((1.0 - self.alpha) - below) / m
        return q if rng.random() < keep else self.cvar_atom


def truncate(model: RewardModel, alpha: float) -> TruncatedModel:
    """Collapse the upper alpha tail of ``model`` onto its CVaR."""
    _check_level(alpha, "alpha")
    cvar = model.cvar(alpha)
    if not math.isfinite(cvar):
        raise ValueError("model must have finite CVaR to be truncated")
    return TruncatedModel(model, alpha, model.quantile(1.0 - alpha), cvar)


def load_empirical(path) -> Empirical:
    """Read one float per line; a single leading header line is tolerated."""
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise CsvFormatError(f"{path}: file is empty")
    start = 0
    try:
        float(lines[0])
    except ValueError:
        start = 1
    values = []
    for i, line in enumerate(lines[start:], start=start + 1):
        try:
            values.append(float(line))
        except ValueError:
            raise CsvFormatError(f"{path}: row {i} is not a number: {line!r}") from None
    if not values:
        raise CsvFormatError(f"{path}: no data rows")
    return Empirical(np.array(values))


_SCALAR_KINDS = {
    "bernoulli": (Bernoulli, ("p",)),
    "uniform": (Uniform, ("low", "high")),
    "gaussian": (Gaussian, ("loc", "sigma")),
    "exponential": (Exponential, ("rate",)),
}


def model_from_dict(spec: dict) -> RewardModel:
    """Build a reward model from a config mapping {kind, params}."""
    if "kind" not in spec:
        raise ValueError("arm spec needs a 'kind' field")
    kind = spec["kind"]
    params = spec.get("params", {})
    if kind in _SCALAR_KINDS:
        cls, names = _SCALAR_KINDS[kind]
        missing = [n for n in names if n not in params]
        if missing:
            raise ValueError(f"{kind} arm missing params: {', '.join(missing)}")
        return cls(**{n: float(params[n]) for n in names})
    if kind == "gaussian_mixture":
        comps = params.get("components")
        if not comps:
            raise ValueError("gaussian_mixture needs 'components'")
        return GaussianMixture(tuple(tuple(c) for c in comps))
    if kind == "empirical":
        if "path" in params:
            return load_empirical(params["path"])
        if "values" in params:
            return Empirical(np.asarray(params["values"], dtype=float))
        raise ValueError("empirical arm needs 'path' or 'values'")
    if kind == "point_mass_mixture":
        atoms = tuple(tuple(a) for a in params.get("atoms", ()))
        parts = tuple(
            (float(w), model_from_dict(sub)) for w, sub in params.get("parts", ())
        )
        return PointMassMixture(atoms, parts)
    raise ValueError(f"unknown arm kind: {kind!r}")


def model_to_dict(model: RewardModel) -> dict:
    """Inverse of model_from_dict, for preset serialisation."""
    if isinstance(model, Bernoulli):
        return {"kind": "bernoulli", "params": {"p": model.p}}
    if isinstance(model, Uniform):
        return {"kind": "uniform", "params": {"low": model.low, "high": model.high}}
    if isinstance(model, Gaussian):
        return {"kind": "gaussian", "params": {"loc": model.loc, "sigma": model.sigma}}
    if isinstance(model, Exponential):
        return {"kind": "exponential", "params": {"rate": model.rate}}
    if isinstance(model, GaussianMixture):
        return {
            "kind": "gaussian_mixture",
            "params": {"components": [list(c) for c in model.components]},
        }
    if isinstance(model, Empirical):
        return {"kind": "empirical", "params": {"values": model.values.tolist()}}
    if isinstance(model, PointMassMixture):
        return {
            "kind": "point_mass_mixture",
            "params": {
                "atoms": [list(a) for a in model.atoms],
                "parts": [[w, model_to_dict(p)] for w, p in model.parts],
            },
        }
    raise ValueError(f"cannot serialise model of type {type(model).__name__}")
