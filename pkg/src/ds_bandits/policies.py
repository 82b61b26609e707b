"""Bandit policies: the Dirichlet sampling family and index baselines.

The Dirichlet policies are round based.  Each round a leader (most
pulled arm) is chosen, every other arm challenges it in a duel, and the
set of winners is pulled; when nobody wins the leader is pulled alone.
A challenger with as many pulls as the leader is eliminated outright, a
challenger whose empirical mean already beats the leader's wins
immediately, and otherwise it wins when its randomised index, a
Dirichlet-weighted average of its history plus one exploration bonus
atom, reaches the leader's mean.  The four index variants differ only
in that bonus atom:

  npts  fixed known support bound B
  bds   max(observed max + gamma, mu + rho * E_hat[(mu - X)_+])
  rds   data bonus with leverage rho_n growing slowly in n
  qds   tail-compressed history (CVaR atom) plus the rds-style bonus
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .dirichlet import unit_exponentials
from .kinf import EmpiricalDist, kinf_dual, kl_bernoulli, kl_exponential, kl_gaussian

__all__ = [
    "ArmHistory",
    "PolicySpec",
    "RoundDecision",
    "select_leader",
    "bonus_gap",
    "bds_bonus",
    "npts_index",
    "bds_index",
    "rds_index",
    "qds_index",
    "qds_components",
    "leverage_schedule",
    "ds_round",
    "baseline_select",
    "make_policy",
    "validate_policy_spec",
    "theoretical_bds_rho",
    "theoretical_qds_rho",
]

WON_BY_MEAN = "won_by_mean"
WON_BY_INDEX = "won_by_index"
LOST = "lost"
ELIMINATED = "eliminated_equal_count"


class ArmHistory:
    """Append-only reward history with cached summaries."""

    __slots__ = ("_buf", "_n", "_sum", "_max", "_sorted")

    def __init__(self) -> None:
        self._buf = np.empty(8)
        self._n = 0
        self._sum = 0.0
        self._max = -math.inf
        self._sorted: np.ndarray | None = None

    def append(self, x: float) -> None:
        if self._n == self._buf.size:
            grown = np.empty(2 * self._buf.size)
            grown[: self._n] = self._buf
            self._buf = grown
        self._buf[self._n] = x
        self._n += 1
        self._sum += x
        if x > self._max:
            self._max = x
        if self._sorted is not None:
            pos = int(np.searchsorted(self._sorted, x))
            self._sorted = np.insert(self._sorted, pos, x)

    def values(self) -> np.ndarray:
        return self._buf[: self._n]

    def sorted_values(self) -> np.ndarray:
        if self._sorted is None:
            self._sorted = np.sort(self.values())
        return self._sorted

    @property
    def count(self) -> int:
        return self._n

    @property
    def total(self) -> float:
        return self._sum

    @property
    def mean(self) -> float:
        if self._n == 0:
            raise ValueError("empty history has no mean")
        return self._sum / self._n

    @property
    def max_value(self) -> float:
        return self._max


@dataclass(frozen=True)
class RoundDecision:
    """Outcome of one duel round."""

    pulled_arms: tuple[int, ...]
    leader: int
    duel_outcomes: dict[int, str]


@dataclass(frozen=True)
class PolicySpec:
    """Declarative policy description used by configs and the harness."""

    kind: str
    params: dict = field(default_factory=dict)
    label: str = ""
    seed_offset: int = 0

    def display_label(self) -> str:
        if self.label:
            return self.label
        if not self.params:
            return self.kind
        inner = ",".join(f"{k}={_fmt(v)}" for k, v in sorted(self.params.items()))
        return f"{self.kind}({inner})"


def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:g}"
    if isinstance(v, (list, tuple)):
        return "[" + ",".join(_fmt(x) for x in v) + "]"
    return str(v)


def select_leader(histories, rng: np.random.Generator) -> int:
    """Most pulled arm; ties broken by empirical mean, then uniformly."""
    counts = np.array([h.count for h in histories])
    cands = np.flatnonzero(counts == counts.max())
    if cands.size == 1:
        return int(cands[0])
    means = np.array([histories[k].mean for k in cands])
    best = np.flatnonzero(means == means.max())
    if best.size == 1:
        return int(cands[best[0]])
    return int(cands[best[rng.integers(best.size)]])


def bonus_gap(history: ArmHistory, mu: float, rho: float) -> float:
    """Data-dependent bonus mu + rho * mean((mu - X_i)_+)."""
    gaps = np.maximum(mu - history.values(), 0.0)
    return mu + rho * float(gaps.mean())


def _reweight(points: np.ndarray, rng: np.random.Generator) -> float:
    """Average of ``points`` under uniform Dirichlet weights."""
    e = unit_exponentials(points.size, rng)
    return float(e @ points) / float(e.sum())


def npts_index(history: ArmHistory, bound: float, rng: np.random.Generator) -> float:
    """History reweighted together with one atom at the known bound B."""
    if bound < history.max_value:
        warnings.warn(
            f"npts bound {bound} lies below the observed max {history.max_value}",
            stacklevel=2,
        )
    points = np.append(history.values(), bound)
    return _reweight(points, rng)


def bds_bonus(history: ArmHistory, mu: float, gamma: float, rho: float) -> float:
    return max(history.max_value + gamma, bonus_gap(history, mu, rho))


def bds_index(
    history: ArmHistory, mu: float, gamma: float, rho: float, rng: np.random.Generator
) -> float:
    points = np.append(history.values(), bds_bonus(history, mu, gamma, rho))
    return _reweight(points, rng)


_SCHEDULES = {
    "sqrt_log": lambda n: math.sqrt(math.log1p(n)),
    "log": lambda n: math.log1p(n),
    "log2": lambda n: math.log1p(n) ** 2,
}


def leverage_schedule(leverage):
    """Resolve a named or tabulated leverage schedule to a callable of n."""
    if callable(leverage):
        return leverage
    if isinstance(leverage, str):
        if leverage not in _SCHEDULES:
            raise ValueError(
                f"unknown leverage {leverage!r}; pick from {sorted(_SCHEDULES)}"
            )
        return _SCHEDULES[leverage]
    table = [float(v) for v in leverage]
    if not table:
        raise ValueError("leverage table must be nonempty")
    if any(b < a for a, b in zip(table, table[1:])):
        raise ValueError("leverage table must be nondecreasing")
    return lambda n: table[min(n, len(table)) - 1]


def rds_index(history: ArmHistory, mu: float, schedule, rng: np.random.Generator) -> float:
    rho_n = schedule(history.count)
    points = np.append(history.values(), bonus_gap(history, mu, rho_n))
    return _reweight(points, rng)


def qds_components(history: ArmHistory, mu: float, alpha: float, rho: float):
    """Support points and Dirichlet concentrations of the QDS index.

    The sorted history is cut at position m = ceil(n (1 - alpha)); the
    upper block collapses to its average (an empirical CVaR atom) that
    carries concentration n - m + 1, and one bonus atom is appended.
    """
    xs = history.sorted_values()
    n = xs.size
    m = max(math.ceil(n * (1.0 - alpha)), 1)
    cvar_atom = float(xs[m - 1 :].mean())
    bonus = bonus_gap(history, mu, rho)
    points = np.concatenate((xs[: m - 1], [cvar_atom, bonus]))
    alphas = np.concatenate((np.ones(m - 1, dtype=int), [n - m + 1, 1]))
    return points, alphas


def qds_index(
    history: ArmHistory, mu: float, alpha: float, rho: float, rng: np.random.Generator
) -> float:
    points, _ = qds_components(history, mu, alpha, rho)
    n = history.count
    m = points.size - 1  # cut position: m - 1 singleton slots
    e = unit_exponentials(n + 1, rng)
    gammas = np.concatenate((e[: m - 1], [e[m - 1 : n].sum(), e[n]]))
    return float(gammas @ points) / float(e.sum())


def theoretical_bds_rho(p: float) -> float:
    """Smallest admissible bds leverage for crossing probability p."""
    if not 0.0 < p < 1.0:
        raise ValueError("p must lie in (0, 1)")
    return -1.0 / math.log(1.0 - p)


def theoretical_qds_rho(alpha: float) -> float:
    """Smallest admissible qds leverage at quantile level alpha."""
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie in (0, 1)")
    return (1.0 + alpha) / alpha**2


def ds_round(histories, index_fn, rng: np.random.Generator) -> RoundDecision:
    """One leader/challenger duel round; every history must be nonempty."""
    leader = select_leader(histories, rng)
    n_lead = histories[leader].count
    m_lead = histories[leader].mean
    winners: list[int] = []
    outcomes: dict[int, str] = {}
    for k, h in enumerate(histories):
        if k == leader:
            continue
        if h.count == n_lead:
            outcomes[k] = ELIMINATED
            continue
        if h.mean >= m_lead:
            outcomes[k] = WON_BY_MEAN
            winners.append(k)
            continue
        if index_fn(h, m_lead, rng) >= m_lead:
            outcomes[k] = WON_BY_INDEX
            winners.append(k)
        else:
            outcomes[k] = LOST
    if winners:
        order = rng.permutation(len(winners))
        pulled = tuple(winners[i] for i in order)
    else:
        pulled = (leader,)
    return RoundDecision(pulled, leader, outcomes)


class DirichletSamplingPolicy:
    """Round-based engine shared by npts, bds, rds, and qds."""

    def __init__(self, index_fn, n_arms: int) -> None:
        self.histories = [ArmHistory() for _ in range(n_arms)]
        self._index_fn = index_fn
        self._round = 0
        self.last_decision: RoundDecision | None = None

    def step(self, rng: np.random.Generator) -> list[int]:
        self._round += 1
        if self._round == 1:
            return [int(a) for a in rng.permutation(len(self.histories))]
        decision = ds_round(self.histories, self._index_fn, rng)
        self.last_decision = decision
        return list(decision.pulled_arms)

    def update(self, arm: int, reward: float, rng: np.random.Generator) -> None:
        self.histories[arm].append(reward)


class _IndexPolicy:
    """One arm per step, each arm initialised once in order."""

    def __init__(self, n_arms: int) -> None:
        self.histories = [ArmHistory() for _ in range(n_arms)]
        self.t = 0

    def step(self, rng: np.random.Generator) -> list[int]:
        if self.t < len(self.histories):
            return [self.t]
        return [self._select(rng)]

    def update(self, arm: int, reward: float, rng: np.random.Generator) -> None:
        self.histories[arm].append(reward)
        self.t += 1

    def _select(self, rng: np.random.Generator) -> int:
        raise NotImplementedError


class Ucb1Policy(_IndexPolicy):
    def __init__(self, n_arms: int, sigma: float) -> None:
        super().__init__(n_arms)
        self.sigma = sigma

    def _select(self, rng: np.random.Generator) -> int:
        lnt = math.log(self.t)
        idx = [
            h.mean + self.sigma * math.sqrt(2.0 * lnt / h.count) for h in self.histories
        ]
        return int(np.argmax(idx))


def _klucb_root(kl, mean: float, budget: float, hi: float) -> float:
    """Largest q with kl(mean, q) <= budget, bisected to 1e-8."""
    if kl(mean, hi) <= budget:
        return hi
    lo = mean
    while hi - lo > 1e-8:
        mid = 0.5 * (lo + hi)
        if kl(mean, mid) <= budget:
            lo = mid
        else:
            hi = mid
    return lo


class KlUcbPolicy(_IndexPolicy):
    def __init__(self, n_arms: int, family: str, sigma: float | None) -> None:
        super().__init__(n_arms)
        self.family = family
        self.sigma = sigma

    def _index(self, h: ArmHistory, lnt: float) -> float:
        budget = lnt / h.count
        if self.family == "gaussian":
            return h.mean + self.sigma * math.sqrt(2.0 * budget)
        if self.family == "bernoulli":
            if h.mean >= 1.0:
                return 1.0
            return _klucb_root(
                lambda p, q: kl_bernoulli(p, q), h.mean, budget, 1.0 - 1e-12
            )
        # exponential, parameterised by means
        hi = h.mean * math.exp(budget + 1.0)
        return _klucb_root(kl_exponential, h.mean, budget, hi)

    def _select(self, rng: np.random.Generator) -> int:
        lnt = math.log(self.t)
        return int(np.argmax([self._index(h, lnt) for h in self.histories]))


class ImedPolicy(_IndexPolicy):
    def __init__(self, n_arms: int, family: str, sigma: float | None) -> None:
        super().__init__(n_arms)
        self.family = family
        self.sigma = sigma

    def _divergence(self, mean: float, target: float) -> float:
        if mean >= target:
            return 0.0
        if self.family == "gaussian":
            return kl_gaussian(mean, target, self.sigma)
        if self.family == "bernoulli":
            if target >= 1.0:
                return math.inf
            return kl_bernoulli(mean, target)
        return kl_exponential(mean, target)

    def _select(self, rng: np.random.Generator) -> int:
        target = max(h.mean for h in self.histories)
        idx = [
            h.count * self._divergence(h.mean, target) + math.log(h.count)
            for h in self.histories
        ]
        return int(np.argmin(idx))


class EmpiricalImedPolicy(_IndexPolicy):
    """IMED with the nonparametric kinf divergence under a support bound."""

    def __init__(self, n_arms: int, bound: float) -> None:
        super().__init__(n_arms)
        self.bound = bound
        self._cache: list[tuple[int, float, float] | None] = [None] * n_arms

    def _kinf(self, k: int, target: float) -> float:
        h = self.histories[k]
        cached = self._cache[k]
        if cached is not None and cached[0] == h.count and cached[1] == target:
            return cached[2]
        if h.mean >= target:
            value = 0.0
        else:
            bound = max(self.bound, h.max_value)
            if target >= bound:
                value = math.inf
            else:
                value = kinf_dual(
                    EmpiricalDist.from_samples(h.values()), target, bound
                ).value
        self._cache[k] = (h.count, target, value)
        return value

    def _select(self, rng: np.random.Generator) -> int:
        target = max(h.mean for h in self.histories)
        idx = [
            h.count * self._kinf(k, target) + math.log(h.count)
            for k, h in enumerate(self.histories)
        ]
        return int(np.argmin(idx))


class BinarizedTsPolicy(_IndexPolicy):
    """Thompson sampling on rewards rescaled to [0, 1] and coin-binarized."""

    def __init__(self, n_arms: int, low: float, high: float) -> None:
        super().__init__(n_arms)
        if not low < high:
            raise ValueError("ts_binarized needs low < high")
        self.low = low
        self.high = high
        self.successes = np.zeros(n_arms, dtype=int)

    def update(self, arm: int, reward: float, rng: np.random.Generator) -> None:
        super().update(arm, reward, rng)
        p = (reward - self.low) / (self.high - self.low)
        if rng.random() < min(max(p, 0.0), 1.0):
            self.successes[arm] += 1

    def _select(self, rng: np.random.Generator) -> int:
        draws = [
            rng.beta(1.0 + self.successes[k], 1.0 + h.count - self.successes[k])
            for k, h in enumerate(self.histories)
        ]
        return int(np.argmax(draws))


class GaussianTsPolicy(_IndexPolicy):
    """Thompson sampling with a Gaussian posterior of known sigma."""

    def __init__(self, n_arms: int, sigma: float) -> None:
        super().__init__(n_arms)
        self.sigma = sigma

    def _select(self, rng: np.random.Generator) -> int:
        draws = [
            rng.normal(h.mean, self.sigma / math.sqrt(h.count)) for h in self.histories
        ]
        return int(np.argmax(draws))


class RoundRobinPolicy(_IndexPolicy):
    def _select(self, rng: np.random.Generator) -> int:
        return self.t % len(self.histories)


class FixedArmPolicy(_IndexPolicy):
    def __init__(self, n_arms: int, arm: int) -> None:
        super().__init__(n_arms)
        if not 0 <= arm < n_arms:
            raise ValueError("fixed arm out of range")
        self.arm = arm

    def _select(self, rng: np.random.Generator) -> int:
        return self.arm


def baseline_select(spec: PolicySpec, histories, t: int, rng: np.random.Generator) -> int:
    """One-shot selection for an index baseline over existing histories."""
    if spec.kind == "ts_binarized":
        raise ValueError(
            "ts_binarized keeps coin state across updates; drive it via make_policy"
        )
    policy = make_policy(spec, len(histories))
    policy.histories = list(histories)
    policy.t = t
    return policy._select(rng)


_DS_KINDS = {"npts", "bds", "rds", "qds"}
_BASELINE_KINDS = {
    "ucb1",
    "klucb",
    "imed",
    "imed_empirical",
    "ts_binarized",
    "ts_gaussian",
    "round_robin",
    "fixed",
}


def validate_policy_spec(spec: PolicySpec) -> None:
    kind, p = spec.kind, spec.params
    if kind not in _DS_KINDS | _BASELINE_KINDS:
        raise ValueError(f"unknown policy kind {spec.kind!r}")

    def need(*names):
        missing = [n for n in names if n not in p]
        if missing:
            raise ValueError(f"{kind} policy missing params: {', '.join(missing)}")

    if kind in ("npts", "imed_empirical"):
        need("bound")
        if not math.isfinite(float(p["bound"])):
            raise ValueError(f"{kind} needs a finite support bound")
    elif kind == "bds":
        need("rho", "gamma")
        if float(p["rho"]) <= 0.0:
            raise ValueError("bds needs rho > 0")
        if float(p["gamma"]) < 0.0:
            raise ValueError("bds needs gamma >= 0")
    elif kind == "rds":
        leverage_schedule(p.get("leverage", "sqrt_log"))
    elif kind == "qds":
        need("rho", "alpha")
        if float(p["rho"]) <= 0.0:
            raise ValueError("qds needs rho > 0")
        if not 0.0 < float(p["alpha"]) < 1.0:
            raise ValueError("qds needs alpha in (0, 1)")
    elif kind == "ucb1" or kind == "ts_gaussian":
        need("sigma")
        if float(p["sigma"]) <= 0.0:
            raise ValueError(f"{kind} needs sigma > 0")
    elif kind in ("klucb", "imed"):
        family = p.get("family", "bernoulli")
        if family not in ("bernoulli", "gaussian", "exponential"):
            raise ValueError(f"{kind} family must be bernoulli, gaussian or exponential")
        if family == "gaussian" and float(p.get("sigma", 0.0)) <= 0.0:
            raise ValueError(f"{kind} with gaussian family needs sigma > 0")
    elif kind == "ts_binarized":
        need("low", "high")
        if not float(p["low"]) < float(p["high"]):
            raise ValueError("ts_binarized needs low < high")
    elif kind == "fixed":
        need("arm")


def make_policy(spec: PolicySpec, n_arms: int):
    """Instantiate the mutable policy object described by ``spec``."""
    validate_policy_spec(spec)
    kind, p = spec.kind, spec.params
    conservative = 1.5 if p.get("conservative") else 1.0
    if kind == "npts":
        bound = float(p["bound"]) * conservative
        return DirichletSamplingPolicy(
            lambda h, mu, rng: npts_index(h, bound, rng), n_arms
        )
    if kind == "bds":
        rho, gamma = float(p["rho"]), float(p["gamma"])
        return DirichletSamplingPolicy(
            lambda h, mu, rng: bds_index(h, mu, gamma, rho, rng), n_arms
        )
    if kind == "rds":
        schedule = leverage_schedule(p.get("leverage", "sqrt_log"))
        return DirichletSamplingPolicy(
            lambda h, mu, rng: rds_index(h, mu, schedule, rng), n_arms
        )
    if kind == "qds":
        rho, alpha = float(p["rho"]), float(p["alpha"])
        return DirichletSamplingPolicy(
            lambda h, mu, rng: qds_index(h, mu, alpha, rho, rng), n_arms
        )
    if kind == "ucb1":
        return Ucb1Policy(n_arms, float(p["sigma"]))
    if kind == "klucb":
        family = p.get("family", "bernoulli")
        sigma = float(p["sigma"]) if "sigma" in p else None
        return KlUcbPolicy(n_arms, family, sigma)
    if kind == "imed":
        family = p.get("family", "bernoulli")
        sigma = float(p["sigma"]) if "sigma" in p else None
        return ImedPolicy(n_arms, family, sigma)
    if kind == "imed_empirical":
        return EmpiricalImedPolicy(n_arms, float(p["bound"]) * conservative)
    if kind == "ts_binarized":
        return BinarizedTsPolicy(
            n_arms, float(p["low"]), float(p["high"]) * conservative
        )
    if kind == "ts_gaussian":
        return GaussianTsPolicy(n_arms, float(p["sigma"]))
    if kind == "round_robin":
        return RoundRobinPolicy(n_arms)
    return FixedArmPolicy(n_arms, int(p["arm"]))
