"""Offspring laws: the Janardan (perturbed Poisson) family and its two limits.

The Janardan law with parameters ``0 < mu < lam`` has

    p_0 = exp(-lam)
    p_m = lam mu^(m-1) / (mu-lam)^m * (exp(-lam) - exp(-mu) sum_{j<m} (mu-lam)^j / j!),  m >= 1

and probability generating function

    P(s) = ((s-1)(mu-lam) exp(-lam) + s lam exp(-mu(1-s))) / (mu(s-1) + lam).

It tends to Poisson(lam) as mu -> lam and to Bernoulli(1 - exp(-lam)) as mu -> 0.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np
from scipy.special import gammaln

from .errors import ConvergenceError, ParameterDomainError
from .frequency import FrequencyTable

TAIL_EPS = 1e-12
MAX_TERMS = 1_000_000
# relative gap (lam - mu) / lam below which the Janardan law is treated as Poisson(lam)
POISSON_LIMIT_RTOL = 1e-9
SEED_BOUND = 2**64


def _check_positive(name, value):
    if not (isinstance(value, (int, float, np.floating, np.integer)) and math.isfinite(value) and value > 0):
        raise ParameterDomainError(f"{name} must be a finite positive number, got {value!r}")


def _inverse_shift_mean(m: int, y: float) -> float:
    """E[1 / (m + K)] for K ~ Poisson(y), m >= 1.

    All terms are positive, so the sum has no cancellation. The window
    [0, y + 40 sqrt(y) + 50] leaves out Poisson mass far below double precision.
    """
    if y == 0.0:
        return 1.0 / m
    kmax = int(y + 40.0 * math.sqrt(y) + 50.0)
    k = np.arange(kmax + 1, dtype=float)
    logw = k * math.log(y) - y - gammaln(k + 1.0)
    return float(np.sum(np.exp(logw) / (m + k)))


def _one_minus_exp_ratio(x: float) -> float:
    """(1 - e^-x) / x, continuous at 0."""
    return -math.expm1(-x) / x if x != 0.0 else 1.0


class OffspringLaw:
    """Common surface of the offspring laws."""

    def pmf(self, m: int) -> float:
        raise NotImplementedError

    def logpmf(self, m: int) -> float:
        p = self.pmf(m)
        return math.log(p) if p > 0 else -math.inf

    def _pgf(self, s: float) -> float:
        raise NotImplementedError

    def pgf(self, s: float) -> float:
        s = float(s)
        if not 0.0 <= s <= 1.0:
            raise ParameterDomainError(f"pgf argument must lie in [0, 1], got {s!r}")
        return self._pgf(s)

    def gap_ratio(self, s: float) -> float:
        """(P(s) - s) / (1 - s) for 0 <= s < 1.

        Shares the sign of P(s) - s but keeps it resolvable as s -> 1, where
        P(s) - s itself is lost in rounding; tends to 1 - mean at s = 1.
        """
        return (self.pgf(s) - s) / (1.0 - s)

    def mean(self) -> float:
        raise NotImplementedError

    def variance(self) -> float:
        raise NotImplementedError

    @property
    def label(self) -> str:
        raise NotImplementedError


@dataclass(frozen=True)
class Janardan(OffspringLaw):
    """Janardan offspring law with base intensity ``lam`` and perturbation ``mu``."""

    lam: float
    mu: float

    def __post_init__(self):
        _check_positive("lambda", self.lam)
        _check_positive("mu", self.mu)
        if not self.mu < self.lam:
            raise ParameterDomainError(f"Janardan law needs 0 < mu < lambda, got mu={self.mu!r}, lambda={self.lam!r}")
        object.__setattr__(self, "lam", float(self.lam))
        object.__setattr__(self, "mu", float(self.mu))

    @property
    def near_poisson(self) -> bool:
        return (self.lam - self.mu) / self.lam < POISSON_LIMIT_RTOL

    def logpmf(self, m: int) -> float:
        if m < 0:
            return -math.inf
        lam, mu = self.lam, self.mu
        if m == 0:
            return -lam
        if self.near_poisson:
            return m * math.log(lam) - lam - math.lgamma(m + 1)
        # The bracket in p_m is exp(-mu) times the exponential-series remainder at
        # mu - lam < 0. Kummer's transformation rewrites remainder / (mu - lam)^m
        # as exp(-(lam - mu)) / (m-1)! * E[1/(m+K)], K ~ Poisson(lam - mu).
        ratio = _inverse_shift_mean(m, lam - mu)
        return math.log(lam) + (m - 1) * math.log(mu) - mu - math.lgamma(m) + math.log(ratio)

    def pmf(self, m: int) -> float:
        return math.exp(self.logpmf(m))

    def _pgf(self, s):
        lam, mu = self.lam, self.mu
        if self.near_poisson:
            return math.exp(-lam * (1.0 - s))
        num = (s - 1.0) * (mu - lam) * math.exp(-lam) + s * lam * math.exp(-mu * (1.0 - s))
        return num / (mu * (s - 1.0) + lam)

    def gap_ratio(self, s):
        if self.near_poisson:
            return Poisson(self.lam).gap_ratio(s)
        lam, mu = self.lam, self.mu
        u = 1.0 - s
        num = s * mu * (1.0 - lam * _one_minus_exp_ratio(mu * u)) + (lam - mu) * math.exp(-lam)
        return num / (lam - mu * u)

    def mean(self):
        lam, mu = self.lam, self.mu
        return mu / lam * (math.expm1(-lam) + lam) - math.expm1(-lam)

    def variance(self):
        lam, mu = self.lam, self.mu
        m1 = self.mean()
        p = -math.expm1(-lam)
        return mu * mu - m1 * m1 + p * (1 - mu / lam) * (1 - 2 * mu / lam) + mu * (3 - 2 * mu / lam)

    @property
    def label(self):
        return f"JM(lambda={self.lam:g}, mu={self.mu:g})"


# The parameter record and the offspring law coincide for this family.
JanardanParams = Janardan


@dataclass(frozen=True)
class Poisson(OffspringLaw):
    lam: float

    def __post_init__(self):
        _check_positive("lambda", self.lam)
        object.__setattr__(self, "lam", float(self.lam))

    def logpmf(self, m):
        if m < 0:
            return -math.inf
        return m * math.log(self.lam) - self.lam - math.lgamma(m + 1)

    def pmf(self, m):
        return math.exp(self.logpmf(m))

    def _pgf(self, s):
        return math.exp(-self.lam * (1.0 - s))

    def gap_ratio(self, s):
        return 1.0 - self.lam * _one_minus_exp_ratio(self.lam * (1.0 - s))

    def mean(self):
        return self.lam

    def variance(self):
        return self.lam

    @property
    def label(self):
        return f"PM(lambda={self.lam:g})"


@dataclass(frozen=True)
class Bernoulli(OffspringLaw):
    p: float

    def __post_init__(self):
        if not (math.isfinite(self.p) and 0.0 < self.p < 1.0):
            raise ParameterDomainError(f"Bernoulli p must lie in (0, 1), got {self.p!r}")
        object.__setattr__(self, "p", float(self.p))

    @classmethod
    def janardan_limit(cls, lam: float) -> Bernoulli:
        """The mu -> 0 limit of Janardan(lam, mu)."""
        return cls(-math.expm1(-lam))

    def pmf(self, m):
        if m == 0:
            return 1.0 - self.p
        return self.p if m == 1 else 0.0

    def _pgf(self, s):
        return (1.0 - self.p) + s * self.p

    def gap_ratio(self, s):
        return 1.0 - self.p

    def mean(self):
        return self.p

    def variance(self):
        return self.p * (1.0 - self.p)

    @property
    def label(self):
        return f"Bernoulli(p={self.p:g})"


OffspringModel = Union[Janardan, Poisson, Bernoulli]


def janardan_pmf(params: Janardan, m: int) -> float:
    if m < 0 or int(m) != m:
        raise ParameterDomainError(f"class index must be a nonnegative integer, got {m!r}")
    return params.pmf(int(m))


def pgf(model: OffspringModel, s: float) -> float:
    return model.pgf(s)


def mean(model: OffspringModel) -> float:
    return model.mean()


def variance(model: OffspringModel) -> float:
    return model.variance()


@dataclass(frozen=True)
class PmfTable:
    """Truncated pmf p_0..p_M with running sums and the mass left beyond M."""

    probs: np.ndarray
    cum: np.ndarray = field(repr=False)
    tail_bound: float

    @property
    def max_class(self) -> int:
        return len(self.probs) - 1

    def moment(self, order: int) -> float:
        m = np.arange(len(self.probs), dtype=float)
        return math.fsum(m**order * self.probs)

    def pgf(self, s: float) -> float:
        return math.fsum(self.probs * s ** np.arange(len(self.probs), dtype=float))


def pmf_table(model: OffspringModel, tail_eps: float = TAIL_EPS) -> PmfTable:
    """Tabulate the pmf until the cumulative mass reaches ``1 - tail_eps``."""
    if not 0.0 < tail_eps < 1.0:
        raise ParameterDomainError(f"tail_eps must lie in (0, 1), got {tail_eps!r}")
    probs = []
    total = 0.0
    for m in range(MAX_TERMS):
        p = model.pmf(m)
        probs.append(p)
        total += p
        if total >= 1.0 - tail_eps:
            break
    else:
        raise ConvergenceError(f"pmf of {model.label} did not reach 1 - {tail_eps:g} within {MAX_TERMS} terms")
    probs_arr = np.asarray(probs, dtype=float)
    cum = np.minimum(np.cumsum(probs_arr), 1.0)
    probs_arr.flags.writeable = False
    cum.flags.writeable = False
    return PmfTable(probs_arr, cum, max(0.0, 1.0 - float(cum[-1])))


def make_rng(seed: int, stream: int | None = None) -> np.random.Generator:
    """PCG64 generator fully determined by ``seed`` and an optional replication index."""
    if int(seed) != seed or not 0 <= seed < SEED_BOUND:
        raise ParameterDomainError(f"seed must be an integer in [0, 2**64), got {seed!r}")
    spawn_key = () if stream is None else (int(stream),)
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=spawn_key))


def draw(table: PmfTable, n: int, rng: np.random.Generator) -> np.ndarray:
    """Inverse-CDF draws: the smallest m with u <= cum[m]; mass beyond M goes to M."""
    u = rng.random(n)
    idx = np.searchsorted(table.cum, u, side="left")
    return np.minimum(idx, table.max_class).astype(np.int64)


def sample_observations(model: OffspringModel, n: int, seed: int, stream: int | None = None) -> np.ndarray:
    if int(n) != n or n < 1:
        raise ParameterDomainError(f"sample size must be a positive integer, got {n!r}")
    return draw(pmf_table(model, TAIL_EPS), int(n), make_rng(seed, stream))


def sample(model: OffspringModel, n: int, seed: int, stream: int | None = None) -> FrequencyTable:
    """Class frequencies of ``n`` seeded draws from ``model``."""
    return FrequencyTable.from_observations(sample_observations(model, n, seed, stream))
