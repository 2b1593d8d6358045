"""Galton-Watson analysis for any offspring law, starting from one ancestor."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from . import roots
from .errors import ConsistencyError, ParameterDomainError
from .offspring import Janardan, OffspringModel, make_rng, pmf_table


CRITICAL_ATOL = 1e-12
BRACKET_TOP = 1.0 - 1e-9
FIXED_POINT_MAX_ITER = 1_000_000
POPULATION_CAP = 10**9


class Regime(enum.Enum):
    SUBCRITICAL = "subcritical"
    CRITICAL = "critical"
    SUPERCRITICAL = "supercritical"


@dataclass(frozen=True)
class Criticality:
    regime: Regime
    mean_offspring: float
    # g(lambda), only reported for Janardan laws with lambda >= 1
    threshold_mu: float | None = None

    @property
    def supercritical(self) -> bool:
        return self.regime is Regime.SUPERCRITICAL


def critical_mu(lam: float) -> float:
    """g(lam) = lam e^-lam / (e^-lam - (1 - lam)): the mu at which Janardan(lam, mu) has mean one."""
    if not (math.isfinite(lam) and lam >= 1.0):
        raise ParameterDomainError(
            f"critical mu needs lambda >= 1; for lambda={lam!r} every admissible mu is subcritical, "
            "so no supercritical mu exists")
    e = math.exp(-lam)
    return lam * e / (e + (lam - 1.0))


def classify(model: OffspringModel) -> Criticality:
    m = model.mean()
    if abs(m - 1.0) < CRITICAL_ATOL:
        regime = Regime.CRITICAL
    elif m < 1.0:
        regime = Regime.SUBCRITICAL
    else:
        regime = Regime.SUPERCRITICAL
    threshold = None
    if isinstance(model, Janardan) and model.lam >= 1.0:
        threshold = critical_mu(model.lam)
    return Criticality(regime, m, threshold)


def _fixed_point(model: OffspringModel, max_iter: int = FIXED_POINT_MAX_ITER):
    """Iterate s <- P(s) from P(0); return (limit, error estimate)."""
    s = model.pgf(0.0)
    step = prev = math.inf
    for _ in range(max_iter):
        nxt = model.pgf(s)
        prev, step = step, nxt - s
        s = nxt
        if step <= 1e-17:
            break
    if step <= 0.0:
        return s, 0.0
    rate = min(step / prev, 1.0 - 1e-16) if math.isfinite(prev) and prev > 0 else 0.0
    return s, step * rate / (1.0 - rate)


def extinction_probability(model: OffspringModel, tol: float = 1e-12, method: str = "bisect") -> float:
    """Smallest root of P(s) = s in [0, 1].

    ``method="bisect"`` (default) bisects the sign of P(s) - s on [0, 1 - 1e-9]
    and cross-checks against fixed-point iteration. ``method="uniroot"`` reproduces
    R's ``rootSolve::uniroot.all(f, c(0, 1))`` at its default tolerance, which is
    only accurate to a few 1e-5; use it to regenerate tables computed that way.
    """
    if method == "uniroot":
        found = roots.uniroot_all(lambda s: model.pgf(s) - s, 0.0, 1.0)
        return min(found)
    if method != "bisect":
        raise ParameterDomainError(f"unknown method {method!r}")
    if not 0.0 < tol <= 1e-6:
        raise ParameterDomainError(f"tol must lie in (0, 1e-6], got {tol!r}")

    crit = classify(model)
    if not crit.supercritical:
        return 1.0

    # bisect the sign of (P(s) - s) / (1 - s); P(s) - s itself is rounding noise near s = 1
    if model.gap_ratio(BRACKET_TOP) >= 0.0:
        raise ConsistencyError(
            f"{model.label} has mean {crit.mean_offspring!r} > 1 but P(s) - s does not change sign "
            f"below s = {BRACKET_TOP!r}")
    root = roots.bisect(model.gap_ratio, 0.0, BRACKET_TOP)
    residual = abs(model.pgf(root) - root)
    if residual > tol:
        raise ConsistencyError(f"|P(s) - s| = {residual:.3g} exceeds tol {tol:g} at the bisection root")

    fp, err = _fixed_point(model)
    if abs(fp - root) > 1e-9 + err:
        raise ConsistencyError(f"bisection root {root!r} and fixed-point limit {fp!r} disagree")
    return root


@dataclass(frozen=True)
class ExtinctionCurve:
    """q_n = Pr(X_n = 0) for n = 1..N, with the limiting extinction probability."""

    q: np.ndarray
    limit: float
    model: OffspringModel

    @property
    def n_generations(self) -> int:
        return len(self.q)

    def at(self, generation: int) -> float:
        if not 1 <= generation <= len(self.q):
            raise ParameterDomainError(f"generation must lie in 1..{len(self.q)}, got {generation!r}")
        return float(self.q[generation - 1])


@dataclass(frozen=True)
class ExtinctionTimeDist:
    """Pr(T = n) for n = 1..N, where T is the generation at which extinction happens."""

    pt: np.ndarray
    cumulative: np.ndarray

    def at(self, generation: int) -> float:
        if not 1 <= generation <= len(self.pt):
            raise ParameterDomainError(f"generation must lie in 1..{len(self.pt)}, got {generation!r}")
        return float(self.pt[generation - 1])

    def total(self) -> float:
        # each difference is exact (q_{n-1} <= q_n <= 2 q_{n-1}), so fsum telescopes exactly
        return math.fsum(self.pt)


def _check_generations(n):
    if int(n) != n or n < 1:
        raise ParameterDomainError(f"number of generations must be a positive integer, got {n!r}")
    return int(n)


def extinction_curve(model: OffspringModel, n_generations: int) -> ExtinctionCurve:
    n_generations = _check_generations(n_generations)
    q = np.empty(n_generations)
    s = model.pgf(0.0)
    q[0] = s
    for n in range(1, n_generations):
        # the exact sequence is nondecreasing; rounding near the fixed point can dip by an ulp
        s = max(s, model.pgf(s))
        q[n] = s
    q.flags.writeable = False
    return ExtinctionCurve(q, extinction_probability(model, 1e-12), model)


def extinction_time_pmf(model: OffspringModel, n_generations: int) -> ExtinctionTimeDist:
    curve = extinction_curve(model, n_generations)
    pt = np.diff(curve.q, prepend=0.0)
    pt.flags.writeable = False
    return ExtinctionTimeDist(pt, curve.q)


@dataclass(frozen=True)
class GenerationTrace:
    sizes: tuple[int, ...]
    extinct: bool
    truncated: bool
    seed: int


def simulate_generations(model: OffspringModel, seed: int, max_generations: int,
                         population_cap: int = POPULATION_CAP, stream: int | None = None) -> GenerationTrace:
    """One Galton-Watson trajectory X_0 = 1, X_1, ...

    Stops at extinction, after ``max_generations`` generations, or as soon as a
    generation exceeds ``population_cap``; the last case is flagged ``truncated``.
    The offspring total of X_n parents is drawn through the multinomial class
    counts of X_n independent offspring draws.
    """
    max_generations = _check_generations(max_generations)
    if population_cap < 1:
        raise ParameterDomainError("population_cap must be positive")
    table = pmf_table(model)
    classes = np.arange(len(table.probs))
    rng = make_rng(seed, stream)
    sizes = [1]
    truncated = False
    for _ in range(max_generations):
        x = sizes[-1]
        if x == 0:
            break
        nxt = int(rng.multinomial(x, table.probs) @ classes)
        sizes.append(nxt)
        if nxt > population_cap:
            truncated = True
            break
    return GenerationTrace(tuple(sizes), sizes[-1] == 0, truncated, seed)


@dataclass(frozen=True)
class BatchResult:
    """Generation sizes of many traces; row i, column n is X_n of trace i.

    Entries after a trace exceeds the population cap are -1.
    """

    sizes: np.ndarray
    truncated: np.ndarray
    seed: int

    @property
    def n_traces(self) -> int:
        return self.sizes.shape[0]

    def extinct_by(self, generation: int) -> np.ndarray:
        return self.sizes[:, generation] == 0

    def extinct_fraction(self, generation: int | None = None) -> float:
        g = self.sizes.shape[1] - 1 if generation is None else generation
        return float(np.mean(self.extinct_by(g)))


def simulate_batch(model: OffspringModel, n_traces: int, max_generations: int, seed: int,
                   population_cap: int = POPULATION_CAP) -> BatchResult:
    """Vectorised version of :func:`simulate_generations` over ``n_traces`` traces."""
    max_generations = _check_generations(max_generations)
    if int(n_traces) != n_traces or n_traces < 1:
        raise ParameterDomainError("n_traces must be a positive integer")
    table = pmf_table(model)
    classes = np.arange(len(table.probs))
    rng = make_rng(seed)
    sizes = np.zeros((int(n_traces), max_generations + 1), dtype=np.int64)
    sizes[:, 0] = 1
    truncated = np.zeros(int(n_traces), dtype=bool)
    for g in range(max_generations):
        alive = sizes[:, g] > 0
        nxt = np.zeros(int(n_traces), dtype=np.int64)
        if alive.any():
            nxt[alive] = rng.multinomial(sizes[alive, g], table.probs) @ classes
        frozen = sizes[:, g] < 0
        nxt[frozen] = -1
        over = nxt > population_cap
        truncated |= over
        nxt[over] = -1
        sizes[:, g + 1] = nxt
    sizes.flags.writeable = False
    return BatchResult(sizes, truncated, seed)
