"""Fitting the Janardan law to offspring frequency data.

The fit is a two-stage moment method. The zero indicator Z = 1{xi = 0} has
E Z = exp(-lam), so lam is matched to the observed zero fraction f_0 / n;
mu then follows from matching the mean with lam held at its estimate.
Log-likelihood and score evaluation are provided so the fit can be checked
against the likelihood surface; no likelihood maximiser is part of the API.
"""
from __future__ import annotations

import math
import sys
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateSampleError, ParameterDomainError, UnderflowClassError, ZeroClassError
from .frequency import FrequencyTable
from .offspring import Janardan, OffspringModel, _inverse_shift_mean, sample

# log of the smallest positive normal double; pmf values below it count as underflow
LOG_UNDERFLOW = math.log(sys.float_info.min)


@dataclass(frozen=True)
class Estimates:
    lambda_hat: float
    mu_hat: float
    sample_mean: float
    zero_fraction: float
    n: int

    @property
    def admissible(self) -> bool:
        return 0.0 < self.mu_hat < self.lambda_hat

    def model(self) -> Janardan:
        """The fitted law; raises ParameterDomainError when the estimate is inadmissible."""
        return Janardan(self.lambda_hat, self.mu_hat)


def repeated_moment_estimate(freq: FrequencyTable) -> Estimates:
    """lam_hat = log n - log f_0, then mu_hat = lam_hat (xbar - 1 + e^-lam_hat) / (e^-lam_hat + lam_hat - 1).

    An estimate outside 0 < mu_hat < lam_hat is returned as is, with
    ``admissible`` False.
    """
    return estimate_from_statistics(freq.n, freq.zero_count, freq.mean)


def estimate_from_statistics(n: int, f0: int, sample_mean: float) -> Estimates:
    """The same estimator from the summary statistics (n, f_0, xbar)."""
    if n < 1 or not 0 <= f0 <= n:
        raise ParameterDomainError(f"need 0 <= f_0 <= n with n >= 1, got n={n!r}, f_0={f0!r}")
    if f0 == 0:
        raise ZeroClassError("no zero-offspring observations: log f_0 is undefined, so lambda cannot be estimated")
    if f0 == n or sample_mean <= 0:
        raise DegenerateSampleError("all observations are zero (sample mean 0): the sample is degenerate")
    lam = math.log(n) - math.log(f0)
    e = f0 / n  # equals exp(-lam_hat)
    mu = lam * (sample_mean - 1.0 + e) / (e + lam - 1.0)
    return Estimates(lam, mu, float(sample_mean), e, n)


def poisson_mle(freq: FrequencyTable) -> float:
    return freq.mean


def log_likelihood(params: Janardan, freq: FrequencyTable) -> float:
    """sum_m f_m log p_m over the observed classes; -inf if an observed class underflows."""
    total = 0.0
    for m, f in freq.items():
        lp = params.logpmf(m)
        if lp < LOG_UNDERFLOW:
            return -math.inf
        total += f * lp
    return total


def score(params: Janardan, freq: FrequencyTable) -> tuple[float, float]:
    """Gradient of :func:`log_likelihood` in (lambda, mu).

    With y = lam - mu and E_m = E[1/(m+K)], K ~ Poisson(y), every class m >= 1 has
    log p_m = log lam + (m-1) log mu - mu - log (m-1)! + log E_m, and
    d E_m / dy = E_{m+1} - E_m. Hence

        d/dlam log p_m = 1/lam - 1 + E_{m+1}/E_m
        d/dmu  log p_m = (m-1)/mu - E_{m+1}/E_m

    while the zero class contributes -f_0 to the lambda component only.
    """
    lam, mu = params.lam, params.mu
    y = lam - mu
    d_lam = 0.0
    d_mu = 0.0
    for m, f in freq.items():
        if params.logpmf(m) < LOG_UNDERFLOW:
            raise UnderflowClassError(m)
        if m == 0:
            d_lam -= f
            continue
        ratio = _inverse_shift_mean(m + 1, y) / _inverse_shift_mean(m, y)
        d_lam += f * (1.0 / lam - 1.0 + ratio)
        d_mu += f * ((m - 1) / mu - ratio)
    return d_lam, d_mu


def grid_search(freq: FrequencyTable, lambdas, mus) -> tuple[float, float, float]:
    """Coarse maximiser of the log-likelihood over admissible grid points (mu < lambda).

    Returns ``(lambda, mu, loglik)``.
    """
    best = (math.nan, math.nan, -math.inf)
    for lam in lambdas:
        for mu in mus:
            if not 0 < mu < lam:
                continue
            ll = log_likelihood(Janardan(lam, mu), freq)
            if ll > best[2]:
                best = (float(lam), float(mu), ll)
    if not math.isfinite(best[2]):
        raise ParameterDomainError("grid contains no admissible point with finite likelihood")
    return best


def replicate_estimates(model: OffspringModel, n: int, replications: int, seed: int) -> np.ndarray:
    """Repeated-moment estimates for independent seeded samples.

    Replication i uses the stream derived from ``(seed, i)``. Returns an array
    of shape (replications, 2) holding (lambda_hat, mu_hat); samples that admit
    no estimate give NaN rows.
    """
    out = np.full((replications, 2), np.nan)
    for i in range(replications):
        try:
            est = repeated_moment_estimate(sample(model, n, seed, stream=i))
        except (ZeroClassError, DegenerateSampleError):
            continue
        out[i] = est.lambda_hat, est.mu_hat
    return out
