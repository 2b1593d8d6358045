import math
import random

import mpmath
import numpy as np
import pytest

from janardan_gw import (
    DegenerateSampleError,
    EstimationError,
    FrequencyTable,
    Janardan,
    ParameterDomainError,
    UnderflowClassError,
    ZeroClassError,
    estimate_from_statistics,
    janardan_pmf,
    log_likelihood,
    mean,
    poisson_mle,
    repeated_moment_estimate,
    sample,
    score,
    variance,
)
from janardan_gw.estimation import grid_search, replicate_estimates

ROWS = [(0.8, 0.4), (2.0, 1.9), (2.0, 1.0)]


def test_estimator_arithmetic():
    est = estimate_from_statistics(1000, 136, 1.4323)
    lam = math.log(1000 / 136)
    assert est.lambda_hat == pytest.approx(lam, rel=1e-15)
    assert est.lambda_hat == pytest.approx(1.99510, abs=5e-6)
    e = math.exp(-lam)
    assert est.mu_hat == pytest.approx(lam * (1.4323 - 1 + e) / (e + lam - 1), rel=1e-13)
    assert est.mu_hat == pytest.approx(1.0025, abs=1e-3)
    assert est.admissible
    assert est.model() == Janardan(est.lambda_hat, est.mu_hat)


def test_estimator_from_table_matches_statistics():
    freq = FrequencyTable((136, 464, 250, 100, 50))
    est = repeated_moment_estimate(freq)
    assert est == estimate_from_statistics(freq.n, freq.zero_count, freq.mean)
    assert est.zero_fraction == 0.136


def test_zero_class_error():
    with pytest.raises(ZeroClassError):
        repeated_moment_estimate(FrequencyTable((0, 5, 5)))
    assert issubclass(ZeroClassError, EstimationError)


def test_degenerate_sample_error():
    with pytest.raises(DegenerateSampleError, match="sample mean 0"):
        repeated_moment_estimate(FrequencyTable((1000,)))
    assert issubclass(DegenerateSampleError, ParameterDomainError)


def test_inadmissible_estimates_are_flagged_not_clamped():
    # xbar equal to 1 - e^-lam_hat gives mu_hat = 0
    est = estimate_from_statistics(4, 1, 0.75)
    assert est.mu_hat == 0.0 and not est.admissible
    # a heavy upper tail pushes mu_hat above lam_hat
    est = repeated_moment_estimate(FrequencyTable.from_counts({0: 50, 1: 10, 12: 40}))
    assert est.mu_hat > est.lambda_hat and not est.admissible
    with pytest.raises(ParameterDomainError):
        est.model()
    # integer data always has xbar >= 1 - f_0/n, so a negative mu_hat needs bare statistics
    assert repeated_moment_estimate(FrequencyTable((1, 3))).mu_hat == 0.0
    est = estimate_from_statistics(4, 1, 0.5)
    assert est.mu_hat < 0 and not est.admissible


def test_statistics_validation():
    with pytest.raises(ParameterDomainError):
        estimate_from_statistics(0, 0, 1.0)
    with pytest.raises(ParameterDomainError):
        estimate_from_statistics(10, 11, 1.0)


@pytest.mark.parametrize("lam,mu", ROWS)
def test_zero_class_identity(lam, mu):
    freq = sample(Janardan(lam, mu), 1000, seed=31)
    est = repeated_moment_estimate(freq)
    assert math.exp(-est.lambda_hat) == pytest.approx(freq.zero_count / freq.n, rel=1e-14)


def test_lambda_hat_ignores_nonzero_classes():
    a = FrequencyTable((40, 10, 30, 20))
    b = FrequencyTable((40, 20, 10, 30))
    c = FrequencyTable.from_counts({0: 40, 7: 60})
    assert repeated_moment_estimate(a).lambda_hat == repeated_moment_estimate(b).lambda_hat
    assert repeated_moment_estimate(a).lambda_hat == repeated_moment_estimate(c).lambda_hat


def test_lambda_hat_invariant_under_permutation_of_observations():
    obs = list(np.random.default_rng(5).integers(0, 6, 300))
    shuffled = obs[:]
    random.Random(1).shuffle(shuffled)
    a = repeated_moment_estimate(FrequencyTable.from_observations(obs))
    b = repeated_moment_estimate(FrequencyTable.from_observations(shuffled))
    assert a == b


def test_estimates_accurate_for_unit_mu():
    est = replicate_estimates(Janardan(2, 1), 1000, 200, seed=2024)
    within = (np.abs(est[:, 0] - 2) < 0.15) & (np.abs(est[:, 1] - 1) < 0.15)
    assert within.mean() >= 0.95


@pytest.mark.slow
@pytest.mark.parametrize("lam,mu", ROWS)
def test_estimator_consistency(lam, mu):
    small = replicate_estimates(Janardan(lam, mu), 1000, 200, seed=101)
    large = replicate_estimates(Janardan(lam, mu), 10_000, 200, seed=202)
    truth = np.array([lam, mu])
    mae_small = np.nanmean(np.abs(small - truth), axis=0)
    mae_large = np.nanmean(np.abs(large - truth), axis=0)
    assert np.all(mae_large < mae_small)


def test_log_likelihood_examples():
    assert log_likelihood(Janardan(2, 1), FrequencyTable((1,))) == pytest.approx(-2.0, abs=1e-15)
    assert log_likelihood(Janardan(0.3, 0.1), FrequencyTable((1,))) == pytest.approx(-0.3, abs=1e-15)
    p = Janardan(1, 0.5)
    expected = 2 * math.log(janardan_pmf(p, 0)) + 3 * math.log(janardan_pmf(p, 1))
    assert log_likelihood(p, FrequencyTable((2, 3))) == pytest.approx(expected, rel=1e-13)


def test_log_likelihood_underflow_is_minus_inf():
    freq = FrequencyTable.from_counts({0: 1, 400: 1})
    assert log_likelihood(Janardan(0.5, 0.1), freq) == -math.inf
    with pytest.raises(UnderflowClassError, match="400"):
        score(Janardan(0.5, 0.1), freq)


@pytest.mark.slow
def test_grid_argmax_near_truth():
    freq = sample(Janardan(2, 1.9), 10_000, seed=4242)
    lambdas = np.round(np.arange(1.5, 2.5001, 0.05), 10)
    mus = np.round(np.arange(0.05, 2.5001, 0.05), 10)
    lam, mu, _ = grid_search(freq, lambdas, mus)
    assert abs(lam - 2.0) <= 0.05 + 1e-9
    assert abs(mu - 1.9) <= 0.05 + 1e-9
    # stationarity at the interior optimum, per observation
    d_lam, d_mu = score(Janardan(lam, mu), freq)
    assert abs(d_lam) / freq.n <= 0.5 and abs(d_mu) / freq.n <= 0.5


def test_grid_search_rejects_empty_grid():
    with pytest.raises(ParameterDomainError):
        grid_search(FrequencyTable((3, 2)), [1.0], [2.0])


def test_score_zero_only_sample():
    assert score(Janardan(2, 1), FrequencyTable((1,))) == (-1.0, 0.0)


def _rel(a, b):
    return abs(a - b) / max(abs(b), 1.0)


def _random_cases(k, seed):
    rng = np.random.default_rng(seed)
    cases = []
    for i in range(k):
        lam = float(rng.uniform(0.3, 6.0))
        mu = float(rng.uniform(0.05, 0.95)) * lam
        freq = sample(Janardan(lam, mu), int(rng.integers(20, 400)), seed=seed, stream=i)
        cases.append((Janardan(lam, mu), freq))
    return cases


@pytest.mark.parametrize("params,freq", _random_cases(20, 8080))
def test_score_matches_finite_differences(params, freq):
    h = 1e-6
    lam, mu = params.lam, params.mu
    fd_lam = (log_likelihood(Janardan(lam + h, mu), freq) - log_likelihood(Janardan(lam - h, mu), freq)) / (2 * h)
    fd_mu = (log_likelihood(Janardan(lam, mu + h), freq) - log_likelihood(Janardan(lam, mu - h), freq)) / (2 * h)
    d_lam, d_mu = score(params, freq)
    assert _rel(d_lam, fd_lam) <= 1e-5
    assert _rel(d_mu, fd_mu) <= 1e-5


def _closed_form_loglik(lam, mu, freq):
    """sum f_m log p_m with the closed-form pmf, in high precision."""
    total = mpmath.mpf(0)
    for m, f in freq.items():
        if m == 0:
            total += -f * lam
            continue
        d = mu - lam
        bracket = mpmath.exp(-lam) - mpmath.exp(-mu) * mpmath.fsum(d**j / mpmath.factorial(j) for j in range(m))
        total += f * mpmath.log(lam * mu ** (m - 1) / d**m * bracket)
    return total


@pytest.mark.parametrize("params,freq", _random_cases(6, 99))
def test_score_matches_high_precision_derivative(params, freq):
    with mpmath.workdps(80):
        lam, mu = mpmath.mpf(params.lam), mpmath.mpf(params.mu)
        d_lam = mpmath.diff(lambda x: _closed_form_loglik(x, mu, freq), lam)
        d_mu = mpmath.diff(lambda x: _closed_form_loglik(lam, x, freq), mu)
    got = score(params, freq)
    assert got[0] == pytest.approx(float(d_lam), rel=1e-10, abs=1e-9)
    assert got[1] == pytest.approx(float(d_mu), rel=1e-10, abs=1e-9)


def test_poisson_mle_examples():
    assert poisson_mle(FrequencyTable((5,))) == 0
    assert poisson_mle(FrequencyTable((0, 10))) == 1
    assert poisson_mle(FrequencyTable((1, 1, 1))) == 1


def test_poisson_mle_band():
    model = Janardan(2, 1.9)
    x = poisson_mle(sample(model, 1000, seed=1948))
    sigma = math.sqrt(variance(model) / 1000)
    assert abs(x - mean(model)) <= 3 * sigma
