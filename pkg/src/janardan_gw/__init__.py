"""Galton-Watson branching processes with Janardan (perturbed Poisson) offspring."""
from .branching import (
    Criticality,
    ExtinctionCurve,
    ExtinctionTimeDist,
    GenerationTrace,
    Regime,
    classify,
    critical_mu,
    extinction_curve,
    extinction_probability,
    extinction_time_pmf,
    simulate_batch,
    simulate_generations,
)
from .errors import (
    BranchingError,
    ConsistencyError,
    ConvergenceError,
    DegenerateSampleError,
    EstimationError,
    ParameterDomainError,
    UnderflowClassError,
    ZeroClassError,
)
from .estimation import (
    Estimates,
    estimate_from_statistics,
    log_likelihood,
    poisson_mle,
    repeated_moment_estimate,
    score,
)
from .frequency import FrequencyTable
from .offspring import (
    Bernoulli,
    Janardan,
    JanardanParams,
    OffspringModel,
    PmfTable,
    Poisson,
    janardan_pmf,
    mean,
    pgf,
    pmf_table,
    sample,
    sample_observations,
    variance,
)

__version__ = "0.1.0"
