"""Joint group graphical lasso: estimation, debiasing and inference across populations."""

from ._jointggl import (
    JointGGLError,
    PenaltyPair,
    SolveReport,
    SolverOptions,
    __version__,
    chain_precision,
    check_irrepresentability,
    confidence_interval,
    debias,
    diagnose,
    draw_mvn,
    kkt_residual,
    normal_cdf,
    normal_quantile,
    objective,
    prox_penalty,
    rate_delta,
    run_experiment,
    sample_covariance,
    solve,
    star_precision,
    test_edge,
    tune,
)


def fit(data, lam=None, rho=None, center=False, options=None):
    """Fit from raw observation matrices, one per population.

    Without penalties the constants are chosen by the e-BIC grid search.
    Returns (SolveReport, covariances, sample sizes).
    """
    covs, sizes = sample_covariance(list(data), center)
    opts = options if options is not None else SolverOptions()
    if lam is None or rho is None:
        best = tune(covs, sizes, options=opts)["best_penalty"]
        lam, rho = best["lambda"], best["rho"]
    return solve(covs, sizes, lam, rho, opts), covs, sizes


__all__ = [name for name in dir() if not name.startswith("_")]
