"""mominq: moment-gap functionals of discrete probability laws, their
convexity and log-convexity refinement inequalities, exact rational
certification, divergence bounds, and randomized conjecture search."""

from .ddouble import DD
from .measures import (
    DistributionPair,
    FiniteDistribution,
    KLBoundsReport,
    PairLawKind,
    csiszar,
    divergence,
    kl_bounds,
    law_from_pair,
    load_distribution,
    make_distribution,
    pair_of,
    symmetric_measures,
    theorem8_residuals,
)
from .exact import (
    ExactVerdict,
    RationalLaw,
    Sign,
    certify,
    exact_lambda,
    exact_phi,
    exact_power_moment,
    exact_xi,
    make_rational_law,
)
from .forms import (
    CHECK_IDS,
    FormParams,
    Lemma3Verdict,
    ResidualReport,
    check_inequality,
    lemma3_criterion,
    mu,
    phi,
    psi_form,
    sigma,
    tau,
    theta,
    w_form,
    xi,
)
from .laws import (
    Branch,
    DiscreteLaw,
    LogMomentCache,
    OrderParam,
    branch_of,
    f_pointwise,
    lambda_,
    load_law,
    log_moments,
    make_law,
    merge_atoms,
    power_moment,
)
from .search import (
    FuzzReport,
    ReductionReport,
    SamplerConfig,
    fuzz,
    reduction_crosscheck,
    run_suite,
)

__version__ = "0.1.0"

__all__ = [
    "DD",
    "DistributionPair",
    "FiniteDistribution",
    "KLBoundsReport",
    "PairLawKind",
    "csiszar",
    "divergence",
    "kl_bounds",
    "law_from_pair",
    "load_distribution",
    "make_distribution",
    "pair_of",
    "symmetric_measures",
    "theorem8_residuals",
    "ExactVerdict",
    "RationalLaw",
    "Sign",
    "certify",
    "exact_lambda",
    "exact_phi",
    "exact_power_moment",
    "exact_xi",
    "make_rational_law",
    "CHECK_IDS",
    "FormParams",
    "Lemma3Verdict",
    "ResidualReport",
    "check_inequality",
    "lemma3_criterion",
    "mu",
    "phi",
    "psi_form",
    "sigma",
    "tau",
    "theta",
    "w_form",
    "xi",
    "Branch",
    "DiscreteLaw",
    "LogMomentCache",
    "OrderParam",
    "branch_of",
    "f_pointwise",
    "lambda_",
    "load_law",
    "log_moments",
    "make_law",
    "merge_atoms",
    "power_moment",
    "FuzzReport",
    "ReductionReport",
    "SamplerConfig",
    "fuzz",
    "reduction_crosscheck",
    "run_suite",
    "__version__",
]
