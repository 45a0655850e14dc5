"""Numerics for the generalized Rosenblatt process and its boundary limits."""

__version__ = "0.1.0"

from .core import (
    BoundaryKind,
    BoundaryTarget,
    ExponentPair,
    LinearCombo,
    classify_boundary,
    cross_covariance,
    mu2_raw,
    mu3,
    normalization_A,
)
from .cumulants import (
    CircularExponents,
    Finiteness,
    QuadratureResult,
    SigmaWord,
    C_m,
    domain_check,
    f_ab_asymptotic_check,
    f_circular,
    kappa_m,
    power_counting_check,
    sigma_word_count,
)
from .empirics import SampleStats, empirical_cf, k_statistics, loglog_slope, wasserstein1
from .errors import (
    BudgetError,
    ConvergenceWarning,
    DomainError,
    NormalizationWarning,
    RangeError,
    RosenblattError,
    SizeError,
)
from .limit_laws import (
    LawKind,
    LimitLaw,
    cf_product_normal,
    dw_bound_edge,
    kappa_limit,
    kappa_limit_cornerX,
    kappa_limit_cornerY,
    kappa_limit_edge,
    m_statistic,
    rate_corner,
    rate_diag,
    sample_fbm,
    sample_limit,
)
from .paths import PathEnsemble
from .simulator import LatticeConfig, gen_linear_pair, lattice_cumulants, simulate_paths
from .special_functions import beta_fn, log_beta, log_gamma, power_tail_sum
