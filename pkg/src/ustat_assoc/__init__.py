"""U-statistics for stationary associated sequences.

Generators for moving-minimum and moving-sum sequences, Gini's mean
difference and general U-statistics, Hoeffding decomposition, block
estimation of the long-run scale, Vitali / Hardy-Krause variation on grids,
the lag-k joint distribution estimator, and a replication harness.
"""
from .errors import (
    InvalidArgumentError,
    RequiresOracleError,
    ResourceLimitError,
    UnsupportedOperationError,
)
from .generators import (
    SCHEMES,
    Family,
    GeneratorScheme,
    Sample,
    analytic_lag_cov,
    derive_seed,
    generate,
    marginal_theta,
    scheme_from_label,
)
from .jointdf import JointDFEstimate, joint_df_grid, joint_df_point
from .kernels import (
    EmpiricalMarginal,
    HDecomposition,
    Kernel2,
    Marginal,
    gini_kernel,
    h_decompose,
    rho1_empirical,
    rho1_exact,
)
from .montecarlo import (
    ReplicationSummary,
    clt_diagnostic,
    coverage_probability,
    run_table,
    summary_stats,
    sup_deviation_series,
)
from .ustat import UStatResult, gini_fast, h_projection_terms, u_stat_degree2, u_stat_general
from .variance import BlockEstimate, b_n, b_n_hat, block_length, sigma_u_hat
from .variation import (
    GridFunction,
    VariationReport,
    face_restriction,
    hk_variation,
    rect_increment,
    vitali_variation,
)

__version__ = "0.1.0"
