"""Break-point detection in the cross-sectional mean of panel data.

Weighted-regression estimation of the mean long-run variance, centered
CUSUM-square test processes, simulated asymptotic critical values, a
change-adjusted variance estimator, and a factor-model wild bootstrap for
cross-sectionally dependent panels.
"""

from .panel import (
    BreakSpec,
    PanelDimensionError,
    PanelFormatError,
    PanelMatrix,
    column_means,
    load_panel,
    save_panel,
)
from .dgp import (
    ErrorModel,
    FactorSpec,
    add_factors,
    gen_errors,
    inject_break,
    strong_loadings,
    uniform_break_spec,
    weak_loadings,
)
from .cusum import cusum, cusum_matrix, cusum_squares_mean, g, m_grid
from .estimators import (
    OLS,
    POINT_TAU,
    WLS,
    VarianceEstimate,
    WeightScheme,
    check_sigma,
    check_sigma_grid,
    delta_hat,
    estimate_variances,
    kappa_hat,
    make_weights,
    sigma_hat,
)
from .teststat import (
    DegenerateDataError,
    TestOutcome,
    TestProcess,
    batch_statistics,
    check_v_process,
    check_v_statistic,
    compute_statistic,
    integral_stat,
    run_test,
    sup_stat,
    v_process,
)
from .limitdist import (
    CritTable,
    LimitKernel,
    build_crit_table,
    critical_value,
    dh_closed,
    dh_finite,
    load_or_build_crit_table,
    simulate_sup_distribution,
)
from .bootstrap import (
    FactorFit,
    bootstrap_pvalue,
    bootstrap_statistics,
    estimate_factors,
    gen_multipliers,
    longrun_cov,
)
from .harness import (
    ExperimentConfig,
    RejectionTable,
    TestSpec,
    emit_outputs,
    run_experiment,
)

__version__ = "0.1.0"
