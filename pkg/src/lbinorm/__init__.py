"""Locally best invariant tests of normality.

Univariate and multivariate fourth-moment-type statistics with exact
quadrature, closed polynomial forms, Laplace and Monte-Carlo variants,
a stable-family score by Fourier inversion, and deterministic
Monte-Carlo calibration of critical values and power.
"""

from .calibration import (
    AlternativeSpec,
    NullCalibration,
    StatisticSpec,
    calibrate_null,
    make_statistic,
    p_value,
    power_curve,
    sample_alternative,
)
from .core import (
    coefficient_c,
    hermite,
    null_denominator_constant,
    standardize,
    standardized_moment,
)
from .multivariate import moment_R, moment_S, stat_gl, stat_lt, whiten, wishart_moment_check
from .scores import (
    ScoreFunction,
    orthogonalize,
    score_contamination,
    score_gh_limit,
    score_hermite,
    score_infinitely_divisible,
)
from .stable import InversionConfig, dcf_dalpha_at_2, score_stable, stable_cf, stable_density_derivative
from .univariate import (
    LbiStatistic,
    QuadratureConfig,
    kurtosis,
    lbi_closed_form,
    lbi_exact,
    lbi_laplace,
    lbi_monte_carlo,
    profile_likelihood_statistic,
    skewness,
)

__version__ = "0.1.0"
