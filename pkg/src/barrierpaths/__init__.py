"""Nondecreasing integer sequences below a barrier: exact counts, generating
function identities, and the random walk that reads them as probabilities."""

__version__ = "0.1.0"

from .barrier import (
    Barrier,
    BarrierSpecError,
    Constant,
    Explicit,
    GrowthRate,
    Linear,
    LinearSqrt,
    format_barrier_spec,
    growth_rate,
    parse_barrier_spec,
    prefix,
)
from .counting import (
    binomial,
    dp_counts,
    dp_f,
    kreweras_determinant,
    proctor_closed_form,
    recurrence_counts,
    resolve_determinant_convention,
    two_barrier_dp,
)
from .series import (
    TruncatedSeries,
    gf_identity_residual,
    kernel_identity_check,
    lagrange_coefficient,
    solve_fixed_point_series,
)
from .walk import (
    WalkConfig,
    classify_equality,
    escape_probability_estimate,
    exit_distribution,
    simulate_walk,
    truncated_weight_sum,
    weight,
)
from ._kernels import BACKEND as KERNEL_BACKEND
