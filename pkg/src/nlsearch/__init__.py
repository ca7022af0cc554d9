"""Continuous-time search under nonlinear Schrodinger dynamics.

Reduced two-level and full-space integrators, closed-form runtimes and
peak widths, loglinear runtime bounds, symbolic scaling reports, and
power-law fits, all behind one CLI (``nlsearch``).
"""

from .analytics import (
    CubicQuinticCoefficients,
    RuntimeBounds,
    cq_runtime_closed,
    cubic_probability,
    cubic_quintic_coefficients,
    cubic_runtime,
    cubic_width_exact,
    exp_integral_e1,
    general_width_leading,
    log_bound_integrands,
    log_runtime_bounds,
    log_width_bound,
    runtime_quadrature,
)
from .dynamics import (
    FullState,
    PeakReport,
    ReducedState,
    Trajectory,
    integrate_full,
    integrate_reduced,
    measure_peak,
)
from .errors import ConvergenceError, DomainError, NoPeakError
from .model import (
    NonlinearEval,
    NonlinearityKind,
    SearchProblem,
    coupling_gap,
    critical_gamma,
    eval_at,
    nonlinearity_deriv,
    nonlinearity_eval,
)
from .quadrature import adaptive_quadrature
from .scaling import (
    Growth,
    PowerLawFit,
    ScalingQuery,
    ScalingReport,
    cq_scaling,
    cubic_scaling,
    fit_power_law,
    log_scaling,
    measured_cubic_fit,
    measured_loglinear_fit,
)
from .series import RunConfig, SeriesFile, eval_g_rule, eval_k_rule, read_series, write_series

__version__ = "0.1.0"

__all__ = [
    "ConvergenceError",
    "CubicQuinticCoefficients",
    "DomainError",
    "FullState",
    "Growth",
    "NoPeakError",
    "NonlinearEval",
    "NonlinearityKind",
    "PeakReport",
    "PowerLawFit",
    "ReducedState",
    "RunConfig",
    "RuntimeBounds",
    "ScalingQuery",
    "ScalingReport",
    "SearchProblem",
    "SeriesFile",
    "Trajectory",
    "adaptive_quadrature",
    "coupling_gap",
    "cq_runtime_closed",
    "cq_scaling",
    "critical_gamma",
    "cubic_probability",
    "cubic_quintic_coefficients",
    "cubic_runtime",
    "cubic_scaling",
    "cubic_width_exact",
    "eval_at",
    "eval_g_rule",
    "eval_k_rule",
    "exp_integral_e1",
    "fit_power_law",
    "general_width_leading",
    "integrate_full",
    "integrate_reduced",
    "log_bound_integrands",
    "log_runtime_bounds",
    "log_scaling",
    "log_width_bound",
    "measure_peak",
    "measured_cubic_fit",
    "measured_loglinear_fit",
    "nonlinearity_deriv",
    "nonlinearity_eval",
    "read_series",
    "runtime_quadrature",
    "write_series",
]
