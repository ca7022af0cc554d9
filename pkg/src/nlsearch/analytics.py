"""Closed forms, quadratures, and bounds for runtimes and peak widths.

Everything is double precision.  The cubic-quintic closed form is written
against cancellation-safe rearrangements (the naive textbook grouping
loses digits through sqrt(Delta) - b and xi + sqrt(Delta)(k - N) when b
dominates); the loglinear bounds follow the piecewise split of the runtime
integral at x = 1/2 with the logarithm replaced by its chord below the
midpoint and its tangent above.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .model import NonlinearityKind, SearchProblem, coupling_gap, eval_at
from .quadrature import adaptive_quadrature

_EULER_GAMMA = 0.57721566490153286061


def _require(problem: SearchProblem, kind: NonlinearityKind, what: str):
    if problem.nonlinearity is not kind:
        raise DomainError(
            f"{what} applies to the {kind.value} kind, got {problem.nonlinearity.value}")


# ---------------------------------------------------------------- cubic

def cubic_runtime(problem: SearchProblem) -> float:
    """First time the cubic success probability reaches 1.

    t_* = pi sqrt(N) / (2 sqrt(k + g)): the nonlinearity acts exactly like
    g extra marked states.
    """
    _require(problem, NonlinearityKind.CUBIC, "cubic_runtime")
    N, k, g = problem.N, problem.k, problem.g
    return math.pi * math.sqrt(N) / (2.0 * math.sqrt(k + g))


def cubic_probability(problem: SearchProblem, t):
    """Closed-form x(t) for the cubic kind, periodic with period 2 t_*.

    Written as a ratio of sin^2/cos^2 mixtures so it stays in [k/N, 1]
    without cancellation for any t.
    """
    _require(problem, NonlinearityKind.CUBIC, "cubic_probability")
    N, k, g = problem.N, problem.k, problem.g
    s = math.sqrt((k + g) / N) * np.asarray(t, dtype=float)
    sn2 = np.sin(s) ** 2
    cs2 = np.cos(s) ** 2
    out = k * (N * sn2 + (k + g) * cs2) / (k * N * sn2 + N * (k + g) * cs2)
    return out if out.ndim else float(out)


def cubic_width_exact(problem: SearchProblem, epsilon: float) -> float:
    """Exact duration the cubic peak spends above height 1 - epsilon."""
    _require(problem, NonlinearityKind.CUBIC, "cubic_width_exact")
    N, k, g = problem.N, problem.k, problem.g
    if not 0.0 <= epsilon < 1.0 - k / N:
        raise DomainError(f"need 0 <= epsilon < 1 - k/N, got {epsilon}")
    arg = (math.sqrt(N * k) * math.sqrt(epsilon)
           / (math.sqrt(k + g) * math.sqrt(N * (1.0 - epsilon) - k)))
    return 2.0 * math.sqrt(N / (k + g)) * math.atan(arg)


def general_width_leading(problem: SearchProblem, epsilon: float) -> float:
    """Leading-order peak width 2N sqrt(eps/(k(N-k))) / (1 + g*gap(x=1)).

    Valid whenever f is finite at both per-site endpoint probabilities, so
    the loglinear kind is rejected (its width is covered by the Taylor
    bound in log_width_bound instead).  The gap at x = 1 is 1/k for cubic
    and (k-1)/k^2 for cubic-quintic, which is why the cubic-quintic width
    at k = 1 loses its g dependence entirely.
    """
    if problem.nonlinearity is NonlinearityKind.LOGLINEAR:
        raise DomainError(
            "loglinear width has no finite leading-order formula "
            "(the peak curvature diverges); use log_width_bound")
    if not 0.0 <= epsilon < 1.0:
        raise DomainError(f"need 0 <= epsilon < 1, got {epsilon}")
    N, k, g = problem.N, problem.k, problem.g
    ev = eval_at(problem, 1.0)
    return 2.0 * N * math.sqrt(epsilon / (k * (N - k))) / (1.0 + g * ev.gap)


# ----------------------------------------------------------- quadrature

def runtime_quadrature(problem: SearchProblem, rel_tol: float = 1e-9) -> float:
    """Runtime by direct quadrature of the velocity law.

    The substitution x = k/N + (1 - k/N) sin^2(theta) absorbs both
    square-root endpoint singularities exactly, leaving

        t_* = sqrt(N/k) * integral_0^{pi/2} dtheta / (1 + g (f_alpha - f_beta))

    with a smooth integrand on the open interval (the quadrature rule never
    touches the endpoints, so the loglinear kind is safe too).
    """
    N, k, g = problem.N, problem.k, problem.g
    frac = 1.0 - k / N

    def integrand(theta):
        sn2 = np.sin(theta) ** 2
        cs2 = np.cos(theta) ** 2
        x = k / N + frac * sn2
        gap = coupling_gap(problem, x, frac * cs2)
        return 1.0 / (1.0 + g * gap)

    val, _ = adaptive_quadrature(integrand, 0.0, math.pi / 2.0, rel_tol=rel_tol)
    return math.sqrt(N / k) * val


# ---------------------------------------------------------- cubic-quintic

@dataclass(frozen=True)
class CubicQuinticCoefficients:
    """The denominator quadratic a x^2 + b x + c and its resolvent pieces.

    (1 + g*gap(x)) * k^2 (N-k)^2 = a x^2 + b x + c, so the runtime integral
    reduces to dx / [(quadratic) sqrt((1-x)(Nx-k))], which has an arctan-free
    two-term closed form in Delta, Sigma, xi.
    """

    a: float
    b: float
    c: float
    delta: float    # b^2 - 4ac
    sigma: float    # a + b + c = (N-k)^2 (k^2 + g(k-1)), exactly
    xi: float       # 2ak + 2cN + b(k + N)


def cubic_quintic_coefficients(problem: SearchProblem) -> CubicQuinticCoefficients:
    _require(problem, NonlinearityKind.CUBIC_QUINTIC, "cubic_quintic_coefficients")
    N, k, g = problem.N, problem.k, problem.g
    a = -g * N * (N - 2 * k)
    b = g * k * (N * N - k * N - 2 * k)
    c = -g * k * k * (N - k - 1) + float(k * k * (N - k) ** 2)
    delta = b * b - 4.0 * a * c
    sigma = float((N - k) ** 2) * (k * k + g * (k - 1))
    xi = 2.0 * a * k + 2.0 * c * N + b * (k + N)
    return CubicQuinticCoefficients(a=a, b=b, c=c, delta=delta, sigma=sigma, xi=xi)


def cq_runtime_closed(problem: SearchProblem) -> float:
    """Closed-form cubic-quintic runtime for N > 2k, g > 0.

    Evaluated through cancellation-safe subexpressions:
      q       = -4ac / (sqrt(Delta) + b)            [= sqrt(Delta) - b]
      A_plus  = 2(a + b) + q, with a + b expanded exactly in g
      R_plus  = 2ak + 2cN + 2bk + q(k - N)          [= xi + sqrt(Delta)(k - N)]
    The naive groupings subtract nearly equal quantities once b dominates
    sqrt(-4ac); a warning fires if they disagree materially, as a canary
    for parameter ranges outside the tested envelope.
    """
    _require(problem, NonlinearityKind.CUBIC_QUINTIC, "cq_runtime_closed")
    N, k, g = problem.N, problem.k, problem.g
    if N <= 2 * k:
        raise DomainError(f"closed form needs N > 2k, got N={N}, k={k}")
    if not g > 0.0:
        raise DomainError("closed form needs g > 0; use runtime_quadrature at g = 0")
    co = cubic_quintic_coefficients(problem)
    a, b, c = co.a, co.b, co.c
    if co.delta <= 0.0 or co.sigma <= 0.0:
        raise DomainError(f"closed form outside its regime: Delta={co.delta}, Sigma={co.sigma}")
    sqrt_delta = math.sqrt(co.delta)
    q = -4.0 * a * c / (sqrt_delta + b)
    sum_ab = g * ((k - 1) * N * N + k * (2 - k) * N - 2 * k * k)
    a_plus = 2.0 * sum_ab + q
    a_minus = -2.0 * a + q
    r_plus = 2.0 * a * k + 2.0 * c * N + 2.0 * b * k + q * (k - N)
    r_minus = co.xi - sqrt_delta * (k - N)
    r_plus_naive = co.xi + sqrt_delta * (k - N)
    if abs(r_plus_naive - r_plus) > 1e-6 * abs(r_plus):
        warnings.warn(
            "cubic-quintic closed form: naive and safe groupings disagree "
            f"by {abs(r_plus_naive - r_plus) / abs(r_plus):.2e} relative; "
            "treat trailing digits with suspicion", RuntimeWarning)
    if r_plus <= 0.0 or r_minus <= 0.0:
        raise DomainError(
            f"closed form outside its regime: R+={r_plus}, R-={r_minus}")
    prefactor = (math.pi / 2.0) * (N * k * k * (N - k) ** 2 / (2.0 * math.sqrt(k))) \
        * math.sqrt(2.0) / (math.sqrt(co.sigma) * sqrt_delta)
    return prefactor * (a_plus / math.sqrt(r_plus) + a_minus / math.sqrt(r_minus))


# ------------------------------------------------------------- loglinear

@dataclass(frozen=True)
class RuntimeBounds:
    """Analytic envelope for the loglinear runtime."""

    lower: float
    upper: float        # tight: chord/tangent replacement of the logarithm
    upper_loose: float  # coarse: drops the rescaling below x = 1/2


def _log_bound_context(problem: SearchProblem, what: str):
    _require(problem, NonlinearityKind.LOGLINEAR, what)
    N, k, g = problem.N, problem.k, problem.g
    if N <= 2 * k:
        raise DomainError(f"{what} needs N > 2k, got N={N}, k={k}")
    if not g > 0.0:
        raise DomainError(f"{what} needs g > 0")
    return N, k, g, math.log((N - k) / k)


def log_runtime_bounds(problem: SearchProblem) -> RuntimeBounds:
    """Lower and upper closed-form bounds on the loglinear runtime.

    The lower bound can go negative at small g (it subtracts a logarithmic
    correction from the dominant term); it is reported raw, since a negative
    lower bound is merely uninformative, not wrong.
    """
    N, k, g, L = _log_bound_context(problem, "log_runtime_bounds")
    pref = N / (2.0 * math.sqrt(k))
    lower = pref / math.sqrt(N - k) * (
        math.sqrt(2.0 * (N - 2 * k) / N) / (1.0 + g * L)
        - math.log(1.0 + 2.0 * g / (1.0 + g * math.log(2.0 * (N - k) / k)))
        / (math.sqrt(2.0) * g))
    upper_loose = pref * (2.0 * math.sqrt(N - 2 * k) / N
                          + 2.0 / (math.sqrt(N - 2 * k) * (1.0 + g * L)))
    d = N - 2 * k + 2.0 * g * (N - k) * L
    t1 = -2.0 * math.sqrt(N - 2 * k) / (math.sqrt(N) * math.sqrt(d)) \
        * math.atan(math.sqrt(N) / math.sqrt(d))
    t2 = math.pi / (math.sqrt(N - k) * math.sqrt(N)) \
        * math.sqrt((N * N - 3.0 * k * N + 2.0 * k * k) / d)
    w = 4.0 * g * k + N - 2.0 * g * N + g * N * L
    root_tan = math.sqrt(1.0 + 2.0 * g + g * L)
    t3 = 2.0 * math.atan(math.sqrt(w) / (math.sqrt(N - 2 * k) * root_tan)) \
        / (root_tan * math.sqrt(w))
    return RuntimeBounds(lower=lower, upper=pref * (t1 + t2 + t3),
                         upper_loose=upper_loose)


def log_width_bound(problem: SearchProblem, epsilon: float) -> float:
    """Taylor lower bound on the loglinear peak width at height 1 - epsilon.

    delta_t = sqrt(eps N / k) / (g log(N/(k eps))): the double root of the
    quadratic in the displacement D (D^2 - 2 sqrt(eps) D + eps = 0 gives
    D = sqrt(eps)) carries the sqrt(eps) into the numerator.
    """
    _require(problem, NonlinearityKind.LOGLINEAR, "log_width_bound")
    N, k, g = problem.N, problem.k, problem.g
    if not 0.0 < epsilon < 1.0:
        raise DomainError(f"need 0 < epsilon < 1, got {epsilon}")
    if not g > 0.0:
        raise DomainError("log_width_bound needs g > 0")
    return math.sqrt(epsilon * N / k) / (g * math.log(N / (k * epsilon)))


def log_bound_integrands(problem: SearchProblem, x):
    """Pointwise integrands of the loglinear runtime and its bounds.

    Over an x-grid strictly inside (k/N, 1), returns a dict of arrays:
    the original integrand 1/[(1 + g*gap) sqrt((1-x)(Nx-k))], the lower and
    two upper replacements (each assembled piecewise at x = 1/2), and the
    two logarithm curves behind the tight upper bound (the chord through
    the piece endpoints below 1/2, the tangent at 1/2 above; both sit under
    the true logarithm, which is what makes that bound an upper one).
    """
    N, k, g, L = _log_bound_context(problem, "log_bound_integrands")
    x = np.asarray(x, dtype=float)
    if np.any(x <= k / N) or np.any(x >= 1.0):
        raise DomainError("grid must lie strictly inside (k/N, 1)")
    omx = 1.0 - x
    root = np.sqrt(omx * (N * x - k))
    gap = np.log(x * (N - k) / (k * omx))
    original = 1.0 / ((1.0 + g * gap) * root)
    low = np.where(
        x <= 0.5,
        1.0 / ((1.0 + g * L) * np.sqrt((1.0 - k / N) * (N * x - k))),
        1.0 / ((1.0 + g * np.log((N - k) / (k * omx))) * np.sqrt(omx * (N - k))))
    loose = np.where(
        x <= 0.5,
        np.sqrt(2.0 / (N * x - k)),
        1.0 / ((1.0 + g * L) * np.sqrt(omx * (N / 2.0 - k))))
    log_bound = np.where(
        x <= 0.5,
        2.0 * L * (N * x - k) / (N - 2 * k),
        L + 4.0 * (x - 0.5))
    tight = 1.0 / ((1.0 + g * log_bound) * root)
    return {
        "original": original,
        "lower": low,
        "upper_tight": tight,
        "upper_loose": loose,
        "log_original": gap,
        "log_bound": log_bound,
    }


# ------------------------------------------------------ special function

def exp_integral_e1(x: float) -> float:
    """E1(x) = integral_x^inf e^{-t}/t dt for x > 0.

    Alternating power series up to x = 1, modified-Lentz continued fraction
    beyond; both land at double precision well inside their windows and the
    seam at x = 1 agrees to ~1e-15.
    """
    x = float(x)
    if not x > 0.0:
        raise DomainError(f"E1(x) needs x > 0, got {x}")
    if x <= 1.0:
        total = 0.0
        term = 1.0
        for n in range(1, 80):
            term *= x / n
            contrib = term / n
            total += contrib if n % 2 == 1 else -contrib
            if contrib < 1e-18 * abs(total):
                break
        return total - _EULER_GAMMA - math.log(x)
    tiny = 1e-300
    b = x + 1.0
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for n in range(1, 500):
        an = -float(n * n)
        b += 2.0
        den = an * d + b
        if den == 0.0:
            den = tiny
        c = b + an / c
        if c == 0.0:
            c = tiny
        d = 1.0 / den
        delta = c * d
        h *= delta
        if abs(delta - 1.0) < 1e-16:
            break
    return math.exp(-x) * h
