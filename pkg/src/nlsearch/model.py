"""Search instances and the three nonlinearities.

The state-dependent coupling gamma_c = (1/N)[1 + g(f_alpha - f_beta)] makes
the nonlinear evolution track the optimal linear algorithm with a rescaled
clock.  Everything downstream (dynamics, runtime quadrature, bounds) consumes
the instance through ``eval_at``/``coupling_gap``, so the per-site
probabilities x/k and (1-x)/(N-k) are computed in exactly one place.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DomainError


class NonlinearityKind(str, Enum):
    """The three self-potential shapes f(p)."""

    CUBIC = "cubic"            # f(p) = p
    CUBIC_QUINTIC = "cq"       # f(p) = p - p^2
    LOGLINEAR = "log"          # f(p) = log p


@dataclass(frozen=True)
class SearchProblem:
    """One search instance: N items, k marked, self-potential g*f."""

    N: int
    k: int
    g: float
    nonlinearity: NonlinearityKind = NonlinearityKind.CUBIC

    def __post_init__(self):
        object.__setattr__(self, "nonlinearity", NonlinearityKind(self.nonlinearity))
        if int(self.N) != self.N or int(self.k) != self.k:
            raise DomainError(f"N and k must be integers, got N={self.N!r}, k={self.k!r}")
        object.__setattr__(self, "N", int(self.N))
        object.__setattr__(self, "k", int(self.k))
        if self.N < 2:
            raise DomainError(f"need N >= 2, got N={self.N}")
        if not 1 <= self.k < self.N:
            raise DomainError(f"need 1 <= k < N, got k={self.k}, N={self.N}")
        g = float(self.g)
        if not math.isfinite(g) or g < 0.0:
            raise DomainError(f"need finite g >= 0, got g={self.g!r}")
        object.__setattr__(self, "g", g)

    @property
    def R(self) -> float:
        """The ratio N/k, the natural scale for loglinear results."""
        return self.N / self.k


@dataclass(frozen=True)
class NonlinearEval:
    """f and f' at the per-site marked and unmarked probabilities."""

    f_alpha: float
    f_beta: float
    fp_alpha: float
    fp_beta: float

    @property
    def gap(self) -> float:
        return self.f_alpha - self.f_beta


def nonlinearity_eval(kind: NonlinearityKind, p):
    """f(p) for the given kind.  Accepts scalars or arrays."""
    kind = NonlinearityKind(kind)
    p = np.asarray(p, dtype=float)
    if np.any(p < 0.0):
        raise DomainError("f(p) needs p >= 0")
    if kind is NonlinearityKind.CUBIC:
        out = p + 0.0
    elif kind is NonlinearityKind.CUBIC_QUINTIC:
        out = p - p * p
    else:
        if np.any(p <= 0.0):
            raise DomainError("log p needs p > 0")
        out = np.log(p)
    return out if out.ndim else float(out)


def nonlinearity_deriv(kind: NonlinearityKind, p):
    """f'(p): 1 for cubic, 1 - 2p for cubic-quintic, 1/p for loglinear."""
    kind = NonlinearityKind(kind)
    p = np.asarray(p, dtype=float)
    if np.any(p <= 0.0):
        raise DomainError("f'(p) needs p > 0")
    if kind is NonlinearityKind.CUBIC:
        out = np.ones_like(p)
    elif kind is NonlinearityKind.CUBIC_QUINTIC:
        out = 1.0 - 2.0 * p
    else:
        out = 1.0 / p
    return out if out.ndim else float(out)


def eval_at(problem: SearchProblem, x: float) -> NonlinearEval:
    """Evaluate f and f' at p_alpha = x/k and p_beta = (1-x)/(N-k).

    x = 0 and x = 1 are admitted only where f and f' stay finite, which
    rules out the loglinear kind at both endpoints.  The cubic and
    cubic-quintic derivatives are continued to p = 0 by their limits.
    """
    if not 0.0 <= x <= 1.0:
        raise DomainError(f"success probability x must lie in [0, 1], got {x}")
    N, k = problem.N, problem.k
    p_a = x / k
    p_b = (1.0 - x) / (N - k)
    kind = problem.nonlinearity
    if kind is NonlinearityKind.CUBIC:
        return NonlinearEval(p_a, p_b, 1.0, 1.0)
    if kind is NonlinearityKind.CUBIC_QUINTIC:
        return NonlinearEval(p_a - p_a * p_a, p_b - p_b * p_b,
                             1.0 - 2.0 * p_a, 1.0 - 2.0 * p_b)
    if p_a <= 0.0 or p_b <= 0.0:
        raise DomainError("loglinear f, f' are undefined at x in {0, 1}")
    return NonlinearEval(math.log(p_a), math.log(p_b), 1.0 / p_a, 1.0 / p_b)


def coupling_gap(problem: SearchProblem, x, one_minus_x=None):
    """f_alpha - f_beta as a vectorized function of x.

    ``one_minus_x`` may be passed separately when the caller knows 1 - x to
    better precision than the subtraction would give (the runtime quadrature
    substitutes x = k/N + (1 - k/N) sin^2(theta) and hands over the exact
    cos^2 complement).
    """
    N, k = problem.N, problem.k
    x = np.asarray(x, dtype=float)
    omx = 1.0 - x if one_minus_x is None else np.asarray(one_minus_x, dtype=float)
    p_a = x / k
    p_b = omx / (N - k)
    kind = problem.nonlinearity
    if kind is NonlinearityKind.CUBIC:
        out = p_a - p_b
    elif kind is NonlinearityKind.CUBIC_QUINTIC:
        # f(a) - f(b) = (a - b)(1 - (a + b)); factored to dodge cancellation
        out = (p_a - p_b) * (1.0 - (p_a + p_b))
    else:
        if np.any(p_a <= 0.0) or np.any(p_b <= 0.0):
            raise DomainError("loglinear gap needs 0 < x < 1")
        out = np.log(p_a / p_b)
    return out if np.ndim(out) else float(out)


def critical_gamma(problem: SearchProblem, x):
    """The state-dependent coupling (1/N)[1 + g(f_alpha - f_beta)].

    Along trajectories started from the uniform state the bracket stays
    >= 1; a nonpositive bracket means the requested (g, x) pair sits outside
    the physical regime and is rejected loudly.
    """
    N = problem.N
    if problem.g == 0.0:
        return np.full(np.shape(x), 1.0 / N) if np.ndim(x) else 1.0 / N
    bracket = 1.0 + problem.g * coupling_gap(problem, x)
    if np.any(np.asarray(bracket) <= 0.0):
        raise DomainError(
            f"non-physical regime: 1 + g(f_alpha - f_beta) <= 0 at x = {x}")
    return bracket / N
