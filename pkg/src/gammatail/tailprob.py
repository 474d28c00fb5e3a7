"""Centered gamma tail probabilities and their integral-identity companions.

For a gamma variable X_a with shape a (unit rate), the central quantity is

    tail_prob(a, c) = P(X_a - a > c) = Q(a, a + c),

the probability that X_a exceeds its mean by more than c.  The companions
implement an equivalent representation used to reason about how tail_prob
moves with the shape: with f(x) = x e^(1-x) and u = a - 1,

    head_integral(u) = integral_0^1   f(x)^u e^(-(1+c)x) dx,
    tail_integral(u) = integral_1^inf f(x)^u e^(-(1+c)x) dx,

and tail_prob(a, c) = 1 / (1 + head_integral/tail_integral).  On the level
set f(x) = z the two preimage branches x1(z) <= 1 <= x2(z) give rise to the
integrand ratio r(z) and the direction form

    direction_form(z, c) = 1 - x1 x2 + c (1 - x1)(x2 - 1),

whose sign is opposite to the sign of dr/dz.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError
from .quadrature import integrate
from .specfun import (
    BranchRoots,
    DEFAULT_PRECISION,
    EPS,
    Precision,
    _log1pmx_vec,
    _log_gamma_norm,
    branch_root_deriv,
    reg_gamma_q_detail,
)

import numpy as np

_LOG_MAX = 709.0


@dataclass(frozen=True)
class TailQuery:
    """Shape and centering offset for a tail probability request."""

    a: float
    c: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.a) and math.isfinite(self.c)):
            raise DomainError("TailQuery requires finite a and c")
        if self.a <= 0.0:
            raise DomainError("TailQuery requires shape a > 0")


@dataclass(frozen=True)
class TailValue:
    """A tail probability with an error bound and the kernel that made it."""

    value: float
    err_bound: float
    method: str


@dataclass(frozen=True)
class RatioParts:
    """The two integrals splitting the tail identity at x = 1.

    head_integral covers (0, 1), tail_integral covers (1, inf), and
    ratio = head_integral / tail_integral; tail_prob(u + 1, c) equals
    1 / (1 + ratio).  The *_err fields are absolute error bounds.
    """

    u: float
    c: float
    head_integral: float
    tail_integral: float
    ratio: float
    head_err: float
    tail_err: float
    ratio_err: float

    def __post_init__(self) -> None:
        if not (self.head_integral > 0.0 and self.tail_integral > 0.0):
            raise DomainError("RatioParts requires positive integrals")


def tail_prob_detail(query: TailQuery) -> TailValue:
    """P(X_a - a > c) with an absolute error bound.

    Exactly 1 on the plateau a + c <= 0 (the variable always exceeds a
    negative threshold).  Otherwise Q(a, a + c), with the rounding of the
    argument a + c itself charged to the bound through the density.
    """
    a = query.a
    c = query.c
    x = a + c
    if x <= 0.0:
        return TailValue(1.0, 0.0, "plateau")
    detail = reg_gamma_q_detail(a, x)
    # |dQ/dx| = density(x); the argument x = a + c carries a half-ulp error.
    ln_density = _log_gamma_norm(a, x) - math.log(x)
    arg_err = 0.0
    if ln_density > -_LOG_MAX:
        arg_err = math.exp(ln_density) * (0.5 * EPS * abs(x))
    return TailValue(detail.value, detail.err_bound + arg_err, detail.method)


def tail_prob(query: TailQuery) -> float:
    """P(X_a - a > c), in [0, 1]; equals 1 exactly iff a + c <= 0."""
    return tail_prob_detail(query).value


def _two_sum(p: float, q: float) -> tuple[float, float]:
    s = p + q
    t = s - p
    return s, (p - (s - t)) + (q - t)


def tail_delta(a: float, c: float) -> tuple[float, float]:
    """tail_prob(a + 1, c) - tail_prob(a, c) with an error bound.

    The two probabilities are subtracted with a compensated difference, so
    the returned bound is dominated by the evaluation errors of the two
    terms, not by the subtraction; the difference is often far below the
    rounding of either term, and a bare float would be uninterpretable.
    """
    lo = tail_prob_detail(TailQuery(a, c))
    hi = tail_prob_detail(TailQuery(a + 1.0, c))
    diff, resid = _two_sum(hi.value, -lo.value)
    return diff + resid, hi.err_bound + lo.err_bound + abs(resid) * EPS


def _substitution_order(exponent_at_zero: float) -> int:
    """Power m for t = s^m so the transformed endpoint exponent is >= 3.

    The raw integrands behave like t^e at their singular endpoint; the
    substitution turns that into s^(m(e+1)-1), and an origin exponent of at
    least 3 keeps adaptive bisection converging at a healthy rate.
    """
    return max(4, math.ceil(4.0 / (exponent_at_zero + 1.0)))


def ratio_parts(u: float, c: float, *, rel_tol: float = 1e-10) -> RatioParts:
    """The split integrals of f(x)^u e^(-(1+c)x) and their ratio.

    Requires u > -1 (integrability at 0) and u + c > -1 (integrability at
    infinity; note c > -1 alone does not suffice when u < 0).  The head uses
    x = s^m; the tail maps (1, inf) to (0, 1] via x = 1 - ln t and then
    regularizes the endpoint with t = s^m, the order m chosen from the
    endpoint exponent in each case.
    """
    u = float(u)
    c = float(c)
    if not (math.isfinite(u) and math.isfinite(c)):
        raise DomainError("ratio_parts requires finite u and c")
    if u <= -1.0:
        raise DomainError("ratio_parts requires u > -1")
    if u + c <= -1.0:
        raise DomainError("ratio_parts requires u + c > -1 "
                          "(integrand not integrable at infinity)")

    m_head = _substitution_order(u)

    def head_fn(s: np.ndarray) -> np.ndarray:
        # x = s^m, d = x - 1.  In the bulk (d > -1/2) the exponent keeps the
        # accurate u*log1pmx(d) form.  Near s = 0, d collapses to -1 in
        # floating point, so the log is taken as m*ln s exactly instead:
        #   u*log1pmx(d) + (m-1)*ln s = (m(u+1)-1)*ln s - u*d.
        ln_s = np.log(s)
        w = m_head * ln_s
        d = np.expm1(w)
        x = np.where(d > -0.5, 1.0 + d, np.exp(w))
        d_safe = np.where(d > -0.5, d, 0.0)
        bulk = (u * _log1pmx_vec(d_safe) + (m_head - 1.0) * ln_s)
        deep = ((m_head * (u + 1.0) - 1.0) * ln_s - u * d)
        expo = (np.where(d > -0.5, bulk, deep)
                + math.log(m_head) - (1.0 + c) * x)
        return np.exp(expo)

    m_tail = _substitution_order(u + c)

    def tail_fn(s: np.ndarray) -> np.ndarray:
        # x = 1 - m*ln s, d = x - 1 >= 0.  For large d fold -u*d into the
        # ln s coefficient exactly: u*log1pmx(d) + (m(1+c)-1)*ln s
        # = u*log1p(d) + (m(u+c+1)-1)*ln s.
        ln_s = np.log(s)
        d = -m_tail * ln_s
        d_safe = np.where(d < 0.5, d, 0.0)
        bulk = (u * _log1pmx_vec(d_safe)
                + (m_tail * (1.0 + c) - 1.0) * ln_s)
        deep = (u * np.log1p(d)
                + (m_tail * (u + c + 1.0) - 1.0) * ln_s)
        expo = (np.where(d < 0.5, bulk, deep)
                + math.log(m_tail) - (1.0 + c))
        return np.exp(expo)

    head = integrate(head_fn, 0.0, 1.0, rel_tol=rel_tol)
    tail = integrate(tail_fn, 0.0, 1.0, rel_tol=rel_tol)
    ratio = head.value / tail.value
    ratio_err = (head.err_bound / tail.value
                 + ratio * tail.err_bound / tail.value)
    return RatioParts(u=u, c=c,
                      head_integral=head.value, tail_integral=tail.value,
                      ratio=ratio, head_err=head.err_bound,
                      tail_err=tail.err_bound, ratio_err=ratio_err)


def direction_form(roots: BranchRoots, c: float) -> float:
    """1 - x1 x2 + c (1 - x1)(x2 - 1): the sign of dr/dz is opposite to it."""
    c = float(c)
    if not math.isfinite(c):
        raise DomainError("direction_form requires finite c")
    return 1.0 - roots.x1 * roots.x2 + c * (1.0 - roots.x1) * (roots.x2 - 1.0)


def direction_form_detail(roots: BranchRoots, c: float,
                          prec: Precision = DEFAULT_PRECISION
                          ) -> tuple[float, float]:
    """direction_form with an error bound propagated from the root errors.

    Each root solves w e^w = v to a residual of a few eps, which maps to a
    root error of roughly eps * x / |1 - x|; that error is pushed through
    the partial derivatives of the form.
    """
    x1, x2 = roots.x1, roots.x2
    value = direction_form(roots, c)
    gap1 = max(1.0 - x1, prec.abs_tol)
    gap2 = max(x2 - 1.0, prec.abs_tol)
    err_x1 = 4.0 * EPS * x1 / gap1
    err_x2 = 4.0 * EPS * x2 / gap2
    d_dx1 = abs(-x2 - c * gap2)
    d_dx2 = abs(-x1 + c * gap1)
    scale = 1.0 + abs(x1 * x2) + abs(c) * gap1 * gap2
    err = d_dx1 * err_x1 + d_dx2 * err_x2 + 4.0 * EPS * scale
    return value, err


def integrand_ratio(roots: BranchRoots, c: float,
                    prec: Precision = DEFAULT_PRECISION) -> float:
    """r(z) = [x1' e^(-(1+c)x1)] / [-x2' e^(-(1+c)x2)] > 0.

    Evaluated in log space; values beyond the double range saturate to inf
    (r grows like e^((1+c)x2) for small z).
    """
    c = float(c)
    if not math.isfinite(c):
        raise DomainError("integrand_ratio requires finite c")
    d1 = branch_root_deriv(roots, 1, prec)
    d2 = branch_root_deriv(roots, 2, prec)
    ln_r = (math.log(d1) - math.log(-d2)
            + (1.0 + c) * (roots.x2 - roots.x1))
    if ln_r > _LOG_MAX:
        return math.inf
    return math.exp(ln_r)


def power_function(theta: float, c: float) -> float:
    """Power of the one-sided test rejecting when X_theta > theta + c.

    Defined for theta > 0 and c > 0; equals tail_prob(theta, c) and is
    increasing in theta with limit 1/2.
    """
    theta = float(theta)
    c = float(c)
    if not (math.isfinite(theta) and math.isfinite(c)):
        raise DomainError("power_function requires finite arguments")
    if theta <= 0.0:
        raise DomainError("power_function requires theta > 0")
    if c <= 0.0:
        raise DomainError("power_function requires c > 0")
    return tail_prob(TailQuery(theta, c))
