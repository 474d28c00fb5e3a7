"""Double-precision special-function kernels.

Provides the regularized incomplete gamma pair by a lower ascending series, a
modified-Lentz continued fraction, and a small-shape complement series, all
behind a cancellation-safe log-space prefactor; Lambert W on both real
branches with a branch-point expansion; the unit-peak map x*exp(1-x) and its
two inverse branches with analytic derivatives; the logarithmic mean; the
threshold ratio with an exact near-diagonal Taylor branch; and the refined
geometric mean.  All operations validate their domains, are pure, and are
deterministic.  Error bounds returned by the *_detail variants follow a
rounding model calibrated against the independent quadrature oracle:
(2*|log prefactor| + 2*iterations + 32) units of eps, relative.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._series import LAMBDA_EXCESS, eval_series
from .errors import DomainError

EPS = 2.220446049250313e-16
_TWO_PI = 2.0 * math.pi
_INV_E = 1.0 / math.e

# Ascending series / continued fraction split, and the shape size below which
# the tail is summed directly to avoid forming 1 - P for a tiny result.
_SMALL_SHAPE = 0.5
_KERNEL_MAX_ITER = 100_000

# Stirling correction phi(a) with lnGamma(a) = (a-1/2)ln a - a + ln(2*pi)/2
# + phi(a); the six-term tail is below 1e-20 for a >= 24.
_STIRLING_MIN = 24.0
_STIRLING = (1.0 / 12.0, -1.0 / 360.0, 1.0 / 1260.0, -1.0 / 1680.0,
             1.0 / 1188.0, -691.0 / 360360.0)

# log1p(d) - d switches to an atanh-style series inside this window; outside,
# direct subtraction loses at most ~4 eps / |d| relative, which is acceptable.
_L1PMX_WINDOW = 1.5

# Lambert W branch-point series window in v + 1/e, and the series in
# p = sqrt(2 (e v + 1)):  W = -1 +/- p - p^2/3 +/- 11 p^3/72 - 43 p^4/540 ...
_BRANCH_WINDOW = 1e-6
_BRANCH_COEF = (-1.0, 1.0, -1.0 / 3.0, 11.0 / 72.0, -43.0 / 540.0,
                769.0 / 17280.0)

# Supported base-probability range for the two inverse branches of the peak
# map: z in [Z_MIN, 1 - Z_GAP].
Z_MIN = 1e-300
Z_GAP = 1e-12

# Threshold-ratio Taylor branch: used for y - 1 <= this, where the direct
# formula has lost more than ~24 eps / s^2 relative accuracy.
_THRESHOLD_SERIES_MAX = 0.25


@dataclass(frozen=True)
class Precision:
    """Solver and certification tolerances shared across the package."""

    rel_tol: float = 1e-12
    abs_tol: float = 1e-14
    max_iter: int = 200
    strict_margin: float = 8.0

    def __post_init__(self) -> None:
        if not (0.0 < self.rel_tol < 1.0 and 0.0 < self.abs_tol < 1.0):
            raise DomainError("tolerances must lie in (0, 1)")
        if self.max_iter < 1:
            raise DomainError("max_iter must be positive")
        if self.strict_margin < 1.0:
            raise DomainError("strict_margin must be at least 1")


DEFAULT_PRECISION = Precision()


@dataclass(frozen=True)
class BranchRoots:
    """The two preimages of z under x*exp(1-x): x1 in (0,1), x2 in (1,inf)."""

    z: float
    x1: float
    x2: float

    def __post_init__(self) -> None:
        if not (0.0 < self.z < 1.0):
            raise DomainError("base probability z must lie in (0, 1)")
        if not (0.0 < self.x1 < 1.0 < self.x2):
            raise DomainError("roots must straddle the peak at 1")


@dataclass(frozen=True)
class EvalDetail:
    """A kernel value with its rounding-model error bound and provenance."""

    value: float
    err_bound: float
    method: str
    n_iter: int


def _require_finite(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise DomainError(f"{name} must be finite, got {value!r}")
    return value


def log_gamma(a: float) -> float:
    """ln Gamma(a) for a > 0.

    Delegates to the platform lgamma, which is within a couple of ulp across
    the supported range; the quadrature oracle validates it in the tests.
    """
    a = _require_finite("a", a)
    if a <= 0.0:
        raise DomainError("log_gamma requires a > 0")
    return math.lgamma(a)


# Euler-Mascheroni constant, correctly rounded.
_EULER_GAMMA = 0.5772156649015329

# B_{2i} for the Euler-Maclaurin zeta tail, i = 1..7.
_BERNOULLI_2I = (1.0 / 6.0, -1.0 / 30.0, 1.0 / 42.0, -1.0 / 30.0,
                 5.0 / 66.0, -691.0 / 2730.0, 7.0 / 6.0)


def _zeta_em(k: int) -> float:
    """zeta(k) for integer k >= 2 by Euler-Maclaurin summation at N = 32.

    The first neglected correction term is below 1e-25 for every k >= 2, so
    the values are correctly rounded up to ordinary summation noise.
    """
    n_base = 32
    acc = 0.0
    for n in range(n_base - 1, 0, -1):
        acc += float(n) ** (-k)
    nf = float(n_base)
    acc += nf ** (1 - k) / (k - 1.0) + 0.5 * nf ** (-k)
    rising = float(k)
    power = nf ** (-k - 1)
    for i, b2i in enumerate(_BERNOULLI_2I, start=1):
        acc += b2i / math.factorial(2 * i) * rising * power
        rising *= (k + 2.0 * i - 1.0) * (k + 2.0 * i)
        power /= nf * nf
    return acc


_ZETA_TABLE = tuple(_zeta_em(k) for k in range(2, 71))


def _lgamma1p(a: float) -> float:
    """ln Gamma(1 + a) for 0 <= a <= 1/2 with near-eps relative accuracy.

    Taylor series -euler_gamma*a + sum_{k>=2} (-1)^k zeta(k) a^k / k.  The
    platform lgamma only delivers ~3e-13 relative accuracy near its zero at
    1, which the small-shape tail kernel would amplify into its result.
    """
    acc = 0.0
    ak = a * a
    for i, z in enumerate(_ZETA_TABLE):
        k = i + 2
        term = z * ak / k
        if k % 2 != 0:
            term = -term
        acc += term
        if abs(term) <= 0.25 * EPS * (abs(acc) + _EULER_GAMMA * a):
            break
        ak *= a
    return acc - _EULER_GAMMA * a


def _log1pmx(d: float) -> float:
    """log1p(d) - d without cancellation for moderate |d| (scalar)."""
    if d <= -1.0:
        raise DomainError("log1pmx requires d > -1")
    if abs(d) > _L1PMX_WINDOW or d < -0.95:
        # No cancellation out here, and the series below would crawl.
        return math.log1p(d) - d
    u = d / (2.0 + d)
    # log1p(d) - d = -2 * sum_{k>=2} c_k u^k, c_k = 1 (k even), (k-1)/k (odd).
    acc = 0.0
    uk = u * u
    k = 2
    while k < 120:
        c = 1.0 if (k % 2 == 0) else (k - 1.0) / k
        term = c * uk
        acc += term
        if abs(term) <= 0.25 * EPS * abs(acc):
            break
        uk *= u
        k += 1
    return -2.0 * acc


_L1PMX_COEF = np.array(
    [1.0 if k % 2 == 0 else (k - 1.0) / k for k in range(2, 68)])


def _log1pmx_vec(d: np.ndarray) -> np.ndarray:
    """Vectorized log1p(d) - d for d > -1 (quadrature integrands).

    The fixed-length Horner series is only used for |d| <= 0.5, where its
    truncation sits far below eps; outside, the direct form's cancellation
    is bounded by ~4 eps / |d|, adequate for integrand exponents.
    """
    d = np.asarray(d, dtype=float)
    series = np.abs(d) <= 0.5
    safe = np.where(series, 0.0, d)
    direct = np.log1p(safe) - safe
    ud = np.where(series, d, 0.0)
    u = ud / (2.0 + ud)
    acc = np.zeros_like(u)
    for c in _L1PMX_COEF[::-1]:
        acc = acc * u + c
    ser = -2.0 * u * u * acc
    return np.where(series, ser, direct)


def _stirling_phi(a: float) -> float:
    r2 = 1.0 / (a * a)
    acc = _STIRLING[-1]
    for c in _STIRLING[-2::-1]:
        acc = acc * r2 + c
    return acc / a


def _log_gamma_norm(a: float, x: float) -> float:
    """a*ln x - x - lnGamma(a) with small absolute error even when the naive
    form cancels catastrophically (large a, x near a)."""
    if a >= _STIRLING_MIN:
        d = (x - a) / a
        return a * _log1pmx(d) + 0.5 * math.log(a / _TWO_PI) - _stirling_phi(a)
    return a * math.log(x) - x - math.lgamma(a)


def _lower_series(a: float, x: float) -> tuple[float, float, int]:
    """Lower regularized P(a, x) by the ascending series, for x < a + 1."""
    ln_pref = _log_gamma_norm(a, x) - math.log(a)
    term = 1.0
    total = 1.0
    n = 0
    while n < _KERNEL_MAX_ITER:
        n += 1
        term *= x / (a + n)
        total += term
        if term <= 0.25 * EPS * total:
            break
    value = math.exp(ln_pref) * total
    rel = EPS * (2.0 * abs(ln_pref) + 2.0 * n + 32.0)
    return value, rel, n


def _upper_cf(a: float, x: float) -> tuple[float, float, int]:
    """Upper regularized Q(a, x) by the modified Lentz continued fraction,
    for x >= a + 1."""
    ln_pref = _log_gamma_norm(a, x)
    tiny = 1e-300
    b = x + 1.0 - a
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    n = 0
    while n < _KERNEL_MAX_ITER:
        n += 1
        an = n * (a - n)
        b += 2.0
        d = an * d + b
        if d == 0.0:
            d = tiny
        c = b + an / c
        if c == 0.0:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) <= EPS:
            break
    value = math.exp(ln_pref) * h
    rel = EPS * (2.0 * abs(ln_pref) + 2.0 * n + 32.0)
    return value, rel, n


def _upper_small_shape(a: float, x: float) -> tuple[float, float, int]:
    """Q(a, x) for a <= 1/2 and x < a + 1, summed directly.

    With g = a*ln x - lnGamma(a+1),
        Q = -expm1(g) + exp(g) * h,   h = sum_{n>=1} -a (-x)^n / (n! (a+n)),
    which avoids forming 1 - P when Q is many orders below 1.  lnGamma(1+a)
    comes from its Taylor series via _lgamma1p: the two outer terms cancel
    to O(a), so an absolute ~2e-16 error in g (the platform lgamma's floor
    near its zero at 1) would leak into Q at full size.

    Returns (value, abs_err_bound, n_terms).
    """
    alnx = a * math.log(x)
    lg = _lgamma1p(a)
    g = alnx - lg
    h = 0.0
    habs = 0.0
    term = 1.0
    n = 0
    while n < _KERNEL_MAX_ITER:
        n += 1
        term *= -x / n
        contrib = term * (a / (a + n))
        h -= contrib
        habs += abs(contrib)
        if abs(term) <= 0.25 * EPS * max(abs(h), 1e-300):
            break
    eg = math.exp(g)
    value = -math.expm1(g) + eg * h
    abs_err = EPS * (2.0 * abs(alnx) + 6.0 * abs(lg) + 2.0 * abs(g)
                     + eg * (2.0 * n + 4.0) * habs + 8.0 * abs(value))
    return value, abs_err, n


def reg_gamma_q_detail(a: float, x: float) -> EvalDetail:
    """Upper regularized incomplete gamma Q(a, x) with an error bound."""
    a = _require_finite("a", a)
    x = _require_finite("x", x)
    if a <= 0.0:
        raise DomainError("reg_gamma_q requires a > 0")
    if x < 0.0:
        raise DomainError("reg_gamma_q requires x >= 0")
    if x == 0.0:
        return EvalDetail(1.0, 0.0, "exact", 0)
    if x >= a + 1.0:
        q, rel, n = _upper_cf(a, x)
        return EvalDetail(q, rel * q + 5e-324, "cf", n)
    if a <= _SMALL_SHAPE:
        q, abs_err, n = _upper_small_shape(a, x)
        return EvalDetail(q, abs_err + 5e-324, "tail-series", n)
    p, rel, n = _lower_series(a, x)
    q = 1.0 - p
    return EvalDetail(q, rel * p + EPS, "series-complement", n)


def reg_gamma_q(a: float, x: float) -> float:
    return reg_gamma_q_detail(a, x).value


def reg_gamma_p_detail(a: float, x: float) -> EvalDetail:
    """Lower regularized incomplete gamma P(a, x) with an error bound.

    Computed by the ascending series (never as 1 - Q) whenever x < a + 1,
    so small lower tails keep full relative accuracy.
    """
    a = _require_finite("a", a)
    x = _require_finite("x", x)
    if a <= 0.0:
        raise DomainError("reg_gamma_p requires a > 0")
    if x < 0.0:
        raise DomainError("reg_gamma_p requires x >= 0")
    if x == 0.0:
        return EvalDetail(0.0, 0.0, "exact", 0)
    if x < a + 1.0:
        p, rel, n = _lower_series(a, x)
        return EvalDetail(p, rel * p + 5e-324, "series", n)
    q, rel, n = _upper_cf(a, x)
    return EvalDetail(1.0 - q, rel * q + EPS, "cf-complement", n)


def reg_gamma_p(a: float, x: float) -> float:
    return reg_gamma_p_detail(a, x).value


def _halley_iterate(v: float, w: float, prec: Precision) -> float:
    """Halley refinement for w*exp(w) = v from a seed on the right branch."""
    for _ in range(prec.max_iter):
        ew = math.exp(w)
        f = w * ew - v
        if f == 0.0:
            break
        wp1 = w + 1.0
        denom = ew * wp1 - f * (w + 2.0) / (2.0 * wp1)
        step = f / denom
        w -= step
        if abs(step) <= prec.rel_tol * abs(w) + prec.abs_tol:
            break
    return w


def _branch_series(p: float) -> float:
    acc = 0.0
    for c in _BRANCH_COEF[::-1]:
        acc = acc * p + c
    return acc


def lambert_w0(v: float, prec: Precision = DEFAULT_PRECISION) -> float:
    """Principal branch W0(v) for v >= -1/e (small slack below is clamped)."""
    v = _require_finite("v", v)
    lower = -_INV_E
    if v < lower:
        if v < lower - prec.abs_tol:
            raise DomainError("lambert_w0 requires v >= -1/e")
        v = lower
    if v == 0.0:
        return 0.0
    ev1 = math.e * v + 1.0
    if abs(v - lower) < _BRANCH_WINDOW:
        p = math.sqrt(2.0 * max(ev1, 0.0))
        return _branch_series(p)
    if v < -0.25:
        w = _branch_series(math.sqrt(2.0 * ev1))
    elif v < 100.0:
        w = math.log1p(v)
    else:
        # Solve w + ln w = ln v by Newton; exp(w) would overflow for huge v.
        t = math.log(v)
        w = t - math.log(t)
        for _ in range(prec.max_iter):
            f = w + math.log(w) - t
            step = f / (1.0 + 1.0 / w)
            w -= step
            if abs(step) <= prec.rel_tol * abs(w) + prec.abs_tol:
                break
        return w
    return _halley_iterate(v, w, prec)


def lambert_wm1(v: float, prec: Precision = DEFAULT_PRECISION) -> float:
    """Secondary real branch W-1(v) for v in [-1/e, 0)."""
    v = _require_finite("v", v)
    lower = -_INV_E
    if v >= 0.0:
        raise DomainError("lambert_wm1 requires v < 0")
    if v < lower:
        if v < lower - prec.abs_tol:
            raise DomainError("lambert_wm1 requires v >= -1/e")
        v = lower
    if abs(v - lower) < _BRANCH_WINDOW:
        p = math.sqrt(2.0 * max(math.e * v + 1.0, 0.0))
        return _branch_series(-p)
    if v <= -0.25:
        w = _branch_series(-math.sqrt(2.0 * (math.e * v + 1.0)))
        return _halley_iterate(v, w, prec)
    # Near 0-: solve ln t - t = ln(-v) for t = -w by Newton, which stays
    # well-conditioned even when exp(w) underflows.
    t_target = math.log(-v)
    t = -t_target + math.log(max(-t_target, 2.0))
    for _ in range(prec.max_iter):
        f = math.log(t) - t - t_target
        step = f / (1.0 / t - 1.0)
        t -= step
        if abs(step) <= prec.rel_tol * abs(t) + prec.abs_tol:
            break
    return -t


def peak_map(x: float) -> float:
    """The unit-peak map x * exp(1 - x) on [0, inf): increasing on (0,1),
    equal to 1 at x=1, decreasing beyond."""
    x = _require_finite("x", x)
    if x < 0.0:
        raise DomainError("peak_map requires x >= 0")
    return x * math.exp(1.0 - x)


def branch_roots(z: float, prec: Precision = DEFAULT_PRECISION) -> BranchRoots:
    """Both preimages of z under the unit-peak map, for z in [1e-300, 1-1e-12].

    Near z = 1 the two roots collide; the Lambert kernels switch to the
    branch-point expansion there, which doubles as the Halley seed.
    """
    z = _require_finite("z", z)
    if not (Z_MIN <= z <= 1.0 - Z_GAP):
        raise DomainError("branch_roots requires z in [1e-300, 1 - 1e-12]")
    v = -z * _INV_E
    x1 = -lambert_w0(v, prec)
    x2 = -lambert_wm1(v, prec)
    return BranchRoots(z=z, x1=x1, x2=x2)


def branch_root_deriv(roots: BranchRoots, which: int,
                      prec: Precision = DEFAULT_PRECISION) -> float:
    """d x_j / d z = x_j / ((1 - x_j) z); positive for j=1, negative for j=2."""
    if which == 1:
        x = roots.x1
    elif which == 2:
        x = roots.x2
    else:
        raise DomainError("which must be 1 or 2")
    om = 1.0 - x
    if abs(om) < prec.abs_tol:
        raise DomainError("branch_root_deriv is degenerate at the double root")
    return x / (om * roots.z)


def log_mean(x: float, y: float) -> float:
    """Logarithmic mean (y - x)/(ln y - ln x), extended by L(x, x) = x.

    Arguments are canonically ordered first, so the result is bitwise
    symmetric; min <= L <= max holds by construction.
    """
    x = _require_finite("x", x)
    y = _require_finite("y", y)
    if x <= 0.0 or y <= 0.0:
        raise DomainError("log_mean requires positive arguments")
    if x == y:
        return x
    if x > y:
        x, y = y, x
    d = y - x
    return d / math.log1p(d / x)


def threshold_ratio(y: float) -> float:
    """The direction threshold lambda(y) = (y - l^2)/((l - 1)(y - l)) with
    l the logarithmic mean of 1 and y; strictly increasing from -1/3 at 1+
    toward 0, always inside (-1/3, 0).

    For y - 1 <= 0.25 the exact Taylor branch is used: the direct formula has
    an s^4-order cancellation that loses ~24 eps / s^2 in relative terms.
    """
    y = _require_finite("y", y)
    if y <= 1.0:
        raise DomainError("threshold_ratio requires y > 1")
    s = y - 1.0
    if s <= _THRESHOLD_SERIES_MAX:
        return eval_series(LAMBDA_EXCESS, s) - 1.0 / 3.0
    w = math.log1p(s)
    f_top = y * w * w - s * s
    m1 = -_log1pmx(s)          # s - ln y  (= (l - 1) * ln y)
    m2 = s * w + _log1pmx(s)   # y ln y - y + 1  (= (y - l) * ln y)
    return f_top / (m1 * m2)


def refined_mean(x: float, y: float) -> float:
    """sqrt(x*y + (L - x)(y - L)/3) with L the logarithmic mean: a mean that
    sits strictly between L and the arithmetic mean for x != y."""
    x = _require_finite("x", x)
    y = _require_finite("y", y)
    if not (0.0 < x <= y):
        raise DomainError("refined_mean requires 0 < x <= y")
    if x == y:
        return x
    lm = log_mean(x, y)
    return math.sqrt(x * y + (lm - x) * (y - lm) / 3.0)
