"""Tests for the scalar special-function kernels.

Pinned values fall into three classes:
  * closed forms (Q(1,1) = 1/e, lgamma(0.5) = ln sqrt(pi), W0(e) = 1);
  * values frozen from the extended-precision oracle in this repository
    (the oracle itself is validated independently in test_oracle.py);
  * structural properties (monotonicity, complement identity, branch
    ordering) that hold for every argument.
"""

from __future__ import annotations

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gammatail import (
    DEFAULT_PRECISION,
    DomainError,
    Precision,
    branch_root_deriv,
    branch_roots,
    lambert_w0,
    lambert_wm1,
    log_gamma,
    log_mean,
    peak_map,
    refined_mean,
    reg_gamma_p,
    reg_gamma_q,
    reg_gamma_q_detail,
    threshold_ratio,
)
from gammatail.oracle import central_difference, oracle_gamma_q, oracle_threshold_ratio

ULP = 2.220446049250313e-16


# ----------------------------------------------------------------------
# regularized incomplete gamma
# ----------------------------------------------------------------------


def test_gamma_q_closed_forms():
    # Q(1, x) = e^-x and Q(2, x) = (1+x) e^-x.
    assert math.isclose(reg_gamma_q(1.0, 1.0), math.exp(-1.0), rel_tol=4 * ULP)
    assert math.isclose(reg_gamma_q(2.0, 2.0), 3.0 * math.exp(-2.0), rel_tol=4 * ULP)
    assert math.isclose(
        reg_gamma_q(2.0, 1.5), 2.5 * math.exp(-1.5), rel_tol=4 * ULP
    )
    # Q(1/2, x) = erfc(sqrt x).
    for x in (0.25, 1.0, 4.0, 9.0):
        assert math.isclose(
            reg_gamma_q(0.5, x), math.erfc(math.sqrt(x)), rel_tol=1e-13
        )


def test_gamma_q_boundary_and_range():
    assert reg_gamma_q(3.0, 0.0) == 1.0
    assert reg_gamma_q_detail(3.0, 0.0).err_bound == 0.0
    assert reg_gamma_q(10.0, 1e6) == 0.0
    for a, x in ((0.001, 0.5), (0.5, 0.001), (7.0, 7.0), (1e4, 1.0001e4)):
        q = reg_gamma_q(a, x)
        assert 0.0 <= q <= 1.0


def test_complement_identity():
    for a in (0.01, 0.7, 1.0, 3.5, 42.0, 1e3):
        for x in (0.3 * a, a, 2.5 * a):
            if x == 0.0:
                continue
            q = reg_gamma_q(a, x)
            p = reg_gamma_p(a, x)
            assert abs(p + q - 1.0) <= 8 * ULP


def test_gamma_q_monotone_in_each_argument():
    # decreasing in x, increasing in a
    xs = [0.5, 1.0, 2.0, 4.0, 8.0, 16.0]
    qs = [reg_gamma_q(3.0, x) for x in xs]
    assert all(b < a for a, b in zip(qs, qs[1:]))
    shapes = [0.5, 1.0, 2.0, 4.0, 8.0]
    qa = [reg_gamma_q(a, 3.0) for a in shapes]
    assert all(b > a for a, b in zip(qa, qa[1:]))


def test_gamma_q_matches_oracle_on_spot_grid():
    # A quick cross-check; the full 50x50 sweep is acceptance criterion C01.
    worst = 0.0
    for a in (1e-3, 0.03, 0.5, 1.0, 4.0, 31.0, 250.0, 1e4):
        for x in (0.25 * a, a, a + 3.0 * math.sqrt(a), 4.0 * a + 2.0):
            fast = reg_gamma_q(a, x)
            slow = oracle_gamma_q(a, x)
            err = abs(fast - slow) / max(slow, 1e-300) if slow else abs(fast)
            worst = max(worst, err)
    assert worst <= 1e-12, worst


def test_gamma_q_detail_methods_and_error_bounds():
    seen = set()
    for a, x in ((1.0, 0.0), (0.3, 0.2), (5.0, 2.0), (5.0, 20.0), (1e4, 1e4)):
        d = reg_gamma_q_detail(a, x)
        seen.add(d.method)
        assert d.err_bound >= 0.0
        assert d.n_iter >= 0
        oracle = oracle_gamma_q(a, x)
        assert abs(d.value - oracle) <= d.err_bound + 1e-13 * max(oracle, 1e-300)
    assert {"exact", "tail-series", "series-complement", "cf"} <= seen


def test_gamma_q_rejects_bad_arguments():
    for a, x in ((0.0, 1.0), (-1.0, 1.0), (1.0, -0.5), (math.nan, 1.0), (1.0, math.inf)):
        with pytest.raises(DomainError):
            reg_gamma_q(a, x)


@settings(derandomize=True, max_examples=50, deadline=None)
@given(
    a=st.floats(min_value=1e-3, max_value=1e4),
    frac=st.floats(min_value=0.05, max_value=4.0),
)
def test_gamma_q_complement_property(a, frac):
    x = frac * a
    q = reg_gamma_q(a, x)
    p = reg_gamma_p(a, x)
    assert 0.0 <= q <= 1.0
    assert abs(p + q - 1.0) <= 16 * ULP


# ----------------------------------------------------------------------
# log-gamma
# ----------------------------------------------------------------------


def test_log_gamma_known_values():
    assert log_gamma(1.0) == 0.0
    assert log_gamma(2.0) == 0.0
    assert math.isclose(log_gamma(0.5), 0.5 * math.log(math.pi), abs_tol=4 * ULP)
    assert math.isclose(log_gamma(6.0), math.log(120.0), rel_tol=4 * ULP)
    # recurrence lgamma(a+1) = lgamma(a) + ln a at an awkward point
    a = 1.0 + 1e-8
    assert abs(log_gamma(a + 1.0) - (log_gamma(a) + math.log(a))) <= 1e-15


def test_log_gamma_near_unity_zero():
    # The public log_gamma delegates to the platform lgamma, whose
    # contract near the simple zero at a = 1 is small *absolute* error.
    # The reference is the zeta series lgamma(1+e) = -gamma e +
    # sum_{k>=2} (-1)^k zeta(k) e^k / k truncated after e^5.
    zeta_over_k = (0.8224670334241132, -0.4006856343865314,
                   0.2705808084277845, -0.2073855510286740)

    def series(eps: float) -> float:
        ref = -0.5772156649015329 * eps
        for k, coeff in enumerate(zeta_over_k, start=2):
            ref += coeff * eps**k
        return ref

    # tolerance = rounding floor + zeta(6)/6 eps^6 series truncation
    for eps in (1e-12, 1e-8, 1e-4, 1e-2):
        tol = 5e-16 + 0.2 * eps**6
        assert abs(log_gamma(1.0 + eps) - series(eps)) <= tol, eps


def test_lgamma1p_kernel_is_relatively_accurate_near_zero():
    # The internal Taylor kernel restores *relative* accuracy for
    # lgamma(1+a) at small a, which the tail normalization needs; at
    # moderate a it must agree with the platform lgamma, which is
    # relatively accurate away from its zeros.
    from gammatail.specfun import _lgamma1p

    zeta_over_k = (0.8224670334241132, -0.4006856343865314,
                   0.2705808084277845, -0.2073855510286740)
    for eps in (1e-12, 1e-8, 1e-4):
        ref = -0.5772156649015329 * eps
        for k, coeff in enumerate(zeta_over_k, start=2):
            ref += coeff * eps**k
        assert math.isclose(_lgamma1p(eps), ref, rel_tol=1e-13), eps
    # At the window edge both routes carry a few ulp of their own noise.
    assert math.isclose(_lgamma1p(0.5), math.lgamma(1.5), rel_tol=1e-14)


# ----------------------------------------------------------------------
# Lambert W branches
# ----------------------------------------------------------------------


def test_lambert_branch_anchors():
    assert lambert_w0(0.0) == 0.0
    assert math.isclose(lambert_w0(math.e), 1.0, rel_tol=4 * ULP)
    assert math.isclose(lambert_w0(-1.0 / math.e), -1.0, rel_tol=1e-7)
    assert math.isclose(lambert_wm1(-1.0 / math.e), -1.0, rel_tol=1e-7)


def test_lambert_wm1_deep_tail():
    # For tiny |v| the -1 branch satisfies w + ln(-w) = ln(-v); the direct
    # identity w e^w underflows, the logarithmic form does not.
    w = lambert_wm1(-1e-300)
    assert w < -690.0
    assert abs((w + math.log(-w)) - math.log(1e-300)) <= 1e-12


@settings(derandomize=True, max_examples=50, deadline=None)
@given(v=st.floats(min_value=1e-8, max_value=1e8))
def test_lambert_w0_inverts_positive_axis(v):
    w = lambert_w0(v)
    assert w >= 0.0
    assert math.isclose(w * math.exp(w), v, rel_tol=1e-12)


@settings(derandomize=True, max_examples=50, deadline=None)
@given(t=st.floats(min_value=1e-6, max_value=0.999))
def test_lambert_branches_straddle_minus_one(t):
    v = -t / math.e
    w0 = lambert_w0(v)
    wm1 = lambert_wm1(v)
    assert -1.0 <= w0 <= 0.0
    assert wm1 <= -1.0
    assert math.isclose(w0 * math.exp(w0), v, rel_tol=1e-9, abs_tol=1e-300)
    assert math.isclose(wm1 * math.exp(wm1), v, rel_tol=1e-9, abs_tol=1e-300)


def test_lambert_rejects_out_of_branch_arguments():
    with pytest.raises(DomainError):
        lambert_w0(-0.5)  # below -1/e
    with pytest.raises(DomainError):
        lambert_wm1(0.5)  # -1 branch needs v in [-1/e, 0)


# ----------------------------------------------------------------------
# peak map and its branch inverses
# ----------------------------------------------------------------------


def test_peak_map_values():
    # x e^{1-x} peaks at exactly 1 and maps both branch roots to z.
    assert peak_map(1.0) == 1.0
    assert math.isclose(peak_map(2.0), 2.0 * math.exp(-1.0), rel_tol=4 * ULP)
    partner = branch_roots(peak_map(0.5)).x2
    assert math.isclose(peak_map(partner), peak_map(0.5), rel_tol=1e-12)


def test_branch_roots_at_two_over_e():
    # x e^{1-x} = 2/e has the exact root x = 2; the companion root was
    # frozen from the oracle bisection (interval width 1e-14).
    r = branch_roots(2.0 / math.e)
    assert abs(r.x2 - 2.0) <= 1e-13
    assert math.isclose(r.x1, 0.4063757399599588, rel_tol=1e-12)
    assert 0.0 < r.x1 < 1.0 < r.x2


def test_branch_roots_collapse_at_one():
    # As z -> 1- both roots approach 1 like 1 -+ sqrt(2(1-z)); z = 1
    # itself is outside the contract because the root map is singular
    # there.
    r = branch_roots(1.0 - 1e-12)
    spread = math.sqrt(2e-12)
    assert math.isclose(r.x1, 1.0 - spread, rel_tol=1e-3)
    assert math.isclose(r.x2, 1.0 + spread, rel_tol=1e-3)
    with pytest.raises(DomainError):
        branch_roots(1.0)
    with pytest.raises(DomainError):
        branch_roots(0.0)


@settings(derandomize=True, max_examples=50, deadline=None)
@given(z=st.floats(min_value=1e-6, max_value=1.0 - 1e-9))
def test_branch_roots_satisfy_defining_equation(z):
    r = branch_roots(z)
    assert 0.0 < r.x1 <= 1.0 <= r.x2
    assert math.isclose(peak_map(r.x1), z, rel_tol=1e-11)
    assert math.isclose(peak_map(r.x2), z, rel_tol=1e-11)


def test_branch_root_derivatives():
    z = 2.0 / math.e
    r = branch_roots(z)
    # dx/dz = x / ((1-x) z); at x2 = 2 this is exactly -e.
    assert math.isclose(branch_root_deriv(r, 2), -math.e, rel_tol=1e-12)
    assert branch_root_deriv(r, 1) > 0.0
    # finite-difference cross-check on both branches
    for which in (1, 2):
        fd, fd_err = central_difference(
            lambda t, w=which: getattr(branch_roots(t), f"x{w}"), z, 1e-6
        )
        assert math.isclose(branch_root_deriv(r, which), fd, rel_tol=1e-6)
        assert fd_err < 1e-6
    with pytest.raises(DomainError):
        branch_root_deriv(r, 3)


# ----------------------------------------------------------------------
# means
# ----------------------------------------------------------------------


def test_log_mean_values():
    assert log_mean(3.0, 3.0) == 3.0
    assert math.isclose(log_mean(1.0, math.e), math.e - 1.0, rel_tol=4 * ULP)
    # frozen oracle pin, also printed by the CLI example
    assert math.isclose(log_mean(1.0, 4.0), 2.1640425613334453, rel_tol=1e-14)
    assert log_mean(2.0, 5.0) == log_mean(5.0, 2.0)


def test_refined_mean_matches_definition():
    x, y = 1.0, 4.0
    lm = log_mean(x, y)
    expected = math.sqrt(x * y + (lm - x) * (y - lm) / 3.0)
    assert math.isclose(refined_mean(x, y), expected, rel_tol=4 * ULP)
    assert math.isclose(refined_mean(x, y), 2.1708011270346415, rel_tol=1e-14)


@settings(derandomize=True, max_examples=50, deadline=None)
@given(
    x=st.floats(min_value=1e-2, max_value=1e2),
    ratio=st.floats(min_value=1.01, max_value=1e4),
)
def test_mean_ordering_chain(x, ratio):
    # At ratio 1.01 every gap in the chain is at least ~1e-9 x, orders of
    # magnitude above rounding, so the strict ordering is decidable in
    # doubles.  (Certification of near-diagonal pairs goes through the
    # extended-precision route in check_mean_chain instead.)
    y = x * ratio
    geo = math.sqrt(x * y)
    lm = log_mean(x, y)
    ref = refined_mean(x, y)
    arith = 0.5 * (x + y)
    assert geo < lm < arith
    assert lm < ref < arith


def test_log_mean_derivative_spot_check():
    # d/dy L(1, y) at y = e equals (ln y - 1 + 1/y)/ln^2 y = 1/e.
    fd, _ = central_difference(lambda y: log_mean(1.0, y), math.e, 1e-5)
    assert math.isclose(fd, 1.0 / math.e, rel_tol=1e-8)


def test_mean_domain_errors():
    for x, y in ((0.0, 1.0), (-1.0, 2.0), (1.0, math.inf)):
        with pytest.raises(DomainError):
            log_mean(x, y)
        with pytest.raises(DomainError):
            refined_mean(x, y)


# ----------------------------------------------------------------------
# threshold ratio
# ----------------------------------------------------------------------


def test_threshold_ratio_limits_and_range():
    # The excess over the limit -1/3 grows like s^2/18, so at s = 1e-8 it
    # is below one ulp of 1/3 and the value collapses onto the limit.
    assert threshold_ratio(1.0 + 1e-8) == -1.0 / 3.0
    assert abs(threshold_ratio(1.0 + 1e-4) + 1.0 / 3.0) <= 1e-8
    assert -1.0 / 3.0 < threshold_ratio(1e8) < 0.0
    ys = [1.0 + 1e-6, 1.01, 1.1, 1.25, 2.0, 10.0, 1e4]
    vals = [threshold_ratio(y) for y in ys]
    assert all(b > a for a, b in zip(vals, vals[1:])), vals
    assert all(-1.0 / 3.0 <= v < 0.0 for v in vals)


def test_threshold_ratio_matches_oracle_across_series_handoff():
    # The implementation switches from a series to direct evaluation at
    # y = 1.25; both sides must agree with the double-double oracle.
    # (Below y ~ 1.0001 the oracle's own cancellation error dominates,
    # so the near-limit regime is checked via the series limit above.)
    for y in (1.0001, 1.01, 1.1, 1.2499999999, 1.2500000001, 2.0, 50.0, 1e6):
        fast = threshold_ratio(y)
        slow = oracle_threshold_ratio(y)
        assert math.isclose(fast, slow, rel_tol=1e-13, abs_tol=1e-18), y


def test_threshold_ratio_domain():
    with pytest.raises(DomainError):
        threshold_ratio(0.999)
    with pytest.raises(DomainError):
        threshold_ratio(math.inf)


# ----------------------------------------------------------------------
# precision container
# ----------------------------------------------------------------------


def test_precision_validation():
    p = Precision(rel_tol=1e-10, abs_tol=1e-12, max_iter=50, strict_margin=4.0)
    assert p.rel_tol == 1e-10
    assert DEFAULT_PRECISION.strict_margin == 8.0
    for kwargs in (
        {"rel_tol": 0.0},
        {"rel_tol": -1e-3},
        {"abs_tol": -1.0},
        {"max_iter": 0},
        {"strict_margin": 0.5},
    ):
        with pytest.raises(DomainError):
            Precision(**kwargs)
