"""Tests for the gamma-distribution median solver and bracket check.

The bracket theorem pins median(a) strictly between a - 1/3 and a for
every shape a > 0; the solver exploits it directly for moderate shapes
and switches to log-space for small ones, where the median collapses
double-exponentially (median(0.01) ~ 4.5e-31).
"""

from __future__ import annotations

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gammatail import (
    CertificationError,
    DomainError,
    MedianResult,
    check_median_bracket,
    gamma_median,
    reg_gamma_q,
)
from gammatail.oracle import oracle_gamma_q


def test_median_of_unit_exponential_is_log_two():
    r = gamma_median(1.0)
    assert abs(r.median - math.log(2.0)) <= 4e-16
    assert abs(r.offset - (math.log(2.0) - 1.0)) <= 4e-16
    assert r.residual <= 1e-15


def test_median_oracle_pins():
    # both endpoints frozen from the double-double oracle root search
    r2 = gamma_median(2.0)
    assert math.isclose(r2.median, 1.6783469900166614, rel_tol=5e-15)
    tiny = gamma_median(0.01)
    assert math.isclose(tiny.median, 4.4655350189103635e-31, rel_tol=1e-12)
    # independent residual check through the slow kernel
    assert abs(oracle_gamma_q(0.01, tiny.median) - 0.5) <= 1e-12


def test_median_large_shape():
    r = gamma_median(1e4)
    assert math.isclose(r.median, 9999.666668642049, rel_tol=1e-13)
    # offset approaches -1/3 from above as a grows
    assert -1.0 / 3.0 < r.offset < -0.333
    assert r.residual <= 1e-12


def test_median_result_invariants_on_grid():
    a_values = [10.0 ** (-2.0 + 6.0 * i / 39.0) for i in range(40)]
    for a in a_values:
        r = gamma_median(a)
        assert r.a == a
        assert -1.0 / 3.0 < r.offset < 0.0, a
        assert r.residual <= 1e-12, a
        # defining property, re-evaluated through the public kernel
        assert abs(reg_gamma_q(a, r.median) - 0.5) <= 1e-10, a


def test_median_is_increasing_in_shape():
    meds = [gamma_median(a).median for a in (0.5, 1.0, 2.0, 4.0, 8.0, 16.0)]
    assert all(b > a for a, b in zip(meds, meds[1:]))


def test_median_domain_errors():
    for a in (0.0, -1.0, math.nan, math.inf):
        with pytest.raises(DomainError):
            gamma_median(a)


def test_median_result_rejects_offset_outside_theorem_band():
    with pytest.raises(CertificationError):
        MedianResult(a=1.0, median=1.1, offset=0.1, residual=0.0)
    with pytest.raises(CertificationError):
        MedianResult(a=1.0, median=0.5, offset=-0.5, residual=0.0)


@settings(derandomize=True, max_examples=40, deadline=None)
@given(a=st.floats(min_value=1e-2, max_value=1e4))
def test_median_bracket_property(a):
    r = gamma_median(a)
    assert max(0.0, a - 1.0 / 3.0) < r.median < a


def test_check_median_bracket_certifies_grid():
    grid = [0.05, 0.2, 1.0 / 3.0, 0.5, 1.0, 3.0, 10.0, 250.0, 1e4]
    report = check_median_bracket(grid)
    assert report.certified
    assert report.min_margin_ratio > 8.0
    assert len(report.entries) == len(grid)
    for entry in report.entries:
        # below = 1/2 - Q(a, a) > 0, above = Q(a, a - 1/3) - 1/2 > 0
        assert entry.below > 0.0
        assert entry.above > 0.0
        assert entry.below_err >= 0.0
        assert entry.above_err >= 0.0
    # for a <= 1/3 the upper comparison point a - 1/3 clamps to the
    # plateau where Q = 1 exactly, so its error vanishes
    plateau_entries = [e for e in report.entries if e.a <= 1.0 / 3.0]
    assert plateau_entries
    assert all(e.above_err == 0.0 for e in plateau_entries)
    assert all(e.above == 0.5 for e in plateau_entries)


def test_check_median_bracket_rejects_bad_grid():
    with pytest.raises(DomainError):
        check_median_bracket([])
    with pytest.raises(DomainError):
        check_median_bracket([1.0, -2.0])
