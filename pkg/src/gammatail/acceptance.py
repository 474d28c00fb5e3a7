"""The package's acceptance suite as callable, machine-checkable criteria.

Each criterion re-states one quantitative claim the package certifies and
returns a CriterionResult with a deterministic detail string (no timings or
environment data in the detail, so serialized reports are byte-stable).

tol_scale exists for fault injection in tests: it multiplies the criterion's
primary tolerance (equivalently divides its required margin ratio), so a
tiny value forces failures without touching the code under test.  Criteria
that certify pure orderings (C04) or reproducibility (C13) have no scalar
tolerance and ignore it.
"""
from __future__ import annotations

import json
import math
import time
from dataclasses import asdict, dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .certify import (ScanSpec, certify_monotone, check_asymptotic_slope,
                      check_mean_chain, check_threshold_chain, find_witness)
from .errors import CertificationError, GammaTailError
from .median import check_median_bracket, gamma_median
from .oracle import oracle_gamma_q, oracle_tail_prob
from .specfun import DEFAULT_PRECISION, branch_roots, reg_gamma_q
from .tailprob import (TailQuery, direction_form_detail, integrand_ratio,
                       ratio_parts, tail_prob)

_ONE_THIRD = 1.0 / 3.0
_EPS = 2.220446049250313e-16
_KERNEL_GRID_N = 50
_KERNEL_TOL = 1e-12
_KERNEL_TIME_LIMIT = 10.0
_MEDIAN_GRID = (1e-2, 1e4, 200)
_IDENTITY_TOL = 1e-8
_LIMIT_TOL = 1e-6
_SIGN_NOISE_FLOOR = 1e-6
_FD_LADDER = (1e-5, 1e-4, 1e-3)


@dataclass(frozen=True)
class CriterionResult:
    cid: str
    name: str
    passed: bool
    detail: str


def _result(cid: str, name: str, passed: bool, detail: str) -> CriterionResult:
    return CriterionResult(cid=cid, name=name, passed=bool(passed),
                           detail=detail)


def c01_kernel_accuracy(tol_scale: float = 1.0,
                        threads: Optional[int] = None) -> CriterionResult:
    """Fast kernel vs oracle on a 50x50 (a, x) grid, under a runtime cap."""
    tol = _KERNEL_TOL * tol_scale
    start = time.perf_counter()
    worst = 0.0
    worst_at = (0.0, 0.0)
    for a in np.geomspace(1e-3, 1e4, _KERNEL_GRID_N):
        a = float(a)
        x_hi = a + 40.0 * math.sqrt(a) + 40.0
        for x in np.linspace(0.0, x_hi, _KERNEL_GRID_N):
            x = float(x)
            fast = reg_gamma_q(a, x)
            slow = oracle_gamma_q(a, x)
            if slow == 0.0:
                rel = 0.0 if fast == 0.0 else math.inf
            else:
                rel = abs(fast - slow) / slow
            if rel > worst:
                worst = rel
                worst_at = (a, x)
    elapsed = time.perf_counter() - start
    passed = worst <= tol and elapsed < _KERNEL_TIME_LIMIT
    return _result(
        "C01", "kernel-vs-oracle accuracy", passed,
        f"worst relative deviation {worst!r} at (a, x)={worst_at!r} on the "
        f"{_KERNEL_GRID_N}x{_KERNEL_GRID_N} grid (tolerance {tol!r}); "
        f"runtime cap {_KERNEL_TIME_LIMIT:g}s")


def _monotone_cases(cid: str, name: str, cases: Sequence[float],
                    expected: str, a_min_of: Callable[[float], float],
                    tol_scale: float, threads: Optional[int]
                    ) -> CriterionResult:
    prec = DEFAULT_PRECISION
    required = prec.strict_margin / tol_scale
    lines = []
    ok = True
    for c in cases:
        scan = ScanSpec(a_min_of(c), 200.0, 400, "log")
        verdict = certify_monotone(c, scan, prec, threads=threads)
        good = (verdict.direction == expected
                and verdict.margin_ratio >= required)
        ok = ok and good
        lines.append(f"c={c!r}: {verdict.direction} "
                     f"margin_ratio={verdict.margin_ratio:.3e}")
    return _result(cid, name, ok,
                   f"expected {expected} with margin_ratio >= {required:g}; "
                   + "; ".join(lines))


def c02_increasing_regime(tol_scale: float = 1.0,
                          threads: Optional[int] = None) -> CriterionResult:
    """Certified increasing tail probability for c >= 0."""
    return _monotone_cases(
        "C02", "increasing tail for c >= 0",
        (0.0, 0.1, _ONE_THIRD, 1.0, 5.0), "increasing",
        lambda c: 0.01, tol_scale, threads)


def c03_decreasing_regime(tol_scale: float = 1.0,
                          threads: Optional[int] = None) -> CriterionResult:
    """Certified decreasing tail probability for c <= -1/3."""
    return _monotone_cases(
        "C03", "decreasing tail for c <= -1/3",
        (-_ONE_THIRD - 1e-3, -0.5, -1.0, -2.0), "decreasing",
        lambda c: -c + 0.01, tol_scale, threads)


def c04_witnesses(tol_scale: float = 1.0,
                  threads: Optional[int] = None) -> CriterionResult:
    """Witness triples exist for c in (-1/3, 0) and survive the oracle."""
    lines = []
    ok = True
    for c in (-0.30, -0.2, -0.1, -0.05):
        try:
            w = find_witness(c)
        except GammaTailError as exc:
            ok = False
            lines.append(f"c={c!r}: search failed ({exc})")
            continue
        o1 = oracle_tail_prob(w.a1, c)
        o2 = oracle_tail_prob(w.a2, c)
        o3 = oracle_tail_prob(w.a3, c)
        good = w.a3 <= 1e6 and o1 > o2 < o3
        ok = ok and good
        lines.append(f"c={c!r}: a=({w.a1!r}, {w.a2!r}, {w.a3!r}) "
                     f"oracle dip {'confirmed' if good else 'REFUTED'}")
    return _result("C04", "non-monotonicity witnesses in (-1/3, 0)", ok,
                   "; ".join(lines))


def c05_median_bracket(tol_scale: float = 1.0,
                       threads: Optional[int] = None) -> CriterionResult:
    """Both bracket inequalities strict with margins on the shape grid."""
    prec = DEFAULT_PRECISION
    required = prec.strict_margin / tol_scale
    grid = np.geomspace(*_MEDIAN_GRID)
    report = check_median_bracket(grid, prec)
    passed = report.certified and report.min_margin_ratio >= required
    return _result(
        "C05", "median bracket inequalities", passed,
        f"{len(report.entries)} shapes, min margin ratio "
        f"{report.min_margin_ratio:.6e} (required {required:g})")


def c06_median_solver(tol_scale: float = 1.0,
                      threads: Optional[int] = None) -> CriterionResult:
    """Median offsets stay in (-1/3, 0) with residual <= 1e-12; spot a=1."""
    residual_tol = 1e-12 * tol_scale
    spot_tol = 1e-14 * tol_scale
    worst_residual = 0.0
    failures = 0
    for a in np.geomspace(*_MEDIAN_GRID):
        try:
            r = gamma_median(float(a))
        except CertificationError:
            failures += 1
            continue
        worst_residual = max(worst_residual, r.residual)
        if not (-_ONE_THIRD < r.offset < 0.0 and r.residual <= residual_tol):
            failures += 1
    spot = gamma_median(1.0)
    spot_err = abs(spot.offset - (math.log(2.0) - 1.0))
    passed = failures == 0 and spot_err <= spot_tol
    return _result(
        "C06", "median offset and residual", passed,
        f"{int(_MEDIAN_GRID[2])} shapes, {failures} failures, worst residual "
        f"{worst_residual!r} (tolerance {residual_tol!r}); offset(1) vs "
        f"ln(2)-1 differs by {spot_err!r} (tolerance {spot_tol!r})")


def c07_ratio_identity(tol_scale: float = 1.0,
                       threads: Optional[int] = None) -> CriterionResult:
    """tail_prob equals 1/(1 + head/tail integral ratio) at shifted shape."""
    tol = _IDENTITY_TOL * tol_scale
    rng = np.random.default_rng(107)
    worst = 0.0
    for _ in range(20):
        a = 1.1 + 18.9 * float(rng.random())
        c = -0.9 + 2.9 * float(rng.random())
        parts = ratio_parts(a - 1.0, c)
        via_ratio = 1.0 / (1.0 + parts.ratio)
        direct = tail_prob(TailQuery(a, c))
        worst = max(worst, abs(direct - via_ratio))
    return _result(
        "C07", "tail probability integral-ratio identity", worst <= tol,
        f"20 seeded (a, c) pairs, worst |direct - via_ratio| = {worst!r} "
        f"(tolerance {tol!r})")


def c08_direction_form_signs(tol_scale: float = 1.0,
                             threads: Optional[int] = None
                             ) -> CriterionResult:
    """Direction form certified negative for c <= -1/3 on a z-grid, and
    certified positive somewhere for c > -1/3."""
    prec = DEFAULT_PRECISION
    required = prec.strict_margin / tol_scale
    zs = np.linspace(0.001, 0.999, 1000)
    roots = [branch_roots(float(z)) for z in zs]
    lines = []
    ok = True
    for c in (-_ONE_THIRD, -0.4, -1.0, -3.0):
        worst = -math.inf
        certified = True
        for r in roots:
            m, err = direction_form_detail(r, c, prec)
            worst = max(worst, m)
            if not (m < 0.0 and -m >= required * err):
                certified = False
        ok = ok and certified
        lines.append(f"c={c!r}: max over grid {worst:.3e} "
                     f"({'all certified negative' if certified else 'NOT certified'})")
    for c in (-0.33, -0.2, 0.0, 1.0):
        found = False
        for r in roots:
            m, err = direction_form_detail(r, c, prec)
            if m > 0.0 and m >= required * err:
                found = True
                break
        ok = ok and found
        lines.append(f"c={c!r}: positive value "
                     f"{'found' if found else 'NOT found'}")
    return _result("C08", "direction form sign dichotomy", ok,
                   "; ".join(lines))


def c09_threshold_chain(tol_scale: float = 1.0,
                        threads: Optional[int] = None) -> CriterionResult:
    """All four reduction stages certified increasing with a common limit."""
    prec = DEFAULT_PRECISION
    required = prec.strict_margin / tol_scale
    limit_tol = _LIMIT_TOL * tol_scale
    ys = 1.0 + np.geomspace(1e-8, 1e6 - 1.0, 400)
    report = check_threshold_chain(ys, prec)
    worst_limit = max(abs(v) for v in report.limit_excesses)
    passed = (report.certified
              and min(report.min_margin_ratios) >= required
              and worst_limit <= limit_tol)
    return _result(
        "C09", "threshold ratio chain monotonicity", passed,
        f"stages {report.stage_names} monotone={report.monotone}, min margin "
        f"ratios {tuple(f'{r:.3e}' for r in report.min_margin_ratios)}, "
        f"worst limit excess {worst_limit!r} (tolerance {limit_tol!r})")


def c10_mean_chain(tol_scale: float = 1.0,
                   threads: Optional[int] = None) -> CriterionResult:
    """Mean chain on 1e4 seeded pairs plus the 0.332 optimality probe."""
    prec = DEFAULT_PRECISION
    required = prec.strict_margin / tol_scale
    rng = np.random.default_rng(110)
    n = 10_000
    xs = 10.0 ** (-2.0 + 4.0 * rng.random(n))
    spreads = 10.0 ** (-6.0 + (math.log10(1e6 - 1.0) + 6.0) * rng.random(n))
    pairs = [(float(x), float(x) * (1.0 + float(t)))
             for x, t in zip(xs, spreads)]
    report = check_mean_chain(pairs, prec, probe_factor=0.332)
    passed = (report.certified
              and report.min_margin_ratio >= required
              and report.probe_violation_found)
    return _result(
        "C10", "mean chain and factor optimality", passed,
        f"{n} pairs, min margin ratio {report.min_margin_ratio:.6e} "
        f"(required {required:g}); probe at factor 0.332 violation "
        f"{'found' if report.probe_violation_found else 'NOT found'} at "
        f"spread {report.probe_spread!r}")


def c11_asymptotic_slope(tol_scale: float = 1.0,
                         threads: Optional[int] = None) -> CriterionResult:
    """Fitted small-eps slope of the integrated defect matches c + 1/3."""
    slope_tol = 0.02 * tol_scale
    report = check_asymptotic_slope(-0.2, (0.02, 0.01, 0.005, 0.0025))
    rel_err = (abs(report.slope - report.slope_target)
               / abs(report.slope_target))
    passed = (report.positive_ok and report.residual_bound_ok
              and rel_err <= slope_tol)
    return _result(
        "C11", "small-eps slope of integrated defect", passed,
        f"fitted slope {report.slope!r} vs target {report.slope_target!r}, "
        f"relative error {rel_err!r} (tolerance {slope_tol!r}); totals "
        f"positive: {report.positive_ok}, residual envelope: "
        f"{report.residual_bound_ok}")


def c12_ratio_sign_relation(tol_scale: float = 1.0,
                            threads: Optional[int] = None) -> CriterionResult:
    """Finite-difference slope sign of the integrand ratio is opposite to
    the direction form's sign at seeded (z, c) points."""
    prec = DEFAULT_PRECISION
    rng = np.random.default_rng(112)
    n = 1000
    checked = 0
    skipped_floor = 0
    unresolved = 0
    violations = 0
    for _ in range(n):
        z = 0.01 + 0.98 * float(rng.random())
        c = -2.0 + 4.0 * float(rng.random())
        m, m_err = direction_form_detail(branch_roots(z), c, prec)
        if abs(m) <= max(_SIGN_NOISE_FLOOR, prec.strict_margin * m_err):
            skipped_floor += 1
            continue
        resolved = False
        for h_rel in _FD_LADDER:
            h = z * h_rel
            r_hi = integrand_ratio(branch_roots(z + h), c, prec)
            r_lo = integrand_ratio(branch_roots(z - h), c, prec)
            if not (math.isfinite(r_hi) and math.isfinite(r_lo)):
                continue
            d = r_hi - r_lo
            noise = 64.0 * _EPS * (abs(r_hi) + abs(r_lo))
            if abs(d) <= noise:
                continue
            resolved = True
            if (d > 0.0) != (m < 0.0):
                violations += 1
            break
        if resolved:
            checked += 1
        else:
            unresolved += 1
    passed = violations == 0 and checked >= (2 * n) // 3
    return _result(
        "C12", "ratio derivative sign relation", passed,
        f"{checked} points sign-checked, {violations} violations, "
        f"{skipped_floor} below the direction-form noise floor, "
        f"{unresolved} finite differences unresolved")


def c13_determinism(tol_scale: float = 1.0,
                    threads: Optional[int] = None) -> CriterionResult:
    """Verdicts and their serialized forms are identical across repeated
    runs and across thread counts (in-process check; the CLI-level byte
    comparison lives in the test suite)."""
    scan = ScanSpec(0.21, 500.0, 120, "log")
    v_serial = certify_monotone(-0.2, scan, threads=1)
    v_thread = certify_monotone(-0.2, scan, threads=threads or 4)
    v_again = certify_monotone(-0.2, scan, threads=1)
    s1 = json.dumps(asdict(v_serial), sort_keys=True)
    s2 = json.dumps(asdict(v_thread), sort_keys=True)
    s3 = json.dumps(asdict(v_again), sort_keys=True)
    passed = v_serial == v_thread == v_again and s1 == s2 == s3
    return _result(
        "C13", "deterministic verdicts", passed,
        f"verdict equality across runs: {v_serial == v_again}; across "
        f"thread counts: {v_serial == v_thread}; serialized forms "
        f"{'identical' if s1 == s2 == s3 else 'DIFFER'}")


CRITERIA: dict[str, Callable[[float, Optional[int]], CriterionResult]] = {
    "C01": c01_kernel_accuracy,
    "C02": c02_increasing_regime,
    "C03": c03_decreasing_regime,
    "C04": c04_witnesses,
    "C05": c05_median_bracket,
    "C06": c06_median_solver,
    "C07": c07_ratio_identity,
    "C08": c08_direction_form_signs,
    "C09": c09_threshold_chain,
    "C10": c10_mean_chain,
    "C11": c11_asymptotic_slope,
    "C12": c12_ratio_sign_relation,
    "C13": c13_determinism,
}

_CORRUPT_TOL_SCALE = 1e-6


def verify_all(criteria: Optional[Sequence[str]] = None, *,
               corrupt: bool = False,
               threads: Optional[int] = None) -> tuple[CriterionResult, ...]:
    """Run the selected acceptance criteria (all by default), in id order.

    corrupt=True injects a 1e-6 tolerance scale so that healthy code fails:
    it exists to prove the harness can report failures honestly.
    """
    if criteria is None:
        cids = list(CRITERIA)
    else:
        cids = [c.upper() for c in criteria]
        unknown = [c for c in cids if c not in CRITERIA]
        if unknown:
            from .errors import DomainError
            raise DomainError(f"unknown criteria: {', '.join(unknown)}")
        cids = sorted(set(cids), key=list(CRITERIA).index)
    tol_scale = _CORRUPT_TOL_SCALE if corrupt else 1.0
    return tuple(CRITERIA[cid](tol_scale, threads) for cid in cids)
