"""Command-line interface: evaluation, scans, certification, medians, means.

Output discipline: CSV is the default for row streams (fixed headers, floats
printed with their shortest round-trip representation), JSON behind --json;
certification verdicts and verify-all reports are structured and printed as
JSON regardless.  Identical flags produce byte-identical output.

Exit codes: 0 success / certified as predicted; 1 certified violation of a
claim this package certifies; 2 usage or domain error; 3 inconclusive (a
certification that could not be decided at the requested precision).
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict
from typing import Optional, Sequence

from .acceptance import CRITERIA, verify_all
from .certify import MonotoneVerdict, ScanSpec, certify_monotone
from .errors import (CertificationError, DomainError, GammaTailError,
                     QuadratureError, WitnessSearchError)
from .median import gamma_median
from .oracle import oracle_tail_prob
from .specfun import DEFAULT_PRECISION, Precision
from .tailprob import TailQuery, tail_prob_detail

_ONE_THIRD = 1.0 / 3.0

_EXIT_OK = 0
_EXIT_VIOLATION = 1
_EXIT_USAGE = 2
_EXIT_INCONCLUSIVE = 3


def _fmt(value: object) -> str:
    """Deterministic cell formatting: shortest round-trip floats, lowercase
    booleans, empty string for missing values."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _csv(rows: Sequence[Sequence[object]], header: Sequence[str]) -> str:
    lines = [",".join(header)]
    lines.extend(",".join(_fmt(cell) for cell in row) for row in rows)
    return "\n".join(lines) + "\n"


def _json_text(obj: object) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _emit(text: str, out: Optional[str]) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)


def _precision_from(args: argparse.Namespace) -> Precision:
    return Precision(rel_tol=args.rel_tol, abs_tol=args.abs_tol,
                     strict_margin=args.strict_margin)


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--rel-tol", type=float,
                        default=DEFAULT_PRECISION.rel_tol,
                        help="relative tolerance target")
    parser.add_argument("--abs-tol", type=float,
                        default=DEFAULT_PRECISION.abs_tol,
                        help="absolute tolerance floor")
    parser.add_argument("--strict-margin", type=float,
                        default=DEFAULT_PRECISION.strict_margin,
                        help="certified-sign margin multiplier")
    parser.add_argument("--out", type=str, default=None,
                        help="write output to this path instead of stdout")


def _add_scan_flags(parser: argparse.ArgumentParser, *,
                    n_default: int = 400) -> None:
    parser.add_argument("--a-min", type=float, default=None,
                        help="smallest shape parameter")
    parser.add_argument("--a-max", type=float, default=200.0,
                        help="largest shape parameter")
    parser.add_argument("--n", type=int, default=n_default,
                        help="number of grid points")
    parser.add_argument("--scale", choices=("linear", "log"), default="log",
                        help="grid spacing")


def _scan_spec(args: argparse.Namespace, c: float) -> ScanSpec:
    a_min = args.a_min
    if a_min is None:
        a_min = 0.01 if c >= 0.0 else -c + 0.01
    return ScanSpec(a_min=a_min, a_max=args.a_max, n=args.n,
                    scale=args.scale)


def _cmd_eval(args: argparse.Namespace) -> int:
    detail = tail_prob_detail(TailQuery(args.a, args.c))
    record: dict[str, object] = {
        "a": args.a, "c": args.c, "p": detail.value,
        "method": detail.method, "err_bound": detail.err_bound,
    }
    if args.use_oracle:
        oracle = oracle_tail_prob(args.a, args.c)
        record["oracle"] = oracle
        record["diff"] = abs(detail.value - oracle)
    if args.json:
        _emit(_json_text(record), args.out)
    else:
        _emit(_csv([list(record.values())], list(record.keys())), args.out)
    return _EXIT_OK


def _cmd_scan(args: argparse.Namespace) -> int:
    spec = _scan_spec(args, args.c)
    rows = []
    prev: Optional[float] = None
    for a in spec.grid():
        detail = tail_prob_detail(TailQuery(a, args.c))
        delta = None if prev is None else detail.value - prev
        rows.append((a, detail.value, delta, detail.err_bound))
        prev = detail.value
    if args.json:
        payload = [{"a": a, "p": p, "delta": d, "err_bound": e}
                   for a, p, d, e in rows]
        _emit(_json_text(payload), args.out)
    else:
        _emit(_csv(rows, ("a", "p", "delta", "err_bound")), args.out)
    return _EXIT_OK


def _verdict_payload(verdict: MonotoneVerdict) -> dict[str, object]:
    witness = None if verdict.witness is None else asdict(verdict.witness)
    interval = None if verdict.interval is None else list(verdict.interval)
    return {
        "direction": verdict.direction,
        "c": verdict.c,
        "scan": asdict(verdict.scan),
        "witness": witness,
        "margin_ratio": verdict.margin_ratio,
        "interval": interval,
        "detail": verdict.detail,
    }


def _certify_exit(verdict: MonotoneVerdict) -> int:
    if verdict.direction == "inconclusive":
        return _EXIT_INCONCLUSIVE
    c = verdict.c
    if c >= 0.0 and verdict.direction != "increasing":
        return _EXIT_VIOLATION
    if c <= -_ONE_THIRD and verdict.direction != "decreasing":
        return _EXIT_VIOLATION
    return _EXIT_OK


def _cmd_certify(args: argparse.Namespace) -> int:
    spec = _scan_spec(args, args.c)
    verdict = certify_monotone(args.c, spec, _precision_from(args),
                               threads=args.threads)
    _emit(_json_text(_verdict_payload(verdict)), args.out)
    return _certify_exit(verdict)


def _cmd_median(args: argparse.Namespace) -> int:
    if args.a is not None:
        shapes = [args.a]
    else:
        if args.a_min is None or args.a_max is None:
            raise DomainError(
                "median requires either --a or both --a-min and --a-max")
        spec = ScanSpec(a_min=args.a_min, a_max=args.a_max, n=args.n,
                        scale=args.scale)
        shapes = list(spec.grid())
    prec = _precision_from(args)
    rows = []
    for a in shapes:
        r = gamma_median(a, prec)
        rows.append((r.a, r.median, r.offset, r.residual))
    if args.json:
        payload = [{"a": a, "median": m, "offset": o, "residual": res}
                   for a, m, o, res in rows]
        _emit(_json_text(payload), args.out)
    else:
        _emit(_csv(rows, ("a", "median", "offset", "residual")), args.out)
    return _EXIT_OK


def _cmd_means(args: argparse.Namespace) -> int:
    # check_mean_chain validates 0 < x < y and raises DomainError otherwise
    # (equal arguments are rejected: the chain is strict).
    from .certify import check_mean_chain
    report = check_mean_chain([(args.x, args.y)], _precision_from(args))
    entry = report.entries[0]
    record = {
        "x": entry.x, "y": entry.y, "geo": entry.geometric,
        "log_mean": entry.logarithmic, "refined_mean": entry.refined,
        "arith": entry.arithmetic, "chain_ok": entry.chain_ok,
    }
    if args.json:
        _emit(_json_text(record), args.out)
    else:
        _emit(_csv([list(record.values())], list(record.keys())), args.out)
    return _EXIT_OK if entry.chain_ok else _EXIT_VIOLATION


def _cmd_verify_all(args: argparse.Namespace) -> int:
    criteria = None
    if args.criteria:
        criteria = [c.strip() for c in args.criteria.split(",") if c.strip()]
    results = verify_all(criteria, corrupt=args.corrupt,
                         threads=args.threads)
    all_pass = all(r.passed for r in results)
    if args.json:
        payload = {
            "criteria": [asdict(r) for r in results],
            "all_pass": all_pass,
        }
        _emit(_json_text(payload), args.out)
    else:
        lines = []
        for r in results:
            mark = "PASS" if r.passed else "FAIL"
            line = f"{r.cid} {mark} {r.name}"
            if not r.passed:
                line += f" -- {r.detail}"
            lines.append(line)
        if all_pass:
            lines.append("ALL PASS")
        else:
            failed = ", ".join(r.cid for r in results if not r.passed)
            lines.append(f"FAIL: {failed}")
        _emit("\n".join(lines) + "\n", args.out)
    return _EXIT_OK if all_pass else _EXIT_VIOLATION


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gammatail",
        description="Centered gamma tail probabilities with certified "
                    "monotonicity verdicts, medians, and mean inequalities.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_eval = sub.add_parser("eval", help="evaluate P(X_a - a > c) once")
    p_eval.add_argument("--a", type=float, required=True, help="shape > 0")
    p_eval.add_argument("--c", type=float, required=True, help="threshold")
    p_eval.add_argument("--json", action="store_true")
    p_eval.add_argument("--use-oracle", action="store_true",
                        help=argparse.SUPPRESS)
    _add_common(p_eval)
    p_eval.set_defaults(func=_cmd_eval)

    p_scan = sub.add_parser("scan", help="tabulate the tail probability "
                                         "over a shape grid")
    p_scan.add_argument("--c", type=float, required=True)
    _add_scan_flags(p_scan)
    p_scan.add_argument("--json", action="store_true")
    _add_common(p_scan)
    p_scan.set_defaults(func=_cmd_scan)

    p_cert = sub.add_parser("certify", help="certify the monotonicity "
                                            "direction over a scan")
    p_cert.add_argument("--c", type=float, required=True)
    _add_scan_flags(p_cert)
    p_cert.add_argument("--threads", type=int, default=None)
    _add_common(p_cert)
    p_cert.set_defaults(func=_cmd_certify)

    p_med = sub.add_parser("median", help="gamma median and its offset "
                                          "from the mean")
    p_med.add_argument("--a", type=float, default=None)
    _add_scan_flags(p_med, n_default=50)
    p_med.add_argument("--json", action="store_true")
    _add_common(p_med)
    p_med.set_defaults(func=_cmd_median)

    p_means = sub.add_parser("means", help="the mean chain at one pair")
    p_means.add_argument("--x", type=float, required=True)
    p_means.add_argument("--y", type=float, required=True)
    p_means.add_argument("--json", action="store_true")
    _add_common(p_means)
    p_means.set_defaults(func=_cmd_means)

    p_ver = sub.add_parser("verify-all", help="run the acceptance criteria")
    p_ver.add_argument("--criteria", type=str, default=None,
                       help="comma-separated ids, e.g. C01,C05 "
                            f"(known: {','.join(CRITERIA)})")
    p_ver.add_argument("--corrupt", action="store_true",
                       help="inject a tolerance corruption (must fail)")
    p_ver.add_argument("--threads", type=int, default=None)
    p_ver.add_argument("--json", action="store_true")
    _add_common(p_ver)
    p_ver.set_defaults(func=_cmd_verify_all)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else _EXIT_OK
    try:
        return args.func(args)
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _EXIT_USAGE
    except (WitnessSearchError, QuadratureError) as exc:
        print(f"inconclusive: {exc}", file=sys.stderr)
        return _EXIT_INCONCLUSIVE
    except CertificationError as exc:
        print(f"certified violation: {exc}", file=sys.stderr)
        return _EXIT_VIOLATION
    except GammaTailError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _EXIT_VIOLATION


def main_entry() -> None:
    sys.exit(main())
