"""Command-line surface: field reports, family tables, counting commands,
and the reproducible verification suite.

Exit codes: 0 success, 1 usage/parse error, 2 insufficient invariants,
3 verification failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction

from . import apps, padic, torus
from .quadratic import (
    BiquadraticCM,
    QuadraticField,
    class_number_imaginary,
    is_prime,
    is_squarefree,
)

SCHEMA_VERSION = 1

REPORT_FIELDS = [
    "spec",
    "h_T",
    "h_T1",
    "tamagawa",
    "h_K",
    "h_Kplus",
    "Q",
    "t",
    "r",
    "s",
    "S",
    "e_local",
    "e_exponent_total",
    "global_index",
    "route_agreement",
    "mu_order",
]


class SpecParseError(ValueError):
    def __init__(self, message: str, text: str):
        super().__init__(f"{message} (at {text!r})")


def parse_field_spec(text: str) -> torus.CMAlgebraSpec:
    """Parse 'iq:<m>', 'biq:<d>,<j>' or 'prod:<spec>;<spec>;...'."""
    text = text.strip()
    if text.startswith("prod:"):
        parts = text[len("prod:"):].split(";")
        comps = []
        for part in parts:
            sub = parse_field_spec(part)
            comps.extend(sub.components)
        return torus.CMAlgebraSpec(tuple(comps))
    if text.startswith("iq:"):
        body = text[len("iq:"):]
        try:
            m = int(body)
        except ValueError:
            raise SpecParseError(f"radicand {body!r} is not an integer", text) from None
        if m >= 0:
            raise SpecParseError(f"radicand {m} must be negative", text)
        if not is_squarefree(m):
            raise SpecParseError(f"{m} not squarefree", text)
        return torus.CMAlgebraSpec((QuadraticField(m),))
    if text.startswith("biq:"):
        body = text[len("biq:"):]
        pieces = body.split(",")
        if len(pieces) != 2:
            raise SpecParseError("expected biq:<d>,<j>", text)
        try:
            d, j = int(pieces[0]), int(pieces[1])
        except ValueError:
            raise SpecParseError(f"radicands {body!r} are not integers", text) from None
        if d < 2:
            raise SpecParseError(f"real radicand {d} must be >= 2", text)
        if not is_squarefree(d):
            raise SpecParseError(f"{d} not squarefree", text)
        if j < 1:
            raise SpecParseError(f"imaginary radicand {j} must be >= 1", text)
        if not is_squarefree(j):
            raise SpecParseError(f"{j} not squarefree", text)
        return torus.CMAlgebraSpec((BiquadraticCM(d, j),))
    raise SpecParseError("expected iq:, biq: or prod: prefix", text)


def render_field_spec(spec: torus.CMAlgebraSpec) -> str:
    parts = []
    for comp in spec.components:
        if isinstance(comp, QuadraticField):
            parts.append(f"iq:{comp.m}")
        else:
            parts.append(f"biq:{comp.d},{comp.j}")
    if len(parts) == 1:
        return parts[0]
    return "prod:" + ";".join(parts)


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------


def _num(x):
    """Exact values to JSON-safe: int, [lo, hi], or [num, den] per element."""
    if isinstance(x, bool) or x is None:
        return x
    if isinstance(x, int):
        return x
    if isinstance(x, Fraction):
        if x.denominator == 1:
            return int(x)
        return [x.numerator, x.denominator]
    if isinstance(x, tuple):
        return [_num(v) for v in x]
    return x


def report_row(spec_text: str, report: torus.ClassNumberReport) -> dict:
    g = report.global_index
    return {
        "spec": spec_text,
        "h_T": _num(report.h_T),
        "h_T1": report.h_T1,
        "tamagawa": _num(report.tamagawa),
        "h_K": report.h_K,
        "h_Kplus": report.h_Kplus,
        "Q": report.Q,
        "t": report.profile.t,
        "r": report.spec.r,
        "s": report.profile.s,
        "S": list(report.profile.S),
        "e_local": {str(p): e.e_value for p, e in sorted(report.local.entries.items())},
        "e_exponent_total": report.local.total_exponent,
        "global_index": g.value if g.exact else [1, g.value],
        "route_agreement": report.route_agreement,
        "mu_order": report.mu_order,
    }


def emit_json(rows: list[dict]) -> str:
    return json.dumps({"schema": SCHEMA_VERSION, "rows": rows}, sort_keys=True) + "\n"


def emit_csv(rows: list[dict]) -> str:
    if not rows:
        return ""
    fields = list(rows[0].keys())
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(fields)
    for row in rows:
        writer.writerow(
            [
                row[f] if isinstance(row[f], str) else json.dumps(row[f], sort_keys=True)
                for f in fields
            ]
        )
    return buf.getvalue()


def emit_text(rows: list[dict]) -> str:
    out = []
    for row in rows:
        width = max(len(k) for k in row)
        for k, v in row.items():
            cell = v if isinstance(v, str) else json.dumps(v, sort_keys=True)
            out.append(f"{k:<{width}}  {cell}")
        out.append("")
    return "\n".join(out)


def _write_output(text: str, out_path: str | None) -> None:
    if out_path:
        with open(out_path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _emit(rows: list[dict], fmt: str, out_path: str | None) -> None:
    emitter = {"json": emit_json, "csv": emit_csv, "text": emit_text}[fmt]
    _write_output(emitter(rows), out_path)


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def _overrides_from_args(args) -> torus.Overrides | None:
    if args.Q is None and args.hK is None and args.hKplus is None:
        return None
    return torus.Overrides(h_K=args.hK, h_Kplus=args.hKplus, Q=args.Q)


def cmd_info(args) -> int:
    spec = parse_field_spec(args.spec)
    report = torus.class_number(spec, _overrides_from_args(args))
    try:
        report.require_complete()
    except torus.InsufficientInvariantsError as exc:
        print(
            f"{exc.missing} unknown for {render_field_spec(spec)} — supply --{exc.missing.replace('_', '')}",
            file=sys.stderr,
        )
        return 2
    _emit([report_row(render_field_spec(spec), report)], args.format, args.out)
    return 0


def _family_rows(family: str, bound: int) -> list[dict]:
    j = int(family.split("-")[1])
    rows = []
    for p in range(2, bound):
        if not is_prime(p):
            continue
        spec_text = f"biq:{p},{j}"
        if (j == 2 and p == 2) or (j == 3 and p == 3):
            rows.append(
                {
                    "spec": spec_text,
                    "p": p,
                    "j": j,
                    "h_family": None,
                    "h_pipeline": None,
                    "route_agreement": None,
                    "note": "skipped: cyclotomic case, use j=1",
                }
            )
            continue
        h_family = torus.class_number_family_sqrt_p_j(p, j)
        spec = parse_field_spec(spec_text)
        report = torus.class_number(spec)
        assert isinstance(report.h_T, int)
        rows.append(
            {
                "spec": spec_text,
                "p": p,
                "j": j,
                "h_family": h_family,
                "h_pipeline": report.h_T,
                "route_agreement": h_family == report.h_T and report.route_agreement,
                "note": "",
            }
        )
    return rows


def _squarefree_range(bound: int, start: int) -> list[int]:
    return [n for n in range(start, bound) if is_squarefree(n)]


def _biq_range_rows(bound_d: int, bound_j: int) -> list[dict]:
    rows = []
    for d in _squarefree_range(bound_d, 2):
        for j in _squarefree_range(bound_j, 1):
            spec = torus.CMAlgebraSpec((BiquadraticCM(d, j),))
            report = torus.class_number(spec)
            consistency = torus.verify_consistency(spec)
            rows.append(
                {
                    "spec": f"biq:{d},{j}",
                    "d": d,
                    "j": j,
                    "h_T": _num(report.h_T),
                    "h_T1": report.h_T1,
                    "route_agreement": report.route_agreement and consistency.passed,
                    "note": "",
                }
            )
    return rows


def cmd_table(args) -> int:
    if args.family in ("sqrtp-1", "sqrtp-2", "sqrtp-3"):
        rows = _family_rows(args.family, args.bound)
    elif args.family == "biq-range":
        rows = _biq_range_rows(args.bound, args.bound)
    else:  # pragma: no cover - argparse restricts choices
        raise ValueError(args.family)
    _emit(rows, args.format, args.out)
    return 0


def cmd_count(args) -> int:
    spec = parse_field_spec(args.spec)
    level = apps.LevelData(index_U=args.index_U, mu_index=args.mu_index)
    overrides = _overrides_from_args(args)
    report = torus.class_number(spec, overrides)
    factors = {  # provenance of every factor entering the count
        "h_T": _num(report.h_T),
        "h_T1": report.h_T1,
        "index_U": args.index_U,
        "mu_index": args.mu_index,
        "e_local": {str(p): e.e_value for p, e in sorted(report.local.entries.items())},
        "global_index": report.global_index.value
        if report.global_index.exact
        else [1, report.global_index.value],
    }
    if args.subject == "cm-points":
        value = apps.cm_point_count(spec, level, overrides)
        rows = [{"subject": "cm-points", "spec": args.spec, "count": _num(value), **factors}]
    elif args.subject == "shimura":
        if args.n is None:
            print("--n is required for the shimura subject", file=sys.stderr)
            return 1
        if not args.assert_noncompact:
            print(
                "hypothesis not asserted: G^der(R) is not compact "
                "(pass --assert-noncompact)",
                file=sys.stderr,
            )
            return 2
        inp = apps.ShimuraInput(spec, args.n, level, True)
        value = apps.shimura_components(inp, overrides)
        rows = [
            {"subject": "shimura", "spec": args.spec, "n": args.n, "count": _num(value), **factors}
        ]
    else:
        counts = apps.isogeny_class_counts(spec, level, level, overrides)
        rows = [
            {
                "subject": "isogeny",
                "spec": args.spec,
                "lambda_count": _num(counts.lambda_count),
                "similitude_count": _num(counts.similitude_count),
                **factors,
            }
        ]
    _emit(rows, args.format, args.out)
    return 0


# ---------------------------------------------------------------------------
# Verification suites
# ---------------------------------------------------------------------------

HILBERT_LATTICE = (-1, 1, -2, 2, -5, 5, -10, 10, 3, -3, 7, 6, 14)
HILBERT_PRIMES = (2, 3, 5, 7, 13)


def _verify_hilbert() -> list[tuple[str, bool, str]]:
    checks = []
    ok_all = True
    detail = ""
    for p in HILBERT_PRIMES:
        for a in HILBERT_LATTICE:
            for b in HILBERT_LATTICE:
                closed = padic.hilbert_symbol(a, b, p)
                brute = padic.hilbert_symbol_bruteforce(a, b, p)
                if closed != brute:
                    ok_all = False
                    detail = f"({a},{b})_{p}: closed {closed}, brute force {brute}"
    checks.append(("hilbert: closed form vs exhaustive oracle", ok_all, detail))

    sym = all(
        padic.hilbert_symbol(a, b, p) == padic.hilbert_symbol(b, a, p)
        for p in HILBERT_PRIMES
        for a in HILBERT_LATTICE
        for b in HILBERT_LATTICE
    )
    checks.append(("hilbert: symmetry", sym, ""))
    bil = all(
        padic.hilbert_symbol(a, b * c, p)
        == padic.hilbert_symbol(a, b, p) * padic.hilbert_symbol(a, c, p)
        for p in HILBERT_PRIMES
        for a in HILBERT_LATTICE
        for b in HILBERT_LATTICE
        for c in HILBERT_LATTICE
    )
    checks.append(("hilbert: bilinearity", bil, ""))
    inv = all(
        padic.hilbert_symbol(a, -a, p) == 1
        for p in HILBERT_PRIMES
        for a in HILBERT_LATTICE
    )
    checks.append(("hilbert: (a, -a) = 1", inv, ""))
    return checks


RAMIFIED_RADICANDS = (3, 7, 2, 6, 10, 14)


def _verify_padic_lemmas() -> list[tuple[str, bool, str]]:
    checks = []
    expected_struct = {1: (4, 8), 2: (8, 4), 3: (16, 8)}
    for f, (idx, level) in expected_struct.items():
        got = padic.unramified_square_structure(f)
        checks.append(
            (
                f"unramified square structure f={f}",
                (got.square_index, got.q2_intersection_level) == (idx, level),
                f"expected {(idx, level)}, got {(got.square_index, got.q2_intersection_level)}",
            )
        )
    expected_counts = {1: (0, 6), 2: (6, 8), 3: (6, 24)}
    for f, (cont, non) in expected_counts.items():
        got = padic.count_ramified_quadratic_by_norm(f)
        ok = (got.containing, got.not_containing) == (cont, non)
        ok = ok and got.containing + got.not_containing == 2 ** (f + 2) - 2
        checks.append(
            (
                f"ramified quadratic count f={f}",
                ok,
                f"expected {(cont, non)}, got {(got.containing, got.not_containing)}",
            )
        )
    q4 = padic.LocalBase(2, 2)
    for delta in RAMIFIED_RADICANDS:
        ext = padic.LocalQuadExtension(q4, delta)
        image = padic.norm_unit_image(ext, 3)
        checks.append(
            (
                f"-1 is a unit norm from Q_4(sqrt({delta}))/Q_4",
                image.contains_rational(-1),
                "",
            )
        )
    for base_rad in (2, -2, -1):
        base = padic.LocalBase(2, 1, base_rad)
        other = [r for r in (2, -2, -1) if r != base_rad][0]
        ext = padic.LocalQuadExtension(base, other)
        image = padic.norm_unit_image(ext, 3)
        ok = all(image.contains_rational(u) for u in (1, 3, 5, 7))
        checks.append(
            (
                f"8th-cyclotomic norms onto units mod 8 over Q_2(sqrt({base_rad}))",
                ok,
                "",
            )
        )
    return checks


def _verify_biquadratic(bound_d: int, bound_j: int) -> list[tuple[str, bool, str]]:
    checks = []
    bad = []
    for d in _squarefree_range(bound_d, 2):
        for j in _squarefree_range(bound_j, 1):
            spec = torus.CMAlgebraSpec((BiquadraticCM(d, j),))
            report = torus.verify_consistency(spec)
            if not report.passed:
                bad.extend(
                    f"biq:{d},{j} {c.name}: {c.detail}"
                    for c in report.checks
                    if not c.passed
                )
    checks.append(
        (
            f"biquadratic consistency sweep d<{bound_d}, j<{bound_j}",
            not bad,
            "; ".join(bad[:5]),
        )
    )
    return checks


def run_verify(scope: str, bound: int | None = None) -> list[tuple[str, bool, str]]:
    checks: list[tuple[str, bool, str]] = []
    if scope in ("hilbert", "all"):
        checks.extend(_verify_hilbert())
    if scope in ("padic-lemmas", "all"):
        checks.extend(_verify_padic_lemmas())
    if scope in ("biquadratic", "all"):
        if scope == "all":
            bd, bj = 60, 30
        else:
            bd = bj = bound if bound is not None else 30
        checks.extend(_verify_biquadratic(bd, bj))
    return checks


def cmd_verify(args) -> int:
    checks = run_verify(args.scope, args.bound)
    failures = 0
    for name, ok, detail in checks:
        status = "PASS" if ok else "FAIL"
        line = f"{status} {name}"
        if detail and not ok:
            line += f" — {detail}"
        print(line)
    failures = sum(1 for _, ok, _ in checks if not ok)
    print(f"{len(checks) - failures}/{len(checks)} checks passed")
    return 3 if failures else 0


# ---------------------------------------------------------------------------
# Parser / entry point
# ---------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # exit 1 on usage errors, not argparse's 2
        self.print_usage(sys.stderr)
        raise _UsageError(message)


class _UsageError(Exception):
    pass


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="cmtori", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--format", choices=("text", "json", "csv"), default="text")
        p.add_argument("--out", default=None, help="write output to a file")

    def add_overrides(p):
        p.add_argument("--Q", type=int, choices=(1, 2), default=None)
        p.add_argument("--hK", type=int, default=None)
        p.add_argument("--hKplus", type=int, default=None)

    p_info = sub.add_parser("info", help="full report on one field spec")
    p_info.add_argument("spec")
    add_common(p_info)
    add_overrides(p_info)
    p_info.set_defaults(func=cmd_info)

    p_table = sub.add_parser("table", help="family tables")
    p_table.add_argument(
        "--family",
        choices=("sqrtp-1", "sqrtp-2", "sqrtp-3", "biq-range"),
        required=True,
    )
    p_table.add_argument("--bound", type=int, default=20)
    add_common(p_table)
    p_table.set_defaults(func=cmd_table)

    p_count = sub.add_parser("count", help="counting applications")
    p_count.add_argument("--subject", choices=("cm-points", "shimura", "isogeny"), required=True)
    p_count.add_argument("spec")
    p_count.add_argument("--n", type=int, default=None)
    p_count.add_argument("--assert-noncompact", action="store_true")
    p_count.add_argument("--index-U", dest="index_U", type=int, default=1)
    p_count.add_argument("--mu-index", dest="mu_index", type=int, default=1)
    add_common(p_count)
    add_overrides(p_count)
    p_count.set_defaults(func=cmd_count)

    p_verify = sub.add_parser("verify", help="run the lemma/oracle suites")
    p_verify.add_argument(
        "--scope", choices=("hilbert", "padic-lemmas", "biquadratic", "all"), default="all"
    )
    p_verify.add_argument("--bound", type=int, default=None)
    p_verify.set_defaults(func=cmd_verify)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    try:
        return args.func(args)
    except SpecParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except torus.InsufficientInvariantsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (apps.LevelDataError, apps.NoncompactnessNotAsserted) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    main_entry()
