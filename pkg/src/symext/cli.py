"""Command-line front end: ``symext extend | highpass | verify | info``.

Exit codes: 0 success, 1 verification failure, 2 parse error,
3 precondition violation, 4 internal reduction failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import asdict
from pathlib import Path

import numpy as np

from . import io
from .errors import PreconditionError, ReductionError
from .extension import check_cascade, extend, support_control
from .filterbank import (
    FilterBank,
    FilterSpec,
    conjugate_bank,
    conjugate_filter,
    derive_highpass,
    orthogonality_defect,
    polyphase_row,
    symmetry_residual,
    verify_bank,
)
from .laurent import (
    CompatibleSymmetry,
    LaurentMatrix,
    SymmetryType,
    detect_compatible_symmetry,
    mat_mul,
    paraunitarity_defect,
)

EXIT_OK, EXIT_FAIL, EXIT_PARSE, EXIT_PRECONDITION, EXIT_REDUCTION = 0, 1, 2, 3, 4


# -- helpers -----------------------------------------------------------------

def _clean(x):
    """JSON-safe copy: infinities become ``None``, numpy scalars become Python."""
    if isinstance(x, dict):
        return {k: _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if isinstance(x, (np.bool_, bool)):
        return bool(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isinf(x):
            return None
        return x
    return x


def _emit(report: dict, args) -> None:
    text = json.dumps(_clean(report), indent=1) + "\n"
    if args.report:
        Path(args.report).parent.mkdir(parents=True, exist_ok=True)
        Path(args.report).write_text(text)
    if not args.quiet:
        sys.stdout.write(text)


def defect_location(p: LaurentMatrix) -> dict | None:
    """Row, column and power of the largest coefficient of ``P P* - I``."""
    gram = mat_mul(p, p.adjoint(), zero_tol=0.0)
    eye = LaurentMatrix.identity(p.rows)
    lo = min(gram.low, 0) if not gram.is_zero() else 0
    hi = max(gram.high, 0) if not gram.is_zero() else 0
    arr = np.zeros((hi - lo + 1, p.rows, p.rows), dtype=complex)
    if not gram.is_zero():
        arr[gram.low - lo:gram.high - lo + 1] += gram.stack
    arr[-lo] -= eye.coeff(0)
    k, j, i = np.unravel_index(int(np.argmax(np.abs(arr))), arr.shape)
    return {"row": int(j), "col": int(i), "power": int(k + lo), "value": float(abs(arr[k, j, i]))}


def _declared_pattern(obj: dict, where: str) -> CompatibleSymmetry | None:
    """Declared ``Sym P = [rows]^T [cols]`` of a matrix file."""
    sym = obj.get("symmetry")
    if sym is None:
        return None
    if not isinstance(sym, dict) or "rows" not in sym or "cols" not in sym:
        raise io.ParseError(f"{where}.symmetry must hold rows and cols")
    e1, c1 = io.symmetry_from_obj(sym["rows"], f"{where}.symmetry.rows")
    e2, c2 = io.symmetry_from_obj(sym["cols"], f"{where}.symmetry.cols")
    if any(c.denominator != 1 for c in (*c1, *c2)):
        raise io.ParseError(f"{where}.symmetry: centres must be integers")
    t1 = tuple(SymmetryType(e, -int(c)) for e, c in zip(e1, c1))
    t2 = tuple(SymmetryType(e, int(c)) for e, c in zip(e2, c2))
    return CompatibleSymmetry(t1, t2)


def same_pattern(a: CompatibleSymmetry, b: CompatibleSymmetry) -> bool:
    """Equal entrywise symmetry, which ignores the monomial gauge of the factors."""
    rows, cols = len(a.theta1), len(a.theta2)
    if (rows, cols) != (len(b.theta1), len(b.theta2)):
        return False
    for j in range(rows):
        for k in range(cols):
            x, y = a.entry(j, k), b.entry(j, k)
            if not (x.is_wildcard or y.is_wildcard) and x != y:
                return False
    return True


# -- commands ----------------------------------------------------------------

def cmd_extend(args) -> int:
    P = io.load_matrix(args.input)
    Pe, cascade = extend(P, args.tol)
    report_tol = max(args.tol, 1e-9)
    checks = check_cascade(P, Pe, cascade, report_tol)
    ext_sym = detect_compatible_symmetry(Pe, zero_tol=max(args.tol, 1e-9))
    io.write_json(args.output, io.matrix_to_obj(Pe))
    if args.cascade:
        for i, f in enumerate(cascade.factors):
            io.write_json(Path(args.cascade) / f"factor_{i}.json", io.matrix_to_obj(f))
    report = {
        "command": "extend",
        "shape": list(Pe.shape),
        "input_shape": list(P.shape),
        "tol": args.tol,
        "J": cascade.J,
        "J_bound": checks.J_bound,
        "symmetry": str(cascade.symmetry),
        "extension_symmetry": str(ext_sym) if ext_sym else None,
        "split_history": [s.as_dict() for s in cascade.split_history],
        "factor_supports": [list(f.support) if f.support else None for f in cascade.factors],
        "support_control": support_control(P, Pe),
        "checks": asdict(checks),
        "passed": checks.ok(report_tol),
    }
    _emit(report, args)
    return EXIT_OK if report["passed"] else EXIT_FAIL


def _load_conjugation(path) -> np.ndarray:
    e = io.load_matrix(path)
    if e.support not in (None, (0, 0)):
        raise PreconditionError("conjugation", "E must be a constant matrix")
    return e.coeff(0)


def cmd_highpass(args) -> int:
    obj = io.load_filter_obj(args.input)
    a0 = io.filter_from_obj(obj, str(args.input))
    targets = None if args.no_targets else io.targets_from_obj(obj, str(args.input))
    E = None
    work = a0
    if args.conjugate:
        E = _load_conjugation(args.conjugate)
        if not a0.has_symmetry:
            raise PreconditionError("symmetry", "declare the symmetry of E a0 E in the filter file")
        work = conjugate_filter(FilterSpec(a0.d, a0.symbol), E, a0.eps, a0.c)
    hp, PP, cascade = derive_highpass(work, args.tol, targets)
    head_err = PP[:work.r, :].max_abs_diff(polyphase_row(work.symbol, work.d))
    bank = FilterBank(work, hp)
    sym_report = verify_bank(bank, args.tol)
    out = Path(args.output)
    col_sym = io.symmetry_to_obj(work.eps, work.c)
    for m, f in enumerate(hp.filters, start=1):
        tilde = io.filter_to_obj(f, work.d, hp.eps[m - 1], hp.c[m - 1],
                                 {"column_symmetry": col_sym})
        io.write_json(out / (f"highpass_tilde_{m}.json" if E is not None
                             else f"highpass_{m}.json"), tilde)
    final = bank
    if E is not None:
        final = conjugate_bank(FilterBank(FilterSpec(a0.d, work.symbol), hp), E.conj().T,
                               args.tol)
        for m, f in enumerate(final.highpass.filters, start=1):
            io.write_json(out / f"highpass_{m}.json", io.filter_to_obj(f, a0.d))
    io.write_json(out / "bank.json", io.bank_to_obj(final))
    if args.cascade:
        for i, f in enumerate(cascade.factors):
            io.write_json(Path(args.cascade) / f"factor_{i}.json", io.matrix_to_obj(f))
    final_report = verify_bank(final, args.tol) if E is not None else sym_report
    report = {
        "command": "highpass",
        "dilation": a0.d,
        "multiplicity": a0.r,
        "tol": args.tol,
        "conjugated": E is not None,
        "row_order": "targets" if targets is not None else "extension",
        "lowpass_symmetry": io.symmetry_to_obj(work.eps, work.c),
        "highpass": [{"index": m + 1, "symmetry": io.symmetry_to_obj(hp.eps[m], hp.c[m])}
                     for m in range(len(hp.filters))],
        "J": cascade.J,
        "lowpass_row_error": head_err,
        "symmetric_bank": sym_report.as_dict(),
        "bank": final_report.as_dict(),
        "passed": bool(sym_report.passed and final_report.passed and head_err <= args.tol),
    }
    _emit(report, args)
    return EXIT_OK if report["passed"] else EXIT_FAIL


def _verify_matrix(obj: dict, args) -> dict:
    P = io.matrix_from_obj(obj, str(args.input))
    defect = paraunitarity_defect(P)
    zt = max(args.tol, 1e-12)
    sym = detect_compatible_symmetry(P, zero_tol=zt)
    declared = _declared_pattern(obj, str(args.input))
    checks = {"paraunitary": defect <= args.tol, "compatible_symmetry": sym is not None}
    report = {"kind": "matrix", "shape": list(P.shape), "paraunitarity_defect": defect,
              "defect_location": defect_location(P) if defect > args.tol else None,
              "symmetry": str(sym) if sym else None}
    if declared is not None:
        checks["declared_symmetry"] = sym is not None and same_pattern(sym, declared)
        report["declared_symmetry"] = str(declared)
    if args.against:
        ref = io.load_matrix(args.against)
        r = ref.rows
        if ref.cols != P.cols or r > P.rows:
            raise io.ParseError("--against matrix has incompatible shape")
        checks["reproduces_reference"] = P[:r, :].max_abs_diff(ref) <= args.tol
        inside = []
        for k in range(P.cols):
            a, b = P.col(k).support, ref.col(k).support
            inside.append(a is None or (b is not None and b[0] <= a[0] and a[1] <= b[1]))
        checks["column_support_containment"] = all(inside)
        report["column_support"] = [
            {"column": k, "extension": list(P.col(k).support or []),
             "reference": list(ref.col(k).support or []), "ok": ok}
            for k, ok in enumerate(inside)]
    report["checks"] = checks
    report["passed"] = all(checks.values())
    return report


def _verify_filter(obj: dict, args) -> dict:
    spec = io.filter_from_obj(obj, str(args.input))
    if args.highpass:
        hp = io.load_highpass(args.highpass, spec)
        rep = verify_bank(FilterBank(spec, hp), args.tol).as_dict()
        rep.update(kind="bank")
        if rep["paraunitarity_defect"] > args.tol:
            rep["defect_location"] = defect_location(FilterBank(spec, hp).polyphase())
        return rep
    orth = orthogonality_defect(spec)
    checks = {"orthogonality": orth <= args.tol}
    report = {"kind": "filter", "dilation": spec.d, "multiplicity": spec.r,
              "orthogonality_defect": orth,
              "defect_location": (defect_location(polyphase_row(spec.symbol, spec.d))
                                  if orth > args.tol else None)}
    if spec.has_symmetry:
        col = obj.get("column_symmetry")
        ce, cc = (io.symmetry_from_obj(col, "column_symmetry") if col is not None
                  else (spec.eps, spec.c))
        try:
            res = symmetry_residual(spec.symbol, spec.d, spec.eps, spec.c, ce, cc)
        except PreconditionError as exc:
            raise io.ParseError(str(exc)) from exc
        report["symmetry_residual"] = res
        checks["symmetry"] = res <= args.tol
    report["checks"] = checks
    report["passed"] = all(checks.values())
    return report


def cmd_verify(args) -> int:
    fmt, obj = io.load_any(args.input)
    kind = args.kind
    if kind == "auto":
        kind = {io.MATRIX_FORMAT: "matrix", io.FILTER_FORMAT: "filter",
                io.BANK_FORMAT: "bank"}[fmt]
    expected = {"matrix": io.MATRIX_FORMAT, "filter": io.FILTER_FORMAT, "bank": io.BANK_FORMAT}
    if expected[kind] != fmt:
        raise io.ParseError(f"{args.input}: expected a {kind} file, found {fmt!r}")
    if kind == "matrix":
        report = _verify_matrix(obj, args)
    elif kind == "filter":
        report = _verify_filter(obj, args)
    else:
        bank = io.bank_from_obj(obj, str(args.input))
        report = verify_bank(bank, args.tol).as_dict()
        report["kind"] = "bank"
        if report["paraunitarity_defect"] > args.tol:
            report["defect_location"] = defect_location(bank.polyphase())
    report = {"command": "verify", "tol": args.tol, **report}
    _emit(report, args)
    return EXIT_OK if report["passed"] else EXIT_FAIL


def cmd_info(args) -> int:
    fmt, obj = io.load_any(args.input)
    if fmt == io.MATRIX_FORMAT:
        P = io.matrix_from_obj(obj, str(args.input))
        sym = detect_compatible_symmetry(P, zero_tol=max(args.tol, 1e-12))
        report = {"kind": "matrix", "shape": list(P.shape),
                  "support": list(P.support) if P.support else None,
                  "paraunitarity_defect": paraunitarity_defect(P),
                  "symmetry": str(sym) if sym else None}
    elif fmt == io.FILTER_FORMAT:
        spec = io.filter_from_obj(obj, str(args.input))
        report = {"kind": "filter", "dilation": spec.d, "multiplicity": spec.r,
                  "support": list(spec.symbol.support) if spec.symbol.support else None,
                  "orthogonality_defect": orthogonality_defect(spec),
                  "symmetry": io.symmetry_to_obj(spec.eps, spec.c) if spec.has_symmetry
                  else None}
    else:
        bank = io.bank_from_obj(obj, str(args.input))
        report = {"kind": "bank", "dilation": bank.d, "multiplicity": bank.lowpass.r,
                  "filters": len(bank.symbols()),
                  "paraunitarity_defect": paraunitarity_defect(bank.polyphase())}
    report = {"command": "info", **report}
    _emit(report, args)
    return EXIT_OK


# -- entry point -------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="symext",
        description="Symmetric paraunitary extension and symmetric multiwavelet filter banks.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("input", help="input JSON file")
        p.add_argument("--tol", type=float, default=1e-10, help="global tolerance (default 1e-10)")
        p.add_argument("--report", help="also write the JSON report to this path")
        p.add_argument("--quiet", action="store_true", help="do not print the report")

    p = sub.add_parser("extend", help="extend a paraunitary row block to a square matrix")
    common(p)
    p.add_argument("-o", "--output", required=True, help="output matrix file for Pe")
    p.add_argument("--cascade", help="directory for the cascade factors")
    p.set_defaults(func=cmd_extend)

    p = sub.add_parser("highpass", help="derive symmetric high-pass filters")
    common(p)
    p.add_argument("-o", "--output", required=True, help="output directory")
    p.add_argument("--cascade", help="directory for the cascade factors")
    p.add_argument("--conjugate", help="constant matrix file E; work with E a0 E")
    p.add_argument("--no-targets", action="store_true",
                   help="ignore highpass_symmetry in the filter file")
    p.set_defaults(func=cmd_highpass)

    p = sub.add_parser("verify", help="check paraunitarity and symmetry")
    common(p)
    p.add_argument("--kind", choices=["auto", "matrix", "filter", "bank"], default="auto")
    p.add_argument("--highpass", nargs="+", help="high-pass filter files completing a bank")
    p.add_argument("--against", help="reference row block for a matrix file")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("info", help="summarise a file")
    common(p)
    p.set_defaults(func=cmd_info)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except io.ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except PreconditionError as exc:
        print(f"precondition violated: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except ReductionError as exc:
        print(f"reduction failed: {exc}", file=sys.stderr)
        return EXIT_REDUCTION


if __name__ == "__main__":
    sys.exit(main())
