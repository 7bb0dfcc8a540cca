"""JSON file formats for matrices, filters and filter banks.

Numbers are stored as decimal strings produced by ``repr(float)``, the
shortest string that round-trips, so parse followed by serialise is
bit-exact.  Rationals are stored as ``"p/q"`` strings.
"""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path
from typing import Any

import numpy as np

from .laurent import LaurentMatrix, LaurentPoly
from .filterbank import FilterBank, FilterSpec, HighPassSet

MATRIX_FORMAT = "symext-matrix"
FILTER_FORMAT = "symext-filter"
BANK_FORMAT = "symext-bank"
VERSION = 1


class ParseError(ValueError):
    """Malformed input file."""


def _num(x: float) -> str:
    return repr(float(x))


def _complex_obj(v: complex) -> dict:
    return {"re": _num(v.real), "im": _num(v.imag)}


def _parse_float(s: Any, where: str) -> float:
    if not isinstance(s, (str, int, float)) or isinstance(s, bool):
        raise ParseError(f"{where}: expected a decimal string")
    try:
        return float(s)
    except ValueError as exc:
        raise ParseError(f"{where}: bad number {s!r}") from exc


def _parse_complex(obj: Any, where: str) -> complex:
    if not isinstance(obj, dict) or "re" not in obj:
        raise ParseError(f"{where}: expected {{re, im}}")
    return complex(_parse_float(obj["re"], where), _parse_float(obj.get("im", "0.0"), where))


def _parse_int(x: Any, where: str) -> int:
    if isinstance(x, bool) or not isinstance(x, int):
        raise ParseError(f"{where}: expected an integer")
    return x


def parse_fraction(s: Any, where: str = "c") -> Fraction:
    try:
        return Fraction(str(s))
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"{where}: bad rational {s!r}") from exc


def dumps(obj: dict) -> str:
    return json.dumps(obj, indent=1, sort_keys=False) + "\n"


def _load_json(path: str | Path) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON ({exc})") from exc
    if not isinstance(obj, dict):
        raise ParseError(f"{path}: top level must be an object")
    return obj


# -- symmetry ----------------------------------------------------------------

def symmetry_to_obj(eps, c) -> list[dict]:
    return [{"eps": int(e), "c": str(Fraction(x))} for e, x in zip(eps, c)]


def symmetry_from_obj(obj: Any, where: str) -> tuple[tuple[int, ...], tuple[Fraction, ...]]:
    if not isinstance(obj, list) or not obj:
        raise ParseError(f"{where}: expected a non-empty list of {{eps, c}}")
    eps, c = [], []
    for i, item in enumerate(obj):
        if not isinstance(item, dict) or "eps" not in item or "c" not in item:
            raise ParseError(f"{where}[{i}]: expected {{eps, c}}")
        e = _parse_int(item["eps"], f"{where}[{i}].eps")
        if e not in (1, -1):
            raise ParseError(f"{where}[{i}].eps must be 1 or -1")
        eps.append(e)
        c.append(parse_fraction(item["c"], f"{where}[{i}].c"))
    return tuple(eps), tuple(c)


# -- matrices ----------------------------------------------------------------

def matrix_to_obj(m: LaurentMatrix, symmetry: dict | None = None) -> dict:
    entries = []
    for j in range(m.rows):
        for k in range(m.cols):
            p = m.entry(j, k)
            if p.is_zero():
                continue
            entries.append({"row": j, "col": k,
                            "terms": [{"power": e, **_complex_obj(v)} for e, v in p.items()]})
    obj = {"format": MATRIX_FORMAT, "version": VERSION, "rows": m.rows, "cols": m.cols,
           "entries": entries}
    if symmetry is not None:
        obj["symmetry"] = symmetry
    return obj


def matrix_from_obj(obj: dict, where: str = "matrix") -> LaurentMatrix:
    if obj.get("format") != MATRIX_FORMAT:
        raise ParseError(f"{where}: format must be {MATRIX_FORMAT!r}")
    rows = _parse_int(obj.get("rows"), f"{where}.rows")
    cols = _parse_int(obj.get("cols"), f"{where}.cols")
    if rows <= 0 or cols <= 0:
        raise ParseError(f"{where}: empty matrix")
    grid: list[list[Any]] = [[0] * cols for _ in range(rows)]
    entries = obj.get("entries")
    if not isinstance(entries, list):
        raise ParseError(f"{where}.entries must be a list")
    for i, e in enumerate(entries):
        tag = f"{where}.entries[{i}]"
        if not isinstance(e, dict):
            raise ParseError(f"{tag}: expected an object")
        j, k = _parse_int(e.get("row"), tag + ".row"), _parse_int(e.get("col"), tag + ".col")
        if not (0 <= j < rows and 0 <= k < cols):
            raise ParseError(f"{tag}: index out of range")
        terms = e.get("terms")
        if not isinstance(terms, list):
            raise ParseError(f"{tag}.terms must be a list")
        d = {}
        for t in terms:
            if not isinstance(t, dict):
                raise ParseError(f"{tag}: bad term")
            power = _parse_int(t.get("power"), tag + ".power")
            d[power] = d.get(power, 0) + _parse_complex(t, tag)
        grid[j][k] = LaurentPoly.from_dict(d, zero_tol=0.0)
    return LaurentMatrix.from_entries(grid, zero_tol=0.0)


def load_matrix(path: str | Path) -> LaurentMatrix:
    return matrix_from_obj(_load_json(path), str(path))


# -- filters -----------------------------------------------------------------

def filter_to_obj(symbol: LaurentMatrix, d: int, eps=None, c=None, extra: dict | None = None
                  ) -> dict:
    coeffs = [{"k": k, "matrix": [[_complex_obj(v) for v in row] for row in m]}
              for k, m in sorted(symbol.terms().items()) if np.any(m != 0)]
    obj = {"format": FILTER_FORMAT, "version": VERSION, "dilation": d,
           "multiplicity": symbol.rows,
           "symmetry": symmetry_to_obj(eps, c) if eps is not None else None,
           "coefficients": coeffs}
    if extra:
        obj.update(extra)
    return obj


def spec_to_obj(spec: FilterSpec, extra: dict | None = None) -> dict:
    return filter_to_obj(spec.symbol, spec.d, spec.eps, spec.c, extra)


def _filter_parts(obj: dict, where: str):
    if obj.get("format") != FILTER_FORMAT:
        raise ParseError(f"{where}: format must be {FILTER_FORMAT!r}")
    d = _parse_int(obj.get("dilation"), f"{where}.dilation")
    r = _parse_int(obj.get("multiplicity"), f"{where}.multiplicity")
    if d < 2 or r < 1:
        raise ParseError(f"{where}: need dilation >= 2 and multiplicity >= 1")
    coeffs = obj.get("coefficients")
    if not isinstance(coeffs, list) or not coeffs:
        raise ParseError(f"{where}.coefficients must be a non-empty list")
    terms: dict[int, np.ndarray] = {}
    for i, item in enumerate(coeffs):
        tag = f"{where}.coefficients[{i}]"
        if not isinstance(item, dict):
            raise ParseError(f"{tag}: expected an object")
        k = _parse_int(item.get("k"), tag + ".k")
        mat = item.get("matrix")
        if not isinstance(mat, list) or len(mat) != r or any(
                not isinstance(row, list) or len(row) != r for row in mat):
            raise ParseError(f"{tag}.matrix must be {r}x{r}")
        arr = np.array([[_parse_complex(v, tag) for v in row] for row in mat], dtype=complex)
        terms[k] = terms.get(k, 0) + arr
    symbol = LaurentMatrix.from_dict(terms, shape=(r, r), zero_tol=0.0)
    sym = obj.get("symmetry")
    eps = c = None
    if sym is not None:
        eps, c = symmetry_from_obj(sym, f"{where}.symmetry")
        if len(eps) != r:
            raise ParseError(f"{where}.symmetry needs {r} entries")
    return d, symbol, eps, c


def filter_from_obj(obj: dict, where: str = "filter") -> FilterSpec:
    d, symbol, eps, c = _filter_parts(obj, where)
    return FilterSpec(d, symbol, eps, c)


def targets_from_obj(obj: dict, where: str = "filter"):
    """Optional ``highpass_symmetry`` list of per-filter symmetry vectors."""
    raw = obj.get("highpass_symmetry")
    if raw is None:
        return None
    if not isinstance(raw, list):
        raise ParseError(f"{where}.highpass_symmetry must be a list")
    return [symmetry_from_obj(x, f"{where}.highpass_symmetry[{i}]") for i, x in enumerate(raw)]


def load_filter_obj(path: str | Path) -> dict:
    return _load_json(path)


def load_filter(path: str | Path) -> FilterSpec:
    return filter_from_obj(_load_json(path), str(path))


def load_highpass(paths, lowpass: FilterSpec) -> HighPassSet:
    """High-pass ``FilterFile``s matching ``lowpass``."""
    filters, eps, c = [], [], []
    for p in paths:
        d, symbol, e, cc = _filter_parts(_load_json(p), str(p))
        if d != lowpass.d or symbol.rows != lowpass.r:
            raise ParseError(f"{p}: dilation or multiplicity differs from the low-pass filter")
        filters.append(symbol)
        eps.append(e)
        c.append(cc)
    if any(e is None for e in eps):
        return HighPassSet(tuple(filters))
    return HighPassSet(tuple(filters), tuple(eps), tuple(c))


def bank_to_obj(bank: FilterBank) -> dict:
    hp = bank.highpass
    highs = []
    for m, f in enumerate(hp.filters):
        eps = hp.eps[m] if hp.eps is not None else None
        c = hp.c[m] if hp.c is not None else None
        highs.append(filter_to_obj(f, bank.d, eps, c))
    return {"format": BANK_FORMAT, "version": VERSION, "lowpass": spec_to_obj(bank.lowpass),
            "highpass": highs}


def bank_from_obj(obj: dict, where: str = "bank") -> FilterBank:
    if obj.get("format") != BANK_FORMAT:
        raise ParseError(f"{where}: format must be {BANK_FORMAT!r}")
    low = filter_from_obj(obj.get("lowpass") or {}, f"{where}.lowpass")
    highs = obj.get("highpass")
    if not isinstance(highs, list):
        raise ParseError(f"{where}.highpass must be a list")
    parts = [_filter_parts(h, f"{where}.highpass[{i}]") for i, h in enumerate(highs)]
    filters = tuple(p[1] for p in parts)
    if parts and all(p[2] is not None for p in parts):
        hp = HighPassSet(filters, tuple(p[2] for p in parts), tuple(p[3] for p in parts))
    else:
        hp = HighPassSet(filters)
    return FilterBank(low, hp)


def load_any(path: str | Path) -> tuple[str, dict]:
    obj = _load_json(path)
    fmt = obj.get("format")
    if fmt not in (MATRIX_FORMAT, FILTER_FORMAT, BANK_FORMAT):
        raise ParseError(f"{path}: unknown format {fmt!r}")
    return fmt, obj


def write_json(path: str | Path, obj: dict) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps(obj))
