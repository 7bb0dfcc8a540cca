"""Symmetric ``d``-band filter banks from a symmetric orthogonal low-pass filter.

A filter is an ``r x r`` matrix symbol ``a(z) = sum_k a(k) z^k``.  The
low-pass filter carries symmetry data ``(eps_j, c_j)`` meaning::

    a0(z) = diag(eps_l z^{d c_l}) a0(1/z) diag(eps_j z^{-c_j})

High-pass filters ``a_1 .. a_{d-1}`` are obtained by symmetrising the
polyphase row of ``a0``, extending it to a square paraunitary matrix and
undoing the symmetrising transform.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import PreconditionError, ReductionError
from .extension import CascadeFactorization, extend
from .laurent import (
    LaurentMatrix,
    LaurentPoly,
    SymmetryType,
    detect_compatible_symmetry,
    mat_mul,
    paraunitarity_defect,
    sym_of,
)

SQRT1_2 = 1.0 / math.sqrt(2.0)


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x).limit_denominator(1 << 20)


def _int_exponent(x: Fraction, what: str) -> int:
    if x.denominator != 1:
        raise PreconditionError("symmetry centres", f"{what} = {x} is not an integer")
    return int(x)


@dataclass(frozen=True)
class FilterSpec:
    """A matrix filter with dilation ``d`` and optional symmetry data.

    Attributes
    ----------
    d : int
        Dilation factor, at least 2.
    symbol : LaurentMatrix
        ``r x r`` symbol ``sum_k a(k) z^k``.
    eps, c : tuple or None
        Symmetry signs and centres (``c`` as exact fractions).
    """

    d: int
    symbol: LaurentMatrix
    eps: tuple[int, ...] | None = None
    c: tuple[Fraction, ...] | None = None

    def __post_init__(self):
        if self.d < 2:
            raise PreconditionError("dilation", f"d = {self.d} must be at least 2")
        if self.symbol.rows != self.symbol.cols:
            raise PreconditionError("shape", "filter symbol must be square")
        if (self.eps is None) != (self.c is None):
            raise PreconditionError("symmetry", "eps and c must be given together")
        if self.eps is not None:
            object.__setattr__(self, "c", tuple(_frac(x) for x in self.c))
            object.__setattr__(self, "eps", tuple(int(e) for e in self.eps))
            if len(self.eps) != self.r or len(self.c) != self.r:
                raise PreconditionError("symmetry", "need one (eps, c) per row")
            if any(e not in (1, -1) for e in self.eps):
                raise PreconditionError("symmetry", "eps must be +1 or -1")

    @property
    def r(self) -> int:
        return self.symbol.rows

    @classmethod
    def from_coefficients(cls, d: int, coeffs: dict[int, np.ndarray], eps=None, c=None
                          ) -> "FilterSpec":
        r = np.atleast_2d(next(iter(coeffs.values()))).shape[0]
        return cls(d, LaurentMatrix.from_dict(coeffs, shape=(r, r), zero_tol=0.0), eps, c)

    def coefficients(self) -> dict[int, np.ndarray]:
        return self.symbol.terms()

    @property
    def has_symmetry(self) -> bool:
        return self.eps is not None


# ---------------------------------------------------------------------------
# Polyphase machinery
# ---------------------------------------------------------------------------

def subsymbols_of(symbol: LaurentMatrix, d: int) -> list[LaurentMatrix]:
    """``a_gamma(z) = sqrt(d) sum_k a(gamma + d k) z^k`` for ``gamma = 0..d-1``."""
    r, c = symbol.shape
    out = []
    terms = symbol.terms()
    for gamma in range(d):
        picked = {(k - gamma) // d: math.sqrt(d) * m for k, m in terms.items()
                  if (k - gamma) % d == 0}
        out.append(LaurentMatrix.from_dict(picked, shape=(r, c), zero_tol=0.0)
                   if picked else LaurentMatrix.zeros(r, c))
    return out


def subsymbols(a0: FilterSpec) -> list[LaurentMatrix]:
    """The ``d`` subsymbols of ``a0``."""
    return subsymbols_of(a0.symbol, a0.d)


def reassemble(subs: Sequence[LaurentMatrix], d: int) -> LaurentMatrix:
    """Inverse of ``subsymbols_of``: ``a(z) = d^{-1/2} sum_gamma a_gamma(z^d) z^gamma``."""
    shape = subs[0].shape
    terms: dict[int, np.ndarray] = {}
    for gamma, sub in enumerate(subs):
        for k, m in sub.terms().items():
            terms[gamma + d * k] = terms.get(gamma + d * k, 0) + m / math.sqrt(d)
    if not terms:
        return LaurentMatrix.zeros(*shape)
    return LaurentMatrix.from_dict(terms, shape=shape, zero_tol=0.0)


def polyphase_row(symbol: LaurentMatrix, d: int) -> LaurentMatrix:
    return LaurentMatrix.hstack(subsymbols_of(symbol, d))


def polyphase(filters: Sequence[LaurentMatrix], d: int) -> LaurentMatrix:
    """Stack the polyphase rows of ``a_0, ..., a_{d-1}``."""
    return LaurentMatrix.vstack([polyphase_row(f, d) for f in filters])


def symmetry_residual(symbol: LaurentMatrix, d: int, eps_left: Sequence[int],
                      c_left: Sequence[Fraction], eps_right: Sequence[int],
                      c_right: Sequence[Fraction]) -> float:
    """Largest coefficient of ``a(z) - diag(e z^{d c}) a(1/z) diag(e' z^{-c'})``."""
    worst = 0.0
    for l in range(symbol.rows):
        for j in range(symbol.cols):
            e = _int_exponent(d * _frac(c_left[l]) - _frac(c_right[j]), f"d c_{l} - c_{j}")
            p = symbol.entry(l, j)
            q = p.reflect().shift(e) * (eps_left[l] * eps_right[j])
            worst = max(worst, (p - q).max_abs())
    return worst


def orthogonality_defect(a0: FilterSpec) -> float:
    return paraunitarity_defect(polyphase_row(a0.symbol, a0.d))


def check_filter(a0: FilterSpec, tol: float) -> None:
    """Raise ``PreconditionError`` unless ``a0`` is orthogonal and symmetric."""
    if not a0.has_symmetry:
        raise PreconditionError("symmetry", "filter has no declared symmetry")
    for l in range(a0.r):
        for j in range(a0.r):
            _int_exponent(a0.d * a0.c[l] - a0.c[j], f"d c_{l} - c_{j}")
    res = symmetry_residual(a0.symbol, a0.d, a0.eps, a0.c, a0.eps, a0.c)
    if res > tol:
        raise PreconditionError("filter symmetry", f"residual {res:.3e}")
    orth = orthogonality_defect(a0)
    if orth > tol:
        raise PreconditionError("paraunitarity defect", f"low-pass orthogonality {orth:.3e}")


# ---------------------------------------------------------------------------
# Symmetrisation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SymmetrizationData:
    """Bookkeeping of the symmetrising transform.

    ``Q[gamma][j]`` and ``R[gamma][l][j]`` solve
    ``d c_l - c_j - gamma = d R + Q`` with ``0 <= Q < d``; ``kappa[j][gamma]``
    is the shift used when pairing ``gamma`` with ``Q``; ``shift[col]`` is
    the final monomial applied to each column and ``col_types[col]`` the
    symmetry type of the resulting column, zero columns included.
    """

    Q: tuple[tuple[int, ...], ...]
    R: tuple[tuple[tuple[int, ...], ...], ...]
    kappa: tuple[tuple[int, ...], ...]
    shift: tuple[int, ...]
    col_types: tuple[SymmetryType, ...]


def _column_support(m: LaurentMatrix, j: int) -> tuple[int, int] | None:
    return m.col(j).support


def _best_kappa(x: LaurentMatrix, y: LaurentMatrix, zero_tol: float) -> int:
    """Smallest ``kappa`` minimising the support length of ``x + z^kappa y``."""
    sx, sy = x.support, y.support
    if sx is None or sy is None:
        return 0
    best, best_len = 0, None
    for kappa in range(sx[0] - sy[1] - 1, sx[1] - sy[0] + 2):
        length = (x + y.shift(kappa)).renormalized(zero_tol).support_length
        if best_len is None or length < best_len:
            best, best_len = kappa, length
    return best


def _column_types(a0: FilterSpec, Qtab, Rtab, kappa, detected) -> list[SymmetryType]:
    """Symmetry types of the combined columns, aligned with ``detected``.

    ``a_gamma = e z^R a_Q(1/z)`` with ``e = eps_0 eps_j`` and ``R = R[gamma][0][j]``,
    so ``a_gamma +- z^kappa a_Q`` has type ``+-e z^(R + kappa)``.  Zero
    columns are undetectable, so the prediction is shifted by the gauge
    seen on the nonzero columns.
    """
    d, r = a0.d, a0.r
    pred = [SymmetryType(1, 0)] * (d * r)
    for j in range(r):
        e = a0.eps[0] * a0.eps[j]
        for gamma in range(d):
            q = Qtab[gamma][j]
            if gamma > q:
                continue
            t = SymmetryType(e, Rtab[gamma][0][j] + kappa[j][gamma])
            pred[gamma * r + j] = t
            if q != gamma:
                pred[q * r + j] = SymmetryType(-e, t.c)
    known = next(i for i, t in enumerate(detected) if not t.is_wildcard)
    gauge = detected[known] * pred[known].inverse()
    return [t if not t.is_wildcard else p * gauge for t, p in zip(detected, pred)]


def symmetrize(a0: FilterSpec, tol: float = 1e-10
               ) -> tuple[LaurentMatrix, LaurentMatrix, SymmetrizationData]:
    """Paraunitary ``U`` such that ``P = [a_0;0, ..., a_0;d-1] U`` has compatible symmetry.

    Column ``(gamma, j)`` (index ``gamma r + j``) is kept when it is its
    own mirror and otherwise combined with its mirror column
    ``(Q, j)`` as ``(a_gamma + z^kappa a_Q)/sqrt2`` and
    ``(a_gamma - z^kappa a_Q)/sqrt2``.  Each column is finally shifted by a
    monomial so that its symmetry type is ``+-1`` or ``+-1/z``, preferring
    the alignment with the most ``+-1`` columns.

    Returns
    -------
    P : LaurentMatrix
        ``r x d r``.
    U : LaurentMatrix
        ``d r x d r`` paraunitary.
    data : SymmetrizationData
    """
    check_filter(a0, tol)
    d, r = a0.d, a0.r
    subs = subsymbols(a0)
    Qtab = [[0] * r for _ in range(d)]
    Rtab = [[[0] * r for _ in range(r)] for _ in range(d)]
    for gamma in range(d):
        for j in range(r):
            qs = set()
            for l in range(r):
                val = _int_exponent(d * a0.c[l] - a0.c[j] - gamma, "d c_l - c_j - gamma")
                q = val % d
                qs.add(q)
                Rtab[gamma][l][j] = (val - q) // d
            if len(qs) != 1:
                raise PreconditionError("symmetry centres", "mirror index depends on the row")
            Qtab[gamma][j] = qs.pop()

    n = d * r
    kappa = [[0] * d for _ in range(r)]
    entries: dict[tuple[int, int], LaurentPoly] = {}
    for j in range(r):
        for gamma in range(d):
            q = Qtab[gamma][j]
            col, mirror = gamma * r + j, q * r + j
            if q == gamma:
                entries[(col, col)] = LaurentPoly([1.0])
            elif gamma < q:
                k = _best_kappa(subs[gamma].col(j), subs[q].col(j), tol)
                kappa[j][gamma], kappa[j][q] = k, -k
                entries[(col, col)] = LaurentPoly([SQRT1_2])
                entries[(mirror, col)] = LaurentPoly([SQRT1_2], k)
                entries[(col, mirror)] = LaurentPoly([SQRT1_2])
                entries[(mirror, mirror)] = LaurentPoly([-SQRT1_2], k)
    u0 = LaurentMatrix.from_entries([[entries.get((a, b), 0) for b in range(n)] for a in range(n)])
    p_a0 = LaurentMatrix.hstack(subs)
    p0 = mat_mul(p_a0, u0, zero_tol=tol)

    sym = detect_compatible_symmetry(p0, zero_tol=tol)
    if sym is None:
        raise ReductionError("symmetrised row has no compatible symmetry")
    types = _column_types(a0, Qtab, Rtab, kappa, sym.theta2)
    cs = [t.c for t in types]
    best_shift, best_score, best_g = None, -1, 0
    for g in (0, 1):
        shift = [-math.ceil((c + g) / 2) for c in cs]
        score = sum(1 for c in cs if (c + g) % 2 == 0)
        if score > best_score:
            best_shift, best_score, best_g = shift, score, g
    shifts = best_shift
    if any(shifts):
        lo, hi = min(shifts), max(shifts)
        arr = np.zeros((hi - lo + 1, n, n), dtype=complex)
        for i, sh in enumerate(shifts):
            arr[sh - lo, i, i] = 1.0
        dmat = LaurentMatrix(arr, lo, (n, n))
        u = mat_mul(u0, dmat)
        p = mat_mul(p0, dmat, zero_tol=tol)
    else:
        u, p = u0, p0
    data = SymmetrizationData(
        Q=tuple(tuple(row) for row in Qtab),
        R=tuple(tuple(tuple(x) for x in blk) for blk in Rtab),
        kappa=tuple(tuple(row) for row in kappa),
        shift=tuple(shifts),
        col_types=tuple(SymmetryType(t.eps, t.c + best_g + 2 * sh)
                        for t, sh in zip(types, shifts)),
    )
    return p, u, data


# ---------------------------------------------------------------------------
# High-pass derivation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HighPassSet:
    """High-pass symbols with their symmetry data.

    ``eps[m][l]`` and ``c[m][l]`` describe ``a_{m+1}``.  ``wavelets``
    lists, for every filter and row, the centre and sign of the matching
    wavelet component: ``psi(c - x) = eps psi(x)``.
    """

    filters: tuple[LaurentMatrix, ...]
    eps: tuple[tuple[int, ...], ...] | None = None
    c: tuple[tuple[Fraction, ...], ...] | None = None

    @property
    def wavelets(self) -> list[dict]:
        if self.eps is None:
            return []
        return [{"filter": m + 1, "component": l + 1, "centre": str(self.c[m][l]),
                 "eps": self.eps[m][l]}
                for m in range(len(self.filters)) for l in range(len(self.eps[m]))]


@dataclass(frozen=True)
class FilterBank:
    lowpass: FilterSpec
    highpass: HighPassSet

    @property
    def d(self) -> int:
        return self.lowpass.d

    def symbols(self) -> list[LaurentMatrix]:
        return [self.lowpass.symbol, *self.highpass.filters]

    def polyphase(self) -> LaurentMatrix:
        return polyphase(self.symbols(), self.d)


def _row_factors(pe: LaurentMatrix, col_types: Sequence[SymmetryType], tol: float):
    """Row factors ``rho`` with ``Sym pe[j, k] = rho_j * col_types[k]``.

    Measured against the column types the extension was built for; a
    fresh detection could pick another valid gauge for sparse rows.
    """
    out = []
    for j in range(pe.rows):
        rho = None
        for k, t in enumerate(col_types):
            p = pe.entry(j, k)
            if p.max_abs() <= tol:
                continue
            sym = sym_of(p, tol)
            cand = None if sym is None else sym * t.inverse()
            if cand is None or (rho is not None and cand != rho):
                raise ReductionError(f"extension row {j} lost compatible symmetry")
            rho = cand
        if rho is None:
            raise ReductionError(f"extension row {j} is zero")
        out.append(rho)
    return tuple(out)


def _apply_targets(pe: LaurentMatrix, r: int, d: int, a0: FilterSpec, factors,
                   targets, tol: float) -> list[int]:
    """Row order of ``pe`` realising the requested high-pass symmetry data."""
    k_low = [factors[l].c for l in range(r)]
    gauge = factors[0].eps * a0.eps[0]
    free = list(range(r, d * r))
    order = list(range(r))
    for m, (eps_m, c_m) in enumerate(targets):
        for l in range(r):
            k_need = _int_exponent(_frac(c_m[l]) - a0.c[l] + k_low[l], "target centre")
            e_need = gauge * int(eps_m[l])
            hit = next((i for i in free if factors[i].eps == e_need and factors[i].c == k_need),
                       None)
            if hit is None:
                raise PreconditionError(
                    "target symmetry",
                    f"no extension row realises eps={eps_m[l]}, c={c_m[l]} for filter {m + 1}")
            free.remove(hit)
            order.append(hit)
    return order


def derive_highpass(a0: FilterSpec, tol: float = 1e-10, targets=None
                    ) -> tuple[HighPassSet, LaurentMatrix, CascadeFactorization]:
    """High-pass filters completing ``a0`` to a symmetric paraunitary bank.

    Parameters
    ----------
    a0 : FilterSpec
        Orthogonal low-pass filter with declared symmetry.
    tol : float
    targets : sequence, optional
        ``[(eps^m, c^m), ...]`` for ``m = 1 .. d-1``.  The extension rows
        are reordered so that filter ``m`` carries exactly this symmetry;
        a ``PreconditionError`` is raised when that is impossible.
        Without targets the rows keep the order produced by the
        extension.

    Returns
    -------
    bank : HighPassSet
    PP : LaurentMatrix
        Full polyphase matrix ``Pe U*``.
    cascade : CascadeFactorization
    """
    d, r = a0.d, a0.r
    p, u, data = symmetrize(a0, tol)
    pe, cascade = extend(p, tol, col_types=data.col_types)
    factors = _row_factors(pe, cascade.symmetry.theta2, tol)
    if targets is not None:
        if len(targets) != d - 1:
            raise PreconditionError("target symmetry", f"need {d - 1} targets")
        order = _apply_targets(pe, r, d, a0, factors, targets, tol)
        pe = pe[order, :]
        factors = tuple(factors[i] for i in order)
    pp = mat_mul(pe, u.adjoint(), zero_tol=tol)

    head = pp[:r, :]
    ref = polyphase_row(a0.symbol, d)
    if head.max_abs_diff(ref) > math.sqrt(tol):
        raise ReductionError(f"low-pass row drifted by {head.max_abs_diff(ref):.3e}")

    gauge = factors[0].eps * a0.eps[0]
    filters, eps_all, c_all = [], [], []
    for m in range(1, d):
        rows = slice(m * r, (m + 1) * r)
        subs = [pp[rows, g * r:(g + 1) * r] for g in range(d)]
        filters.append(reassemble(subs, d).renormalized(tol))
        eps_all.append(tuple(gauge * factors[m * r + l].eps for l in range(r)))
        c_all.append(tuple(Fraction(factors[m * r + l].c - factors[l].c) + a0.c[l]
                           for l in range(r)))
    bank = HighPassSet(tuple(filters), tuple(eps_all), tuple(c_all))
    return bank, pp, cascade


def conjugate_bank(bank: FilterBank, E, tol: float = 1e-10) -> FilterBank:
    """Replace every filter ``a`` by ``E a E``; symmetry data is dropped.

    Raises
    ------
    PreconditionError
        If ``E`` is not unitary within ``tol``.
    """
    e = np.atleast_2d(np.asarray(E, dtype=complex))
    r = bank.lowpass.r
    if e.shape != (r, r):
        raise PreconditionError("conjugation", f"E must be {r}x{r}")
    defect = float(np.max(np.abs(e @ e.conj().T - np.eye(r))))
    if defect > tol:
        raise PreconditionError("conjugation", f"E is not unitary (defect {defect:.3e})")
    em = LaurentMatrix.constant(e)

    def conj(a: LaurentMatrix) -> LaurentMatrix:
        return mat_mul(mat_mul(em, a, zero_tol=0.0), em, zero_tol=0.0)

    low = FilterSpec(bank.d, conj(bank.lowpass.symbol))
    high = HighPassSet(tuple(conj(f) for f in bank.highpass.filters))
    return FilterBank(low, high)


def conjugate_filter(a0: FilterSpec, E, eps=None, c=None) -> FilterSpec:
    """``E a0 E`` with freshly declared symmetry data."""
    em = LaurentMatrix.constant(np.atleast_2d(np.asarray(E, dtype=complex)))
    sym = mat_mul(mat_mul(em, a0.symbol, zero_tol=0.0), em, zero_tol=0.0)
    return FilterSpec(a0.d, sym, eps, c)


# ---------------------------------------------------------------------------
# Verification
# ---------------------------------------------------------------------------

@dataclass
class BankReport:
    paraunitarity: float
    lowpass_symmetry: float | None
    highpass_symmetry: list[float | None]
    supports: list[dict]
    wavelets: list[dict]
    tol: float
    passed: bool = field(default=False)

    def as_dict(self) -> dict:
        return {
            "passed": self.passed,
            "tol": self.tol,
            "paraunitarity_defect": self.paraunitarity,
            "lowpass_symmetry_residual": self.lowpass_symmetry,
            "highpass_symmetry_residuals": self.highpass_symmetry,
            "supports": self.supports,
            "wavelets": self.wavelets,
        }


def verify_bank(bank: FilterBank, tol: float = 1e-10) -> BankReport:
    """Paraunitarity of the polyphase matrix plus every declared symmetry."""
    d = bank.d
    low = bank.lowpass
    pp_defect = paraunitarity_defect(bank.polyphase())
    low_res = None
    if low.has_symmetry:
        low_res = symmetry_residual(low.symbol, d, low.eps, low.c, low.eps, low.c)
    high_res: list[float | None] = []
    hp = bank.highpass
    for m, f in enumerate(hp.filters):
        if hp.eps is None or not low.has_symmetry:
            high_res.append(None)
        else:
            high_res.append(symmetry_residual(f, d, hp.eps[m], hp.c[m], low.eps, low.c))
    supports = [{"filter": m, "support": list(s.support) if s.support else None}
                for m, s in enumerate(bank.symbols())]
    checks = [pp_defect] + [x for x in [low_res, *high_res] if x is not None]
    report = BankReport(pp_defect, low_res, high_res, supports, hp.wavelets, tol)
    report.passed = all(x <= tol for x in checks)
    return report
