"""Symmetric paraunitary extension with a cascade factorization.

Given an ``r x s`` paraunitary ``P`` with compatible symmetry, ``extend``
returns an ``s x s`` paraunitary ``Pe`` whose first ``r`` rows are
``P`` together with the factors ``P_0, ..., P_{J+1}`` whose product is
``Pe``.  The procedure has three stages:

1. normalise both symmetry vectors so that every entry of
   ``Q = U1* P U2`` has type in ``{1, -1, z, -z} x {1, -1, 1/z, -1/z}``;
2. repeatedly multiply ``Q`` on the right by elementary paraunitary
   factors supported on ``[-1, 1]`` until ``Q`` is constant;
3. rotate the constant remainder to ``[I_r, 0]``.

Columns are tracked by their symmetry type rather than by literal
block permutations, so every construction below is written over index
sets.  Column order is restored to the standard grouping at the end of
each reduction pass.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import PreconditionError, ReductionError
from .laurent import (
    CompatibleSymmetry,
    LaurentMatrix,
    SymmetryType,
    detect_compatible_symmetry,
    mat_mul,
    mutually_compatible,
    paraunitarity_defect,
    sym_of,
)
from .unitary import paired_reduce, reduce_matrix, unit_completion

# Column types in standard order and the row types that pair with them.
COL_TYPES = (SymmetryType(1, 0), SymmetryType(-1, 0), SymmetryType(1, -1), SymmetryType(-1, -1))
ROW_TYPES = tuple(t.inverse() for t in COL_TYPES)

Observer = Callable[[str, dict], None]


@dataclass(frozen=True)
class StandardSymmetrySplit:
    """Block sizes of the standard pattern.

    ``Sym Q = [1_{r1}, -1_{r2}, z 1_{r3}, -z 1_{r4}]^T
    [1_{s1}, -1_{s2}, z^-1 1_{s3}, -z^-1 1_{s4}]``.
    """

    r: tuple[int, int, int, int]
    s: tuple[int, int, int, int]

    @property
    def rows(self) -> int:
        return sum(self.r)

    @property
    def cols(self) -> int:
        return sum(self.s)

    def row_types(self) -> list[SymmetryType]:
        return [t for t, n in zip(ROW_TYPES, self.r) for _ in range(n)]

    def col_types(self) -> list[SymmetryType]:
        return [t for t, n in zip(COL_TYPES, self.s) for _ in range(n)]

    def with_cols(self, s: Sequence[int]) -> "StandardSymmetrySplit":
        return StandardSymmetrySplit(self.r, tuple(int(x) for x in s))

    def as_dict(self) -> dict:
        return {"r": list(self.r), "s": list(self.s)}


@dataclass(frozen=True)
class CascadeFactorization:
    """``Pe = P_{J+1} ... P_1 P_0`` with ``P_0 = U2*`` and ``P_{J+1} = diag(U1, I)``.

    ``factors`` lists ``P_0`` first.  ``J`` counts the support-reduction
    passes; when ``J == 0`` and the final constant rotation is not the
    identity it is stored as an extra constant factor.
    """

    factors: tuple[LaurentMatrix, ...]
    J: int
    split_history: tuple[StandardSymmetrySplit, ...]
    symmetry: CompatibleSymmetry | None = None

    @property
    def middle(self) -> tuple[LaurentMatrix, ...]:
        """Factors strictly between ``P_0`` and ``P_{J+1}``."""
        return self.factors[1:-1]

    def product(self) -> LaurentMatrix:
        out = self.factors[0]
        for f in self.factors[1:]:
            out = mat_mul(f, out, zero_tol=0.0)
        return out


# ---------------------------------------------------------------------------
# Initialization
# ---------------------------------------------------------------------------

def _standard_type(t: SymmetryType) -> SymmetryType:
    """Type after multiplication by ``z**(-ceil(c/2))``."""
    return SymmetryType(t.eps, t.c - 2 * math.ceil(t.c / 2))


def _stable_regroup(types: Sequence[SymmetryType], order: Sequence[SymmetryType]) -> list[int]:
    """``perm[i]`` is the new position of index ``i`` after stable grouping."""
    rank = {t: n for n, t in enumerate(order)}
    new_order = sorted(range(len(types)), key=lambda i: (rank[types[i]], i))
    perm = [0] * len(types)
    for pos, i in enumerate(new_order):
        perm[i] = pos
    return perm


def standard_counts(theta: Sequence[SymmetryType]) -> tuple[int, int, int, int]:
    """Sizes ``n1..n4`` of the four groups produced by ``normalizer_for``."""
    std = [_standard_type(t) for t in theta]
    return tuple(sum(1 for t in std if t == ref) for ref in COL_TYPES)  # type: ignore[return-value]


def normalizer_for(theta: Sequence[SymmetryType]) -> LaurentMatrix:
    """``U = diag(z^{-ceil(c_k/2)}) E`` regrouping ``theta U`` into standard order.

    Raises
    ------
    PreconditionError
        If ``theta`` still contains a wildcard.
    """
    if any(t.is_wildcard for t in theta):
        raise PreconditionError("unresolved wildcard", "resolve symmetry placeholders first")
    n = len(theta)
    std = [_standard_type(t) for t in theta]
    perm = _stable_regroup(std, COL_TYPES)
    shifts = [-math.ceil(t.c / 2) for t in theta]
    if n == 0:
        return LaurentMatrix.zeros(0, 0)
    lo, hi = min(shifts), max(shifts)
    arr = np.zeros((hi - lo + 1, n, n), dtype=complex)
    for k in range(n):
        arr[shifts[k] - lo, k, perm[k]] = 1.0
    return LaurentMatrix(arr, lo, (n, n))


def _permutation(perm: Sequence[int]) -> np.ndarray:
    n = len(perm)
    e = np.zeros((n, n), dtype=complex)
    for i, p in enumerate(perm):
        e[i, p] = 1.0
    return e


# ---------------------------------------------------------------------------
# Elementary factors
# ---------------------------------------------------------------------------

def _infer_row_type(q: LaurentMatrix, col_types: Sequence[SymmetryType], tol: float) -> SymmetryType:
    found = None
    for k, tau in enumerate(col_types):
        t = sym_of(q.entry(0, k), tol)
        if t is None:
            raise PreconditionError("invalid standard form", f"entry {k} has no symmetry")
        if t.is_wildcard:
            continue
        rho = t * tau.inverse()
        if found is None:
            found = rho
        elif rho != found:
            raise PreconditionError("invalid standard form", "row symmetry is not compatible")
    if found is None:
        raise PreconditionError("invalid standard form", "zero row")
    return found


def _check_unit_row(q: LaurentMatrix, tol: float) -> None:
    defect = paraunitarity_defect(q)
    if defect > tol:
        raise PreconditionError("norm defect", f"|q q* - 1| = {defect:.3e}")


def _complement_rows(bs: np.ndarray, idx: np.ndarray, vec: np.ndarray, c: float, tol: float) -> int:
    """Write the unitary completion of ``vec`` into rows ``idx``; return the pivot row."""
    v, piv = unit_completion(vec, tol)
    for j in range(idx.size):
        if j != piv:
            bs[1, idx[j], idx] = c * np.conj(v[:, j])
    return int(idx[piv]) if piv >= 0 else -1


def _idx(mask) -> np.ndarray:
    return np.flatnonzero(np.asarray(mask, dtype=bool))


def _monomial_diag(shifts: Sequence[int]) -> LaurentMatrix:
    n = len(shifts)
    lo, hi = min(shifts), max(shifts)
    arr = np.zeros((hi - lo + 1, n, n), dtype=complex)
    for k, sh in enumerate(shifts):
        arr[sh - lo, k, k] = 1.0
    return LaurentMatrix(arr, lo, (n, n))


def _assemble_bq(s: int, sets, vecs, c0: complex, tol: float) -> LaurentMatrix:
    """``B0`` from the leading blocks ``f1, f2`` and next blocks ``g1, g2``."""
    F1, F2, G1, G2 = sets
    f1, f2, g1, g2 = vecs
    cf1 = np.linalg.norm(f1)
    cg1 = np.linalg.norm(g1) if g1.size else 0.0
    cg2 = np.linalg.norm(g2) if g2.size else 0.0
    c = math.sqrt(4 * cf1 ** 2 + 2 * cg1 ** 2 + 2 * cg2 ** 2 + abs(c0) ** 2)

    bs = np.zeros((3, s, s), dtype=complex)  # degrees -1, 0, 1 of B0*
    p = _complement_rows(bs, F1, f1, c, tol)
    bs[2, p, F1] += f1
    bs[1, p, F1] += (c0 / cf1) * f1
    bs[0, p, F1] += f1
    bs[2, p, F2] += f2
    bs[0, p, F2] -= f2
    bs[1, p, G1] += g1
    bs[0, p, G1] += g1
    bs[1, p, G2] += g2
    bs[0, p, G2] -= g2

    p = _complement_rows(bs, F2, f2, c, tol)
    bs[2, p, F1] -= f1
    bs[0, p, F1] += f1
    bs[2, p, F2] -= f2
    bs[1, p, F2] += (c0 / cf1) * f2
    bs[0, p, F2] -= f2
    bs[1, p, G1] -= g1
    bs[0, p, G1] += g1
    bs[1, p, G2] -= g2
    bs[0, p, G2] -= g2

    for G, g, cg, sign in ((G1, g1, cg1, -1.0), (G2, g2, cg2, 1.0)):
        if G.size == 0:
            continue
        p = _complement_rows(bs, G, g, c, tol)
        if p < 0:
            bs[1, G, G] = c
            continue
        a = cg / cf1
        if sign < 0:  # G1 row: f1 (1 + z), -f2 (1 - z)
            bs[1, p, F1] += a * f1
            bs[2, p, F1] += a * f1
            bs[1, p, F2] -= a * f2
            bs[2, p, F2] += a * f2
        else:  # G2 row: f1 (1 - z), -f2 (1 + z)
            bs[1, p, F1] += a * f1
            bs[2, p, F1] -= a * f1
            bs[1, p, F2] -= a * f2
            bs[2, p, F2] -= a * f2
        kappa = (sign * 2 * cf1 - np.conj(c0)) / cg
        bs[1, p, G] += kappa * g

    return LaurentMatrix(bs / c, -1, (s, s)).adjoint()


def build_Bq(q: LaurentMatrix, split: StandardSymmetrySplit, tol: float = 1e-10,
             row_type: SymmetryType | None = None) -> LaurentMatrix:
    """Paraunitary ``B`` shrinking the support of the unit row ``q`` by two.

    ``q`` is a ``1 x s`` row whose entries follow the standard column
    pattern of ``split``.  The result has support in ``[-1, 1]``,
    the standard compatible symmetry, and ``q B`` keeps the symmetry of
    ``q`` on ``[l1 + 1, l2 - 1]``.

    Raises
    ------
    PreconditionError
        If ``q`` is not a unit row in standard form or its support is
        shorter than two.
    """
    col_types = split.col_types()
    if q.shape != (1, len(col_types)):
        raise PreconditionError("invalid standard form", f"row shape {q.shape}")
    _check_unit_row(q, tol)
    if q.support_length < 2:
        raise PreconditionError("invalid standard form", "support shorter than 2")
    rho = row_type if row_type is not None else _infer_row_type(q, col_types, tol)
    l1, l2 = q.support
    types = [rho * t for t in col_types]
    c_hi = rho.c
    cs = np.array([t.c for t in types])
    eps = np.array([t.eps for t in types])
    if l1 + l2 == c_hi:
        f_mask, shifted = cs == c_hi, False
    elif l1 + l2 == c_hi - 1:
        f_mask, shifted = cs == c_hi - 1, True
    else:
        raise PreconditionError("invalid standard form", f"support [{l1},{l2}] off centre")
    g_mask = ~f_mask
    s = len(col_types)
    shifts = [-1 if (shifted and g_mask[k]) else 0 for k in range(s)]
    d = _monomial_diag(shifts) if shifted else None
    q0 = mat_mul(q, d) if shifted else q

    F1, F2 = _idx(f_mask & (eps > 0)), _idx(f_mask & (eps < 0))
    G1, G2 = _idx(g_mask & (eps > 0)), _idx(g_mask & (eps < 0))
    top = q0.coeff(l2)[0]
    nxt = q0.coeff(l2 - 1)[0]
    f1, f2 = top[F1], top[F2]
    g1, g2 = nxt[G1], nxt[G2]
    cf1 = np.linalg.norm(f1)
    cg1 = np.linalg.norm(g1) if g1.size else 0.0
    cg2 = np.linalg.norm(g2) if g2.size else 0.0
    if cf1 <= tol or np.linalg.norm(f2) <= tol:
        raise PreconditionError("invalid standard form", "leading block vanishes")
    if cg1 <= tol:
        g1, cg1 = np.zeros_like(g1), 0.0
    if cg2 <= tol:
        g2, cg2 = np.zeros_like(g2), 0.0
    # Project onto the identities q q* = 1 imposes at the two outer degrees,
    # ||f1|| = ||f2|| and 2 ||f|| Re c0 = ||g2||^2 - ||g1||^2; rounding
    # otherwise breaks paraunitarity of B when ||f|| is small.
    cf = math.sqrt(0.5 * (cf1 ** 2 + np.linalg.norm(f2) ** 2))
    f1 = f1 * (cf / cf1)
    f2 = f2 * (cf / np.linalg.norm(f2))
    c0 = complex(q0.coeff(l1 + 1)[0] @ np.conj(top)) / cf1
    c0 = complex((cg2 ** 2 - cg1 ** 2) / (2 * cf), c0.imag)
    b0 = _assemble_bq(s, (F1, F2, G1, G2), (f1, f2, g1, g2), c0, tol)
    if not shifted:
        return b0
    return mat_mul(mat_mul(d, b0), d.adjoint())


def build_Bq1q2(q1: LaurentMatrix, q2: LaurentMatrix, k: int, split: StandardSymmetrySplit,
                tol: float = 1e-10, row_type: SymmetryType | None = None) -> LaurentMatrix:
    """Paraunitary ``B`` shrinking an orthonormal pair to ``[-k+1, k-1]``.

    ``q1`` is a row of type ``+-1`` with ``coeff(q1, -k) != 0`` and ``q2``
    a row of type ``+-z`` with ``coeff(q2, k) != 0``; both are supported in
    ``[-k, k]`` with the pattern left after the single-row reductions.

    Raises
    ------
    PreconditionError
        On a norm defect, ``k < 1``, or a vanishing block.
    """
    col_types = split.col_types()
    s = len(col_types)
    if k < 1:
        raise PreconditionError("invalid pair", "k must be at least 1")
    _check_unit_row(q1, tol)
    _check_unit_row(q2, tol)
    rho = row_type if row_type is not None else _infer_row_type(q1, col_types, tol)
    types = [rho * t for t in col_types]
    sets = [_idx([t == ref for t in types]) for ref in COL_TYPES]
    S1, S2, S3, S4 = sets
    top2 = q2.coeff(k)[0]
    bot1 = q1.coeff(-k)[0]
    g1, g2 = top2[S1], top2[S2]
    g3, g4 = bot1[S3], -bot1[S4]
    cg1 = np.linalg.norm(g1) if g1.size else 0.0
    cg3 = np.linalg.norm(g3) if g3.size else 0.0
    norms = [cg1, np.linalg.norm(g2) if g2.size else 0.0, cg3, np.linalg.norm(g4) if g4.size else 0.0]
    if min(norms) <= tol:
        raise PreconditionError("invalid pair", "a leading block vanishes")
    c0 = complex(q1.coeff(-k + 1)[0] @ np.conj(top2)) / cg1
    c = math.sqrt(abs(c0) ** 2 + 4 * cg3 ** 2)

    bs = np.zeros((3, s, s), dtype=complex)
    p = _complement_rows(bs, S1, g1, c, tol)
    bs[1, p, S1] += (c0 / cg1) * g1
    bs[1, p, S3] += g3
    bs[0, p, S3] += g3
    bs[1, p, S4] += g4
    bs[0, p, S4] -= g4

    p = _complement_rows(bs, S2, g2, c, tol)
    bs[1, p, S2] += (c0 / cg1) * g2
    bs[1, p, S3] -= g3
    bs[0, p, S3] += g3
    bs[1, p, S4] -= g4
    bs[0, p, S4] -= g4

    a = cg3 / cg1
    p = _complement_rows(bs, S3, g3, c, tol)
    bs[1, p, S1] += a * g1
    bs[2, p, S1] += a * g1
    bs[1, p, S2] -= a * g2
    bs[2, p, S2] += a * g2
    bs[1, p, S3] -= (np.conj(c0) / cg3) * g3

    p = _complement_rows(bs, S4, g4, c, tol)
    bs[1, p, S1] += a * g1
    bs[2, p, S1] -= a * g1
    bs[1, p, S2] -= a * g2
    bs[2, p, S2] -= a * g2
    bs[1, p, S4] -= (np.conj(c0) / cg3) * g4

    return LaurentMatrix(bs / c, -1, (s, s)).adjoint()


def build_BQ1(Q1: LaurentMatrix, k: int, split: StandardSymmetrySplit, tol: float = 1e-10
              ) -> tuple[LaurentMatrix, StandardSymmetrySplit]:
    """Clear the one remaining end coefficient of ``Q1`` at degree ``k`` or ``-k``.

    Returns the factor (including the final regrouping permutation) and
    the new split.  When both end coefficients vanish the factor is the
    identity.

    Raises
    ------
    ReductionError
        If both end coefficients are nonzero.
    """
    col_types = split.col_types()
    s = len(col_types)
    top = Q1.coeff(k)
    bot = Q1.coeff(-k)
    top_nz = top.size and np.max(np.abs(top)) > tol
    bot_nz = bot.size and np.max(np.abs(bot)) > tol
    if top_nz and bot_nz:
        raise ReductionError(f"both end coefficients at +-{k} are nonzero")
    if not top_nz and not bot_nz:
        return LaurentMatrix.identity(s), split
    sets = [_idx([t == ref for t in col_types]) for ref in COL_TYPES]
    if top_nz:
        a_set, b_set = sets[0], sets[1]
        x1, x2 = top[:, a_set], top[:, b_set]
        # U1 = (1 + 1/z)/2, U2 = -(1 - 1/z)/2
        same = {0: 0.5, -1: 0.5}
        cross = {0: -0.5, -1: 0.5}
        new_a, new_b = COL_TYPES[2], COL_TYPES[3]
    else:
        a_set, b_set = sets[2], sets[3]
        x1, x2 = bot[:, a_set], -bot[:, b_set]
        # U3 = (1 + z)/2, U4 = (1 - z)/2
        same = {0: 0.5, 1: 0.5}
        cross = {0: 0.5, 1: -0.5}
        new_a, new_b = COL_TYPES[0], COL_TYPES[1]
    try:
        u1, u2, _, m = paired_reduce(x1, x2, tol)
    except ValueError as exc:
        raise ReductionError(f"paired reduction failed: {exc}") from exc
    w0 = np.eye(s, dtype=complex)
    w0[np.ix_(a_set, a_set)] = u1
    w0[np.ix_(b_set, b_set)] = u2
    w = np.zeros((3, s, s), dtype=complex)  # degrees -1, 0, 1
    w[1] = np.eye(s)
    new_types = list(col_types)
    for i in range(m):
        pa, pb = a_set[i], b_set[i]
        w[1, pa, pa] = w[1, pb, pb] = 0.0
        for deg, val in same.items():
            w[deg + 1, pa, pa] = val
            w[deg + 1, pb, pb] = val
        for deg, val in cross.items():
            w[deg + 1, pb, pa] = val
            w[deg + 1, pa, pb] = val
        new_types[pa], new_types[pb] = new_a, new_b
    perm = _stable_regroup(new_types, COL_TYPES)
    e = _permutation(perm)
    b = mat_mul(mat_mul(LaurentMatrix.constant(w0), LaurentMatrix(w, -1, (s, s))),
                LaurentMatrix.constant(e))
    counts = tuple(sum(1 for t in new_types if t == ref) for ref in COL_TYPES)
    return b, split.with_cols(counts)


# ---------------------------------------------------------------------------
# Support reduction and finalization
# ---------------------------------------------------------------------------

def _nonzero(m: np.ndarray, tol: float) -> bool:
    return bool(m.size) and float(np.max(np.abs(m))) > tol


def _row_supports(Q: LaurentMatrix) -> list[tuple[int, int] | None]:
    return [Q.row(j).support for j in range(Q.rows)]


def _deflate(Q: LaurentMatrix, bounds: Sequence[tuple[int, int] | None], tol: float
             ) -> tuple[LaurentMatrix, float]:
    """Zero the coefficients of row ``j`` outside ``bounds[j]``.

    The factor properties guarantee these coefficients vanish; in floating
    point they carry rounding amplified by small leading coefficients and
    would otherwise be mistaken for data by later zero tests.

    Returns the deflated matrix and the largest discarded magnitude.

    Raises
    ------
    ReductionError
        If a discarded coefficient exceeds ``sqrt(tol)``.
    """
    if Q.is_zero():
        return Q, 0.0
    worst = 0.0
    arr = np.array(Q.stack)
    degrees = np.arange(Q.low, Q.low + arr.shape[0])
    for j, b in enumerate(bounds):
        out = np.ones(degrees.size, dtype=bool) if b is None else (
            (degrees < b[0]) | (degrees > b[1]))
        if not out.any():
            continue
        lost = float(np.max(np.abs(arr[out, j, :]))) if arr.shape[2] else 0.0
        if lost > math.sqrt(tol):
            raise ReductionError(f"factor left a residual of {lost:.3e} in row {j}")
        arr[out, j, :] = 0.0
        worst = max(worst, lost)
    return LaurentMatrix(arr, Q.low, Q.shape, zero_tol=tol), worst


def _clip_factor(a: LaurentMatrix, tol: float) -> LaurentMatrix:
    """Drop rounding outside ``[-1, 1]`` from a factor that lies there in theory."""
    if a.is_zero() or (a.low >= -1 and a.high <= 1):
        return a
    arr = np.array(a.stack)
    degrees = np.arange(a.low, a.low + arr.shape[0])
    out = (degrees < -1) | (degrees > 1)
    lost = float(np.max(np.abs(arr[out])))
    if lost > math.sqrt(tol):
        raise ReductionError(f"factor exceeds support [-1, 1] by {lost:.3e}")
    arr[out] = 0.0
    return LaurentMatrix(arr, a.low, a.shape, zero_tol=0.0)


def support_reduction(Q: LaurentMatrix, split: StandardSymmetrySplit, tol: float = 1e-10,
                      observer: Observer | None = None):
    """Reduce ``Q`` to a constant matrix by elementary factors.

    Returns
    -------
    factors : list of LaurentMatrix
        ``A_1, ..., A_J`` with ``Q A_1 ... A_J`` constant.
    Q_final : LaurentMatrix
    history : list of StandardSymmetrySplit
        The split before every pass followed by the final split.

    Raises
    ------
    ReductionError
        If a pass fails to shorten the support.
    """
    notify = observer or (lambda kind, info: None)
    row_types = split.row_types()
    r = split.rows
    s = split.cols
    r12 = split.r[0] + split.r[1]
    factors: list[LaurentMatrix] = []
    history = [split]
    Q = Q.renormalized(tol)
    # Zero tests use tol raised to 100 times the largest rounding residual
    # removed so far; small leading coefficients amplify rounding per pass.
    floor = tol

    def deflate(m: LaurentMatrix, bounds) -> LaurentMatrix:
        nonlocal floor
        m, lost = _deflate(m, bounds, tol)
        floor = max(floor, 100.0 * lost)
        return m.renormalized(floor)

    while Q.support_length > 0:
        k1, k2 = Q.support
        a = LaurentMatrix.identity(s)
        q_cur = Q
        if k2 == -k1:
            k = k2
            for j in range(r):
                q = q_cur.row(j)
                p = Q.row(j)
                if q.is_zero() or q.support != p.support:
                    continue
                l1, l2 = q.support
                if l2 - l1 >= 2 and (l1 == k1 or l2 == k2):
                    b = build_Bq(q, split, floor, row_type=row_types[j])
                    notify("Bq", {"q": q, "B": b, "Q": q_cur, "row": j, "split": split})
                    a = mat_mul(a, b)
                    bounds = _row_supports(q_cur)
                    bounds[j] = (l1 + 1, l2 - 1)
                    q_cur = deflate(mat_mul(q_cur, b, zero_tol=0.0), bounds)
            j1, j2 = 0, r12
            while j1 < r12 and j2 < r:
                q1 = q_cur.row(j1)
                q2 = q_cur.row(j2)
                n1 = _nonzero(q1.coeff(k1), floor)
                n2 = _nonzero(q2.coeff(k2), floor)
                if not n1:
                    j1 += 1
                if not n2:
                    j2 += 1
                if n1 and n2:
                    b = build_Bq1q2(q1, q2, k, split, floor, row_type=row_types[j1])
                    notify("Bq1q2", {"q1": q1, "q2": q2, "B": b, "Q": q_cur, "k": k,
                                     "rows": (j1, j2), "split": split})
                    a = mat_mul(a, b)
                    bounds = _row_supports(q_cur)
                    bounds[j1] = bounds[j2] = (-k + 1, k - 1)
                    q_cur = deflate(mat_mul(q_cur, b, zero_tol=0.0), bounds)
                    j1 += 1
                    j2 += 1
        else:
            k = max(k2, -k1)
        b, new_split = build_BQ1(q_cur, k, split, floor)
        notify("BQ1", {"Q1": q_cur, "B": b, "k": k, "split": split, "new_split": new_split})
        a = mat_mul(a, b)
        new_q = deflate(mat_mul(q_cur, b, zero_tol=0.0), [(max(k1, -k + 1), min(k2, k - 1))] * r)
        if new_q.support_length >= Q.support_length:
            raise ReductionError(
                f"support did not shrink: {Q.support} -> {new_q.support}")
        factors.append(_clip_factor(a, tol))
        Q = new_q
        split = new_split
        history.append(split)
    return factors, Q, history


def finalize(Qc: LaurentMatrix, split: StandardSymmetrySplit, tol: float = 1e-10) -> np.ndarray:
    """Constant unitary ``U`` with ``Qc U = [I_r, 0]``.

    ``Qc`` must be constant and block diagonal with respect to ``split``.

    Raises
    ------
    ReductionError
        If ``Qc`` is not constant, breaks the block structure, or its
        blocks do not have orthonormal rows.
    """
    r, s = split.rows, split.cols
    if Qc.support_length > 0 or (Qc.support is not None and Qc.support != (0, 0)):
        raise ReductionError(f"terminal matrix is not constant: support {Qc.support}")
    q = Qc.coeff(0)
    rows = split.row_types()
    cols = split.col_types()
    u = np.eye(s, dtype=complex)
    lead: list[int] = [0] * r
    mask = np.zeros((r, s), dtype=bool)
    for rt, ct in zip(ROW_TYPES, COL_TYPES):
        ri = _idx([t == rt for t in rows])
        ci = _idx([t == ct for t in cols])
        mask[np.ix_(ri, ci)] = True
        if ri.size == 0:
            continue
        if ri.size > ci.size:
            raise ReductionError("block has more rows than columns")
        f = q[np.ix_(ri, ci)]
        uf, _, m = reduce_matrix(f, tol)
        if m != ri.size:
            raise ReductionError(f"terminal block has rank {m} < {ri.size}")
        u[np.ix_(ci, ci)] = uf
        for n, j in enumerate(ri):
            lead[j] = int(ci[n])
    off = float(np.max(np.abs(q[~mask]))) if (~mask).any() else 0.0
    if off > tol:
        raise ReductionError(f"terminal matrix breaks block structure by {off:.3e}")
    rest = [c for c in range(s) if c not in set(lead)]
    order = lead + rest
    out = u[:, order]
    defect = float(np.max(np.abs(q @ out - np.eye(r, s)))) if r else 0.0
    if defect > math.sqrt(tol):
        raise ReductionError(f"terminal rotation misses [I, 0] by {defect:.3e}")
    return out


# ---------------------------------------------------------------------------
# Driver
# ---------------------------------------------------------------------------

def _resolve(theta: Sequence[SymmetryType], hint: Sequence[SymmetryType] | None = None
             ) -> tuple[SymmetryType, ...]:
    if hint is None:
        hint = [SymmetryType(1, 0)] * len(theta)
    else:
        # align the hint with the gauge of the detected types
        known = [k for k, t in enumerate(theta) if not t.is_wildcard]
        if known:
            g = theta[known[0]] * hint[known[0]].inverse()
            hint = [h * g for h in hint]
    return tuple(h if t.is_wildcard else t for t, h in zip(theta, hint))


def extend(P: LaurentMatrix, tol: float = 1e-10, observer: Observer | None = None,
           col_types: Sequence[SymmetryType] | None = None
           ) -> tuple[LaurentMatrix, CascadeFactorization]:
    """Extend ``P`` to a square paraunitary matrix with compatible symmetry.

    Parameters
    ----------
    P : LaurentMatrix
        ``r x s`` with ``r <= s``, paraunitary within ``tol`` and with
        compatible symmetry.
    tol : float
        Global tolerance for zero tests, ranks and checks.
    observer : callable, optional
        Called as ``observer(kind, info)`` after every elementary factor.
    col_types : sequence of SymmetryType, optional
        Types assumed for zero columns of ``P``, whose symmetry is
        otherwise free (default ``1``).  Nonzero columns ignore it.

    Returns
    -------
    Pe : LaurentMatrix
        ``s x s``; its first ``r`` rows reproduce ``P``.
    cascade : CascadeFactorization

    Raises
    ------
    PreconditionError
        Non-paraunitary input, ``r > s``, or no compatible symmetry.
    ReductionError
        A reduction step broke down (typically a tolerance problem).
    """
    r, s = P.shape
    if r > s:
        raise PreconditionError("shape", f"need rows <= cols, got {P.shape}")
    defect = paraunitarity_defect(P)
    if defect > tol:
        raise PreconditionError("paraunitarity defect", f"{defect:.3e} > {tol:.1e}")
    P = P.renormalized(tol)
    sym = detect_compatible_symmetry(P, zero_tol=tol)
    if sym is None:
        raise PreconditionError("compatible symmetry", "no (theta1, theta2) reproduces Sym P")
    if col_types is not None and len(col_types) != s:
        raise PreconditionError("shape", f"need {s} column types, got {len(col_types)}")
    theta1, theta2 = _resolve(sym.theta1), _resolve(sym.theta2, col_types)
    u1 = normalizer_for(theta1)
    u2 = normalizer_for(theta2)
    split = StandardSymmetrySplit(standard_counts(theta1), standard_counts(theta2))
    Q = mat_mul(mat_mul(u1.adjoint(), P), u2, zero_tol=tol)

    a_list, q_final, history = support_reduction(Q, split, tol, observer)
    u_fin = finalize(q_final, history[-1], tol)
    u_mat = LaurentMatrix.constant(u_fin)

    factors = [u2.adjoint()]
    if a_list:
        a_list[-1] = mat_mul(a_list[-1], u_mat)
        factors += [a.adjoint() for a in a_list]
    elif not np.allclose(u_fin, np.eye(s), atol=0.0, rtol=0.0):
        factors.append(u_mat.adjoint())
    factors.append(LaurentMatrix.block_diag(u1, LaurentMatrix.identity(s - r)))
    cascade = CascadeFactorization(tuple(factors), len(a_list), tuple(history),
                                   CompatibleSymmetry(theta1, theta2))
    pe = cascade.product().renormalized(tol)
    head = pe[:r, :]
    if head.max_abs_diff(P) > math.sqrt(tol):
        raise ReductionError(f"extension misses P by {head.max_abs_diff(P):.3e}")
    return pe, cascade


# ---------------------------------------------------------------------------
# Contract checks
# ---------------------------------------------------------------------------

def support_control(P: LaurentMatrix, Pe: LaurentMatrix) -> list[dict]:
    """Column-wise support bound: every entry of ``Pe[:, k]`` vs ``max_n |supp P[n, k]|``.

    A zero column of ``P`` gets bound 0: a paraunitary ``Pe`` cannot have
    a zero column, and the extension fills it with constants.
    """
    table = []
    for k in range(P.cols):
        bound = max(max(P.entry(n, k).support_length for n in range(P.rows)), 0)
        worst = max(Pe.entry(j, k).support_length for j in range(Pe.rows))
        table.append({"column": k, "bound": bound, "extension": worst, "ok": worst <= bound})
    return table


@dataclass
class CascadeReport:
    """Outcome of the cascade checks on one extension."""

    reproduces_P: float
    paraunitarity: float
    product_error: float
    middle_supports_ok: bool
    middle_defect: float
    mutually_compatible: bool
    end_factors_ok: bool
    J: int
    J_bound: int
    support_control_ok: bool
    notes: list[str] = field(default_factory=list)

    def ok(self, tol: float) -> bool:
        return (self.reproduces_P <= tol and self.paraunitarity <= tol
                and self.product_error <= tol and self.middle_supports_ok
                and self.middle_defect <= tol and self.mutually_compatible
                and self.end_factors_ok and self.J <= self.J_bound
                and self.support_control_ok)


def _is_monomial_permutation(m: LaurentMatrix, tol: float) -> bool:
    total = np.sum(np.abs(m.stack) > tol, axis=0)
    if not (np.all(total.sum(axis=0) == 1) and np.all(total.sum(axis=1) == 1)):
        return False
    vals = np.abs(m.stack)[np.abs(m.stack) > tol]
    return bool(np.all(np.abs(vals - 1) <= tol))


def j_bound(P: LaurentMatrix) -> int:
    lengths = [P.entry(j, k).support_length for j in range(P.rows) for k in range(P.cols)]
    finite = [int(x) for x in lengths if x != float("-inf")]
    return max((math.ceil(x / 2) for x in finite), default=0)


def check_cascade(P: LaurentMatrix, Pe: LaurentMatrix, cascade: CascadeFactorization,
                  tol: float = 1e-9) -> CascadeReport:
    """Evaluate the extension contract on a finished run."""
    r = P.rows
    middle = cascade.middle
    supports_ok = all(f.support is None or (f.support[0] >= -1 and f.support[1] <= 1)
                      for f in middle)
    middle_defect = max((paraunitarity_defect(f) for f in middle), default=0.0)
    factors = cascade.factors
    compat = all(mutually_compatible(factors[i + 1], factors[i], zero_tol=1e-8)
                 for i in range(len(factors) - 1))
    ends = (_is_monomial_permutation(factors[0], tol)
            and _is_monomial_permutation(factors[-1], tol))
    table = support_control(P, Pe)
    return CascadeReport(
        reproduces_P=Pe[:r, :].max_abs_diff(P),
        paraunitarity=paraunitarity_defect(Pe),
        product_error=cascade.product().max_abs_diff(Pe),
        middle_supports_ok=supports_ok,
        middle_defect=middle_defect,
        mutually_compatible=compat,
        end_factors_ok=ends,
        J=cascade.J,
        J_bound=j_bound(P),
        support_control_ok=all(row["ok"] for row in table),
    )
