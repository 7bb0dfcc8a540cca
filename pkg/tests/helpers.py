"""Shared builders for tests: random symmetric paraunitary inputs and standard rows."""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np

from symext.laurent import LaurentMatrix, LaurentPoly, SymmetryType, mat_mul, sym_of

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"

SQ = 1.0 / math.sqrt(2.0)


def random_unitary(n: int, rng: np.random.Generator, complex_: bool = True) -> np.ndarray:
    """Haar-distributed unitary (orthogonal when ``complex_`` is false)."""
    a = rng.standard_normal((n, n))
    if complex_:
        a = a + 1j * rng.standard_normal((n, n))
    q, r = np.linalg.qr(a)
    d = np.diag(r)
    return q * (d / np.abs(d))


def type_preserving_unitary(types, rng, complex_=True) -> LaurentMatrix:
    """Constant unitary mixing only coordinates that share a symmetry type."""
    n = len(types)
    u = np.zeros((n, n), dtype=complex)
    groups: dict[SymmetryType, list[int]] = {}
    for i, t in enumerate(types):
        groups.setdefault(t, []).append(i)
    for idx in groups.values():
        u[np.ix_(idx, idx)] = random_unitary(len(idx), rng, complex_)
    return LaurentMatrix.constant(u)


def butterfly(n: int, i: int, j: int, power: int) -> LaurentMatrix:
    """``W diag(1, z^power) W`` on coordinates ``(i, j)``, identity elsewhere."""
    lo = min(0, power)
    arr = np.zeros((abs(power) + 1, n, n), dtype=complex)
    for k in range(n):
        if k not in (i, j):
            arr[-lo, k, k] = 1.0
    for a, b, sgn in ((i, i, 1), (i, j, -1), (j, i, -1), (j, j, 1)):
        arr[-lo, a, b] += 0.5
        arr[power - lo, a, b] += 0.5 * sgn
    return LaurentMatrix(arr, lo, (n, n))


def random_symmetric_row_block(r: int, s: int, rng: np.random.Generator, max_len: int = 8,
                               complex_: bool = True) -> LaurentMatrix:
    """``[I_r, 0]`` times random factors that keep compatible symmetry.

    Factors are type-preserving constant unitaries, permutations and
    butterflies pairing a column of type ``t`` with one of type ``-t``.
    The result is paraunitary with compatible symmetry and support
    length at most ``max_len``.
    """
    types = [SymmetryType(int(rng.choice([1, -1])), int(rng.integers(-1, 2))) for _ in range(s)]
    if s >= 2:
        i, j = rng.choice(s, size=2, replace=False)
        types[j] = SymmetryType(-types[i].eps, types[i].c)
    p = LaurentMatrix.constant(np.eye(r, s))
    budget = int(rng.integers(0, max_len + 1))
    steps = 0
    while steps < budget:
        p = mat_mul(p, type_preserving_unitary(types, rng, complex_), zero_tol=0.0)
        perm = rng.permutation(s)
        pm = np.zeros((s, s))
        pm[perm, np.arange(s)] = 1.0
        p = mat_mul(p, LaurentMatrix.constant(pm), zero_tol=0.0)
        types = [types[perm[k]] for k in range(s)]
        pairs = [(i, j) for i in range(s) for j in range(i + 1, s)
                 if types[j] == SymmetryType(-types[i].eps, types[i].c)]
        if not pairs:
            i, power = int(rng.integers(0, s)), int(rng.choice([-1, 1]))
            shifts = [power if k == i else 0 for k in range(s)]
            p = mat_mul(p, monomial_diag(shifts), zero_tol=0.0)
            types[i] = SymmetryType(types[i].eps, types[i].c + 2 * power)
            steps += 1
            continue
        i, j = pairs[int(rng.integers(0, len(pairs)))]
        power = int(rng.choice([-1, 1]))
        p = mat_mul(p, butterfly(s, i, j, power), zero_tol=0.0)
        t = types[i]
        types[i] = SymmetryType(t.eps, t.c + power)
        types[j] = SymmetryType(-t.eps, t.c + power)
        steps += 1
    p = mat_mul(p, type_preserving_unitary(types, rng, complex_), zero_tol=0.0)
    return p.renormalized(1e-13)


def monomial_diag(shifts) -> LaurentMatrix:
    n = len(shifts)
    lo, hi = min(shifts), max(shifts)
    arr = np.zeros((hi - lo + 1, n, n), dtype=complex)
    for i, k in enumerate(shifts):
        arr[k - lo, i, i] = 1.0
    return LaurentMatrix(arr, lo, (n, n))


def poly(terms: dict[int, complex]) -> LaurentPoly:
    return LaurentPoly.from_dict(terms, zero_tol=0.0)


def row_type(row: LaurentMatrix, col_types, zero_tol: float = 1e-9) -> SymmetryType | None:
    """``rho`` with ``Sym row[k] == rho * col_types[k]`` for every nonzero entry.

    Returns the wildcard for a zero row and ``None`` when no such ``rho``
    exists.
    """
    rho = None
    for k, t in enumerate(col_types):
        p = row.entry(0, k)
        if p.max_abs() <= zero_tol:
            continue
        s = sym_of(p, zero_tol)
        if s is None:
            return None
        cand = s * t.inverse()
        if rho is None:
            rho = cand
        elif cand != rho:
            return None
    return rho if rho is not None else SymmetryType(0, 0)


def standard_pattern_ok(b: LaurentMatrix, col_types, zero_tol: float = 1e-9) -> bool:
    """``Sym B[a, b] == col_types[a]^-1 col_types[b]`` on every nonzero entry."""
    for a in range(b.rows):
        for k in range(b.cols):
            p = b.entry(a, k)
            if p.max_abs() <= zero_tol:
                continue
            if sym_of(p, zero_tol) != col_types[a].inverse() * col_types[k]:
                return False
    return True


def within(inner, outer) -> bool:
    """Interval containment for coefficient supports (``None`` is empty)."""
    if inner is None:
        return True
    if outer is None:
        return False
    return outer[0] <= inner[0] and inner[1] <= outer[1]


def _unit(n: int, rng, complex_: bool) -> np.ndarray:
    v = rng.standard_normal(n) + (1j * rng.standard_normal(n) if complex_ else 0)
    return v / np.linalg.norm(v)


def random_pair(rng: np.random.Generator, complex_: bool = True):
    """Orthonormal rows ``q1`` (type 1) and ``q2`` (type z) ready for the paired factor.

    With ``k = 1`` and column blocks of types ``1, -1, 1/z, -1/z``::

        q1 = [f5, 0, g3 (1 + 1/z), g4 (1 - 1/z)]
        q2 = [g1 (1 + z), g2 (z - 1), f7, 0]

    where ``||g1|| = ||g2||``, ``||g3|| = ||g4||`` and
    ``f5 g1^H + g3 f7^H = 0`` makes the rows orthogonal.

    Returns ``q1, q2, s_counts``.
    """
    n = [int(x) for x in rng.integers(1, 4, size=4)]
    b = float(rng.uniform(0.05, 0.45))
    g1 = b * _unit(n[0], rng, complex_)
    g2 = b * _unit(n[1], rng, complex_)
    f7 = math.sqrt(1 - 4 * b * b) * _unit(n[2], rng, complex_)
    u = _unit(n[0], rng, complex_)
    w = np.zeros(n[2], dtype=complex)
    if n[2] > 1:
        w = rng.standard_normal(n[2]) + (1j * rng.standard_normal(n[2]) if complex_ else 0)
        w -= (w @ f7.conj()) / (f7 @ f7.conj()) * f7
        w *= float(rng.uniform(0.05, 0.4)) / np.linalg.norm(w)
    f7n = float(np.linalg.norm(f7)) ** 2
    ug = abs(u @ g1.conj()) ** 2
    rho = math.sqrt((1 - 4 * np.linalg.norm(w) ** 2) / (1 + 4 * ug / f7n))
    f5 = rho * u
    g3 = -(f5 @ g1.conj()) * f7 / f7n + w
    a = float(np.linalg.norm(g3))
    g4 = a * _unit(n[3], rng, complex_)
    s = sum(n)
    o = np.cumsum([0] + n)
    q1 = np.zeros((2, 1, s), dtype=complex)  # degrees -1, 0
    q2 = np.zeros((2, 1, s), dtype=complex)  # degrees 0, 1
    q1[1, 0, o[0]:o[1]] = f5
    q1[:, 0, o[2]:o[3]] = g3
    q1[1, 0, o[3]:o[4]] = g4
    q1[0, 0, o[3]:o[4]] = -g4
    q2[:, 0, o[0]:o[1]] = g1
    q2[0, 0, o[1]:o[2]] = -g2
    q2[1, 0, o[1]:o[2]] = g2
    q2[0, 0, o[2]:o[3]] = f7
    return (LaurentMatrix(q1, -1, (1, s)), LaurentMatrix(q2, 0, (1, s)), tuple(n))
