"""Constant unitary matrices that annihilate trailing entries.

All routines return plain complex ``numpy`` arrays.  Zero coordinates
of an input vector are never mixed into the reflection, so the
corresponding rows and columns of the returned matrix stay coordinate
vectors.
"""

from __future__ import annotations

import numpy as np


def _as_row(f) -> np.ndarray:
    return np.asarray(f, dtype=complex).reshape(-1)


def _reflector(x: np.ndarray) -> np.ndarray:
    """Unitary ``V`` with ``x @ V == [||x||, 0, ..., 0]`` for dense nonzero ``x``."""
    n = x.size
    # exact power-of-two scaling keeps the norm clear of overflow and underflow
    e = int(np.frexp(np.max(np.abs(x)))[1])
    x = np.ldexp(x.real, -e) + 1j * np.ldexp(x.imag, -e)
    norm = np.linalg.norm(x)
    x1 = x[0]
    phase = np.exp(1j * np.angle(x1)) if x1 != 0 else 1.0
    # stable sign: v = x + phase ||x|| e_1 never cancels
    v = x.copy()
    v[0] += phase * norm
    vv = np.vdot(v, v).real
    h = np.eye(n, dtype=complex)
    if vv > 0:
        # row-vector Householder: x H = x - 2 (x v^H) v / (v v^H) = -phase ||x|| e_1
        h -= 2.0 * np.outer(v.conj(), v) / vv
    h[:, 0] *= -np.conj(phase)
    return h


def householder_for_vector(f, tol: float = 0.0) -> np.ndarray:
    """Unitary ``U`` with ``f @ U == [||f||, 0, ..., 0]``.

    ``U = E_f V_f`` where ``E_f`` stably moves the entries with
    ``|f_j| > tol`` to the front and ``V_f`` is a phase-corrected
    Householder reflection on that leading block.

    Parameters
    ----------
    f : array_like
        Complex row vector; may be empty or zero.
    tol : float
        Entries at or below this magnitude count as zero.

    Returns
    -------
    numpy.ndarray
        ``n x n`` unitary; the identity when ``f`` is zero and an empty
        ``0 x 0`` array when ``f`` is empty.
    """
    f = _as_row(f)
    n = f.size
    if n == 0:
        return np.zeros((0, 0), dtype=complex)
    support = np.flatnonzero(np.abs(f) > tol)
    if support.size == 0:
        return np.eye(n, dtype=complex)
    rest = np.setdiff1d(np.arange(n), support, assume_unique=True)
    order = np.concatenate([support, rest])
    e = np.zeros((n, n), dtype=complex)
    e[order, np.arange(n)] = 1.0
    v = np.eye(n, dtype=complex)
    v[:support.size, :support.size] = _reflector(f[support])
    return e @ v


def unit_completion(g, tol: float = 0.0) -> tuple[np.ndarray, int]:
    """Unitary ``V`` whose pivot column is ``g^H / ||g||``, built in place.

    The pivot is the first index with ``|g_j| > tol``.  Columns at the
    other nonzero indices complete an orthonormal basis of the support
    block; columns at zero indices are the matching coordinate vectors.

    Returns
    -------
    V : numpy.ndarray
    pivot : int
        ``-1`` when ``g`` is zero (then ``V`` is the identity).
    """
    g = _as_row(g)
    n = g.size
    v = np.eye(n, dtype=complex)
    support = np.flatnonzero(np.abs(g) > tol)
    if support.size == 0:
        return v, -1
    block = _reflector(g[support])
    v[np.ix_(support, support)] = block
    return v, int(support[0])


def _sweep(g: np.ndarray, threshold: float, partner: np.ndarray | None = None):
    """Row-by-row Householder sweep; the pivot test optionally uses a partner."""
    rows, n = g.shape
    limit = n if partner is None else min(n, partner.shape[1])
    u = np.eye(n, dtype=complex)
    u2 = np.eye(partner.shape[1], dtype=complex) if partner is not None else None
    cur = g.copy()
    cur2 = partner.copy() if partner is not None else None
    m = 0
    for i in range(rows):
        if m >= limit:
            break
        h = cur[i, m:]
        nrm = np.linalg.norm(h)
        if partner is not None:
            nrm = np.sqrt(0.5 * (nrm ** 2 + np.linalg.norm(cur2[i, m:]) ** 2))
        if nrm <= threshold:
            continue
        uh = householder_for_vector(h)
        u[:, m:] = u[:, m:] @ uh
        cur[:, m:] = cur[:, m:] @ uh
        if partner is not None:
            uh2 = householder_for_vector(cur2[i, m:])
            u2[:, m:] = u2[:, m:] @ uh2
            cur2[:, m:] = cur2[:, m:] @ uh2
        m += 1
    return u, u2, cur, cur2, m


def _max_row_norm(g: np.ndarray) -> float:
    if g.size == 0:
        return 0.0
    return float(np.max(np.linalg.norm(g, axis=1)))


def reduce_matrix(g, tol: float = 1e-10) -> tuple[np.ndarray, np.ndarray, int]:
    """Unitary ``U`` with ``G @ U == [R, 0]``, ``R`` lower echelon of rank ``m``.

    A row contributes a pivot when its residual (the part not yet
    captured by earlier pivots) has norm above ``tol`` times the largest
    row norm of ``G``.

    Returns
    -------
    U : numpy.ndarray
        ``n x n`` unitary (the identity for ``G == 0``).
    R : numpy.ndarray
        ``rows x m``.
    m : int
        Numerical rank.
    """
    g = np.atleast_2d(np.asarray(g, dtype=complex))
    threshold = tol * _max_row_norm(g)
    if threshold == 0.0:
        n = g.shape[1]
        return np.eye(n, dtype=complex), np.zeros((g.shape[0], 0), dtype=complex), 0
    u, _, cur, _, m = _sweep(g, threshold)
    return u, cur[:, :m], m


def paired_reduce(g1, g2, tol: float = 1e-10
                  ) -> tuple[np.ndarray, np.ndarray, np.ndarray, int]:
    """Reduce two matrices with equal Gram matrices to the same ``[R, 0]``.

    The widths may differ; the rank is at most the smaller width.

    Pivot decisions are shared between both sweeps so that
    ``G1 @ U1`` and ``G2 @ U2`` agree in their leading ``m`` columns.

    Raises
    ------
    ValueError
        If ``||G1 G1* - G2 G2*||`` exceeds ``tol`` (relative to the
        squared row scale when that exceeds one) or the row counts
        differ.
    """
    g1 = np.atleast_2d(np.asarray(g1, dtype=complex))
    g2 = np.atleast_2d(np.asarray(g2, dtype=complex))
    if g1.shape[0] != g2.shape[0]:
        raise ValueError("paired_reduce needs the same number of rows")
    scale = max(1.0, _max_row_norm(g1) ** 2, _max_row_norm(g2) ** 2)
    defect = np.max(np.abs(g1 @ g1.conj().T - g2 @ g2.conj().T)) if g1.size else 0.0
    if defect > tol * scale:
        raise ValueError(f"Gram matrices differ by {defect:.3e}")
    threshold = tol * max(_max_row_norm(g1), _max_row_norm(g2))
    if threshold == 0.0:
        return (np.eye(g1.shape[1], dtype=complex), np.eye(g2.shape[1], dtype=complex),
                np.zeros((g1.shape[0], 0), dtype=complex), 0)
    u1, u2, c1, c2, m = _sweep(g1, threshold, partner=g2)
    r = 0.5 * (c1[:, :m] + c2[:, :m])
    return u1, u2, r, m
