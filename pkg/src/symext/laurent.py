"""Laurent polynomials and matrices of Laurent polynomials.

Coefficients are complex doubles stored densely over the coefficient
support together with the degree of the lowest stored term.  Every
constructor re-tightens the support: coefficients whose magnitude is at
most ``zero_tol`` are dropped.

Symmetry follows the usual convention: ``p`` has symmetry type
``(eps, c)`` when ``p[c - k] == eps * p[k]`` for every ``k``, that is
``p(z) / p(1/z) == eps * z**c``.  The zero polynomial carries the
wildcard type, which unifies with everything.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np

ZERO_TOL = 1e-12

NEG_INF = float("-inf")


@dataclass(frozen=True, order=True)
class SymmetryType:
    """``eps * z**c``; ``eps == 0`` marks the wildcard (symmetry of 0)."""

    eps: int
    c: int

    @property
    def is_wildcard(self) -> bool:
        return self.eps == 0

    def __mul__(self, other: "SymmetryType") -> "SymmetryType":
        if self.is_wildcard or other.is_wildcard:
            return WILDCARD
        return SymmetryType(self.eps * other.eps, self.c + other.c)

    def inverse(self) -> "SymmetryType":
        if self.is_wildcard:
            return WILDCARD
        return SymmetryType(self.eps, -self.c)

    # Sym(p*) = Sym(p)(1/z) conj-free, which is the same reflection.
    reflect = inverse

    def __str__(self) -> str:
        if self.is_wildcard:
            return "*"
        sign = "-" if self.eps < 0 else ""
        if self.c == 0:
            return f"{sign}1"
        if self.c == 1:
            return f"{sign}z"
        return f"{sign}z^{self.c}"


WILDCARD = SymmetryType(0, 0)
ONE = SymmetryType(1, 0)

SymmetryVector = tuple  # tuple[SymmetryType, ...]


def _trim(coeffs: np.ndarray, low: int, zero_tol: float) -> tuple[np.ndarray, int]:
    """Zero tiny entries along the leading axis and cut empty end slices."""
    coeffs = np.array(coeffs, dtype=complex)
    if coeffs.size == 0:
        return coeffs[:0], 0
    small = np.abs(coeffs) <= zero_tol
    if small.any():
        coeffs[small] = 0
    flat = coeffs.reshape(coeffs.shape[0], -1)
    nz = np.flatnonzero(np.any(flat != 0, axis=1))
    if nz.size == 0:
        return coeffs[:0], 0
    first, last = int(nz[0]), int(nz[-1])
    return coeffs[first:last + 1], low + first


class LaurentPoly:
    """A single Laurent polynomial ``sum_k p_k z**k``.

    Parameters
    ----------
    coeffs : array_like
        Coefficients of ``z**low, z**(low+1), ...``.
    low : int
        Degree of ``coeffs[0]``.
    zero_tol : float
        Coefficients with magnitude ``<= zero_tol`` are dropped.
    """

    __slots__ = ("_c", "_low")

    def __init__(self, coeffs: Iterable[complex] | np.ndarray = (), low: int = 0,
                 zero_tol: float = ZERO_TOL):
        c, lo = _trim(np.asarray(list(coeffs) if not isinstance(coeffs, np.ndarray) else coeffs,
                                 dtype=complex), int(low), zero_tol)
        c.setflags(write=False)
        self._c = c
        self._low = lo

    @classmethod
    def from_dict(cls, terms: dict[int, complex], zero_tol: float = ZERO_TOL) -> "LaurentPoly":
        if not terms:
            return cls()
        lo, hi = min(terms), max(terms)
        arr = np.zeros(hi - lo + 1, dtype=complex)
        for k, v in terms.items():
            arr[k - lo] += v
        return cls(arr, lo, zero_tol)

    @classmethod
    def monomial(cls, value: complex = 1.0, degree: int = 0) -> "LaurentPoly":
        return cls([value], degree)

    # -- inspection --------------------------------------------------------
    @property
    def low(self) -> int:
        return self._low

    @property
    def array(self) -> np.ndarray:
        return self._c

    def is_zero(self) -> bool:
        return self._c.size == 0

    def coeff(self, k: int) -> complex:
        i = k - self._low
        if 0 <= i < self._c.size:
            return complex(self._c[i])
        return 0j

    def items(self) -> Iterator[tuple[int, complex]]:
        """Nonzero ``(degree, coefficient)`` pairs in increasing degree."""
        for i, v in enumerate(self._c):
            if v != 0:
                yield self._low + i, complex(v)

    def to_dict(self) -> dict[int, complex]:
        return dict(self.items())

    @property
    def support(self) -> tuple[int, int] | None:
        if self.is_zero():
            return None
        return self._low, self._low + self._c.size - 1

    @property
    def support_length(self) -> float:
        if self.is_zero():
            return NEG_INF
        return self._c.size - 1

    def max_abs(self) -> float:
        return float(np.max(np.abs(self._c))) if self._c.size else 0.0

    def __call__(self, z: complex) -> complex:
        if self.is_zero():
            return 0j
        return complex(np.polyval(self._c[::-1], z) * z ** self._low)

    # -- arithmetic --------------------------------------------------------
    def __add__(self, other) -> "LaurentPoly":
        other = _as_poly(other)
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        lo = min(self._low, other._low)
        hi = max(self._low + self._c.size, other._low + other._c.size)
        arr = np.zeros(hi - lo, dtype=complex)
        arr[self._low - lo:self._low - lo + self._c.size] += self._c
        arr[other._low - lo:other._low - lo + other._c.size] += other._c
        return LaurentPoly(arr, lo)

    __radd__ = __add__

    def __neg__(self) -> "LaurentPoly":
        return LaurentPoly(-self._c, self._low)

    def __sub__(self, other) -> "LaurentPoly":
        return self + (-_as_poly(other))

    def __rsub__(self, other) -> "LaurentPoly":
        return _as_poly(other) - self

    def __mul__(self, other) -> "LaurentPoly":
        if np.isscalar(other):
            return LaurentPoly(self._c * other, self._low)
        other = _as_poly(other)
        if self.is_zero() or other.is_zero():
            return LaurentPoly()
        return LaurentPoly(np.convolve(self._c, other._c), self._low + other._low)

    __rmul__ = __mul__

    def __truediv__(self, scalar: complex) -> "LaurentPoly":
        return LaurentPoly(self._c / scalar, self._low)

    def shift(self, k: int) -> "LaurentPoly":
        """Multiply by ``z**k``."""
        return LaurentPoly(self._c, self._low + k)

    def reflect(self) -> "LaurentPoly":
        """``p(1/z)``."""
        if self.is_zero():
            return self
        return LaurentPoly(self._c[::-1], -(self._low + self._c.size - 1))

    def adjoint(self) -> "LaurentPoly":
        """``p*(z) = conj(p)(1/z)``."""
        return LaurentPoly(np.conj(self.reflect()._c), self.reflect()._low)

    def allclose(self, other, tol: float = 1e-10) -> bool:
        return (self - _as_poly(other)).max_abs() <= tol

    def __eq__(self, other) -> bool:
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self._low == other._low and np.array_equal(self._c, other._c)

    def __hash__(self):
        return hash((self._low, self._c.tobytes()))

    def __repr__(self) -> str:
        if self.is_zero():
            return "LaurentPoly(0)"
        terms = " + ".join(f"({v:.6g})z^{k}" for k, v in self.items())
        return f"LaurentPoly({terms})"


def _as_poly(x) -> LaurentPoly:
    if isinstance(x, LaurentPoly):
        return x
    return LaurentPoly([x], 0)


class LaurentMatrix:
    """An ``rows x cols`` matrix of Laurent polynomials.

    Stored as a coefficient stack ``coeffs[k - low]`` of shape
    ``(K, rows, cols)``.  Instances are immutable.
    """

    __slots__ = ("_c", "_low", "_shape")

    def __init__(self, coeffs: np.ndarray, low: int = 0, shape: tuple[int, int] | None = None,
                 zero_tol: float = ZERO_TOL):
        coeffs = np.asarray(coeffs, dtype=complex)
        if coeffs.ndim == 2:
            coeffs = coeffs[None]
        if coeffs.ndim != 3:
            raise ValueError("coefficient stack must have shape (K, rows, cols)")
        if shape is None:
            shape = coeffs.shape[1:]
        if coeffs.shape[0] and coeffs.shape[1:] != tuple(shape):
            raise ValueError("shape mismatch")
        c, lo = _trim(coeffs.reshape((coeffs.shape[0],) + tuple(shape)), int(low), zero_tol)
        if c.shape[0] == 0:
            c = np.zeros((0,) + tuple(shape), dtype=complex)
        c.setflags(write=False)
        self._c = c
        self._low = lo
        self._shape = (int(shape[0]), int(shape[1]))

    # -- constructors ------------------------------------------------------
    @classmethod
    def constant(cls, m) -> "LaurentMatrix":
        m = np.atleast_2d(np.asarray(m, dtype=complex))
        return cls(m[None], 0, m.shape)

    @classmethod
    def identity(cls, n: int) -> "LaurentMatrix":
        return cls.constant(np.eye(n))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "LaurentMatrix":
        return cls(np.zeros((0, rows, cols)), 0, (rows, cols))

    @classmethod
    def from_dict(cls, terms: dict[int, np.ndarray], shape: tuple[int, int] | None = None,
                  zero_tol: float = ZERO_TOL) -> "LaurentMatrix":
        """Build from ``{degree: constant matrix}``."""
        if not terms:
            if shape is None:
                raise ValueError("shape required for an empty matrix")
            return cls.zeros(*shape)
        lo, hi = min(terms), max(terms)
        first = np.atleast_2d(np.asarray(next(iter(terms.values()))))
        shape = shape or first.shape
        arr = np.zeros((hi - lo + 1,) + tuple(shape), dtype=complex)
        for k, m in terms.items():
            arr[k - lo] += np.asarray(m, dtype=complex)
        return cls(arr, lo, shape, zero_tol)

    @classmethod
    def from_entries(cls, entries: Sequence[Sequence[LaurentPoly | complex]],
                     zero_tol: float = ZERO_TOL) -> "LaurentMatrix":
        polys = [[_as_poly(e) for e in row] for row in entries]
        rows, cols = len(polys), len(polys[0]) if polys else 0
        nonzero = [p for row in polys for p in row if not p.is_zero()]
        if not nonzero:
            return cls.zeros(rows, cols)
        lo = min(p.low for p in nonzero)
        hi = max(p.support[1] for p in nonzero)
        arr = np.zeros((hi - lo + 1, rows, cols), dtype=complex)
        for j, row in enumerate(polys):
            for k, p in enumerate(row):
                if not p.is_zero():
                    arr[p.low - lo:p.low - lo + p.array.size, j, k] = p.array
        return cls(arr, lo, (rows, cols), zero_tol)

    @classmethod
    def diag(cls, polys: Sequence[LaurentPoly | complex]) -> "LaurentMatrix":
        n = len(polys)
        return cls.from_entries([[polys[j] if j == k else 0 for k in range(n)] for j in range(n)])

    @classmethod
    def block_diag(cls, *blocks: "LaurentMatrix") -> "LaurentMatrix":
        rows = sum(b.rows for b in blocks)
        cols = sum(b.cols for b in blocks)
        nz = [b for b in blocks if not b.is_zero()]
        if not nz:
            return cls.zeros(rows, cols)
        lo = min(b.low for b in nz)
        hi = max(b.high for b in nz)
        arr = np.zeros((hi - lo + 1, rows, cols), dtype=complex)
        r0 = c0 = 0
        for b in blocks:
            if not b.is_zero():
                arr[b.low - lo:b.high - lo + 1, r0:r0 + b.rows, c0:c0 + b.cols] = b._c
            r0 += b.rows
            c0 += b.cols
        return cls(arr, lo, (rows, cols))

    @classmethod
    def vstack(cls, blocks: Sequence["LaurentMatrix"]) -> "LaurentMatrix":
        cols = blocks[0].cols
        rows = sum(b.rows for b in blocks)
        nz = [b for b in blocks if not b.is_zero()]
        if not nz:
            return cls.zeros(rows, cols)
        lo = min(b.low for b in nz)
        hi = max(b.high for b in nz)
        arr = np.zeros((hi - lo + 1, rows, cols), dtype=complex)
        r0 = 0
        for b in blocks:
            if b.cols != cols:
                raise ValueError("column counts differ")
            if not b.is_zero():
                arr[b.low - lo:b.high - lo + 1, r0:r0 + b.rows] = b._c
            r0 += b.rows
        return cls(arr, lo, (rows, cols))

    @classmethod
    def hstack(cls, blocks: Sequence["LaurentMatrix"]) -> "LaurentMatrix":
        return cls.vstack([b.T for b in blocks]).T

    # -- inspection --------------------------------------------------------
    @property
    def shape(self) -> tuple[int, int]:
        return self._shape

    @property
    def rows(self) -> int:
        return self._shape[0]

    @property
    def cols(self) -> int:
        return self._shape[1]

    @property
    def low(self) -> int:
        return self._low

    @property
    def high(self) -> int:
        return self._low + self._c.shape[0] - 1

    @property
    def stack(self) -> np.ndarray:
        """Read-only coefficient stack, ``stack[k - low]`` is ``coeff(k)``."""
        return self._c

    def is_zero(self) -> bool:
        return self._c.shape[0] == 0

    def coeff(self, k: int) -> np.ndarray:
        i = k - self._low
        if 0 <= i < self._c.shape[0]:
            return self._c[i].copy()
        return np.zeros(self._shape, dtype=complex)

    def terms(self) -> dict[int, np.ndarray]:
        return {self._low + i: self._c[i].copy() for i in range(self._c.shape[0])}

    @property
    def support(self) -> tuple[int, int] | None:
        if self.is_zero():
            return None
        return self._low, self.high

    @property
    def support_length(self) -> float:
        if self.is_zero():
            return NEG_INF
        return self._c.shape[0] - 1

    def entry(self, j: int, k: int) -> LaurentPoly:
        return LaurentPoly(self._c[:, j, k], self._low)

    def __getitem__(self, key) -> "LaurentMatrix":
        """Sub-matrix by numpy-style ``[rows, cols]`` indexing (always 2-D)."""
        rk, ck = key
        idx_r = np.arange(self.rows)[rk]
        idx_c = np.arange(self.cols)[ck]
        idx_r = np.atleast_1d(idx_r)
        idx_c = np.atleast_1d(idx_c)
        sub = self._c[:, idx_r][:, :, idx_c]
        return LaurentMatrix(sub, self._low, (idx_r.size, idx_c.size))

    def row(self, j: int) -> "LaurentMatrix":
        return self[j:j + 1, :]

    def col(self, k: int) -> "LaurentMatrix":
        return self[:, k:k + 1]

    def entries(self) -> list[list[LaurentPoly]]:
        return [[self.entry(j, k) for k in range(self.cols)] for j in range(self.rows)]

    def max_abs(self) -> float:
        return float(np.max(np.abs(self._c))) if self._c.size else 0.0

    def __call__(self, z: complex) -> np.ndarray:
        out = np.zeros(self._shape, dtype=complex)
        for i in range(self._c.shape[0]):
            out += self._c[i] * z ** (self._low + i)
        return out

    # -- arithmetic --------------------------------------------------------
    @property
    def T(self) -> "LaurentMatrix":
        return LaurentMatrix(np.transpose(self._c, (0, 2, 1)), self._low, self._shape[::-1])

    def adjoint(self) -> "LaurentMatrix":
        if self.is_zero():
            return LaurentMatrix.zeros(self.cols, self.rows)
        c = np.conj(np.transpose(self._c[::-1], (0, 2, 1)))
        return LaurentMatrix(c, -self.high, self._shape[::-1])

    def __matmul__(self, other: "LaurentMatrix") -> "LaurentMatrix":
        return mat_mul(self, other)

    def __add__(self, other: "LaurentMatrix") -> "LaurentMatrix":
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        lo = min(self.low, other.low)
        hi = max(self.high, other.high)
        arr = np.zeros((hi - lo + 1,) + self._shape, dtype=complex)
        arr[self.low - lo:self.high - lo + 1] += self._c
        arr[other.low - lo:other.high - lo + 1] += other._c
        return LaurentMatrix(arr, lo, self._shape)

    def __neg__(self) -> "LaurentMatrix":
        return LaurentMatrix(-self._c, self._low, self._shape)

    def __sub__(self, other: "LaurentMatrix") -> "LaurentMatrix":
        return self + (-other)

    def scale(self, s: complex) -> "LaurentMatrix":
        return LaurentMatrix(self._c * s, self._low, self._shape)

    def shift(self, k: int) -> "LaurentMatrix":
        """Multiply every entry by ``z**k``."""
        return LaurentMatrix(self._c, self._low + k, self._shape)

    def renormalized(self, zero_tol: float) -> "LaurentMatrix":
        return LaurentMatrix(self._c, self._low, self._shape, zero_tol)

    def max_abs_diff(self, other: "LaurentMatrix") -> float:
        """Largest coefficient of ``self - other``, without zero clipping."""
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")
        if self.is_zero() and other.is_zero():
            return 0.0
        terms = [m for m in (self, other) if not m.is_zero()]
        lo = min(m.low for m in terms)
        hi = max(m.high for m in terms)
        arr = np.zeros((hi - lo + 1,) + self._shape, dtype=complex)
        if not self.is_zero():
            arr[self.low - lo:self.high - lo + 1] += self._c
        if not other.is_zero():
            arr[other.low - lo:other.high - lo + 1] -= other._c
        return float(np.max(np.abs(arr)))

    def allclose(self, other: "LaurentMatrix", tol: float = 1e-10) -> bool:
        return self.shape == other.shape and self.max_abs_diff(other) <= tol

    def __eq__(self, other) -> bool:
        if not isinstance(other, LaurentMatrix):
            return NotImplemented
        return (self._shape == other._shape and self._low == other._low
                and np.array_equal(self._c, other._c))

    def __hash__(self):
        return hash((self._shape, self._low, self._c.tobytes()))

    def __repr__(self) -> str:
        return f"LaurentMatrix(shape={self._shape}, support={self.support})"


# ---------------------------------------------------------------------------
# Operations
# ---------------------------------------------------------------------------

def coeffsupp(p: LaurentPoly | LaurentMatrix) -> tuple[int, int] | None:
    """Tight coefficient support ``(m, n)``; ``None`` for the zero object."""
    return p.support


def support_length(p: LaurentPoly | LaurentMatrix) -> float:
    """``n - m`` for support ``[m, n]``, ``-inf`` for zero."""
    return p.support_length


def mat_mul(a: LaurentMatrix, b: LaurentMatrix, zero_tol: float = ZERO_TOL) -> LaurentMatrix:
    if a.cols != b.rows:
        raise ValueError(f"dimension mismatch: {a.shape} @ {b.shape}")
    shape = (a.rows, b.cols)
    if a.is_zero() or b.is_zero():
        return LaurentMatrix.zeros(*shape)
    ka, kb = a.stack.shape[0], b.stack.shape[0]
    out = np.zeros((ka + kb - 1,) + shape, dtype=complex)
    bs = b.stack
    for i in range(ka):
        out[i:i + kb] += a.stack[i] @ bs
    return LaurentMatrix(out, a.low + b.low, shape, zero_tol)


def adjoint(p: LaurentMatrix) -> LaurentMatrix:
    return p.adjoint()


def paraunitarity_defect(p: LaurentMatrix) -> float:
    """Largest coefficient magnitude of ``P P* - I``."""
    gram = mat_mul(p, p.adjoint(), zero_tol=0.0)
    return gram.max_abs_diff(LaurentMatrix.identity(p.rows)) if p.rows else 0.0


def is_paraunitary(p: LaurentMatrix, tol: float = 1e-10) -> bool:
    return paraunitarity_defect(p) <= tol


def sym_of(p: LaurentPoly, zero_tol: float = ZERO_TOL) -> SymmetryType | None:
    """Symmetry type of ``p``: wildcard for zero, ``None`` when there is none.

    The test is relative: coefficients must agree to within
    ``zero_tol * max|p_k|``.
    """
    if p.is_zero():
        return WILDCARD
    tol = zero_tol * p.max_abs()
    # negligible tail coefficients would shift the centre
    big = np.flatnonzero(np.abs(p.array) > tol)
    arr = p.array[big[0]:big[-1] + 1]
    lo = p.support[0] + int(big[0])
    c = 2 * lo + arr.size - 1
    flipped = arr[::-1]
    for eps in (1, -1):
        if np.max(np.abs(flipped - eps * arr)) <= tol:
            return SymmetryType(eps, c)
    return None


def sym_matrix(p: LaurentMatrix, zero_tol: float = ZERO_TOL) -> list[list[SymmetryType | None]]:
    """Entrywise symmetry types."""
    return [[sym_of(p.entry(j, k), zero_tol) for k in range(p.cols)] for j in range(p.rows)]


def _solve_gauge(n: int, edges: list[tuple[int, int, SymmetryType]],
                 roots: Iterable[int] | None = None) -> list[SymmetryType] | None:
    """Assign ``val[v] = val[u] * s`` for every edge ``(u, v, s)``.

    Each connected component is pinned to ``(+1, 0)`` at its lowest
    indexed node (or first listed root).  Unconstrained nodes stay
    wildcards.  Returns ``None`` on an inconsistent cycle.
    """
    adj: list[list[tuple[int, SymmetryType]]] = [[] for _ in range(n)]
    for u, v, s in edges:
        adj[u].append((v, s))
        adj[v].append((u, s.inverse()))
    val: list[SymmetryType] = [WILDCARD] * n
    seen = [False] * n
    order = list(roots) if roots is not None else []
    order += [i for i in range(n) if i not in set(order)]
    for start in order:
        if seen[start] or not adj[start]:
            continue
        seen[start] = True
        val[start] = ONE
        queue = deque([start])
        while queue:
            u = queue.popleft()
            for v, s in adj[u]:
                want = val[u] * s
                if not seen[v]:
                    seen[v] = True
                    val[v] = want
                    queue.append(v)
                elif val[v] != want:
                    return None
    return val


@dataclass(frozen=True)
class CompatibleSymmetry:
    """``Sym P = (Sym theta1)* Sym theta2``.

    ``theta1`` and ``theta2`` hold the symmetry types of the two row
    vectors, so entry ``(j, k)`` has type ``theta1[j].inverse() * theta2[k]``.
    """

    theta1: tuple[SymmetryType, ...]
    theta2: tuple[SymmetryType, ...]

    def row_pattern(self) -> tuple[SymmetryType, ...]:
        """Row factors ``(Sym theta1)*`` as they appear in the product."""
        return tuple(t.inverse() for t in self.theta1)

    def entry(self, j: int, k: int) -> SymmetryType:
        return self.theta1[j].inverse() * self.theta2[k]

    def resolved(self) -> "CompatibleSymmetry":
        """Replace wildcard entries by ``(+1, 0)``."""
        fix = lambda v: tuple(ONE if t.is_wildcard else t for t in v)  # noqa: E731
        return CompatibleSymmetry(fix(self.theta1), fix(self.theta2))

    def __str__(self) -> str:
        left = ", ".join(str(t) for t in self.row_pattern())
        right = ", ".join(str(t) for t in self.theta2)
        return f"[{left}]^T [{right}]"


def detect_compatible_symmetry(p: LaurentMatrix,
                               zero_tol: float = ZERO_TOL) -> CompatibleSymmetry | None:
    """Find ``theta1``, ``theta2`` with ``Sym P = (Sym theta1)* Sym theta2``.

    The first row of every connected block is pinned to ``(+1, 0)``; rows
    or columns that are identically zero are reported as wildcards.
    """
    r, s = p.shape
    edges = []
    for j in range(r):
        for k in range(s):
            t = sym_of(p.entry(j, k), zero_tol)
            if t is None:
                return None
            if not t.is_wildcard:
                edges.append((j, r + k, t))
    val = _solve_gauge(r + s, edges)
    if val is None:
        return None
    return CompatibleSymmetry(tuple(val[:r]), tuple(val[r:]))


def mutual_symmetry(p: LaurentMatrix, q: LaurentMatrix, zero_tol: float = ZERO_TOL
                    ) -> tuple[tuple[SymmetryType, ...], ...] | None:
    """``(theta1, theta, theta2)`` witnessing mutual compatibility, or ``None``."""
    if p.cols != q.rows:
        raise ValueError(f"dimension mismatch: {p.shape} vs {q.shape}")
    r, s, t = p.rows, p.cols, q.cols
    edges = []
    for j in range(r):
        for k in range(s):
            sym = sym_of(p.entry(j, k), zero_tol)
            if sym is None:
                return None
            if not sym.is_wildcard:
                edges.append((j, r + k, sym))
    for k in range(s):
        for m in range(t):
            sym = sym_of(q.entry(k, m), zero_tol)
            if sym is None:
                return None
            if not sym.is_wildcard:
                edges.append((r + k, r + s + m, sym))
    val = _solve_gauge(r + s + t, edges)
    if val is None:
        return None
    return tuple(val[:r]), tuple(val[r:r + s]), tuple(val[r + s:])


def mutually_compatible(p: LaurentMatrix, q: LaurentMatrix, zero_tol: float = ZERO_TOL) -> bool:
    return mutual_symmetry(p, q, zero_tol) is not None
