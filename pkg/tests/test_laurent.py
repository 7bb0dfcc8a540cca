"""Laurent polynomial arithmetic, symmetry detection and compatibility."""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import FIXTURES, poly, random_symmetric_row_block
from symext import (
    LaurentMatrix,
    LaurentPoly,
    SymmetryType,
    coeffsupp,
    detect_compatible_symmetry,
    is_paraunitary,
    mat_mul,
    mutually_compatible,
    paraunitarity_defect,
    support_length,
    sym_of,
)
from symext.io import load_matrix

T = SymmetryType

finite = st.floats(-10, 10, allow_nan=False, allow_infinity=False)
coeff_lists = st.lists(finite, min_size=1, max_size=6)


def _poly(cs, low):
    return LaurentPoly(cs, low, zero_tol=0.0)


def _matrix(rng, shape, low, length):
    arr = rng.standard_normal((length,) + shape) + 1j * rng.standard_normal((length,) + shape)
    return LaurentMatrix(arr, low, shape, zero_tol=0.0)


# -- polynomials -------------------------------------------------------------

def test_zero_polynomial_has_empty_support():
    p = LaurentPoly()
    assert p.is_zero() and p.support is None
    assert support_length(p) == float("-inf")
    assert sym_of(p).is_wildcard


def test_trimming_drops_small_end_coefficients():
    p = LaurentPoly([1e-14, 2.0, 0.0, 3.0, 1e-13], low=-2)
    assert p.support == (-1, 1)
    assert coeffsupp(p) == (-1, 1)


@given(a=coeff_lists, b=coeff_lists, la=st.integers(-4, 4), lb=st.integers(-4, 4))
def test_product_matches_convolution(a, b, la, lb):
    p, q = _poly(a, la), _poly(b, lb)
    prod = p * q
    expected = np.convolve(a, b)
    for i, v in enumerate(expected):
        assert prod.coeff(la + lb + i) == pytest.approx(v, abs=1e-9)


@given(a=coeff_lists, low=st.integers(-4, 4), z=st.complex_numbers(min_magnitude=0.5,
                                                                   max_magnitude=2.0))
def test_evaluation_matches_polyval(a, low, z):
    p = _poly(a, low)
    expected = np.polyval(np.asarray(a)[::-1], z) * z ** low
    assert p(z) == pytest.approx(expected, rel=1e-9, abs=1e-9)


@given(a=coeff_lists, b=coeff_lists, la=st.integers(-4, 4), lb=st.integers(-4, 4))
def test_support_of_product_is_interval_sum(a, b, la, lb):
    p, q = LaurentPoly(a, la), LaurentPoly(b, lb)
    if p.is_zero() or q.is_zero():
        return
    prod = p * q
    sp, sq = p.support, q.support
    if prod.is_zero():
        return
    lo, hi = prod.support
    assert sp[0] + sq[0] <= lo and hi <= sp[1] + sq[1]
    if abs(p.coeff(sp[0]) * q.coeff(sq[0])) > 1e-6:
        assert lo == sp[0] + sq[0]
    if abs(p.coeff(sp[1]) * q.coeff(sq[1])) > 1e-6:
        assert hi == sp[1] + sq[1]


# -- symmetry of a polynomial ------------------------------------------------

@pytest.mark.parametrize("terms, expected", [
    ({0: 1.0}, T(1, 0)),
    ({0: 1.0, 1: 1.0}, T(1, 1)),
    ({0: -1.0, 1: 1.0}, T(-1, 1)),
    ({-1: 2.0, 0: 5.0, 1: 2.0}, T(1, 0)),
    ({-2: 1.0, 1: -1.0}, T(-1, -1)),
    ({3: 4.0}, T(1, 6)),
    ({0: 1.0, 1: 2.0}, None),
])
def test_sym_of_examples(terms, expected):
    assert sym_of(poly(terms)) == expected


@settings(max_examples=200)
@given(half=st.lists(finite, min_size=1, max_size=4), eps=st.sampled_from([1, -1]),
       c=st.integers(-6, 6))
def test_sym_of_is_reflection_consistent(half, eps, c):
    terms: dict[int, float] = {}
    for k, v in enumerate(half):
        terms[k] = terms.get(k, 0.0) + v
        terms[c - k] = terms.get(c - k, 0.0) + eps * v
    p = LaurentPoly.from_dict(terms)
    if p.is_zero():
        return
    t = sym_of(p, 1e-9)
    assert t is not None
    assert sym_of(p.reflect(), 1e-9) == t.inverse()


# -- matrices ----------------------------------------------------------------

@settings(max_examples=50)
@given(seed=st.integers(0, 2**32 - 1), r=st.integers(1, 3), m=st.integers(1, 3),
       n=st.integers(1, 3))
def test_adjoint_reverses_products(seed, r, m, n):
    rng = np.random.default_rng(seed)
    a = _matrix(rng, (r, m), int(rng.integers(-2, 3)), int(rng.integers(1, 4)))
    b = _matrix(rng, (m, n), int(rng.integers(-2, 3)), int(rng.integers(1, 4)))
    lhs = mat_mul(a, b, zero_tol=0.0).adjoint()
    rhs = mat_mul(b.adjoint(), a.adjoint(), zero_tol=0.0)
    assert lhs.max_abs_diff(rhs) <= 1e-12


def test_matrix_evaluation_matches_entrywise():
    rng = np.random.default_rng(3)
    a = _matrix(rng, (2, 3), -1, 3)
    z = 0.7 + 0.4j
    expected = np.array([[a.entry(j, k)(z) for k in range(3)] for j in range(2)])
    np.testing.assert_allclose(a(z), expected, rtol=1e-13)


def test_paraunitarity_of_a_butterfly():
    h = 0.5
    b = LaurentMatrix.from_entries([[poly({0: h, 1: h}), poly({0: h, 1: -h})],
                                    [poly({0: h, 1: -h}), poly({0: h, 1: h})]])
    assert paraunitarity_defect(b) == 0.0
    assert is_paraunitary(b)
    assert not is_paraunitary(b.scale(1.01))


# -- compatible symmetry -----------------------------------------------------

def test_detect_example_31_pattern():
    p = load_matrix(FIXTURES / "ex31_P.json")
    sym = detect_compatible_symmetry(p, 1e-10)
    assert sym.theta1 == (T(1, 0), T(1, -1))
    assert sym.row_pattern() == (T(1, 0), T(1, 1))
    assert sym.theta2 == (T(1, 0), T(1, -1), T(-1, 0), T(1, 0))


def test_detect_identity():
    sym = detect_compatible_symmetry(LaurentMatrix.identity(2))
    assert sym.theta1 == (T(1, 0), T(1, 0)) and sym.theta2 == (T(1, 0), T(1, 0))


def test_detect_single_row_with_antisymmetric_entry():
    p = LaurentMatrix.from_entries([[poly({0: 1.0}), poly({0: -1.0, 1: 1.0})]])
    sym = detect_compatible_symmetry(p)
    assert sym.theta2 == (T(1, 0), T(-1, 1))


def test_detect_zero_column_is_wildcard():
    p = LaurentMatrix.constant([[1.0, 0.0]])
    sym = detect_compatible_symmetry(p)
    assert sym.theta2[1].is_wildcard


def test_detect_inconsistent_ratios():
    # entries force theta2[1] / theta2[0] to be both 1 and z
    p = LaurentMatrix.from_entries([[poly({0: 1.0}), poly({0: 1.0})],
                                    [poly({0: 1.0}), poly({0: 1.0, 1: 1.0})]])
    assert detect_compatible_symmetry(p) is None


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_adjoint_swaps_the_symmetry_vectors(seed):
    rng = np.random.default_rng(seed)
    r = int(rng.integers(1, 4))
    s = int(rng.integers(r, r + 3))
    p = random_symmetric_row_block(r, s, rng)
    sym = detect_compatible_symmetry(p, 1e-9)
    adj = detect_compatible_symmetry(p.adjoint(), 1e-9)
    assert sym is not None and adj is not None
    for j in range(r):
        for k in range(s):
            if not p.entry(j, k).is_zero():
                assert adj.entry(k, j) == sym.entry(j, k).inverse()


def test_mutual_compatibility_examples():
    one = LaurentMatrix.constant([[1.0]])
    assert mutually_compatible(one, LaurentMatrix.from_entries([[poly({0: -1.0, 1: 1.0})]]))
    assert mutually_compatible(one, LaurentMatrix.from_entries([[poly({0: 1.0, 1: 1.0})]]))
    p = load_matrix(FIXTURES / "ex31_P.json")
    assert mutually_compatible(p, p.adjoint())


def test_mutual_compatibility_dimension_mismatch():
    with pytest.raises(ValueError):
        mutually_compatible(LaurentMatrix.identity(2), LaurentMatrix.identity(3))
