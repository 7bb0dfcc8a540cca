"""Extension algorithm: normalizers, elementary factors (P1-P4), driver and errors."""

from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import (
    FIXTURES,
    poly,
    random_pair,
    random_symmetric_row_block,
    row_type,
    standard_pattern_ok,
    within,
)
from symext import (
    LaurentMatrix,
    PreconditionError,
    ReductionError,
    SymmetryType,
    check_cascade,
    detect_compatible_symmetry,
    extend,
    mat_mul,
    normalizer_for,
    paraunitarity_defect,
    support_reduction,
    sym_of,
)
from symext.extension import (
    StandardSymmetrySplit,
    build_Bq,
    build_Bq1q2,
    build_BQ1,
    finalize,
    j_bound,
    standard_counts,
)
from symext.io import load_matrix

TOL = 1e-9
T = SymmetryType


# -- normalizers -------------------------------------------------------------

def _theta_row(theta):
    """A row whose entry ``k`` has symmetry exactly ``theta[k]``."""
    entries = []
    for t in theta:
        if t.c % 2 == 0:
            base = {t.c // 2: 1.0} if t.eps > 0 else None
        else:
            base = None
        if base is None:
            # eps z^c: use 1 + eps z^c, which has type (eps, c) for c != 0
            if t.c == 0:
                raise ValueError("odd type needs c != 0")
            base = {0: 1.0, t.c: float(t.eps)}
        entries.append(poly(base))
    return LaurentMatrix.from_entries([entries])


@pytest.mark.parametrize("theta, expected", [
    ((T(1, 0),), (T(1, 0),)),
    ((T(1, 0), T(1, -1), T(-1, 2), T(1, 0)), None),
    ((T(-1, 1),), (T(-1, -1),)),
    ((T(1, 2), T(-1, -3), T(1, 1)), None),
])
def test_normalizer_regroups_to_standard_blocks(theta, expected):
    u = normalizer_for(theta)
    assert paraunitarity_defect(u) < 1e-14
    row = _theta_row(theta)
    out = mat_mul(row, u)
    got = [sym_of(out.entry(0, k)) for k in range(out.cols)]
    order = [T(1, 0), T(-1, 0), T(1, -1), T(-1, -1)]
    ranks = [order.index(t) for t in got]
    assert ranks == sorted(ranks)
    counts = standard_counts(theta)
    assert [ranks.count(i) for i in range(4)] == list(counts)
    if expected is not None:
        assert tuple(got) == expected


def test_normalizer_example_theta2_has_three_plus_one_columns():
    theta = (T(1, 0), T(1, -1), T(-1, 0), T(1, 0))
    assert standard_counts(theta) == (2, 1, 1, 0)
    # the two even +1 types and the shifted z^-1 type fill the +1 and z^-1 blocks
    u = normalizer_for(theta)
    assert all(np.count_nonzero(np.abs(u.stack).sum(axis=0)[:, k]) == 1 for k in range(4))


# -- P1 / P2: single-row factor ---------------------------------------------

def _bq_events(n_cases: int, square: bool):
    """Instrumented runs on random inputs collecting every single-row factor."""
    events = []
    seed = 0
    while len(events) < n_cases:
        rng = np.random.default_rng(10_000 + seed)
        s = int(rng.integers(2, 6))
        r = s if square else int(rng.integers(1, s + 1))
        p = random_symmetric_row_block(r, s, rng, complex_=bool(seed % 2))

        def obs(kind, info):
            if kind == "Bq":
                events.append(info)

        extend(p, observer=obs)
        seed += 1
    return events[:n_cases]


def test_single_row_factor_P1_on_100_rows():
    events = _bq_events(100, square=False)
    for info in events:
        q, b, split = info["q"], info["B"], info["split"]
        ct = split.col_types()
        l1, l2 = q.support
        out = mat_mul(q, b, zero_tol=1e-10)
        assert paraunitarity_defect(b) <= TOL
        assert within(b.support, (-1, 1))
        assert standard_pattern_ok(b, ct)
        assert out.support == (l1 + 1, l2 - 1)
        assert row_type(out, ct) == row_type(q, ct)


def test_single_row_factor_P2_on_100_companions():
    checked = 0
    for info in _bq_events(60, square=True):
        q, b, Q, j = info["q"], info["B"], info["Q"], info["row"]
        ct = info["split"].col_types()
        for i in range(Q.rows):
            if i == j or checked >= 100:
                continue
            p = Q.row(i)
            assert mat_mul(p, q.adjoint()).max_abs() <= 1e-10
            out = mat_mul(p, b, zero_tol=1e-10)
            assert row_type(out, ct) in (row_type(p, ct), T(0, 0))
            assert within(out.support, p.support)
            checked += 1
    assert checked == 100


# -- P3 / P4: paired factor --------------------------------------------------

def test_paired_factor_P3_on_100_pairs():
    for seed in range(100):
        rng = np.random.default_rng(seed)
        q1, q2, n = random_pair(rng, complex_=bool(seed % 2))
        split = StandardSymmetrySplit((1, 0, 1, 0), n)
        ct = split.col_types()
        b = build_Bq1q2(q1, q2, 1, split, 1e-10)
        assert paraunitarity_defect(b) <= TOL
        assert within(b.support, (-1, 1))
        assert standard_pattern_ok(b, ct)
        for q in (q1, q2):
            out = mat_mul(q, b, zero_tol=1e-10)
            assert within(out.support, (0, 0))
            assert row_type(out, ct) == row_type(q, ct)


def test_paired_factor_P4_on_100_companions():
    checked = 0
    seed = 0
    while checked < 100:
        rng = np.random.default_rng(500 + seed)
        seed += 1
        q1, q2, n = random_pair(rng, complex_=bool(seed % 2))
        split = StandardSymmetrySplit((1, 0, 1, 0), n)
        ct = split.col_types()
        b = build_Bq1q2(q1, q2, 1, split, 1e-10)
        pe, _ = extend(LaurentMatrix.vstack([q1, q2]))
        for i in range(2, pe.rows):
            p = pe.row(i)
            rho = row_type(p, ct)
            assert rho is not None
            out = mat_mul(p, b, zero_tol=1e-10)
            assert row_type(out, ct) in (rho, T(0, 0))
            assert within(out.support, p.support)
            checked += 1


# -- terminal pieces ---------------------------------------------------------

def test_BQ1_is_identity_when_both_ends_vanish():
    split = StandardSymmetrySplit((1, 0, 0, 0), (2, 1, 0, 0))
    q = LaurentMatrix.constant([[0.6, 0.8, 0.0]])
    b, new = build_BQ1(q, 1, split, 1e-10)
    assert b.max_abs_diff(LaurentMatrix.identity(3)) == 0.0
    assert new == split


def test_BQ1_migrates_rank_one_block():
    # q = [(1 + z)/2, (1 - z)/2] has type z against column types (1, -1)
    split = StandardSymmetrySplit((0, 0, 1, 0), (1, 1, 0, 0))
    q = LaurentMatrix.from_entries([[poly({0: 0.5, 1: 0.5}), poly({0: 0.5, 1: -0.5})]])
    b, new = build_BQ1(q, 1, split, 1e-10)
    out = mat_mul(q, b, zero_tol=1e-12)
    assert out.support == (0, 0)
    assert new.s == (0, 0, 1, 1)
    assert paraunitarity_defect(b) < 1e-14


def test_BQ1_rejects_two_sided_ends():
    split = StandardSymmetrySplit((1, 0, 0, 0), (1, 0, 0, 0))
    q = LaurentMatrix.from_entries([[poly({-1: 0.25, 0: 0.5, 1: 0.25})]])
    with pytest.raises(ReductionError):
        build_BQ1(q, 1, split, 1e-10)


def test_build_Bq_rejects_non_unit_row():
    split = StandardSymmetrySplit((1, 0, 0, 0), (1, 0, 0, 0))
    q = LaurentMatrix.from_entries([[poly({-1: 1.0, 0: 1.0, 1: 1.0})]])
    with pytest.raises(PreconditionError) as err:
        build_Bq(q, split)
    assert err.value.check == "norm defect"


def test_support_reduction_of_constant_is_empty():
    split = StandardSymmetrySplit((1, 0, 0, 0), (2, 0, 0, 0))
    q = LaurentMatrix.constant([[1.0, 0.0]])
    factors, q_final, history = support_reduction(q, split)
    assert factors == [] and q_final.support == (0, 0) and history == [split]


@pytest.mark.parametrize("q, expected", [
    ([[1.0, 0.0, 0.0]], np.eye(3)),
    ([[0.0, 1.0]], np.array([[0, 1], [1, 0]])),
])
def test_finalize_constant_rows(q, expected):
    s = len(q[0])
    split = StandardSymmetrySplit((1, 0, 0, 0), (s, 0, 0, 0))
    u = finalize(LaurentMatrix.constant(q), split)
    np.testing.assert_allclose(np.abs(u), expected, atol=1e-15)
    np.testing.assert_allclose(np.asarray(q) @ u, np.eye(1, s), atol=1e-15)


# -- driver ------------------------------------------------------------------

@pytest.mark.parametrize("r, s", [(1, 1), (1, 3), (2, 4), (3, 3)])
def test_extend_identity_block(r, s):
    p = LaurentMatrix.constant(np.eye(r, s))
    pe, cascade = extend(p)
    assert pe.max_abs_diff(LaurentMatrix.identity(s)) == 0.0
    assert cascade.J == 0


def _assert_pattern(pe, r, rows, cols):
    """Rows ``< r`` match the reference factors exactly; the extension rows
    may come in any order, so their types are compared as a multiset."""
    got = []
    for j in range(pe.rows):
        rho = row_type(pe.row(j), cols)
        assert rho is not None, f"row {j} has no compatible symmetry"
        got.append(rho)
    assert got[:r] == list(rows[:r])
    assert sorted(got[r:]) == sorted(rows[r:])


def test_extend_ghm_row_block():
    p = load_matrix(FIXTURES / "ex31_P.json")
    pe, cascade = extend(p)
    assert cascade.J == 1
    assert pe[:2, :].max_abs_diff(p) <= 1e-12
    assert paraunitarity_defect(pe) <= 1e-12
    # Sym Pe = [1, z, z, -z]^T [1, 1/z, -1, 1]
    _assert_pattern(pe, 2, [T(1, 0), T(1, 1), T(1, 1), T(-1, 1)],
                    [T(1, 0), T(1, -1), T(-1, 0), T(1, 0)])
    for k in range(4):
        assert within(pe.col(k).support, p.col(k).support)


def test_extend_example_33_row_block():
    p = load_matrix(FIXTURES / "ex33_P.json")
    pe, cascade = extend(p)
    assert cascade.J <= 1
    assert pe[:2, :].max_abs_diff(p) <= 1e-12
    zi = T(1, -1)
    _assert_pattern(pe, 2, [zi, T(-1, -1), T(-1, -1), zi, T(1, 0), T(-1, 0)],
                    [T(1, 0), T(-1, 0), T(-1, 0), T(1, 0), T(1, 0), T(-1, 0)])


@pytest.mark.parametrize("name", ["ex31_P", "ex32_P", "ex33_P"])
def test_extend_examples_meet_all_contracts(name):
    p = load_matrix(FIXTURES / f"{name}.json")
    pe, cascade = extend(p)
    report = check_cascade(p, pe, cascade)
    assert report.ok(TOL), report
    assert report.J <= j_bound(p)


def test_extend_is_deterministic():
    p = load_matrix(FIXTURES / "ex32_P.json")
    a, _ = extend(p)
    b, _ = extend(p)
    assert a.low == b.low and np.array_equal(a.stack, b.stack)


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), complex_=st.booleans())
def test_extend_contracts_on_random_blocks(seed, complex_):
    rng = np.random.default_rng(seed)
    r = int(rng.integers(1, 4))
    s = int(rng.integers(r, r + 5))
    p = random_symmetric_row_block(r, s, rng, complex_=complex_)
    pe, cascade = extend(p)
    report = check_cascade(p, pe, cascade)
    assert report.ok(TOL), report


# -- errors ------------------------------------------------------------------

def test_extend_rejects_wide_request():
    with pytest.raises(PreconditionError) as err:
        extend(LaurentMatrix.constant(np.eye(3, 2)))
    assert err.value.check == "shape"


def test_extend_rejects_non_paraunitary():
    p = LaurentMatrix.from_entries([[poly({0: 1.0, 1: 1.0})]])
    with pytest.raises(PreconditionError) as err:
        extend(p)
    assert err.value.check == "paraunitarity defect"


def test_extend_rejects_missing_symmetry():
    t = 0.3
    a = poly({0: (math.cos(t) + math.sin(t)) / 2, 1: (math.cos(t) - math.sin(t)) / 2})
    b = poly({0: (math.cos(t) - math.sin(t)) / 2, 1: -(math.cos(t) + math.sin(t)) / 2})
    p = LaurentMatrix.from_entries([[a, b]])
    assert paraunitarity_defect(p) < 1e-15
    assert detect_compatible_symmetry(p) is None
    with pytest.raises(PreconditionError) as err:
        extend(p)
    assert err.value.check == "compatible symmetry"


def test_zero_columns_follow_the_type_hint():
    p = LaurentMatrix.constant([[1.0, 0.0, 0.0]])
    hint = (SymmetryType(1, 0), SymmetryType(-1, -1), SymmetryType(1, -1))
    pe, cascade = extend(p, col_types=hint)
    assert cascade.symmetry.theta2 == hint
    assert paraunitarity_defect(pe) <= 1e-12
    assert row_type(pe.row(0), hint) == SymmetryType(1, 0)
    for j in range(1, 3):
        assert row_type(pe.row(j), hint) is not None
    with pytest.raises(PreconditionError):
        extend(p, col_types=hint[:2])
