"""Regenerate the JSON fixtures in ``fixtures/`` from reference coefficients.

Run from the repository root::

    python tools/make_fixtures.py
"""

from __future__ import annotations

import math
from fractions import Fraction as F
from pathlib import Path

from symext.io import filter_to_obj, matrix_to_obj, symmetry_to_obj, write_json
from symext.laurent import LaurentMatrix, LaurentPoly

OUT = Path(__file__).resolve().parent.parent / "fixtures"

z = LaurentPoly.monomial(1.0, 1)
zi = LaurentPoly.monomial(1.0, -1)
s2, s3, s6 = math.sqrt(2), math.sqrt(3), math.sqrt(6)


def M(rows, scale=1.0) -> LaurentMatrix:
    return LaurentMatrix.from_entries(rows, zero_tol=0.0).scale(scale)


def refl(p: LaurentPoly, k: int) -> LaurentPoly:
    """``z^k p(1/z)``."""
    return p.reflect().shift(k)


def poly(terms: dict[int, float]) -> LaurentPoly:
    return LaurentPoly.from_dict(terms, zero_tol=0.0)


def sym(eps, c):
    return symmetry_to_obj(eps, [F(x) for x in c])


def ex31():
    a0 = M([[12 * (1 + zi), 16 * s2 * zi],
            [-s2 * (z * z - 9 * z - 9 + zi), -2 * (3 * z - 10 + 3 * zi)]], 1 / 40)
    a1 = M([[-s2 * (z * z - 9 * z - 9 + zi), -2 * (3 * z + 10 + 3 * zi)],
            [2 * (z * z - 9 * z + 9 - zi), 6 * s2 * (z - zi)]], 1 / 40)
    rows = [[6 * s2, 0, 0, 8 * s2], [4 * (1 + z), 10, 5 * (1 - z), -3 * (1 + z)]]
    ext = [[4 * (1 + z), -10, 5 * (1 - z), -3 * (1 + z)],
           [4 * s2 * (1 - z), 0, 5 * s2 * (z + 1), 3 * s2 * (z - 1)]]
    low_sym = sym((1, 1), (-1, 0))
    targets = [sym((1, -1), (0, 0))]
    write_json(OUT / "ghm_lowpass.json",
               filter_to_obj(a0, 2, (1, 1), (F(-1), F(0)), {"highpass_symmetry": targets}))
    write_json(OUT / "ghm_highpass_1.json", filter_to_obj(a1, 2, (1, -1), (F(0), F(0)),
                                                            {"column_symmetry": low_sym}))
    write_json(OUT / "ex31_P.json", matrix_to_obj(M(rows, s2 / 20)))
    write_json(OUT / "ex31_Pe.json", matrix_to_obj(
        M(rows + ext, s2 / 20),
        {"rows": sym((1, 1, 1, -1), (0, 1, 1, 1)),
         "cols": sym((1, 1, -1, 1), (0, -1, 0, 0))}))
    return low_sym


def ex32():
    r41 = math.sqrt(41)
    a11 = poly({0: 90, 1: 55 - 5 * r41, 2: -(8 + 2 * r41), 4: 7 * r41 - 47})
    a12 = poly({0: 145 + 5 * r41, 2: 1 - r41, 3: 34 - 4 * r41})
    a21 = poly({2: 111 + 9 * r41, 4: 69 - 9 * r41})
    a22 = poly({1: 90, 2: 63 - 3 * r41, 3: 3 * r41 - 63})
    a0 = M([[a11 + refl(a11, 0), a12 + refl(a12, -1)],
            [a21 + refl(a21, 3), a22 + refl(a22, 2)]], 1 / 540)
    h11 = poly({4: 47 - 7 * r41, 2: 2 * (4 + r41), 1: 5 * (r41 - 11), 0: 180})
    h12 = poly({3: 2 * (2 * r41 - 17), 2: r41 - 1, 0: -5 * (29 + r41)})
    h21 = poly({1: 3 * (37 + 3 * r41), -1: 3 * (23 - 3 * r41)})
    h22 = poly({1: -180, 0: 3 * (21 - r41), -1: -3 * (21 - r41)})
    a1 = M([[h11 + refl(h11, 0), h12 + refl(h12, -1)],
            [h21 + refl(h21, 3), h22 + refl(h22, 2)]], s2 / 1080)
    g11 = poly({1: 43 + 17 * r41, -1: 67 - 7 * r41})
    g12 = poly({0: 11 * r41 - 31, -1: -(79 + r41)})
    g21 = poly({4: 47 - 7 * r41, 2: 2 * (4 + r41), 1: -3 * (29 + r41)})
    g22 = poly({3: 2 * (2 * r41 - 17), 2: r41 - 1, 0: 3 * (3 + 7 * r41)})
    a2 = M([[g11 - refl(g11, 3), g12 - refl(g12, 2)],
            [g21 - refl(g21, 0), g22 - refl(g22, -1)]], s6 / 1080)

    c0 = 11 - r41
    t12, c12, t13 = 5 * (7 - r41), 10 * (29 + r41), -5 * c0
    t16, t15 = 3 * c0, 3 * (3 * r41 - 13)
    t25, t26 = 6 * (7 + 3 * r41), 6 * (21 - r41)
    t53, t55, t56 = 400 * s6 / c0, 12 * s6 * (r41 - 1), 6 * s6 * (4 + r41)
    c66 = 3 * s6 * (3 + 7 * r41)
    b12 = t12 * (z + zi) + c12
    b13 = t13 * (z - 2 + zi)
    b65 = (5 * t15 * (z + zi) + 3 * c12) * (-s6 / 10)
    b66 = -s6 * t16 * (z + zi) / 2 + c66
    rows = [[180 * s2, b12, b13, 0, t15 * (z - zi), t16 * (z - zi)],
            [0, 0, 180 * (1 + z), 180 * s2, t25 * (1 - z), t26 * (1 - z)]]
    ext = [[360, -b12 / s2, -b13 / s2, 0, t15 / s2 * (zi - z), t16 / s2 * (zi - z)],
           [0, 0, 90 * s2 * (1 + z), -360, t25 / s2 * (1 - z), t26 / s2 * (1 - z)],
           [0, s6 * t13 * (1 - z), t53 * (1 - z), 0, t55 * (1 + z), t56 * (1 + z)],
           [0, s6 * t12 / 2 * (zi - z), s6 * t13 / 2 * (zi - z), 0, b65, b66]]
    targets = [sym((1, 1), (0, 1)), sym((-1, -1), (1, 0))]
    write_json(OUT / "ex32_lowpass.json",
               filter_to_obj(a0, 3, (1, 1), (F(0), F(1)), {"highpass_symmetry": targets}))
    col = {"column_symmetry": sym((1, 1), (0, 1))}
    write_json(OUT / "ex32_highpass_1.json", filter_to_obj(a1, 3, (1, 1), (F(0), F(1)), col))
    write_json(OUT / "ex32_highpass_2.json", filter_to_obj(a2, 3, (-1, -1), (F(1), F(0)), col))
    write_json(OUT / "ex32_P.json", matrix_to_obj(M(rows, s6 / 1080)))
    write_json(OUT / "ex32_Pe.json", matrix_to_obj(
        M(rows + ext, s6 / 1080),
        {"rows": sym((1, 1, 1, 1, -1, -1), (0, 1, 0, 1, 1, 0)),
         "cols": sym((1, 1, 1, 1, -1, -1), (0, 0, 0, -1, 0, 0))}))


def ex33():
    r17 = math.sqrt(17)
    a11 = poly({2: 11 - 14 * r17, 1: 29 + 8 * r17, 0: 234, -1: 85 - 16 * r17, -2: -(17 + 2 * r17)})
    a12 = poly({3: 5 * r17 - 16, 2: 2 + r17, 0: 238 - 11 * r17, -1: 136 + 29 * r17})
    a21 = poly({2: 136 + 29 * r17, 1: 238 - 11 * r17, -1: 2 + r17, -2: 5 * r17 - 16})
    a22 = poly({3: -17 - 2 * r17, 2: 85 - 16 * r17, 1: 234, 0: 29 + 8 * r17, -1: 11 - 14 * r17})
    a0 = M([[a11, a12], [a21, a22]], 1 / 702)
    e = LaurentMatrix.constant([[1 / s2, 1 / s2], [1 / s2, -1 / s2]])
    at0 = (e @ a0 @ e)

    h11 = poly({3: 433 - 128 * r17, 2: 13 * (25 * r17 - 43), 1: -(1226 + 197 * r17)})
    h12 = poly({3: 128 * r17 - 433, 2: 15 * (23 * r17 - 19), 1: -(758 + 197 * r17)})
    h21 = poly({3: 3 * (133 - 44 * r17), 2: 117 * (3 * r17 - 1), 1: -3 * (73 * r17 + 94)})
    h22 = poly({3: 3 * (44 * r17 - 133), 2: 3 * (145 * r17 - 61), 1: -3 * (250 + 73 * r17)})
    at1 = M([[h11 - refl(h11, 1), h12 + refl(h12, 1)],
             [h21 + refl(h21, 1), h22 - refl(h22, 1)]], math.sqrt(26) / 36504)
    k = 13 * (1 + r17)
    g11 = poly({3: k, 2: -2 * k, 1: k})
    g12 = poly({3: 13 * (3 * r17 - 1), 1: -13 * (3 * r17 - 1)})
    g21 = poly({3: 9 + 11 * r17, 1: -(9 + 11 * r17)})
    w = 41 * r17 - 9
    g22 = poly({3: w, 2: w * (24 + 18 * r17) / 137, 1: w})
    at2 = M([[g11, g12], [g21, g22]], math.sqrt(78) / 4056)

    c = s6 / 1404
    p, m = 1 + zi, 1 - zi
    t12, t13, t16 = 3 * (11 - r17), 3 * (r17 - 89), 15 * s2 * (2 + r17)
    t21, t22, t23 = 13 * (r17 - 17), 6 * (2 + r17), 6 * (37 - r17)
    t24, t25, t26 = -13 * (1 + r17), -13 * s2 * (8 + r17), -3 * s2 * (7 + 10 * r17)
    s26, s13, s78 = math.sqrt(26), math.sqrt(13), math.sqrt(78)
    t31 = -s26 * (61 + 25 * r17) / 4
    t32 = -3 * s26 * (397 + 23 * r17) / 52
    t33 = 3 * s26 * (553 + 23 * r17) / 52
    t34 = 25 * s26 * (1 + r17) / 4
    t35 = s13 * (25 * r17 - 43) / 2
    t36 = 15 * s13 * (23 * r17 - 19) / 26
    t41 = 9 * s26 * (1 - 3 * r17) / 4
    t42 = -3 * s26 * (383 + 29 * r17) / 52
    t43 = 3 * s26 * (29 * r17 + 227) / 52
    t44 = 27 * s26 * (1 + r17) / 4
    t46 = 3 * s13 * (145 * r17 - 61) / 26
    t62 = 9 * s78 * (41 * r17 - 9) / 26
    t63 = 9 * s78 * (11 * r17 + 9) / 26
    t66 = 27 * s3 * (r17 + 15) / math.sqrt(13)
    rows = [[234 * p, t12 * m, t13 * m, 0, 117 * s2 * p, t16 * m],
            [t21 * m, t22 * p, t23 * p, t24 * m, t25 * m, t26 * p]]
    ext = [[t31 * m, t32 * p, t33 * p, t34 * m, t35 * m, t36 * p],
           [t41 * p, t42 * m, t43 * m, t44 * p, -s2 * t41 * p, t46 * m],
           [2 / s3 * t44, 0, 0, -2 * s3 * t41, -4 / s6 * t44, 0],
           [0, t62, t63, 0, 0, t66]]
    half, three_half = F(1, 2), F(3, 2)
    col = {"column_symmetry": sym((1, -1), (half, half))}
    targets = [sym((-1, 1), (half, half)), sym((1, -1), (three_half, three_half))]
    write_json(OUT / "ex33_lowpass.json",
               filter_to_obj(a0, 3, (1, -1), (half, half), {"highpass_symmetry": targets}))
    write_json(OUT / "ex33_E.json", matrix_to_obj(e))
    write_json(OUT / "ex33_lowpass_tilde.json",
               filter_to_obj(at0, 3, (1, -1), (half, half), {"highpass_symmetry": targets}))
    write_json(OUT / "ex33_highpass_tilde_1.json",
               filter_to_obj(at1, 3, (-1, 1), (half, half), col))
    write_json(OUT / "ex33_highpass_tilde_2.json",
               filter_to_obj(at2, 3, (1, -1), (three_half, three_half), col))
    write_json(OUT / "ex33_P.json", matrix_to_obj(M(rows, c)))
    write_json(OUT / "ex33_Pe.json", matrix_to_obj(
        M(rows + ext, c),
        {"rows": sym((1, -1, -1, 1, 1, -1), (-1, -1, -1, -1, 0, 0)),
         "cols": sym((1, -1, -1, 1, 1, -1), (0, 0, 0, 0, 0, 0))}))


def main() -> None:
    ex31()
    ex32()
    ex33()
    write_json(OUT / "identity_2x4.json",
               matrix_to_obj(LaurentMatrix.constant([[1, 0, 0, 0], [0, 1, 0, 0]])))


if __name__ == "__main__":
    main()
