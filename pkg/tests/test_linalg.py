import math
import random

import pytest

from drinfeld_delta import Field, SeriesRing
from drinfeld_delta import linalg as la
from drinfeld_delta.errors import PrecisionExhausted

R = SeriesRing(Field(3, (1, 1)))


def rand_series(rng, prec, nterms=6):
    cs = [rng.randrange(3) for _ in range(nterms)]
    return R.poly(cs, prec, rng.randrange(0, 3))


def rand_unit_matrix(rng, n, prec):
    # I + z*(random) is always invertible over R
    A = [[rand_series(rng, prec).zshift(1) for _ in range(n)] for _ in range(n)]
    for i in range(n):
        A[i][i] = A[i][i] + R.one(prec)
    return la.mat(A)


def test_mat_inv_roundtrip():
    rng = random.Random(21)
    for n in (1, 2, 3):
        for _ in range(20):
            A = rand_unit_matrix(rng, n, 20)
            B = la.mat_inv(A)
            resid = la.mat_sub(la.mat_mul(A, B), la.mat_eye(R, n, 20))
            floor = la.mat_zero_floor(resid)
            assert floor is not None and floor >= 18
            resid = la.mat_sub(la.mat_mul(B, A), la.mat_eye(R, n, 20))
            assert la.mat_zero_floor(resid) is not None


def test_det_multiplicative():
    rng = random.Random(22)
    for _ in range(30):
        A = rand_unit_matrix(rng, 3, 18)
        B = rand_unit_matrix(rng, 3, 18)
        d = la.mat_det(la.mat_mul(A, B))
        assert d.eq_at_prec(la.mat_det(A) * la.mat_det(B))


def test_solve_in_span_recovers_coefficients():
    rng = random.Random(23)
    prec = 25
    for _ in range(30):
        cols = [
            tuple(rand_series(rng, prec) for _ in range(3)),
            tuple(rand_series(rng, prec) for _ in range(3)),
        ]
        c0, c1 = rand_series(rng, prec), rand_series(rng, prec)
        target = tuple(
            cols[0][i] * c0 + cols[1][i] * c1 for i in range(3)
        )
        ok, cs, floor = la.solve_in_span(cols, target)
        if not ok:
            continue  # random columns happened to be dependent: skip
        assert cs[0].eq_at_prec(c0) and cs[1].eq_at_prec(c1)
        assert floor is not None and floor >= 15


def test_solve_in_span_rejects_outside():
    prec = 20
    cols = [(R.one(prec), R.zero(prec))]
    target = (R.zero(prec), R.one(prec))
    ok, cs, floor = la.solve_in_span(cols, target)
    assert not ok and cs is None and floor is None


def test_solve_in_span_dependent_raises():
    prec = 20
    v = (R.poly([1, 1], prec), R.z(prec))
    with pytest.raises(PrecisionExhausted):
        la.solve_in_span([v, v], (R.one(prec), R.one(prec)))


def test_empty_span():
    ok, cs, floor = la.solve_in_span([], (R.zero(12),))
    assert ok and cs == [] and floor == 12
    ok, cs, floor = la.solve_in_span([], (R.one(12),))
    assert not ok


def test_rank_profile():
    prec = 20
    v = (R.one(prec), R.z(prec))
    zv = (R.z(prec), R.zpow(2, prec))
    w = (R.zero(prec), R.one(prec))
    assert la.rank_profile([v, zv, w], 2, R, prec) == [1, 1, 2]
    assert la.rank_profile([], 2, R, prec) == []


def test_vec_zero_floor():
    assert la.vec_zero_floor(()) == math.inf
    assert la.vec_zero_floor((R.zero(5), R.zero(9))) == 5
    assert la.vec_zero_floor((R.zero(5), R.z(9))) is None
