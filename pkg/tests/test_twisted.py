"""Twisted series: composition algebra, S* inversion, motive reduction.

Composition is (B tau^i)(C tau^j) = B C^(q^i) tau^(i+j) with the full q-power
(leads scale too), so associativity is a real test of the twist bookkeeping.
"""

import random

import pytest

from drinfeld_delta import (
    AndersonModule,
    DrinfeldModule,
    Field,
    SeriesRing,
    TwistedSeries,
    motive_reconstruct,
    motive_reduce,
    s_star_invert,
)
from drinfeld_delta.errors import NotAdmissible, ValidationError

R = SeriesRing(Field(3, (1, 1)))


def rand_series(rng, prec, unit=False, nterms=5):
    lead = 0 if unit else rng.randrange(0, 3)
    cs = [rng.randrange(3) for _ in range(nterms)]
    if unit:
        cs[0] = rng.randrange(1, 3)
    if not any(cs):
        cs[0] = 1
    return R.poly(cs, prec, lead)


def rand_twisted(rng, dout, din, deg, prec):
    """Random exact twisted polynomial of tau-degree < deg."""
    terms = {}
    for i in range(deg):
        if rng.random() < 0.7 or (i == deg - 1 and not terms):
            terms[i] = [
                [rand_series(rng, prec) for _ in range(din)] for _ in range(dout)
            ]
    return TwistedSeries(R, dout, din, terms)


def rand_module(rng, r, prec):
    coeffs = [R.z(prec)]
    coeffs += [rand_series(rng, prec) for _ in range(r - 1)]
    coeffs.append(rand_series(rng, prec, unit=True))
    return DrinfeldModule(R, coeffs)


def test_compose_associativity():
    rng = random.Random(31)
    cap = 30
    for _ in range(200):
        da, db, dc, dd = (rng.randrange(1, 3) for _ in range(4))
        A = rand_twisted(rng, da, db, 4, cap)
        B = rand_twisted(rng, db, dc, 4, cap)
        C = rand_twisted(rng, dc, dd, 4, cap)
        lhs = A.compose(B, cap).compose(C, cap)
        rhs = A.compose(B.compose(C, cap), cap)
        floor, tail = lhs.sub(rhs).represented_zero_floor()
        assert tail and floor is not None and floor >= cap


def test_compose_matches_apply():
    rng = random.Random(32)
    cap = 25
    for _ in range(50):
        A = rand_twisted(rng, 2, 2, 3, cap)
        B = rand_twisted(rng, 2, 1, 3, cap)
        vec = [rand_series(rng, cap)]
        left = A.apply(B.apply(vec, cap), cap)
        right = A.compose(B, cap).apply(vec, cap)
        for u, v in zip(left, right):
            assert u.eq_at_prec(v)


def test_sstar_inverse_frozen():
    # B = 1 + z tau: the inverse has C_i = (-1)^i z^((q^i - 1)/(q - 1))
    cap = 90
    B = TwistedSeries.scalar(R, {0: R.one(cap), 1: R.z(cap)})
    C = s_star_invert(B, 5, cap)
    for i in range(5):
        want = R.zpow((3 ** i - 1) // 2, cap)
        if i % 2:
            want = want.cmul(2)
        got = C.scalar_coeff(i)
        assert got is not None and got.eq_at_prec(want)


def test_sstar_two_sided():
    rng = random.Random(33)
    cap = 30
    for _ in range(30):
        n = rng.randrange(1, 3)
        terms = {}
        for i in range(3):
            M = [[rand_series(rng, cap) for _ in range(n)] for _ in range(n)]
            if i == 0:
                for a in range(n):
                    for b in range(n):
                        M[a][b] = M[a][b].zshift(1) if a != b else M[a][b]
                    M[a][a] = rand_series(rng, cap, unit=True)
            terms[i] = M
        B = TwistedSeries(R, n, n, terms)
        C = s_star_invert(B, 6, cap)
        one = TwistedSeries.identity(R, n, cap)
        for prod in (C.compose(B, cap), B.compose(C, cap)):
            floor, _ = prod.tau_truncate(6).sub(one).represented_zero_floor()
            assert floor is not None and floor >= 20


def test_decay_certificate_enforced():
    one = R.one(10)
    with pytest.raises(ValidationError):
        TwistedSeries(R, 1, 1, {3: ((one,),)}, tau_cut=5, decay=0)
    # ord >= i - decay passes
    TwistedSeries(R, 1, 1, {3: ((R.zpow(2, 10),),)}, tau_cut=5, decay=1)
    with pytest.raises(ValidationError):
        TwistedSeries(R, 1, 1, {7: ((one,),)}, tau_cut=5)  # beyond cut


def test_module_admissibility():
    prec = 15
    with pytest.raises(NotAdmissible):
        DrinfeldModule(R, [R.one(prec), R.one(prec)])  # a0 != z
    with pytest.raises(NotAdmissible):
        DrinfeldModule(R, [R.z(prec), R.one(prec).zshift(-1)])  # not integral
    with pytest.raises(NotAdmissible):
        DrinfeldModule(R, [R.z(prec), R.z(prec)])  # top not a unit
    mod = DrinfeldModule(R, [R.z(prec), R.one(prec)])
    assert mod.r == 1 and mod.d == 1

    I2 = [[R.z(prec), R.zero(prec)], [R.zero(prec), R.z(prec)]]
    top = [[R.one(prec), R.zero(prec)], [R.z(prec), R.one(prec)]]
    am = AndersonModule(R, [I2, top])
    assert am.d == 2 and am.rank == 2
    with pytest.raises(NotAdmissible):
        AndersonModule(R, [top, top])  # tau^0 must be z*I


def test_motive_roundtrip_drinfeld():
    rng = random.Random(34)
    cap = 30
    for _ in range(30):
        mod = rand_module(rng, rng.randrange(1, 4), cap)
        elem = rand_twisted(rng, 1, 1, mod.r + 3, cap)
        coords = motive_reduce(mod, elem, cap)
        assert all(i < mod.r for i, _ in coords)
        back = motive_reconstruct(mod, coords, cap)
        floor, _ = back.sub(elem).represented_zero_floor()
        assert floor is not None and floor >= 20


def test_motive_roundtrip_anderson():
    rng = random.Random(35)
    cap = 25
    prec = cap
    for _ in range(10):
        A1 = [
            [rand_series(rng, prec).zshift(1) for _ in range(2)] for _ in range(2)
        ]
        A1[0][0] = A1[0][0] + R.one(prec)
        A1[1][1] = A1[1][1] + R.one(prec)
        I2 = [[R.z(prec), R.zero(prec)], [R.zero(prec), R.z(prec)]]
        am = AndersonModule(R, [I2, A1])
        elem = rand_twisted(rng, 1, 2, 4, cap)
        coords = motive_reduce(am, elem, cap)
        assert all(i < am.s for i, _ in coords)
        back = motive_reconstruct(am, coords, cap)
        floor, _ = back.sub(elem).represented_zero_floor()
        assert floor is not None and floor >= 15


def test_apply_semilinearity():
    # apply twists the argument: (B tau)(v) = B * v^(q)
    cap = 20
    B = TwistedSeries.scalar(R, {1: R.one(cap)})
    v = R.poly([0, 1, 1], cap)  # z + z^2
    out = B.apply([v], cap)[0]
    assert out.eq_at_prec(v.qpow(1, cap))
