"""Newton side (sigma-linearization, charpoly, polygon) and Hodge side
(u-window arithmetic, Smith orders, filtration) of the associated crystal.
"""

import random
from fractions import Fraction

import pytest

from drinfeld_delta import (
    DrinfeldModule,
    Field,
    SeriesRing,
    UPoly,
    compute_invariants,
    f_star_matrix,
    find_irreducible,
    hodge_filtration,
    hodge_pink_lattice,
    newton_data,
    newton_slopes,
    weak_admissibility,
)
from drinfeld_delta import linalg as la
from drinfeld_delta.errors import Inconsistent, PrecisionExhausted, Undecided
from drinfeld_delta.isocrystal import (
    charpoly,
    lattice_is_standard,
    sigma_product,
    smith_u_orders,
    u_det,
)

R = SeriesRing(Field(3, (1, 1)))
R9 = SeriesRing(Field(3, find_irreducible(3, 2)))  # q = 3, s = 2


def F(a, b=1):
    return Fraction(a, b)


def test_newton_slopes_frozen():
    one, z = R.one(20), R.z(20)
    assert newton_slopes([z, one, one], 1) == (F(0), F(1))
    assert newton_slopes([z, R.zero(20), one], 1) == (F(1, 2), F(1, 2))
    cs = [R.zpow(6, 20), R.zpow(2, 20), z, one]
    assert newton_slopes(cs, 1) == (F(1), F(1), F(4))
    # the same polygon halves under s = 2
    assert newton_slopes([z, one, one], 2) == (F(0), F(1, 2))


def test_newton_uncertified_coefficients():
    one = R.one(20)
    # c_1 unknown but the hull level at x=1 is 1/2 < prec: fine
    assert newton_slopes([R.z(20), R.zero(20), one], 1) == (F(1, 2), F(1, 2))
    with pytest.raises(PrecisionExhausted):
        newton_slopes([R.zpow(2, 20), R.zero(0), one], 1)
    with pytest.raises(Undecided):
        newton_slopes([R.zero(5), one, one], 1)


def test_charpoly_2x2():
    rng = random.Random(61)
    for _ in range(20):
        A = [
            [R.poly([rng.randrange(3) for _ in range(4)], 15) for _ in range(2)]
            for _ in range(2)
        ]
        cs = charpoly(R, la.mat(A))
        tr = A[0][0] + A[1][1]
        det = la.mat_det(la.mat(A))
        assert cs[2].eq_at_prec(R.one(15))
        assert cs[1].eq_at_prec(-tr)
        assert cs[0].eq_at_prec(det)


def test_sigma_product_f9():
    rng = random.Random(62)
    assert R9.s == 2
    for _ in range(10):
        M = la.mat([
            [R9.poly([rng.randrange(9) for _ in range(4)], 12) for _ in range(2)]
            for _ in range(2)
        ])
        Ms = sigma_product(M, 2)
        want = la.mat_mul(M, la.mat_phi_pow(M, 1))
        assert la.mat_zero_floor(la.mat_sub(Ms, want)) is not None
        # sigma has order s on the coefficient field
        assert la.mat_zero_floor(la.mat_sub(la.mat_phi_pow(M, 2), M)) is not None


def test_slopes_invariant_under_basis_change():
    # M -> C^-1 M C^phi preserves the polygon of the sigma-s product
    rng = random.Random(63)
    prec = 14
    for _ in range(20):
        diag = [R9.zpow(rng.randrange(0, 3), prec) for _ in range(2)]
        M = [
            [
                diag[i] if i == j
                else R9.poly([rng.randrange(9) for _ in range(3)], prec)
                for j in range(2)
            ]
            for i in range(2)
        ]
        M[0][1] = M[0][1] * R9.z(prec)  # keep det = unit * product(diag)
        M = la.mat(M)
        base = newton_data(R9, M)
        C = [
            [R9.poly([rng.randrange(9) for _ in range(3)], prec).zshift(1)
             for _ in range(2)]
            for _ in range(2)
        ]
        C[0][0] = C[0][0] + R9.one(prec)
        C[1][1] = C[1][1] + R9.one(prec)
        C = la.mat(C)
        conj = la.mat_mul(la.mat_inv(C), la.mat_mul(M, la.mat_phi_pow(C, 1)))
        assert newton_data(R9, conj)["slopes"] == base["slopes"]
        assert newton_data(R9, conj)["t_N"] == base["t_N"]


def test_upoly_arithmetic():
    one = R.one(10)
    a = UPoly(R, 0, [one, one], 5)        # 1 + u
    b = UPoly(R, 0, [one, -one], 5)       # 1 - u
    p = a * b
    assert p.coeff(0).eq_at_prec(one)
    assert p.coeff(1).is_zero()
    assert p.coeff(2).eq_at_prec(-one)
    inv = b.inv()
    for k in range(inv.uprec):
        assert inv.coeff(k).eq_at_prec(one)  # 1/(1-u) = 1 + u + u^2 + ...
    check = b * inv
    assert check.coeff(0).eq_at_prec(one)
    assert all(check.coeff(k).is_zero() for k in range(1, check.uprec))


def test_upoly_laurent_window():
    one = R.one(10)
    v = UPoly.monomial(R, one, -2, 3)
    assert v.ord_u() == -2
    w = v.inv()  # inverting a pole gains window: uprec 3 - 2*(-2) = 7
    assert w.lead == 2 and w.uprec == 7
    assert w.coeff(2).eq_at_prec(one)
    assert v.shift(3).ord_u() == 1
    assert v.coeff(-3) is None  # below lead: exact zero
    with pytest.raises(PrecisionExhausted):
        v.coeff(3)
    assert UPoly(R, 4, [], 4).zero_certified()


def test_smith_orders():
    one = R.one(12)
    z = R.z(12)
    Q = (
        (UPoly.monomial(R, one, -2, 4), UPoly.const(R, R.zero(12), 4)),
        (UPoly.const(R, R.zero(12), 4), UPoly.const(R, one, 4)),
    )
    assert smith_u_orders(Q) == (-2, 0)
    u = UPoly.monomial(R, one, 1, 4)
    Q2 = (
        (UPoly.const(R, one, 4), u),
        (u, UPoly.const(R, R.zero(12), 4)),
    )
    assert smith_u_orders(Q2) == (0, 2)
    assert u_det(Q2).ord_u() == 2
    # z-unit coefficients do not disturb u-orders
    Q3 = ((UPoly.monomial(R, z + one, 2, 5),),)
    assert smith_u_orders(Q3) == (2,)


def test_hodge_lattice_closed_form():
    for e in (1, 2):
        gamma = R.zpow(e, 20).cmul(2)
        lat = hodge_pink_lattice(R, (), gamma)
        assert lat["e"] == e
        fil = hodge_filtration(lat)
        assert fil["divisors"] == (-e,)
        assert fil["t_H"] == e
        assert fil["fil_dims"] == (1,) * (e + 1) + (0,)
        assert not lattice_is_standard(lat["Q"])
        shifted = tuple(
            tuple(c.shift(e) for c in row) for row in lat["Q"]
        )
        assert lattice_is_standard(shifted)


def test_hodge_lattice_rank2():
    lam = R.poly([1, 2], 20)
    gamma = R.z(20)
    lat = hodge_pink_lattice(R, (lam,), gamma)
    fil = hodge_filtration(lat)
    assert fil["divisors"] == (-1, 0)
    assert fil["fil_dims"] == (2, 1, 0)
    assert fil["t_H"] == 1


def test_hodge_gamma_edge_cases():
    with pytest.raises(Undecided):
        hodge_pink_lattice(R, (), R.zero(6))
    with pytest.raises(Inconsistent):
        hodge_pink_lattice(R, (), R.z(10).zshift(-2))


def test_weak_admissibility_carlitz_matrix():
    M = la.mat([[R.z(20)]])
    out = weak_admissibility(R, M, (), R.z(20).cmul(2))
    assert out["weakly_admissible"]
    assert out["t_N"] == 1 and out["t_H"] == 1
    assert out["slopes"] == (F(1),)
    assert out["hodge_divisors"] == (-1,)
    assert out["fil_dims"] == (1, 1, 0)
    assert out["pole_order"] == 1
    bad = weak_admissibility(R, la.mat([[R.one(20)]]), (), R.z(20))
    assert not bad["weakly_admissible"]  # t_N = 0 but t_H = 1


def test_weak_admissibility_from_pipeline():
    rng = random.Random(64)
    N = 20
    hits = 0
    for _ in range(6):
        coeffs = [R.z(N + 6), R.poly([rng.randrange(3) for _ in range(5)], N + 6)]
        coeffs.append(R.poly([rng.randrange(1, 3), rng.randrange(3)], N + 6))
        mod = DrinfeldModule(R, coeffs)
        nu, inv = compute_invariants(mod, N)
        if inv.m != 2:
            continue
        hits += 1
        Fm = f_star_matrix(mod, inv)
        out = weak_admissibility(R, Fm, inv.lambdas, inv.gamma)
        assert out["weakly_admissible"]
        assert out["t_N"] == out["t_H"] == inv.gamma.ord()
        assert sum(out["slopes"]) == out["t_N"]
        assert min(out["slopes"]) >= 0
    assert hits >= 4
