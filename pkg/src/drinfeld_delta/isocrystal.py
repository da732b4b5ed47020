"""Slope and Hodge--Pink data of the semilinear operator on H(E).

The operator is a matrix M over K = l((z)), semilinear for the coefficient
Frobenius sigma (z stays fixed).  With s the order of sigma on l, the pushed
product M_s = M M^sigma ... M^(sigma^(s-1)) is an honest linear matrix, and
the Newton polygon of its characteristic polynomial, scaled by 1/s, gives the
slope multiset.  Integral basis changes C transform M_s into C^-1 M_s C
(sigma^s = 1), so the slopes are invariants.

The Hodge--Pink side works in a second variable u with coefficients in K:
every object carries both a u-window and, inside each coefficient, the usual
z-window.  UPoly mirrors the Series conventions one level up; exponents
below `lead` are exact zeros, `uprec` is the honest bound.
"""

from fractions import Fraction
from itertools import combinations

from .errors import (
    Inconsistent,
    PrecisionExhausted,
    Undecided,
    ValidationError,
)
from . import linalg as la


def sigma_product(M, s):
    """M M^sigma ... M^(sigma^(s-1)) entrywise over Series."""
    out = M
    for i in range(1, s):
        out = la.mat_mul(out, la.mat_phi_pow(M, i))
    return out


def charpoly(ring, A):
    """Coefficients (c_0, ..., c_m) of det(X*I - A), c_m = 1.

    c_{m-k} = (-1)^k * (sum of principal k x k minors).
    """
    m = len(A)
    prec = min(e.prec for row in A for e in row)
    cs = [None] * (m + 1)
    cs[m] = ring.one(prec)
    for k in range(1, m + 1):
        acc = None
        for S in combinations(range(m), k):
            sub = tuple(tuple(A[i][j] for j in S) for i in S)
            d = la.mat_det(sub)
            acc = d if acc is None else acc + d
        cs[m - k] = acc if k % 2 == 0 else -acc
    return tuple(cs)


def _lower_hull(pts):
    """Lower convex hull of points with strictly increasing x."""
    hull = []
    for x3, y3 in pts:
        while len(hull) >= 2:
            x1, y1 = hull[-2]
            x2, y2 = hull[-1]
            if (y2 - y1) * (x3 - x2) >= (y3 - y2) * (x2 - x1):
                hull.pop()
            else:
                break
        hull.append((x3, y3))
    return hull


def _hull_level(hull, x):
    for (x1, y1), (x2, y2) in zip(hull, hull[1:]):
        if x1 <= x <= x2:
            return Fraction(y1) + Fraction(y2 - y1, x2 - x1) * (x - x1)
    raise ValidationError("abscissa outside the polygon range")


def newton_slopes(cs, s):
    """Valuations of the eigenvalues, each divided by s, sorted ascending.

    cs are the characteristic-polynomial coefficients (Series).  Points whose
    coefficient is only zero-at-precision must lie on or above the certified
    hull; one strictly below would change the polygon, so it is fatal.
    """
    m = len(cs) - 1
    if not cs[0].coeffs:
        raise Undecided(
            f"constant coefficient zero at precision {cs[0].prec}; "
            "the polygon has no certified left endpoint"
        )
    pts, unknown = [], []
    for i, c in enumerate(cs):
        if c.coeffs:
            pts.append((i, c.ord()))
        else:
            unknown.append((i, c.prec))
    hull = _lower_hull(pts)
    for i, bound in unknown:
        if bound < _hull_level(hull, i):
            raise PrecisionExhausted(
                f"coefficient {i} only known below z^{bound}, under the hull"
            )
    slopes = []
    for (x1, y1), (x2, y2) in zip(hull, hull[1:]):
        val = -Fraction(y2 - y1, x2 - x1)
        slopes.extend([Fraction(val, s)] * (x2 - x1))
    return tuple(sorted(slopes))


def newton_data(ring, M):
    """Slope multiset and total degree t_N = ord(det M) of the operator."""
    det = la.mat_det(M)
    if not det.coeffs:
        raise Undecided(
            f"det of the operator is zero at precision {det.prec}"
        )
    t_n = det.ord()
    Ms = sigma_product(M, ring.s)
    slopes = newton_slopes(charpoly(ring, Ms), ring.s)
    if sum(slopes) != t_n:
        raise Inconsistent(
            f"slope sum {sum(slopes)} differs from ord det = {t_n}"
        )
    return {"t_N": t_n, "slopes": slopes}


# -- arithmetic in u over K ---------------------------------------------------


class UPoly:
    """Window [lead, uprec) of a u-Laurent series with Series coefficients.

    Exponents below lead are exact zeros; at or beyond uprec nothing is
    claimed.  A coefficient that is zero-at-its-z-precision stays in the
    window (it is not an exact zero and cannot certify a u-order).
    """

    __slots__ = ("ring", "lead", "coeffs", "uprec")

    def __init__(self, ring, lead, coeffs, uprec):
        coeffs = list(coeffs)
        if lead > uprec:
            raise ValidationError("lead exceeds the u-precision")
        want = uprec - lead
        zero = ring.zero(_zprec(coeffs) if coeffs else 1)
        coeffs = coeffs[:want] + [zero] * (want - len(coeffs))
        if not coeffs:
            lead = uprec
        self.ring = ring
        self.lead = lead
        self.coeffs = tuple(coeffs)
        self.uprec = uprec

    @classmethod
    def const(cls, ring, a, uprec):
        return cls(ring, 0, (a,), uprec)

    @classmethod
    def monomial(cls, ring, a, k, uprec):
        return cls(ring, k, (a,), uprec)

    def coeff(self, k):
        if k >= self.uprec:
            raise PrecisionExhausted(f"coefficient of u^{k} beyond the window")
        if k < self.lead:
            return None  # exact zero
        return self.coeffs[k - self.lead]

    def ord_u(self):
        """Certified u-order, or None when no coefficient is certified nonzero."""
        for k, c in enumerate(self.coeffs):
            if c.coeffs:
                return self.lead + k
        return None

    def zero_certified(self):
        """True if every represented coefficient vanishes at its z-precision."""
        return all(not c.coeffs for c in self.coeffs)

    def shift(self, k):
        return UPoly(self.ring, self.lead + k, self.coeffs, self.uprec + k)

    def truncate_u(self, uprec):
        if uprec >= self.uprec:
            return self
        return UPoly(self.ring, self.lead, self.coeffs[: uprec - self.lead], uprec)

    def __add__(self, other):
        lead = min(self.lead, other.lead)
        uprec = min(self.uprec, other.uprec)
        out = []
        for k in range(lead, uprec):
            a, b = self.coeff(k), other.coeff(k)
            # k >= min(leads), so at most one side is an exact zero (None)
            if a is None:
                out.append(b)
            elif b is None:
                out.append(a)
            else:
                out.append(a + b)
        return UPoly(self.ring, lead, out, uprec)

    def __neg__(self):
        return UPoly(self.ring, self.lead, [-c for c in self.coeffs], self.uprec)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        lead = self.lead + other.lead
        uprec = min(self.lead + other.uprec, other.lead + self.uprec)
        out = [None] * (uprec - lead)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                k = i + j
                if k >= len(out):
                    break
                p = a * b
                out[k] = p if out[k] is None else out[k] + p
        zp = _zprec(self.coeffs + other.coeffs) if out else 1
        return UPoly(
            self.ring, lead,
            [c if c is not None else self.ring.zero(zp) for c in out], uprec,
        )

    def smul(self, s):
        return UPoly(self.ring, self.lead, [s * c for c in self.coeffs], self.uprec)

    def inv(self):
        """Inverse of u^lead * (unit); costs 2*lead of u-precision."""
        if not self.coeffs or not self.coeffs[0].coeffs:
            raise PrecisionExhausted(
                "leading u-coefficient not certified nonzero; cannot invert"
            )
        n = self.uprec - self.lead
        a0i = self.coeffs[0].inv()
        out = [a0i]
        for k in range(1, n):
            acc = None
            for i in range(1, k + 1):
                t = self.coeffs[i] * out[k - i] if i < len(self.coeffs) else None
                if t is not None:
                    acc = t if acc is None else acc + t
            out.append(-(a0i * acc) if acc is not None else a0i.ring.zero(a0i.prec))
        return UPoly(self.ring, -self.lead, out, self.uprec - 2 * self.lead)

    def __repr__(self):
        degs = [self.lead + k for k, c in enumerate(self.coeffs) if c.coeffs]
        return f"UPoly(degs={degs}, window=[{self.lead},{self.uprec}))"


def _zprec(cs):
    return min(c.prec for c in cs)


def u_det(Q):
    n = len(Q)
    if n == 1:
        return Q[0][0]
    acc = None
    for j in range(n):
        minor = tuple(tuple(row[c] for c in range(n) if c != j) for row in Q[1:])
        term = Q[0][j] * u_det(minor)
        if j % 2:
            term = -term
        acc = term if acc is None else acc + term
    return acc


def smith_u_orders(Q):
    """Elementary-divisor u-orders of a square UPoly matrix, ascending.

    Gauss pivoting on an entry of least certified u-order; every other entry
    then divides cleanly.  If a block remains with no certified order at all,
    its divisors cannot be pinned down at this precision.
    """
    work = [list(row) for row in Q]
    n = len(work)
    orders = []
    for _ in range(n):
        piv, piv_ord = None, None
        for i, row in enumerate(work):
            for j, e in enumerate(row):
                o = e.ord_u()
                if o is not None and (piv_ord is None or o < piv_ord):
                    piv, piv_ord = (i, j), o
        if piv is None:
            if all(e.zero_certified() for row in work for e in row):
                raise PrecisionExhausted(
                    "remaining block vanishes at both working precisions; "
                    "its elementary divisors are undetermined"
                )
            raise PrecisionExhausted(
                "no entry with a certified u-order to pivot on"
            )
        pi, pj = piv
        work[0], work[pi] = work[pi], work[0]
        for row in work:
            row[0], row[pj] = row[pj], row[0]
        p00 = work[0][0]
        if p00.lead < piv_ord:
            # coefficients below the certified order vanish at their
            # z-precision; drop them (the same convention the pivot search
            # applies to entries with no certified order at all)
            p00 = UPoly(p00.ring, piv_ord, p00.coeffs[piv_ord - p00.lead:], p00.uprec)
        pinv = p00.inv()
        for i in range(1, n - len(orders)):
            f = work[i][0] * pinv
            work[i] = [e - f * p for e, p in zip(work[i], work[0])]
        col_factors = [work[0][j] * pinv for j in range(1, n - len(orders))]
        new = []
        for row in work[1:]:
            new.append([e - row[0] * f for e, f in zip(row[1:], col_factors)])
        work = new
        orders.append(piv_ord)
    return tuple(sorted(orders))


# -- Hodge--Pink structure ----------------------------------------------------


def hodge_pink_lattice(ring, lambdas, gamma, uprec=None):
    """Lattice matrix Q with q_H = Q * (standard lattice).

    The distinguished line is spanned by v = (-lambda_1, ..., -lambda_(m-1), 1)
    and enters with a pole of order e = ord(gamma); the remaining columns keep
    the first m-1 standard generators (the last one is u^e times the pole
    column minus the lambda part, so nothing is lost).
    """
    if not gamma.coeffs:
        raise Undecided(
            f"gamma is zero at precision {gamma.prec}; pole order undecided"
        )
    e = gamma.ord()
    if e < 0:
        raise Inconsistent("gamma must be integral")
    m = len(lambdas) + 1
    if uprec is None:
        uprec = e + 4
    prec = min([gamma.prec] + [l.prec for l in lambdas])
    v = [-l for l in lambdas] + [ring.one(prec)]
    cols = [[UPoly.monomial(ring, c, -e, uprec) for c in v]]
    for j in range(m - 1):
        cols.append([
            UPoly.const(ring, ring.one(prec) if i == j else ring.zero(prec), uprec)
            for i in range(m)
        ])
    return {
        "e": e,
        "uprec": uprec,
        "Q": tuple(tuple(cols[j][i] for j in range(m)) for i in range(m)),
    }


def hodge_filtration(lattice):
    """Filtration jump dimensions and the degree t_H of the lattice.

    dim Fil^i = #{elementary divisors <= -i}; t_H = -sum of divisors, cross
    checked against -ord_u(det Q).
    """
    Q = lattice["Q"]
    ds = smith_u_orders(Q)
    t_h = -sum(ds)
    det_ord = u_det(Q).ord_u()
    if det_ord is None or -det_ord != t_h:
        raise Inconsistent(
            f"-ord_u det = {None if det_ord is None else -det_ord} "
            f"but divisors sum to {t_h}"
        )
    dims = []
    i = 0
    while True:
        dim = sum(1 for d in ds if d <= -i)
        dims.append(dim)
        if dim == 0:
            break
        i += 1
    return {"divisors": ds, "fil_dims": tuple(dims), "t_H": t_h}


def lattice_is_standard(Q):
    """True when Q generates exactly the standard lattice (all divisors 0)."""
    return all(d == 0 for d in smith_u_orders(Q))


def weak_admissibility(ring, M, lambdas, gamma, uprec=None):
    """Sufficient-condition verdict: t_H == t_N and all slopes >= 0.

    Subobjects are not enumerated; a True verdict asserts the degree match
    and effectivity of the slope multiset, which is what the acceptance
    battery certifies.
    """
    newton = newton_data(ring, M)
    lattice = hodge_pink_lattice(ring, lambdas, gamma, uprec)
    fil = hodge_filtration(lattice)
    verdict = fil["t_H"] == newton["t_N"] and min(newton["slopes"]) >= 0
    return {
        "weakly_admissible": verdict,
        "t_N": newton["t_N"],
        "t_H": fil["t_H"],
        "slopes": newton["slopes"],
        "hodge_divisors": fil["divisors"],
        "fil_dims": fil["fil_dims"],
        "pole_order": lattice["e"],
        "note": "sufficient-condition verdict (degree equality + slopes >= 0)",
    }
