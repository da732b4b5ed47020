"""Dense matrices/vectors of Series and certified Gaussian elimination.

Matrices are tuples of tuples of Series.  Everything here is exact at
truncation: a pivot is usable only when its order is certified (a nonzero
represented coefficient); when no pivot can be certified the elimination
raises PrecisionExhausted rather than guess.  "Dependent" always means
dependent at the working precision -- the only zero we can observe.
"""

import math

from .errors import PrecisionExhausted


def mat(rows):
    return tuple(tuple(r) for r in rows)


def mat_zero(ring, n, m, prec):
    z = ring.zero(prec)
    return tuple(tuple(z for _ in range(m)) for _ in range(n))


def mat_eye(ring, n, prec):
    one, zero = ring.one(prec), ring.zero(prec)
    return tuple(tuple(one if i == j else zero for j in range(n)) for i in range(n))


def mat_add(A, B):
    return tuple(tuple(a + b for a, b in zip(ra, rb)) for ra, rb in zip(A, B))


def mat_sub(A, B):
    return tuple(tuple(a - b for a, b in zip(ra, rb)) for ra, rb in zip(A, B))


def mat_neg(A):
    return tuple(tuple(-a for a in r) for r in A)


def mat_mul(A, B):
    n, k, m = len(A), len(B), len(B[0])
    out = []
    for i in range(n):
        row = []
        for j in range(m):
            acc = A[i][0] * B[0][j]
            for t in range(1, k):
                acc = acc + A[i][t] * B[t][j]
            row.append(acc)
        out.append(tuple(row))
    return tuple(out)


def mat_smul(s, A):
    return tuple(tuple(s * a for a in r) for r in A)


def mat_map(A, fn):
    return tuple(tuple(fn(a) for a in r) for r in A)


def mat_phi_pow(A, e):
    return mat_map(A, lambda a: a.phi_pow(e))


def mat_qpow(A, e, cap):
    return mat_map(A, lambda a: a.qpow(e, cap))


def mat_truncate(A, prec):
    return mat_map(A, lambda a: a.truncate(prec))


def mat_ord_lb(A):
    return min(a.ord_lb() for r in A for a in r)


def mat_zero_floor(A):
    """None if some entry is certified nonzero, else the minimum precision."""
    floor = None
    for r in A:
        for a in r:
            if a.coeffs:
                return None
            floor = a.prec if floor is None else min(floor, a.prec)
    return floor


def mat_det(A):
    """Cofactor-expansion determinant (matrices here are tiny, d <= 6)."""
    n = len(A)
    if n == 1:
        return A[0][0]
    total = None
    for j in range(n):
        term = A[0][j] * _minor_det(A, 0, j)
        if j % 2:
            term = -term
        total = term if total is None else total + term
    return total


def _minor_det(A, i, j):
    sub = tuple(
        tuple(a for jj, a in enumerate(r) if jj != j)
        for ii, r in enumerate(A)
        if ii != i
    )
    return mat_det(sub)


def mat_inv(A):
    """Inverse over the truncated Laurent field (certified pivots required)."""
    n = len(A)
    ring = A[0][0].ring
    prec0 = min(a.prec for r in A for a in r)
    work = [list(r) for r in A]
    inv = [list(r) for r in mat_eye(ring, n, prec0)]
    used = [False] * n
    for col in range(n):
        piv, piv_ord = None, None
        for row in range(n):
            if used[row] or not work[row][col].coeffs:
                continue
            o = work[row][col].ord()
            if piv_ord is None or o < piv_ord:
                piv, piv_ord = row, o
        if piv is None:
            raise PrecisionExhausted(
                f"no certified pivot in column {col} during matrix inversion"
            )
        used[piv] = True
        pinv = work[piv][col].inv()
        work[piv] = [a * pinv for a in work[piv]]
        inv[piv] = [a * pinv for a in inv[piv]]
        for row in range(n):
            if row != piv and work[row][col].coeffs:
                c = work[row][col]
                work[row] = [a - c * b for a, b in zip(work[row], work[piv])]
                inv[row] = [a - c * b for a, b in zip(inv[row], inv[piv])]
    # work is now a permutation matrix (up to zero-at-precision dust)
    out = [None] * n
    for row in range(n):
        col = next(j for j in range(n) if work[row][j].coeffs)
        out[col] = tuple(inv[row])
    return tuple(out)


def vec_add(u, v):
    return tuple(a + b for a, b in zip(u, v))


def vec_sub(u, v):
    return tuple(a - b for a, b in zip(u, v))


def vec_smul(s, u):
    return tuple(s * a for a in u)


def vec_zero_floor(u):
    floor = math.inf
    for a in u:
        if a.coeffs:
            return None
        floor = min(floor, a.prec)
    return floor


class _Reducer:
    """Incremental column reduction keeping track of original combinations."""

    def __init__(self, ring, ncols, prec):
        self.ring = ring
        self.zero = ring.zero(prec)
        self.one = ring.one(prec)
        self.ncols = ncols
        self.basis = []  # (reduced vector, pivot row, combination over originals)

    def _reduce(self, vec, comb):
        vec = list(vec)
        for bvec, piv, bcomb in self.basis:
            coef = vec[piv] * bvec[piv].inv()
            if coef.coeffs:
                vec = [a - coef * b for a, b in zip(vec, bvec)]
                if comb is not None:
                    comb = [a - coef * b for a, b in zip(comb, bcomb)]
        return vec, comb

    def add_column(self, k, vec):
        """Insert column k; returns True if it increased the rank."""
        comb = [self.one if j == k else self.zero for j in range(self.ncols)]
        vec, comb = self._reduce(vec, comb)
        piv, piv_ord = None, None
        taken = {p for _, p, _ in self.basis}
        for row, a in enumerate(vec):
            if row not in taken and a.coeffs:
                o = a.ord()
                if piv_ord is None or o < piv_ord:
                    piv, piv_ord = row, o
        if piv is None:
            return False
        self.basis.append((vec, piv, comb))
        return True

    def express(self, target):
        """(True, coeffs, floor) if target is in the span at precision,
        else (False, None, None)."""
        vec = list(target)
        acc = [self.zero] * len(self.basis)
        for i, (bvec, piv, _) in enumerate(self.basis):
            coef = vec[piv] * bvec[piv].inv()
            acc[i] = coef
            if coef.coeffs:
                vec = [a - coef * b for a, b in zip(vec, bvec)]
        floor = vec_zero_floor(tuple(vec))
        if floor is None:
            return (False, None, None)
        out = [self.zero] * self.ncols
        for coef, (_, _, bcomb) in zip(acc, self.basis):
            out = [a + coef * b for a, b in zip(out, bcomb)]
        return (True, out, floor)


def solve_in_span(cols, target):
    """Decide whether target lies in the span of the given columns.

    Columns must each contribute a certified pivot (they are independent in
    our call sites); otherwise PrecisionExhausted.  Returns (True, coeffs,
    floor) with target == sum(coeffs[i]*cols[i]) below z**floor, or
    (False, None, None) when the residual is certified nonzero.
    """
    if not cols:
        floor = vec_zero_floor(tuple(target))
        return (True, [], floor) if floor is not None else (False, None, None)
    ring = target[0].ring
    prec0 = min(a.prec for a in target)
    red = _Reducer(ring, len(cols), prec0)
    for k, c in enumerate(cols):
        if not red.add_column(k, c):
            raise PrecisionExhausted(
                f"span column {k} is dependent at this precision; cannot "
                "certify a unique solution"
            )
    return red.express(target)


def rank_profile(cols, nrows, ring, prec):
    """Ranks of the nested column families cols[:1], cols[:2], ...

    Dependence means the reduced column is zero at the working precision.
    """
    red = _Reducer(ring, len(cols), prec)
    ranks = []
    r = 0
    for k, c in enumerate(cols):
        if red.add_column(k, c):
            r += 1
        ranks.append(r)
    return ranks
