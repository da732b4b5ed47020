"""Twisted series (sums B_i tau^i with tau x = x^q) and module presentations.

A TwistedSeries is a matrix of Series attached to each power of tau;
composition follows the twisted rule (B tau^i)(C tau^j) = B C^{(q^i)} tau^{i+j}.
Operators with infinitely many terms are truncated at `tau_cut` together with
a decay certificate: decay=c asserts that every true coefficient satisfies
v(B_i) >= max(i - c, 0), represented or not.  On integral inputs the dropped
tail then only touches z-adic orders >= tau_cut - decay, which is exactly the
guarantee zero_floor() reports.  decay=None means no such certificate exists
(the object is still usable, but residual floors through it cannot be
certified).  tau_cut=None means the series is an honest polynomial: absent
terms are exactly zero.
"""

import math

from .errors import (
    DecayCertificateMissing,
    NotAdmissible,
    NotInSStar,
    PrecisionExhausted,
    ValidationError,
)
from . import linalg as la

INF = math.inf


class TwistedSeries:
    __slots__ = ("ring", "dout", "din", "terms", "tau_cut", "decay")

    def __init__(self, ring, dout, din, terms, tau_cut=None, decay=0):
        self.ring = ring
        self.dout = dout
        self.din = din
        frozen = {}
        for i, M in terms.items():
            if i < 0:
                raise ValidationError("tau degrees must be >= 0")
            if tau_cut is not None and i >= tau_cut:
                raise ValidationError(f"term tau^{i} at or beyond tau_cut={tau_cut}")
            M = tuple(tuple(row) for row in M)
            if len(M) != dout or any(len(r) != din for r in M):
                raise ValidationError("coefficient matrix has wrong shape")
            frozen[i] = M
        self.terms = frozen
        self.tau_cut = tau_cut
        self.decay = decay
        if tau_cut is not None and decay is not None:
            for i, M in frozen.items():
                bound = max(i - decay, 0)
                for row in M:
                    for e in row:
                        if e.ord_lb() < bound:
                            raise ValidationError(
                                f"decay certificate {decay} violated at tau^{i}"
                            )

    # -- constructors -------------------------------------------------------

    @classmethod
    def scalar(cls, ring, coeffs, tau_cut=None, decay=0):
        """1x1 series from a dict {tau degree: Series}."""
        return cls(ring, 1, 1, {i: ((s,),) for i, s in coeffs.items()}, tau_cut, decay)

    @classmethod
    def identity(cls, ring, d, prec):
        return cls(ring, d, d, {0: la.mat_eye(ring, d, prec)})

    @classmethod
    def constant(cls, ring, M):
        M = tuple(tuple(r) for r in M)
        return cls(ring, len(M), len(M[0]), {0: M})

    # -- inspection ---------------------------------------------------------

    def coeff(self, i):
        """Matrix at tau^i, or None when absent (zero if i is below tau_cut)."""
        return self.terms.get(i)

    def scalar_coeff(self, i):
        M = self.terms.get(i)
        return None if M is None else M[0][0]

    def is_integral(self):
        return all(e.ord_lb() >= 0 for M in self.terms.values() for r in M for e in r)

    def _imin(self):
        """Smallest tau degree that can carry a nonzero coefficient."""
        degs = [i for i, M in self.terms.items() if any(e.coeffs for r in M for e in r)]
        if degs:
            return min(degs)
        return INF if self.tau_cut is None else self.tau_cut

    def _certificate(self):
        """A decay certificate valid for every coefficient, or None."""
        if self.tau_cut is not None:
            return self.decay
        c = 0
        for i, M in self.terms.items():
            lb = min(e.ord_lb() for r in M for e in r)
            if lb < 0:
                return None
            c = max(c, i - lb)
        return c

    def zero_floor(self):
        """Largest certified f with (this operator) == 0 below z**f on
        integral inputs; None when some coefficient is certified nonzero."""
        floor = INF
        for M in self.terms.values():
            for row in M:
                for e in row:
                    if e.coeffs:
                        return None
                    floor = min(floor, e.prec)
        if self.tau_cut is not None:
            if self.decay is None:
                raise DecayCertificateMissing(
                    "cannot certify a residual floor without a decay certificate"
                )
            floor = min(floor, self.tau_cut - self.decay)
        return floor

    def represented_zero_floor(self):
        """Like zero_floor but over the represented tau range only.

        Returns (floor, tail_certified): floor is None when some represented
        coefficient is certified nonzero; tail_certified tells whether the
        truncated tail was also bounded (making this equal to zero_floor).
        """
        floor = INF
        for M in self.terms.values():
            for row in M:
                for e in row:
                    if e.coeffs:
                        return None, False
                    floor = min(floor, e.prec)
        if self.tau_cut is None:
            return floor, True
        if self.decay is None:
            return floor, False
        return min(floor, self.tau_cut - self.decay), True

    def __repr__(self):
        degs = sorted(self.terms)
        cut = "" if self.tau_cut is None else f", cut={self.tau_cut}(c={self.decay})"
        return f"TwistedSeries({self.dout}x{self.din}, degs={degs}{cut})"

    # -- linear structure ---------------------------------------------------

    def add(self, other):
        if (self.dout, self.din) != (other.dout, other.din):
            raise ValidationError("shape mismatch in twisted addition")
        cuts = [c for c in (self.tau_cut, other.tau_cut) if c is not None]
        cut = min(cuts) if cuts else None
        if cut is None:
            decay = 0
        else:
            ca, cb = self._certificate(), other._certificate()
            decay = None if ca is None or cb is None else max(ca, cb)
        terms = {}
        for i in sorted(set(self.terms) | set(other.terms)):
            if cut is not None and i >= cut:
                continue
            A, B = self.terms.get(i), other.terms.get(i)
            terms[i] = A if B is None else (B if A is None else la.mat_add(A, B))
        return TwistedSeries(self.ring, self.dout, self.din, terms, cut, decay)

    def neg(self):
        return TwistedSeries(
            self.ring, self.dout, self.din,
            {i: la.mat_neg(M) for i, M in self.terms.items()},
            self.tau_cut, self.decay,
        )

    def sub(self, other):
        return self.add(other.neg())

    def smul(self, s):
        """Left multiplication by a scalar Series (no twisting)."""
        if self.tau_cut is not None and self.decay is not None and s.ord_lb() < 0:
            raise ValidationError("scalar must be integral to preserve the decay bound")
        return TwistedSeries(
            self.ring, self.dout, self.din,
            {i: la.mat_smul(s, M) for i, M in self.terms.items()},
            self.tau_cut, self.decay,
        )

    def lmul_mat(self, M):
        """Left multiplication by a constant (tau-degree 0, untwisted) matrix."""
        if self.tau_cut is not None and self.decay is not None:
            if any(e.ord_lb() < 0 for r in M for e in r):
                raise ValidationError("matrix must be integral to keep the certificate")
        return TwistedSeries(
            self.ring, len(M), self.din,
            {i: la.mat_mul(M, B) for i, B in self.terms.items()},
            self.tau_cut, self.decay,
        )

    # -- twisting and composition -------------------------------------------

    def frob_twist(self, e, cap):
        """The operator x -> (self(x))^(q^e): coefficients are raised by qpow
        and tau degrees shift up by e.  Decay certificates survive since
        q**e - 1 >= e."""
        cut = None if self.tau_cut is None else self.tau_cut + e
        return TwistedSeries(
            self.ring, self.dout, self.din,
            {i + e: la.mat_qpow(M, e, cap) for i, M in self.terms.items()},
            cut, self.decay,
        )

    def phi_coeffs(self, e=1):
        """Apply the coefficient Frobenius phi^e entrywise (valuations are
        preserved, so certificates carry over)."""
        return TwistedSeries(
            self.ring, self.dout, self.din,
            {i: la.mat_phi_pow(M, e) for i, M in self.terms.items()},
            self.tau_cut, self.decay,
        )

    def compose(self, other, cap):
        """self o other with the twisted product B_i C_j^{(q^i)} tau^{i+j}."""
        if self.din != other.dout:
            raise ValidationError("shape mismatch in twisted composition")
        cuts = []
        if self.tau_cut is not None:
            cuts.append(self.tau_cut + other._imin())
        if other.tau_cut is not None:
            cuts.append(other.tau_cut + self._imin())
        cut = min(cuts) if cuts else None
        if cut is not None and cut is not INF and cut <= 0:
            raise ValidationError("composition truncates away every term")
        if cut is INF:
            cut = None
        if cut is None:
            decay = 0
        else:
            ca, cb = self._certificate(), other._certificate()
            decay = None if ca is None or cb is None else ca + cb
        terms = {}
        for i in sorted(self.terms):
            B = self.terms[i]
            for j in sorted(other.terms):
                k = i + j
                if cut is not None and k >= cut:
                    continue
                prod = la.mat_mul(B, la.mat_qpow(other.terms[j], i, cap))
                terms[k] = prod if k not in terms else la.mat_add(terms[k], prod)
        return TwistedSeries(self.ring, self.dout, other.din, terms, cut, decay)

    def apply(self, vec, cap):
        """Evaluate on a column vector of Series."""
        if len(vec) != self.din:
            raise ValidationError("vector length mismatch")
        out = None
        for i in sorted(self.terms):
            tv = tuple(x.qpow(i, cap) for x in vec)
            term = tuple(
                _dot(row, tv) for row in self.terms[i]
            )
            out = term if out is None else la.vec_add(out, term)
        if out is None:
            raise ValidationError("cannot evaluate an empty operator")
        return out

    # -- selections ----------------------------------------------------------

    def restrict_cols(self, cols):
        return TwistedSeries(
            self.ring, self.dout, len(cols),
            {i: tuple(tuple(r[c] for c in cols) for r in M)
             for i, M in self.terms.items()},
            self.tau_cut, self.decay,
        )

    def restrict_rows(self, rows):
        return TwistedSeries(
            self.ring, len(rows), self.din,
            {i: tuple(M[r] for r in rows) for i, M in self.terms.items()},
            self.tau_cut, self.decay,
        )

    def tau_truncate(self, cut):
        if self.tau_cut is not None and self.tau_cut <= cut:
            return self
        decay = self._certificate()
        return TwistedSeries(
            self.ring, self.dout, self.din,
            {i: M for i, M in self.terms.items() if i < cut},
            cut, decay,
        )

    def div_zpow(self, k):
        """Exact division of every coefficient by z^k (honest polynomials only)."""
        if self.tau_cut is not None:
            raise ValidationError("z-division is only supported for exact polynomials")
        return TwistedSeries(
            self.ring, self.dout, self.din,
            {i: la.mat_map(M, lambda e: e.div_zpow(k))
             for i, M in self.terms.items()},
        )


def hstack(ring, blocks, prec):
    """Concatenate maps with a common target into one dout x (sum of dins)
    map; absent term matrices are padded with zeros at `prec`."""
    dout = blocks[0].dout
    if any(b.dout != dout for b in blocks):
        raise ValidationError("joined blocks must share their target")
    cuts = [b.tau_cut for b in blocks if b.tau_cut is not None]
    cut = min(cuts) if cuts else None
    if cut is None:
        decay = 0
    else:
        certs = [b._certificate() for b in blocks]
        decay = None if any(c is None for c in certs) else max(certs)
    zero = ring.zero(prec)
    keys = sorted({i for b in blocks for i in b.terms if cut is None or i < cut})
    terms = {}
    for i in keys:
        mats = []
        for b in blocks:
            M = b.terms.get(i)
            if M is None:
                M = tuple(tuple(zero for _ in range(b.din)) for _ in range(dout))
            mats.append(M)
        terms[i] = tuple(
            tuple(e for M in mats for e in M[r]) for r in range(dout)
        )
    return TwistedSeries(ring, dout, sum(b.din for b in blocks), terms, cut, decay)


def stack(ring, blocks, prec):
    """Stack maps with a common source into one (sum of douts) x din map.
    Term matrices absent from a block are padded with zeros at `prec`."""
    din = blocks[0].din
    if any(b.din != din for b in blocks):
        raise ValidationError("stacked blocks must share their source")
    cuts = [b.tau_cut for b in blocks if b.tau_cut is not None]
    cut = min(cuts) if cuts else None
    if cut is None:
        decay = 0
    else:
        certs = [b._certificate() for b in blocks]
        decay = None if any(c is None for c in certs) else max(certs)
    zero = ring.zero(prec)
    keys = sorted({i for b in blocks for i in b.terms if cut is None or i < cut})
    terms = {}
    for i in keys:
        rows = []
        for b in blocks:
            M = b.terms.get(i)
            if M is None:
                M = tuple(tuple(zero for _ in range(din)) for _ in range(b.dout))
            rows.extend(M)
        terms[i] = tuple(rows)
    return TwistedSeries(ring, sum(b.dout for b in blocks), din, terms, cut, decay)


def _dot(row, vec):
    acc = row[0] * vec[0]
    for a, b in zip(row[1:], vec[1:]):
        acc = acc + a * b
    return acc


def s_star_invert(B, n_terms, cap):
    """Left inverse of B = B_0 + B_1 tau + ... with B_0 invertible over R.

    Solves C o B = 1 term by term:
        C_n = -(sum_{i<n} C_i B_{n-i}^{(q^i)}) (B_0^{(q^n)})^{-1}.
    The result carries no tail certificate (decay=None).
    """
    if not B.is_integral():
        raise NotInSStar("coefficients must be integral")
    B0 = B.coeff(0)
    if B0 is None:
        raise NotInSStar("constant term is missing")
    det = la.mat_det(B0)
    if not det.coeffs:
        raise PrecisionExhausted("constant term not certified invertible")
    if det.ord() != 0:
        raise NotInSStar("constant term is not a unit")
    if B.tau_cut is not None:
        n_terms = min(n_terms, B.tau_cut)
    d = B.dout
    C = [la.mat_inv(B0)]
    for n in range(1, n_terms):
        acc = None
        for i in range(n):
            Bt = B.coeff(n - i)
            if Bt is None:
                continue
            prod = la.mat_mul(C[i], la.mat_qpow(Bt, i, cap))
            acc = prod if acc is None else la.mat_add(acc, prod)
        if acc is None:
            prec = min(e.prec for r in C[0] for e in r)
            C.append(la.mat_zero(B.ring, d, d, prec))
        else:
            C.append(la.mat_neg(la.mat_mul(acc, la.mat_inv(la.mat_qpow(B0, n, cap)))))
    return TwistedSeries(
        B.ring, d, d, {n: M for n, M in enumerate(C)}, n_terms, None
    )


# -- module presentations ----------------------------------------------------


def _is_exactly_z(a):
    return (
        bool(a.coeffs) and a.lead == 1 and a.coeffs[0] == 1
        and not any(a.coeffs[1:])
    )


class DrinfeldModule:
    """phi(z) = z + a_1 tau + ... + a_r tau^r with integral a_i and a_r a unit."""

    def __init__(self, ring, coeffs):
        coeffs = tuple(coeffs)
        if len(coeffs) < 2:
            raise NotAdmissible("rank must be at least 1")
        a0 = coeffs[0]
        if not _is_exactly_z(a0):
            raise NotAdmissible("the tau^0 coefficient must be z itself")
        for a in coeffs:
            if a.ord_lb() < 0:
                raise NotAdmissible("coefficients must be integral")
        ar = coeffs[-1]
        if not ar.coeffs:
            raise PrecisionExhausted("top coefficient not certified nonzero")
        if ar.ord() != 0:
            raise NotAdmissible("top coefficient must be a unit")
        self.ring = ring
        self.coeffs = coeffs
        self.r = len(coeffs) - 1
        self.d = 1
        self.prec = min(a.prec for a in coeffs)

    def phi_z(self):
        return TwistedSeries.scalar(
            self.ring, {i: a for i, a in enumerate(self.coeffs)}
        )

    def coeff_mats(self):
        return tuple(((a,),) for a in self.coeffs)


class AndersonModule:
    """z acts by A_0 + A_1 tau + ... + A_s tau^s with A_0 = z*I and A_s in GL_d."""

    def __init__(self, ring, mats):
        mats = tuple(tuple(tuple(r) for r in M) for M in mats)
        if len(mats) < 2:
            raise NotAdmissible("need at least the tau^0 and tau^1 coefficients")
        d = len(mats[0])
        for i, row in enumerate(mats[0]):
            for j, e in enumerate(row):
                if i == j:
                    if not _is_exactly_z(e):
                        raise NotAdmissible("tau^0 coefficient must be z*I")
                elif e.coeffs:
                    raise NotAdmissible("tau^0 coefficient must be z*I")
        for M in mats:
            if len(M) != d or any(len(r) != d for r in M):
                raise ValidationError("coefficient matrices must be square, same size")
            for r in M:
                for e in r:
                    if e.ord_lb() < 0:
                        raise NotAdmissible("coefficients must be integral")
        det = la.mat_det(mats[-1])
        if not det.coeffs:
            raise PrecisionExhausted("det of top coefficient not certified nonzero")
        if det.ord() != 0:
            raise NotAdmissible("top coefficient must be invertible over R")
        self.ring = ring
        self.mats = mats
        self.d = d
        self.s = len(mats) - 1
        self.rank = self.s * d
        self.prec = min(e.prec for M in mats for r in M for e in r)

    def phi_z(self):
        return TwistedSeries(
            self.ring, self.d, self.d, {i: M for i, M in enumerate(self.mats)}
        )

    def coeff_mats(self):
        return self.mats


def motive_reduce(mod, elem, cap):
    """Coordinates of a motive element on the basis {tau^i e_j : i < s}.

    `elem` is a 1 x d twisted polynomial (a row of tau-coefficients).  The
    variable t acts as m -> m o phi(z); top degrees L >= s are eliminated via

        w tau^L  =  t.(u tau^{L-s}) - sum_{i<s} u A_i^{(q^{L-s})} tau^{L-s+i},
        u = w (A_s^{(q^{L-s})})^{-1}.

    Returns {(i, k): row} meaning elem = sum t^k . (row tau^i).
    """
    if elem.tau_cut is not None:
        raise ValidationError("motive reduction needs an exact polynomial")
    mats = mod.coeff_mats()
    s, d = len(mats) - 1, mod.d
    pending = {}
    for i, M in elem.terms.items():
        pending[(i, 0)] = M[0]
    out = {}
    while pending:
        L = max(i for i, _ in pending)
        for key in sorted(k for k in pending if k[0] == L):
            row = pending.pop(key)
            L, tpow = key
            if L < s:
                out[key] = row if key not in out else la.vec_add(out[key], row)
                continue
            e = L - s
            Ainv = la.mat_inv(la.mat_qpow(mats[-1], e, cap))
            u = tuple(_dot(Ainv_col, row) for Ainv_col in zip(*Ainv))
            _accumulate(pending, (L - s, tpow + 1), u)
            for i in range(s):
                Ai = la.mat_qpow(mats[i], e, cap)
                term = tuple(_dot(col, u) for col in zip(*Ai))
                _accumulate(pending, (L - s + i, tpow), tuple(-x for x in term))
    return out


def _accumulate(table, key, row):
    table[key] = row if key not in table else la.vec_add(table[key], row)


def motive_reconstruct(mod, coords, cap):
    """Inverse of motive_reduce (for checking): sum of t^k . (row tau^i)."""
    phi = mod.phi_z()
    total = None
    for (i, tpow), row in sorted(coords.items()):
        m = TwistedSeries(mod.ring, 1, mod.d, {i: (row,)})
        for _ in range(tpow):
            m = m.compose(phi, cap)
        total = m if total is None else total.add(m)
    return total
