"""Truncated z-adic series over l with certified precision.

A Series is the data (lead, coeffs, prec): the represented value is
sum(coeffs[i] * z**(lead+i)) and the object stands for *any* series agreeing
with it below z**prec.  Exponents below lead are exactly zero.  Canonical
form: coeffs[0] != 0, or coeffs == () and lead == prec ("zero at precision
prec" -- the only zero there is).  Precision never silently improves; each
operation propagates the worst honest bound:

    add:  prec = min(px, py)
    mul:  prec = min(lx + py, ly + px)       (l = lead, p = prec)
    inv:  prec = px - 2*lx                   (needs certified nonzero)
    qpow: prec = min(q**e * px, cap)         (exact freshman's dream; gains)
    phi:  prec = px                          (coefficientwise a -> a**q)
    delta:  prec = px - 1                    (divides the z-derivation by z)

The Frobenius lift phi fixes z and raises l-coefficients to the q-th power;
delta(x) = (phi(x) - x**q) / z is the associated z-derivation.  Laurent
values (lead < 0) are allowed; delta and div_zpow insist on integral input.
"""

from .errors import NotDivisible, PrecisionExhausted, ValidationError


class SeriesRing:
    """Context for series arithmetic: the field l and the Frobenius size q = p**h."""

    def __init__(self, field, h=1):
        if field.n % h:
            raise ValidationError("h must divide the degree of l over F_p")
        self.field = field
        self.h = h
        self.q = field.p ** h
        self.s = field.n // h  # order of x -> x**q on l

    def make(self, lead, coeffs, prec):
        return Series(self, lead, coeffs, prec)

    def zero(self, prec):
        return Series(self, prec, (), prec)

    def const(self, a, prec):
        return Series(self, 0, (a,), prec)

    def one(self, prec):
        return self.const(1, prec)

    def z(self, prec):
        return Series(self, 1, (1,), prec)

    pi = z  # the uniformizer pi is represented exactly as z

    def zpow(self, k, prec):
        if k >= prec:
            return self.zero(prec)
        return Series(self, k, (1,), prec)

    def poly(self, coeffs, prec, lead=0):
        """Series with the given coefficient window starting at z**lead."""
        return Series(self, lead, coeffs, prec)

    def pi_prime(self, prec):
        """delta(z) = 1 - z**(q-1), the derivation of the uniformizer."""
        cs = [0] * self.q
        cs[0] = 1
        cs[self.q - 1] = self.field.neg(1)
        return Series(self, 0, cs, prec)

    def __eq__(self, other):
        return (
            isinstance(other, SeriesRing)
            and other.field == self.field
            and other.h == self.h
        )

    def __hash__(self):
        return hash((self.field, self.h))

    def __repr__(self):
        return f"SeriesRing(F_{self.field.size}[[z]], q={self.q})"


class Series:
    __slots__ = ("ring", "lead", "coeffs", "prec")

    def __init__(self, ring, lead, coeffs, prec):
        coeffs = list(coeffs)
        if lead > prec:
            raise ValidationError("lead exceeds precision")
        coeffs = coeffs[: prec - lead] + [0] * (prec - lead - len(coeffs))
        k = 0
        while k < len(coeffs) and coeffs[k] == 0:
            k += 1
        if k == len(coeffs):
            lead, coeffs = prec, []
        elif k:
            lead, coeffs = lead + k, coeffs[k:]
        self.ring = ring
        self.lead = lead
        self.coeffs = tuple(coeffs)
        self.prec = prec

    # -- queries --------------------------------------------------------------

    def is_zero(self):
        """True when every certified coefficient vanishes (zero below z**prec)."""
        return not self.coeffs

    def ord(self):
        if not self.coeffs:
            raise PrecisionExhausted(
                f"order of a series that is zero at precision {self.prec}"
            )
        return self.lead

    def ord_lb(self):
        """Certified lower bound on the order (== ord for nonzero values)."""
        return self.lead

    def coeff(self, i):
        if i >= self.prec:
            raise PrecisionExhausted(f"coefficient of z**{i} beyond precision")
        if i < self.lead:
            return 0
        return self.coeffs[i - self.lead]

    def is_unit(self):
        return bool(self.coeffs) and self.lead == 0

    # -- structure ------------------------------------------------------------

    def truncate(self, prec):
        if prec >= self.prec:
            return self
        return Series(self.ring, min(self.lead, prec), self.coeffs, prec)

    def zshift(self, m):
        """Multiply by z**m (m any integer; exact)."""
        return Series(self.ring, self.lead + m, self.coeffs, self.prec + m)

    def div_zpow(self, k):
        """Exact division by z**k; only when divisibility is certified."""
        if k == 0:
            return self
        if not self.coeffs:
            if self.prec <= k:
                raise PrecisionExhausted(
                    f"cannot certify divisibility by z**{k} at precision {self.prec}"
                )
            return Series(self.ring, self.prec - k, (), self.prec - k)
        if self.lead < k:
            raise NotDivisible(f"order {self.lead} < {k}")
        return self.zshift(-k)

    def map_coeffs(self, fn):
        return Series(self.ring, self.lead, [fn(c) for c in self.coeffs], self.prec)

    # -- ring operations ------------------------------------------------------

    def __add__(self, other):
        f = self.ring.field
        prec = min(self.prec, other.prec)
        lead = min(self.lead, other.lead, prec)
        out = [0] * (prec - lead)
        for i, c in enumerate(self.coeffs):
            e = self.lead + i
            if e >= prec:
                break
            out[e - lead] = c
        for i, c in enumerate(other.coeffs):
            e = other.lead + i
            if e >= prec:
                break
            out[e - lead] = f.add(out[e - lead], c)
        return Series(self.ring, lead, out, prec)

    def __neg__(self):
        return self.map_coeffs(self.ring.field.neg)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        f = self.ring.field
        lead = self.lead + other.lead
        prec = min(self.lead + other.prec, other.lead + self.prec)
        out = [0] * max(prec - lead, 0)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            top = min(len(other.coeffs), len(out) - i)
            for j in range(top):
                b = other.coeffs[j]
                if b:
                    out[i + j] = f.add(out[i + j], f.mul(a, b))
        return Series(self.ring, lead, out, prec)

    def cmul(self, a):
        """Scale by a field element (exact)."""
        if a == 0:
            return Series(self.ring, self.prec, (), self.prec)
        f = self.ring.field
        return self.map_coeffs(lambda c: f.mul(a, c))

    def inv(self):
        if not self.coeffs:
            raise PrecisionExhausted(
                f"inverse of a series that is zero at precision {self.prec}"
            )
        f = self.ring.field
        u = self.coeffs
        rel = len(u)
        v0 = f.inv(u[0])
        v = [v0] + [0] * (rel - 1)
        for k in range(1, rel):
            acc = 0
            for i in range(1, min(k, len(u) - 1) + 1):
                if u[i] and v[k - i]:
                    acc = f.add(acc, f.mul(u[i], v[k - i]))
            v[k] = f.neg(f.mul(v0, acc))
        return Series(self.ring, -self.lead, v, self.prec - 2 * self.lead)

    def __truediv__(self, other):
        return self * other.inv()

    def pow_int(self, k):
        if k < 0:
            return self.inv().pow_int(-k)
        acc = self.ring.one(self.prec + max(self.lead, 0) * k)
        base = self
        while k:
            if k & 1:
                acc = acc * base
            if k > 1:
                base = base * base
            k >>= 1
        return acc

    # -- Frobenius structure ----------------------------------------------------

    def qpow(self, e, cap):
        """self ** (q**e), truncated at precision cap.

        Exact in characteristic p: exponents scale by q**e and coefficients
        take q**e-th powers, so precision *improves* to q**e * prec (clamped
        to cap to keep windows bounded).
        """
        if e < 0:
            raise ValidationError("qpow needs e >= 0")
        Q = self.ring.q ** e
        prec = min(self.prec * Q, cap)
        lead = self.lead * Q
        if not self.coeffs or lead >= prec:
            return Series(self.ring, prec, (), prec)
        f = self.ring.field
        he = self.ring.h * e
        out = [0] * (prec - lead)
        for i, c in enumerate(self.coeffs):
            pos = i * Q
            if pos >= len(out):
                break
            if c:
                out[pos] = f.frob(c, he)
        return Series(self.ring, lead, out, prec)

    def phi_pow(self, e):
        """Apply the Frobenius lift phi e times: z is fixed, coefficients
        go to their q**e-th powers.  Order-preserving, precision-preserving."""
        f = self.ring.field
        he = self.ring.h * e
        return self.map_coeffs(lambda c: f.frob(c, he))

    def phi(self):
        return self.phi_pow(1)

    def delta(self):
        """(phi(self) - self**q) / z.  Needs an integral operand."""
        if self.lead < 0:
            raise ValidationError("delta needs a series without poles")
        if self.prec < 1:
            raise PrecisionExhausted("delta needs precision >= 1")
        diff = self.phi() - self.qpow(1, self.prec)
        return diff.div_zpow(1)

    # -- comparisons ------------------------------------------------------------

    def residual_floor(self, other=None):
        """None if self (or self - other) is certified nonzero, else the
        precision below which it is certified zero."""
        d = self if other is None else self - other
        return None if d.coeffs else d.prec

    def eq_at_prec(self, other):
        return self.residual_floor(other) is not None

    def __eq__(self, other):
        return (
            isinstance(other, Series)
            and other.ring == self.ring
            and other.lead == self.lead
            and other.coeffs == self.coeffs
            and other.prec == self.prec
        )

    def __hash__(self):
        return hash((self.lead, self.coeffs, self.prec))

    def __repr__(self):
        if not self.coeffs:
            return f"O(z^{self.prec})"
        bits = []
        for i, c in enumerate(self.coeffs[:8]):
            if c:
                bits.append(f"{c}*z^{self.lead + i}")
        tail = " + ..." if len(self.coeffs) > 8 else ""
        return " + ".join(bits) + tail + f" + O(z^{self.prec})"
