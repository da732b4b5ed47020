"""Arithmetic in the coefficient field l = F_{p^n}.

Elements are plain ints in range(p**n) encoding little-endian base-p digit
vectors: the int sum(c_i * p**i) stands for the residue of sum(c_i * x**i)
modulo the defining polynomial.  All arithmetic goes through discrete
exp/log tables built once per field, so products, inverses and Frobenius
powers are table lookups.  This caps the field size (default 2**20), which
is far beyond anything the invariant pipeline needs.
"""

from .errors import DivisionByZero, ValidationError

_TABLE_LIMIT = 1 << 20


def _digits(a, p, n):
    out = [0] * n
    for i in range(n):
        a, out[i] = divmod(a, p)[0], a % p
    return out


def _undigits(cs, p):
    a = 0
    for c in reversed(cs):
        a = a * p + c % p
    return a


def _poly_mulmod(u, v, modulus, p):
    # u, v, modulus: little-endian int lists, modulus monic of degree n
    n = len(modulus) - 1
    prod = [0] * (len(u) + len(v) - 1)
    for i, ui in enumerate(u):
        if ui:
            for j, vj in enumerate(v):
                if vj:
                    prod[i + j] = (prod[i + j] + ui * vj) % p
    for k in range(len(prod) - 1, n - 1, -1):
        c = prod[k]
        if c:
            prod[k] = 0
            for j in range(n):
                prod[k - n + j] = (prod[k - n + j] - c * modulus[j]) % p
    return prod[:n] + [0] * (n - len(prod))


def _poly_powmod(u, e, modulus, p):
    n = len(modulus) - 1
    acc = [1] + [0] * (n - 1)
    base = list(u[:n]) + [0] * (n - len(u))
    while e:
        if e & 1:
            acc = _poly_mulmod(acc, base, modulus, p)
        base = _poly_mulmod(base, base, modulus, p)
        e >>= 1
    return acc


def _poly_gcd(u, v, p):
    u, v = list(u), list(v)

    def deg(w):
        d = len(w) - 1
        while d >= 0 and w[d] == 0:
            d -= 1
        return d

    while deg(v) >= 0:
        du, dv = deg(u), deg(v)
        if du < dv:
            u, v = v, u
            continue
        inv = pow(v[dv], -1, p)
        c = (u[du] * inv) % p
        shift = du - dv
        for j in range(dv + 1):
            u[j + shift] = (u[j + shift] - c * v[j]) % p
        if deg(u) < deg(v):
            u, v = v, u
    return u[: deg(u) + 1] if deg(u) >= 0 else []


def _prime_factors(n):
    out, d = [], 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def is_irreducible(modulus, p):
    """Rabin test for a monic polynomial over F_p (little-endian coeffs)."""
    n = len(modulus) - 1
    if n < 1 or modulus[n] != 1:
        return False
    x = [0, 1] if n > 1 else [(-modulus[0]) % p]
    if n == 1:
        return True
    xq = _poly_powmod([0, 1], p ** n, modulus, p)
    if xq != [0, 1] + [0] * (n - 2):
        return False
    for ell in _prime_factors(n):
        xq_sub = _poly_powmod([0, 1], p ** (n // ell), modulus, p)
        diff = [(a - b) % p for a, b in zip(xq_sub, [0, 1] + [0] * (n - 2))]
        g = _poly_gcd(diff, list(modulus), p)
        if len(g) != 1:
            return False
    return True


def find_irreducible(p, n):
    """Lexicographically smallest monic irreducible of degree n over F_p."""
    for a in range(p ** n):
        cand = _digits(a, p, n) + [1]
        if is_irreducible(cand, p):
            return tuple(cand)
    raise ValidationError(f"no irreducible of degree {n} over F_{p}")  # unreachable


class Field:
    """F_{p^n} = F_p[x]/(modulus); see module docstring for the encoding."""

    def __init__(self, p, modulus):
        if p < 2 or any(p % d == 0 for d in range(2, min(p, 1000)) if d * d <= p):
            if p < 2 or not all(p % d for d in range(2, int(p ** 0.5) + 1)):
                raise ValidationError(f"p = {p} is not prime")
        modulus = tuple(c % p for c in modulus)
        n = len(modulus) - 1
        if n < 1 or modulus[n] != 1:
            raise ValidationError("modulus must be monic of degree >= 1")
        if not is_irreducible(list(modulus), p):
            raise ValidationError("modulus is reducible")
        self.p = p
        self.n = n
        self.size = p ** n
        self.modulus = modulus
        if self.size > _TABLE_LIMIT:
            raise ValidationError(f"field size {self.size} exceeds table limit")
        self._build_tables()

    def _build_tables(self):
        p, n, size = self.p, self.n, self.size
        mod = list(self.modulus)
        order = size - 1
        factors = _prime_factors(order) if order > 1 else []
        gen = None
        for a in range(1, size):
            u = _digits(a, p, n)
            if all(
                _undigits(_poly_powmod(u, order // ell, mod, p), p) != 1
                for ell in factors
            ):
                gen = u
                break
        assert gen is not None
        exp = [0] * order
        log = [0] * size  # log[0] unused
        acc = [1] + [0] * (n - 1)
        for k in range(order):
            v = _undigits(acc, p)
            exp[k] = v
            log[v] = k
            acc = _poly_mulmod(acc, gen, mod, p)
        self._exp = exp
        self._log = log
        # _frob_mul[e] = p**e mod (size-1): multiply a discrete log by this to
        # raise the element to the p**e-th power
        self._frob_mul = [pow(p, e, order) if order > 1 else 0 for e in range(n)]

    # -- element construction / destructuring ---------------------------------

    def from_coeffs(self, cs):
        if len(cs) > self.n:
            raise ValidationError("too many coefficients for this field")
        return _undigits(list(cs) + [0] * (self.n - len(cs)), self.p)

    def coeffs(self, a):
        return tuple(_digits(a, self.p, self.n))

    def from_int(self, k):
        """The prime-field element k*1 (NOT the encoded int k)."""
        return k % self.p

    def elements(self):
        return range(self.size)

    # -- arithmetic -----------------------------------------------------------

    def add(self, a, b):
        p = self.p
        out, mul = 0, 1
        while a or b:
            out += ((a + b) % p) * mul
            a, b, mul = a // p, b // p, mul * p
        return out

    def neg(self, a):
        p = self.p
        out, mul = 0, 1
        while a:
            out += (-a % p) * mul
            a, mul = a // p, mul * p
        return out

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def mul(self, a, b):
        if a == 0 or b == 0:
            return 0
        order = self.size - 1
        return self._exp[(self._log[a] + self._log[b]) % order]

    def inv(self, a):
        if a == 0:
            raise DivisionByZero("inverse of 0 in the coefficient field")
        order = self.size - 1
        return self._exp[(-self._log[a]) % order]

    def pow_(self, a, e):
        if a == 0:
            if e == 0:
                return 1
            if e < 0:
                raise DivisionByZero("0 to a negative power")
            return 0
        order = self.size - 1
        return self._exp[(self._log[a] * e) % order]

    def frob(self, a, e):
        """a ** (p ** e); e may be any integer (Frobenius has order n)."""
        if a == 0:
            return 0
        order = self.size - 1
        return self._exp[(self._log[a] * self._frob_mul[e % self.n]) % order]

    def __eq__(self, other):
        return (
            isinstance(other, Field)
            and other.p == self.p
            and other.modulus == self.modulus
        )

    def __hash__(self):
        return hash((self.p, self.modulus))

    def __repr__(self):
        return f"Field(p={self.p}, n={self.n})"
