"""Arithmetic jets in Witt coordinates.

Ghost maps and triangular ghost solves, the vertical Frobenius on jet spaces,
the lateral Frobenius on the kernels N^n, the z-action on jets, the
normalizing isomorphism nu_1 on N^1, and the canonical characters Psi_k.

A map between jet spaces is a TwistedSeries acting on the stacked coordinate
column (x_0, ..., x_n), each x_i a block of d coordinates; N^n drops the x_0
block.  Everything is d-generic, although the downstream invariant extraction
only consumes d = 1.
"""

from .errors import Inconsistent, UnsupportedDimension, ValidationError
from . import linalg as la
from .twisted import TwistedSeries, stack


def _block_row(ring, nblocks, d, j, coef, prec):
    """d x (nblocks*d) matrix: coef * identity placed at block j."""
    zero = ring.zero(prec)
    rows = []
    for a in range(d):
        row = [zero] * (nblocks * d)
        row[j * d + a] = coef
        rows.append(tuple(row))
    return tuple(rows)


def ghost_map(ring, n, d, prec):
    """Ghost components w_0..w_n on W_n: w_i = sum_j z^j x_j^(q^(i-j))."""
    rows = []
    for i in range(n + 1):
        terms = {}
        for j in range(i + 1):
            terms[i - j] = _block_row(ring, n + 1, d, j, ring.zpow(j, prec), prec)
        rows.append(TwistedSeries(ring, d, (n + 1) * d, terms))
    return rows


def ghost_solve(ring, targets, cap):
    """Triangular solve of w_i(g) = targets[i].

    g_i = z^{-i} (targets[i] - sum_{j<i} z^j g_j^(q^(i-j))); every division
    must be exact (NotDivisible signals an inconsistent target), and costs i
    units of z-precision on that component.
    """
    comps = []
    for i, t in enumerate(targets):
        acc = t
        for j in range(i):
            acc = acc.sub(comps[j].frob_twist(i - j, cap).smul(ring.zpow(j, cap)))
        comps.append(acc.div_zpow(i))
    return comps


def jet_frobenius(ring, n, d, prec, lateral=False):
    """Vertical Frobenius J^n -> J^(n-1) (ghost shift w_i o phi = w_(i+1)),
    or with lateral=True the map f: N^n -> N^(n-1), which is the same Witt
    Frobenius under the identification N^n ~ W_(n-1) shifting y_j = x_(j+1).
    """
    if lateral:
        return jet_frobenius(ring, n - 1, d, prec)
    if n < 1:
        raise ValidationError("need n >= 1 for a Frobenius step")
    w = ghost_map(ring, n, d, prec)
    comps = ghost_solve(ring, w[1:], prec)
    return stack(ring, comps, prec)


def jet_action(mod, n, cap, restrict_to_N=False, slice_=False):
    """The z-action in Witt coordinates.

    Solves the ghost identities w_i o g = sum_j phi^i(P_j) w_i^(q^j) where
    P_j are the coefficient matrices of the module.  Returns phi_{J^n}(z) by
    default; restrict_to_N sets x_0 = 0 and drops the 0-th output, giving
    phi_{N^n}(z); slice_ keeps only the x_0 input of the components 1..n,
    the biderivation tuple measuring the failure of J^n E -> E to split.
    """
    if restrict_to_N and slice_:
        raise ValidationError("restrict_to_N and slice_ are mutually exclusive")
    ring, d = mod.ring, mod.d
    P = mod.coeff_mats()
    w = ghost_map(ring, n, d, cap)
    targets = []
    for i in range(n + 1):
        acc = None
        for j, Pj in enumerate(P):
            term = w[i].frob_twist(j, cap).lmul_mat(la.mat_phi_pow(Pj, i))
            acc = term if acc is None else acc.add(term)
        targets.append(acc)
    comps = ghost_solve(ring, targets, cap)
    if restrict_to_N:
        body = stack(ring, comps[1:], cap)
        return body.restrict_cols(range(d, (n + 1) * d))
    if slice_:
        body = stack(ring, comps[1:], cap)
        return body.restrict_cols(range(d))
    return stack(ring, comps, cap)


def phi_N1_direct(mod, cap):
    """Closed form of the z-action on N^1: sum_i z^(q^i - 1) phi(P_i) tau^i."""
    ring = mod.ring
    q = ring.q
    terms = {}
    for i, Pi in enumerate(mod.coeff_mats()):
        coef = ring.zpow(q**i - 1, cap)
        terms[i] = la.mat_smul(coef, la.mat_phi_pow(Pi, 1))
    return TwistedSeries(ring, mod.d, mod.d, terms)


def nu1(mod, tau_cut, cap):
    """The normalizing isomorphism nu_1 = sum B_i tau^i on N^1.

    Determined by B_0 = I and the functional equation nu_1 o phi_{N^1}(z) =
    z nu_1, which gives the recursion
        B_i = (z - z^(q^i))^{-1} sum_{j=1}^{i} B_{i-j} c_j^{(q^{i-j})},
    with c_j = z^(q^j - 1) phi(P_j).  Divisibility is exact and v(B_i) >= i;
    both are checked, so the result carries decay certificate 0.
    """
    ring, d = mod.ring, mod.d
    q = ring.q
    pi = ring.z(cap)
    cs = phi_N1_direct(mod, cap)
    B = [la.mat_eye(ring, d, cap)]
    for i in range(1, tau_cut):
        acc = None
        for j in range(1, min(i, len(mod.coeff_mats()) - 1) + 1):
            cj = cs.coeff(j)
            prod = la.mat_mul(B[i - j], la.mat_qpow(cj, i - j, cap))
            acc = prod if acc is None else la.mat_add(acc, prod)
        den = pi - ring.zpow(q**i, cap)
        Bi = la.mat_smul(den.inv(), acc)
        if la.mat_ord_lb(Bi) < i:
            raise Inconsistent(f"v(B_{i}) < {i} contradicts the valuation bound")
        B.append(Bi)
    return TwistedSeries(
        ring, d, d, {i: M for i, M in enumerate(B)}, tau_cut, 0
    )


def nu1_residual(mod, nu, cap):
    """Certified floor of nu_1 o phi_{N^1}(z) - z nu_1 (None if nonzero)."""
    lhs = nu.compose(phi_N1_direct(mod, cap), cap)
    rhs = nu.smul(mod.ring.z(cap))
    return lhs.sub(rhs).zero_floor()


def first_component_row(ring, k, n, d, prec):
    """First component of f^(k-1) on N^n: sum_{j<k} z^j x_(j+1)^(q^(k-1-j)).

    (The composite count is k-1; k = 1 is the plain x_1 projection.)
    """
    if not 1 <= k <= n:
        raise ValidationError("need 1 <= k <= n")
    terms = {}
    for j in range(k):
        terms[k - 1 - j] = _block_row(ring, n, d, j, ring.zpow(j, prec), prec)
    return TwistedSeries(ring, d, n * d, terms)


def canonical_character(k, n, nu, cap):
    """Psi_k on N^n: nu_1 composed with the first component of f^(k-1)."""
    ring = nu.ring
    row = first_component_row(ring, k, n, nu.din, cap)
    return nu.compose(row, cap)


def eta_slice(mod, n, cap):
    """Components 1..n of the z-action evaluated at (x, 0, ..., 0)."""
    return jet_action(mod, n, cap, slice_=True)
