"""Dense univariate polynomials over Q and exact real-algebraic arithmetic.

Polynomials are lists of Fractions, low degree first, normalized to have no
trailing zeros.  This module supplies the Sturm-sequence machinery used for
exact signature computations: root counting, root isolation, cyclotomic
polynomials, minimal polynomials of cos(2*pi*k/m), and a field of real
algebraic numbers Q[c]/(m(c)) with a designated root picked out by an
isolating interval.
"""

from __future__ import annotations

from fractions import Fraction


def trim(p):
    p = [Fraction(c) for c in p]
    while p and not p[-1]:
        p.pop()
    return p


def deg(p):
    return len(p) - 1


def padd(a, b):
    n = max(len(a), len(b))
    return trim([(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)])


def pneg(a):
    return [-c for c in a]


def pmul(a, b):
    if not a or not b:
        return []
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return trim(out)


def pscale(a, c):
    return trim([x * c for x in a])


def pdivmod(a, b):
    a = trim(a)
    b = trim(b)
    if not b:
        raise ZeroDivisionError
    q = [Fraction(0)] * max(0, len(a) - len(b) + 1)
    r = list(a)
    while r and len(r) >= len(b):
        f = r[-1] / b[-1]
        d = len(r) - len(b)
        q[d] = f
        for i, c in enumerate(b):
            r[d + i] -= f * c
        while r and not r[-1]:
            r.pop()
    return trim(q), trim(r)


def pgcd(a, b):
    a, b = trim(a), trim(b)
    while b:
        a, b = b, pdivmod(a, b)[1]
    if a:
        lead = a[-1]
        a = [c / lead for c in a]
    return a


def pderiv(p):
    return trim([p[i] * i for i in range(1, len(p))])


def peval(p, x):
    total = Fraction(0)
    for c in reversed(p):
        total = total * x + c
    return total


def squarefree_part(p):
    g = pgcd(p, pderiv(p))
    if deg(g) <= 0:
        return trim(p)
    q, r = pdivmod(p, g)
    assert not r
    return q


def sturm_chain(p):
    p = squarefree_part(p)
    chain = [p, pderiv(p)]
    while chain[-1]:
        r = pdivmod(chain[-2], chain[-1])[1]
        if not r:
            break
        chain.append(pneg(r))
    return chain


def _variations(values):
    signs = [1 if v > 0 else -1 for v in values if v]
    return sum(1 for i in range(len(signs) - 1) if signs[i] != signs[i + 1])


def count_roots(p, lo, hi, chain=None):
    """Number of distinct real roots of p in (lo, hi]."""
    chain = chain or sturm_chain(p)
    va = _variations([peval(q, lo) for q in chain])
    vb = _variations([peval(q, hi) for q in chain])
    return va - vb


def count_real_roots(p):
    """Number of distinct real roots of p."""
    b = root_bound(p)
    return count_roots(p, -b, b)


def root_bound(p):
    """Rational B with all real roots of p in (-B, B]  (Cauchy bound)."""
    p = trim(p)
    if deg(p) <= 0:
        return Fraction(1)
    lead = abs(p[-1])
    b = max(abs(c) / lead for c in p[:-1]) if len(p) > 1 else Fraction(0)
    return b + 1


def isolate_root(p, index, chain=None):
    """Isolating interval (lo, hi] for the index-th (ascending) real root."""
    chain = chain or sturm_chain(p)
    b = root_bound(p)
    total = count_roots(p, -b, b, chain)
    if not (0 <= index < total):
        raise IndexError("root index out of range")
    lo, hi = -b, b
    # bisect until exactly one root, which is the index-th
    below = 0  # number of roots <= lo
    while True:
        inside = count_roots(p, lo, hi, chain)
        if inside == 1 and below == index:
            return lo, hi
        mid = (lo + hi) / 2
        left = count_roots(p, lo, mid, chain)
        if below + left > index:
            hi = mid
        else:
            below += left
            lo = mid


def refine(p, lo, hi):
    """Halve an isolating interval of p (exactly one root in (lo, hi])."""
    mid = (lo + hi) / 2
    if count_roots(p, lo, mid) == 1:
        return lo, mid
    return mid, hi


def sign_at_root(g, p, lo, hi):
    """Exact sign of g at the unique root of p in (lo, hi].

    Requires gcd(g, p) to not vanish at that root unless g does, which we
    detect: returns 0 when the root is a common root.
    """
    g = trim(g)
    if not g:
        return 0
    common = pgcd(g, p)
    if deg(common) > 0 and count_roots(common, lo, hi) == 1:
        return 0
    # refine until g has no root inside, then sign at endpoint is conclusive
    while count_roots(g, lo, hi) != 0:
        lo, hi = refine(p, lo, hi)
    v = peval(g, hi)
    assert v != 0
    return 1 if v > 0 else -1


# ---------------------------------------------------------------------------
# Cyclotomic data


def cyclotomic(n):
    """Cyclotomic polynomial Phi_n as a dense integer-coefficient list."""
    # x^n - 1 divided by the product of Phi_d for proper divisors d
    p = [Fraction(-1)] + [Fraction(0)] * (n - 1) + [Fraction(1)]
    for d in range(1, n):
        if n % d == 0:
            q, r = pdivmod(p, cyclotomic(d))
            assert not r
            p = q
    return p


def minpoly_two_cos(m):
    """Minimal polynomial over Q of z + z^-1 for z a primitive m-th root.

    Computed by folding the (palindromic) cyclotomic polynomial.  For m = 1
    returns x - 2; for m = 2 returns x + 2.
    """
    if m == 1:
        return [Fraction(-2), Fraction(1)]
    if m == 2:
        return [Fraction(2), Fraction(1)]
    phi = cyclotomic(m)
    n = deg(phi) // 2
    # write phi(z)/z^n as a polynomial g(y) with y = z + 1/z
    # iteratively: maintain representation of y^k in z-power basis
    # easier: use the recursion  p_k(y) = z^k + z^-k  with
    # p_0 = 2, p_1 = y, p_{k+1} = y p_k - p_{k-1}
    pk = {0: [Fraction(2)], 1: [Fraction(0), Fraction(1)]}
    for k in range(2, n + 1):
        pk[k] = padd(pmul([Fraction(0), Fraction(1)], pk[k - 1]), pneg(pk[k - 2]))
    out = pscale(pk[0], phi[n] / 2)
    for k in range(1, n + 1):
        assert phi[n + k] == phi[n - k]
        out = padd(out, pscale(pk[k], phi[n + k]))
    return trim(out)


def minpoly_cos_angle(k, m):
    """Minimal polynomial of cos(2*pi*k/m) with an isolating interval.

    Returns (p, (lo, hi)) with p monic irreducible over Q and (lo, hi] an
    isolating interval for the designated root cos(2*pi*k/m).
    """
    from math import gcd

    g = gcd(k, m)
    k, m = k // g, m // g
    k %= m
    two_cos = minpoly_two_cos(m)
    # c = y/2: substitute y = 2x
    p = trim([two_cos[i] * (2**i) for i in range(len(two_cos))])
    lead = p[-1]
    p = [c / lead for c in p]
    # designated root: order the conjugate angles by cosine value
    import math

    angles = [j for j in range(m) if math.gcd(j, m) == 1] if m > 1 else [0]
    cosines = sorted(set(min(j, m - j) for j in angles), reverse=True)  # increasing cos
    target = min(k, m - k)
    index = cosines.index(target)
    lo, hi = isolate_root(p, index)
    return p, (lo, hi)


# ---------------------------------------------------------------------------
# Real algebraic field with a designated root


class RealAlgebraicField:
    """Q[c]/(m(c)) with c pinned to one real root of m by an interval.

    Elements are dense Fraction coefficient tuples of length deg(m).
    Supports field arithmetic and exact sign determination, which is all
    the signature computations need.
    """

    def __init__(self, minpoly, interval):
        self.minpoly = trim(minpoly)
        assert deg(self.minpoly) >= 1
        self.interval = (Fraction(interval[0]), Fraction(interval[1]))
        assert count_roots(self.minpoly, *self.interval) == 1
        self.d = deg(self.minpoly)
        self._chain = sturm_chain(self.minpoly)

    def of(self, poly_or_scalar):
        if isinstance(poly_or_scalar, (int, Fraction)):
            vec = [Fraction(poly_or_scalar)] + [Fraction(0)] * (self.d - 1)
            return tuple(vec)
        p = trim(list(poly_or_scalar))
        _, r = pdivmod(p, self.minpoly)
        return tuple(r + [Fraction(0)] * (self.d - len(r)))

    @property
    def zero(self):
        return self.of(0)

    @property
    def one(self):
        return self.of(1)

    @property
    def gen(self):
        return self.of([0, 1])

    def add(self, a, b):
        return tuple(x + y for x, y in zip(a, b))

    def neg(self, a):
        return tuple(-x for x in a)

    def sub(self, a, b):
        return tuple(x - y for x, y in zip(a, b))

    def mul(self, a, b):
        return self.of(pmul(list(a), list(b)))

    def inv(self, a):
        p = trim(list(a))
        if not p:
            raise ZeroDivisionError
        # extended Euclid in Q[x]
        r0, r1 = self.minpoly, p
        s0, s1 = [], [Fraction(1)]
        while True:
            q, r = pdivmod(r0, r1)
            if not r:
                break
            s = padd(s0, pneg(pmul(q, s1)))
            r0, r1, s0, s1 = r1, r, s1, s
        assert deg(r1) == 0, "element not invertible (minpoly not irreducible?)"
        return self.of(pscale(s1, 1 / r1[0]))

    def is_zero(self, a):
        return not any(a)

    def sign(self, a):
        if self.is_zero(a):
            return 0
        return sign_at_root(list(a), self.minpoly, *self.interval)
