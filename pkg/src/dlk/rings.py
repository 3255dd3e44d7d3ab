"""Exact coefficient rings with involution.

Supported rings: the integers, the rationals, prime fields F_p, and the
Laurent polynomial rings Z[z,z^-1] and Q[z,z^-1].  Each ring carries an
involution, either the identity or (on Laurent rings) z |-> z^-1 applied
together with the involution of the base ring.

All arithmetic is exact: integer coefficients are arbitrary precision and
rational coefficients are `fractions.Fraction`.  No floating point is used
anywhere in this package.

Laurent polynomials render as ``-1 + z^-1 + z`` (terms in ascending
exponent order, explicit ``z^k`` powers, ``z`` and ``z^-1`` abbreviating
exponent +/-1); `parse_laurent` accepts the same grammar.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction


class DenominatorNotInS(ValueError):
    """Denominator of a torsion value lies outside the multiplicative set."""


class UnsupportedRing(TypeError):
    """Operation is not available over the given coefficient ring."""


# ---------------------------------------------------------------------------
# Laurent polynomials


class LaurentPolynomial:
    """Laurent polynomial with exact coefficients, stored sparsely.

    ``coeffs`` maps integer exponents to nonzero coefficients (int or
    Fraction).  The zero polynomial is the empty map.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=None):
        c = {}
        if coeffs:
            for k, v in coeffs.items():
                if v:
                    c[int(k)] = v
        self.coeffs = c

    # -- constructors ------------------------------------------------------

    @staticmethod
    def constant(c):
        return LaurentPolynomial({0: c} if c else {})

    @staticmethod
    def z(exp=1, coeff=1):
        return LaurentPolynomial({exp: coeff} if coeff else {})

    @staticmethod
    def from_int_coeffs(coeffs, min_exp=0):
        return LaurentPolynomial({min_exp + i: c for i, c in enumerate(coeffs)})

    # -- structure ---------------------------------------------------------

    def is_zero(self):
        return not self.coeffs

    def min_exp(self):
        return min(self.coeffs) if self.coeffs else 0

    def max_exp(self):
        return max(self.coeffs) if self.coeffs else 0

    def span(self):
        """Degree of the associated ordinary polynomial (Euclidean size)."""
        return self.max_exp() - self.min_exp() if self.coeffs else -1

    def __getitem__(self, k):
        return self.coeffs.get(k, 0)

    def items(self):
        return sorted(self.coeffs.items())

    def __bool__(self):
        return bool(self.coeffs)

    def __hash__(self):
        return hash(tuple(sorted((k, Fraction(v)) for k, v in self.coeffs.items())))

    def __eq__(self, other):
        if not isinstance(other, LaurentPolynomial):
            if other == 0:
                return self.is_zero()
            other = LaurentPolynomial.constant(other)
        if set(self.coeffs) != set(other.coeffs):
            return False
        return all(self.coeffs[k] == other.coeffs[k] for k in self.coeffs)

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other):
        if not isinstance(other, LaurentPolynomial):
            other = LaurentPolynomial.constant(other)
        c = dict(self.coeffs)
        for k, v in other.coeffs.items():
            c[k] = c.get(k, 0) + v
        return LaurentPolynomial(c)

    def __neg__(self):
        return LaurentPolynomial({k: -v for k, v in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, LaurentPolynomial):
            other = LaurentPolynomial.constant(other)
        c = {}
        for k1, v1 in self.coeffs.items():
            for k2, v2 in other.coeffs.items():
                k = k1 + k2
                c[k] = c.get(k, 0) + v1 * v2
        return LaurentPolynomial(c)

    __rmul__ = __mul__

    def __pow__(self, n):
        out = LaurentPolynomial.constant(1)
        for _ in range(n):
            out = out * self
        return out

    def shift(self, k):
        """Multiply by z^k."""
        return LaurentPolynomial({e + k: v for e, v in self.coeffs.items()})

    def involute(self):
        """z |-> z^-1 (coefficient involution is the identity here)."""
        return LaurentPolynomial({-k: v for k, v in self.coeffs.items()})

    def evaluate(self, x):
        """Exact evaluation; x must be invertible if negative exponents occur."""
        total = 0
        for k, v in self.coeffs.items():
            if k >= 0:
                total += v * x**k
            else:
                total += v * Fraction(1, 1) * Fraction(x) ** k
        return total

    def eval_at_one(self):
        return sum(self.coeffs.values()) if self.coeffs else 0

    def to_fraction_coeffs(self):
        return LaurentPolynomial({k: Fraction(v) for k, v in self.coeffs.items()})

    def map_coeffs(self, fn):
        return LaurentPolynomial({k: fn(v) for k, v in self.coeffs.items()})

    def content(self):
        """Positive integer gcd of the (integer) coefficients; 0 for 0."""
        g = 0
        for v in self.coeffs.values():
            g = _gcd_int(g, v)
        return abs(g)

    def is_integral(self):
        return all(
            isinstance(v, int) or (isinstance(v, Fraction) and v.denominator == 1)
            for v in self.coeffs.values()
        )

    def to_int_coeffs(self):
        assert self.is_integral(), "nonintegral coefficients"
        return LaurentPolynomial({k: int(v) for k, v in self.coeffs.items()})

    # -- text --------------------------------------------------------------

    def __repr__(self):
        return render_laurent(self)


def _gcd_int(a, b):
    a, b = abs(int(a)), abs(int(b))
    while b:
        a, b = b, a % b
    return a


def render_laurent(p):
    """Render with ascending exponents: ``-1 + z^-1 + z``."""
    if p.is_zero():
        return "0"
    parts = []
    for k, v in p.items():
        if k == 0:
            body = str(v)
        else:
            zp = "z" if k == 1 else "z^%d" % k
            if v == 1:
                body = zp
            elif v == -1:
                body = "-" + zp
            else:
                body = "%s*%s" % (v, zp)
        parts.append(body)
    out = parts[0]
    for body in parts[1:]:
        if body.startswith("-"):
            out += " - " + body[1:]
        else:
            out += " + " + body
    return out


_TERM_RE = re.compile(
    r"""^\s*([+-]?\s*(?:\d+(?:/\d+)?)?)\s*(?:(\*)?\s*z(?:\^(-?\d+))?)?\s*"""
)


def parse_laurent(text):
    """Parse the grammar produced by `render_laurent`.

    Accepts e.g. ``0``, ``3``, ``-1 + z^-1 + z``, ``2*z^3 - z``, ``1/2*z``.
    """
    text = text.strip()
    if text in ("0", "+0", "-0"):
        return LaurentPolynomial({})
    coeffs = {}
    pos = 0
    first = True
    while pos < len(text):
        m = _TERM_RE.match(text[pos:])
        if not m or m.end() == 0:
            raise ValueError("cannot parse Laurent polynomial %r at %r" % (text, text[pos:]))
        sign_coeff, star, exp = m.group(1), m.group(2), m.group(3)
        raw = sign_coeff.replace(" ", "")
        neg = raw.startswith("-")
        raw = raw.lstrip("+-")
        has_z = "z" in m.group(0)
        if raw == "":
            if not has_z and not first:
                raise ValueError("dangling sign in %r" % text)
            c = Fraction(1)
        else:
            c = Fraction(raw)
        if neg:
            c = -c
        if has_z:
            k = int(exp) if exp is not None else 1
        else:
            k = 0
        coeffs[k] = coeffs.get(k, 0) + c
        pos += m.end()
        first = False
    out = {}
    for k, v in coeffs.items():
        if v:
            out[k] = int(v) if v.denominator == 1 else v
    return LaurentPolynomial(out)


# ---------------------------------------------------------------------------
# Ring objects


@dataclass(frozen=True)
class RingSpec:
    """Tag describing a supported exact ring with involution."""

    kind: str  # Integers | Rationals | PrimeField | IntLaurent | RatLaurent
    p: int | None = None
    involution: str = "Identity"  # Identity | InvertVariable

    def __post_init__(self):
        kinds = ("Integers", "Rationals", "PrimeField", "IntLaurent", "RatLaurent")
        if self.kind not in kinds:
            raise ValueError("unknown ring kind %r" % (self.kind,))
        if self.kind == "PrimeField":
            if self.p is None or self.p < 2 or not _is_prime(self.p):
                raise ValueError("PrimeField needs a prime p, got %r" % (self.p,))
        elif self.p is not None:
            raise ValueError("p only meaningful for PrimeField")
        if self.involution == "InvertVariable" and self.kind not in ("IntLaurent", "RatLaurent"):
            raise ValueError("InvertVariable only permitted on Laurent rings")

    def tag(self):
        if self.kind == "PrimeField":
            return "F%d" % self.p
        base = {
            "Integers": "Z",
            "Rationals": "Q",
            "IntLaurent": "Z[z,z^-1]",
            "RatLaurent": "Q[z,z^-1]",
        }[self.kind]
        if self.kind in ("IntLaurent", "RatLaurent") and self.involution == "Identity":
            return base + ":id"
        return base


def _is_prime(n):
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


class Ring:
    """Arithmetic over one of the supported exact rings.

    Elements are plain values: int (Z, F_p), Fraction (Q), or
    LaurentPolynomial (Laurent rings).  Ring objects are stateless and
    immutable; the module-level singletons below should normally be used.
    """

    def __init__(self, spec: RingSpec):
        self.spec = spec
        self.kind = spec.kind
        self.p = spec.p
        self.is_field = spec.kind in ("Rationals", "PrimeField")
        self.is_laurent = spec.kind in ("IntLaurent", "RatLaurent")
        # Rings over which smith_normal_form is available.
        self.is_euclidean = spec.kind in ("Integers", "Rationals", "PrimeField", "RatLaurent")

    # -- canonical values ----------------------------------------------------

    @property
    def zero(self):
        if self.kind == "Rationals":
            return Fraction(0)
        if self.is_laurent:
            return LaurentPolynomial({})
        return 0

    @property
    def one(self):
        return self.from_int(1)

    def from_int(self, n):
        n = int(n)
        if self.kind == "Integers":
            return n
        if self.kind == "Rationals":
            return Fraction(n)
        if self.kind == "PrimeField":
            return n % self.p
        return LaurentPolynomial.constant(n)

    def coerce(self, value):
        """Normalize an input value into this ring's element type."""
        if isinstance(value, LaurentPolynomial):
            if not self.is_laurent:
                if value.is_zero():
                    return self.zero
                if set(value.coeffs) == {0}:
                    return self.coerce(value.coeffs[0])
                raise TypeError("cannot coerce Laurent polynomial into %s" % self.tag())
            if self.kind == "IntLaurent":
                if not value.is_integral():
                    raise TypeError("nonintegral coefficient in Z[z,z^-1] element")
                return value.to_int_coeffs()
            return value.to_fraction_coeffs()
        if isinstance(value, str):
            return self.coerce(parse_laurent(value)) if self.is_laurent else self.coerce(Fraction(value))
        if self.kind == "Integers":
            f = Fraction(value)
            if f.denominator != 1:
                raise TypeError("nonintegral value %r in Z" % (value,))
            return int(f)
        if self.kind == "Rationals":
            return Fraction(value)
        if self.kind == "PrimeField":
            f = Fraction(value)
            if f.denominator % self.p == 0:
                raise ZeroDivisionError("denominator divisible by p")
            return (f.numerator * pow(f.denominator, -1, self.p)) % self.p
        # Laurent rings from scalars
        return self.coerce(LaurentPolynomial.constant(value))

    # -- arithmetic ----------------------------------------------------------

    def add(self, a, b):
        if self.kind == "PrimeField":
            return (a + b) % self.p
        return a + b

    def sub(self, a, b):
        if self.kind == "PrimeField":
            return (a - b) % self.p
        return a - b

    def neg(self, a):
        if self.kind == "PrimeField":
            return (-a) % self.p
        return -a

    def mul(self, a, b):
        if self.kind == "PrimeField":
            return (a * b) % self.p
        return a * b

    def is_zero(self, a):
        if isinstance(a, LaurentPolynomial):
            return a.is_zero()
        return a == 0

    def eq(self, a, b):
        return self.is_zero(self.sub(a, b))

    def conj(self, a):
        """Ring involution."""
        if self.spec.involution == "InvertVariable":
            return a.involute()
        return a

    def is_unit(self, a):
        if self.is_zero(a):
            return False
        if self.is_field:
            return True
        if self.kind == "Integers":
            return a in (1, -1)
        # Laurent rings: units are c*z^k with c a unit of the base ring
        if len(a.coeffs) != 1:
            return False
        c = next(iter(a.coeffs.values()))
        if self.kind == "IntLaurent":
            return c in (1, -1)
        return True

    def inv(self, a):
        if not self.is_unit(a):
            raise ZeroDivisionError("not a unit: %r" % (a,))
        if self.kind == "Rationals":
            return Fraction(1) / a
        if self.kind == "PrimeField":
            return pow(a, -1, self.p)
        if self.kind == "Integers":
            return a
        (k, c) = next(iter(a.coeffs.items()))
        if self.kind == "IntLaurent":
            return LaurentPolynomial({-k: c})
        return LaurentPolynomial({-k: Fraction(1) / Fraction(c)})

    # -- Euclidean structure (for SNF) ----------------------------------------

    def euclidean_size(self, a):
        """Size used for SNF pivoting; smaller is better, zero excluded."""
        if self.is_zero(a):
            return None
        if self.is_field:
            return 0
        if self.kind == "Integers":
            return abs(a)
        if self.kind == "RatLaurent":
            return a.span()
        raise UnsupportedRing("no Euclidean structure on %s" % self.tag())

    def divmod(self, a, b):
        """a = q*b + r with r zero or of smaller Euclidean size."""
        if self.is_zero(b):
            raise ZeroDivisionError
        if self.is_field:
            return self.mul(a, self.inv(b)), self.zero
        if self.kind == "Integers":
            q = a // b
            r = a - q * b
            # symmetric remainder keeps entries small; floor division leaves
            # r with the sign of b, so r - b always shrinks it
            if r and abs(r) * 2 > abs(b):
                q += 1
                r = a - q * b
            return q, r
        if self.kind == "RatLaurent":
            if a.is_zero():
                return self.zero, self.zero
            sa, sb = a.min_exp(), b.min_exp()
            pa = [Fraction(a[sa + i]) for i in range(a.span() + 1)]
            pb = [Fraction(b[sb + i]) for i in range(b.span() + 1)]
            q, r = _poly_divmod(pa, pb)
            qL = LaurentPolynomial({sa - sb + i: c for i, c in enumerate(q) if c})
            rL = LaurentPolynomial({sa + i: c for i, c in enumerate(r) if c})
            return qL, rL
        raise UnsupportedRing("no division on %s" % self.tag())

    def exact_div(self, a, b):
        """Exact quotient a/b, or raise; valid over any of the domains."""
        if self.is_zero(a):
            return self.zero
        if self.is_field:
            return self.mul(a, self.inv(b))
        if self.kind == "Integers":
            q, r = divmod(a, b)
            if r:
                raise ArithmeticError("inexact division")
            return q
        # Laurent: divide over Q[z] and check
        sa, sb = a.min_exp(), b.min_exp()
        pa = [Fraction(a[sa + i]) for i in range(a.span() + 1)]
        pb = [Fraction(b[sb + i]) for i in range(b.span() + 1)]
        q, r = _poly_divmod(pa, pb)
        if any(r):
            raise ArithmeticError("inexact division")
        qL = LaurentPolynomial({sa - sb + i: c for i, c in enumerate(q) if c})
        return self.coerce(qL)

    def divides(self, a, b):
        """True iff a | b in the ring."""
        if self.is_zero(b):
            return True
        if self.is_zero(a):
            return False
        try:
            self.exact_div(b, a)
            return True
        except (ArithmeticError, TypeError):
            return False

    # -- misc -----------------------------------------------------------------

    def unit_normalize(self, a):
        """(u, a') with a = u*a' and a' the canonical associate.

        Z: a' = |a|.  Fields: a' = 1.  Laurent: a' has min exponent 0 and
        positive leading base coefficient (positive value at 1 fallback for
        RatLaurent is not needed: lowest coefficient sign is used).
        """
        if self.is_zero(a):
            return self.one, a
        if self.is_field:
            return a, self.one
        if self.kind == "Integers":
            return (1, a) if a > 0 else (-1, -a)
        k = a.min_exp()
        lead = a.coeffs[a.max_exp()]
        sign = 1 if (lead > 0) else -1
        u = LaurentPolynomial({k: sign})
        ap = a.shift(-k)
        if sign < 0:
            ap = -ap
        return u, self.coerce(ap)

    def render(self, a):
        if isinstance(a, LaurentPolynomial):
            return render_laurent(a)
        return str(a)

    def parse(self, text):
        return self.coerce(text)

    def tag(self):
        return self.spec.tag()

    def __repr__(self):
        return "Ring(%s)" % self.tag()

    def __eq__(self, other):
        return isinstance(other, Ring) and other.spec == self.spec

    def __hash__(self):
        return hash(self.spec)

    def half_unit(self):
        """Central s with s + conj(s) = 1, when one exists."""
        if self.kind == "Rationals":
            return Fraction(1, 2)
        if self.kind == "PrimeField":
            if self.p == 2:
                return None
            return pow(2, -1, self.p)
        if self.kind == "RatLaurent":
            return LaurentPolynomial.constant(Fraction(1, 2))
        return None


def _poly_divmod(a, b):
    """Dense Fraction polynomial division, coefficient lists low-to-high."""
    a = list(a)
    while a and not a[-1]:
        a.pop()
    b = list(b)
    while b and not b[-1]:
        b.pop()
    if not b:
        raise ZeroDivisionError
    q = [Fraction(0)] * max(0, len(a) - len(b) + 1)
    r = a
    while r and len(r) >= len(b):
        f = r[-1] / b[-1]
        d = len(r) - len(b)
        q[d] = f
        for i, c in enumerate(b):
            r[d + i] -= f * c
        while r and not r[-1]:
            r.pop()
    return q, r


ZZ = Ring(RingSpec("Integers"))
QQ = Ring(RingSpec("Rationals"))
Z_LAURENT = Ring(RingSpec("IntLaurent", involution="InvertVariable"))
Q_LAURENT = Ring(RingSpec("RatLaurent", involution="InvertVariable"))


def GF(p):
    return Ring(RingSpec("PrimeField", p=p))


_RING_CACHE = {r.tag(): r for r in (ZZ, QQ, Z_LAURENT, Q_LAURENT)}


def ring_from_tag(tag):
    if tag in _RING_CACHE:
        return _RING_CACHE[tag]
    m = re.fullmatch(r"F(\d+)", tag)
    if m:
        return GF(int(m.group(1)))
    raise ValueError("unknown ring tag %r" % (tag,))


# ---------------------------------------------------------------------------
# Laurent / Alexander utilities


def involute(p: LaurentPolynomial) -> LaurentPolynomial:
    """The standard Laurent involution: exponent k |-> -k."""
    return p.involute()


def is_alexander(p: LaurentPolynomial) -> bool:
    """True iff p(1) = +/-1, i.e. p lies in the multiplicative set P."""
    return p.eval_at_one() in (1, -1)


def laurent_gcd_primitive(a: LaurentPolynomial, b: LaurentPolynomial):
    """Gcd of two integral Laurent polynomials, as a primitive element of
    Z[z] with nonnegative min exponent 0 and positive leading coefficient."""
    if a.is_zero():
        return ZZ_primitive(b)
    if b.is_zero():
        return ZZ_primitive(a)
    pa = [Fraction(v) for v in _dense(a)]
    pb = [Fraction(v) for v in _dense(b)]
    g = _poly_gcd(pa, pb)
    gl = LaurentPolynomial({i: c for i, c in enumerate(g) if c})
    den = 1
    for c in g:
        if c:
            den = den * c.denominator // _gcd_int(den, c.denominator)
    gl = gl.map_coeffs(lambda c: c * den)
    cont = gl.content()
    gl = gl.map_coeffs(lambda c: int(c) // cont)
    cg = _gcd_int(a.content(), b.content())
    gl = gl.map_coeffs(lambda c: c * cg)
    if gl.coeffs.get(gl.max_exp(), 0) < 0:
        gl = -gl
    return gl


def ZZ_primitive(a: LaurentPolynomial):
    """Unit normalized associate of a in Z[z]: min exponent 0, positive lead."""
    if a.is_zero():
        return a
    a = a.shift(-a.min_exp())
    if a.coeffs.get(a.max_exp(), 0) < 0:
        a = -a
    return a


def _dense(p: LaurentPolynomial):
    s = p.min_exp()
    return [p[s + i] for i in range(p.span() + 1)]


def _poly_gcd(a, b):
    a = list(a)
    b = list(b)
    while any(b):
        _, r = _poly_divmod(a, b)
        a, b = b, r
    # normalize monic
    while a and not a[-1]:
        a.pop()
    if a:
        lead = a[-1]
        a = [c / lead for c in a]
    return a or [Fraction(0)]


# ---------------------------------------------------------------------------
# Torsion values: canonical representatives in S^-1 A / A


@dataclass(frozen=True)
class TorsionPair:
    """Tag for a localisation (A, S) supported by torsion values."""

    name: str  # "Z" (Z, Z\{0})  or  "Alexander" (Z[z,z^-1], P)

    def ring(self):
        return ZZ if self.name == "Z" else Z_LAURENT


PAIR_Z = TorsionPair("Z")
PAIR_ALEXANDER = TorsionPair("Alexander")


class TorsionValue:
    """Canonical coset representative in S^-1 A / A.

    Over (Z, Z\\{0}) the representative is a Fraction in [0, 1).  Over
    (Z[z,z^-1], P) it is the image of the numerator in Q[z]/(D) where D is
    the reduced denominator normalized to have min exponent 0 and value +1
    at 1; the class is stored as the pair (r, D) with deg r < deg D.  Equal
    cosets normalize to identical representatives (the reduction map
    A/(D) -> Q[z]/(D) is injective by Gauss's lemma since D is primitive).
    """

    __slots__ = ("pair", "rep", "den")

    def __init__(self, pair, rep, den):
        object.__setattr__(self, "pair", pair)
        object.__setattr__(self, "rep", rep)
        object.__setattr__(self, "den", den)

    def __setattr__(self, *a):
        raise AttributeError("TorsionValue is immutable")

    def is_zero(self):
        if self.pair == PAIR_Z:
            return self.rep == 0
        return not any(self.rep)

    def __eq__(self, other):
        return (
            isinstance(other, TorsionValue)
            and self.pair == other.pair
            and self.rep == other.rep
            and self.den == other.den
        )

    def __hash__(self):
        if self.pair == PAIR_Z:
            return hash((self.pair.name, self.rep))
        return hash((self.pair.name, tuple(self.rep), self.den))

    def __add__(self, other):
        assert self.pair == other.pair
        if self.pair == PAIR_Z:
            a = self.rep + other.rep
            return torsion_normalize(a.numerator, a.denominator, PAIR_Z)
        n1, d1 = self._as_fraction()
        n2, d2 = other._as_fraction()
        return torsion_normalize(n1 * d2 + n2 * d1, d1 * d2, PAIR_ALEXANDER)

    def __neg__(self):
        if self.pair == PAIR_Z:
            return torsion_normalize(-self.rep.numerator, self.rep.denominator, PAIR_Z)
        n, d = self._as_fraction()
        return torsion_normalize(-n, d, PAIR_ALEXANDER)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, a):
        """Multiply by a ring element of A."""
        if self.pair == PAIR_Z:
            v = self.rep * a
            return torsion_normalize(v.numerator, v.denominator, PAIR_Z)
        n, d = self._as_fraction()
        if not isinstance(a, LaurentPolynomial):
            a = LaurentPolynomial.constant(a)
        return torsion_normalize(n * a, d, PAIR_ALEXANDER)

    def conj(self):
        """Involution of S^-1 A / A."""
        if self.pair == PAIR_Z:
            return self
        n, d = self._as_fraction()
        return torsion_normalize(n.involute(), d.involute(), PAIR_ALEXANDER)

    def _as_fraction(self):
        """Return (num, den) in A x S representing this coset."""
        assert self.pair == PAIR_ALEXANDER
        # rep is a tuple of Fractions (coefficients of r, deg < deg D)
        common = 1
        for c in self.rep:
            common = common * c.denominator // _gcd_int(common, c.denominator)
        num = LaurentPolynomial({i: int(c * common) for i, c in enumerate(self.rep) if c})
        den = self.den.map_coeffs(lambda v: v * common)
        return num, den

    def __repr__(self):
        if self.pair == PAIR_Z:
            return str(self.rep)
        num = LaurentPolynomial({i: c for i, c in enumerate(self.rep) if c})
        return "(%s)/(%s)" % (render_laurent(num), render_laurent(self.den))


def torsion_normalize(num, den, pair: TorsionPair) -> TorsionValue:
    """Canonical representative of num/den in S^-1 A / A.

    Raises DenominatorNotInS when den is not in the multiplicative set
    (nonzero integers over (Z, Z-0); unit value at 1 over (Z[z,z^-1], P)).
    """
    if pair == PAIR_Z:
        num = int(num)
        den = int(den)
        if den == 0:
            raise DenominatorNotInS("zero denominator")
        f = Fraction(num, den)
        frac = f - (f.numerator // f.denominator)  # in [0,1)
        return TorsionValue(PAIR_Z, frac, 1)

    if not isinstance(num, LaurentPolynomial):
        num = LaurentPolynomial.constant(num)
    if not isinstance(den, LaurentPolynomial):
        den = LaurentPolynomial.constant(den)
    num = num.map_coeffs(int) if num.is_integral() else num
    if not (num.is_integral() and den.is_integral()):
        raise TypeError("numerator/denominator must lie in Z[z,z^-1]")
    num = num.to_int_coeffs()
    den = den.to_int_coeffs()
    if den.is_zero() or den.eval_at_one() not in (1, -1):
        raise DenominatorNotInS("denominator %r not in P" % (den,))
    # reduce the fraction
    g = laurent_gcd_primitive(num, den)
    if g.span() > 0 or g.content() > 1:
        rZ = Ring(RingSpec("IntLaurent", involution="InvertVariable"))
        num = rZ.exact_div(num, g)
        den = rZ.exact_div(den, g)
    # unit-normalize denominator: min exponent 0 and value +1 at 1
    k = den.min_exp()
    den = den.shift(-k)
    num = num.shift(-k)
    if den.eval_at_one() == -1:
        den = -den
        num = -num
    d = den.span()
    if d == 0:
        # denominator is a unit: the coset is zero
        return TorsionValue(PAIR_ALEXANDER, (), LaurentPolynomial.constant(1))
    # reduce num in Q[z]/(den), inverting z (den(0) != 0 since min exp is 0)
    dense_den = [Fraction(v) for v in _dense(den)]
    a0 = dense_den[0]
    # z^-1 = -(den - a0)/(a0 z) mod den
    zinv = [-dense_den[i + 1] / a0 for i in range(d)]  # coefficients of z^-1
    rep = [Fraction(0)] * d

    def reduce_mod(vec):
        vec = list(vec)
        while len(vec) > d:
            c = vec.pop()
            if c:
                top = len(vec)  # degree of the popped term
                for i in range(len(dense_den) - 1):
                    vec[top - d + i] -= c * dense_den[i] / dense_den[d]
        while len(vec) < d:
            vec.append(Fraction(0))
        return vec

    zpow = {0: [Fraction(1)] + [Fraction(0)] * (d - 1)}

    def power(k):
        if k in zpow:
            return zpow[k]
        if k > 0:
            prev = power(k - 1)
            vec = reduce_mod([Fraction(0)] + prev)
        else:
            prev = power(k + 1)
            vec = _mulmod(prev, zinv, dense_den)
        zpow[k] = vec
        return vec

    for e, c in num.items():
        vec = power(e)
        for i in range(d):
            rep[i] += c * vec[i]
    return TorsionValue(PAIR_ALEXANDER, tuple(rep), den)


def _mulmod(a, b, den):
    d = len(den) - 1
    out = [Fraction(0)] * (2 * d)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                if y:
                    out[i + j] += x * y
    # reduce
    for top in range(2 * d - 1, d - 1, -1):
        c = out[top]
        if c:
            out[top] = Fraction(0)
            for i in range(d):
                out[top - d + i] -= c * den[i] / den[d]
    return out[:d]
