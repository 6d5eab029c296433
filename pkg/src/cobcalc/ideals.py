"""Monomial ideals in BP-type rings, with p treated as a quasi-variable.

A generator is a pair (a, alpha): the monomial p^a * v^alpha.  Over the
p-local integers, membership and colon ideals of such ideals reduce to
exponentwise arithmetic, with the p-adic valuation playing the role of
the p-exponent.  Ideals are kept in minimal form: no generator divides
another.
"""

from __future__ import annotations

import re

from .errors import ShapeError
from .rat import p_valuation
from .rings import GradedPolynomial, RingSpec

# recognize_In returns this for the zero ideal; None means "not of the form I(n)"
ZERO_IDEAL = "ZERO"


def _divides(g, h) -> bool:
    """(a, alpha) divides (a', alpha') iff a <= a' and alpha <= alpha'."""
    if g[0] > h[0]:
        return False
    return all(x <= y for x, y in zip(g[1], h[1]))


def _minimalize(gens):
    out = []
    for g in sorted(gens):
        if any(_divides(h, g) for h in out):
            continue
        out = [h for h in out if not _divides(g, h)]
        out.append(g)
    return tuple(sorted(out))


class MonomialIdeal:
    """Finitely generated monomial ideal (p^a * v^alpha generators)."""

    __slots__ = ("ring", "gens")

    def __init__(self, ring: RingSpec, gens):
        if ring.prime is None:
            raise ShapeError("monomial ideals need a ring with a prime")
        width = len(ring.gens)
        for a, alpha in gens:
            if a < 0 or len(alpha) != width or any(e < 0 for e in alpha):
                raise ShapeError(f"bad ideal generator ({a}, {alpha})")
        self.ring = ring
        self.gens = _minimalize((a, tuple(alpha)) for a, alpha in gens)

    # -- basic predicates ------------------------------------------------

    def is_zero(self) -> bool:
        return not self.gens

    def is_unit(self) -> bool:
        return self.gens == ((0, (0,) * len(self.ring.gens)),)

    def contains_monomial(self, a: int, alpha) -> bool:
        m = (a, tuple(alpha))
        return any(_divides(g, m) for g in self.gens)

    def __eq__(self, other):
        if not isinstance(other, MonomialIdeal):
            return NotImplemented
        return self.ring == other.ring and self.gens == other.gens

    __hash__ = None

    def __str__(self):
        return ideal_str(self)

    def __repr__(self):
        return f"<ideal ({ideal_str(self)})>"


def ideal_membership(f: GradedPolynomial, ideal: MonomialIdeal) -> bool:
    """Term-by-term membership test.

    A term c*v^alpha lies in the ideal iff some generator (a, beta) has
    beta <= alpha and v_p(c) >= a.  Generators of f's ring that the ideal's
    ring does not know (e.g. the b_i in coaction values) act as scalars.
    """
    if f.is_zero():
        return True
    vpos = _v_positions(f.ring, ideal.ring)
    p = ideal.ring.prime
    for exp, c in f.terms.items():
        alpha = tuple(exp[i] for i in vpos)
        val = p_valuation(c, p)
        if not any(g[0] <= val and all(x <= y for x, y in zip(g[1], alpha)) for g in ideal.gens):
            return False
    return True


def _v_positions(poly_ring: RingSpec, ideal_ring: RingSpec):
    """Positions of the ideal ring's generators inside the polynomial ring."""
    if poly_ring == ideal_ring:
        return tuple(range(len(poly_ring.gens)))
    try:
        return tuple(poly_ring.index(n) for n in ideal_ring.names)
    except ShapeError:
        raise ShapeError("polynomial ring does not contain the ideal's generators") from None


def ideal_colon(ideal: MonomialIdeal, a: int, alpha) -> MonomialIdeal:
    """Colon ideal (I : p^a * v^alpha), minimalized."""
    width = len(ideal.ring.gens)
    alpha = tuple(alpha)
    if len(alpha) != width:
        raise ShapeError("colon monomial has wrong exponent length")
    gens = [
        (max(ga - a, 0), tuple(max(x - y, 0) for x, y in zip(galpha, alpha)))
        for ga, galpha in ideal.gens
    ]
    return MonomialIdeal(ideal.ring, gens)


def ideal_sum(i1: MonomialIdeal, i2: MonomialIdeal) -> MonomialIdeal:
    if i1.ring != i2.ring:
        raise ShapeError("ideal sum needs a shared ring")
    return MonomialIdeal(i1.ring, i1.gens + i2.gens)


def ideal_In(ring: RingSpec, n: int) -> MonomialIdeal:
    """The invariant prime ideal (p, v_1, ..., v_{n-1}); n = 1 gives (p)."""
    if n < 1:
        raise ShapeError("I(n) needs n >= 1")
    width = len(ring.gens)
    if n - 1 > width:
        raise ShapeError(f"ring has only {width} v-generators, need {n - 1}")
    gens = [(1, (0,) * width)]
    for i in range(1, n):
        alpha = [0] * width
        alpha[i - 1] = 1
        gens.append((0, tuple(alpha)))
    return MonomialIdeal(ring, gens)


def ideal_Jn(ring: RingSpec, k_exponents, n: int = None) -> MonomialIdeal:
    """J_n(u) for the monomial u = p^{k0} v_1^{k1} ... v_n^{kn}.

    k_exponents is (k0, k1, ..., kn); generators are
    p^{k0+1}, p^{k0} v1^{k1+1}, ..., p^{k0} v1^{k1}...v_{n-1}^{k_{n-1}} vn^{kn+1}.
    Trailing zero exponents matter (J_2(v1) strictly contains extra
    generators compared to J_1(v1)), so n is part of the data.
    """
    ks = list(k_exponents)
    if n is None:
        n = len(ks) - 1
    if len(ks) < n + 1:
        ks = ks + [0] * (n + 1 - len(ks))
    if any(k < 0 for k in ks):
        raise ShapeError("negative exponent in monomial")
    width = len(ring.gens)
    if n > width:
        raise ShapeError(f"J_{n} needs {n} v-generators, ring has {width}")
    gens = []
    for j in range(0, n + 1):
        alpha = [0] * width
        for i in range(1, j):
            alpha[i - 1] = ks[i]
        if j >= 1:
            alpha[j - 1] = ks[j] + 1
        a = ks[0] + 1 if j == 0 else ks[0]
        gens.append((a, tuple(alpha)))
    return MonomialIdeal(ring, gens)


def recognize_In(ideal: MonomialIdeal):
    """Return n >= 1 if the ideal is exactly (p, v_1..v_{n-1}).

    The zero ideal returns ZERO_IDEAL; anything else returns None.
    Assumes (and relies on) minimal form.
    """
    if ideal.is_zero():
        return ZERO_IDEAL
    width = len(ideal.ring.gens)
    pgen = (1, (0,) * width)
    if pgen not in ideal.gens:
        return None
    indices = set()
    for a, alpha in ideal.gens:
        if (a, alpha) == pgen:
            continue
        if a != 0 or sum(alpha) != 1:
            return None
        indices.add(alpha.index(1))
    n = len(indices) + 1
    if indices != set(range(n - 1)):
        return None
    return n


def monomial_from_exponents(ring: RingSpec, a: int, alpha) -> GradedPolynomial:
    """The polynomial p^a * v^alpha."""
    return GradedPolynomial.monomial(ring, alpha, ring.prime**a if a else 1)


def reduce_mod_ideal(f: GradedPolynomial, ideal: MonomialIdeal) -> GradedPolynomial:
    """Canonical representative of f modulo the ideal.

    Terms divisible by a generator's v-part get their coefficient reduced
    modulo the largest applicable p-power (representatives in [0, p^a)).
    """
    vpos = _v_positions(f.ring, ideal.ring)
    p = ideal.ring.prime
    terms = {}
    for exp, c in f.terms.items():
        alpha = tuple(exp[i] for i in vpos)
        a_max = None
        for a, beta in ideal.gens:
            if all(x <= y for x, y in zip(beta, alpha)):
                a_max = a if a_max is None else min(a_max, a)
        if a_max is None:
            terms[exp] = c
            continue
        if a_max == 0:
            continue
        num, den = int(c.numerator), int(c.denominator)
        modulus = p**a_max
        inv_den = pow(den, -1, modulus)  # den is a unit mod p^a in the p-local setting
        r = (num * inv_den) % modulus
        if r:
            terms[exp] = type(c)(r)
    return GradedPolynomial(f.ring, terms, f.truncated)


# -- ideal text grammar -------------------------------------------------
#
#   ideal    := monomial (',' monomial)*
#   monomial := factor ('*' factor)*
#   factor   := 'p' ('^' int)? | name ('^' int)? | int
#
# Integer literals contribute their p-adic valuation (p-local units are
# irrelevant for ideal membership).

_IDEAL_FACTOR = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*))(?:\s*\^\s*(\d+))?\s*")


def ideal_parse(ring: RingSpec, text: str) -> MonomialIdeal:
    p = ring.prime
    width = len(ring.gens)
    gens = []
    for chunk in text.split(","):
        chunk = chunk.strip()
        if not chunk:
            raise ShapeError("empty monomial in ideal text")
        if chunk == "0":
            continue
        a = 0
        alpha = [0] * width
        for factor in chunk.split("*"):
            m = _IDEAL_FACTOR.fullmatch(factor)
            if not m:
                raise ShapeError(f"bad ideal factor {factor!r}")
            num, name, power = m.groups()
            power = int(power) if power else 1
            if num is not None:
                n = int(num)
                if n == 0:
                    raise ShapeError("zero factor in ideal monomial")
                v = 0
                while n % p == 0:
                    n //= p
                    v += 1
                a += v * power
            elif name == "p":
                a += power
            else:
                alpha[ring.index(name)] += power
        gens.append((a, tuple(alpha)))
    return MonomialIdeal(ring, gens)


def ideal_str(ideal: MonomialIdeal) -> str:
    if ideal.is_zero():
        return "0"
    parts = []
    for a, alpha in ideal.gens:
        factors = []
        if a == 1:
            factors.append("p")
        elif a > 1:
            factors.append(f"p^{a}")
        for i, e in enumerate(alpha):
            if e == 0:
                continue
            name = ideal.ring.names[i]
            factors.append(name if e == 1 else f"{name}^{e}")
        parts.append("*".join(factors) if factors else "1")
    return ", ".join(parts)
