"""Graded polynomial rings with non-positively graded generators.

A RingSpec fixes an ordered generator list (names and degrees <= 0), a
coefficient domain (integers, p-local integers, or rationals) and a
codegree bound D: polynomial terms whose degree drops below -D are
clamped away, with a `truncated` flag recording that this happened.
Since every generator has degree <= 0, the terms of degree >= -D form a
quotient of the full ring, so clamping never corrupts retained terms.

GradedPolynomial values are immutable; all operations return new values.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional

from .errors import IntegralityViolation, ShapeError
from .rat import ONE, Rat, ZERO, is_integer, is_p_integral, is_rat, rat_str

LAZARD_B_MODEL = "LAZARD_B_MODEL"
BP = "BP"
B_COACTION = "B_COACTION"
CK1 = "CK1"
CUSTOM = "CUSTOM"

INT = "INT"
P_LOCAL = "P_LOCAL"
RATIONAL = "RATIONAL"

DEFAULT_CODEGREE = 24


@dataclass(frozen=True)
class RingSpec:
    """Shape of a graded coefficient ring.

    gens is the ordered tuple of (name, degree); exponent vectors are
    dense over this list and its length never changes after construction.
    """

    label: str
    prime: Optional[int]
    gens: tuple
    domain: str
    codegree_bound: int

    def __post_init__(self):
        names = [n for n, _ in self.gens]
        if len(set(names)) != len(names):
            raise ShapeError(f"duplicate generator names: {names}")
        for n, d in self.gens:
            if d > 0:
                raise ShapeError(f"generator {n} has positive degree {d}")
        if self.domain == P_LOCAL and self.prime is None:
            raise ShapeError("P_LOCAL domain needs a prime")
        if self.codegree_bound < 0:
            raise ShapeError("codegree bound must be >= 0")

    @property
    def degrees(self):
        return tuple(d for _, d in self.gens)

    @property
    def names(self):
        return tuple(n for n, _ in self.gens)

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise ShapeError(f"no generator {name!r} in {self.label} ring") from None

    def rationalized(self) -> "RingSpec":
        """Same generators, coefficients extended to all of Q."""
        if self.domain == RATIONAL:
            return self
        return RingSpec(self.label, self.prime, self.gens, RATIONAL, self.codegree_bound)

    def coefficient_ok(self, q) -> bool:
        if self.domain == INT:
            return is_integer(q)
        if self.domain == P_LOCAL:
            return is_p_integral(q, self.prime)
        return True


def bp_ring(p: int, num_gens: int, codegree: int = DEFAULT_CODEGREE) -> RingSpec:
    """Z_(p)[v_1..v_num_gens] with deg v_i = 1 - p^i."""
    gens = tuple((f"v{i}", 1 - p**i) for i in range(1, num_gens + 1))
    return RingSpec(BP, p, gens, P_LOCAL, codegree)


def bp_gens_for(p: int, codegree: int) -> int:
    """Number of v-generators whose degree fits in [-codegree, 0]."""
    n = 0
    while p ** (n + 1) - 1 <= codegree:
        n += 1
    return max(n, 1)


def b_model_ring(num_gens: int, codegree: int = DEFAULT_CODEGREE) -> RingSpec:
    """Z[b_1..b_num_gens] with deg b_i = -i (image ring of the Hurewicz map)."""
    gens = tuple((f"b{i}", -i) for i in range(1, num_gens + 1))
    return RingSpec(LAZARD_B_MODEL, None, gens, INT, codegree)


def coaction_ring(p: int, num_v: int, num_b: int, codegree: int = DEFAULT_CODEGREE) -> RingSpec:
    """BP tensored with Z[b_1, b_2, ...]; hosts total coaction values."""
    gens = tuple((f"v{i}", 1 - p**i) for i in range(1, num_v + 1))
    gens += tuple((f"b{i}", -i) for i in range(1, num_b + 1))
    return RingSpec(B_COACTION, p, gens, P_LOCAL, codegree)


def ck1_ring(p: int, codegree: int = DEFAULT_CODEGREE) -> RingSpec:
    """Z_(p)[v1], deg v1 = 1-p (first connective Morava K-theory coefficients)."""
    return RingSpec(CK1, p, (("v1", 1 - p),), P_LOCAL, codegree)


def custom_ring(gens, domain=RATIONAL, prime=None, codegree: int = DEFAULT_CODEGREE) -> RingSpec:
    return RingSpec(CUSTOM, prime, tuple(gens), domain, codegree)


def scalar_ring(domain=RATIONAL, prime=None, codegree: int = 0) -> RingSpec:
    """Ring with no generators: plain integers / p-locals / rationals."""
    return RingSpec(CUSTOM, prime, (), domain, codegree)


def monomial_degree(exponents, ring: RingSpec) -> int:
    """Degree of a monomial: dot product of exponents with generator degrees."""
    degs = ring.degrees
    if len(exponents) != len(degs):
        raise ShapeError(
            f"exponent vector of length {len(exponents)} over {len(degs)} generators"
        )
    return sum(e * d for e, d in zip(exponents, degs))


class GradedPolynomial:
    """Sparse exact polynomial over a RingSpec.

    terms maps dense exponent tuples to nonzero rationals.  `truncated`
    records that some term was clamped by the codegree bound somewhere in
    this value's history.
    """

    __slots__ = ("ring", "terms", "truncated")

    def __init__(self, ring: RingSpec, terms: dict, truncated: bool = False):
        degs = ring.degrees
        bound = -ring.codegree_bound
        nterms = {}
        for exp, c in terms.items():
            if c == 0:
                continue
            if len(exp) != len(degs):
                raise ShapeError("exponent length does not match generator count")
            if sum(e * d for e, d in zip(exp, degs)) < bound:
                truncated = True
                continue
            nterms[exp] = c
        self.ring = ring
        self.terms = nterms
        self.truncated = truncated
        if ring.domain != RATIONAL:
            ok = ring.coefficient_ok
            for exp, c in nterms.items():
                if not ok(c):
                    raise IntegralityViolation(
                        f"coefficient {rat_str(c)} at {exp} not in {ring.domain} domain",
                        exponent=exp,
                        coefficient=c,
                    )

    # -- constructors -------------------------------------------------

    @classmethod
    def zero(cls, ring):
        return cls(ring, {})

    @classmethod
    def const(cls, ring, q):
        q = Rat(q) if not is_rat(q) else q
        return cls(ring, {(0,) * len(ring.gens): Rat(q)})

    @classmethod
    def one(cls, ring):
        return cls.const(ring, 1)

    @classmethod
    def gen(cls, ring, name, power: int = 1):
        exp = [0] * len(ring.gens)
        exp[ring.index(name)] = power
        return cls(ring, {tuple(exp): ONE})

    @classmethod
    def monomial(cls, ring, exponents, coeff=ONE):
        return cls(ring, {tuple(exponents): Rat(coeff)})

    # -- predicates and degree queries ---------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_one(self) -> bool:
        return self.terms == {(0,) * len(self.ring.gens): ONE}

    def constant_term(self):
        return self.terms.get((0,) * len(self.ring.gens), ZERO)

    def term_degree(self, exp) -> int:
        return sum(e * d for e, d in zip(exp, self.ring.degrees))

    def homogeneous_degree(self) -> Optional[int]:
        """Common degree of all terms, or None if inhomogeneous or zero."""
        degs = {self.term_degree(e) for e in self.terms}
        if len(degs) == 1:
            return degs.pop()
        return None

    def homogeneous_of(self, d: int) -> bool:
        return all(self.term_degree(e) == d for e in self.terms)

    def min_degree(self) -> int:
        """Most negative term degree (0 for the zero polynomial)."""
        if not self.terms:
            return 0
        return min(self.term_degree(e) for e in self.terms)

    # -- arithmetic -----------------------------------------------------

    def _check_ring(self, other):
        if self.ring != other.ring:
            raise ShapeError("polynomials over different rings")

    def __add__(self, other):
        if is_rat(other):
            other = GradedPolynomial.const(self.ring, other)
        if not isinstance(other, GradedPolynomial):
            return NotImplemented
        self._check_ring(other)
        terms = dict(self.terms)
        for exp, c in other.terms.items():
            s = terms.get(exp)
            if s is None:
                terms[exp] = c
            else:
                s = s + c
                if s == 0:
                    del terms[exp]
                else:
                    terms[exp] = s
        out = GradedPolynomial.__new__(GradedPolynomial)
        out.ring = self.ring
        out.terms = terms
        out.truncated = self.truncated or other.truncated
        return out

    __radd__ = __add__

    def __neg__(self):
        out = GradedPolynomial.__new__(GradedPolynomial)
        out.ring = self.ring
        out.terms = {e: -c for e, c in self.terms.items()}
        out.truncated = self.truncated
        return out

    def __sub__(self, other):
        if is_rat(other):
            other = GradedPolynomial.const(self.ring, other)
        return self + (-other)

    def __mul__(self, other):
        if is_rat(other):
            return self.scale(other)
        if not isinstance(other, GradedPolynomial):
            return NotImplemented
        self._check_ring(other)
        degs = self.ring.degrees
        bound = -self.ring.codegree_bound
        a = list(self.terms.items())
        b = list(other.terms.items())
        if len(a) > len(b):
            a, b = b, a
        bdeg = [(e, c, sum(x * d for x, d in zip(e, degs))) for e, c in b]
        truncated = self.truncated or other.truncated
        terms = {}
        for ea, ca, in a:
            da = sum(x * d for x, d in zip(ea, degs))
            for eb, cb, db in bdeg:
                if da + db < bound:
                    truncated = True
                    continue
                key = tuple(x + y for x, y in zip(ea, eb))
                c = ca * cb
                s = terms.get(key)
                if s is None:
                    terms[key] = c
                else:
                    s = s + c
                    if s == 0:
                        del terms[key]
                    else:
                        terms[key] = s
        # INT and P_LOCAL are closed under multiplication, so no re-check here
        out = GradedPolynomial.__new__(GradedPolynomial)
        out.ring = self.ring
        out.terms = terms
        out.truncated = truncated
        return out

    __rmul__ = __mul__

    def scale(self, q):
        q = Rat(q) if not is_rat(q) else q
        if q == 0:
            return GradedPolynomial.zero(self.ring)
        return GradedPolynomial(
            self.ring, {e: c * q for e, c in self.terms.items()}, self.truncated
        )

    def __pow__(self, n: int):
        if n < 0:
            raise ShapeError("negative polynomial powers are not defined")
        out = GradedPolynomial.one(self.ring)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base if n > 1 else base
            n >>= 1
        return out

    def invert(self):
        """Inverse of a polynomial whose constant term is a nonzero rational.

        The non-constant part has strictly negative degrees, so the
        geometric series terminates within the codegree bound.
        """
        c0 = self.constant_term()
        if c0 == 0:
            from .errors import NotInvertible

            raise NotInvertible("constant term is zero")
        inv_c0 = 1 / c0
        rest = self - GradedPolynomial.const(self.ring, c0)
        if rest.is_zero():
            return GradedPolynomial.const(self.ring, inv_c0)
        u = rest.scale(inv_c0)
        # sum_k (-u)^k; u has strictly negative degrees, so the loop
        # terminates once powers fall below the codegree bound
        acc = GradedPolynomial.one(self.ring)
        upow = GradedPolynomial.one(self.ring)
        sign = -1
        while True:
            upow = upow * u
            if upow.is_zero():
                break
            acc = acc + upow.scale(sign)
            sign = -sign
        return acc.scale(inv_c0)

    # -- conversions ----------------------------------------------------

    def cast(self, ring: RingSpec) -> "GradedPolynomial":
        """Reinterpret over another ring with matching generator names.

        Missing generators must not occur; extra generators get exponent 0.
        Integrality against the target domain is checked by construction.
        """
        if ring == self.ring:
            return self
        idx = {}
        for i, n in enumerate(self.ring.names):
            idx[i] = ring.index(n) if n in ring.names else None
        width = len(ring.gens)
        terms = {}
        for exp, c in self.terms.items():
            nexp = [0] * width
            for i, e in enumerate(exp):
                if e == 0:
                    continue
                j = idx[i]
                if j is None:
                    raise ShapeError(
                        f"generator {self.ring.names[i]} does not exist in target ring"
                    )
                nexp[j] = e
            terms[tuple(nexp)] = c
        return GradedPolynomial(ring, terms, self.truncated)

    def subs(self, values: dict, one, embed):
        """Evaluate at generator values living in any commutative domain.

        values maps generator names to domain elements; unlisted
        generators must not occur.  `one` is the domain unit, `embed`
        embeds a rational scalar.
        """
        acc = None
        for exp, c in sorted(self.terms.items()):
            term = embed(c)
            for i, e in enumerate(exp):
                if e == 0:
                    continue
                name = self.ring.names[i]
                if name not in values:
                    raise ShapeError(f"no value provided for generator {name}")
                term = term * values[name] ** e
            acc = term if acc is None else acc + term
        if acc is None:
            return embed(ZERO)
        return acc

    def eval_rat(self, values: dict):
        """Evaluate with rational generator values; returns a rational."""
        total = ZERO
        for exp, c in self.terms.items():
            v = c
            for i, e in enumerate(exp):
                if e:
                    v = v * values[self.ring.names[i]] ** e
            total += v
        return total

    def split_by(self, names) -> dict:
        """Group terms by their exponents on `names`.

        Returns {exponent-subtuple: polynomial with those exponents zeroed}.
        Used to read b-polynomial values coefficientwise per b-monomial.
        """
        pos = [self.ring.index(n) for n in names]
        groups: dict = {}
        for exp, c in self.terms.items():
            key = tuple(exp[i] for i in pos)
            rest = list(exp)
            for i in pos:
                rest[i] = 0
            groups.setdefault(key, {})[tuple(rest)] = c
        return {
            k: GradedPolynomial(self.ring, t, self.truncated) for k, t in sorted(groups.items())
        }

    def require_integral(self, domain=None, prime=None):
        """Check all coefficients against a domain; raises IntegralityViolation."""
        domain = domain or self.ring.domain
        prime = prime or self.ring.prime
        for exp, c in self.terms.items():
            if domain == INT and not is_integer(c):
                raise IntegralityViolation("non-integer coefficient", exp, c)
            if domain == P_LOCAL and not is_p_integral(c, prime):
                raise IntegralityViolation(f"coefficient not {prime}-integral", exp, c)
        return self

    # -- ordering / display ----------------------------------------------

    def sorted_terms(self):
        """Canonical order: descending total degree, then lex on exponents."""
        return sorted(self.terms.items(), key=lambda kv: (-self.term_degree(kv[0]), kv[0]))

    def __str__(self):
        return poly_str(self)

    def __repr__(self):
        return f"<{self.ring.label} poly {poly_str(self)}>"

    def __eq__(self, other):
        if is_rat(other):
            return self.terms == GradedPolynomial.const(self.ring, other).terms
        if not isinstance(other, GradedPolynomial):
            return NotImplemented
        return self.ring == other.ring and self.terms == other.terms

    __hash__ = None


# -- text grammar ------------------------------------------------------
#
#   poly   := term (('+'|'-') term)*
#   term   := coeff ('*' factor)* | factor ('*' factor)*
#   factor := name ('^' int)?
#   coeff  := int | int '/' int
#
# Printing is canonical (descending degree, lex, unit coefficients elided),
# and parse(print(f)) == f exactly.

_TOKEN = re.compile(r"\s*(?:(\d+/\d+|\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\^)|(\*)|([+-]))")


def _tokenize(text: str):
    pos = 0
    out = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            if text[pos:].strip() == "":
                break
            raise ShapeError(f"parse error at position {pos}: {text[pos:pos + 12]!r}")
        pos = m.end()
        num, name, caret, star, sign = m.groups()
        if num is not None:
            out.append(("num", num))
        elif name is not None:
            out.append(("name", name))
        elif caret:
            out.append(("^", "^"))
        elif star:
            out.append(("*", "*"))
        else:
            out.append(("sign", sign))
    return out


def _parse_terms(tokens, pos, ring):
    """Parse a signed sum of monomial terms; returns (monomials, newpos).

    Each monomial is (coeff, exponent-tuple); stops at end of tokens.
    """
    res = []
    n = len(tokens)
    sign = 1
    expect_term = True
    while pos < n:
        kind, val = tokens[pos]
        if kind == "sign":
            if expect_term:
                sign = -sign if val == "-" else sign
            else:
                sign = -1 if val == "-" else 1
                expect_term = True
            pos += 1
            continue
        # one term: optional coefficient, then factors
        coeff = ONE
        exp = [0] * len(ring.gens)
        saw = False
        if kind == "num":
            if "/" in val:
                a, b = val.split("/")
                coeff = Rat(int(a), int(b))
            else:
                coeff = Rat(int(val))
            pos += 1
            saw = True
        while pos < n:
            kind, val = tokens[pos]
            if kind == "*":
                pos += 1
                continue
            if kind != "name":
                break
            idx = ring.index(val)
            power = 1
            pos += 1
            if pos < n and tokens[pos][0] == "^":
                pos += 1
                if pos >= n or tokens[pos][0] != "num" or "/" in tokens[pos][1]:
                    raise ShapeError("expected integer exponent after '^'")
                power = int(tokens[pos][1])
                pos += 1
            exp[idx] += power
            saw = True
        if not saw:
            raise ShapeError("empty term in polynomial text")
        res.append((coeff * sign, tuple(exp)))
        sign = 1
        expect_term = False
    return res


def poly_parse(ring: RingSpec, text: str) -> GradedPolynomial:
    """Parse `coeff*gen^k*...` terms joined by +/- into a polynomial."""
    tokens = _tokenize(text)
    if not tokens:
        raise ShapeError("empty polynomial text")
    terms: dict = {}
    for coeff, exp in _parse_terms(tokens, 0, ring):
        terms[exp] = terms.get(exp, ZERO) + coeff
    return GradedPolynomial(ring, terms)


def _monomial_str(ring, exp, coeff):
    factors = []
    for i, e in enumerate(exp):
        if e == 0:
            continue
        name = ring.names[i]
        factors.append(name if e == 1 else f"{name}^{e}")
    if not factors:
        return rat_str(coeff)
    if coeff == 1:
        return "*".join(factors)
    if coeff == -1:
        return "-" + "*".join(factors)
    return rat_str(coeff) + "*" + "*".join(factors)


def poly_str(f: GradedPolynomial) -> str:
    if not f.terms:
        return "0"
    parts = []
    for exp, c in f.sorted_terms():
        s = _monomial_str(f.ring, exp, c)
        if parts:
            if s.startswith("-"):
                parts.append(" - " + s[1:])
            else:
                parts.append(" + " + s)
        else:
            parts.append(s)
    return "".join(parts)
