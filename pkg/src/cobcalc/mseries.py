"""Truncated multivariate polynomials in the series variables x, y, z.

Formal group laws are bivariate series truncated by total degree; the
associativity check needs three variables.  TruncMPoly keeps a sparse
dict {exponent tuple -> GradedPolynomial} and drops every product term
whose total degree exceeds the order, which matches truncation by total
(x, y, ...)-degree throughout.
"""

from __future__ import annotations

from .errors import ShapeError
from .rat import is_rat
from .rings import GradedPolynomial, RingSpec
from .series import Series


class TruncMPoly:
    __slots__ = ("vars", "order", "terms", "ring")

    def __init__(self, vars, order: int, terms: dict, ring: RingSpec):
        self.vars = tuple(vars)
        self.order = order
        clean = {}
        for exp, c in terms.items():
            if len(exp) != len(self.vars):
                raise ShapeError("exponent arity mismatch")
            if sum(exp) > order or c.is_zero():
                continue
            clean[exp] = c
        self.terms = clean
        self.ring = ring

    @classmethod
    def zero(cls, vars, order, ring):
        return cls(vars, order, {}, ring)

    @classmethod
    def variable(cls, vars, order, ring, name):
        exp = [0] * len(vars)
        exp[tuple(vars).index(name)] = 1
        return cls(vars, order, {tuple(exp): GradedPolynomial.one(ring)}, ring)

    @classmethod
    def const(cls, vars, order, ring, c: GradedPolynomial):
        return cls(vars, order, {(0,) * len(vars): c}, ring)

    def _check(self, other):
        if self.vars != other.vars or self.ring != other.ring:
            raise ShapeError("incompatible truncated polynomials")

    def __add__(self, other):
        self._check(other)
        order = min(self.order, other.order)
        terms = dict(self.terms)
        for e, c in other.terms.items():
            s = terms.get(e)
            terms[e] = c if s is None else s + c
        return TruncMPoly(self.vars, order, terms, self.ring)

    def __neg__(self):
        return TruncMPoly(self.vars, self.order, {e: -c for e, c in self.terms.items()}, self.ring)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if is_rat(other) or isinstance(other, GradedPolynomial):
            return self.scale(other)
        self._check(other)
        order = min(self.order, other.order)
        terms = {}
        a = [(e, sum(e), c) for e, c in self.terms.items()]
        b = [(e, sum(e), c) for e, c in other.terms.items()]
        for e1, d1, c1 in a:
            for e2, d2, c2 in b:
                if d1 + d2 > order:
                    continue
                key = tuple(i + j for i, j in zip(e1, e2))
                c = c1 * c2
                s = terms.get(key)
                terms[key] = c if s is None else s + c
        return TruncMPoly(self.vars, order, terms, self.ring)

    def scale(self, c):
        if is_rat(c):
            return TruncMPoly(
                self.vars, self.order, {e: x.scale(c) for e, x in self.terms.items()}, self.ring
            )
        return TruncMPoly(
            self.vars, self.order, {e: x * c for e, x in self.terms.items()}, self.ring
        )

    def is_zero(self) -> bool:
        return not self.terms

    def coefficient(self, exp) -> GradedPolynomial:
        return self.terms.get(tuple(exp), GradedPolynomial.zero(self.ring))

    def total_degrees(self):
        return sorted({sum(e) for e in self.terms})

    def map_coeffs(self, fn, ring=None) -> "TruncMPoly":
        return TruncMPoly(
            self.vars, self.order, {e: fn(c) for e, c in self.terms.items()}, ring or self.ring
        )

    def __eq__(self, other):
        if not isinstance(other, TruncMPoly):
            return NotImplemented
        return (
            self.vars == other.vars
            and self.ring == other.ring
            and self.order == other.order
            and self.terms == other.terms
        )

    __hash__ = None

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for exp in sorted(self.terms, key=lambda e: (sum(e), e)):
            c = self.terms[exp]
            mono = "*".join(
                (v if k == 1 else f"{v}^{k}") for v, k in zip(self.vars, exp) if k
            )
            cs = str(c)
            if ("+" in cs[1:]) or ("-" in cs[1:]) or " " in cs:
                cs = f"({cs})"
            if not mono:
                parts.append(cs)
            elif cs == "1":
                parts.append(mono)
            else:
                parts.append(f"{cs}*{mono}")
        return " + ".join(parts)


def eval_series_at(f: Series, value: TruncMPoly, ring: RingSpec) -> TruncMPoly:
    """Evaluate a univariate polynomial-coefficient series at a TruncMPoly.

    The substitute must have no constant term; Horner over descending
    exponents.  Exponents of f beyond the truncation order are irrelevant.
    """
    if f.support_min() is not None and f.support_min() < 1:
        raise ShapeError("substitution needs positive valuation")
    order = value.order
    exps = sorted((k for k in f.coeffs if k <= order), reverse=True)
    acc = TruncMPoly.zero(value.vars, order, ring)
    prev = None
    for k in exps:
        if prev is not None:
            gap = prev - k
            for _ in range(gap):
                acc = acc * value
        acc = acc + TruncMPoly.const(value.vars, order, ring, f.coeffs[k])
        prev = k
    if prev is not None:
        for _ in range(prev):
            acc = acc * value
    return acc


def _horner(rows: dict, base: TruncMPoly, zero: TruncMPoly) -> TruncMPoly:
    """Sum rows[k] * base^k by Horner over descending exponents."""
    acc = zero
    prev = None
    for k in sorted(rows, reverse=True):
        if prev is not None:
            for _ in range(prev - k):
                acc = acc * base
        acc = acc + rows[k]
        prev = k
    if prev:
        for _ in range(prev):
            acc = acc * base
    return acc


def eval_fgl_at(F_terms: dict, A: TruncMPoly, B: TruncMPoly) -> TruncMPoly:
    """Sum c_ij A^i B^j for a bivariate coefficient dict, Horner in both slots."""
    order = min(A.order, B.order)
    zero = TruncMPoly.zero(A.vars, order, A.ring)
    by_i: dict = {}
    for (i, j), c in F_terms.items():
        by_i.setdefault(i, {})[j] = TruncMPoly.const(A.vars, order, A.ring, c)
    rows = {i: _horner(cols, B, zero) for i, cols in by_i.items()}
    return _horner(rows, A, zero)
