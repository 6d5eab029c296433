"""Windowed Laurent/power series with graded-polynomial coefficients.

A Series in one variable (deg t = deg x = deg y = +1) stores coefficients
on an explicit window [lo, hi]:

  * coefficient(k) is exactly zero for k < lo,
  * coefficients are known exactly for lo <= k <= hi,
  * above hi the series is unknown, unless `entire` is set, in which case
    the stored data is the whole series.

Every operation propagates windows soundly: a coefficient inside the
output window never depends on unknown data.  Multiplication caps the
output at f.hi + g.lo for a non-entire f (f's unknown tail pairs with g's
support) and symmetrically for g.

Coefficients may be GradedPolynomial values or, for nested use (series in
x whose coefficients are Laurent series in t), other Series; anything
supporting +, *, unary -, scale(), is_zero(), invert() works.
"""

from __future__ import annotations

from .errors import IntegralityViolation, NotInvertible, ShapeError, TruncationError
from .rat import Rat, is_rat, rat_str
from .rings import GradedPolynomial, RingSpec


def _invert_coeff(c):
    if is_rat(c):
        if c == 0:
            raise NotInvertible("zero coefficient")
        return 1 / c
    return c.invert()


def _domain_one(czero):
    if is_rat(czero):
        return Rat(1)
    if isinstance(czero, GradedPolynomial):
        return GradedPolynomial.one(czero.ring)
    return Series.from_terms(czero.var, {0: _domain_one(czero.czero)}, czero.czero)


class Series:
    __slots__ = ("var", "coeffs", "lo", "hi", "entire", "czero")

    def __init__(self, var, coeffs, lo, hi, entire, czero):
        if lo > hi:
            raise ShapeError(f"empty window [{lo}, {hi}]")
        clean = {}
        for k, c in coeffs.items():
            if k < lo or k > hi:
                raise ShapeError(f"stored exponent {k} outside window [{lo}, {hi}]")
            if not (c == 0 if is_rat(c) else c.is_zero()):
                clean[k] = c
        self.var = var
        self.coeffs = clean
        self.lo = lo
        self.hi = hi
        self.entire = entire
        self.czero = czero

    # -- constructors ---------------------------------------------------

    @classmethod
    def from_terms(cls, var, terms, czero, lo=None, hi=None, entire=True):
        """Exact series from a finite terms dict (defaults to entire)."""
        keys = [k for k, c in terms.items() if not (c == 0 if is_rat(c) else c.is_zero())]
        if lo is None:
            lo = min(keys, default=0)
        if hi is None:
            hi = max(keys, default=lo)
        return cls(var, terms, lo, hi, entire, czero)

    @classmethod
    def zero(cls, var, czero):
        return cls(var, {}, 0, 0, True, czero)

    @classmethod
    def variable(cls, var, ring: RingSpec):
        return cls.from_terms(var, {1: GradedPolynomial.one(ring)}, GradedPolynomial.zero(ring))

    @classmethod
    def constant(cls, var, c, czero=None):
        if czero is None:
            czero = c * 0 if is_rat(c) else c.scale(0)
        return cls.from_terms(var, {0: c}, czero)

    # -- access -----------------------------------------------------------

    def coefficient(self, k):
        if k < self.lo:
            return self.czero
        if k > self.hi:
            if self.entire:
                return self.czero
            raise TruncationError(
                f"coefficient of {self.var}^{k} outside computed window "
                f"[{self.lo}, {self.hi}]"
            )
        return self.coeffs.get(k, self.czero)

    def support_min(self):
        """Lowest exponent with a nonzero stored coefficient (None if zero)."""
        return min(self.coeffs) if self.coeffs else None

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def truncation_touched(self) -> bool:
        """True when this value is not the whole exact series."""
        if not self.entire:
            return True
        return any(getattr(c, "truncated", False) for c in self.coeffs.values())

    def items(self):
        return sorted(self.coeffs.items())

    # -- window manipulation ----------------------------------------------

    def restrict(self, lo=None, hi=None) -> "Series":
        """Exact sub-sum over [lo, hi], as an entire series.

        The requested window must lie inside the known range.
        """
        lo = self.lo if lo is None else lo
        hi = self.hi if hi is None else hi
        if hi > self.hi and not self.entire:
            raise TruncationError(f"window [{lo}, {hi}] exceeds known [{self.lo}, {self.hi}]")
        terms = {k: c for k, c in self.coeffs.items() if lo <= k <= hi}
        return Series(self.var, terms, min(lo, hi), hi, True, self.czero)

    def truncate_hi(self, hi) -> "Series":
        """Forget coefficients above hi (knowledge truncation)."""
        if hi >= self.hi:
            return self
        dropped = any(k > hi for k in self.coeffs)
        terms = {k: c for k, c in self.coeffs.items() if k <= hi}
        entire = self.entire and not dropped
        return Series(self.var, terms, min(self.lo, hi), hi, entire, self.czero)

    def tighten(self) -> "Series":
        """Raise lo to the actual support minimum (a strictly stronger promise)."""
        m = self.support_min()
        if m is None or m == self.lo:
            return self
        return Series(self.var, self.coeffs, m, self.hi, self.entire, self.czero)

    def shift(self, n) -> "Series":
        return Series(
            self.var,
            {k + n: c for k, c in self.coeffs.items()},
            self.lo + n,
            self.hi + n,
            self.entire,
            self.czero,
        )

    def rename(self, var) -> "Series":
        return Series(var, self.coeffs, self.lo, self.hi, self.entire, self.czero)

    def map_coeffs(self, fn, czero=None) -> "Series":
        czero = self.czero if czero is None else czero
        return Series(
            self.var,
            {k: fn(c) for k, c in self.coeffs.items()},
            self.lo,
            self.hi,
            self.entire,
            czero,
        )

    # -- arithmetic ---------------------------------------------------------

    def _check_var(self, other):
        if self.var != other.var:
            raise ShapeError(f"series in {self.var!r} combined with series in {other.var!r}")

    def __add__(self, other):
        if not isinstance(other, Series):
            return NotImplemented
        self._check_var(other)
        lo = min(self.lo, other.lo)
        if self.entire and other.entire:
            hi, entire = max(self.hi, other.hi), True
        elif self.entire:
            hi, entire = other.hi, False
        elif other.entire:
            hi, entire = self.hi, False
        else:
            hi, entire = min(self.hi, other.hi), False
        terms = {k: c for k, c in self.coeffs.items() if k <= hi}
        for k, c in other.coeffs.items():
            if k > hi:
                continue
            s = terms.get(k)
            terms[k] = c if s is None else s + c
        return Series(self.var, terms, lo, hi, entire, self.czero)

    def __neg__(self):
        return Series(
            self.var,
            {k: -c for k, c in self.coeffs.items()},
            self.lo,
            self.hi,
            self.entire,
            self.czero,
        )

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, Series) and other.var == self.var:
            return self._mul_series(other)
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def _mul_series(self, other, hi_cap=None):
        if (self.entire and not self.coeffs) or (other.entire and not other.coeffs):
            return Series.zero(self.var, self.czero)
        lo = self.lo + other.lo
        caps = [self.hi + other.hi]
        if not self.entire:
            caps.append(self.hi + other.lo)
        if not other.entire:
            caps.append(other.hi + self.lo)
        hi = min(caps)
        entire = self.entire and other.entire
        if hi_cap is not None and hi_cap < hi:
            hi = hi_cap
            entire = False
        if hi < lo:
            raise TruncationError("all precision lost in series product")
        terms = {}
        for k1, c1 in self.coeffs.items():
            for k2, c2 in other.coeffs.items():
                k = k1 + k2
                if k > hi:
                    continue
                c = c1 * c2
                s = terms.get(k)
                terms[k] = c if s is None else s + c
        return Series(self.var, terms, lo, hi, entire, self.czero)

    def mul(self, other, hi_cap=None):
        """Product with an optional extra knowledge cap (saves work)."""
        return self._mul_series(other, hi_cap=hi_cap)

    def scale(self, c):
        """Multiply by a scalar from the coefficient domain (or a rational)."""
        if is_rat(c):
            if c == 0:
                return Series.zero(self.var, self.czero)
            return Series(
                self.var,
                {k: x * c if is_rat(x) else x.scale(c) for k, x in self.coeffs.items()},
                self.lo,
                self.hi,
                self.entire,
                self.czero,
            )
        return Series(
            self.var,
            {k: x * c for k, x in self.coeffs.items()},
            self.lo,
            self.hi,
            self.entire,
            self.czero,
        )

    def __pow__(self, n: int):
        if n < 0:
            return self.invert() ** (-n)
        if n == 0:
            return _one_like(self)
        out = None
        base = self
        while n:
            if n & 1:
                out = base if out is None else out * base
            n >>= 1
            if n:
                base = base * base
        return out

    def invert(self, hi=None) -> "Series":
        """Reciprocal; needs an invertible lowest coefficient.

        Newton iteration z <- z + z(1 - uz) with doubling precision.  For
        a non-entire input the precision cannot exceed the input's window
        width; entire inputs may request any hi.
        """
        nu = self.support_min()
        if nu is None:
            raise NotInvertible("cannot invert the zero series")
        cinv = _invert_coeff(self.coeffs[nu])
        width_known = self.hi - nu
        if self.entire:
            width = width_known if hi is None else hi + nu
        else:
            width = width_known if hi is None else min(hi + nu, width_known)
        hi_out = -nu + width
        one = _one_like(self)
        u = (self.shift(-nu).scale(cinv)).tighten()  # constant term 1
        z = one
        if not (u - one).is_zero():
            m = 0  # invariant: u*z = 1 + O(t^{m+1})
            while m < width:
                m = min(2 * m + 1, width)
                e = one - u.mul(z, hi_cap=m)
                if not e.is_zero():
                    z = z + z.mul(e, hi_cap=m)
                    # z is a definite polynomial at every step; re-wrapping it
                    # as entire keeps the window caps from stalling the doubling
                    z = Series.from_terms(self.var, z.coeffs, self.czero)
        entire = self.entire and len(self.coeffs) == 1  # exact only for monomials
        terms = {k: v for k, v in z.scale(cinv).shift(-nu).coeffs.items() if k <= hi_out}
        return Series(self.var, terms, -nu, hi_out, entire, self.czero)

    # -- composition, reversion, division -----------------------------------

    def compose(self, g: "Series", hi_cap=None) -> "Series":
        """f(g(.)); g must have strictly positive valuation.

        Negative exponents of f use the reciprocal of g, which requires an
        invertible lowest coefficient of g.  The result lives in g's
        variable.  hi_cap bounds the requested output exponent so that
        powers of g beyond it are never formed.
        """
        gmin = g.support_min()
        if gmin is not None and gmin <= 0:
            raise ShapeError("composition needs a substitute with positive valuation")
        if gmin is None and not (g.entire or g.lo >= 1):
            raise ShapeError("substitute is zero on its window but not known beyond it")
        val = gmin if gmin is not None else 1
        out = None
        # positive exponents, in increasing order, building powers incrementally
        prev_k, prev_pw = 1, g
        for k, c in sorted(self.coeffs.items()):
            if k <= 0:
                continue
            if hi_cap is not None and k * val > hi_cap:
                break
            pw = g if k == 1 else prev_pw * (g ** (k - prev_k))
            if hi_cap is not None:
                pw = pw.truncate_hi(min(pw.hi, hi_cap))
            prev_k, prev_pw = k, pw
            term = pw.scale(c)
            out = term if out is None else out + term
        # zero and negative exponents
        neg = [(k, c) for k, c in self.coeffs.items() if k <= 0]
        if neg:
            ginv = g.invert() if any(k < 0 for k, _ in neg) else None
            for k, c in sorted(neg):
                if k == 0:
                    term = Series.constant(g.var, c, g.czero)
                else:
                    term = (ginv ** (-k)).scale(c)
                out = term if out is None else out + term
        if out is None:
            out = Series.zero(g.var, g.czero)
        if not self.entire:
            # f's unknown tail contributes from exponent (f.hi + 1) * val on
            out = out.truncate_hi(min(out.hi, (self.hi + 1) * val - 1))
        if hi_cap is not None:
            out = out.truncate_hi(min(out.hi, hi_cap))
        return out

    def reversion(self, order=None) -> "Series":
        """Compositional inverse g with f(g) = g(f) = identity on the window.

        Lagrange inversion: n * [y^n] g = [x^{n-1}] (x/f(x))^n.  The linear
        coefficient of f must be invertible (a unit rational, or a unit
        Laurent coefficient in the twisted settings).
        """
        if self.support_min() is None or self.support_min() < 1:
            raise NotInvertible("reversion needs valuation exactly 1")
        if order is None:
            order = self.hi
        h = self.shift(-1).invert(hi=order - 1)  # x / f(x), a valuation-0 series
        out_terms = {}
        hn = _one_like(self)
        for n in range(1, order + 1):
            hn = hn.mul(h, hi_cap=order)
            cn = hn.coefficient(n - 1)
            out_terms[n] = cn / n if is_rat(cn) else cn.scale(Rat(1, n))
        return Series(self.var, out_terms, 1, order, False, self.czero)

    def __str__(self):
        return series_str(self)

    def __repr__(self):
        flag = "entire" if self.entire else f"window [{self.lo}, {self.hi}]"
        return f"<series in {self.var}: {series_str(self)} ({flag})>"

    def __eq__(self, other):
        if not isinstance(other, Series):
            return NotImplemented
        return (
            self.var == other.var
            and self.coeffs == other.coeffs
            and self.lo == other.lo
            and self.hi == other.hi
            and self.entire == other.entire
        )

    __hash__ = None


def _one_like(s: Series) -> Series:
    return Series.from_terms(s.var, {0: _domain_one(s.czero)}, s.czero)


def series_mul(f: Series, g: Series) -> Series:
    """Product of two series in the same variable over the same ring."""
    if not isinstance(g, Series) or f.var != g.var:
        raise ShapeError("series_mul needs two series in the same variable")
    return f * g


def compose(f: Series, g: Series) -> Series:
    return f.compose(g)


def reversion(f: Series, order=None) -> Series:
    return f.reversion(order)


def divide_nonpositive(N: Series, P: Series, integral_ring: RingSpec = None) -> Series:
    """Solve (P * Phi)|_{<=0} = N|_{<=0} for Phi supported in exponents <= 0.

    P must be a power series whose constant coefficient is a nonzero
    rational constant (in practice p, the constant term of the p-series).
    Coefficients are computed over Q by forward substitution from the
    lowest exponent of N upward, then checked against the target
    coefficient domain when `integral_ring` is given; failures raise
    IntegralityViolation carrying the offending exponent and coefficient.
    """
    if N.coeffs and max(N.coeffs) > 0:
        raise ShapeError("numerator must be supported in exponents <= 0")
    if P.support_min() is not None and P.support_min() < 0:
        raise ShapeError("divisor must be a power series")
    a0 = P.coefficient(0)
    if is_rat(a0):
        raise ShapeError("divisor coefficients must be polynomials")
    if len(a0.terms) != 1 or a0.constant_term() == 0:
        raise NotInvertible("divisor constant term must be a nonzero rational constant")
    a0c = a0.constant_term()
    if N.is_zero() and N.entire:
        return Series.zero(N.var, N.czero)
    lo = min(N.coeffs) if N.coeffs else N.lo
    hi = N.hi if (not N.entire and N.hi < 0) else 0
    if not P.entire:
        hi = min(hi, P.hi + lo)
    if hi < lo:
        raise TruncationError("divisor window too small for the requested quotient")
    qring = N.czero.ring.rationalized()
    pq = {j: c.cast(qring) for j, c in P.coeffs.items() if j != 0}
    inv_a0 = 1 / a0c
    phi = {}
    for k in range(lo, hi + 1):
        acc = N.coefficient(k).cast(qring)
        for j, pj in pq.items():
            prev = phi.get(k - j)
            if prev is not None:
                acc = acc - prev * pj
        phi[k] = acc.scale(inv_a0)
    czero = GradedPolynomial.zero(qring)
    if integral_ring is not None:
        checked = {}
        for k, c in phi.items():
            try:
                checked[k] = c.cast(integral_ring)
            except IntegralityViolation as exc:
                raise IntegralityViolation(
                    f"quotient coefficient at {N.var}^{k} not in "
                    f"{integral_ring.domain} domain: {c}",
                    exponent=k,
                    coefficient=exc.coefficient,
                ) from None
        phi = checked
        czero = GradedPolynomial.zero(integral_ring)
    return Series(N.var, phi, lo, max(hi, lo), hi == 0, czero)


def series_homogeneous_degree(f: Series, var_weight: int = 1):
    """Common total degree of all terms (deg var = var_weight), else None."""
    degs = set()
    for k, c in f.coeffs.items():
        if is_rat(c):
            d = 0
        elif isinstance(c, GradedPolynomial):
            d = c.homogeneous_degree()
        else:
            d = series_homogeneous_degree(c, var_weight)
        if d is None:
            return None
        degs.add(d + k * var_weight)
    if len(degs) > 1:
        return None
    return degs.pop() if degs else None


def series_homogeneous_of(f: Series, d: int, var_weight: int = 1) -> bool:
    if f.is_zero():
        return True
    return series_homogeneous_degree(f, var_weight) == d


def series_agree(f: Series, g: Series, lo: int, hi: int) -> bool:
    """Exact coefficientwise agreement on [lo, hi] (raises if unknowable)."""
    for k in range(lo, hi + 1):
        a, b = f.coefficient(k), g.coefficient(k)
        if is_rat(a) != is_rat(b):
            return False
        if is_rat(a):
            if a != b:
                return False
        elif isinstance(a, GradedPolynomial):
            if not (a - b).is_zero():
                return False
        elif a != b:
            return False
    return True


def series_str(f: Series) -> str:
    """`{coeff}*var^k` terms, exponents ascending, with an O(...) tail."""
    parts = []
    for k, c in f.items():
        cs = rat_str(c) if is_rat(c) else str(c)
        if ("+" in cs[1:]) or ("-" in cs[1:]) or " " in cs:
            cs = f"({cs})"
        if k == 0:
            parts.append(cs)
        else:
            power = f.var if k == 1 else f"{f.var}^{k}"
            parts.append(power if cs == "1" else f"{cs}*{power}")
    body = " + ".join(parts) if parts else "0"
    if f.entire:
        return body
    return f"{body} + O({f.var}^{f.hi + 1})"


def series_to_json(f: Series) -> dict:
    return {
        "variable": f.var,
        "window": [f.lo, f.hi],
        "exact": not f.truncation_touched,
        "terms": {str(k): str(c) for k, c in f.items()},
    }
