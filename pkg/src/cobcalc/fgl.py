"""Formal group laws as first-class values.

An FGL is held by its truncation order N, its coefficient RingSpec, and
its logarithm (a series over the rationalized ring, normalized to
log(x) = x + ...).  The bivariate series F(x, y) = exp(log x + log y) is
materialized lazily as a TruncMPoly and integrality-checked against the
ring's coefficient domain; a failure there means the constructing
recursion is wrong, so it raises.

Variable conventions: logarithms and exponentials live in the variable
"x"; n-series, strict isomorphisms and operation values live in "t";
both have degree +1.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

from .errors import NotInvertible, ShapeError, TruncationError, Unsupported
from .rat import ONE, Rat, is_rat
from .rings import (
    INT,
    P_LOCAL,
    RATIONAL,
    DEFAULT_CODEGREE,
    GradedPolynomial,
    RingSpec,
    b_model_ring,
    bp_gens_for,
    bp_ring,
    ck1_ring,
    scalar_ring,
)
from .series import Series, series_homogeneous_of
from .mseries import TruncMPoly, eval_fgl_at, eval_series_at


def _is_one(c) -> bool:
    if is_rat(c):
        return c == 1
    if isinstance(c, GradedPolynomial):
        return c.is_one()
    return (not c.is_zero()) and set(c.coeffs) == {0} and _is_one(c.coeffs[0])


@dataclass(frozen=True)
class StrictIso:
    """A strict isomorphism gamma(t) = t + c2 t^2 + ... between FGLs."""

    gamma: Series

    def __post_init__(self):
        g = self.gamma
        if g.support_min() is None or g.support_min() < 1 or not _is_one(g.coefficient(1)):
            raise ShapeError("a strict isomorphism must start with the identity coefficient")

    def is_identity(self) -> bool:
        return all(k == 1 for k in self.gamma.coeffs)


class FormalGroupLaw:
    __slots__ = ("ring", "N", "log", "name", "_exp", "_F")

    def __init__(self, ring: RingSpec, N: int, log: Series, exp: Series = None, name: str = ""):
        if log.support_min() != 1 or not _is_one(log.coefficient(1)):
            raise ShapeError("logarithm must be x + higher terms")
        if ring.gens and isinstance(log.czero, GradedPolynomial):
            if not series_homogeneous_of(log, 1):
                raise ShapeError("logarithm is not homogeneous of degree 1")
        self.ring = ring
        self.N = N
        self.log = log
        self.name = name
        self._exp = exp
        self._F = None

    # -- derived series ---------------------------------------------------

    def exponential(self, order: int = None) -> Series:
        """Compositional inverse of the logarithm, to the requested order."""
        order = self.N if order is None else order
        if self._exp is not None and (self._exp.entire or self._exp.hi >= order):
            return self._exp
        if order > self.log.hi and not self.log.entire:
            raise TruncationError(
                f"exponential to order {order} needs the logarithm beyond {self.log.hi}"
            )
        exp = self.log.reversion(order)
        self._exp = exp
        return exp

    def F_poly(self) -> TruncMPoly:
        """The bivariate series F(x, y) up to total degree N, over self.ring."""
        if self._F is not None:
            return self._F
        if not isinstance(self.log.czero, GradedPolynomial):
            raise Unsupported("bivariate expansion over series-valued coefficients")
        ringq = self.ring.rationalized()
        X = TruncMPoly.variable(("x", "y"), self.N, ringq, "x")
        Y = TruncMPoly.variable(("x", "y"), self.N, ringq, "y")
        s = eval_series_at(self.log, X, ringq) + eval_series_at(self.log, Y, ringq)
        Fq = eval_series_at(self.exponential(self.N), s, ringq)
        self._F = Fq.map_coeffs(lambda c: c.cast(self.ring), self.ring)
        return self._F

    def coefficient(self, i: int, j: int) -> GradedPolynomial:
        """a_ij, the coefficient of x^i y^j in F."""
        if i + j > self.N:
            raise TruncationError(f"coefficient ({i},{j}) beyond truncation order {self.N}")
        return self.F_poly().coefficient((i, j))

    @property
    def prime(self):
        return self.ring.prime

    def is_p_typical(self, p: int) -> bool:
        ks = set(self.log.coeffs)
        allowed = set()
        q = 1
        while q <= max(ks, default=1):
            allowed.add(q)
            q *= p
        return ks <= allowed

    # -- validation --------------------------------------------------------

    def validate(self, associativity: bool = False):
        """Check the FGL axioms within truncation; raises ShapeError on failure.

        Unit, symmetry, coefficient homogeneity and the exp/log round trip
        are always checked; the trivariate associativity expansion is
        opt-in since it dominates the cost at large N.
        """
        F = self.F_poly()
        for (i, j), c in F.terms.items():
            if j == 0 and not (i == 1 and c.is_one()):
                raise ShapeError(f"unit axiom fails at x^{i}")
            if i == 0 and not (j == 1 and c.is_one()):
                raise ShapeError(f"unit axiom fails at y^{j}")
            if F.coefficient((j, i)) != c:
                raise ShapeError(f"symmetry fails at ({i},{j})")
            if self.ring.gens and not c.homogeneous_of(1 - i - j):
                raise ShapeError(f"coefficient ({i},{j}) not homogeneous of degree {1 - i - j}")
        order = min(self.N, self.log.hi)
        ringq = self.ring.rationalized()
        roundtrip = self.exponential(order).compose(self.log.truncate_hi(order))
        for k in range(1, order + 1):
            want = GradedPolynomial.one(ringq) if k == 1 else GradedPolynomial.zero(ringq)
            if roundtrip.coefficient(k) != want:
                raise ShapeError(f"exp(log(x)) differs from x at order {k}")
        if associativity and not self.check_associativity():
            raise ShapeError("associativity fails within truncation")
        return self

    def check_associativity(self) -> bool:
        """F(F(x,y),z) == F(x,F(y,z)) as truncated trivariate series."""
        F = self.F_poly()
        vars3 = ("x", "y", "z")
        ring = self.ring
        X = TruncMPoly.variable(vars3, self.N, ring, "x")
        Y = TruncMPoly.variable(vars3, self.N, ring, "y")
        Z = TruncMPoly.variable(vars3, self.N, ring, "z")
        XY = eval_fgl_at(F.terms, X, Y)
        YZ = eval_fgl_at(F.terms, Y, Z)
        return eval_fgl_at(F.terms, XY, Z) == eval_fgl_at(F.terms, X, YZ)

    def __repr__(self):
        label = self.name or self.ring.label
        return f"<FGL {label} (order {self.N})>"


# -- built-in formal group laws -----------------------------------------


def universal_fgl(num_b_gens: int, N: int, codegree: int = None) -> FormalGroupLaw:
    """The universal FGL in the Hurewicz b-model over Z[b_1..b_G].

    F = B(B^{-1}(x) + B^{-1}(y)) with B(t) = t + sum_i b_i t^{i+1}; the
    logarithm is B^{-1} and every F-coefficient is an integer polynomial.
    With fewer than N-1 generators the result is the specialization of the
    order-N universal law with the higher b_i set to zero.
    """
    if num_b_gens < 1 or N < 1:
        raise ShapeError("universal FGL needs at least one b-generator and order >= 1")
    codegree = codegree if codegree is not None else max(DEFAULT_CODEGREE, N)
    ring = b_model_ring(num_b_gens, codegree)
    ringq = ring.rationalized()
    terms = {1: GradedPolynomial.one(ringq)}
    for i in range(1, num_b_gens + 1):
        terms[i + 1] = GradedPolynomial.gen(ringq, f"b{i}")
    B = Series.from_terms("x", terms, GradedPolynomial.zero(ringq))
    log = B.reversion(max(N, num_b_gens + 1))
    return FormalGroupLaw(ring, N, log, exp=B, name="universal")


def bp_log(ring: RingSpec) -> Series:
    """Logarithm of the p-typical FGL over a BP-type ring.

    l_0 = 1 and p * l_n = sum_{i=0}^{n-1} l_i * v_{n-i}^{p^i}.
    """
    p = ring.prime
    ringq = ring.rationalized()
    num_v = sum(1 for n, _ in ring.gens if n.startswith("v"))
    ls = [GradedPolynomial.one(ringq)]
    for n in range(1, num_v + 1):
        acc = GradedPolynomial.zero(ringq)
        for i in range(n):
            acc = acc + ls[i] * GradedPolynomial.gen(ringq, f"v{n - i}") ** (p**i)
        ls.append(acc.scale(Rat(1, p)))
    terms = {p**n: ls[n] for n in range(num_v + 1)}
    # Exact within the codegree quotient: coefficients off the p-powers are
    # truly zero, and the l_n beyond the generator list have degree below
    # the bound, so the series is entire as a quotient-ring value.
    return Series.from_terms("x", terms, GradedPolynomial.zero(ringq))


def bp_fgl(p: int, N: int = None, codegree: int = None) -> FormalGroupLaw:
    """The universal p-typical FGL over Z_(p)[v_1, v_2, ...]."""
    codegree = codegree if codegree is not None else max(DEFAULT_CODEGREE, N or 0)
    N = N if N is not None else min(codegree + 1, 2 * p * p)
    ring = bp_ring(p, bp_gens_for(p, codegree), codegree)
    return FormalGroupLaw(ring, N, bp_log(ring), name="bp")


def additive_fgl(N: int, ring: RingSpec = None) -> FormalGroupLaw:
    ring = ring or scalar_ring(INT)
    ringq = ring.rationalized()
    log = Series.variable("x", ringq)
    return FormalGroupLaw(ring, N, log, exp=Series.variable("x", ringq), name="additive")


def multiplicative_fgl(N: int, graded: bool = False, codegree: int = None) -> FormalGroupLaw:
    """x + y - xy (log = sum x^i / i); graded variant x + y + beta*x*y."""
    if graded:
        from .rings import custom_ring

        codegree = codegree if codegree is not None else max(DEFAULT_CODEGREE, N)
        ring = custom_ring((("beta", -1),), INT, codegree=codegree)
        ringq = ring.rationalized()
        beta = GradedPolynomial.gen(ringq, "beta")
        terms = {
            i: beta ** (i - 1) * Rat((-1) ** (i - 1), i) if i > 1 else GradedPolynomial.one(ringq)
            for i in range(1, N + 1)
        }
        log = Series("x", terms, 1, N, False, GradedPolynomial.zero(ringq))
        return FormalGroupLaw(ring, N, log, name="multiplicative-graded")
    ring = scalar_ring(INT)
    ringq = ring.rationalized()
    terms = {i: GradedPolynomial.const(ringq, Rat(1, i)) for i in range(1, N + 1)}
    log = Series("x", terms, 1, N, False, GradedPolynomial.zero(ringq))
    return FormalGroupLaw(ring, N, log, name="multiplicative")


def ck1_fgl(p: int, N: int, codegree: int = None) -> FormalGroupLaw:
    """First connective Morava K-theory FGL over Z_(p)[v1], deg v1 = 1-p.

    log(x) = sum_i v1^{(p^i - 1)/(p - 1)} x^{p^i} / p^i; all F-coefficients
    are checked to lie in Z_(p)[v1].
    """
    codegree = codegree if codegree is not None else max(DEFAULT_CODEGREE, N, p * p)
    ring = ck1_ring(p, codegree)
    ringq = ring.rationalized()
    v1 = GradedPolynomial.gen(ringq, "v1")
    terms = {1: GradedPolynomial.one(ringq)}
    i = 1
    while p**i - 1 <= codegree:
        terms[p**i] = (v1 ** ((p**i - 1) // (p - 1))).scale(Rat(1, p**i))
        i += 1
    # entire as a codegree-quotient value, like the BP logarithm
    log = Series.from_terms("x", terms, GradedPolynomial.zero(ringq))
    return FormalGroupLaw(ring, N, log, name="ck1")


def artin_hasse(p: int, N: int) -> Series:
    """exp(sum_{i>=0} x^{p^i} / p^i) to order N; coefficients checked p-integral."""
    ring = scalar_ring(RATIONAL)
    czero = GradedPolynomial.zero(ring)
    terms = {}
    q = 1
    i = 0
    while q <= N:
        terms[q] = GradedPolynomial.const(ring, Rat(1, q))
        q *= p
        i += 1
    s = Series("x", terms, 1, max(N, q - 1), False, czero)
    one = GradedPolynomial.one(ring)
    acc = Series.from_terms("x", {0: one}, czero)
    term = acc
    for m in range(1, N + 1):
        term = term.mul(s, hi_cap=N).scale(Rat(1, m))
        if term.is_zero():
            break
        acc = acc + term
    target = scalar_ring(P_LOCAL, p)
    out = acc.map_coeffs(lambda c: c.cast(target), GradedPolynomial.zero(target))
    return Series("x", out.coeffs, 0, N, False, GradedPolynomial.zero(target))


# -- operations on formal group laws --------------------------------------


def n_series(F: FormalGroupLaw, n: int, hi: int = None) -> Series:
    """[n](t), the n-fold formal sum of t, computed as exp(n * log t)."""
    hi = F.N if hi is None else hi
    czero = F.log.czero
    if n == 0:
        return Series.zero("t", czero)
    tvar = Series.variable("t", czero.ring) if isinstance(czero, GradedPolynomial) else None
    log_t = F.log.compose(tvar).truncate_hi(hi) if tvar is not None else None
    if log_t is None:
        raise Unsupported("n-series over series-valued coefficients")
    inner = log_t.scale(Rat(n))
    out = F.exponential(hi).compose(inner)
    if F.ring.domain != RATIONAL:
        out = out.map_coeffs(lambda c: c.cast(F.ring), GradedPolynomial.zero(F.ring))
    return out


def bracket_p(F: FormalGroupLaw, hi: int = None) -> Series:
    """[p](t) / t, the p-series with its leading t divided out."""
    p = F.prime
    if p is None:
        raise ShapeError("bracket_p needs a p-local coefficient ring")
    return n_series(F, p, None if hi is None else hi + 1).shift(-1)


def formal_sum(F: FormalGroupLaw, f: Series, g: Series) -> Series:
    """F(f, g) by bivariate substitution of same-variable series."""
    if f.var != g.var:
        raise ShapeError("formal_sum needs series in one common variable")
    for s in (f, g):
        if s.support_min() is not None and s.support_min() < 1:
            raise ShapeError("formal_sum substitutes need positive valuation")
    Fp = F.F_poly()
    ring = f.czero.ring
    vals = [v for v in (f.support_min(), g.support_min()) if v is not None]
    by_i: dict = {}
    for (i, j), c in Fp.terms.items():
        by_i.setdefault(i, {})[j] = c.cast(ring)
    czero = f.czero

    def horner(rows, base):
        acc = None
        prev = None
        for k in sorted(rows, reverse=True):
            if acc is not None and prev > k:
                acc = acc * (base ** (prev - k))
            acc = rows[k] if acc is None else acc + rows[k]
            prev = k
        if acc is None:
            return Series.zero(f.var, czero)
        if prev:
            acc = acc * (base**prev)
        return acc

    rows = {
        i: horner({j: Series.from_terms(f.var, {0: c}, czero) for j, c in cols.items()}, g)
        for i, cols in by_i.items()
    }
    out = horner(rows, f)
    if vals:
        out = out.truncate_hi(min(out.hi, (F.N + 1) * min(vals) - 1))
    return out


def twist(F: FormalGroupLaw, gamma, N: int = None, ring: RingSpec = None) -> FormalGroupLaw:
    """The image FGL gamma(F(gamma^{-1} x, gamma^{-1} y)).

    Its logarithm is log_F o gamma^{-1}, renormalized to leading
    coefficient 1 when gamma is invertible-but-not-strict (a unit Laurent
    linear coefficient, as for the Steenrod-type twist).
    """
    g = gamma.gamma if isinstance(gamma, StrictIso) else gamma
    g = g.rename("x")
    N = N if N is not None else F.N
    ginv = g.reversion(min(N, g.hi) if not g.entire else N)
    log_new = F.log.compose(ginv)
    lead = log_new.coefficient(1)
    if not _is_one(lead):
        if is_rat(lead):
            raise NotInvertible("twisted logarithm has non-invertible leading coefficient")
        log_new = log_new.scale(lead.invert())
    out_ring = ring
    if out_ring is None:
        cz = g.czero
        while isinstance(cz, Series):
            cz = cz.czero
        out_ring = cz.ring if cz.ring.domain != RATIONAL else F.ring
    return FormalGroupLaw(out_ring, N, log_new, name=f"{F.name or F.ring.label}-twist")


def p_typify(F: FormalGroupLaw, p: int = None, with_iso: bool = True):
    """Cartier p-typification: keep the x^{p^k} coefficients of the log.

    Returns (p-typical FGL, strict isomorphism gamma = exp_typ o log_F).
    Idempotent: a p-typical input comes back unchanged with gamma = t.
    """
    p = p if p is not None else F.prime
    if p is None:
        raise ShapeError("p_typify needs a prime")
    if F.ring.domain == P_LOCAL and F.ring.prime != p:
        raise Unsupported(f"ring is {F.ring.prime}-local, cannot {p}-typify")
    czero = F.log.czero
    if F.is_p_typical(p):
        iso = StrictIso(Series.variable("t", czero.ring)) if isinstance(
            czero, GradedPolynomial
        ) else StrictIso(_nested_identity(czero))
        return F, iso
    terms = {}
    q = 1
    while q <= F.log.hi:
        c = F.log.coefficient(q)
        if not (c == 0 if is_rat(c) else c.is_zero()):
            terms[q] = c
        q *= p
    log_typ = Series("x", terms, 1, F.log.hi, F.log.entire, czero)
    ring_typ = _p_localized(F.ring, p)
    F_typ = FormalGroupLaw(ring_typ, F.N, log_typ, name=f"{F.name or 'fgl'}-ptypical")
    if not with_iso:
        return F_typ, None
    order = min(F.N, F.log.hi)
    gamma = F_typ.exponential(order).compose(F.log.truncate_hi(order)).rename("t")
    if ring_typ.domain != RATIONAL and isinstance(czero, GradedPolynomial):
        gamma = gamma.map_coeffs(
            lambda c: c.cast(ring_typ), GradedPolynomial.zero(ring_typ)
        )
    return F_typ, StrictIso(gamma)


def _nested_identity(czero: Series) -> Series:
    from .series import _domain_one

    one = _domain_one(czero)
    return Series.from_terms("t", {1: one}, czero)


def _p_localized(ring: RingSpec, p: int) -> RingSpec:
    if ring.domain == INT:
        return RingSpec(ring.label, p, ring.gens, P_LOCAL, ring.codegree_bound)
    return ring


def hazewinkel_images(log: Series, p: int) -> dict:
    """Images of the v_n under the classifying map of a p-typical log.

    Solves v_n = p*l_n - sum_{i=1}^{n-1} l_i * v_{n-i}^{p^i} recursively.
    The log must be normalized (leading coefficient 1) and supported on
    p-power exponents; anything else is a malformed input.
    """
    if log.support_min() != 1 or not _is_one(log.coefficient(1)):
        raise ShapeError("log must start with coefficient 1 at x^1")
    allowed = set()
    q = 1
    top = max(log.coeffs)
    while q <= top:
        allowed.add(q)
        q *= p
    if set(log.coeffs) - allowed:
        raise ShapeError("log has terms off the p-power exponents")
    n_max = 0
    q = p
    limit = top if log.entire else log.hi
    while q <= limit:
        n_max += 1
        q *= p
    images = {}
    for n in range(1, n_max + 1):
        ln = log.coefficient(p**n)
        acc = ln.scale(Rat(p)) if not is_rat(ln) else ln * p
        for i in range(1, n):
            li = log.coefficient(p**i)
            sub = li * images[n - i] ** (p**i) if is_rat(li) else images[n - i] ** (p**i) * li
            acc = acc - sub
        images[n] = acc
    return images


def translate(F: FormalGroupLaw, c: Series, x_order: int) -> Series:
    """x +_F c for a scalar series c with positive valuation.

    Returns a series in x whose coefficients live in c's domain, computed
    through the logarithm: exp(log x + log c) expanded by the binomial
    Taylor identity exp(s0 + w) = sum_k (sum_m C(m,k) e_m s0^{m-k}) w^k.
    """
    if c.support_min() is None or c.support_min() < 1:
        raise ShapeError("translate needs a substitute with positive valuation")
    s0 = F.log.compose(c)
    H = s0.hi - s0.lo + 1  # usable power depth
    M = x_order + H
    E = F.exponential(M)
    one_t = Series.from_terms(c.var, {0: _domain_coeff_one(c)}, c.czero)
    pows = [one_t]
    for _ in range(H):
        if pows[-1].lo + s0.lo > H:
            break  # deeper powers start beyond the cap
        pows.append(pows[-1].mul(s0, hi_cap=H))
    T = []
    for k in range(x_order + 1):
        acc = None
        for r in range(0, len(pows)):
            m = k + r
            if m > M or m < 1:
                continue
            em = E.coefficient(m)
            if em.is_zero():
                continue
            term = pows[r].scale(em.scale(comb(m, k)))
            acc = term if acc is None else acc + term
        if acc is None:
            acc = Series.zero(c.var, c.czero)
        # powers of s0 beyond H are uncomputed, so the sum is only known
        # through t^H even when every summand is an entire value
        hcap = min(acc.hi, H)
        T.append(
            Series(
                acc.var,
                {kk: v for kk, v in acc.coeffs.items() if kk <= hcap},
                min(acc.lo, hcap),
                hcap,
                False,
                acc.czero,
            )
        )
    w = F.log.truncate_hi(x_order)
    out: dict = {}
    wk = None
    czero_t = T[0].scale(0) if T else Series.zero(c.var, c.czero)
    for k in range(x_order + 1):
        if k == 0:
            coeffs = {0: GradedPolynomial.one(F.log.czero.ring)}
        elif k == 1:
            wk = w
            coeffs = wk.coeffs
        else:
            wk = wk.mul(w, hi_cap=x_order)
            coeffs = wk.coeffs
        for i, poly in coeffs.items():
            if i > x_order:
                continue
            contrib = T[k].scale(poly)
            prev = out.get(i)
            out[i] = contrib if prev is None else prev + contrib
    return Series("x", out, 0, x_order, False, czero_t)


def _domain_coeff_one(c: Series):
    from .series import _domain_one

    return _domain_one(c.czero)


BUILTIN_FGLS = ("universal", "bp", "additive", "multiplicative", "ck1")


def builtin_fgl(name: str, p: int = None, N: int = 6, codegree: int = None) -> FormalGroupLaw:
    """CLI-facing constructor for the named built-in formal group laws."""
    if name == "universal":
        return universal_fgl(max(N - 1, 1), N, codegree)
    if name == "bp":
        if p is None:
            raise ShapeError("bp needs a prime")
        return bp_fgl(p, N, codegree)
    if name == "additive":
        return additive_fgl(N)
    if name == "multiplicative":
        return multiplicative_fgl(N)
    if name == "ck1":
        if p is None:
            raise ShapeError("ck1 needs a prime")
        return ck1_fgl(p, N, codegree)
    raise ShapeError(f"unknown formal group law {name!r}")
