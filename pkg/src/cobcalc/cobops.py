"""Cobordism-style operations on BP coefficients, and their verifiers.

The total coaction S and the Steenrod-type operation St are modelled on
coefficients by the same route: twist the p-typical FGL by the defining
series (t + sum b_i t^{i+1}, respectively x prod_j (x +_F [j] t)),
p-typify the twisted law, and read off the images of the v_n from its
logarithm.  Both are ring maps on the point, so any polynomial input is
evaluated monomial by monomial on the cached images.

The symmetric operation Phi is recovered from the defining division
lambda^p - St(lambda) = [p] * Phi(lambda) on nonpositive t-exponents,
with every coefficient checked p-integral.

Representatives of the nonzero residues mod p are fixed as {1, ..., p-1},
so their product (p-1)! is a p-local unit and all values land in BP
without localization.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import factorial

from .errors import PreconditionError, ShapeError, TruncationError
from .rat import Rat
from .rings import (
    GradedPolynomial,
    RingSpec,
    bp_gens_for,
    coaction_ring,
    custom_ring,
    poly_parse,
)
from .ideals import (
    MonomialIdeal,
    ideal_In,
    ideal_Jn,
    ideal_membership,
    ideal_str,
    reduce_mod_ideal,
)
from .series import Series, divide_nonpositive, series_homogeneous_of, series_str
from .fgl import FormalGroupLaw, bp_log, hazewinkel_images, n_series, p_typify, translate, twist


# -- windows -------------------------------------------------------------


def default_t_window(p: int, n: int):
    """Verification t-window for congruences at depth n: [-(p-1)(p^n-1)-p^2, p^2]."""
    return (-(p - 1) * (p**n - 1) - p * p, p * p)


def default_codegree(p: int, n: int) -> int:
    """Coefficient codegree for the depth-n grids: p^{n+1} + p."""
    return p ** (n + 1) + p


# -- check reports ---------------------------------------------------------


@dataclass
class CheckReport:
    """One verified congruence: lhs = rhs modulo the ideal, on a window."""

    claim_id: str
    params: dict
    lhs: str
    rhs: str
    modulus_ideal: str
    member: bool
    window: tuple
    exact: bool

    @property
    def passed(self) -> bool:
        return self.member

    def to_json(self) -> dict:
        return {
            "schema": 1,
            "claim_id": self.claim_id,
            "params": self.params,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "modulus_ideal": self.modulus_ideal,
            "member": self.member,
            "window": list(self.window),
            "exact": self.exact,
        }

    def __str__(self):
        verdict = "pass" if self.member else "FAIL"
        if self.member and not self.exact:
            verdict = "inconclusive"
        ps = ", ".join(f"{k}={v}" for k, v in self.params.items())
        return f"[{verdict}] {self.claim_id}({ps}) on t-window {list(self.window)}"


# -- operation values --------------------------------------------------------


@dataclass
class LNCoactionValue:
    """Value of the total coaction: a polynomial over BP tensor Z[b...]."""

    value: GradedPolynomial
    prime: int

    def counit(self) -> GradedPolynomial:
        """Set every b_i to zero (must recover the input)."""
        bnames = [n for n in self.value.ring.names if n.startswith("b")]
        groups = self.value.split_by(bnames)
        width = len(bnames)
        return groups.get((0,) * width, GradedPolynomial.zero(self.value.ring))


@dataclass
class SteenrodValue:
    """Value of the Steenrod-type operation: a Laurent series over BP."""

    value: Series
    prime: int


@dataclass
class PhiValue:
    """Value of the symmetric operation: supported in exponents <= 0, p-integral."""

    value: Series
    prime: int

    def slice(self, m: int) -> GradedPolynomial:
        if m > 0:
            raise ShapeError("symmetric-operation slices live in exponents <= 0")
        return self.value.coefficient(m)


# -- caches ------------------------------------------------------------------

_ST_CACHE: dict = {}
_LN_CACHE: dict = {}


def _bp_op_ring(p: int, n_max: int, codegree: int) -> RingSpec:
    from .rings import bp_ring

    return bp_ring(p, max(bp_gens_for(p, codegree), n_max), codegree)


def steenrod_gamma(F: FormalGroupLaw, x_order: int, t_hi: int) -> Series:
    """gamma_St(x) = x * prod_{j=1}^{p-1} (x +_F [j](t)).

    A series in x whose coefficients are Laurent-window series in t over
    the rationalized BP ring; homogeneous of total degree p.
    """
    p = F.prime
    ringq = F.ring.rationalized()
    czt = GradedPolynomial.zero(ringq)
    one_t = Series.from_terms("t", {0: GradedPolynomial.one(ringq)}, czt)
    gamma = Series.from_terms("x", {1: one_t}, Series.zero("t", czt))
    for j in range(1, p):
        cj = n_series(F, j, hi=t_hi)
        cj = cj.map_coeffs(lambda c: c.cast(ringq), czt)
        gamma = gamma * translate(F, cj, x_order)
    return gamma


def _compute_st_images(p: int, n_max: int, t_hi: int, codegree: int):
    """Images St(v_n) for n <= n_max, with t-windows reaching t^{t_hi}."""
    x_order = p**n_max
    ring = _bp_op_ring(p, n_max, codegree)
    F = FormalGroupLaw(ring, x_order + t_hi + 1, bp_log(ring), name="bp")
    gamma = steenrod_gamma(F, x_order, t_hi + p)
    twisted = twist(F, gamma, N=x_order, ring=ring)
    typical, _ = p_typify(twisted, p, with_iso=False)
    raw = hazewinkel_images(typical.log, p)
    czero = GradedPolynomial.zero(ring)
    images = {}
    for n, im in raw.items():
        im = im.map_coeffs(lambda c: c.cast(ring), czero)  # Vishik integrality
        d = p * (1 - p**n)
        if not series_homogeneous_of(im, d):
            raise ShapeError(f"St(v{n}) image not homogeneous of degree {d}")
        images[n] = im.tighten()
    return ring, images


def steenrod_images(p: int, n_max: int, t_hi: int, codegree: int = None):
    """Cached (ring, {n: St(v_n)}) with at least the requested windows."""
    codegree = codegree if codegree is not None else default_codegree(p, n_max)
    cur = _ST_CACHE.get(p)
    if cur is None or cur[0] < n_max or cur[1] < t_hi or cur[2] < codegree:
        want = (
            max(n_max, cur[0] if cur else 0),
            max(t_hi, cur[1] if cur else 0),
            max(codegree, cur[2] if cur else 0),
        )
        ring, images = _compute_st_images(p, *want)
        _ST_CACHE[p] = (*want, ring, images)
        cur = _ST_CACHE[p]
    return cur[3], cur[4]


def _ln_ring(p: int, n_max: int, codegree: int) -> RingSpec:
    num_b = p**n_max - 1
    return coaction_ring(p, max(bp_gens_for(p, codegree), n_max), num_b, codegree)


def _compute_ln_images(p: int, n_max: int, codegree: int):
    """Images S(v_n) of the total coaction, over BP tensor Z[b...]."""
    ring = _ln_ring(p, n_max, codegree)
    ringq = ring.rationalized()
    x_order = p**n_max
    terms = {1: GradedPolynomial.one(ringq)}
    num_b = p**n_max - 1
    for i in range(1, num_b + 1):
        terms[i + 1] = GradedPolynomial.gen(ringq, f"b{i}")
    gamma = Series("x", terms, 1, num_b + 1, False, GradedPolynomial.zero(ringq))
    F = FormalGroupLaw(ring, x_order, bp_log(ring), name="bp-coaction")
    twisted = twist(F, gamma, N=x_order, ring=ring)
    typical, _ = p_typify(twisted, p, with_iso=False)
    raw = hazewinkel_images(typical.log, p)
    bnames = [n for n in ring.names if n.startswith("b")]
    images = {}
    for n, im in raw.items():
        im = im.cast(ring)
        if not im.homogeneous_of(1 - p**n):
            raise ShapeError(f"S(v{n}) not homogeneous of degree {1 - p**n}")
        counit = im.split_by(bnames).get((0,) * len(bnames))
        if counit != GradedPolynomial.gen(ring, f"v{n}"):
            raise ShapeError(f"counit of S(v{n}) does not return v{n}")
        images[n] = im
    return ring, images


def ln_images(p: int, n_max: int, codegree: int = None):
    codegree = codegree if codegree is not None else default_codegree(p, n_max)
    cur = _LN_CACHE.get(p)
    if cur is None or cur[0] < n_max or cur[1] < codegree:
        want = (max(n_max, cur[0] if cur else 0), max(codegree, cur[1] if cur else 0))
        ring, images = _compute_ln_images(p, *want)
        _LN_CACHE[p] = (*want, ring, images)
        cur = _LN_CACHE[p]
    return cur[2], cur[3]


# -- inputs ------------------------------------------------------------------


def _as_bp_poly(p, lam, ring: RingSpec) -> GradedPolynomial:
    if isinstance(lam, str):
        return poly_parse(ring, lam)
    if isinstance(lam, GradedPolynomial):
        return lam.cast(ring)
    raise ShapeError("operation input must be a polynomial or its text form")


def _input_poly(p, lam) -> GradedPolynomial:
    """Read an operation input without committing to windows yet.

    Text inputs are parsed over a scratch ring with an effectively
    unbounded codegree; the value is cast into the working ring once the
    windows have been sized from it.
    """
    if isinstance(lam, GradedPolynomial):
        return lam
    if isinstance(lam, str):
        import re

        idx = [int(m) for m in re.findall(r"v(\d+)", lam)]
        from .rings import bp_ring

        scratch = bp_ring(p, max(idx, default=1), 10**9)
        return poly_parse(scratch, lam)
    raise ShapeError("operation input must be a polynomial or its text form")


def _max_v_index(f: GradedPolynomial) -> int:
    top = 0
    for exp in f.terms:
        for i, e in enumerate(exp):
            name = f.ring.names[i]
            if e and name.startswith("v"):
                top = max(top, int(name[1:]))
    return top


def _monomial_exponents(f: GradedPolynomial):
    if len(f.terms) != 1:
        raise ShapeError("expected a single monomial")
    return next(iter(f.terms.items()))


# -- the operations ------------------------------------------------------------


def ln_total_bp(p: int, lam, n_max: int = None, codegree: int = None) -> LNCoactionValue:
    """Total coaction value S(lambda) over BP tensor Z[b...].

    A ring map on monomials, extended additively; setting all b_i to zero
    returns lambda.
    """
    lam0 = _input_poly(p, lam)
    need = max(_max_v_index(lam0), n_max or 1)
    D = max(codegree or 0, default_codegree(p, need), -lam0.min_degree() + 1)
    ring0, images = ln_images(p, need, D)
    lam0 = lam0.cast(ring0)
    values = {f"v{n}": im for n, im in images.items()}
    for name in ring0.names:
        if name.startswith("b"):
            values[name] = GradedPolynomial.gen(ring0, name)
    out = lam0.subs(values, GradedPolynomial.one(ring0), lambda q: GradedPolynomial.const(ring0, q))
    val = LNCoactionValue(out, p)
    if val.counit() != lam0:
        raise ShapeError("coaction counit failed to recover the input")
    return val


def act_ln_on_class(p: int, lam, r: int, **kw) -> LNCoactionValue:
    """Action of the total coaction on a degree-r graded class: scalar S(lambda)."""
    if r <= 0:
        raise PreconditionError("graded classes live in positive filtration degree")
    return ln_total_bp(p, lam, **kw)


def _needed_image_hi(p, lam: GradedPolynomial, hi_target: int) -> int:
    """Image t-precision so that every monomial product reaches hi_target."""
    need = 0
    degs = lam.ring.degrees
    names = lam.ring.names
    for exp in lam.terms:
        d = sum(e * dg for e, dg in zip(exp, degs))
        for i, e in enumerate(exp):
            if e and names[i].startswith("v"):
                dv = degs[i]
                need = max(need, hi_target - p * d + p * dv)
    return max(need, hi_target, 1)


def steenrod_point(p: int, lam, hi: int = None, codegree: int = None) -> SteenrodValue:
    """St(lambda): Laurent series over BP, homogeneous of degree p*deg(lambda).

    Computed multiplicatively from cached images of the v_n; hi is the
    requested upper t-exponent of the result (default p^2).
    """
    hi = p * p if hi is None else hi
    lam0 = _input_poly(p, lam)
    n_need = max(_max_v_index(lam0), 1)
    d = lam0.min_degree()
    img_hi = _needed_image_hi(p, lam0, max(hi, 0))
    need_D = max(
        codegree if codegree is not None else 0,
        default_codegree(p, n_need),
        -p * d + max(hi, 0) + p,
    )
    ring, images = steenrod_images(p, n_need, img_hi, need_D)
    lam0 = lam0.cast(ring)
    czt = GradedPolynomial.zero(ring)
    one_t = Series.from_terms("t", {0: GradedPolynomial.one(ring)}, czt)
    values = {f"v{n}": im for n, im in images.items()}
    out = lam0.subs(
        values, one_t, lambda q: Series.from_terms("t", {0: GradedPolynomial.const(ring, q)}, czt)
    )
    if isinstance(out, GradedPolynomial):  # constant input
        out = Series.from_terms("t", {0: out}, czt)
    dh = lam0.homogeneous_degree()
    if dh is not None and not series_homogeneous_of(out, p * dh):
        raise ShapeError("St value failed the homogeneity check")
    return SteenrodValue(out, p)


def phi_total(p: int, lam, hi: int = None, codegree: int = None) -> PhiValue:
    """Phi(lambda) on nonpositive exponents, from the defining division.

    N := (lambda^p - St(lambda)) restricted to t-exponents <= 0 and
    P := [p](t)/t; the unique solution of N = P * Phi supported in
    exponents <= 0 is computed by forward substitution and checked
    p-integral (integrality is a theorem, so a failure signals either a
    window problem or a genuine inconsistency).
    """
    st = steenrod_point(p, lam, hi=max(hi if hi is not None else 0, 0), codegree=codegree)
    ring = st.value.czero.ring
    lam0 = _as_bp_poly(p, lam, ring)
    czt = GradedPolynomial.zero(ring)
    lam_p = Series.from_terms("t", {0: lam0**p}, czt)
    N = (lam_p - st.value).restrict(hi=0)
    if N.is_zero():
        return PhiValue(Series.zero("t", czt), p)
    lo = N.support_min()
    F = FormalGroupLaw(ring, -lo + 2, bp_log(ring), name="bp")
    P = n_series(F, p, hi=-lo + 1).shift(-1)
    phi = divide_nonpositive(N, P, integral_ring=ring)
    dh = lam0.homogeneous_degree()
    if dh is not None and not series_homogeneous_of(phi, p * dh):
        raise ShapeError("Phi value failed the homogeneity check")
    return PhiValue(phi, p)


def phi_slice(p: int, lam, m: int, codegree: int = None) -> GradedPolynomial:
    """The t^m coefficient of Phi(lambda), m <= 0."""
    if m > 0:
        raise ShapeError("symmetric-operation slices live in exponents <= 0")
    return phi_total(p, lam, codegree=codegree).slice(m)


def act_phi_on_class(p: int, lam, r: int, codegree: int = None) -> Series:
    """Coefficient series of Phi on a degree-r class: i^r t^{r(p-1)} Phi_{<= -r(p-1)}."""
    if r <= 0:
        raise PreconditionError("graded classes live in positive filtration degree")
    phi = phi_total(p, lam, codegree=codegree)
    shift = r * (p - 1)
    unit = Rat(factorial(p - 1)) ** r
    return phi.value.restrict(hi=-shift).shift(shift).scale(unit)


# -- b-model coaction and Hopf axioms -------------------------------------------


def _b_alphabet_ring(num_b: int, alphabets: int, codegree: int = None) -> RingSpec:
    """Z[b..] tensor Z[c..] (tensor Z[d..]): one negative-degree alphabet each."""
    gens = []
    for prefix in ("b", "c", "d")[:alphabets]:
        gens += [(f"{prefix}{i}", -i) for i in range(1, num_b + 1)]
    from .rings import INT

    return custom_ring(gens, INT, codegree=codegree or max(24, 3 * num_b))


def _psi_images(ring: RingSpec, num_b: int, src: str, dst: str) -> dict:
    """b_i -> coefficient of t^{i+1} in gamma_dst(B_src(t)), inside `ring`."""
    ringq = ring.rationalized()
    czero = GradedPolynomial.zero(ringq)
    one = GradedPolynomial.one(ringq)
    B = Series.from_terms(
        "t",
        {1: one, **{i + 1: GradedPolynomial.gen(ringq, f"{src}{i}") for i in range(1, num_b + 1)}},
        czero,
    )
    gamma = Series.from_terms(
        "t",
        {1: one, **{i + 1: GradedPolynomial.gen(ringq, f"{dst}{i}") for i in range(1, num_b + 1)}},
        czero,
    )
    comp = gamma.compose(B)
    out = {}
    for i in range(1, num_b + 1):
        try:
            out[f"{src}{i}"] = comp.coefficient(i + 1).cast(ring)
        except TruncationError:
            raise TruncationError(f"coaction window exhausted at b{i}") from None
    return out


def ln_coaction_b_model(f: GradedPolynomial, num_b: int = None) -> GradedPolynomial:
    """Coaction on the Hurewicz model: substitute each b_i by its image in
    Z[b] tensor Z[c], where the second alphabet c plays the primed role."""
    if num_b is None:
        num_b = len(f.ring.gens)
    ring2 = _b_alphabet_ring(num_b, 2, f.ring.codegree_bound)
    images = _psi_images(ring2, num_b, "b", "c")
    fb = f.cast(ring2)
    return fb.subs(images, GradedPolynomial.one(ring2), lambda q: GradedPolynomial.const(ring2, q))


def verify_hopf_axioms(num_b: int = 4) -> list:
    """Counit and coassociativity of the b-model coaction through b_{num_b}."""
    reports = []
    ring2 = _b_alphabet_ring(num_b, 2)
    ring3 = _b_alphabet_ring(num_b, 3)
    psi2 = _psi_images(ring2, num_b, "b", "c")
    cnames = [f"c{i}" for i in range(1, num_b + 1)]
    # counit: kill the c-alphabet
    for i in range(1, num_b + 1):
        img = psi2[f"b{i}"]
        counit = img.split_by(cnames).get((0,) * num_b, GradedPolynomial.zero(ring2))
        ok = counit == GradedPolynomial.gen(ring2, f"b{i}")
        reports.append(
            CheckReport(
                "hopf_counit",
                {"generator": f"b{i}"},
                str(counit),
                f"b{i}",
                "0",
                ok,
                (0, 0),
                True,
            )
        )
    # coassociativity: (id x Delta) psi == (psi x id) psi
    one3 = GradedPolynomial.one(ring3)
    embed3 = lambda q: GradedPolynomial.const(ring3, q)
    psi_bc = {k: v.cast(ring3) for k, v in _psi_images(ring3, num_b, "b", "c").items()}
    delta_cd = _psi_images(ring3, num_b, "c", "d")  # c_i -> coeff of gamma_d(gamma_c)
    keep_b = {f"b{i}": GradedPolynomial.gen(ring3, f"b{i}") for i in range(1, num_b + 1)}
    keep_d = {f"d{i}": GradedPolynomial.gen(ring3, f"d{i}") for i in range(1, num_b + 1)}
    shift_c_to_d = {f"c{i}": GradedPolynomial.gen(ring3, f"d{i}") for i in range(1, num_b + 1)}
    for i in range(1, num_b + 1):
        base = psi_bc[f"b{i}"]
        lhs = base.subs({**keep_b, **delta_cd, **keep_d}, one3, embed3)
        rhs = base.subs({**psi_bc, **shift_c_to_d, **keep_d}, one3, embed3)
        ok = lhs == rhs
        reports.append(
            CheckReport(
                "hopf_coassoc",
                {"generator": f"b{i}"},
                str(lhs),
                str(rhs),
                "0",
                ok,
                (0, 0),
                True,
            )
        )
    return reports


# -- congruence verifiers ---------------------------------------------------------


def _laurent_member(diff: Series, ideal: MonomialIdeal, lo: int, hi: int):
    """Membership of every t-coefficient of diff in the ideal, over [lo, hi].

    Returns (member, exact): exact records whether the whole requested
    window was actually computable from diff's window.
    """
    exact = diff.entire or hi <= diff.hi
    lo_eff = max(lo, diff.lo)
    hi_eff = min(hi, diff.hi) if not diff.entire else hi
    member = all(
        ideal_membership(diff.coefficient(k), ideal) for k in range(lo_eff, hi_eff + 1)
    )
    return member, exact


def _reduce_series_str(f: Series, ideal: MonomialIdeal, lo: int, hi: int) -> str:
    terms = {}
    for k in range(max(lo, f.lo), (min(hi, f.hi) if not f.entire else hi) + 1):
        c = reduce_mod_ideal(f.coefficient(k), ideal)
        if not c.is_zero():
            terms[k] = c
    red = Series(f.var, terms, min(lo, hi), hi, False, f.czero)
    return series_str(red)


def verify_st_vn(p: int, n: int, window=None, codegree: int = None) -> CheckReport:
    """St(v_n) = v_n * t^{-(p-1)(p^n-1)} modulo I(n), on the window."""
    lo, hi = window if window is not None else default_t_window(p, n)
    st = steenrod_point(p, f"v{n}", hi=hi, codegree=codegree)
    ring = st.value.czero.ring
    e = -(p - 1) * (p**n - 1)
    vn = GradedPolynomial.gen(ring, f"v{n}")
    rhs = Series.from_terms("t", {e: vn}, GradedPolynomial.zero(ring))
    ideal = ideal_In(ring, n)
    diff = st.value - rhs
    member, exact = _laurent_member(diff, ideal, lo, hi)
    return CheckReport(
        "st_vn",
        {"p": p, "n": n},
        _reduce_series_str(st.value, ideal, lo, hi),
        f"v{n}*t^{e}",
        ideal_str(ideal),
        member,
        (lo, hi),
        exact,
    )


def verify_pseries_leading(p: int, n: int, codegree: int = None) -> CheckReport:
    """[p](t)/t modulo I(n) starts at t^{p^n - 1} with coefficient v_n."""
    D = codegree if codegree is not None else default_codegree(p, n)
    ring = _bp_op_ring(p, n, D)
    hi = p**n + p
    F = FormalGroupLaw(ring, hi + 2, bp_log(ring), name="bp")
    P = n_series(F, p, hi=hi + 1).shift(-1)
    ideal = ideal_In(ring, n)
    e = p**n - 1
    ok = all(ideal_membership(P.coefficient(k), ideal) for k in range(0, e))
    vn = GradedPolynomial.gen(ring, f"v{n}")
    ok = ok and ideal_membership(P.coefficient(e) - vn, ideal)
    return CheckReport(
        "pseries_leading",
        {"p": p, "n": n},
        _reduce_series_str(P, ideal, 0, e),
        f"v{n}*t^{e}",
        ideal_str(ideal),
        ok,
        (0, e),
        True,
    )


def verify_ln_vn(p: int, n: int, codegree: int = None) -> CheckReport:
    """S(v_n) = v_n modulo I(n), coefficientwise per b-monomial."""
    val = ln_total_bp(p, f"v{n}", n_max=n, codegree=codegree)
    ring = val.value.ring
    ideal = ideal_In(ring, n)
    diff = val.value - GradedPolynomial.gen(ring, f"v{n}")
    member = ideal_membership(diff, ideal)
    return CheckReport(
        "ln_vn",
        {"p": p, "n": n},
        str(reduce_mod_ideal(val.value, ideal)),
        f"v{n}",
        ideal_str(ideal),
        member,
        (0, 0),
        True,
    )


def _monomial_poly(ring: RingSpec, p: int, ks) -> GradedPolynomial:
    """p^{k0} v_1^{k1} ... v_m^{km} as a polynomial."""
    exp = [0] * len(ring.gens)
    for i, k in enumerate(ks[1:], start=1):
        if k:
            exp[ring.index(f"v{i}")] = k
    return GradedPolynomial.monomial(ring, exp, Rat(p) ** ks[0])


def verify_ln_linearity(p: int, ks, n: int = None, codegree: int = None) -> CheckReport:
    """S(u) = u modulo J_n(u) for the monomial u = p^{k0} v1^{k1} ... vn^{kn}."""
    ks = list(ks)
    if n is None:
        n = len(ks) - 1
    ks = ks + [0] * (n + 1 - len(ks))
    n_max = max(n, 1)
    ring, _ = ln_images(p, n_max, codegree)
    u = _monomial_poly(ring, p, ks)
    val = ln_total_bp(p, u, n_max=n_max, codegree=codegree)
    ring = val.value.ring
    ideal = ideal_Jn(_bp_op_ring(p, n_max, ring.codegree_bound), ks, n)
    diff = val.value - u.cast(ring)
    member = ideal_membership(diff, ideal)
    return CheckReport(
        "ln_linearity",
        {"p": p, "u": str(u), "n": n},
        str(reduce_mod_ideal(val.value, ideal)),
        str(u),
        ideal_str(ideal),
        member,
        (0, 0),
        True,
    )


def verify_phi_division(p: int, ks, n: int, i: int, codegree: int = None) -> CheckReport:
    """Phi_{(p-1)deg(u v_n^i) - (p^n-1)}(u v_n^i) = -u v_n^{i-1} mod J_{n-1}(u)."""
    if i < 1:
        raise PreconditionError("the division congruence needs i >= 1")
    ks = list(ks)
    if len(ks) > n:
        if any(ks[n:]):
            raise PreconditionError("u must involve only p, v_1 .. v_{n-1}")
        ks = ks[:n]
    ks = ks + [0] * (n - len(ks))  # k0 .. k_{n-1}
    D = max(codegree or 0, default_codegree(p, n))
    ring = _bp_op_ring(p, n, D)
    u = _monomial_poly(ring, p, ks)
    vn = GradedPolynomial.gen(ring, f"v{n}")
    lam = u * vn**i
    deg = lam.homogeneous_degree()
    m_star = (p - 1) * deg - (p**n - 1)
    phi = phi_total(p, lam, codegree=D)
    ring = phi.value.czero.ring
    got = phi.slice(m_star)
    rhs = (u.cast(ring) * vn.cast(ring) ** (i - 1)).scale(-1)
    ideal = ideal_Jn(ring, ks, n - 1)
    member = ideal_membership(got - rhs, ideal)
    return CheckReport(
        "phi_division",
        {"p": p, "u": str(u), "n": n, "i": i, "slice": m_star},
        str(reduce_mod_ideal(got, ideal)),
        str(reduce_mod_ideal(rhs, ideal)),
        ideal_str(ideal),
        member,
        (m_star, m_star),
        True,
    )


def verify_phi_linearity(
    p: int, ks, n: int, lam, m: int, codegree: int = None
) -> CheckReport:
    """Phi_m(u*lambda) = u * Phi_{m - (p-1)deg u}(lambda) mod J_{n-1}(u).

    Valid for m < (p-1)deg(u) - (p^{n-1}-1); anything else is a
    precondition violation.
    """
    ks = list(ks) + [0] * (n - len(ks))
    D = max(codegree or 0, default_codegree(p, n))
    ring = _bp_op_ring(p, n, D)
    u = _monomial_poly(ring, p, ks)
    deg_u = u.homogeneous_degree()
    if not m < (p - 1) * deg_u - (p ** (n - 1) - 1):
        raise PreconditionError(
            f"slice {m} is not below the linearity threshold "
            f"{(p - 1) * deg_u - (p ** (n - 1) - 1)}"
        )
    lam0 = _as_bp_poly(p, lam, ring)
    phi_ul = phi_total(p, u * lam0, codegree=D)
    phi_l = phi_total(p, lam0, codegree=D)
    ring = phi_ul.value.czero.ring
    got = phi_ul.slice(m)
    rhs = u.cast(ring) * phi_l.slice(m - (p - 1) * deg_u)
    ideal = ideal_Jn(ring, ks, n - 1)
    member = ideal_membership(got - rhs, ideal)
    return CheckReport(
        "phi_linearity",
        {"p": p, "u": str(u), "lambda": str(lam0), "n": n, "m": m},
        str(reduce_mod_ideal(got, ideal)),
        str(reduce_mod_ideal(rhs, ideal)),
        ideal_str(ideal),
        member,
        (m, m),
        True,
    )


def verify_phi_integral_unique(p: int, lam, codegree: int = None) -> CheckReport:
    """Integrality of all Phi slices plus window-independence.

    Recomputes Phi(lambda) with a doubled image window and codegree and
    compares on the overlap; forward substitution is deterministic so any
    disagreement flags a window bug.
    """
    phi1 = phi_total(p, lam, codegree=codegree)
    ring1 = phi1.value.czero.ring
    D2 = 2 * ring1.codegree_bound
    lam0 = _as_bp_poly(p, lam, ring1)
    n_need = max(_max_v_index(lam0), 1)
    img_hi2 = 2 * max(_needed_image_hi(p, lam0, 0), 1)
    ring2, images2 = _compute_st_images(p, n_need, img_hi2, D2)
    czt = GradedPolynomial.zero(ring2)
    one_t = Series.from_terms("t", {0: GradedPolynomial.one(ring2)}, czt)
    lam2 = lam0.cast(ring2)
    st2 = lam2.subs(
        {f"v{n}": im for n, im in images2.items()},
        one_t,
        lambda q: Series.from_terms("t", {0: GradedPolynomial.const(ring2, q)}, czt),
    )
    if isinstance(st2, GradedPolynomial):
        st2 = Series.from_terms("t", {0: st2}, czt)
    N2 = (Series.from_terms("t", {0: lam2**p}, czt) - st2).restrict(hi=0)
    if N2.is_zero():
        phi2 = Series.zero("t", czt)
    else:
        F2 = FormalGroupLaw(ring2, -N2.support_min() + 2, bp_log(ring2), name="bp")
        P2 = n_series(F2, p, hi=-N2.support_min() + 1).shift(-1)
        phi2 = divide_nonpositive(N2, P2, integral_ring=ring2)
    lo = max(phi1.value.lo, phi2.lo)
    agree = True
    for k in range(lo, min(phi1.value.hi, 0) + 1):
        a = phi1.value.coefficient(k).cast(ring2)
        b = phi2.coefficient(k) if (phi2.entire or k <= phi2.hi) else None
        if b is None or a != b:
            agree = False
            break
    return CheckReport(
        "phi_integral_unique",
        {"p": p, "lambda": str(lam0)},
        series_str(phi1.value),
        "recomputation at doubled window",
        "0",
        agree,
        (phi1.value.lo, min(phi1.value.hi, 0)),
        True,
    )
