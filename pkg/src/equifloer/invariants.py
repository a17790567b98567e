"""Euler characteristics, Alexander polynomials, and classical bounds.

The graded Euler characteristic of a link-flavor complex equals the
multivariable Alexander polynomial times (1 - t_i^{-1}) factors, one
per extra basepoint pair; exact Laurent division recovers the
polynomial up to a unit.  Setting the axis variable to 1 and dividing
by 1 + t + ... + t^(lam-1) yields the knot's own polynomial, feeding
the mod-p congruence check for periodic knots.

Absolute Alexander gradings are pinned by the symmetry of the rank
function: the computed theory is the link (or knot) Floer homology
tensored with k two-dimensional factors carrying gradings 0 and -1, so
its rank function is symmetric about -k/2 on the knot axis and about 0
on the axis component.

Exponents are stored doubled (integers), so half-integer gradings stay
exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import AsymmetricRanksError, NotDivisibleError

# ---------------------------------------------------------------------------
# Laurent polynomials, exponents doubled
# ---------------------------------------------------------------------------


class LaurentPoly:
    """Finitely supported Laurent polynomial; exponents are half-integers.

    Internally each exponent tuple holds twice the exponent, keeping
    all arithmetic over the integers.  Comparison up to units divides
    by the lexicographically smallest monomial and normalizes the sign
    of the lexicographically largest coefficient.
    """

    def __init__(self, coeffs=None, variables=("t",)):
        self.variables = tuple(variables)
        self.coeffs = {}
        for exps, c in (coeffs or {}).items():
            if c:
                key = tuple(int(e) for e in exps)
                assert len(key) == len(self.variables)
                self.coeffs[key] = self.coeffs.get(key, 0) + int(c)
        self.coeffs = {k: v for k, v in self.coeffs.items() if v}

    # -- constructors --------------------------------------------------

    @classmethod
    def monomial(cls, exponents, coeff=1, variables=("t",)):
        """Monomial with the given half-integer exponents."""
        key = tuple(int(2 * Fraction(e)) for e in exponents)
        return cls({key: coeff}, variables)

    @classmethod
    def zero(cls, variables=("t",)):
        return cls({}, variables)

    @classmethod
    def one(cls, variables=("t",)):
        return cls({(0,) * len(variables): 1}, variables)

    # -- ring operations -------------------------------------------------

    def __add__(self, other):
        assert self.variables == other.variables
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            out[k] = out.get(k, 0) + v
        return LaurentPoly(out, self.variables)

    def __neg__(self):
        return LaurentPoly({k: -v for k, v in self.coeffs.items()},
                           self.variables)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, int):
            return LaurentPoly({k: other * v for k, v in self.coeffs.items()},
                               self.variables)
        assert self.variables == other.variables
        out = {}
        for k1, v1 in self.coeffs.items():
            for k2, v2 in other.coeffs.items():
                key = tuple(a + b for a, b in zip(k1, k2))
                out[key] = out.get(key, 0) + v1 * v2
        return LaurentPoly(out, self.variables)

    __rmul__ = __mul__

    def __pow__(self, n):
        out = LaurentPoly.one(self.variables)
        for _ in range(int(n)):
            out = out * self
        return out

    def is_zero(self):
        return not self.coeffs

    def __eq__(self, other):
        return isinstance(other, LaurentPoly) and \
            self.variables == other.variables and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.variables, tuple(sorted(self.coeffs.items()))))

    # -- units and normal form -------------------------------------------

    def normalized(self):
        """Divide by the lex-least monomial; make the lex-top coefficient
        positive."""
        if not self.coeffs:
            return self
        low = min(self.coeffs)
        out = {tuple(a - b for a, b in zip(k, low)): v
               for k, v in self.coeffs.items()}
        top = max(out)
        if out[top] < 0:
            out = {k: -v for k, v in out.items()}
        return LaurentPoly(out, self.variables)

    def equals_up_to_unit(self, other):
        return self.normalized() == other.normalized()

    def reduced_mod(self, p):
        out = {k: v % p for k, v in self.coeffs.items()}
        return LaurentPoly(out, self.variables)

    # -- calculus ----------------------------------------------------------

    def specialize_one(self, var):
        """Set one variable to 1 (dropping it)."""
        i = self.variables.index(var)
        rest = self.variables[:i] + self.variables[i + 1:]
        out = {}
        for k, v in self.coeffs.items():
            key = k[:i] + k[i + 1:]
            out[key] = out.get(key, 0) + v
        return LaurentPoly(out, rest)

    def rename(self, variables):
        assert len(variables) == len(self.variables)
        return LaurentPoly(dict(self.coeffs), tuple(variables))

    def divide_exact(self, divisor):
        """Exact division in the Laurent ring; NotDivisible on remainder."""
        assert self.variables == divisor.variables
        if divisor.is_zero():
            raise NotDivisibleError("division by zero polynomial")
        if self.is_zero():
            return self
        f = dict(self.coeffs)
        g = divisor.coeffs
        gtop = max(g)
        gc = g[gtop]
        out = {}
        # Subtracting (lead f / lead g) * g strictly lowers the lex-top
        # exponent of f, so the loop ends (monomials are units here).
        while f:
            ftop = max(f)
            fc = f[ftop]
            if fc % gc != 0:
                raise NotDivisibleError(
                    f"leading coefficient {fc} not divisible by {gc}")
            q = fc // gc
            shift = tuple(a - b for a, b in zip(ftop, gtop))
            out[shift] = out.get(shift, 0) + q
            for k, v in g.items():
                key = tuple(a + b for a, b in zip(k, shift))
                f[key] = f.get(key, 0) - q * v
                if f[key] == 0:
                    del f[key]
        return LaurentPoly(out, self.variables)

    # -- presentation --------------------------------------------------

    def terms(self):
        """Sorted (exponent tuple as Fractions, coefficient) pairs."""
        return [(tuple(Fraction(e, 2) for e in k), v)
                for k, v in sorted(self.coeffs.items())]

    def as_payload(self):
        return [{"exponents": list(k), "coeff": v}
                for k, v in sorted(self.coeffs.items())]

    def __repr__(self):
        if not self.coeffs:
            return "0"
        bits = []
        for exps, c in self.terms():
            mono = []
            for var, e in zip(self.variables, exps):
                if e == 0:
                    continue
                mono.append(f"{var}^{e}" if e != 1 else var)
            body = "*".join(mono) if mono else "1"
            if c == 1 and mono:
                bits.append(body)
            elif c == -1 and mono:
                bits.append(f"-{body}")
            else:
                bits.append(f"{c}*{body}" if mono else str(c))
        out = bits[0]
        for b in bits[1:]:
            out += f" + {b}" if not b.startswith("-") else f" - {b[1:]}"
        return out


def _binary_var(variables, poly_vars):
    return LaurentPoly.monomial([1 if v == poly_vars else 0
                                 for v in variables], variables=variables)


# ---------------------------------------------------------------------------
# Periodicity configuration and pinning
# ---------------------------------------------------------------------------


def _is_prime(p):
    if p < 2:
        return False
    k = 2
    while k * k <= p:
        if p % k == 0:
            return False
        k += 1
    return True


@dataclass(frozen=True)
class PeriodicityConfig:
    q: int
    p: int
    r: int
    lam: int
    n1: int = 1

    def __post_init__(self):
        if not _is_prime(self.p):
            raise ValueError(f"p = {self.p} is not prime")
        if self.p ** self.r != self.q:
            raise ValueError(f"q = {self.q} is not p^r = {self.p}^{self.r}")
        if self.lam <= 0 or self.lam % 2 == 0:
            raise ValueError(f"linking number {self.lam} must be odd positive")


@dataclass
class AbsolutePinning:
    shifts: dict          # component name -> Fraction added to gradings
    method: str = "symmetry-center"

    def apply_table(self, table):
        return table.shifted(alexander_shifts=self.shifts)

    def apply_complex(self, cx):
        return cx.with_table(self.apply_table(cx.table))


def _rank_function(h, component):
    ranks = {}
    for b in h.blocks:
        if component not in b.alexander:
            continue
        a = b.alexander[component]
        ranks[a] = ranks.get(a, 0) + b.rank
    return ranks


def _symmetric_shift(ranks, center):
    """Shift making the support symmetric about ``center``; None if none."""
    if not ranks:
        return None
    lo, hi = min(ranks), max(ranks)
    shift = center - Fraction(lo + hi, 2)
    for a, r in ranks.items():
        mirror = 2 * center - (a + shift) - shift
        if ranks.get(mirror, 0) != r:
            return None
    return shift


def pin_absolute(h, cfg):
    """Absolute Alexander shifts from the rank-function symmetry.

    The computed homology is the Floer homology tensored with k
    two-dimensional factors in gradings 0 and -1 on the knot axis, so
    its rank function is symmetric about -k/2 there; the axis grading
    is symmetric about 0 and lives in Z + lam/2.
    """
    cx = h.complex
    comps = {c.name: c for c in cx.diagram.link_components}
    axis = cx.axis
    shifts = {}
    for name in cx.block_components:
        pairs = len(comps[name].pairs)
        if name == axis:
            center = Fraction(0)
        else:
            center = -Fraction(pairs - 1, 2)
        ranks = _rank_function(h, name)
        shift = _symmetric_shift(ranks, center)
        if shift is None:
            raise AsymmetricRanksError(
                f"no shift makes the {name} ranks symmetric about {center}",
                component=name)
        shifts[name] = shift
    pin = AbsolutePinning(shifts)
    _check_lattice(h, cfg, pin)
    return pin


def _check_lattice(h, cfg, pin):
    """Pinned gradings must sit in the theory's affine lattice."""
    cx = h.complex
    lam_half = Fraction(cfg.lam, 2)
    for b in h.blocks:
        for name, a in b.alexander.items():
            v = a + pin.shifts[name]
            if cx.flavor == "knot":
                ok = v.denominator == 1
            else:
                ok = (v - lam_half).denominator == 1
            if not ok:
                raise AsymmetricRanksError(
                    f"pinned {name} grading {v} escapes the Alexander "
                    "lattice", component=name)


def pinned_homology(h, pin):
    """Relabel homology blocks by pinned gradings."""
    from .complexes import HomologyBlock, HomologyResult

    blocks = [
        HomologyBlock(
            {c: a + pin.shifts.get(c, 0) for c, a in b.alexander.items()},
            b.maslov, b.rank, b.representatives)
        for b in h.blocks
    ]
    return HomologyResult(pin.apply_complex(h.complex), blocks)


# ---------------------------------------------------------------------------
# Euler characteristic and Alexander polynomials
# ---------------------------------------------------------------------------


def euler_characteristic(cx, pin=None, variables=None):
    """Chain-level graded Euler characteristic, up to a unit.

    Computed for the link flavor: sum over generators of (-1)^M times
    the Alexander monomial; the relative Maslov anchor contributes only
    a global sign, absorbed by unit equivalence.
    """
    comps = cx.components
    if variables is None:
        variables = tuple(f"t{i + 1}" for i in range(len(comps)))
    table = pin.apply_table(cx.table) if pin else cx.table
    out = LaurentPoly.zero(variables)
    for g in cx.generators:
        sign = -1 if table.maslov[g] % 2 else 1
        exps = [table.alexander[g][c] for c in comps]
        out = out + LaurentPoly.monomial(exps, sign, variables)
    return out


def alexander_from_euler(chi, cfg, pairs_on_knot):
    """Multivariable Alexander polynomial from the Euler characteristic.

    Divides chi by (1 - t1^{-1})^m (1 - t2^{-1}) exactly, m the number
    of basepoint pairs on the knot component; the answer is defined up
    to a unit.
    """
    variables = chi.variables
    assert len(variables) == 2, "two-component pipeline"
    m = pairs_on_knot
    t1 = _binary_var(variables, variables[0])
    t2 = _binary_var(variables, variables[1])
    one = LaurentPoly.one(variables)
    divisor = (t1 - one) ** m * (t2 - one)
    # (1 - t^{-1})^m (1 - t2^{-1}) equals (t1-1)^m (t2-1) up to a unit.
    return chi.divide_exact(divisor).normalized()


def specialize_two_component(delta, lam):
    """Set the axis variable to 1 and strip the linking factor.

    Murasugi: Delta_L(t, 1) = (1 + t + ... + t^(lam-1)) Delta_K(t).
    """
    assert len(delta.variables) == 2
    f = delta.specialize_one(delta.variables[1])
    f = _integralize(f)
    lam = int(lam)
    cyc = LaurentPoly({(2 * k,): 1 for k in range(lam)}, f.variables)
    return f.divide_exact(cyc).normalized().rename(("t",))


def _integralize(f):
    """Shift a univariate polynomial so its exponents are integers."""
    if f.is_zero():
        return f
    pars = {k[0] % 2 for k in f.coeffs}
    if pars == {1}:
        return LaurentPoly({(k[0] + 1,): v for k, v in f.coeffs.items()},
                           f.variables)
    if pars == {0}:
        return f
    raise NotDivisibleError("mixed half-integer exponents cannot be a "
                            "one-variable Alexander polynomial")


def murasugi_check(delta_cover, delta_quotient, cfg):
    """Mod-p congruence for the Alexander polynomial of a periodic knot.

    Checks delta_cover = +- t^i (1 + t + ... + t^(lam-1))^(q-1)
    (delta_quotient)^q mod p over all monomial shifts (and both signs
    when p is odd).  Returns {"holds": bool, "witness_shift": int}.
    """
    p, q, lam = cfg.p, cfg.q, cfg.lam
    var = ("t",)
    lhs = delta_cover.rename(var)
    rhs = delta_quotient.rename(var)
    cyc = LaurentPoly({(2 * k,): 1 for k in range(lam)}, var)
    rhs = cyc ** (q - 1) * rhs ** q
    lhs_m = lhs.reduced_mod(p)
    rhs_m = rhs.reduced_mod(p)
    if lhs_m.is_zero() and rhs_m.is_zero():
        return {"holds": True, "witness_shift": 0}
    if lhs_m.is_zero() or rhs_m.is_zero():
        return {"holds": False, "witness_shift": None}
    for cand in (rhs_m, rhs_m * (p - 1)) if p > 2 else (rhs_m,):
        if lhs_m.normalized().reduced_mod(p) == \
                cand.normalized().reduced_mod(p):
            shift = Fraction(min(lhs_m.coeffs)[0] - min(cand.coeffs)[0], 2)
            return {"holds": True,
                    "witness_shift": int(shift) if shift.denominator == 1
                    else str(shift)}
    return {"holds": False, "witness_shift": None}


def knot_polynomial_from_complex(cx, cfg):
    """End-to-end: chain complex to single-variable Alexander polynomial."""
    comps = {c.name: c for c in cx.diagram.link_components}
    knot = next(c for c in cx.components if c != cx.axis)
    m = len(comps[knot].pairs)
    chi = euler_characteristic(cx)
    delta = alexander_from_euler(chi, cfg, m)
    return specialize_two_component(delta, cfg.lam)


# ---------------------------------------------------------------------------
# Topological report
# ---------------------------------------------------------------------------


def genus_from_pinned(h):
    """Top knot-axis grading with nonzero rank, on pinned knot homology."""
    cx = h.complex
    knot = next(c for c in cx.block_components if c != cx.axis)
    ranks = _rank_function(h, knot)
    return max(a for a, r in ranks.items() if r)


def top_grading_rank(h):
    cx = h.complex
    knot = next(c for c in cx.block_components if c != cx.axis)
    ranks = _rank_function(h, knot)
    top = max(a for a, r in ranks.items() if r)
    return top, ranks[top]


def _breadth(h, component):
    ranks = {a for a, r in _rank_function(h, component).items() if r}
    return max(ranks) - min(ranks)


def topology_report(cover_h, quotient_h, pages, cfg,
                    cover_link=None, quotient_link=None):
    """Genus bound, fibredness transfer, and Thurston-norm bookkeeping.

    ``cover_h`` and ``quotient_h`` are pinned knot-flavor homologies;
    ``pages`` the stabilized knot-flavor pages of the cover.  The link
    flavor homologies, when supplied, feed the breadth identities
    x_cover(knot) = 2 x_quotient(knot) and equal axis breadths.
    """
    lam = cfg.lam
    inconsistencies = []
    g_cover, top_cover_rank = top_grading_rank(cover_h)
    g_quot, top_quot_rank = top_grading_rank(quotient_h)
    edmonds_rhs = 2 * g_quot + Fraction(lam - 1, 2)
    edmonds_holds = g_cover >= edmonds_rhs
    edmonds_sharp = g_cover == edmonds_rhs
    if not edmonds_holds:
        inconsistencies.append(
            f"genus bound fails: {g_cover} < 2*{g_quot} + ({lam}-1)/2")

    fibred_cover = top_cover_rank == 2
    fibred_quotient = top_quot_rank == 2

    last = pages[-1]
    e_inf_top = None
    if last.stabilized:
        surviving = [k for k, b in last.blocks.items() if b.rank]
        if surviving:
            top_key = max(surviving)
            e_inf_top = {"grading": top_key[0], "rank": last.blocks[top_key].rank}

    corollary3 = None
    if edmonds_sharp and fibred_cover:
        corollary3 = {
            "applies": True,
            "e_infinity_top_rank_two": bool(e_inf_top and e_inf_top["rank"] == 2),
            "quotient_top_rank_two": fibred_quotient,
        }
        if not fibred_quotient:
            inconsistencies.append(
                "fibredness transfer fails: cover fibred and bound sharp, "
                "but quotient top rank is not two")

    breadths = None
    if cover_link is not None and quotient_link is not None:
        knot = next(c for c in cover_link.complex.block_components
                    if c != cover_link.complex.axis)
        axis = cover_link.complex.axis
        comps_c = {c.name: c for c in cover_link.complex.diagram.link_components}
        comps_q = {c.name: c for c in quotient_link.complex.diagram.link_components}
        bc = _breadth(cover_link, knot)
        bq = _breadth(quotient_link, knot)
        x_cover = bc - len(comps_c[knot].pairs)
        x_quot = bq - len(comps_q[knot].pairs)
        ac = _breadth(cover_link, axis)
        aq = _breadth(quotient_link, axis)
        breadths = {
            "knot_breadth_cover": str(bc), "knot_breadth_quotient": str(bq),
            "x_cover": str(x_cover), "x_quotient": str(x_quot),
            "x_doubles": x_cover == 2 * x_quot,
            "axis_breadth_cover": str(ac), "axis_breadth_quotient": str(aq),
            "axis_breadths_equal": ac == aq,
        }
        if not breadths["x_doubles"]:
            inconsistencies.append(
                f"Thurston-norm doubling fails: {x_cover} != 2*{x_quot}")
        if not breadths["axis_breadths_equal"]:
            inconsistencies.append(
                f"axis breadths differ: {ac} != {aq}")

    return {
        "lambda": lam,
        "genus_cover": str(g_cover),
        "genus_quotient": str(g_quot),
        "edmonds": {
            "holds": edmonds_holds,
            "sharp": edmonds_sharp,
            "bound": str(edmonds_rhs),
        },
        "fibred_cover": fibred_cover,
        "fibred_quotient": fibred_quotient,
        "e_infinity_top": e_inf_top,
        "corollary3": corollary3,
        "breadths": breadths,
        "inconsistencies": inconsistencies,
    }
