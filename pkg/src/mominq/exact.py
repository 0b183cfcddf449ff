"""Exact rational-arithmetic evaluation of moments, the moment gap, and the
refinement forms at integer orders.

Residual signs computed here are certificates: arbitrary-precision rationals
carry no roundoff, so a Negative verdict is a genuine counterexample and a
Positive/Zero verdict settles a floating-point near-miss.  Only integer
orders are certifiable; the order-0/1 branches are transcendental and the
bracket midpoints must land on integers, otherwise NotCertifiable (or the
dedicated precondition errors) is raised and callers fall back to
double-double evidence.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

from . import forms
from .errors import (
    EmptyLaw,
    MassSumOutOfTolerance,
    NonIntegerMidpoint,
    NonPositiveMass,
    NonPositiveValue,
    NotCertifiable,
    SingularOrder,
)
from .laws import DiscreteLaw, make_law


class Sign(Enum):
    NEGATIVE = "negative"
    ZERO = "zero"
    POSITIVE = "positive"


def sign_of(x: Fraction) -> Sign:
    if x < 0:
        return Sign.NEGATIVE
    if x > 0:
        return Sign.POSITIVE
    return Sign.ZERO


@dataclass(frozen=True)
class RationalLaw:
    """DiscreteLaw mirror with exact rational atoms; masses sum to exactly 1."""

    atoms: tuple

    def __post_init__(self):
        if not self.atoms:
            raise EmptyLaw("law needs at least one atom")
        total = Fraction(0)
        for v, m in self.atoms:
            if not isinstance(v, Fraction) or not isinstance(m, Fraction):
                raise TypeError("rational law atoms must be Fraction pairs")
            if v <= 0:
                raise NonPositiveValue(f"atom value {v} not positive")
            if m <= 0:
                raise NonPositiveMass(f"atom mass {m} not positive")
            total += m
        if total != 1:
            raise MassSumOutOfTolerance(f"masses sum to {total}, need exactly 1")

    @property
    def values(self):
        return tuple(v for v, _ in self.atoms)

    @property
    def masses(self):
        return tuple(m for _, m in self.atoms)

    def to_float_law(self) -> DiscreteLaw:
        """Nearest-double projection, renormalized to satisfy the float
        construction invariant."""
        return make_law(
            [(float(v), float(m)) for v, m in self.atoms], auto_normalize=True
        )


def make_rational_law(pairs) -> RationalLaw:
    """Build a RationalLaw from (value, mass) pairs of Fractions/ints; masses
    are rescaled by their exact sum, which is lossless in rational arithmetic."""
    pairs = [(Fraction(v), Fraction(m)) for v, m in pairs]
    if not pairs:
        raise EmptyLaw("no atoms given")
    total = sum(m for _, m in pairs)
    if total == 0:
        raise NonPositiveMass("masses sum to zero")
    return RationalLaw(atoms=tuple((v, m / total) for v, m in pairs))


@dataclass(frozen=True)
class ExactVerdict:
    quantity_id: str
    value: Fraction
    sign: Sign

    def to_dict(self) -> dict:
        return {
            "quantity_id": self.quantity_id,
            "value": [str(self.value.numerator), str(self.value.denominator)],
            "sign": self.sign.value,
        }


# ---------------------------------------------------------------------------
# exact moments and forms
# ---------------------------------------------------------------------------


def exact_power_moment(law: RationalLaw, s: int) -> Fraction:
    """Exact E X^s for integer s (negative allowed: reciprocals are exact)."""
    s = _as_int(s)
    return sum((m * v**s for v, m in law.atoms), Fraction(0))


def exact_mean(law: RationalLaw) -> Fraction:
    return exact_power_moment(law, 1)


def exact_lambda(law: RationalLaw, s: int) -> Fraction:
    """Exact moment gap at an integer order outside {0, 1}."""
    s = _as_int(s)
    if s in (0, 1):
        raise SingularOrder(f"order {s}: the log branch is transcendental")
    return (exact_power_moment(law, s) - exact_mean(law) ** s) / (s * (s - 1))


def _as_int(s) -> int:
    if isinstance(s, Fraction):
        if s.denominator != 1:
            raise NonIntegerMidpoint(f"order {s} is not an integer")
        return s.numerator
    if isinstance(s, int):
        return s
    if isinstance(s, float) and s.is_integer():
        return int(s)
    raise NonIntegerMidpoint(f"order {s!r} is not an integer")


def _exact_lam_provider(law: RationalLaw):
    """Order -> (exact lambda, dummy scale); raises NotCertifiable for
    non-integer or singular orders so certification can bail out lazily."""
    cache: dict = {}
    ex = exact_mean(law)

    def lam(s):
        r = cache.get(s)
        if r is None:
            try:
                si = _as_int(s)
            except NonIntegerMidpoint as exc:
                raise NotCertifiable(str(exc)) from exc
            if si in (0, 1):
                raise NotCertifiable(f"order {si} is transcendental")
            val = (exact_power_moment(law, si) - ex**si) / (si * (si - 1))
            r = (val, 0.0)
            cache[s] = r
        return r

    return lam


def _check_midpoints_integer(*orders):
    for o in orders:
        o = Fraction(o)
        if o.denominator != 1:
            raise NonIntegerMidpoint(f"implied order {o} is not an integer")
        if o in (0, 1):
            raise SingularOrder(f"implied order {o} hits a log branch")


def exact_xi(law: RationalLaw, s: int, t: int) -> Fraction:
    """Exact log-convexity gap; needs s, t and (s+t)/2 integer outside {0,1}."""
    s, t = _as_int(s), _as_int(t)
    _check_midpoints_integer(s, t, Fraction(s + t, 2))
    val, _ = forms._k_xi(_exact_lam_provider(law), Fraction(s), Fraction(t))
    return val


def exact_phi(law: RationalLaw, s: int, t: int, u: int, v: int) -> Fraction:
    """Exact third-order form.  All four orders and the six pairwise
    midpoints must be integers outside {0, 1}.  The bracket is evaluated as
    the cross-product difference (its two xi terms share the same inner
    midpoint, whose squared contribution cancels identically), so no
    quarter-sum order is ever needed."""
    s, t, u, v = (_as_int(x) for x in (s, t, u, v))
    mids = [Fraction(a + b, 2) for a, b in
            ((s, t), (u, v), (s, u), (t, v), (s, v), (t, u))]
    _check_midpoints_integer(s, t, u, v, *mids)
    val, _ = forms._k_phi(
        _exact_lam_provider(law), Fraction(s), Fraction(t), Fraction(u), Fraction(v)
    )
    return val


# ---------------------------------------------------------------------------
# certification of check residuals
# ---------------------------------------------------------------------------


def _e_theoremb(lam, r, s, t):
    # power form: sign-equivalent to the floating log form, but rational
    lr, _ = lam(r)
    ls, _ = lam(s)
    lt, _ = lam(t)
    if lr == 0 or ls == 0 or lt == 0:
        return Fraction(0), 0.0
    er = _as_int(t - s)
    et = _as_int(s - r)
    es = _as_int(t - r)
    return lr**er * lt**et - ls**es, 0.0


def _e_theorem1(lam, s, t, u, v):
    t1, _ = forms._k_tau(lam, s, t)
    t2, _ = forms._k_tau(lam, u, v)
    # bracket difference of second differences: the shared quarter-sum
    # midpoint cancels, leaving four half-sum terms
    a, _ = lam((s + u) / 2)
    b, _ = lam((t + v) / 2)
    c, _ = lam((s + v) / 2)
    d, _ = lam((t + u) / 2)
    br = a + b - c - d
    return t1 * t2 - br * br, 0.0


def _e_conjecture1(lam, r1, s1, u1, v1, r2, s2, u2, v2):
    p1, _ = forms._k_phi(lam, r1, s1, u1, v1)
    p2, _ = forms._k_phi(lam, r2, s2, u2, v2)

    def d(a1, b1, a2, b2):
        # both xi's of the displayed difference share their inner midpoint,
        # so the difference reduces to lambda cross products
        val, _ = forms._k_xi_diff(
            lam, (a1 + a2) / 2, (b1 + b2) / 2, (a1 + b2) / 2, (b1 + a2) / 2
        )
        return val

    br = d(r1, s1, r2, s2) * d(u1, v1, u2, v2) - d(r1, s1, u2, v2) * d(u1, v1, r2, s2)
    return p1 * p2 - br * br, 0.0


_EXACT_KERNEL_OVERRIDES = {
    "theoremb": _e_theoremb,
    "theorem1": _e_theorem1,
    "conjecture1": _e_conjecture1,
}


def certify(check_id: str, law: RationalLaw, params) -> ExactVerdict:
    """Exact sign of a check residual on a rational law at integer params.

    Positive/Zero confirms the inequality instance; Negative is a certified
    counterexample.  Raises NotCertifiable when any moment order implied by
    the expression is a non-integer or hits the log branch.
    """
    params = forms.check_params(check_id, params)
    ints = []
    for x in params:
        try:
            ints.append(_as_int(x))
        except NonIntegerMidpoint as exc:
            raise NotCertifiable(str(exc)) from exc
    fparams = tuple(Fraction(i) for i in ints)
    kernel = _EXACT_KERNEL_OVERRIDES.get(check_id, forms.CHECKS[check_id].kernel)
    val, _ = kernel(_exact_lam_provider(law), *fparams)
    val = Fraction(val)
    return ExactVerdict(quantity_id=check_id, value=val, sign=sign_of(val))


# ---------------------------------------------------------------------------
# transport format
# ---------------------------------------------------------------------------


def rational_law_to_dict(law: RationalLaw) -> dict:
    """String-encoded integers so arbitrary precision survives JSON."""
    return {
        "atoms": [
            [[str(v.numerator), str(v.denominator)],
             [str(m.numerator), str(m.denominator)]]
            for v, m in law.atoms
        ]
    }


def rational_law_from_dict(d: dict) -> RationalLaw:
    atoms = []
    for vpair, mpair in d["atoms"]:
        atoms.append(
            (Fraction(int(vpair[0]), int(vpair[1])),
             Fraction(int(mpair[0]), int(mpair[1])))
        )
    return RationalLaw(atoms=tuple(atoms))
