"""Information measures on finite discrete distributions and the refined
Kullback-Leibler bounds.

All measures are reported in nats.  The type-s relative divergence K_s is
evaluated directly from the pair (never through the ratio-law bridge), with
the same series treatment of the removable singularities at s in {0, 1} as
the moment-gap functional; the bridge identity is exercised by tests as an
independent cross-check, so the two routes stay separate on purpose.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from math import fsum, isfinite, log, sqrt

from .ddouble import DD, dd_fsum
from .errors import (
    AlphaOne,
    DistributionError,
    LengthMismatch,
    MissingParam,
    NonFinite,
    NonPositiveProbability,
    ProbSumOutOfTolerance,
)
from .laws import DiscreteLaw, make_law

_PROB_SUM_ABS_TOL = 1e-12
_EPS_FLOOR = 1e-12
_SERIES_HALF_WIDTH = 1e-3  # same crossover as the moment-gap functional
_DD_SERIES_WINDOW = 1e-8

MEASURE_IDS = (
    "kl",
    "hellinger2",
    "chi2",
    "bhattacharyya",
    "ialpha",
    "renyi",
    "tsallis",
    "ks",
)


@dataclass(frozen=True)
class FiniteDistribution:
    """Strictly positive probabilities summing to 1 within 1e-12."""

    probs: tuple

    def __post_init__(self):
        if not self.probs:
            raise DistributionError("distribution needs at least one entry")
        for p in self.probs:
            if not (isfinite(p) and p > 0.0):
                raise NonPositiveProbability(f"probability {p!r} not in (0, 1]")
        total = fsum(self.probs)
        if abs(total - 1.0) > _PROB_SUM_ABS_TOL:
            raise ProbSumOutOfTolerance(
                f"probabilities sum to {total!r}, beyond {_PROB_SUM_ABS_TOL} of 1"
            )

    def __len__(self) -> int:
        return len(self.probs)


def make_distribution(probs, normalize: bool = False,
                      epsilon_floor: bool = False) -> FiniteDistribution:
    """Validate probabilities.  Zeros are rejected unless epsilon_floor,
    which adds 1e-12 to every entry and renormalizes (off by default: the
    domain excludes zeros, smoothing must be an explicit choice)."""
    probs = [float(p) for p in probs]
    if epsilon_floor:
        if any(p < 0.0 for p in probs):
            raise NonPositiveProbability("negative probabilities are never floored")
        probs = [p + _EPS_FLOOR for p in probs]
        normalize = True
    if normalize:
        total = fsum(probs)
        if total <= 0.0:
            raise NonPositiveProbability("probabilities sum to zero")
        probs = [p / total for p in probs]
    return FiniteDistribution(probs=tuple(probs))


@dataclass(frozen=True)
class DistributionPair:
    """Index-aligned pair of distributions on the same support."""

    p: FiniteDistribution
    q: FiniteDistribution

    def __post_init__(self):
        if len(self.p) != len(self.q):
            raise LengthMismatch(
                f"supports differ: {len(self.p)} vs {len(self.q)} entries"
            )

    def swap(self) -> "DistributionPair":
        return DistributionPair(p=self.q, q=self.p)

    def __len__(self) -> int:
        return len(self.p)


def pair_of(p, q) -> DistributionPair:
    if not isinstance(p, FiniteDistribution):
        p = make_distribution(p)
    if not isinstance(q, FiniteDistribution):
        q = make_distribution(q)
    return DistributionPair(p=p, q=q)


# ---------------------------------------------------------------------------
# Csiszar functional and the named measures
# ---------------------------------------------------------------------------


def csiszar(f, pair: DistributionPair) -> float:
    """sum q_i f(p_i / q_i) with compensated summation.

    >= f(1) for convex f; that property is the caller's to check, not
    enforced here."""
    terms = []
    for pi, qi in zip(pair.p.probs, pair.q.probs):
        y = f(pi / qi)
        if not isfinite(y):
            raise NonFinite(f"kernel value {y!r} at ratio {pi / qi!r}")
        terms.append(qi * y)
    total = fsum(terms)
    if not isfinite(total):
        raise NonFinite("divergence sum is not finite")
    return total


@lru_cache(maxsize=1024)
def _dd_probs(dist: FiniteDistribution):
    total = dd_fsum(DD(p) for p in dist.probs)
    return tuple(DD(p) / total for p in dist.probs)


@lru_cache(maxsize=1024)
def _dd_ratio_logs(pair: DistributionPair):
    p = _dd_probs(pair.p)
    q = _dd_probs(pair.q)
    return tuple((pi / qi).log() for pi, qi in zip(p, q))


def _pq(pair: DistributionPair, mode: str):
    if mode == "dd":
        return _dd_probs(pair.p), _dd_probs(pair.q)
    return pair.p.probs, pair.q.probs


def _sum(mode: str, terms):
    return dd_fsum(terms) if mode == "dd" else fsum(terms)


def _kl_scaled(pair, mode="double"):
    p, q = _pq(pair, mode)
    if mode == "dd":
        val = dd_fsum(pi * (pi / qi).log() for pi, qi in zip(p, q))
    else:
        val = fsum(pi * log(pi / qi) for pi, qi in zip(p, q))
    scale = fsum(
        float(pi) * (abs(log(float(pi) / float(qi))) + 1.0) for pi, qi in zip(p, q)
    )
    return val, scale


def _hellinger2_scaled(pair, mode="double"):
    p, q = _pq(pair, mode)
    if mode == "dd":
        val = dd_fsum((pi.sqrt() - qi.sqrt()).sqr() for pi, qi in zip(p, q))
    else:
        val = fsum((sqrt(pi) - sqrt(qi)) ** 2 for pi, qi in zip(p, q))
    scale = fsum(
        (sqrt(float(pi)) + sqrt(float(qi))) ** 2 for pi, qi in zip(p, q)
    )
    return val, scale


def _chi2_scaled(pair, mode="double"):
    p, q = _pq(pair, mode)
    if mode == "dd":
        val = dd_fsum((pi - qi).sqr() / qi for pi, qi in zip(p, q))
    else:
        val = fsum((pi - qi) ** 2 / qi for pi, qi in zip(p, q))
    scale = fsum(
        (float(pi) + float(qi)) ** 2 / float(qi) for pi, qi in zip(p, q)
    )
    return val, scale


def _bhattacharyya_scaled(pair, mode="double"):
    p, q = _pq(pair, mode)
    if mode == "dd":
        val = dd_fsum((pi * qi).sqrt() for pi, qi in zip(p, q))
    else:
        val = fsum(sqrt(pi * qi) for pi, qi in zip(p, q))
    return val, float(val)


def _ialpha(pair, alpha: float, mode="double"):
    p, q = _pq(pair, mode)
    if mode == "dd":
        # ratio logs are cached per pair, so each term costs one exp
        L = _dd_ratio_logs(pair)
        if float(alpha).is_integer() and abs(alpha) <= 1024.0:
            n = int(alpha)
            return dd_fsum(qi * (pi / qi).powi(n) for pi, qi in zip(p, q))
        return dd_fsum(qi * (li * alpha).exp() for qi, li in zip(q, L))
    return fsum(qi * (pi / qi) ** alpha for pi, qi in zip(p, q))


def _log_ratio_moments(pair, mode="double"):
    """c[k] = sum q L^k and d[k] = sum p L^k for L = log(p/q), k = 1..4."""
    p, q = _pq(pair, mode)
    if mode == "dd":
        L = _dd_ratio_logs(pair)
        c = [dd_fsum(qi * li.powi(k) for qi, li in zip(q, L)) for k in range(1, 5)]
        d = [dd_fsum(pi * li.powi(k) for pi, li in zip(p, L)) for k in range(1, 5)]
    else:
        L = [log(pi / qi) for pi, qi in zip(p, q)]
        c = [fsum(qi * li**k for qi, li in zip(q, L)) for k in range(1, 5)]
        d = [fsum(pi * li**k for pi, li in zip(p, L)) for k in range(1, 5)]
    absc = [fsum(float(qi) * abs(float(li)) ** k for qi, li in zip(q, L))
            for k in range(1, 5)]
    absd = [fsum(float(pi) * abs(float(li)) ** k for pi, li in zip(p, L))
            for k in range(1, 5)]
    return c, d, absc, absd


def _ks_scaled(pair, s: float, mode="double"):
    """(K_s value, scale) with the same singular-window treatment as the
    moment gap: for |s| <= 1e-3 the K(q||p)-anchored series, for |s-1| <= 1e-3
    the K(p||q)-anchored series, closed forms exactly at 0 and 1."""
    window = _DD_SERIES_WINDOW if mode == "dd" else _SERIES_HALF_WIDTH
    if -window <= s <= window:
        c, _, absc, _ = _log_ratio_moments(pair, mode)
        if s == 0.0:
            val = -c[0]
            scale = absc[0] + 1e-30
        else:
            num = c[0] + s * (c[1] * 0.5 + s * (c[2] * (1.0 / 6.0) + s * c[3] * (1.0 / 24.0)))
            val = -num / (1.0 - s)
            a = abs(s)
            scale = (absc[0] + a * (absc[1] / 2 + a * (absc[2] / 6 + a * absc[3] / 24))) / abs(1.0 - s) + 1e-30
    elif 1.0 - window <= s <= 1.0 + window:
        _, d, _, absd = _log_ratio_moments(pair, mode)
        if s == 1.0:
            val = d[0]
            scale = absd[0] + 1e-30
        else:
            u = s - 1.0
            num = d[0] + u * (d[1] * 0.5 + u * (d[2] * (1.0 / 6.0) + u * d[3] * (1.0 / 24.0)))
            val = num / (1.0 + u)
            a = abs(u)
            scale = (absd[0] + a * (absd[1] / 2 + a * (absd[2] / 6 + a * absd[3] / 24))) / abs(1.0 + u) + 1e-30
    else:
        i_s = _ialpha(pair, s, mode)
        denom = s * (s - 1.0)
        val = (i_s - 1.0) / denom
        scale = (float(i_s) * (2.0 + abs(s)) + 1.0) / abs(denom)
    fval = float(val)
    if fval < 0.0 and fval >= -1e-14 * scale:
        val = DD(0.0) if mode == "dd" else 0.0
    return val, scale


def divergence(measure_id: str, pair: DistributionPair, param=None) -> float:
    """Evaluate one named measure; `param` is the order for ialpha, renyi,
    tsallis and ks."""
    mid = measure_id.lower()
    if mid == "kl":
        return _kl_scaled(pair)[0]
    if mid == "hellinger2":
        return _hellinger2_scaled(pair)[0]
    if mid == "chi2":
        return _chi2_scaled(pair)[0]
    if mid == "bhattacharyya":
        return _bhattacharyya_scaled(pair)[0]
    if mid in ("ialpha", "renyi", "tsallis", "ks"):
        if param is None:
            raise MissingParam(f"{measure_id} needs an order parameter")
        a = float(param)
        if mid == "ialpha":
            return _ialpha(pair, a)
        if mid == "ks":
            return _ks_scaled(pair, a)[0]
        if a == 1.0:
            raise AlphaOne(f"{measure_id} is undefined at order 1")
        ia = _ialpha(pair, a)
        if mid == "renyi":
            return log(ia) / (a - 1.0)
        return (ia - 1.0) / (a - 1.0)
    raise KeyError(f"unknown measure {measure_id!r}")


# ---------------------------------------------------------------------------
# ratio-law constructions
# ---------------------------------------------------------------------------


class PairLawKind(Enum):
    """Which ratio random variable is carried by which distribution.

    Q_WITH_RATIO      masses q_i on values p_i/q_i (mean exactly 1)
    P_WITH_RATIO      masses p_i on values p_i/q_i
    P_WITH_SQRT_RATIO masses p_i on values sqrt(q_i/p_i)
    """

    Q_WITH_RATIO = "q_with_ratio"
    P_WITH_RATIO = "p_with_ratio"
    P_WITH_SQRT_RATIO = "p_with_sqrt_ratio"


def law_from_pair(kind: PairLawKind, pair: DistributionPair) -> DiscreteLaw:
    p = pair.p.probs
    q = pair.q.probs
    if kind is PairLawKind.Q_WITH_RATIO:
        atoms = [(pi / qi, qi) for pi, qi in zip(p, q)]
    elif kind is PairLawKind.P_WITH_RATIO:
        atoms = [(pi / qi, pi) for pi, qi in zip(p, q)]
    elif kind is PairLawKind.P_WITH_SQRT_RATIO:
        atoms = [(sqrt(qi / pi), pi) for pi, qi in zip(p, q)]
    else:
        raise KeyError(f"unknown construction {kind!r}")
    return make_law(atoms, auto_normalize=True)


# ---------------------------------------------------------------------------
# symmetric measures and their second-order estimates
# ---------------------------------------------------------------------------


def _symmetric_scaled(pair, a: float, mode="double"):
    k1, S1 = _ks_scaled(pair, a, mode)
    k2, S2 = _ks_scaled(pair.swap(), a, mode)
    h2, Sh = _hellinger2_scaled(pair, mode)
    s_val = k1 + k2 - 4 * h2
    s_scale = S1 + S2 + 4 * Sh
    p_val = k1 * k2 - (2 * h2) * (2 * h2)
    p_scale = S1 * S2 + 4 * Sh * Sh
    return (s_val, s_scale), (p_val, p_scale)


def symmetric_measures(a: float, pair: DistributionPair):
    """(S_a, P_a): the additive and multiplicative symmetric gaps over the
    Hellinger floor; both are >= 0 for every order."""
    (s_val, _), (p_val, _) = _symmetric_scaled(pair, a)
    return float(s_val), float(p_val)


def theorem8_residuals(a: float, b: float, pair: DistributionPair):
    """(rS, rP): second-order log-convexity residuals of the symmetric
    measures; both >= 0."""
    (rs, _), (rp, _) = _theorem8_scaled(pair, a, b)
    return float(rs), float(rp)


def _theorem8_scaled(pair, a: float, b: float, mode="double"):
    (s1, Ss1), (p1, Sp1) = _symmetric_scaled(pair, a + b - 0.5, mode)
    (s2, Ss2), (p2, Sp2) = _symmetric_scaled(pair, a - b + 0.5, mode)
    (sa, Ssa), (pa, Spa) = _symmetric_scaled(pair, a, mode)
    (sb, Ssb), (pb, Spb) = _symmetric_scaled(pair, b, mode)
    ds = sa - sb
    dp = pa - pb
    rs = s1 * s2 - ds * ds
    rp = p1 * p2 - dp * dp
    Srs = Ss1 * Ss2 + (Ssa + Ssb) ** 2
    Srp = Sp1 * Sp2 + (Spa + Spb) ** 2
    return (rs, Srs), (rp, Srp)


# ---------------------------------------------------------------------------
# refined Kullback-Leibler bounds
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class KLBoundsReport:
    """K(p||q) sandwiched between the refined bounds f1 <= kl <= f2, with the
    classical comparison floor H^2 and ceiling log(1 + chi^2)."""

    kl: float
    f1: float
    f2: float
    h2: float
    chi2_pq: float
    chi2_qp: float
    bhattacharyya: float
    classical_lower: float
    classical_upper: float

    def to_dict(self) -> dict:
        return {
            "kl": self.kl,
            "f1": self.f1,
            "f2": self.f2,
            "h2": self.h2,
            "chi2_pq": self.chi2_pq,
            "chi2_qp": self.chi2_qp,
            "bhattacharyya": self.bhattacharyya,
            "classical_lower": self.classical_lower,
            "classical_upper": self.classical_upper,
        }


def _f1_scaled(B, SB, chi2_qp, Sqp, mode="double"):
    one = DD(1.0) if mode == "dd" else 1.0
    lnB = B.log() if mode == "dd" else log(B)
    n = (one - B * B) * (one - B * B)
    d = one - (B * B) * (B * B) + chi2_qp
    fB = float(B)
    Sn = (1.0 + fB * fB) ** 2
    Sd = 1.0 + fB**4 + Sqp
    fd = float(d)
    val = -2 * lnB + 6 * (n / d)
    scale = 2.0 * (abs(float(lnB)) + 1.0) + 6.0 * (Sn / fd + float(n) / fd * (Sd / fd) + float(n) / fd)
    return val, scale


def _f2_scaled(B, SB, chi2_pq, Spq, mode="double"):
    one = DD(1.0) if mode == "dd" else 1.0
    t = one + chi2_pq
    rt = t.sqrt() if mode == "dd" else sqrt(t)
    lnt = t.log() if mode == "dd" else log(t)
    g = B * rt - one
    ft = float(t)
    fg = float(g)
    corr = (32.0 / 9.0) * (g * g / chi2_pq)
    val = lnt - corr
    Sg = float(B) * float(rt) + 1.0
    fchi = float(chi2_pq)
    Scorr = (32.0 / 9.0) * (Sg * Sg / fchi + (fg * fg / fchi) * (Spq / fchi) + abs(fg * fg / fchi))
    scale = abs(float(lnt)) + Spq / ft + Scorr
    return val, scale


def kl_bounds(pair: DistributionPair, mode: str = "double") -> KLBoundsReport:
    """Bhattacharyya/chi-square refinement of the classical KL sandwich.

    For p = q every gap is identically zero and the 0/0 correction terms take
    their limiting value 0."""
    kl, _ = _kl_scaled(pair, mode)
    h2, _ = _hellinger2_scaled(pair, mode)
    chi2_pq, Spq = _chi2_scaled(pair, mode)
    chi2_qp, Sqp = _chi2_scaled(pair.swap(), mode)
    B, SB = _bhattacharyya_scaled(pair, mode)
    if float(chi2_pq) == 0.0 and float(chi2_qp) == 0.0:
        return KLBoundsReport(
            kl=0.0, f1=0.0, f2=0.0, h2=0.0, chi2_pq=0.0, chi2_qp=0.0,
            bhattacharyya=1.0, classical_lower=0.0, classical_upper=0.0,
        )
    f1, _ = _f1_scaled(B, SB, chi2_qp, Sqp, mode)
    f2, _ = _f2_scaled(B, SB, chi2_pq, Spq, mode)
    upper = (DD(1.0) + chi2_pq).log() if mode == "dd" else log(1.0 + chi2_pq)
    return KLBoundsReport(
        kl=float(kl),
        f1=float(f1),
        f2=float(f2),
        h2=float(h2),
        chi2_pq=float(chi2_pq),
        chi2_qp=float(chi2_qp),
        bhattacharyya=float(B),
        classical_lower=float(h2),
        classical_upper=float(upper),
    )


# ---------------------------------------------------------------------------
# pair-based inequality checks (for the randomized suites)
# ---------------------------------------------------------------------------


def _pc_theorem6(pair, params, mode):
    s, t = params
    k1, S1 = _ks_scaled(pair, s, mode)
    k2, S2 = _ks_scaled(pair, t, mode)
    km, Sm = _ks_scaled(pair, (s + t) / 2, mode)
    return k1 * k2 - km * km, S1 * S2 + Sm * Sm


def _worse(pairs):
    """Pick the (residual, scale) whose scaled residual is smallest."""
    best = None
    best_key = None
    for val, scale in pairs:
        fval = float(val)
        key = fval / scale if scale > 0.0 else fval
        if best_key is None or key < best_key:
            best_key = key
            best = (val, scale)
    return best


def _pc_theorem7(pair, params, mode):
    (s,) = params
    k1, S1 = _ks_scaled(pair, s, mode)
    k2, S2 = _ks_scaled(pair.swap(), s, mode)
    h2, Sh = _hellinger2_scaled(pair, mode)
    hh = 2 * h2
    r1 = k1 * k2 - hh * hh
    r2 = k1 + k2 - 2 * hh
    return _worse([(r1, S1 * S2 + 4 * Sh * Sh), (r2, S1 + S2 + 4 * Sh)])


def _pc_theorem8(pair, params, mode):
    a, b = params
    (rs, Srs), (rp, Srp) = _theorem8_scaled(pair, a, b, mode)
    return _worse([(rs, Srs), (rp, Srp)])


def _pc_theorem9(pair, params, mode):
    kl, Skl = _kl_scaled(pair, mode)
    chi2_pq, Spq = _chi2_scaled(pair, mode)
    chi2_qp, Sqp = _chi2_scaled(pair.swap(), mode)
    B, SB = _bhattacharyya_scaled(pair, mode)
    if float(chi2_pq) == 0.0 and float(chi2_qp) == 0.0:
        zero = DD(0.0) if mode == "dd" else 0.0
        return zero, 0.0
    f1, S1 = _f1_scaled(B, SB, chi2_qp, Sqp, mode)
    f2, S2 = _f2_scaled(B, SB, chi2_pq, Spq, mode)
    return _worse([(kl - f1, Skl + S1), (f2 - kl, S2 + Skl)])


PAIR_CHECKS = {
    "theorem6": (2, _pc_theorem6),
    "theorem7": (1, _pc_theorem7),
    "theorem8": (2, _pc_theorem8),
    "theorem9": (0, _pc_theorem9),
}


def pair_residual_and_scale(check_id: str, pair: DistributionPair, params,
                            mode: str = "double"):
    arity, kernel = PAIR_CHECKS[check_id]
    params = tuple(float(x) for x in params)
    if len(params) != arity:
        from .errors import ArityMismatch

        raise ArityMismatch(f"{check_id} takes {arity} parameters, got {len(params)}")
    val, scale = kernel(pair, params, mode)
    return float(val), float(scale)


# ---------------------------------------------------------------------------
# file formats
# ---------------------------------------------------------------------------


def distribution_from_dict(d: dict) -> FiniteDistribution:
    return make_distribution(
        d["probs"],
        normalize=bool(d.get("normalize", False)),
        epsilon_floor=bool(d.get("epsilon_floor", False)),
    )


def distribution_to_dict(dist: FiniteDistribution) -> dict:
    return {"probs": list(dist.probs)}


def load_distribution(path: str) -> FiniteDistribution:
    with open(path) as fh:
        return distribution_from_dict(json.load(fh))
