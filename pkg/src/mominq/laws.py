"""Discrete probability laws on (0, inf) and the moment-gap functional.

The central quantity is the normalized gap between the s-th moment and the
s-th power of the mean,

    lambda_(law, s) = (E X^s - (E X)^s) / (s (s - 1)),

extended continuously to s = 0 and s = 1 by the log forms
log(EX) - E(log X) and E(X log X) - (EX) log(EX).  The generic formula
suffers catastrophic cancellation near s in {0, 1}; inside a window of
half-width BRANCH_HALF_WIDTH = 1e-3 around those points the value is
evaluated instead from a fourth-order series in the log-moment cache, which
keeps the relative truncation error near 1e-12 at the window edge.

Every function here is pure and every type immutable, so all of it is safe
for concurrent use.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from math import fsum, isfinite, log

from .ddouble import DD, _add_t, _div_t, _exp_t, _log_t, _mul_t, _powi_t, dd_fsum
from .errors import (
    EmptyLaw,
    MassSumOutOfTolerance,
    MomentOverflow,
    NonPositiveMass,
    NonPositiveValue,
)

# Window half-width for the series branches.  Compile-time constant: the
# branch-continuity tests pin the crossover at exactly this width.
BRANCH_HALF_WIDTH = 1e-3

# Negative lambda values within -CLAMP_REL*scale of zero are roundoff from a
# (near-)degenerate law and snap to exactly 0.  More negative values are
# reported as-is so that inequality checks can flag them.
CLAMP_REL = 1e-14

# The double-double path keeps the generic formula much closer to the
# singular orders (cancellation costs ~|log10 s| digits out of ~32) and only
# switches to the series inside a far narrower window.
_DD_SERIES_WINDOW = 1e-8
_DD_CLAMP_REL = 1e-30

_MASS_SUM_ABS_TOL = 1e-12  # construction invariant
_MAKE_LAW_SUM_TOL = 1e-9  # looser gate for non-normalizing construction


class Branch(Enum):
    """Evaluation path for a moment order."""

    GENERIC = "generic"
    NEAR_ZERO = "near_zero"
    NEAR_ONE = "near_one"


def branch_of(s: float) -> Branch:
    if abs(s) <= BRANCH_HALF_WIDTH:
        return Branch.NEAR_ZERO
    if abs(s - 1.0) <= BRANCH_HALF_WIDTH:
        return Branch.NEAR_ONE
    return Branch.GENERIC


@dataclass(frozen=True)
class OrderParam:
    """A moment order together with the branch its evaluation takes."""

    s: float
    branch: Branch

    @classmethod
    def of(cls, s: float) -> "OrderParam":
        s = float(s)
        return cls(s, branch_of(s))


@dataclass(frozen=True)
class DiscreteLaw:
    """Finite positive-support probability law: ((value, mass), ...).

    Masses sum to 1 within 1e-12.  Duplicate values are legal and
    merge-equivalent.  `normalized` records whether construction rescaled
    the masses.
    """

    atoms: tuple
    normalized: bool = False

    def __post_init__(self):
        if not self.atoms:
            raise EmptyLaw("law needs at least one atom")
        values = []
        masses = []
        for v, m in self.atoms:
            if not (isfinite(v) and v > 0.0):
                raise NonPositiveValue(f"atom value {v!r} not in (0, inf)")
            if not (isfinite(m) and m > 0.0):
                raise NonPositiveMass(f"atom mass {m!r} not in (0, inf)")
            values.append(float(v))
            masses.append(float(m))
        total = fsum(masses)
        if abs(total - 1.0) > _MASS_SUM_ABS_TOL:
            raise MassSumOutOfTolerance(
                f"masses sum to {total!r}, beyond {_MASS_SUM_ABS_TOL} of 1"
            )
        object.__setattr__(self, "_values", tuple(values))
        object.__setattr__(self, "_masses", tuple(masses))
        object.__setattr__(self, "_mean", fsum(m * v for v, m in zip(values, masses)))

    @property
    def values(self) -> tuple:
        return self._values

    @property
    def masses(self) -> tuple:
        return self._masses

    @property
    def mean(self) -> float:
        return self._mean

    def __len__(self) -> int:
        return len(self.atoms)


@dataclass(frozen=True)
class LogMomentCache:
    """Series coefficients for the near-0 and near-1 branches.

    M = log(EX); m[k-1] = E[(log X)^k] for k = 1..4;
    xm[k] = E[X (log X)^k] for k = 0..4 (so xm[0] = EX).
    """

    M: float
    m: tuple
    xm: tuple


def make_law(pairs, auto_normalize: bool = False) -> DiscreteLaw:
    """Validate (value, mass) pairs into a DiscreteLaw.

    With auto_normalize the masses are divided by their sum; otherwise the
    sum must already be within 1e-9 of 1.  Either way the stored masses are
    rescaled whenever their exact float sum differs from 1.0, so the
    constructed law always satisfies the 1e-12 construction invariant; the
    `normalized` flag records whether such a rescale happened.
    """
    pairs = list(pairs)
    if not pairs:
        raise EmptyLaw("no atoms given")
    for v, m in pairs:
        if not (isfinite(v) and v > 0.0):
            raise NonPositiveValue(f"atom value {v!r} not in (0, inf)")
        if not (isfinite(m) and m > 0.0):
            raise NonPositiveMass(f"atom mass {m!r} not in (0, inf)")
    total = fsum(m for _, m in pairs)
    if not auto_normalize and abs(total - 1.0) > _MAKE_LAW_SUM_TOL:
        raise MassSumOutOfTolerance(
            f"masses sum to {total!r}; pass auto_normalize=True to rescale"
        )
    if total != 1.0:
        atoms = tuple((float(v), float(m) / total) for v, m in pairs)
        rescaled = True
    else:
        atoms = tuple((float(v), float(m)) for v, m in pairs)
        rescaled = False
    return DiscreteLaw(atoms=atoms, normalized=rescaled)


def merge_atoms(law: DiscreteLaw) -> DiscreteLaw:
    """Combine duplicate values, summing their masses (order of first
    appearance is kept)."""
    acc: dict = {}
    for v, m in law.atoms:
        acc[v] = acc.get(v, 0.0) + m
    return DiscreteLaw(atoms=tuple(acc.items()), normalized=law.normalized)


# ---------------------------------------------------------------------------
# moments
# ---------------------------------------------------------------------------


def power_moment(law: DiscreteLaw, s: float) -> float:
    """E X^s with compensated summation; raises MomentOverflow if not finite."""
    if s == 0.0:
        return 1.0
    try:
        total = fsum(m * v**s for v, m in zip(law._values, law._masses))
    except OverflowError as exc:
        raise MomentOverflow(f"E X^{s} overflows") from exc
    if not isfinite(total):
        raise MomentOverflow(f"E X^{s} is not finite")
    return total


@lru_cache(maxsize=4096)
def log_moments(law: DiscreteLaw) -> LogMomentCache:
    values = law._values
    masses = law._masses
    logs = tuple(log(v) for v in values)
    m = tuple(
        fsum(ms * lv**k for ms, lv in zip(masses, logs)) for k in range(1, 5)
    )
    xm = tuple(
        fsum(ms * v * lv**k for ms, v, lv in zip(masses, values, logs))
        for k in range(5)
    )
    return LogMomentCache(M=log(law._mean), m=m, xm=xm)


def f_pointwise(s: float, x: float) -> float:
    """The nonnegative convex integrand behind the moment gap: vanishes with
    zero slope at x = 1, second derivative x^(s-2)."""
    if not (isfinite(x) and x > 0.0):
        raise NonPositiveValue(f"x {x!r} not in (0, inf)")
    if s == 0.0:
        return x - log(x) - 1.0
    if s == 1.0:
        return x * log(x) - x + 1.0
    return (x**s - s * x + s - 1.0) / (s * (s - 1.0))


# ---------------------------------------------------------------------------
# lambda_: double-precision path
# ---------------------------------------------------------------------------


def _series_near_zero(law: DiscreteLaw, s: float):
    lm = log_moments(law)
    M = lm.M
    m1, m2, m3, m4 = lm.m
    c1 = m1 - M
    c2 = m2 - M * M
    c3 = m3 - M**3
    c4 = m4 - M**4
    num = c1 + s * (c2 / 2.0 + s * (c3 / 6.0 + s * c4 / 24.0))
    val = -num / (1.0 - s)
    a = abs(s)
    scale = (
        (abs(m1) + abs(M))
        + a * ((abs(m2) + M * M) / 2.0 + a * ((abs(m3) + abs(M) ** 3) / 6.0 + a * (abs(m4) + M**4) / 24.0))
    ) / abs(1.0 - s)
    return val, scale


def _series_near_one(law: DiscreteLaw, s: float):
    lm = log_moments(law)
    M = lm.M
    ex = lm.xm[0]
    u = s - 1.0
    d1 = lm.xm[1] - ex * M
    d2 = lm.xm[2] - ex * M * M
    d3 = lm.xm[3] - ex * M**3
    d4 = lm.xm[4] - ex * M**4
    num = d1 + u * (d2 / 2.0 + u * (d3 / 6.0 + u * d4 / 24.0))
    val = num / (1.0 + u)
    a = abs(u)
    scale = (
        (abs(lm.xm[1]) + ex * abs(M))
        + a
        * (
            (abs(lm.xm[2]) + ex * M * M) / 2.0
            + a * ((abs(lm.xm[3]) + ex * abs(M) ** 3) / 6.0 + a * (abs(lm.xm[4]) + ex * M**4) / 24.0)
        )
    ) / abs(1.0 + u)
    return val, scale


def _lambda_generic(law: DiscreteLaw, s: float):
    a = power_moment(law, s)
    try:
        b = law._mean**s
    except OverflowError as exc:
        raise MomentOverflow(f"(EX)^{s} overflows") from exc
    d = s * (s - 1.0)
    return (a - b) / d, (a + b) / abs(d)


def _lambda_scaled(law: DiscreteLaw, s: float):
    """(value, scale) for the moment gap; scale bounds the magnitude of the
    constituent terms and hence the roundoff of the value."""
    if -BRANCH_HALF_WIDTH <= s <= BRANCH_HALF_WIDTH:
        if s == 0.0:
            lm = log_moments(law)
            val = lm.M - lm.m[0]
            scale = abs(lm.M) + abs(lm.m[0])
        else:
            val, scale = _series_near_zero(law, s)
    elif 1.0 - BRANCH_HALF_WIDTH <= s <= 1.0 + BRANCH_HALF_WIDTH:
        if s == 1.0:
            lm = log_moments(law)
            val = lm.xm[1] - lm.xm[0] * lm.M
            scale = abs(lm.xm[1]) + lm.xm[0] * abs(lm.M)
        else:
            val, scale = _series_near_one(law, s)
    else:
        val, scale = _lambda_generic(law, s)
    if -CLAMP_REL * scale <= val < 0.0:
        val = 0.0
    return val, scale


def lambda_(law: DiscreteLaw, s, precision: str = "double") -> float:
    """The moment-gap functional; >= 0 for every law and every finite order.

    `s` may be a float or an OrderParam.  precision "dd" re-runs the moment
    arithmetic in double-double and rounds the result back to a float.
    """
    if isinstance(s, OrderParam):
        s = s.s
    s = float(s)
    if not isfinite(s):
        raise ValueError(f"order {s!r} is not finite")
    if precision == "dd":
        val, _ = _lambda_scaled_dd(law, s)
        return float(val)
    val, _ = _lambda_scaled(law, s)
    return val


# ---------------------------------------------------------------------------
# lambda_: double-double path
# ---------------------------------------------------------------------------


@lru_cache(maxsize=1024)
def _dd_atoms(law: DiscreteLaw):
    """Tuple-kernel data for the double-double path: masses renormalized so
    they sum to 1 to ~1e-32, per-atom logs, and (EX, log EX).

    The float masses carry an O(1e-16) sum residue from storage rounding;
    near s = 0 the generic formula amplifies that residue by 1/s, so the
    extended-precision path must model the intended probability law (unit
    total mass), not the storage artifact.
    """
    thi, tlo = 0.0, 0.0
    for m in law._masses:
        thi, tlo = _add_t(thi, tlo, m, 0.0)
    masses = tuple(_div_t(m, 0.0, thi, tlo) for m in law._masses)
    logs = tuple(_log_t(v, 0.0) for v in law._values)
    exhi, exlo = 0.0, 0.0
    for (mh, ml), v in zip(masses, law._values):
        ph, pl = _mul_t(mh, ml, v, 0.0)
        exhi, exlo = _add_t(exhi, exlo, ph, pl)
    return masses, logs, (exhi, exlo), _log_t(exhi, exlo)


def _dd_masses(law: DiscreteLaw):
    return tuple(DD(h, l) for h, l in _dd_atoms(law)[0])


def _dd_base(law: DiscreteLaw) -> DD:
    return DD(*_dd_atoms(law)[2])


@lru_cache(maxsize=1024)
def _dd_log_moments(law: DiscreteLaw):
    masses, logs, ex_t, m_t = _dd_atoms(law)
    ex = DD(*ex_t)
    M = DD(*m_t)
    dlogs = [DD(h, l) for h, l in logs]
    dmasses = [DD(h, l) for h, l in masses]
    m = []
    xm = [ex]
    for k in range(1, 5):
        m.append(dd_fsum(ms * lv.powi(k) for ms, lv in zip(dmasses, dlogs)))
        xm.append(
            dd_fsum(
                ms * DD(v) * lv.powi(k)
                for ms, v, lv in zip(dmasses, law._values, dlogs)
            )
        )
    return M, tuple(m), tuple(xm)


def _dd_power_moment_t(law: DiscreteLaw, s: float):
    if s == 0.0:
        return 1.0, 0.0
    masses, logs, _, _ = _dd_atoms(law)
    ahi, alo = 0.0, 0.0
    if s.is_integer() and abs(s) <= 1024.0:
        n = int(s)
        for (mh, ml), v in zip(masses, law._values):
            ph, pl = _powi_t(v, 0.0, n)
            ph, pl = _mul_t(mh, ml, ph, pl)
            ahi, alo = _add_t(ahi, alo, ph, pl)
    else:
        for (mh, ml), (lh, ll) in zip(masses, logs):
            eh, el = _mul_t(lh, ll, s, 0.0)
            eh, el = _exp_t(eh, el)
            ph, pl = _mul_t(mh, ml, eh, el)
            ahi, alo = _add_t(ahi, alo, ph, pl)
    if not isfinite(ahi):
        raise MomentOverflow(f"E X^{s} is not finite")
    return ahi, alo


def _dd_power_moment(law: DiscreteLaw, s: float) -> DD:
    return DD(*_dd_power_moment_t(law, s))


def _dd_lambda_generic_t(law: DiscreteLaw, s: float):
    ahi, alo = _dd_power_moment_t(law, s)
    _, _, ex_t, m_t = _dd_atoms(law)
    if s.is_integer() and abs(s) <= 1024.0:
        bhi, blo = _powi_t(ex_t[0], ex_t[1], int(s))
    else:
        bhi, blo = _mul_t(m_t[0], m_t[1], s, 0.0)
        bhi, blo = _exp_t(bhi, blo)
    nhi, nlo = _add_t(ahi, alo, -bhi, -blo)
    # s(s-1) assembled in double-double so tiny s keeps full precision
    dhi, dlo = _mul_t(s, 0.0, s, 0.0)
    dhi, dlo = _add_t(dhi, dlo, -s, 0.0)
    vhi, vlo = _div_t(nhi, nlo, dhi, dlo)
    scale = (abs(ahi) + abs(bhi)) / abs(s * s - s)
    return vhi, vlo, scale


def lambda_generic_dd(law: DiscreteLaw, s: float) -> DD:
    """Generic-formula evaluation in double-double, no series windows.
    Valid for s outside {0, 1}."""
    vhi, vlo, _ = _dd_lambda_generic_t(law, float(s))
    return DD(vhi, vlo)


def _lambda_scaled_dd(law: DiscreteLaw, s: float):
    if s == 0.0:
        M, m, _ = _dd_log_moments(law)
        val = M - m[0]
        scale = abs(float(M)) + abs(float(m[0]))
    elif s == 1.0:
        M, _, xm = _dd_log_moments(law)
        val = xm[1] - xm[0] * M
        scale = abs(float(xm[1])) + float(xm[0]) * abs(float(M))
    elif -_DD_SERIES_WINDOW <= s <= _DD_SERIES_WINDOW:
        M, m, _ = _dd_log_moments(law)
        c1 = m[0] - M
        c2 = m[1] - M.powi(2)
        c3 = m[2] - M.powi(3)
        c4 = m[3] - M.powi(4)
        num = c1 + (c2 * 0.5 + (c3 * (1.0 / 6.0) + c4 * (s / 24.0)) * s) * s
        val = -num / (1.0 - s)
        scale = abs(float(m[0])) + abs(float(M))
    elif 1.0 - _DD_SERIES_WINDOW <= s <= 1.0 + _DD_SERIES_WINDOW:
        M, _, xm = _dd_log_moments(law)
        u = s - 1.0
        d1 = xm[1] - xm[0] * M
        d2 = xm[2] - xm[0] * M.powi(2)
        d3 = xm[3] - xm[0] * M.powi(3)
        d4 = xm[4] - xm[0] * M.powi(4)
        num = d1 + (d2 * 0.5 + (d3 * (1.0 / 6.0) + d4 * (u / 24.0)) * u) * u
        val = num / (1.0 + u)
        scale = abs(float(xm[1])) + float(xm[0]) * abs(float(M))
    else:
        vhi, vlo, scale = _dd_lambda_generic_t(law, s)
        val = DD(vhi, vlo)
    if val.hi < 0.0 and val >= -_DD_CLAMP_REL * scale:
        val = DD(0.0)
    return val, scale


# ---------------------------------------------------------------------------
# file formats
# ---------------------------------------------------------------------------


def law_from_dict(d: dict) -> DiscreteLaw:
    pairs = [(float(v), float(m)) for v, m in d["atoms"]]
    return make_law(pairs, auto_normalize=bool(d.get("normalize", False)))


def law_to_dict(law: DiscreteLaw) -> dict:
    return {"atoms": [[v, m] for v, m in law.atoms]}


def load_law(path: str) -> DiscreteLaw:
    """Read a law from a .json ({"atoms": [[value, mass], ...],
    "normalize": bool}) or .csv (header value,mass) file."""
    if path.endswith(".csv"):
        pairs = []
        with open(path, newline="") as fh:
            for row in csv.DictReader(fh):
                pairs.append((float(row["value"]), float(row["mass"])))
        return make_law(pairs)
    with open(path) as fh:
        return law_from_dict(json.load(fh))
