"""Double-double arithmetic: unevaluated sums of two floats, ~106-bit mantissa.

Used as the escalation precision for inequality residuals whose double-
precision evaluation lands too close to the pass/fail boundary.  Values are
immutable and hashable; arithmetic mixes freely with int/float operands.

Error-free transformations follow the classic Dekker/Knuth building blocks;
exp/log/sqrt use argument reduction plus Taylor/Newton refinement and are
accurate to a few units in the last (106th) bit over the ranges exercised
here (validated against mpmath in the test suite).

The _*_t functions are the allocation-free hot path: they take and return
(hi, lo) float pairs.  The DD class is a thin immutable wrapper over them.
"""

from __future__ import annotations

import math

_SPLITTER = 134217729.0  # 2^27 + 1, Dekker split constant
_EPS = 4.93038065763132e-32  # 2^-104
_LN2_HI = 0.6931471805599453
_LN2_LO = 2.3190468138462996e-17


def _two_sum(a: float, b: float):
    s = a + b
    bb = s - a
    return s, (a - (s - bb)) + (b - bb)


def _quick_two_sum(a: float, b: float):
    # requires |a| >= |b|
    s = a + b
    return s, b - (s - a)


def _two_prod(a: float, b: float):
    p = a * b
    ca = _SPLITTER * a
    ahi = ca - (ca - a)
    alo = a - ahi
    cb = _SPLITTER * b
    bhi = cb - (cb - b)
    blo = b - bhi
    return p, ((ahi * bhi - p) + ahi * blo + alo * bhi) + alo * blo


# ---------------------------------------------------------------------------
# tuple kernels
# ---------------------------------------------------------------------------


def _add_t(ahi, alo, bhi, blo):
    s = ahi + bhi
    bb = s - ahi
    e = (ahi - (s - bb)) + (bhi - bb)
    t = alo + blo
    bb2 = t - alo
    f = (alo - (t - bb2)) + (blo - bb2)
    e += t
    hi = s + e
    e = e - (hi - s)
    e += f
    s2 = hi + e
    return s2, e - (s2 - hi)


def _mul_t(ahi, alo, bhi, blo):
    p = ahi * bhi
    ca = _SPLITTER * ahi
    xhi = ca - (ca - ahi)
    xlo = ahi - xhi
    cb = _SPLITTER * bhi
    yhi = cb - (cb - bhi)
    ylo = bhi - yhi
    e = ((xhi * yhi - p) + xhi * ylo + xlo * yhi) + xlo * ylo
    e += ahi * blo + alo * bhi
    hi = p + e
    return hi, e - (hi - p)


def _sqr_t(ahi, alo):
    p = ahi * ahi
    ca = _SPLITTER * ahi
    xhi = ca - (ca - ahi)
    xlo = ahi - xhi
    e = ((xhi * xhi - p) + 2.0 * xhi * xlo) + xlo * xlo
    e += 2.0 * ahi * alo
    e += alo * alo
    hi = p + e
    return hi, e - (hi - p)


def _div_t(ahi, alo, bhi, blo):
    q1 = ahi / bhi
    # r = a - b*q1
    phi, plo = _mul_t(bhi, blo, q1, 0.0)
    rhi, rlo = _add_t(ahi, alo, -phi, -plo)
    q2 = rhi / bhi
    phi, plo = _mul_t(bhi, blo, q2, 0.0)
    rhi, rlo = _add_t(rhi, rlo, -phi, -plo)
    q3 = rhi / bhi
    s = q1 + q2
    e = q2 - (s - q1)
    hi = s + (e + q3)
    return hi, (e + q3) - (hi - s)


_EXP_THRESH = _EPS / 512.0
_INV_FACT = tuple(
    _div_t(1.0, 0.0, float(math.factorial(k)), 0.0) for k in range(3, 18)
)


def _exp_t(ahi, alo):
    if ahi <= -709.0:
        return 0.0, 0.0
    if ahi >= 709.0:
        return math.inf, 0.0
    if ahi == 0.0 and alo == 0.0:
        return 1.0, 0.0
    m = math.floor(ahi / _LN2_HI + 0.5)
    fm = float(m)
    thi, tlo = _mul_t(_LN2_HI, _LN2_LO, fm, 0.0)
    rhi, rlo = _add_t(ahi, alo, -thi, -tlo)
    rhi = math.ldexp(rhi, -9)
    rlo = math.ldexp(rlo, -9)
    # Taylor for expm1 on |r| <= ln2/1024
    phi, plo = _sqr_t(rhi, rlo)
    shi, slo = _add_t(rhi, rlo, 0.5 * phi, 0.5 * plo)
    phi, plo = _mul_t(phi, plo, rhi, rlo)
    i = 0
    fhi, flo = _INV_FACT[0]
    thi, tlo = _mul_t(phi, plo, fhi, flo)
    while abs(thi) > _EXP_THRESH:
        shi, slo = _add_t(shi, slo, thi, tlo)
        phi, plo = _mul_t(phi, plo, rhi, rlo)
        i += 1
        fhi, flo = _INV_FACT[i]
        thi, tlo = _mul_t(phi, plo, fhi, flo)
    shi, slo = _add_t(shi, slo, thi, tlo)
    # nine rounds of expm1 doubling: s <- 2s + s^2
    for _ in range(9):
        phi, plo = _sqr_t(shi, slo)
        shi, slo = _add_t(2.0 * shi, 2.0 * slo, phi, plo)
    shi, slo = _add_t(shi, slo, 1.0, 0.0)
    return math.ldexp(shi, m), math.ldexp(slo, m)


def _log_t(ahi, alo):
    if ahi <= 0.0:
        raise ValueError("log of non-positive double-double")
    if ahi == 1.0 and alo == 0.0:
        return 0.0, 0.0
    xhi, xlo = math.log(ahi), 0.0
    # two Newton corrections: x <- x + a e^{-x} - 1
    for _ in range(2):
        ehi, elo = _exp_t(-xhi, -xlo)
        phi, plo = _mul_t(ahi, alo, ehi, elo)
        xhi, xlo = _add_t(xhi, xlo, phi, plo)
        xhi, xlo = _add_t(xhi, xlo, -1.0, 0.0)
    return xhi, xlo


def _sqrt_t(ahi, alo):
    if ahi == 0.0 and alo == 0.0:
        return 0.0, 0.0
    if ahi < 0.0:
        raise ValueError("sqrt of negative double-double")
    x = 1.0 / math.sqrt(ahi)
    ax = ahi * x
    shi, slo = _sqr_t(ax, 0.0)
    rhi, _rlo = _add_t(ahi, alo, -shi, -slo)
    return _quick_two_sum(ax, rhi * (x * 0.5))


def _powi_t(ahi, alo, n: int):
    if n == 0:
        return 1.0, 0.0
    neg = n < 0
    e = -n if neg else n
    rhi, rlo = 1.0, 0.0
    bhi, blo = ahi, alo
    while True:
        if e & 1:
            rhi, rlo = _mul_t(rhi, rlo, bhi, blo)
        e >>= 1
        if not e:
            break
        bhi, blo = _sqr_t(bhi, blo)
    if neg:
        return _div_t(1.0, 0.0, rhi, rlo)
    return rhi, rlo


def _pow_t(ahi, alo, s: float):
    if s.is_integer() and abs(s) <= 1024.0:
        return _powi_t(ahi, alo, int(s))
    lhi, llo = _log_t(ahi, alo)
    phi, plo = _mul_t(lhi, llo, s, 0.0)
    return _exp_t(phi, plo)


# ---------------------------------------------------------------------------
# wrapper class
# ---------------------------------------------------------------------------


class DD:
    """Immutable double-double number (hi, lo) with |lo| <= 0.5 ulp(hi)."""

    __slots__ = ("hi", "lo")

    def __init__(self, hi: float = 0.0, lo: float = 0.0):
        object.__setattr__(self, "hi", float(hi))
        object.__setattr__(self, "lo", float(lo))

    def __setattr__(self, name, value):
        raise AttributeError("DD values are immutable")

    # -- construction / conversion ------------------------------------

    @staticmethod
    def of(x) -> "DD":
        if isinstance(x, DD):
            return x
        return DD(float(x), 0.0)

    def __float__(self) -> float:
        return self.hi + self.lo

    def __repr__(self) -> str:
        return f"DD({self.hi!r}, {self.lo!r})"

    def __hash__(self):
        return hash((self.hi, self.lo))

    def __bool__(self):
        return self.hi != 0.0 or self.lo != 0.0

    # -- comparisons ----------------------------------------------------

    def _cmp(self, other) -> int:
        o = DD.of(other)
        if self.hi < o.hi:
            return -1
        if self.hi > o.hi:
            return 1
        if self.lo < o.lo:
            return -1
        if self.lo > o.lo:
            return 1
        return 0

    def __eq__(self, other):
        if not isinstance(other, (DD, int, float)):
            return NotImplemented
        return self._cmp(other) == 0

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    # -- arithmetic -------------------------------------------------------

    def __neg__(self) -> "DD":
        return DD(-self.hi, -self.lo)

    def __abs__(self) -> "DD":
        return -self if self.hi < 0.0 or (self.hi == 0.0 and self.lo < 0.0) else self

    def __add__(self, other) -> "DD":
        o = DD.of(other)
        return DD(*_add_t(self.hi, self.lo, o.hi, o.lo))

    __radd__ = __add__

    def __sub__(self, other) -> "DD":
        o = DD.of(other)
        return DD(*_add_t(self.hi, self.lo, -o.hi, -o.lo))

    def __rsub__(self, other) -> "DD":
        o = DD.of(other)
        return DD(*_add_t(o.hi, o.lo, -self.hi, -self.lo))

    def __mul__(self, other) -> "DD":
        o = DD.of(other)
        return DD(*_mul_t(self.hi, self.lo, o.hi, o.lo))

    __rmul__ = __mul__

    def __truediv__(self, other) -> "DD":
        o = DD.of(other)
        return DD(*_div_t(self.hi, self.lo, o.hi, o.lo))

    def __rtruediv__(self, other) -> "DD":
        o = DD.of(other)
        return DD(*_div_t(o.hi, o.lo, self.hi, self.lo))

    def scaled_pow2(self, k: int) -> "DD":
        """Exact multiplication by 2**k."""
        return DD(math.ldexp(self.hi, k), math.ldexp(self.lo, k))

    # -- elementary functions ----------------------------------------------

    def sqr(self) -> "DD":
        return DD(*_sqr_t(self.hi, self.lo))

    def powi(self, n: int) -> "DD":
        """Integer power by binary exponentiation."""
        return DD(*_powi_t(self.hi, self.lo, n))

    def exp(self) -> "DD":
        return DD(*_exp_t(self.hi, self.lo))

    def log(self) -> "DD":
        return DD(*_log_t(self.hi, self.lo))

    def sqrt(self) -> "DD":
        return DD(*_sqrt_t(self.hi, self.lo))

    def __pow__(self, s) -> "DD":
        if isinstance(s, int):
            return DD(*_powi_t(self.hi, self.lo, s))
        if isinstance(s, float):
            return DD(*_pow_t(self.hi, self.lo, s))
        e = DD.of(s)
        if e.lo == 0.0:
            return DD(*_pow_t(self.hi, self.lo, e.hi))
        lhi, llo = _log_t(self.hi, self.lo)
        phi, plo = _mul_t(lhi, llo, e.hi, e.lo)
        return DD(*_exp_t(phi, plo))


def dd_fsum(terms) -> DD:
    """Sum an iterable of DD/float terms in double-double precision."""
    hi, lo = 0.0, 0.0
    for t in terms:
        if isinstance(t, DD):
            hi, lo = _add_t(hi, lo, t.hi, t.lo)
        else:
            hi, lo = _add_t(hi, lo, float(t), 0.0)
    return DD(hi, lo)
