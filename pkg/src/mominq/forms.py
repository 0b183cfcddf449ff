"""Quadratic and higher-order gap forms of the moment functional, and the
signed-residual checks of every implemented inequality.

Each check evaluates a residual arranged so the claimed inequality reads
residual >= 0, together with a magnitude `scale`: the sum of the absolute
values of the products that build both sides.  Since every elementary
operation contributes relative error ~1e-16, the tolerance

    residual >= -(1e-12 * scale + 1e-300)

dominates double-precision roundoff with orders of magnitude to spare.
Residuals landing within 1e3x of that boundary are re-evaluated in
double-double before a verdict is issued.

All evaluators are pure functions of immutable inputs; precision escalation
is per call, never global state.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from typing import Callable, Optional

from .ddouble import DD
from .errors import ArityMismatch, NegativeWeight, OrderViolation
from .laws import DiscreteLaw, _lambda_scaled, _lambda_scaled_dd

TOL_REL = 1e-12
TOL_ABS = 1e-300
ESCALATE_FACTOR = 1e3

CHECK_IDS = (
    "jensen",
    "logconvex",
    "theoremb",
    "theorem1",
    "corollary1",
    "theorem2",
    "theorem3",
    "lemma2",
    "corollary2",
    "theorem4",
    "theorem5",
    "conjecture1",
    "conjecture2",
)

# checks whose statement is proved; the two conjectures are open
PROVED_CHECK_IDS = tuple(c for c in CHECK_IDS if not c.startswith("conjecture"))


def default_precision() -> str:
    """"double" unless the MOMINQ_PRECISION environment variable says "dd"."""
    mode = os.environ.get("MOMINQ_PRECISION", "double").lower()
    if mode not in ("double", "dd"):
        raise ValueError(f"MOMINQ_PRECISION must be 'double' or 'dd', got {mode!r}")
    return mode


def _lam_provider(law: DiscreteLaw, mode: str):
    """Memoized order -> (lambda value, scale) for one evaluation pass."""
    cache: dict = {}
    scaled = _lambda_scaled_dd if mode == "dd" else _lambda_scaled
    if mode not in ("double", "dd"):
        raise ValueError(f"unknown precision mode {mode!r}")

    def lam(s: float):
        r = cache.get(s)
        if r is None:
            r = scaled(law, s)
            cache[s] = r
        return r

    return lam


# ---------------------------------------------------------------------------
# form kernels: (value, scale) in the provider's arithmetic
# ---------------------------------------------------------------------------


def _k_xi(lam, s, t):
    ls, As = lam(s)
    lt, At = lam(t)
    lm, Am = lam((s + t) / 2)
    return ls * lt - lm * lm, As * At + Am * Am


def _k_xi_diff(lam, s1, t1, s2, t2):
    """xi(s1,t1) - xi(s2,t2) for pairs sharing the same inner midpoint,
    (s1+t1)/2 == (s2+t2)/2 up to rounding: the squared-midpoint terms cancel
    algebraically, so the difference is evaluated as a product difference."""
    a, Aa = lam(s1)
    b, Ab = lam(t1)
    c, Ac = lam(s2)
    d, Ad = lam(t2)
    return a * b - c * d, Aa * Ab + Ac * Ad


def _k_tau(lam, s, t):
    ls, As = lam(s)
    lt, At = lam(t)
    lm, Am = lam((s + t) / 2)
    return ls - 2 * lm + lt, As + 2.0 * Am + At


def _k_w(lam, p, q, s, t):
    ls, As = lam(s)
    lt, At = lam(t)
    lm, Am = lam((s + t) / 2)
    pp = p * p
    qq = q * q
    pq2 = 2 * p * q
    return pp * ls + pq2 * lm + qq * lt, pp * As + pq2 * Am + qq * At


def _k_phi(lam, s, t, u, v):
    x1, S1 = _k_xi(lam, s, t)
    x2, S2 = _k_xi(lam, u, v)
    # the two bracket xi's share their inner midpoint (s+t+u+v)/4, so the
    # squared terms cancel exactly and only the four cross products remain
    br, Sbr = _k_xi_diff(
        lam, (s + u) / 2, (t + v) / 2, (s + v) / 2, (t + u) / 2
    )
    return x1 * x2 - br * br, S1 * S2 + Sbr * Sbr


def _k_theta(lam, a, x, y):
    s1, S1 = _k_xi(lam, x, x + a)
    s2, S2 = _k_xi(lam, y, y + a)
    m = (x + y) / 2
    sm, Sm = _k_xi(lam, m, m + a)
    return s1 * s2 - sm * sm, S1 * S2 + Sm * Sm


def _k_psi(lam, a, b, c, d, r, s, u, v):
    lr, Sr = lam(r)
    ls, Ss = lam(s)
    lu, Su = lam(u)
    lv, Sv = lam(v)
    lrs, Srs = lam((r + s) / 2)
    luv, Suv = lam((u + v) / 2)
    lru, Sru = lam((r + u) / 2)
    lrv, Srv = lam((r + v) / 2)
    lsu, Ssu = lam((s + u) / 2)
    lsv, Ssv = lam((s + v) / 2)
    g1 = (a * a) * lr + (2 * a * b) * lrs + (b * b) * ls
    G1 = (a * a) * Sr + abs(2.0 * a * b) * Srs + (b * b) * Ss
    g2 = (c * c) * lu + (2 * c * d) * luv + (d * d) * lv
    G2 = (c * c) * Su + abs(2.0 * c * d) * Suv + (d * d) * Sv
    cross = (a * c) * lru + (a * d) * lrv + (b * c) * lsu + (b * d) * lsv
    Gx = abs(a * c) * Sru + abs(a * d) * Srv + abs(b * c) * Ssu + abs(b * d) * Ssv
    return g1 * g2 - cross * cross, G1 * G2 + Gx * Gx


# ---------------------------------------------------------------------------
# check kernels
# ---------------------------------------------------------------------------


def _c_jensen(lam, s):
    return lam(s)


def _c_logconvex(lam, s, t):
    return _k_xi(lam, s, t)


def _c_theoremb(lam, r, s, t):
    lr, Sr = lam(r)
    ls, Ss = lam(s)
    lt, St = lam(t)
    flr, fls, flt = float(lr), float(ls), float(lt)
    if flr <= 0.0 or fls <= 0.0 or flt <= 0.0:
        # a vanishing value means the law is degenerate to working precision,
        # where every side collapses to zero and the claim holds trivially
        return 0.0 * lr, 0.0
    if isinstance(lr, DD):
        logr, logs, logt = lr.log(), ls.log(), lt.log()
    else:
        logr, logs, logt = math.log(lr), math.log(ls), math.log(lt)
    wr = t - s
    wt = s - r
    ws = t - r
    val = wr * logr + wt * logt - ws * logs
    # scale carries both the product magnitudes and the log conditioning
    # err(log lam) ~ eps * (lam scale)/lam
    scale = (
        wr * (abs(float(logr)) + Sr / flr)
        + wt * (abs(float(logt)) + St / flt)
        + ws * (abs(float(logs)) + Ss / fls)
    )
    return val, scale


def _c_theorem1(lam, s, t, u, v):
    t1, T1 = _k_tau(lam, s, t)
    t2, T2 = _k_tau(lam, u, v)
    b1, B1 = _k_tau(lam, (s + u) / 2, (t + v) / 2)
    b2, B2 = _k_tau(lam, (s + v) / 2, (t + u) / 2)
    br = b1 - b2
    Sbr = B1 + B2
    return t1 * t2 - br * br, T1 * T2 + Sbr * Sbr


def _c_corollary1(lam, a, t, u):
    m1, M1 = _k_tau(lam, t, t + a)
    m2, M2 = _k_tau(lam, u, u + a)
    mid = (t + u) / 2
    mm, Mm = _k_tau(lam, mid, mid + a)
    return m1 * m2 - mm * mm, M1 * M2 + Mm * Mm


def _c_theorem2(lam, p, q, s, t, u, v):
    w1, W1 = _k_w(lam, p, q, s, t)
    w2, W2 = _k_w(lam, p, q, u, v)
    wm, Wm = _k_w(lam, p, q, (s + u) / 2, (t + v) / 2)
    return w1 * w2 - wm * wm, W1 * W2 + Wm * Wm


def _c_theorem3(lam, s, t, u, v):
    return _k_phi(lam, s, t, u, v)


def _c_lemma2(lam, s, t, u):
    return _k_phi(lam, s, t, s, u)


def _c_corollary2(lam, a, x, y):
    return _k_theta(lam, a, x, y)


def _c_theorem4(lam, r, s, v):
    p1, P1 = _k_phi(lam, r, s, r, v)
    p2, P2 = _k_phi(lam, r, v, s, v)
    xrv, Xrv = _k_xi(lam, r, v)
    d1, D1 = _k_xi_diff(lam, s, (r + v) / 2, (r + s) / 2, (s + v) / 2)
    d2, D2 = _k_xi_diff(lam, r, (s + v) / 2, (r + s) / 2, (r + v) / 2)
    d3, D3 = _k_xi_diff(lam, v, (r + s) / 2, (r + v) / 2, (s + v) / 2)
    br = xrv * d1 + d2 * d3
    Sbr = Xrv * D1 + D2 * D3
    return p1 * p2 - br * br, P1 * P2 + Sbr * Sbr


def _c_theorem5(lam, r, s, u, v):
    p1, P1 = _k_phi(lam, r, s, s, u)
    p2, P2 = _k_phi(lam, r, s, s, v)
    xrs, Xrs = _k_xi(lam, r, s)
    d1, D1 = _k_xi_diff(lam, s, (u + v) / 2, (s + u) / 2, (s + v) / 2)
    d2, D2 = _k_xi_diff(lam, s, (r + u) / 2, (r + s) / 2, (s + u) / 2)
    d3, D3 = _k_xi_diff(lam, s, (r + v) / 2, (r + s) / 2, (s + v) / 2)
    br = xrs * d1 - d2 * d3
    Sbr = Xrs * D1 + D2 * D3
    return p1 * p2 - br * br, P1 * P2 + Sbr * Sbr


def _c_conjecture1(lam, r1, s1, u1, v1, r2, s2, u2, v2):
    # the displayed bracket, with its eight midpoint pairs kept verbatim
    p1, P1 = _k_phi(lam, r1, s1, u1, v1)
    p2, P2 = _k_phi(lam, r2, s2, u2, v2)

    def d(a1, b1, a2, b2):
        x1, X1 = _k_xi(lam, (a1 + a2) / 2, (b1 + b2) / 2)
        x2, X2 = _k_xi(lam, (a1 + b2) / 2, (b1 + a2) / 2)
        return x1 - x2, X1 + X2

    dA, SA = d(r1, s1, r2, s2)
    dB, SB = d(u1, v1, u2, v2)
    dC, SC = d(r1, s1, u2, v2)
    dD, SD = d(u1, v1, r2, s2)
    br = dA * dB - dC * dD
    Sbr = SA * SB + SC * SD
    return p1 * p2 - br * br, P1 * P2 + Sbr * Sbr


def _c_conjecture2(lam, a, x, y, z, v):
    t1, T1 = _k_theta(lam, a, x, y)
    t2, T2 = _k_theta(lam, a, z, v)
    b1, B1 = _k_theta(lam, a, (x + z) / 2, (y + v) / 2)
    b2, B2 = _k_theta(lam, a, (x + v) / 2, (y + z) / 2)
    br = b1 - b2
    Sbr = B1 + B2
    return t1 * t2 - br * br, T1 * T2 + Sbr * Sbr


def _validate_theoremb(params):
    r, s, t = params
    if not (r < s < t):
        raise OrderViolation(f"theoremb needs r < s < t, got {params}")


def _validate_theorem2(params):
    p, q = params[0], params[1]
    if p < 0.0 or q < 0.0:
        raise NegativeWeight(f"weights must be >= 0, got p={p}, q={q}")


@dataclass(frozen=True)
class CheckSpec:
    check_id: str
    arity: int
    kernel: Callable
    validate: Optional[Callable] = None


CHECKS = {
    "jensen": CheckSpec("jensen", 1, _c_jensen),
    "logconvex": CheckSpec("logconvex", 2, _c_logconvex),
    "theoremb": CheckSpec("theoremb", 3, _c_theoremb, _validate_theoremb),
    "theorem1": CheckSpec("theorem1", 4, _c_theorem1),
    "corollary1": CheckSpec("corollary1", 3, _c_corollary1),
    "theorem2": CheckSpec("theorem2", 6, _c_theorem2, _validate_theorem2),
    "theorem3": CheckSpec("theorem3", 4, _c_theorem3),
    "lemma2": CheckSpec("lemma2", 3, _c_lemma2),
    "corollary2": CheckSpec("corollary2", 3, _c_corollary2),
    "theorem4": CheckSpec("theorem4", 3, _c_theorem4),
    "theorem5": CheckSpec("theorem5", 4, _c_theorem5),
    "conjecture1": CheckSpec("conjecture1", 8, _c_conjecture1),
    "conjecture2": CheckSpec("conjecture2", 5, _c_conjecture2),
}


# ---------------------------------------------------------------------------
# public forms
# ---------------------------------------------------------------------------


def _eval_form(law, mode, kernel, *params):
    lam = _lam_provider(law, mode)
    val, _ = kernel(lam, *params)
    return float(val)


def xi(law: DiscreteLaw, s: float, t: float, precision: str = "double") -> float:
    """Log-convexity gap: lambda_s lambda_t - lambda_{(s+t)/2}^2."""
    return _eval_form(law, precision, _k_xi, s, t)


def tau(law: DiscreteLaw, s: float, t: float, precision: str = "double") -> float:
    """Convexity (second-difference) gap: lambda_s - 2 lambda_{(s+t)/2} + lambda_t."""
    return _eval_form(law, precision, _k_tau, s, t)


def mu(law: DiscreteLaw, a: float, t: float, precision: str = "double") -> float:
    """Second difference over the shifted triple (t, t+a/2, t+a); equals
    tau(law, t, t+a)."""
    return _eval_form(law, precision, _k_tau, t, t + a)


def w_form(law: DiscreteLaw, p: float, q: float, s: float, t: float,
           precision: str = "double") -> float:
    """Nonnegative weighted quadratic p^2 lambda_s + 2pq lambda_mid + q^2 lambda_t."""
    if p < 0.0 or q < 0.0:
        raise NegativeWeight(f"weights must be >= 0, got p={p}, q={q}")
    return _eval_form(law, precision, _k_w, p, q, s, t)


def phi(law: DiscreteLaw, s: float, t: float, u: float, v: float,
        precision: str = "double") -> float:
    """Third-order refinement form: xi(s,t) xi(u,v) minus the squared
    cross-midpoint xi difference."""
    return _eval_form(law, precision, _k_phi, s, t, u, v)


def sigma(law: DiscreteLaw, a: float, x: float, precision: str = "double") -> float:
    """Shifted log-convexity gap xi(x, x+a)."""
    return _eval_form(law, precision, _k_xi, x, x + a)


def theta(law: DiscreteLaw, a: float, x: float, y: float,
          precision: str = "double") -> float:
    """Log-convexity gap of x -> sigma(law, a, x)."""
    return _eval_form(law, precision, _k_theta, a, x, y)


def psi_form(law: DiscreteLaw, a: float, b: float, c: float, d: float,
             r: float, s: float, u: float, v: float,
             precision: str = "double") -> float:
    """The four-coefficient positive semi-definite quadratic combining the
    moment gaps at orders r, s, u, v and their pairwise midpoints."""
    return _eval_form(law, precision, _k_psi, a, b, c, d, r, s, u, v)


# ---------------------------------------------------------------------------
# inequality checks
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FormParams:
    """Free real parameters of the form under evaluation."""

    values: tuple

    @classmethod
    def of(cls, *values) -> "FormParams":
        return cls(tuple(float(x) for x in values))


@dataclass(frozen=True)
class ResidualReport:
    """Signed residual of one inequality check.

    passed <=> residual >= -(1e-12 * scale + 1e-300), where scale sums the
    absolute values of the constituent products of both sides.
    """

    check_id: str
    residual: float
    scale: float
    passed: bool
    params: tuple
    escalated: bool = False

    def to_dict(self) -> dict:
        return {
            "check_id": self.check_id,
            "residual": self.residual,
            "scale": self.scale,
            "passed": self.passed,
            "params": list(self.params),
            "escalated": self.escalated,
        }


def tolerance(scale: float) -> float:
    return TOL_REL * scale + TOL_ABS


def residual_and_scale(check_id: str, law: DiscreteLaw, params, mode: str):
    """Evaluate one check's residual in the given arithmetic mode."""
    spec = CHECKS[check_id]
    lam = _lam_provider(law, mode)
    val, scale = spec.kernel(lam, *params)
    return float(val), float(scale)


def check_params(check_id: str, params) -> tuple:
    if isinstance(params, FormParams):
        params = params.values
    params = tuple(float(x) for x in params)
    spec = CHECKS.get(check_id)
    if spec is None:
        raise KeyError(f"unknown check id {check_id!r}")
    if len(params) != spec.arity:
        raise ArityMismatch(
            f"{check_id} takes {spec.arity} parameters, got {len(params)}"
        )
    if spec.validate is not None:
        spec.validate(params)
    return params


def check_inequality(check_id: str, law: DiscreteLaw, params,
                     precision: Optional[str] = None) -> ResidualReport:
    """Evaluate one inequality check and report its signed residual.

    In double mode, residuals within 1e3x of the pass/fail tolerance are
    automatically re-evaluated in double-double before the verdict.
    """
    params = check_params(check_id, params)
    mode = precision if precision is not None else default_precision()
    escalated = False
    if mode == "dd":
        residual, scale = residual_and_scale(check_id, law, params, "dd")
        escalated = True
    else:
        residual, scale = residual_and_scale(check_id, law, params, "double")
        if abs(residual) < ESCALATE_FACTOR * tolerance(scale):
            residual, scale = residual_and_scale(check_id, law, params, "dd")
            escalated = True
    passed = residual >= -tolerance(scale)
    return ResidualReport(
        check_id=check_id,
        residual=residual,
        scale=scale,
        passed=passed,
        params=params,
        escalated=escalated,
    )


# ---------------------------------------------------------------------------
# explicit positive semi-definiteness criterion for
# F(a,c) = alpha a^2 + beta c^2 + 2 gamma ac + 2 delta a + 2 eps c + eta
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Lemma3Verdict:
    D: float
    E: Optional[float]
    psd: bool


def lemma3_criterion(alpha: float, beta: float, gamma: float, delta: float,
                     eps: float, eta: float) -> Lemma3Verdict:
    """Decide whether F(a,c) >= 0 for all real a, c.

    For alpha > 0 and D = alpha*beta - gamma^2 > 0 this is the completed-
    square criterion D >= 0, E >= 0 with
    E = eta - (delta^2 + (alpha*eps - gamma*delta)^2 / D) / alpha.
    The degenerate rims (alpha = 0, or D = 0) are decided by direct
    inspection of the surviving linear/quadratic pieces; E is then undefined.
    """
    D = alpha * beta - gamma * gamma
    if alpha > 0.0:
        if D > 0.0:
            E = eta - (delta * delta + (alpha * eps - gamma * delta) ** 2 / D) / alpha
            return Lemma3Verdict(D=D, E=E, psd=E >= 0.0)
        if D == 0.0:
            # rank-1 quadratic part: needs the linear part to vanish along the
            # null direction and a nonnegative completed square elsewhere
            psd = (alpha * eps - gamma * delta == 0.0) and (
                eta * alpha - delta * delta >= 0.0
            )
            return Lemma3Verdict(D=D, E=None, psd=psd)
        return Lemma3Verdict(D=D, E=None, psd=False)
    if alpha == 0.0:
        # F is linear in a unless gamma = delta = 0; beta = 0 then forces
        # eps = 0 and eta >= 0 (eta >= 0 is implied by eps^2 <= beta*eta
        # only when beta > 0)
        psd = (
            gamma == 0.0
            and delta == 0.0
            and beta >= 0.0
            and eta >= 0.0
            and eps * eps <= beta * eta
        )
        return Lemma3Verdict(D=D, E=None, psd=psd)
    return Lemma3Verdict(D=D, E=None, psd=False)
