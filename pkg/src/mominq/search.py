"""Seeded randomized stress-testing of the inequality checks and
counterexample hunting for the two open conjectures.

Determinism contract: trial i draws from its own random stream seeded by
seed XOR i, so a report depends only on (check_id, config); trials are
order-independent and parallel runs merge to byte-identical reports.

Evidence ladder: a double-precision residual below 1e3x the pass tolerance
is re-evaluated in double-double; a persisting negative is certified in
exact rational arithmetic whenever every implied moment order is an integer
outside {0, 1}.  For the proved statements any certified negative is an
implementation bug; for the conjectures a finding is reported only with an
exact Negative certificate or a double-double residual below -1e-6 x scale.
"""

from __future__ import annotations

import json
import math
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from . import measures as dv
from . import exact as ex
from . import forms
from .errors import MomentOverflow, NotCertifiable
from .laws import DiscreteLaw, law_to_dict, make_law

_U64 = 0xFFFFFFFFFFFFFFFF

CONJECTURE_IDS = ("conjecture1", "conjecture2")
PAIR_CHECK_IDS = tuple(dv.PAIR_CHECKS)
ALL_CHECK_IDS = forms.CHECK_IDS + PAIR_CHECK_IDS
PROVED_IDS = forms.PROVED_CHECK_IDS + PAIR_CHECK_IDS

# strong-evidence threshold for reporting a conjecture violation from
# floating point alone
CONJECTURE_EVIDENCE_REL = 1e-6


@dataclass(frozen=True)
class SamplerConfig:
    """Knobs of the randomized sampler; defaults match the standard campaign."""

    trials: int
    seed: int
    atom_count_range: tuple = (2, 8)
    value_log_range: tuple = (math.log(1e-3), math.log(1e3))
    order_range: tuple = (-6.0, 6.0)
    rational_mode: bool = False

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.atom_count_range[0] > self.atom_count_range[1] or self.atom_count_range[0] < 1:
            raise ValueError("bad atom_count_range")
        if self.value_log_range[0] > self.value_log_range[1]:
            raise ValueError("bad value_log_range")
        if self.order_range[0] > self.order_range[1]:
            raise ValueError("bad order_range")


@dataclass(frozen=True)
class Violation:
    trial: int
    subject: object  # DiscreteLaw or DistributionPair
    rational_law: Optional[ex.RationalLaw]
    params: tuple
    residual: float  # double-precision evaluation
    dd_residual: float
    dd_scale: float
    exact: Optional[ex.ExactVerdict]


@dataclass(frozen=True)
class WorstCase:
    scaled_residual: float
    trial: int
    subject: object
    params: tuple


@dataclass
class FuzzReport:
    check_id: str
    trials_run: int
    seed: int
    worst: Optional[WorstCase]
    violations: list
    precision_escalations: int
    overflows: int

    def to_dict(self) -> dict:
        return {
            "check_id": self.check_id,
            "trials_run": self.trials_run,
            "seed": self.seed,
            "worst": None if self.worst is None else {
                "scaled_residual": self.worst.scaled_residual,
                "trial": self.worst.trial,
                "law": _subject_dict(self.worst.subject),
                "params": list(self.worst.params),
            },
            "violations": [
                {
                    "trial": v.trial,
                    "law": _subject_dict(v.subject),
                    "rational_law": None if v.rational_law is None
                    else ex.rational_law_to_dict(v.rational_law),
                    "params": list(v.params),
                    "residual": v.residual,
                    "dd_residual": v.dd_residual,
                    "dd_scale": v.dd_scale,
                    "exact": None if v.exact is None else v.exact.to_dict(),
                }
                for v in self.violations
            ],
            "precision_escalations": self.precision_escalations,
            "overflows": self.overflows,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def _subject_dict(subject) -> dict:
    if isinstance(subject, DiscreteLaw):
        return law_to_dict(subject)
    return {
        "p": dv.distribution_to_dict(subject.p),
        "q": dv.distribution_to_dict(subject.q),
    }


# ---------------------------------------------------------------------------
# samplers
# ---------------------------------------------------------------------------


def _sample_law(rng: random.Random, cfg: SamplerConfig):
    """(DiscreteLaw, RationalLaw or None) from one trial stream."""
    n = rng.randint(*cfg.atom_count_range)
    if cfg.rational_mode:
        values = [Fraction(rng.randint(1, 100), rng.randint(1, 100)) for _ in range(n)]
        weights = [rng.randint(1, 100) for _ in range(n)]
        rlaw = ex.make_rational_law(list(zip(values, weights)))
        return rlaw.to_float_law(), rlaw
    lo, hi = cfg.value_log_range
    values = [math.exp(rng.uniform(lo, hi)) for _ in range(n)]
    masses = [rng.uniform(0.01, 1.0) for _ in range(n)]
    return make_law(list(zip(values, masses)), auto_normalize=True), None


def _sample_pair(rng: random.Random, cfg: SamplerConfig) -> dv.DistributionPair:
    n = rng.randint(*cfg.atom_count_range)
    p = [rng.uniform(0.01, 1.0) for _ in range(n)]
    q = [rng.uniform(0.01, 1.0) for _ in range(n)]
    return dv.pair_of(
        dv.make_distribution(p, normalize=True),
        dv.make_distribution(q, normalize=True),
    )


def _int_bounds(cfg: SamplerConfig):
    return math.ceil(cfg.order_range[0]), math.floor(cfg.order_range[1])


def _draw_orders(rng: random.Random, cfg: SamplerConfig, k: int, regime: str):
    lo, hi = cfg.order_range
    if regime == "integer":
        ilo, ihi = _int_bounds(cfg)
        return [float(rng.randint(ilo, ihi)) for _ in range(k)]
    if regime == "clustered":
        center = rng.uniform(lo, hi)
        return [center + rng.uniform(-0.05, 0.05) for _ in range(k)]
    return [rng.uniform(lo, hi) for _ in range(k)]


def _pick_regime(rng: random.Random, cfg: SamplerConfig, check_id: str) -> str:
    if cfg.rational_mode:
        return "integer"
    if check_id in CONJECTURE_IDS:
        # probe near-degenerate brackets and certifiable tuples alongside the
        # plain uniform draws
        r = rng.random()
        if r < 0.5:
            return "uniform"
        if r < 0.8:
            return "clustered"
        return "integer"
    return "uniform"


def _sample_params(rng: random.Random, cfg: SamplerConfig, check_id: str):
    regime = _pick_regime(rng, cfg, check_id)
    if check_id in forms.CHECKS:
        arity = forms.CHECKS[check_id].arity
    else:
        arity = dv.PAIR_CHECKS[check_id][0]
    if check_id == "theoremb":
        if regime == "integer":
            ilo, ihi = _int_bounds(cfg)
            vals = rng.sample(range(ilo, ihi + 1), 3)
        else:
            vals = [rng.uniform(*cfg.order_range) for _ in range(3)]
            while len({*vals}) < 3:
                vals = [rng.uniform(*cfg.order_range) for _ in range(3)]
        return tuple(sorted(float(v) for v in vals))
    if check_id == "theorem2":
        if regime == "integer":
            w = [float(rng.randint(0, 3)) for _ in range(2)]
        else:
            w = [rng.uniform(0.0, 2.0) for _ in range(2)]
        return tuple(w + _draw_orders(rng, cfg, 4, regime))
    return tuple(_draw_orders(rng, cfg, arity, regime))


# ---------------------------------------------------------------------------
# one trial
# ---------------------------------------------------------------------------


def _residual(check_id: str, subject, params, mode: str):
    if check_id in forms.CHECKS:
        return forms.residual_and_scale(check_id, subject, params, mode)
    return dv.pair_residual_and_scale(check_id, subject, params, mode)


def _exactify(law: DiscreteLaw) -> ex.RationalLaw:
    # floats are dyadic rationals, so the conversion is exact up to the
    # mass renormalization, which is itself exact in rational arithmetic
    return ex.make_rational_law(
        [(Fraction(v), Fraction(m)) for v, m in law.atoms]
    )


def _try_certify(check_id: str, subject, rlaw, params):
    if check_id not in forms.CHECKS:
        return None  # pair measures involve logs/roots: never certifiable
    if any(not float(x).is_integer() for x in params):
        return None
    try:
        if rlaw is None:
            rlaw = _exactify(subject)
        return rlaw, ex.certify(check_id, rlaw, params)
    except NotCertifiable:
        return None


@dataclass
class _Partial:
    trials: int = 0
    worst: Optional[WorstCase] = None
    worst_key: tuple = ()
    violations: list = field(default_factory=list)
    escalations: int = 0
    overflows: int = 0

    def merge(self, other: "_Partial") -> "_Partial":
        out = _Partial()
        out.trials = self.trials + other.trials
        out.escalations = self.escalations + other.escalations
        out.overflows = self.overflows + other.overflows
        out.violations = sorted(
            self.violations + other.violations, key=lambda v: v.trial
        )
        if self.worst is None or (other.worst is not None and other.worst_key < self.worst_key):
            out.worst, out.worst_key = other.worst, other.worst_key
        else:
            out.worst, out.worst_key = self.worst, self.worst_key
        return out


def _run_trials(check_id: str, cfg: SamplerConfig, start: int, stop: int) -> _Partial:
    part = _Partial()
    is_pair = check_id in dv.PAIR_CHECKS
    is_conjecture = check_id in CONJECTURE_IDS
    for i in range(start, stop):
        part.trials += 1
        rng = random.Random((cfg.seed ^ i) & _U64)
        rlaw = None
        if is_pair:
            subject = _sample_pair(rng, cfg)
        else:
            subject, rlaw = _sample_law(rng, cfg)
        params = _sample_params(rng, cfg, check_id)
        try:
            res, scale = _residual(check_id, subject, params, "double")
        except MomentOverflow:
            part.overflows += 1
            continue
        res_eff, scale_eff = res, scale
        escalated = False
        # any negative or near-boundary residual gets the double-double pass
        if res < forms.ESCALATE_FACTOR * forms.tolerance(scale):
            try:
                res_eff, scale_eff = _residual(check_id, subject, params, "dd")
            except MomentOverflow:
                part.overflows += 1
                continue
            escalated = True
            part.escalations += 1
        scaled = res_eff / scale_eff if scale_eff > 0.0 else 0.0
        key = (scaled, i)
        if part.worst is None or key < part.worst_key:
            part.worst = WorstCase(
                scaled_residual=scaled, trial=i, subject=subject, params=params
            )
            part.worst_key = key
        if escalated and res_eff < -forms.tolerance(scale_eff):
            certified = _try_certify(check_id, subject, rlaw, params)
            if certified is not None:
                used_rlaw, verdict = certified
                if verdict.sign is ex.Sign.NEGATIVE:
                    part.violations.append(Violation(
                        trial=i, subject=subject, rational_law=used_rlaw,
                        params=params, residual=res, dd_residual=res_eff,
                        dd_scale=scale_eff, exact=verdict,
                    ))
                # exact Zero/Positive: the float/dd negative was noise
            else:
                strong = res_eff < -CONJECTURE_EVIDENCE_REL * scale_eff
                if (not is_conjecture) or strong:
                    part.violations.append(Violation(
                        trial=i, subject=subject, rational_law=rlaw,
                        params=params, residual=res, dd_residual=res_eff,
                        dd_scale=scale_eff, exact=None,
                    ))
    return part


def _worker(args):
    check_id, cfg, start, stop = args
    return _run_trials(check_id, cfg, start, stop)


def fuzz(check_id: str, config: SamplerConfig, jobs: int = 1) -> FuzzReport:
    """Run one randomized campaign.  Deterministic in (check_id, config);
    `jobs` only changes wall time, never the report."""
    check_id = check_id.lower()
    if check_id not in ALL_CHECK_IDS:
        raise KeyError(f"unknown check id {check_id!r}")
    if jobs <= 1 or config.trials < 64:
        part = _run_trials(check_id, config, 0, config.trials)
    else:
        chunk = max(1, (config.trials + jobs - 1) // jobs)
        ranges = [
            (check_id, config, lo, min(lo + chunk, config.trials))
            for lo in range(0, config.trials, chunk)
        ]
        part = _Partial()
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            for p in pool.map(_worker, ranges):
                part = part.merge(p)
    part.violations.sort(key=lambda v: v.trial)
    return FuzzReport(
        check_id=check_id,
        trials_run=part.trials,
        seed=config.seed,
        worst=part.worst,
        violations=part.violations,
        precision_escalations=part.escalations,
        overflows=part.overflows,
    )


def run_suite(trials: int, seed: int, check_ids=None, rational: bool = False,
              jobs: int = 1) -> dict:
    """Fuzz every proved statement (or the given subset); conjectures are not
    part of the suite and run through `fuzz` directly."""
    ids = tuple(check_ids) if check_ids else PROVED_IDS
    cfg = SamplerConfig(trials=trials, seed=seed, rational_mode=rational)
    return {cid: fuzz(cid, cfg, jobs=jobs) for cid in ids}


# ---------------------------------------------------------------------------
# conjecture -> theorem reduction cross-checks
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ReductionReport:
    trials: int
    seed: int
    max_scaled_dev_theorem4: float
    max_scaled_dev_theorem5: float
    tolerance: float
    passed: bool

    def to_dict(self) -> dict:
        return {
            "trials": self.trials,
            "seed": self.seed,
            "max_scaled_dev_theorem4": self.max_scaled_dev_theorem4,
            "max_scaled_dev_theorem5": self.max_scaled_dev_theorem5,
            "tolerance": self.tolerance,
            "passed": self.passed,
        }


def reduction_crosscheck(trials: int, seed: int, tol: float = 1e-10) -> ReductionReport:
    """On random laws and orders, the 8-parameter conjecture residual
    restricted to the two proved substitution manifolds must reproduce the
    3- and 4-parameter theorem residuals within tol x scale."""
    cfg = SamplerConfig(trials=trials, seed=seed)
    worst4 = 0.0
    worst5 = 0.0
    for i in range(trials):
        rng = random.Random((seed ^ i) & _U64)
        law, _ = _sample_law(rng, cfg)
        r, s, u, v = (rng.uniform(*cfg.order_range) for _ in range(4))
        c1_res, c1_scale = forms.residual_and_scale(
            "conjecture1", law, (r, s, r, v, r, v, s, v), "double"
        )
        t4_res, t4_scale = forms.residual_and_scale(
            "theorem4", law, (r, s, v), "double"
        )
        dev = abs(c1_res - t4_res) / max(c1_scale, t4_scale, 1e-300)
        worst4 = max(worst4, dev)
        c1_res, c1_scale = forms.residual_and_scale(
            "conjecture1", law, (r, s, s, u, r, s, s, v), "double"
        )
        t5_res, t5_scale = forms.residual_and_scale(
            "theorem5", law, (r, s, u, v), "double"
        )
        dev = abs(c1_res - t5_res) / max(c1_scale, t5_scale, 1e-300)
        worst5 = max(worst5, dev)
    return ReductionReport(
        trials=trials,
        seed=seed,
        max_scaled_dev_theorem4=worst4,
        max_scaled_dev_theorem5=worst5,
        tolerance=tol,
        passed=worst4 <= tol and worst5 <= tol,
    )
