"""Command-line front door.

Every invocation writes one RunReport as JSON to stdout (stable key order,
shortest round-trip float formatting) and a short human summary to stderr.
Exit status: 0 all checks passed, 1 a check failed or a counterexample
candidate was found, 2 input or usage error.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import measures as dv
from . import forms
from . import search
from .errors import MominqError
from .laws import lambda_, load_law

_FORM_ARITIES = {
    "xi": ("s t", 2),
    "tau": ("s t", 2),
    "mu": ("a t", 2),
    "w": ("p q s t", 4),
    "phi": ("s t u v", 4),
    "sigma": ("a x", 2),
    "theta": ("a x y", 3),
    "psi": ("a b c d r s u v", 8),
}

_FORM_FUNCS = {
    "xi": forms.xi,
    "tau": forms.tau,
    "mu": forms.mu,
    "w": forms.w_form,
    "phi": forms.phi,
    "sigma": forms.sigma,
    "theta": forms.theta,
    "psi": forms.psi_form,
}


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="mominq",
        description="Moment-gap functionals, inequality checks, divergence "
        "bounds, and randomized counterexample search for discrete laws.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("lambda", help="evaluate the moment-gap functional")
    p.add_argument("--law", required=True)
    p.add_argument("--s", type=float, required=True)
    p.add_argument("--precision", choices=("double", "dd"), default=None)

    p = sub.add_parser("form", help="evaluate one named form")
    p.add_argument("--id", required=True, choices=sorted(_FORM_ARITIES))
    p.add_argument("--law", required=True)
    p.add_argument("--params", type=float, nargs="+", required=True)
    p.add_argument("--precision", choices=("double", "dd"), default=None)

    p = sub.add_parser("check", help="evaluate one inequality check")
    p.add_argument("--id", required=True, choices=sorted(forms.CHECK_IDS))
    p.add_argument("--law", required=True)
    p.add_argument("--params", type=float, nargs="+", required=True)
    p.add_argument("--precision", choices=("double", "dd"), default=None)

    p = sub.add_parser("div", help="evaluate one divergence measure")
    p.add_argument("--measure", required=True, choices=sorted(dv.MEASURE_IDS))
    p.add_argument("--p", required=True)
    p.add_argument("--q", required=True)
    p.add_argument("--param", type=float, default=None)

    p = sub.add_parser("bounds", help="refined Kullback-Leibler bounds")
    p.add_argument("--p", required=True)
    p.add_argument("--q", required=True)

    p = sub.add_parser("suite", help="randomized suites for the proved statements")
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--id", default=None, choices=sorted(search.PROVED_IDS))
    p.add_argument("--jobs", type=int, default=1)

    p = sub.add_parser("fuzz", help="counterexample hunt for a conjecture")
    p.add_argument("--conjecture", required=True, choices=("1", "2"))
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--rational", action="store_true")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", default=None)

    return ap


def _load_pair(ns) -> dv.DistributionPair:
    return dv.DistributionPair(
        p=dv.load_distribution(ns.p), q=dv.load_distribution(ns.q)
    )


def _precision(ns) -> str:
    return ns.precision if ns.precision is not None else forms.default_precision()


def _execute(ns):
    """(inputs, results, exit_status) for a parsed command line."""
    cmd = ns.command
    if cmd == "lambda":
        law = load_law(ns.law)
        val = lambda_(law, ns.s, precision=_precision(ns))
        return [ns.law], {"lambda": val, "s": ns.s}, 0

    if cmd == "form":
        law = load_law(ns.law)
        names, arity = _FORM_ARITIES[ns.id]
        if len(ns.params) != arity:
            raise MominqError(
                f"form {ns.id} takes {arity} parameters ({names}), "
                f"got {len(ns.params)}"
            )
        val = _FORM_FUNCS[ns.id](law, *ns.params, precision=_precision(ns))
        return [ns.law], {"form": ns.id, "params": ns.params, "value": val}, 0

    if cmd == "check":
        law = load_law(ns.law)
        rep = forms.check_inequality(ns.id, law, ns.params, precision=ns.precision)
        return [ns.law], rep.to_dict(), 0 if rep.passed else 1

    if cmd == "div":
        pair = _load_pair(ns)
        val = dv.divergence(ns.measure, pair, param=ns.param)
        results = {"measure": ns.measure, "value": val}
        if ns.param is not None:
            results["param"] = ns.param
        return [ns.p, ns.q], results, 0

    if cmd == "bounds":
        pair = _load_pair(ns)
        rep = dv.kl_bounds(pair)
        tol = 1e-10 * (1.0 + abs(rep.kl))
        ordered = rep.f1 <= rep.kl + tol and rep.kl <= rep.f2 + tol
        improves = rep.f1 >= rep.classical_lower - tol and rep.f2 <= rep.classical_upper + tol
        results = rep.to_dict()
        results["ordered"] = ordered
        results["improves_classical"] = improves
        return [ns.p, ns.q], results, 0 if (ordered and improves) else 1

    if cmd == "suite":
        ids = (ns.id,) if ns.id else None
        reports = search.run_suite(ns.trials, ns.seed, check_ids=ids, jobs=ns.jobs)
        results = {cid: rep.to_dict() for cid, rep in reports.items()}
        bad = sum(len(rep.violations) for rep in reports.values())
        return [], results, 0 if bad == 0 else 1

    if cmd == "fuzz":
        check_id = "conjecture" + ns.conjecture
        cfg = search.SamplerConfig(
            trials=ns.trials, seed=ns.seed, rational_mode=ns.rational
        )
        rep = search.fuzz(check_id, cfg, jobs=ns.jobs)
        results = rep.to_dict()
        if ns.out:
            with open(ns.out, "w") as fh:
                fh.write(rep.to_json() + "\n")
        return [], results, 0 if not rep.violations else 1

    raise MominqError(f"unknown command {cmd!r}")


def _summarize(report: dict, err) -> None:
    cmd = report["command"]
    res = report["results"]
    if "error" in res:
        print(f"{cmd}: error: {res['error']}", file=err)
    elif cmd == "lambda":
        print(f"lambda({res['s']}) = {res['lambda']}", file=err)
    elif cmd == "form":
        print(f"{res['form']}({', '.join(map(str, res['params']))}) = {res['value']}",
              file=err)
    elif cmd == "check":
        verdict = "PASS" if res["passed"] else "FAIL"
        print(f"check {res['check_id']}: {verdict} residual={res['residual']} "
              f"scale={res['scale']}", file=err)
    elif cmd == "div":
        print(f"{res['measure']} = {res['value']}", file=err)
    elif cmd == "bounds":
        print(f"f1={res['f1']} kl={res['kl']} f2={res['f2']} "
              f"ordered={res['ordered']}", file=err)
    elif cmd == "suite":
        for cid, rep in res.items():
            print(f"suite {cid}: {rep['trials_run']} trials, "
                  f"{len(rep['violations'])} violations, "
                  f"worst scaled residual {rep['worst']['scaled_residual']}",
                  file=err)
    elif cmd == "fuzz":
        print(f"fuzz {res['check_id']}: {res['trials_run']} trials, "
              f"{len(res['violations'])} violations, "
              f"{res['precision_escalations']} escalations", file=err)


def run(argv, out=None, err=None) -> int:
    """Execute one command line; returns the exit status."""
    out = out if out is not None else sys.stdout
    err = err if err is not None else sys.stderr
    ns = _parser().parse_args(argv)
    inputs: list = []
    try:
        inputs, results, status = _execute(ns)
    except MominqError as exc:
        results, status = {"error": str(exc)}, 2
    except (OSError, ValueError, KeyError, json.JSONDecodeError) as exc:
        results, status = {"error": f"{type(exc).__name__}: {exc}"}, 2
    report = {
        "command": ns.command,
        "inputs": inputs,
        "results": results,
        "exit_status": status,
    }
    print(json.dumps(report, indent=2), file=out)
    _summarize(report, err)
    return status


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
