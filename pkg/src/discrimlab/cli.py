"""Command-line entry point: ``discrimlab VERB [flags]``.

Reports are JSON on stdout (or ``--output``); errors are a JSON object on
stderr with a documented exit code.
"""

import argparse
import csv
import io
import json
import math
import sys

import numpy as np

from . import asymptotics, bounds, discrimination, fuzz, lattice
from .ensemble_io import SCHEMA_VERSION, ParseError, dumps, load_ensemble, ensemble_to_doc
from .errors import (ConvergenceError, DegenerateInputError, DomainError, PreconditionError,
                     ResourceError, TheoremViolation)

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_PARSE = 2
EXIT_DOMAIN = 3
EXIT_CONVERGENCE = 4
EXIT_RESOURCE = 5


def _num(x):
    x = float(x)
    if math.isnan(x):
        return None
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return x


def _matrix_doc(m):
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(m)]


def _emit(args, payload):
    text = dumps({"schema_version": SCHEMA_VERSION, **payload}) + "\n"
    _write(args, text)


def _write(args, text):
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _require_input(args):
    if not args.input:
        raise ParseError("--input is required")
    return load_ensemble(args.input)


# -- verbs -----------------------------------------------------------------------

def cmd_discriminate(args):
    ens = _require_input(args)
    res = discrimination.optimal_povm(ens, tol=args.tolerance)
    ykl = discrimination.verify_ykl(ens, res.povm)
    report = {
        "command": "discriminate",
        "r": ens.r,
        "dim": ens.dim,
        "p_error": res.p_error.to_dict(),
        "p_success": res.p_success.to_dict(),
        "feasibility_slack": res.feasibility_slack,
        "ykl": {"slackness_residual": ykl.slackness_residual,
                "min_feasibility": ykl.min_feasibility,
                "hermiticity_residual": ykl.hermiticity_residual,
                "optimal": ykl.optimal},
    }
    if args.emit_povm:
        report["povm"] = [_matrix_doc(e) for e in res.povm.effects]
    _emit(args, report)
    return EXIT_OK


def _sample_spec(args):
    return fuzz.SampleSpec(dim=args.dim, r=args.r, kind=args.kind, dof=args.dof,
                           weighting=args.weighting, scale=args.scale, seed=args.seed)


def cmd_bounds(args):
    spec = None
    if args.sample:
        spec = _sample_spec(args)
        ens = fuzz.sample_ensemble(spec)
    else:
        ens = _require_input(args)
    rep = bounds.evaluate_bound_suite(ens, suite=args.suite)
    report = {"command": "bounds", "suite": args.suite, **rep.to_dict()}
    if spec is not None:
        report["spec"] = spec.to_dict()
        report["ensemble"] = ensemble_to_doc(ens)
    _emit(args, report)
    return EXIT_OK if rep.ok else EXIT_VIOLATION


def _parse_averaged(text, r):
    try:
        vals = [float(x) for x in text.split(",")]
    except ValueError as exc:
        raise ParseError("--averaged expects 'p' or 'p,q1,...,q_{r-1}'") from exc
    p, q = vals[0], vals[1:]
    if not q:
        q = [1.0 / (r - 1)] * (r - 1)
    if len(q) != r - 1:
        raise ParseError(f"--averaged needs {r - 1} mixture weights, got {len(q)}")
    return p, q


def cmd_exponent(args):
    ens = _require_input(args)
    method = "gram" if args.pure_gram else args.method
    if args.averaged:
        if ens.r < 2:
            raise PreconditionError("averaged series needs rho and at least one sigma")
        p, q = _parse_averaged(args.averaged, ens.r)
        states = ens.states()
        est = asymptotics.averaged_iid_series(states[0], states[1:], p, q, args.n_max,
                                              method=method, jobs=args.jobs)
    else:
        est = asymptotics.exponent_series(ens.states(), ens.weights, args.n_max, method=method,
                                          tol=args.tolerance, jobs=args.jobs)
    verdict = {"command": "exponent", "averaged": bool(args.averaged), **est.to_dict()}
    if args.format == "json":
        verdict["series"] = [{"n": pt.n, "p_error": pt.p_error, "gap": pt.gap,
                              "log_p_error": _num(pt.log_p_error)} for pt in est.series]
        _emit(args, verdict)
    else:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "p_error", "gap", "log_p_error"])
        for pt in est.series:
            w.writerow([pt.n, repr(pt.p_error), repr(pt.gap), repr(pt.log_p_error)])
        _write(args, buf.getvalue())
        if args.verdict:
            with open(args.verdict, "w", encoding="utf-8") as fh:
                fh.write(dumps({"schema_version": SCHEMA_VERSION, **verdict}) + "\n")
    return EXIT_OK


def cmd_fuzz(args):
    spec = _sample_spec(args)
    try:
        rec = fuzz.fuzz_conjecture(args.conjecture, spec, args.trials, recheck=args.recheck,
                                   jobs=args.jobs)
    except TheoremViolation as exc:
        _error(EXIT_VIOLATION, "theorem_violation", str(exc),
               entry=exc.entry.to_dict() if exc.entry else None,
               ensemble=json.loads(exc.ensemble_json) if exc.ensemble_json else None)
        return EXIT_VIOLATION
    report = {"command": "fuzz", **rec.to_dict()}
    if args.findings and rec.exceed_count:
        doc = {"schema_version": SCHEMA_VERSION, "conjecture_id": rec.conjecture_id,
               "label": "finding under this tool's sampling distribution",
               "constant": rec.constant, "findings": rec.findings, "spec": rec.spec,
               "worst_seed": rec.worst_seed,
               "worst_ensemble": json.loads(fuzz.worst_ensemble_json(rec))}
        with open(args.findings, "w", encoding="utf-8") as fh:
            fh.write(dumps(doc) + "\n")
        report["findings_file"] = args.findings
    _emit(args, report)
    return EXIT_OK


def cmd_lub(args):
    ens = _require_input(args)
    ops = list(ens.hypotheses)
    res = lattice.glb_sdp(ops, tol=args.tolerance) if args.glb else \
        lattice.lub_sdp(ops, tol=args.tolerance)
    report = {"command": "glb" if args.glb else "lub",
              "trace": res.trace_value, "gap": res.dual_gap,
              "feasibility_slack": res.feasibility_slack,
              "operator": _matrix_doc(res.operator)}
    if ens.r == 2:
        closed = lattice.glb2_trace(*ops) if args.glb else lattice.lub2_trace(*ops)
        report["closed_form_trace"] = closed
    _emit(args, report)
    return EXIT_OK


# -- parser ------------------------------------------------------------------------

def _common(p):
    p.add_argument("--input", help="ensemble JSON file")
    p.add_argument("--output", help="write the report here instead of stdout")
    p.add_argument("--tolerance", type=float, default=None, help="SDP gap tolerance")
    p.add_argument("--jobs", type=int, default=1, help="worker threads")
    p.add_argument("--seed", type=int, default=0, help="base seed for sampling")


def _sampling(p, default_r=3):
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--r", type=int, default=default_r)
    p.add_argument("--kind", choices=fuzz.KINDS, default="mixed-wishart")
    p.add_argument("--dof", type=int, default=None, help="Wishart degrees of freedom")
    p.add_argument("--weighting", choices=fuzz.WEIGHTINGS, default="uniform")
    p.add_argument("--scale", type=float, default=1.0, help="scale of unnormalized weights")


def build_parser():
    parser = argparse.ArgumentParser(prog="discrimlab",
                                     description="Quantum multiple-hypothesis discrimination lab")
    sub = parser.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("discriminate", help="optimal POVM with certificate")
    _common(p)
    p.add_argument("--emit-povm", action="store_true")
    p.set_defaults(func=cmd_discriminate)

    p = sub.add_parser("bounds", help="evaluate the bound suite")
    _common(p)
    p.add_argument("--suite", choices=bounds.SUITES, default="all")
    p.add_argument("--sample", action="store_true", help="draw the ensemble from sampling flags")
    _sampling(p)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("exponent", help="error-exponent series")
    _common(p)
    p.add_argument("--n-max", type=int, required=True)
    p.add_argument("--pure-gram", action="store_true", help="pure-state Gram path")
    p.add_argument("--method", choices=asymptotics.METHODS, default="auto")
    p.add_argument("--averaged", metavar="P[,Q...]",
                   help="averaged series: first hypothesis is rho, the rest are sigmas")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--verdict", help="write the verdict JSON here (csv format)")
    p.set_defaults(func=cmd_exponent)

    p = sub.add_parser("fuzz", help="conjecture fuzzing campaign")
    _common(p)
    p.add_argument("--conjecture", choices=fuzz.CONJECTURES, required=True)
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--recheck", choices=fuzz.RECHECK, default="full")
    p.add_argument("--findings", help="write exceedances here")
    _sampling(p)
    p.set_defaults(func=cmd_fuzz)

    p = sub.add_parser("lub", help="least upper (or greatest lower) bound")
    _common(p)
    p.add_argument("--glb", action="store_true")
    p.set_defaults(func=cmd_lub)
    return parser


def _error(code, kind, message, **extra):
    obj = {"schema_version": SCHEMA_VERSION, "error": kind, "message": message,
           "exit_code": code}
    obj.update({k: v for k, v in extra.items() if v is not None})
    sys.stderr.write(json.dumps(obj, sort_keys=True, default=str) + "\n")
    return code


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ParseError as exc:
        return _error(EXIT_PARSE, "parse", str(exc))
    except (DomainError, DegenerateInputError) as exc:
        return _error(EXIT_DOMAIN, "domain", str(exc),
                      min_eigenvalue=getattr(exc, "min_eigenvalue", None))
    except ConvergenceError as exc:
        return _error(EXIT_CONVERGENCE, "convergence", str(exc),
                      details={k: _num(v) if isinstance(v, float) else str(v)
                               for k, v in exc.details.items()})
    except ResourceError as exc:
        return _error(EXIT_RESOURCE, "resource", str(exc))
    except PreconditionError as exc:
        return _error(EXIT_PARSE, "precondition", str(exc))
    except OSError as exc:
        return _error(EXIT_PARSE, "io", str(exc))


if __name__ == "__main__":
    sys.exit(main())
