"""Command line interface: ``tentropy {validate,spectral,tau,verify}``.

Exit codes: 0 all checks passed, 1 input or validation error, 2 a
mathematical check failed beyond tolerance.
"""

import argparse
import csv
import io
import json
import os
import sys
import time

import numpy as np

from . import dynamics, entropy, transfer, varprinciple
from ._validation import ext_close, ext_sub, format_ext, jsonable
from .errors import TEntropyError
from .io import SpecError, as_probability, load_spec, random_spec

EXIT_OK, EXIT_INPUT, EXIT_CHECK = 0, 1, 2

SUITE_DEFAULTS = {
    "vp": {"tol": 1e-8, "n_points": 20},
    "equiv": {"tol": 1e-6, "n_points": 8},
    "legendre": {"tol": 1e-3, "n_points": 20},
}

CSV_COLUMNS = {
    "vp": ["trial", "n", "lambda", "best", "gap", "pass"],
    "equiv": ["trial", "n", "old", "new", "gap", "pass"],
    "legendre": ["trial", "n", "exact", "numeric", "gap", "pass"],
}


def _default_seed():
    env = os.environ.get("TENTROPY_SEED")
    return int(env) if env not in (None, "") else 0


def _emit(report, out):
    out.write(json.dumps(jsonable(report), indent=2, allow_nan=False) + "\n")


def _finish(report, args, started):
    if getattr(args, "timing", False):
        report["timing"] = {"wall_seconds": time.perf_counter() - started}
    return report


# -- validate ---------------------------------------------------------------

def homological_residual(T, n_pairs=100, seed=0):
    """Worst ``||A((f o alpha) g) - f Ag||_inf`` and worst negativity of ``Ag``."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    min_out = 0.0
    for _ in range(n_pairs):
        f = rng.uniform(-1.0, 1.0, T.size)
        g = rng.uniform(-1.0, 1.0, T.size)
        lhs = transfer.apply(T, T.system.compose(f) * g)
        worst = max(worst, float(np.max(np.abs(lhs - f * transfer.apply(T, g)))))
        min_out = min(min_out, float(transfer.apply(T, np.abs(g)).min()))
    return worst, min_out


def cmd_validate(args, out):
    started = time.perf_counter()
    spec = load_spec(args.system)
    T = spec.operator()
    resid, min_out = homological_residual(T, seed=args.seed)
    passed = resid <= args.tol and min_out >= 0.0
    report = {
        "command": "validate",
        "inputs": {"system": args.system},
        "config": {"seed": args.seed, "tol": args.tol, "pairs": 100},
        "results": {
            "n": spec.n,
            "homological_residual": resid,
            "positivity_min": min_out,
            "pass": passed,
        },
    }
    _emit(_finish(report, args, started), out)
    return EXIT_OK if passed else EXIT_CHECK


# -- spectral ---------------------------------------------------------------

def cmd_spectral(args, out):
    started = time.perf_counter()
    spec = load_spec(args.system)
    T, phi = spec.operator(), spec.phi()
    results = {}
    status = EXIT_OK
    if args.method in ("cycles", "both"):
        exact = transfer.log_spectral_radius_cycles(T, phi)
        results["cycles"] = {
            "lambda": format_ext(exact.log_radius),
            "witness_cycle": list(exact.witness_cycle.points),
        }
    if args.method in ("power", "both"):
        approx = transfer.log_spectral_radius_power(T, phi, squarings=args.squarings, tol=args.tol)
        results["power"] = {
            "lambda": format_ext(approx.log_radius),
            "squarings": approx.iterations,
            "converged": approx.converged,
        }
    if args.method == "both":
        a, b = exact.log_radius, approx.log_radius
        agree = ext_close(a, b, args.tol)
        results["disagreement"] = format_ext(abs(ext_sub(a, b)))
        results["agree"] = agree
        if not agree:
            status = EXIT_CHECK
    report = {
        "command": "spectral",
        "inputs": {"system": args.system, "potential": "file" if spec.potential else "zero"},
        "config": {"method": args.method, "tol": args.tol, "squarings": args.squarings},
        "results": results,
    }
    _emit(_finish(report, args, started), out)
    return status


# -- tau --------------------------------------------------------------------

def _parse_mixture(text, n_cycles):
    coeffs = np.zeros(n_cycles)
    for part in text.split(","):
        try:
            idx, val = part.split(":")
            idx, val = int(idx), float(val)
        except ValueError:
            raise SpecError(f"bad mixture term {part!r}; expected INDEX:WEIGHT", field="mixture")
        if not 0 <= idx < n_cycles:
            raise SpecError(f"cycle index {idx} out of range (system has {n_cycles})",
                            field="mixture")
        coeffs[idx] += val
    return coeffs


def _resolve_measure(args, spec):
    system = spec.system()
    cycles = dynamics.cycle_decomposition(system)
    if args.cycle is not None:
        if not 0 <= args.cycle < len(cycles):
            raise SpecError(f"cycle index {args.cycle} out of range (system has {len(cycles)})",
                            field="cycle")
        return dynamics.cycle_measure(system, cycles[args.cycle]), f"cycle {args.cycle}"
    if args.mixture is not None:
        coeffs = _parse_mixture(args.mixture, len(cycles))
        vertices = [dynamics.cycle_measure(system, c) for c in cycles]
        return dynamics.mix(vertices, coeffs), f"mixture {args.mixture}"
    if args.measure is not None:
        with open(args.measure) as fh:
            doc = json.load(fh)
        values = doc.get("measure") if isinstance(doc, dict) else doc
        if not isinstance(values, list) or len(values) != spec.n:
            raise SpecError(f"measure must be an array of length {spec.n}", field="measure")
        return as_probability(values), f"file {args.measure}"
    if spec.measure is not None:
        return as_probability(spec.measure), "spec"
    raise SpecError("no measure: give --measure, --cycle or --mixture, or a 'measure' field",
                    field="measure")


DEFINITION_NAMES = {
    entropy.NEW: "new definition (m = mu)",
    entropy.ORIGINAL: "original definition (sup over m)",
}


def cmd_tau(args, out):
    started = time.perf_counter()
    spec = load_spec(args.system)
    T = spec.operator()
    mu, source = _resolve_measure(args, spec)
    res = entropy.tau(T, mu, n_max=args.n_max, n_random=args.partitions, seed=args.seed,
                      invariant_tol=args.invariant_tol)
    results = {
        "tau": format_ext(res.tau),
        "definition": DEFINITION_NAMES[res.definition],
        "invariant": res.definition == entropy.NEW,
        "witness": {
            "n": res.best_n,
            "partition": res.best_label,
            "elements": res.best_partition.elements.tolist(),
        },
        "evaluations": res.evaluations,
    }
    if res.best_m is not None:
        results["witness"]["m"] = res.best_m.weights.tolist()
    report = {
        "command": "tau",
        "inputs": {"system": args.system, "measure": source, "mu": mu.weights.tolist()},
        "config": {"n_max": args.n_max, "partitions": args.partitions, "seed": args.seed,
                   "invariant_tol": args.invariant_tol},
        "results": results,
    }
    _emit(_finish(report, args, started), out)
    return EXIT_OK


# -- verify -----------------------------------------------------------------

def _trial_rng(seed, trial):
    return np.random.default_rng([seed, trial])


def _sample_mixtures(rng, system, count):
    cycles = dynamics.cycle_decomposition(system)
    vertices = [dynamics.cycle_measure(system, c) for c in cycles]
    out = []
    for _ in range(count):
        p = rng.dirichlet(np.ones(len(cycles)))
        out.append(dynamics.mix(vertices, p / p.sum()))
    return vertices, out


def run_vp_trial(seed, trial, n_points, tol, mixtures=100):
    rng = _trial_rng(seed, trial)
    spec = random_spec(rng, n_points)
    rep = varprinciple.check_variational_principle(
        spec.operator(), spec.phi(), tol=tol, mixtures=mixtures, seed=int(rng.integers(2**31)))
    return {
        "trial": trial, "n": spec.n, "system": spec.digest(),
        "lambda": format_ext(rep.lam), "best": format_ext(rep.best_value),
        "gap": rep.gap, "max_excess": rep.max_excess, "pass": rep.passed,
    }


def run_equiv_trial(seed, trial, n_points, tol, n_max=4, partitions=32, mixtures=3):
    rng = _trial_rng(seed, trial)
    spec = random_spec(rng, n_points)
    T = spec.operator()
    vertices, mixed = _sample_mixtures(rng, T.system, mixtures)
    worst = None
    dominance = 0.0
    passed = True
    for mu in vertices + mixed:
        rep = varprinciple.check_definition_equivalence(
            T, mu, n_max=n_max, n_random=partitions, seed=trial, tol=tol)
        gap = abs(ext_sub(rep.old_value, rep.new_value))
        dominance = max(dominance, rep.max_dominance_violation)
        passed &= rep.passed
        if worst is None or gap > worst[0]:
            worst = (gap, rep)
    passed &= dominance <= 1e-9
    gap, rep = worst
    return {
        "trial": trial, "n": spec.n, "system": spec.digest(),
        "old": format_ext(rep.old_value), "new": format_ext(rep.new_value),
        "gap": gap, "max_dominance_violation": dominance,
        "measures": len(vertices) + len(mixed), "pass": bool(passed),
    }


def run_legendre_trial(seed, trial, n_points, tol, mixtures=1):
    rng = _trial_rng(seed, trial)
    spec = random_spec(rng, n_points)
    T = spec.operator()
    vertices, mixed = _sample_mixtures(rng, T.system, mixtures)
    worst = None
    passed = True
    for mu in vertices + mixed:
        rep = varprinciple.legendre_dual_tau(T, mu, tol=tol)
        closed = entropy.tau_invariant_closed_form(T, mu)
        gap = abs(ext_sub(rep.numeric, rep.exact))
        ok = rep.agreed and ext_close(rep.value, closed, tol)
        passed &= ok
        if worst is None or gap > worst[0]:
            worst = (gap, rep)
    gap, rep = worst
    return {
        "trial": trial, "n": spec.n, "system": spec.digest(),
        "exact": format_ext(rep.exact), "numeric": format_ext(rep.numeric),
        "gap": gap, "measures": len(vertices) + len(mixed), "pass": bool(passed),
    }


RUNNERS = {"vp": run_vp_trial, "equiv": run_equiv_trial, "legendre": run_legendre_trial}


def run_suite(suite, count, seed, n_points=None, tol=None):
    cfg = dict(SUITE_DEFAULTS[suite])
    if n_points is not None:
        cfg["n_points"] = n_points
    if tol is not None:
        cfg["tol"] = tol
    rows = [RUNNERS[suite](seed, t, cfg["n_points"], cfg["tol"]) for t in range(count)]
    return cfg, rows


def _csv_cell(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v) if np.isfinite(v) else format_ext(v)
    return str(v)


def _to_csv(sections):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    multi = len(sections) > 1
    for suite, rows in sections.items():
        cols = CSV_COLUMNS[suite]
        writer.writerow((["suite"] if multi else []) + cols)
        for row in rows:
            writer.writerow(([suite] if multi else []) + [_csv_cell(row[c]) for c in cols])
    return buf.getvalue()


def _to_md(sections):
    lines = []
    for suite, rows in sections.items():
        cols = CSV_COLUMNS[suite]
        lines.append(f"### {suite}")
        lines.append("")
        lines.append("| " + " | ".join(cols) + " |")
        lines.append("|" + "---|" * len(cols))
        for row in rows:
            lines.append("| " + " | ".join(_csv_cell(row[c]) for c in cols) + " |")
        lines.append("")
    return "\n".join(lines)


def cmd_verify(args, out):
    started = time.perf_counter()
    suites = list(RUNNERS) if args.suite == "all" else [args.suite]
    sections, configs = {}, {}
    for suite in suites:
        cfg, rows = run_suite(suite, args.count, args.seed, args.n_points, args.tol)
        sections[suite] = rows
        configs[suite] = cfg
    passed = all(r["pass"] for rows in sections.values() for r in rows)
    if args.format == "csv":
        out.write(_to_csv(sections))
    elif args.format == "md":
        out.write(_to_md(sections))
    else:
        report = {
            "command": "verify",
            "inputs": {"suite": args.suite, "count": args.count},
            "config": {"seed": args.seed, "suites": configs},
            "results": {
                "pass": passed,
                "suites": {
                    s: {
                        "pass": all(r["pass"] for r in rows),
                        "max_gap": max((r["gap"] for r in rows), default=0.0),
                        "rows": rows,
                    }
                    for s, rows in sections.items()
                },
            },
        }
        _emit(_finish(report, args, started), out)
    return EXIT_OK if passed else EXIT_CHECK


# -- entry point ------------------------------------------------------------

def build_parser():
    seed = _default_seed()
    parser = argparse.ArgumentParser(prog="tentropy", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check positivity and the homological identity")
    p.add_argument("system")
    p.add_argument("--tol", type=float, default=1e-12)
    p.add_argument("--seed", type=int, default=seed)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("spectral", help="log spectral radius lambda(phi)")
    p.add_argument("system")
    p.add_argument("--method", choices=["cycles", "power", "both"], default="both")
    p.add_argument("--tol", type=float, default=1e-3)
    p.add_argument("--squarings", type=int, default=20)
    p.set_defaults(func=cmd_spectral)

    p = sub.add_parser("tau", help="t-entropy of a measure")
    p.add_argument("system")
    src = p.add_mutually_exclusive_group()
    src.add_argument("--measure", help="JSON file with a measure array")
    src.add_argument("--cycle", type=int, help="uniform measure on cycle K (0-based)")
    src.add_argument("--mixture", help="cycle mixture, e.g. '0:0.5,1:0.5'")
    p.add_argument("--n-max", type=int, default=6)
    p.add_argument("--partitions", type=int, default=32)
    p.add_argument("--seed", type=int, default=seed)
    p.add_argument("--invariant-tol", type=float, default=1e-9)
    p.set_defaults(func=cmd_tau)

    p = sub.add_parser("verify", help="randomised sweeps of the main identities")
    p.add_argument("--suite", choices=["vp", "equiv", "legendre", "all"], default="all")
    p.add_argument("--count", type=int, default=100)
    p.add_argument("--n-points", type=int, default=None)
    p.add_argument("--seed", type=int, default=seed)
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--format", choices=["json", "csv", "md"], default="json")
    p.set_defaults(func=cmd_verify)

    for p in sub.choices.values():
        p.add_argument("--timing", action="store_true", help="add wall time to the report")
    return parser


def main(argv=None, out=None):
    out = sys.stdout if out is None else out
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args, out)
    except (TEntropyError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
