"""Command-line front end.

Subcommands::

    gnx regime gn|riesz ...        exponent algebra and classification
    gnx optimize gn|riesz ...      extremizer search, writes report + profile
    gnx energy --field F ...       Riesz energy of a stored field
    gnx field --kind K ...         write an analytic profile as GNFLD1
    gnx demo endpoint ...          non-attainment table at theta = r/s
    gnx verify NAME ...            lemma verification sweeps

Exit codes: 0 success, 2 domain or regime rejection, 3 I/O failure,
4 verification failure. Every JSON report carries ``"schema": "gnx-1"`` and
the fully resolved configuration.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import subprocess
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

SCHEMA = "gnx-1"

EXIT_OK = 0
EXIT_DOMAIN = 2
EXIT_IO = 3
EXIT_VERIFY = 4

DEFAULT_DELTAS = "0.25,0.125,0.0625"


class DomainError(Exception):
    """Rejected parameters; maps to exit code 2."""


class VerificationFailure(Exception):
    """A verification or demo assertion failed; maps to exit code 4."""


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        if math.isnan(v):
            return None
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return v
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj


def dumps(obj):
    return json.dumps(_jsonable(obj), indent=2, sort_keys=True) + "\n"


def _emit(report, out=None):
    text = dumps(report)
    if out:
        try:
            Path(out).write_text(text)
        except OSError as exc:
            raise OSError(f"cannot write {out}: {exc}") from exc
    sys.stdout.write(text)


def _resolved(args):
    skip = {"func", "config", "sweep"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def _base_report(args, command):
    from ._accel import thread_count, use_numba

    return {"schema": SCHEMA, "command": command, "config": _resolved(args),
            "threads": thread_count(), "numba": use_numba()}


# -- regime ------------------------------------------------------------------

def _gn_params(args):
    from .regimes import GNParams

    return GNParams(args.d, args.r, args.s, args.p, args.q)


def _riesz_params(args):
    from .regimes import RieszParams

    return RieszParams(args.d, args.s, args.lam, args.p)


def cmd_regime(args):
    from .regimes import classify_gn, classify_riesz

    if args.family == "gn":
        params = _gn_params(args)
        cls = classify_gn(params)
    else:
        params = _riesz_params(args)
        cls = classify_riesz(params)
    report = _base_report(args, f"regime {args.family}")
    report.update({"params": params.as_dict(), "theta": params.theta,
                   "class": cls.kind, "reason": cls.reason})
    if args.family == "riesz":
        report["case"] = cls.case
    _emit(report, args.out)
    # only the attained regime is accepted for optimization
    return EXIT_OK if cls.attained else EXIT_DOMAIN


# -- optimize ----------------------------------------------------------------

def _optimizer_config(args):
    from .solver import OptimizerConfig

    try:
        return OptimizerConfig(max_iters=args.max_iters, tol=args.tol, step0=args.step0,
                               backtrack=args.backtrack,
                               recenter_every=args.recenter_every, seed=args.seed,
                               grad_tol=args.grad_tol)
    except ValueError as exc:
        raise DomainError(str(exc)) from exc


def _load_field(path):
    from .spectral import read_field

    try:
        return read_field(path)
    except FileNotFoundError as exc:
        raise OSError(f"cannot read {path}: no such file") from exc
    except ValueError as exc:
        # malformed files count as I/O failures, not domain errors
        raise OSError(str(exc)) from exc


def _resolve_init(args, d):
    from .spectral import make_grid

    init = args.init
    if init.startswith("file:"):
        f = _load_field(init[len("file:"):])
        if f.grid.d != d:
            raise DomainError(f"initial field has d = {f.grid.d}, parameters need d = {d}")
        return f.grid, f
    if init not in ("gaussian", "random", "sech"):
        raise DomainError(f"unknown init {init!r}")
    try:
        grid = make_grid(d, args.n, args.L)
    except ValueError as exc:
        raise DomainError(str(exc)) from exc
    return grid, init


def write_profile_csv(path, f):
    """Axis cut through the origin (the whole field when d = 1)."""
    grid = f.grid
    u = f.physical()
    mid = (grid.n // 2,) * (grid.d - 1)
    line = u[(slice(None),) + mid]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["x", "Re", "Im", "abs"])
    for x, v in zip(grid.axis(0), line):
        w.writerow([repr(float(x)), repr(float(v.real)), repr(float(v.imag)),
                    repr(float(abs(v)))])
    Path(path).write_text(buf.getvalue())


def cmd_optimize(args):
    from .regimes import classify_gn, classify_riesz
    from .solver import RegimeError, StepUnderflow, optimize_gn, optimize_riesz
    from .spectral import write_field

    if args.family == "gn":
        params = _gn_params(args)
        cls = classify_gn(params)
    else:
        params = _riesz_params(args)
        cls = classify_riesz(params)
    if not cls.attained:
        raise DomainError(f"regime {cls}: no maximizer to search for")
    cfg = _optimizer_config(args)
    grid, init = _resolve_init(args, params.d)
    out = Path(args.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create {out}: {exc}") from exc
    run = optimize_gn if args.family == "gn" else optimize_riesz
    try:
        rep = run(params, grid, cfg, init=init)
    except RegimeError as exc:
        raise DomainError(str(exc)) from exc
    except StepUnderflow as exc:
        raise VerificationFailure(str(exc)) from exc
    report = _base_report(args, f"optimize {args.family}")
    report.update({
        "params": params.as_dict(),
        "class": cls.kind,
        "grid": {"d": grid.d, "n": grid.n, "L": list(grid.L)},
        "optimizer": cfg.as_dict(),
        "result": rep.summary(),
        "best_quotient": rep.best_quotient,
        "converged": rep.converged,
    })
    write_field(out / "profile.gnfld", rep.profile)
    write_profile_csv(out / "profile.csv", rep.profile)
    (out / "report.json").write_text(dumps(report))
    print(f"best_quotient {rep.best_quotient:.10f}  iterations {rep.iters_used}  "
          f"converged {rep.converged}  gradient {rep.gradient_norm:.3e}")
    return EXIT_OK


# -- energy ------------------------------------------------------------------

def cmd_energy(args):
    from .functionals import RieszMethod, riesz_energy

    f = _load_field(args.field)
    if not 0 < args.lam < f.grid.d:
        raise DomainError(f"need 0 < lambda < d = {f.grid.d}, got {args.lam}")
    methods = ["fourier", "direct"] if args.method == "both" else [args.method]
    values = {}
    for m in methods:
        try:
            values[m] = riesz_energy(f, args.lam, RieszMethod(m))
        except ValueError as exc:
            raise DomainError(str(exc)) from exc
    report = _base_report(args, "energy")
    report["grid"] = {"d": f.grid.d, "n": f.grid.n, "L": list(f.grid.L)}
    report["energy"] = values
    if len(values) == 2:
        a, b = values["fourier"], values["direct"]
        scale = max(abs(a), abs(b))
        report["relative_difference"] = abs(a - b) / scale if scale > 0 else 0.0
    _emit(report, args.out)
    return EXIT_OK


# -- field -------------------------------------------------------------------

def cmd_field(args):
    from .spectral import make_grid, make_profile, write_field

    try:
        grid = make_grid(args.d, args.n, args.L)
        params = {}
        if args.kind == "gaussian":
            params["sigma"] = args.sigma
        elif args.kind == "sech":
            params["width"] = args.sigma
        elif args.kind == "fourier_bump":
            params["delta"] = args.delta
        elif args.kind == "random":
            params["seed"] = args.seed
        if args.kind == "zero":
            f = make_profile(grid, "gaussian") * 0.0
        else:
            f = make_profile(grid, args.kind, **params)
    except ValueError as exc:
        raise DomainError(str(exc)) from exc
    try:
        write_field(args.out, f)
    except OSError as exc:
        raise OSError(f"cannot write {args.out}: {exc}") from exc
    return EXIT_OK


# -- demo --------------------------------------------------------------------

def _parse_deltas(text):
    try:
        vals = [float(v) for v in str(text).split(",") if v.strip()]
    except ValueError as exc:
        raise DomainError(f"malformed delta list {text!r}") from exc
    if not vals:
        raise DomainError("empty delta list")
    for v in vals:
        if not 0 < v < 1:
            raise DomainError(f"delta must lie in (0, 1), got {v}")
    return vals


def cmd_demo(args):
    from .solver import ENDPOINT_GRID, endpoint_demo, endpoint_monotone
    from .spectral import make_grid

    deltas = _parse_deltas(args.deltas)
    n = args.n or ENDPOINT_GRID[1]
    L = args.L or ENDPOINT_GRID[2]
    try:
        grid = make_grid(1, n, L)
    except ValueError as exc:
        raise DomainError(str(exc)) from exc
    rows = endpoint_demo(deltas, grid)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["delta", "closed_form", "grid_value", "abs_diff"])
    for r in rows:
        w.writerow([f"{r.delta:.10g}", f"{r.closed_form:.10f}", f"{r.grid_value:.10f}",
                    f"{r.abs_diff:.3e}"])
    text = buf.getvalue()
    if args.out:
        Path(args.out).write_text(text)
    sys.stdout.write(text)
    problems = []
    if not endpoint_monotone(rows):
        problems.append("quotients do not increase strictly toward 1 as delta decreases")
    for r in rows:
        if r.abs_diff > args.tolerance:
            problems.append(f"delta={r.delta}: |closed_form - grid_value| = "
                            f"{r.abs_diff:.3e} > {args.tolerance:g}")
    if problems:
        raise VerificationFailure("; ".join(problems))
    return EXIT_OK


# -- verify ------------------------------------------------------------------

def _verify_pqr(args):
    from .lemmas import pqr_constants, pqr_sweep, superlevel_measure
    from .spectral import Field, make_grid

    k = pqr_constants(1, 2, 3, 1, 2, 4)
    worked = (k.eta, k.M, k.c) == (0.5, 8.0, 1 / 64)
    grid = make_grid(1, 256, 1.0)
    f = Field(grid, np.where(grid.axis(0) + 0.5 < 0.5, 2.0, 0.0))
    worked_measure = superlevel_measure(f, k.eta)
    cases = pqr_sweep(args.trials, args.seed)
    slack = [c.slack for c in cases]
    violations = sum(1 for v in slack if v < 1)
    return {
        "trials": len(cases),
        "violations": violations,
        "min_slack_ratio": min(slack),
        "worked_example": {"eta": k.eta, "M": k.M, "c": k.c, "matches": worked,
                           "measure": worked_measure},
        "pass": violations == 0 and worked and worked_measure >= k.c,
    }


def _verify_cauchy_schwarz(args):
    from .lemmas import riesz_cauchy_schwarz
    from .spectral import make_grid, make_profile

    grid = make_grid(2, args.n or 32, args.L or 10.0)
    rng = np.random.default_rng(args.seed)
    worst = 0.0
    violations = 0
    for _ in range(args.trials):
        s1, s2 = (int(v) for v in rng.integers(0, 2 ** 31, size=2))
        g = make_profile(grid, "random", seed=s1)
        h = make_profile(grid, "random", seed=s2)
        lhs, rhs = riesz_cauchy_schwarz(g, h, args.lam)
        ratio = lhs / rhs
        worst = max(worst, ratio)
        if lhs > rhs * (1 + 1e-9):
            violations += 1
    return {"trials": args.trials, "violations": violations, "max_ratio": worst,
            "pass": violations == 0}


def _parse_list(text):
    return [float(v) for v in str(text).split(",") if v.strip()]


def _verify_bl(args):
    from .lemmas import bl_nonlocal_verify
    from .spectral import Field, make_grid, make_profile

    grid = make_grid(3, args.n or 48, args.L or 32.0)
    f = make_profile(grid, "gaussian")
    seps = _parse_list(args.separations)
    lam = args.lam
    rep = bl_nonlocal_verify(f, f, seps, lam, p=[2.0, 4.0])
    zero = bl_nonlocal_verify(f, Field(grid, np.zeros(grid.shape)), seps, lam)
    slope = rep.slope()
    lo, hi = -lam - 0.5, -lam + 0.5
    cross_ok = all(abs(c) <= rep.residuals[0] * a ** (-lam + 0.5)
                   for a, c in zip(rep.separations, rep.cross_terms))
    scale = max(rep.residuals) + 1.0
    ident_ok = all(e <= 1e-9 * scale for e in rep.identity_errors)
    local_ok = all(all(abs(b) < abs(a) for a, b in zip(v, v[1:]))
                   for v in rep.local_residuals.values())
    ok = (rep.strictly_decreasing() and lo <= slope <= hi and cross_ok and ident_ok
          and local_ok and all(r == 0.0 for r in zero.residuals))
    return {
        "separations": rep.separations,
        "residuals": rep.residuals,
        "slope": slope,
        "slope_window": [lo, hi],
        "strictly_decreasing": rep.strictly_decreasing(),
        "cross_terms": rep.cross_terms,
        "remainders": rep.remainders,
        "identity_errors": rep.identity_errors,
        "local_residuals": {str(k): v for k, v in rep.local_residuals.items()},
        "zero_profile_residuals": zero.residuals,
        "pass": ok,
    }


def _corpus_protocol(args, ratio):
    from .lemmas import standard_corpus
    from .spectral import make_grid

    grid = make_grid(3, args.n or 32, args.L or 24.0)
    coarse = [ratio(u) for u in standard_corpus(grid)]
    fine = [ratio(u) for u in standard_corpus(grid.doubled())]
    c_max, f_max = max(coarse), max(fine)
    drift = abs(f_max - c_max) / c_max
    ok = all(math.isfinite(v) and v > 0 for v in coarse + fine) and drift <= 0.10
    return {"grid": {"d": 3, "n": grid.n, "L": list(grid.L)}, "corpus_size": len(coarse),
            "max_ratio": c_max, "max_ratio_doubled": f_max, "relative_drift": drift,
            "ratios": coarse, "pass": ok}


def _verify_refined_sobolev(args):
    from .lemmas import refined_sobolev_terms

    s = args.s
    q = 2 * 3 / (3 - 2 * s)
    return _corpus_protocol(args, lambda u: refined_sobolev_terms(u, s, q))


def _verify_interm_gn(args):
    from .lemmas import interm_gn_ratio

    return _corpus_protocol(args, lambda u: interm_gn_ratio(u, 3, args.s, args.lam, args.p))


VERIFIERS = {
    "pqr": _verify_pqr,
    "bl": _verify_bl,
    "cauchy-schwarz": _verify_cauchy_schwarz,
    "refined-sobolev": _verify_refined_sobolev,
    "interm-gn": _verify_interm_gn,
}


def cmd_verify(args):
    try:
        result = VERIFIERS[args.name](args)
    except ValueError as exc:
        raise DomainError(str(exc)) from exc
    report = _base_report(args, f"verify {args.name}")
    report["result"] = result
    report["pass"] = bool(result["pass"])
    _emit(report, args.out)
    print(f"{args.name}: {'pass' if result['pass'] else 'FAIL'}", file=sys.stderr)
    return EXIT_OK if result["pass"] else EXIT_VERIFY


# -- sweeps ------------------------------------------------------------------

def run_sweep(path, threads):
    """Run each job (an argv list) in its own process, concurrently."""
    try:
        jobs = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise OSError(f"cannot read sweep file {path}: {exc}") from exc
    if not isinstance(jobs, list) or not all(
            isinstance(j, list) and all(isinstance(a, str) for a in j) for j in jobs):
        raise DomainError("sweep file must be a JSON list of argument lists")

    def one(argv):
        proc = subprocess.run([sys.executable, "-m", "gnx", *argv], capture_output=True,
                              text=True)
        return proc.returncode, proc.stdout, proc.stderr

    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        results = list(pool.map(one, jobs))
    summary = []
    for i, (argv, (code, out, err)) in enumerate(zip(jobs, results)):
        summary.append({"job": i, "argv": argv, "exit": code, "stdout": out,
                        "stderr": err})
    sys.stdout.write(dumps({"schema": SCHEMA, "command": "sweep", "jobs": summary}))
    return max((r[0] for r in results), default=EXIT_OK)


# -- parser ------------------------------------------------------------------

def _common():
    p = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    p.add_argument("--config", help="JSON file of option defaults (flags win)")
    p.add_argument("--threads", type=int, help="worker threads (else GNX_THREADS)")
    return p


def _add_gn(p):
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--r", type=float, required=True)
    p.add_argument("--s", type=float, required=True)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--q", type=float, required=True)


def _add_riesz(p):
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--s", type=float, required=True)
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    p.add_argument("--p", type=float, required=True)


def _add_optimizer(p, n, L):
    p.add_argument("--n", type=int, default=n, help="points per axis")
    p.add_argument("--L", type=float, default=L, help="box side length")
    p.add_argument("--init", default="gaussian",
                   help="gaussian, random, sech or file:PATH (grid taken from the file)")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--max-iters", type=int, default=3000)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--step0", type=float, default=1.0)
    p.add_argument("--backtrack", type=float, default=0.5)
    p.add_argument("--recenter-every", type=int, default=25)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--grad-tol", type=float, default=1e-5)


def build_parser():
    common = _common()
    parser = argparse.ArgumentParser(prog="gnx", parents=[common],
                                     description=__doc__.split("\n\n")[0])
    parser.add_argument("--sweep", help="JSON list of argument lists to run concurrently")
    sub = parser.add_subparsers(dest="command")
    leaves = []

    reg = sub.add_parser("regime", help="theta and regime classification")
    reg_sub = reg.add_subparsers(dest="family", required=True)
    p = reg_sub.add_parser("gn", parents=[common])
    _add_gn(p)
    leaves.append(p)
    p = reg_sub.add_parser("riesz", parents=[common])
    _add_riesz(p)
    leaves.append(p)
    for p in leaves[-2:]:
        p.add_argument("--out", help="also write the report here")
        p.set_defaults(func=cmd_regime)

    opt = sub.add_parser("optimize", help="extremizer search")
    opt_sub = opt.add_subparsers(dest="family", required=True)
    p = opt_sub.add_parser("gn", parents=[common])
    _add_gn(p)
    _add_optimizer(p, 512, 60.0)
    p.set_defaults(func=cmd_optimize)
    leaves.append(p)
    p = opt_sub.add_parser("riesz", parents=[common])
    _add_riesz(p)
    _add_optimizer(p, 32, 16.0)
    p.set_defaults(func=cmd_optimize)
    leaves.append(p)

    p = sub.add_parser("energy", parents=[common], help="Riesz energy of a field file")
    p.add_argument("--field", required=True)
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    p.add_argument("--method", choices=["fourier", "direct", "both"], default="fourier")
    p.add_argument("--out")
    p.set_defaults(func=cmd_energy)
    leaves.append(p)

    p = sub.add_parser("field", parents=[common], help="write an analytic profile")
    p.add_argument("--kind", required=True,
                   choices=["gaussian", "sech", "fourier_bump", "random", "zero"])
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--L", type=float, required=True)
    p.add_argument("--sigma", type=float, default=1.0, help="gaussian width / sech width")
    p.add_argument("--delta", type=float, default=0.25)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_field)
    leaves.append(p)

    demo = sub.add_parser("demo", help="closed-form demonstrations")
    demo_sub = demo.add_subparsers(dest="demo", required=True)
    p = demo_sub.add_parser("endpoint", parents=[common])
    p.add_argument("--deltas", default=DEFAULT_DELTAS)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--L", type=float, default=None)
    p.add_argument("--tolerance", type=float, default=1e-4)
    p.add_argument("--out")
    p.set_defaults(func=cmd_demo)
    leaves.append(p)

    p = sub.add_parser("verify", parents=[common], help="lemma verification")
    p.add_argument("name", choices=sorted(VERIFIERS))
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--lambda", dest="lam", type=float, default=1.0)
    p.add_argument("--s", type=float, default=1.0)
    p.add_argument("--p", type=float, default=2.0)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--L", type=float, default=None)
    p.add_argument("--separations", default="4,6,8")
    p.add_argument("--out")
    p.set_defaults(func=cmd_verify)
    leaves.append(p)
    return parser, leaves


def _config_path(argv):
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    return known.config


def _apply_config(path, leaves):
    try:
        cfg = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise OSError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(cfg, dict):
        raise DomainError("config file must hold a JSON object")
    cfg = {k.replace("-", "_"): v for k, v in cfg.items()}
    if "lambda" in cfg:
        cfg["lam"] = cfg.pop("lambda")
    known = set()
    for leaf in leaves:
        dests = {a.dest for a in leaf._actions}
        mine = {k: v for k, v in cfg.items() if k in dests}
        known |= set(mine)
        for action in leaf._actions:
            if action.dest in mine:
                action.required = False
        leaf.set_defaults(**mine)
    unknown = sorted(set(cfg) - known - {"threads"})
    if unknown:
        raise DomainError(f"unknown config keys: {', '.join(unknown)}")
    return cfg


def _set_threads(count):
    from . import kernels

    os.environ["GNX_THREADS"] = str(max(1, int(count)))
    kernels.set_threads(count)


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    parser, leaves = build_parser()
    try:
        cfg = {}
        path = _config_path(argv)
        if path:
            cfg = _apply_config(path, leaves)
        args = parser.parse_args(argv)
        threads = getattr(args, "threads", None) or cfg.get("threads")
        if threads:
            _set_threads(threads)
            args.threads = int(threads)
        if getattr(args, "sweep", None):
            from ._accel import thread_count

            return run_sweep(args.sweep, thread_count())
        if not hasattr(args, "func"):
            parser.print_usage(sys.stderr)
            return EXIT_DOMAIN
        return args.func(args)
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except VerificationFailure as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
