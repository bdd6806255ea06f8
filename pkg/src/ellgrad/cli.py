"""Command-line surface: check, find-lambda, bound, solve, verify, liouville, sweep.

Every command prints one JSON report with the same top-level keys
(command, config, inputs, hypotheses, bound, statistic, margin, verdict)
and exits 0 on pass, 1 on fail, 2 on error, 3 when no verdict applies.
Floats are printed with 17 significant digits.

Configuration is a flat key=value text file (keys equal flag names, '#'
comments allowed) named by --config or the ELLGRAD_CONFIG environment
variable; command-line flags override it. The effective configuration is
echoed in every report.
"""

from __future__ import annotations

import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from itertools import product

import click

from . import __version__, bounds, conditions, geometry, hexpr, solver, verify
from .backend import active_backend
from .output import dumps, write_csv

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_ERROR = 2
EXIT_NO_VERDICT = 3

_VERDICT_EXIT = {
    "pass": EXIT_PASS,
    "fail": EXIT_FAIL,
    "error": EXIT_ERROR,
    "not_applicable": EXIT_NO_VERDICT,
    "no_verdict": EXIT_NO_VERDICT,
}


class CliError(click.ClickException):
    exit_code = EXIT_ERROR


def load_config(path: str | None) -> dict:
    """Flat key=value config file; missing path from the env is an error."""
    if not path:
        return {}
    if not os.path.exists(path):
        raise CliError(f"config file not found: {path}")
    cfg = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise CliError(f"{path}:{lineno}: expected key=value, got {raw!r}")
            key, val = line.split("=", 1)
            cfg[key.strip()] = val.strip()
    return cfg


def _pick(cfg, val, key, default, cast=float):
    if val is not None:
        return val
    if key in cfg:
        try:
            return cast(cfg[key])
        except ValueError as exc:
            raise CliError(f"config key {key!r}: {exc}") from None
    return default


def _parse_srange(text: str) -> tuple:
    try:
        lo, hi = text.split(":")
        return float(lo), float(hi)
    except ValueError:
        raise CliError(f"expected s-range as 'lo:hi', got {text!r}") from None


def _parse_params(pairs) -> dict:
    out = {}
    for pair in pairs:
        if "=" not in pair:
            raise CliError(f"expected name=value, got {pair!r}")
        name, val = pair.split("=", 1)
        try:
            out[name.strip()] = float(val)
        except ValueError:
            raise CliError(f"parameter {name!r}: not a number: {val!r}") from None
    return out


def _parse_float_list(text: str) -> list:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise CliError(f"expected a comma-separated number list, got {text!r}") from None


def _check_writable(path: str) -> None:
    parent = os.path.dirname(os.path.abspath(path))
    if not os.path.isdir(parent) or not os.access(parent, os.W_OK):
        raise CliError(f"output path not writable: {path}")


def _cond_dict(rep: conditions.ConditionReport | None):
    if rep is None:
        return None
    return {
        "system": rep.system,
        "lambda": rep.lam,
        "s_range": [rep.s_lo, rep.s_hi],
        "samples": rep.samples,
        "verdict": rep.verdict,
        "margin": rep.margin,
        "violations": [
            {"s": v.s, "inequality": v.inequality, "value": v.value}
            for v in rep.violations
        ],
    }


def _bound_dict(rep: bounds.BoundReport | None):
    if rep is None:
        return None
    return {
        "value": rep.value,
        "branch": rep.branch,
        "branch_values": rep.branch_values,
        "minimizer": rep.minimizer,
        "minimizer_interval": rep.minimizer_interval,
        "scan_neighbors": rep.scan_neighbors,
        "A": rep.A,
        "L": rep.L,
        "variant": rep.variant,
        "c1": rep.cutoff.c1,
        "c2": rep.cutoff.c2,
    }


def _range_dict(rng):
    if rng is None:
        return None
    return {
        "u_min": rng.u_min,
        "u_max": rng.u_max,
        "s_lo": rng.s_lo,
        "s_hi": rng.s_hi,
        "empty": rng.empty,
    }


def _report(command, config, inputs, hypotheses=None, bound=None, statistic=None,
            margin=None, verdict="pass", **extra):
    rep = {
        "command": command,
        "config": config,
        "inputs": inputs,
        "hypotheses": hypotheses,
        "bound": bound,
        "statistic": statistic,
        "margin": margin,
        "verdict": verdict,
    }
    rep.update(extra)
    return rep


def _emit(ctx, rep, exit_code=None):
    click.echo(dumps(rep))
    ctx.exit(_VERDICT_EXIT[rep["verdict"]] if exit_code is None else exit_code)


def _fail_with_error(ctx, command, config, inputs, exc):
    rep = _report(command, config, inputs, verdict="error", error=str(exc))
    click.echo(dumps(rep))
    ctx.exit(EXIT_ERROR)


_RUN_ERRORS = (
    ValueError,
    hexpr.ExprError,
    solver.SolveError,
    bounds.MinimizationError,
    CliError,
)


@click.group()
@click.version_option(version=__version__, prog_name="ellgrad")
@click.option("--config", "config_path", default=None, metavar="PATH",
              help="Flat key=value config file (default: $ELLGRAD_CONFIG).")
@click.pass_context
def main(ctx, config_path):
    """Verification toolkit for gradient bounds of Delta u + u h(ln u) = 0.

    Reports are JSON on stdout; exit 0 pass, 1 fail, 2 error, 3 no verdict.
    """
    ctx.obj = load_config(config_path or os.environ.get("ELLGRAD_CONFIG"))


# --- check -------------------------------------------------------------------


@main.command()
@click.option("--h", "h_text", required=True, help="Nonlinearity h(s) as text.")
@click.option("--system", type=click.Choice(conditions.SYSTEMS), default="1.9",
              show_default=True)
@click.option("--lambda", "lam", type=float, default=0.0, show_default=True,
              help="Weight used by the full system.")
@click.option("--n", type=int, default=3, show_default=True)
@click.option("--K", "K", type=float, default=0.0, show_default=True)
@click.option("--s-range", "s_range", default=None, metavar="LO:HI")
@click.option("--samples", type=int, default=None)
@click.option("--param", "params", multiple=True, metavar="NAME=VALUE")
@click.pass_context
def check(ctx, h_text, system, lam, n, K, s_range, samples, params):
    """Check an admissibility system for h over a sampled s range."""
    cfg = ctx.obj
    s_range = _parse_srange(_pick(cfg, s_range, "s-range", "-8:8", str))
    samples = _pick(cfg, samples, "samples", conditions.DEFAULT_SAMPLES, int)
    config = {"s-range": list(s_range), "samples": samples,
              "eps-cond": conditions.EPS_COND, "backend": active_backend().name}
    inputs = {"h": h_text, "system": system, "lambda": lam, "n": n, "K": K,
              "params": _parse_params(params)}
    try:
        h = hexpr.parse(h_text)
        if system == "1.9":
            rep = conditions.check_system(h, lam, n, K, s_range, samples,
                                          inputs["params"])
        else:
            rep = conditions.check_corollary(h, system, n, K, s_range, samples,
                                             inputs["params"])
    except _RUN_ERRORS as exc:
        _fail_with_error(ctx, "check", config, inputs, exc)
        return
    _emit(ctx, _report("check", config, inputs, hypotheses=_cond_dict(rep),
                       margin=rep.margin, verdict=rep.verdict))


# --- find-lambda ---------------------------------------------------------------


@main.command("find-lambda")
@click.option("--h", "h_text", required=True)
@click.option("--lambda-grid", "grid_text", default="0,0.25,0.5,0.75,1",
              show_default=True, metavar="V1,V2,...")
@click.option("--n", type=int, default=3, show_default=True)
@click.option("--K", "K", type=float, default=0.0, show_default=True)
@click.option("--s-range", "s_range", default=None, metavar="LO:HI")
@click.option("--samples", type=int, default=None)
@click.option("--param", "params", multiple=True, metavar="NAME=VALUE")
@click.pass_context
def find_lambda_cmd(ctx, h_text, grid_text, n, K, s_range, samples, params):
    """Search a weight grid for values whose full-system check passes."""
    cfg = ctx.obj
    s_range = _parse_srange(_pick(cfg, s_range, "s-range", "-8:8", str))
    samples = _pick(cfg, samples, "samples", conditions.DEFAULT_SAMPLES, int)
    grid = _parse_float_list(grid_text)
    config = {"s-range": list(s_range), "samples": samples,
              "eps-cond": conditions.EPS_COND, "backend": active_backend().name}
    inputs = {"h": h_text, "lambda-grid": grid, "n": n, "K": K,
              "params": _parse_params(params)}
    try:
        h = hexpr.parse(h_text)
        found = conditions.find_lambda(h, n, K, s_range, samples, grid,
                                       inputs["params"])
    except _RUN_ERRORS as exc:
        _fail_with_error(ctx, "find-lambda", config, inputs, exc)
        return
    feasible = [lam for lam, _ in found]
    rep = _report(
        "find-lambda", config, inputs,
        statistic={"feasible": feasible,
                   "reports": [_cond_dict(r) for _, r in found]},
        verdict="pass" if feasible else "fail",
    )
    _emit(ctx, rep)


# --- bound -------------------------------------------------------------------


@main.command()
@click.option("--case", type=click.Choice(["case1", "case2", "general"]),
              required=True)
@click.option("--n", type=int, required=True)
@click.option("--K", "K", type=float, default=0.0, show_default=True)
@click.option("--R", "R", type=float, default=1.0, show_default=True)
@click.option("--p", type=float, default=None)
@click.option("--lambda1", type=float, default=None)
@click.option("--lambda2", type=float, default=None)
@click.option("--b", type=float, default=None)
@click.option("--c1", type=float, default=None)
@click.option("--c2", type=float, default=None)
@click.option("--variant", type=click.Choice(["stated", "proof"]), default=None)
@click.pass_context
def bound(ctx, case, n, K, R, p, lambda1, lambda2, b, c1, c2, variant):
    """Evaluate the explicit bound constant for a coefficient set."""
    cfg = ctx.obj
    c1 = _pick(cfg, c1, "c1", 2.0)
    c2 = _pick(cfg, c2, "c2", 2.0)
    variant = _pick(cfg, variant, "variant", "proof", str)
    config = {"c1": c1, "c2": c2, "variant": variant,
              "backend": active_backend().name}
    inputs = {"case": case, "n": n, "K": K, "R": R, "p": p, "lambda1": lambda1,
              "lambda2": lambda2, "b": b}
    try:
        cut = bounds.CutoffConstants(c1, c2)
        extra = {}
        if case == "general":
            brep = bounds.bound_general(n, K, R, cut, variant)
        else:
            spec = bounds.ProblemSpec(case, lambda1=lambda1, lambda2=lambda2,
                                      b=b, p=p)
            fn = bounds.bound_case1 if case == "case1" else bounds.bound_case2
            brep = fn(n, K, R, cut, spec)
            if b is not None and b < 0.0:
                extra["solution_range"] = _range_dict(
                    bounds.solution_range_from_bound(spec, brep.value))
    except _RUN_ERRORS as exc:
        _fail_with_error(ctx, "bound", config, inputs, exc)
        return
    _emit(ctx, _report("bound", config, inputs, bound=_bound_dict(brep),
                       statistic=brep.value, verdict="pass", **extra))


# --- solve -------------------------------------------------------------------


def _build_model(geometry_name, kappa, n):
    if geometry_name == "euclidean":
        if kappa not in (None, 0.0):
            raise ValueError("euclidean geometry has kappa = 0")
        return geometry.make_model(n, 0.0)
    if kappa is None or kappa >= 0.0:
        raise ValueError("hyperbolic geometry needs --kappa < 0")
    return geometry.make_model(n, kappa)


@main.command()
@click.option("--h", "h_text", required=True)
@click.option("--param", "params", multiple=True, metavar="NAME=VALUE")
@click.option("--geometry", "geometry_name",
              type=click.Choice(["euclidean", "hyperbolic"]), default="euclidean",
              show_default=True)
@click.option("--kappa", type=float, default=None,
              help="Sectional curvature (< 0, hyperbolic only).")
@click.option("--n", type=int, default=3, show_default=True)
@click.option("--u0", type=float, default=1.0, show_default=True)
@click.option("--rmax", type=float, required=True)
@click.option("--tol", type=float, default=None)
@click.option("--u-floor-frac", type=float, default=None)
@click.option("--resample", type=int, default=None)
@click.option("--out", "out_path", required=True, metavar="FILE.csv")
@click.pass_context
def solve(ctx, h_text, params, geometry_name, kappa, n, u0, rmax, tol,
          u_floor_frac, resample, out_path):
    """Integrate one radial profile and dump it as CSV (r, u, du, log_grad)."""
    cfg = ctx.obj
    tol = _pick(cfg, tol, "tol", 1e-8)
    u_floor_frac = _pick(cfg, u_floor_frac, "u-floor-frac",
                         solver.DEFAULT_FLOOR_FRACTION)
    resample = _pick(cfg, resample, "resample", solver.DEFAULT_GRID_SIZE, int)
    config = {"tol": tol, "u-floor-frac": u_floor_frac, "resample": resample,
              "backend": active_backend().name}
    inputs = {"h": h_text, "params": _parse_params(params),
              "geometry": geometry_name, "kappa": kappa, "n": n, "u0": u0,
              "rmax": rmax, "out": out_path}
    try:
        _check_writable(out_path)
        model = _build_model(geometry_name, kappa, n)
        h = hexpr.parse(h_text)
        sol = solver.solve_radial(model, h, inputs["params"], u0, rmax, tol,
                                  u_floor_frac * u0, resample)
    except _RUN_ERRORS as exc:
        _fail_with_error(ctx, "solve", config, inputs, exc)
        return
    lg = solver.log_gradient(sol)
    with open(out_path, "w") as fh:
        write_csv(fh, ["r", "u", "du", "log_grad"],
                  zip(sol.r, sol.u, sol.du, lg))
    stat = {
        "termination": sol.termination,
        "final_r": float(sol.r[-1]),
        "r_last": sol.r_last,
        "min_u": float(sol.u.min()),
        "max_u": float(sol.u.max()),
        "steps": sol.n_steps,
        "rejected_steps": sol.n_rejected,
        "samples": len(sol.r),
    }
    verdict = "fail" if sol.termination == "step_failure" else "pass"
    _emit(ctx, _report("solve", config, inputs, statistic=stat, verdict=verdict))


# --- verify -------------------------------------------------------------------


def _verify_pipeline(theorem, h_text, params, lam, lambda1, lambda2, b, p,
                     geometry_name, kappa, n, u0, R, tol, u_floor_frac,
                     resample, samples, c1, c2, variant):
    """Solve to 2R, gate on hypotheses, compare statistic against the bound.

    Returns (report_dict_fragment, verdict).
    """
    model = _build_model(geometry_name, kappa, n)
    cut = bounds.CutoffConstants(c1, c2)
    if theorem == "thm1.1":
        if lambda1 is None or lambda2 is None or b is None or p is None:
            raise ValueError("thm1.1 needs --lambda1 --lambda2 --b --p")
        case = "case1" if lambda1 > 0.0 else "case2"
        spec = bounds.ProblemSpec(case, lambda1=lambda1, lambda2=lambda2,
                                  b=b, p=p)
        h = spec.case_h()
        hparams = {}
    else:
        if h_text is None:
            raise ValueError(f"{theorem} needs --h")
        if lam is None:
            raise ValueError(f"{theorem} needs --lambda")
        h = hexpr.parse(h_text)
        hparams = params
        spec = bounds.ProblemSpec.general(h, lam, hparams)

    sol = solver.solve_radial(model, h, hparams, u0, 2.0 * R, tol,
                              u_floor_frac * u0, resample)
    grad = verify.verify_gradient_bound(sol, spec, R, cut, variant, samples)
    if theorem == "harnack":
        if grad.verdict in ("no_verdict", "not_applicable"):
            rep = grad
        else:
            rep = verify.verify_harnack(sol, R, grad.bound_value, grad.hypotheses)
            rep.bound = grad.bound
    else:
        rep = grad
    fragment = {
        "hypotheses": _cond_dict(rep.hypotheses),
        "bound": _bound_dict(rep.bound),
        "statistic": rep.statistic,
        "margin": rep.margin,
        "verdict": rep.verdict,
        "theorem": rep.theorem,
        "notes": rep.notes,
        "solve": {
            "termination": sol.termination,
            "final_r": float(sol.r[-1]),
            "min_u": float(sol.u.min()),
            "max_u": float(sol.u.max()),
        },
    }
    if "solution_range" in rep.extras:
        fragment["solution_range"] = _range_dict(rep.extras["solution_range"])
    if "gradient_constant" in rep.extras:
        fragment["gradient_constant"] = rep.extras["gradient_constant"]
    return fragment


_VERIFY_OPTIONS = [
    click.option("--theorem", type=click.Choice(["thm1.1", "thm1.2", "harnack"]),
                 required=True),
    click.option("--h", "h_text", default=None),
    click.option("--param", "params", multiple=True, metavar="NAME=VALUE"),
    click.option("--lambda", "lam", type=float, default=None),
    click.option("--lambda1", type=float, default=None),
    click.option("--lambda2", type=float, default=None),
    click.option("--b", type=float, default=None),
    click.option("--p", type=float, default=None),
    click.option("--geometry", "geometry_name",
                 type=click.Choice(["euclidean", "hyperbolic"]),
                 default="euclidean", show_default=True),
    click.option("--kappa", type=float, default=None),
    click.option("--n", type=int, default=3, show_default=True),
    click.option("--u0", type=float, default=1.0, show_default=True),
    click.option("--R", "R", type=float, required=True,
                 help="Verification ball; the solve runs to 2R."),
    click.option("--tol", type=float, default=None),
    click.option("--u-floor-frac", type=float, default=None),
    click.option("--resample", type=int, default=None),
    click.option("--samples", type=int, default=None),
    click.option("--c1", type=float, default=None),
    click.option("--c2", type=float, default=None),
    click.option("--variant", type=click.Choice(["stated", "proof"]), default=None),
]


def _add_options(options):
    def wrap(fn):
        for opt in reversed(options):
            fn = opt(fn)
        return fn
    return wrap


def _resolve_verify_cfg(cfg, tol, u_floor_frac, resample, samples, c1, c2, variant):
    return {
        "tol": _pick(cfg, tol, "tol", 1e-8),
        "u-floor-frac": _pick(cfg, u_floor_frac, "u-floor-frac",
                              solver.DEFAULT_FLOOR_FRACTION),
        "resample": _pick(cfg, resample, "resample", solver.DEFAULT_GRID_SIZE, int),
        "samples": _pick(cfg, samples, "samples", conditions.DEFAULT_SAMPLES, int),
        "c1": _pick(cfg, c1, "c1", 2.0),
        "c2": _pick(cfg, c2, "c2", 2.0),
        "variant": _pick(cfg, variant, "variant", "proof", str),
        "backend": active_backend().name,
    }


@main.command(name="verify")
@_add_options(_VERIFY_OPTIONS)
@click.pass_context
def verify_cmd(ctx, theorem, h_text, params, lam, lambda1, lambda2, b, p,
               geometry_name, kappa, n, u0, R, tol, u_floor_frac, resample,
               samples, c1, c2, variant):
    """Full pipeline: solve to 2R, check hypotheses, compare against the bound."""
    cfg = ctx.obj
    rc = _resolve_verify_cfg(cfg, tol, u_floor_frac, resample, samples, c1, c2,
                             variant)
    inputs = {"theorem": theorem, "h": h_text, "params": _parse_params(params),
              "lambda": lam, "lambda1": lambda1, "lambda2": lambda2, "b": b,
              "p": p, "geometry": geometry_name, "kappa": kappa, "n": n,
              "u0": u0, "R": R}
    try:
        frag = _verify_pipeline(
            theorem, h_text, inputs["params"], lam, lambda1, lambda2, b, p,
            geometry_name, kappa, n, u0, R, rc["tol"], rc["u-floor-frac"],
            rc["resample"], rc["samples"], rc["c1"], rc["c2"], rc["variant"])
    except _RUN_ERRORS as exc:
        _fail_with_error(ctx, "verify", rc, inputs, exc)
        return
    rep = _report("verify", rc, inputs,
                  hypotheses=frag.pop("hypotheses"),
                  bound=frag.pop("bound"),
                  statistic=frag.pop("statistic"),
                  margin=frag.pop("margin"),
                  verdict=frag.pop("verdict"),
                  **frag)
    _emit(ctx, rep)


# --- liouville -----------------------------------------------------------------


@main.command()
@click.option("--n", type=int, required=True)
@click.option("--c1", type=float, default=None)
@click.option("--c2", type=float, default=None)
@click.option("--variant", type=click.Choice(["stated", "proof"]), default=None)
@click.option("--R-list", "r_list_text", default="1,10,100", show_default=True,
              metavar="R1,R2,...")
@click.option("--csv", "csv_path", default=None, metavar="FILE.csv",
              help="Also write the decay table as CSV.")
@click.pass_context
def liouville(ctx, n, c1, c2, variant, r_list_text, csv_path):
    """Decay scan of the general bound at K = 0: rows (R, C, C*R^2)."""
    cfg = ctx.obj
    c1 = _pick(cfg, c1, "c1", 2.0)
    c2 = _pick(cfg, c2, "c2", 2.0)
    variant = _pick(cfg, variant, "variant", "proof", str)
    r_list = _parse_float_list(r_list_text)
    config = {"c1": c1, "c2": c2, "variant": variant,
              "backend": active_backend().name}
    inputs = {"n": n, "R-list": r_list}
    try:
        if csv_path:
            _check_writable(csv_path)
        cut = bounds.CutoffConstants(c1, c2)
        rows = verify.liouville_scan(n, cut, variant, r_list)
    except _RUN_ERRORS as exc:
        _fail_with_error(ctx, "liouville", config, inputs, exc)
        return
    spread = verify.max_rel_spread([cr2 for _, _, cr2 in rows])
    if csv_path:
        with open(csv_path, "w") as fh:
            write_csv(fh, ["R", "C", "C_R2"], rows)
    verdict = "pass" if spread <= 1e-6 else "fail"
    stat = {"rows": [{"R": r, "C": c, "C_R2": cr2} for r, c, cr2 in rows],
            "max_rel_spread": spread}
    _emit(ctx, _report("liouville", config, inputs, statistic=stat,
                       margin=1e-6 - spread, verdict=verdict))


# --- sweep -------------------------------------------------------------------

_SWEEP_SCALARS = {"u0", "lambda", "kappa", "R", "n", "lambda1", "lambda2",
                  "b", "p", "c1", "c2", "tol"}


@main.command()
@_add_options(_VERIFY_OPTIONS)
@click.option("--vary", "vary", multiple=True, metavar="KEY=V1,V2,...",
              help="Sweep axis; unknown keys vary h parameters.")
@click.option("--workers", type=int, default=None,
              help="Thread workers (0 = serial).")
@click.pass_context
def sweep(ctx, theorem, h_text, params, lam, lambda1, lambda2, b, p,
          geometry_name, kappa, n, u0, R, tol, u_floor_frac, resample,
          samples, c1, c2, variant, vary, workers):
    """Run the verify pipeline over a parameter grid, merged in input order."""
    cfg = ctx.obj
    rc = _resolve_verify_cfg(cfg, tol, u_floor_frac, resample, samples, c1, c2,
                             variant)
    workers = _pick(cfg, workers, "workers", 0, int)
    rc["workers"] = workers
    base_params = _parse_params(params)
    axes = []
    for spec_text in vary:
        if "=" not in spec_text:
            raise CliError(f"expected KEY=V1,V2,..., got {spec_text!r}")
        key, vals = spec_text.split("=", 1)
        axes.append((key.strip(), _parse_float_list(vals)))
    if not axes:
        raise CliError("sweep needs at least one --vary axis")
    inputs = {"theorem": theorem, "h": h_text, "params": base_params,
              "lambda": lam, "lambda1": lambda1, "lambda2": lambda2, "b": b,
              "p": p, "geometry": geometry_name, "kappa": kappa, "n": n,
              "u0": u0, "R": R,
              "vary": {k: v for k, v in axes}}

    combos = list(product(*[vals for _, vals in axes]))
    keys = [k for k, _ in axes]

    def run_one(combo):
        kw = {"lam": lam, "lambda1": lambda1, "lambda2": lambda2, "b": b,
              "p": p, "kappa": kappa, "n": n, "u0": u0, "R": R,
              "tol": rc["tol"]}
        hp = dict(base_params)
        for key, val in zip(keys, combo):
            if key in _SWEEP_SCALARS:
                kw[key if key != "lambda" else "lam"] = (
                    int(val) if key == "n" else val)
            else:
                hp[key] = val
        point = dict(zip(keys, combo))
        try:
            frag = _verify_pipeline(
                theorem, h_text, hp, kw["lam"], kw["lambda1"], kw["lambda2"],
                kw["b"], kw["p"], geometry_name, kw["kappa"], kw["n"],
                kw["u0"], kw["R"], kw["tol"], rc["u-floor-frac"],
                rc["resample"], rc["samples"],
                kw.get("c1", rc["c1"]), kw.get("c2", rc["c2"]), rc["variant"])
        except _RUN_ERRORS as exc:
            return {"point": point, "verdict": "error", "error": str(exc)}
        frag["point"] = point
        return frag

    if workers and workers > 0:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            runs = list(pool.map(run_one, combos))
    else:
        runs = [run_one(c) for c in combos]

    counts = {}
    for r in runs:
        counts[r["verdict"]] = counts.get(r["verdict"], 0) + 1
    if counts.get("error"):
        verdict = "error"
    elif counts.get("fail"):
        verdict = "fail"
    elif counts.get("not_applicable") or counts.get("no_verdict"):
        verdict = "not_applicable" if not counts.get("pass") else "pass"
    else:
        verdict = "pass"
    # mixed pass/no-verdict grids count as pass: skipped points are reported
    rep = _report("sweep", rc, inputs,
                  statistic={"runs": runs, "counts": counts},
                  verdict=verdict)
    _emit(ctx, rep)


if __name__ == "__main__":
    main()
