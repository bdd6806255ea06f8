"""Assemble bounded quantities along numerical solutions and check them.

A verification run combines: a hypothesis check on the nonlinearity over
the log-range the solution actually traverses (widened by +-0.5), the
explicit bound constant, and the empirical statistic (sup of the bounded
quantity, or the oscillation ratio for the Harnack check). Verdicts:

* ``pass`` / ``fail``    margin against the bound, with slack
  EPS_VERIFY = 1e-9 (1 + |bound|) since the inequalities are non-strict
  and the statistic lives on a resampled grid;
* ``not_applicable``     the hypothesis check failed, so the bound claims
  nothing; never counted as pass or fail;
* ``no_verdict``         the solve did not cover the ball the bound needs
  (the full 2R for the gradient bound), so nothing can be concluded.

Sup/inf statistics use the resampled grid plus a three-point parabolic
refinement around the discrete extremum. The decay scan reports the
general bound over a list of radii at K = 0 together with C R^2, whose
constancy is the decay statement in checkable form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import hexpr
from .backend import active_backend
from .bounds import (
    BoundReport,
    CutoffConstants,
    ProblemSpec,
    bound_case1,
    bound_case2,
    bound_general,
    harnack_factor,
    solution_range_from_bound,
)
from .conditions import DEFAULT_SAMPLES, ConditionReport, check_system
from .solver import RadialSolution

__all__ = [
    "VerificationReport",
    "compute_G",
    "verify_gradient_bound",
    "verify_harnack",
    "liouville_scan",
    "max_rel_spread",
    "EPS_VERIFY_REL",
    "HYP_WIDEN",
]

EPS_VERIFY_REL = 1e-9
HYP_WIDEN = 0.5

PASS = "pass"
FAIL = "fail"
NOT_APPLICABLE = "not_applicable"
NO_VERDICT = "no_verdict"


@dataclass
class VerificationReport:
    theorem: str
    verdict: str
    bound_value: float | None = None
    statistic: float | None = None
    margin: float | None = None
    bound: BoundReport | None = None
    hypotheses: ConditionReport | None = None
    notes: list = field(default_factory=list)
    extras: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.verdict == PASS


def _slack(bound_value: float) -> float:
    return EPS_VERIFY_REL * (1.0 + abs(bound_value))


def _check_h_consistency(sol: RadialSolution, expr, params, backend):
    """The spec's h and the solved h must agree on the traversed log range."""
    bk = backend or active_backend()
    lo, hi = sol.ln_u_range()
    if hi - lo < 1e-12:
        mid = 0.5 * (lo + hi)
        lo, hi = mid - 0.5, mid + 0.5
    s = np.linspace(lo, hi, 64)
    a = bk.eval_program_many(sol.program, s)
    b = bk.eval_program_many(hexpr.compile_program(expr, params), s)
    scale = 1.0 + np.maximum(np.abs(a), np.abs(b))
    if not np.all(np.abs(a - b) <= 1e-9 * scale):
        raise ValueError(
            "the solution was computed with a different nonlinearity than "
            "the spec describes"
        )


def compute_G(sol: RadialSolution, spec: ProblemSpec, backend=None) -> np.ndarray:
    """The bounded quantity along the solution.

    Case specs: (u'/u)^2 + p lambda1 ln u + lambda2 u^b.
    General specs: (u'/u)^2 + lam h(ln u).
    """
    bk = backend or active_backend()
    grad2 = (sol.du / sol.u) ** 2
    if spec.variant == "general":
        _check_h_consistency(sol, spec.h, spec.params, bk)
        hvals = bk.eval_program_many(
            hexpr.compile_program(spec.h, spec.params), np.log(sol.u)
        )
        return grad2 + spec.lam * hvals
    _check_h_consistency(sol, spec.case_h(), None, bk)
    lnu = np.log(sol.u)
    return grad2 + spec.p * spec.lambda1 * lnu + spec.lambda2 * np.power(sol.u, spec.b)


def _refined_extremum(y: np.ndarray, mode: str) -> float:
    """Grid extremum improved by a three-point parabola when interior."""
    i = int(np.argmax(y) if mode == "max" else np.argmin(y))
    yi = float(y[i])
    if 0 < i < len(y) - 1:
        y0, y1, y2 = float(y[i - 1]), yi, float(y[i + 1])
        denom = y0 - 2.0 * y1 + y2
        if denom != 0.0:
            delta = 0.5 * (y0 - y2) / denom
            if -1.0 < delta < 1.0:
                yv = y1 - 0.25 * (y0 - y2) * delta
                return max(y1, yv) if mode == "max" else min(y1, yv)
    return yi


def _interval_extremum(r: np.ndarray, y: np.ndarray, r_hi: float, mode: str) -> float:
    """Extremum of y over the continuum [0, r_hi] from grid samples.

    Combines the refined grid extremum over samples inside the interval
    with a quadratic interpolation of y at exactly r_hi, which the grid in
    general misses.
    """
    mask = r <= r_hi * (1.0 + 1e-12)
    best = _refined_extremum(y[mask], mode)
    j = int(np.searchsorted(r, r_hi))
    j = min(max(j, 1), len(r) - 2)
    x0, x1, x2 = r[j - 1], r[j], r[j + 1]
    if x0 <= r_hi <= x2 * (1.0 + 1e-12):
        t = r_hi
        l0 = (t - x1) * (t - x2) / ((x0 - x1) * (x0 - x2))
        l1 = (t - x0) * (t - x2) / ((x1 - x0) * (x1 - x2))
        l2 = (t - x0) * (t - x1) / ((x2 - x0) * (x2 - x1))
        yb = float(l0 * y[j - 1] + l1 * y[j] + l2 * y[j + 1])
        best = max(best, yb) if mode == "max" else min(best, yb)
    return best


def verify_gradient_bound(
    sol: RadialSolution,
    spec: ProblemSpec,
    R: float,
    cut: CutoffConstants | None = None,
    variant: str = "proof",
    hyp_samples: int = DEFAULT_SAMPLES,
    backend=None,
) -> VerificationReport:
    """Check sup of the bounded quantity over the inner ball against the bound.

    The solve must have covered the double ball [0, 2R]; hypothesis checks
    run over the traversed ln(u) range widened by +-HYP_WIDEN.
    """
    cut = cut or CutoffConstants()
    model = sol.model
    n, K = model.n, model.K
    theorem = {
        "case1": "thm1.1-case1",
        "case2": "thm1.1-case2",
        "general": "thm1.2",
    }[spec.variant]

    if not (sol.reached and sol.r[-1] >= 2.0 * R * (1.0 - 1e-9)):
        return VerificationReport(
            theorem=theorem,
            verdict=NO_VERDICT,
            notes=[
                f"solution covers [0, {sol.r[-1]:.6g}] "
                f"(termination: {sol.termination}); the bound needs [0, {2*R:.6g}]"
            ],
        )

    hyp = None
    if spec.variant == "general":
        lo, hi = sol.ln_u_range()
        hyp = check_system(
            spec.h,
            spec.lam,
            n,
            K,
            (lo - HYP_WIDEN, hi + HYP_WIDEN),
            hyp_samples,
            spec.params,
            backend=backend,
        )
        if not hyp.passed:
            return VerificationReport(
                theorem=theorem,
                verdict=NOT_APPLICABLE,
                hypotheses=hyp,
                notes=["hypothesis system fails on the traversed range"],
            )
        brep = bound_general(n, K, R, cut, variant, backend=backend)
    elif spec.variant == "case1":
        brep = bound_case1(n, K, R, cut, spec, backend=backend)
    else:
        brep = bound_case2(n, K, R, cut, spec, backend=backend)

    g = compute_G(sol, spec, backend=backend)
    stat = _interval_extremum(sol.r, g, R, "max")
    margin = brep.value - stat
    verdict = PASS if margin >= -_slack(brep.value) else FAIL

    notes = []
    extras = {}
    if spec.variant != "general" and spec.b < 0.0:
        rng = solution_range_from_bound(spec, brep.value)
        extras["solution_range"] = rng
        umin, umax = float(sol.u.min()), float(sol.u.max())
        if rng.empty:
            notes.append("admissible solution range is empty (informational)")
        else:
            inside = (rng.u_min is None or umin >= rng.u_min * (1.0 - 1e-9)) and (
                rng.u_max is None or umax <= rng.u_max * (1.0 + 1e-9)
            )
            notes.append(
                "observed u range "
                + ("inside" if inside else "outside")
                + " the admissible range (informational; ball-restricted "
                "solutions need not satisfy the global range)"
            )
    return VerificationReport(
        theorem=theorem,
        verdict=verdict,
        bound_value=brep.value,
        statistic=stat,
        margin=margin,
        bound=brep,
        hypotheses=hyp,
        notes=notes,
        extras=extras,
    )


def verify_harnack(
    sol: RadialSolution,
    R: float,
    C: float,
    hypotheses: ConditionReport | None = None,
) -> VerificationReport:
    """Check sup u / inf u over [0, R/2] against e^{R sqrt(C)}."""
    half = 0.5 * R
    if sol.r[-1] < half * (1.0 - 1e-9):
        return VerificationReport(
            theorem="cor1.1",
            verdict=NO_VERDICT,
            notes=[
                f"solution covers [0, {sol.r[-1]:.6g}]; "
                f"the oscillation check needs [0, {half:.6g}]"
            ],
        )
    umax = _interval_extremum(sol.r, sol.u, half, "max")
    umin = _interval_extremum(sol.r, sol.u, half, "min")
    ratio = umax / umin
    factor = harnack_factor(R, C)
    margin = factor - ratio
    verdict = PASS if margin >= -_slack(factor) else FAIL
    return VerificationReport(
        theorem="cor1.1",
        verdict=verdict,
        bound_value=factor,
        statistic=ratio,
        margin=margin,
        hypotheses=hypotheses,
        extras={"gradient_constant": C, "u_max": umax, "u_min": umin},
    )


def liouville_scan(n, cut, variant, r_list, backend=None) -> list:
    """Decay table [(R, C(n, 0, R), C*R^2)] of the general bound at K = 0."""
    if len(r_list) == 0:
        raise ValueError("radius list must be non-empty")
    rows = []
    for R in r_list:
        rep = bound_general(n, 0.0, float(R), cut, variant, backend=backend)
        rows.append((float(R), rep.value, rep.value * float(R) ** 2))
    return rows


def max_rel_spread(values) -> float:
    """Relative spread (max-min)/max|.| of a sequence; 0 for singletons."""
    vals = [float(v) for v in values]
    top = max(abs(v) for v in vals)
    if top == 0.0:
        return 0.0
    return (max(vals) - min(vals)) / top
