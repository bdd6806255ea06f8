"""Samplewise checks of the admissibility conditions on the nonlinearity h.

Four systems of pointwise inequalities decide whether a given h (with a
weight lam where applicable) is admissible for the gradient bound:

* ``1.9``     the full three-inequality system in (h, h', h'', lam, n, K)
* ``cor1.3``  h >= 0, h' <= 0, h'' >= 0 (sufficient for every lam in [0,1])
* ``cor1.4``  h' <= min(h'', 2K) and h >= 0 (the lam = 1 reduction)
* ``cor1.5``  h' <= (2/n) h (the lam = 0 reduction)

Checking is sampled-grid, not interval arithmetic: a pass verdict means
"no violation found at this resolution". Each inequality is evaluated at
equally spaced s values with the symbolic h', h'' and tolerated down to
-EPS_COND to absorb round-off at analytic zeros; ties at exactly zero
pass. Reported margins are clamped at zero from below in that tolerance
band so that margin >= 0 exactly when the verdict is pass.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from . import hexpr
from .backend import active_backend

__all__ = [
    "SYSTEMS",
    "EPS_COND",
    "DEFAULT_S_RANGE",
    "DEFAULT_SAMPLES",
    "Violation",
    "ConditionReport",
    "check_system",
    "check_corollary",
    "find_lambda",
]

SYSTEMS = ("1.9", "cor1.3", "cor1.4", "cor1.5")

EPS_COND = 1e-12
DEFAULT_S_RANGE = (-8.0, 8.0)
DEFAULT_SAMPLES = 401


@dataclass(frozen=True)
class Violation:
    s: float
    inequality: str
    value: float


@dataclass
class ConditionReport:
    system: str
    lam: float | None
    s_lo: float
    s_hi: float
    samples: int
    verdict: str  # "pass" | "fail"
    violations: list = field(default_factory=list)
    margin: float = 0.0

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"


def _sample_derivatives(h, params, s_lo, s_hi, samples, backend):
    """Arrays of h, h', h'' on the sample grid; non-finite values raise."""
    bk = backend or active_backend()
    s = np.linspace(s_lo, s_hi, samples)
    h1 = hexpr.differentiate(h)
    h2 = hexpr.differentiate(h1)
    rows = []
    for expr in (h, h1, h2):
        vals = bk.eval_program_many(hexpr.compile_program(expr, params), s)
        bad = ~np.isfinite(vals)
        if bad.any():
            i = int(np.argmax(bad))
            raise hexpr.EvalDomainError(
                "nonlinearity or a derivative left the finite domain", float(s[i])
            )
        rows.append(vals)
    return s, rows[0], rows[1], rows[2]


def _build_report(system, lam, s, rows, eps):
    values = np.stack([v for _, v in rows])
    raw_min = float(values.min())
    violations = []
    for label, vals in rows:
        mask = vals < -eps
        for i in np.flatnonzero(mask):
            violations.append(Violation(float(s[i]), label, float(vals[i])))
    violations.sort(key=lambda v: (v.s, v.inequality))
    if violations:
        verdict, margin = "fail", raw_min
    else:
        # clamp round-off negatives (and negative zero) in the pass band
        verdict, margin = "pass", (raw_min if raw_min > 0.0 else 0.0)
    return ConditionReport(
        system=system,
        lam=lam,
        s_lo=float(s[0]),
        s_hi=float(s[-1]),
        samples=len(s),
        verdict=verdict,
        violations=violations,
        margin=margin,
    )


def _validate_args(n, K, s_range, samples):
    if not isinstance(n, int) or isinstance(n, bool) or n < 2:
        raise ValueError(f"dimension must be an integer >= 2, got {n!r}")
    if not (K >= 0.0 and math.isfinite(K)):
        raise ValueError(f"K must be a finite value >= 0, got {K!r}")
    s_lo, s_hi = float(s_range[0]), float(s_range[1])
    if not (math.isfinite(s_lo) and math.isfinite(s_hi) and s_lo < s_hi):
        raise ValueError(f"s range must be finite with s_lo < s_hi, got {s_range!r}")
    if samples < 2:
        raise ValueError(f"need at least 2 samples, got {samples!r}")
    return s_lo, s_hi


def check_system(
    h: hexpr.Expression,
    lam: float,
    n: int,
    K: float,
    s_range=DEFAULT_S_RANGE,
    samples: int = DEFAULT_SAMPLES,
    params: Mapping[str, float] | None = None,
    eps: float = EPS_COND,
    backend=None,
) -> ConditionReport:
    """Evaluate the full three-inequality system at the sample grid.

    I1 = -(4/n)(lam-1) h + (lam-2) h' + lam h''
    I2 = h (2 K lam - (2/n)(lam^2-1) h - lam h')
    I3 = lam h
    """
    s_lo, s_hi = _validate_args(n, K, s_range, samples)
    s, H, H1, H2 = _sample_derivatives(h, params, s_lo, s_hi, samples, backend)
    i1 = -(4.0 / n) * (lam - 1.0) * H + (lam - 2.0) * H1 + lam * H2
    i2 = H * (2.0 * K * lam - (2.0 / n) * (lam**2 - 1.0) * H - lam * H1)
    i3 = lam * H
    rows = [("I1", i1), ("I2", i2), ("I3", i3)]
    return _build_report("1.9", lam, s, rows, eps)


def check_corollary(
    h: hexpr.Expression,
    mode: str,
    n: int,
    K: float,
    s_range=DEFAULT_S_RANGE,
    samples: int = DEFAULT_SAMPLES,
    params: Mapping[str, float] | None = None,
    eps: float = EPS_COND,
    backend=None,
) -> ConditionReport:
    """Evaluate one of the sufficient-condition systems samplewise."""
    if mode not in ("cor1.3", "cor1.4", "cor1.5"):
        raise ValueError(f"mode must be cor1.3, cor1.4 or cor1.5, got {mode!r}")
    s_lo, s_hi = _validate_args(n, K, s_range, samples)
    s, H, H1, H2 = _sample_derivatives(h, params, s_lo, s_hi, samples, backend)
    if mode == "cor1.3":
        rows = [("h", H), ("-dh", -H1), ("d2h", H2)]
    elif mode == "cor1.4":
        rows = [("d2h-dh", H2 - H1), ("2K-dh", 2.0 * K - H1), ("h", H)]
    else:
        rows = [("2h/n-dh", (2.0 / n) * H - H1)]
    return _build_report(mode, None, s, rows, eps)


def find_lambda(
    h: hexpr.Expression,
    n: int,
    K: float,
    s_range=DEFAULT_S_RANGE,
    samples: int = DEFAULT_SAMPLES,
    lambda_grid: Sequence[float] = (0.0, 0.25, 0.5, 0.75, 1.0),
    params: Mapping[str, float] | None = None,
    eps: float = EPS_COND,
    backend=None,
) -> list:
    """Grid search for weights whose full-system check passes.

    Returns [(lam, report)] for passing grid values only; an empty list
    means no feasible weight was found on the grid, not a proof that none
    exists.
    """
    if len(lambda_grid) == 0:
        raise ValueError("lambda grid must be non-empty")
    out = []
    for lam in lambda_grid:
        rep = check_system(h, lam, n, K, s_range, samples, params, eps, backend)
        if rep.passed:
            out.append((lam, rep))
    return out
