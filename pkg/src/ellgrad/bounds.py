"""Explicit gradient-bound constants, Harnack factor, solution-range bounds.

Three bound evaluators share one mechanism: a smooth rational objective of
the shape (a1*t + a0)/(b1*t + b2*t^2) blows up at both ends of an open
interval and is minimized inside it. Bracketing uses a coarse 1024-point
scan, refinement golden-section to relative width 1e-12; each report
records the minimizer and the two scan values flanking it.

The cutoff constants C1, C2 are configuration with defaults C1=2, C2=2.
They are absolute constants of the cutoff construction that the bounds
inherit; no canonical numeric values exist, so the defaults are documented
placeholders and every report records the values used. Scaling and
monotonicity properties of the bounds do not depend on the choice.

The general bound comes in two variants: ``proof`` (default) includes the
C2 term in the numerator, ``stated`` omits it. The discrepancy is
surfaced, not hidden; reports carry the variant used.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping

from . import hexpr
from .backend import active_backend

__all__ = [
    "CutoffConstants",
    "ProblemSpec",
    "BoundReport",
    "SolutionRange",
    "compute_A",
    "compute_L",
    "bound_case1",
    "bound_case2",
    "bound_general",
    "harnack_factor",
    "solution_range_from_bound",
]

# strict p range: keeps the (p-1) and (2-p) denominators away from zero
P_MIN = 1.0 + 1e-9
P_MAX = 2.0 - 1e-9

GOLDEN_REL_TOL = 1e-12
SCAN_POINTS = 1024

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class CutoffConstants:
    """Cutoff-function constants C1 > 0 and C2 >= 0."""

    c1: float = 2.0
    c2: float = 2.0

    def __post_init__(self):
        if not (self.c1 > 0.0 and math.isfinite(self.c1)):
            raise ValueError(f"C1 must be > 0, got {self.c1!r}")
        if not (self.c2 >= 0.0 and math.isfinite(self.c2)):
            raise ValueError(f"C2 must be >= 0, got {self.c2!r}")


@dataclass(frozen=True)
class ProblemSpec:
    """Equation coefficients; selects which bound applies.

    case1: coefficients (lambda1 > 0, lambda2 > 0, b <= 0) with exponent
    weight p in (1, 2). case2: same but lambda1 <= 0. general: a
    nonlinearity expression ``h`` with bound parameters plus the weight
    ``lam`` of the h-term in the bounded quantity.
    """

    variant: str
    lambda1: float | None = None
    lambda2: float | None = None
    b: float | None = None
    p: float | None = None
    h: hexpr.Expression | None = None
    params: Mapping[str, float] | None = None
    lam: float | None = None

    def __post_init__(self):
        if self.variant in ("case1", "case2"):
            l1, l2, b, p = self.lambda1, self.lambda2, self.b, self.p
            if l1 is None or l2 is None or b is None or p is None:
                raise ValueError("case specs need lambda1, lambda2, b, p")
            if self.variant == "case1" and not l1 > 0.0:
                raise ValueError(f"case1 needs lambda1 > 0, got {l1!r}")
            if self.variant == "case2" and not l1 <= 0.0:
                raise ValueError(f"case2 needs lambda1 <= 0, got {l1!r}")
            if not l2 > 0.0:
                raise ValueError(f"lambda2 must be > 0, got {l2!r}")
            if not b <= 0.0:
                raise ValueError(f"b must be <= 0, got {b!r}")
            if not (P_MIN < p < P_MAX):
                raise ValueError(f"p must lie strictly inside (1, 2), got {p!r}")
        elif self.variant == "general":
            if self.h is None or self.lam is None:
                raise ValueError("general specs need h and lam")
            missing = hexpr.parameters(self.h) - set(self.params or ())
            if missing:
                raise hexpr.ParameterBindingError(missing)
        else:
            raise ValueError(f"unknown variant {self.variant!r}")

    @classmethod
    def case1(cls, lambda1, lambda2, b, p):
        return cls("case1", lambda1=lambda1, lambda2=lambda2, b=b, p=p)

    @classmethod
    def case2(cls, lambda1, lambda2, b, p):
        return cls("case2", lambda1=lambda1, lambda2=lambda2, b=b, p=p)

    @classmethod
    def general(cls, h, lam, params=None):
        return cls("general", h=h, lam=lam, params=dict(params or {}))

    def case_h(self) -> hexpr.Expression:
        """The nonlinearity lambda1*s + lambda2*e^{b s} a case spec encodes."""
        if self.variant == "general":
            raise ValueError("case_h only applies to case specs")
        return hexpr.add(
            hexpr.mul(hexpr.Num(self.lambda1), hexpr.Var()),
            hexpr.mul(
                hexpr.Num(self.lambda2),
                hexpr.fun("exp", hexpr.mul(hexpr.Num(self.b), hexpr.Var())),
            ),
        )


@dataclass
class BoundReport:
    """A computed bound constant and how it was attained."""

    value: float
    branch: str
    branch_values: dict
    minimizer: float | None
    minimizer_interval: tuple | None
    scan_neighbors: tuple | None
    A: float | None
    L: float | None
    variant: str | None
    cutoff: CutoffConstants
    inputs: dict = field(default_factory=dict)


class MinimizationError(RuntimeError):
    """Non-finite values encountered while minimizing a bound objective."""


def _validate_nkr(n, K, R):
    if not isinstance(n, int) or isinstance(n, bool) or n < 2:
        raise ValueError(f"dimension must be an integer >= 2, got {n!r}")
    if not (K >= 0.0 and math.isfinite(K)):
        raise ValueError(f"K must be a finite value >= 0, got {K!r}")
    if not (R > 0.0 and math.isfinite(R)):
        raise ValueError(f"R must be a finite value > 0, got {R!r}")


def _validate_p(p):
    if not (P_MIN < p < P_MAX):
        raise ValueError(f"p must lie strictly inside (1, 2), got {p!r}")


def compute_A(n: int, K: float, R: float, cut: CutoffConstants) -> float:
    """Cutoff drift constant ((n-1)(1+sqrt(K) R)+2) C1^2 + C2, over R^2."""
    _validate_nkr(n, K, R)
    return (((n - 1) * (1.0 + math.sqrt(K) * R) + 2.0) * cut.c1**2 + cut.c2) / R**2


def compute_L(n: int, K: float, p: float, lambda1: float) -> float:
    """Log-range constant n (p lambda1 + 2 p K) / (2 (p-1)^2)."""
    _validate_p(p)
    return n * (p * lambda1 + 2.0 * p * K) / (2.0 * (p - 1.0) ** 2)


def _golden_min(f, a, b, tol):
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc = f(c)
    fd = f(d)
    while b - a > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = f(d)
    return (c, fc) if fc < fd else (d, fd)


def _minimize_rational(a1, a0, b1, b2, w, backend=None):
    """Interior minimum of (a1*t+a0)/(b1*t+b2*t^2) on (0, w).

    The objective blows up at both endpoints, so a coarse scan brackets an
    interior minimum which golden-section then refines. Returns
    (minimizer, value, bracket, neighbors).
    """
    bk = backend or active_backend()
    i, f_scan = bk.scan_rational(a1, a0, b1, b2, w, SCAN_POINTS)
    if not math.isfinite(f_scan):
        raise MinimizationError("bound objective is not finite on the scan grid")
    i = min(max(i, 1), SCAN_POINTS - 2)

    def f(t):
        return (a1 * t + a0) / (b1 * t + b2 * t * t)

    lo = w * (i / (SCAN_POINTS + 1))
    hi = w * ((i + 2) / (SCAN_POINTS + 1))
    tmin, fmin = _golden_min(f, lo, hi, GOLDEN_REL_TOL * w)
    mid = w * ((i + 1) / (SCAN_POINTS + 1))
    fmid = f(mid)
    if fmid < fmin:
        tmin, fmin = mid, fmid
    if not math.isfinite(fmin):
        raise MinimizationError("bound objective is not finite at the minimizer")
    return tmin, fmin, (lo, hi), ((lo, f(lo)), (hi, f(hi)))


def bound_case1(n, K, R, cut, spec: ProblemSpec, backend=None) -> BoundReport:
    """Largest of the three case-1 branches; branch "c3-min" is minimized
    over C3 in (0, 2(2-p)/(n p))."""
    _validate_nkr(n, K, R)
    if spec.variant != "case1":
        raise ValueError(f"expected a case1 spec, got {spec.variant!r}")
    p, l1 = spec.p, spec.lambda1
    A = compute_A(n, K, R, cut)
    L = compute_L(n, K, p, l1)
    w = 2.0 * (2.0 - p) / (n * p)
    a1 = n * p * (A + 2.0 * K + 2.0 * l1) * R**2
    a0 = n * p * cut.c1**2
    b1 = 2.0 * (2.0 - p) * R**2
    b2 = -n * p * R**2
    tmin, fmin, interval, neighbors = _minimize_rational(a1, a0, b1, b2, w, backend)
    direct = (
        n * A
        + n**2 * cut.c1**2 / R**2
        + 2.0 * K * n
        + n * (p - 2.0) * l1
        + n * p * l1
    )
    l_branch = (n / (2.0 * (p - 1.0))) * (
        (2.0 / n) * (p - 1.0) ** 2 * L + p * l1 + 2.0 * p * K
    )
    values = {"c3-min": fmin, "direct": direct, "L": l_branch}
    branch = max(values, key=values.get)
    return BoundReport(
        value=values[branch],
        branch=branch,
        branch_values=values,
        minimizer=tmin,
        minimizer_interval=(0.0, w),
        scan_neighbors=neighbors,
        A=A,
        L=L,
        variant=None,
        cutoff=cut,
        inputs={"n": n, "K": K, "R": R, "p": p, "lambda1": l1},
    )


def bound_case2(n, K, R, cut, spec: ProblemSpec, backend=None) -> BoundReport:
    """Larger of n K p/(2(p-1)) and the minimized C3 branch."""
    _validate_nkr(n, K, R)
    if spec.variant != "case2":
        raise ValueError(f"expected a case2 spec, got {spec.variant!r}")
    p = spec.p
    A = compute_A(n, K, R, cut)
    w = 2.0 * (2.0 - p) / (n * p)
    a1 = n * p * (A + 2.0 * K) * R**2
    a0 = n * p * cut.c1**2
    b1 = 2.0 * (2.0 - p) * R**2
    b2 = -n * p * R**2
    tmin, fmin, interval, neighbors = _minimize_rational(a1, a0, b1, b2, w, backend)
    kp = n * K * p / (2.0 * (p - 1.0))
    values = {"Kp": kp, "c3-min": fmin}
    branch = max(values, key=values.get)
    return BoundReport(
        value=values[branch],
        branch=branch,
        branch_values=values,
        minimizer=tmin,
        minimizer_interval=(0.0, w),
        scan_neighbors=neighbors,
        A=A,
        L=None,
        variant=None,
        cutoff=cut,
        inputs={"n": n, "K": K, "R": R, "p": p, "lambda1": spec.lambda1},
    )


def bound_general(n, K, R, cut=None, variant="proof", backend=None) -> BoundReport:
    """Minimized C5 branch on (0, 2/n); ``proof`` adds C2 to the numerator."""
    _validate_nkr(n, K, R)
    if variant not in ("stated", "proof"):
        raise ValueError(f"variant must be 'stated' or 'proof', got {variant!r}")
    cut = cut or CutoffConstants()
    k0 = ((n - 1) * (1.0 + math.sqrt(K) * R) + 2.0) * cut.c1**2 + 2.0 * K * R**2
    if variant == "proof":
        k0 += cut.c2
    w = 2.0 / n
    a1 = k0
    a0 = cut.c1**2
    b1 = w * R**2
    b2 = -(R**2)
    tmin, fmin, interval, neighbors = _minimize_rational(a1, a0, b1, b2, w, backend)
    return BoundReport(
        value=fmin,
        branch="c5-min",
        branch_values={"c5-min": fmin},
        minimizer=tmin,
        minimizer_interval=(0.0, w),
        scan_neighbors=neighbors,
        A=compute_A(n, K, R, cut),
        L=None,
        variant=variant,
        cutoff=cut,
        inputs={"n": n, "K": K, "R": R},
    )


def harnack_factor(R: float, C: float) -> float:
    """Multiplicative oscillation factor e^{R sqrt(C)}."""
    if not (R > 0.0 and math.isfinite(R)):
        raise ValueError(f"R must be > 0, got {R!r}")
    if not (C >= 0.0):
        raise ValueError(f"C must be >= 0, got {C!r}")
    return math.exp(R * math.sqrt(C))


@dataclass(frozen=True)
class SolutionRange:
    """Admissible range of a positive solution implied by a bound value.

    ``u_max`` is None when only a lower bound exists. ``empty`` flags an
    inconsistent input (the bound sits below the minimum of the constraint
    function); it is reported, never clamped away.
    """

    u_min: float | None
    u_max: float | None
    s_lo: float | None
    s_hi: float | None
    empty: bool = False


def _bisect(f, a, b, tol=1e-12):
    fa = f(a)
    while b - a > tol:
        mid = 0.5 * (a + b)
        fm = f(mid)
        if (fa <= 0.0) == (fm <= 0.0):
            a, fa = mid, fm
        else:
            b = mid
    return 0.5 * (a + b)


def _grow_bracket(f, start, step, direction):
    """Grow geometrically from ``start`` until f changes sign."""
    a = start
    fa = f(a)
    if fa == 0.0:
        return a, a
    width = step
    for _ in range(200):
        b = a + direction * width
        fb = f(b)
        if (fa <= 0.0) != (fb <= 0.0):
            return (a, b) if direction > 0 else (b, a)
        a, fa = b, fb
        width *= 2.0
    raise MinimizationError("bracket growth failed")


def solution_range_from_bound(spec: ProblemSpec, c_tilde: float) -> SolutionRange:
    """Solve p*lambda1*s + lambda2*e^{b s} <= C for the admissible u = e^s.

    Requires b < 0. The gradient term of the bounded quantity is dropped
    (it is nonnegative), which can only widen the set. Bisection to 1e-12
    absolute in s. case1 yields a compact interval, case2 a half line.
    """
    if spec.variant == "general":
        raise ValueError("solution ranges apply to case specs only")
    if not spec.b < 0.0:
        raise ValueError(f"solution range needs b < 0, got {spec.b!r}")
    p, l1, l2, b = spec.p, spec.lambda1, spec.lambda2, spec.b

    def phi(s):
        return p * l1 * s + l2 * math.exp(b * s) - c_tilde

    if spec.variant == "case2":
        if l1 == 0.0:
            # e^{b s} <= C/lambda2, monotone decreasing in s
            if c_tilde <= 0.0:
                return SolutionRange(None, None, None, None, empty=True)
            s_lo = math.log(c_tilde / l2) / b
            return SolutionRange(math.exp(s_lo), None, s_lo, None)
        # phi strictly decreasing from +inf to -inf: one root
        lo, hi = _grow_bracket(lambda s: -phi(s), 0.0, 1.0, -1.0 if phi(0.0) <= 0.0 else 1.0)
        s_lo = _bisect(lambda s: -phi(s), lo, hi)
        return SolutionRange(math.exp(s_lo), None, s_lo, None)

    # case1: phi is strictly convex with a unique interior minimum
    s_star = math.log(p * l1 / (l2 * (-b))) / b
    if phi(s_star) > 0.0:
        return SolutionRange(None, None, None, None, empty=True)
    lo, hi = _grow_bracket(phi, s_star, 1.0, -1.0)
    s_lo = _bisect(lambda s: -phi(s), lo, hi)
    lo, hi = _grow_bracket(phi, s_star, 1.0, 1.0)
    s_hi = _bisect(phi, lo, hi)
    return SolutionRange(math.exp(s_lo), math.exp(s_hi), s_lo, s_hi)
