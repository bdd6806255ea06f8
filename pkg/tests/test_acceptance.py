"""Acceptance suite: one test per criterion, one pass/fail line per criterion.

Run with ``pytest tests/test_acceptance.py -v -s``. Every tolerance is
pinned here; nothing is deferred to later calibration.
"""

import itertools
import math
import random

import numpy as np
import pytest

from corpus import derivative_corpus
from ellgrad import hexpr
from ellgrad.backend import active_backend
from ellgrad.bounds import (
    CutoffConstants,
    ProblemSpec,
    bound_case1,
    bound_case2,
    bound_general,
)
from ellgrad.conditions import check_corollary, check_system
from ellgrad.geometry import make_model
from ellgrad.hexpr import differentiate, evaluate, parse
from ellgrad.solver import solve_radial
from ellgrad.verify import (
    liouville_scan,
    max_rel_spread,
    verify_gradient_bound,
    verify_harnack,
)


def _line(num, name, detail):
    print(f"criterion {num} ({name}): PASS - {detail}")


def test_criterion_1_closed_form_constants():
    rep = bound_general(2, 0.0, 1.0, CutoffConstants(1.0, 0.0), "stated")
    assert rep.value == pytest.approx(9.0, rel=1e-9)
    assert rep.minimizer == pytest.approx(1.0 / 3.0, rel=1e-6)

    spec = ProblemSpec.case2(0.0, 1.0, -1.0, 1.5)
    rep2 = bound_case2(2, 0.0, 1.0, CutoffConstants(1.0, 0.0), spec)
    assert rep2.value == pytest.approx(27.0 + 18.0 * math.sqrt(2.0), rel=1e-9)

    # proof variant with C2=1: stationary point of (4t+1)/(t-t^2) solves
    # 4t^2 + 2t - 1 = 0, giving t* = (sqrt(5)-1)/4 and value 6 + 2 sqrt(5)
    t_star = (-1.0 + math.sqrt(5.0)) / 4.0
    want = (4.0 * t_star + 1.0) / (t_star - t_star**2)
    assert want == pytest.approx(6.0 + 2.0 * math.sqrt(5.0), rel=1e-15)
    rep3 = bound_general(2, 0.0, 1.0, CutoffConstants(1.0, 1.0), "proof")
    assert rep3.value == pytest.approx(want, rel=1e-9)
    assert rep3.minimizer == pytest.approx(t_star, rel=1e-6)
    _line(1, "closed-form constants",
          f"9 / {rep2.value:.6f} / {rep3.value:.6f} at the analytic minimizers")


def test_criterion_2_minimizer_oracle_agreement():
    bk = active_backend()
    rng = random.Random(20250810)
    checked = 0
    for _ in range(100):
        n = rng.randint(2, 6)
        K = rng.uniform(0.0, 4.0)
        R = rng.uniform(0.25, 4.0)
        cut = CutoffConstants(rng.uniform(0.5, 4.0), rng.uniform(0.0, 4.0))
        p = rng.uniform(1.05, 1.95)
        l1 = rng.uniform(1e-3, 3.0)

        def dense(a1, a0, b1, b2, w):
            _, f = bk.scan_rational(a1, a0, b1, b2, w, 1_000_000)
            return f

        w = 2.0 * (2.0 - p) / (n * p)
        A = (((n - 1) * (1 + math.sqrt(K) * R) + 2) * cut.c1**2 + cut.c2) / R**2

        rep = bound_case1(n, K, R, cut, ProblemSpec.case1(l1, 1.0, -1.0, p))
        ref = dense(n * p * (A + 2 * K + 2 * l1) * R**2, n * p * cut.c1**2,
                    2 * (2 - p) * R**2, -n * p * R**2, w)
        assert rep.branch_values["c3-min"] == pytest.approx(ref, rel=1e-6)

        rep = bound_case2(n, K, R, cut, ProblemSpec.case2(-l1, 1.0, -1.0, p))
        ref = dense(n * p * (A + 2 * K) * R**2, n * p * cut.c1**2,
                    2 * (2 - p) * R**2, -n * p * R**2, w)
        assert rep.branch_values["c3-min"] == pytest.approx(ref, rel=1e-6)

        rep = bound_general(n, K, R, cut, "proof")
        k0 = ((n - 1) * (1 + math.sqrt(K) * R) + 2) * cut.c1**2 \
            + cut.c2 + 2 * K * R**2
        ref = dense(k0, cut.c1**2, (2 / n) * R**2, -(R**2), 2 / n)
        assert rep.value == pytest.approx(ref, rel=1e-6)
        checked += 3
    _line(2, "minimizer oracle agreement",
          f"{checked} golden-section minima within 1e-6 of 1e6-point scans")


def test_criterion_3_example_classification():
    lam_grid = (0.0, 0.25, 0.5, 0.75, 1.0)

    # decaying-power family c e^{d s}: admissible for every weight in [0,1]
    fam = parse("c*exp(d*s)")
    for c, d in itertools.product((0.5, 1.0, 2.0), (-2.0, -1.0, -0.5)):
        pv = {"c": c, "d": d}
        assert check_corollary(fam, "cor1.3", 3, 0.0, params=pv).passed
        for lam in lam_grid:
            assert check_system(fam, lam, 3, 0.0, params=pv).passed

    # negative square nonlinearity: weight 0 works, any positive weight
    # breaks the sign inequality
    neg = parse("-exp(2*s)")
    assert check_system(neg, 0.0, 3, 0.0).passed
    for lam in (0.25, 0.5, 0.75, 1.0):
        rep = check_system(neg, lam, 3, 0.0)
        assert not rep.passed
        assert any(v.inequality == "I3" for v in rep.violations)

    # shifted arctan: positive and decreasing
    arc = parse("pi/2 - arctan(s)")
    assert check_corollary(arc, "cor1.5", 2, 0.0).passed
    assert check_corollary(parse("a*(pi/2 - arctan(s))"), "cor1.5", 2, 0.0,
                           params={"a": 3.0}).passed
    _line(3, "example classification",
          "9 decaying-power cases, sign-obstructed case, arctan case")


def test_criterion_4_solver_regression():
    worst = 0.0
    for n in (2, 3):
        sol = solve_radial(make_model(n, 0.0), parse(f"4*s + {2 * n}"),
                           u0=1.0, r_max=3.0, tol=1e-10)
        assert sol.termination == "reached"
        err = float(np.abs(sol.u - np.exp(-sol.r**2)).max())
        worst = max(worst, err)
        assert err <= 1e-6

    sol = solve_radial(make_model(2, 0.0), parse("s"), u0=1.0, r_max=3.0,
                       tol=1e-8)
    assert np.abs(sol.u - 1.0).max() <= 1e-12

    lo, hi = 0.0, 1.0
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        lo, hi = (mid, hi) if mid < math.exp(-mid) else (lo, mid)
    omega = 0.5 * (lo + hi)
    sol = solve_radial(make_model(3, -1.0), parse("-s + exp(-s)"),
                       u0=math.exp(omega), r_max=3.0, tol=1e-8)
    assert np.abs(sol.u - math.exp(omega)).max() <= 1e-12
    _line(4, "solver regression",
          f"closed-form error {worst:.3e} <= 1e-6, constants exact to 1e-12")


def test_criterion_5_theorem_suite():
    h = parse("c*exp(d*s)")
    geoms = [(2, 0.0), (3, 0.0), (2, -1.0), (3, -1.0)]
    solve_cache = {}
    counts = {"pass": 0, "fail": 0, "no_verdict": 0, "not_applicable": 0}
    harnack_fail = 0
    for c, d, (n, kap), u0 in itertools.product(
            (0.5, 1.0, 2.0), (-2.0, -1.0, -0.5), geoms, (0.5, 1.0, 2.0)):
        key = (c, d, n, kap, u0)
        if key not in solve_cache:
            solve_cache[key] = solve_radial(
                make_model(n, kap), h, {"c": c, "d": d}, u0=u0, r_max=2.0,
                tol=1e-8)
        sol = solve_cache[key]
        for lam in (0.0, 0.5, 1.0):
            spec = ProblemSpec.general(h, lam, {"c": c, "d": d})
            rep = verify_gradient_bound(sol, spec, 1.0)
            counts[rep.verdict] += 1
            if rep.verdict == "pass":
                har = verify_harnack(sol, 1.0, rep.bound_value, rep.hypotheses)
                if har.verdict != "pass":
                    harnack_fail += 1
    assert counts["fail"] == 0
    assert harnack_fail == 0
    assert counts["not_applicable"] == 0  # the family is admissible
    assert counts["pass"] + counts["no_verdict"] == 324
    assert counts["pass"] > 0
    _line(5, "theorem suite",
          f"{counts['pass']} passes, {counts['no_verdict']} early-stop "
          "no-verdicts, zero failures out of 324 runs")


def test_criterion_6_liouville_decay():
    radii = (1.0, 10.0, 100.0, 1000.0)
    worst = 0.0
    for variant in ("stated", "proof"):
        for n in (2, 3, 5):
            rows = liouville_scan(n, CutoffConstants(2.0, 2.0), variant, radii)
            spread = max_rel_spread([cr2 for _, _, cr2 in rows])
            worst = max(worst, spread)
            assert spread <= 1e-9
    _line(6, "decay scan", f"C R^2 constant to {worst:.2e} (<= 1e-9)")


def test_criterion_7_derivative_correctness():
    corpus = derivative_corpus(seed=20240808, count=200)
    assert len(corpus) == 200
    n_points = 0
    for e, pvals, pts in corpus:
        d1 = differentiate(e)
        d2 = differentiate(d1)
        for s in pts:
            sym = evaluate(d1, s, pvals)
            fd = (evaluate(e, s + 1e-6, pvals)
                  - evaluate(e, s - 1e-6, pvals)) / 2e-6
            assert abs(sym - fd) <= 1e-6 * (1.0 + abs(sym))
            sym2 = evaluate(d2, s, pvals)
            fd2 = (evaluate(e, s + 1e-4, pvals) - 2.0 * evaluate(e, s, pvals)
                   + evaluate(e, s - 1e-4, pvals)) / 1e-8
            assert abs(sym2 - fd2) <= 1e-4 * (1.0 + abs(sym2))
            n_points += 1
    _line(7, "derivative correctness",
          f"200 expressions, {n_points} sample points, both orders")


def test_criterion_8_monotonicity_in_curvature():
    ks = (0.0, 0.5, 1.0, 2.0, 4.0)
    rng = random.Random(42)
    for _ in range(20):
        n = rng.randint(2, 6)
        R = rng.uniform(0.25, 4.0)
        cut = CutoffConstants(rng.uniform(0.5, 4.0), rng.uniform(0.0, 4.0))
        p = rng.uniform(1.05, 1.95)
        l1 = rng.uniform(1e-3, 3.0)
        s1 = ProblemSpec.case1(l1, 1.0, -1.0, p)
        s2 = ProblemSpec.case2(-l1, 1.0, -1.0, p)
        for values in (
            [bound_case1(n, K, R, cut, s1).value for K in ks],
            [bound_case2(n, K, R, cut, s2).value for K in ks],
            [bound_general(n, K, R, cut, "stated").value for K in ks],
            [bound_general(n, K, R, cut, "proof").value for K in ks],
        ):
            assert all(b >= a - 1e-12 * (1 + abs(a))
                       for a, b in zip(values, values[1:]))
    _line(8, "monotonicity in curvature",
          "20 random tuples x 4 bound evaluators nondecreasing over K")


def test_criterion_9_case1_branch_arithmetic():
    spec = ProblemSpec.case1(1.0, 1.0, -1.0, 1.5)
    rep = bound_case1(2, 0.0, 1.0, CutoffConstants(1.0, 0.0), spec)
    # interior branch minimizes 3(5t+3)/(t(1-t)); 5t^2 + 6t - 3 = 0 gives
    # t* = (2 sqrt(6) - 3)/5 and the value 33 + 12 sqrt(6)
    t_star = (2.0 * math.sqrt(6.0) - 3.0) / 5.0
    want = 3.0 * (5.0 * t_star + 3.0) / (t_star * (1.0 - t_star))
    assert want == pytest.approx(33.0 + 12.0 * math.sqrt(6.0), rel=1e-14)
    assert rep.branch_values["c3-min"] == pytest.approx(want, rel=1e-6)
    assert rep.branch_values["direct"] == pytest.approx(12.0, rel=1e-6)
    assert rep.branch_values["L"] == pytest.approx(6.0, rel=1e-6)
    assert rep.value == pytest.approx(want, rel=1e-6)
    assert rep.minimizer == pytest.approx(t_star / 3.0, rel=1e-4)
    _line(9, "case-1 branch arithmetic",
          f"branches ({rep.branch_values['c3-min']:.3f}, 12, 6), "
          f"max {rep.value:.3f}")
