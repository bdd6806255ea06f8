"""Pure Python backend: expression VM, rational grid scan, radial integrator.

Mirrors ellgrad._core operation for operation so the two backends are
interchangeable; the parity tests in tests/test_backends.py hold them to
the same outputs. Domain violations inside the VM produce IEEE specials
(nan, +-inf) exactly like the C library does, never exceptions; callers
detect non-finite results.
"""

from __future__ import annotations

import math

import numpy as np

from ._tableau import (
    MAX_FACTOR,
    MIN_FACTOR,
    PI_ALPHA,
    PI_BETA,
    RK_A,
    RK_B,
    RK_C,
    RK_E,
    RK_P,
    SAFETY,
    STATUS_FAILURE,
    STATUS_FLOOR,
    STATUS_REACHED,
)
from .hexpr import (
    OP_ADD,
    OP_ATAN,
    OP_CONST,
    OP_COS,
    OP_DIV,
    OP_EXP,
    OP_LN,
    OP_MUL,
    OP_NEG,
    OP_POW,
    OP_S,
    OP_SIN,
    OP_SUB,
)

name = "pure"

_NAN = float("nan")
_INF = float("inf")


def _vm(codes, args, s):
    stack = []
    push = stack.append
    for op, a in zip(codes, args):
        if op == OP_CONST:
            push(a)
        elif op == OP_S:
            push(s)
        elif op == OP_ADD:
            b = stack.pop()
            stack[-1] = stack[-1] + b
        elif op == OP_SUB:
            b = stack.pop()
            stack[-1] = stack[-1] - b
        elif op == OP_MUL:
            b = stack.pop()
            stack[-1] = stack[-1] * b
        elif op == OP_DIV:
            b = stack.pop()
            x = stack[-1]
            if b == 0.0:
                stack[-1] = _NAN if x == 0.0 else math.copysign(_INF, x)
            else:
                stack[-1] = x / b
        elif op == OP_NEG:
            stack[-1] = -stack[-1]
        elif op == OP_POW:
            x = stack[-1]
            if x == 0.0 and a < 0.0:
                stack[-1] = _INF
            else:
                try:
                    stack[-1] = math.pow(x, a)
                except ValueError:
                    stack[-1] = _NAN
                except OverflowError:
                    sign = -1.0 if (x < 0.0 and a % 2.0 == 1.0) else 1.0
                    stack[-1] = sign * _INF
        elif op == OP_EXP:
            try:
                stack[-1] = math.exp(stack[-1])
            except OverflowError:
                stack[-1] = _INF
        elif op == OP_LN:
            x = stack[-1]
            if x > 0.0:
                stack[-1] = math.log(x)
            else:
                stack[-1] = -_INF if x == 0.0 else _NAN
        elif op == OP_SIN:
            stack[-1] = math.sin(stack[-1])
        elif op == OP_COS:
            stack[-1] = math.cos(stack[-1])
        elif op == OP_ATAN:
            stack[-1] = math.atan(stack[-1])
    return stack[0]


def eval_program(program, s: float) -> float:
    """Evaluate the compiled expression at scalar ``s``."""
    return _vm(program.py_codes, program.py_args, float(s))


def eval_program_many(program, s) -> np.ndarray:
    """Vectorized evaluation over an array of sample points."""
    s = np.ascontiguousarray(s, dtype=np.float64)
    stack: list[np.ndarray] = []
    push = stack.append
    with np.errstate(all="ignore"):
        for op, a in zip(program.py_codes, program.py_args):
            if op == OP_CONST:
                push(np.full(s.shape, a))
            elif op == OP_S:
                push(s)
            elif op == OP_ADD:
                b = stack.pop()
                stack[-1] = stack[-1] + b
            elif op == OP_SUB:
                b = stack.pop()
                stack[-1] = stack[-1] - b
            elif op == OP_MUL:
                b = stack.pop()
                stack[-1] = stack[-1] * b
            elif op == OP_DIV:
                b = stack.pop()
                stack[-1] = np.divide(stack[-1], b)
            elif op == OP_NEG:
                stack[-1] = -stack[-1]
            elif op == OP_POW:
                stack[-1] = np.power(stack[-1], a)
            elif op == OP_EXP:
                stack[-1] = np.exp(stack[-1])
            elif op == OP_LN:
                stack[-1] = np.log(stack[-1])
            elif op == OP_SIN:
                stack[-1] = np.sin(stack[-1])
            elif op == OP_COS:
                stack[-1] = np.cos(stack[-1])
            elif op == OP_ATAN:
                stack[-1] = np.arctan(stack[-1])
    out = stack[0]
    if out.shape != s.shape:
        out = np.full(s.shape, float(out))
    return out


def scan_rational(a1, a0, b1, b2, w, m):
    """Minimum of (a1*t+a0)/(b1*t+b2*t^2) over m interior grid points of (0, w).

    Returns (index, value); t_k = w*(k+1)/(m+1).
    """
    k = np.arange(1, m + 1, dtype=np.float64)
    t = w * (k / (m + 1))
    f = (a1 * t + a0) / (b1 * t + b2 * t * t)
    i = int(np.argmin(f))
    return i, float(f[i])


def integrate_radial(kind, sqk, n, program, u0, r_max, rtol, atol, u_floor, grid, out_u, out_du):
    """March u'' = -drift(r) u' - u*h(ln u) from the pole, resampling onto grid.

    ``kind`` 0 is flat (drift (n-1)/r), 1 is constant negative curvature
    (drift (n-1)*sqk*coth(sqk*r)). Starts from a second order series at
    eps = 1e-6*r_max; u(eps) = u0 - (u0 h0/(2n)) eps^2 with the omitted
    term O(eps^4). Returns (status, filled, r_last, n_accepted, n_rejected)
    where ``filled`` counts grid points written.
    """
    codes = program.py_codes
    args = program.py_args
    ngrid = len(grid)
    nm1 = float(n - 1)

    def drift(r):
        if kind == 0:
            return nm1 / r
        return nm1 * sqk * (1.0 + 2.0 / math.expm1(2.0 * sqk * r))

    def rhs(r, u, v):
        if u > 0.0:
            hv = _vm(codes, args, math.log(u))
        else:
            hv = _NAN
        return v, -drift(r) * v - u * hv

    h0v = _vm(codes, args, math.log(u0)) if u0 > 0.0 else _NAN
    if not math.isfinite(h0v):
        return STATUS_FAILURE, 0, 0.0, 0, 0
    a2 = -u0 * h0v / (2.0 * n)
    eps = 1e-6 * r_max

    out_u[0] = u0
    out_du[0] = 0.0
    gi = 1
    while gi < ngrid and grid[gi] <= eps:
        rr = grid[gi]
        uu = u0 + a2 * rr * rr
        if uu <= u_floor:
            return STATUS_FLOOR, gi, rr, 0, 0
        out_u[gi] = uu
        out_du[gi] = 2.0 * a2 * rr
        gi += 1

    r = eps
    y0 = u0 + a2 * eps * eps
    y1 = 2.0 * a2 * eps
    f0, f1 = rhs(r, y0, y1)

    # initial step size from the local scale of y and f
    sc0 = atol + rtol * abs(y0)
    sc1 = atol + rtol * abs(y1)
    d0 = math.sqrt(0.5 * ((y0 / sc0) ** 2 + (y1 / sc1) ** 2))
    d1 = math.sqrt(0.5 * ((f0 / sc0) ** 2 + (f1 / sc1) ** 2))
    h = 1e-6 if (d0 < 1e-5 or d1 < 1e-5) else 0.01 * d0 / d1
    h = min(h, r_max - r)
    g0, g1 = rhs(min(r + h, r_max), y0 + h * f0, y1 + h * f1)
    d2 = math.sqrt(0.5 * (((g0 - f0) / sc0) ** 2 + ((g1 - f1) / sc1) ** 2)) / h
    if d1 <= 1e-15 and d2 <= 1e-15:
        h1 = max(1e-6, h * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** 0.2
    h = min(100.0 * h, h1, r_max - r)

    K = [[f0, f1]] + [[0.0, 0.0] for _ in range(6)]
    naccept = 0
    nreject = 0
    err_old = 1e-4
    hmin = 1e-14 * r_max
    status = STATUS_REACHED
    r_last = r

    while True:
        if gi >= ngrid or r >= r_max * (1.0 - 1e-15):
            status = STATUS_REACHED
            r_last = r
            break
        if h < hmin or r + h == r:
            status = STATUS_FAILURE
            r_last = r
            break
        h = min(h, r_max - r)

        for i in range(1, 6):
            su0 = 0.0
            su1 = 0.0
            ai = RK_A[i]
            for j in range(i):
                su0 += ai[j] * K[j][0]
                su1 += ai[j] * K[j][1]
            t0, t1 = rhs(r + RK_C[i] * h, y0 + h * su0, y1 + h * su1)
            K[i][0] = t0
            K[i][1] = t1
        sb0 = 0.0
        sb1 = 0.0
        for j in range(6):
            sb0 += RK_B[j] * K[j][0]
            sb1 += RK_B[j] * K[j][1]
        yn0 = y0 + h * sb0
        yn1 = y1 + h * sb1
        t0, t1 = rhs(r + h, yn0, yn1)
        K[6][0] = t0
        K[6][1] = t1
        se0 = 0.0
        se1 = 0.0
        for j in range(7):
            se0 += RK_E[j] * K[j][0]
            se1 += RK_E[j] * K[j][1]
        e0 = h * se0
        e1 = h * se1
        sc0 = atol + rtol * max(abs(y0), abs(yn0))
        sc1 = atol + rtol * max(abs(y1), abs(yn1))
        q0 = e0 / sc0
        q1 = e1 / sc1
        errn = math.sqrt(0.5 * (q0 * q0 + q1 * q1))

        if not (math.isfinite(errn) and math.isfinite(yn0) and math.isfinite(yn1)):
            h *= MIN_FACTOR
            nreject += 1
            continue
        if errn > 1.0:
            h *= max(MIN_FACTOR, SAFETY * errn ** -0.2)
            nreject += 1
            continue

        # accept: fill grid points covered by this step from the dense output
        floor_hit = False
        limit = r + h * (1.0 + 1e-12)
        while gi < ngrid and grid[gi] <= limit:
            th = (grid[gi] - r) / h
            if th > 1.0:
                th = 1.0
            iu = 0.0
            idu = 0.0
            for j in range(7):
                pj = RK_P[j]
                poly = th * (pj[0] + th * (pj[1] + th * (pj[2] + th * pj[3])))
                iu += K[j][0] * poly
                idu += K[j][1] * poly
            uval = y0 + h * iu
            duval = y1 + h * idu
            if uval <= u_floor:
                status = STATUS_FLOOR
                r_last = grid[gi]
                floor_hit = True
                break
            out_u[gi] = uval
            out_du[gi] = duval
            gi += 1
        if floor_hit:
            break

        naccept += 1
        r += h
        y0 = yn0
        y1 = yn1
        K[0][0] = K[6][0]
        K[0][1] = K[6][1]
        if yn0 <= u_floor:
            status = STATUS_FLOOR
            r_last = r
            break
        if errn == 0.0:
            fac = MAX_FACTOR
        else:
            fac = SAFETY * errn ** -PI_ALPHA * err_old ** PI_BETA
            fac = min(MAX_FACTOR, max(MIN_FACTOR, fac))
        err_old = max(errn, 1e-10)
        h *= fac

    return status, gi, r_last, naccept, nreject
