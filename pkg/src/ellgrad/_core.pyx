# cython: language_level=3
# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled backend: expression VM, rational grid scan, radial integrator.

Same semantics as ellgrad._pure; hot loops run without the GIL. Domain
violations inside the VM yield IEEE specials (nan, +-inf), never
exceptions. Opcode numbering matches ellgrad.hexpr.
"""

from libc.math cimport (
    atan as c_atan,
    cos as c_cos,
    exp as c_exp,
    expm1 as c_expm1,
    fabs,
    isfinite,
    log as c_log,
    pow as c_pow,
    sin as c_sin,
    sqrt as c_sqrt,
)

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

name = "compiled"

DEF MAX_STACK = 128

cdef double[:, ::1] _A = np.ascontiguousarray(RK_A, dtype=np.float64)
cdef double[::1] _B = np.ascontiguousarray(RK_B, dtype=np.float64)
cdef double[::1] _C = np.ascontiguousarray(RK_C, dtype=np.float64)
cdef double[::1] _E = np.ascontiguousarray(RK_E, dtype=np.float64)
cdef double[:, ::1] _P = np.ascontiguousarray(RK_P, dtype=np.float64)

cdef double _SAFETY = SAFETY
cdef double _MINF = MIN_FACTOR
cdef double _MAXF = MAX_FACTOR
cdef double _ALPHA = PI_ALPHA
cdef double _BETA = PI_BETA

cdef int _ST_REACHED = STATUS_REACHED
cdef int _ST_FLOOR = STATUS_FLOOR
cdef int _ST_FAILURE = STATUS_FAILURE

cdef double _NAN = float("nan")
cdef double _INF = float("inf")


cdef inline double _vm(const int* codes, const double* args, Py_ssize_t ncodes,
                       double s, double* stack) noexcept nogil:
    cdef Py_ssize_t i, sp = 0
    cdef int op
    cdef double a, x
    for i in range(ncodes):
        op = codes[i]
        a = args[i]
        if op == 0:      # CONST
            stack[sp] = a
            sp += 1
        elif op == 1:    # S
            stack[sp] = s
            sp += 1
        elif op == 2:    # ADD
            sp -= 1
            stack[sp - 1] = stack[sp - 1] + stack[sp]
        elif op == 3:    # SUB
            sp -= 1
            stack[sp - 1] = stack[sp - 1] - stack[sp]
        elif op == 4:    # MUL
            sp -= 1
            stack[sp - 1] = stack[sp - 1] * stack[sp]
        elif op == 5:    # DIV
            sp -= 1
            stack[sp - 1] = stack[sp - 1] / stack[sp]
        elif op == 6:    # NEG
            stack[sp - 1] = -stack[sp - 1]
        elif op == 7:    # POW
            stack[sp - 1] = c_pow(stack[sp - 1], a)
        elif op == 8:    # EXP
            stack[sp - 1] = c_exp(stack[sp - 1])
        elif op == 9:    # LN
            stack[sp - 1] = c_log(stack[sp - 1])
        elif op == 10:   # SIN
            stack[sp - 1] = c_sin(stack[sp - 1])
        elif op == 11:   # COS
            stack[sp - 1] = c_cos(stack[sp - 1])
        else:            # ATAN
            stack[sp - 1] = c_atan(stack[sp - 1])
    return stack[0]


def eval_program(program, double s):
    """Evaluate the compiled expression at scalar ``s``."""
    cdef int[::1] codes = program.codes
    cdef double[::1] args = program.args
    cdef double stack[MAX_STACK]
    return _vm(&codes[0], &args[0], codes.shape[0], s, stack)


def eval_program_many(program, s):
    """Vectorized evaluation over an array of sample points."""
    cdef int[::1] codes = program.codes
    cdef double[::1] args = program.args
    s_arr = np.ascontiguousarray(s, dtype=np.float64)
    out = np.empty_like(s_arr)
    cdef double[::1] sv = s_arr
    cdef double[::1] ov = out
    cdef Py_ssize_t i, n = sv.shape[0], nc = codes.shape[0]
    cdef double stack[MAX_STACK]
    cdef const int* cp = &codes[0]
    cdef const double* ap = &args[0]
    with nogil:
        for i in range(n):
            ov[i] = _vm(cp, ap, nc, sv[i], stack)
    return out


def scan_rational(double a1, double a0, double b1, double b2, double w, Py_ssize_t m):
    """Minimum of (a1*t+a0)/(b1*t+b2*t^2) over m interior grid points of (0, w).

    Returns (index, value); t_k = w*(k+1)/(m+1).
    """
    cdef Py_ssize_t k, ib = 0
    cdef double t, f, best = _INF
    cdef double denom = <double>(m + 1)
    with nogil:
        for k in range(m):
            t = w * ((<double>(k + 1)) / denom)
            f = (a1 * t + a0) / (b1 * t + b2 * t * t)
            if f < best:
                best = f
                ib = k
    return ib, best


cdef inline double _drift(int kind, double sqk, double nm1, double r) noexcept nogil:
    if kind == 0:
        return nm1 / r
    return nm1 * sqk * (1.0 + 2.0 / c_expm1(2.0 * sqk * r))


cdef inline void _rhs(int kind, double sqk, double nm1,
                      const int* codes, const double* args, Py_ssize_t nc,
                      double* stack, double r, double u, double v,
                      double* out) noexcept nogil:
    cdef double hv
    if u > 0.0:
        hv = _vm(codes, args, nc, c_log(u), stack)
    else:
        hv = _NAN
    out[0] = v
    out[1] = -_drift(kind, sqk, nm1, r) * v - u * hv


def integrate_radial(int kind, double sqk, int n, program, double u0,
                     double r_max, double rtol, double atol, double u_floor,
                     double[::1] grid, double[::1] out_u, double[::1] out_du):
    """March u'' = -drift(r) u' - u*h(ln u) from the pole, resampling onto grid.

    Same contract as ellgrad._pure.integrate_radial.
    """
    cdef int[::1] codes = program.codes
    cdef double[::1] args = program.args
    cdef const int* cp = &codes[0]
    cdef const double* ap = &args[0]
    cdef Py_ssize_t nc = codes.shape[0]
    cdef Py_ssize_t ngrid = grid.shape[0]
    cdef double nm1 = <double>(n - 1)
    cdef double stack[MAX_STACK]
    cdef double K[7][2]
    cdef double f01[2]
    cdef double h0v, a2, eps, rr, uu
    cdef double r, y0, y1, sc0, sc1, d0, d1, d2, h, h1, g0, g1
    cdef double su0, su1, sb0, sb1, se0, se1, yn0, yn1, e0, e1, q0, q1, errn
    cdef double th, iu, idu, poly, uval, duval, limit, fac, err_old, hmin, r_last
    cdef Py_ssize_t gi, i, j
    cdef int status, floor_hit
    cdef long naccept = 0, nreject = 0

    h0v = _vm(cp, ap, nc, c_log(u0), stack) if u0 > 0.0 else _NAN
    if not isfinite(h0v):
        return _ST_FAILURE, 0, 0.0, 0, 0
    a2 = -u0 * h0v / (2.0 * n)
    eps = 1e-6 * r_max

    out_u[0] = u0
    out_du[0] = 0.0
    gi = 1
    while gi < ngrid and grid[gi] <= eps:
        rr = grid[gi]
        uu = u0 + a2 * rr * rr
        if uu <= u_floor:
            return _ST_FLOOR, gi, rr, 0, 0
        out_u[gi] = uu
        out_du[gi] = 2.0 * a2 * rr
        gi += 1

    r = eps
    y0 = u0 + a2 * eps * eps
    y1 = 2.0 * a2 * eps
    status = _ST_REACHED
    r_last = r

    with nogil:
        _rhs(kind, sqk, nm1, cp, ap, nc, stack, r, y0, y1, f01)
        K[0][0] = f01[0]
        K[0][1] = f01[1]

        sc0 = atol + rtol * fabs(y0)
        sc1 = atol + rtol * fabs(y1)
        d0 = c_sqrt(0.5 * ((y0 / sc0) * (y0 / sc0) + (y1 / sc1) * (y1 / sc1)))
        d1 = c_sqrt(0.5 * ((K[0][0] / sc0) * (K[0][0] / sc0) + (K[0][1] / sc1) * (K[0][1] / sc1)))
        h = 1e-6 if (d0 < 1e-5 or d1 < 1e-5) else 0.01 * d0 / d1
        if h > r_max - r:
            h = r_max - r
        _rhs(kind, sqk, nm1, cp, ap, nc, stack,
             r + h if r + h < r_max else r_max, y0 + h * K[0][0], y1 + h * K[0][1], f01)
        g0 = f01[0]
        g1 = f01[1]
        d2 = c_sqrt(0.5 * (((g0 - K[0][0]) / sc0) * ((g0 - K[0][0]) / sc0)
                           + ((g1 - K[0][1]) / sc1) * ((g1 - K[0][1]) / sc1))) / h
        if d1 <= 1e-15 and d2 <= 1e-15:
            h1 = 1e-6 if 1e-6 > h * 1e-3 else h * 1e-3
        else:
            h1 = c_pow(0.01 / (d1 if d1 > d2 else d2), 0.2)
        if 100.0 * h < h1:
            h1 = 100.0 * h
        h = h1 if h1 < r_max - r else r_max - r

        err_old = 1e-4
        hmin = 1e-14 * r_max

        while True:
            if gi >= ngrid or r >= r_max * (1.0 - 1e-15):
                status = _ST_REACHED
                r_last = r
                break
            if h < hmin or r + h == r:
                status = _ST_FAILURE
                r_last = r
                break
            if h > r_max - r:
                h = r_max - r

            for i in range(1, 6):
                su0 = 0.0
                su1 = 0.0
                for j in range(i):
                    su0 += _A[i, j] * K[j][0]
                    su1 += _A[i, j] * K[j][1]
                _rhs(kind, sqk, nm1, cp, ap, nc, stack,
                     r + _C[i] * h, y0 + h * su0, y1 + h * su1, f01)
                K[i][0] = f01[0]
                K[i][1] = f01[1]
            sb0 = 0.0
            sb1 = 0.0
            for j in range(6):
                sb0 += _B[j] * K[j][0]
                sb1 += _B[j] * K[j][1]
            yn0 = y0 + h * sb0
            yn1 = y1 + h * sb1
            _rhs(kind, sqk, nm1, cp, ap, nc, stack, r + h, yn0, yn1, f01)
            K[6][0] = f01[0]
            K[6][1] = f01[1]
            se0 = 0.0
            se1 = 0.0
            for j in range(7):
                se0 += _E[j] * K[j][0]
                se1 += _E[j] * K[j][1]
            e0 = h * se0
            e1 = h * se1
            sc0 = atol + rtol * (fabs(y0) if fabs(y0) > fabs(yn0) else fabs(yn0))
            sc1 = atol + rtol * (fabs(y1) if fabs(y1) > fabs(yn1) else fabs(yn1))
            q0 = e0 / sc0
            q1 = e1 / sc1
            errn = c_sqrt(0.5 * (q0 * q0 + q1 * q1))

            if not (isfinite(errn) and isfinite(yn0) and isfinite(yn1)):
                h *= _MINF
                nreject += 1
                continue
            if errn > 1.0:
                fac = _SAFETY * c_pow(errn, -0.2)
                if fac < _MINF:
                    fac = _MINF
                h *= fac
                nreject += 1
                continue

            floor_hit = 0
            limit = r + h * (1.0 + 1e-12)
            while gi < ngrid and grid[gi] <= limit:
                th = (grid[gi] - r) / h
                if th > 1.0:
                    th = 1.0
                iu = 0.0
                idu = 0.0
                for j in range(7):
                    poly = th * (_P[j, 0] + th * (_P[j, 1] + th * (_P[j, 2] + th * _P[j, 3])))
                    iu += K[j][0] * poly
                    idu += K[j][1] * poly
                uval = y0 + h * iu
                duval = y1 + h * idu
                if uval <= u_floor:
                    status = _ST_FLOOR
                    r_last = grid[gi]
                    floor_hit = 1
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
                status = _ST_FLOOR
                r_last = r
                break
            if errn == 0.0:
                fac = _MAXF
            else:
                fac = _SAFETY * c_pow(errn, -_ALPHA) * c_pow(err_old, _BETA)
                if fac > _MAXF:
                    fac = _MAXF
                elif fac < _MINF:
                    fac = _MINF
            err_old = errn if errn > 1e-10 else 1e-10
            h *= fac

    return status, gi, r_last, naccept, nreject
