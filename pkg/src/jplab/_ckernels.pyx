# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""
Compiled hot kernels: Volterra sweeps and the log-radial DP5(4) integrator.

Signatures and semantics match :mod:`jplab._pykernels`.
"""

import numpy as np

from libc.math cimport exp, fabs, fmax, fmin, pow

from .errors import StiffnessError

cdef extern from "complex.h" nogil:
    double complex csin(double complex)
    double complex ccos(double complex)
    double complex cexp(double complex)
    double cabs(double complex)

DEF MAX_STEPS = 1000000


cdef void _lag_tables(double complex k, double h, Py_ssize_t n,
                      double complex[::1] S, double complex[::1] C) noexcept nogil:
    cdef Py_ssize_t l
    cdef double complex arg
    for l in range(n + 1):
        arg = k * (l * h)
        if k == 0:
            S[l] = l * h
        else:
            S[l] = csin(arg) / k
        C[l] = ccos(arg)


def volterra_forward(double h, V, double complex k, int kind):
    cdef double complex[::1] v = np.ascontiguousarray(V, dtype=complex)
    cdef Py_ssize_t n = v.shape[0] - 1
    S_arr = np.empty(n + 1, dtype=complex)
    C_arr = np.empty(n + 1, dtype=complex)
    cdef double complex[::1] S = S_arr
    cdef double complex[::1] C = C_arr
    y_arr = np.empty(n + 1, dtype=complex)
    yp_arr = np.empty(n + 1, dtype=complex)
    cdef double complex[::1] y = y_arr
    cdef double complex[::1] yp = yp_arr
    cdef double complex[::1] q = np.empty(n + 1, dtype=complex)
    cdef Py_ssize_t i, j
    cdef double complex acc, accp, seed, dseed
    with nogil:
        _lag_tables(k, h, n, S, C)
        for i in range(n + 1):
            if kind == 0:
                seed = S[i]
                dseed = C[i]
            else:
                seed = C[i]
                dseed = -k * k * S[i]
            acc = 0
            accp = 0
            for j in range(i):
                acc = acc + S[i - j] * q[j]
                accp = accp + C[i - j] * q[j]
            y[i] = seed + acc
            if i > 0:
                yp[i] = dseed + accp + 0.5 * h * v[i] * y[i]
                q[i] = h * v[i] * y[i]
            else:
                yp[i] = dseed
                q[i] = 0.5 * h * v[i] * y[i]
    return y_arr, yp_arr


def volterra_backward(double h, V, double complex k):
    cdef double complex[::1] v = np.ascontiguousarray(V, dtype=complex)
    cdef Py_ssize_t n = v.shape[0] - 1
    cdef double complex[::1] S = np.empty(n + 1, dtype=complex)
    cdef double complex[::1] C = np.empty(n + 1, dtype=complex)
    f_arr = np.empty(n + 1, dtype=complex)
    fp_arr = np.empty(n + 1, dtype=complex)
    cdef double complex[::1] f = f_arr
    cdef double complex[::1] fp = fp_arr
    cdef double complex[::1] q = np.empty(n + 1, dtype=complex)
    cdef Py_ssize_t i, j
    cdef double complex acc, accp, e
    cdef double complex ik = 1j * k
    with nogil:
        _lag_tables(k, h, n, S, C)
        for i in range(n, -1, -1):
            e = cexp(ik * (i * h))
            if i == n:
                f[i] = e
                fp[i] = ik * e
                q[i] = 0.5 * h * v[i] * e
                continue
            acc = 0
            accp = 0
            for j in range(i + 1, n + 1):
                acc = acc + S[j - i] * q[j]
                accp = accp + C[j - i] * q[j]
            f[i] = e + acc
            fp[i] = ik * e - accp - 0.5 * h * v[i] * f[i]
            q[i] = h * v[i] * f[i]
    return f_arr, fp_arr


# Dormand-Prince 5(4) tableau
cdef double A21 = 1.0 / 5
cdef double A31 = 3.0 / 40, A32 = 9.0 / 40
cdef double A41 = 44.0 / 45, A42 = -56.0 / 15, A43 = 32.0 / 9
cdef double A51 = 19372.0 / 6561, A52 = -25360.0 / 2187, A53 = 64448.0 / 6561, A54 = -212.0 / 729
cdef double A61 = 9017.0 / 3168, A62 = -355.0 / 33, A63 = 46732.0 / 5247, A64 = 49.0 / 176, A65 = -5103.0 / 18656
cdef double B1 = 35.0 / 384, B3 = 500.0 / 1113, B4 = 125.0 / 192, B5 = -2187.0 / 6784, B6 = 11.0 / 84
cdef double E1 = 71.0 / 57600, E3 = -71.0 / 16695, E4 = 71.0 / 1920, E5 = -17253.0 / 339200, E6 = 22.0 / 525, E7 = -1.0 / 40
cdef double C2 = 1.0 / 5, C3 = 3.0 / 10, C4 = 4.0 / 5, C5 = 8.0 / 9


cdef class _Rhs:
    cdef double ts
    cdef double complex z
    cdef object vfunc
    cdef bint var

    cdef int eval(self, double t, double complex* y, double complex* out) except -1:
        cdef double e2 = exp(2.0 * t)
        cdef double complex v = 0
        if self.vfunc is not None:
            v = self.vfunc(exp(t))
        cdef double complex q = e2 * (v - self.z)
        out[0] = y[1]
        out[1] = q * y[0] - self.ts * y[1]
        if self.var:
            out[2] = y[3]
            out[3] = q * y[2] - self.ts * y[3] - e2 * y[0]
        else:
            out[2] = 0
            out[3] = 0
        return 0


cdef inline int _sgn(double x) noexcept nogil:
    return (x > 0) - (x < 0)


def radial_solve(double s, double complex z, vfunc, double t0, y0, t_nodes,
                 double tol, double h_max, bint count_signs):
    cdef double[::1] nodes = np.ascontiguousarray(t_nodes, dtype=float)
    cdef Py_ssize_t nn = nodes.shape[0]
    cdef int dim = len(y0)
    out_arr = np.empty((nn, dim), dtype=complex)
    if nn == 0:
        return out_arr, 0, 0
    cdef double complex[:, ::1] out = out_arr
    cdef _Rhs rhs = _Rhs()
    rhs.ts = 2.0 * s
    rhs.z = z
    rhs.vfunc = vfunc
    rhs.var = dim == 4

    cdef double complex y[4]
    cdef double complex yn[4]
    cdef double complex a[4]
    cdef double complex k1[4]
    cdef double complex k2[4]
    cdef double complex k3[4]
    cdef double complex k4[4]
    cdef double complex k5[4]
    cdef double complex k6[4]
    cdef double complex k7[4]
    cdef double complex e[4]
    cdef int i
    for i in range(4):
        y[i] = y0[i] if i < dim else 0

    cdef double t = t0
    cdef double direction = 1.0 if nodes[nn - 1] >= t else -1.0
    cdef double span = fabs(nodes[nn - 1] - t)
    cdef double h = fmin(h_max, fmax(1e-3 * span, 1e-6))
    cdef double dt, target, err, ref, ref2, fac
    cdef long steps = 0
    cdef long nsign = 0
    cdef int last = 0, sg
    cdef Py_ssize_t idx
    if count_signs:
        last = _sgn(y[0].real)
    rhs.eval(t, y, k1)
    for idx in range(nn):
        target = nodes[idx]
        while direction * (target - t) > 1e-13 * fmax(1.0, fabs(t)):
            dt = direction * fmin(h, fabs(target - t))
            for i in range(4):
                a[i] = y[i] + dt * A21 * k1[i]
            rhs.eval(t + C2 * dt, a, k2)
            for i in range(4):
                a[i] = y[i] + dt * (A31 * k1[i] + A32 * k2[i])
            rhs.eval(t + C3 * dt, a, k3)
            for i in range(4):
                a[i] = y[i] + dt * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i])
            rhs.eval(t + C4 * dt, a, k4)
            for i in range(4):
                a[i] = y[i] + dt * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i])
            rhs.eval(t + C5 * dt, a, k5)
            for i in range(4):
                a[i] = y[i] + dt * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i])
            rhs.eval(t + dt, a, k6)
            for i in range(4):
                yn[i] = y[i] + dt * (B1 * k1[i] + B3 * k3[i] + B4 * k4[i] + B5 * k5[i] + B6 * k6[i])
            rhs.eval(t + dt, yn, k7)
            for i in range(4):
                e[i] = dt * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i])
            ref = fmax(fmax(cabs(y[0]), cabs(y[1])), fmax(cabs(yn[0]), cabs(yn[1])))
            ref = fmax(ref, 1e-300)
            err = fmax(cabs(e[0]), cabs(e[1])) / (tol * ref)
            if rhs.var:
                ref2 = fmax(fmax(cabs(y[2]), cabs(y[3])), fmax(cabs(yn[2]), cabs(yn[3]))) + ref
                err = fmax(err, fmax(cabs(e[2]), cabs(e[3])) / (tol * ref2))
            if err <= 1.0:
                t += dt
                for i in range(4):
                    y[i] = yn[i]
                    k1[i] = k7[i]
                steps += 1
                if count_signs:
                    sg = _sgn(y[0].real)
                    if sg != 0:
                        if last != 0 and sg != last:
                            nsign += 1
                        last = sg
                fac = 5.0 if err == 0.0 else fmin(5.0, 0.9 * pow(err, -0.2))
                h = fmin(h_max, fabs(dt) * fmax(0.2, fac))
                if steps > MAX_STEPS:
                    raise StiffnessError(f"step budget exhausted near t = {t}")
            else:
                h = fabs(dt) * fmax(0.2, 0.9 * pow(err, -0.2))
                if h < 1e-13 * fmax(1.0, fabs(t)):
                    raise StiffnessError(f"step size underflow at t = {t}")
        t = target
        for i in range(dim):
            out[idx, i] = y[i]
    return out_arr, int(steps), int(nsign)
