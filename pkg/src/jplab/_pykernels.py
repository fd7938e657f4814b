"""
Pure-Python implementation of the hot kernels.

The compiled module ``_ckernels`` exposes the same three functions with the
same signatures; :mod:`jplab.kernels` selects one at import time.
"""

import math

import numpy as np

from .errors import StiffnessError

MAX_STEPS = 1_000_000


def _lag_tables(k, h, n):
    lag = np.arange(n + 1) * h
    if k == 0:
        s = lag.astype(complex)
    else:
        s = np.sin(k * lag) / k
    return s, np.cos(k * lag)


def volterra_forward(h, V, k, kind):
    """Forward product-trapezoid sweep on the grid ``x_i = i h``.

    Solves ``y(x) = s(x) + int_0^x sin(k(x-t))/k V(t) y(t) dt`` with seed
    ``s = sin(kx)/k`` (``kind = 0``) or ``s = cos(kx)`` (``kind = 1``).

    Returns
    -------
    (ndarray, ndarray)
        Values and first derivatives at the nodes.
    """
    V = np.asarray(V, dtype=complex)
    n = V.size - 1
    S, C = _lag_tables(k, h, n)
    if kind == 0:
        seed, dseed = S.copy(), C.copy()
    else:
        seed, dseed = C.copy(), -k * k * S
    y = np.empty(n + 1, dtype=complex)
    yp = np.empty(n + 1, dtype=complex)
    q = np.empty(n + 1, dtype=complex)  # w_j V_j y_j
    for i in range(n + 1):
        if i == 0:
            y[0] = seed[0]
            yp[0] = dseed[0]
        else:
            lags = i - np.arange(i)
            y[i] = seed[i] + np.dot(S[lags], q[:i])
            yp[i] = dseed[i] + np.dot(C[lags], q[:i]) + 0.5 * h * V[i] * y[i]
        q[i] = (0.5 * h if i == 0 else h) * V[i] * y[i]
    return y, yp


def volterra_backward(h, V, k):
    """Backward sweep for the Jost solution on ``x_i = i h``.

    Solves ``f(x) = e^{ikx} - int_x^X sin(k(x-t))/k V(t) f(t) dt`` starting
    from ``f(X) = e^{ikX}``.
    """
    V = np.asarray(V, dtype=complex)
    n = V.size - 1
    S, C = _lag_tables(k, h, n)
    x = np.arange(n + 1) * h
    E = np.exp(1j * k * x)
    f = np.empty(n + 1, dtype=complex)
    fp = np.empty(n + 1, dtype=complex)
    q = np.empty(n + 1, dtype=complex)
    for i in range(n, -1, -1):
        if i == n:
            f[i] = E[i]
            fp[i] = 1j * k * E[i]
            q[i] = 0.5 * h * V[i] * f[i]
            continue
        lags = np.arange(1, n - i + 1)
        tail = q[i + 1:]
        f[i] = E[i] + np.dot(S[lags], tail)
        fp[i] = 1j * k * E[i] - np.dot(C[lags], tail) - 0.5 * h * V[i] * f[i]
        q[i] = h * V[i] * f[i]
    return f, fp


# Dormand-Prince 5(4)
_A21 = 1 / 5
_A31, _A32 = 3 / 40, 9 / 40
_A41, _A42, _A43 = 44 / 45, -56 / 15, 32 / 9
_A51, _A52, _A53, _A54 = 19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729
_A61, _A62, _A63, _A64, _A65 = 9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656
_B1, _B3, _B4, _B5, _B6 = 35 / 384, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84
_E1, _E3, _E4, _E5, _E6, _E7 = 71 / 57600, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40
_C2, _C3, _C4, _C5 = 1 / 5, 3 / 10, 4 / 5, 8 / 9


def radial_solve(s, z, vfunc, t0, y0, t_nodes, tol, h_max, count_signs):
    """Integrate the log-radial mode equation with DP5(4).

    The state is ``(y, y_t)`` or, with four components,
    ``(y, y_t, dy/dz, (dy/dz)_t)``, for

        y_tt + 2 s y_t = e^{2t} (V(e^t) - z) y,
        w_tt + 2 s w_t = e^{2t} (V(e^t) - z) w - e^{2t} y.

    Parameters
    ----------
    s : float
        Drift coefficient (``m`` for the regular solution, ``-m`` inward).
    z : complex
    vfunc : callable or None
        ``r -> V(r)``; ``None`` means ``V = 0``.
    t0 : float
    y0 : sequence of complex, length 2 or 4
    t_nodes : sequence of float
        Monotone output nodes; every step ends exactly on each node.
    tol : float
        Relative local error bound.
    h_max : float
        Largest allowed step.
    count_signs : bool
        Count sign changes of ``Re y`` between accepted steps.

    Returns
    -------
    (ndarray, int, int)
        States at the nodes (shape ``(len(t_nodes), len(y0))``), number of
        accepted steps and number of sign changes.
    """
    z = complex(z)
    var = len(y0) == 4
    nodes = np.asarray(t_nodes, dtype=float)
    out = np.empty((nodes.size, len(y0)), dtype=complex)
    if nodes.size == 0:
        return out, 0, 0
    ts = 2.0 * s

    def rhs(t, a, b, c, d):
        e2 = math.exp(2.0 * t)
        v = 0.0 if vfunc is None else vfunc(math.exp(t))
        q = e2 * (v - z)
        if var:
            return b, q * a - ts * b, d, q * c - ts * d - e2 * a
        return b, q * a - ts * b, 0j, 0j

    y = [complex(v) for v in y0] + [0j] * (4 - len(y0))
    t = float(t0)
    direction = 1.0 if nodes[-1] >= t else -1.0
    span = abs(float(nodes[-1]) - t)
    h = min(h_max, max(1e-3 * span, 1e-6))
    k1 = rhs(t, *y)
    steps = 0
    nsign = 0
    last = 0
    if count_signs:
        last = (y[0].real > 0) - (y[0].real < 0)
    for idx in range(nodes.size):
        target = float(nodes[idx])
        while direction * (target - t) > 1e-13 * max(1.0, abs(t)):
            dt = direction * min(h, abs(target - t))
            a = [y[i] + dt * _A21 * k1[i] for i in range(4)]
            k2 = rhs(t + _C2 * dt, *a)
            a = [y[i] + dt * (_A31 * k1[i] + _A32 * k2[i]) for i in range(4)]
            k3 = rhs(t + _C3 * dt, *a)
            a = [y[i] + dt * (_A41 * k1[i] + _A42 * k2[i] + _A43 * k3[i]) for i in range(4)]
            k4 = rhs(t + _C4 * dt, *a)
            a = [
                y[i] + dt * (_A51 * k1[i] + _A52 * k2[i] + _A53 * k3[i] + _A54 * k4[i])
                for i in range(4)
            ]
            k5 = rhs(t + _C5 * dt, *a)
            a = [
                y[i]
                + dt * (_A61 * k1[i] + _A62 * k2[i] + _A63 * k3[i] + _A64 * k4[i] + _A65 * k5[i])
                for i in range(4)
            ]
            k6 = rhs(t + dt, *a)
            yn = [
                y[i] + dt * (_B1 * k1[i] + _B3 * k3[i] + _B4 * k4[i] + _B5 * k5[i] + _B6 * k6[i])
                for i in range(4)
            ]
            k7 = rhs(t + dt, *yn)
            e = [
                dt
                * (_E1 * k1[i] + _E3 * k3[i] + _E4 * k4[i] + _E5 * k5[i] + _E6 * k6[i] + _E7 * k7[i])
                for i in range(4)
            ]
            ref = max(abs(y[0]), abs(y[1]), abs(yn[0]), abs(yn[1]), 1e-300)
            err = max(abs(e[0]), abs(e[1])) / (tol * ref)
            if var:
                ref2 = max(abs(y[2]), abs(y[3]), abs(yn[2]), abs(yn[3])) + ref
                err = max(err, max(abs(e[2]), abs(e[3])) / (tol * ref2))
            if err <= 1.0:
                t += dt
                y = yn
                k1 = k7
                steps += 1
                if count_signs:
                    sg = (y[0].real > 0) - (y[0].real < 0)
                    if sg != 0:
                        if last != 0 and sg != last:
                            nsign += 1
                        last = sg
                fac = 5.0 if err == 0.0 else min(5.0, 0.9 * err ** -0.2)
                h = min(h_max, abs(dt) * max(0.2, fac))
                if steps > MAX_STEPS:
                    raise StiffnessError(f"step budget exhausted near t = {t}")
            else:
                h = abs(dt) * max(0.2, 0.9 * err ** -0.2)
                if h < 1e-13 * max(1.0, abs(t)):
                    raise StiffnessError(f"step size underflow at t = {t}")
        t = float(target)
        out[idx] = y[: out.shape[1]]
    return out, steps, nsign

