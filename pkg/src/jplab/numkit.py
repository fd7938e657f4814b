"""
Numerical substrate shared by the half-line and disk modules.

Contents
--------
sqrt_upper
    Square root with non-negative imaginary part.
gauss_legendre, composite_gauss_legendre
    Quadrature rules on an interval.
bessel_j, bessel_j_logderiv
    Bessel functions of the first kind at complex argument.
track_log
    Continuous argument of a non-vanishing function along a path.
ode_integrate
    Adaptive Dormand-Prince 5(4) integrator with output at requested nodes.
"""

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import AccuracyEnvelopeError, StiffnessError, ZeroCrossingError

__all__ = [
    "QuadGrid",
    "PhasePath",
    "OdeSolution",
    "sqrt_upper",
    "gauss_legendre",
    "composite_gauss_legendre",
    "bessel_j",
    "bessel_j_logderiv",
    "track_log",
    "ode_integrate",
]


# ---------------------------------------------------------------------------
# square root
# ---------------------------------------------------------------------------

def sqrt_upper(z):
    """Square root of `z` with ``Im >= 0``.

    The branch cut lies on ``[0, inf)``; on the cut the limit from the upper
    half-plane (the non-negative real root) is returned.
    """
    s = cmath.sqrt(complex(z))
    if s.imag < 0.0 or (s.imag == 0.0 and s.real < 0.0):
        s = -s
    return complex(s.real + 0.0, s.imag + 0.0)


# ---------------------------------------------------------------------------
# quadrature
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class QuadGrid:
    """Quadrature rule on ``(a, b)``.

    Attributes
    ----------
    nodes, weights : ndarray
        Strictly increasing interior nodes and positive weights.
    a, b : float
        Interval end points.
    panels : int
        Number of Gauss-Legendre panels.
    points_per_panel : tuple of int
        Rule size on each panel.
    """

    nodes: np.ndarray
    weights: np.ndarray
    a: float
    b: float
    panels: int = 1
    points_per_panel: tuple = field(default=())

    def __len__(self):
        return self.nodes.size

    def integrate(self, values):
        return np.dot(self.weights, values)


def gauss_legendre(n, a, b):
    """``n``-point Gauss-Legendre rule mapped to ``(a, b)``."""
    n = int(n)
    if n < 1:
        raise ValueError("n must be positive")
    if not a < b:
        raise ValueError(f"empty interval ({a}, {b})")
    x, w = np.polynomial.legendre.leggauss(n)
    half = 0.5 * (b - a)
    nodes = 0.5 * (a + b) + half * x
    return QuadGrid(nodes, half * w, float(a), float(b), 1, (n,))


def composite_gauss_legendre(n, a, b, breaks=()):
    """Gauss-Legendre panels split at `breaks`, about `n` nodes in total.

    Points are shared among the panels in proportion to their length, with at
    least four per panel.
    """
    cuts = [float(a)] + sorted(float(c) for c in breaks if a < c < b) + [float(b)]
    lengths = np.diff(cuts)
    if len(lengths) == 1:
        return gauss_legendre(n, a, b)
    counts = np.maximum(4, np.round(n * lengths / (b - a)).astype(int))
    counts[-1] = max(4, n - counts[:-1].sum()) if counts[:-1].sum() < n else counts[-1]
    pieces = [gauss_legendre(c, lo, hi) for c, lo, hi in zip(counts, cuts[:-1], cuts[1:])]
    return QuadGrid(
        np.concatenate([p.nodes for p in pieces]),
        np.concatenate([p.weights for p in pieces]),
        float(a),
        float(b),
        len(pieces),
        tuple(int(c) for c in counts),
    )


# ---------------------------------------------------------------------------
# Bessel functions
# ---------------------------------------------------------------------------

_SERIES_RADIUS = 12.0
_MAX_ARG = 200.0
_MAX_ORDER = 120


def _check_envelope(m, w):
    if m < 0 or int(m) != m:
        raise AccuracyEnvelopeError(f"order must be a non-negative integer, got {m}")
    if m > _MAX_ORDER or abs(w) > _MAX_ARG:
        raise AccuracyEnvelopeError(
            f"bessel_j({m}, {w}) outside |w| <= {_MAX_ARG:g}, m <= {_MAX_ORDER}"
        )


def _series(m, w):
    # sum_k (-1)^k (w/2)^(2k+m) / (k! (m+k)!)
    h = 0.5 * w
    term = complex(1.0)
    for j in range(1, m + 1):
        term *= h / j
    total = term
    q = -h * h
    k = 0
    while True:
        k += 1
        term *= q / (k * (m + k))
        total += term
        if abs(term) <= 1e-17 * abs(total) and k > 2:
            break
        if k > 500:
            break
    return total


def _miller(m, w):
    """J_{m-1}, J_m, J_{m+1} by normalized backward recurrence."""
    top = m + int(math.ceil(1.5 * abs(w))) + 20
    inv = 2.0 / w
    # choose the generating-function identity with the dominant exponential
    rot = -1j if w.imag >= 0.0 else 1j
    jp1, jk = 0j, 1e-300 + 0j
    norm = 0j
    keep = {}
    rot_pow = rot ** top
    for k in range(top, 0, -1):
        if k <= m + 1:
            keep[k] = jk
        norm += 2.0 * rot_pow * jk
        rot_pow /= rot
        jm1 = k * inv * jk - jp1
        jp1, jk = jk, jm1
        if abs(jk) > 1e250:
            jk *= 1e-250
            jp1 *= 1e-250
            norm *= 1e-250
            keep = {key: val * 1e-250 for key, val in keep.items()}
    keep[0] = jk
    norm += jk
    scale = cmath.exp(-1j * w) if w.imag >= 0.0 else cmath.exp(1j * w)
    scale /= norm
    return tuple(keep.get(j, 0j) * scale for j in (m - 1, m, m + 1)) if m >= 1 else (
        -keep[1] * scale,
        keep[0] * scale,
        keep[1] * scale,
    )


def bessel_j(m, w):
    """Bessel function of the first kind and its derivative.

    Parameters
    ----------
    m : int
        Order, ``0 <= m <= 120``.
    w : complex
        Argument, ``|w| <= 200``.

    Returns
    -------
    (complex, complex)
        ``J_m(w)`` and ``J_m'(w)``.

    Notes
    -----
    Power series for ``|w| <= 12``; otherwise Miller's backward recurrence
    started at order ``m + ceil(1.5|w|) + 20`` and normalized through
    ``exp(-+ i w) = J_0 + 2 sum (-+i)^k J_k``.
    """
    w = complex(w)
    _check_envelope(m, w)
    if abs(w) <= _SERIES_RADIUS:
        jm = _series(m, w)
        jp = _series(m + 1, w)
        jl = -_series(1, w) if m == 0 else _series(m - 1, w)
    else:
        jl, jm, jp = _miller(m, w)
    return jm, 0.5 * (jl - jp)


def bessel_j_logderiv(m, w):
    """``J_m'(w) / J_m(w)`` without forming ``J_m`` explicitly.

    Uses the continued fraction for ``J_{m+1}/J_m`` (backward ratio
    recurrence), which stays finite when ``J_m`` itself underflows.
    """
    w = complex(w)
    _check_envelope(m, w)
    if w == 0:
        raise ZeroDivisionError("logarithmic derivative singular at w = 0")
    top = m + int(math.ceil(1.5 * abs(w))) + 40
    ratio = 0j  # J_{k+1}/J_k
    for k in range(top, m, -1):
        ratio = w / (2.0 * k - w * ratio)
    return m / w - ratio


# ---------------------------------------------------------------------------
# phase tracking
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PhasePath:
    """Samples ``(s, f(path(s)))`` and the accumulated argument.

    Attributes
    ----------
    params : ndarray
        Path parameters in increasing order.
    values : ndarray
        Function values, none zero.
    args : ndarray
        Continuous argument at each sample.
    """

    params: np.ndarray
    values: np.ndarray
    args: np.ndarray

    @property
    def argument(self):
        """Accumulated argument at the end of the path."""
        return float(self.args[-1])


def _dphase(a, b):
    return cmath.phase(b / a)


def track_log(path, f, anchor=None, max_depth=40, tiny=1e-300):
    """Continuous ``Im log f`` along a piecewise-linear path.

    Each step is accepted once the phase turns by less than ``pi/4`` over
    both of its halves, so consecutive samples differ by less than ``pi/2``.

    Parameters
    ----------
    path : sequence of complex
        Vertices ``z_0, z_1, ...``; the path parameter of vertex ``j`` is ``j``.
    f : callable
        Complex function, non-vanishing on the path.
    anchor : float, optional
        Argument assigned to the first sample (principal value by default).
    max_depth : int
        Bisection limit per segment.

    Returns
    -------
    PhasePath

    Raises
    ------
    ZeroCrossingError
        If ``f`` vanishes at a sample, or the phase cannot be resolved below
        ``pi/2`` per step within `max_depth` bisections.
    """
    verts = [complex(z) for z in path]
    if not verts:
        raise ValueError("empty path")

    def point(s):
        j = min(int(s), len(verts) - 2)
        if j < 0:
            return verts[0]
        return verts[j] + (s - j) * (verts[j + 1] - verts[j])

    def value(s):
        v = complex(f(point(s)))
        if not abs(v) > tiny or not cmath.isfinite(v):
            raise ZeroCrossingError(f"f vanishes near path parameter {s}", (s, s))
        return v

    s0 = 0.0
    v0 = value(s0)
    arg = cmath.phase(v0) if anchor is None else float(anchor)
    params, values, args = [s0], [v0], [arg]
    for j in range(len(verts) - 1):
        # explicit stack of pending sub-intervals (left-to-right order)
        stack = [(float(j + 1), None, 0)]
        s_left, v_left = params[-1], values[-1]
        while stack:
            s_right, v_right, depth = stack.pop()
            if v_right is None:
                v_right = value(s_right)
            # accept only if both halves turn by less than pi/4: a single
            # endpoint comparison cannot see whole extra windings
            mid = 0.5 * (s_left + s_right)
            v_mid = value(mid)
            d1, d2 = _dphase(v_left, v_mid), _dphase(v_mid, v_right)
            if abs(d1) < 0.25 * math.pi and abs(d2) < 0.25 * math.pi:
                for s, v, d in ((mid, v_mid, d1), (s_right, v_right, d2)):
                    arg += d
                    params.append(s)
                    values.append(v)
                    args.append(arg)
                s_left, v_left = s_right, v_right
                continue
            if depth >= max_depth:
                raise ZeroCrossingError(
                    f"phase unresolved between path parameters {s_left} and {s_right}",
                    (s_left, s_right),
                )
            stack.append((s_right, v_right, depth + 1))
            stack.append((mid, v_mid, depth + 1))
    return PhasePath(np.array(params), np.array(values), np.array(args))


# ---------------------------------------------------------------------------
# ODE integration
# ---------------------------------------------------------------------------

# Dormand-Prince 5(4) tableau
DP_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
DP_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
DP_B = DP_A[6] + (0.0,)
DP_E = (
    71 / 57600,
    0.0,
    -71 / 16695,
    71 / 1920,
    -17253 / 339200,
    22 / 525,
    -1 / 40,
)


@dataclass(frozen=True)
class OdeSolution:
    """Solution samples returned by :func:`ode_integrate`."""

    t: np.ndarray
    y: np.ndarray
    nsteps: int


def ode_integrate(rhs, y0, t0, t1, tol=1e-10, t_eval=None, h_max=None):
    """Adaptive Dormand-Prince 5(4) integration of ``y' = rhs(t, y)``.

    Parameters
    ----------
    rhs : callable
        ``rhs(t, y) -> array_like`` of the same length as `y0`.
    y0 : array_like of complex
        Initial state at `t0`.
    t0, t1 : float
        Integration interval; ``t1 < t0`` integrates backwards.
    tol : float
        Per-step error bound relative to ``max(1, |y|)``, in ``[1e-13, 1e-6]``.
    t_eval : array_like, optional
        Output nodes between `t0` and `t1` (monotone in the integration
        direction). Defaults to ``[t1]``. Steps land exactly on each node.
    h_max : float, optional
        Maximum step length.

    Returns
    -------
    OdeSolution
        ``y`` has shape ``(len(t_eval), len(y0))``.

    Raises
    ------
    StiffnessError
        If the step size underflows.
    """
    if not 1e-13 <= tol <= 1e-6:
        raise ValueError(f"tol {tol} outside [1e-13, 1e-6]")
    y = np.array(y0, dtype=complex)
    t = float(t0)
    direction = 1.0 if t1 >= t0 else -1.0
    nodes = np.atleast_1d(np.asarray(t1 if t_eval is None else t_eval, dtype=float))
    span = abs(t1 - t0)
    h_max = span if h_max is None else float(h_max)
    h = min(h_max, 1e-2 * max(span, 1e-300)) if span > 0 else 0.0
    out = np.empty((nodes.size, y.size), dtype=complex)
    k1 = np.asarray(rhs(t, y), dtype=complex)
    nsteps = 0
    for i, target in enumerate(nodes):
        while direction * (target - t) > 1e-14 * max(1.0, abs(t)):
            step = direction * min(h, abs(target - t))
            ks = [k1]
            for s in range(1, 7):
                ys = y + step * sum(a * kk for a, kk in zip(DP_A[s], ks))
                ks.append(np.asarray(rhs(t + DP_C[s] * step, ys), dtype=complex))
            y_new = y + step * sum(b * kk for b, kk in zip(DP_B, ks) if b)
            err_vec = step * sum(e * kk for e, kk in zip(DP_E, ks) if e)
            scale = tol * np.maximum(1.0, np.maximum(np.abs(y), np.abs(y_new)))
            err = float(np.max(np.abs(err_vec) / scale)) if y.size else 0.0
            if err <= 1.0:
                t += step
                y = y_new
                k1 = ks[6]
                nsteps += 1
                fac = 5.0 if err == 0 else min(5.0, 0.9 * err ** -0.2)
                h = min(h_max, abs(step) * max(0.2, fac))
            else:
                h = abs(step) * max(0.2, 0.9 * err ** -0.2)
                if h < 1e-14 * max(1.0, abs(t)):
                    raise StiffnessError(f"step size underflow at t = {t}")
        t = float(target)
        out[i] = y
    return OdeSolution(nodes, out, nsteps)
