"""
Eigenvalues, counting functions and the spectral shift on the disk.

Counting uses the Prufer angle of the regular solution: with
``(u, r u') = rho (sin theta, cos theta)`` the angle increases through
multiples of ``pi`` exactly at zeros of ``u``, so at ``r = R``

    N_D = floor(theta / pi),   N_N = floor(theta / pi + 1/2)

count the Dirichlet and Neumann eigenvalues ``<= lambda`` of the mode.

The spectral shift ``xi`` is ``pi^{-1}`` times the continuous argument of
``det2(I + K(z))``, tracked from far below the spectrum along
``lambda_start -> lambda_start + i eta -> lambda + i eta -> lambda``. The
argument of ``det(I + K)`` is tracked instead and ``Im tr K`` subtracted at
the end point: ``exp(-tr K)`` has essential singularities at free
eigenvalues, ``det(I + K)`` only simple poles.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from ..detcalc import det
from ..errors import TruncationError, VerificationError
from ..numkit import track_log
from .identities import mode_terms
from .modes import (
    DIRICHLET,
    NEUMANN,
    _bc,
    assemble_mode,
    dtn_mode,
    dtn_mode_free,
    multiplicity,
    radial_regular,
)

__all__ = [
    "Eigenpair",
    "CountRecord",
    "mode_count",
    "counting",
    "mode_eigenvalues",
    "eig_detect",
    "shoot_eigenvalue",
    "lambda_start",
    "xi_scan",
    "xi",
    "boundary_phase_scan",
    "theorem49_scan",
    "theorem49_check",
    "count_record",
]

COUNT_TOL = 1e-11
ETA = 1.0


@dataclass(frozen=True)
class Eigenpair:
    """A detected eigenvalue of one angular mode.

    Attributes
    ----------
    lam : float
        Eigenvalue.
    m : int
        Angular index; the eigenvalue has multiplicity ``mult``.
    mult : int
    boundary_factor : complex
        Boundary-determinant mode factor at ``lam``: ``d_m`` for Neumann and
        ``1/d_m`` for Dirichlet detection (``nan`` where a free eigenvalue
        coincides).
    shooting : float
        Independent shooting value.
    """

    lam: float
    m: int
    mult: int
    boundary_factor: complex
    shooting: float

    @property
    def delta(self):
        return abs(self.lam - self.shooting)


@dataclass(frozen=True)
class CountRecord:
    """Counting functions and spectral shifts at one real ``lambda``."""

    lam: float
    n0_d: int
    n_d: int
    n0_n: int
    n_n: int
    xi_d: float
    xi_n: float


# ---------------------------------------------------------------------------
# counting
# ---------------------------------------------------------------------------

def _prufer(m, lam, V, R):
    sol, zeros = radial_regular(m, float(lam), V, R, count=True, tol=COUNT_TOL)
    g, gt = sol.gR.real, sol.gtR.real
    s = -1.0 if zeros % 2 else 1.0
    base = math.atan2(s * g, s * (m * g + gt))
    if base <= 0.0:
        base += math.pi
    return zeros * math.pi + base


def mode_count(m, lam, V, bc, R=None):
    """Eigenvalues ``<= lam`` of mode `m` (without multiplicity)."""
    R = float(V.R if R is None else R)
    theta = _prufer(m, lam, V, R)
    if _bc(bc) == DIRICHLET:
        return int(math.floor(theta / math.pi))
    return int(math.floor(theta / math.pi + 0.5))


def _min_v(V):
    return 0.0 if V is None else V.minimum


def _check_truncation(lam, V, M_max, R):
    bound = (M_max + 1) ** 2 / R**2 + _min_v(V)
    if lam >= bound:
        raise TruncationError(
            f"lambda = {lam} needs modes beyond M_max = {M_max} (free bound {bound:.4g})"
        )


def _active_modes(lam_max, V, M_max, R):
    # modes whose spectrum starts above lam_max contribute nothing
    return [m for m in range(int(M_max) + 1) if m * m / R**2 + _min_v(V) <= lam_max]


def counting(lam, V, bc, M_max, R=None):
    """``N(lam)``: eigenvalues ``<= lam`` with multiplicity.

    Raises
    ------
    TruncationError
        If modes above `M_max` could contribute.
    """
    R = float(V.R if R is None else R)
    _check_truncation(lam, V, M_max, R)
    return sum(
        multiplicity(m) * mode_count(m, lam, V, bc, R) for m in _active_modes(lam, V, M_max, R)
    )


# ---------------------------------------------------------------------------
# eigenvalues
# ---------------------------------------------------------------------------

def _boundary_function(m, lam, V, bc, R):
    sol = radial_regular(m, float(lam), V, R, tol=COUNT_TOL)
    if bc == DIRICHLET:
        return sol.gR.real
    return (m * sol.gR + sol.gtR).real


def mode_eigenvalues(m, window, V, bc, R=None, xtol=1e-13):
    """Eigenvalues of mode `m` in ``(lo, hi]``.

    Each eigenvalue is isolated by bisection on the Prufer count and then
    polished with Brent's method on ``u(R)`` or ``u'(R)``.
    """
    bc = _bc(bc)
    R = float(V.R if R is None else R)
    lo, hi = map(float, window)
    c_lo, c_hi = mode_count(m, lo, V, bc, R), mode_count(m, hi, V, bc, R)
    out = []
    a, ca = lo, c_lo
    for j in range(c_lo + 1, c_hi + 1):
        # bracket the j-th eigenvalue: count(a) < j <= count(b)
        b, cb = hi, c_hi
        while cb - ca > 1 or b - a > 1e-3 * max(1.0, abs(b)):
            mid = 0.5 * (a + b)
            cm = mode_count(m, mid, V, bc, R)
            if cm >= j:
                b, cb = mid, cm
            else:
                a, ca = mid, cm
            if b - a < 1e-12:
                break
        f = lambda x: _boundary_function(m, x, V, bc, R)  # noqa: E731
        fa, fb = f(a), f(b)
        lam = b if fb == 0.0 else (a if fa == 0.0 else brentq(f, a, b, xtol=xtol, rtol=1e-15))
        out.append(float(lam))
        a, ca = lam + 1e-9 * max(1.0, abs(lam)), j
    return out


def shoot_eigenvalue(m, guess, V, bc, R=None, width=1e-3):
    """Eigenvalue near `guess` by shooting in ``r`` with scipy's DOP853.

    Independent of the log-radial integrator: solves
    ``u'' = -u'/r + (m^2/r^2 + V - lam) u`` from ``r0 = 1e-3 R`` (Frobenius
    seed) piecewise across the potential breaks. The root of ``u(R)``
    (Dirichlet) or ``u'(R)`` (Neumann) is then found with ``brentq``.
    """
    bc = _bc(bc)
    R = float(V.R if R is None else R)
    r0 = 1e-3 * R
    cuts = [r0] + [b for b in (V.breaks if V is not None else ()) if r0 < b < R] + [R]
    v0 = 0.0 if V is None else V.value_at_origin
    vs = (lambda r: 0.0) if V is None or V.scalar is None else V.scalar

    def end_value(lam):
        c = (v0 - lam) / (4.0 * (m + 1))
        # u = (r/r0)^m (1 + c r^2)
        y = np.array([1 + c * r0**2, (m * (1 + c * r0**2) + 2 * c * r0**2) / r0])

        def rhs(r, y):
            return [y[1], -y[1] / r + (m * m / (r * r) + float(np.real(vs(r))) - lam) * y[0]]

        for a, b in zip(cuts[:-1], cuts[1:]):
            sol = solve_ivp(rhs, (a, b), y, method="DOP853", rtol=1e-13, atol=1e-300)
            y = sol.y[:, -1]
            scale = max(abs(y[0]), abs(y[1]))
            y = y / scale
        return y[0] if bc == DIRICHLET else y[1]

    a, b = guess - width, guess + width
    fa, fb = end_value(a), end_value(b)
    grow = 0
    while fa * fb > 0 and grow < 20:
        width *= 2
        a, b = guess - width, guess + width
        fa, fb = end_value(a), end_value(b)
        grow += 1
    if fa * fb > 0:
        raise VerificationError(f"shooting could not bracket an eigenvalue near {guess}")
    return float(brentq(end_value, a, b, xtol=1e-13, rtol=1e-15))


def _boundary_values(m, lam, V, R):
    # u(R) and R u'(R) up to a common factor
    sol = radial_regular(m, float(lam), V, R, tol=COUNT_TOL)
    return sol.gR, m * sol.gR + sol.gtR


def _boundary_factor(m, lam, V, bc, R, hit=1e-8):
    """``d_m = mu/mu0`` (Neumann) or ``1/d_m`` (Dirichlet) at real `lam`.

    ``nan`` if `lam` is also an eigenvalue of the free mode with the same
    boundary condition, where the ratio is ``0/0``.
    """
    u, up = _boundary_values(m, lam, V, R)
    u0, up0 = _boundary_values(m, lam, None, R)
    if bc == DIRICHLET:
        num, den, free = u * up0, up * u0, abs(u0) / (abs(u0) + abs(up0))
    else:
        num, den, free = up * u0, u * up0, abs(up0) / (abs(u0) + abs(up0))
    if free < hit or den == 0:
        return complex("nan")
    return complex(num / den)


def eig_detect(window, V, bc, M_max, R=None, check=True, tol=1e-6):
    """Eigenvalues in ``(lo, hi]`` with their angular indices.

    Parameters
    ----------
    window : (float, float)
    V : RadialPotential
        Real potential.
    bc : {"D", "N"}
    M_max : int
    check : bool
        Cross-validate each eigenvalue by shooting; raises
        :class:`VerificationError` if ``|delta lambda| > tol``.

    Returns
    -------
    list of Eigenpair
        Sorted by eigenvalue, then mode.
    """
    bc = _bc(bc)
    R = float(V.R if R is None else R)
    lo, hi = map(float, window)
    _check_truncation(hi, V, M_max, R)
    out = []
    for m in _active_modes(hi, V, M_max, R):
        for lam in mode_eigenvalues(m, (lo, hi), V, bc, R):
            shot = shoot_eigenvalue(m, lam, V, bc, R) if check else float("nan")
            if check and abs(shot - lam) > tol:
                raise VerificationError(f"mode {m}: eigenvalue {lam} vs shooting {shot}")
            out.append(Eigenpair(lam, m, multiplicity(m), _boundary_factor(m, lam, V, bc, R), shot))
    out.sort(key=lambda e: (e.lam, e.m))
    return out


# ---------------------------------------------------------------------------
# spectral shift
# ---------------------------------------------------------------------------

def lambda_start(V):
    """Anchor point below every eigenvalue of all four operators."""
    return min(0.0, _min_v(V)) - 5.0 * (0.0 if V is None else V.sup) - 1.0


def _track_modes(lams, V, M_max, grid, value, endpoint, eta=ETA):
    """Sum over modes of the tracked argument of ``value(m, z)``.

    ``endpoint(m, lam)`` is added at each real end point. Returns
    ``pi^{-1} sum_m mult(m) [arg value + endpoint]`` per lambda.
    """
    lams = np.asarray(lams, dtype=float)
    R = grid.R
    if lams.size == 0:
        return np.zeros(0)
    order = np.argsort(lams)
    lam_max = float(lams.max())
    _check_truncation(lam_max, V, M_max, R)
    start = min(lambda_start(V), float(lams.min()) - 1.0)
    total = np.zeros(lams.size)
    for m in _active_modes(lam_max, V, M_max, R):
        f = lambda z, m=m: value(m, z)  # noqa: E731
        top = [complex(start, 0.0), complex(start, eta)] + [complex(lams[i], eta) for i in order]
        path = track_log(top, f, anchor=0.0)
        # argument at each vertex (vertex j sits at path parameter j)
        at_vertex = {int(round(s)): a for s, a in zip(path.params, path.args) if s == round(s)}
        for pos, i in enumerate(order):
            down = track_log([complex(lams[i], eta), complex(lams[i], 0.0)], f, anchor=at_vertex[pos + 2])
            total[i] += multiplicity(m) * (down.argument + endpoint(m, lams[i]))
    return total / math.pi


def _det_value(V, grid, bc):
    def value(m, z):
        k = assemble_mode(m, z, V, grid, bcs=(bc,), boundary=False).K[bc]
        return det(np.eye(k.shape[0]) + k)

    def endpoint(m, lam):
        k = assemble_mode(m, lam, V, grid, bcs=(bc,), boundary=False).K[bc]
        return -np.trace(k).imag

    return value, endpoint


def xi_scan(lams, V, bc, M_max, grid, eta=ETA):
    """Spectral shift ``xi(lambda)`` at each real point of `lams`.

    Scan points must avoid the spectra of the free and perturbed operators
    (margin ``>= 1e-4``).
    """
    bc = _bc(bc)
    value, endpoint = _det_value(V, grid, bc)
    return _track_modes(lams, V, M_max, grid, value, endpoint, eta)


def xi(lam, V, bc, M_max, grid):
    """Spectral shift at a single real point."""
    return float(xi_scan([lam], V, bc, M_max, grid)[0])


def boundary_phase_scan(lams, V, M_max, grid, eta=ETA):
    """``pi^{-1} [arg det2(M_D M0_D^{-1}) + Im tr T_2]`` at real points.

    The mode factor ``d_m`` is tracked continuously; ``Im(1 - d_m)`` and
    ``Im t_m`` are added at the end point (both vanish for real potentials).
    """
    R = grid.R

    def value(m, z):
        return dtn_mode(m, z, V, R) / dtn_mode_free(m, z, R)

    def endpoint(m, lam):
        t = mode_terms(m, complex(lam), V, grid)
        return (1 - t.d).imag + t.t2.imag

    return _track_modes(lams, V, M_max, grid, value, endpoint, eta)


def theorem49_scan(lams, V, M_max, grid):
    """Both residuals of the counting identity at each point.

    Returns
    -------
    dict of ndarray
        ``integer``: ``|(xi_N - xi_D) - ([N_D - N0_D] - [N_N - N0_N])|``;
        ``determinant``: ``|(xi_N - xi_D) - boundary phase|``; plus the
        ingredients ``xi_d``, ``xi_n``, ``boundary`` and the four counts.
    """
    lams = np.asarray(lams, dtype=float)
    R = grid.R
    xd = xi_scan(lams, V, DIRICHLET, M_max, grid)
    xn = xi_scan(lams, V, NEUMANN, M_max, grid)
    bp = boundary_phase_scan(lams, V, M_max, grid)
    counts = {
        key: np.array([counting(lam, pot, bc, M_max, R) for lam in lams])
        for key, pot, bc in (
            ("n0_d", None, DIRICHLET),
            ("n_d", V, DIRICHLET),
            ("n0_n", None, NEUMANN),
            ("n_n", V, NEUMANN),
        )
    }
    integer = np.abs((xn - xd) - ((counts["n_d"] - counts["n0_d"]) - (counts["n_n"] - counts["n0_n"])))
    return {
        "integer": integer,
        "determinant": np.abs((xn - xd) - bp),
        "xi_d": xd,
        "xi_n": xn,
        "boundary": bp,
        **counts,
    }


def theorem49_check(lam, V, M_max, grid):
    """``(integer residual, determinant residual)`` at one point."""
    out = theorem49_scan([lam], V, M_max, grid)
    return float(out["integer"][0]), float(out["determinant"][0])


def count_record(lam, V, M_max, grid):
    """:class:`CountRecord` at a real point off the spectra."""
    R = grid.R
    return CountRecord(
        float(lam),
        counting(lam, None, DIRICHLET, M_max, R),
        counting(lam, V, DIRICHLET, M_max, R),
        counting(lam, None, NEUMANN, M_max, R),
        counting(lam, V, NEUMANN, M_max, R),
        xi(lam, V, DIRICHLET, M_max, grid),
        xi(lam, V, NEUMANN, M_max, grid),
    )
