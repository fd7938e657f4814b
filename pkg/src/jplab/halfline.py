"""
Half-line Schrodinger operators ``-d^2/dx^2 + V`` on ``(0, inf)``.

Solutions are computed from their Volterra integral equations by product
trapezoid sweeps on the uniform grid ``x_i = i X/n`` (``X`` the support
cutoff of ``V``), and boundary values are Richardson-extrapolated over
``n`` and ``2n``. Birman-Schwinger determinants use a symmetrized Nystrom
discretization on a Gauss-Legendre grid.

Throughout ``k = sqrt_upper(z)``, so ``Im k >= 0`` and real ``z >= 0`` is
read as ``z + i0``.
"""

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from . import kernels
from .detcalc import det
from .errors import EigenvalueHitError, VerificationError
from .numkit import gauss_legendre, sqrt_upper

__all__ = [
    "SolutionTable",
    "JostData",
    "BoundStateWarning",
    "VerificationError",
    "solve_phi_d",
    "solve_theta",
    "solve_jost",
    "wronskian",
    "jost_function",
    "m_functions",
    "free_green",
    "bs_matrix",
    "det_halfline",
    "perturbed_green",
    "boundary_scalar",
    "bound_states",
    "theorem11_residuals",
    "theorem12_chain",
]

DIRICHLET = "D"
NEUMANN = "N"
_BC_ALIASES = {"d": DIRICHLET, "dirichlet": DIRICHLET, "n": NEUMANN, "neumann": NEUMANN}

JOST_N = 1000
NYSTROM_N = 400


class BoundStateWarning(UserWarning):
    """A root sits at the edge of the search interval."""


def normalize_bc(bc):
    try:
        return _BC_ALIASES[str(bc).lower()]
    except KeyError:
        raise ValueError(f"boundary condition must be Dirichlet or Neumann, got {bc!r}") from None


@dataclass(frozen=True)
class SolutionTable:
    """Values and derivatives of one solution on the uniform grid.

    Attributes
    ----------
    x : ndarray
        Nodes ``0, h, ..., X``.
    values, derivs : ndarray
    z : complex
    kind : str
        ``"phi"``, ``"theta"`` or ``"jost"``.
    """

    x: np.ndarray
    values: np.ndarray
    derivs: np.ndarray
    z: complex
    kind: str

    def __call__(self, xq):
        """Cubic Hermite interpolation of the values at `xq`."""
        xq = np.asarray(xq, dtype=float)
        h = self.x[1] - self.x[0]
        j = np.clip(np.floor(xq / h).astype(int), 0, self.x.size - 2)
        s = xq / h - j
        y0, y1 = self.values[j], self.values[j + 1]
        d0, d1 = self.derivs[j] * h, self.derivs[j + 1] * h
        h00 = (1 + 2 * s) * (1 - s) ** 2
        h10 = s * (1 - s) ** 2
        h01 = s * s * (3 - 2 * s)
        h11 = s * s * (s - 1)
        return h00 * y0 + h10 * d0 + h01 * y1 + h11 * d1


@dataclass(frozen=True)
class JostData:
    """Jost function ``f(z, 0)`` and ``f'(z, 0)``."""

    z: complex
    f0: complex
    f0p: complex


def _grid(V, n):
    n = int(n)
    if n < 50:
        raise ValueError("grid size n must be at least 50")
    x = np.linspace(0.0, V.cutoff, n + 1)
    return x, x[1] - x[0]


def solve_phi_d(z, V, n=JOST_N):
    """Dirichlet-normalized solution ``phi(0) = 0``, ``phi'(0) = 1``."""
    x, h = _grid(V, n)
    y, yp = kernels.volterra_forward(h, V(x), sqrt_upper(z), 0)
    return SolutionTable(x, y, yp, complex(z), "phi")


def solve_theta(z, V, n=JOST_N):
    """Neumann-normalized solution ``theta(0) = 1``, ``theta'(0) = 0``."""
    x, h = _grid(V, n)
    y, yp = kernels.volterra_forward(h, V(x), sqrt_upper(z), 1)
    return SolutionTable(x, y, yp, complex(z), "theta")


def solve_jost(z, V, n=JOST_N):
    """Jost solution, equal to ``exp(i k x)`` at and beyond the cutoff."""
    x, h = _grid(V, n)
    y, yp = kernels.volterra_backward(h, V(x), sqrt_upper(z))
    return SolutionTable(x, y, yp, complex(z), "jost")


def wronskian(a, b):
    """``W(a, b) = a b' - a' b`` at the common nodes."""
    return a.values * b.derivs - a.derivs * b.values


def _richardson(coarse, fine):
    return (4.0 * fine - coarse) / 3.0


def jost_function(z, V, n=JOST_N):
    """Jost data, Richardson-extrapolated over grids ``n`` and ``2n``."""
    c, f = solve_jost(z, V, n), solve_jost(z, V, 2 * n)
    return JostData(
        complex(z),
        complex(_richardson(c.values[0], f.values[0])),
        complex(_richardson(c.derivs[0], f.derivs[0])),
    )


def _hit_scale(z):
    return 1e-13 * max(1.0, abs(sqrt_upper(z)))


def m_functions(z, V, n=JOST_N):
    """Weyl-Titchmarsh functions ``(m0_D, m_D, m0_N, m_N)``.

    ``m0_D = i k``, ``m_D = f'(0)/f(0)``, ``m0_N = i/k``, ``m_N = -f(0)/f'(0)``.

    Raises
    ------
    EigenvalueHitError
        If ``f(0)`` (Dirichlet operator) or ``f'(0)`` (Neumann operator)
        vanishes.
    """
    k = sqrt_upper(z)
    jd = jost_function(z, V, n)
    if abs(jd.f0) < _hit_scale(z):
        raise EigenvalueHitError(f"z = {z} is an eigenvalue of the Dirichlet operator")
    if abs(jd.f0p) < _hit_scale(z):
        raise EigenvalueHitError(f"z = {z} is an eigenvalue of the Neumann operator")
    if k == 0:
        raise EigenvalueHitError("z = 0 is the threshold of the free Neumann operator")
    return 1j * k, jd.f0p / jd.f0, 1j / k, -jd.f0 / jd.f0p


def free_green(z, bc, x, xp):
    """Free half-line Green kernel for Dirichlet or Neumann conditions.

    ``G_D = sin(k x<) e^{i k x>} / k`` and ``G_N = i cos(k x<) e^{i k x>} / k``.
    """
    bc = normalize_bc(bc)
    k = sqrt_upper(z)
    lo = np.minimum(x, xp)
    hi = np.maximum(x, xp)
    if bc == DIRICHLET:
        s = lo if k == 0 else np.sin(k * lo) / k
        return s * np.exp(1j * k * hi)
    if k == 0:
        raise EigenvalueHitError("the free Neumann kernel is singular at z = 0")
    return 1j * np.cos(k * lo) * np.exp(1j * k * hi) / k


def _on_cut(z):
    z = complex(z)
    return z.imag == 0.0 and z.real >= 0.0


def bs_matrix(z, V, bc, n=NYSTROM_N):
    """Symmetrized Nystrom matrix of ``u R_0(z) v``.

    ``M_ij = u_i sqrt(w_i) G_0(x_i, x_j) sqrt(w_j) v_j`` on an ``n``-point
    Gauss-Legendre grid over ``(0, X)``.
    """
    if _on_cut(z):
        raise ValueError(f"z = {z} lies on the cut [0, inf)")
    q = gauss_legendre(n, 0.0, V.cutoff)
    u, v = V.factors(q.nodes)
    sw = np.sqrt(q.weights)
    g = free_green(z, bc, q.nodes[:, None], q.nodes[None, :])
    return (u * sw)[:, None] * g * (sw * v)[None, :]


def det_halfline(z, V, bc, n=NYSTROM_N):
    """``det(I + u R_0 v)``, Richardson-extrapolated over ``n`` and ``2n``."""
    dn = det(np.eye(n) + bs_matrix(z, V, bc, n))
    d2n = det(np.eye(2 * n) + bs_matrix(z, V, bc, 2 * n))
    return complex(_richardson(dn, d2n))


def perturbed_green(z, V, x, xp, n=JOST_N):
    """Dirichlet resolvent kernel ``phi(x<) f(x>) / f(0)`` of the perturbed operator."""
    lo, hi = min(x, xp), max(x, xp)
    vals = []
    for m in (n, 2 * n):
        phi = solve_phi_d(z, V, m)
        jost = solve_jost(z, V, m)
        if abs(jost.values[0]) < _hit_scale(z):
            raise EigenvalueHitError(f"z = {z} is a Dirichlet eigenvalue")
        vals.append(phi(lo) * jost(hi) / jost.values[0])
    return complex(_richardson(*vals))


def _trapezoid(y, h):
    return h * (np.sum(y) - 0.5 * (y[0] + y[-1]))


def boundary_scalar(z, V, n=JOST_N):
    """``1 - S(z)`` for the boundary operator of the ratio identity.

    ``S = gamma_N (H_D - z)^{-1} V g`` with ``g(x) = i e^{ikx}/k`` the free
    Neumann kernel at the boundary point and ``gamma_N h = -h'(0)``.
    Since ``d/dx G(x, x')`` at ``x = 0`` equals ``f(x')/f(0)``,

        S = -(1/f(0)) int_0^X f(x') V(x') g(x') dx'.
    """
    k = sqrt_upper(z)
    if k == 0:
        raise EigenvalueHitError("boundary kernel singular at z = 0")
    vals = []
    for m in (n, 2 * n):
        jost = solve_jost(z, V, m)
        f0 = jost.values[0]
        if abs(f0) < _hit_scale(z):
            raise EigenvalueHitError(f"z = {z} is a Dirichlet eigenvalue")
        x = jost.x
        g = 1j * np.exp(1j * k * x) / k
        vals.append(-_trapezoid(jost.values * V(x) * g, x[1] - x[0]) / f0)
    return complex(1.0 - _richardson(*vals))


def bound_states(V, interval, n=2 * JOST_N, scan=400, xtol=1e-13, check=True):
    """Dirichlet eigenvalues in `interval` from sign changes of ``f(lambda, 0)``.

    Parameters
    ----------
    V : Potential1D
        Real-valued potential.
    interval : (float, float)
        Search window below zero.
    n : int
        Volterra grid size (Richardson over ``n`` and ``2n``).
    scan : int
        Number of bracketing samples.
    check : bool
        Confirm each root with the Birman-Schwinger determinant
        (``|det| <= 1e-4``).

    Returns
    -------
    list of float
    """
    lo, hi = map(float, interval)
    if not V.real:
        raise ValueError("bound_states requires a real potential")
    if not lo < hi <= 0.0:
        raise ValueError("interval must satisfy lo < hi <= 0")
    hi_eff = min(hi, -1e-10)

    def f0(lam):
        return jost_function(lam, V, n).f0.real

    grid = np.linspace(lo, hi_eff, scan + 1)
    vals = np.array([f0(lam) for lam in grid])
    roots = []
    for a, b, fa, fb in zip(grid[:-1], grid[1:], vals[:-1], vals[1:]):
        if fa == 0.0:
            roots.append(float(a))
        elif fa * fb < 0:
            roots.append(float(brentq(f0, a, b, xtol=xtol, rtol=4 * np.finfo(float).eps)))
    if vals[-1] == 0.0:
        roots.append(float(grid[-1]))
    for r in roots:
        if min(abs(r - lo), abs(r - hi_eff)) < 1e-9 * max(1.0, abs(r)):
            warnings.warn(f"root {r} at the search boundary; widen the interval", BoundStateWarning)
    if check:
        for r in roots:
            d = det_halfline(r, V, DIRICHLET)
            if abs(d) > 1e-4:
                raise VerificationError(f"Birman-Schwinger determinant {abs(d):.2e} at root {r}")
    return roots


def theorem11_residuals(z, V, n=NYSTROM_N, jost_n=JOST_N):
    """Relative errors of the determinant formulas against the Jost data.

    Returns
    -------
    (float, float)
        Dirichlet: ``|det_D - f(0)| / |f(0)|``;
        Neumann: ``|det_N - f'(0)/(ik)| / |f'(0)/(ik)|``.
    """
    k = sqrt_upper(z)
    jd = jost_function(z, V, jost_n)
    dd = det_halfline(z, V, DIRICHLET, n)
    dn = det_halfline(z, V, NEUMANN, n)
    ref_n = jd.f0p / (1j * k)
    return abs(dd - jd.f0) / abs(jd.f0), abs(dn - ref_n) / abs(ref_n)


def theorem12_chain(z, V, n=NYSTROM_N, jost_n=JOST_N):
    """The four expressions of the Dirichlet/Neumann ratio identity.

    Returns
    -------
    dict
        ``det_ratio`` (Neumann over Dirichlet determinant), ``one_minus_s``,
        ``md_ratio`` (``m_D / m0_D``), ``mn_ratio`` (``m0_N / m_N``) and
        ``residual``, the largest pairwise relative difference.
    """
    m0d, md, m0n, mn = m_functions(z, V, jost_n)
    vals = {
        "det_ratio": det_halfline(z, V, NEUMANN, n) / det_halfline(z, V, DIRICHLET, n),
        "one_minus_s": boundary_scalar(z, V, jost_n),
        "md_ratio": md / m0d,
        "mn_ratio": m0n / mn,
    }
    items = list(vals.values())
    res = 0.0
    for i in range(len(items)):
        for j in range(i + 1, len(items)):
            res = max(res, abs(items[i] - items[j]) / max(abs(items[i]), abs(items[j])))
    vals["residual"] = res
    return vals

