"""
Angular-mode reduction on the disk ``{|x| < R}`` with a radial potential.

For angular index ``m`` the radial operator is

    -u'' - u'/r + (m^2/r^2) u + V u

on ``L^2((0, R); r dr)``. Solutions are integrated in ``t = ln r``:

* regular solution ``u = r^m g``:   ``g_tt + 2m g_t = e^{2t}(V - z) g``,
  integrated outward from a Frobenius seed;
* boundary solution ``psi = r^{-m} h``: ``h_tt - 2m h_t = e^{2t}(V - z) h``,
  integrated inward from ``R`` with Dirichlet or Neumann data.

Both directions keep the dominant solution, so no Bessel functions of the
second kind are needed. The Green kernel is

    G(r, r') = -(r</r>)^m g(r<) h(r>) / C,   C = -2m g h + g h_t - g_t h,

where ``C`` is the (constant) ``r``-weighted Wronskian.
"""

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .. import kernels
from ..errors import EigenvalueHitError
from ..numkit import bessel_j_logderiv, composite_gauss_legendre, sqrt_upper
from ..potentials import RadialPotential

__all__ = [
    "RadialGrid",
    "RegularSolution",
    "ModeOperator",
    "radial_grid",
    "radial_regular",
    "boundary_solution",
    "assemble_mode",
    "mode_green",
    "bs_mode_matrix",
    "dtn_mode",
    "dtn_mode_free",
    "ntd_mode",
    "multiplicity",
    "ODE_TOL",
]

ODE_TOL = 1e-12
# relative size below which a boundary value counts as an eigenvalue hit
HIT_TOL = 1e-10
H_MAX = 0.25
DIRICHLET = "D"
NEUMANN = "N"


def multiplicity(m):
    """Number of angular modes with index ``+-m``."""
    return 1 if m == 0 else 2


def _bc(bc):
    key = str(bc).upper()[:1]
    if key not in (DIRICHLET, NEUMANN):
        raise ValueError(f"boundary condition must be Dirichlet or Neumann, got {bc!r}")
    return key


@dataclass(frozen=True)
class RadialGrid:
    """Composite Gauss-Legendre grid on ``(0, R)`` aligned with `breaks`.

    Hashable, so it can key caches; nodes are built lazily.
    """

    R: float
    n: int
    breaks: tuple = ()

    @cached_property
    def quad(self):
        return composite_gauss_legendre(self.n, 0.0, self.R, self.breaks)

    @property
    def r(self):
        return self.quad.nodes

    @property
    def w(self):
        return self.quad.weights

    @cached_property
    def sqrt_area(self):
        """``sqrt(w_j r_j)``, the symmetrizing weights."""
        return np.sqrt(self.quad.weights * self.quad.nodes)


def radial_grid(V, n):
    """Grid for potential `V` (panels split at its discontinuities)."""
    return RadialGrid(float(V.R), int(n), tuple(V.breaks))


def _zero(R):
    return RadialPotential(float(R), "zero", (), 0.0)


def _seed_radius(R, z, v0):
    return 1e-4 * min(R, 10.0 / math.sqrt(1.0 + abs(z - v0)))


@dataclass(frozen=True)
class RegularSolution:
    """Regular solution ``u = r^m g`` sampled on a radial grid.

    Attributes
    ----------
    m : int
    z : complex
    r : ndarray
        Sample radii (ascending).
    g, gt : ndarray
        ``g`` and ``dg/dt`` at `r`.
    gR, gtR : complex
        Values at ``R``.
    dg, dgt : ndarray or None
        ``d/dz`` of ``g`` and ``g_t`` (variational solution) if requested.
    dgR, dgtR : complex or None
    R : float
    """

    m: int
    z: complex
    r: np.ndarray
    g: np.ndarray
    gt: np.ndarray
    gR: complex
    gtR: complex
    R: float
    dg: np.ndarray = None
    dgt: np.ndarray = None
    dgR: complex = None
    dgtR: complex = None

    @property
    def uR(self):
        """``u(R)``."""
        return self.R**self.m * self.gR

    @property
    def upR(self):
        """``u'(R)``."""
        return self.R ** (self.m - 1) * (self.m * self.gR + self.gtR)

    @property
    def log_derivative(self):
        """``R u'(R) / u(R) = m + g_t(R)/g(R)``."""
        return self.m + self.gtR / self.gR


def _t_nodes(r, R, breaks, forward):
    """Sorted integration nodes (log radius) with break points inserted.

    Returns the node array and the index map from `r` into it.
    """
    extra = [math.log(b) for b in breaks if 0 < b < R]
    t = np.concatenate([np.log(r), extra, [math.log(R)]])
    order = np.argsort(t, kind="stable")
    if not forward:
        order = order[::-1]
    inv = np.empty_like(order)
    inv[order] = np.arange(order.size)
    return t[order], inv[: r.size], inv[-1]


def radial_regular(m, z, V, R=None, r=None, variational=False, tol=ODE_TOL, count=False):
    """Solution regular at the origin.

    Parameters
    ----------
    m : int
        Angular index.
    z : complex
        Spectral parameter.
    V : RadialPotential or None
        ``None`` means the free problem.
    R : float, optional
        Disk radius (defaults to ``V.R``).
    r : array_like, optional
        Extra sample radii in ``(0, R)``, ascending.
    variational : bool
        Also integrate ``d/dz`` of the solution.
    count : bool
        Return the number of zeros of ``u`` in ``(0, R)`` as well.

    Returns
    -------
    RegularSolution
        and, if `count`, the zero count.

    Notes
    -----
    The solution is seeded at ``r0 <= 1e-4 R`` by ``g = 1 + c r0^2`` with
    ``c = (V(0) - z) / (4(m + 1))``; sample radii below ``r0`` use the same
    series. The normalization is arbitrary.
    """
    if V is None:
        V = _zero(R)
    R = float(V.R if R is None else R)
    z = complex(z)
    r = np.asarray([] if r is None else r, dtype=float)
    v0 = V.value_at_origin
    r0 = _seed_radius(R, z, v0)
    c = (v0 - z) / (4.0 * (m + 1))
    dc = -1.0 / (4.0 * (m + 1))
    seed = [1 + c * r0 * r0, 2 * c * r0 * r0]
    if variational:
        seed += [dc * r0 * r0, 2 * dc * r0 * r0]
    inner = r <= r0
    outer = ~inner
    t, idx, idx_R = _t_nodes(r[outer], R, V.breaks, forward=True)
    Y, _, nsign = kernels.radial_solve(
        float(m), z, V.scalar, math.log(r0), seed, t, tol, H_MAX, bool(count)
    )
    dim = len(seed)
    vals = np.empty((r.size, dim), dtype=complex)
    vals[outer] = Y[idx]
    ri = r[inner] ** 2
    vals[inner, 0] = 1 + c * ri
    vals[inner, 1] = 2 * c * ri
    if variational:
        vals[inner, 2] = dc * ri
        vals[inner, 3] = 2 * dc * ri
    YR = Y[idx_R]
    sol = RegularSolution(
        m, z, r, vals[:, 0], vals[:, 1], YR[0], YR[1], R,
        *((vals[:, 2], vals[:, 3], YR[2], YR[3]) if variational else ()),
    )
    if count:
        return sol, nsign
    return sol


def boundary_solution(m, z, V, bc, r, R=None, variational=False, tol=ODE_TOL):
    """Scaled boundary solution ``h`` with ``psi = r^{-m} h``.

    Dirichlet: ``h(R) = 0``, ``h_t(R) = 1``; Neumann: ``h(R) = 1``,
    ``h_t(R) = m`` (so ``psi'(R) = 0``).

    Returns
    -------
    dict
        ``h``, ``ht`` at `r` and ``hR``, ``htR``; with `variational`, also
        ``dh``, ``dht`` (the ``z``-derivatives, zero at ``R``).
    """
    if V is None:
        V = _zero(R)
    R = float(V.R if R is None else R)
    bc = _bc(bc)
    r = np.asarray(r, dtype=float)
    seed = [0j, 1 + 0j] if bc == DIRICHLET else [1 + 0j, complex(m)]
    if variational:
        seed += [0j, 0j]
    t, idx, _ = _t_nodes(r, R, V.breaks, forward=False)
    # drop the starting point itself from the node list
    Y, _, _ = kernels.radial_solve(
        -float(m), complex(z), V.scalar, math.log(R), seed, t, tol, H_MAX, False
    )
    vals = Y[idx]
    out = {"h": vals[:, 0], "ht": vals[:, 1], "hR": seed[0], "htR": seed[1]}
    if variational:
        out.update(dh=vals[:, 2], dht=vals[:, 3], dhR=0j, dhtR=0j)
    return out


def _wronskian(m, gR, gtR, hR, htR):
    return -2 * m * gR * hR + gR * htR - gtR * hR


def _kernel(m, r, g, h, C):
    """``-(r</r>)^m g(r<) h(r>) / C`` on the grid (r ascending)."""
    n = r.size
    ar = np.arange(n)
    lo = np.minimum.outer(ar, ar)
    hi = np.maximum.outer(ar, ar)
    lr = np.log(r)
    ratio = np.exp(m * (lr[lo] - lr[hi])) if m else 1.0
    return -ratio * g[lo] * h[hi] / C


@dataclass(frozen=True)
class ModeOperator:
    """Discretized free Green kernels and Birman-Schwinger matrices of one mode.

    Attributes
    ----------
    m : int
    z : complex
    grid : RadialGrid
    u, v : ndarray
        Factorization of ``V`` at the nodes.
    G : dict
        Free Green matrices ``G[bc][i, j] = G_0(r_i, r_j)``.
    K : dict
        ``K[bc] = diag(u d) G diag(d v)``, ``d = sqrt(w r)``.
    alpha, beta : ndarray
        Boundary vectors ``d v a`` and ``d u b`` with
        ``a_j = d/dR G_0^D(R, r_j)`` and ``b_j = G_0^N(r_j, R)``.
    dK : dict
        ``z``-derivatives of ``K`` (only when assembled with ``variational``).
    """

    m: int
    z: complex
    grid: RadialGrid
    u: np.ndarray
    v: np.ndarray
    G: dict
    K: dict
    alpha: np.ndarray
    beta: np.ndarray
    dK: dict

    @property
    def size(self):
        return self.grid.r.size


def assemble_mode(m, z, V, grid, bcs=(DIRICHLET, NEUMANN), variational=False, boundary=True):
    """Build the :class:`ModeOperator` for index `m` at `z`."""
    z = complex(z)
    r, d = grid.r, grid.sqrt_area
    R = grid.R
    free = radial_regular(m, z, None, R, r, variational=variational)
    u, v = V.factors(r) if V is not None else (np.zeros(r.size), np.zeros(r.size))
    ud, dv = u * d, d * v
    G, K, dK = {}, {}, {}
    for bc in bcs:
        bc = _bc(bc)
        hs = boundary_solution(m, z, None, bc, r, R, variational=variational)
        C = _wronskian(m, free.gR, free.gtR, hs["hR"], hs["htR"])
        if abs(C) < HIT_TOL * max(1.0, abs(free.gR), abs(free.gtR)):
            raise EigenvalueHitError(f"z = {z} is a free {bc} eigenvalue of mode {m}")
        G[bc] = _kernel(m, r, free.g, hs["h"], C)
        K[bc] = ud[:, None] * G[bc] * dv[None, :]
        if variational:
            dC = -2 * m * free.dgR * hs["hR"] + free.dgR * hs["htR"] - free.dgtR * hs["hR"]
            dG = (
                _kernel(m, r, free.dg, hs["h"], C)
                + _kernel(m, r, free.g, hs["dh"], C)
                - G[bc] * dC / C
            )
            dK[bc] = ud[:, None] * dG * dv[None, :]
    if boundary:
        scale = np.exp(m * (np.log(r) - math.log(R))) if m else np.ones_like(r)
        a = -scale * free.g / (R * free.gR)
        denom = m * free.gR + free.gtR
        if abs(denom) < HIT_TOL * max(1.0, abs(free.gR)):
            raise EigenvalueHitError(f"z = {z} is a free Neumann eigenvalue of mode {m}")
        b = scale * free.g / denom
        alpha, beta = dv * a, ud * b
    else:
        alpha = beta = None
    return ModeOperator(m, z, grid, u, v, G, K, alpha, beta, dK)


def mode_green(m, z, bc, grid):
    """Free radial Green matrix ``G_0(r_i, r_j)`` of mode `m` (``L^2(r dr)``)."""
    return assemble_mode(m, z, None, grid, bcs=(bc,), boundary=False).G[_bc(bc)]


def bs_mode_matrix(m, z, V, bc, grid):
    """Birman-Schwinger matrix ``u_i d_i G_0(r_i, r_j) d_j v_j`` of mode `m`."""
    return assemble_mode(m, z, V, grid, bcs=(bc,), boundary=False).K[_bc(bc)]


def dtn_mode(m, z, V, R=None):
    """Perturbed Dirichlet-to-Neumann value ``mu_m = -u'(R)/u(R)``.

    Raises
    ------
    EigenvalueHitError
        If ``u(R)`` vanishes (Dirichlet eigenvalue of the mode).
    """
    sol = radial_regular(m, z, V, R)
    if abs(sol.gR) < HIT_TOL * max(1.0, abs(sol.gtR)):
        raise EigenvalueHitError(f"z = {z} is a Dirichlet eigenvalue of mode {m}")
    return complex(-sol.log_derivative / sol.R)


def dtn_mode_free(m, z, R):
    """Free value ``mu0_m = -k J_m'(kR) / J_m(kR)``, ``k = sqrt_upper(z)``."""
    k = sqrt_upper(z)
    if k == 0:
        return complex(-m / R)
    w = k * R
    try:
        ld = bessel_j_logderiv(m, w)
    except ZeroDivisionError:
        ld = math.inf
    # J/J' is the distance to the nearest zero in w to first order
    if abs(1 / ld) < HIT_TOL * abs(w):
        raise EigenvalueHitError(f"z = {z} is a free Dirichlet eigenvalue of mode {m}")
    return complex(-k * ld)


def ntd_mode(m, z, V, R=None):
    """Neumann-to-Dirichlet value ``u(R)`` for the solution with ``u'(R) = 1``.

    The regular solution is renormalized at the boundary, which reproduces
    ``-1/mu_m``.
    """
    sol = radial_regular(m, z, V, R)
    up = sol.upR
    if abs(up) < HIT_TOL * max(1.0, abs(sol.uR)):
        raise EigenvalueHitError(f"z = {z} is a Neumann eigenvalue of mode {m}")
    return complex(sol.uR / up)
