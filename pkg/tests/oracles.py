"""Closed-form reference values used across the test suite."""

import cmath
import math

import numpy as np
from scipy.optimize import brentq
from scipy.special import jn_zeros, jnp_zeros

# first positive zero of J_0, squared
J01_SQ = 5.783185962946784


def well_jost(z, v0, a):
    """``(f(0), f'(0))`` for ``V = -v0`` on ``(0, a)``; ``k = sqrt(z)`` with ``Im k >= 0``."""
    k = cmath.sqrt(z)
    if k.imag < 0 or (k.imag == 0 and k.real < 0):
        k = -k
    q = cmath.sqrt(z + v0)
    e = cmath.exp(1j * k * a)
    f0 = e * (cmath.cos(q * a) - 1j * k * cmath.sin(q * a) / q)
    f0p = e * (q * cmath.sin(q * a) + 1j * k * cmath.cos(q * a))
    return f0, f0p


def well_bound_states(v0, a):
    """Dirichlet eigenvalues ``-kappa^2`` from ``q cot(q a) = -kappa``."""

    def g(kappa):
        q = math.sqrt(v0 - kappa * kappa)
        return q * math.cos(q * a) + kappa * math.sin(q * a)

    top = math.sqrt(v0)
    kap = np.linspace(1e-9, top * (1 - 1e-12), 20001)
    vals = [g(x) for x in kap]
    roots = [brentq(g, x0, x1, xtol=1e-15) for x0, x1, g0, g1 in zip(kap[:-1], kap[1:], vals[:-1], vals[1:])
             if g0 * g1 < 0]
    return sorted(-x * x for x in roots)


def well_phi(z, v0, a, x):
    """Dirichlet-normalized solution at ``x <= a`` inside the well."""
    q = cmath.sqrt(z + v0)
    return cmath.sin(q * x) / q


def disk_free_eigenvalues(bc, R, lam_max, m_max):
    """Free disk eigenvalues ``<= lam_max`` as ``(lambda, m)`` (modes ``m <= m_max``)."""
    out = []
    for m in range(m_max + 1):
        zs = jn_zeros(m, 40) if bc == "D" else jnp_zeros(m, 40) if m else np.concatenate([[0.0], jnp_zeros(0, 39)])
        out += [((x / R) ** 2, m) for x in zs if (x / R) ** 2 <= lam_max]
    return sorted(out)


def disk_free_count(bc, R, lam, m_max):
    return sum(1 if m == 0 else 2 for _, m in disk_free_eigenvalues(bc, R, lam, m_max))
