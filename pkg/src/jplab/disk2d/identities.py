"""
Mode-by-mode evaluation of the disk determinant identities (order k = 2).

For each angular index the Nystrom matrices ``K_D``, ``K_N`` and the
boundary vectors ``alpha``, ``beta`` of :class:`ModeOperator` give

* ``det2(I + K_N) / det2(I + K_D)``, the left-hand ratio;
* ``d_m = mu_m / mu0_m``, the boundary (DtN) factor;
* ``s_m = R alpha^T (I + K_D)^{-1} beta``, the boundary scalar with
  ``d_m = 1 - s_m``;
* ``t_m = R alpha^T K_D (I + K_D)^{-1} beta``, the mode trace of ``T_2``;
* ``t'_m = -R alpha^T K_N (I + K_N)^{-1} beta``, its Neumann counterpart.

The factor ``R`` is the boundary measure ``2 pi R`` divided by the ``2 pi``
of the mode expansion of the free kernel. Full-operator quantities are
products (or sums) over ``m <= M_max`` with multiplicity 2 for ``m >= 1``.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ..detcalc import det_k
from .modes import (
    DIRICHLET,
    NEUMANN,
    assemble_mode,
    dtn_mode,
    dtn_mode_free,
    multiplicity,
)

__all__ = [
    "ModeTerms",
    "mode_terms",
    "lhs_ratio_det",
    "rhs_dtn_det",
    "t2_trace",
    "lemma35_mode_residual",
    "theorem42_residual",
    "neumann_variant_residual",
    "truncation_diagnostic",
    "dln_det_check",
    "ln_det2_modes",
    "clear_cache",
]


@dataclass(frozen=True)
class ModeTerms:
    """Scalars of one angular mode at one spectral parameter."""

    m: int
    mult: int
    det2_d: complex
    det2_n: complex
    mu: complex
    mu0: complex
    s: complex
    t2: complex
    t2_neumann: complex
    trace_d: complex
    trace_n: complex

    @property
    def d(self):
        return self.mu / self.mu0

    @property
    def lhs_factor(self):
        return self.det2_n / self.det2_d


def _boundary_pairing(alpha, x, R, norm):
    """Trace of the rank-one boundary operator in the mode ``c e^{im theta}``.

    Pushing ``c e^{im theta}`` through the adjoint boundary map multiplies it
    by ``c R``; projecting back costs ``conj(c) 2 pi R`` and the mode norm is
    ``|c|^2 2 pi R``.
    """
    c = complex(norm)
    return (np.conj(c) * 2 * np.pi * R) * (c * R) * (alpha @ x) / (abs(c) ** 2 * 2 * np.pi * R)


def _terms(m, z, V, grid, norm=1.0):
    op = assemble_mode(m, z, V, grid)
    R = grid.R
    kd, kn = op.K[DIRICHLET], op.K[NEUMANN]
    eye = np.eye(kd.shape[0])
    xd = np.linalg.solve(eye + kd, op.beta)
    xn = np.linalg.solve(eye + kn, op.beta)
    return ModeTerms(
        m=m,
        mult=multiplicity(m),
        det2_d=det_k(kd, 2),
        det2_n=det_k(kn, 2),
        mu=dtn_mode(m, z, V, R),
        mu0=dtn_mode_free(m, z, R),
        s=complex(_boundary_pairing(op.alpha, xd, R, norm)),
        t2=complex(_boundary_pairing(op.alpha, kd @ xd, R, norm)),
        t2_neumann=complex(-_boundary_pairing(op.alpha, kn @ xn, R, norm)),
        trace_d=complex(np.trace(kd)),
        trace_n=complex(np.trace(kn)),
    )


# lru_cache serializes its own bookkeeping; lookups need no extra lock
@lru_cache(maxsize=4096)
def _terms_cached(m, z, V, grid):
    return _terms(m, z, V, grid)


def mode_terms(m, z, V, grid, norm=1.0):
    """:class:`ModeTerms` of mode `m`, memoized for the default normalization."""
    z = complex(z)
    if norm != 1.0:
        return _terms(m, z, V, grid, norm)
    return _terms_cached(m, z, V, grid)


def clear_cache():
    _terms_cached.cache_clear()


def _all_terms(z, V, M_max, grid):
    return [mode_terms(m, z, V, grid) for m in range(int(M_max) + 1)]


def lhs_ratio_det(z, V, M_max, grid):
    """``prod_m [det2(I + K_N^m) / det2(I + K_D^m)]^{mult(m)}``."""
    return complex(np.prod([t.lhs_factor**t.mult for t in _all_terms(z, V, M_max, grid)]))


def rhs_dtn_det(z, V, M_max, grid):
    """``prod_m [d_m exp(1 - d_m)]^{mult(m)}``, the det2 of the DtN ratio."""
    return complex(np.prod([(t.d * np.exp(1 - t.d)) ** t.mult for t in _all_terms(z, V, M_max, grid)]))


def t2_trace(z, V, M_max, grid, norm=1.0):
    """``sum_m mult(m) t_m``.

    Parameters
    ----------
    norm : complex
        Normalization constant of the boundary basis ``c e^{i m theta}``; the
        trace does not depend on it.
    """
    return complex(sum(mode_terms(m, z, V, grid, norm).t2 * multiplicity(m) for m in range(int(M_max) + 1)))


def lemma35_mode_residual(m, z, V, grid):
    """``|d_m - 1 + s_m|`` for the boundary scalar ``s_m``."""
    t = mode_terms(m, z, V, grid)
    return float(abs(t.d - 1 + t.s))


def theorem42_residual(z, V, M_max, grid):
    """``|lhs - rhs exp(tr T_2)| / |lhs|``."""
    lhs = lhs_ratio_det(z, V, M_max, grid)
    rhs = rhs_dtn_det(z, V, M_max, grid) * np.exp(t2_trace(z, V, M_max, grid))
    return float(abs(lhs - rhs) / abs(lhs))


def neumann_variant_residual(z, V, M_max, grid):
    """Residual of ``det2(I+K_D)/det2(I+K_N) = det2(mu0/mu) exp(tr T_2')``."""
    terms = _all_terms(z, V, M_max, grid)
    lhs = np.prod([(1 / t.lhs_factor) ** t.mult for t in terms])
    rhs = np.prod([((1 / t.d) * np.exp(1 - 1 / t.d)) ** t.mult for t in terms])
    rhs *= np.exp(sum(t.t2_neumann * t.mult for t in terms))
    return float(abs(lhs - rhs) / abs(lhs))


def truncation_diagnostic(z, V, M_max, grid):
    """Deviation from 1 of the last included mode factors.

    Returns
    -------
    dict
        ``lhs_tail = |det2 ratio - 1|`` and ``dtn_tail = |d - 1|`` at
        ``m = M_max``.
    """
    t = mode_terms(int(M_max), z, V, grid)
    return {"lhs_tail": float(abs(t.lhs_factor - 1)), "dtn_tail": float(abs(t.d - 1))}


def ln_det2_modes(z, V, bc, M_max, grid):
    """``sum_m mult(m) ln det2(I + K^m)`` (principal log per mode)."""
    total = 0j
    for m in range(int(M_max) + 1):
        op = assemble_mode(m, z, V, grid, bcs=(bc,), boundary=False)
        total += multiplicity(m) * np.log(det_k(op.K[next(iter(op.K))], 2))
    return total


def dln_det_check(z, V, bc, M_max, grid, h=1e-4, detail=False):
    """Centered difference of ``ln det2`` against the resolvent trace formula.

    Per mode, ``-d/dz ln det2(I + K) = tr[(I + K)^{-1} K K']``, which is the
    discrete form of ``tr[R(z) - R_0(z) + R_0(z) v u R_0(z)]`` with
    ``K' = u R_0(z)^2 v`` obtained from the variational ODE.

    Returns
    -------
    float
        ``|FD + trace| / |trace|`` (or the pair ``(fd, trace)`` if
        `detail`).
    """
    z = complex(z)
    fd = 0j
    trace = 0j
    for m in range(int(M_max) + 1):
        mult = multiplicity(m)
        op = assemble_mode(m, z, V, grid, bcs=(bc,), variational=True, boundary=False)
        key = next(iter(op.K))
        k, dk = op.K[key], op.dK[key]
        eye = np.eye(k.shape[0])
        # tr(R - R0) = -tr[(I+K)^{-1} K'],  tr(R0 v u R0) = tr K'
        term_pert = -np.trace(np.linalg.solve(eye + k, dk))
        term_born = np.trace(dk)
        trace += mult * (term_pert + term_born)
        plus = assemble_mode(m, z + h, V, grid, bcs=(bc,), boundary=False).K[key]
        minus = assemble_mode(m, z - h, V, grid, bcs=(bc,), boundary=False).K[key]
        fd += mult * np.log(det_k(plus, 2) / det_k(minus, 2)) / (2 * h)
    if detail:
        return complex(fd), complex(trace)
    if trace == 0:
        return float(abs(fd))
    return float(abs(fd + trace) / abs(trace))
