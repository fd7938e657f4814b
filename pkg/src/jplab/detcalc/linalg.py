"""
Modified Fredholm determinants of finite complex matrices.

All functions take array-likes and validate them with :func:`as_cmatrix`,
which returns a ``complex128`` array; there is no separate matrix class.
"""

import numpy as np
import scipy.linalg as sla

from ..errors import DimensionError, NearSingularError, UnsupportedOrderError
from .ncpoly import cyclic_reduce, tk_polynomial

__all__ = [
    "as_cmatrix",
    "det",
    "det_k",
    "eval_poly",
    "trace_poly",
    "product_formula_residual",
    "det_swap_residual",
    "matrix_jost_pais_residual",
    "schatten_norm",
    "random_matrix",
    "COND_LIMIT",
]

COND_LIMIT = 1e8


def as_cmatrix(m, square=False, name="matrix"):
    """Validate `m` as a finite 2-D complex array.

    Parameters
    ----------
    m : array_like
    square : bool
        Require a square shape.
    name : str
        Used in error messages.
    """
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2:
        raise DimensionError(f"{name} must be 2-D, got shape {a.shape}")
    if square and a.shape[0] != a.shape[1]:
        raise DimensionError(f"{name} must be square, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} has non-finite entries")
    return a


def det(m):
    """Determinant by LU factorization with partial pivoting."""
    a = as_cmatrix(m, square=True)
    if a.shape[0] == 0:
        return 1.0 + 0j
    lu, piv = sla.lu_factor(a, check_finite=False)
    sign = -1.0 if np.count_nonzero(piv != np.arange(piv.size)) % 2 else 1.0
    return complex(sign * np.prod(np.diag(lu)))


def _power_traces(a, top):
    # tr(A^j) for j = 1..top
    out = []
    p = a
    for j in range(1, top + 1):
        if j > 1:
            p = p @ a
        out.append(np.trace(p))
    return out


def det_k(a, k, method="trace"):
    """Regularized determinant ``det_k(I + A)``.

    Parameters
    ----------
    a : array_like
        Square matrix ``A``.
    k : int
        Order, ``k >= 1``; ``k = 1`` is the plain determinant of ``I + A``.
    method : {"trace", "expm"}
        ``"trace"`` uses ``det(I+A) exp(sum_{j<k} (-1)^j tr(A^j) / j)``;
        ``"expm"`` forms ``(I+A) exp(sum_{j<k} (-1)^j A^j / j)`` with a
        matrix exponential and takes its determinant.

    Returns
    -------
    complex
    """
    if not isinstance(k, (int, np.integer)) or k < 1:
        raise UnsupportedOrderError(f"k must be a positive integer, got {k!r}")
    a = as_cmatrix(a, square=True)
    eye = np.eye(a.shape[0], dtype=complex)
    if method == "trace":
        expo = sum(((-1) ** j) * t / j for j, t in enumerate(_power_traces(a, k - 1), start=1))
        return det(eye + a) * np.exp(expo)
    if method == "expm":
        s = np.zeros_like(a)
        p = eye
        for j in range(1, k):
            p = p @ a
            s = s + ((-1) ** j / j) * p
        return det((eye + a) @ sla.expm(s))
    raise ValueError(f"unknown method {method!r}")


def eval_poly(p, a, b):
    """Substitute matrices for the symbols of `p`.

    Word products are memoized by prefix, so shared prefixes are computed
    once.
    """
    a = as_cmatrix(a, square=True, name="A")
    b = as_cmatrix(b, square=True, name="B")
    if a.shape != b.shape:
        raise DimensionError(f"A and B differ in shape: {a.shape} vs {b.shape}")
    n = a.shape[0]
    mats = {"A": a, "B": b}
    cache = {"": np.eye(n, dtype=complex)}

    def word(w):
        if w not in cache:
            cache[w] = word(w[:-1]) @ mats[w[-1]]
        return cache[w]

    out = np.zeros((n, n), dtype=complex)
    for w, c in p.terms.items():
        out += float(c) * word(w)
    return out


def trace_poly(p, a, b):
    """``tr p(A, B)``."""
    return complex(np.trace(eval_poly(p, a, b)))


def _tk_reduced(k):
    # traces only need the cyclic form, which has fewer words
    return cyclic_reduce(tk_polynomial(k))


def product_formula_residual(a, b, k):
    """Residual of ``det_k((I-A)(I-B)) = det_k(I-A) det_k(I-B) exp(tr T_k(A,B))``.

    Returns
    -------
    float
        ``|lhs - rhs| / max(1, |lhs|)``.
    """
    a = as_cmatrix(a, square=True, name="A")
    b = as_cmatrix(b, square=True, name="B")
    if a.shape != b.shape:
        raise DimensionError(f"A and B differ in shape: {a.shape} vs {b.shape}")
    lhs = det_k(-(a + b - a @ b), k)
    rhs = det_k(-a, k) * det_k(-b, k) * np.exp(trace_poly(_tk_reduced(k), a, b))
    return float(abs(lhs - rhs) / max(1.0, abs(lhs)))


def det_swap_residual(a, b):
    """Residual of ``det(I_m - AB) = det(I_n - BA)`` for ``A`` m-by-n, ``B`` n-by-m."""
    a = as_cmatrix(a, name="A")
    b = as_cmatrix(b, name="B")
    if a.shape[1] != b.shape[0] or a.shape[0] != b.shape[1]:
        raise DimensionError(f"incompatible shapes {a.shape} and {b.shape}")
    lhs = det(np.eye(a.shape[0]) - a @ b)
    rhs = det(np.eye(b.shape[0]) - b @ a)
    return float(abs(lhs - rhs) / max(1.0, abs(lhs)))


def matrix_jost_pais_residual(k_n, k_d, k):
    """Finite-matrix check of the determinant reduction.

    With ``A0 = (K_N - K_D)(I - K_D)^{-1}`` and ``B0 = K_D`` one has
    ``(I - A0)(I - B0) = I - K_N``, hence

        det_k(I - K_N) / det_k(I - K_D) = det_k(I - A0) exp(tr T_k(A0, B0)).

    Returns
    -------
    float
        Relative residual of the two sides.

    Raises
    ------
    NearSingularError
        If the condition number of ``I - K_D`` exceeds ``1e8``.
    """
    k_n = as_cmatrix(k_n, square=True, name="K_N")
    k_d = as_cmatrix(k_d, square=True, name="K_D")
    if k_n.shape != k_d.shape:
        raise DimensionError(f"K_N and K_D differ in shape: {k_n.shape} vs {k_d.shape}")
    eye = np.eye(k_d.shape[0], dtype=complex)
    m = eye - k_d
    cond = float(np.linalg.cond(m)) if m.size else 1.0
    if not cond < COND_LIMIT:
        raise NearSingularError(f"I - K_D is near singular (cond ~ {cond:.3e})", cond)
    a0 = np.linalg.solve(m.T, (k_n - k_d).T).T
    lhs = det_k(-k_n, k) / det_k(-k_d, k)
    rhs = det_k(-a0, k) * np.exp(trace_poly(_tk_reduced(k), a0, k_d))
    return float(abs(lhs - rhs) / abs(lhs))


def schatten_norm(m, p):
    """Schatten ``p``-norm ``(sum sigma_i^p)^(1/p)``; ``p = inf`` gives the operator norm."""
    a = as_cmatrix(m)
    if not p >= 1:
        raise ValueError("p must be >= 1")
    if a.size == 0:
        return 0.0
    s = np.linalg.svd(a, compute_uv=False)
    if np.isinf(p):
        return float(s.max())
    return float(np.sum(s**p) ** (1.0 / p))


def random_matrix(rng, rows, cols=None, radius=None, scale=1.0):
    """Complex Gaussian test matrix.

    Parameters
    ----------
    rng : numpy.random.Generator
    rows, cols : int
    radius : float, optional
        For square matrices, rescale to this spectral radius.
    scale : float
        Entry scale when `radius` is not given.
    """
    cols = rows if cols is None else cols
    m = (rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))) * scale
    if radius is not None and rows == cols and rows:
        rho = np.max(np.abs(np.linalg.eigvals(m)))
        if rho > 0:
            m *= radius / rho
    return m
