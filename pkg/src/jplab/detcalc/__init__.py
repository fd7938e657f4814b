"""
Exact correction polynomials and modified determinants of finite matrices.
"""

from .linalg import (
    COND_LIMIT,
    as_cmatrix,
    det,
    det_k,
    det_swap_residual,
    eval_poly,
    matrix_jost_pais_residual,
    product_formula_residual,
    random_matrix,
    schatten_norm,
    trace_poly,
)
from .ncpoly import (
    TK_MAX_ORDER,
    NCPoly,
    canonical_word,
    cyclic_reduce,
    generator_parts,
    golden_payload,
    load_golden,
    tk_polynomial,
)

__all__ = [
    "COND_LIMIT",
    "TK_MAX_ORDER",
    "NCPoly",
    "as_cmatrix",
    "canonical_word",
    "cyclic_reduce",
    "det",
    "det_k",
    "det_swap_residual",
    "eval_poly",
    "generator_parts",
    "golden_payload",
    "load_golden",
    "matrix_jost_pais_residual",
    "product_formula_residual",
    "random_matrix",
    "schatten_norm",
    "tk_polynomial",
    "trace_poly",
]
