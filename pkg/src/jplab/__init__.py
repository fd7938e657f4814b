"""
jplab
=====

Numerical verification of determinant reduction identities for
Schrodinger operators.

Submodules
----------
detcalc
    Correction polynomials ``T_k`` and modified determinants of matrices.
numkit
    Complex square root, quadrature, Bessel functions, phase tracking, ODEs.
halfline
    Half-line Jost functions, m-functions and Birman-Schwinger determinants.
disk2d
    Disk with a radial potential: Dirichlet-to-Neumann determinants,
    eigenvalue detection and counting.
cli
    The ``jplab`` command-line driver.
"""

__version__ = "0.1.0"
