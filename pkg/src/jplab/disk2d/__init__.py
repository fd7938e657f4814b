"""Disk with a radial potential.

Every operator diagonalizes over angular modes ``e^{i m theta}``; the
radial problem of each mode is solved by log-radial ODE integration and
discretized by Nystrom quadrature.
"""

from .identities import *  # noqa: F401,F403
from .identities import __all__ as _identities_all
from .modes import *  # noqa: F401,F403
from .modes import DIRICHLET, NEUMANN
from .modes import __all__ as _modes_all
from .spectra import *  # noqa: F401,F403
from .spectra import __all__ as _spectra_all

__all__ = ["DIRICHLET", "NEUMANN", *_modes_all, *_identities_all, *_spectra_all]
