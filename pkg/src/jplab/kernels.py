"""
Backend selection for the hot kernels.

The compiled extension ``jplab._ckernels`` is used when it imports; otherwise
(or when the environment variable ``JPLAB_PURE`` is set to a non-empty value
other than ``0``) the pure-Python module ``jplab._pykernels`` is used.

Attributes
----------
BACKEND : str
    ``"cython"`` or ``"python"``.
"""

import os

from . import _pykernels

_force_pure = os.environ.get("JPLAB_PURE", "") not in ("", "0")

if _force_pure:
    _impl = _pykernels
    BACKEND = "python"
else:
    try:
        from . import _ckernels as _impl
    except ImportError:
        _impl = _pykernels
        BACKEND = "python"
    else:
        BACKEND = "cython"

volterra_forward = _impl.volterra_forward
volterra_backward = _impl.volterra_backward
radial_solve = _impl.radial_solve

__all__ = ["BACKEND", "volterra_forward", "volterra_backward", "radial_solve"]
