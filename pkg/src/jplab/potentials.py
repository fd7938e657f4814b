"""
Potentials for the half-line and disk problems.

Both kinds are frozen dataclasses, hence hashable, so that solver caches can
key on them. Each carries a vectorized sampler and, for the radial ODE, a
scalar callback that avoids numpy overhead.

Presets
-------
Half-line (:func:`potential_1d`):
    ``square_well{v0, a}``, ``gaussian{amp, center, width}``,
    ``exp_decay{amp, rate, cutoff}``, ``zero{cutoff}``.
Disk (:func:`radial_potential`):
    ``square_well{v0, a}``, ``gaussian{amp, width, center}``, ``zero``.
"""

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import ConfigError

__all__ = [
    "TAIL_TOL",
    "Potential1D",
    "RadialPotential",
    "potential_1d",
    "radial_potential",
    "PRESETS_1D",
    "PRESETS_RADIAL",
]

TAIL_TOL = 1e-12


def _factor(values):
    """``u = e^{i arg V} |V|^{1/2}`` and ``v = |V|^{1/2}``."""
    values = np.asarray(values, dtype=complex)
    v = np.sqrt(np.abs(values))
    u = np.zeros_like(values)
    nz = v > 0
    u[nz] = values[nz] / v[nz]
    return u, v


@dataclass(frozen=True)
class Potential1D:
    """Half-line potential supported in ``[0, cutoff]``.

    Attributes
    ----------
    name : str
    params : tuple of (str, float)
    cutoff : float
        ``X_inf``; the sampler returns exactly zero beyond it.
    l1_bound : float
        Declared bound on ``int_0^cutoff |V|``.
    func : callable
        Vectorized ``x -> V(x)`` valid on ``[0, cutoff]`` (closed).
    real : bool
        Whether ``V`` is real-valued.
    """

    name: str
    params: tuple
    cutoff: float
    l1_bound: float
    func: Callable = field(compare=False, hash=False, repr=False)
    real: bool = True

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        vals = np.asarray(self.func(x), dtype=complex)
        vals = np.broadcast_to(vals, x.shape).copy()
        vals[(x > self.cutoff) | (x < 0)] = 0.0
        return vals if vals.ndim else complex(vals)

    def factors(self, x):
        """``(u(x), v(x))`` factorization arrays."""
        return _factor(self(x))

    @property
    def is_zero(self):
        return self.name == "zero"

    def check(self, samples=200):
        """Spot-check the tail and L1 invariants; raises ConfigError."""
        # the untruncated sampler must already be negligible past the cutoff
        tail = self.func(self.cutoff * (1.0 + np.geomspace(1e-6, 10.0, samples)))
        if np.max(np.abs(tail)) > TAIL_TOL:
            raise ConfigError(f"{self.name}: |V| exceeds {TAIL_TOL} beyond cutoff")
        x, w = np.polynomial.legendre.leggauss(400)
        x = 0.5 * self.cutoff * (x + 1)
        l1 = 0.5 * self.cutoff * np.dot(w, np.abs(self(x)))
        if l1 > 1.01 * self.l1_bound + 1e-300:
            raise ConfigError(f"{self.name}: L1 norm {l1:.6g} exceeds declared bound")
        return l1

    @classmethod
    def from_function(cls, func, cutoff, l1_bound, real=True, name="custom"):
        """Wrap a vectorized callable; identity of `func` enters the hash."""
        return cls(name, (("id", id(func)),), float(cutoff), float(l1_bound), func, real)


def _well_1d(v0, a):
    v0, a = float(v0), float(a)
    if a <= 0:
        raise ConfigError("square_well: a must be positive")
    return Potential1D(
        "square_well",
        (("v0", v0), ("a", a)),
        a,
        abs(v0) * a,
        lambda x: np.where(np.asarray(x) <= a, -v0, 0.0),
    )


def _gauss_1d(amp, center, width):
    amp, center, width = float(amp), float(center), float(width)
    if width <= 0:
        raise ConfigError("gaussian: width must be positive")
    reach = math.sqrt(max(math.log(abs(amp) / 1e-13), 0.0)) if amp else 0.0
    cutoff = max(center + width * reach, width)
    return Potential1D(
        "gaussian",
        (("amp", amp), ("center", center), ("width", width)),
        cutoff,
        abs(amp) * width * math.sqrt(math.pi),
        lambda x: amp * np.exp(-(((np.asarray(x) - center) / width) ** 2)),
    )


def _exp_1d(amp, rate, cutoff):
    amp, rate, cutoff = float(amp), float(rate), float(cutoff)
    if rate <= 0 or cutoff <= 0:
        raise ConfigError("exp_decay: rate and cutoff must be positive")
    return Potential1D(
        "exp_decay",
        (("amp", amp), ("rate", rate), ("cutoff", cutoff)),
        cutoff,
        abs(amp) * (1.0 - math.exp(-rate * cutoff)) / rate,
        lambda x: np.where(np.asarray(x) <= cutoff, amp * np.exp(-rate * np.asarray(x)), 0.0),
    )


def _zero_1d(cutoff=1.0):
    return Potential1D("zero", (("cutoff", float(cutoff)),), float(cutoff), 0.0,
                       lambda x: np.zeros(np.shape(x)))


PRESETS_1D = {
    "square_well": _well_1d,
    "gaussian": _gauss_1d,
    "exp_decay": _exp_1d,
    "zero": _zero_1d,
}


def _build(registry, name, params, kind, **extra):
    if name not in registry:
        raise ConfigError(f"unknown {kind} potential preset {name!r}; choose from {sorted(registry)}")
    try:
        return registry[name](**extra, **dict(params or {}))
    except TypeError as exc:
        raise ConfigError(f"bad parameters for {name}: {exc}") from None


def potential_1d(name, params=None):
    """Build a half-line preset by name."""
    return _build(PRESETS_1D, name, params, "half-line")


@dataclass(frozen=True)
class RadialPotential:
    """Bounded radial potential on the disk of radius ``R``.

    Attributes
    ----------
    R : float
        Disk radius.
    name : str
    params : tuple of (str, float)
    sup : float
        ``||V||_inf`` on ``[0, R]``.
    breaks : tuple of float
        Radii where ``V`` is discontinuous; quadrature panels and ODE steps
        are aligned with them.
    func : callable
        Vectorized sampler.
    scalar : callable or None
        Scalar sampler used by the ODE kernel; ``None`` for ``V = 0``.
    """

    R: float
    name: str
    params: tuple
    sup: float
    breaks: tuple = ()
    func: Callable = field(default=None, compare=False, hash=False, repr=False)
    scalar: Callable = field(default=None, compare=False, hash=False, repr=False)
    real: bool = True

    def __call__(self, r):
        if self.func is None:
            return np.zeros(np.shape(r), dtype=complex)
        return np.asarray(self.func(np.asarray(r, dtype=float)), dtype=complex)

    def factors(self, r):
        return _factor(self(r))

    @property
    def is_zero(self):
        return self.scalar is None

    @property
    def value_at_origin(self):
        return 0.0 if self.scalar is None else self.scalar(0.0)

    @property
    def minimum(self):
        """Lower bound for ``Re V`` on the disk (exact for presets)."""
        if self.is_zero:
            return 0.0
        r = np.linspace(0.0, self.R, 2001)
        return float(min(np.min(self(r).real), 0.0))

    @classmethod
    def from_function(cls, func, scalar, R, sup, breaks=(), real=True, name="custom"):
        """Wrap vectorized and scalar samplers; identity of `func` enters the hash."""
        return cls(float(R), name, (("id", id(func)),), float(sup), tuple(breaks), func, scalar, real)

    def scaled(self, eps):
        """The potential ``eps * V`` (same shape, same breaks)."""
        f, g = self.func, self.scalar
        params = self.params + (("scale", float(eps)),)
        if g is None:
            return self
        return RadialPotential(
            self.R, self.name, params, abs(eps) * self.sup, self.breaks,
            lambda r: eps * f(r), lambda r: eps * g(r), self.real and complex(eps).imag == 0,
        )


def _well_radial(R, v0, a):
    v0, a = float(v0), float(a)
    if not 0 < a:
        raise ConfigError("square_well: a must be positive")
    return RadialPotential(
        R, "square_well", (("v0", v0), ("a", a)), abs(v0),
        (a,) if a < R else (),
        lambda r: np.where(r < a, -v0, 0.0),
        lambda r: -v0 if r < a else 0.0,
    )


def _gauss_radial(R, amp, width, center=0.0):
    amp, width, center = float(amp), float(width), float(center)
    if width <= 0:
        raise ConfigError("gaussian: width must be positive")
    return RadialPotential(
        R, "gaussian", (("amp", amp), ("width", width), ("center", center)), abs(amp), (),
        lambda r: amp * np.exp(-(((r - center) / width) ** 2)),
        lambda r: amp * math.exp(-(((r - center) / width) ** 2)),
    )


def _zero_radial(R):
    return RadialPotential(R, "zero", (), 0.0)


PRESETS_RADIAL = {
    "square_well": _well_radial,
    "gaussian": _gauss_radial,
    "zero": _zero_radial,
}


def radial_potential(name, params=None, R=1.0):
    """Build a disk preset by name on the disk of radius `R`."""
    R = float(R)
    if not R > 0:
        raise ConfigError("disk radius R must be positive")
    return _build(PRESETS_RADIAL, name, params, "radial", R=R)
