import math
import os
import subprocess
import sys

import numpy as np
import pytest

from jplab import _pykernels, kernels
from jplab.errors import StiffnessError

ck = pytest.importorskip("jplab._ckernels")

K = 1.3 + 0.4j


def well(r):
    return -5.0 if r < 0.5 else 0.0


@pytest.fixture
def profile(rng):
    return rng.uniform(-2, 2, 201) + 1j * rng.uniform(-0.5, 0.5, 201)


@pytest.mark.parametrize("kind", [0, 1])
def test_forward_equivalent(profile, kind):
    a = _pykernels.volterra_forward(0.01, profile, K, kind)
    b = ck.volterra_forward(0.01, profile, K, kind)
    for x, y in zip(a, b):
        assert np.max(np.abs(x - y)) <= 1e-12 * np.max(np.abs(x))


def test_backward_equivalent(profile):
    a = _pykernels.volterra_backward(0.01, profile, K)
    b = ck.volterra_backward(0.01, profile, K)
    for x, y in zip(a, b):
        assert np.max(np.abs(x - y)) <= 1e-12 * np.max(np.abs(x))


@pytest.mark.parametrize("vfunc", [None, well])
@pytest.mark.parametrize("dim", [2, 4])
def test_radial_equivalent(vfunc, dim):
    nodes = np.log(np.linspace(0.05, 1.0, 12))
    y0 = [1.0, 2.0, 0.0, 0.0][:dim]
    a, na, sa = _pykernels.radial_solve(2.0, 3 + 1j, vfunc, math.log(1e-3), y0, nodes, 1e-11, 0.05, True)
    b, nb, sb = ck.radial_solve(2.0, 3 + 1j, vfunc, math.log(1e-3), y0, nodes, 1e-11, 0.05, True)
    assert (na, sa) == (nb, sb)
    assert np.max(np.abs(a - b)) <= 1e-12 * np.max(np.abs(a))


def test_free_sweep_exact():
    y, yp = kernels.volterra_forward(0.01, np.zeros(101), K, 0)
    x = np.arange(101) * 0.01
    assert np.allclose(y, np.sin(K * x) / K, atol=1e-15)
    assert np.allclose(yp, np.cos(K * x), atol=1e-15)


@pytest.mark.parametrize("mod", [_pykernels, ck])
def test_empty_nodes(mod):
    out, steps, signs = mod.radial_solve(0.0, 1.0, None, -3.0, [1.0, 0.0], [], 1e-10, 0.1, False)
    assert out.shape == (0, 2) and steps == signs == 0


@pytest.mark.parametrize("mod", [_pykernels, ck])
def test_singular_potential_raises(mod):
    def pole(r):
        return 1 / (0.5 - r) ** 4 if r != 0.5 else 1e300

    with pytest.raises(StiffnessError, match="underflow"):
        mod.radial_solve(0.0, 1.0, pole, -3.0, [1.0, 0.0], [0.0], 1e-10, 0.1, False)


def test_backend_is_compiled():
    if os.environ.get("JPLAB_PURE", "") in ("", "0"):
        assert kernels.BACKEND == "cython"


def test_pure_override():
    code = "from jplab import kernels; print(kernels.BACKEND)"
    env = dict(os.environ, JPLAB_PURE="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
