import cmath
import math

import numpy as np
import pytest
from scipy.special import jv, jvp

from jplab.errors import AccuracyEnvelopeError, StiffnessError, ZeroCrossingError
from jplab.numkit import (
    bessel_j,
    bessel_j_logderiv,
    composite_gauss_legendre,
    gauss_legendre,
    ode_integrate,
    sqrt_upper,
    track_log,
)


class TestSqrtUpper:
    @pytest.mark.parametrize("z, want", [(-1, 1j), (4, 2), (2j, 1 + 1j), (0, 0)])
    def test_examples(self, z, want):
        assert abs(sqrt_upper(z) - want) < 1e-15

    def test_random(self, rng):
        zs = (rng.standard_normal(10_000) + 1j * rng.standard_normal(10_000)) * 10.0 ** rng.uniform(-3, 3, 10_000)
        for z in zs:
            w = sqrt_upper(z)
            assert w.imag >= 0
            assert abs(w * w - z) <= 1e-14 * abs(z)

    def test_cut_is_upper_limit(self):
        for x in (0.5, 3.0, 100.0):
            assert sqrt_upper(complex(x, 1e-300)) == pytest.approx(sqrt_upper(x))
            assert sqrt_upper(complex(x, -0.0)) == math.sqrt(x)

    def test_negative_axis(self):
        assert sqrt_upper(complex(-9.0, -0.0)) == 3j


class TestGaussLegendre:
    def test_degree_exactness(self):
        for n in range(1, 21):
            q = gauss_legendre(n, -0.3, 1.7)
            for deg in range(2 * n):
                exact = (1.7 ** (deg + 1) - (-0.3) ** (deg + 1)) / (deg + 1)
                assert q.integrate(q.nodes**deg) == pytest.approx(exact, rel=1e-12, abs=1e-12)

    def test_x_squared(self):
        q = gauss_legendre(2, 0.0, 1.0)
        assert abs(q.integrate(q.nodes**2) - 1 / 3) < 1e-15

    def test_exp(self):
        q = gauss_legendre(12, 0.0, 1.0)
        assert abs(q.integrate(np.exp(q.nodes)) - (math.e - 1)) < 1e-14

    def test_symmetry_and_invariants(self):
        q = gauss_legendre(9, 2.0, 5.0)
        assert np.allclose(q.nodes + q.nodes[::-1], 7.0, atol=1e-14)
        assert np.allclose(q.weights, q.weights[::-1], atol=1e-14)
        assert abs(q.weights.sum() - 3.0) < 1e-12
        assert np.all(np.diff(q.nodes) > 0) and q.nodes[0] > 2.0 and q.nodes[-1] < 5.0
        assert np.all(q.weights > 0)

    def test_bad_interval(self):
        with pytest.raises(ValueError):
            gauss_legendre(4, 1.0, 1.0)
        with pytest.raises(ValueError):
            gauss_legendre(0, 0.0, 1.0)

    def test_composite_panels(self):
        q = composite_gauss_legendre(60, 0.0, 1.0, breaks=(0.5, 0.8))
        assert abs(q.weights.sum() - 1.0) < 1e-12
        assert not np.any(np.isclose(q.nodes, 0.5)) and np.all(np.diff(q.nodes) > 0)
        step = np.where(q.nodes < 0.5, 1.0, 0.0)
        assert abs(q.integrate(step) - 0.5) < 1e-14


class TestBessel:
    def test_origin(self):
        j, jp = bessel_j(0, 0)
        assert j == 1 and jp == 0

    def test_small_argument(self):
        w = 1e-4
        j, _ = bessel_j(3, w)
        assert abs(j / ((w / 2) ** 3 / 6) - 1) < 1e-8

    def test_recurrence(self, rng):
        for _ in range(200):
            w = 50 * np.sqrt(rng.uniform()) * cmath.exp(1j * rng.uniform(0, 2 * math.pi))
            m = int(rng.integers(1, 40))
            jm1, j, jp1 = (bessel_j(m + d, w)[0] for d in (-1, 0, 1))
            scale = max(abs(jm1), abs(j), abs(jp1))
            assert abs(jm1 + jp1 - 2 * m / w * j) <= 1e-10 * scale

    def test_against_reference(self, rng):
        for _ in range(300):
            w = 150 * rng.uniform() * cmath.exp(1j * rng.uniform(-0.3, 0.3))
            m = int(rng.integers(0, 60))
            j, jp = bessel_j(m, w)
            assert abs(j - jv(m, w)) <= 1e-10 * abs(jv(m, w)) + 1e-300
            assert abs(jp - jvp(m, w)) <= 1e-10 * (abs(jvp(m, w)) + abs(jv(m, w)))

    def test_series_crossover_consistent(self):
        for w in (11.9, 12.1, 12 * cmath.exp(0.7j)):
            for m in (0, 5, 20):
                assert abs(bessel_j(m, w)[0] - jv(m, w)) <= 1e-11 * max(1.0, abs(jv(m, w)))

    def test_logderiv(self):
        for m, w in ((0, 2.0), (3, 1 + 2j), (10, 30j), (7, 40 + 5j)):
            j, jp = jv(m, w), jvp(m, w)
            assert abs(bessel_j_logderiv(m, w) - jp / j) <= 1e-10 * abs(jp / j)

    @pytest.mark.parametrize("m, w", [(0, 201.0), (121, 1.0), (-1, 1.0)])
    def test_envelope(self, m, w):
        with pytest.raises((AccuracyEnvelopeError, ValueError)):
            bessel_j(m, w)


class TestTrackLog:
    def test_winding(self):
        circle = [cmath.exp(2j * math.pi * t) for t in np.linspace(0, 1, 9)]
        assert abs(track_log(circle, lambda z: z).argument - 2 * math.pi) < 1e-10

    def test_constant(self):
        assert track_log([0, 1, 2j], lambda z: 3 - 1j, anchor=0.0).argument == 0.0

    def test_deformed_path_against_dense_oracle(self):
        def f(z):
            return (z - 0.5) * (z - 2)

        path = [-1, 0.3, 0.3 + 0.2j, 0.7 + 0.2j, 0.7, 1.0]
        got = track_log(path, f).argument
        # dense sampling oracle
        pts = []
        for a, b in zip(path[:-1], path[1:]):
            pts += [a + (b - a) * s for s in np.linspace(0, 1, 20001)[:-1]]
        pts.append(path[-1])
        vals = np.array([f(z) for z in pts])
        want = np.angle(vals[0]) + np.sum(np.angle(vals[1:] / vals[:-1]))
        assert abs(got - want) < 1e-10
        # passing above a simple zero from left to right loses pi
        assert abs(got - (np.angle(f(-1)) - math.pi)) < 1e-10

    def test_refinement_stable(self):
        def f(z):
            return np.exp(3j * z) * (z - 0.2 - 0.1j)

        coarse = [complex(x, 0.5) for x in np.linspace(-2, 2, 3)]
        fine = [complex(x, 0.5) for x in np.linspace(-2, 2, 41)]
        assert abs(track_log(coarse, f).argument - track_log(fine, f).argument) < 1e-9

    def test_increments_bounded(self):
        path = track_log([0, 10], lambda z: cmath.exp(1j * z))
        assert np.all(np.abs(np.diff(path.args)) < math.pi / 2)

    def test_zero_crossing(self):
        with pytest.raises(ZeroCrossingError) as err:
            track_log([-1, 1], lambda z: z)
        lo, hi = err.value.bracket
        assert lo <= 0.5 <= hi


class TestOde:
    def test_exponential(self):
        sol = ode_integrate(lambda t, y: 1j * y, [1.0], 0.0, math.pi, tol=1e-11)
        assert abs(sol.y[-1][0] + 1) < 1e-9

    def test_harmonic(self):
        sol = ode_integrate(lambda t, y: np.array([y[1], -y[0]]), [0.0, 1.0], 0.0, math.pi / 2, tol=1e-12)
        assert abs(sol.y[-1][0] - 1) < 1e-10

    def test_airy_series(self):
        # y'' = t y, y(0) = 1, y'(0) = 0: sum t^{3n} / prod (3j)(3j-1)
        term, total = 1.0, 1.0
        for n in range(1, 30):
            term /= (3 * n) * (3 * n - 1)
            total += term
        sol = ode_integrate(lambda t, y: np.array([y[1], t * y[0]]), [1.0, 0.0], 0.0, 1.0, tol=1e-12)
        assert abs(sol.y[-1][0] - total) < 1e-9

    def test_dense_nodes_and_backwards(self):
        nodes = np.linspace(2.0, 0.0, 7)[1:]
        sol = ode_integrate(lambda t, y: -y, [1.0], 2.0, 0.0, tol=1e-12, t_eval=nodes)
        assert np.allclose(sol.t, nodes)
        assert np.allclose(sol.y[:, 0], np.exp(2.0 - nodes), rtol=1e-10)

    def test_tolerance_range(self):
        with pytest.raises(ValueError):
            ode_integrate(lambda t, y: y, [1.0], 0, 1, tol=1e-3)

    def test_stiffness(self):
        with pytest.raises(StiffnessError):
            ode_integrate(lambda t, y: np.array([1.0 / (1.0 - t) ** 3]), [0.0], 0.0, 1.0, tol=1e-10)
