import math

import numpy as np
import pytest

from jplab.disk2d import (
    CountRecord,
    count_record,
    counting,
    eig_detect,
    lambda_start,
    mode_count,
    radial_grid,
    theorem49_check,
    theorem49_scan,
    xi,
    xi_scan,
)
from jplab.errors import TruncationError

from oracles import J01_SQ, disk_free_count, disk_free_eigenvalues

M_MAX = 6


@pytest.fixture(scope="module")
def grid(disk_well):
    return radial_grid(disk_well, 100)


@pytest.fixture(scope="module")
def spectra(disk_well):
    return {bc: eig_detect((-10, 30), disk_well, bc, M_MAX) for bc in ("D", "N")}


class TestCounting:
    def test_free_examples(self, disk_zero):
        assert counting(-1.0, disk_zero, "D", M_MAX) == 0
        assert counting(6.0, disk_zero, "D", M_MAX) == 1
        assert counting(5.7, disk_zero, "D", M_MAX) == 0

    @pytest.mark.parametrize("bc", ["D", "N"])
    @pytest.mark.parametrize("lam", [3.0, 20.0, 50.0])
    def test_bessel_oracle(self, disk_zero, bc, lam):
        assert counting(lam, disk_zero, bc, 10) == disk_free_count(bc, 1.0, lam, 10)

    def test_right_continuous(self, disk_zero):
        # the constant is a Neumann eigenvalue at exactly zero
        assert mode_count(0, 0.0, disk_zero, "N") == 1
        assert mode_count(0, -1e-9, disk_zero, "N") == 0

    def test_monotone(self, disk_well):
        counts = [counting(lam, disk_well, "N", M_MAX) for lam in np.linspace(-5, 30, 36)]
        assert counts == sorted(counts)

    def test_truncation(self, disk_zero):
        with pytest.raises(TruncationError):
            counting(20.0, disk_zero, "D", 2)


class TestEigenvalues:
    def test_free_dirichlet(self, disk_zero):
        eigs = eig_detect((0, 60), disk_zero, "D", 8)
        assert abs(eigs[0].lam - J01_SQ) < 1e-6 and eigs[0].m == 0
        ref = disk_free_eigenvalues("D", 1.0, 60, 8)
        assert len(eigs) == len(ref)
        assert all(abs(e.lam - lam) < 1e-8 and e.m == m for e, (lam, m) in zip(eigs, ref))

    def test_free_neumann_has_zero(self, disk_zero):
        eigs = eig_detect((-1, 10), disk_zero, "N", 4)
        assert abs(eigs[0].lam) < 1e-10 and eigs[0].m == 0 and eigs[0].mult == 1
        assert [e.m for e in eigs] == [m for _, m in disk_free_eigenvalues("N", 1.0, 10, 4)]

    def test_shooting_agreement(self, spectra):
        for eigs in spectra.values():
            assert eigs and all(e.delta < 1e-6 for e in eigs)

    def test_counts_jump_by_multiplicity(self, disk_well, spectra):
        for bc, eigs in spectra.items():
            for e in eigs:
                below = counting(e.lam - 1e-6, disk_well, bc, M_MAX)
                above = counting(e.lam + 1e-6, disk_well, bc, M_MAX)
                assert above - below == e.mult

    def test_boundary_factor_vanishes(self, spectra):
        for e in spectra["D"] + spectra["N"]:
            if not math.isnan(e.boundary_factor.real):
                assert abs(e.boundary_factor) < 1e-6

    def test_sorted(self, spectra):
        lams = [e.lam for e in spectra["N"]]
        assert lams == sorted(lams)


class TestSpectralShift:
    def test_below_spectrum(self, disk_well, grid, spectra):
        lam = min(e.lam for e in spectra["N"]) - 0.5
        for bc in ("D", "N"):
            assert abs(xi(lam, disk_well, bc, M_MAX, grid)) < 1e-8

    def test_zero_potential(self, disk_zero):
        g = radial_grid(disk_zero, 40)
        assert np.all(np.abs(xi_scan([-2.0, 3.0, 10.0], disk_zero, "D", M_MAX, g)) < 1e-12)

    def test_empty(self, disk_well, grid):
        assert xi_scan([], disk_well, "D", M_MAX, grid).size == 0

    @pytest.mark.parametrize("bc", ["D", "N"])
    def test_integer_valued(self, disk_well, grid, bc):
        lams = [-3.0, 1.0, 4.0, 7.5, 10.0, 15.0, 19.0]
        got = xi_scan(lams, disk_well, bc, M_MAX, grid)
        want = [-(counting(lam, disk_well, bc, M_MAX) - counting(lam, None, bc, M_MAX, 1.0)) for lam in lams]
        assert np.max(np.abs(got - np.array(want))) < 1e-6

    def test_anchor_below_everything(self, disk_well, spectra):
        assert lambda_start(disk_well) < min(e.lam for e in spectra["N"])


class TestCountingIdentity:
    def test_single_point(self, disk_well, grid):
        integer, determinant = theorem49_check(4.0, disk_well, M_MAX, grid)
        assert integer <= 1e-3 and determinant <= 1e-2

    def test_scan(self, disk_well, grid, spectra):
        eig = sorted({round(e.lam, 8) for bc in spectra for e in spectra[bc]})
        mids = [(a + b) / 2 for a, b in zip(eig, eig[1:])][:8]
        out = theorem49_scan(mids, disk_well, M_MAX, grid)
        assert np.all(out["integer"] <= 1e-3)
        assert np.all(out["determinant"] <= 1e-2)

    def test_record(self, disk_well, grid):
        rec = count_record(4.0, disk_well, M_MAX, grid)
        assert isinstance(rec, CountRecord)
        assert abs(rec.xi_d + (rec.n_d - rec.n0_d)) < 1e-6
        assert abs(rec.xi_n + (rec.n_n - rec.n0_n)) < 1e-6
