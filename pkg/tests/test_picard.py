import math

import numpy as np
import pytest

from nlskdv.dynamics import SimConfig, evolve
from nlskdv.errors import ArgumentError, NoContractionError
from nlskdv.picard import (
    Couplings,
    IterationReport,
    PicardConfig,
    compare_with_dynamics,
    contraction_horizon,
    duhamel_apply,
    fixed_point_defect,
    free_propagator,
    free_trajectories,
    iterate,
    trajectory_distance,
)
from nlskdv.spectral_core import SpectralField, TorusGrid, forward_transform

COUPLED = Couplings(1.0, 1.0, 1.0)
FREE = Couplings(0.0, 0.0, 0.0)


def small_data(N=64, a=1e-3):
    g = TorusGrid(N)
    x = g.points
    u0 = forward_transform(a * (np.exp(1j * x) + 0.5 * np.exp(-2j * x)), g)
    v0 = forward_transform(a * (np.cos(x) + 0.3 * np.sin(3 * x)), g, real=True)
    return u0, v0


def random_field(rng, N=32):
    return forward_transform(rng.normal(size=N) + 1j * rng.normal(size=N), TorusGrid(N))


class TestConfig:
    def test_validation(self):
        with pytest.raises(ArgumentError):
            PicardConfig(0.0)
        with pytest.raises(ArgumentError):
            PicardConfig(0.1, num_time_samples=8)
        with pytest.raises(ArgumentError):
            PicardConfig(0.1, tol=0.0)

    def test_grid(self):
        cfg = PicardConfig(0.1, 20)
        assert cfg.times.size == 21 and cfg.dt == pytest.approx(0.005)
        assert (cfg.k, cfg.s) == (1.0, 1.0)

    def test_report_ratios(self):
        rep = IterationReport()
        for d in (1.0, 0.25, 0.05):
            rep.record(d)
        assert rep.contraction_ratios == pytest.approx([0.25, 0.2])


class TestFreePropagator:
    def test_identity_at_zero(self):
        f = random_field(np.random.default_rng(0))
        for fam in ("schrodinger", "airy"):
            g = free_propagator(f, 0.0, fam)
            assert np.array_equal(np.asarray(g.coeffs)[:16], np.asarray(f.coeffs)[:16])

    @pytest.mark.parametrize("sigma", [0.0, 0.25, 1.0])
    def test_unitary(self, sigma):
        f = random_field(np.random.default_rng(1))
        g = free_propagator(f, 0.37, "schrodinger")
        assert g.sobolev_norm(sigma) == pytest.approx(f.sobolev_norm(sigma), rel=1e-12)

    def test_group_property(self):
        f = random_field(np.random.default_rng(2))
        for fam in ("schrodinger", "airy"):
            back = free_propagator(free_propagator(f, 0.37, fam), -0.37, fam)
            idx = np.arange(32) != 16
            assert np.max(np.abs(np.asarray(back.coeffs)[idx] - np.asarray(f.coeffs)[idx])) < 1e-12

    def test_phases(self):
        g = TorusGrid(16)
        f = SpectralField.from_modes(g, {2: 1.0})
        assert free_propagator(f, 0.1, "schrodinger").coefficient(2) == pytest.approx(np.exp(-0.4j))
        assert free_propagator(f, 0.1, "airy").coefficient(2) == pytest.approx(np.exp(0.8j))

    def test_unknown_family(self):
        with pytest.raises(ArgumentError):
            free_propagator(random_field(np.random.default_rng(3)), 1.0, "heat")


class TestDuhamel:
    def test_zero_couplings_give_free_flow(self):
        u0, v0 = small_data(32, a=1.0)
        cfg = PicardConfig(0.1, 16)
        fu, fv = free_trajectories(u0, v0, cfg)
        rng = np.random.default_rng(0)
        junk = rng.normal(size=fu.shape) + 1j * rng.normal(size=fu.shape)
        # v_t still has the uncoupled v^2 term, so feed zero v to isolate u
        u, _ = duhamel_apply(junk, np.zeros_like(fv), u0, v0, cfg, FREE)
        assert np.max(np.abs(u - fu)) < 1e-15

    def test_first_iterate_from_zero(self):
        u0, v0 = small_data(32, a=1.0)
        cfg = PicardConfig(0.1, 16)
        fu, fv = free_trajectories(u0, v0, cfg)
        z = np.zeros_like(fu)
        u, v = duhamel_apply(z, z, u0, v0, cfg, COUPLED)
        assert np.max(np.abs(u - fu)) < 1e-15
        assert np.max(np.abs(v - fv)) < 1e-15

    def test_shape_mismatch(self):
        u0, v0 = small_data(32)
        cfg = PicardConfig(0.1, 16)
        with pytest.raises(ArgumentError):
            duhamel_apply(np.zeros((16, 32)), np.zeros((17, 32)), u0, v0, cfg, COUPLED)

    def test_quadrature_order(self):
        # the exact solution (from a fine ETDRK4 run) is a manufactured fixed
        # point; its defect under the discrete map is pure quadrature error
        u0, v0 = small_data(32, a=0.5)
        defects = []
        for M in (16, 32, 64):
            cfg = PicardConfig(0.2, M)
            sim = SimConfig(1.0, 1.0, 1.0, 32, cfg.dt / 20, 0.2, True, 20)
            snaps = evolve(u0, v0, sim).snapshots
            u = np.array([np.asarray(s.u.coeffs) for s in snaps])
            v = np.array([np.asarray(s.v.coeffs) for s in snaps])
            un, vn = duhamel_apply(u, v, u0, v0, cfg, COUPLED)
            defects.append(trajectory_distance(un - u, vn - v, 1.0, 1.0))
        for a, b in zip(defects, defects[1:]):
            assert 3.5 <= a / b <= 4.5


class TestIterate:
    def test_small_data_contracts(self):
        u0, v0 = small_data()
        cfg = PicardConfig(0.1, 32)
        fp = iterate(u0, v0, cfg, COUPLED)
        rep = fp.report
        assert rep.converged and rep.iterations_used <= 5
        assert all(r < 0.1 for r in rep.contraction_ratios)
        assert fixed_point_defect(fp, u0, v0, cfg, COUPLED) < 2 * cfg.tol

    def test_stable_under_tol(self):
        u0, v0 = small_data()
        a = iterate(u0, v0, PicardConfig(0.1, 32, tol=1e-10), COUPLED)
        b = iterate(u0, v0, PicardConfig(0.1, 32, tol=1e-13), COUPLED)
        assert trajectory_distance(a.u - b.u, a.v - b.v, 1, 1) < 1e-9

    def test_zero_data(self):
        g = TorusGrid(32)
        fp = iterate(SpectralField.zeros(g), SpectralField.zeros(g, real=True),
                     PicardConfig(0.1, 16), COUPLED)
        assert fp.report.iterations_used == 1 and fp.report.converged
        assert not np.any(fp.u) and not np.any(fp.v)

    def test_no_contraction(self):
        u0, v0 = small_data(32, a=3.0)
        with pytest.raises(NoContractionError) as info:
            iterate(u0, v0, PicardConfig(4.0, 64), COUPLED)
        assert info.value.report.iterations_used >= 1

    def test_horizon_shrinks_with_data(self):
        horizons = []
        for a in (0.1, 0.3, 1.0):
            u0, v0 = small_data(32, a)
            horizons.append(contraction_horizon(u0, v0, COUPLED, t_start=0.1, doublings=8))
        assert all(math.isfinite(h) for h in horizons)
        assert horizons[0] > horizons[1] > horizons[2]


class TestCompare:
    def test_linear_case(self):
        u0, _ = small_data(32, a=1.0)
        v0 = SpectralField.zeros(TorusGrid(32), real=True)
        cfg = PicardConfig(0.1, 16)
        fp = iterate(u0, v0, cfg, FREE)
        assert compare_with_dynamics(fp, u0, v0, cfg, FREE) < 1e-10

    def test_small_data(self):
        u0, v0 = small_data()
        cfg = PicardConfig(0.1, 32)
        fp = iterate(u0, v0, cfg, COUPLED)
        assert compare_with_dynamics(fp, u0, v0, cfg, COUPLED) < 1e-6

    def test_refinement_order(self):
        u0, v0 = small_data()
        dists = []
        for M in (16, 32, 64):
            cfg = PicardConfig(0.1, M)
            fp = iterate(u0, v0, cfg, COUPLED)
            dists.append(compare_with_dynamics(fp, u0, v0, cfg, COUPLED))
        for a, b in zip(dists, dists[1:]):
            assert 3.0 <= a / b <= 5.0
