import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from nlskdv.errors import ArgumentError, UnsupportedError
from nlskdv.spectral_core import (
    SpaceTimeSpectrum,
    SpectralField,
    TorusGrid,
    bump,
    chi1,
    convolve_spacetime,
    dealias,
    forward_transform,
    inverse_transform,
    lebesgue_norm,
    spectral_derivative,
)


def random_field(rng, N, real=False):
    grid = TorusGrid(N)
    samples = rng.normal(size=N) + (0 if real else 1j * rng.normal(size=N))
    return forward_transform(samples, grid, real=real)


def dft_oracle(samples):
    """Direct O(N^2) sum of the forward transform, independent of numpy.fft."""
    N = len(samples)
    x = 2 * np.pi * np.arange(N) / N
    n = np.fft.fftfreq(N, 1.0 / N)
    return np.array([np.sum(samples * np.exp(-1j * k * x)) / N for k in n])


class TestTorusGrid:
    def test_points(self):
        g = TorusGrid(8)
        assert np.allclose(g.points, 2 * np.pi * np.arange(8) / 8)
        assert np.all(np.diff(g.points) > 0)
        assert g.points[-1] < 2 * np.pi

    @pytest.mark.parametrize("bad", [0, 2, 7, -4, 5.5])
    def test_rejects_invalid_sizes(self, bad):
        with pytest.raises(ArgumentError):
            TorusGrid(bad)

    def test_wavenumbers_fft_order(self):
        g = TorusGrid(8)
        assert list(g.wavenumbers) == [0, 1, 2, 3, -4, -3, -2, -1]
        assert g.index(-4) == 4


class TestTransforms:
    def test_constant(self):
        f = forward_transform(np.ones(16))
        assert f.coefficient(0) == pytest.approx(1.0)
        others = np.delete(np.asarray(f.coeffs), 0)
        assert np.max(np.abs(others)) < 1e-15

    def test_pure_mode(self):
        g = TorusGrid(16)
        f = forward_transform(np.exp(3j * g.points), g)
        expected = np.zeros(16, complex)
        expected[g.index(3)] = 1.0
        assert np.max(np.abs(np.asarray(f.coeffs) - expected)) < 1e-12

    def test_cosine(self):
        g = TorusGrid(8)
        f = forward_transform(np.cos(g.points), g, real=True)
        assert f.coefficient(1) == pytest.approx(0.5)
        assert f.coefficient(-1) == pytest.approx(0.5)

    def test_length_mismatch(self):
        with pytest.raises(ArgumentError):
            forward_transform(np.ones(7), TorusGrid(8))

    def test_inverse_of_constant_mode(self):
        f = SpectralField.from_modes(TorusGrid(8), {0: 1.0})
        assert np.allclose(inverse_transform(f), 1.0)

    def test_inverse_cosine(self):
        g = TorusGrid(8)
        f = SpectralField.from_modes(g, {1: 0.5, -1: 0.5}, real=True)
        assert np.allclose(inverse_transform(f), np.cos(g.points), atol=1e-15)

    def test_matches_direct_sum(self):
        rng = np.random.default_rng(1)
        s = rng.normal(size=32) + 1j * rng.normal(size=32)
        f = forward_transform(s)
        assert np.max(np.abs(np.asarray(f.coeffs) - dft_oracle(s))) < 1e-12

    @pytest.mark.parametrize("N", [8, 16, 32, 64, 128, 256])
    def test_round_trip(self, N):
        rng = np.random.default_rng(N)
        s = rng.normal(size=N) + 1j * rng.normal(size=N)
        back = inverse_transform(forward_transform(s))
        assert np.max(np.abs(back - s)) / np.max(np.abs(s)) < 1e-12

    def test_parseval_many_fields(self):
        rng = np.random.default_rng(7)
        for _ in range(100):
            N = int(rng.choice([8, 16, 32, 64]))
            s = rng.normal(size=N) + 1j * rng.normal(size=N)
            f = forward_transform(s)
            l2_sq = (2 * np.pi / N) * np.sum(np.abs(s) ** 2)
            assert abs(f.l2_norm() ** 2 - l2_sq) <= 1e-10 * l2_sq

    def test_real_flag_checked(self):
        g = TorusGrid(8)
        with pytest.raises(ArgumentError):
            SpectralField.from_modes(g, {1: 1.0}, real=True)

    def test_real_inverse_is_real(self):
        rng = np.random.default_rng(3)
        f = random_field(rng, 16, real=True)
        assert np.isrealobj(inverse_transform(f))


class TestDerivative:
    def test_cosine(self):
        g = TorusGrid(16)
        f = forward_transform(np.cos(g.points), g, real=True)
        d = inverse_transform(spectral_derivative(f, 1))
        assert np.allclose(d, -np.sin(g.points), atol=1e-13)

    def test_third_order(self):
        g = TorusGrid(16)
        f = SpectralField.from_modes(g, {2: 1.0})
        d = spectral_derivative(f, 3)
        assert d.coefficient(2) == pytest.approx(-8j)

    def test_constant(self):
        f = SpectralField.from_modes(TorusGrid(8), {0: 3.0})
        assert np.all(np.asarray(spectral_derivative(f, 1).coeffs) == 0)

    def test_nyquist_zeroed_for_odd_order(self):
        g = TorusGrid(8)
        f = SpectralField.from_modes(g, {-4: 1.0})
        assert spectral_derivative(f, 1).coefficient(-4) == 0
        assert spectral_derivative(f, 2).coefficient(-4) == pytest.approx(-16)

    def test_order_must_be_positive(self):
        with pytest.raises(ArgumentError):
            spectral_derivative(SpectralField.zeros(TorusGrid(8)), 0)


class TestDealias:
    def test_removes_high_mode(self):
        f = SpectralField.from_modes(TorusGrid(12), {5: 1.0})
        assert dealias(f).coefficient(5) == 0

    def test_keeps_low_mode(self):
        f = SpectralField.from_modes(TorusGrid(12), {3: 1.0})
        assert dealias(f).coefficient(3) == 1.0

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 2 ** 32 - 1), st.sampled_from([12, 16, 32, 48]))
    def test_projection(self, seed, N):
        f = random_field(np.random.default_rng(seed), N)
        once = dealias(f)
        assert np.array_equal(np.asarray(dealias(once).coeffs), np.asarray(once.coeffs))
        assert once.l2_norm() <= f.l2_norm() + 1e-14


def unit_chi(n, center=0.0, dtau=0.125, amplitude=1.0):
    return SpaceTimeSpectrum.single_mode(n, center, chi1, 1.0, dtau, amplitude)


class TestSpaceTimeSpectrum:
    def test_dtau_bound(self):
        with pytest.raises(ArgumentError):
            SpaceTimeSpectrum.zero(0.5)

    def test_window_must_fit_lattice(self):
        with pytest.raises(ArgumentError):
            SpaceTimeSpectrum.single_mode(0, 0.0, chi1, half_width=0.3, dtau=0.25)

    def test_single_mode_samples(self):
        f = unit_chi(2, center=-4.0)
        assert f.active_modes == [2]
        assert np.allclose(f.taus(2), -5.0 + (np.arange(16) + 0.5) * 0.125)

    def test_adaptive_window_grows(self):
        f = SpaceTimeSpectrum.adaptive_mode(0, 0.0, lambda t: np.exp(-t * t / 50.0))
        lo, vals = f.modes[0]
        assert abs(vals[0]) < 1e-10 * np.max(np.abs(vals))
        assert lo < -8.0

    def test_sum_of_aligned_windows(self):
        f = unit_chi(0) + unit_chi(0, center=0.5)
        lo, vals = f.modes[0]
        assert lo == pytest.approx(-1.0)
        assert vals.size == 20

    def test_misaligned_windows_rejected(self):
        with pytest.raises(ArgumentError):
            unit_chi(0) + unit_chi(0, center=0.05)

    def test_conj_flip(self):
        f = unit_chi(3, center=2.0, amplitude=1j)
        g = f.conj_flip()
        assert g.active_modes == [-3]
        assert np.allclose(g.taus(-3), -f.taus(3)[::-1])
        assert np.allclose(g.modes[-3][1], -1j)


class TestConvolution:
    def test_tent(self):
        dtau = 0.125
        out = convolve_spacetime(unit_chi(0, dtau=dtau), unit_chi(0, dtau=dtau))
        assert out.active_modes == [0]
        taus = out.taus(0)
        tent = np.maximum(0.0, 2.0 - np.abs(taus))
        assert np.max(np.abs(out.modes[0][1] - tent)) <= dtau
        # total mass of chi1 * chi1 is 4
        assert np.sum(out.modes[0][1]).real * dtau == pytest.approx(4.0)

    def test_tent_converges(self):
        errs = []
        for dtau in (0.25, 0.125, 0.0625):
            out = convolve_spacetime(unit_chi(0, dtau=dtau), unit_chi(0, dtau=dtau))
            tent = np.maximum(0.0, 2.0 - np.abs(out.taus(0)))
            errs.append(np.max(np.abs(out.modes[0][1] - tent)))
        assert errs[0] < 0.25 and errs[1] <= errs[0] and errs[2] <= errs[1]

    def test_frequency_addition(self):
        out = convolve_spacetime(unit_chi(3), unit_chi(5))
        assert out.active_modes == [8]

    def test_counterexample_pair_output_mode(self):
        N = 8
        u = unit_chi((-N * N - N) // 2, center=-((N * N + N) // 2) ** 2)
        v = unit_chi(N, center=N ** 3)
        assert convolve_spacetime(u, v).active_modes == [-28]

    def test_minkowski_window(self):
        f = SpaceTimeSpectrum.single_mode(0, 3.0, chi1, 2.0, 0.125)
        g = SpaceTimeSpectrum.single_mode(1, -10.0, chi1, 1.0, 0.125)
        out = convolve_spacetime(f, g)
        taus = out.taus(1)
        # [1, 5] + [-11, -9] = [-10, -4]
        assert taus[0] - 0.0625 == pytest.approx(-10.0)
        assert taus[-1] + 0.0625 == pytest.approx(-4.0)

    def test_dtau_mismatch(self):
        with pytest.raises(ArgumentError):
            convolve_spacetime(unit_chi(0, dtau=0.125), unit_chi(0, dtau=0.25))

    def test_commutative_and_bilinear(self):
        rng = np.random.default_rng(5)

        def rand_spec():
            out = SpaceTimeSpectrum.zero()
            for n in rng.choice(np.arange(-6, 7), size=3, replace=False):
                amp = rng.normal() + 1j * rng.normal()
                out = out + unit_chi(int(n), center=float(rng.integers(-8, 8)), amplitude=amp)
            return out

        f, g, h = rand_spec(), rand_spec(), rand_spec()
        fg, gf = convolve_spacetime(f, g), convolve_spacetime(g, f)
        assert fg.active_modes == gf.active_modes
        for n in fg.active_modes:
            assert fg.modes[n][0] == pytest.approx(gf.modes[n][0])
            assert np.max(np.abs(fg.modes[n][1] - gf.modes[n][1])) < 1e-12
        lhs = convolve_spacetime(f.scale(2.0) + h, g)
        rhs = convolve_spacetime(f, g).scale(2.0) + convolve_spacetime(h, g)
        for n in set(lhs.active_modes) | set(rhs.active_modes):
            a = dict(zip(np.round(lhs.taus(n), 9), lhs.modes[n][1])) if n in lhs.modes else {}
            b = dict(zip(np.round(rhs.taus(n), 9), rhs.modes[n][1])) if n in rhs.modes else {}
            for t in set(a) | set(b):
                assert abs(a.get(t, 0) - b.get(t, 0)) < 1e-12


class TestLebesgueNorm:
    def test_zero(self):
        assert lebesgue_norm(SpaceTimeSpectrum.zero(), 4) == 0.0

    def test_unsupported_exponent(self):
        with pytest.raises(UnsupportedError):
            lebesgue_norm(unit_chi(0), 3)

    def test_plancherel(self):
        rng = np.random.default_rng(11)
        f = SpaceTimeSpectrum.zero()
        for n in (-3, 0, 2, 5):
            f = f + unit_chi(n, center=float(rng.integers(-20, 20)),
                             amplitude=rng.normal() + 1j * rng.normal())
        mass = sum(np.sum(np.abs(v) ** 2) * f.dtau for _, v in f.modes.values())
        expected = math.sqrt(2 * math.pi * mass)
        assert lebesgue_norm(f, 2) == pytest.approx(expected, rel=1e-2)

    def test_bump(self):
        assert bump(0.0) == pytest.approx(1.0)
        assert bump(1.0) == pytest.approx(1.0)
        assert bump(2.0) == 0.0
        assert 0.0 < bump(1.5) < 1.0

    def test_free_wave_with_cutoff_against_quadrature(self):
        # mode 1 concentrated near the Schrodinger surface tau = -1
        f = SpaceTimeSpectrum.single_mode(1, -1.0, chi1, 1.0, 0.125)
        taus, vals = f.taus(1), f.modes[1][1]

        def g(t):
            return abs(np.sum(vals * np.exp(1j * taus * t)) * 0.125) / math.sqrt(2 * math.pi)

        # |f(x, t)| = g(t), independent of x
        integrand = lambda t: 2 * math.pi * (bump(t) * g(t)) ** 4
        oracle = integrate.quad(integrand, -2, 2, limit=200)[0] ** 0.25
        val = lebesgue_norm(f, 4, time_cutoff=True)
        assert math.isfinite(val)
        assert val == pytest.approx(oracle, rel=0.05)
        refined = lebesgue_norm(f, 4, time_cutoff=True, oversample=4.0)
        assert val == pytest.approx(refined, rel=0.05)
