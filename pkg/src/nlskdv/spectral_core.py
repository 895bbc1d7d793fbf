"""Periodic grids, Fourier conventions and sparse space-time spectra.

Conventions used throughout the package:

* Spatial coefficients are ``u_hat[n] = (1/N) sum_j u(x_j) exp(-i n x_j)``,
  stored in numpy FFT order (``wavenumbers`` gives the integer mode of each
  slot, Nyquist mode is ``-N/2``).  With this scaling
  ``||u||_{L^2(T)}^2 = 2 pi sum_n |u_hat[n]|^2``.
* Space-time spectra use a unitary transform in time,
  ``f(x, t) = (2 pi)^{-1/2} sum_n exp(i n x) int f_hat(n, tau) exp(i tau t) dtau``,
  so ``||f||_{L^2_{xt}}^2 = 2 pi sum_n int |f_hat(n, tau)|^2 dtau``.
* Each active mode of a spectrum carries its own tau window, sampled at the
  midpoints ``tau_lo + (m + 1/2) dtau``.  All tau integrals are midpoint sums.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Dict, Mapping, Optional

import numpy as np

from .errors import ArgumentError, UnsupportedError

DEFAULT_DTAU = 1.0 / 8.0
MAX_DTAU = 0.25
# alignment tolerance (in units of dtau) when merging tau windows
_ALIGN_TOL = 1e-6


# --------------------------------------------------------------------------
# Spatial grids and fields
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class TorusGrid:
    """Uniform grid on [0, 2 pi) with an even number of points."""

    num_modes: int

    def __post_init__(self):
        n = self.num_modes
        if isinstance(n, bool) or int(n) != n:
            raise ArgumentError(f"num_modes must be an integer, got {n!r}")
        n = int(n)
        if n < 4 or n % 2:
            raise ArgumentError(f"num_modes must be even and >= 4, got {n}")
        object.__setattr__(self, "num_modes", n)

    @property
    def points(self) -> np.ndarray:
        return 2.0 * np.pi * np.arange(self.num_modes) / self.num_modes

    @property
    def wavenumbers(self) -> np.ndarray:
        """Integer modes in FFT order: 0, 1, ..., N/2-1, -N/2, ..., -1."""
        return np.fft.fftfreq(self.num_modes, 1.0 / self.num_modes).round().astype(np.int64)

    def index(self, n: int) -> int:
        """Storage slot of integer mode ``n``; raises for modes outside [-N/2, N/2)."""
        half = self.num_modes // 2
        if not -half <= n < half:
            raise ArgumentError(f"mode {n} not representable on N={self.num_modes}")
        return n % self.num_modes


def _hermitian_defect(coeffs: np.ndarray) -> float:
    n = coeffs.size
    mirrored = np.conj(coeffs[(-np.arange(n)) % n])
    diff = coeffs - mirrored
    # the Nyquist slot maps to itself; hermitian symmetry forces it real
    return float(np.max(np.abs(diff))) if n else 0.0


@dataclass(frozen=True, eq=False)
class SpectralField:
    """Fourier coefficients of a function on the torus (FFT order)."""

    grid: TorusGrid
    coeffs: np.ndarray
    real: bool = False

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=np.complex128)
        if c.ndim != 1 or c.size != self.grid.num_modes:
            raise ArgumentError(
                f"expected {self.grid.num_modes} coefficients, got shape {c.shape}"
            )
        if self.real:
            scale = max(float(np.max(np.abs(c))), 1e-300)
            if _hermitian_defect(c) > 1e-12 * scale:
                raise ArgumentError("coefficients are not hermitian but real=True")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def zeros(cls, grid: TorusGrid, real: bool = False) -> "SpectralField":
        return cls(grid, np.zeros(grid.num_modes, dtype=np.complex128), real)

    @classmethod
    def from_modes(cls, grid: TorusGrid, modes: Mapping[int, complex], real: bool = False):
        c = np.zeros(grid.num_modes, dtype=np.complex128)
        for n, a in modes.items():
            c[grid.index(int(n))] = a
        return cls(grid, c, real)

    def coefficient(self, n: int) -> complex:
        return complex(self.coeffs[self.grid.index(n)])

    def with_coeffs(self, coeffs: np.ndarray, real: Optional[bool] = None) -> "SpectralField":
        return SpectralField(self.grid, coeffs, self.real if real is None else real)

    def l2_norm(self) -> float:
        return math.sqrt(2.0 * math.pi * float(np.sum(np.abs(self.coeffs) ** 2)))

    def sobolev_norm(self, index: float) -> float:
        """``(2 pi sum <n>^{2 index} |u_hat|^2)^{1/2}`` with ``<n> = 1 + |n|``."""
        w = (1.0 + np.abs(self.grid.wavenumbers)) ** (2.0 * index)
        return math.sqrt(2.0 * math.pi * float(np.sum(w * np.abs(self.coeffs) ** 2)))


def forward_transform(samples, grid: Optional[TorusGrid] = None,
                      real: Optional[bool] = None) -> SpectralField:
    """Sample values on the torus grid to Fourier coefficients.

    ``real`` defaults to whether ``samples`` has a real dtype.
    """
    arr = np.asarray(samples)
    if arr.ndim != 1:
        raise ArgumentError("samples must be one-dimensional")
    if grid is None:
        grid = TorusGrid(arr.size)
    elif arr.size != grid.num_modes:
        raise ArgumentError(f"expected {grid.num_modes} samples, got {arr.size}")
    if real is None:
        real = not np.iscomplexobj(arr)
    coeffs = np.fft.fft(arr.astype(np.complex128)) / grid.num_modes
    if real:
        coeffs = _symmetrize(coeffs)
    return SpectralField(grid, coeffs, bool(real))


def _symmetrize(coeffs: np.ndarray) -> np.ndarray:
    n = coeffs.size
    mirrored = np.conj(coeffs[(-np.arange(n)) % n])
    return 0.5 * (coeffs + mirrored)


def inverse_transform(field: SpectralField) -> np.ndarray:
    """Grid samples of ``field``; real array when the field is flagged real."""
    samples = np.fft.ifft(field.coeffs) * field.grid.num_modes
    if field.real:
        return samples.real.copy()
    return samples


def spectral_derivative(field: SpectralField, order: int) -> SpectralField:
    """Multiply coefficients by ``(i n)^order``; odd orders zero the Nyquist mode."""
    if isinstance(order, bool) or int(order) != order or order < 1:
        raise ArgumentError(f"order must be a positive integer, got {order!r}")
    order = int(order)
    n = field.grid.wavenumbers.astype(np.float64)
    symbol = (1j * n) ** order
    if order % 2:
        symbol[field.grid.num_modes // 2] = 0.0
    return field.with_coeffs(field.coeffs * symbol)


def dealias_mask(grid: TorusGrid) -> np.ndarray:
    """Boolean mask of the modes kept by the two-thirds rule (|n| <= N/3)."""
    return 3 * np.abs(grid.wavenumbers) <= grid.num_modes


def dealias(field: SpectralField) -> SpectralField:
    return field.with_coeffs(np.where(dealias_mask(field.grid), field.coeffs, 0.0))


# --------------------------------------------------------------------------
# Space-time spectra
# --------------------------------------------------------------------------


def chi1(x):
    """Indicator of [-1, 1]."""
    return (np.abs(np.asarray(x, dtype=np.float64)) <= 1.0).astype(np.float64)


@dataclass(frozen=True)
class ModeWindow:
    """A tau window ``[lo, lo + count * dtau)`` sampled at midpoints."""

    lo: float
    count: int

    def hi(self, dtau: float) -> float:
        return self.lo + self.count * dtau


@dataclass(frozen=True)
class SpaceTimeGrid:
    dtau: float
    windows: Mapping[int, ModeWindow]

    def __post_init__(self):
        if not (self.dtau > 0 and self.dtau <= MAX_DTAU):
            raise ArgumentError(f"dtau must lie in (0, {MAX_DTAU}], got {self.dtau}")


@dataclass(frozen=True, eq=False)
class SpaceTimeSpectrum:
    """Sparse representation of ``f_hat(n, tau)``.

    ``modes`` maps an integer mode to ``(tau_lo, values)`` where ``values[m]``
    is the sample at ``tau_lo + (m + 1/2) dtau``.
    """

    dtau: float
    modes: Mapping[int, tuple] = field(default_factory=dict)

    def __post_init__(self):
        if not (self.dtau > 0 and self.dtau <= MAX_DTAU):
            raise ArgumentError(f"dtau must lie in (0, {MAX_DTAU}], got {self.dtau}")
        clean: Dict[int, tuple] = {}
        for n, (lo, vals) in self.modes.items():
            arr = np.array(vals, dtype=np.complex128)
            if arr.ndim != 1 or arr.size == 0:
                raise ArgumentError(f"mode {n}: values must be a non-empty 1-d array")
            arr.setflags(write=False)
            clean[int(n)] = (float(lo), arr)
        object.__setattr__(self, "modes", dict(sorted(clean.items())))

    # construction -------------------------------------------------------

    @classmethod
    def zero(cls, dtau: float = DEFAULT_DTAU) -> "SpaceTimeSpectrum":
        return cls(dtau, {})

    @classmethod
    def single_mode(cls, n: int, center: float, profile: Callable = chi1,
                    half_width: float = 1.0, dtau: float = DEFAULT_DTAU,
                    amplitude: complex = 1.0) -> "SpaceTimeSpectrum":
        """One active mode with ``f_hat(n, tau) = amplitude * profile(tau - center)``.

        The window is ``[center - half_width, center + half_width]`` and must
        hold an integer number of samples.
        """
        count = 2.0 * half_width / dtau
        if abs(count - round(count)) > 1e-9 or round(count) < 1:
            raise ArgumentError("2 * half_width must be a positive multiple of dtau")
        count = int(round(count))
        offsets = -half_width + (np.arange(count) + 0.5) * dtau
        vals = amplitude * np.asarray(profile(offsets), dtype=np.complex128)
        return cls(dtau, {int(n): (center - half_width, vals)})

    @classmethod
    def adaptive_mode(cls, n: int, center: float, profile: Callable,
                      dtau: float = DEFAULT_DTAU, half_width: float = 8.0,
                      rel_tol: float = 1e-10, max_half_width: float = 1024.0):
        """Like :meth:`single_mode` but doubles the window until the outer
        eighth on each side stays below ``rel_tol`` times the peak (the outer
        band rather than the last sample, so oscillating profiles with a
        zero near the edge do not stop the search early)."""
        while True:
            spec = cls.single_mode(n, center, profile, half_width, dtau)
            vals = np.abs(spec.modes[int(n)][1])
            peak = float(vals.max())
            band = max(1, vals.size // 16)
            edge = max(float(vals[:band].max()), float(vals[-band:].max()))
            if peak == 0.0 or edge <= rel_tol * peak or half_width >= max_half_width:
                return spec
            half_width *= 2.0

    # views ----------------------------------------------------------------

    @property
    def grid(self) -> SpaceTimeGrid:
        return SpaceTimeGrid(self.dtau, {n: ModeWindow(lo, v.size)
                                         for n, (lo, v) in self.modes.items()})

    @property
    def active_modes(self):
        return list(self.modes)

    def taus(self, n: int) -> np.ndarray:
        lo, vals = self.modes[n]
        return lo + (np.arange(vals.size) + 0.5) * self.dtau

    def is_zero(self) -> bool:
        return all(not np.any(v) for _, v in self.modes.values())

    # algebra -------------------------------------------------------------

    def scale(self, c: complex) -> "SpaceTimeSpectrum":
        return SpaceTimeSpectrum(self.dtau, {n: (lo, c * v) for n, (lo, v) in self.modes.items()})

    def __mul__(self, c):
        return self.scale(c)

    __rmul__ = __mul__

    def __add__(self, other: "SpaceTimeSpectrum") -> "SpaceTimeSpectrum":
        _check_dtau(self, other)
        acc = _WindowAccumulator(self.dtau)
        for n, (lo, v) in self.modes.items():
            acc.add(n, lo, v)
        for n, (lo, v) in other.modes.items():
            acc.add(n, lo, v)
        return acc.build()

    def __sub__(self, other):
        return self + other.scale(-1.0)

    def conj_flip(self) -> "SpaceTimeSpectrum":
        """Spectrum of the complex conjugate: ``conj f_hat(-n, -tau)``."""
        out = {}
        for n, (lo, v) in self.modes.items():
            hi = lo + v.size * self.dtau
            out[-n] = (-hi, np.conj(v[::-1]))
        return SpaceTimeSpectrum(self.dtau, out)

    def mode_multiplier(self, symbol: Callable[[int], complex]) -> "SpaceTimeSpectrum":
        """Multiply mode ``n`` by ``symbol(n)`` (e.g. ``1j * n`` for d/dx)."""
        return SpaceTimeSpectrum(self.dtau, {n: (lo, symbol(n) * v)
                                             for n, (lo, v) in self.modes.items()})


def _check_dtau(f: SpaceTimeSpectrum, g: SpaceTimeSpectrum):
    if not math.isclose(f.dtau, g.dtau, rel_tol=1e-12, abs_tol=0.0):
        raise ArgumentError(f"tau spacings differ: {f.dtau} vs {g.dtau}")


class _WindowAccumulator:
    """Sums per-mode windows that sit on a common tau lattice."""

    def __init__(self, dtau: float):
        self.dtau = dtau
        self.parts: Dict[int, list] = {}

    def add(self, n: int, lo: float, vals: np.ndarray):
        self.parts.setdefault(n, []).append((lo, vals))

    def build(self) -> SpaceTimeSpectrum:
        out = {}
        d = self.dtau
        for n, parts in self.parts.items():
            if len(parts) == 1:
                out[n] = parts[0]
                continue
            base = min(lo for lo, _ in parts)
            shifts = []
            for lo, v in parts:
                s = (lo - base) / d
                if abs(s - round(s)) > _ALIGN_TOL:
                    raise ArgumentError(f"mode {n}: tau windows are not aligned")
                shifts.append(int(round(s)))
            length = max(s + v.size for s, (_, v) in zip(shifts, parts))
            total = np.zeros(length, dtype=np.complex128)
            for s, (_, v) in zip(shifts, parts):
                total[s:s + v.size] += v
            out[n] = (base, total)
        return SpaceTimeSpectrum(d, out)


def convolve_spacetime(f: SpaceTimeSpectrum, g: SpaceTimeSpectrum) -> SpaceTimeSpectrum:
    """Space-time convolution ``sum_{n1} int f(n-n1, tau-tau1) g(n1, tau1) dtau1``.

    Inputs are treated as piecewise linear through their midpoint samples
    (zero outside the window); the discrete convolution is evaluated at the
    lattice ``lo_f + lo_g + p dtau`` and averaged onto the output midpoints.
    This reproduces the tent ``chi1 * chi1`` exactly and preserves the
    total integral.  Output windows are Minkowski sums of the input windows.
    """
    _check_dtau(f, g)
    d = f.dtau
    acc = _WindowAccumulator(d)
    for n1, (lo1, v1) in f.modes.items():
        for n2, (lo2, v2) in g.modes.items():
            nodes = np.convolve(v1, v2) * d
            padded = np.concatenate(([0.0], nodes, [0.0]))
            mids = 0.5 * (padded[:-1] + padded[1:])
            acc.add(n1 + n2, lo1 + lo2, mids)
    return acc.build()


# --------------------------------------------------------------------------
# Physical-space quadrature
# --------------------------------------------------------------------------


def _smooth_step(x):
    x = np.asarray(x, dtype=np.float64)
    out = np.zeros_like(x)
    pos = x > 0
    out[pos] = np.exp(-1.0 / x[pos])
    return out


def bump(t):
    """Smooth cutoff: 1 on [-1, 1], 0 outside (-2, 2), C-infinity in between."""
    a = np.abs(np.asarray(t, dtype=np.float64))
    up = _smooth_step(2.0 - a)
    down = _smooth_step(a - 1.0)
    return up / (up + down)


def bump_transform(tau, num_points: int = 4096):
    """Unitary time transform ``(2 pi)^{-1/2} int bump(t) exp(-i tau t) dt``.

    The bump is even and compactly supported, so the trapezoid rule on
    [-2, 2] converges spectrally.
    """
    t = np.linspace(-2.0, 2.0, num_points + 1)
    w = bump(t) * (4.0 / num_points)
    tau = np.atleast_1d(np.asarray(tau, dtype=np.float64))
    out = np.empty(tau.shape, dtype=np.float64)
    for i in range(0, tau.size, 256):
        block = tau[i:i + 256]
        out[i:i + 256] = np.cos(np.outer(block, t)) @ w
    return out / math.sqrt(2.0 * math.pi)


_MAX_POINTS = 400_000_000
_T_CHUNK = 4096


def lebesgue_norm(f: SpaceTimeSpectrum, p: int, time_cutoff: bool = False,
                  oversample: float = 2.0) -> float:
    """Discrete ``L^p_{x,t}`` norm of the function with spectrum ``f``.

    Without ``time_cutoff`` the midpoint tau samples make ``f`` periodic in
    ``t`` with period ``2 pi / dtau``; the norm is taken over one period
    ``[-pi/dtau, pi/dtau)`` and for ``p = 2`` it equals the Plancherel value
    exactly.  With ``time_cutoff`` the function is multiplied by
    :func:`bump` and integrated over ``t`` in [-2, 2].
    """
    if p not in (2, 4):
        raise UnsupportedError(f"p must be 2 or 4, got {p}")
    if not f.modes or f.is_zero():
        return 0.0
    d = f.dtau
    modes = np.array(list(f.modes), dtype=np.int64)
    nmin = int(modes.min())
    span = int(modes.max()) - nmin
    # |f|^p has spatial frequencies up to (p/2) * span
    nx = 8
    while nx <= (p // 2) * span + 1:
        nx *= 2
    tau_min = min(lo for lo, _ in f.modes.values())
    tau_max = max(lo + v.size * d for lo, v in f.modes.values())
    tau_span = tau_max - tau_min
    # relative frequency of each tau sample, referenced to the lowest sample
    ref = tau_min + 0.5 * d

    if time_cutoff:
        t0, t1 = -2.0, 2.0
        # trapezoid on a smooth compactly supported integrand is exact once
        # the step resolves its highest frequency; 64 covers the bump itself
        top = (p // 2) * tau_span + 64.0
        nt = int(math.ceil(oversample * 4.0 * top / (2.0 * math.pi))) + 64
    else:
        t0, t1 = -math.pi / d, math.pi / d
        lattice = int(round(tau_span / d)) + 1
        nt = max((p // 2) * lattice + 1, 16)
        nt = int(math.ceil(nt * oversample))
    if nt * nx > _MAX_POINTS:
        raise UnsupportedError(
            f"dense grid of {nt} x {nx} points exceeds the sampling budget"
        )
    dt = (t1 - t0) / nt
    dx = 2.0 * math.pi / nx
    total = 0.0
    norm = d / math.sqrt(2.0 * math.pi)
    for start in range(0, nt, _T_CHUNK):
        stop = min(start + _T_CHUNK, nt)
        t = t0 + (np.arange(start, stop) + 0.5) * dt
        coeff = np.zeros((t.size, nx), dtype=np.complex128)
        for n, (lo, v) in f.modes.items():
            rel = (lo + 0.5 * d - ref) + np.arange(v.size) * d
            coeff[:, n - nmin] = np.exp(1j * np.outer(t, rel)) @ v
        coeff *= norm
        values = np.fft.ifft(coeff, axis=1) * nx
        mag = np.abs(values) ** p
        if time_cutoff:
            mag *= bump(t)[:, None] ** p
        total += float(mag.sum())
    return (total * dt * dx) ** (1.0 / p)
