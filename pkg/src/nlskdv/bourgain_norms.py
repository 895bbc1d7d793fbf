"""Weighted space-time norms adapted to the Schrodinger and Airy flows.

For a spectrum ``f_hat(n, tau)`` the Bourgain-type norm is

    ||f||^2 = sum_n <n>^{2k} int <W(n, tau)>^{2b} |f_hat(n, tau)|^2 dtau

with ``W = tau + n^2`` (Schrodinger) or ``W = tau - n^3`` (Airy) and
``<x> = 1 + |x|``.  The companion and tilde norms add an ``L^2_n L^1_tau``
piece that controls continuity in time at ``b = 1/2``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import ArgumentError, DegenerateInputError
from .spectral_core import SpaceTimeSpectrum, lebesgue_norm

# default realizations of the exponents written "1/2-" and "1-"
HALF_MINUS = 0.45
ONE_MINUS = 0.9


class WeightFamily(str, enum.Enum):
    SCHRODINGER = "schrodinger"
    AIRY = "airy"


def _family(value) -> WeightFamily:
    try:
        return WeightFamily(value.lower() if isinstance(value, str) else value)
    except ValueError:
        raise ArgumentError(f"unknown weight family {value!r}") from None


@dataclass(frozen=True)
class NormSpec:
    weight_family: WeightFamily
    sobolev_index: float = 0.0
    modulation_exponent: float = 0.5

    def __post_init__(self):
        object.__setattr__(self, "weight_family", _family(self.weight_family))
        for name in ("sobolev_index", "modulation_exponent"):
            if not math.isfinite(getattr(self, name)):
                raise ArgumentError(f"{name} must be finite")

    def with_exponent(self, b: float) -> "NormSpec":
        return NormSpec(self.weight_family, self.sobolev_index, b)


@dataclass(frozen=True)
class NormReport:
    value: float
    l2l2_part: float
    l2l1_part: float = 0.0


def bracket(x):
    """Japanese bracket ``1 + |x|``; works elementwise on arrays."""
    if np.ndim(x) == 0:
        return 1.0 + abs(float(x))
    return 1.0 + np.abs(np.asarray(x, dtype=np.float64))


def characteristic_center(n: int, family) -> float:
    """tau on the characteristic surface: ``-n^2`` or ``n^3``."""
    fam = _family(family)
    return float(-n * n) if fam is WeightFamily.SCHRODINGER else float(n ** 3)


def modulation(f: SpaceTimeSpectrum, n: int, family) -> np.ndarray:
    """``tau - center(n)`` at the samples of mode ``n``.

    The window offset is subtracted first so large centers cancel before
    the half-step offsets are added.
    """
    lo, vals = f.modes[n]
    shift = lo - characteristic_center(n, family)
    return shift + (np.arange(vals.size) + 0.5) * f.dtau


def _mode_weights(f: SpaceTimeSpectrum, spec: NormSpec):
    for n, (_, vals) in f.modes.items():
        yield n, vals, bracket(modulation(f, n, spec.weight_family))


def spacetime_norm(f: SpaceTimeSpectrum, spec: NormSpec) -> float:
    total = 0.0
    k, b = spec.sobolev_index, spec.modulation_exponent
    for n, vals, w in _mode_weights(f, spec):
        inner = float(np.sum(w ** (2.0 * b) * np.abs(vals) ** 2)) * f.dtau
        total += bracket(n) ** (2.0 * k) * inner
    return math.sqrt(total)


def _l2l1(f: SpaceTimeSpectrum, spec: NormSpec, weight_power: float) -> float:
    total = 0.0
    k = spec.sobolev_index
    for n, vals, w in _mode_weights(f, spec):
        inner = float(np.sum(np.abs(vals) * w ** weight_power)) * f.dtau
        total += (bracket(n) ** k * inner) ** 2
    return math.sqrt(total)


def companion_norm(f: SpaceTimeSpectrum, spec: NormSpec) -> NormReport:
    """``b = -1/2`` norm plus ``|| <n>^k f_hat / <W> ||_{L^2_n L^1_tau}``.

    ``spec.modulation_exponent`` is ignored.
    """
    a = spacetime_norm(f, spec.with_exponent(-0.5))
    c = _l2l1(f, spec, -1.0)
    return NormReport(a + c, a, c)


def tilde_norm(f: SpaceTimeSpectrum, spec: NormSpec) -> NormReport:
    """``b = 1/2`` norm plus ``|| <n>^k f_hat ||_{L^2_n L^1_tau}``."""
    a = spacetime_norm(f, spec.with_exponent(0.5))
    c = _l2l1(f, spec, 0.0)
    return NormReport(a + c, a, c)


STRICHARTZ_EXPONENT = {WeightFamily.SCHRODINGER: 3.0 / 8.0, WeightFamily.AIRY: 1.0 / 3.0}


def strichartz_ratio(f: SpaceTimeSpectrum, family, oversample: float = 2.0) -> float:
    """``||bump(t) f||_{L^4_{xt}}`` over the ``b = 3/8`` (Schrodinger) or
    ``b = 1/3`` (Airy) norm at Sobolev index 0."""
    fam = _family(family)
    denom = spacetime_norm(f, NormSpec(fam, 0.0, STRICHARTZ_EXPONENT[fam]))
    if denom == 0.0:
        raise DegenerateInputError("strichartz_ratio of a zero spectrum")
    return lebesgue_norm(f, 4, time_cutoff=True, oversample=oversample) / denom


def random_ensemble_member(rng: np.random.Generator, family, mode_range: int,
                           num_modes: int = 8, dtau: float = 0.125,
                           max_offset: float = 4.0) -> SpaceTimeSpectrum:
    """Random spectrum with ``num_modes`` distinct modes in [-mode_range, mode_range].

    Each mode carries a complex amplitude times the unit indicator of a
    width-2 window placed within ``max_offset`` of the characteristic
    surface.  Offsets are multiples of ``dtau`` so windows stay on the lattice.
    """
    fam = _family(family)
    modes = rng.choice(np.arange(-mode_range, mode_range + 1), size=num_modes, replace=False)
    return _ensemble_spectrum(rng, fam, modes, dtau, max_offset)


def _ensemble_spectrum(rng, fam, modes, dtau, max_offset):
    steps = int(round(max_offset / dtau))
    count = int(round(2.0 / dtau))
    out = {}
    for n in modes:
        amp = rng.normal() + 1j * rng.normal()
        shift = rng.integers(-steps, steps + 1) * dtau
        lo = characteristic_center(int(n), fam) + shift - 1.0
        out[int(n)] = (lo, amp * np.ones(count))
    return SpaceTimeSpectrum(dtau, out)


def ensemble_max_ratio(family, mode_range: int, size: int = 50, seed: int = 0,
                       num_modes: int = 8, oversample: float = 2.0) -> float:
    """Largest :func:`strichartz_ratio` over a seeded random ensemble."""
    rng = np.random.default_rng(seed)
    best = 0.0
    for _ in range(size):
        f = random_ensemble_member(rng, family, mode_range, num_modes)
        best = max(best, strichartz_ratio(f, family, oversample))
    return best
