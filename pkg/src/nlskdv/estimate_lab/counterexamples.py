"""Sharpness families for the two bilinear estimates and scaling fits.

Each family places single-mode unit profiles on the characteristic
surfaces so the product lands (or deliberately fails to land) on the
output surface.  Measuring the bilinear ratio over dyadic ``N`` and
fitting a log-log slope exposes the exponent of ``N`` that the estimate
has to absorb.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import List, Sequence, Tuple

import numpy as np

from ..bourgain_norms import NormSpec, WeightFamily, characteristic_center, spacetime_norm
from ..errors import ArgumentError, DegenerateInputError
from ..spectral_core import DEFAULT_DTAU, SpaceTimeSpectrum, chi1, convolve_spacetime


class Family(str, enum.Enum):
    UV1 = "UV1"
    UV2 = "UV2"
    DU2_1 = "DU2_1"
    DU2_2 = "DU2_2"


def _as_int(x, name):
    if isinstance(x, bool):
        raise ArgumentError(f"{name} must be an integer")
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, float) and x.is_integer():
        return int(x)
    raise ArgumentError(f"{name} must be an exact integer, got {x!r}")


def resonance(kind: str, n, n1) -> int:
    """Signed sum of the three modulations of an interacting triple.

    ``UV``:  ``-n1^3 + n1^2 - 2 n n1``  (Schrodinger x Airy -> Schrodinger)
    ``DU2``: ``-n^3 - n^2 + 2 n1 n``    (Schrodinger x conj Schrodinger -> Airy)

    Python integers are unbounded, so there is no overflow.
    """
    n, n1 = _as_int(n, "n"), _as_int(n1, "n1")
    kind = kind.upper()
    if kind == "UV":
        return -n1 ** 3 + n1 ** 2 - 2 * n * n1
    if kind == "DU2":
        return -n ** 3 - n ** 2 + 2 * n1 * n
    raise ArgumentError(f"unknown resonance kind {kind!r}")


def modulation_sum(kind: str, n, n1, tau, tau1):
    """Left side of the modulation identity, from the individual modulations.

    ``UV``:  ``(tau1 - n1^3) + ((tau - tau1) + (n - n1)^2) - (tau + n^2)``
    ``DU2``: ``(tau - n^3) - ((tau - tau1) + (n - n1)^2) + (-tau1 + n1^2)``

    With integer arguments the result is exact and equals
    :func:`resonance` regardless of ``tau`` and ``tau1``.
    """
    kind = kind.upper()
    if kind == "UV":
        return (tau1 - n1 ** 3) + ((tau - tau1) + (n - n1) ** 2) - (tau + n ** 2)
    if kind == "DU2":
        return (tau - n ** 3) - ((tau - tau1) + (n - n1) ** 2) + (-tau1 + n1 ** 2)
    raise ArgumentError(f"unknown resonance kind {kind!r}")


@dataclass(frozen=True)
class CounterexampleSpec:
    family: Family
    N: int
    k: float
    s: float
    dtau: float = DEFAULT_DTAU

    def __post_init__(self):
        try:
            object.__setattr__(self, "family", Family(self.family))
        except ValueError:
            raise ArgumentError(f"unknown family {self.family!r}") from None
        N = _as_int(self.N, "N")
        if N < 8 or N % 2:
            raise ArgumentError(f"N must be even and >= 8, got {N}")
        object.__setattr__(self, "N", N)

    @property
    def is_uv(self) -> bool:
        return self.family in (Family.UV1, Family.UV2)


def mode_placement(family, N: int) -> Tuple[int, int]:
    """Active modes of the two inputs."""
    family = Family(family)
    if family is Family.UV1:
        return (-N * N - N) // 2, N
    if family is Family.UV2:
        return 0, N
    if family is Family.DU2_1:
        return (-N * N + N) // 2, (-N * N - N) // 2
    return 0, -N


def _unit_profile(n: int, family: WeightFamily, dtau: float) -> SpaceTimeSpectrum:
    return SpaceTimeSpectrum.single_mode(n, characteristic_center(n, family), chi1,
                                         half_width=1.0, dtau=dtau)


def build_counterexample(spec: CounterexampleSpec):
    """The two input spectra of the family.

    UV families return ``(u, v)`` with a Schrodinger and an Airy profile;
    DU2 families return ``(u1, u2)``, both Schrodinger.
    """
    a, b = mode_placement(spec.family, spec.N)
    first = _unit_profile(a, WeightFamily.SCHRODINGER, spec.dtau)
    second_family = WeightFamily.AIRY if spec.is_uv else WeightFamily.SCHRODINGER
    second = _unit_profile(b, second_family, spec.dtau)
    return first, second


@dataclass(frozen=True)
class BilinearRecord:
    lhs: float
    rhs: float
    ratio: float
    first_norm: float
    second_norm: float


def bilinear_output(spec: CounterexampleSpec) -> SpaceTimeSpectrum:
    """``u v`` for UV families, ``d/dx (u1 conj(u2))`` (as ``|n|`` weight) for DU2."""
    f, g = build_counterexample(spec)
    if spec.is_uv:
        return convolve_spacetime(f, g)
    prod = convolve_spacetime(f, g.conj_flip())
    return prod.mode_multiplier(lambda n: abs(n))


def bilinear_ratio(spec: CounterexampleSpec, b: float = 0.5) -> BilinearRecord:
    f, g = build_counterexample(spec)
    if spec.is_uv:
        out_spec = NormSpec(WeightFamily.SCHRODINGER, spec.k, b - 1.0)
        first = spacetime_norm(f, NormSpec(WeightFamily.SCHRODINGER, spec.k, b))
        second = spacetime_norm(g, NormSpec(WeightFamily.AIRY, spec.s, b))
    else:
        out_spec = NormSpec(WeightFamily.AIRY, spec.s, b - 1.0)
        first = spacetime_norm(f, NormSpec(WeightFamily.SCHRODINGER, spec.k, b))
        second = spacetime_norm(g, NormSpec(WeightFamily.SCHRODINGER, spec.k, b))
    rhs = first * second
    if rhs == 0.0:
        raise DegenerateInputError("right-hand side vanishes")
    lhs = spacetime_norm(bilinear_output(spec), out_spec)
    return BilinearRecord(lhs, rhs, lhs / rhs, first, second)


def predicted_slope(family, k: float, s: float) -> float:
    """Exponent of ``N`` in the bilinear ratio for each family."""
    family = Family(family)
    if family is Family.UV1:
        return -s
    if family is Family.UV2:
        return k - s - 1.5
    if family is Family.DU2_1:
        return 1.0 + s - 4.0 * k
    return s - k - 0.5


# --------------------------------------------------------------------------
# scaling fits
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class ScalingFit:
    exponent: float
    intercept: float
    residual: float
    sample_points: List[Tuple[float, float]] = field(default_factory=list)


def fit_scaling(samples: Sequence[Tuple[float, float]]) -> ScalingFit:
    """Least-squares slope of ``log2(value)`` against ``log2(N)``."""
    pts = [(float(n), float(v)) for n, v in samples]
    if len(pts) < 4:
        raise ArgumentError("need at least 4 samples")
    ns = np.array([p[0] for p in pts])
    vs = np.array([p[1] for p in pts])
    if np.any(ns <= 0) or np.any(np.diff(ns) <= 0):
        raise ArgumentError("N values must be positive and strictly increasing")
    if np.any(~np.isfinite(vs)) or np.any(vs <= 0):
        raise ArgumentError("values must be finite and positive")
    x, y = np.log2(ns), np.log2(vs)
    slope, intercept = np.polyfit(x, y, 1)
    res = y - (slope * x + intercept)
    rms = float(np.sqrt(np.mean(res ** 2)))
    return ScalingFit(float(slope), float(intercept), rms, pts)


DEFAULT_NS = tuple(2 ** j for j in range(4, 10))


def scaling_sweep(family, k: float, s: float, Ns: Sequence[int] = DEFAULT_NS,
                  b: float = 0.5, dtau: float = DEFAULT_DTAU):
    """Bilinear records for each ``N``; returns ``(records, fits)`` where
    ``fits`` maps ``lhs``, ``first_norm``, ``second_norm``, ``ratio`` to
    :class:`ScalingFit`."""
    records = [bilinear_ratio(CounterexampleSpec(family, N, k, s, dtau), b) for N in Ns]
    fits = {}
    for name in ("lhs", "first_norm", "second_norm", "ratio"):
        fits[name] = fit_scaling([(N, getattr(r, name)) for N, r in zip(Ns, records)])
    return records, fits

