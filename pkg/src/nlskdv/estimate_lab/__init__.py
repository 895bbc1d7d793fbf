"""Counterexample scaling, lemma verifiers and reduced multiplier suprema."""

from .counterexamples import (
    BilinearRecord,
    CounterexampleSpec,
    Family,
    ScalingFit,
    bilinear_output,
    bilinear_ratio,
    build_counterexample,
    fit_scaling,
    modulation_sum,
    mode_placement,
    predicted_slope,
    resonance,
    scaling_sweep,
)
from .lemmas import (
    IntegralRecord,
    SeriesRecord,
    calculus_integral,
    dyadic_measure,
    perturbed_intervals,
    polynomial_series,
    union_measure,
    uv_blocks,
)
from .multipliers import KINDS, MultiplierRecord, check_region, multiplier_sup

__all__ = [
    "BilinearRecord", "CounterexampleSpec", "Family", "ScalingFit", "bilinear_output",
    "bilinear_ratio", "build_counterexample", "fit_scaling", "modulation_sum",
    "mode_placement", "predicted_slope", "resonance", "scaling_sweep",
    "IntegralRecord", "SeriesRecord", "calculus_integral", "dyadic_measure",
    "perturbed_intervals", "polynomial_series", "union_measure", "uv_blocks",
    "KINDS", "MultiplierRecord", "check_region", "multiplier_sup",
]
