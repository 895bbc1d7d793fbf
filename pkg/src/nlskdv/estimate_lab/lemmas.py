"""Numerical checks of the calculus, lattice-series and counting bounds."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Tuple

import numpy as np
from scipy import integrate

from ..errors import ArgumentError, DivergentInputError, PreconditionError


def _bracket(x):
    return 1.0 + np.abs(x)


# --------------------------------------------------------------------------
# convolution integral of two brackets
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class IntegralRecord:
    integral: float
    paper_bound: float
    ratio: float
    tail_bound: float


def calculus_integral(theta: float, theta_tilde: float, a: float) -> IntegralRecord:
    """``int dk / (<k>^theta <k - a>^theta_tilde)`` against
    ``log(1 + <a>) / <a>^(theta + theta_tilde - 1)``.

    The core ``|k| <= R = max(10|a|, 1000)`` is integrated adaptively with
    breakpoints at 0 and ``a``; the two tails are integrated after a change
    of variables that makes them finite intervals.  ``tail_bound`` is the
    analytic bound on the tails, ``2 (0.9)^-theta_tilde (1+R)^(1-p) / (p-1)`` with ``p = theta + theta_tilde``,
    which uses ``|k - a| >= 0.9 |k|`` beyond ``R``.
    """
    if theta <= 0 or theta_tilde <= 0:
        raise ArgumentError("exponents must be positive")
    p = theta + theta_tilde
    if p <= 1.0:
        raise DivergentInputError(f"theta + theta_tilde = {p} <= 1: integral diverges")
    a = float(a)

    def f(k):
        return 1.0 / ((1.0 + abs(k)) ** theta * (1.0 + abs(k - a)) ** theta_tilde)

    R = max(10.0 * abs(a), 1e3)
    pts = sorted({-R, min(0.0, a), max(0.0, a), R})
    core = 0.0
    for lo, hi in zip(pts[:-1], pts[1:]):
        if hi > lo:
            core += integrate.quad(f, lo, hi, limit=200, epsabs=0.0, epsrel=1e-11)[0]
    # tails: substitute w = (1 + |k|)^(1 - p), which maps [R, inf) onto a
    # finite interval with a bounded integrand
    q = p - 1.0
    w_top = (1.0 + R) ** (-q)

    def tail(sign):
        def g(w):
            x = w ** (-1.0 / q)
            return f(sign * (x - 1.0)) * x ** p / q
        return integrate.quad(g, 0.0, w_top, limit=200, epsabs=0.0, epsrel=1e-11)[0]

    tails = tail(1.0) + tail(-1.0)
    total = core + tails
    tail_bound = 2.0 * 0.9 ** (-theta_tilde) * (1.0 + R) ** (1.0 - p) / (p - 1.0)
    ba = 1.0 + abs(a)
    bound = math.log(1.0 + ba) / ba ** (p - 1.0)
    return IntegralRecord(total, bound, total / bound, tail_bound)


# --------------------------------------------------------------------------
# lattice series
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class SeriesRecord:
    partial_sum: float
    tail_bound: float


def _depressed(e, f, g, c: int):
    """Exact coefficients of ``p(c + y) = y^3 + e' y^2 + f' y + g'``."""
    e, f, g = Fraction(e), Fraction(f), Fraction(g)
    e2 = 3 * c + e
    f2 = 3 * c * c + 2 * e * c + f
    g2 = c ** 3 + e * c * c + f * c + g
    return e2, f2, g2


def polynomial_series(kind: str, coefficients: Sequence, theta: float, range=None) -> SeriesRecord:
    """Partial lattice sums of ``<p(m)>^-theta`` with a rigorous tail bound.

    ``kind="cubic"``: ``coefficients = (e, f, g)`` for ``p(x) = x^3 + e x^2 + f x + g``,
    ``range`` is the cutoff ``K`` (default ``10**5``).  The sum runs over
    ``|m - c| <= K`` where ``c = round(-e/3)`` centres the inflection point, so
    integer translates of ``p`` give identical sums.  Beyond the cutoff
    ``|p(c+y)| >= (1 - d) |y|^3`` with ``d = |e'|/K + |f'|/K^2 + |g'|/K^3``,
    hence ``tail <= 2 (1-d)^-theta K^(1-3 theta) / (3 theta - 1)``.

    ``kind="linear"``: ``coefficients = (n1, r)`` for ``q(x) = 2 n1 x - n1^2 + r``,
    summed over ``|n1|/2 <= |n| <= 2|n1|`` (or ``range = (lo, hi)`` as the
    multiples of ``|n1|``).  The band is finite, so the tail bound is 0.
    """
    kind = kind.lower()
    if kind == "cubic":
        if theta <= 1.0 / 3.0:
            raise DivergentInputError("cubic series needs theta > 1/3")
        K = int(10 ** 5 if range is None else range)
        if K < 1:
            raise ArgumentError("cutoff must be >= 1")
        e, f, g = coefficients
        c = round(-Fraction(e) / 3)
        e2, f2, g2 = _depressed(e, f, g, c)
        y = np.arange(-K, K + 1, dtype=np.float64)
        q = ((y + float(e2)) * y + float(f2)) * y + float(g2)
        partial = float(np.sum(_bracket(q) ** (-theta)))
        d = float(abs(e2) / K + abs(f2) / K ** 2 + abs(g2) / K ** 3)
        if d >= 1.0:
            tail = math.inf
        else:
            tail = 2.0 * (1.0 - d) ** (-theta) * K ** (1.0 - 3.0 * theta) / (3.0 * theta - 1.0)
        return SeriesRecord(partial, tail)
    if kind == "linear":
        if theta <= 0.5:
            raise DivergentInputError("linear series needs theta > 1/2")
        n1, r = coefficients
        n1 = int(n1)
        if n1 == 0:
            raise PreconditionError("linear series needs n1 != 0")
        lo_f, hi_f = (0.5, 2.0) if range is None else range
        a = abs(n1)
        lo, hi = math.ceil(lo_f * a), math.floor(hi_f * a)
        mags = np.arange(lo, hi + 1, dtype=np.float64)
        n = np.concatenate((-mags[::-1], mags)) if lo > 0 else np.arange(-hi, hi + 1, dtype=np.float64)
        q = 2.0 * n1 * n - float(n1) ** 2 + float(r)
        return SeriesRecord(float(np.sum(_bracket(q) ** (-theta))), 0.0)
    raise ArgumentError(f"unknown series kind {kind!r}")


# --------------------------------------------------------------------------
# dyadic measure of perturbed resonance sets
# --------------------------------------------------------------------------


def union_measure(starts: np.ndarray, ends: np.ndarray, lo: float, hi: float) -> float:
    """Lebesgue measure of ``union [starts_i, ends_i]`` intersected with ``[lo, hi)``."""
    s = np.clip(starts, lo, hi)
    e = np.clip(ends, lo, hi)
    keep = e > s
    s, e = s[keep], e[keep]
    if s.size == 0:
        return 0.0
    order = np.argsort(s, kind="stable")
    s, e = s[order], e[order]
    reach = np.maximum.accumulate(e)
    # a component starts where the interval begins beyond everything before it
    new = np.empty(s.size, dtype=bool)
    new[0] = True
    new[1:] = s[1:] > reach[:-1]
    idx = np.flatnonzero(new)
    comp_start = s[idx]
    comp_end = reach[np.append(idx[1:] - 1, s.size - 1)]
    return float(np.sum(comp_end - comp_start))


def perturbed_intervals(kind: str, n: int, epsilon: float, C: float = 1.0,
                        band: Tuple[float, float] = (0.5, 2.0), small: float = 1.0 / 16.0):
    """Centres and half widths of the admissible intervals.

    ``UV``: centre ``r^3 - r^2 - 2 n r``, half width ``C |r|^(2-eps)``, over
    integers with ``band[0] |n| <= |r| <= band[1] |n|``.
    ``DU2``: centre ``n^3 - n^2 - 2 n r``, half width ``C |n|^(1-eps)``, over
    ``|r| <= small * n^2``.
    """
    kind = kind.upper()
    n = int(n)
    if kind == "UV":
        lo, hi = math.ceil(band[0] * abs(n)), math.floor(band[1] * abs(n))
        if hi < lo:
            return np.empty(0), np.empty(0)
        mags = np.arange(max(lo, 0), hi + 1, dtype=np.float64)
        r = np.concatenate((-mags[mags > 0], mags))
        centre = ((r - 1.0) * r - 2.0 * n) * r
        half = C * np.abs(r) ** (2.0 - epsilon)
        return centre, half
    if kind == "DU2":
        top = math.floor(small * n * n)
        r = np.arange(-top, top + 1, dtype=np.float64)
        centre = float(n) ** 3 - float(n) ** 2 - 2.0 * n * r
        half = np.full(r.shape, C * abs(n) ** (1.0 - epsilon))
        return centre, half
    raise ArgumentError(f"unknown measure kind {kind!r}")


def dyadic_measure(kind: str, n: int, M: float, epsilon: float, C: float = 1.0,
                   threshold: int = 100, band: Tuple[float, float] = (0.5, 2.0),
                   small: float = 1.0 / 16.0) -> float:
    """Measure of ``{mu : M <= |mu| < 2M}`` covered by the perturbed resonance set.

    ``band`` and ``small`` realise ``|r| ~ |n|`` and ``|r| << n^2``; see
    :func:`perturbed_intervals`.
    """
    if abs(int(n)) <= threshold:
        raise PreconditionError(f"|n| must exceed {threshold}")
    if M < 1:
        raise PreconditionError("M must be >= 1")
    centre, half = perturbed_intervals(kind, n, epsilon, C, band, small)
    if centre.size == 0:
        return 0.0
    s, e = centre - half, centre + half
    return union_measure(s, e, M, 2.0 * M) + union_measure(-e, -s, M, 2.0 * M)


def uv_blocks(n: int, epsilon: float = 0.2, C: float = 1.0):
    """Dyadic ``M`` whose whole block ``[M, 2M)`` lies inside the span of UV centres."""
    centre, half = perturbed_intervals("UV", n, epsilon, C)
    mags = np.abs(centre)
    lo, hi = float(mags.min()), float(mags.max())
    j0 = math.ceil(math.log2(lo))
    j1 = math.floor(math.log2(hi)) - 1
    return [2.0 ** j for j in range(j0, j1 + 1)]
