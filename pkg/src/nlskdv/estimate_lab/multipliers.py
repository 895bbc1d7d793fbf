"""Reduced multiplier sums behind the two bilinear estimates.

Each multiplier is a supremum over an outer frequency/modulation pair of a
lattice sum.  After the inner modulation integral has been bounded by the
bracket-convolution estimate, a term looks like

    weight(m) * log(1 + <a>) / <a>^e,    a = lam + rho * H(n, n1)

where ``H`` is the resonance function of the interaction, ``lam`` the outer
modulation and ``e = theta + theta_tilde - 1`` (``2 * one_minus - 1`` when
both inner brackets carry the ``1-`` power, ``one_minus`` when one of them
carries the full power).

Frequency regions:

* UV: ``A = {|n1| <= thr}``, ``B = {|n1| > thr, not |n1| ~ |n|}``,
  ``C = {|n1| > thr, |n1| ~ |n|}`` with ``~`` meaning ``|n|/2 <= |n1| <= 2|n|``.
* DU2: ``O = {|n| <= thr}``, ``P = {|n| > thr, |n1| > n^2/16}``,
  ``Q = {|n| > thr, |n1| <= n^2/16}``.

The pieces ``C_i``/``Q_i`` additionally require that the i-th modulation
is the largest of the three.  The three modulations sum (with signs) to
``H``, so the largest one is at least ``|H|/3``; we use the superset
``{|lam_i| >= |H|/3}``, which can only increase the computed sums.

The supremum is a heuristic lower bound on the true supremum: it scans the
outer modulation over ``{m 2^j : |m| <= 64, 0 <= j <= 3 log2 T}`` together
with every resonant value (``a = 0``) and every region boundary
(``|lam| = |H|/3``) reachable from the outer frequency, and the outer
frequency over ``|n| <= 16`` plus a quarter-octave geometric grid up to
the truncation ``T``.  All three interacting frequencies are kept within
``[-T, T]``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, Optional

import numpy as np

from ..errors import ArgumentError, PreconditionError

KINDS = ("UV_w0", "UV_w1", "UV_w2", "DU2_v0", "DU2_v1", "DU2_v2")

# outer/inner variable names for reporting
_OUTER = {"UV_w0": "n", "UV_w1": "n1", "UV_w2": "n2",
          "DU2_v0": "n", "DU2_v1": "n1", "DU2_v2": "n2"}
_INNER = {"UV_w0": "n1", "UV_w1": "n", "UV_w2": "n1",
          "DU2_v0": "n1", "DU2_v1": "n", "DU2_v2": "n"}

_BLOCK = 2_000_000


@dataclass(frozen=True)
class MultiplierRecord:
    sup_value: float
    argmax_point: Dict[str, object] = field(default_factory=dict)


def check_region(kind: str, k: float, s: float):
    """Raise :class:`PreconditionError` outside the region where the bound is claimed."""
    if kind.startswith("UV"):
        if s < 0 or k - s > 1.5:
            raise PreconditionError(
                f"UV multipliers need s >= 0 and k - s <= 3/2 (got k={k}, s={s})")
    elif kind.startswith("DU2"):
        if 1.0 + s > 4.0 * k or k - s < -0.5:
            raise PreconditionError(
                f"DU2 multipliers need 1 + s <= 4k and k - s >= -1/2 (got k={k}, s={s})")
    else:
        raise ArgumentError(f"unknown multiplier kind {kind!r}")


def outer_scan(truncation: int) -> np.ndarray:
    vals = set(range(-16, 17))
    x = 16.0
    while x <= truncation:
        v = int(round(x))
        vals.update((v, -v))
        x *= 2.0 ** 0.25
    vals.update((truncation, -truncation))
    return np.array(sorted(vals), dtype=np.int64)


def lambda_scan(truncation: int) -> np.ndarray:
    jmax = int(math.ceil(3 * math.log2(truncation)))
    m = np.arange(-64, 65, dtype=np.float64)
    vals = (m[None, :] * 2.0 ** np.arange(jmax + 1)[:, None]).ravel()
    return np.unique(vals)


def _br(x):
    return 1.0 + np.abs(x)


def _uv_res(n, n1):
    return -n1 ** 3 + n1 ** 2 - 2.0 * n * n1


def _du2_res(n, n1):
    return -n ** 3 - n ** 2 + 2.0 * n1 * n


def _sim(a, b):
    """``|a| ~ |b|`` in the sense ``|b|/2 <= |a| <= 2|b|``."""
    a, b = np.abs(a), np.abs(b)
    return (2 * a >= b) & (a <= 2 * b)


@dataclass
class _Slice:
    inner: np.ndarray      # inner lattice variable
    weight: np.ndarray     # inner weight
    H: np.ndarray          # resonance value per inner point
    rho: float             # argument is lam + rho * H
    base: np.ndarray       # always included
    cond: np.ndarray       # included when |lam| >= |H|/3
    pre: float             # outer prefactor (without 1/<lam>)
    labels: tuple          # (base label, cond label) for reporting


def _slice(kind: str, o: int, k: float, s: float, T: int, thr: int) -> _Slice:
    x = np.arange(-T, T + 1, dtype=np.float64)
    o = float(o)
    if kind == "UV_w0":
        n, n1 = o, x
        keep = np.abs(n - n1) <= T
        n1 = n1[keep]
        small = np.abs(n1) <= thr
        near = _sim(n1, n)
        w = _br(n1) ** (-2 * s) * _br(n - n1) ** (-2 * k)
        return _Slice(n1, w, _uv_res(n, n1), 1.0, small | ~near, ~small & near,
                      _br(n) ** (2 * k), ("A/B", "C0"))
    if kind == "UV_w1":
        n1, n = o, x
        keep = np.abs(n - n1) <= T
        n = n[keep]
        cond = (abs(n1) > thr) & _sim(n1, n)
        w = _br(n) ** (2 * k) * _br(n - n1) ** (-2 * k)
        return _Slice(n, w, _uv_res(n, n1), -1.0, np.zeros(n.size, bool), cond,
                      _br(n1) ** (-2 * s), ("-", "C1"))
    if kind == "UV_w2":
        n2, n1 = o, x
        n = n1 - n2
        keep = np.abs(n) <= T
        n1, n = n1[keep], n[keep]
        cond = (np.abs(n1) > thr) & _sim(n1, n)
        w = _br(n) ** (2 * k) * _br(n1) ** (-2 * s)
        return _Slice(n1, w, _uv_res(n, n1), 1.0, np.zeros(n1.size, bool), cond,
                      _br(n2) ** (-2 * k), ("-", "C2"))
    if kind == "DU2_v0":
        n, n1 = o, x
        keep = np.abs(n - n1) <= T
        n1 = n1[keep]
        w = _br(n1) ** (-2 * k) * _br(n - n1) ** (-2 * k)
        if abs(n) <= thr:
            base = np.ones(n1.size, bool)
        else:
            base = np.abs(n1) > n * n / 16.0
        return _Slice(n1, w, _du2_res(n, n1), -1.0, base, ~base,
                      n * n * _br(n) ** (2 * s), ("O/P", "Q0"))
    if kind == "DU2_v1":
        n1, n = o, x
        keep = np.abs(n1 - n) <= T
        n = n[keep]
        cond = (np.abs(n) > thr) & (abs(n1) <= n * n / 16.0)
        w = n * n * _br(n) ** (2 * s) * _br(n1 - n) ** (-2 * k)
        return _Slice(n, w, _du2_res(n, n1), -1.0, np.zeros(n.size, bool), cond,
                      _br(n1) ** (-2 * k), ("-", "Q1"))
    if kind == "DU2_v2":
        n2, n = o, x
        n1 = n + n2
        keep = np.abs(n1) <= T
        n, n1 = n[keep], n1[keep]
        cond = (np.abs(n) > thr) & (np.abs(n1) <= n * n / 16.0)
        w = n * n * _br(n) ** (2 * s) * _br(n + n2) ** (-2 * k)
        return _Slice(n, w, _du2_res(n, n1), 1.0, np.zeros(n.size, bool), cond,
                      _br(n2) ** (-2 * k), ("-", "Q2"))
    raise ArgumentError(f"unknown multiplier kind {kind!r}")


def _decay(kind: str, one_minus: float) -> float:
    if kind in ("UV_w0", "DU2_v0"):
        return 2.0 * one_minus - 1.0
    return one_minus


def _evaluate(sl: _Slice, lam: np.ndarray, e: float) -> np.ndarray:
    """Reduced sum for every candidate outer modulation in ``lam``."""
    active = sl.base | sl.cond
    if not np.any(active):
        return np.zeros(lam.size)
    w, H = sl.weight[active], sl.H[active]
    base = sl.base[active]
    absH3 = np.abs(H) / 3.0
    out = np.empty(lam.size)
    step = max(1, _BLOCK // max(1, w.size))
    for i in range(0, lam.size, step):
        L = lam[i:i + step, None]
        arg = _br(L + sl.rho * H[None, :])
        terms = np.log1p(arg) / arg ** e
        mask = base[None, :] | (np.abs(L) >= absH3[None, :])
        out[i:i + step] = (terms * mask) @ w
    return sl.pre * out / _br(lam)


def _candidates(sl: _Slice, scan: np.ndarray) -> np.ndarray:
    active = sl.base | sl.cond
    H = sl.H[active]
    cond_H = sl.H[sl.cond]
    extra = [-sl.rho * H, np.abs(cond_H) / 3.0, -np.abs(cond_H) / 3.0]
    return np.unique(np.concatenate([scan] + extra))


def multiplier_sup(kind: str, k: float, s: float, one_minus: float = 0.9,
                   truncation: int = 256, threshold: int = 100,
                   outer: Optional[np.ndarray] = None) -> MultiplierRecord:
    """Heuristic supremum of the reduced multiplier sum; see the module notes."""
    if kind not in KINDS:
        raise ArgumentError(f"unknown multiplier kind {kind!r}")
    check_region(kind, k, s)
    T = int(truncation)
    if T < 64:
        raise PreconditionError("truncation must be >= 64")
    if not 0.5 < one_minus <= 1.0:
        raise PreconditionError("one_minus must lie in (1/2, 1]")
    e = _decay(kind, one_minus)
    scan = lambda_scan(T)
    best, where = -1.0, {}
    for o in (outer_scan(T) if outer is None else outer):
        sl = _slice(kind, int(o), k, s, T, threshold)
        if not np.any(sl.base | sl.cond):
            continue
        lam = _candidates(sl, scan)
        vals = _evaluate(sl, lam, e)
        i = int(np.argmax(vals))
        if vals[i] > best:
            best = float(vals[i])
            where = _describe(kind, sl, int(o), float(lam[i]), e)
    return MultiplierRecord(max(best, 0.0), where)


def _describe(kind, sl: _Slice, o: int, lam: float, e: float):
    arg = _br(lam + sl.rho * sl.H)
    terms = sl.weight * np.log1p(arg) / arg ** e
    mask = sl.base | (sl.cond & (abs(lam) >= np.abs(sl.H) / 3.0))
    terms = np.where(mask, terms, 0.0)
    j = int(np.argmax(terms))
    region = sl.labels[0] if sl.base[j] else sl.labels[1]
    return {_OUTER[kind]: o, "lam": lam, _INNER[kind]: int(sl.inner[j]), "region": region}
