"""Fixed-point solution of the Duhamel formulation on a uniform time grid.

    u(t) = U(t) u0 + int_0^t U(t - t') N_u(t') dt'
    v(t) = V(t) v0 + int_0^t V(t - t') N_v(t') dt'

with ``U(t) = exp(-i n^2 t)`` and ``V(t) = exp(i n^3 t)`` on Fourier
coefficients and ``N_u``, ``N_v`` the spectral tendencies of
:mod:`nlskdv.dynamics`.  On a fixed window ``[0, T]`` the smooth time
cutoffs of the local theory are taken to be identically one.

Trajectories are arrays of shape ``(M + 1, N)`` holding the coefficients at
``t_j = j T / M`` with ``M = num_time_samples``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Tuple

import numpy as np

from .dynamics import SimConfig, _Tendency, _hermitian, evolve
from .errors import ArgumentError, NoContractionError
from .spectral_core import SpectralField


@dataclass(frozen=True)
class Couplings:
    alpha: float = 1.0
    beta: float = 0.0
    gamma: float = 1.0


@dataclass(frozen=True)
class PicardConfig:
    t_final: float
    num_time_samples: int = 32
    k: float = 1.0
    s: float = 1.0
    max_iters: int = 50
    tol: float = 1e-12
    dealias: bool = True

    def __post_init__(self):
        if not self.t_final > 0:
            raise ArgumentError("t_final must be positive")
        if int(self.num_time_samples) != self.num_time_samples or self.num_time_samples < 16:
            raise ArgumentError("num_time_samples must be an integer >= 16")
        if not self.tol > 0:
            raise ArgumentError("tol must be positive")
        if int(self.max_iters) != self.max_iters or self.max_iters < 1:
            raise ArgumentError("max_iters must be a positive integer")

    @property
    def times(self) -> np.ndarray:
        return np.linspace(0.0, self.t_final, self.num_time_samples + 1)

    @property
    def dt(self) -> float:
        return self.t_final / self.num_time_samples


@dataclass
class IterationReport:
    distances: List[float] = field(default_factory=list)
    contraction_ratios: List[float] = field(default_factory=list)
    converged: bool = False
    iterations_used: int = 0

    def record(self, d: float):
        if self.distances and self.distances[-1] > 0:
            self.contraction_ratios.append(d / self.distances[-1])
        self.distances.append(d)


@dataclass
class FixedPoint:
    report: IterationReport
    u: np.ndarray
    v: np.ndarray
    times: np.ndarray


def _family_symbol(n: np.ndarray, family: str) -> np.ndarray:
    fam = family.lower()
    if fam == "schrodinger":
        return -1j * n ** 2
    if fam == "airy":
        sym = 1j * n ** 3
        sym[n.size // 2] = 0.0
        return sym
    raise ArgumentError(f"unknown family {family!r}")


def free_propagator(field_: SpectralField, t: float, family: str) -> SpectralField:
    """``exp(-i n^2 t)`` (Schrodinger) or ``exp(i n^3 t)`` (Airy) on each mode."""
    n = field_.grid.wavenumbers.astype(np.float64)
    # the Airy symbol vanishes on the Nyquist mode, matching the solver
    phase = np.exp(_family_symbol(n, family) * t)
    return field_.with_coeffs(field_.coeffs * phase)


def sobolev_weights(num_modes: int, index: float) -> np.ndarray:
    n = np.fft.fftfreq(num_modes, 1.0 / num_modes)
    return 2.0 * math.pi * (1.0 + np.abs(n)) ** (2.0 * index)


def trajectory_distance(du: np.ndarray, dv: np.ndarray, k: float, s: float) -> float:
    """``sup_t (||du(t)||_{H^k} + ||dv(t)||_{H^s})`` over the sample times."""
    wk = sobolev_weights(du.shape[1], k)
    ws = sobolev_weights(dv.shape[1], s)
    a = np.sqrt(np.sum(wk * np.abs(du) ** 2, axis=1))
    b = np.sqrt(np.sum(ws * np.abs(dv) ** 2, axis=1))
    return float(np.max(a + b))


class _Duhamel:
    def __init__(self, num_modes: int, config: PicardConfig, couplings: Couplings):
        self.config = config
        sim = SimConfig(couplings.alpha, couplings.beta, couplings.gamma, num_modes,
                        config.dt, config.t_final, config.dealias, 1)
        self.F = _Tendency(sim)
        n = np.fft.fftfreq(num_modes, 1.0 / num_modes)
        self.Lu = _family_symbol(n, "schrodinger")
        self.Lv = _family_symbol(n, "airy")
        t = config.times
        self.Eu = np.exp(np.outer(t, self.Lu))
        self.Ev = np.exp(np.outer(t, self.Lv))
        self.nyq = num_modes // 2

    def apply(self, u_traj, v_traj, u0, v0):
        h = self.config.dt
        Nu = np.empty_like(u_traj)
        Nv = np.empty_like(v_traj)
        for j in range(u_traj.shape[0]):
            Nu[j], Nv[j] = self.F(u_traj[j], v_traj[j])
        # interaction picture: U(t) int_0^t U(-t') N(t') dt', trapezoid in t'
        Gu = np.conj(self.Eu) * Nu
        Gv = np.conj(self.Ev) * Nv
        Iu = np.zeros_like(Gu)
        Iv = np.zeros_like(Gv)
        Iu[1:] = np.cumsum(0.5 * h * (Gu[1:] + Gu[:-1]), axis=0)
        Iv[1:] = np.cumsum(0.5 * h * (Gv[1:] + Gv[:-1]), axis=0)
        u_new = self.Eu * (u0[None, :] + Iu)
        v_new = self.Ev * (v0[None, :] + Iv)
        v_new[:, self.nyq] = 0.0
        v_new = 0.5 * (v_new + np.conj(v_new[:, (-np.arange(v_new.shape[1])) % v_new.shape[1]]))
        return u_new, v_new


def _coeff_array(f: SpectralField) -> np.ndarray:
    return np.array(f.coeffs, dtype=np.complex128)


def _check_traj(traj: np.ndarray, config: PicardConfig, num_modes: int, name: str):
    if traj.shape != (config.num_time_samples + 1, num_modes):
        raise ArgumentError(
            f"{name} has shape {traj.shape}, expected {(config.num_time_samples + 1, num_modes)}")


def _prepare_v0(v0: SpectralField) -> np.ndarray:
    c = _coeff_array(v0)
    c[c.size // 2] = 0.0
    return _hermitian(c)


def duhamel_apply(u_traj: np.ndarray, v_traj: np.ndarray, u0: SpectralField,
                  v0: SpectralField, config: PicardConfig,
                  couplings: Couplings) -> Tuple[np.ndarray, np.ndarray]:
    """One application of the Duhamel map to sampled trajectories."""
    N = u0.grid.num_modes
    if v0.grid != u0.grid:
        raise ArgumentError("u0 and v0 must share one grid")
    u_traj = np.asarray(u_traj, dtype=np.complex128)
    v_traj = np.asarray(v_traj, dtype=np.complex128)
    _check_traj(u_traj, config, N, "u_traj")
    _check_traj(v_traj, config, N, "v_traj")
    return _Duhamel(N, config, couplings).apply(u_traj, v_traj, _coeff_array(u0), _prepare_v0(v0))


def free_trajectories(u0: SpectralField, v0: SpectralField, config: PicardConfig):
    n = np.fft.fftfreq(u0.grid.num_modes, 1.0 / u0.grid.num_modes)
    t = config.times
    u = np.exp(np.outer(t, _family_symbol(n, "schrodinger"))) * _coeff_array(u0)[None, :]
    v = np.exp(np.outer(t, _family_symbol(n, "airy"))) * _prepare_v0(v0)[None, :]
    return u, v


def iterate(u0: SpectralField, v0: SpectralField, config: PicardConfig,
            couplings: Couplings) -> FixedPoint:
    """Picard iteration seeded with the free evolution.

    Stops once the sup-in-time ``H^k x H^s`` distance between successive
    iterates drops below ``tol``.  Three consecutive increases of that
    distance raise :class:`NoContractionError`.
    """
    N = u0.grid.num_modes
    op = _Duhamel(N, config, couplings)
    ua, va = _coeff_array(u0), _prepare_v0(v0)
    u, v = free_trajectories(u0, v0, config)
    report = IterationReport()
    growth = 0
    for it in range(1, config.max_iters + 1):
        un, vn = op.apply(u, v, ua, va)
        d = trajectory_distance(un - u, vn - v, config.k, config.s)
        if not math.isfinite(d):
            report.iterations_used = it
            raise NoContractionError("iterates became non-finite", report)
        if report.distances and d > report.distances[-1]:
            growth += 1
        else:
            growth = 0
        report.record(d)
        report.iterations_used = it
        u, v = un, vn
        if d < config.tol:
            report.converged = True
            break
        if growth >= 3:
            raise NoContractionError(
                f"distance grew for 3 consecutive iterates (last {d:.3e})", report)
    return FixedPoint(report, u, v, config.times)


def fixed_point_defect(fp: FixedPoint, u0, v0, config: PicardConfig, couplings) -> float:
    """Distance moved by one further application of the Duhamel map."""
    un, vn = duhamel_apply(fp.u, fp.v, u0, v0, config, couplings)
    return trajectory_distance(un - fp.u, vn - fp.v, config.k, config.s)


def compare_with_dynamics(fp: FixedPoint, u0: SpectralField, v0: SpectralField,
                          config: PicardConfig, couplings: Couplings,
                          substeps: int = 10) -> float:
    """Sup over the Picard sample times of the ``H^k x H^s`` gap to the ETDRK4
    solution computed with ``dt = (T / num_time_samples) / substeps``."""
    sim = SimConfig(couplings.alpha, couplings.beta, couplings.gamma, u0.grid.num_modes,
                    config.dt / substeps, config.t_final, config.dealias, substeps)
    res = evolve(u0, v0, sim)
    if len(res.snapshots) != fp.u.shape[0]:
        raise ArgumentError("time grids of the two solvers do not match")
    du = np.array([np.asarray(s.u.coeffs) for s in res.snapshots]) - fp.u
    dv = np.array([np.asarray(s.v.coeffs) for s in res.snapshots]) - fp.v
    return trajectory_distance(du, dv, config.k, config.s)


def contraction_horizon(u0: SpectralField, v0: SpectralField, couplings: Couplings,
                        t_start: float = 0.1, doublings: int = 8, **kwargs) -> float:
    """First horizon ``T`` (doubling from ``t_start``) at which iteration fails
    to converge; ``inf`` if every tried horizon converged."""
    T = t_start
    for _ in range(doublings + 1):
        cfg = PicardConfig(T, **kwargs)
        try:
            fp = iterate(u0, v0, cfg, couplings)
        except NoContractionError:
            return T
        if not fp.report.converged:
            return T
        T *= 2.0
    return math.inf
