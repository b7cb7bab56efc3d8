"""Time-domain reference: RK4 on the full 3x3 density matrix plus Fourier projection.

The integrator uses the same term table as the harmonic solvers but keeps the
``exp(-+i delta t)`` factors explicit, so agreement with the harmonic
balance is a genuine cross-check of the decomposition and of the truncation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import StepTooLarge, WindowTooShort
from .model import ORDER, REDUCED_INDEX, SystemParams, full_generators
from .solver import HarmonicSolution

DEFAULT_STEP = 1e-3
STEP_HALVING_TOL = 1e-8


def relaxation_time(params: SystemParams) -> float:
    """Time allowed for transients to die out before projecting."""
    return max(50.0, 20.0 / params.gamma2, 20.0 / params.gamma3)


def ground_state() -> np.ndarray:
    rho = np.zeros((3, 3), dtype=complex)
    rho[0, 0] = 1.0
    return rho


@dataclass
class Trajectory:
    """States sampled on a uniform time grid.

    ``states`` has shape ``(n, 3, 3)``; ``times[i] = t0 + i * step * stride``.
    """

    times: np.ndarray
    states: np.ndarray
    step: float
    params: SystemParams | None = None
    meta: dict = field(default_factory=dict)

    def trace_defect(self) -> float:
        return float(np.max(np.abs(np.trace(self.states, axis1=1, axis2=2) - 1.0)))

    def hermiticity_defect(self) -> float:
        return float(np.max(np.abs(self.states - np.conj(np.swapaxes(self.states, 1, 2)))))

    def min_population(self) -> float:
        return float(np.min(np.diagonal(self.states, axis1=1, axis2=2).real))

    def reduced(self) -> np.ndarray:
        """Components in the reduced ordering, shape ``(n, 8)``."""
        return np.stack([self.states[:, i, j] for i, j in REDUCED_INDEX], axis=1)


def _check_rho0(rho0: np.ndarray) -> None:
    if rho0.shape != (3, 3):
        raise ValueError(f"rho0 must be 3x3, got {rho0.shape}")
    if np.max(np.abs(rho0 - rho0.conj().T)) > 1e-12:
        raise ValueError("rho0 must be Hermitian")
    if abs(np.trace(rho0) - 1) > 1e-12:
        raise ValueError("rho0 must have unit trace")


def integrate(params: SystemParams, t_end: float, h: float = DEFAULT_STEP, rho0=None,
              stride: int = 1) -> Trajectory:
    """Classical fourth-order Runge-Kutta with a fixed step.

    Parameters
    ----------
    params : SystemParams
    t_end : float
        Final time; the number of steps is ``round(t_end / h)`` and must be
        at least one.
    h : float
        Step size.
    rho0 : array_like, optional
        Initial 3x3 state; defaults to the ground state.
    stride : int
        Store every ``stride``-th state (the first and last are always kept
        when ``stride`` divides the step count).
    """
    if not h > 0:
        raise ValueError(f"step must be positive, got {h}")
    if t_end < h:
        raise ValueError(f"t_end={t_end} shorter than one step h={h}")
    rho0 = ground_state() if rho0 is None else np.array(rho0, dtype=complex)
    _check_rho0(rho0)
    n_steps = int(round(t_end / h))

    gens = full_generators(params, "single")
    stacked = np.vstack([gens[0], gens[1], gens[-1]])
    op, delta = params.omega_p, params.delta

    def rhs(t, v):
        a, b, c = (stacked @ v).reshape(3, 9)
        return a + op * np.exp(-1j * delta * t) * b + np.conj(op) * np.exp(1j * delta * t) * c

    v = rho0.reshape(9).copy()
    kept_t = [0.0]
    kept = [v.copy()]
    half = 0.5 * h
    for n in range(n_steps):
        t = n * h
        k1 = rhs(t, v)
        k2 = rhs(t + half, v + half * k1)
        k3 = rhs(t + half, v + half * k2)
        k4 = rhs(t + h, v + h * k3)
        v = v + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        if (n + 1) % stride == 0:
            kept_t.append((n + 1) * h)
            kept.append(v.copy())
    states = np.array(kept).reshape(-1, 3, 3)
    return Trajectory(np.array(kept_t), states, h, params, {"stride": stride, "n_steps": n_steps})


def step_halving_change(params: SystemParams, t_end: float, h: float = DEFAULT_STEP, rho0=None) -> float:
    """Max per-component change of the final state when the step is halved."""
    coarse = integrate(params, t_end, h, rho0, stride=max(1, int(round(t_end / h))))
    fine = integrate(params, t_end, h / 2, rho0, stride=max(1, int(round(2 * t_end / h))))
    return float(np.max(np.abs(coarse.states[-1] - fine.states[-1])))


def check_step(params: SystemParams, t_end: float, h: float = DEFAULT_STEP, rho0=None,
               tol: float = STEP_HALVING_TOL) -> float:
    change = step_halving_change(params, t_end, h, rho0)
    if change > tol:
        raise StepTooLarge(f"halving h={h} changed the final state by {change:.3e}", change)
    return change


def project_harmonics(traj: Trajectory, delta: float, k_max: int, window_periods: int = 10,
                      relaxation: float | None = None) -> HarmonicSolution:
    """Fourier coefficients of the final ``window_periods`` periods.

    ``R_k = (1/T) * integral R(t) exp(i k delta t) dt`` over the window of
    length ``T = window_periods * 2 pi / |delta|``, trapezoid rule on the
    stored grid.  A start time between samples is handled by linear
    interpolation.
    """
    if delta == 0:
        raise ValueError("projection needs delta != 0")
    if window_periods < 1:
        raise ValueError("window_periods must be >= 1")
    if relaxation is None:
        relaxation = relaxation_time(traj.params) if traj.params is not None else 0.0
    t = traj.times
    width = window_periods * 2 * np.pi / abs(delta)
    t_start = t[-1] - width
    if t_start < relaxation - 1e-9 * max(1.0, width):
        raise WindowTooShort(
            f"window of {window_periods} periods ({width:.4g}) starting at {t_start:.4g} "
            f"begins before the relaxation time {relaxation:.4g}"
        )
    r = traj.reduced()
    first = int(np.searchsorted(t, t_start))
    tw, rw = t[first:], r[first:]
    if tw[0] - t_start > 1e-12 * max(1.0, t[-1]):
        lo = first - 1
        frac = (t_start - t[lo]) / (t[lo + 1] - t[lo])
        r_start = r[lo] + frac * (r[lo + 1] - r[lo])
        tw = np.concatenate([[t_start], tw])
        rw = np.vstack([r_start, rw])
    width = tw[-1] - tw[0]
    coeffs = {}
    for k in range(-k_max, k_max + 1):
        phase = np.exp(1j * k * delta * tw)[:, None]
        coeffs[k] = np.trapezoid(rw * phase, tw, axis=0) / width
    meta = {"window": (float(tw[0]), float(tw[-1])), "samples": len(tw)}
    return HarmonicSolution(k_max, coeffs, float("nan"), delta, meta)


def periodic_reference(params: SystemParams, k_max: int, t_end: float = 60.0, h: float = DEFAULT_STEP,
                       window_periods: int = 10, rho0=None) -> HarmonicSolution:
    """Integrate long enough for a converged window, then project.

    The step is shrunk to ``T / ceil(T / h)`` with ``T = 2 pi / |delta|`` so
    the window is an exact number of steps, and the run is extended beyond
    ``t_end`` when the relaxation time plus the window do not fit.
    """
    delta = params.delta
    if delta == 0:
        raise ValueError("periodic reference needs delta != 0")
    period = 2 * np.pi / abs(delta)
    per_period = math.ceil(period / h - 1e-9)
    h_eff = period / per_period
    window_steps = window_periods * per_period
    total = max(t_end, relaxation_time(params) + window_periods * period)
    n_steps = max(math.ceil(total / h_eff - 1e-9), window_steps)
    traj = integrate(params, n_steps * h_eff, h_eff, rho0)
    sol = project_harmonics(traj, delta, k_max, window_periods, relaxation_time(params))
    sol.meta.update({"step": h_eff, "t_end": n_steps * h_eff})
    return sol


@dataclass
class ComparisonReport:
    max_deviation: float
    worst_harmonic: int
    worst_component: str
    abs_tol: float
    per_harmonic: dict[int, float]

    @property
    def passed(self) -> bool:
        return self.max_deviation <= self.abs_tol

    def summary(self) -> str:
        verdict = "pass" if self.passed else "FAIL"
        return (f"{verdict}: max deviation {self.max_deviation:.3e} at harmonic k={self.worst_harmonic}, "
                f"component {self.worst_component} (tolerance {self.abs_tol:.1e})")


def compare(fl: HarmonicSolution, ref: HarmonicSolution, abs_tol: float = 1e-6,
            ks: tuple[int, ...] | None = None) -> ComparisonReport:
    """Per-harmonic, per-component absolute deviation between two solutions."""

    ks = tuple(ks) if ks is not None else tuple(range(-min(fl.k_max, ref.k_max), min(fl.k_max, ref.k_max) + 1))
    per, worst = {}, (-1.0, 0, ORDER[0])
    for k in ks:
        diff = np.abs(fl[k] - ref[k])
        idx = int(np.argmax(diff))
        per[k] = float(diff[idx])
        if diff[idx] > worst[0]:
            worst = (float(diff[idx]), k, ORDER[idx])
    return ComparisonReport(worst[0], worst[1], worst[2], abs_tol, per)
