"""Mean-field ring-cavity bistability on top of the nonperturbative steady states.

The input field ``y`` follows from the transmitted field ``x`` through

    y = x - 2i C gamma3 rho31(x),

with the probe Rabi frequency inside the medium set by ``x``.  Curves are
traced along ``x``, where the relation is single valued.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from ._parallel import ordered_map
from .errors import ModeMismatch, NoBracket, VcoherError
from .model import RHO31, SystemParams, assemble_static, build_liouvillian_parts
from .solver import harmonic_balance, solve_linear

logger = logging.getLogger(__name__)

OBMode = Literal["static", "floquet", "r1_only"]
OB_MODES = ("static", "floquet", "r1_only")

TURNING_XTOL = 1e-6
ROOT_RTOL = 1e-8
MIN_SUCCESS = 0.9
PHASE_SAMPLES = 32


@dataclass(frozen=True)
class OBParams:
    """Cavity parameters.

    Attributes
    ----------
    c_coop : float
        Cooperation parameter ``C``.
    x_to_omega_p : float
        Probe Rabi frequency per unit transmitted amplitude.
    phase_x : float
        Phase of the intracavity probe, radians.
    """

    c_coop: float = 400.0
    x_to_omega_p: float = 1.0
    phase_x: float = 0.0

    def __post_init__(self):
        if self.c_coop < 0:
            raise ValueError(f"c_coop must be >= 0, got {self.c_coop}")
        if not self.x_to_omega_p > 0:
            raise ValueError(f"x_to_omega_p must be > 0, got {self.x_to_omega_p}")


@dataclass(frozen=True)
class XGrid:
    start: float = 0.0
    stop: float = 120.0
    count: int = 601

    def __post_init__(self):
        if self.start < 0:
            raise ValueError(f"x grid must start at x >= 0, got {self.start}")
        if not self.stop > self.start:
            raise ValueError("x grid needs stop > start")
        if self.count < 16:
            raise ValueError(f"x grid needs at least 16 points, got {self.count}")

    def values(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.count)


def _probe_params(x: float, params: SystemParams, ob: OBParams) -> SystemParams:
    return params.replace(omega_p_mag=ob.x_to_omega_p * x, phi_p=ob.phase_x)


def _static_rho31(parts, omega_p: complex) -> complex:
    m, lam = assemble_static(parts, omega_p)
    return complex(solve_linear(m, lam, block="static")[RHO31])


def _in_phase_average(parts, omega_p: complex, samples: int) -> complex:
    # k = 1 Fourier coefficient of the static coherence over the probe phase;
    # the adiabatic (delta -> 0) limit of the first harmonic.
    theta = 2 * np.pi * np.arange(samples) / samples
    vals = [_static_rho31(parts, omega_p * np.exp(1j * t)) * np.exp(-1j * t) for t in theta]
    return complex(np.mean(vals))


def probe_coherence(x: float, params: SystemParams, ob: OBParams, mode: OBMode = "static",
                    k_max: int = 6, phase_samples: int = PHASE_SAMPLES) -> complex:
    """Probe coherence ``rho31`` entering the cavity relation at amplitude ``x``."""
    if x < 0:
        raise ValueError(f"x must be >= 0, got {x}")
    if mode not in OB_MODES:
        raise ValueError(f"unknown OB mode {mode!r}; expected one of {OB_MODES}")
    delta = params.delta
    if mode == "static" and delta != 0:
        raise ModeMismatch(f"static mode needs delta = 0, got delta={delta}")
    if mode == "floquet" and delta == 0:
        raise ModeMismatch("floquet mode needs delta != 0; use static at two-photon resonance")
    p = _probe_params(x, params, ob)
    parts = build_liouvillian_parts(p)
    if mode == "static":
        return _static_rho31(parts, p.omega_p)
    if delta != 0:
        return harmonic_balance(parts, delta, p.omega_p, k_max).rho31(1)
    if x == 0:
        return 0j
    return _in_phase_average(parts, p.omega_p, phase_samples)


def output_field(x: float, params: SystemParams, ob: OBParams, mode: OBMode = "static",
                 k_max: int = 6, phase_samples: int = PHASE_SAMPLES) -> complex:
    """Input field ``y`` needed to sustain transmitted amplitude ``x``.

    Modes
    -----
    static
        Full static steady state; requires ``delta == 0``.
    floquet
        In-phase harmonic of the truncated harmonic balance; requires
        ``delta != 0``.
    r1_only
        In-phase harmonic only.  Equal to ``floquet`` for ``delta != 0``;
        at ``delta == 0`` it is the probe-phase average of the static
        coherence weighted by ``exp(-i theta)``, which is the
        ``delta -> 0`` limit of the first harmonic.
    """
    rho31 = probe_coherence(x, params, ob, mode, k_max, phase_samples)
    return x - 2j * ob.c_coop * params.gamma3 * rho31


@dataclass
class OBCurve:
    """Sampled S-curve with its turning points.

    ``x`` is strictly increasing; failed samples hold NaN in ``y`` and are
    listed in ``failed``.
    """

    x: np.ndarray
    y: np.ndarray
    turning_points: list[float] = field(default_factory=list)
    turning_values: list[float] = field(default_factory=list)
    turning_kinds: list[str] = field(default_factory=list)
    failed: list[float] = field(default_factory=list)

    @property
    def y_abs(self) -> np.ndarray:
        return np.abs(self.y)

    @property
    def points(self) -> list[tuple[float, complex, float]]:
        return [(float(a), complex(b), float(abs(b))) for a, b in zip(self.x, self.y)]

    @property
    def threshold_up(self) -> float | None:
        """|y| at the first local maximum (switch-up threshold)."""
        for value, kind in zip(self.turning_values, self.turning_kinds):
            if kind == "max":
                return value
        return None


def _abs_y(x, params, ob, mode, k_max):
    return abs(output_field(x, params, ob, mode, k_max))


def _slope(x, params, ob, mode, k_max, h):
    lo = max(x - h, 0.0)
    hi = x + h
    return (_abs_y(hi, params, ob, mode, k_max) - _abs_y(lo, params, ob, mode, k_max)) / (hi - lo)


def _refine_turning(a, b, params, ob, mode, k_max, xtol=TURNING_XTOL):
    # bisection on the sign of a centred difference of |y|
    h = 1e-5 * max(1.0, abs(b))
    sa = np.sign(_slope(a, params, ob, mode, k_max, h))
    sb = np.sign(_slope(b, params, ob, mode, k_max, h))
    if sa == sb or sa == 0 or sb == 0:
        return 0.5 * (a + b)
    while b - a > xtol:
        mid = 0.5 * (a + b)
        sm = np.sign(_slope(mid, params, ob, mode, k_max, h))
        if sm == sa:
            a = mid
        elif sm == 0:
            return mid
        else:
            b = mid
    return 0.5 * (a + b)


def ob_curve(params: SystemParams, ob: OBParams, grid: XGrid | None = None, mode: OBMode = "static",
             k_max: int = 6, refine: bool = True, workers: int | None = None) -> OBCurve:
    """Trace ``y(x)`` on ``grid`` and locate the turning points of ``|y|``.

    Turning points are bracketed by sign changes of the discrete slope and
    refined by bisection on a centred difference of ``|y|`` to ``1e-6`` in
    ``x``.  At least 90 % of the samples must succeed.
    """
    grid = grid or XGrid()
    xs = grid.values()

    def one(x):
        try:
            return output_field(float(x), params, ob, mode, k_max)
        except VcoherError as exc:
            logger.warning("OB point x=%g failed: %s", x, exc)
            return complex(np.nan, np.nan)

    ys = np.array(ordered_map(one, xs, workers), dtype=complex)
    bad = ~np.isfinite(ys)
    if np.count_nonzero(~bad) < MIN_SUCCESS * len(xs):
        raise VcoherError(f"only {np.count_nonzero(~bad)} of {len(xs)} OB points succeeded")
    curve = OBCurve(xs, ys, failed=xs[bad].tolist())

    good = np.flatnonzero(~bad)
    gx, gy = xs[good], np.abs(ys[good])
    slope = np.diff(gy)
    for i in range(1, len(slope)):
        if slope[i - 1] == 0 or slope[i] == 0 or np.sign(slope[i - 1]) == np.sign(slope[i]):
            continue
        a, b = gx[i - 1], gx[i + 1]
        xt = _refine_turning(a, b, params, ob, mode, k_max) if refine else gx[i]
        curve.turning_points.append(float(xt))
        curve.turning_values.append(_abs_y(xt, params, ob, mode, k_max) if refine else float(gy[i]))
        curve.turning_kinds.append("max" if slope[i - 1] > 0 else "min")
    return curve


def threshold(curve: OBCurve) -> float | None:
    """Switch-up threshold ``|y|`` at the first local maximum; ``None`` if monotone."""
    return curve.threshold_up


def branches_for_input(params: SystemParams, ob: OBParams, y_target_abs: float, grid: XGrid | None = None,
                       mode: OBMode = "static", k_max: int = 6, curve: OBCurve | None = None) -> list[float]:
    """All ``x`` on the sweep range with ``|y(x)| = y_target_abs``.

    Roots are bracketed on the sampled curve and refined by bisection on
    fresh evaluations to ``1e-8`` relative in ``x``.
    """
    if y_target_abs < 0:
        raise ValueError("y_target_abs must be >= 0")
    if curve is None:
        curve = ob_curve(params, ob, grid, mode, k_max, refine=False)
    ok = np.isfinite(curve.y)
    xs, ya = curve.x[ok], np.abs(curve.y[ok])
    if not ya.min() <= y_target_abs <= ya.max():
        raise NoBracket(f"|y| = {y_target_abs} lies outside the sampled range [{ya.min():.6g}, {ya.max():.6g}]")
    g = ya - y_target_abs
    roots = []
    for i in range(len(xs) - 1):
        if g[i] == 0:
            roots.append(float(xs[i]))
            continue
        if g[i] * g[i + 1] < 0:
            a, b, ga = xs[i], xs[i + 1], g[i]
            while b - a > ROOT_RTOL * max(abs(a), abs(b), ROOT_RTOL):
                mid = 0.5 * (a + b)
                gm = _abs_y(mid, params, ob, mode, k_max) - y_target_abs
                if gm == 0:
                    a = b = mid
                    break
                if np.sign(gm) == np.sign(ga):
                    a, ga = mid, gm
                else:
                    b = mid
            roots.append(float(0.5 * (a + b)))
    if g[-1] == 0:
        roots.append(float(xs[-1]))
    return roots
