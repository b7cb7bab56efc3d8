"""Probe-field observables: normalized coherence, spectra and group index.

The basic observable is ``s = rho31 / omega_p``, the probe coherence per unit
probe Rabi frequency.  Positive ``Im s`` is absorption, negative is gain.
The susceptibility is ``chi = kappa * s`` with ``kappa`` absorbing the
density, dipole and field constants.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Literal

import numpy as np

from ._parallel import ordered_map
from .errors import GridTooCoarse, VcoherError, ZeroDenominator
from .model import RHO31, SystemParams, assemble_static, build_conventional, build_liouvillian_parts
from .solver import solve_linear, weak_probe_first_order

logger = logging.getLogger(__name__)

Mode = Literal["floquet_r1", "static_full", "conventional_full"]
MODES = ("floquet_r1", "static_full", "conventional_full")

REFINE_RTOL = 1e-3


@dataclass(frozen=True)
class ResponseScale:
    """Dimensionless prefactors of the susceptibility and of the group index.

    Attributes
    ----------
    kappa : float
        Susceptibility prefactor, ``chi = kappa * s``.
    w : float
        Carrier frequency in units of the decay rate; weights the dispersive
        derivative in the group index.
    """

    kappa: float = 1.0
    w: float = 1e6

    def __post_init__(self):
        if not (self.kappa > 0 and self.w > 0):
            raise ValueError(f"kappa and w must be positive, got kappa={self.kappa}, w={self.w}")


@dataclass(frozen=True)
class SpectrumPoint:
    """Response at one detuning; ``s`` is NaN when the point failed."""

    detuning: float
    s: complex
    chi: complex
    error: str | None = None

    @classmethod
    def from_s(cls, detuning: float, s: complex, scale: ResponseScale) -> "SpectrumPoint":
        return cls(float(detuning), complex(s), scale.kappa * complex(s))

    @classmethod
    def gap(cls, detuning: float, error: str) -> "SpectrumPoint":
        nan = complex(np.nan, np.nan)
        return cls(float(detuning), nan, nan, error)

    @property
    def absorption(self) -> float:
        return self.s.imag

    @property
    def dispersion(self) -> float:
        return self.s.real

    @property
    def ok(self) -> bool:
        return self.error is None


def normalized_coherence(params: SystemParams, mode: Mode = "floquet_r1") -> complex:
    """Probe coherence per unit probe Rabi frequency.

    Parameters
    ----------
    params : SystemParams
    mode : {"floquet_r1", "static_full", "conventional_full"}
        ``floquet_r1`` returns the weak-probe first-harmonic coefficient, which
        is already per unit ``omega_p`` and holds for any ``delta``.
        ``static_full`` solves the time-independent problem exactly in
        ``omega_p``; at two-photon resonance this is the single-frame static
        generator, away from it the bichromatic generator is the only static
        one available and is used instead.  ``conventional_full`` always uses
        the bichromatic generator.

    Raises
    ------
    ZeroDivisionError
        For the ``_full`` modes when the probe is zero.
    SingularMatrix
        Propagated from the linear solve.
    """
    if mode == "floquet_r1":
        parts = build_liouvillian_parts(params)
        _, r1, _ = weak_probe_first_order(parts, params.delta)
        return complex(r1[RHO31])
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}; expected one of {MODES}")
    omega_p = params.omega_p
    if omega_p == 0:
        raise ZeroDivisionError(f"mode {mode} normalizes by omega_p, which is zero")
    if mode == "static_full" and params.delta == 0:
        m, lam = assemble_static(build_liouvillian_parts(params), omega_p)
    else:
        m, lam = build_conventional(params)
    r = solve_linear(m, lam, block=mode)
    return complex(r[RHO31]) / omega_p


def _eq9_denominator(eta: float, omega_c: float, exact: bool) -> float:
    e2, w2 = eta * eta, omega_c * omega_c
    head = -16 * (1 - e2) ** 3 if exact else -16 + 48 * e2 * (1 - e2)
    return head + 16 * w2 * (e2 * e2 + 2 * e2 - 3) + 4 * w2 * w2 * (e2 - 9) - 8 * w2 ** 3


def eq9_coefficients(eta: float, omega_c: float, exact_denominator: bool = False):
    """Closed-form coherence ``rho31 = c0 + cp*omega_p + cm*conj(omega_p)``.

    Valid for equal decay rates, ``delta = delta_c = 0`` and real fields.

    Parameters
    ----------
    eta, omega_c : float
    exact_denominator : bool
        The published denominator lacks a ``+16 eta**6`` term.  With
        ``True`` the determinant ``-16 (1 - eta**2)**3 + ...`` of the static
        generator is used instead, which makes ``c0`` exact.

    Returns
    -------
    (c0, cp, cm, d) : tuple of complex
    """
    d = _eq9_denominator(eta, omega_c, exact_denominator)
    if abs(d) < 1e-12:
        raise ZeroDenominator(f"denominator {d:.3e} vanishes at eta={eta}, omega_c={omega_c}")
    e2, w = eta * eta, omega_c
    c0 = (-4j * eta * w ** 5 + 16j * eta * w * (e2 - 1) ** 2) / d
    cp = (-16j * (e2 - 1) ** 2 - 4j * w ** 2 * (4 - 5 * e2 + 3 * e2 * e2) + 2j * w ** 4 * (e2 - 2)) / d
    cm = (-4j * w ** 2 * e2 * (3 * e2 - 5) + 2j * w ** 4 * e2) / d
    return complex(c0), complex(cp), complex(cm), complex(d)


@dataclass(frozen=True)
class Sweep:
    """Uniform grid over ``delta`` (``delta_c`` held) or ``delta_c`` (``delta`` held)."""

    variable: Literal["delta", "delta_c"] = "delta"
    start: float = -10.0
    stop: float = 10.0
    count: int = 401

    def __post_init__(self):
        if self.variable not in ("delta", "delta_c"):
            raise ValueError(f"sweep variable must be 'delta' or 'delta_c', got {self.variable!r}")
        if self.count < 2:
            raise ValueError(f"sweep count must be >= 2, got {self.count}")
        if not self.start < self.stop:
            raise ValueError(f"sweep needs start < stop, got {self.start} >= {self.stop}")

    def values(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.count)

    def refined(self) -> "Sweep":
        """Grid with halved spacing; contains every original node."""
        return Sweep(self.variable, self.start, self.stop, 2 * self.count - 1)


def spectrum(template: SystemParams, sweep: Sweep, mode: Mode = "floquet_r1",
             scale: ResponseScale | None = None, workers: int | None = None) -> list[SpectrumPoint]:
    """Evaluate ``normalized_coherence`` on every node of ``sweep``.

    The recorded detuning is the probe detuning ``delta + delta_c``.  Points
    whose solve fails become gaps; at least one point must succeed.
    """
    scale = scale or ResponseScale()

    def one(value: float) -> SpectrumPoint:
        params = template.replace(**{sweep.variable: float(value)})
        try:
            return SpectrumPoint.from_s(params.delta_p, normalized_coherence(params, mode), scale)
        except (VcoherError, ZeroDivisionError) as exc:
            logger.warning("spectrum point %s=%g failed: %s", sweep.variable, value, exc)
            return SpectrumPoint.gap(params.delta_p, f"{type(exc).__name__}: {exc}")

    points = ordered_map(one, sweep.values(), workers)
    if not any(p.ok for p in points):
        raise VcoherError(f"all {len(points)} spectrum points failed; first error: {points[0].error}")
    return points


def group_index(points: list[SpectrumPoint], scale: ResponseScale | None = None) -> list[tuple[float, float]]:
    """``ng - 1 = 2 pi kappa (Re s + w dRe s/d delta_p)`` on a uniform grid.

    The derivative uses central differences inside and one-sided differences
    at the two ends.  Gaps propagate as NaN.
    """
    scale = scale or ResponseScale()
    if len(points) < 3:
        raise ValueError(f"group index needs at least 3 points, got {len(points)}")
    x = np.array([p.detuning for p in points])
    steps = np.diff(x)
    if np.any(steps <= 0) or np.ptp(steps) > 1e-9 * abs(steps[0]) * len(x):
        raise ValueError("group index needs a strictly increasing uniform grid")
    re_s = np.array([p.dispersion for p in points])
    slope = np.gradient(re_s, x, edge_order=1)
    ng1 = 2 * np.pi * scale.kappa * (re_s + scale.w * slope)
    return list(zip(x.tolist(), ng1.tolist()))


def refinement_change(template: SystemParams, sweep: Sweep, mode: Mode = "static_full",
                      scale: ResponseScale | None = None, workers: int | None = None) -> float:
    """Largest change of interior group-index values under grid halving.

    Values are compared on the nodes shared by both grids and the change is
    measured relative to the largest interior magnitude of the fine result;
    a pointwise ratio is meaningless next to the zero crossings of ``ng - 1``.
    """
    coarse = np.array([v for _, v in group_index(spectrum(template, sweep, mode, scale, workers), scale)])
    fine = np.array([v for _, v in group_index(spectrum(template, sweep.refined(), mode, scale, workers), scale)])
    a, b = coarse[1:-1], fine[::2][1:-1]
    ok = np.isfinite(a) & np.isfinite(b)
    if not np.any(ok):
        raise VcoherError("no finite interior group-index values to compare")
    peak = np.max(np.abs(b[ok]))
    if peak == 0:
        return float(np.max(np.abs(a[ok])))
    return float(np.max(np.abs(a[ok] - b[ok])) / peak)


def check_refinement(template, sweep, mode="static_full", scale=None, rtol: float = REFINE_RTOL, workers=None) -> float:
    change = refinement_change(template, sweep, mode, scale, workers)
    if change > rtol:
        raise GridTooCoarse(f"halving the grid spacing changed the group index by {change:.3e} (relative)", change)
    return change
