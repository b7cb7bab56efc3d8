"""Named self-checks run by ``vcoher validate``.

Each check returns a ``CheckResult``; a check that raises is reported as a
failure carrying the exception text.  ``QUICK`` checks are cheap algebraic
identities; the remaining ones integrate trajectories or trace curves.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import model
from .bistability import OBParams, XGrid, ob_curve
from .model import (
    RHO31,
    SystemParams,
    assemble_static,
    build_conventional,
    build_liouvillian_parts,
    density_vector_to_matrix,
    matrix_to_density_vector,
)
from .oracle import check_step, compare, periodic_reference
from .response import Sweep, check_refinement, eq9_coefficients, group_index, normalized_coherence, spectrum
from .solver import check_truncation, harmonic_balance, solve_linear, weak_probe_first_order

SEED = 20240611


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0


def random_params(rng: np.random.Generator, **fixed) -> SystemParams:
    """Random valid parameters in the range covered by the figures."""
    draw = dict(
        gamma2=rng.uniform(0.5, 2.0),
        gamma3=rng.uniform(0.5, 2.0),
        eta=rng.uniform(0.0, 0.95),
        omega_c_mag=rng.uniform(0.0, 5.0),
        phi_c=rng.uniform(0, 2 * np.pi),
        omega_p_mag=rng.uniform(0.0, 1.0),
        phi_p=rng.uniform(0, 2 * np.pi),
        delta_c=rng.uniform(-5, 5),
        delta=rng.uniform(-5, 5),
    )
    draw.update(fixed)
    return SystemParams(**draw)


def random_state(rng: np.random.Generator) -> np.ndarray:
    a = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    rho = a @ a.conj().T
    return rho / np.trace(rho)


def _decomposition(n=20):
    rng = np.random.default_rng(SEED)
    worst = 0.0
    for _ in range(n):
        p = random_params(rng)
        parts = build_liouvillian_parts(p)
        rho = random_state(rng)
        t = rng.uniform(0, 10)
        got = parts.derivative(matrix_to_density_vector(rho), t, p.omega_p, p.delta)
        want = matrix_to_density_vector(model.bloch_rhs(p, rho, t))
        worst = max(worst, np.max(np.abs(got - want)) / max(np.max(np.abs(want)), 1e-300))
    return worst <= 1e-12, f"max relative mismatch {worst:.2e} over {n} draws (tolerance 1e-12)"


def _trace(n=100):
    rng = np.random.default_rng(SEED + 1)
    worst = 0.0
    for _ in range(n):
        p = random_params(rng)
        gens = model.full_generators(p)
        t = rng.uniform(0, 10)
        g = gens[0] + p.omega_p * np.exp(-1j * p.delta * t) * gens[1] + np.conj(p.omega_p) * np.exp(1j * p.delta * t) * gens[-1]
        d = (g @ random_state(rng).reshape(9)).reshape(3, 3)
        worst = max(worst, abs(np.trace(d)))
    return worst <= 1e-12, f"max |d tr(rho)/dt| {worst:.2e} over {n} draws (tolerance 1e-12)"


def _conventional(n=50):
    rng = np.random.default_rng(SEED + 2)
    worst = 0.0
    for _ in range(n):
        p = random_params(rng, delta=0.0)
        m1, l1 = assemble_static(build_liouvillian_parts(p), p.omega_p)
        m2, l2 = build_conventional(p)
        worst = max(worst, np.max(np.abs(m1 - m2)), np.max(np.abs(l1 - l2)))
    return worst <= 1e-12, f"max entry difference {worst:.2e} at delta = 0 over {n} draws (tolerance 1e-12)"


def _harmonic_invariants(n=50):
    rng = np.random.default_rng(SEED + 3)
    herm = trace = resid = 0.0
    for _ in range(n):
        p = random_params(rng, delta=rng.choice([-1, 1]) * rng.uniform(0.5, 5))
        sol = harmonic_balance(build_liouvillian_parts(p), p.delta, p.omega_p, 6)
        herm, trace, resid = max(herm, sol.hermiticity_defect()), max(trace, sol.trace_defect()), max(resid, sol.residual_norm)
    ok = herm <= 1e-9 and trace <= 1e-10 and resid <= 1e-10
    return ok, f"hermiticity {herm:.2e} (1e-9), trace {trace:.2e} (1e-10), residual {resid:.2e} (1e-10) over {n} solves"


def _static_states(n=50):
    rng = np.random.default_rng(SEED + 4)
    bad = []
    for _ in range(n):
        p = random_params(rng, delta=0.0)
        m, lam = assemble_static(build_liouvillian_parts(p), p.omega_p)
        rho, defect = density_vector_to_matrix(solve_linear(m, lam))
        pops = np.diag(rho)
        if defect > 1e-10 or np.max(np.abs(pops.imag)) > 1e-10 or pops.real.min() < -1e-8 or pops.real.max() > 1 + 1e-8:
            bad.append(p)
    return not bad, f"{len(bad)} of {n} static states unphysical"


def _linearity(n=50):
    # weak-probe spectra family (equal decay rates, omega_c = 2, delta_c = 0);
    # saturation corrections scale as |omega_p|^2 over the dressed linewidths
    rng = np.random.default_rng(SEED + 5)
    worst = 0.0
    for _ in range(n):
        p = SystemParams(eta=rng.uniform(0.0, 0.99), phi_c=rng.uniform(0, 2 * np.pi),
                         phi_p=rng.uniform(0, 2 * np.pi), delta=rng.choice([-1, 1]) * rng.uniform(0.1, 10))
        parts = build_liouvillian_parts(p)
        phase = np.exp(1j * p.phi_p)
        a = harmonic_balance(parts, p.delta, 1e-4 * phase, 3).rho31(1) / (1e-4 * phase)
        b = harmonic_balance(parts, p.delta, 1e-3 * phase, 3).rho31(1) / (1e-3 * phase)
        r1 = weak_probe_first_order(parts, p.delta)[1][RHO31]
        worst = max(worst, abs(a - b) / abs(b), abs(a - r1) / abs(r1))
    return worst <= 1e-6, f"max relative spread of R1/omega_p {worst:.2e} over {n} draws (tolerance 1e-6)"


def _phase_gauge(n=20):
    rng = np.random.default_rng(SEED + 6)
    worst = 0.0
    for _ in range(n):
        p = random_params(rng, delta=0.0)
        q = p.replace(phi_c=p.phi_c + 1.1, phi_p=p.phi_p + 1.1)
        ra = np.abs(density_vector_to_matrix(solve_linear(*assemble_static(build_liouvillian_parts(p), p.omega_p)))[0])
        rb = np.abs(density_vector_to_matrix(solve_linear(*assemble_static(build_liouvillian_parts(q), q.omega_p)))[0])
        worst = max(worst, np.max(np.abs(ra - rb)))
    return worst <= 1e-12, f"max change of |rho_ij| under a common phase shift {worst:.2e} (tolerance 1e-12)"


def _eq9():
    # worst error as a multiple of its tolerance: 1e-10 relative, 1e-12 absolute for zero targets
    worst, where = 0.0, ""
    for eta in (0.0, 0.5, 0.99):
        for wc in (0.5, 2.0, 4.0):
            parts = build_liouvillian_parts(SystemParams(eta=eta, omega_c_mag=wc))
            got = [v[RHO31] for v in weak_probe_first_order(parts, 0.0)]
            want = eq9_coefficients(eta, wc)[:3]
            for name, g, w in zip(("c0", "cp", "cm"), got, want):
                score = abs(g - w) / abs(w) / 1e-10 if w != 0 else abs(g) / 1e-12
                if score > worst:
                    worst, where = score, f"{name} at eta={eta}, omega_c={wc}: got {g:.12g}, closed form {w:.12g}"
    return worst <= 1.0, f"worst error {worst:.2e} x tolerance ({where})"


def _phase_beyond():
    sweep = Sweep("delta", -10, 10, 41)
    base = spectrum(SystemParams(eta=0.5), sweep, "floquet_r1")
    worst = 0.0
    for dphi in (np.pi / 4, np.pi / 2, np.pi):
        other = spectrum(SystemParams(eta=0.5, phi_c=dphi), sweep, "floquet_r1")
        worst = max(worst, max(abs(a.s - b.s) / abs(a.s) for a, b in zip(base, other)))
    return worst <= 1e-12, f"max relative change under phase difference {worst:.2e} (tolerance 1e-12)"


def _phase_at_resonance():
    a = normalized_coherence(SystemParams(eta=0.5), "static_full")
    b = normalized_coherence(SystemParams(eta=0.5, phi_c=np.pi), "static_full")
    c = normalized_coherence(SystemParams(eta=0.0), "static_full")
    d = normalized_coherence(SystemParams(eta=0.0, phi_c=np.pi), "static_full")
    rel = abs(a.imag - b.imag) / max(abs(a.imag), abs(b.imag))
    rel0 = abs(c - d) / abs(c)
    return rel > 0.1 and rel0 <= 1e-12, f"eta=0.5: Im s changes by {rel:.1%} (> 10%); eta=0: {rel0:.1e} (<= 1e-12)"


def _oracle():
    worst = []
    for delta in (1.0, 3.0):
        for op in (1e-3, 1e-2):
            p = SystemParams(eta=0.5, delta=delta, omega_p_mag=op)
            fl = harmonic_balance(build_liouvillian_parts(p), delta, p.omega_p, 3)
            rep = compare(fl, periodic_reference(p, 3), 1e-6, ks=(-1, 0, 1))
            worst.append((rep.max_deviation, rep))
    dev, rep = max(worst, key=lambda item: item[0])
    return rep.passed, rep.summary()


def _step():
    p = SystemParams(eta=0.5, delta=3.0)
    change = check_step(p, 10.0, 1e-3)
    return True, f"final-state change under step halving {change:.2e} (tolerance 1e-8)"


def _truncation():
    p = SystemParams(eta=0.5, delta=3.0, omega_p_mag=0.6)
    change = check_truncation(build_liouvillian_parts(p), p.delta, p.omega_p, 6)
    return True, f"k_max 6 -> 12 changes the k=1 coherence by {change:.2e} (tolerance 1e-8)"


def _refinement():
    worst = 0.0
    for phi in (0.0, np.pi):
        worst = max(worst, check_refinement(SystemParams(eta=0.5, phi_c=phi), Sweep("delta", -10, 10, 801)))
    return True, f"grid halving changes the group index by {worst:.2e} of its peak (tolerance 1e-3)"


def _group_signs():
    vals = []
    for phi in (0.0, np.pi):
        gi = group_index(spectrum(SystemParams(eta=0.5, phi_c=phi), Sweep("delta", -10, 10, 801), "static_full"))
        x, v = np.array(gi).T
        vals.append(v[np.argmin(np.abs(x))])
    return vals[0] < 0 < vals[1], f"ng-1 at zero detuning: {vals[0]:.3e} (phase 0, want < 0), {vals[1]:.3e} (phase pi, want > 0)"


FIG6 = dict(omega_c_mag=10.0, delta_c=-4.1, delta=0.0)
OB_GRID = XGrid(0.0, 120.0, 241)


def _ob_thresholds(mode):
    out = {}
    for eta in (0.0, 0.5, 0.99):
        out[eta] = ob_curve(SystemParams(eta=eta, **FIG6), OBParams(400.0), OB_GRID, mode).threshold_up
    return out


def _ob_turning():
    curve = ob_curve(SystemParams(eta=0.0, **FIG6), OBParams(400.0), OB_GRID, "static")
    n = len(curve.turning_points)
    return n >= 2, f"{n} turning points at x = {', '.join(f'{x:.4f}' for x in curve.turning_points)}"


def _ob_order():
    th = _ob_thresholds("static")
    ok = None not in th.values() and th[0.99] < th[0.5] < th[0.0]
    return ok, "thresholds " + ", ".join(f"eta={k}: {v}" for k, v in th.items()) + " (want decreasing in eta)"


def _ob_r1_order():
    th = _ob_thresholds("r1_only")
    ok = None not in th.values() and th[0.99] > th[0.5] > th[0.0]
    return ok, "R1-only thresholds " + ", ".join(f"eta={k}: {v}" for k, v in th.items()) + " (want increasing in eta)"


def _ob_phase():
    p = SystemParams(eta=0.5, omega_c_mag=10.0, delta_c=-4.1, delta=4.1)
    a = ob_curve(p, OBParams(400.0), OB_GRID, "floquet", refine=False)
    b = ob_curve(p.replace(phi_c=np.pi), OBParams(400.0), OB_GRID, "floquet", refine=False)
    rel = float(np.max(np.abs(a.y - b.y) / np.maximum(np.abs(a.y), 1e-300)))
    return rel <= 1e-9, f"max relative difference between phase 0 and pi curves {rel:.2e} (tolerance 1e-9)"


QUICK: list[tuple[str, Callable]] = [
    ("decomposition-consistency", _decomposition),
    ("trace-conservation", _trace),
    ("conventional-static-equivalence", _conventional),
    ("harmonic-hermiticity-trace-residual", _harmonic_invariants),
    ("static-state-physical", _static_states),
    ("weak-probe-linearity", _linearity),
    ("phase-gauge", _phase_gauge),
    ("closed-form-coherence", _eq9),
    ("phase-invariance-beyond-resonance", _phase_beyond),
    ("phase-dependence-at-resonance", _phase_at_resonance),
]

FULL: list[tuple[str, Callable]] = QUICK + [
    ("oracle-equivalence", _oracle),
    ("rk4-step-halving", _step),
    ("harmonic-truncation", _truncation),
    ("group-index-refinement", _refinement),
    ("group-index-signs", _group_signs),
    ("ob-turning-points", _ob_turning),
    ("ob-threshold-ordering", _ob_order),
    ("ob-r1-threshold-ordering", _ob_r1_order),
    ("ob-phase-invariance-beyond-resonance", _ob_phase),
]


def run_checks(quick: bool = False, progress: Callable[[CheckResult], None] | None = None) -> list[CheckResult]:
    results = []
    for name, fn in QUICK if quick else FULL:
        start = time.perf_counter()
        try:
            ok, detail = fn()
        except Exception as exc:  # a crashing check is a failing check
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        res = CheckResult(name, bool(ok), detail, time.perf_counter() - start)
        results.append(res)
        if progress:
            progress(res)
    return results
