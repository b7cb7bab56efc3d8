"""Exact rational-arithmetic reference for the static steady state.

Built from the operator form of the master equation (commutator plus a
Lindblad dissipator with a cross-decay term) with sympy, independently of the
package's term table and of its longhand equations.  Only the two-photon
resonant (static) problem is covered.
"""

from __future__ import annotations

from functools import lru_cache

import sympy as sp

IDX = [(0, 0), (1, 1), (0, 1), (1, 0), (2, 0), (0, 2), (1, 2), (2, 1)]


def _rat(x):
    return sp.nsimplify(x, rational=True)


def _generator(eta, omega_c, delta_c, g2, g3, a, b):
    """Affine reduced system ``A r = c`` with probe ``a`` and its conjugate ``b`` as symbols."""
    xs = sp.symbols("x0:8")
    rho = sp.zeros(3, 3)
    for x, (i, j) in zip(xs, IDX):
        rho[i, j] = x
    rho[2, 2] = 1 - xs[0] - xs[1]
    h = sp.zeros(3, 3)
    h[1, 1] = h[2, 2] = -delta_c
    h[1, 0], h[0, 1] = -omega_c, -sp.conjugate(omega_c)
    h[2, 0], h[0, 2] = -a, -b
    lower = {2: sp.zeros(3, 3), 3: sp.zeros(3, 3)}
    lower[2][0, 1] = 1
    lower[3][0, 2] = 1
    rates = {(2, 2): g2, (3, 3): g3, (2, 3): eta * sp.sqrt(g2 * g3), (3, 2): eta * sp.sqrt(g2 * g3)}
    drho = -sp.I * (h * rho - rho * h)
    for (i, j), g in rates.items():
        si, sj = lower[i], lower[j].T
        drho += g * (2 * si * rho * sj - sj * si * rho - rho * sj * si)
    f = [sp.expand(drho[i, j]) for i, j in IDX]
    zero = {x: 0 for x in xs}
    amat = sp.Matrix([[sp.diff(fi, x) for x in xs] for fi in f])
    rhs = sp.Matrix([-fi.subs(zero) for fi in f])
    return amat, rhs


@lru_cache(maxsize=None)
def weak_probe_coefficients(eta, omega_c, delta_c=0, g2=1, g3=1):
    """Exact ``(c0, cp, cm)`` with ``rho31 = c0 + cp*omega_p + cm*conj(omega_p) + O(omega_p^2)``.

    Arguments are converted to rationals; ``omega_c`` is real.
    """
    eta, omega_c, delta_c, g2, g3 = (_rat(v) for v in (eta, omega_c, delta_c, g2, g3))
    a, b = sp.symbols("a b")
    amat, rhs = _generator(eta, omega_c, delta_c, g2, g3, a, b)
    at0 = {a: 0, b: 0}
    a0, c0 = amat.subs(at0), rhs.subs(at0)
    r0 = a0.LUsolve(c0)
    out = [sp.nsimplify(sp.simplify(r0[4]))]
    for s in (a, b):
        ds = (rhs.diff(s) - amat.diff(s) * r0).subs(at0)
        r = a0.LUsolve(ds)
        out.append(sp.nsimplify(sp.simplify(r[4])))
    return tuple(out)


@lru_cache(maxsize=None)
def static_determinant(eta, omega_c):
    """Exact determinant of the probe-free static generator (equal unit decay rates)."""
    a, b = sp.symbols("a b")
    amat, _ = _generator(_rat(eta), _rat(omega_c), 0, 1, 1, a, b)
    return sp.nsimplify(amat.subs({a: 0, b: 0}).det())


def to_complex(value) -> complex:
    return complex(sp.N(value, 30))
