"""Equilibrium measures for the deformed hard-edge field and the attached
complex-analytic maps.

For gamma >= 1 the equilibrium measure mu_gamma of the field
V_gamma(t) = V(t/gamma) on [0, 1] has the closed-form density

    rho(s) = (1/sqrt(gamma s)) [ 1/2 + (1/pi) sqrt((gamma-1)/(1-s))
                                 - (1/pi) arctan sqrt((gamma-1)/(1-s)) ],

with inverse-square-root edges at both ends.  At gamma = 1 this reduces to
1/(2 sqrt s).  The scaling constant is

    c_gamma = pi^2 gamma / (pi + 2 (sqrt(gamma-1) - arctan sqrt(gamma-1)))^2.

The maps g (log-potential transform), phi (the cut [0, oo)), and
f = -phi^2/4 (conformal near 0, f'(0) = pi^2/(4 c_gamma)) are evaluated
with explicit boundary values on the cut; the matrix N solves the global
jump problem N_+ = N_- [[0, x^nu], [-x^-nu, 0]] on (0, 1) with N(oo) = I.

Potential integrals use adaptive quadrature after substitutions that
remove the inverse-square-root endpoint singularities and the log factor's
kink.
"""

from __future__ import annotations

import cmath
import math

import numpy as np
from scipy import integrate

from .errors import DomainError

__all__ = [
    "EquilibriumMeasure",
    "c_gamma",
    "density",
    "cdf",
    "edge_coeff_zero",
    "edge_coeff_one",
    "mass_error",
    "log_potential",
    "variational_check",
    "reference_potential",
    "g_map",
    "g_boundary",
    "phi_map",
    "phi_boundary",
    "f_map",
    "global_parametrix",
    "lens_sign_check",
    "diagnostics",
]

_QUAD = {"epsabs": 1e-13, "epsrel": 1e-13, "limit": 300}


def _check_gamma(gamma):
    gamma = float(gamma)
    if not math.isfinite(gamma) or gamma < 1.0:
        raise DomainError("gamma must be >= 1")
    return gamma


def c_gamma(gamma):
    """Scaling constant of the hard-edge limit; c_1 = 1."""
    gamma = _check_gamma(gamma)
    r = math.sqrt(gamma - 1.0)
    return math.pi**2 * gamma / (math.pi + 2.0 * (r - math.atan(r))) ** 2


def _edge0(gamma, s):
    # density * sqrt(s): analytic on [0, 1)
    with np.errstate(divide="ignore"):
        q = np.sqrt((gamma - 1.0) / (1.0 - s))
    return (0.5 + (q - np.arctan(q)) / math.pi) / math.sqrt(gamma)


def _edge1(gamma, s):
    # density * sqrt(1-s): analytic on (0, 1]
    om = 1.0 - s
    q = np.sqrt(np.maximum(om, 0.0))
    r = math.sqrt(gamma - 1.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        atan_term = np.where(om > 0, np.arctan(r / np.where(om > 0, q, 1.0)), math.pi / 2 if gamma > 1 else 0.0)
    return (0.5 * q + (r - q * atan_term) / math.pi) / np.sqrt(gamma * s)


def density(gamma, s):
    """Equilibrium density on the open interval (0, 1)."""
    gamma = _check_gamma(gamma)
    s = np.asarray(s, dtype=float)
    if np.any(s <= 0) or np.any(s >= 1):
        raise DomainError("density is evaluated on the open interval (0, 1)")
    out = _edge0(gamma, s) / np.sqrt(s)
    return out[()] if out.ndim == 0 else out


def cdf(gamma, x):
    """mu_gamma([0, x]) in closed form, x in [0, 1]."""
    gamma = _check_gamma(gamma)
    x = np.asarray(x, dtype=float)
    if np.any(x < 0) or np.any(x > 1):
        raise DomainError("cdf is defined on [0, 1]")
    r = math.sqrt((gamma - 1.0) / gamma)
    sx = np.sqrt(x / gamma)
    with np.errstate(divide="ignore", invalid="ignore"):
        inner = np.where(x < 1.0, x / np.maximum(1.0 - x, 1e-300), np.inf)
        t1 = np.arctan(r * np.sqrt(inner))
        t2 = np.arctan(math.sqrt(gamma - 1.0) / np.sqrt(np.maximum(1.0 - x, 1e-300)))
        t2 = np.where(x < 1.0, t2, math.pi / 2 if gamma > 1 else 0.0)
    out = sx + (2.0 / math.pi) * t1 - (2.0 / math.pi) * sx * t2
    out = np.where(x >= 1.0, 1.0, out)
    return out[()] if out.ndim == 0 else out


def edge_coeff_zero(gamma):
    """lim_{s->0} density * sqrt(s); equals 1 / (2 sqrt(c_gamma))."""
    gamma = _check_gamma(gamma)
    return float(_edge0(gamma, 0.0))


def edge_coeff_one(gamma):
    """lim_{s->1} density * sqrt(1-s) = sqrt((gamma-1)/gamma) / pi."""
    gamma = _check_gamma(gamma)
    return math.sqrt((gamma - 1.0) / gamma) / math.pi


class EquilibriumMeasure:
    """Bundle of the closed forms for one gamma >= 1."""

    def __init__(self, gamma):
        self.gamma = _check_gamma(gamma)
        self.c = c_gamma(self.gamma)
        self.edge_zero = edge_coeff_zero(self.gamma)
        self.edge_one = edge_coeff_one(self.gamma)

    def density(self, s):
        return density(self.gamma, s)

    def cdf(self, x):
        return cdf(self.gamma, x)


# ---------------------------------------------------------------------------
# potential integrals


def mass_error(gamma):
    """|integral of the density - 1|, by substitution-split quadrature."""
    gamma = _check_gamma(gamma)
    i0, _ = integrate.quad(lambda v: 2.0 * _edge0(gamma, v * v), 0.0,
                           math.sqrt(0.5), **_QUAD)
    i1, _ = integrate.quad(lambda w: 2.0 * _edge1(gamma, 1.0 - w * w), 0.0,
                           math.sqrt(0.5), **_QUAD)
    return abs(i0 + i1 - 1.0)


def log_potential(gamma, x):
    """integral of log|x - s| d mu_gamma(s), x in (0, 1).

    Substitutions s = v^2, s = x -+ u^2 and 1 - s = w^2 remove the edge
    singularities and the log kink; each piece is then adaptively
    integrated.
    """
    gamma = _check_gamma(gamma)
    x = float(x)
    if not 0.0 < x < 1.0:
        raise DomainError("log_potential is evaluated on the open interval (0, 1)")
    rho = lambda s: _edge0(gamma, s) / np.sqrt(s)
    pa, _ = integrate.quad(lambda v: 2.0 * _edge0(gamma, v * v) * np.log(x - v * v),
                           0.0, math.sqrt(0.5 * x), **_QUAD)
    pb, _ = integrate.quad(lambda u: 4.0 * u * np.log(u) * rho(x - u * u),
                           0.0, math.sqrt(0.5 * x), **_QUAD)
    pc, _ = integrate.quad(lambda u: 4.0 * u * np.log(u) * rho(x + u * u),
                           0.0, math.sqrt(0.5 * (1.0 - x)), **_QUAD)
    pd, _ = integrate.quad(lambda w: 2.0 * _edge1(gamma, 1.0 - w * w)
                           * np.log(1.0 - w * w - x),
                           0.0, math.sqrt(0.5 * (1.0 - x)), **_QUAD)
    return pa + pb + pc + pd


def variational_check(gamma, grid=None, n_grid=50):
    """(ell_estimate, max_deviation) of 2 U(x) - V(x/gamma) over a grid.

    The equilibrium property makes the residual constant in x; the mean is
    reported as the Lagrange constant estimate and the worst pointwise
    departure from the mean as the deviation.
    """
    from .weights import field_V

    gamma = _check_gamma(gamma)
    if grid is None:
        grid = np.linspace(0.0, 1.0, n_grid + 2)[1:-1]
    grid = np.asarray(grid, dtype=float)
    resid = np.array([2.0 * log_potential(gamma, x) - float(field_V(x / gamma))
                      for x in grid])
    ell = float(np.mean(resid))
    return ell, float(np.max(np.abs(resid - ell)))


def reference_potential(gamma, x):
    """integral of log|x - s| dm_gamma(s) for the un-balayaged measure
    m_gamma with density 1/(2 sqrt(gamma s)) on [0, gamma], x in (0, gamma)."""
    gamma = _check_gamma(gamma)
    x = float(x)
    if not 0.0 < x < gamma:
        raise DomainError("reference_potential needs x in (0, gamma)")
    rho = lambda s: 0.5 / np.sqrt(gamma * s)
    pa, _ = integrate.quad(lambda v: np.log(x - v * v) / math.sqrt(gamma),
                           0.0, math.sqrt(0.5 * x), **_QUAD)
    pb, _ = integrate.quad(lambda u: 4.0 * u * np.log(u) * rho(x - u * u),
                           0.0, math.sqrt(0.5 * x), **_QUAD)
    pc, _ = integrate.quad(lambda u: 4.0 * u * np.log(u) * rho(x + u * u),
                           0.0, math.sqrt(0.5 * (gamma - x)), **_QUAD)
    pd, _ = integrate.quad(lambda s: np.log(s - x) * rho(s),
                           0.5 * (gamma + x), gamma, **_QUAD)
    return pa + pb + pc + pd


# ---------------------------------------------------------------------------
# complex maps


def g_map(gamma, z):
    """g(z) = integral of log(z - s) d mu_gamma(s), z off (-oo, 1]."""
    gamma = _check_gamma(gamma)
    z = complex(z)
    if z.imag == 0.0 and z.real <= 1.0:
        raise DomainError("z lies on the cut; use g_boundary")
    pts = []
    if 0.0 < z.real < 0.5 and abs(z.imag) < 0.1:
        pts.append(math.sqrt(z.real))
    i0 = integrate.quad(lambda v: 2.0 * _edge0(gamma, v * v) * np.log(z - v * v),
                        0.0, math.sqrt(0.5), complex_func=True,
                        points=pts or None, **_QUAD)[0]
    pts = []
    if 0.5 < z.real < 1.0 and abs(z.imag) < 0.1:
        pts.append(math.sqrt(1.0 - z.real))
    i1 = integrate.quad(lambda w: 2.0 * _edge1(gamma, 1.0 - w * w)
                        * np.log(z - 1.0 + w * w),
                        0.0, math.sqrt(0.5), complex_func=True,
                        points=pts or None, **_QUAD)[0]
    return i0 + i1


def g_boundary(gamma, x, side):
    """Boundary value g_+-(x) on the cut: x in (0, 1) or x <= 0."""
    gamma = _check_gamma(gamma)
    x = float(x)
    sgn = _side_sign(side)
    if 0.0 < x < 1.0:
        return log_potential(gamma, x) + sgn * 1j * math.pi * (1.0 - float(cdf(gamma, x)))
    if x <= 0.0:
        # log|x-s| = log(s-x) is smooth except at the s=0 edge when x=0
        i0 = integrate.quad(lambda v: 2.0 * _edge0(gamma, v * v) * np.log(v * v - x),
                            0.0, math.sqrt(0.5), **_QUAD)[0]
        i1 = integrate.quad(lambda w: 2.0 * _edge1(gamma, 1.0 - w * w)
                            * np.log(1.0 - w * w - x),
                            0.0, math.sqrt(0.5), **_QUAD)[0]
        return i0 + i1 + sgn * 1j * math.pi
    raise DomainError("boundary values exist for x <= 0 or x in (0, 1)")


def _side_sign(side):
    if side in (1, +1, "+", "plus", "upper"):
        return 1.0
    if side in (-1, "-", "minus", "lower"):
        return -1.0
    raise DomainError(f"side must be '+' or '-', got {side!r}")


def _phi_upper(gamma, z):
    # analytic continuation from the upper half-plane, principal branches
    sg = cmath.sqrt(gamma)
    s1z = cmath.sqrt(1.0 - z)
    sz = cmath.sqrt(z)
    sg1 = cmath.sqrt(gamma - 1.0)
    t1 = cmath.log((sg * s1z + 1j * sz * sg1) / (sg * s1z - 1j * sz * sg1))
    t2 = cmath.sqrt(z / gamma) * cmath.log((sg1 + 1j * s1z) / (sg1 - 1j * s1z))
    return t1 + t2


def phi_map(gamma, z, side=None):
    """The map phi_gamma, analytic off the cut [0, oo).

    For real z >= 0 a ``side`` is required; on (0, 1) the boundary values
    are purely imaginary, phi_+- = +- i pi cdf.  Near 0,
    phi(z) ~ +- (i pi / sqrt(c_gamma)) sqrt(z).
    """
    gamma = _check_gamma(gamma)
    z = complex(z)
    if z.imag > 0.0:
        return _phi_upper(gamma, z)
    if z.imag < 0.0:
        return _phi_upper(gamma, z.conjugate()).conjugate()
    x = z.real
    if x < 0.0:
        return _phi_upper(gamma, complex(x, 0.0))
    if side is None:
        raise DomainError("real z >= 0 lies on the cut of phi; pass side='+'/'-'")
    return phi_boundary(gamma, x, side)


def phi_boundary(gamma, x, side):
    """Exact boundary values of phi on [0, 1)."""
    gamma = _check_gamma(gamma)
    x = float(x)
    if not 0.0 <= x < 1.0:
        raise DomainError("phi boundary values are provided on [0, 1)")
    sgn = _side_sign(side)
    if gamma == 1.0:
        val = math.pi * math.sqrt(x)
    else:
        a1 = math.atan(math.sqrt((gamma - 1.0) * x / (gamma * (1.0 - x))))
        a2 = math.atan(math.sqrt((1.0 - x) / (gamma - 1.0)))
        val = 2.0 * (a1 + math.sqrt(x / gamma) * a2)
    return sgn * 1j * val


def f_map(gamma, z):
    """f = -phi^2 / 4, conformal on the unit disk; f'(0) = pi^2/(4 c_gamma)."""
    gamma = _check_gamma(gamma)
    z = complex(z)
    if abs(z) >= 1.0:
        raise DomainError("f is defined on the open unit disk")
    if z.imag == 0.0 and z.real >= 0.0:
        # side-independent on the cut: phi_+- = +-i pi F
        phi = phi_boundary(gamma, z.real, "+")
    else:
        phi = phi_map(gamma, z)
    val = -0.25 * phi * phi
    if z.imag == 0.0:
        return complex(val.real, 0.0)
    return val


# ---------------------------------------------------------------------------
# global parametrix


def _parametrix_from_parts(nu, a, sqrt_ratio):
    ai = 1.0 / a
    m = np.array([[0.5 * (a + ai), (a - ai) / 2j],
                  [-(a - ai) / 2j, 0.5 * (a + ai)]], dtype=complex)
    lam = 1.0 + sqrt_ratio
    left = np.diag([2.0 ** -nu, 2.0 ** nu]).astype(complex)
    right = np.diag([lam ** nu, lam ** -nu]).astype(complex)
    return left @ m @ right


def global_parametrix(nu, z, side=None):
    """The 2x2 matrix N(z) solving the jump N_+ = N_- [[0, x^nu], [-x^-nu, 0]]
    on (0, 1), analytic elsewhere, N(oo) = I, det N = 1."""
    from . import specfun

    nu = specfun.BesselOrder(nu).nu
    z = complex(z)
    on_cut = z.imag == 0.0 and 0.0 <= z.real <= 1.0
    if not on_cut:
        ratio = (z - 1.0) / z
        return _parametrix_from_parts(nu, ratio ** 0.25, np.sqrt(complex(ratio)))
    if side is None:
        raise DomainError("z on [0, 1] needs side='+'/'-'")
    sgn = _side_sign(side)
    x = z.real
    if x in (0.0, 1.0):
        raise DomainError("the parametrix is singular at the endpoints 0 and 1")
    mag = ((1.0 - x) / x) ** 0.25
    a = mag * cmath.exp(sgn * 1j * math.pi / 4.0)
    sqrt_ratio = sgn * 1j * math.sqrt((1.0 - x) / x)
    return _parametrix_from_parts(nu, a, sqrt_ratio)


def lens_sign_check(gamma, re_grid=None, im_grid=None):
    """Diagnostics for Re phi < 0 off the cut near (0, 1).

    Returns a dict with the maximum of Re phi over the sampled lens points
    (strictly negative when the lens opening is valid), the worst
    conjugate-symmetry defect, and the largest |Re phi| on the cut itself.
    """
    gamma = _check_gamma(gamma)
    if re_grid is None:
        re_grid = np.linspace(0.05, 0.95, 19)
    if im_grid is None:
        im_grid = np.concatenate([np.linspace(0.01, 0.2, 8),
                                  -np.linspace(0.01, 0.2, 8)])
    worst_re = -np.inf
    worst_sym = 0.0
    for xr in re_grid:
        for xi in im_grid:
            val = phi_map(gamma, complex(xr, xi))
            worst_re = max(worst_re, val.real)
            sym = abs(phi_map(gamma, complex(xr, -xi)) - val.conjugate())
            worst_sym = max(worst_sym, sym)
    on_cut = max(abs(phi_boundary(gamma, x, "+").real) for x in re_grid)
    return {"gamma": gamma, "max_re_phi": float(worst_re),
            "conjugate_defect": float(worst_sym), "max_re_on_cut": float(on_cut)}


def diagnostics(gamma, n_grid=50):
    """JSON-ready equilibrium diagnostics for one gamma."""
    gamma = _check_gamma(gamma)
    ell, dev = variational_check(gamma, n_grid=n_grid)
    return {
        "gamma": gamma,
        "mass_error": mass_error(gamma),
        "ell_estimate": ell,
        "variational_deviation": dev,
        "edge_coefficients": {"zero": edge_coeff_zero(gamma),
                              "one": edge_coeff_one(gamma)},
        "c_gamma": c_gamma(gamma),
    }
