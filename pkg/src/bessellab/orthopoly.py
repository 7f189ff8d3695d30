"""Orthonormal polynomials and Christoffel-Darboux kernels for weights
t^nu h(t) on [0, b].

The measure is discretized by a composite quadrature whose first panel is
Gauss-Jacobi with the t^nu factor built in, so endpoint singularities
(-1 < nu < 0) and zeros (nu > 0) cost no accuracy.  The three-term
recurrence is then obtained by Lanczos iteration with full
reorthogonalization on the diagonal operator of the discrete measure;
above moderate degrees 80-bit extended precision is used (switchable via
the BESSELLAB_PRECISION environment variable: "double" or "extended").

Notation: phi_0, phi_1, ... are orthonormal,

    b_{k+1} phi_{k+1}(t) = (t - a_k) phi_k(t) - b_k phi_{k-1}(t),

and the kernels are

    Khat_n(x, y) = sum_{i<n} phi_i(x) phi_i(y)
                 = b_n [phi_n(x) phi_{n-1}(y) - phi_{n-1}(x) phi_n(y)] / (x - y),
    K_n(x, y)    = sqrt(w(x) w(y)) Khat_n(x, y).
"""

from __future__ import annotations

import csv
import dataclasses
import math
import os

import numpy as np
from scipy import linalg as sla
from scipy import special

from .errors import DomainError, PrecisionFailure

__all__ = [
    "Quadrature",
    "weight_quadrature",
    "RecurrenceTable",
    "build_recurrence",
    "brute_force_christoffel",
    "lubinsky_gap",
    "save_recurrence_csv",
]

DEGREE_CAP = 160

# relative |x - y| below which kernels switch from the Christoffel-Darboux
# closed form to the direct sum
NEAR_DIAGONAL = 1e-6

# geometric panel edges (fractions of the support); the first panel is
# Gauss-Jacobi, the rest Gauss-Legendre
_PANEL_EDGES = (0.0, 1.0 / 16.0, 1.0 / 8.0, 1.0 / 4.0, 1.0 / 2.0, 1.0)


@dataclasses.dataclass
class Quadrature:
    """Nodes and masses discretizing the measure t^nu dt on [0, support]."""

    nodes: np.ndarray
    weights: np.ndarray
    endpoint_exponent: float
    support: float

    def moment(self, k):
        """Discrete moment sum W_i t_i^k (approximates support^(k+nu+1)/(k+nu+1))."""
        return float(np.sum(self.weights * self.nodes**k))


def weight_quadrature(nu, support=1.0, n_panel=120):
    """Composite quadrature for the measure t^nu dt on [0, support]."""
    nu = float(nu)
    if nu <= -1.0:
        raise DomainError("endpoint exponent must be > -1")
    support = float(support)
    if not (support > 0) or not math.isfinite(support):
        raise DomainError("support must be positive and finite")
    n_panel = int(n_panel)

    nodes, masses = [], []
    # Gauss-Jacobi on [0, c]: t = c (1+x)/2 picks up (c/2)^(nu+1)
    c = support * _PANEL_EDGES[1]
    xj, wj = special.roots_jacobi(n_panel, 0.0, nu)
    nodes.append(c * 0.5 * (1.0 + xj))
    masses.append(wj * (0.5 * c) ** (nu + 1.0))
    # Gauss-Legendre elsewhere, t^nu folded into the mass
    xl, wl = np.polynomial.legendre.leggauss(n_panel)
    for a, b in zip(_PANEL_EDGES[1:-1], _PANEL_EDGES[2:]):
        lo, hi = support * a, support * b
        t = 0.5 * (lo + hi) + 0.5 * (hi - lo) * xl
        nodes.append(t)
        masses.append(0.5 * (hi - lo) * wl * t**nu)
    nodes = np.concatenate(nodes)
    masses = np.concatenate(masses)
    if np.any(nodes <= 0) or np.any(nodes >= support) or np.any(masses <= 0):
        raise PrecisionFailure("quadrature produced out-of-range nodes or masses")
    return Quadrature(nodes=nodes, weights=masses, endpoint_exponent=nu,
                      support=support)


def _pick_dtype(n_max):
    tier = os.environ.get("BESSELLAB_PRECISION", "auto").lower()
    extended = np.longdouble if np.finfo(np.longdouble).eps < 1e-18 else np.float64
    if tier == "double":
        return np.float64
    if tier == "extended":
        return extended
    return extended if n_max > 60 else np.float64


@dataclasses.dataclass
class RecurrenceTable:
    """Recurrence coefficients of the orthonormal polynomials of a weight.

    ``alpha[k]`` and ``beta[k]`` follow the three-term recurrence in the
    module docstring (beta[0] is unused and kept at 0).  ``log_mu0`` is the
    log of the total mass, so phi_0 = exp(-log_mu0 / 2).
    """

    alpha: np.ndarray
    beta: np.ndarray
    log_mu0: float
    n_max: int
    nu: float
    weight: object
    quadrature: Quadrature
    scaled_masses: np.ndarray
    mass_shift: float
    dtype: object

    # -- evaluation --------------------------------------------------------

    def _phi_unnormalized(self, n, t, dtype=np.float64):
        """Rows 0..n of the recurrence with phi_0 = 1 (no mass normalization)."""
        if not 1 <= n <= self.n_max:
            raise DomainError(f"degree n must be in [1, {self.n_max}]")
        t = np.atleast_1d(np.asarray(t, dtype=dtype))
        a = self.alpha.astype(dtype)
        b = self.beta.astype(dtype)
        out = np.empty((n + 1, t.size), dtype=dtype)
        out[0] = 1.0
        out[1] = (t - a[0]) / b[1]
        for k in range(1, n):
            out[k + 1] = ((t - a[k]) * out[k] - b[k] * out[k - 1]) / b[k + 1]
        return out

    def phi(self, j, t):
        """Value of the orthonormal polynomial phi_j at t."""
        j = int(j)
        if j == 0:
            t = np.asarray(t, dtype=float)
            return _scalar(np.full(np.shape(t), math.exp(-0.5 * self.log_mu0)))
        tab = self._phi_unnormalized(j, t)
        out = tab[j].astype(float) * math.exp(-0.5 * self.log_mu0)
        return _scalar(out.reshape(np.shape(np.asarray(t))))

    def phi_table(self, n, t):
        """Array of phi_0..phi_n values at the points t, shape (n+1, len(t))."""
        tab = self._phi_unnormalized(n, t).astype(float)
        return tab * math.exp(-0.5 * self.log_mu0)

    # -- kernels -----------------------------------------------------------

    def _kernel_hat_core(self, n, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        shape = np.broadcast_shapes(x.shape, y.shape)
        x, y = np.broadcast_arrays(x, y)
        xf = np.atleast_1d(x).ravel()
        yf = np.atleast_1d(y).ravel()
        px = self._phi_unnormalized(n, xf)
        py = self._phi_unnormalized(n, yf)
        direct = np.einsum("ij,ij->j", px[:n], py[:n])
        bn = float(self.beta[n])
        with np.errstate(divide="ignore", invalid="ignore"):
            cd = bn * (px[n] * py[n - 1] - px[n - 1] * py[n]) / (xf - yf)
        near = np.abs(xf - yf) <= NEAR_DIAGONAL * np.maximum(
            1.0, np.maximum(np.abs(xf), np.abs(yf)))
        out = np.where(near, direct, cd) * math.exp(-self.log_mu0)
        return out.reshape(shape)

    def kernel_hat(self, n, x, y):
        """Khat_n(x, y); Christoffel-Darboux form away from the diagonal,
        direct sum within relative distance NEAR_DIAGONAL of it."""
        return _scalar(self._kernel_hat_core(n, x, y))

    def kernel_hat_grid(self, n, xs, ys):
        """Khat_n on the product grid xs x ys, shape (len(xs), len(ys))."""
        xs = np.asarray(xs, dtype=float)
        ys = np.asarray(ys, dtype=float)
        return self._kernel_hat_core(n, xs[:, None], ys[None, :])

    def _sqrt_weight_factor(self, x, y):
        lwx = np.asarray(self.weight.log_density(x), dtype=float)
        lwy = np.asarray(self.weight.log_density(y), dtype=float)
        if not (np.all(np.isfinite(lwx)) and np.all(np.isfinite(lwy))):
            raise DomainError(
                "log-weight is infinite at an endpoint; evaluate the normalized "
                "kernel at interior points")
        return np.exp(0.5 * (lwx + lwy))

    def kernel_norm(self, n, x, y):
        """K_n(x, y) = exp((log w(x) + log w(y))/2) * Khat_n(x, y)."""
        return _scalar(self._sqrt_weight_factor(x, y) * self._kernel_hat_core(n, x, y))

    def kernel_norm_grid(self, n, xs, ys):
        xs = np.asarray(xs, dtype=float)
        ys = np.asarray(ys, dtype=float)
        fac = self._sqrt_weight_factor(xs[:, None], ys[None, :])
        return fac * self._kernel_hat_core(n, xs[:, None], ys[None, :])

    def christoffel(self, n, x):
        """lambda_n(x) = 1 / Khat_n(x, x)."""
        return _scalar(1.0 / self._kernel_hat_core(n, x, x))

    # -- diagnostics -------------------------------------------------------

    def gram_residual(self, n=None, dtype=None):
        """max |<phi_i, phi_j> - delta_ij| over i, j <= n on the discrete measure."""
        n = self.n_max if n is None else int(n)
        dtype = dtype or self.dtype
        tab = self._phi_unnormalized(n, self.quadrature.nodes, dtype=dtype)
        m = self.scaled_masses.astype(dtype)
        gram = (tab * m) @ tab.T / m.sum()
        return float(np.max(np.abs(gram - np.eye(n + 1, dtype=dtype))))


def _scalar(out):
    out = np.asarray(out)
    return out[()] if out.ndim == 0 else out


def build_recurrence(weight, n_max, n_panel=None, dtype=None, degree_cap=DEGREE_CAP):
    """Recurrence table of the orthonormal polynomials of ``weight``.

    ``weight`` must expose ``nu``, ``quad_support`` and ``log_smooth``.
    Raises PrecisionFailure (naming the degree) if the discrete measure
    loses positive definiteness.
    """
    n_max = int(n_max)
    if n_max < 1:
        raise DomainError("n_max must be >= 1")
    if n_max > degree_cap:
        raise DomainError(
            f"n_max={n_max} exceeds the degree cap {degree_cap}; raise degree_cap "
            "explicitly if this is intended")
    if n_panel is None:
        n_panel = max(120, n_max + 40)
    quad = weight_quadrature(weight.nu, weight.quad_support, n_panel=n_panel)

    log_masses = np.log(quad.weights) + np.asarray(
        weight.log_smooth(quad.nodes), dtype=float)
    shift = float(np.max(log_masses))
    masses = np.exp(log_masses - shift)

    dt = dtype or _pick_dtype(n_max)
    t = quad.nodes.astype(dt)
    m = masses.astype(dt)

    v = np.sqrt(m)
    nrm = np.sqrt(v @ v)
    v = v / nrm
    basis = np.empty((n_max + 1, t.size), dtype=dt)
    basis[0] = v
    alpha = np.zeros(n_max, dtype=dt)
    beta = np.zeros(n_max + 1, dtype=dt)
    floor = 100 * np.finfo(dt).eps * float(quad.support)

    for k in range(n_max):
        w = t * basis[k]
        alpha[k] = w @ basis[k]
        w = w - alpha[k] * basis[k]
        if k:
            w = w - beta[k] * basis[k - 1]
        for _ in range(2):  # full reorthogonalization, two passes
            w = w - basis[:k + 1].T @ (basis[:k + 1] @ w)
        b = np.sqrt(w @ w)
        if not (b > floor):
            raise PrecisionFailure(
                f"recurrence construction lost positivity at degree {k + 1} "
                f"(beta={float(b):.3e}); reduce the degree or raise precision")
        beta[k + 1] = b
        basis[k + 1] = w / b

    log_mu0 = shift + 2.0 * math.log(float(nrm))
    return RecurrenceTable(alpha=alpha, beta=beta, log_mu0=log_mu0, n_max=n_max,
                           nu=float(weight.nu), weight=weight, quadrature=quad,
                           scaled_masses=masses, mass_shift=shift, dtype=dt)


def brute_force_christoffel(weight, n, x, n_panel=200):
    """Christoffel function by the moment-matrix route, for cross-checks.

    lambda_n(x) = 1 / (v(x)^T Minv v(x)) with M the (n x n) Hankel moment
    matrix of the weight and v(x) the monomial vector.  Only sensible for
    small n; the moment matrix conditioning is checked and the computation
    refused beyond ~1e13.
    """
    n = int(n)
    if not 1 <= n <= 8:
        raise DomainError("brute-force route supports 1 <= n <= 8 only")
    quad = weight_quadrature(weight.nu, weight.quad_support, n_panel=n_panel)
    log_masses = np.log(quad.weights) + np.asarray(
        weight.log_smooth(quad.nodes), dtype=float)
    shift = float(np.max(log_masses))
    masses = np.exp(log_masses - shift)

    # The Christoffel value is invariant under any invertible change of
    # polynomial basis, so work in powers of t/sigma with sigma the mean of
    # the measure: for weights concentrated near 0 this cuts the Hankel
    # condition number by sigma^{-2(n-1)}.
    m0 = float(masses.sum())
    sigma = float((quad.nodes * masses).sum()) / m0
    if not sigma > 0:
        sigma = 1.0
    powers = (quad.nodes[None, :] / sigma) ** np.arange(2 * n - 1)[:, None]
    moments = powers @ masses
    M = np.empty((n, n))
    for i in range(n):
        M[i] = moments[i:i + n]
    cond = np.linalg.cond(M)
    if cond > 1e13:
        raise PrecisionFailure(
            f"moment matrix too ill-conditioned (cond ~ {cond:.2e}); "
            "use the recurrence route instead")
    v = (float(x) / sigma) ** np.arange(n)
    try:
        sol = sla.solve(M, v, assume_a="pos")
        # one refinement pass with an extended-precision residual; cheap and
        # buys back the digits the factorization loses at cond ~ 1e7..1e10
        r = v - (M.astype(np.longdouble) @ sol.astype(np.longdouble))
        sol = sol + sla.solve(M, r.astype(float), assume_a="pos")
    except np.linalg.LinAlgError as exc:
        raise PrecisionFailure(f"moment matrix not numerically SPD: {exc}") from exc
    return math.exp(shift) / float(v @ sol)


def lubinsky_gap(tab_small, tab_big, n, x, y):
    """(lhs, rhs) of the kernel comparison inequality for ordered weights.

    ``tab_small`` must belong to the pointwise-smaller weight (which has
    the larger kernel).  The inequality is

        (Khat_a(x,y) - Khat_b(x,y))^2 <= Khat_a(y,y) (Khat_a(x,x) - Khat_b(x,x)),

    returned as a raw (lhs, rhs) pair so callers can inspect slack.
    """
    ka_xy = tab_small.kernel_hat(n, x, y)
    kb_xy = tab_big.kernel_hat(n, x, y)
    ka_yy = tab_small.kernel_hat(n, y, y)
    ka_xx = tab_small.kernel_hat(n, x, x)
    kb_xx = tab_big.kernel_hat(n, x, x)
    lhs = (ka_xy - kb_xy) ** 2
    rhs = ka_yy * (ka_xx - kb_xx)
    return lhs, rhs


def save_recurrence_csv(tab, path):
    """Write rows (k, alpha_k, beta_k); the beta_0 slot carries the total
    mass mu0, following the classical convention for recurrence tables."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["k", "alpha", "beta"])
        for k in range(tab.n_max):
            b = math.exp(tab.log_mu0) if k == 0 else float(tab.beta[k])
            writer.writerow([k, f"{float(tab.alpha[k]):.17g}", f"{b:.17g}"])
