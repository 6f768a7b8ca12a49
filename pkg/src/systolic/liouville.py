"""Exact solutions of Liouville's curvature equation and their verification.

For a metric f^2 (dx^2 + dy^2) the Gaussian curvature satisfies
K = -lap(log f) / f^2, equivalently -f*lap(f) + |grad f|^2 = K f^4.  In the
rotationally invariant case the flat Laplacian reduces to the radial
operator T = d^2/dr^2 + (1/r) d/dr, which the substitutions zeta = r^2 and
zeta = e^t turn into 4 (d/dzeta)(zeta d/dzeta) and (4/zeta) d^2/dt^2.

Two exact families are provided: the rotationally invariant factor
f0(r) = 1 / (1 + (alpha/4) r^2) with constant curvature alpha, and the
curvature +4 family |a'(z)| / (1 + |a(z)|^2) built from a holomorphic a.
In the zeta variable the reciprocal phi = 1/f of a constant-curvature
factor is linear: phi(zeta) = 1 + (K/4) zeta.

Radial profiles are sampled at cell-centered nodes so the 1/r term is
always finite.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .fields import (ConformalMetric, ScalarField, flat_laplacian,
                     gradient_squared, patch_curvature)

__all__ = [
    "PolarProfile", "RiemannProfile", "HolomorphicSolution", "DiskPatch",
    "InvalidDomainError", "InsufficientResolutionError",
    "polar_laplacian", "riemann_profile", "liouville_residual_cartesian",
    "holomorphic_factor", "constant_curvature_error", "zeta_form",
    "zeta_variance", "t_variance", "linear_phi", "curvature_from_reciprocal",
    "t_operator_check", "TOperatorReport", "variance_sweep_experiment",
    "SweepRow",
]


class InvalidDomainError(ValueError):
    """Profile domain extends past the blow-up radius of the factor."""


class InsufficientResolutionError(ValueError):
    """Too few sample nodes in the requested window."""


@dataclass(frozen=True)
class PolarProfile:
    """Radial samples f(r_i) at cell-centered nodes r_i = (i+1/2)*rmax/n."""

    rmax: float
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        vals = np.ascontiguousarray(self.values, dtype=float)
        if vals.ndim != 1 or vals.size < 8:
            raise ValueError("profile needs at least 8 radial samples")
        if not np.all(np.isfinite(vals)):
            raise ValueError("all samples must be finite")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @property
    def n(self) -> int:
        return self.values.size

    @property
    def r(self) -> np.ndarray:
        return (np.arange(self.n) + 0.5) * (self.rmax / self.n)

    @property
    def dr(self) -> float:
        return self.rmax / self.n


@dataclass(frozen=True)
class RiemannProfile:
    """The rotationally invariant constant-curvature factor 1/(1+(a/4)r^2)."""

    alpha: float

    @property
    def max_radius(self) -> float:
        """Blow-up radius: finite only for negative curvature."""
        if self.alpha >= 0:
            return math.inf
        return math.sqrt(-4.0 / self.alpha)

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        return 1.0 / (1.0 + (self.alpha / 4.0) * r * r)


def riemann_profile(alpha: float, rmax: float, n: int) -> PolarProfile:
    """Sample the constant-curvature-alpha factor on [0, rmax]."""
    prof = RiemannProfile(float(alpha))
    if rmax >= prof.max_radius:
        raise InvalidDomainError(
            f"rmax={rmax} reaches the blow-up radius {prof.max_radius} "
            f"for alpha={alpha}")
    r = (np.arange(n) + 0.5) * (rmax / n)
    return PolarProfile(rmax, prof(r))


def polar_laplacian(profile: PolarProfile) -> PolarProfile:
    """Radial flat Laplacian f'' + f'/r of a rotationally invariant field.

    Central differences at interior nodes, one-sided second-order stencils
    at the two ends.
    """
    f = profile.values
    r = profile.r
    dr = profile.dr
    fp = np.empty_like(f)
    fpp = np.empty_like(f)
    fp[1:-1] = (f[2:] - f[:-2]) / (2 * dr)
    fpp[1:-1] = (f[2:] - 2 * f[1:-1] + f[:-2]) / dr**2
    fp[0] = (-3 * f[0] + 4 * f[1] - f[2]) / (2 * dr)
    fp[-1] = (3 * f[-1] - 4 * f[-2] + f[-3]) / (2 * dr)
    fpp[0] = (2 * f[0] - 5 * f[1] + 4 * f[2] - f[3]) / dr**2
    fpp[-1] = (2 * f[-1] - 5 * f[-2] + 4 * f[-3] - f[-4]) / dr**2
    return PolarProfile(profile.rmax, fpp + fp / r)


def liouville_residual_cartesian(metric: ConformalMetric,
                                 K: ScalarField) -> ScalarField:
    """Sample-wise residual -f*lap(f) + |grad f|^2 - K*f^4.

    Vanishes to O(h^2) exactly when K is the Gaussian curvature of the
    metric f^2*ds^2.
    """
    f = metric.values
    lap = flat_laplacian(metric.f).values
    gsq = gradient_squared(metric.f).values
    return ScalarField(metric.lattice, -f * lap + gsq - K.values * f**4)


# ---------------------------------------------------------------------------
# holomorphic constant-curvature family


@dataclass(frozen=True)
class HolomorphicSolution:
    """Curvature +4 factor |a'(z)| / (1 + |a(z)|^2) for a polynomial a."""

    coeffs: np.ndarray = field(repr=True)  # ascending powers, complex

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.coeffs, dtype=complex))
        if c.size < 2 or np.all(c[1:] == 0):
            raise ValueError("a(z) must have degree >= 1 (a' not identically 0)")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def degree(self) -> int:
        nz = np.nonzero(self.coeffs)[0]
        return int(nz[-1]) if nz.size else 0

    def a(self, z):
        return np.polyval(self.coeffs[::-1], z)

    def a_prime(self, z):
        dcoeffs = self.coeffs[1:] * np.arange(1, self.coeffs.size)
        return np.polyval(dcoeffs[::-1], z)

    def factor(self, z):
        """The conformal factor at complex points z."""
        return np.abs(self.a_prime(z)) / (1.0 + np.abs(self.a(z)) ** 2)

    def critical_points(self) -> np.ndarray:
        """Zeros of a' (where the factor degenerates)."""
        dcoeffs = self.coeffs[1:] * np.arange(1, self.coeffs.size)
        nz = np.nonzero(dcoeffs)[0]
        dcoeffs = dcoeffs[:nz[-1] + 1]
        if dcoeffs.size == 1:
            return np.empty(0, dtype=complex)
        return np.roots(dcoeffs[::-1])


@dataclass(frozen=True)
class DiskPatch:
    """Square Cartesian grid covering a disk (or annulus) patch."""

    center: complex = 0.0
    radius: float = 1.0
    n: int = 128
    rmin: float = 0.0

    @property
    def spacing(self) -> float:
        return 2 * self.radius / (self.n - 1)

    def grid(self) -> np.ndarray:
        xs = self.center.real + np.linspace(-self.radius, self.radius, self.n)
        ys = self.center.imag + np.linspace(-self.radius, self.radius, self.n)
        return xs[:, None] + 1j * ys[None, :]

    def mask(self) -> np.ndarray:
        rho = np.abs(self.grid() - self.center)
        return (rho <= self.radius) & (rho >= self.rmin)


def holomorphic_factor(sol: HolomorphicSolution,
                       patch: DiskPatch) -> tuple[np.ndarray, np.ndarray]:
    """Sample the factor on a patch; returns (values, valid_mask).

    A zero of a' inside the patch degenerates the factor; affected nodes are
    removed from the mask and a warning is issued, since the curvature
    cross-check is meaningless there.
    """
    z = patch.grid()
    vals = sol.factor(z)
    mask = patch.mask()
    crit = sol.critical_points()
    inside = [w for w in crit
              if patch.rmin <= abs(w - patch.center) <= patch.radius]
    if inside:
        warnings.warn(
            f"a' vanishes at {inside} inside the patch; factor degenerates there",
            RuntimeWarning, stacklevel=2)
        for w in inside:
            mask &= np.abs(z - w) > 8 * patch.spacing
    return vals, mask


def constant_curvature_error(sol: HolomorphicSolution, patch: DiskPatch,
                             border: int = 2,
                             margin_fraction: float = 0.1) -> float:
    """Max |K - 4| of the numerically evaluated curvature on the patch.

    The maximum is taken over a resolution-independent interior region (a
    fixed fractional margin inside the patch radii), so errors at different
    grid sizes are comparable in refinement studies; nodes within ``border``
    cells of the square boundary are excluded as well.
    """
    vals, mask = holomorphic_factor(sol, patch)
    K = patch_curvature(vals, patch.spacing)
    rho = np.abs(patch.grid() - patch.center)
    interior = mask & (rho <= patch.radius * (1 - margin_fraction))
    if patch.rmin > 0:
        interior &= rho >= patch.rmin * (1 + margin_fraction)
    interior[:border + 1, :] = interior[-border - 1:, :] = False
    interior[:, :border + 1] = interior[:, -border - 1:] = False
    if not interior.any():
        raise ValueError("patch has no interior nodes after masking")
    return float(np.nanmax(np.abs(K[interior] - 4.0)))


# ---------------------------------------------------------------------------
# the zeta and t substitutions


def zeta_form(profile: PolarProfile) -> tuple[np.ndarray, np.ndarray]:
    """The profile as a function of zeta = r^2: nodes r_i^2 and values f(r_i).

    Fixes the convention ftilde(zeta) = f(sqrt(zeta)) throughout, under
    which the half measure d(zeta)/2 = r dr is exactly the radial line
    measure of the disk.
    """
    r = profile.r
    return r * r, profile.values.copy()


def _zeta_weights(profile: PolarProfile) -> np.ndarray:
    # Midpoint rule in r for integrals against d(zeta) = 2 r dr, normalized
    # to a probability measure on [0, rmax^2]; weights sum to 1 exactly.
    r = profile.r
    w = 2.0 * r * profile.dr / profile.rmax**2
    return w / w.sum()


def zeta_variance(profile: PolarProfile) -> float:
    """Variance of ftilde against the uniform measure in zeta on [0, rmax^2].

    Coincides with the variance over the normalized disk measure for a
    rotationally invariant factor.
    """
    w = _zeta_weights(profile)
    m = float(w @ profile.values)
    return float(w @ (profile.values - m) ** 2)


def t_variance(profile: PolarProfile) -> float:
    """Variance of ftilde against the normalized measure dt, t = log zeta.

    Reported alongside :func:`zeta_variance`; how the two variances relate
    is an open comparison, so both are exposed for inspection.
    """
    zeta, vals = zeta_form(profile)
    t = np.log(zeta)
    w = np.empty_like(t)
    w[1:-1] = (t[2:] - t[:-2]) / 2
    w[0] = t[1] - t[0]
    w[-1] = t[-1] - t[-2]
    w /= w.sum()
    m = float(w @ vals)
    return float(w @ (vals - m) ** 2)


def linear_phi(K: float, zeta: np.ndarray) -> np.ndarray:
    """The linear reciprocal solution phi(zeta) = 1 + (K/4) zeta."""
    return 1.0 + (K / 4.0) * np.asarray(zeta, dtype=float)


def curvature_from_reciprocal(phi: np.ndarray, zeta: np.ndarray) -> np.ndarray:
    """Evaluate 4 phi^2 (d/dzeta)(zeta d/dzeta) log phi by finite differences.

    For phi the reciprocal of a rotationally invariant conformal factor this
    is the Gaussian curvature as a function of zeta.  Second-order central
    differences at interior nodes; one-sided at the two ends of each
    differentiation, so the outermost two nodes are least accurate.
    """
    phi = np.asarray(phi, dtype=float)
    zeta = np.asarray(zeta, dtype=float)
    if np.any(phi <= 0):
        raise InvalidDomainError("phi must be positive on the grid")
    g = np.log(phi)
    flux = zeta * np.gradient(g, zeta, edge_order=2)
    return 4.0 * phi**2 * np.gradient(flux, zeta, edge_order=2)


def _second_derivative_nonuniform(t: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Three-point second derivative on an unequally spaced grid (interior)."""
    h1 = t[1:-1] - t[:-2]
    h2 = t[2:] - t[1:-1]
    return 2 * (h1 * u[2:] - (h1 + h2) * u[1:-1] + h2 * u[:-2]) \
        / (h1 * h2 * (h1 + h2))


@dataclass(frozen=True)
class TOperatorReport:
    """Concavity and curvature-bound diagnostics in the t = log(r^2) variable.

    ``margin`` is -u''(t) - (zeta/4)*alpha*f^2 at interior nodes (the
    log-average form; for a radial profile the logarithmic average equals f
    itself, so the f^2 and f_la^2 readings coincide and both margins are
    reported from the same samples).  ``window_margin`` restricts to
    zeta in [rho, 2*rho] and ``lemma_margin`` uses the weaker constant
    coefficient rho/4 there.  ``phi_gap`` compares the reciprocal 1/f
    against the linear solution with the same curvature bound.
    """

    zeta: np.ndarray
    minus_u_tt: np.ndarray
    margin: np.ndarray
    min_margin: float
    lemma_margin: float | None
    window: tuple[float, float] | None
    monotone_decreasing: bool
    concave: bool
    phi_gap: np.ndarray

    @property
    def ok(self) -> bool:
        return self.min_margin >= -1e-9


def t_operator_check(profile: PolarProfile, alpha: float,
                     rho: float | None = None,
                     concavity_tol: float = 1e-9) -> TOperatorReport:
    """Verify the t-variable consequences of a curvature lower bound alpha.

    Computes u = log f on the t = log(r^2) grid with unequal-spacing second
    differences and checks -u''(t) >= (zeta/4) * alpha * f^2 at interior
    nodes (restricted to zeta in [rho, 2*rho] when rho is given), together
    with monotonicity of f and concavity of u for alpha > 0.
    """
    zeta, vals = zeta_form(profile)
    t = np.log(zeta)
    u = np.log(vals)
    upp = _second_derivative_nonuniform(t, u)
    zi = zeta[1:-1]
    fi = vals[1:-1]
    margin = -upp - (zi / 4.0) * alpha * fi**2

    if rho is not None:
        window = (zi >= rho) & (zi <= 2 * rho)
        if window.sum() < 8:
            raise InsufficientResolutionError(
                f"only {int(window.sum())} nodes in zeta-window "
                f"[{rho}, {2 * rho}]; need at least 8")
        min_margin = float(margin[window].min())
        lemma_margin = float((-upp[window]
                              - (rho / 4.0) * alpha * fi[window]**2).min())
        win = (float(rho), float(2 * rho))
    else:
        min_margin = float(margin.min())
        lemma_margin = None
        win = None

    diffs = np.diff(vals)
    monotone = bool(np.all(diffs <= concavity_tol * np.abs(vals[:-1])))
    concave = bool(np.all(upp <= concavity_tol))
    phi_gap = 1.0 / vals - linear_phi(alpha, zeta)
    return TOperatorReport(
        zeta=zi, minus_u_tt=-upp, margin=margin, min_margin=min_margin,
        lemma_margin=lemma_margin, window=win,
        monotone_decreasing=monotone, concave=concave, phi_gap=phi_gap)


# ---------------------------------------------------------------------------
# variance sweep over random holomorphic solutions


@dataclass(frozen=True)
class SweepRow:
    id: str
    degree: int
    l2norm: float
    variance: float


def _disk_moments(values: np.ndarray, r: np.ndarray) -> tuple[float, float]:
    """(mean, variance) over the normalized disk measure on a polar grid."""
    w = r / (r.sum() * values.shape[1])
    m = float(np.sum(values * w[:, None]))
    var = float(np.sum((values - m) ** 2 * w[:, None]))
    return m, var


def _sample_solution(rng: np.random.Generator, rho: float,
                     max_redraws: int = 100) -> HolomorphicSolution:
    for _ in range(max_redraws):
        degree = int(rng.integers(1, 5))
        parts = rng.uniform(-1.0, 1.0, size=(degree + 1, 2))
        coeffs = parts[:, 0] + 1j * parts[:, 1]
        try:
            sol = HolomorphicSolution(coeffs)
        except ValueError:
            continue
        crit = sol.critical_points()
        if crit.size and np.any(np.abs(crit) <= rho):
            continue
        return sol
    raise RuntimeError(f"no admissible a(z) after {max_redraws} redraws")


def variance_sweep_experiment(alpha: float, rho: float, samples: int,
                              seed: int, nr: int = 256,
                              ntheta: int = 128) -> list[SweepRow]:
    """Empirical variance comparison against the rotationally invariant factor.

    Draws random polynomial factors |a'|/(1+|a|^2) (degree 1 to 4, complex
    coefficients with parts uniform in [-1, 1]; sample i uses seed XOR i),
    rescales each to the L^2 norm of the constant-curvature-alpha factor on
    the disk of radius rho, and records the disk variance.  The first row is
    the rotationally invariant factor itself.  Purely exploratory output: it
    claims no bound.
    """
    if alpha <= 0 or rho <= 0:
        raise ValueError("alpha and rho must be positive")
    r = (np.arange(nr) + 0.5) * (rho / nr)
    theta = 2 * np.pi * np.arange(ntheta) / ntheta
    z = r[:, None] * np.exp(1j * theta)[None, :]

    f0 = RiemannProfile(alpha)(r)[:, None] * np.ones((1, ntheta))
    m0, _ = _disk_moments(f0**2, r)
    target_l2 = math.sqrt(m0)
    _, var0 = _disk_moments(f0, r)
    rows = [SweepRow(id="riemann", degree=1, l2norm=target_l2, variance=var0)]

    for i in range(samples):
        rng = np.random.default_rng(seed ^ i)
        sol = _sample_solution(rng, rho)
        fvals = sol.factor(z)
        m2, _ = _disk_moments(fvals**2, r)
        l2 = math.sqrt(m2)
        scaled = fvals * (target_l2 / l2)
        _, var = _disk_moments(scaled, r)
        rows.append(SweepRow(id=str(i), degree=sol.degree,
                             l2norm=l2, variance=var))
    return rows
