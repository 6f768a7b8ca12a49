"""Periodic scalar fields on a flat torus R^2/L and conformal metrics f^2*ds^2.

A field is sampled on a uniform nu x nv grid in lattice coordinates:
``values[i, j]`` is the sample at the point (i/nu)*b1 + (j/nv)*b2, and all
index arithmetic wraps periodically.  Quadrature is the periodic rectangle
rule, which is spectrally accurate for smooth periodic integrands; sums are
taken in row-major order with numpy's pairwise summation, so results are
deterministic.

Gaussian curvature of the metric f^2 (dx^2 + dy^2) is computed from the
log-Laplacian identity K = -lap(log f) / f^2, with an independent
first-derivative form (-f*lap(f) + |grad f|^2) / f^4 available as a
cross-check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .lattice import Lattice2D, _reduce_with_transform

MIN_GRID = 8
POSITIVITY_FLOOR = 1e-12


class InvalidFactorError(ValueError):
    """A conformal factor must be strictly positive and finite."""


class NumericalConsistencyError(ArithmeticError):
    """Two mathematically equivalent evaluations disagreed beyond tolerance."""


@dataclass(frozen=True)
class ScalarField:
    """Real samples of a doubly periodic function over a fundamental domain."""

    lattice: Lattice2D
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        vals = np.ascontiguousarray(self.values, dtype=float)
        if vals.ndim != 2:
            raise ValueError("values must be a 2-d array")
        if vals.shape[0] < MIN_GRID or vals.shape[1] < MIN_GRID:
            raise ValueError(f"grid must be at least {MIN_GRID} in each direction")
        if not np.all(np.isfinite(vals)):
            raise ValueError("all samples must be finite")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @property
    def nu(self) -> int:
        return self.values.shape[0]

    @property
    def nv(self) -> int:
        return self.values.shape[1]

    @property
    def grid_spacing(self) -> float:
        """Largest physical distance between adjacent grid points."""
        b1 = np.array(self.lattice.b1)
        b2 = np.array(self.lattice.b2)
        return max(np.linalg.norm(b1) / self.nu, np.linalg.norm(b2) / self.nv)

    def grid_points(self) -> np.ndarray:
        """Cartesian coordinates of the samples, shape (nu, nv, 2)."""
        B = self.lattice.basis_matrix()
        uu = np.arange(self.nu)[:, None] / self.nu
        vv = np.arange(self.nv)[None, :] / self.nv
        return np.stack([B[0, 0] * uu + B[0, 1] * vv,
                         B[1, 0] * uu + B[1, 1] * vv], axis=-1)

    def map(self, fn) -> "ScalarField":
        """Apply a sample-wise function, returning a new field."""
        return ScalarField(self.lattice, fn(self.values))


@dataclass(frozen=True)
class ConformalMetric:
    """Metric f^2 (dx^2+dy^2) on R^2/L with positive factor f and coarea 1."""

    f: ScalarField

    def __post_init__(self):
        if np.min(self.f.values) <= POSITIVITY_FLOOR:
            raise InvalidFactorError(
                f"conformal factor must exceed {POSITIVITY_FLOOR} everywhere "
                f"(min sample {np.min(self.f.values):.3e})")
        if abs(self.f.lattice.coarea - 1.0) > 1e-9:
            raise ValueError(
                f"lattice must have unit coarea, got {self.f.lattice.coarea!r}")

    @property
    def lattice(self) -> Lattice2D:
        return self.f.lattice

    @property
    def values(self) -> np.ndarray:
        return self.f.values

    @property
    def nu(self) -> int:
        return self.f.nu

    @property
    def nv(self) -> int:
        return self.f.nv

    def scaled(self, c: float) -> "ConformalMetric":
        """The metric with factor c*f (homothety by c)."""
        return ConformalMetric(ScalarField(self.lattice, c * self.f.values))


# ---------------------------------------------------------------------------
# analytic families


def _lattice_coords(nu: int, nv: int) -> tuple[np.ndarray, np.ndarray]:
    return (np.arange(nu)[:, None] / nu), (np.arange(nv)[None, :] / nv)


def _torus_dist_sq(lattice: Lattice2D, du: np.ndarray, dv: np.ndarray) -> np.ndarray:
    """Squared flat-torus distance for offsets (du, dv) in lattice coords."""
    reduced, _ = _reduce_with_transform(lattice)
    R = reduced.basis_matrix()
    # Re-express the offset in the reduced basis and wrap to [0, 1).
    B = lattice.basis_matrix()
    M = np.linalg.solve(R, B)
    cu = M[0, 0] * du + M[0, 1] * dv
    cv = M[1, 0] * du + M[1, 1] * dv
    cu = cu - np.floor(cu)
    cv = cv - np.floor(cv)
    d2 = np.full(np.broadcast(cu, cv).shape, np.inf)
    for p in (-2, -1, 0, 1):
        for q in (-2, -1, 0, 1):
            x = R[0, 0] * (cu + p) + R[0, 1] * (cv + q)
            y = R[1, 0] * (cu + p) + R[1, 1] * (cv + q)
            d2 = np.minimum(d2, x * x + y * y)
    return d2


def from_analytic(lattice: Lattice2D, nu: int, nv: int, family: str,
                  **params) -> ScalarField:
    """Sample one of the built-in conformal-factor families.

    Families
    --------
    constant : c
        f = c.
    trig : eps, k, l
        f = 1 + eps * cos(2*pi*(k*u + l*v)) in lattice coordinates.
    bump : amplitude, center=(u0, v0), width
        f = 1 + amplitude * sum over lattice translates of a Gaussian of the
        given physical width; translates contributing less than 1e-14 of the
        amplitude are dropped.
    riemann-bump : alpha, center=(u0, v0)
        f = 1 / (1 + (alpha/4) * d^2) with d the flat-torus distance to the
        center.  Inside the center's Voronoi cell this is exactly the
        rotationally invariant constant-curvature-alpha factor.
    """
    uu, vv = _lattice_coords(nu, nv)
    if family == "constant":
        c = float(params.get("c", 1.0))
        vals = np.full((nu, nv), c)
    elif family == "trig":
        eps = float(params.get("eps", 0.1))
        k = int(params.get("k", 1))
        l = int(params.get("l", 0))
        vals = 1.0 + eps * np.cos(2 * np.pi * (k * uu + l * vv))
    elif family == "bump":
        amp = float(params.get("amplitude", 0.5))
        cu, cv = params.get("center", (0.5, 0.5))
        width = float(params.get("width", 0.2))
        B = lattice.basis_matrix()
        dx = B[0, 0] * (uu - cu) + B[0, 1] * (vv - cv)
        dy = B[1, 0] * (uu - cu) + B[1, 1] * (vv - cv)
        # Translate box large enough that dropped terms are below 1e-14.
        reach = width * math.sqrt(14 * math.log(10.0))
        b1l = math.hypot(*lattice.b1)
        b2l = math.hypot(*lattice.b2)
        pmax = int(math.ceil((reach + b1l + b2l) * b2l / lattice.coarea)) + 1
        qmax = int(math.ceil((reach + b1l + b2l) * b1l / lattice.coarea)) + 1
        vals = np.ones((nu, nv))
        for p in range(-pmax, pmax + 1):
            for q in range(-qmax, qmax + 1):
                tx = dx - p * B[0, 0] - q * B[0, 1]
                ty = dy - p * B[1, 0] - q * B[1, 1]
                term = np.exp(-(tx * tx + ty * ty) / width**2)
                if term.max() < 1e-14:
                    continue
                vals += amp * term
    elif family == "riemann-bump":
        alpha = float(params.get("alpha", 4.0))
        cu, cv = params.get("center", (0.5, 0.5))
        d2 = _torus_dist_sq(lattice, uu - cu, vv - cv + 0.0 * uu)
        denom = 1.0 + (alpha / 4.0) * d2
        if np.min(denom) <= POSITIVITY_FLOOR:
            raise InvalidFactorError(
                "riemann-bump denominator vanishes on the grid "
                f"(alpha={alpha} too negative for this torus)")
        vals = 1.0 / denom
    else:
        raise ValueError(f"unknown family {family!r}")
    if np.min(vals) <= POSITIVITY_FLOOR:
        raise InvalidFactorError(
            f"family {family!r} produced non-positive samples")
    return ScalarField(lattice, vals)


# ---------------------------------------------------------------------------
# moments


def mean(metric: ConformalMetric) -> float:
    """Expected value of f under the flat unit-area measure."""
    return float(np.mean(metric.values))


def area(metric: ConformalMetric) -> float:
    """Riemannian area of the metric, the second moment of f."""
    return float(np.mean(metric.values ** 2))


def variance(metric: ConformalMetric) -> float:
    """Variance of the conformal factor under the flat unit-area measure.

    Evaluated both as the moment difference E(f^2) - E(f)^2 and as the
    centered second moment E((f - m)^2); the two must agree to 1e-10
    relative to the second-moment scale.  Returns the centered value,
    which is nonnegative by construction.
    """
    m = mean(metric)
    second = area(metric)
    moment_form = second - m * m
    centered_form = float(np.mean((metric.values - m) ** 2))
    if abs(moment_form - centered_form) > 1e-10 * max(second, 1e-300):
        raise NumericalConsistencyError(
            f"variance forms disagree: {moment_form!r} vs {centered_form!r}")
    return centered_form


# ---------------------------------------------------------------------------
# differential operators (second-order periodic central differences)


def _inverse_gram(lattice: Lattice2D) -> tuple[float, float, float]:
    B = lattice.basis_matrix()
    G = np.linalg.inv(B.T @ B)
    return G[0, 0], G[0, 1], G[1, 1]


def flat_laplacian(fld: ScalarField) -> ScalarField:
    """Flat (Cartesian) Laplacian evaluated on the lattice-coordinate grid.

    Uses the constant inverse-metric coefficients of the coordinate change,
    so the mixed term is present for non-rectangular lattices.
    """
    guu, guv, gvv = _inverse_gram(fld.lattice)
    du, dv = 1.0 / fld.nu, 1.0 / fld.nv
    f = fld.values
    fuu = (np.roll(f, -1, 0) - 2 * f + np.roll(f, 1, 0)) / du**2
    fvv = (np.roll(f, -1, 1) - 2 * f + np.roll(f, 1, 1)) / dv**2
    if guv != 0.0:
        fp = np.roll(f, -1, 0)
        fm = np.roll(f, 1, 0)
        fuv = (np.roll(fp, -1, 1) - np.roll(fp, 1, 1)
               - np.roll(fm, -1, 1) + np.roll(fm, 1, 1)) / (4 * du * dv)
    else:
        fuv = 0.0
    return ScalarField(fld.lattice, guu * fuu + 2 * guv * fuv + gvv * fvv)


def gradient_squared(fld: ScalarField) -> ScalarField:
    """Squared Cartesian gradient |grad f|^2 via central differences."""
    guu, guv, gvv = _inverse_gram(fld.lattice)
    du, dv = 1.0 / fld.nu, 1.0 / fld.nv
    f = fld.values
    fu = (np.roll(f, -1, 0) - np.roll(f, 1, 0)) / (2 * du)
    fv = (np.roll(f, -1, 1) - np.roll(f, 1, 1)) / (2 * dv)
    return ScalarField(fld.lattice, guu * fu * fu + 2 * guv * fu * fv + gvv * fv * fv)


def gaussian_curvature(metric: ConformalMetric) -> ScalarField:
    """Gaussian curvature K = -lap(log f) / f^2 of the metric f^2*ds^2."""
    h = ScalarField(metric.lattice, np.log(metric.values))
    lap = flat_laplacian(h)
    return ScalarField(metric.lattice, -lap.values / metric.values**2)


def gaussian_curvature_grad_form(metric: ConformalMetric) -> ScalarField:
    """Curvature via the first-derivative form (-f*lap f + |grad f|^2)/f^4.

    Independent of :func:`gaussian_curvature`; the two agree to O(h^2) on
    smooth factors and serve as a cross-check of each other.
    """
    f = metric.values
    lap = flat_laplacian(metric.f).values
    gsq = gradient_squared(metric.f).values
    return ScalarField(metric.lattice, (-f * lap + gsq) / f**4)


def patch_curvature(f_values: np.ndarray, spacing: float) -> np.ndarray:
    """Curvature of f^2*ds^2 on a non-periodic Cartesian patch.

    Five-point stencil at interior nodes; the one-cell border is NaN.
    """
    h = np.log(f_values)
    lap = np.full_like(h, np.nan)
    lap[1:-1, 1:-1] = (h[2:, 1:-1] + h[:-2, 1:-1] + h[1:-1, 2:] + h[1:-1, :-2]
                       - 4 * h[1:-1, 1:-1]) / spacing**2
    return -lap / f_values**2


def sample_periodic(fld: ScalarField, points: np.ndarray) -> np.ndarray:
    """Bilinear periodic interpolation at Cartesian points, shape (..., 2)."""
    pts = np.asarray(points, dtype=float)
    B = fld.lattice.basis_matrix()
    coords = np.linalg.solve(B, pts.reshape(-1, 2).T)
    u = (coords[0] * fld.nu) % fld.nu
    v = (coords[1] * fld.nv) % fld.nv
    i0 = np.floor(u).astype(int) % fld.nu
    j0 = np.floor(v).astype(int) % fld.nv
    i1 = (i0 + 1) % fld.nu
    j1 = (j0 + 1) % fld.nv
    su = u - np.floor(u)
    sv = v - np.floor(v)
    vals = fld.values
    out = ((1 - su) * (1 - sv) * vals[i0, j0] + su * (1 - sv) * vals[i1, j0]
           + (1 - su) * sv * vals[i0, j1] + su * sv * vals[i1, j1])
    return out.reshape(pts.shape[:-1])


# ---------------------------------------------------------------------------
# grid file format

GRID_MAGIC = "SYSTOLIC-GRID 1"


def write_grid(path, fld: ScalarField) -> None:
    """Write a field in the text grid format (17 significant digits)."""
    with open(path, "w") as fh:
        fh.write(GRID_MAGIC + "\n")
        b1, b2 = fld.lattice.b1, fld.lattice.b2
        fh.write("lattice %.17g %.17g %.17g %.17g\n" % (b1[0], b1[1], b2[0], b2[1]))
        fh.write("dims %d %d\n" % (fld.nu, fld.nv))
        for row in fld.values:
            fh.write(" ".join("%.17g" % v for v in row) + "\n")


def read_grid(path) -> ScalarField:
    """Read a field written by :func:`write_grid`."""
    with open(path) as fh:
        magic = fh.readline().strip()
        if magic != GRID_MAGIC:
            raise ValueError(f"not a grid file (header {magic!r})")
        lat = fh.readline().split()
        if len(lat) != 5 or lat[0] != "lattice":
            raise ValueError("malformed lattice line")
        b1 = (float(lat[1]), float(lat[2]))
        b2 = (float(lat[3]), float(lat[4]))
        dims = fh.readline().split()
        if len(dims) != 3 or dims[0] != "dims":
            raise ValueError("malformed dims line")
        nu, nv = int(dims[1]), int(dims[2])
        data = np.array(fh.read().split(), dtype=float)
    if data.size != nu * nv:
        raise ValueError(f"expected {nu * nv} samples, found {data.size}")
    return ScalarField(Lattice2D(b1, b2), data.reshape(nu, nv))
