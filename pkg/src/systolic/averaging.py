"""Rotational averaging on disks and its interaction with variance.

Fields live on a polar grid: cell-centered radii, equispaced angles.  The
angular mean is the periodic rectangle rule (exact for trigonometric
polynomials below the Nyquist degree); disk integrals use the midpoint rule
in r with weight r, normalized to a probability measure.  Under this
quadrature the discrete Jensen inequalities hold exactly, up to rounding:
averaging preserves the mean, never increases the variance, and commutes
with itself.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .fields import ConformalMetric, patch_curvature, sample_periodic
from .liouville import PolarProfile, polar_laplacian

MIN_ANGULAR = 16


class InvalidDiskFactorError(ValueError):
    """Logarithms need a strictly positive field."""


@dataclass(frozen=True)
class DiskField:
    """Samples h(r_i, theta_j) on a disk around ``center``."""

    center: tuple[float, float]
    radius: float
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        vals = np.ascontiguousarray(self.values, dtype=float)
        if vals.ndim != 2:
            raise ValueError("values must be (nr, ntheta)")
        if vals.shape[1] < MIN_ANGULAR or vals.shape[1] % 2:
            raise ValueError(f"ntheta must be even and >= {MIN_ANGULAR}")
        if not np.all(np.isfinite(vals)):
            raise ValueError("all samples must be finite")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @property
    def nr(self) -> int:
        return self.values.shape[0]

    @property
    def ntheta(self) -> int:
        return self.values.shape[1]

    @property
    def r(self) -> np.ndarray:
        return (np.arange(self.nr) + 0.5) * (self.radius / self.nr)

    @property
    def theta(self) -> np.ndarray:
        return 2 * np.pi * np.arange(self.ntheta) / self.ntheta

    def map(self, fn) -> "DiskField":
        return DiskField(self.center, self.radius, fn(self.values))


def disk_field_from_function(fn, radius: float, nr: int, ntheta: int,
                             center: tuple[float, float] = (0.0, 0.0),
                             polar: bool = False) -> DiskField:
    """Sample fn on the polar grid; fn takes (x, y) or, if polar, (r, theta)."""
    r = (np.arange(nr) + 0.5) * (radius / nr)
    theta = 2 * np.pi * np.arange(ntheta) / ntheta
    R, T = np.meshgrid(r, theta, indexing="ij")
    if polar:
        vals = fn(R, T)
    else:
        vals = fn(center[0] + R * np.cos(T), center[1] + R * np.sin(T))
    return DiskField(center, radius, np.broadcast_to(vals, R.shape).copy())


def disk_field_from_metric(metric: ConformalMetric, center: tuple[float, float],
                           radius: float, nr: int, ntheta: int) -> DiskField:
    """Resample a periodic conformal factor onto a disk (bilinear)."""
    r = (np.arange(nr) + 0.5) * (radius / nr)
    theta = 2 * np.pi * np.arange(ntheta) / ntheta
    R, T = np.meshgrid(r, theta, indexing="ij")
    pts = np.stack([center[0] + R * np.cos(T), center[1] + R * np.sin(T)],
                   axis=-1)
    return DiskField(center, radius, sample_periodic(metric.f, pts))


def _disk_weights(fld: DiskField) -> np.ndarray:
    r = fld.r
    return r / (r.sum() * fld.ntheta)


def disk_mean(fld: DiskField) -> float:
    """Mean over the normalized disk measure."""
    return float(np.sum(fld.values * _disk_weights(fld)[:, None]))


def disk_variance(fld: DiskField) -> float:
    """Variance over the normalized disk measure."""
    m = disk_mean(fld)
    return float(np.sum((fld.values - m) ** 2 * _disk_weights(fld)[:, None]))


def rotational_average(fld: DiskField) -> PolarProfile:
    """Angular mean at each radius (periodic rectangle rule).

    The mean is taken after shifting each row by its first sample, which
    makes the operation an exact projection: averaging an already
    rotationally invariant field reproduces it bit for bit.
    """
    ref = fld.values[:, :1]
    return PolarProfile(fld.radius, ref[:, 0] + (fld.values - ref).mean(axis=1))


def log_average(fld: DiskField) -> PolarProfile:
    """The multiplicative average exp(av(log f)) of a positive field."""
    if np.min(fld.values) <= 0:
        raise InvalidDiskFactorError("log average needs f > 0 everywhere")
    hav = rotational_average(fld.map(np.log))
    return PolarProfile(fld.radius, np.exp(hav.values))


class JensenReport(NamedTuple):
    slack: np.ndarray  # av(e^{2h}) - e^{2 h_av} per radius
    min_slack: float
    ok: bool


def jensen_exp_check(fld: DiskField, tol: float = 1e-12) -> JensenReport:
    """Per-radius check of av(e^{2h}) >= e^{2 av(h)} for h = log f."""
    if np.min(fld.values) <= 0:
        raise InvalidDiskFactorError("Jensen check needs f > 0 everywhere")
    h = fld.map(np.log)
    lhs = np.exp(2 * h.values).mean(axis=1)
    rhs = np.exp(2 * rotational_average(h).values)
    slack = lhs - rhs
    m = float(slack.min())
    return JensenReport(slack=slack, min_slack=m, ok=bool(m >= -tol))


class VarianceCheck(NamedTuple):
    var_h: float
    var_hav: float
    ok: bool


def variance_monotonicity_check(fld: DiskField,
                                mean_tol: float = 1e-10,
                                var_tol: float = 1e-12) -> VarianceCheck:
    """Averaging preserves the disk mean and does not increase the variance."""
    hav = rotational_average(fld)
    avg_field = DiskField(fld.center, fld.radius,
                          np.repeat(hav.values[:, None], fld.ntheta, axis=1))
    e_h = disk_mean(fld)
    e_hav = disk_mean(avg_field)
    scale = max(1.0, abs(e_h))
    if abs(e_h - e_hav) > mean_tol * scale:
        raise ArithmeticError(
            f"averaging moved the mean: {e_h!r} vs {e_hav!r}")
    var_h = disk_variance(fld)
    var_hav = disk_variance(avg_field)
    return VarianceCheck(var_h=var_h, var_hav=var_hav,
                         ok=bool(var_hav <= var_h + var_tol))


@dataclass(frozen=True)
class AveragedInequalityReport:
    """Margins of the averaged radial differential inequality.

    ``lhs`` is -(h_av'' + h_av'/r) at interior radii.  The proof-form right
    side is alpha*e^{2 h_av}; the displayed form alpha*e^{h_av} is reported
    alongside, and no position is taken on which is intended.  When the
    curvature hypothesis K >= alpha fails numerically the checks still run
    and ``hypothesis_ok`` is False.
    """

    r: np.ndarray
    lhs: np.ndarray
    rhs_sq: np.ndarray
    rhs_plain: np.ndarray
    margin_sq: np.ndarray
    margin_plain: np.ndarray
    hypothesis_ok: bool | None
    curvature_min: float | None


def _resampled_curvature_min(fld: DiskField, border_cells: int = 4) -> float:
    """Min Gaussian curvature of f^2 ds^2 on a Cartesian resampling.

    Interpolates the polar samples with a bicubic spline (angle padded
    periodically), evaluates the patch curvature on a Cartesian grid, and
    returns the minimum over nodes comfortably inside the disk.
    """
    from scipy.interpolate import RectBivariateSpline

    theta = fld.theta
    pad = 3
    theta_ext = np.concatenate([theta[-pad:] - 2 * np.pi, theta,
                                theta[:pad] + 2 * np.pi])
    vals_ext = np.concatenate([fld.values[:, -pad:], fld.values,
                               fld.values[:, :pad]], axis=1)
    spline = RectBivariateSpline(fld.r, theta_ext, vals_ext, kx=3, ky=3)

    n = 2 * fld.nr
    xs = np.linspace(-fld.radius, fld.radius, n)
    X, Y = np.meshgrid(xs, xs, indexing="ij")
    R = np.hypot(X, Y)
    T = np.arctan2(Y, X) % (2 * np.pi)
    fvals = spline.ev(np.clip(R, fld.r[0], fld.r[-1]), T)
    if np.min(fvals) <= 0:
        raise InvalidDiskFactorError("resampled factor is not positive")
    K = patch_curvature(fvals, xs[1] - xs[0])
    dr = fld.radius / fld.nr
    good = (R >= fld.r[0] + border_cells * dr) \
        & (R <= fld.radius - border_cells * dr)
    good[:2, :] = good[-2:, :] = good[:, :2] = good[:, -2:] = False
    return float(np.nanmin(K[good]))


def averaged_inequality_check(fld: DiskField, alpha: float,
                              verify_hypothesis: bool = True,
                              hypothesis_tol: float = 1e-3
                              ) -> AveragedInequalityReport:
    """Check -(h_av'' + h_av'/r) >= alpha * e^{2 h_av} for h = log f.

    The hypothesis that the curvature of f^2 ds^2 is >= alpha on the disk is
    verified numerically first (within ``hypothesis_tol`` * max(1, |alpha|));
    a failure flags the report but does not abort the margin computation.
    """
    if np.min(fld.values) <= 0:
        raise InvalidDiskFactorError("inequality check needs f > 0 everywhere")
    hypothesis_ok = None
    kmin = None
    if verify_hypothesis:
        kmin = _resampled_curvature_min(fld)
        hypothesis_ok = bool(kmin >= alpha - hypothesis_tol * max(1.0, abs(alpha)))

    hav = rotational_average(fld.map(np.log))
    lhs_full = -polar_laplacian(hav).values
    interior = slice(1, -1)
    lhs = lhs_full[interior]
    e_hav = np.exp(hav.values[interior])
    rhs_sq = alpha * e_hav**2
    rhs_plain = alpha * e_hav
    return AveragedInequalityReport(
        r=hav.r[interior], lhs=lhs, rhs_sq=rhs_sq, rhs_plain=rhs_plain,
        margin_sq=lhs - rhs_sq, margin_plain=lhs - rhs_plain,
        hypothesis_ok=hypothesis_ok, curvature_min=kmin)
