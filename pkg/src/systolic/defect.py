"""The isosystolic defect chain for conformal torus metrics.

For a metric f^2 ds^2 over a unit-coarea lattice with modulus tau the
variance of f is a lower bound for the systolic defect:

    area - sigma^2 * sys^2       >= var(f)   (sigma^2 = Im tau)
    area - (sqrt(3)/2) * sys^2   >= var(f)   (since sigma^2 >= sqrt(3)/2)
    area - sys^2                 >= var(f)   (rectangular lattices only)

These are exact statements; the only irreducible numerical error in
checking them is the grid metrication of the systole, so pass tolerances
default to 2 percent of the area.  Reports additionally carry the extremes
of the Gaussian curvature, for empirical study of curvature-based defect
bounds (no relation is claimed).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fields import (ConformalMetric, ScalarField, area, gaussian_curvature,
                     mean, variance)
from .lattice import Lattice2D, TauParameter, from_tau, tau_of
from .systole import SystoleResult, systole

SQRT3_2 = math.sqrt(3) / 2
RECT_RE_TOL = 1e-9
DEFAULT_TOL_FRACTION = 0.02  # systole metrication budget at the default stencil

CSV_HEADER = ("index,tau_re,tau_im,area,sys,mean,var,"
              "loewner_lhs,sharp_lhs,rect_lhs,loewner_ok,sharp_ok,rect_ok")


@dataclass(frozen=True)
class DefectReport:
    """All inequality sides and pass flags for one metric."""

    tau: TauParameter
    area: float
    sys: float
    mean: float
    variance: float
    loewner_lhs: float
    sharp_lhs: float
    rect_lhs: float | None
    loewner_ok: bool
    sharp_ok: bool
    rect_ok: bool | None
    tol: float
    kmin: float
    kmax: float
    witness: SystoleResult

    def all_ok(self) -> bool:
        checks = [self.loewner_ok, self.sharp_ok]
        if self.rect_ok is not None:
            checks.append(self.rect_ok)
        return all(checks)

    def csv_row(self, index: int) -> str:
        rect = "" if self.rect_lhs is None else "%.12g" % self.rect_lhs
        rect_ok = "" if self.rect_ok is None else int(self.rect_ok)
        return ("%d,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%s,%d,%d,%s"
                % (index, self.tau.re, self.tau.im, self.area, self.sys,
                   self.mean, self.variance, self.loewner_lhs, self.sharp_lhs,
                   rect, self.loewner_ok, self.sharp_ok, rect_ok))


def build_report(metric: ConformalMetric, tol: float | None = None,
                 result: SystoleResult | None = None) -> DefectReport:
    """Compute every defect inequality for one metric.

    A side passes when it is at least var(f) - tol; the default tol is
    2 percent of the area, matching the systole stencil budget (sys enters
    squared).  The rectangular-lattice inequality is only checked when tau
    is pure imaginary.
    """
    tau = tau_of(metric.lattice)
    a = area(metric)
    m = mean(metric)
    var = variance(metric)
    if result is None:
        result = systole(metric)
    sys_sq = result.sys**2
    if tol is None:
        tol = DEFAULT_TOL_FRACTION * a
    K = gaussian_curvature(metric).values

    loewner_lhs = a - SQRT3_2 * sys_sq
    sharp_lhs = a - tau.sigma_sq * sys_sq
    if abs(tau.re) <= RECT_RE_TOL:
        rect_lhs = a - sys_sq
        rect_ok = bool(rect_lhs >= var - tol)
    else:
        rect_lhs = None
        rect_ok = None
    return DefectReport(
        tau=tau, area=a, sys=result.sys, mean=m, variance=var,
        loewner_lhs=loewner_lhs, sharp_lhs=sharp_lhs, rect_lhs=rect_lhs,
        loewner_ok=bool(loewner_lhs >= var - tol),
        sharp_ok=bool(sharp_lhs >= var - tol),
        rect_ok=rect_ok, tol=tol,
        kmin=float(K.min()), kmax=float(K.max()), witness=result)


HEX_TAU = complex(0.5, SQRT3_2)


def equality_case_check(metric: ConformalMetric, tol: float = 0.02,
                        report: DefectReport | None = None) -> bool:
    """Whether the metric sits at the equality case of the defect chain.

    True only when the defect gap is within tol, the factor variance is
    within tol of zero, and tau is within tol of the hexagonal point: near
    equality forces a near-flat hexagonal torus, and all three conditions
    are verified rather than assumed.
    """
    if report is None:
        report = build_report(metric, tol=tol)
    near_zero_gap = report.loewner_lhs <= tol
    near_flat = report.variance <= tol
    near_hex = abs(report.tau.as_complex() - HEX_TAU) <= tol
    return bool(near_zero_gap and near_flat and near_hex)


# 24 canonical low-frequency modes: (k, l) with k > 0, or k = 0 and l > 0.
_CORPUS_MODES = [(k, l) for k in range(0, 4) for l in range(-3, 4)
                 if (k > 0) or (k == 0 and l > 0)]
_CORPUS_MODE_COUNT = 4


def _random_lattice(rng: np.random.Generator) -> Lattice2D:
    while True:
        re = rng.uniform(-0.5, 0.5)
        im = rng.uniform(SQRT3_2, 2.0)
        if re * re + im * im >= 1.0:
            return from_tau(re, im)


def _random_factor(rng: np.random.Generator, lattice: Lattice2D,
                   nu: int, nv: int) -> ScalarField:
    uu = np.arange(nu)[:, None] / nu
    vv = np.arange(nv)[None, :] / nv
    picks = rng.choice(len(_CORPUS_MODES), size=_CORPUS_MODE_COUNT,
                       replace=False)
    t = np.zeros((nu, nv))
    for p in picks:
        k, l = _CORPUS_MODES[p]
        a, b = rng.uniform(-0.5, 0.5, size=2)
        phase = 2 * np.pi * (k * uu + l * vv)
        t = t + a * np.cos(phase) + b * np.sin(phase)
    return ScalarField(lattice, np.exp(t))


def random_corpus(count: int, seed: int, nu: int = 64,
                  nv: int = 64) -> list[ConformalMetric]:
    """Deterministic corpus of random conformal torus metrics.

    Each metric has tau drawn from the standard fundamental domain and
    factor exp of a low-frequency trigonometric polynomial (four modes with
    |k|, |l| <= 3, coefficients uniform in [-0.5, 0.5]), so positivity holds
    by construction.  Metric i depends only on (seed, i).
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    out = []
    for i in range(count):
        rng = np.random.default_rng([seed, i])
        lattice = _random_lattice(rng)
        out.append(ConformalMetric(_random_factor(rng, lattice, nu, nv)))
    return out
