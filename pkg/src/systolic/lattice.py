"""Rank-2 lattices in the plane.

Provides Lagrange-Gauss basis reduction, the first successive minimum
(shortest nonzero vector), the similarity modulus tau in the standard
fundamental domain, unit-coarea rescaling, and enumeration of short
primitive vectors.  All operations are pure functions on immutable values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# Relative tolerance for fundamental-domain boundary ties and invariant
# checks; desk-scale lattices are well-conditioned.
REL_TOL = 1e-9

_MAX_REDUCE_ITER = 10_000


class InvalidLatticeError(ValueError):
    """The two basis vectors do not span the plane."""


@dataclass(frozen=True)
class Lattice2D:
    """A lattice Z*b1 + Z*b2 in R^2, stored as a pair of basis vectors."""

    b1: tuple[float, float]
    b2: tuple[float, float]

    def __post_init__(self):
        object.__setattr__(self, "b1", (float(self.b1[0]), float(self.b1[1])))
        object.__setattr__(self, "b2", (float(self.b2[0]), float(self.b2[1])))
        det = self.b1[0] * self.b2[1] - self.b1[1] * self.b2[0]
        scale = math.hypot(*self.b1) * math.hypot(*self.b2)
        if not math.isfinite(det) or abs(det) <= 1e-12 * max(scale, 1e-300):
            raise InvalidLatticeError(f"degenerate basis {self.b1}, {self.b2}")

    @property
    def coarea(self) -> float:
        """Area of the fundamental domain, |det(b1, b2)|."""
        return abs(self.b1[0] * self.b2[1] - self.b1[1] * self.b2[0])

    def basis_matrix(self) -> np.ndarray:
        """2x2 matrix whose columns are b1 and b2."""
        return np.array([[self.b1[0], self.b2[0]], [self.b1[1], self.b2[1]]])

    def vector(self, m: int, n: int) -> np.ndarray:
        """The lattice vector m*b1 + n*b2."""
        return np.array([m * self.b1[0] + n * self.b2[0],
                         m * self.b1[1] + n * self.b2[1]])

    def contains(self, v, tol: float = REL_TOL) -> bool:
        """Whether v lies in the lattice (integer coordinates in this basis)."""
        c = np.linalg.solve(self.basis_matrix(), np.asarray(v, dtype=float))
        return bool(np.all(np.abs(c - np.round(c)) <= tol * (1 + np.abs(c))))


@dataclass(frozen=True)
class TauParameter:
    """Similarity modulus tau = re + i*im in the standard fundamental domain.

    The width parameter sigma of the horizontal geodesic pencil on the
    unit-coarea torus satisfies sigma^2 = im.
    """

    re: float
    im: float

    def __post_init__(self):
        if not (self.im > 0):
            raise ValueError(f"Im(tau) must be positive, got {self.im}")
        if abs(self.re) > 0.5 + REL_TOL:
            raise ValueError(f"|Re(tau)| <= 1/2 required, got {self.re}")
        if self.re**2 + self.im**2 < 1 - REL_TOL:
            raise ValueError(f"|tau| >= 1 required, got {complex(self.re, self.im)}")

    @property
    def sigma_sq(self) -> float:
        return self.im

    @property
    def sigma(self) -> float:
        return math.sqrt(self.im)

    def as_complex(self) -> complex:
        return complex(self.re, self.im)


def _reduce_with_transform(lattice: Lattice2D) -> tuple[Lattice2D, np.ndarray]:
    """Lagrange-Gauss reduction, tracking the integer change of basis.

    Returns (reduced, U) with U unimodular such that
    [r1 r2] = [b1 b2] @ U, i.e. a class with coefficients c in the reduced
    basis has coefficients U @ c in the original one.
    """
    u = np.array(lattice.b1, dtype=float)
    v = np.array(lattice.b2, dtype=float)
    cu = np.array([1, 0], dtype=np.int64)
    cv = np.array([0, 1], dtype=np.int64)
    if u @ u > v @ v:
        u, v = v, u
        cu, cv = cv, cu
    for _ in range(_MAX_REDUCE_ITER):
        q = round((u @ v) / (u @ u))
        v = v - q * u
        cv = cv - q * cu
        if v @ v >= u @ u:
            break
        u, v = v, u
        cu, cv = cv, cu
    else:
        raise InvalidLatticeError("basis reduction did not terminate")
    U = np.column_stack([cu, cv])
    return Lattice2D(tuple(u), tuple(v)), U


def gauss_reduce(lattice: Lattice2D) -> Lattice2D:
    """Return a reduced basis of the same lattice.

    The result satisfies |b1| <= |b2| and |b1.b2| <= |b1|^2 / 2, so b1 is a
    shortest nonzero lattice vector.  Coarea is preserved exactly up to sign
    of the determinant.
    """
    reduced, _ = _reduce_with_transform(lattice)
    return reduced


def lambda1(lattice: Lattice2D) -> float:
    """Length of the shortest nonzero lattice vector."""
    return math.hypot(*gauss_reduce(lattice).b1)


def tau_of(lattice: Lattice2D) -> TauParameter:
    """Similarity modulus of the lattice in the standard fundamental domain.

    The lattice is similar (rotation and scaling) to Z*tau + Z*1.  Boundary
    ties (|tau| = 1 or Re(tau) = -1/2) are broken toward Re(tau) >= 0.
    """
    reduced = gauss_reduce(lattice)
    u = complex(*reduced.b1)
    v = complex(*reduced.b2)
    tau = v / u
    if tau.imag < 0:
        tau = -tau  # Z(-tau) + Z is the same lattice
    re, im = tau.real, tau.imag
    norm = abs(tau)
    if abs(re + 0.5) <= REL_TOL * max(1.0, norm):
        re = 0.5  # tau + 1 spans the same lattice
    if abs(norm - 1.0) <= REL_TOL and re < 0:
        re = -re  # -1/tau reflects the unit circle onto Re >= 0
    return TauParameter(re, im)


def normalize_coarea(lattice: Lattice2D) -> Lattice2D:
    """Rescale to coarea exactly 1, keeping the shape (tau) unchanged."""
    s = lattice.coarea ** -0.5
    return Lattice2D((s * lattice.b1[0], s * lattice.b1[1]),
                     (s * lattice.b2[0], s * lattice.b2[1]))


def from_tau(re: float, im: float) -> Lattice2D:
    """Unit-coarea lattice similar to Z*tau + Z, with b1 along the x-axis."""
    tau = TauParameter(float(re), float(im))
    s = tau.sigma
    return Lattice2D((1.0 / s, 0.0), (tau.re / s, tau.im / s))


def hexagonal(coarea: float = 1.0) -> Lattice2D:
    """Hexagonal (Eisenstein) lattice scaled to the given coarea."""
    base = Lattice2D((1.0, 0.0), (0.5, math.sqrt(3) / 2))
    s = (coarea / base.coarea) ** 0.5
    return Lattice2D((s, 0.0), (0.5 * s, s * math.sqrt(3) / 2))


def square(coarea: float = 1.0) -> Lattice2D:
    """Square lattice scaled to the given coarea."""
    s = coarea ** 0.5
    return Lattice2D((s, 0.0), (0.0, s))


def primitive_classes_up_to(lattice: Lattice2D, bound: float) -> list[tuple[int, int]]:
    """Coefficient pairs (m, n), in the *given* basis, of all primitive
    lattice vectors with |m*b1 + n*b2| <= bound, one of each +/- pair.

    Primitive means gcd(m, n) = 1 in the reduced basis, i.e. the vector is
    not a proper multiple of a shorter lattice vector.
    """
    reduced, U = _reduce_with_transform(lattice)
    R = reduced.basis_matrix()
    g11 = R[:, 0] @ R[:, 0]
    g12 = R[:, 0] @ R[:, 1]
    g22 = R[:, 1] @ R[:, 1]
    coarea = lattice.coarea
    # Perpendicular-height bounds on the coefficients in the reduced basis.
    m_max = int(math.floor(bound * math.sqrt(g22) / coarea + REL_TOL))
    n_max = int(math.floor(bound * math.sqrt(g11) / coarea + REL_TOL))
    out = []
    for m in range(0, m_max + 1):
        for n in range(-n_max, n_max + 1):
            if m == 0 and n <= 0:
                continue
            if math.gcd(m, abs(n)) != 1:
                continue
            norm_sq = m * m * g11 + 2 * m * n * g12 + n * n * g22
            if norm_sq <= bound**2 * (1 + REL_TOL):
                mn = U @ np.array([m, n])
                out.append((int(mn[0]), int(mn[1])))
    # Canonical sign and deterministic order in the original basis.
    canon = []
    for m, n in out:
        if m < 0 or (m == 0 and n < 0):
            m, n = -m, -n
        canon.append((m, n))
    canon.sort(key=lambda c: (np.linalg.norm(lattice.vector(*c)), c))
    return canon


def primitive_vectors_up_to(lattice: Lattice2D, bound: float) -> list[np.ndarray]:
    """All primitive lattice vectors with length <= bound, up to sign."""
    return [lattice.vector(m, n) for m, n in primitive_classes_up_to(lattice, bound)]
