import numpy as np
import pytest

from systolic import fields, lattice


@pytest.fixture(scope="session")
def z2():
    return lattice.square()


@pytest.fixture(scope="session")
def eisenstein():
    return lattice.hexagonal()


def make_metric(lat, nu, nv, family, **params):
    return fields.ConformalMetric(fields.from_analytic(lat, nu, nv, family,
                                                       **params))


@pytest.fixture(scope="session")
def flat_z2_64(z2):
    return make_metric(z2, 64, 64, "constant", c=1.0)


@pytest.fixture(scope="session")
def trig_v_64(z2):
    # f = 1 + 0.3 cos(2 pi v); horizontal trough loop of length 0.7
    return make_metric(z2, 64, 64, "trig", eps=0.3, k=0, l=1)


@pytest.fixture(scope="session")
def smooth_corpus(z2, eisenstein):
    """Small cross-section of smooth metrics for invariant checks."""
    sheared = lattice.normalize_coarea(lattice.Lattice2D((1.0, 0.0), (0.5, 1.0)))
    return [
        make_metric(z2, 64, 64, "constant", c=1.0),
        make_metric(z2, 64, 64, "trig", eps=0.1, k=1, l=0),
        make_metric(z2, 64, 64, "trig", eps=0.2, k=1, l=2),
        make_metric(eisenstein, 64, 64, "trig", eps=0.15, k=0, l=1),
        make_metric(sheared, 64, 64, "bump", amplitude=0.4,
                    center=(0.5, 0.5), width=0.25),
    ]


def interior_mask(metric, center, radius):
    """Grid nodes within flat-torus distance radius of the center."""
    pts = metric.f.grid_points()
    B = metric.lattice.basis_matrix()
    c = B @ np.asarray(center, dtype=float)
    best = np.full(pts.shape[:2], np.inf)
    for p in (-1, 0, 1):
        for q in (-1, 0, 1):
            shift = B @ np.array([p, q], dtype=float)
            d = np.hypot(pts[..., 0] - c[0] - shift[0],
                         pts[..., 1] - c[1] - shift[1])
            best = np.minimum(best, d)
    return best <= radius
