import math

import numpy as np
import pytest

from conftest import make_metric
from systolic import lattice
from systolic.defect import (SQRT3_2, build_report, equality_case_check,
                             random_corpus)
from systolic.fields import variance

GAMMA2 = 2 / math.sqrt(3)


@pytest.fixture(scope="module")
def flat_eis_report(eisenstein):
    m = make_metric(eisenstein, 64, 64, "constant", c=1.0)
    return m, build_report(m)


@pytest.fixture(scope="module")
def flat_z2_report(flat_z2_64):
    return flat_z2_64, build_report(flat_z2_64)


def test_flat_eisenstein_is_equality_case(flat_eis_report):
    m, rep = flat_eis_report
    assert rep.area == pytest.approx(1.0)
    assert rep.variance == 0.0
    assert rep.sys**2 == pytest.approx(GAMMA2, rel=1e-9)
    assert abs(rep.loewner_lhs) <= 1e-9
    assert abs(rep.sharp_lhs) <= 1e-9
    assert rep.rect_lhs is None  # tau is not pure imaginary
    assert rep.loewner_ok and rep.sharp_ok
    assert equality_case_check(m, report=rep)


def test_flat_square_rect_equality(flat_z2_report):
    m, rep = flat_z2_report
    assert rep.rect_lhs is not None
    assert abs(rep.rect_lhs) <= 1e-9
    assert rep.rect_ok
    assert rep.loewner_lhs == pytest.approx(1 - SQRT3_2, rel=1e-9)
    assert not equality_case_check(m, report=rep)  # gap 0.134 > tol


def test_trig_report_against_symbolic_values(trig_v_64):
    rep = build_report(trig_v_64)
    assert rep.area == pytest.approx(1.045, abs=1e-12)  # 1 + eps^2/2
    assert rep.variance == pytest.approx(0.045, abs=1e-12)
    assert rep.sys == pytest.approx(0.7, rel=0.02)
    assert rep.rect_lhs == pytest.approx(1.045 - rep.sys**2, rel=1e-12)
    assert rep.rect_lhs >= rep.variance  # 0.555 >= 0.045
    assert rep.all_ok()
    assert not equality_case_check(trig_v_64, report=rep)


def test_nonconstant_factor_on_hexagon_not_equality(eisenstein):
    m = make_metric(eisenstein, 64, 64, "trig", eps=0.1, k=1, l=0)
    assert variance(m) > 0
    assert not equality_case_check(m)


def test_gap_identity_and_flag_ordering(trig_v_64):
    rep = build_report(trig_v_64)
    gap = rep.loewner_lhs - rep.sharp_lhs
    assert gap == pytest.approx((rep.tau.sigma_sq - SQRT3_2) * rep.sys**2,
                                abs=1e-12)
    assert gap >= -1e-12  # sigma^2 >= sqrt(3)/2


def test_scaling_law_preserves_flags(z2):
    m = make_metric(z2, 64, 64, "trig", eps=0.2, k=1, l=1)
    r1 = build_report(m)
    r2 = build_report(m.scaled(2.0))
    assert r2.area == pytest.approx(4 * r1.area, rel=1e-12)
    assert r2.sys == pytest.approx(2 * r1.sys, rel=1e-12)
    assert r2.variance == pytest.approx(4 * r1.variance, rel=1e-11)
    assert (r2.loewner_ok, r2.sharp_ok, r2.rect_ok) == \
        (r1.loewner_ok, r1.sharp_ok, r1.rect_ok)


def test_corpus_determinism_and_prefix_stability():
    a = random_corpus(3, 7, nu=16, nv=16)
    b = random_corpus(3, 7, nu=16, nv=16)
    one = random_corpus(1, 7, nu=16, nv=16)
    for x, y in zip(a, b):
        assert np.array_equal(x.values, y.values)
        assert x.lattice.b1 == y.lattice.b1 and x.lattice.b2 == y.lattice.b2
    assert np.array_equal(a[0].values, one[0].values)


def test_corpus_validates_count():
    with pytest.raises(ValueError):
        random_corpus(0, 1)


def test_corpus_elements_well_formed():
    for m in random_corpus(10, 3, nu=16, nv=16):
        assert m.values.min() > 0
        assert m.lattice.coarea == pytest.approx(1.0, abs=1e-9)
        tau = lattice.tau_of(m.lattice)
        assert tau.im >= SQRT3_2 - 1e-9
        assert abs(tau.re) <= 0.5 + 1e-9


def test_rectangular_corpus_satisfies_rect_inequality(z2):
    # surfaces of revolution have rectangular lattices; any pure-imaginary
    # tau metric must carry and pass the rect check
    rng = np.random.default_rng(5)
    for im in (1.0, 1.3, 1.9):
        lat = lattice.from_tau(0.0, im)
        t = rng.uniform(-0.3, 0.3)
        m = make_metric(lat, 32, 32, "trig", eps=abs(t) + 0.05, k=1, l=1)
        rep = build_report(m)
        assert rep.rect_lhs is not None
        assert rep.rect_ok


def test_csv_row_shape(trig_v_64):
    rep = build_report(trig_v_64)
    row = rep.csv_row(3)
    fields = row.split(",")
    assert len(fields) == 13
    assert fields[0] == "3"
    assert float(fields[3]) == pytest.approx(rep.area)
