import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import special, stats

from polyfloat.bodies import (ConvHullUnion, Empirical, GaugeBody, Intersection, LqBall,
                              NearestDirectionWarning, PolarBounds, closed_form_floating_body,
                              conjugate, dual_point, gauge, lq_norm, polar, polar_radial, radial,
                              support)
from polyfloat.errors import DomainError, ParameterError, StateError, UnsupportedError
from polyfloat.samplers import DistributionSpec

SQ2 = math.sqrt(2.0)


def test_lq_norm_examples():
    assert lq_norm([3, 4], 2) == 5.0
    assert lq_norm([3, 4], math.inf) == 4.0
    assert lq_norm([3, 4], 1) == 7.0
    assert lq_norm([3, 4], 3) == pytest.approx((27 + 64) ** (1 / 3))
    with pytest.raises(DomainError):
        lq_norm([1, 2], 0.5)


def test_radial_examples():
    assert radial(LqBall(1, 2, 3), [0.6, 0.8, 0]) == pytest.approx(1.0)
    box = LqBall(1, math.inf, 2)
    assert radial(Intersection([box, LqBall(3, 2, 2)]), [1, 0]) == 1.0
    hull = ConvHullUnion([LqBall(1, 1, 2), LqBall(0.4, 2, 2)])
    assert radial(hull, [1, 1]) == pytest.approx(0.70711, abs=1e-5)


def test_polar_radial_examples():
    assert polar_radial(LqBall(1, 2, 2), [1, 0]) == 1.0
    assert polar_radial(LqBall(0.5, 1, 2), [1, 0]) == pytest.approx(2.0)
    p = 4.0
    hull = ConvHullUnion([LqBall(1, 1, 3), LqBall(1 / math.sqrt(p), 2, 3)])
    rng = np.random.default_rng(0)
    for _ in range(20):
        psi = rng.standard_normal(3)
        psi /= np.linalg.norm(psi)
        want = 1 / max(np.abs(psi).max(), np.linalg.norm(psi) / math.sqrt(p))
        assert polar_radial(hull, psi) == pytest.approx(want, rel=1e-12)
        # the polar is B_inf intersected with sqrt(p) B_2
        assert radial(polar(hull), psi) == pytest.approx(want, rel=1e-12)


def test_intersection_polar_radial_is_bracket():
    body = Intersection([LqBall(1, math.inf, 2), LqBall(1.2, 2, 2)])
    out = polar_radial(body, [1, 1])
    assert isinstance(out, PolarBounds) and out.approximate
    assert out.lower <= out.upper


@settings(max_examples=50, deadline=None)
@given(st.floats(0.1, 5), st.sampled_from([1.0, 1.5, 2.0, 3.0, math.inf]),
       st.lists(st.floats(-1, 1), min_size=3, max_size=3).filter(lambda v: np.linalg.norm(v) > 1e-3))
def test_polarity_involution(rho, q, psi):
    ball = LqBall(rho, q, 3)
    assert polar_radial(polar(ball), psi) == pytest.approx(radial(ball, psi), rel=1e-12)
    # hull polar is an intersection, whose radial is exact
    hull = ConvHullUnion([ball, LqBall(rho / 2, 2, 3)])
    assert radial(polar(hull), psi) == pytest.approx(polar_radial(hull, psi), rel=1e-12)
    # gauge of the polar equals the support function
    assert GaugeBody(ball).gauge(psi) == pytest.approx(support(ball, psi), rel=1e-12)


def test_conjugate():
    assert conjugate(1.0) == math.inf
    assert conjugate(math.inf) == 1.0
    assert conjugate(2.0) == 2.0
    assert conjugate(1.5) == pytest.approx(3.0)


@pytest.mark.parametrize("q", [1.0, 1.5, 2.0, math.inf])
def test_dual_point_exposes_gauge(q):
    ball = LqBall(0.7, q, 4)
    t = np.array([0.3, -1.2, 0.5, 0.1])
    u = dual_point(ball, t)
    assert u @ t == pytest.approx(gauge(ball, t), rel=1e-12)
    assert support(polar(ball), t) >= u @ t - 1e-12


def test_closed_forms():
    g = closed_form_floating_body(DistributionSpec.gaussian(3), math.log(40))
    assert g.tag == "exact" and g.body.q == 2
    assert g.body.radius == pytest.approx(0.51021, abs=1e-5)
    c = closed_form_floating_body(DistributionSpec.stable(1.0, 3), math.log(10))
    assert c.body.q == 1 and c.body.radius == pytest.approx(0.64984, abs=1e-5)
    r = closed_form_floating_body(DistributionSpec.rademacher(3), 4.0)
    assert r.tag == "equivalent-up-to-constants"
    assert [(b.radius, b.q) for b in r.body.members] == [(1.0, 1.0), (0.5, 2.0)]
    with pytest.raises(UnsupportedError):
        closed_form_floating_body(DistributionSpec.student_t(5, 3), 2.0)
    with pytest.raises(UnsupportedError):
        closed_form_floating_body(DistributionSpec.stable(1.5, 3), 2.0)


def test_closed_form_monotone_in_p():
    spec = DistributionSpec.stable(1.0, 2)
    radii = [closed_form_floating_body(spec, p).body.radius for p in (1.0, 2.0, 3.0, 5.0)]
    assert radii == sorted(radii, reverse=True)


@pytest.mark.parametrize("q,p", [(1.0, math.log(10)), (2.0, 2.0), (1.0, 3.5)])
def test_stable_membership_by_definition(q, p):
    body = closed_form_floating_body(DistributionSpec.stable(q, 2), p).body
    for frac in (0.5, 0.9, 0.999):
        s = frac * body.radius  # ||t||_q
        if q == 1.0:
            tail = stats.cauchy(scale=0.5).sf(1 / s)
        else:
            tail = special.ndtr(-1 / s)
        assert tail <= math.exp(-p)


def test_empirical_lookup_and_errors():
    d = np.array([[1, 0], [-1, 0], [0, 1], [0, -1]], dtype=float)
    e = Empirical(d, [1.0, 1.0, 2.0, 2.0])
    assert radial(e, [0, 3]) == 2.0
    with pytest.warns(NearestDirectionWarning):
        assert radial(e, [1, 0.1]) == 1.0
    assert e.symmetry_pairs() == [(0, 1), (2, 3)]
    with pytest.raises(StateError):
        radial(Empirical(np.zeros((0, 2)), []), [1, 0])
    with pytest.raises(ParameterError):
        Empirical(d, [1, 1, 1, -1])


def test_parameter_validation():
    with pytest.raises(ParameterError):
        LqBall(0, 2, 2)
    with pytest.raises(ParameterError):
        ConvHullUnion([LqBall(1, 2, 2), LqBall(1, 2, 3)])
    with pytest.raises(DomainError):
        radial(LqBall(1, 2, 2), [0, 0])
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        assert gauge(LqBall(2, 1, 2), [1, 1]) == pytest.approx(1.0)
