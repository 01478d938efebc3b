import math

import numpy as np
import pytest

from polyfloat.bodies import Empirical, LqBall, closed_form_floating_body, dual_point
from polyfloat.errors import ParameterError
from polyfloat.inclusion import (CERT_FAIL, CERT_PASS, SWEEP_FAIL, SWEEP_PASS, boundary_sweep,
                                 certify_points, chernoff_count, largest_passing_scale, p_rule,
                                 radials, scaling_exponent_fit, scaling_trial_scales, stable_body)
from polyfloat.samplers import DistributionSpec, sample_matrix


def test_sweep_trivial_cases():
    ball = LqBall(1.0, 2, 2)
    rep = boundary_sweep(np.zeros((5, 2)), ball, M=50, threshold=0.1)
    assert rep.min_sup_norm == 0 and not rep.passed and rep.statement == SWEEP_FAIL
    # a row meeting <X_i, t> >= 1 on the tested boundary point
    rep = boundary_sweep(np.array([[2.0, 0.0]]), ball, directions=[[1, 0]], threshold=1.0)
    assert rep.min_sup_norm >= 1 and rep.passed and rep.statement == SWEEP_PASS
    assert "not a proof" in SWEEP_PASS


def test_sweep_empirical_uses_own_table():
    body = Empirical(np.array([[1.0, 0], [0, 1.0]]), [1.0, 2.0])
    rep = boundary_sweep(np.eye(2), body, directions=[[1, 1]])
    assert rep.M == 2 and "direction table" in rep.notes[0]
    assert np.allclose(rep.values, [1.0, 2.0])


def test_radials_vectorized_matches_scalar():
    from polyfloat.bodies import ConvHullUnion, radial
    body = ConvHullUnion([LqBall(1, 1, 3), LqBall(0.5, 2, 3)])
    th = np.random.default_rng(0).standard_normal((10, 3))
    assert np.allclose(radials(body, th), [radial(body, t) for t in th], rtol=1e-14)


def test_certify_trivial_cases():
    A = np.random.default_rng(0).standard_normal((3, 10))
    rep = certify_points(A, LqBall(1, 2, 3), c=0.0, M=20)
    assert rep.passed and rep.max_quotient == 0 and rep.statement == CERT_PASS
    # a vertex is in the hull: body chosen so the tested point is column 0
    x = A[:, 0]
    body = LqBall(1.0 / np.linalg.norm(x), 2, 3)  # polar radial at x/|x| is |x|
    rep = certify_points(A, body, c=1.0, directions=[x])
    assert rep.max_quotient <= 1 + 1e-9 and rep.passed


def test_certify_infeasible_is_failure():
    A = np.array([[1.0, 2.0], [0.0, 0.0]])  # rank 1
    rep = certify_points(A, LqBall(1, 2, 2), c=0.1, directions=[[0, 1]])
    assert not rep.passed and math.isinf(rep.max_quotient) and rep.statement == CERT_FAIL


def test_certify_approximate_for_empirical():
    body = Empirical(np.vstack([np.eye(2), -np.eye(2)]), [1.0] * 4)
    rep = certify_points(np.eye(2), body, c=0.5, directions=[[1, 0]])
    assert rep.approximate


def _failing_instance(seed=3):
    spec = DistributionSpec.gaussian(5)
    G = sample_matrix(spec, 12, seed)
    body = closed_form_floating_body(spec, 1.0).body
    return G, body


@pytest.mark.parametrize("mode", ["symmetric", "one_sided"])
def test_sweep_failure_implies_certificate_failure(mode):
    G, body = _failing_instance()
    probe = boundary_sweep(G, body, M=300, threshold=0.0, seed=1, mode=mode)
    c = float(np.median(probe.values))  # roughly half the directions fail at this scale
    sweep = boundary_sweep(G, body, M=300, threshold=c, seed=1, mode=mode)
    assert sweep.failing_directions, "instance should fail somewhere"
    for theta in sweep.failing_directions[:10]:
        t = body.radius * theta  # boundary point
        u = dual_point(body, t)
        cert = certify_points(G.T, body, c=c, directions=[u], mode=mode)
        assert not cert.passed


@pytest.mark.parametrize("mode", ["symmetric", "one_sided"])
def test_monotone_in_c(mode):
    spec = DistributionSpec.gaussian(4)
    G = sample_matrix(spec, 200, 2)
    body = closed_form_floating_body(spec, p_rule(0.5, 200, 4)).body
    passes = [certify_points(G.T, body, c=c, M=40, seed=5, mode=mode).passed for c in (0.1, 0.3, 0.6, 1.5, 4.0)]
    # once it fails it keeps failing
    assert passes == sorted(passes, reverse=True)
    sweeps = [boundary_sweep(G, body, M=200, threshold=c, seed=5, mode=mode).passed for c in (0.1, 0.5, 1.0, 3.0)]
    assert sweeps == sorted(sweeps, reverse=True)


def test_one_sided_sweep_uses_max():
    G = np.array([[-3.0, 0.0], [0.5, 0.0]])
    sym = boundary_sweep(G, LqBall(1, 2, 2), directions=[[1, 0]], threshold=1)
    one = boundary_sweep(G, LqBall(1, 2, 2), directions=[[1, 0]], threshold=1, mode="one_sided")
    assert sym.min_sup_norm == 3.0 and one.min_sup_norm == 0.5


def test_chernoff_examples():
    G = np.array([[2.0, 0], [0.5, 0], [-3.0, 0]])
    rep = chernoff_count(G, [1.0, 0.0], 1.0)
    assert rep.count == 1 and rep.bound == pytest.approx(1.5 * math.exp(-1))
    assert chernoff_count(G, [0.0, 0.0], 1.0).count == 0


def test_chernoff_premise_gaussian():
    spec = DistributionSpec.gaussian(3)
    body = closed_form_floating_body(spec, 2.0).body
    t = np.array([body.radius, 0, 0])
    rep = chernoff_count(sample_matrix(spec, 2000, 1), t, 2.0, spec=spec, m=100_000, seed=9)
    assert rep.premise_ok and rep.passed
    assert rep.premise_tail == pytest.approx(math.exp(-2.0), abs=3 * rep.premise_halfwidth)


def test_p_rule_and_stable_body():
    assert p_rule(0.5, 2000, 20) == pytest.approx(0.5 * (1 + math.log(100)))
    b = stable_body(1.0, 4, math.log(10))
    assert b.q == 1 and b.radius == pytest.approx(1 / 1.5388417685876266)
    b15 = stable_body(1.5, 4, 2.0, m_quantile=200_000)
    assert b15.q == 1.5 and b15.radius > 0


def test_largest_passing_scale_is_order_statistic():
    s = np.arange(1.0, 11.0)  # 10 trials
    assert largest_passing_scale(s, 0.9) == 2.0  # 9 of 10 pass at c <= 2
    assert largest_passing_scale(s, 1.0) == 1.0
    assert largest_passing_scale(s, 0.05) == 10.0
    assert np.mean(s >= largest_passing_scale(s, 0.9)) >= 0.9


def test_scaling_trial_scales_certify_consistency():
    # each per-trial scale is the exact threshold for certify_points on ±e_i points
    scales, rho = scaling_trial_scales(1.0, 0.5, 8, 2, seed=4, n=4)
    from polyfloat.samplers import sample_matrix as sm
    from polyfloat.seeding import derive_seed
    body = stable_body(1.0, 4, p_rule(0.5, 32, 4))
    A = sm(DistributionSpec.stable(1.0, 4), 32, derive_seed(4, 0, "scaling/8.0")).T
    dirs = np.vstack([np.eye(4), -np.eye(4)])
    assert certify_points(A, body, c=scales[0] * (1 - 1e-7), directions=dirs).passed
    assert not certify_points(A, body, c=scales[0] * (1 + 1e-5), directions=dirs).passed


def test_scaling_fit_validation_and_notes():
    with pytest.raises(ParameterError):
        scaling_exponent_fit(1.0, 0.5, [8], trials=2, n=4)
    with pytest.raises(ParameterError):
        scaling_exponent_fit(1.0, 0.5, [8, 8.0], trials=2, n=4)
    fit = scaling_exponent_fit(1.0, 0.5, [4, 8], trials=3, n=4)
    assert any("underpowered" in s for s in fit.notes)
    assert fit.c_star.shape == (2,) and np.isfinite(fit.slope)
    assert fit.to_dict()["target_slope"] == 0.5
