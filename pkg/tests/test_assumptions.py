import math

import numpy as np
import pytest

from polyfloat.assumptions import (default_directions, domination_check, estimate_Lr,
                                   estimate_small_ball, hoeffding_halfwidth, polarity_chain,
                                   regularity_constant, unconditional_comparison,
                                   unconditional_constant, unconditional_gate)
from polyfloat.errors import MomentError, ParameterError, PreconditionError
from polyfloat.samplers import DistributionSpec

G = DistributionSpec.gaussian(3)
R = DistributionSpec.rademacher(3)
C = DistributionSpec.stable(1.0, 3)
AX = np.eye(3)


def test_default_directions_and_halfwidth():
    d = default_directions(4, 0)
    assert d.shape == (208, 4)
    assert np.array_equal(d[-4:], -np.eye(4))
    assert hoeffding_halfwidth(1000, 10) == pytest.approx(math.sqrt(math.log(400) / 2000))


def test_small_ball_examples():
    assert estimate_small_ball(R, 2.0, 1.0, AX, 10_000).value == 1.0
    assert estimate_small_ball(G, 2.0, 0.0, None, 1000).value == 1.0
    est = estimate_small_ball(C, 1.0, 0.1, None, 100_000, 1)
    target = 1 - 2 / math.pi * math.atan(0.2)
    assert target == pytest.approx(0.87433, abs=1e-5)
    assert est.value >= target - 2 * est.halfwidth


def test_small_ball_monotone_in_gamma():
    vals = [estimate_small_ball(G, 2.0, g, None, 20_000, 3).value for g in (0.1, 0.5, 1.0, 2.0)]
    assert vals == sorted(vals, reverse=True)


def test_Lr_examples():
    assert estimate_Lr(G, 2.0, 2.0, None, 100_000, 1).value == pytest.approx(1.0, rel=0.02)
    assert estimate_Lr(R, 2.0, 2.0, None, 100_000, 1).value == pytest.approx(1.0, rel=0.02)
    est = estimate_Lr(C, 1.0, 0.5, AX, 200_000, 1)
    # scalar moment E|xi|^(1/2) for Cauchy(1/2) is 0.5^(1/2) / cos(pi/4)
    want = (math.sqrt(0.5) / math.cos(math.pi / 4)) ** 2
    assert np.allclose(est.per_direction, want, rtol=0.03)
    with pytest.raises(MomentError):
        estimate_Lr(C, 1.0, 1.0)


def test_Lr_monotone_in_r():
    vals = [estimate_Lr(G, 2.0, r, None, 20_000, 3).value for r in (0.5, 1.0, 2.0, 3.0)]
    assert vals == sorted(vals)


def test_regularity():
    D = regularity_constant(G, (2.0,), AX, 400_000, 1)
    assert D.value == pytest.approx(3 ** 0.25, rel=0.03)
    assert np.all(D.details["ratios"] >= 1.0)
    L = regularity_constant(DistributionSpec.logconcave_exp(3), (1.0, 2.0, 4.0), None, 50_000, 1)
    assert L.value <= 24
    with pytest.raises(MomentError, match="q=2.0"):
        regularity_constant(DistributionSpec.student_t(3, 3), (1.0, 2.0))


def test_polarity_chain_gaussian():
    gamma = 1.0
    delta = estimate_small_ball(G, 2.0, gamma, None, 100_000, 1).value
    L = estimate_Lr(G, 2.0, 2.0, None, 100_000, 1).value
    assert polarity_chain(G, 2.0, gamma, delta * 0.98, L * 1.02, None, 100_000, 1) == []


def test_domination():
    assert domination_check(G, G, 1.0, 1.0, None, m=50_000, seed=1).ok
    rep = domination_check(G, DistributionSpec.gaussian(3, scale=10.0), 1.0, 1.0, None, m=50_000, seed=1)
    assert not rep.ok and rep.max_deficit > 0.3
    # scalar step: P(|x| >= gamma0) >= delta0 gives domination of Rademacher
    lap = DistributionSpec.logconcave_exp(3)
    gamma0 = 0.5
    delta0 = math.exp(-math.sqrt(2) * gamma0)  # P(|Laplace(unit var)| >= gamma0)
    assert domination_check(lap, R, delta0, 1 / gamma0, AX, m=100_000, seed=2).ok
    with pytest.raises(ParameterError):
        domination_check(G, G, 1.5, 1.0)


def test_unconditional():
    assert unconditional_constant(1.0) == pytest.approx(
        math.sqrt(2) * math.e * (4 * math.log(8) + math.log(4 / math.e)))
    assert unconditional_gate(1.0) == pytest.approx(4 * math.log(8) + math.log(4))
    halfg = DistributionSpec.unconditional(G)
    gamma = 0.5
    p = unconditional_gate(0.5) + 0.1
    rep = unconditional_comparison(halfg, p, gamma, delta=0.5, directions=np.vstack([AX, [1, 1, 1]]),
                                   seed=3)
    assert rep.ok
    with pytest.raises(PreconditionError, match="gate"):
        unconditional_comparison(halfg, 3.0, gamma, delta=0.5)
    with pytest.raises(ParameterError):
        unconditional_comparison(G, p, gamma)
