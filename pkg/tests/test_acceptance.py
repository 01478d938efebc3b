"""Acceptance suite: one PASS/FAIL line per criterion, tolerances fixed in advance.

Run on its own with ``python3 -m pytest tests/test_acceptance.py -s`` or
``python3 tests/test_acceptance.py``.  Lines are printed even without ``-s``.
"""

import filecmp
import math
import time

import numpy as np
import pytest

from oracles import in_scaled_absconv, quotient_by_enumeration
from tiny_configs import TINY, tiny

from polyfloat.assumptions import estimate_Lr, estimate_small_ball
from polyfloat.bodies import closed_form_floating_body
from polyfloat.cli import run
from polyfloat.config import KINDS, ExperimentConfig
from polyfloat.floating import estimate_floating_body, estimate_radial, lp_equivalence_check, sandwich_check
from polyfloat.inclusion import boundary_sweep, chernoff_count, p_rule, scaling_exponent_fit
from polyfloat.l1opt import basis_pursuit, quotient_norm
from polyfloat.recovery import (nsp_constant, quotient_constant, recovery_experiment,
                                sparse_signal, summarize_recovery)
from polyfloat.samplers import DistributionSpec, sample_matrix, sphere_directions
from polyfloat.seeding import derive_seed

pytestmark = pytest.mark.acceptance


@pytest.fixture
def report(capsys):
    t0 = time.perf_counter()

    def emit(number, ok, detail, limit=None):
        dt = time.perf_counter() - t0
        over = limit is not None and dt >= limit
        status = "PASS" if ok and not over else "FAIL"
        tail = f" [runtime {dt:.1f}s" + (f" >= {limit}s limit]" if over else "]")
        with capsys.disabled():
            print(f"\n{status} criterion {number}: {detail}{tail}")
        assert ok, detail
        assert not over, f"runtime {dt:.1f}s exceeds {limit}s"

    return emit


def test_c01_lp_oracle_equivalence(report):
    rng = np.random.default_rng(101)
    worst = 0.0
    for _ in range(200):
        n = int(rng.integers(1, 4))
        N = int(rng.integers(n, 7))
        A = rng.standard_normal((n, N))
        w = rng.standard_normal(n)
        worst = max(worst, abs(quotient_norm(A, w).value - quotient_by_enumeration(A, w)))
    mismatches = 0
    for _ in range(50):
        n = int(rng.integers(2, 4))
        N = int(rng.integers(n + 1, 6))
        A = rng.standard_normal((n, N))
        w = rng.standard_normal(n)
        q = quotient_norm(A, w).value
        for c in (0.5 * q, 0.99 * q, 1.01 * q, 2.0 * q):
            mismatches += (q <= c + 1e-9) != in_scaled_absconv(A, w, c)
    report(1, worst <= 1e-8 and mismatches == 0,
           f"max |q - enumeration| = {worst:.2e} over 200 instances (tol 1e-8); "
           f"membership mismatches {mismatches}/200 over 50 instances", limit=60)


def test_c02_estimator_consistency(report):
    cases = [("gaussian", DistributionSpec.gaussian(3)), ("cauchy", DistributionSpec.stable(1.0, 3))]
    lines, ok = [], True
    for name, spec in cases:
        for p in (math.log(10), math.log(40)):
            exact = closed_form_floating_body(spec, p).body.radius
            good = 0
            for rep in range(100):
                r = estimate_radial(spec, [1.0, 0.0, 0.0], p, 10 ** 6, derive_seed(2, rep, f"{name}/{p}"))
                good += abs(r / exact - 1) <= 0.05
            ok &= good >= 95
            lines.append(f"{name} p=ln{round(math.exp(p))}: {good}/100")
    report(2, ok, "within 5% of closed form: " + ", ".join(lines) + " (need >= 95)", limit=300)


def test_c03_gaussian_sweep(report):
    n, N, alpha = 20, 2000, 0.5
    spec = DistributionSpec.gaussian(n)
    p = p_rule(alpha, N, n)
    body = closed_form_floating_body(spec, p).body
    mins = []
    for k in range(50):
        G = sample_matrix(spec, N, derive_seed(3, k, "matrix"))
        mins.append(boundary_sweep(G, body, 1000, 0.5, derive_seed(3, k, "directions")).min_sup_norm)
    mins = np.array(mins)
    rate = float(np.mean(mins >= 0.5))
    report(3, rate >= 0.95, f"pass rate {rate:.2f} at c=1/2 over 50 trials (need >= 0.95); "
           f"min sweep value {mins.min():.3f}", limit=300)


def test_c04_scaling_exponent(report):
    ratios = [8, 16, 32, 64]
    cauchy = scaling_exponent_fit(1.0, 0.5, ratios, trials=50, seed=4, n=16)
    gauss = scaling_exponent_fit(2.0, 0.5, ratios, trials=50, seed=4, n=16)
    ok = abs(cauchy.slope - 0.5) <= 0.15 and gauss.slope <= 0.1
    report(4, ok, f"Cauchy slope {cauchy.slope:.3f} (target 0.5 +/- 0.15), Gaussian slope "
           f"{gauss.slope:.3f} (need <= 0.1); Euclidean-radius slopes {cauchy.raw_slope:.3f} / "
           f"{gauss.raw_slope:.3f} for reference", limit=1200)


def test_c05_chernoff(report):
    N, p = 2000, 2.0
    spec = DistributionSpec.gaussian(10)
    body = closed_form_floating_body(spec, p).body
    hits = 0
    for k in range(100):
        theta = sphere_directions(10, 1, derive_seed(5, k, "direction"))[0]
        G = sample_matrix(spec, N, derive_seed(5, k, "matrix"))
        hits += chernoff_count(G, body.radius * theta, p).passed
    report(5, hits >= 95, f"count >= (N/2)e^-p in {hits}/100 trials (need >= 95)", limit=60)


def _sandwich_and_equivalence(name, spec, p, D, seed):
    dirs = sphere_directions(spec.dim, 200, derive_seed(seed, 0, "dirs"))
    m = 10 ** 5
    gamma = 0.5
    sb = estimate_small_ball(spec, 2.0, gamma, dirs, m, derive_seed(seed, 0, "small-ball"))
    delta = sb.value - sb.halfwidth
    L = estimate_Lr(spec, 2.0, 2.0, dirs, m, derive_seed(seed, 0, "Lr"))
    est = estimate_floating_body(spec, p, dirs, m, derive_seed(seed, 0, "body"))
    sw = sandwich_check(est, gamma, delta, L.value + L.halfwidth, 2.0)
    eq = lp_equivalence_check(spec, p, D, dirs, m, derive_seed(seed, 0, "equiv"))
    bad = len(sw.confident_violations) + len(eq.left_confident_violations) + len(eq.right_confident_violations)
    return bad, f"{name} p={p:g}: {bad}"


def test_c06_sandwich_and_equivalence(report):
    # D for the Gaussian is sup_q ||g||_2q / ||g||_q = sqrt(2); D = 3 covers the Rademacher case
    cases = [("gaussian", DistributionSpec.gaussian(10), math.sqrt(2.0)),
             ("rademacher", DistributionSpec.rademacher(10), 3.0)]
    total, parts = 0, []
    for i, (name, spec, D) in enumerate(cases):
        for p in (2.0, 4.0):
            bad, line = _sandwich_and_equivalence(name, spec, p, D, 60 + 10 * i + int(p))
            total += bad
            parts.append(line)
    report(6, total == 0, "confident violations: " + ", ".join(parts) + " (need 0)", limit=300)


def test_c07_nsp_recovery(report):
    spec = DistributionSpec.gaussian(8)
    good = bad = failures = 0
    for k in range(30):
        A = sample_matrix(spec, 6, derive_seed(7, k, "matrix"))
        res = nsp_constant(A, 2)
        if res.rho < 1:
            good += 1
            gen = derive_seed(7, k, "signals").generator()
            for _ in range(20):
                x = sparse_signal(8, 2, gen)
                failures += np.abs(basis_pursuit(A, A @ x) - x).sum() > 1e-6
        else:
            bad += 1
            v = res.witness
            x = np.zeros(8)
            x[list(res.support)] = v[list(res.support)]
            witnessed = v is not None and np.abs(x - v).sum() <= np.abs(x).sum() + 1e-9
            failures += not witnessed
    report(7, failures == 0, f"{good} instances with rho < 1 (all 20 signals recovered to 1e-6 "
           f"unless counted), {bad} with rho >= 1 (witness required); failures {failures}", limit=300)


def test_c08_noise_blind_recovery(report):
    N, n = 256, 64
    spec = DistributionSpec.student_t(2 * math.log(N), N)
    rows = recovery_experiment(spec, n, 4, [0.0, 0.1, 1.0], trials=100, seed=8)
    s = summarize_recovery(rows)
    ok = math.isfinite(s["C95"]) and s["C95"] <= 10 and s["monotone"]
    med = ", ".join(f"{m:.3g}" for m in s["median_err"])
    report(8, ok, f"C95 = {s['C95']:.3f} (need finite and <= 10); medians {med} for "
           f"|w| = 0, 0.1, 1 (monotone: {s['monotone']})", limit=900)


def test_c09_quotient_constant(report):
    n, N = 20, 2000
    spec = DistributionSpec.gaussian(n)
    body = closed_form_floating_body(spec, p_rule(0.5, N, n)).body
    d = []
    for k in range(30):
        A = sample_matrix(spec, N, derive_seed(9, k, "matrix")).T
        d.append(quotient_constant(A, body, M=100, seed=derive_seed(9, k, "directions")).d_hat)
    d = np.array(d)
    rate = float(np.mean(d <= 2.0))
    report(9, rate >= 0.95, f"d_hat <= 2 in {rate:.2f} of 30 trials (need >= 0.95); "
           f"max d_hat {d.max():.3f}", limit=600)


def test_c10_determinism(report, tmp_path):
    same = []
    for kind in KINDS:
        outs = []
        for rep in ("a", "b"):
            cfg = ExperimentConfig.from_dict(tiny(kind, out=str(tmp_path / rep / kind)))
            run(cfg)
            outs.append(tmp_path / rep / kind / f"{kind}_rows.csv")
        same.append(filecmp.cmp(*outs, shallow=False))
    report(10, all(same) and len(same) == len(TINY),
           f"byte-identical row CSVs for {sum(same)}/{len(KINDS)} kinds")


if __name__ == "__main__":
    import sys
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
