"""Floating bodies of light- and heavy-tailed vectors, and the polytope containing their polars.

Run with ``python3 demos/floating_bodies.py``.
"""


import numpy as np

from polyfloat.bodies import closed_form_floating_body, polar_radial
from polyfloat.floating import estimate_floating_body
from polyfloat.inclusion import boundary_sweep, certify_points, p_rule
from polyfloat.samplers import DistributionSpec, sample_matrix, sphere_directions


def main():
    n, N, alpha = 10, 1000, 0.5
    p = p_rule(alpha, N, n)
    print(f"n={n}, N={N}, p = alpha log(eN/n) = {p:.3f}\n")

    dirs = sphere_directions(n, 5, 0)
    for spec in (DistributionSpec.gaussian(n), DistributionSpec.stable(1.0, n)):
        exact = closed_form_floating_body(spec, p).body
        est = estimate_floating_body(spec, p, dirs, m=200_000, seed=1)
        print(f"{spec.family:9s} closed form: {exact.radius:.4f} B_{exact.q:g}")
        for theta, r in zip(dirs, est.body.radii):
            ref = exact.radius / np.sum(np.abs(theta) ** exact.q) ** (1 / exact.q)
            print(f"    radial {r:.4f}   closed form {ref:.4f}")

        G = sample_matrix(spec, N, 7)
        sweep = boundary_sweep(G, exact, M=500, threshold=0.5, seed=2)
        cert = certify_points(G.T, exact, c=0.5, M=50, seed=3)
        print(f"    min over boundary of |Gamma t|_inf = {sweep.min_sup_norm:.3f}: {sweep.statement}")
        print(f"    largest quotient norm of 1/2 K_p° points = {cert.max_quotient:.3f}: {cert.statement}")
        e1 = np.eye(n)[0]
        print(f"    polar radial at e_1: {polar_radial(exact, e1):.3f}\n")

    print("The Cauchy body is an l1 ball, so its polar is a cube: the random polytope")
    print(f"reaches out to about (N/n)^(alpha) = {(N / n) ** alpha:.1f} times further along the axes.")


if __name__ == "__main__":
    main()
