"""Exact null space constants on small Gaussian matrices and what they predict.

Run with ``python3 demos/nsp_and_recovery.py``.
"""

import numpy as np

from polyfloat.l1opt import basis_pursuit
from polyfloat.recovery import nsp_constant, nsp_error_constant, sparse_signal
from polyfloat.samplers import DistributionSpec, sample_matrix


def main():
    N, s = 10, 2
    gen = np.random.default_rng(0)
    for n in (4, 6, 8, 9):
        A = sample_matrix(DistributionSpec.gaussian(N), n, n)
        res = nsp_constant(A, s)
        errs = [np.abs(basis_pursuit(A, A @ x) - x).sum() for x in (sparse_signal(N, s, gen) for _ in range(10))]
        print(f"n={n}: rho = {res.rho:.3f} from {res.lp_count} LPs, "
              f"error constant {nsp_error_constant(res.rho):.2f}, worst recovery error {max(errs):.1e}")


if __name__ == "__main__":
    main()
