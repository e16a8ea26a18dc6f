#!/usr/bin/env python3
"""Sweep random complex tensors and print the functional sandwich margins.

For each tensor the script evaluates, at the standard basis and a random
unitary basis: the maximal-point entropy, the support entropy, the finite
level projector certificate, and the ascent lower bound, then prints how
much slack each inequality in the chain has.

Usage: python scripts/sandwich_sweep.py [count] [seed]
"""

import sys

import numpy as np

import tenspect as ts
from tenspect.entropy import ThetaWeights
from tenspect.quantum import (AscentOptions, lower_quantum_functional,
                              upper_quantum_certificate)
from tenspect.support_functionals import rho_lower_at_basis, rho_upper_at_basis
from tenspect.tensors import BasisTuple


def main():
    count = int(sys.argv[1]) if len(sys.argv) > 1 else 10
    seed = int(sys.argv[2]) if len(sys.argv) > 2 else 0
    rng = np.random.default_rng(seed)
    theta = ThetaWeights.uniform(3)
    opts = AscentOptions(starts=3, max_iter=300, seed=seed)
    print(f"{'dims':>10} {'rho_low':>9} {'rho_up':>9} {'cert':>9} "
          f"{'ascent':>9} {'min slack':>10}")
    for _ in range(count):
        dims = tuple(int(d) for d in rng.integers(2, 4, size=3))
        arr = rng.standard_normal(dims) + 1j * rng.standard_normal(dims)
        arr *= rng.random(dims) < 0.8
        if np.abs(arr).max() < 1e-9:
            arr[(0,) * 3] = 1.0
        t = ts.Tensor(dims, ts.COMPLEXFLOAT, arr)
        basis = BasisTuple.standard(t)
        lo = rho_lower_at_basis(t, basis, theta)
        up = rho_upper_at_basis(t, basis, theta)
        cert = upper_quantum_certificate(t, theta, 3).value
        ascent = lower_quantum_functional(t, theta, opts).value
        slack = min(up - lo, up - cert, up - ascent)
        print(f"{str(dims):>10} {lo:>9.5f} {up:>9.5f} {cert:>9.5f} "
              f"{ascent:>9.5f} {slack:>10.2e}")


if __name__ == "__main__":
    main()
