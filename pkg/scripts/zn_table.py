#!/usr/bin/env python3
"""Print the z(n) table and cross-check it against the entropy minimax.

Two independent computations of the same quantity: the scalar root equation
for gamma, and the max-min marginal entropy program on the triples summing
to n-1.

Usage: python scripts/zn_table.py [max_n]
"""

import sys
import time

from tenspect.asymptotics import reduced_polymult_support, z_of_n
from tenspect.entropy import max_min_entropy


def main():
    max_n = int(sys.argv[1]) if len(sys.argv) > 1 else 10
    print(f"{'n':>3} {'gamma':>12} {'z(n)':>12} {'2^minimax':>12} {'diff':>10}")
    for n in range(2, max_n + 1):
        t0 = time.perf_counter()
        res = z_of_n(n)
        mm = max_min_entropy(reduced_polymult_support(n))
        cross = 2.0 ** mm.value
        dt = time.perf_counter() - t0
        print(f"{n:>3} {res.gamma:>12.7f} {res.z:>12.7f} {cross:>12.7f} "
              f"{abs(res.z - cross):>10.2e}  [{dt * 1e3:.0f} ms, "
              f"gap {mm.gap:.1e}]")


if __name__ == "__main__":
    main()
