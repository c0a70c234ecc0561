"""The family where the distance-1 relaxation lies by a factor of s/2.

For even s, the instance has s*s vertices on a cycle with distances
ceil(cyclic hops / s), k = s centers, and alpha = s-1 tolerated failures.
Opening y = 1/s everywhere satisfies every failure-scenario row of the
relaxation at radius 1, yet no integral solution does better than radius
s/2.  This is why the fractional optimum cannot drive the approximation
factor, and why the pipelines certify against tau* instead.

Run:  python3 demos/gap_family.py
"""

import time
from fractions import Fraction

from ftkcenter.oracle import exact_opt_ft, gap_instance, relaxed_ilp_holds


def main():
    for s in (2, 4):
        t0 = time.perf_counter()
        inst = gap_instance(s)
        G = inst.threshold_graph(Fraction(1))
        y = {v: Fraction(1, s) for v in range(inst.n)}
        holds = relaxed_ilp_holds(G, y, inst.capacities, inst.k, inst.alpha)
        opt2, witness = exact_opt_ft(inst, max_n=inst.n)
        took = time.perf_counter() - t0
        print(f"{inst.name}: n={inst.n}, k={inst.k}, alpha={inst.alpha}")
        print(f"  y = 1/{s} feasible for the distance-1 relaxation: {holds}")
        print(f"  exact optimum radius: {int(opt2) ** 0.5:.0f} "
              f"(squared {opt2}, witness {witness})")
        print(f"  fractional/integral gap: {s}/2 = {Fraction(s, 2)}  [{took:.2f}s]")
        print()


if __name__ == "__main__":
    main()
