"""Heavy-tailed rows through the simplest example: coordinate vectors.

Each row is sqrt(n) e_i with i uniform. The distribution is isotropic but
the matrix is singular until every coordinate has been drawn, so the
number of rows needed is governed by coupon collecting, n log n, and the
log factor in the heavy-tailed bounds cannot be removed.

    python demos/coordinate_rows.py
"""
import math

from rmt_lab.ensembles import coordinate
from rmt_lab.theorems import (coordinate_expected_max_deviation, coupon_all_covered_probability,
                              verify_coupon_collector, verify_heavy_tailed_rows,
                              verify_heavy_tailed_rows_expectation)

n = 10
rep = verify_coupon_collector(n, [10, 20, 40, 80], 1000, seed=3)
print(f"n={n}: P(s_min > 0) = P(all coupons seen)")
for row in rep.aggregates["by_N"]:
    print(f"  N={row['N']:3d}  empirical {row['empirical']:.3f}  exact {row['exact']:.3f}")
print(f"  n log n = {n * math.log(n):.1f}; verdict {rep.verdict}")

# at N = 2 n log n the bad event is already rare
N = int(2 * n * math.log(n))
print(f"\nN={N}: P(singular) = {1 - coupon_all_covered_probability(n, N):.4f}")

# how far the singular values stray from sqrt(N); small cases are exact
for N in (16, 64):
    print(f"E max_j |s_j - sqrt(N)|, n=2, N={N}: {coordinate_expected_max_deviation(2, N):.4f}")

rep = verify_heavy_tailed_rows_expectation(coordinate(16), 1024, 100, seed=4, check_scaling=True)
a = rep.aggregates
print(f"\nn=16 N=1024: E max deviation {a['estimate']:.3f} (se {a['se']:.3f}), "
      f"fitted constant {a['C_hat']:.3f}")
print(f"normalized by sqrt(N): {a['normalized_estimate']:.4f} -> "
      f"{a['normalized_estimate_4N']:.4f} at 4N")

rep = verify_heavy_tailed_rows(coordinate(20), 1200, 3, 300, seed=5)
a = rep.aggregates
print(f"\nn=20 N=1200 t=3: P(inside) = {a['empirical_probability']:.3f}, "
      f"largest admissible c = {a['c_hat']:.3f}")
