"""Restricted isometry constants, computed exactly.

delta_k(A) is the worst deviation from 1 of the squared singular values of
any k-column submatrix. For small n it can be found by enumerating all
supports; Monte Carlo over random supports only gives a lower bound. We
compare the two, then watch delta_2 fall as Bernoulli and partial Fourier
matrices get more rows.

    python demos/restricted_isometry.py
"""
import numpy as np

from rmt_lab.ensembles import bernoulli
from rmt_lab.rip import (build_partial_dft, concentration_to_rip, delta_k_exact,
                         delta_k_monte_carlo, normalize_columns, verify_fourier_rip,
                         verify_subgaussian_rip)
from rmt_lab.seeding import SeedSpec, standard_normal

A = normalize_columns(standard_normal(SeedSpec(0).generator(), (12, 20)))
for k in (1, 2, 3, 4):
    ex = delta_k_exact(A, k)
    mc = delta_k_monte_carlo(A, k, 200, seed=1)
    print(f"k={k}: exact {ex.delta:.4f} over {ex.subsets_examined:5d} supports, "
          f"MC lower bound {mc.delta:.4f}, worst support {ex.worst_subset}")

rep = verify_subgaussian_rip(bernoulli(16), [8, 16, 32, 64], 2, 30, seed=2)
print("\nBernoulli n=16, k=2: median delta_2 by number of rows")
for m, d in zip(rep.aggregates["m"], rep.aggregates["median_delta"]):
    print(f"  m={m:3d}  {d:.3f}")
print(f"  {rep.verdict}")

rep = verify_fourier_rip(64, [8, 16, 32, 64], 4, 10, seed=3)
print("\nPartial DFT n=64, k=4: mean delta_4")
for m, d in zip(rep.aggregates["m"], rep.aggregates["mean_delta"]):
    print(f"  m={m:3d}  {d:.3f}")
print(f"  all rows: {rep.aggregates['anchor_delta']:.2e}")

# a complex matrix goes through the same routine
F = build_partial_dft(32, 16, seed=4) / np.sqrt(16)
print(f"\npartial DFT 16 x 32: delta_2 = {delta_k_exact(F, 2).delta:.4f}")

# from a concentration inequality to RIP, via a union bound over supports:
# P{| |Ax|^2 - 1 | > delta} <= 2 exp(-epsilon m) per vector gives delta_k <= 2 delta
r = concentration_to_rip(n=1000, k=5, delta=0.25, epsilon=0.01)
print(f"\nn=1000 k=5: m >= {r.required_m} rows give delta_5 <= {r.delta_conclusion} "
      f"except with probability {r.failure_probability:.1e}")
