"""The tools behind the bounds: nets, scalar tails, sums of random matrices.

    python demos/nets_and_tails.py
"""
import numpy as np

from rmt_lab.matrixsum import (empirical_matrix_sum_tail, matrix_bernstein_bound,
                               sign_diagonal_ensemble)
from rmt_lab.nets import build_net, covering_radius_mc, norm_via_net
from rmt_lab.scalartails import (TailBoundParams, bernstein_bound, hoeffding_bound,
                                 khintchine_sandwich)
from rmt_lab.seeding import SeedSpec, standard_normal
from rmt_lab.spectra import spectral_norm

# a greedy net on the sphere and the norm sandwich it gives
for eps in (0.5, 0.25):
    net = build_net(3, eps, seed=0)
    print(f"eps={eps}: {len(net)} points (bound {net.cardinality_bound:.0f}), "
          f"covering radius ~ {covering_radius_mc(net, 5000):.3f}")
A = standard_normal(SeedSpec(1).generator(), (6, 3))
lo, hi = norm_via_net(A, net)
print(f"|A| = {spectral_norm(A):.4f} in [{lo:.4f}, {hi:.4f}]")

# Rademacher sums: exact L^p norms against |a|_2 and sqrt(p)|a|_2
a = np.arange(1.0, 11.0)
for p in (2, 4, 8):
    s = khintchine_sandwich(a, p)
    print(f"p={p}: {s.lower:.3f} <= {s.exact:.3f}, constant {s.constant:.3f}")

# sub-gaussian vs sub-exponential tails of a sum of 100 terms
prm = TailBoundParams(K=1.0, a=tuple(np.full(100, 0.1)))
for t in (2.0, 4.0, 6.0, 8.0):
    print(f"t={t}: Hoeffding {hoeffding_bound(prm, t):.3g}, Bernstein {bernstein_bound(prm, t):.3g}")

# matrix Bernstein on a sum of random sign diagonals
ens = sign_diagonal_ensemble(20)
cmp = empirical_matrix_sum_tail(ens, [0.3, 0.5, 0.7], 2000, seed=2)
for t, emp, bound, _ in cmp.rows:
    print(f"P(|sum| >= {t}) = {emp:.4f} <= {bound:.4f}")
print(f"bound formula at t=1: {matrix_bernstein_bound(ens.n, ens.sigma2, ens.K, 1.0):.3g}")
