"""Where the spectrum of a tall Gaussian matrix ends.

For an N x n matrix with i.i.d. standard normal entries the singular values
sit in [sqrt(N) - sqrt(n), sqrt(N) + sqrt(n)] on average, and the edges are
already sharp at moderate sizes. This script sweeps the aspect ratio n/N,
prints the Monte Carlo means next to those edges, then shows the one-draw
ratios for Gaussian and symmetric Bernoulli entries side by side.

    python demos/gaussian_edges.py
"""
import math

from rmt_lab.theorems import verify_bai_yin, verify_gaussian_deviation, verify_gordon

N = 400
print(f"Gaussian N={N}: mean extreme singular values vs the edges")
print(f"{'n':>5} {'lower':>8} {'E s_min':>8} {'E s_max':>8} {'upper':>8}  verdict")
for n in (1, 10, 50, 100, 200):
    rep = verify_gordon(N, n, 20, seed=n)
    a = rep.aggregates
    print(f"{n:5d} {a['lower_bound']:8.3f} {a['mean_s_min']:8.3f} "
          f"{a['mean_s_max']:8.3f} {a['upper_bound']:8.3f}  {rep.verdict}")

# the edges are not just right on average: fluctuations are O(1), not O(sqrt n)
rep = verify_gaussian_deviation(200, 50, 2.0, 300, seed=1)
a = rep.aggregates
print(f"\nP(inside edges -+ 2) = {a['empirical_probability']:.3f}, "
      f"guaranteed at least {a['bound']:.3f}")

print("\nOne draw, N=1000 n=250: ratio to sqrt(N) +- sqrt(n)")
for entries in ("gaussian", "bernoulli"):
    r = verify_bai_yin(1000, 250, seed=7, entries=entries).aggregates
    print(f"  {entries:9s} s_max ratio {r['ratio_max']:.4f}   s_min ratio {r['ratio_min']:.4f}")
print(f"(edges {math.sqrt(1000) - math.sqrt(250):.2f} and {math.sqrt(1000) + math.sqrt(250):.2f})")
