"""Extreme singular values of matrices with i.i.d. entries."""
from __future__ import annotations

import math

import numpy as np

from ..ensembles import bernoulli, gaussian, sample_matrix_rows
from ..seeding import as_seed, map_ordered
from ..spectra import svd_values
from .report import (HOLDS, VIOLATED, ExperimentReport, TrialRecord, Verdict, mean_se,
                     proportion_se)


def isotropic_gap(s_min, s_max, N):
    """``|A*A/N - I|`` from the extreme singular values of ``A``."""
    return max(abs(s_max * s_max / N - 1.0), abs(s_min * s_min / N - 1.0))


def _extremes(spec, N, seed):
    s = svd_values(sample_matrix_rows(spec, N, seed))
    return s.s_min, s.s_max


def _gaussian_trials(N, n, trials, seed, threads):
    seed = as_seed(seed)
    spec = gaussian(n)
    return np.array(map_ordered(lambda t: _extremes(spec, N, seed.child(t)),
                                range(int(trials)), threads))


def verify_gordon(N, n, trials, seed, threads=None) -> ExperimentReport:
    """Gordon's bounds ``sqrt(N) - sqrt(n) <= E s_min <= E s_max <= sqrt(N) + sqrt(n)``.

    Holds when the sample means clear the bounds within three standard errors.
    """
    if N < n:
        raise ValueError("need N >= n")
    ext = _gaussian_trials(N, n, trials, seed, threads)
    lo, hi = math.sqrt(N) - math.sqrt(n), math.sqrt(N) + math.sqrt(n)
    m_min, se_min = mean_se(ext[:, 0])
    m_max, se_max = mean_se(ext[:, 1])
    records = [TrialRecord(t, a, b, isotropic_gap(a, b, N)) for t, (a, b) in enumerate(ext)]
    ok_lo = m_min >= lo - 3 * se_min
    ok_hi = m_max <= hi + 3 * se_max
    verdict = Verdict(HOLDS) if ok_lo and ok_hi else Verdict(
        VIOLATED, details=f"mean s_min={m_min:.6g} vs {lo:.6g}, mean s_max={m_max:.6g} vs {hi:.6g}")
    agg = {"mean_s_min": m_min, "se_s_min": se_min, "mean_s_max": m_max, "se_s_max": se_max,
           "lower_bound": lo, "upper_bound": hi,
           "median_gap": float(np.median([r.gap for r in records]))}
    cfg = {"name": "gordon", "N": N, "n": n, "trials": int(trials),
           "seed": as_seed(seed).to_dict()}
    return ExperimentReport(cfg, records, agg, verdict)


def verify_gaussian_deviation(N, n, t, trials, seed, threads=None) -> ExperimentReport:
    """``P{sqrt(N)-sqrt(n)-t <= s_min <= s_max <= sqrt(N)+sqrt(n)+t} >= 1 - 2exp(-t^2/2)``."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    ext = _gaussian_trials(N, n, trials, seed, threads)
    lo = math.sqrt(N) - math.sqrt(n) - t
    hi = math.sqrt(N) + math.sqrt(n) + t
    inside = (ext[:, 0] >= lo) & (ext[:, 1] <= hi)
    p = float(inside.mean())
    se = proportion_se(p, len(inside))
    bound = 1.0 - 2.0 * math.exp(-t * t / 2.0)
    ok = p >= max(bound, 0.0) - 3 * se
    records = [TrialRecord(i, a, b, isotropic_gap(a, b, N), (bool(inside[i]),))
               for i, (a, b) in enumerate(ext)]
    verdict = Verdict(HOLDS) if ok else Verdict(
        VIOLATED, details=f"empirical {p:.6g} < bound {bound:.6g} - 3se")
    agg = {"empirical_probability": p, "se": se, "bound": bound, "lower_edge": lo,
           "upper_edge": hi}
    cfg = {"name": "gaussian_deviation", "N": N, "n": n, "trials": int(trials),
           "seed": as_seed(seed).to_dict(), "params": {"t": t}}
    return ExperimentReport(cfg, records, agg, verdict, ("inside",))


def verify_bai_yin(N, n, seed, entries="gaussian", tol_max=0.05, tol_min=0.05) -> ExperimentReport:
    """One draw: ``s_max / (sqrt N + sqrt n)`` and ``s_min / (sqrt N - sqrt n)``
    should both be close to 1. The lower ratio is undefined for ``N = n``."""
    if N < n:
        raise ValueError("need N >= n")
    spec = {"gaussian": gaussian, "bernoulli": bernoulli}[entries](n)
    s_min, s_max = _extremes(spec, N, as_seed(seed))
    r_max = s_max / (math.sqrt(N) + math.sqrt(n))
    r_min = s_min / (math.sqrt(N) - math.sqrt(n)) if N != n else math.nan
    ok = abs(r_max - 1) <= tol_max and (N == n or abs(r_min - 1) <= tol_min)
    details = "" if N != n else "lower ratio undefined for N = n"
    verdict = Verdict(HOLDS, details=details) if ok else Verdict(
        VIOLATED, details=f"ratios s_max {r_max:.6g}, s_min {r_min:.6g}")
    rec = TrialRecord(0, s_min, s_max, isotropic_gap(s_min, s_max, N), (r_min, r_max))
    agg = {"ratio_max": r_max, "ratio_min": r_min, "tol_max": tol_max, "tol_min": tol_min}
    cfg = {"name": "bai_yin", "N": N, "n": n, "trials": 1, "seed": as_seed(seed).to_dict(),
           "params": {"entries": entries}}
    return ExperimentReport(cfg, [rec], agg, verdict, ("ratio_min", "ratio_max"))


__all__ = ["verify_gordon", "verify_gaussian_deviation", "verify_bai_yin", "isotropic_gap"]
