"""Restricted isometry constants and compressed-sensing measurement matrices.

``delta_k(A) = max_{|T| = k} |A_T* A_T - I|``. The exact evaluator walks all
``k``-subsets in colexicographic order; subsets whose Gershgorin bound
cannot beat the running maximum are skipped without an eigen-solve.
"""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .ensembles import dft_matrix, sylvester_hadamard
from .seeding import as_seed
from .spectra import as_matrix, load_matrix, svd_values  # noqa: F401  (matrix ingestion)

ENUMERATION_BUDGET = 10 ** 6
NORM_TOL = 1e-9
_CHUNK = 1 << 16


@dataclass
class RipReport:
    k: int
    method: str                 # "exact" or "monte_carlo(<trials>)"
    delta: float
    worst_subset: tuple
    subsets_examined: int
    matrix_shape: tuple
    extra: dict = field(default_factory=dict)

    def to_dict(self):
        return {"k": self.k, "method": self.method, "delta": self.delta,
                "worst_subset": list(self.worst_subset),
                "subsets_examined": self.subsets_examined,
                "matrix_shape": list(self.matrix_shape), **self.extra}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"


def check_unit_columns(A, tol=NORM_TOL):
    norms = np.linalg.norm(A, axis=0)
    bad = np.flatnonzero(np.abs(norms - 1.0) > tol)
    if bad.size:
        raise ValueError(f"columns {bad[:5].tolist()} are not unit-norm "
                         f"(e.g. {norms[bad[0]]!r}); normalize before computing delta_k")


def normalize_columns(A) -> np.ndarray:
    A = as_matrix(A)
    norms = np.linalg.norm(A, axis=0)
    if np.any(norms == 0):
        raise ValueError("cannot normalize a zero column")
    return A / norms


@lru_cache(maxsize=8)
def colex_subsets(n: int, k: int) -> np.ndarray:
    """All ``k``-subsets of ``range(n)`` as rows, in colexicographic order."""
    T = np.array(list(itertools.combinations(range(n), k)), dtype=np.int64).reshape(-1, k)
    order = np.lexsort(T.T)  # last column is the primary key
    T = T[order]
    T.setflags(write=False)
    return T


def _block_deltas(G, T):
    """``|G_T - I|`` for every row ``T`` of an index array."""
    k = T.shape[1]
    B = G[T[:, :, None], T[:, None, :]] - np.eye(k)
    w = np.linalg.eigvalsh(B)
    return np.maximum(w[:, -1], -w[:, 0])


def _gershgorin(absD, T):
    B = absD[T[:, :, None], T[:, None, :]]
    return B.sum(axis=2).max(axis=1)


def delta_k_exact(A, k, check_normalization=True) -> RipReport:
    """Exact restricted isometry constant over all subsets of size ``floor(k)``.

    Columns must be unit-norm (within 1e-9) unless ``check_normalization``
    is False; ties go to the first subset in colex order.
    """
    A = as_matrix(A)
    m, n = A.shape
    k = int(math.floor(k))
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")
    total = math.comb(n, k)
    if total > ENUMERATION_BUDGET:
        raise ValueError(f"C({n},{k}) = {total} subsets exceeds the exact budget "
                         f"{ENUMERATION_BUDGET}; use delta_k_monte_carlo")
    if check_normalization:
        check_unit_columns(A)
    G = A.conj().T @ A
    D = G - np.eye(n)
    absD = np.abs(D)
    # any subset containing the pair (i, j) has delta >= |D_ij|
    threshold = float(absD.max()) if k >= 2 else float(np.abs(np.diag(D)).max())
    T_all = colex_subsets(n, k)
    best, best_T, evaluated = -math.inf, None, 0
    for start in range(0, total, _CHUNK):
        T = T_all[start:start + _CHUNK]
        keep = np.flatnonzero(_gershgorin(absD, T) >= max(threshold, best))
        if keep.size == 0:
            continue
        vals = _block_deltas(G, T[keep])
        evaluated += keep.size
        j = int(np.argmax(vals))
        if vals[j] > best:
            best, best_T = float(vals[j]), tuple(int(i) for i in T[keep[j]])
    return RipReport(k, "exact", max(best, 0.0) + 0.0, best_T, total, (m, n),
                     {"eigen_evaluations": evaluated})


def delta_k_at_most(A, k, check_normalization=True) -> float:
    """``max_{|T| <= k}``; equals :func:`delta_k_exact` (kept as a check)."""
    return max(delta_k_exact(A, j, check_normalization).delta for j in range(1, int(k) + 1))


def delta_k_monte_carlo(A, k, trials, seed, check_normalization=True, watch=None) -> RipReport:
    """Lower bound on ``delta_k`` from ``trials`` uniformly sampled subsets.

    Repeated subsets are evaluated once. ``watch`` names a subset of
    interest; the report records whether it was drawn.
    """
    A = as_matrix(A)
    m, n = A.shape
    k = int(math.floor(k))
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")
    if check_normalization:
        check_unit_columns(A)
    rng = as_seed(seed).generator()
    seen = {}
    for _ in range(int(trials)):
        T = tuple(sorted(int(i) for i in rng.choice(n, size=k, replace=False)))
        seen.setdefault(T, None)
    subsets = np.array(list(seen), dtype=np.int64).reshape(-1, k)
    vals = _block_deltas(A.conj().T @ A, subsets)
    j = int(np.argmax(vals))
    extra = {}
    if watch is not None:
        extra["watched_sampled"] = tuple(sorted(watch)) in seen
    return RipReport(k, f"monte_carlo({int(trials)})", max(float(vals[j]), 0.0) + 0.0,
                     tuple(int(i) for i in subsets[j]), len(seen), (m, n), extra)


def delta_k_bruteforce(A, k) -> tuple[float, tuple]:
    """Independent reference: loop over subsets, take singular values of
    ``A_T`` and use ``|A_T* A_T - I| = max(s_max^2 - 1, 1 - s_min^2)``."""
    A = as_matrix(A)
    best, arg = -math.inf, None
    for T in itertools.combinations(range(A.shape[1]), int(k)):
        s = svd_values(A[:, list(T)])
        val = max(s.s_max ** 2 - 1.0, 1.0 - s.s_min ** 2)
        if val > best:
            best, arg = val, T
    return best, arg


@dataclass(frozen=True)
class ConcentrationToRip:
    required_m: int
    constant: float
    m: int
    failure_probability: float
    union_bound_count: float
    delta_conclusion: float

    @property
    def success_probability(self) -> float:
        return 1.0 - self.failure_probability

    @property
    def sufficient(self) -> bool:
        return self.m >= self.required_m


def union_bound_count(n, k, epsilon, m) -> float:
    """``C(n, k) 9^k exp(-epsilon m)``."""
    return math.exp(math.log(math.comb(n, k)) + k * math.log(9.0) - epsilon * m)


def concentration_to_rip(n, k, delta, epsilon, m=None, C=None) -> ConcentrationToRip:
    """Rows needed for a per-vector concentration bound to lift to
    ``delta_k <= 2 delta``.

    ``C`` defaults to ``2 (1 + ln 9 / ln(en/k))``, the value that makes
    ``k ln(en/k) + k ln 9 <= epsilon m / 2`` at the threshold. The failure
    probability ``exp(-epsilon m / 2)`` is evaluated at ``m`` (or at the
    threshold when ``m`` is omitted).
    """
    if not 0.0 < delta < 1.0:
        raise ValueError("delta must lie in (0, 1)")
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    if not 1 <= k <= n:
        raise ValueError("need 1 <= k <= n")
    L = math.log(math.e * n / k)
    if C is None:
        C = 2.0 * (1.0 + math.log(9.0) / L)
    required = int(math.ceil(C * k * L / epsilon - 1e-9))
    m_eval = required if m is None else int(m)
    return ConcentrationToRip(required, C, m_eval, math.exp(-epsilon * m_eval / 2.0),
                              union_bound_count(n, k, epsilon, m_eval), 2.0 * delta)


def _sample_rows(M, m, seed, replace):
    rng = as_seed(seed).generator()
    n = M.shape[0]
    if replace:
        idx = rng.integers(0, n, size=m)
    else:
        if m > n:
            raise ValueError("cannot take more rows than exist without replacement")
        idx = rng.permutation(n)[:m]
    return M[idx].copy(), idx


def build_partial_dft(n, m, seed, replace=True) -> np.ndarray:
    """``m`` uniformly chosen rows of the ``n x n`` DFT matrix (unnormalized,
    entries of modulus 1). ``replace=False`` with ``m = n`` gives the
    exhaustive anchor."""
    if not 1 <= m <= n or (not replace and m > n):
        raise ValueError("need 1 <= m <= n")
    return _sample_rows(dft_matrix(n), m, seed, replace)[0]


def build_partial_hadamard(n, m, seed, replace=True) -> np.ndarray:
    """``m`` uniformly chosen rows of the Sylvester Hadamard matrix."""
    if not 1 <= m <= n:
        raise ValueError("need 1 <= m <= n")
    return _sample_rows(sylvester_hadamard(n), m, seed, replace)[0]


def subgaussian_rip_threshold(n, k, delta) -> float:
    """``delta^{-2} k log(en/k)``; the theorem asks for ``m >= C`` times this."""
    return k * math.log(math.e * n / k) / delta ** 2


def fourier_rip_threshold(n, k, delta) -> float:
    """``delta^{-2} k log n log^2 k log(delta^{-2} k log n log^2 k)``."""
    base = k * math.log(n) * math.log(k) ** 2 / delta ** 2
    return base * math.log(base) if base > 1 else 0.0


def _delta_for(A, k, seed, check_normalization, mc_trials):
    if math.comb(A.shape[1], k) <= ENUMERATION_BUDGET:
        return delta_k_exact(A, k, check_normalization).delta
    return delta_k_monte_carlo(A, k, mc_trials, seed, check_normalization).delta


def _fit_constant(m_values, deltas, threshold):
    """Smallest ``C`` such that ``m >= C threshold(delta)`` never contradicts
    an observed ``delta_k(m)``: the max over the sweep of
    ``m / threshold(min(delta_m, 1))``, skipping exact zeros."""
    best = 0.0
    for m, d in zip(m_values, deltas):
        d = min(d, 1.0)
        if d > 0:
            thr = threshold(d)
            best = max(best, m / thr) if thr > 0 else math.inf
    return best


def _sweep(make_matrix, m_list, k, trials, seed, check_normalization, mc_trials, threads):
    from .seeding import map_ordered
    seed = as_seed(seed)
    out = []
    for i, m in enumerate(m_list):
        sd = seed.child(i)
        vals = map_ordered(lambda t: _delta_for(make_matrix(m, sd.child(t)), k, sd.child(t).child(1),
                                                check_normalization, mc_trials),
                           range(int(trials)), threads)
        out.append(np.array(vals))
    return out


def verify_subgaussian_rip(distribution, m_list, k, trials, seed, n=None, mc_trials=2000,
                           threads=None, scaling="columns"):
    """``delta_k`` of the normalized ``m x n`` matrix over a sweep of row counts ``m``.

    Median ``delta_k`` must be nonincreasing in ``m``; the fitted constant is
    checked against ``delta^-2 k log(en/k)``. With ``scaling="columns"``
    every column is divided by its norm, so the unit-column check applies;
    ``scaling="sqrt_m"`` uses ``A / sqrt(m)`` as is, which also counts the
    fluctuation of the column norms (the two agree for sign matrices).
    """
    from .ensembles import sample_matrix_rows
    from .theorems.report import FITTED, VIOLATED, ExperimentReport, TrialRecord, Verdict
    if n is not None and n != distribution.dim:
        raise ValueError("n does not match the distribution dimension")
    if scaling not in ("columns", "sqrt_m"):
        raise ValueError(f"scaling must be 'columns' or 'sqrt_m', got {scaling!r}")
    n = distribution.dim
    m_list = [int(m) for m in m_list]
    if scaling == "columns":
        make = lambda m, sd: normalize_columns(sample_matrix_rows(distribution, m, sd))
    else:
        make = lambda m, sd: sample_matrix_rows(distribution, m, sd) / math.sqrt(m)
    runs = _sweep(make, m_list, k, trials, seed, scaling == "columns", mc_trials, threads)
    med = [float(np.median(r)) for r in runs]
    C_hat = _fit_constant(m_list, med, lambda d: subgaussian_rip_threshold(n, k, d))
    mono = all(b <= a for a, b in zip(med, med[1:]))
    strict = all(b < a for a, b in zip(med, med[1:]))
    verdict = Verdict(FITTED, C_hat) if mono else Verdict(
        VIOLATED, C_hat, f"median delta_k not nonincreasing in m: {med}")
    records = []
    for m, r in zip(m_list, runs):
        records += [TrialRecord(len(records), None, None, float(d), (m,)) for d in r]
    agg = {"m": m_list, "median_delta": med, "mean_delta": [float(r.mean()) for r in runs],
           "strictly_decreasing": strict, "C_hat": C_hat}
    cfg = {"name": "subgaussian_rip", "n": n, "trials": int(trials),
           "seed": as_seed(seed).to_dict(), "distribution": distribution.to_dict(),
           "params": {"k": k, "m_list": m_list, "scaling": scaling}}
    return ExperimentReport(cfg, records, agg, verdict, ("m",))


def verify_fourier_rip(n, m_list, k, trials, seed, kind="dft", anchor=True, mc_trials=2000,
                       threads=None):
    """Mean ``delta_k`` of ``m`` random DFT (or Hadamard) rows scaled by
    ``1/sqrt(m)``, over a sweep of ``m``.

    The mean must be nonincreasing; ``anchor`` also evaluates the full
    matrix taken without replacement, where ``delta_k = 0``.
    """
    from .theorems.report import FITTED, VIOLATED, ExperimentReport, TrialRecord, Verdict
    build = {"dft": build_partial_dft, "hadamard": build_partial_hadamard}[kind]
    m_list = [int(m) for m in m_list]
    make = lambda m, sd: build(n, m, sd) / math.sqrt(m)
    runs = _sweep(make, m_list, k, trials, seed, True, mc_trials, threads)
    mean = [float(r.mean()) for r in runs]
    C_hat = _fit_constant(m_list, mean, lambda d: fourier_rip_threshold(n, k, d))
    problems = []
    if not all(b <= a for a, b in zip(mean, mean[1:])):
        problems.append(f"mean delta_k not nonincreasing in m: {mean}")
    agg = {"m": m_list, "mean_delta": mean, "median_delta": [float(np.median(r)) for r in runs],
           "strictly_decreasing": all(b < a for a, b in zip(mean, mean[1:])), "C_hat": C_hat,
           "kind": kind}
    if anchor:
        full = build(n, n, as_seed(seed).child(len(m_list)), replace=False) / math.sqrt(n)
        d0 = delta_k_exact(full, k).delta
        agg["anchor_delta"] = d0
        if d0 > 1e-12:
            problems.append(f"exhaustive anchor gives delta_k = {d0:.3g}")
    verdict = Verdict(FITTED, C_hat) if not problems else Verdict(VIOLATED, C_hat,
                                                                   "; ".join(problems))
    records = []
    for m, r in zip(m_list, runs):
        records += [TrialRecord(len(records), None, None, float(d), (m,)) for d in r]
    cfg = {"name": "fourier_rip", "n": n, "trials": int(trials), "seed": as_seed(seed).to_dict(),
           "params": {"k": k, "m_list": m_list, "kind": kind, "anchor": bool(anchor)}}
    return ExperimentReport(cfg, records, agg, verdict, ("m",))
