"""Sample covariance estimation and random sampling from tight frames."""
from __future__ import annotations

import math

import numpy as np

from ..ensembles import DistributionSpec, SpecError, frame, sample_matrix_rows, \
    second_moment_empirical
from ..seeding import as_seed, map_ordered, standard_normal
from ..spectra import as_matrix, hermitian_norm, svd_values
from .report import HOLDS, VIOLATED, ExperimentReport, TrialRecord, Verdict

SCALING_RANGE = (1.6, 2.5)
DEFAULT_C0 = 20.0
TARGET_ERROR = 0.5
ISOMETRY_TOL = 1e-8
IDENTITY_TOL = 1e-12


def sample_covariance(samples) -> np.ndarray:
    """``Sigma_N = (1/N) sum_i X_i X_i*`` with samples as rows."""
    return second_moment_empirical(samples)


def covariance_error(sigma_N, sigma) -> float:
    return hermitian_norm(np.asarray(sigma_N) - np.asarray(sigma))


def effective_rank(sigma) -> float:
    """``tr(Sigma) / |Sigma|`` for a Hermitian PSD matrix."""
    S = as_matrix(sigma)
    if S.shape[0] != S.shape[1]:
        raise ValueError("sigma must be square")
    if np.max(np.abs(S - S.conj().T)) > 1e-10 * max(1.0, np.max(np.abs(S))):
        raise ValueError("sigma must be Hermitian")
    w = np.linalg.eigvalsh((S + S.conj().T) / 2)
    if w[-1] <= 0:
        raise ValueError("sigma is zero or negative")
    if w[0] < -1e-10 * w[-1]:
        raise ValueError(f"sigma is not positive semidefinite (eigenvalue {w[0]:.3g})")
    return float(np.real(np.trace(S)) / w[-1])


def _known_sigma(distribution, sigma):
    if sigma is not None:
        return np.asarray(sigma)
    if distribution.analytic_isotropic or distribution.variant == "linear_image":
        return distribution.second_moment()
    raise SpecError(f"second moment of {distribution.variant} is unknown; pass sigma")


def _cov_trial(spec, N, sigma, scale, seed):
    A = sample_matrix_rows(spec, N, seed)
    S = sample_covariance(A)
    w = np.linalg.eigvalsh(S)
    err = covariance_error(S, sigma) / scale
    return math.sqrt(max(N * w[0], 0.0)), math.sqrt(max(N * w[-1], 0.0)), err


def verify_covariance_estimation(distribution: DistributionSpec, N_list, trials, seed,
                                 sigma=None, relative=False, c0=None,
                                 threads=None) -> ExperimentReport:
    """Median ``|Sigma_N - Sigma|`` at each sample size.

    Whenever two sizes differ by a factor 4 the ratio of medians must lie in
    ``[1.6, 2.5]``. With ``c0`` and an almost-sure norm bound ``sqrt(m)``,
    ``N = ceil(c0 m log n / |Sigma|)`` must reach median error at most 0.5.
    ``relative`` divides errors by ``|Sigma|``.
    """
    S = _known_sigma(distribution, sigma)
    n = distribution.dim
    seed = as_seed(seed)
    norm_S = hermitian_norm(S)
    scale = norm_S if relative else 1.0
    sizes = [int(N) for N in N_list]
    if c0 is not None:
        if distribution.norm_bound is None:
            raise SpecError("the sample-size law needs an almost-sure norm bound")
        m = distribution.norm_bound ** 2
        N0 = int(math.ceil(c0 * m * math.log(n) / norm_S))
        sizes.append(N0)

    records, medians = [], {}
    for i, N in enumerate(sizes):
        ext = np.array(map_ordered(lambda t: _cov_trial(distribution, N, S, scale, seed.child(i).child(t)),
                                   range(int(trials)), threads))
        medians.setdefault(N, float(np.median(ext[:, 2])))
        records += [TrialRecord(len(records) + t, a, b, e, (N,)) for t, (a, b, e) in enumerate(ext)]

    problems, ratios = [], []
    for a in sizes:
        if 4 * a in medians:
            r = medians[a] / medians[4 * a] if medians[4 * a] > 0 else math.inf
            ratios.append({"N": a, "ratio": r})
            lo, hi = SCALING_RANGE
            if not lo <= r <= hi:
                problems.append(f"median error ratio {r:.4g} between N={a} and {4 * a} "
                                f"outside [{lo}, {hi}]")
    agg = {"median_error": {str(k): v for k, v in medians.items()}, "ratios": ratios,
           "sigma_norm": norm_S, "relative": bool(relative)}
    if c0 is not None:
        agg.update(c0=c0, N_law=N0, median_error_N_law=medians[N0])
        if medians[N0] > TARGET_ERROR:
            problems.append(f"N={N0} gives median error {medians[N0]:.4g} > {TARGET_ERROR}")
    verdict = Verdict(HOLDS) if not problems else Verdict(VIOLATED, details="; ".join(problems))
    cfg = {"name": "covariance_estimation", "n": n, "trials": int(trials),
           "seed": seed.to_dict(), "distribution": distribution.to_dict(),
           "params": {"N_list": sizes[:len(N_list)], "relative": bool(relative), "c0": c0}}
    return ExperimentReport(cfg, records, agg, verdict, ("N_rows",))


def random_submatrix(B, N, seed, t=3.0):
    """Sample ``N`` rows of ``B`` uniformly with replacement.

    ``B`` (``M x n``) must satisfy ``B*B = M I``; the rows are then an
    isotropic uniform distribution with norm bound ``sqrt(m)``,
    ``m = max_i |B_i|^2``. Returns the sample and a summary comparing its
    extreme singular values with ``sqrt(N) -+ t sqrt(m)``.
    """
    B = as_matrix(B)
    M, n = B.shape
    if hermitian_norm(B.conj().T @ B - M * np.eye(n)) > ISOMETRY_TOL * M:
        raise ValueError("B must satisfy s_min(B) = s_max(B) = sqrt(M)")
    idx = as_seed(seed).generator().integers(0, M, size=int(N))
    A = B[idx].copy()
    m = float(np.max(np.sum(np.abs(B) ** 2, axis=1)))
    s = svd_values(A)
    lo, hi = math.sqrt(N) - t * math.sqrt(m), math.sqrt(N) + t * math.sqrt(m)
    report = {"N": int(N), "M": M, "n": n, "m": m, "t": t, "s_min": s.s_min, "s_max": s.s_max,
              "lower_edge": lo, "upper_edge": hi,
              "inside": bool(lo <= s.s_min and s.s_max <= hi), "rows": idx.tolist()}
    return A, report


def random_subframe(vectors, N, trials, seed, exhaustive=False, eps=None,
                    num_x=100, threads=None) -> ExperimentReport:
    """Draw ``N`` frame elements uniformly with replacement and measure
    ``eps_hat = |Sigma_N - I|``, ``Sigma_N = (1/N) sum v_i v_i*``.

    The frame must be tight with bounds ``A = B = M`` (``M`` elements). The
    largest reconstruction error ``|(1/N) sum <v_i, x> v_i - x|`` over
    ``num_x`` random unit vectors is at most ``eps_hat``, and the direct sum
    matches ``(Sigma_N - I) x`` to 1e-12; both are asserted. ``exhaustive``
    takes every element once (``N = M``, one trial).
    """
    V = frame(vectors).vectors
    M, n = V.shape
    seed = as_seed(seed)
    if exhaustive:
        N, trials = M, 1

    def one(t):
        rng = seed.child(t).generator()
        idx = np.arange(M) if exhaustive else rng.integers(0, M, size=int(N))
        Vs = V[idx]
        S = sample_covariance(Vs)
        D = S - np.eye(n)
        eps_hat = hermitian_norm(D)
        w = np.linalg.eigvalsh(S)
        X = standard_normal(rng, (num_x, n))
        X /= np.linalg.norm(X, axis=1, keepdims=True)
        direct = (X @ Vs.T) @ Vs / N - X
        recon = np.linalg.norm(direct, axis=1)
        via_op = np.linalg.norm(X @ D.T, axis=1)
        ident = float(np.max(np.abs(recon - via_op)))
        assert ident <= IDENTITY_TOL, f"reconstruction identity off by {ident}"
        assert recon.max() <= eps_hat * (1 + 1e-12) + IDENTITY_TOL
        return (math.sqrt(max(N * w[0], 0.0)), math.sqrt(N * w[-1]), eps_hat,
                float(recon.max()), N * w[0], N * w[-1], ident)

    ext = np.array(map_ordered(one, range(int(trials)), threads))
    med = float(np.median(ext[:, 2]))
    agg = {"median_eps_hat": med, "max_identity_error": float(ext[:, 6].max()), "M": M,
           "m": float(np.max(np.sum(V * V, axis=1)))}
    if eps is not None and med > eps:
        verdict = Verdict(VIOLATED, details=f"median eps_hat {med:.4g} > {eps}")
    else:
        verdict = Verdict(HOLDS)
    records = [TrialRecord(t, r[0], r[1], r[2], tuple(r[3:6])) for t, r in enumerate(ext)]
    cfg = {"name": "random_subframe", "N": int(N), "n": n, "trials": int(trials),
           "seed": seed.to_dict(), "params": {"exhaustive": bool(exhaustive), "eps": eps}}
    return ExperimentReport(cfg, records, agg, verdict,
                            ("recon_error_sup", "frame_lower", "frame_upper"))


def isometry_matrix(kind, M, n) -> np.ndarray:
    """First ``n`` columns of an ``M x M`` matrix with ``B*B = M I``:
    ``identity`` (scaled by ``sqrt(M)``), ``dft`` or ``hadamard``."""
    from ..ensembles import dft_matrix, sylvester_hadamard
    if not 1 <= n <= M:
        raise ValueError("need 1 <= n <= M")
    if kind == "identity":
        return math.sqrt(M) * np.eye(M)[:, :n]
    if kind == "dft":
        return dft_matrix(M)[:, :n]
    if kind == "hadamard":
        return sylvester_hadamard(M)[:, :n]
    raise ValueError(f"unknown matrix kind {kind!r}")


def verify_random_submatrix(B, N, trials, seed, t=3.0, threads=None) -> ExperimentReport:
    """Repeated :func:`random_submatrix` draws; report-only frequencies of
    ``sqrt(N) - t sqrt(m) <= s_min <= s_max <= sqrt(N) + t sqrt(m)``."""
    seed = as_seed(seed)
    reps = map_ordered(lambda i: random_submatrix(B, N, seed.child(i), t)[1],
                       range(int(trials)), threads)
    N = int(N)
    records = [TrialRecord(i, r["s_min"], r["s_max"],
                           max(abs(r["s_max"] ** 2 / N - 1), abs(r["s_min"] ** 2 / N - 1)),
                           (r["inside"],)) for i, r in enumerate(reps)]
    first = reps[0]
    agg = {"M": first["M"], "m": first["m"], "t": t, "lower_edge": first["lower_edge"],
           "upper_edge": first["upper_edge"],
           "p_inside": float(np.mean([r["inside"] for r in reps]))}
    cfg = {"name": "random_submatrix", "N": N, "n": first["n"], "trials": int(trials),
           "seed": seed.to_dict(), "params": {"t": t}}
    return ExperimentReport(cfg, records, agg, Verdict(HOLDS, details="report only"),
                            ("inside",))
