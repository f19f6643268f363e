"""Sums of independent random matrices: matrix Bernstein, Rudelson's
inequality, symmetrization, decoupling and Latala's bound.

Expectations are Monte Carlo means reported with standard errors. Where
two Monte Carlo quantities are compared they share random numbers.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .ensembles import coordinate, sample_vector, spherical
from .seeding import SeedSpec, as_seed, map_ordered
from .spectra import as_matrix, spectral_norm

SCALAR_EXACT_MAX = 16
MATRIX_EXACT_MAX = 12


def _se(x):
    x = np.asarray(x, dtype=float)
    return float(np.std(x, ddof=1) / math.sqrt(x.size)) if x.size > 1 else 0.0


# -- matrix Bernstein ---------------------------------------------------------

def matrix_bernstein_bound(n, sigma2, K, t) -> float:
    """``min(1, 2n exp(-(t^2/2) / (sigma^2 + K t / 3)))``."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    return min(1.0, 2.0 * n * math.exp(-(t * t / 2.0) / (sigma2 + K * t / 3.0)))


def matrix_bernstein_mixed_form(n, sigma2, K, t, c=0.25) -> float:
    """The mixed-tail form ``2n exp(-c min(t^2/sigma^2, t/K))`` (uncapped)."""
    return 2.0 * n * math.exp(-c * min(t * t / sigma2, t / K))


@dataclass
class MatrixSumEnsemble:
    """``count`` independent draws of ``generator(seed)``: centered,
    self-adjoint ``n x n`` matrices with ``|X_i| <= K`` and
    ``|sum_i E X_i^2| = sigma2``."""

    generator: Callable[[SeedSpec], np.ndarray]
    count: int
    n: int
    K: float
    sigma2: float
    name: str = "custom"

    def draw(self, seed) -> np.ndarray:
        seed = as_seed(seed)
        return np.stack([np.asarray(self.generator(seed.child(i))) for i in range(self.count)])


def sign_diagonal_ensemble(N=20) -> MatrixSumEnsemble:
    """``X_i = eps_i diag(1, -1) / N``: ``K = 1/N``, ``sigma^2 = 1/N``."""
    D = np.diag([1.0, -1.0]) / N

    def gen(seed):
        return D if seed.generator().random() < 0.5 else -D
    return MatrixSumEnsemble(gen, N, 2, 1.0 / N, 1.0 / N, f"sign_diagonal(N={N})")


def spherical_rank_one_ensemble(N=20, n=4) -> MatrixSumEnsemble:
    """``X_i = eps_i x_i x_i^T / N`` with ``x_i`` uniform on the radius-sqrt(n)
    sphere: ``K = n/N``, ``sigma^2 = n/N``."""
    spec = spherical(n)

    def gen(seed):
        rng = seed.generator()
        sign = 1.0 if rng.random() < 0.5 else -1.0
        x = sample_vector(spec, seed.child(0))
        return sign * np.outer(x, x) / N
    return MatrixSumEnsemble(gen, N, n, n / N, n / N, f"spherical_rank_one(N={N}, n={n})")


SHIPPED_ENSEMBLES = {
    "sign_diagonal": sign_diagonal_ensemble,
    "spherical_rank_one": spherical_rank_one_ensemble,
}


@dataclass
class TailComparison:
    rows: list            # (t, empirical, bound, allowed)
    trials: int
    worst_margin: float   # min over t of allowed - empirical
    norms: np.ndarray

    @property
    def ok(self) -> bool:
        return self.worst_margin >= 0.0


def _check_draw(X, K, where):
    for i, Xi in enumerate(X):
        if np.max(np.abs(Xi - Xi.conj().T)) > 1e-12:
            raise ValueError(f"{where}, summand {i}: not self-adjoint")
        nrm = float(np.max(np.abs(np.linalg.eigvalsh(Xi))))
        if nrm > K + 1e-9:
            raise ValueError(f"{where}, summand {i}: |X_i| = {nrm} exceeds K = {K}")


def empirical_matrix_sum_tail(ensemble: MatrixSumEnsemble, t_grid, trials, seed,
                              threads=None) -> TailComparison:
    """Compare ``P{|sum X_i| >= t}`` with the matrix Bernstein bound.

    A grid point is consistent when the empirical fraction is at most the
    bound plus three Monte Carlo standard errors ``sqrt(p(1-p)/trials)``.
    """
    seed = as_seed(seed)

    def one(trial):
        X = ensemble.draw(seed.child(trial))
        _check_draw(X, ensemble.K, f"trial {trial}")
        return spectral_norm(X.sum(axis=0))

    norms = np.array(map_ordered(one, range(int(trials)), threads))
    rows, worst = [], math.inf
    for t in t_grid:
        # atoms of discrete ensembles sit on the grid; rounding must not hide them
        emp = float(np.mean(norms >= t - 1e-12 * max(1.0, t)))
        bound = matrix_bernstein_bound(ensemble.n, ensemble.sigma2, ensemble.K, t)
        allowed = bound + 3.0 * math.sqrt(bound * (1.0 - bound) / trials)
        rows.append((float(t), emp, bound, allowed))
        worst = min(worst, allowed - emp)
    return TailComparison(rows, int(trials), worst, norms)


# -- Rudelson -----------------------------------------------------------------

def rudelson_ratio(vectors, trials, seed, threads=None) -> float:
    """``E|sum eps_i x_i x_i^T|`` divided by
    ``sqrt(log min(N, n)) max_i |x_i| |sum x_i x_i^T|^{1/2}``."""
    X = as_matrix(vectors)
    N, n = X.shape
    if N < 2 or n < 2:
        raise ValueError("need N >= 2 vectors in dimension n >= 2")
    maxnorm = float(np.max(np.linalg.norm(X, axis=1)))
    if maxnorm == 0:
        raise ValueError("all vectors are zero")
    seed = as_seed(seed)

    def one(trial):
        eps = np.where(seed.child(trial).generator().random(N) < 0.5, -1.0, 1.0)
        return spectral_norm((X.T * eps) @ X.conj())

    mean = float(np.mean(map_ordered(one, range(int(trials)), threads)))
    denom = math.sqrt(math.log(min(N, n))) * maxnorm * math.sqrt(spectral_norm(X.T @ X.conj()))
    return mean / denom


def expected_abs_rademacher_sum(N) -> float:
    """``E|eps_1 + ... + eps_N|`` exactly, from binomial counts."""
    return math.fsum(math.comb(N, j) * abs(2 * j - N) for j in range(N + 1)) / 2.0 ** N


# -- symmetrization -----------------------------------------------------------

def _norm(x):
    x = np.asarray(x)
    if x.ndim == 1:
        return float(np.linalg.norm(x))
    return spectral_norm(x)


@dataclass(frozen=True)
class SymmetrizationResult:
    lhs: float
    rhs: float
    ratio: float
    lhs_se: float
    rhs_se: float

    @property
    def holds(self) -> bool:
        slack = 3.0 * math.hypot(self.lhs_se, 2.0 * self.rhs_se)
        return self.lhs <= 2.0 * self.rhs + slack


def symmetrization_check(generator, count, trials, seed, mean=None, pilot=200,
                         threads=None) -> SymmetrizationResult:
    """Estimate ``E|sum (X_i - E X_i)|`` and ``E|sum eps_i X_i|``.

    Both sides use the same draws of ``X_i``; the signs come from a separate
    stream. Without an analytic ``mean`` it is estimated from an
    independent pilot run.
    """
    seed = as_seed(seed)
    if mean is None:
        pseed = seed.child(1)
        mean = np.mean([np.asarray(generator(pseed.child(i))) for i in range(pilot)], axis=0)
    mean = np.asarray(mean)
    draws = seed.child(0)

    def one(trial):
        s = draws.child(trial)
        X = np.stack([np.asarray(generator(s.child(i))) for i in range(count)])
        eps = np.where(s.child(count).generator().random(count) < 0.5, -1.0, 1.0)
        centered = (X - mean).sum(axis=0)
        signed = np.tensordot(eps, X, axes=1)
        return _norm(centered), _norm(signed)

    vals = np.array(map_ordered(one, range(int(trials)), threads))
    lhs, rhs = float(vals[:, 0].mean()), float(vals[:, 1].mean())
    ratio = lhs / rhs if rhs > 0 else (0.0 if lhs == 0 else math.inf)
    return SymmetrizationResult(lhs, rhs, ratio, _se(vals[:, 0]), _se(vals[:, 1]))


def coordinate_rank_one_generator(n):
    """``X = A A^T`` for a coordinate vector ``A`` in dimension ``n``."""
    spec = coordinate(n)

    def gen(seed):
        a = sample_vector(spec, seed)
        return np.outer(a, a)
    return gen


# -- decoupling ---------------------------------------------------------------

def _subset_masks(n, start, stop):
    idx = np.arange(start, stop, dtype=np.int64)[:, None]
    return ((idx >> np.arange(n)) & 1).astype(float)


@dataclass(frozen=True)
class DecouplingResult:
    lhs: float
    rhs: float
    min_over_T: float
    max_over_T: float
    exact: bool


def decoupling_identity(a, trials=4096, seed=0) -> DecouplingResult:
    """``sum_{i != j} a_ij`` against ``4 E_T sum_{i in T, j not in T} a_ij``.

    ``T`` is a uniformly random subset. For ``n <= 16`` all ``2^n`` subsets
    are enumerated and the two sides must agree to 1e-12 relative;
    otherwise ``trials`` random subsets give an estimate.
    """
    a = np.asarray(a, dtype=float)
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError("a must be square")
    if np.any(np.diag(a) != 0):
        raise ValueError("a must have zero diagonal")
    lhs = math.fsum(a.ravel())
    exact = n <= SCALAR_EXACT_MAX
    parts, lo, hi = [], math.inf, -math.inf
    if exact:
        total = 1 << n
        for start in range(0, total, 1 << 14):
            S = _subset_masks(n, start, min(total, start + (1 << 14)))
            v = np.einsum("ti,ij,tj->t", S, a, 1.0 - S)
            parts.extend(v.tolist())
            lo, hi = min(lo, float(v.min())), max(hi, float(v.max()))
        rhs = 4.0 * math.fsum(parts) / total
        if abs(lhs - rhs) > 1e-12 * (1.0 + abs(lhs)):
            raise AssertionError(f"decoupling identity failed: {lhs} vs {rhs}")
    else:
        rng = as_seed(seed).generator()
        S = (rng.random((int(trials), n)) < 0.5).astype(float)
        v = np.einsum("ti,ij,tj->t", S, a, 1.0 - S)
        rhs = 4.0 * float(v.mean())
        lo, hi = float(v.min()), float(v.max())
    return DecouplingResult(lhs, rhs, lo, hi, exact)


@dataclass(frozen=True)
class MatrixDecouplingResult:
    lhs: float
    rhs: float
    worst_T: tuple
    subsets: int
    exhaustive: bool

    @property
    def holds(self) -> bool:
        return self.lhs <= self.rhs * (1 + 1e-12) + 1e-12


def _cross_norm(B, mask):
    T, Tc = np.flatnonzero(mask), np.flatnonzero(~mask)
    if T.size == 0 or Tc.size == 0:
        return 0.0
    return spectral_norm(B[:, T].conj().T @ B[:, Tc])


def matrix_decoupling_bound(B, subset_budget=256, trials=1, seed=0,
                            threads=None) -> MatrixDecouplingResult:
    """``E|B*B - I|`` against ``4 max_T E|B_T* B_{T^c}|`` for unit-column ``B``.

    ``B`` is a matrix, or a callable ``seed -> matrix`` whose expectations
    are estimated over ``trials`` draws (the same draws for every ``T``).
    Subsets are enumerated when ``n <= 12``, else ``subset_budget`` random
    ones are used. With exhaustive enumeration the inequality is asserted.
    """
    seed = as_seed(seed)
    if callable(B):
        mats = [as_matrix(B(seed.child(t))) for t in range(int(trials))]
    else:
        mats = [as_matrix(B)]
    n = mats[0].shape[1]
    for M in mats:
        norms = np.linalg.norm(M, axis=0)
        if np.any(np.abs(norms - 1.0) > 1e-9):
            raise ValueError("columns must have unit norm")
    lhs = float(np.mean([spectral_norm(M.conj().T @ M - np.eye(n)) for M in mats]))
    exhaustive = n <= MATRIX_EXACT_MAX
    if exhaustive:
        masks = [((code >> np.arange(n)) & 1).astype(bool) for code in range(1 << n)]
    else:
        rng = seed.child(1 << 20).generator()
        masks = [rng.random(n) < 0.5 for _ in range(int(subset_budget))]

    def one(mask):
        return float(np.mean([_cross_norm(M, mask) for M in mats]))

    vals = map_ordered(one, masks, threads)
    j = int(np.argmax(vals))
    res = MatrixDecouplingResult(lhs, 4.0 * vals[j], tuple(np.flatnonzero(masks[j]).tolist()),
                                 len(masks), exhaustive)
    if exhaustive and len(mats) == 1 and not res.holds:
        raise AssertionError(f"matrix decoupling failed: {res.lhs} > {res.rhs}")
    return res


# -- Latala -------------------------------------------------------------------

def latala_bound(second_moments, fourth_moments) -> float:
    """``max_i (sum_j E a_ij^2)^{1/2} + max_j (sum_i E a_ij^2)^{1/2}
    + (sum_ij E a_ij^4)^{1/4}``."""
    m2 = np.asarray(second_moments, dtype=float)
    m4 = np.asarray(fourth_moments, dtype=float)
    if m2.shape != m4.shape or m2.ndim != 2:
        raise ValueError("moment arrays must be matrices of equal shape")
    if np.any(m2 < 0) or np.any(m4 < 0):
        raise ValueError("moments must be nonnegative")
    return (math.sqrt(m2.sum(axis=1).max()) + math.sqrt(m2.sum(axis=0).max())
            + m4.sum() ** 0.25)
