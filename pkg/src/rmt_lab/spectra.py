"""Dense singular values by one-sided Jacobi, and the approximate-isometry
calculus built on them.

Matrices are plain numpy arrays (real or complex, ``N x n``).
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

MAX_SWEEPS = 60
_EPS = np.finfo(float).eps
_TINY = np.finfo(float).tiny / _EPS


def as_matrix(A) -> np.ndarray:
    """Validate and return a 2-D float or complex array."""
    A = np.asarray(A)
    if A.ndim == 1:
        A = A[:, None]
    if A.ndim != 2 or A.shape[0] < 1 or A.shape[1] < 1:
        raise ValueError(f"expected a non-empty 2-D matrix, got shape {A.shape}")
    if np.iscomplexobj(A):
        A = A.astype(complex, copy=False)
    else:
        A = A.astype(float, copy=False)
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix has non-finite entries")
    return A


@dataclass(frozen=True, eq=False)
class SingularSpectrum:
    """Singular values sorted nonincreasing; always ``n`` of them."""

    values: np.ndarray

    @property
    def s_max(self) -> float:
        return float(self.values[0])

    @property
    def s_min(self) -> float:
        return float(self.values[-1])

    def __len__(self):
        return len(self.values)

    def __iter__(self):
        return iter(self.values)


@lru_cache(maxsize=None)
def _round_robin(n: int):
    """Circle-method schedule: n-1 (or n) rounds of disjoint column pairs."""
    m = n + (n % 2)
    order = list(range(m))
    rounds = []
    for _ in range(m - 1):
        pairs = [(order[i], order[m - 1 - i]) for i in range(m // 2)]
        pairs = sorted((min(a, b), max(a, b)) for a, b in pairs if a < n and b < n)
        if pairs:
            p, q = zip(*pairs)
            rounds.append((np.array(p), np.array(q)))
        order = [order[0], order[-1]] + order[1:-1]
    return tuple(rounds)


def jacobi_column_norms(W: np.ndarray, tol: float | None = None,
                        max_sweeps: int = MAX_SWEEPS) -> np.ndarray:
    """Orthogonalize the columns of ``W`` by plane rotations and return
    their final norms (the singular values, unsorted).

    A pair (p, q) is rotated while ``|a_p^H a_q| > tol * |a_p| |a_q|``.
    Each round rotates a set of disjoint pairs at once.
    """
    W = np.array(W, copy=True)
    N, n = W.shape
    if n == 1:
        return np.sqrt(np.sum(np.abs(W) ** 2, axis=0))
    if tol is None:
        tol = max(1e-14, N * _EPS)
    cplx = np.iscomplexobj(W)
    for _ in range(max_sweeps):
        rotated = False
        for p, q in _round_robin(n):
            ap, aq = W[:, p], W[:, q]
            if cplx:
                alpha = np.einsum("ij,ij->j", ap.conj(), ap).real
                beta = np.einsum("ij,ij->j", aq.conj(), aq).real
                gamma = np.einsum("ij,ij->j", ap.conj(), aq)
            else:
                alpha = np.einsum("ij,ij->j", ap, ap)
                beta = np.einsum("ij,ij->j", aq, aq)
                gamma = np.einsum("ij,ij->j", ap, aq)
            g = np.abs(gamma)
            # inner products near the underflow threshold are numerical zeros
            act = (g > tol * np.sqrt(alpha * beta)) & (g > _TINY)
            if not act.any():
                continue
            rotated = True
            ap, aq, g, gamma = ap[:, act], aq[:, act], g[act], gamma[act]
            if cplx:
                aq = aq * np.exp(-1j * np.angle(gamma))
            else:
                g = gamma
            zeta = (beta[act] - alpha[act]) / (2.0 * g)
            t = np.where(zeta >= 0, 1.0, -1.0) / (np.abs(zeta) + np.hypot(1.0, zeta))
            c = 1.0 / np.sqrt(1.0 + t * t)
            s = c * t
            W[:, p[act]] = c * ap - s * aq
            W[:, q[act]] = s * ap + c * aq
        if not rotated:
            break
    return np.sqrt(np.sum(np.abs(W) ** 2, axis=0))


def svd_values(A) -> SingularSpectrum:
    """All ``n`` singular values of an ``N x n`` matrix.

    Tall inputs are first reduced to their triangular QR factor; wide
    inputs are handled through the conjugate transpose and padded with
    zeros, since ``s_j = 0`` for ``j > N``.
    """
    A = as_matrix(A)
    N, n = A.shape
    # rescale by a power of two (exact) so tiny or huge entries cannot
    # under- or overflow the Gram products
    peak = float(np.max(np.abs(A)))
    if peak == 0.0:
        return SingularSpectrum(np.zeros(n))
    e = math.frexp(peak)[1]
    A = np.ldexp(A, -e) if not np.iscomplexobj(A) else A * 2.0 ** -e
    if N < n:
        vals = jacobi_column_norms(A.conj().T)
        vals = np.concatenate([vals, np.zeros(n - N)])
    else:
        W = np.linalg.qr(A, mode="r") if N > n else A
        vals = jacobi_column_norms(W, tol=max(1e-14, N * _EPS))
    order = np.argsort(-vals, kind="stable")
    return SingularSpectrum(np.ldexp(vals[order], e))


def extreme_singular_values(A) -> tuple[float, float]:
    """``(s_min, s_max)``; ``s_min`` is 0 whenever ``N < n``."""
    s = svd_values(A)
    return s.s_min, s.s_max


def spectral_norm(A) -> float:
    return svd_values(A).s_max


def hermitian_norm(H) -> float:
    """Spectral norm of a Hermitian matrix (largest |eigenvalue|)."""
    H = as_matrix(H)
    if H.shape[0] != H.shape[1]:
        raise ValueError("expected a square matrix")
    return svd_values(H).s_max


def gram(A) -> np.ndarray:
    A = np.asarray(A)
    return A.conj().T @ A


def isometry_gap(B) -> tuple[float, float]:
    """``(gap, delta)`` with ``gap = |B*B - I|`` and ``delta`` the smallest
    value with ``gap <= max(delta, delta**2)``.

    Checks the forward direction of the approximate-isometry lemma: every
    singular value of ``B`` lies in ``[1 - delta, 1 + delta]``.
    """
    B = as_matrix(B)
    n = B.shape[1]
    gap = hermitian_norm(gram(B) - np.eye(n))
    delta = gap if gap <= 1.0 else math.sqrt(gap)
    s = svd_values(B)
    slack = 1e-10 * max(1.0, s.s_max)
    if s.s_max > 1.0 + delta + slack or s.s_min < 1.0 - delta - slack:
        raise AssertionError(
            f"singular values [{s.s_min}, {s.s_max}] escape [1-{delta}, 1+{delta}]")
    return gap, delta


def gap_bound_from_interval(s_min: float, s_max: float) -> float:
    """Converse direction: if singular values lie in ``[1-d, 1+d]`` then
    ``|B*B - I| <= 3 max(d, d**2)``; returns that right-hand side for the
    smallest such ``d``."""
    d = max(abs(1.0 - s_min), abs(s_max - 1.0))
    return 3.0 * max(d, d * d)


def condition_number(A) -> float:
    A = as_matrix(A)
    if A.shape[0] < A.shape[1]:
        raise ValueError("condition number needs N >= n (s_min is identically 0 otherwise)")
    s = svd_values(A)
    return math.inf if s.s_min == 0.0 else s.s_max / s.s_min


# -- matrix files ------------------------------------------------------------
# CSV: one matrix row per line, decimal entries; complex entries are written
# as Python complex literals (``(1+2j)``).
# Binary: three little-endian int64 (N, n, complex flag), then N*n entries in
# row-major order as little-endian float64 (complex: real, imag interleaved).

_HEADER = np.dtype("<i8")


def save_matrix_csv(A, path):
    A = as_matrix(A)
    fmt = (lambda z: repr(complex(z))) if np.iscomplexobj(A) else (lambda x: repr(float(x)))
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        for row in A:
            w.writerow([fmt(x) for x in row])


def load_matrix_csv(path) -> np.ndarray:
    with open(path, newline="") as fh:
        rows = [[x.strip() for x in row] for row in csv.reader(fh) if row]
    if not rows:
        raise ValueError(f"{path}: empty matrix file")
    if len({len(r) for r in rows}) != 1:
        raise ValueError(f"{path}: ragged rows")
    if any("j" in x for r in rows for x in r):
        return as_matrix(np.array([[complex(x) for x in r] for r in rows]))
    return as_matrix(np.array([[float(x) for x in r] for r in rows]))


def save_matrix_binary(A, path):
    A = as_matrix(A)
    is_c = np.iscomplexobj(A)
    header = np.array([A.shape[0], A.shape[1], int(is_c)], dtype=_HEADER)
    body = A.astype("<c16" if is_c else "<f8", copy=False)
    with open(path, "wb") as fh:
        fh.write(header.tobytes())
        fh.write(np.ascontiguousarray(body).tobytes())


def load_matrix_binary(path) -> np.ndarray:
    with open(path, "rb") as fh:
        raw = fh.read()
    if len(raw) < 24:
        raise ValueError(f"{path}: truncated header")
    N, n, flag = (int(v) for v in np.frombuffer(raw[:24], dtype=_HEADER))
    if N < 1 or n < 1 or flag not in (0, 1):
        raise ValueError(f"{path}: bad header ({N}, {n}, {flag})")
    dt = np.dtype("<c16" if flag else "<f8")
    if len(raw) != 24 + N * n * dt.itemsize:
        raise ValueError(f"{path}: expected {N * n} entries after the header")
    return as_matrix(np.frombuffer(raw[24:], dtype=dt).reshape(N, n).copy())


def load_matrix(path) -> np.ndarray:
    """Read a matrix file; ``.csv`` is text, anything else the binary format."""
    return load_matrix_csv(path) if str(path).lower().endswith(".csv") else load_matrix_binary(path)
