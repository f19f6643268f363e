"""Isotropic (and deliberately non-isotropic) random vectors and matrices.

A :class:`DistributionSpec` describes one distribution in ``R^n`` (or
``C^n`` for DFT rows) together with what is known about it analytically:
whether it is exactly isotropic, a bound on the sub-gaussian norm of its
one-dimensional marginals, and an almost-sure bound on its Euclidean norm.
Build specs with the module-level constructors (:func:`gaussian`,
:func:`coordinate`, :func:`frame`, ...) rather than by hand.
"""
from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass, replace

import numpy as np

from .seeding import SeedSpec, as_seed, standard_normal

FRAME_TOL = 1e-10
PRODUCT_COMPONENTS = ("gaussian", "bernoulli", "uniform")
# sup_p p^{-1/2} (E|g|^p)^{1/p} for a standard normal g, attained at p = 1.
_GAUSSIAN_PSI2 = math.sqrt(2.0 / math.pi)


class SpecError(ValueError):
    """Invalid distribution description."""


@dataclass(frozen=True, eq=False)
class DistributionSpec:
    variant: str
    dim: int
    component: str | None = None          # product
    vectors: np.ndarray | None = None     # frame, M x dim
    delta: float | None = None            # selector probability
    inner: "DistributionSpec | None" = None
    root: np.ndarray | None = None        # linear image, dim x inner.dim

    @property
    def is_complex(self) -> bool:
        if self.variant == "dft_row":
            return True
        if self.inner is not None:
            return self.inner.is_complex or (self.root is not None and np.iscomplexobj(self.root))
        return False

    @property
    def analytic_isotropic(self) -> bool:
        if self.variant == "linear_image":
            return False
        if self.variant == "selector":
            return self.inner.analytic_isotropic
        return True

    @property
    def psi2_bound(self) -> float | None:
        if self.variant == "gaussian":
            return _GAUSSIAN_PSI2
        if self.variant == "bernoulli":
            return 1.0
        if self.variant == "product":
            return {"gaussian": _GAUSSIAN_PSI2, "bernoulli": 1.0}.get(self.component)
        return None

    @property
    def norm_bound(self) -> float | None:
        """``sqrt(m)`` with ``|X|_2 <= sqrt(m)`` almost surely, when known."""
        v = self.variant
        if v in ("coordinate", "spherical", "dft_row", "hadamard_row", "bernoulli"):
            return math.sqrt(self.dim)
        if v == "product" and self.component == "bernoulli":
            return math.sqrt(self.dim)
        if v == "product" and self.component == "uniform":
            return math.sqrt(3.0 * self.dim)
        if v == "frame":
            return float(np.max(np.linalg.norm(self.vectors, axis=1)))
        if v == "selector":
            b = self.inner.norm_bound
            return None if b is None else b / math.sqrt(self.delta)
        if v == "linear_image":
            b = self.inner.norm_bound
            return None if b is None else b * float(np.linalg.norm(self.root, 2))
        return None

    @property
    def exact_norm(self) -> bool:
        """True when ``|X|_2 = sqrt(dim)`` for every draw."""
        v = self.variant
        if v in ("coordinate", "spherical", "dft_row", "hadamard_row", "bernoulli"):
            return True
        if v == "product":
            return self.component == "bernoulli"
        if v == "frame":
            norms = np.linalg.norm(self.vectors, axis=1)
            return bool(np.all(np.abs(norms - math.sqrt(self.dim)) <= 1e-12 * math.sqrt(self.dim)))
        return False

    def second_moment(self) -> np.ndarray:
        """The exact second moment matrix ``E X X*``."""
        if self.variant == "linear_image":
            inner = self.inner.second_moment()
            return self.root @ inner @ self.root.conj().T
        return np.eye(self.dim)

    def with_dim(self, dim: int) -> "DistributionSpec":
        if self.variant in ("gaussian", "bernoulli", "coordinate", "spherical",
                            "dft_row", "product"):
            return replace(self, dim=int(dim))
        if self.variant == "hadamard_row":
            return hadamard_row(dim)
        raise SpecError(f"variant {self.variant!r} has no dimension-free form")

    def to_dict(self) -> dict:
        d = {"variant": self.variant, "dim": self.dim}
        if self.component is not None:
            d["component"] = self.component
        if self.vectors is not None:
            d["vectors"] = self.vectors.tolist()
        if self.delta is not None:
            d["delta"] = self.delta
        if self.inner is not None:
            d["inner"] = self.inner.to_dict()
        if self.root is not None:
            d["root"] = self.root.tolist()
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "DistributionSpec":
        v = d.get("variant")
        dim = d.get("dim")
        if v == "gaussian":
            return gaussian(dim)
        if v == "bernoulli":
            return bernoulli(dim)
        if v == "product":
            return product(dim, d["component"])
        if v == "coordinate":
            return coordinate(dim)
        if v == "spherical":
            return spherical(dim)
        if v == "dft_row":
            return dft_row(dim)
        if v == "hadamard_row":
            return hadamard_row(dim)
        if v == "frame":
            if "csv" in d:
                return frame(load_frame_csv(d["csv"]))
            if d.get("kind") == "two_bases":
                return frame(two_basis_frame(dim, seed=d.get("seed", 0)))
            return frame(np.asarray(d["vectors"], dtype=float))
        if v == "selector":
            return selector(d["delta"], cls.from_dict(d["inner"]))
        if v == "linear_image":
            return linear_image(cls.from_dict(d["inner"]), np.asarray(d["root"]))
        raise SpecError(f"unknown distribution variant {v!r}")


def _check_dim(n):
    if int(n) != n or n < 1:
        raise SpecError(f"dimension must be a positive integer, got {n}")
    return int(n)


def gaussian(n) -> DistributionSpec:
    return DistributionSpec("gaussian", _check_dim(n))


def bernoulli(n) -> DistributionSpec:
    """Independent symmetric signs."""
    return DistributionSpec("bernoulli", _check_dim(n))


def product(n, component: str) -> DistributionSpec:
    """Independent unit-variance coordinates: gaussian, bernoulli, or uniform
    on ``[-sqrt(3), sqrt(3)]``."""
    if component not in PRODUCT_COMPONENTS:
        raise SpecError(f"component must be one of {PRODUCT_COMPONENTS}")
    return DistributionSpec("product", _check_dim(n), component=component)


def coordinate(n) -> DistributionSpec:
    """``sqrt(n) e_i`` for a uniform index ``i``."""
    return DistributionSpec("coordinate", _check_dim(n))


def spherical(n) -> DistributionSpec:
    """Uniform on the sphere of radius ``sqrt(n)``."""
    return DistributionSpec("spherical", _check_dim(n))


def dft_row(n) -> DistributionSpec:
    return DistributionSpec("dft_row", _check_dim(n))


def hadamard_row(n) -> DistributionSpec:
    n = _check_dim(n)
    if n & (n - 1):
        raise SpecError(f"Hadamard size must be a power of 2, got {n}")
    return DistributionSpec("hadamard_row", n)


def frame(vectors) -> DistributionSpec:
    """Uniform choice among ``M`` frame vectors with ``(1/M) sum u u^T = I``."""
    U = np.asarray(vectors, dtype=float)
    if U.ndim != 2 or U.shape[0] < 1:
        raise SpecError("frame vectors must be an M x n array")
    M, n = U.shape
    err = np.linalg.norm(U.T @ U / M - np.eye(n), 2)
    if not err <= FRAME_TOL:
        raise SpecError(f"not a tight frame: |(1/M) sum u u^T - I| = {err:.3e} > {FRAME_TOL}")
    U = U.copy()
    U.setflags(write=False)
    return DistributionSpec("frame", n, vectors=U)


def selector(delta: float, inner: DistributionSpec) -> DistributionSpec:
    """``xi * Y / sqrt(delta)`` with ``xi ~ Bernoulli(delta)`` independent of ``Y``."""
    if not 0.0 < delta <= 1.0:
        raise SpecError(f"selection probability must lie in (0, 1], got {delta}")
    return DistributionSpec("selector", inner.dim, delta=float(delta), inner=inner)


def linear_image(inner: DistributionSpec, root) -> DistributionSpec:
    """``R Y``; second moment ``R R*`` when ``Y`` is isotropic."""
    R = np.asarray(root)
    if R.ndim != 2 or R.shape[1] != inner.dim:
        raise SpecError(f"root must have {inner.dim} columns, got shape {R.shape}")
    R = R.copy()
    R.setflags(write=False)
    return DistributionSpec("linear_image", R.shape[0], inner=inner, root=R)


def sylvester_hadamard(n: int) -> np.ndarray:
    if n < 1 or n & (n - 1):
        raise SpecError(f"Hadamard size must be a power of 2, got {n}")
    H = np.ones((1, 1))
    while H.shape[0] < n:
        H = np.block([[H, H], [H, -H]])
    return H


def _unit_roots(n: int) -> np.ndarray:
    """``exp(-2 pi i r / n)`` for r < n, exact at multiples of n/4."""
    r = np.arange(n)
    w = np.exp(-2j * np.pi * r / n)
    for q, val in enumerate((1.0, -1j, -1.0, 1j)):
        hit = (4 * r) == q * n
        w[hit] = val
    return w


def dft_matrix(n: int) -> np.ndarray:
    """``W[w, t] = exp(-2 pi i w t / n)``."""
    idx = np.arange(n)
    return _unit_roots(n)[np.outer(idx, idx) % n]


def two_basis_frame(n: int, seed=0) -> np.ndarray:
    """Standard basis plus a random orthonormal basis, scaled by ``sqrt(n)``:
    a tight frame of ``2n`` vectors of norm ``sqrt(n)``."""
    rng = as_seed(seed).generator()
    Q, R = np.linalg.qr(standard_normal(rng, (n, n)))
    Q = Q * np.sign(np.diag(R))
    return math.sqrt(n) * np.vstack([np.eye(n), Q.T])


def load_frame_csv(path) -> np.ndarray:
    with open(path, newline="") as fh:
        rows = [[float(x) for x in row] for row in csv.reader(fh) if row]
    return np.asarray(rows, dtype=float)


def save_frame_csv(vectors, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        for row in np.asarray(vectors):
            w.writerow([repr(float(x)) for x in row])


def _draw(spec: DistributionSpec, rng: np.random.Generator) -> np.ndarray:
    v, n = spec.variant, spec.dim
    if v == "gaussian":
        return standard_normal(rng, n)
    if v == "bernoulli":
        return np.where(rng.random(n) < 0.5, -1.0, 1.0)
    if v == "product":
        if spec.component == "gaussian":
            return standard_normal(rng, n)
        if spec.component == "bernoulli":
            return np.where(rng.random(n) < 0.5, -1.0, 1.0)
        return math.sqrt(3.0) * (2.0 * rng.random(n) - 1.0)
    if v == "coordinate":
        x = np.zeros(n)
        x[rng.integers(n)] = math.sqrt(n)
        return x
    if v == "spherical":
        while True:
            g = standard_normal(rng, n)
            r = np.linalg.norm(g)
            if r > 0.0:
                return g * (math.sqrt(n) / r)
    if v == "dft_row":
        w = int(rng.integers(n))
        return _unit_roots(n)[(w * np.arange(n)) % n]
    if v == "hadamard_row":
        return sylvester_hadamard(n)[int(rng.integers(n))].copy()
    if v == "frame":
        return spec.vectors[int(rng.integers(spec.vectors.shape[0]))].copy()
    if v == "selector":
        keep = rng.random() < spec.delta
        y = _draw(spec.inner, rng)
        return y / math.sqrt(spec.delta) if keep else np.zeros_like(y)
    if v == "linear_image":
        return spec.root @ _draw(spec.inner, rng)
    raise SpecError(f"unknown variant {v!r}")


def sample_vector(spec: DistributionSpec, seed) -> np.ndarray:
    """One draw, a pure function of ``(spec, seed)``."""
    return _draw(spec, as_seed(seed).generator())


def sample_matrix_rows(spec: DistributionSpec, num_rows: int, seed) -> np.ndarray:
    """``num_rows x dim`` matrix; row ``i`` is ``sample_vector(spec, seed.child(i))``."""
    seed = as_seed(seed)
    if num_rows < 1:
        raise ValueError("num_rows must be positive")
    dtype = complex if spec.is_complex else float
    A = np.empty((num_rows, spec.dim), dtype=dtype)
    for i in range(num_rows):
        A[i] = _draw(spec, seed.child(i).generator())
    return A


def sample_matrix_columns(spec: DistributionSpec, num_cols: int, seed) -> np.ndarray:
    """``dim x num_cols`` matrix with independent columns.

    Column models need ``|A_j|_2 = sqrt(dim)`` exactly; other specs are
    sampled but trigger a warning, and the column-model verifiers refuse them.
    """
    if not spec.exact_norm:
        warnings.warn(f"{spec.variant} columns are not exactly normalized to sqrt(dim)",
                      stacklevel=2)
    return sample_matrix_rows(spec, num_cols, seed).T.copy()


def second_moment_empirical(samples) -> np.ndarray:
    """``(1/N) sum_i X_i X_i*`` for samples given as rows (or a list of vectors)."""
    if isinstance(samples, np.ndarray) and samples.ndim == 2:
        X = samples
    else:
        vecs = [np.asarray(x) for x in samples]
        if not vecs:
            raise ValueError("need at least one sample")
        if len({v.shape for v in vecs}) != 1 or vecs[0].ndim != 1:
            raise ValueError("samples must be vectors of equal dimension")
        X = np.vstack(vecs)
    if X.shape[0] < 1:
        raise ValueError("need at least one sample")
    S = X.T @ X.conj() / X.shape[0]
    return (S + S.conj().T) / 2.0


def full_support(spec: DistributionSpec) -> np.ndarray:
    """All equally likely atoms of a finite uniform distribution, as rows."""
    n = spec.dim
    if spec.variant == "coordinate":
        return math.sqrt(n) * np.eye(n)
    if spec.variant == "dft_row":
        return dft_matrix(n)
    if spec.variant == "hadamard_row":
        return sylvester_hadamard(n)
    if spec.variant == "frame":
        return np.array(spec.vectors)
    if spec.variant == "bernoulli" and n <= 16:
        bits = (np.arange(2 ** n)[:, None] >> np.arange(n)) & 1
        return 2.0 * bits - 1.0
    raise SpecError(f"{spec.variant} has no enumerable uniform support")


__all__ = [
    "DistributionSpec", "SeedSpec", "SpecError", "gaussian", "bernoulli", "product",
    "coordinate", "spherical", "dft_row", "hadamard_row", "frame", "selector",
    "linear_image", "sylvester_hadamard", "dft_matrix", "two_basis_frame",
    "load_frame_csv", "save_frame_csv", "sample_vector", "sample_matrix_rows",
    "sample_matrix_columns", "second_moment_empirical", "full_support",
]
