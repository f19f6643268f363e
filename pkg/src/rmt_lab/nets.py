"""Epsilon-nets of the unit sphere and spectral norms computed on them.

Nets are built greedily: candidate points stream in from the uniform
distribution on the sphere (each followed by its antipode) and a candidate
is admitted when it is at least ``eps`` away from every point admitted so
far. The result is eps-separated by construction; it is an eps-net once no
candidate can be admitted, which is certified probabilistically by a long
run of consecutive rejections.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .seeding import as_seed, standard_normal
from .spectra import as_matrix

SIZE_GUARD = 18.0
PATIENCE_FACTOR = 200
_BATCH = 4096
# absolute slack on inner products; lets exact antipodes count as 2 apart
_TOL = 1e-12


class NetBudgetError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class EpsilonNet:
    dim: int
    eps: float
    points: np.ndarray

    def __len__(self):
        return self.points.shape[0]

    @property
    def cardinality_bound(self) -> float:
        return (1.0 + 2.0 / self.eps) ** self.dim

    def min_separation(self) -> float:
        P = self.points
        if len(P) < 2:
            return math.inf
        G = np.clip(P @ P.T, -1.0, 1.0)
        np.fill_diagonal(G, -np.inf)
        return float(math.sqrt(max(0.0, 2.0 - 2.0 * G.max())))

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            for row in self.points:
                w.writerow([repr(float(x)) for x in row])


def net_size_exponent(dim: int, eps: float) -> float:
    return dim * math.log(1.0 + 2.0 / eps)


def build_net(dim: int, eps: float, seed=0, patience: int | None = None) -> EpsilonNet:
    """Greedy maximal eps-separated subset of ``S^{dim-1}``.

    Stops after ``patience`` consecutive rejected candidates; the default
    is ``200 (1 + 2/eps)^dim``. Deterministic given ``seed``.
    """
    if dim < 1 or int(dim) != dim:
        raise ValueError("dim must be a positive integer")
    if not 0.0 < eps <= 2.0:
        raise ValueError("eps must lie in (0, 2]")
    expo = net_size_exponent(dim, eps)
    if expo > SIZE_GUARD:
        raise NetBudgetError(
            f"net too large: (1 + 2/eps)^dim = {math.exp(expo):.3e} exceeds e^{SIZE_GUARD:g}")
    if patience is None:
        patience = int(math.ceil(PATIENCE_FACTOR * math.exp(expo)))
    rng = as_seed(seed).generator()
    thresh = 1.0 - eps * eps / 2.0 + _TOL
    pts = np.empty((64, dim))
    count = 0
    run = 0
    while run < patience:
        half = standard_normal(rng, (_BATCH // 2, dim))
        half /= np.linalg.norm(half, axis=1, keepdims=True)
        cand = np.empty((_BATCH, dim))
        cand[0::2] = half
        cand[1::2] = -half
        # candidates that survive the current net; admissions inside the batch
        # are then resolved one by one in stream order
        if count:
            free = np.flatnonzero(np.max(cand @ pts[:count].T, axis=1) <= thresh)
        else:
            free = np.arange(_BATCH)
        pos = 0
        for i in free:
            x = cand[i]
            if count and np.max(pts[:count] @ x) > thresh:
                continue
            if run + (i - pos) >= patience:
                break
            if count == len(pts):
                pts = np.vstack([pts, np.empty_like(pts)])
            pts[count] = x
            count += 1
            run = 0
            pos = i + 1
        else:
            run += _BATCH - pos
            continue
        break
    return EpsilonNet(int(dim), float(eps), pts[:count].copy())


def covering_radius_mc(net: EpsilonNet, num_points: int = 10_000, seed=1) -> float:
    """Largest distance from ``num_points`` random sphere points to the net."""
    rng = as_seed(seed).generator()
    worst = 0.0
    for start in range(0, num_points, _BATCH):
        m = min(_BATCH, num_points - start)
        x = standard_normal(rng, (m, net.dim))
        x /= np.linalg.norm(x, axis=1, keepdims=True)
        best = np.clip(np.max(x @ net.points.T, axis=1), -1.0, 1.0)
        worst = max(worst, float(np.max(np.sqrt(np.maximum(0.0, 2.0 - 2.0 * best)))))
    return worst


def covering_radius_exact(net: EpsilonNet) -> float:
    """Exact covering radius for ``dim <= 2``."""
    if net.dim == 1:
        signs = set(np.sign(net.points[:, 0]))
        return 0.0 if signs == {1.0, -1.0} else 2.0
    if net.dim != 2:
        raise ValueError("exact covering radius only for dim <= 2")
    ang = np.sort(np.arctan2(net.points[:, 1], net.points[:, 0]))
    gaps = np.diff(np.concatenate([ang, [ang[0] + 2 * math.pi]]))
    half = float(np.max(gaps)) / 2.0
    return 2.0 * math.sin(min(half, math.pi) / 2.0)


def norm_via_net(A, net: EpsilonNet) -> tuple[float, float]:
    """``(max_x |Ax|, max_x |Ax| / (1 - eps))`` over the net; the spectral
    norm of ``A`` lies between the two."""
    A = as_matrix(A)
    if A.shape[1] != net.dim:
        raise ValueError(f"net dimension {net.dim} != column count {A.shape[1]}")
    if net.eps >= 1.0:
        raise ValueError("eps >= 1 makes the upper bound vacuous")
    lower = float(np.max(np.linalg.norm(net.points @ A.T, axis=1)))
    return lower, lower / (1.0 - net.eps)


def quadratic_form_via_net(A, net: EpsilonNet) -> float:
    """``max_x |<Ax, x>| / (1 - 2 eps)`` over the net, an upper bound on
    the spectral norm of a symmetric ``A``."""
    A = as_matrix(A)
    if A.shape != (net.dim, net.dim):
        raise ValueError("A must be square with the net's dimension")
    if net.eps >= 0.5:
        raise ValueError("eps >= 1/2 makes the bound vacuous")
    if not np.allclose(A, A.conj().T, rtol=0.0, atol=1e-12):
        raise ValueError("A must be symmetric")
    P = net.points
    forms = np.abs(np.einsum("ij,ij->i", P @ A.T, P))
    return float(np.max(forms)) / (1.0 - 2.0 * net.eps)
