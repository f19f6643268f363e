"""Sub-gaussian and sub-exponential scalars: moment profiles, psi-norms and
evaluable tail bounds.

The absolute constants in the classical bounds are not pinned down by the
theory, so every evaluator takes them as parameters. Defaults of 1/4 come
from the elementary Chernoff step ``P{X >= t} <= exp(-t^2/4)``.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

DEFAULT_GRID = (1.0, 2.0, 4.0, 8.0, 16.0)
DEFAULT_C = 0.25
MAX_ENUMERATION = 20


@dataclass(frozen=True, eq=False)
class MomentProfile:
    """``(E|X|^p)^{1/p}`` on a finite grid of exponents.

    ``source`` is ``"empirical(<count>)"`` or ``"analytic(<name>)"``.
    Empirical profiles keep their samples so they can be re-centered.
    """

    p_grid: tuple
    moments: tuple
    source: str
    samples: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        if len(self.p_grid) != len(self.moments) or not self.p_grid:
            raise ValueError("p_grid and moments must be nonempty and of equal length")
        if any(b <= a for a, b in zip(self.p_grid, self.p_grid[1:])):
            raise ValueError("p_grid must be strictly increasing")
        if self.p_grid[0] < 1:
            raise ValueError("exponents must be >= 1")
        if not {1.0, 2.0, 4.0, 8.0} <= {float(p) for p in self.p_grid}:
            raise ValueError("p_grid must contain 1, 2, 4 and 8")
        if any(not m >= 0 for m in self.moments):
            raise ValueError("moments must be nonnegative")

    @property
    def analytic_name(self):
        if self.source.startswith("analytic(") and self.source.endswith(")"):
            return self.source[len("analytic("):-1]
        return None

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["p", "moment", "source"])
            for p, m in zip(self.p_grid, self.moments):
                w.writerow([repr(float(p)), repr(float(m)), self.source])

    @classmethod
    def from_csv(cls, path):
        with open(path, newline="") as fh:
            rows = list(csv.DictReader(fh))
        return cls(tuple(float(r["p"]) for r in rows),
                   tuple(float(r["moment"]) for r in rows),
                   rows[0]["source"])


def profile_from_samples(samples, p_grid=DEFAULT_GRID) -> MomentProfile:
    x = np.asarray(samples, dtype=float).ravel()
    if x.size == 0:
        raise ValueError("need at least one sample")
    a = np.abs(x)
    moments = tuple(float(np.mean(a ** p) ** (1.0 / p)) for p in p_grid)
    return MomentProfile(tuple(float(p) for p in p_grid), moments,
                         f"empirical({x.size})", samples=x.copy())


def _analytic(name, fn, p_grid):
    return MomentProfile(tuple(float(p) for p in p_grid),
                         tuple(float(fn(float(p))) for p in p_grid), f"analytic({name})")


def constant_profile(value=1.0, p_grid=DEFAULT_GRID) -> MomentProfile:
    """``X`` identically equal to ``value``."""
    return _analytic(f"constant={float(value)!r}", lambda p: abs(value), p_grid)


def bernoulli_profile(p_grid=DEFAULT_GRID) -> MomentProfile:
    """Symmetric signs: every absolute moment is 1."""
    return _analytic("bernoulli", lambda p: 1.0, p_grid)


def normal_profile(p_grid=DEFAULT_GRID) -> MomentProfile:
    """``sqrt(2) [Gamma((1+p)/2) / Gamma(1/2)]^{1/p}``."""
    def m(p):
        return math.sqrt(2.0) * math.exp((math.lgamma((1 + p) / 2) - math.lgamma(0.5)) / p)
    return _analytic("normal", m, p_grid)


def exponential_profile(p_grid=DEFAULT_GRID) -> MomentProfile:
    """Standard exponential: ``Gamma(p+1)^{1/p}``."""
    return _analytic("exponential", lambda p: math.exp(math.lgamma(p + 1) / p), p_grid)


def uniform_profile(half_width=math.sqrt(3.0), p_grid=DEFAULT_GRID) -> MomentProfile:
    """Uniform on ``[-a, a]``: ``a (p+1)^{-1/p}``."""
    a = float(half_width)
    return _analytic(f"uniform={a!r}", lambda p: a * (p + 1) ** (-1.0 / p), p_grid)


def psi2_norm(profile: MomentProfile) -> float:
    """``max_p p^{-1/2} (E|X|^p)^{1/p}`` over the grid.

    For empirical profiles this is a lower estimate of the true norm
    (grid max, no extrapolation).
    """
    return max(m / math.sqrt(p) for p, m in zip(profile.p_grid, profile.moments))


def psi1_norm(profile: MomentProfile) -> float:
    """``max_p p^{-1} (E|X|^p)^{1/p}`` over the grid."""
    return max(m / p for p, m in zip(profile.p_grid, profile.moments))


def center_shift(profile: MomentProfile, mean: float) -> MomentProfile:
    """Profile of ``X - mean``.

    Empirical profiles are recomputed from their samples. Analytic profiles
    are supported only for ``mean == 0`` and for constants. The result's
    psi2 norm is checked against twice the input's.
    """
    if mean == 0:
        return profile
    if profile.samples is not None:
        out = profile_from_samples(profile.samples - mean, profile.p_grid)
    else:
        name = profile.analytic_name or ""
        if not name.startswith("constant="):
            raise ValueError(f"no re-centering rule for analytic profile {profile.source}")
        value = float(name[len("constant="):])
        out = constant_profile(value - mean, profile.p_grid)
    if psi2_norm(out) > 2.0 * psi2_norm(profile) * (1 + 1e-12):
        raise ValueError(
            f"centered psi2 {psi2_norm(out)} exceeds twice the input's; is {mean} the mean?")
    return out


@dataclass(frozen=True)
class TailBoundParams:
    """Inputs of the Hoeffding/Bernstein evaluators.

    ``K`` bounds the psi-norm of the summands, ``c`` is the absolute
    constant and ``a`` the coefficient vector.
    """

    K: float
    a: tuple
    c: float = DEFAULT_C

    def __post_init__(self):
        if not self.K > 0:
            raise ValueError("K must be positive")
        if not self.c > 0:
            raise ValueError("c must be positive")
        if not np.linalg.norm(np.asarray(self.a, dtype=float)) > 0:
            raise ValueError("coefficient vector must be nonzero")

    @property
    def a_l2(self) -> float:
        return float(np.linalg.norm(np.asarray(self.a, dtype=float)))

    @property
    def a_linf(self) -> float:
        return float(np.max(np.abs(np.asarray(self.a, dtype=float))))


def hoeffding_bound(params: TailBoundParams, t: float) -> float:
    """``min(1, e * exp(-c t^2 / (K^2 |a|_2^2)))``."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    expo = -params.c * t * t / (params.K ** 2 * params.a_l2 ** 2)
    return min(1.0, math.e * math.exp(expo))


def bernstein_exponent(params: TailBoundParams, t: float) -> tuple[float, str]:
    """The exponent of the Bernstein bound and which regime produced it."""
    gauss = t * t / (params.K ** 2 * params.a_l2 ** 2)
    expo = t / (params.K * params.a_linf)
    if gauss <= expo:
        return -params.c * gauss, "subgaussian"
    return -params.c * expo, "subexponential"


def bernstein_bound(params: TailBoundParams, t: float) -> float:
    """``min(1, 2 exp(-c min(t^2/(K^2|a|_2^2), t/(K|a|_inf))))``."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    expo, _ = bernstein_exponent(params, t)
    return min(1.0, 2.0 * math.exp(expo))


def bernstein_crossover(params: TailBoundParams) -> float:
    """``t* = K |a|_2^2 / |a|_inf`` where the two regimes meet."""
    return params.K * params.a_l2 ** 2 / params.a_linf


@dataclass(frozen=True)
class KhintchineSandwich:
    lower: float
    exact: float
    upper_form: float

    @property
    def constant(self) -> float:
        """``exact / (sqrt(p) |a|_2)``: the factor that the absolute
        constant times the psi2 norm must cover."""
        return self.exact / self.upper_form if self.upper_form > 0 else 0.0


def _sign_patterns(n: int, start: int, stop: int) -> np.ndarray:
    idx = np.arange(start, stop, dtype=np.int64)[:, None]
    return 2.0 * ((idx >> np.arange(n)) & 1) - 1.0


def khintchine_sandwich(a, p: int) -> KhintchineSandwich:
    """Exact Rademacher ``L^p`` norm of ``sum a_i eps_i`` by enumerating all
    ``2^n`` sign patterns, bracketed by ``|a|_2`` and ``sqrt(p) |a|_2``."""
    a = np.asarray(a, dtype=float).ravel()
    n = a.size
    if p < 2 or int(p) != p or p % 2:
        raise ValueError("p must be an even integer >= 2")
    if n > MAX_ENUMERATION:
        raise ValueError(f"n = {n} too large for exact enumeration (max {MAX_ENUMERATION}); "
                         "use khintchine_monte_carlo")
    l2 = float(np.linalg.norm(a))
    if l2 == 0.0:
        return KhintchineSandwich(0.0, 0.0, 0.0)
    b = a / l2                      # keeps |s|^p away from under/overflow
    total = 1 << n
    acc = []
    chunk = 1 << 16
    for start in range(0, total, chunk):
        s = _sign_patterns(n, start, min(total, start + chunk)) @ b
        acc.append(float(np.sum(np.abs(s) ** p)))
    exact = l2 * (math.fsum(acc) / total) ** (1.0 / p)
    return KhintchineSandwich(l2, exact, math.sqrt(p) * l2)


def khintchine_monte_carlo(a, p: int, trials: int, seed) -> float:
    from .seeding import as_seed
    a = np.asarray(a, dtype=float).ravel()
    rng = as_seed(seed).generator()
    signs = np.where(rng.random((trials, a.size)) < 0.5, -1.0, 1.0)
    return float(np.mean(np.abs(signs @ a) ** p) ** (1.0 / p))


def empirical_tail(samples, t_grid) -> list[tuple[float, float]]:
    """``(t, fraction of |x| > t)`` for each ``t``; strict inequality."""
    x = np.sort(np.abs(np.asarray(samples, dtype=float).ravel()))
    if x.size == 0:
        raise ValueError("need at least one sample")
    out = []
    for t in t_grid:
        above = x.size - np.searchsorted(x, t, side="right")
        out.append((float(t), above / x.size))
    return out


def fit_subgaussian_tail_constant(samples, t_grid, K=None) -> float:
    """Largest ``c`` with ``P{|X| > t} <= exp(1 - c t^2 / K^2)`` at every
    grid point, where ``K`` defaults to the empirical psi2 estimate."""
    if K is None:
        K = psi2_norm(profile_from_samples(samples))
    best = math.inf
    for t, frac in empirical_tail(samples, t_grid):
        if t <= 0 or frac <= 0:
            continue
        best = min(best, K * K * (1.0 - math.log(frac)) / (t * t))
    return best
