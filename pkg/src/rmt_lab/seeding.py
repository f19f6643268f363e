"""Reproducible random streams.

Every random draw in the package is addressed by a :class:`SeedSpec`: a
master seed plus a stream index, optionally nested under parent streams.
The pair is hashed by :class:`numpy.random.SeedSequence` into the key of a
Philox counter-based generator, so a stream can be regenerated in isolation,
in any order, from any thread.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

_U64 = (1 << 64) - 1


@dataclass(frozen=True)
class SeedSpec:
    """Address of one random stream.

    ``path`` holds the stream indices of the ancestors, so that
    ``SeedSpec(7).child(3).child(5)`` and ``SeedSpec(7).child(5)`` never
    collide.
    """

    master_seed: int
    stream_index: int = 0
    path: tuple[int, ...] = field(default=())

    def __post_init__(self):
        for v in (self.master_seed, self.stream_index, *self.path):
            if not 0 <= int(v) <= _U64:
                raise ValueError(f"seed components must be 64-bit unsigned, got {v}")

    def child(self, index: int) -> "SeedSpec":
        return SeedSpec(self.master_seed, int(index), self.path + (self.stream_index,))

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(
            self.master_seed, spawn_key=self.path + (self.stream_index,)
        )
        return np.random.Generator(np.random.Philox(ss))

    def to_dict(self):
        return {"master_seed": self.master_seed, "stream_index": self.stream_index,
                "path": list(self.path)}

    @classmethod
    def from_value(cls, value) -> "SeedSpec":
        """Accept an int, a dict as produced by :meth:`to_dict`, or a SeedSpec."""
        if isinstance(value, SeedSpec):
            return value
        if isinstance(value, dict):
            return cls(int(value["master_seed"]), int(value.get("stream_index", 0)),
                       tuple(int(p) for p in value.get("path", ())))
        return cls(int(value))


def as_seed(seed) -> SeedSpec:
    return SeedSpec.from_value(seed)


def standard_normal(rng: np.random.Generator, size) -> np.ndarray:
    """Standard normal variates by the polar Box-Muller method.

    Uniform pairs are drawn in batches; accepted pairs are consumed in
    order, so the output depends only on the generator state.
    """
    shape = (size,) if np.isscalar(size) else tuple(size)
    total = int(np.prod(shape, dtype=np.int64))
    out = np.empty(total)
    filled = 0
    while filled < total:
        pairs = (total - filled + 1) // 2
        batch = int(pairs * 1.28) + 8
        u = 2.0 * rng.random((batch, 2)) - 1.0
        s = np.einsum("ij,ij->i", u, u)
        ok = (s > 0.0) & (s < 1.0)
        u, s = u[ok], s[ok]
        z = (u * np.sqrt(-2.0 * np.log(s) / s)[:, None]).ravel()
        take = min(total - filled, z.size)
        out[filled:filled + take] = z[:take]
        filled += take
    return out.reshape(shape)


def default_threads() -> int:
    env = os.environ.get("RMT_LAB_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return 1


def map_ordered(fn, items, threads=None):
    """``list(map(fn, items))``, optionally on a thread pool.

    Results come back in input order, so reductions over them are
    independent of the worker count.
    """
    items = list(items)
    threads = default_threads() if threads is None else max(1, int(threads))
    if threads == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))
