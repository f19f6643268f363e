"""Experiment configuration and report types, with JSON/CSV emission.

CSV layout (stable): ``trial, s_min, s_max, gap, aux1, ..., auxK``; the
meaning of each aux column is listed under ``aux_names`` in the JSON.
Floats are written in shortest round-trip form; missing values are empty.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

from ..ensembles import DistributionSpec
from ..seeding import SeedSpec, as_seed

HOLDS = "holds"
FITTED = "holds-with-fitted-constant"
VIOLATED = "violated"


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    name: str
    N: int | None = None
    n: int | None = None
    trials: int = 1
    seed: SeedSpec = field(default_factory=lambda: SeedSpec(0))
    distribution: DistributionSpec | None = None
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        self.seed = as_seed(self.seed)
        for key in ("N", "n"):
            v = getattr(self, key)
            if v is not None and (int(v) != v or v < 1):
                raise ConfigError(f"{key} must be a positive integer, got {v!r}")
        if int(self.trials) != self.trials or self.trials < 1:
            raise ConfigError(f"trials must be >= 1, got {self.trials!r}")

    def to_dict(self) -> dict:
        d = {"name": self.name, "trials": self.trials, "seed": self.seed.master_seed,
             "params": dict(sorted(self.params.items()))}
        if self.seed.stream_index or self.seed.path:
            d["seed"] = self.seed.to_dict()
        if self.N is not None:
            d["N"] = self.N
        if self.n is not None:
            d["n"] = self.n
        if self.distribution is not None:
            d["distribution"] = self.distribution.to_dict()
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        if "name" not in d:
            raise ConfigError("config lacks an experiment 'name'")
        dist = d.get("distribution")
        try:
            dist = DistributionSpec.from_dict(dist) if dist is not None else None
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"bad distribution spec: {exc}") from exc
        params = d.get("params", {})
        if not isinstance(params, dict):
            raise ConfigError("params must be a JSON object")
        return cls(d["name"], d.get("N"), d.get("n"), d.get("trials", 1),
                   d.get("seed", 0), dist, params)


@dataclass(frozen=True)
class Verdict:
    kind: str
    value: float | None = None
    details: str = ""

    def __str__(self):
        if self.kind == FITTED:
            return f"{FITTED}({self.value:.6g})"
        if self.kind == VIOLATED:
            return f"{VIOLATED}({self.details})"
        return self.kind

    @property
    def ok(self) -> bool:
        return self.kind in (HOLDS, FITTED)


@dataclass(frozen=True)
class TrialRecord:
    trial: int
    s_min: float | None = None
    s_max: float | None = None
    gap: float | None = None
    aux: tuple = ()


def _clean(x):
    if isinstance(x, dict):
        return {str(k): _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if isinstance(x, (np.bool_, bool)):
        return bool(x)
    if isinstance(x, (np.integer, int)):
        return int(x)
    if isinstance(x, (np.floating, float)):
        x = float(x)
        if math.isnan(x):
            return None
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    if isinstance(x, np.ndarray):
        return _clean(x.tolist())
    return x


def _fmt(x):
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if math.isnan(x):
        return ""
    return repr(x)


@dataclass
class ExperimentReport:
    config: dict
    records: list
    aggregates: dict
    verdict: Verdict
    aux_names: tuple = ()

    def column(self, name):
        if name in ("s_min", "s_max", "gap", "trial"):
            return np.array([np.nan if getattr(r, name) is None else getattr(r, name)
                             for r in self.records], dtype=float)
        i = self.aux_names.index(name)
        return np.array([r.aux[i] for r in self.records], dtype=float)

    def to_dict(self) -> dict:
        return _clean({
            "config": self.config,
            "verdict": {"kind": self.verdict.kind, "value": self.verdict.value,
                        "details": self.verdict.details, "text": str(self.verdict)},
            "aggregates": self.aggregates,
            "aux_names": list(self.aux_names),
            "trials": len(self.records),
        })

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["trial", "s_min", "s_max", "gap"]
                   + [f"aux{i + 1}" for i in range(len(self.aux_names))])
        for r in self.records:
            w.writerow([r.trial, _fmt(r.s_min), _fmt(r.s_max), _fmt(r.gap)]
                       + [_fmt(a) for a in r.aux])
        return buf.getvalue()


def mean_se(x):
    x = np.asarray(x, dtype=float)
    se = float(np.std(x, ddof=1) / math.sqrt(x.size)) if x.size > 1 else 0.0
    return float(np.mean(x)), se


def proportion_se(p, trials):
    return math.sqrt(max(p * (1.0 - p), 0.0) / trials)


def delta_from_gap(gap):
    """Smallest ``delta`` with ``gap <= max(delta, delta^2)``."""
    return gap if gap <= 1.0 else math.sqrt(gap)
