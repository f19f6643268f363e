"""Registry mapping experiment names to verifiers.

Each entry declares which of ``N``/``n`` it needs, its required and
optional ``params`` (with defaults), whether it takes a distribution, and
an adapter from :class:`ExperimentConfig` to the verifier call.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import theorems as th
from .ensembles import SpecError, gaussian
from .rip import verify_fourier_rip, verify_subgaussian_rip
from .theorems.report import ConfigError, ExperimentConfig, ExperimentReport


@dataclass(frozen=True)
class Experiment:
    name: str
    anchor: str
    runner: Callable[[ExperimentConfig, dict, int | None], ExperimentReport]
    dims: tuple = ()
    required: tuple = ()
    optional: dict = field(default_factory=dict)
    distribution: str = "none"      # "none", "required" or "optional"

    def params_for(self, cfg: ExperimentConfig) -> dict:
        for d in self.dims:
            if getattr(cfg, d) is None:
                raise ConfigError(f"experiment {self.name!r} needs {d}")
        allowed = set(self.required) | set(self.optional)
        unknown = sorted(set(cfg.params) - allowed)
        if unknown:
            raise ConfigError(f"experiment {self.name!r} does not accept params {unknown}; "
                              f"allowed: {sorted(allowed)}")
        missing = [p for p in self.required if p not in cfg.params]
        if missing:
            raise ConfigError(f"experiment {self.name!r} needs params {missing}")
        if self.distribution == "required" and cfg.distribution is None:
            raise ConfigError(f"experiment {self.name!r} needs a distribution")
        if self.distribution == "none" and cfg.distribution is not None:
            raise ConfigError(f"experiment {self.name!r} takes no distribution")
        return {**self.optional, **cfg.params}

    def run(self, cfg: ExperimentConfig, threads=None) -> ExperimentReport:
        params = self.params_for(cfg)
        try:
            report = self.runner(cfg, params, threads)
        except SpecError as exc:
            raise ConfigError(str(exc)) from exc
        report.config = cfg.to_dict()
        return report

    def signature(self) -> str:
        parts = list(self.dims) + ["trials", "seed"]
        if self.distribution == "required":
            parts.append("distribution")
        parts += list(self.required)
        opt = list(self.optional) + (["distribution"] if self.distribution == "optional" else [])
        text = "required: " + ", ".join(parts)
        if opt:
            text += "; optional: " + ", ".join(opt)
        return text


def _dist_n(cfg):
    dist = cfg.distribution
    if cfg.n is not None and dist.dim != cfg.n:
        raise ConfigError(f"distribution dim {dist.dim} does not match n={cfg.n}")
    return dist


def _columns_dist(cfg):
    dist = cfg.distribution
    if dist.dim != cfg.N:
        raise ConfigError(f"column distribution dim {dist.dim} does not match N={cfg.N}")
    return dist


def _bai_yin(cfg, p, threads):
    return th.verify_bai_yin(cfg.N, cfg.n, cfg.seed, p["entries"], p["tol_max"], p["tol_min"])


def _heavy_columns(cfg, p, threads):
    if p["adversarial"]:
        return th.verify_heavy_tailed_columns(None, cfg.N, cfg.n, cfg.trials, cfg.seed,
                                              th.identical_columns_sampler(cfg.N, cfg.n), threads)
    if cfg.distribution is None:
        raise ConfigError("heavy_tailed_columns needs a distribution unless adversarial")
    return th.verify_heavy_tailed_columns(_columns_dist(cfg), cfg.N, cfg.n, cfg.trials,
                                          cfg.seed, threads=threads)


def _subframe(cfg, p, threads):
    dist = cfg.distribution
    if dist.variant != "frame":
        raise ConfigError("random_subframe needs a frame distribution")
    N = cfg.N if cfg.N is not None else len(dist.vectors)
    return th.random_subframe(dist.vectors, N, cfg.trials, cfg.seed, p["exhaustive"], p["eps"],
                              threads=threads)


def _submatrix(cfg, p, threads):
    B = th.isometry_matrix(p["matrix"], int(p["M"]), cfg.n)
    return th.verify_random_submatrix(B, cfg.N, cfg.trials, cfg.seed, p["t"], threads)


def _covariance(cfg, p, threads):
    sigma = None if p["sigma"] is None else np.asarray(p["sigma"], dtype=float)
    return th.verify_covariance_estimation(_dist_n(cfg), p["N_list"], cfg.trials, cfg.seed,
                                           sigma, p["relative"], p["c0"], threads)


def _sub_rows(cfg, p, threads):
    sigma = None if p["sigma"] is None else np.asarray(p["sigma"], dtype=float)
    return th.verify_subgaussian_rows(_dist_n(cfg), cfg.N, cfg.trials, cfg.seed, sigma=sigma,
                                      check_scaling=p["check_scaling"], threads=threads)


def _rip(cfg, p, threads):
    dist = cfg.distribution or gaussian(cfg.n)
    if dist.dim != cfg.n:
        raise ConfigError(f"distribution dim {dist.dim} does not match n={cfg.n}")
    return verify_subgaussian_rip(dist, p["m_list"], int(p["k"]), cfg.trials, cfg.seed,
                                  threads=threads, scaling=p["scaling"])


EXPERIMENTS = {e.name: e for e in [
    Experiment("approximate_isometries", "Approximate isometries",
               lambda c, p, th_: th.verify_approximate_isometries(c.trials, c.seed)),
    Experiment("bai_yin", "Bai-Yin's law", _bai_yin, ("N", "n"),
               optional={"entries": "gaussian", "tol_max": 0.05, "tol_min": 0.05}),
    Experiment("coupon_collector", "Heavy-tailed rows: coordinate rows and coupon collecting",
               lambda c, p, t: th.verify_coupon_collector(c.n, p["N_list"], c.trials, c.seed, t),
               ("n",), ("N_list",)),
    Experiment("covariance_estimation", "Covariance estimation for arbitrary distributions",
               _covariance, (), ("N_list",),
               {"relative": False, "c0": None, "sigma": None}, "required"),
    Experiment("decoupling", "Decoupling",
               lambda c, p, t: th.verify_decoupling(c.trials, int(p["max_n"]), c.seed),
               optional={"max_n": 14}),
    Experiment("fourier_rip", "Random Fourier measurements",
               lambda c, p, t: verify_fourier_rip(c.n, p["m_list"], int(p["k"]), c.trials, c.seed,
                                                  p["kind"], p["anchor"], threads=t),
               ("n",), ("m_list", "k"), {"kind": "dft", "anchor": True}),
    Experiment("gaussian_deviation", "Gaussian matrices, deviation",
               lambda c, p, t: th.verify_gaussian_deviation(c.N, c.n, p["t"], c.trials, c.seed, t),
               ("N", "n"), ("t",)),
    Experiment("gordon", "Gordon's theorem for Gaussian matrices",
               lambda c, p, t: th.verify_gordon(c.N, c.n, c.trials, c.seed, t), ("N", "n")),
    Experiment("heavy_tailed_columns", "Heavy-tailed columns", _heavy_columns, ("N", "n"),
               optional={"adversarial": False}, distribution="optional"),
    Experiment("heavy_tailed_rows", "Heavy-tailed rows",
               lambda c, p, t: th.verify_heavy_tailed_rows(_dist_n(c), c.N, p["t"], c.trials,
                                                           c.seed, c=p["c"], threads=t),
               ("N",), ("t",), {"c": 0.25}, "required"),
    Experiment("heavy_tailed_rows_expectation", "Heavy-tailed rows; expected singular values",
               lambda c, p, t: th.verify_heavy_tailed_rows_expectation(
                   _dist_n(c), c.N, c.trials, c.seed, check_scaling=p["check_scaling"], threads=t),
               ("N",), (), {"check_scaling": False}, "required"),
    Experiment("khintchine", "Khintchine inequality",
               lambda c, p, t: th.verify_khintchine(seed=c.seed)),
    Experiment("matrix_bernstein", "Non-commutative Bernstein-type inequality",
               lambda c, p, t: th.verify_matrix_bernstein(c.trials, c.seed, p["ensemble"],
                                                          p["t_grid"], t),
               optional={"ensemble": "sign_diagonal", "t_grid": None}),
    Experiment("matrix_decoupling", "Matrix decoupling",
               lambda c, p, t: th.verify_matrix_decoupling(c.trials, c.N or 8, c.n or 5, c.seed)),
    Experiment("nets", "Computing the spectral norm on a net",
               lambda c, p, t: th.verify_nets(c.trials, int(p["rows"]), seed=c.seed),
               optional={"rows": 6}),
    Experiment("random_subframe", "Random sub-frames", _subframe, (),
               optional={"exhaustive": False, "eps": None}, distribution="required"),
    Experiment("random_submatrix", "Random sub-matrices", _submatrix, ("N", "n"), ("matrix", "M"),
               {"t": 3.0}),
    Experiment("subgaussian_columns", "Sub-gaussian columns",
               lambda c, p, t: th.verify_subgaussian_columns(_columns_dist(c), c.N, c.n, c.trials,
                                                             c.seed, p["check_scaling"], t),
               ("N", "n"), (), {"check_scaling": True}, "required"),
    Experiment("subgaussian_rip", "Sub-gaussian restricted isometries", _rip, ("n",),
               ("m_list", "k"), {"scaling": "columns"}, "optional"),
    Experiment("subgaussian_rows", "Sub-gaussian rows", _sub_rows, ("N",), (),
               {"check_scaling": True, "sigma": None}, "required"),
]}


def get(name: str) -> Experiment:
    try:
        return EXPERIMENTS[name]
    except KeyError:
        raise ConfigError(f"unknown experiment {name!r}; see `rmt-lab list`") from None


def catalog() -> list[str]:
    return [f"{e.name}\t{e.anchor}\t{e.signature()}" for e in sorted(EXPERIMENTS.values(),
                                                                        key=lambda e: e.name)]


def run_config(cfg: ExperimentConfig | dict, threads=None) -> ExperimentReport:
    if isinstance(cfg, dict):
        cfg = ExperimentConfig.from_dict(cfg)
    return get(cfg.name).run(cfg, threads)


# Configurations whose fitted constants define the shipped budgets.
CALIBRATION_SEED = 20240601
CALIBRATION_RUNS = [
    {"name": "subgaussian_rows", "N": 800, "n": 50, "trials": 100,
     "distribution": {"variant": "gaussian", "dim": 50}},
    {"name": "subgaussian_rows", "N": 800, "n": 50, "trials": 100,
     "distribution": {"variant": "bernoulli", "dim": 50}},
    {"name": "heavy_tailed_rows", "N": 1200, "n": 20, "trials": 500,
     "distribution": {"variant": "coordinate", "dim": 20}, "params": {"t": 3}},
    {"name": "heavy_tailed_rows_expectation", "N": 1024, "n": 16, "trials": 200,
     "distribution": {"variant": "coordinate", "dim": 16}},
    {"name": "subgaussian_columns", "N": 400, "n": 20, "trials": 100,
     "distribution": {"variant": "spherical", "dim": 400}},
    {"name": "heavy_tailed_columns", "N": 512, "n": 16, "trials": 200,
     "distribution": {"variant": "spherical", "dim": 512}},
    {"name": "heavy_tailed_columns", "N": 256, "n": 8, "trials": 200,
     "distribution": {"variant": "coordinate", "dim": 256}},
    {"name": "khintchine", "trials": 1},
    {"name": "subgaussian_rip", "n": 16, "trials": 50,
     "distribution": {"variant": "bernoulli", "dim": 16},
     "params": {"m_list": [8, 16, 32, 64], "k": 2}},
    {"name": "fourier_rip", "n": 64, "trials": 30, "params": {"m_list": [8, 16, 32, 64], "k": 4}},
    {"name": "fourier_rip", "n": 64, "trials": 30,
     "params": {"m_list": [8, 16, 32, 64], "k": 4, "kind": "hadamard"}},
]
# heavy_tailed_rows fits the largest admissible c: a budget is a floor, not a ceiling
LOWER_IS_WORSE = {"heavy_tailed_rows"}
BUDGET_FACTOR = 1.5
