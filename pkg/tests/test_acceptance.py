"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

Run ``pytest tests/test_acceptance.py -v`` (the lines are printed even
without ``-s``).
"""
import json
import math
import time

import numpy as np
import pytest

from rmt_lab import cli
from rmt_lab.ensembles import coordinate, gaussian
from rmt_lab.nets import build_net
from rmt_lab.rip import delta_k_bruteforce, delta_k_exact, delta_k_monte_carlo, verify_fourier_rip
from rmt_lab.seeding import SeedSpec, standard_normal
from rmt_lab.theorems import (verify_approximate_isometries, verify_bai_yin,
                              verify_coupon_collector, verify_covariance_estimation,
                              verify_decoupling, verify_gaussian_deviation, verify_gordon,
                              verify_khintchine, verify_matrix_bernstein,
                              verify_matrix_decoupling, verify_nets)
from rmt_lab.theorems.report import proportion_se

pytestmark = pytest.mark.acceptance


def test_01_gordon(announce):
    t0 = time.perf_counter()
    rep = verify_gordon(400, 100, 100, 42)
    dt = time.perf_counter() - t0
    a = rep.aggregates
    ok = (a["mean_s_min"] >= 10 - 3 * a["se_s_min"] and a["mean_s_max"] <= 30 + 3 * a["se_s_max"]
          and dt < 60 and rep.verdict.ok)
    announce("1 Gordon bounds", ok,
             f"mean s_min {a['mean_s_min']:.4f} (se {a['se_s_min']:.4f}), mean s_max "
             f"{a['mean_s_max']:.4f} (se {a['se_s_max']:.4f}), {dt:.1f}s")


def test_02_gaussian_deviation(announce):
    rep = verify_gaussian_deviation(200, 50, 3.0, 500, 42)
    p = rep.aggregates["empirical_probability"]
    se = proportion_se(p, 500)
    bound = 1 - 2 * math.exp(-4.5)
    ok = abs(bound - 0.9778) < 1e-4 and p >= bound - 3 * se
    announce("2 Gaussian deviation", ok, f"empirical {p:.4f} vs bound {bound:.4f}, se {se:.4f}")


def test_03_bai_yin(announce):
    t0 = time.perf_counter()
    reps = [verify_bai_yin(2000, 500, 42 + i, e, tol_max=0.03, tol_min=0.07)
            for i, e in enumerate(("gaussian", "bernoulli"))]
    dt = time.perf_counter() - t0
    ratios = [(r.aggregates["ratio_max"], r.aggregates["ratio_min"]) for r in reps]
    ok = all(0.97 <= rmax <= 1.03 and 0.93 <= rmin <= 1.07 for rmax, rmin in ratios) and dt < 300
    announce("3 Bai-Yin finite size", ok,
             "; ".join(f"{e}: s_max ratio {a:.4f}, s_min ratio {b:.4f}"
                       for e, (a, b) in zip(("gaussian", "bernoulli"), ratios)) + f", {dt:.1f}s")


def test_04_decoupling_identity(announce):
    rep = verify_decoupling(20, 14, seed=42)
    worst = rep.aggregates["max_relative_error"]
    sizes = {int(r.aux[0]) for r in rep.records}
    ok = rep.verdict.ok and len(rep.records) == 20 and worst <= 1e-12 and max(sizes) <= 14
    announce("4 decoupling identity", ok, f"20 matrices, n in {min(sizes)}..{max(sizes)}, "
                                          f"max relative error {worst:.2e}")


def test_05_matrix_decoupling(announce):
    rep = verify_matrix_decoupling(20, 8, 5, seed=42)
    worst = max(r.gap / r.aux[0] for r in rep.records)
    ok = rep.verdict.ok and len(rep.records) == 20 and worst <= 1.0
    announce("5 matrix decoupling", ok, f"max lhs / (4 max_T cross) = {worst:.4f}")


def test_06_nets(announce):
    rep = verify_nets(50, 6, seed=42)
    sizes_ok = all(x["size"] <= x["bound"] for x in rep.aggregates["nets"])
    eps_seen = sorted({r.aux[0] for r in rep.records if r.aux[2] == 1})
    ok = rep.verdict.ok and sizes_ok and eps_seen == [0.1, 0.25] and any(
        r.aux[2] == 2 and r.aux[0] == 0.2 for r in rep.records)
    announce("6 net machinery", ok,
             ", ".join(f"eps {x['eps']} dim {x['dim']}: {x['size']} <= {x['bound']:.0f}"
                       for x in rep.aggregates["nets"]))


def test_07_approximate_isometries(announce):
    rep = verify_approximate_isometries(100, seed=42)
    ok = rep.verdict.ok and len(rep.records) == 100 and rep.aggregates["max_gap"] <= 1
    announce("7 approximate isometry round trip", ok,
             f"100 matrices, max gap {rep.aggregates['max_gap']:.4f}")


def test_08_rip_exactness(announce):
    dup = np.zeros((3, 3))
    dup[0, 0] = dup[0, 1] = 1.0
    dup[1, 2] = 1.0
    d_dup = delta_k_exact(dup, 2).delta
    d_orth = delta_k_exact(np.linalg.qr(standard_normal(SeedSpec(42).generator(), (12, 8)))[0], 3).delta
    worst_mc, worst_oracle = -np.inf, 0.0
    for i in range(20):
        A = standard_normal(SeedSpec(42, 0, (i,)).generator(), (10, 16))
        A /= np.linalg.norm(A, axis=0)
        ex = delta_k_exact(A, 3).delta
        mc = delta_k_monte_carlo(A, 3, 100, SeedSpec(42, 1, (i,))).delta
        bf, _ = delta_k_bruteforce(A, 3)
        worst_mc = max(worst_mc, mc - ex)
        worst_oracle = max(worst_oracle, abs(bf - ex))
    ok = abs(d_dup - 1) <= 1e-12 and d_orth <= 1e-12 and worst_mc <= 0 and worst_oracle <= 1e-12
    announce("8 RIP exactness", ok,
             f"duplicate delta_2 {d_dup!r}, orthonormal delta_3 {d_orth:.1e}, "
             f"max(MC - exact) {worst_mc:.2e}, max |oracle - exact| {worst_oracle:.2e}")


def test_09_coupon_collector(announce):
    rep = verify_coupon_collector(10, [10, 20, 40, 80], 2000, 42)
    rows = rep.aggregates["by_N"]
    ok = rep.verdict.ok and all(abs(r["empirical"] - r["exact"]) <= 3 * r["se"] for r in rows)
    announce("9 coupon collector", ok,
             ", ".join(f"N={r['N']}: {r['empirical']:.4f} vs {r['exact']:.4f}" for r in rows))


def test_10_covariance(announce):
    rep = verify_covariance_estimation(gaussian(20), [1000, 4000], 50, 42)
    med = rep.aggregates["median_error"]
    ratio = med["1000"] / med["4000"]
    n = 20
    N0 = math.ceil(20 * n * math.log(n))
    heavy = verify_covariance_estimation(coordinate(n), [], 50, 43, c0=20)
    err = heavy.aggregates["median_error_N_law"]
    ok = 1.6 <= ratio <= 2.5 and heavy.aggregates["N_law"] == N0 and err <= 0.5
    announce("10 covariance scaling", ok,
             f"Gaussian ratio {ratio:.4f}; coordinate N={N0} median error {err:.4f}")


def test_11_khintchine(announce):
    rep = verify_khintchine(seed=42)
    cases = {int(r.aux[0]) for r in rep.records}
    lower_ok = all(r.aux[3] >= r.aux[2] * (1 - 1e-12) for r in rep.records)
    C = rep.verdict.value
    ok = rep.verdict.ok and len(cases) == 10 and lower_ok and C <= 3
    announce("11 Khintchine sandwich", ok, f"10 cases x p in (2, 4, 8), fitted C = {C:.4f}")


def test_12_matrix_bernstein(announce):
    rep = verify_matrix_bernstein(2000, 42)
    grid = rep.aggregates["grid"]
    ok = rep.verdict.ok and all(g["empirical"] <= g["allowed"] for g in grid)
    announce("12 matrix Bernstein", ok,
             f"worst margin {rep.aggregates['worst_margin']:.4f} over {len(grid)} grid points")


def test_13_fourier_rip(announce):
    t0 = time.perf_counter()
    rep = verify_fourier_rip(64, [8, 16, 32, 64], 4, 30, 42)
    dt = time.perf_counter() - t0
    mean = rep.aggregates["mean_delta"]
    strict = all(b < a for a, b in zip(mean, mean[1:]))
    anchor = rep.aggregates["anchor_delta"]
    ok = strict and anchor <= 1e-12 and dt < 300 and rep.verdict.ok
    announce("13 Fourier RIP trend", ok,
             f"mean delta_4 {[round(x, 4) for x in mean]}, anchor {anchor:.1e}, {dt:.1f}s")


def _run_cli(cfg_path, out, threads):
    code = cli.main(["run", str(cfg_path), "--out", str(out), "--threads", str(threads)])
    name = json.loads(cfg_path.read_text()).get("name") or json.loads(cfg_path.read_text())["config"]["name"]
    return code, (out / f"{name}.csv").read_bytes(), (out / f"{name}.json").read_bytes()


def test_14_determinism(announce, tmp_path):
    configs = [
        {"name": "gordon", "N": 400, "n": 100, "trials": 100, "seed": 42},
        {"name": "coupon_collector", "n": 10, "trials": 500, "seed": 42,
         "params": {"N_list": [10, 20, 40, 80]}},
        {"name": "fourier_rip", "n": 32, "trials": 5, "seed": 42,
         "params": {"m_list": [8, 16, 32], "k": 2}},
    ]
    same = True
    for cfg in configs:
        path = tmp_path / f"{cfg['name']}.json"
        path.write_text(json.dumps(cfg))
        a = _run_cli(path, tmp_path / f"{cfg['name']}-t1", 1)
        b = _run_cli(path, tmp_path / f"{cfg['name']}-t4", 4)
        manifest = tmp_path / f"{cfg['name']}-t1" / "manifest.json"
        c = _run_cli(manifest, tmp_path / f"{cfg['name']}-replay", 3)
        same &= a[0] == 0 and a == b == c
    announce("14 determinism", same, "CSV and JSON byte-identical across --threads 1/4 "
                                     "and manifest replay for " + ", ".join(c["name"] for c in configs))
