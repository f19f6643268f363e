"""Deterministic batteries for exact identities and inequalities that do not
depend on an unknown constant: Khintchine, decoupling, nets, approximate
isometries, and the matrix Bernstein tail."""
from __future__ import annotations

import math

import numpy as np

from ..ensembles import gaussian, sample_matrix_rows
from ..matrixsum import (SHIPPED_ENSEMBLES, decoupling_identity, empirical_matrix_sum_tail,
                         matrix_decoupling_bound)
from ..nets import build_net, norm_via_net, quadratic_form_via_net
from ..scalartails import khintchine_sandwich
from ..seeding import as_seed, standard_normal
from ..spectra import gap_bound_from_interval, isometry_gap, spectral_norm, svd_values
from .report import FITTED, HOLDS, VIOLATED, ExperimentReport, TrialRecord, Verdict

KHINTCHINE_P = (2, 4, 8)


def khintchine_battery(seed=0):
    """Ten fixed coefficient vectors, ``n <= 12``."""
    rng = as_seed(seed).generator()
    return [
        np.array([1.0]),
        np.ones(2),
        np.ones(12),
        np.arange(1.0, 11.0),
        0.5 ** np.arange(12),
        np.array([3.0, 4.0]),
        np.array([10.0, 1.0, 1.0, 1.0, 1.0]),
        standard_normal(rng, 12),
        rng.random(8),
        np.array([1.0, -1.0] * 4 + [1.0]),
    ]


def verify_khintchine(cases=None, p_list=KHINTCHINE_P, seed=0) -> ExperimentReport:
    """Exact ``L^p`` norms of Rademacher sums on a battery.

    The lower bound ``|a|_2`` must never fail, ``p = 2`` must be an
    equality, and the fitted constant is the largest ratio of the exact norm
    to ``sqrt(p) |a|_2``.
    """
    cases = khintchine_battery(seed) if cases is None else [np.asarray(a, float) for a in cases]
    records, problems, C = [], [], 0.0
    for i, a in enumerate(cases):
        for p in p_list:
            s = khintchine_sandwich(a, p)
            if s.exact < s.lower * (1 - 1e-12):
                problems.append(f"case {i}, p={p}: {s.exact} < {s.lower}")
            if p == 2 and abs(s.exact - s.lower) > 1e-12 * max(1.0, s.lower):
                problems.append(f"case {i}: p=2 is not an equality")
            C = max(C, s.constant)
            records.append(TrialRecord(len(records), None, None, None,
                                       (i, p, s.lower, s.exact, s.upper_form, s.constant)))
    verdict = Verdict(FITTED, C) if not problems else Verdict(VIOLATED, C, "; ".join(problems))
    cfg = {"name": "khintchine", "trials": len(records), "seed": as_seed(seed).to_dict(),
           "params": {"p_list": list(p_list), "cases": len(cases)}}
    return ExperimentReport(cfg, records, {"C_hat": C, "cases": len(cases)}, verdict,
                            ("case", "p", "lower", "exact", "upper_form", "constant"))


def random_zero_diagonal(n, seed):
    a = standard_normal(as_seed(seed).generator(), (n, n))
    np.fill_diagonal(a, 0.0)
    return a


def verify_decoupling(cases=20, max_n=14, seed=0) -> ExperimentReport:
    """Exact decoupling identity on ``cases`` random zero-diagonal matrices
    with sizes cycling through ``2..max_n``, all ``2^n`` subsets enumerated."""
    seed = as_seed(seed)
    records, worst, problems = [], 0.0, []
    for i in range(int(cases)):
        n = 2 + i % (max_n - 1)
        a = random_zero_diagonal(n, seed.child(i))
        try:
            r = decoupling_identity(a)
        except AssertionError as exc:
            problems.append(f"case {i}: {exc}")
            continue
        rel = abs(r.lhs - r.rhs) / max(1.0, abs(r.lhs))
        worst = max(worst, rel)
        records.append(TrialRecord(i, None, None, rel, (n, r.lhs, r.rhs)))
    verdict = Verdict(HOLDS) if not problems else Verdict(VIOLATED, details="; ".join(problems))
    cfg = {"name": "decoupling", "trials": int(cases), "seed": seed.to_dict(),
           "params": {"max_n": max_n}}
    return ExperimentReport(cfg, records, {"max_relative_error": worst}, verdict,
                            ("n", "lhs", "rhs"))


def random_unit_columns(N, n, seed):
    A = standard_normal(as_seed(seed).generator(), (N, n))
    return A / np.linalg.norm(A, axis=0)


def verify_matrix_decoupling(cases=20, N=8, n=5, seed=0) -> ExperimentReport:
    """``|B*B - I| <= 4 max_T |B_T* B_{T^c}|`` over all subsets ``T``."""
    seed = as_seed(seed)
    records, problems = [], []
    for i in range(int(cases)):
        B = random_unit_columns(N, n, seed.child(i))
        try:
            r = matrix_decoupling_bound(B)
        except AssertionError as exc:
            problems.append(f"case {i}: {exc}")
            continue
        records.append(TrialRecord(i, None, None, r.lhs, (r.rhs, r.rhs / 4.0)))
    verdict = Verdict(HOLDS) if not problems else Verdict(VIOLATED, details="; ".join(problems))
    cfg = {"name": "matrix_decoupling", "N": N, "n": n, "trials": int(cases),
           "seed": seed.to_dict()}
    ratio = max((r.gap / r.aux[0] for r in records if r.aux[0] > 0), default=0.0)
    return ExperimentReport(cfg, records, {"max_lhs_over_rhs": ratio}, verdict,
                            ("rhs", "max_cross_norm"))


NET_PLAN = ((0.1, (1, 2, 3)), (0.25, (2, 3, 4)))
QUADRATIC_PLAN = (0.2, (2, 3))


def verify_nets(matrices=50, rows=6, plan=NET_PLAN, quadratic=QUADRATIC_PLAN,
                seed=0) -> ExperimentReport:
    """Net cardinality and the two norm sandwiches.

    For each ``(eps, dims)`` in ``plan`` a greedy net is built per dimension
    and ``matrices`` Gaussian ``rows x dim`` matrices are checked against
    ``lower <= |A| <= lower / (1 - eps)``. The quadratic-form bound is
    checked on symmetric matrices at ``quadratic = (eps, dims)``.
    """
    seed = as_seed(seed)
    records, problems, nets = [], [], []
    jobs = [(eps, d, "norm") for eps, dims in plan for d in dims]
    if quadratic:
        jobs += [(quadratic[0], d, "quadratic") for d in quadratic[1]]
    for j, (eps, d, kind) in enumerate(jobs):
        net = build_net(d, eps, seed=seed.child(j).child(0))
        nets.append({"eps": eps, "dim": d, "size": len(net), "bound": net.cardinality_bound})
        if len(net) > net.cardinality_bound:
            problems.append(f"net eps={eps} dim={d} has {len(net)} > {net.cardinality_bound}")
        for i in range(int(matrices)):
            rng = seed.child(j).child(1 + i).generator()
            if kind == "norm":
                A = standard_normal(rng, (rows, d))
                exact = spectral_norm(A)
                lo, hi = norm_via_net(A, net)
                ok = lo <= exact * (1 + 1e-12) and exact <= hi * (1 + 1e-12)
            else:
                G = standard_normal(rng, (d, d))
                A = (G + G.T) / 2
                exact = float(np.max(np.abs(np.linalg.eigvalsh(A))))
                lo, hi = 0.0, quadratic_form_via_net(A, net)
                ok = exact <= hi * (1 + 1e-12)
            if not ok:
                problems.append(f"{kind} sandwich failed at eps={eps} dim={d} matrix {i}")
            records.append(TrialRecord(len(records), None, exact, None,
                                       (eps, d, 1 if kind == "norm" else 2, lo, hi)))
    verdict = Verdict(HOLDS) if not problems else Verdict(VIOLATED, details="; ".join(problems))
    cfg = {"name": "nets", "trials": int(matrices), "seed": seed.to_dict(),
           "params": {"rows": rows}}
    return ExperimentReport(cfg, records, {"nets": nets}, verdict,
                            ("eps", "dim", "kind", "lower", "upper"))


def verify_approximate_isometries(matrices=100, seed=0) -> ExperimentReport:
    """Round trip between ``|B*B - I| <= max(d, d^2)`` and singular values in
    ``[1 - d, 1 + d]`` on scaled Gaussian matrices with gap at most 1.

    The forward direction is asserted inside :func:`isometry_gap`; the
    converse requires ``gap <= 3 max(d, d^2)`` for the tightest ``d``.
    """
    seed = as_seed(seed)
    records, problems = [], []
    for i in range(int(matrices)):
        rng = seed.child(i).generator()
        n = int(rng.integers(1, 21))
        N = n * int(rng.integers(8, 41))
        B = sample_matrix_rows(gaussian(n), N, seed.child(i).child(1)) / math.sqrt(N)
        try:
            gap, delta = isometry_gap(B)
        except AssertionError as exc:
            problems.append(f"matrix {i}: {exc}")
            continue
        s = svd_values(B)
        conv = gap_bound_from_interval(s.s_min, s.s_max)
        if gap > 1.0:
            problems.append(f"matrix {i}: gap {gap:.3g} > 1")
        if gap > conv * (1 + 1e-12) + 1e-15:
            problems.append(f"matrix {i}: converse failed, {gap} > {conv}")
        records.append(TrialRecord(i, s.s_min, s.s_max, gap, (N, n, delta, conv)))
    verdict = Verdict(HOLDS) if not problems else Verdict(VIOLATED, details="; ".join(problems))
    cfg = {"name": "approximate_isometries", "trials": int(matrices), "seed": seed.to_dict()}
    return ExperimentReport(cfg, records, {"max_gap": max(r.gap for r in records)}, verdict,
                            ("N_rows", "n", "delta", "converse_bound"))


def sign_sum_tail_exact(N, t) -> float:
    """``P{|eps_1 + ... + eps_N| / N >= t}`` from binomial counts."""
    hits = [math.comb(N, j) for j in range(N + 1) if abs(2 * j - N) >= t * N - 1e-12]
    return math.fsum(hits) / 2.0 ** N


def verify_matrix_bernstein(trials, seed, ensemble="sign_diagonal", t_grid=None,
                            threads=None, **ensemble_args) -> ExperimentReport:
    """Empirical ``P{|sum X_i| >= t}`` on a shipped ensemble against the
    matrix Bernstein bound plus three standard errors."""
    ens = SHIPPED_ENSEMBLES[ensemble](**ensemble_args)
    if t_grid is None:
        t_grid = [round(0.1 * i, 10) for i in range(1, 11)]
    cmp = empirical_matrix_sum_tail(ens, t_grid, trials, seed, threads)
    records = [TrialRecord(i, None, float(v), None) for i, v in enumerate(cmp.norms)]
    agg = {"ensemble": ens.name, "K": ens.K, "sigma2": ens.sigma2, "worst_margin": cmp.worst_margin,
           "grid": [{"t": t, "empirical": e, "bound": b, "allowed": a} for t, e, b, a in cmp.rows]}
    if ensemble == "sign_diagonal":
        N = ens.count
        for row in agg["grid"]:
            row["exact"] = sign_sum_tail_exact(N, row["t"])
    bad = [r[0] for r in cmp.rows if r[1] > r[3]]
    verdict = Verdict(HOLDS) if not bad else Verdict(
        VIOLATED, details=f"empirical tail above bound + 3se at t={bad}")
    cfg = {"name": "matrix_bernstein", "trials": int(trials), "seed": as_seed(seed).to_dict(),
           "params": {"ensemble": ensemble, "t_grid": list(t_grid), **ensemble_args}}
    return ExperimentReport(cfg, records, agg, verdict)
