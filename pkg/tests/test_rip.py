import itertools
import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import linalg as sla

from rmt_lab.ensembles import SpecError, bernoulli, dft_matrix, gaussian
from rmt_lab.rip import (ENUMERATION_BUDGET, build_partial_dft, build_partial_hadamard,
                         check_unit_columns, colex_subsets, concentration_to_rip,
                         delta_k_at_most, delta_k_bruteforce, delta_k_exact,
                         delta_k_monte_carlo, load_matrix, normalize_columns,
                         subgaussian_rip_threshold, union_bound_count, verify_fourier_rip,
                         verify_subgaussian_rip)
from rmt_lab.seeding import SeedSpec, standard_normal
from rmt_lab.spectra import save_matrix_binary, save_matrix_csv


def _unit(shape, seed):
    A = standard_normal(SeedSpec(seed).generator(), shape)
    return A / np.linalg.norm(A, axis=0)


def _eigh_oracle(A, k):
    """Independent subset loop: scipy eigh on each Gram block."""
    best = 0.0
    for T in itertools.combinations(range(A.shape[1]), k):
        G = A[:, T].conj().T @ A[:, T] - np.eye(k)
        w = sla.eigh(G, eigvals_only=True)
        best = max(best, abs(w[0]), abs(w[-1]))
    return best


def test_orthonormal_is_zero():
    Q, _ = np.linalg.qr(standard_normal(SeedSpec(0).generator(), (10, 6)))
    for k in range(1, 7):
        assert delta_k_exact(Q, k).delta <= 1e-14


def test_duplicate_columns():
    u = np.array([0.6, 0.8, 0.0])
    A = np.column_stack([u, np.array([0.0, 0.0, 1.0]), u])
    r = delta_k_exact(A, 2)
    assert abs(r.delta - 1) <= 1e-12 and r.worst_subset == (0, 2)
    assert delta_k_exact(np.array([[1.0, 1.0]]), 2).delta == pytest.approx(1.0, abs=1e-15)


def test_against_two_oracles():
    for i in range(20):
        A = _unit((10, 16), i)
        r = delta_k_exact(A, 3)
        bf, T = delta_k_bruteforce(A, 3)
        assert abs(r.delta - bf) <= 1e-12
        assert abs(r.delta - _eigh_oracle(A, 3)) <= 1e-12
        assert r.subsets_examined == math.comb(16, 3)
        # the recorded subset attains the reported value
        G = A[:, r.worst_subset].T @ A[:, r.worst_subset] - np.eye(3)
        assert abs(np.max(np.abs(np.linalg.eigvalsh(G))) - r.delta) <= 1e-12


def test_monotone_in_k_and_at_most():
    for i in range(20):
        A = _unit((8, 10), 50 + i)
        d = [delta_k_exact(A, k).delta for k in range(1, 6)]
        assert all(b >= a for a, b in zip(d, d[1:]))
        assert delta_k_at_most(A, 4) == d[3]


def test_floor_of_k():
    A = _unit((6, 8), 3)
    assert delta_k_exact(A, 2.7).delta == delta_k_exact(A, 2).delta


def test_complex_path_matches_real():
    for i in range(10):
        A = _unit((9, 12), 70 + i)
        assert abs(delta_k_exact(A.astype(complex), 3).delta - delta_k_exact(A, 3).delta) <= 1e-12


def test_monte_carlo_exhaustive_equals_exact():
    A = _unit((5, 7), 4)
    mc = delta_k_monte_carlo(A, 2, 2000, SeedSpec(1))
    assert mc.subsets_examined == math.comb(7, 2)
    assert mc.delta == delta_k_exact(A, 2).delta


def test_monte_carlo_below_exact():
    for i in range(10):
        A = _unit((10, 16), 90 + i)
        assert delta_k_monte_carlo(A, 3, 50, SeedSpec(i)).delta <= delta_k_exact(A, 3).delta


def test_monte_carlo_duplicate_flag():
    A = _unit((6, 6), 5)
    A[:, 4] = A[:, 1]
    hits = 0
    for s in range(200):
        r = delta_k_monte_carlo(A, 2, 50, SeedSpec(s), watch=(1, 4))
        if r.extra["watched_sampled"]:
            hits += 1
            assert r.delta >= 1 - 1e-12
    p = 1 - (14 / 15) ** 50
    assert abs(hits / 200 - p) <= 3 * math.sqrt(p * (1 - p) / 200)


def test_monte_carlo_single_trial():
    A = _unit((6, 9), 6)
    r = delta_k_monte_carlo(A, 3, 1, SeedSpec(2))
    T = list(r.worst_subset)
    G = A[:, T].T @ A[:, T] - np.eye(3)
    assert r.delta == pytest.approx(np.max(np.abs(np.linalg.eigvalsh(G))), abs=1e-15)
    assert r.subsets_examined == 1


def test_budget_and_normalization_errors():
    with pytest.raises(ValueError, match="monte_carlo"):
        delta_k_exact(_unit((4, 40), 0), 8)
    assert math.comb(40, 8) > ENUMERATION_BUDGET
    with pytest.raises(ValueError):
        delta_k_exact(2 * np.eye(3), 2)
    with pytest.raises(ValueError):
        delta_k_exact(np.eye(3), 4)
    assert delta_k_exact(2 * np.eye(3), 2, check_normalization=False).delta == 3.0


def test_normalization_helpers():
    A = normalize_columns(np.array([[3.0, 0.0], [4.0, 2.0]]))
    check_unit_columns(A)
    with pytest.raises(ValueError):
        normalize_columns(np.array([[1.0, 0.0], [0.0, 0.0]]))


def test_colex_order():
    T = colex_subsets(4, 2)
    assert [tuple(r) for r in T] == [(0, 1), (0, 2), (1, 2), (0, 3), (1, 3), (2, 3)]
    assert len(colex_subsets(10, 4)) == math.comb(10, 4)


def test_report_json():
    r = delta_k_exact(np.eye(3), 2)
    d = json.loads(r.to_json())
    assert d["method"] == "exact" and d["delta"] == 0.0 and d["matrix_shape"] == [3, 3]


@pytest.mark.parametrize("fmt", ["csv", "bin"])
def test_matrix_ingestion(tmp_path, fmt):
    A = build_partial_dft(8, 8, SeedSpec(0), replace=False) / math.sqrt(8)
    path = tmp_path / f"a.{fmt}"
    (save_matrix_csv if fmt == "csv" else save_matrix_binary)(A, path)
    assert delta_k_exact(load_matrix(path), 3).delta <= 1e-12


def test_concentration_union_bound():
    for n, k, eps in [(1000, 10, 0.1), (50, 5, 0.5), (20, 20, 0.3), (100, 1, 1.0)]:
        r = concentration_to_rip(n, k, 0.2, eps)
        assert r.union_bound_count <= math.exp(-eps * r.required_m / 2) * (1 + 1e-9)
        assert r.failure_probability == pytest.approx(math.exp(-eps * r.required_m / 2))
        assert r.delta_conclusion == 0.4 and r.sufficient


def test_concentration_k_equals_n():
    r = concentration_to_rip(12, 12, 0.1, 0.5)
    assert r.constant == pytest.approx(2 * (1 + math.log(9)))
    assert union_bound_count(12, 12, 0.5, r.required_m) == pytest.approx(
        9 ** 12 * math.exp(-0.5 * r.required_m), rel=1e-10)


def test_concentration_monotone():
    req = [concentration_to_rip(1000, k, 0.1, 0.1).required_m for k in range(1, 30)]
    assert all(b > a for a, b in zip(req, req[1:]))
    req = [concentration_to_rip(1000, 10, 0.1, e).required_m for e in (0.05, 0.1, 0.2, 0.4)]
    assert all(b < a for a, b in zip(req, req[1:]))
    r = concentration_to_rip(1000, 10, 0.1, 0.1, m=10)
    assert not r.sufficient
    with pytest.raises(ValueError):
        concentration_to_rip(10, 2, 1.5, 0.1)


def test_partial_dft_and_hadamard():
    W = build_partial_dft(8, 8, SeedSpec(0), replace=False)
    assert np.allclose(W.conj().T @ W / 8, np.eye(8), atol=1e-14)
    assert dft_matrix(8)[1, 4] == -1.0
    A = build_partial_dft(16, 5, SeedSpec(1))
    assert A.shape == (5, 16) and np.all(np.abs(np.abs(A) - 1) <= 1e-15)
    H = build_partial_hadamard(4, 3, SeedSpec(2))
    rows = {(1, 1, 1, 1), (1, -1, 1, -1), (1, 1, -1, -1), (1, -1, -1, 1)}
    assert all(tuple(int(x) for x in r) in rows for r in H)
    Hf = build_partial_hadamard(8, 8, SeedSpec(3), replace=False)
    assert np.array_equal(Hf.T @ Hf, 8 * np.eye(8))
    with pytest.raises(SpecError):
        build_partial_hadamard(12, 3, SeedSpec(0))
    with pytest.raises(ValueError):
        build_partial_dft(8, 9, SeedSpec(0))


@given(st.integers(2, 7), st.integers(1, 3), st.integers(0, 2 ** 30))
@settings(max_examples=25, deadline=None)
def test_property_exact_matches_bruteforce(n, k, seed):
    k = min(k, n)
    A = _unit((4, n), seed)
    assert abs(delta_k_exact(A, k).delta - delta_k_bruteforce(A, k)[0]) <= 1e-12


def test_subgaussian_sweep_bernoulli():
    rep = verify_subgaussian_rip(bernoulli(16), [8, 16, 32, 64], 2, 50, SeedSpec(7))
    med = rep.aggregates["median_delta"]
    assert rep.verdict.ok and all(b < a for a, b in zip(med, med[1:]))
    assert rep.aggregates["strictly_decreasing"]
    # fitted constant is the smallest C consistent with every (m, median)
    C = rep.verdict.value
    for m, d in zip([8, 16, 32, 64], med):
        if 0 < d:
            assert m <= C * subgaussian_rip_threshold(16, 2, min(d, 1)) * (1 + 1e-12)


def test_subgaussian_orthonormal_anchor():
    A = standard_normal(SeedSpec(4).generator(), (16, 16))
    Q, _ = np.linalg.qr(A)
    assert delta_k_exact(Q, 3).delta <= 1e-13


def test_scaling_modes():
    a = verify_subgaussian_rip(bernoulli(8), [8, 16], 2, 5, SeedSpec(1))
    b = verify_subgaussian_rip(bernoulli(8), [8, 16], 2, 5, SeedSpec(1), scaling="sqrt_m")
    assert a.aggregates["median_delta"] == b.aggregates["median_delta"]
    g = verify_subgaussian_rip(gaussian(8), [16], 2, 20, SeedSpec(2), scaling="sqrt_m")
    h = verify_subgaussian_rip(gaussian(8), [16], 2, 20, SeedSpec(2))
    # column-norm fluctuations only add to delta_k
    assert g.aggregates["median_delta"][0] > h.aggregates["median_delta"][0]
    with pytest.raises(ValueError):
        verify_subgaussian_rip(gaussian(8), [16], 2, 2, SeedSpec(2), scaling="none")


def test_gaussian_vs_bernoulli_universality():
    g = verify_subgaussian_rip(gaussian(16), [32], 2, 100, SeedSpec(8)).aggregates["median_delta"][0]
    b = verify_subgaussian_rip(bernoulli(16), [32], 2, 100, SeedSpec(9)).aggregates["median_delta"][0]
    assert abs(g - b) <= 0.3 * max(g, b)


def test_fourier_sweep_small():
    rep = verify_fourier_rip(32, [4, 8, 16, 32], 3, 10, SeedSpec(1))
    mean = rep.aggregates["mean_delta"]
    assert rep.verdict.ok and all(b <= a for a, b in zip(mean, mean[1:]))
    assert rep.aggregates["anchor_delta"] <= 1e-12
    had = verify_fourier_rip(32, [4, 8, 16, 32], 3, 10, SeedSpec(1), kind="hadamard")
    hm = had.aggregates["mean_delta"]
    assert had.verdict.ok and had.aggregates["anchor_delta"] <= 1e-12
    # comparable curves: same order of magnitude at every m
    assert all(0.33 <= a / b <= 3 for a, b in zip(mean, hm) if b > 0)


@pytest.mark.slow
def test_hadamard_n64_comparable():
    d = verify_fourier_rip(64, [8, 16, 32, 64], 4, 10, SeedSpec(2)).aggregates["mean_delta"]
    h = verify_fourier_rip(64, [8, 16, 32, 64], 4, 10, SeedSpec(3),
                           kind="hadamard").aggregates["mean_delta"]
    assert all(b <= a for a, b in zip(h, h[1:]))
    assert all(0.33 <= a / b <= 3 for a, b in zip(d, h))


def test_sweep_thread_independent():
    a = verify_subgaussian_rip(gaussian(8), [8, 16], 2, 6, SeedSpec(5), threads=1)
    b = verify_subgaussian_rip(gaussian(8), [8, 16], 2, 6, SeedSpec(5), threads=3)
    assert a.to_csv() == b.to_csv() and a.to_json() == b.to_json()
