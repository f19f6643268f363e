import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays
from scipy import linalg as sla

from rmt_lab.ensembles import coordinate, sample_matrix_rows
from rmt_lab.seeding import SeedSpec, standard_normal
from rmt_lab.spectra import (SingularSpectrum, as_matrix, condition_number,
                             extreme_singular_values, gap_bound_from_interval, hermitian_norm,
                             isometry_gap, load_matrix, load_matrix_binary, load_matrix_csv,
                             save_matrix_binary, save_matrix_csv, spectral_norm, svd_values)


def _gauss(shape, seed=0):
    return standard_normal(SeedSpec(seed).generator(), shape)


def _eig_oracle(A):
    """Singular values from scipy's symmetric eigensolver on A*A."""
    w = sla.eigh(A.conj().T @ A, eigvals_only=True)
    return np.sqrt(np.clip(w[::-1], 0, None))


def test_diagonal_exact():
    s = svd_values(np.diag([3.0, 1.0, 2.0]))
    assert s.values.tolist() == [3.0, 2.0, 1.0]
    assert s.s_max == 3.0 and s.s_min == 1.0 and len(s) == 3


def test_orthonormal_columns():
    assert np.array_equal(svd_values(np.eye(5)[:, :3]).values, np.ones(3))
    Q, _ = np.linalg.qr(_gauss((9, 4), 1))
    assert np.allclose(svd_values(Q).values, 1.0, atol=1e-14)


def test_random_7x4_against_eigen_oracle():
    A = _gauss((7, 4), 2)
    assert np.allclose(svd_values(A).values, _eig_oracle(A), rtol=0, atol=1e-8)


def test_complex_against_scipy_svd():
    A = _gauss((12, 5), 3) + 1j * _gauss((12, 5), 4)
    assert np.allclose(svd_values(A).values, sla.svdvals(A), rtol=1e-12)


def test_wide_matrix_has_zero_smin():
    A = _gauss((2, 3), 5)
    s_min, s_max = extreme_singular_values(A)
    assert s_min == 0.0 and len(svd_values(A)) == 3
    assert s_max == pytest.approx(sla.svdvals(A)[0], rel=1e-12)


def test_scaled_identity():
    assert extreme_singular_values(-2.5 * np.eye(4)) == (2.5, 2.5)


def test_duplicated_columns():
    u = np.ones(4) / 2
    s_min, s_max = extreme_singular_values(np.column_stack([u, u]))
    assert s_min <= 1e-15 and s_max == pytest.approx(math.sqrt(2), rel=1e-15)
    # square case: Jacobi alone, no QR, gives exactly zero
    v = np.array([1.0, 1.0]) / math.sqrt(2)
    assert svd_values(np.column_stack([v, v])).s_min == 0.0


def test_isometry_gap_examples():
    assert isometry_gap(np.eye(4)[:, :2]) == (0.0, 0.0)
    gap, delta = isometry_gap(1.5 * np.eye(2))
    assert gap == pytest.approx(1.25, rel=1e-15) and delta == pytest.approx(math.sqrt(1.25))
    gap, delta = isometry_gap(np.diag([1.1, 0.9]))
    assert gap == pytest.approx(0.21, rel=1e-12) and gap <= 3 * max(0.1, 0.01)
    assert gap_bound_from_interval(0.9, 1.1) == pytest.approx(0.3)


def test_condition_number():
    assert condition_number(np.eye(4)[:, :2]) == 1.0
    assert condition_number(np.diag([4.0, 2.0])) == 2.0
    A = sample_matrix_rows(coordinate(5), 4, SeedSpec(0))
    A = np.vstack([A, np.zeros((2, 5))])
    assert condition_number(A) == math.inf
    with pytest.raises(ValueError):
        condition_number(np.ones((2, 3)))


def test_rejects_bad_input():
    with pytest.raises(ValueError):
        svd_values(np.array([[1.0, np.nan]]))
    with pytest.raises(ValueError):
        as_matrix(np.zeros((0, 3)))
    with pytest.raises(ValueError):
        hermitian_norm(np.ones((2, 3)))


def test_high_condition_accuracy():
    U, _ = np.linalg.qr(_gauss((30, 30), 6))
    V, _ = np.linalg.qr(_gauss((10, 10), 7))
    s = np.logspace(0, -8, 10)
    A = U[:, :10] @ np.diag(s) @ V.T
    got = svd_values(A).values
    assert np.max(np.abs(got - s) / s) <= 1e-7   # input itself carries ~eps * |A| error
    assert np.max(np.abs(got[:5] - s[:5]) / s[:5]) <= 1e-10


def test_graded_diagonal_relative_accuracy():
    D = np.diag(np.logspace(0, -8, 6))
    assert np.allclose(svd_values(D).values, np.diag(D), rtol=1e-15)


def test_extreme_magnitudes():
    assert svd_values(np.diag([1e-300, 3e-301])).values.tolist() == [1e-300, 3e-301]
    assert svd_values(np.diag([1e300, 1e299])).values.tolist() == [1e300, 1e299]
    assert svd_values(np.zeros((3, 2))).values.tolist() == [0.0, 0.0]


def test_sampling_bounds_eq_5_1():
    A = _gauss((20, 8), 8)
    s = svd_values(A)
    x = _gauss((1000, 8), 9)
    x /= np.linalg.norm(x, axis=1, keepdims=True)
    norms = np.linalg.norm(x @ A.T, axis=1)
    assert np.all(norms >= s.s_min - 1e-10) and np.all(norms <= s.s_max + 1e-10)


def test_round_trip_lemma_on_random_matrices():
    for i in range(100):
        n = 1 + i % 10
        N = 20 * n
        B = _gauss((N, n), 100 + i) / math.sqrt(N)
        gap, delta = isometry_gap(B)
        assert gap <= 1
        s = svd_values(B)
        assert 1 - gap - 1e-12 <= s.s_min and s.s_max <= 1 + gap + 1e-12
        assert gap <= 3 * max(delta, delta ** 2) + 1e-15


@given(arrays(np.float64, st.tuples(st.integers(1, 8), st.integers(1, 6)),
              elements=st.floats(-100, 100, allow_nan=False)),
       st.floats(-1e3, 1e3).filter(lambda c: abs(c) > 1e-3))
@settings(max_examples=60, deadline=None)
def test_scale_and_transpose_invariance(A, c):
    s = svd_values(A).values
    sc = svd_values(c * A).values
    assert np.allclose(sc, abs(c) * s, rtol=1e-12, atol=1e-12 * abs(c) * max(s[0], 1e-300))
    st_ = svd_values(A.T).values
    k = min(A.shape)
    assert np.allclose(s[:k], st_[:k], rtol=1e-10, atol=1e-10 * max(s[0], 1e-300))
    ref = sla.svdvals(A)
    assert np.allclose(s[:k], ref[:k], rtol=1e-10, atol=1e-10 * max(ref[0], 1e-300))


@given(arrays(np.float64, st.tuples(st.integers(1, 6), st.integers(1, 6)),
              elements=st.floats(-10, 10, allow_nan=False)))
@settings(max_examples=40, deadline=None)
def test_spectrum_sorted_nonnegative(A):
    v = svd_values(A).values
    assert np.all(v >= 0) and np.all(np.diff(v) <= 0) and len(v) == A.shape[1]


def test_hermitian_norm_matches_eigs():
    G = _gauss((6, 6), 10)
    H = (G + G.T) / 2
    assert hermitian_norm(H) == pytest.approx(np.max(np.abs(np.linalg.eigvalsh(H))), rel=1e-12)
    assert spectral_norm(G) == pytest.approx(np.linalg.norm(G, 2), rel=1e-12)


@pytest.mark.parametrize("complex_", [False, True])
@pytest.mark.parametrize("fmt", ["csv", "bin"])
def test_matrix_files_round_trip(tmp_path, complex_, fmt):
    A = _gauss((5, 3), 11)
    if complex_:
        A = A + 1j * _gauss((5, 3), 12)
    path = tmp_path / f"m.{fmt}"
    (save_matrix_csv if fmt == "csv" else save_matrix_binary)(A, path)
    B = load_matrix(path)
    assert B.dtype == A.dtype and np.array_equal(A, B)


def test_binary_layout(tmp_path):
    path = tmp_path / "m.bin"
    save_matrix_binary(np.array([[1.0, 2.0]]), path)
    raw = path.read_bytes()
    assert raw[:24] == (1).to_bytes(8, "little") + (2).to_bytes(8, "little") + bytes(8)
    assert np.frombuffer(raw[24:], "<f8").tolist() == [1.0, 2.0]
    path.write_bytes(raw[:-8])
    with pytest.raises(ValueError):
        load_matrix_binary(path)


def test_csv_rejects_ragged(tmp_path):
    path = tmp_path / "m.csv"
    path.write_text("1,2\n3\n")
    with pytest.raises(ValueError):
        load_matrix_csv(path)


def test_spectrum_type():
    s = SingularSpectrum(np.array([2.0, 1.0]))
    assert list(s) == [2.0, 1.0]
