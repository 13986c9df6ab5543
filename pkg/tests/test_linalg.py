import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import I2, KET0, KET1, X, Z, proj
from modal_lab.errors import NotHermitian, NotPositiveDefinite, NotPSD
from modal_lab.linalg import (
    DEFAULT_TOL,
    TolerancePolicy,
    close,
    commutator,
    complex_power,
    eig_hermitian,
    imaginary_power,
    is_projection,
    is_unitary,
    nullspace,
    op_norm,
    orthonormalize_hs,
    range_projection,
    vec,
)
from modal_lab.sampling import random_density, random_unitary

seeds = st.integers(0, 2**32 - 1)


def random_hermitian(n, rng):
    a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return (a + a.conj().T) / 2


class TestTolerancePolicy:
    def test_defaults(self):
        assert DEFAULT_TOL.as_dict() == {"rank_tol": 1e-9, "eq_tol": 1e-8, "psd_tol": 1e-10}

    @pytest.mark.parametrize("kw", [{"eq_tol": 0}, {"psd_tol": -1}, {"rank_tol": 1e-20}])
    def test_rejects_bad_values(self, kw):
        with pytest.raises(ValueError):
            TolerancePolicy(**kw)

    def test_overrides_ignore_none(self):
        t = DEFAULT_TOL.with_overrides(eq_tol=1e-6, rank_tol=None)
        assert t.eq_tol == 1e-6 and t.rank_tol == DEFAULT_TOL.rank_tol


class TestEigHermitian:
    def test_identity(self):
        s = eig_hermitian(I2)
        assert np.allclose(s.eigenvalues, [1]) and len(s.projections) == 1
        assert np.allclose(s.projections[0], I2)

    def test_diagonal(self):
        s = eig_hermitian(np.diag([0.7, 0.3]))
        assert np.allclose(s.eigenvalues, [0.7, 0.3])
        assert np.allclose(s.projections[0], proj(KET0))
        assert np.allclose(s.projections[1], proj(KET1))

    def test_pauli_x(self):
        s = eig_hermitian(X)
        assert np.allclose(s.eigenvalues, [1, -1])
        assert np.allclose(s.projections[0], proj([1, 1]) / 2)
        assert np.allclose(s.projections[1], proj([1, -1]) / 2)

    def test_clusters_close_eigenvalues(self):
        s = eig_hermitian(np.diag([0.5, 0.5 + 1e-12, 0.2]))
        assert len(s) == 2 and np.isclose(np.trace(s.projections[0]).real, 2)

    def test_separates_beyond_threshold(self):
        assert len(eig_hermitian(np.diag([0.5, 0.5 + 1e-6, 0.2]))) == 3

    def test_rejects_non_hermitian(self):
        with pytest.raises(NotHermitian):
            eig_hermitian(np.array([[0, 1], [0, 0]]))

    @given(seeds, st.integers(1, 8))
    def test_reconstruction_and_resolution(self, seed, n):
        rng = np.random.default_rng(seed)
        a = random_hermitian(n, rng)
        s = eig_hermitian(a)
        assert op_norm(s.reconstruct() - a) <= 1e-8 * max(op_norm(a), 1)
        assert op_norm(sum(s.projections) - np.eye(n)) <= 1e-8
        assert all(is_projection(p) for p in s.projections)
        assert np.all(np.diff(s.eigenvalues) < 0)


class TestRangeProjection:
    def test_rank_two(self):
        assert np.allclose(range_projection(np.diag([0.5, 0.5, 0])), np.diag([1, 1, 0]))

    def test_full_rank(self):
        assert np.allclose(range_projection(np.eye(4) / 4), np.eye(4))

    def test_rank_one(self):
        p = proj(np.array([1, 1j]) / np.sqrt(2))
        assert np.allclose(range_projection(p), p)

    def test_rejects_negative(self):
        with pytest.raises(NotPSD):
            range_projection(np.diag([1.0, -0.5]))


class TestNullspace:
    def test_zero_map(self):
        assert nullspace(np.zeros((3, 3))).shape == (3, 3)

    def test_identity_map(self):
        assert nullspace(np.eye(3)).shape[1] == 0

    def test_commutator_map(self):
        d = np.diag([1.0, 2.0])
        m = vec([commutator(e, d) for e in np.eye(4).reshape(4, 2, 2)])
        ker = nullspace(m)
        assert ker.shape[1] == 2
        for k in range(2):
            sol = ker[:, k].reshape(2, 2)
            assert np.allclose(sol, np.diag(np.diag(sol)))

    def test_scale_keeps_tiny_map_null(self):
        assert nullspace(np.eye(2) * 1e-14, scale=1.0).shape[1] == 2

    @given(seeds, st.integers(2, 10), st.integers(0, 5))
    def test_known_kernel_dimension(self, seed, n, k):
        k = min(k, n)
        rng = np.random.default_rng(seed)
        u = random_unitary(n, rng)
        s = np.concatenate([rng.uniform(0.5, 2, n - k), np.zeros(k)])
        m = u @ np.diag(s) @ random_unitary(n, rng)
        ker = nullspace(m)
        assert ker.shape[1] == k
        assert np.linalg.norm(m @ ker) <= 1e-9 * n


class TestOrthonormalize:
    def test_dependent_pair(self):
        out = orthonormalize_hs([I2, 2 * I2])
        assert len(out) == 1 and np.allclose(out[0], I2 / np.sqrt(2))

    def test_orthogonal_pair(self):
        out = orthonormalize_hs([I2, Z])
        assert len(out) == 2
        assert np.allclose(out[0], I2 / np.sqrt(2)) and np.allclose(out[1], Z / np.sqrt(2))

    def test_projection_and_identity(self):
        out = orthonormalize_hs([proj(KET0), I2])
        assert len(out) == 2
        assert np.allclose(out[0], proj(KET0)) and np.allclose(out[1], proj(KET1))

    @given(seeds, st.integers(1, 4), st.integers(1, 8))
    def test_orthonormal_output(self, seed, n, count):
        rng = np.random.default_rng(seed)
        ops = [rng.standard_normal((n, n)) for _ in range(count)]
        out = orthonormalize_hs(ops)
        g = vec(out).conj().T @ vec(out)
        assert len(out) == min(count, n * n)
        assert np.allclose(g, np.eye(len(out)), atol=1e-10)


class TestPowers:
    def test_t_zero(self, rng):
        d = random_density(4, rng)
        assert np.allclose(imaginary_power(d, 0.0), np.eye(4))

    def test_identity_base(self):
        assert np.allclose(imaginary_power(np.eye(3), 1.7), np.eye(3))

    def test_diagonal_value(self):
        u = imaginary_power(np.diag([0.7, 0.3]), 1.0)
        assert np.allclose(u, np.diag([np.exp(1j * np.log(0.7)), np.exp(1j * np.log(0.3))]))

    def test_rejects_singular(self):
        with pytest.raises(NotPositiveDefinite):
            complex_power(np.diag([1.0, 0.0]), 0.5j)

    @given(seeds, st.floats(-2, 2), st.floats(-2, 2))
    def test_group_law(self, seed, s, t):
        d = random_density(4, np.random.default_rng(seed))
        lhs = imaginary_power(d, s) @ imaginary_power(d, t)
        assert op_norm(lhs - imaginary_power(d, s + t)) <= 1e-8
        assert is_unitary(imaginary_power(d, t))


def test_close_is_relative():
    a = np.eye(2) * 1e6
    assert close(a, a + 1e-3)
    assert not close(np.eye(2), np.eye(2) + 1e-6)
