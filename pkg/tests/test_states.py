import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import KET0, KET1, proj, schmidt_vector
from modal_lab.algebra import contains, diagonal_algebra, full_algebra, scalar_algebra
from modal_lab.errors import BadLegSet, DimensionMismatch, NotAState, NotUnitVector
from modal_lab.linalg import DEFAULT_TOL, range_projection
from modal_lab.sampling import random_block_algebra, random_density, random_element, random_vector
from modal_lab.states import (
    QuantumState,
    TensorSpace,
    density_in_algebra,
    expectation,
    is_faithful,
    partial_trace,
    restrict,
    schmidt,
    support_projection,
)
from modal_lab.verify import random_projection_in

seeds = st.integers(0, 2**32 - 1)
PAIR = TensorSpace((2, 2))


class TestQuantumState:
    def test_rejects_bad_trace(self):
        with pytest.raises(NotAState):
            QuantumState.from_density(np.diag([0.5, 0.4]))

    def test_rejects_negative(self):
        with pytest.raises(NotAState):
            QuantumState.from_density(np.diag([1.2, -0.2]))

    def test_rejects_non_hermitian(self):
        with pytest.raises(NotAState):
            QuantumState.from_density(np.array([[0.5, 0.1], [0.0, 0.5]]))

    def test_vector_norm_tolerance(self):
        s = QuantumState.from_vector(np.array([1 + 1e-12, 0]))
        assert np.isclose(np.linalg.norm(s.vector), 1)
        with pytest.raises(NotUnitVector):
            QuantumState.from_vector(np.array([1.1, 0]))

    def test_expectations(self):
        rho = QuantumState.from_density(np.diag([0.7, 0.3]))
        assert np.isclose(rho(np.eye(2)), 1)
        assert np.isclose(expectation(rho, proj(KET1)), 0.3)

    def test_pure_expectation_is_norm_squared(self, rng):
        x = random_vector(3, rng)
        p = proj(random_vector(3, rng))
        assert np.isclose(QuantumState.from_vector(x).expect(p), np.linalg.norm(p @ x) ** 2)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            QuantumState.maximally_mixed(2).expect(np.eye(3))

    def test_variance(self):
        rho = QuantumState.from_density(np.diag([0.7, 0.3]))
        assert np.isclose(rho.variance(np.diag([1.0, -1.0])), 1 - 0.4**2)


class TestPartialTrace:
    def test_product(self):
        rho = QuantumState.from_vector(np.kron(KET0, KET1))
        assert np.allclose(partial_trace(rho, PAIR, [0]).density, proj(KET0))
        assert np.allclose(partial_trace(rho, PAIR, [1]).density, proj(KET1))

    def test_bell(self):
        rho = QuantumState.from_vector(schmidt_vector(0.5, 0.5))
        assert np.allclose(partial_trace(rho, PAIR, [0]).density, np.eye(2) / 2)

    def test_schmidt_vector(self):
        rho = QuantumState.from_vector(schmidt_vector())
        assert np.allclose(partial_trace(rho, PAIR, [0]).density, np.diag([0.7, 0.3]))

    def test_bad_legs(self):
        with pytest.raises(BadLegSet):
            partial_trace(QuantumState.maximally_mixed(4), PAIR, [2])

    @given(seeds)
    def test_trace_of_embedded_operator(self, seed):
        rng = np.random.default_rng(seed)
        space = TensorSpace((2, 3, 2))
        rho = QuantumState.from_density(random_density(12, rng))
        a = rng.standard_normal((4, 4))
        reduced = partial_trace(rho, space, [0, 2]).density
        assert np.isclose(np.trace(reduced @ a), rho.expect(space.embed(a, [0, 2])))


class TestDensityInAlgebra:
    def test_full(self, rng):
        d = random_density(3, rng)
        assert np.allclose(density_in_algebra(QuantumState.from_density(d), full_algebra(3)), d)

    def test_scalars(self, rng):
        rho = QuantumState.from_density(random_density(3, rng))
        assert np.allclose(density_in_algebra(rho, scalar_algebra(3)), np.eye(3) / 3)

    def test_leg(self):
        rho = QuantumState.from_vector(schmidt_vector())
        h = density_in_algebra(rho, PAIR.leg_algebra([0]))
        assert np.allclose(h, np.kron(np.diag([0.7, 0.3]), np.eye(2) / 2))

    @given(seeds, st.integers(2, 6))
    def test_agreement(self, seed, n):
        rng = np.random.default_rng(seed)
        r = random_block_algebra(n, rng).algebra
        rho = QuantumState.from_density(random_density(n, rng, rank=int(rng.integers(1, n + 1))))
        h = density_in_algebra(rho, r)
        for a in r.basis:
            assert abs(np.trace(h @ a) - rho.expect(a)) <= 1e-9
        assert np.allclose(restrict(rho, r), [rho.expect(a) for a in r.basis])


class TestSupport:
    def test_faithful(self, rng):
        rho = QuantumState.from_density(random_density(3, rng))
        assert np.allclose(support_projection(rho, full_algebra(3)), np.eye(3))

    def test_pure(self):
        rho = QuantumState.from_vector(KET0)
        assert np.allclose(support_projection(rho, full_algebra(2)), proj(KET0))

    def test_pure_on_diagonal(self):
        rho = QuantumState.from_vector(np.array([1, 1]) / np.sqrt(2))
        assert np.allclose(support_projection(rho, diagonal_algebra(2)), np.eye(2))

    @given(seeds, st.integers(2, 6))
    def test_minimality(self, seed, n):
        rng = np.random.default_rng(seed)
        r = random_block_algebra(n, rng).algebra
        rho = QuantumState.from_density(random_density(n, rng, rank=int(rng.integers(1, n))))
        p = support_projection(rho, r)
        assert np.isclose(rho.expect(p), 1)
        # join of P with a projection of R: lies in R and carries the state
        q = range_projection(p + random_projection_in(r, rng, DEFAULT_TOL))
        assert contains(r, q) and np.isclose(rho.expect(q), 1)
        assert np.allclose(p @ q, p, atol=1e-8)


class TestFaithful:
    def test_maximally_mixed(self):
        assert is_faithful(QuantumState.maximally_mixed(3), full_algebra(3))

    def test_pure_not_faithful(self):
        assert not is_faithful(QuantumState.from_vector(KET0), full_algebra(2))

    def test_entangled_vector_on_leg(self):
        assert is_faithful(QuantumState.from_vector(schmidt_vector()), PAIR.leg_algebra([0]))


class TestSchmidt:
    def test_product(self):
        sf = schmidt(np.kron(KET0, KET1), PAIR, [0])
        assert sf.rank == 1 and np.allclose(sf.coefficients, [1])

    def test_bell(self):
        sf = schmidt(schmidt_vector(0.5, 0.5), PAIR, [0])
        assert np.allclose(sf.coefficients, [1 / np.sqrt(2)] * 2)

    def test_unequal(self):
        sf = schmidt(schmidt_vector(), PAIR, [0])
        assert np.allclose(sf.coefficients, [np.sqrt(0.7), np.sqrt(0.3)])
        for i, ket in enumerate((KET0, KET1)):
            assert np.isclose(abs(np.vdot(sf.left_basis[:, i], ket)), 1)
            assert np.isclose(abs(np.vdot(sf.right_basis[:, i], ket)), 1)

    @given(seeds, st.sampled_from([(2, 2), (2, 3), (3, 2), (2, 2, 2)]))
    def test_consistent_with_partial_trace(self, seed, dims):
        space = TensorSpace(dims)
        x = random_vector(space.ambient_dim, np.random.default_rng(seed))
        sf = schmidt(x, space, [0])
        assert np.allclose(sf.reconstruct(), x)
        assert np.isclose(np.sum(sf.coefficients**2), 1)
        lam = np.linalg.eigvalsh(partial_trace(QuantumState.from_vector(x), space, [0]).density)[::-1]
        assert np.allclose(lam[: sf.rank], sf.coefficients**2, atol=1e-9)


def test_leg_algebra_dimensions():
    space = TensorSpace((2, 3, 2), ("a", "b", "c"))
    assert space.leg_algebra([1]).dim == 9
    assert space.leg_algebra([0, 2]).dim == 16
    with pytest.raises(BadLegSet):
        space.leg_algebra([0, 0])


def test_random_element_is_member(rng):
    r = random_block_algebra(5, rng).algebra
    assert contains(r, random_element(r, rng))
