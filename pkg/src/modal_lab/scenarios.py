"""Finite-dimensional reconstructions of the nested-factor, measurement,
triviality and strict-correlation arguments.

Each scenario returns a ScenarioReport whose claims all carry numeric
evidence. Randomness is drawn only from the supplied seed.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .algebra import (
    OperatorAlgebra,
    center,
    commutant,
    contains,
    equals,
    full_algebra,
    generate,
    intersect,
    is_subalgebra,
    minimal_projections,
)
from .errors import BadCoefficients, NotFaithful
from .linalg import DEFAULT_TOL, TolerancePolicy, close, hs_norm, op_norm
from .modal import (
    _lattice,
    centralizer,
    correlation_pair,
    dispersion_residual,
    modal_algebra,
    modal_algebra_type_I,
)
from .sampling import random_density, random_unitary, rng_from
from .states import QuantumState, TensorSpace, is_faithful, partial_trace, schmidt


@dataclass
class Claim:
    description: str
    passed: bool
    evidence: dict

    def __post_init__(self):
        if not self.evidence:
            raise ValueError("every claim needs a numeric witness")
        self.passed = bool(self.passed)


@dataclass
class ScenarioReport:
    name: str
    claims: list = field(default_factory=list)
    artifacts: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)

    def claim(self, description: str, passed: bool, **evidence) -> Claim:
        c = Claim(description, passed, evidence)
        self.claims.append(c)
        return c

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.claims)

    @property
    def n_passed(self) -> int:
        return sum(c.passed for c in self.claims)


def _residual(alg: OperatorAlgebra, a: np.ndarray) -> float:
    """Relative HS distance of a from the algebra."""
    return hs_norm(a - alg.project(a)) / max(hs_norm(a), 1e-300)


def schmidt_pair_vector(coefficients, left_dim: int | None = None) -> np.ndarray:
    """sum_i sqrt(c_i) |i>|i> on C^d (x) C^d."""
    c = np.asarray(coefficients, dtype=float)
    d = left_dim or len(c)
    x = np.zeros(d * d, dtype=complex)
    for i, ci in enumerate(c):
        x[i * d + i] = np.sqrt(ci)
    return x


def nested_factors_demo(tol: TolerancePolicy = DEFAULT_TOL) -> ScenarioReport:
    """Two nested tensor-leg factors whose modal algebras are not nested."""
    rep = ScenarioReport("nested_factors")
    space = TensorSpace((2, 2, 2), ("a", "b", "c"))
    psi = schmidt_pair_vector([0.7, 0.3])
    x = np.kron(psi, np.array([1, 0]))
    rho = QuantumState.from_vector(x, tol)

    n_outer = space.leg_algebra([0, 1])  # B(C^4) (x) 1
    n_inner = space.leg_algebra([0])     # B(C^2) (x) 1 (x) 1
    n_top = full_algebra(8)
    rep.claim("N2 is a proper subalgebra of N1",
              is_subalgebra(n_inner, n_outer, tol) and not is_subalgebra(n_outer, n_inner, tol),
              dim_N1=n_outer.dim, dim_N2=n_inner.dim)

    purity_outer = float(np.trace(np.linalg.matrix_power(partial_trace(rho, space, [0, 1]).density, 2)).real)
    purity_inner = float(np.trace(np.linalg.matrix_power(partial_trace(rho, space, [0]).density, 2)).real)
    rep.claim("rho is pure on N1 and mixed on N2",
              abs(purity_outer - 1) <= tol.eq_tol and purity_inner < 1 - tol.eq_tol,
              purity_N1=purity_outer, purity_N2=purity_inner)

    res_outer = modal_algebra(rho, n_outer, tol)
    res_inner = modal_algebra(rho, n_inner, tol)
    witness = space.embed(np.diag([1.0, -1.0]), [0])
    in_inner = contains(res_inner.modal, witness, tol)
    in_outer = contains(res_outer.modal, witness, tol)
    rep.claim("Z(x)1(x)1 lies in M(rho, N2) but not in M(rho, N1)",
              in_inner and not in_outer,
              distance_from_M2=_residual(res_inner.modal, witness),
              distance_from_M1=_residual(res_outer.modal, witness),
              dim_M1=res_outer.modal.dim, dim_M2=res_inner.modal.dim)
    dispersion = rho.variance(witness)
    rep.claim("witness has dispersion 1 - (0.7 - 0.3)^2 = 0.84 in rho",
              abs(dispersion - 0.84) <= 1e-9, dispersion=dispersion)
    rep.claim("rho is dispersion-free on M(rho, N1)",
              dispersion_residual(rho, res_outer.modal) <= tol.eq_tol,
              max_commutator_expectation=dispersion_residual(rho, res_outer.modal))

    chain = [n_top, n_outer, n_inner]
    meet = chain[0]
    for alg in chain[1:]:
        meet = intersect(meet, alg, tol)
    rep.claim("intersection over the chain B(C^8) > N1 > N2 is N2",
              equals(meet, n_inner, tol), dim_intersection=meet.dim)

    rep.artifacts.update(N1=n_outer, N2=n_inner, M1=res_outer.modal, M2=res_inner.modal,
                         witness=witness)
    rep.notes.append("tensor-leg nesting mimics the inclusion pattern of interpolating "
                     "factors, not their type structure")
    return rep


def measurement_demo(coefficients, seed=None, tol: TolerancePolicy = DEFAULT_TOL) -> ScenarioReport:
    """System-apparatus-environment state; the apparatus modal algebra is the pointer algebra."""
    c = np.asarray(coefficients, dtype=float)
    if c.ndim != 1 or len(c) == 0 or np.any(c <= 0) or abs(c.sum() - 1) > tol.eq_tol:
        raise BadCoefficients(f"coefficients must be positive and sum to 1, got {list(c)}")
    rep = ScenarioReport("measurement")
    k = len(c)
    d = max(k, 2)
    space = TensorSpace((d, d, d), ("system", "apparatus", "environment"))
    if seed is None:
        bases = [np.eye(d, dtype=complex)] * 3
    else:
        rng = rng_from(seed)
        bases = [random_unitary(d, rng) for _ in range(3)]
    o, a, e = bases
    x = sum(np.sqrt(ci) * np.kron(np.kron(o[:, i], a[:, i]), e[:, i]) for i, ci in enumerate(c))
    rho = QuantumState.from_vector(x, tol)
    d_a = partial_trace(rho, space, [1]).density

    pointers = [np.outer(a[:, j], a[:, j].conj()) for j in range(d)]
    born = np.array([np.trace(d_a @ p).real for p in pointers[:k]])
    rep.claim("Born probabilities Tr(D_A P^j) equal the coefficients",
              np.max(np.abs(born - c)) <= 1e-9,
              max_error=float(np.max(np.abs(born - c))), **{f"p{j}": float(b) for j, b in enumerate(born)})

    m_a = modal_algebra_type_I(d_a, tol)
    pointer_alg = generate(pointers, tol)
    gap = 2 * tol.rank_tol * op_norm(d_a)
    diffs = [abs(c[i] - c[j]) for i in range(k) for j in range(i + 1, k)]
    distinct = all(df > gap for df in diffs)
    if distinct:
        rep.claim("M_A equals the pointer diagonal algebra",
                  equals(m_a, pointer_alg, tol), dim_M_A=m_a.dim, dim_pointer=pointer_alg.dim)
        rep.claim("every pointer projection with nonzero weight lies in M_A",
                  all(contains(m_a, p, tol) for p in pointers[:k]),
                  n_pointer_in_M_A=sum(contains(m_a, p, tol) for p in pointers[:k]))
    else:
        rep.notes.append("WARNING: repeated coefficients make D_A degenerate; M_A is coarser "
                         "than the pointer algebra (the eigenvalue-multiplicity discontinuity)")
        rep.claim("degenerate D_A: M_A is a proper subalgebra of the pointer algebra",
                  is_subalgebra(m_a, pointer_alg, tol) and m_a.dim < pointer_alg.dim,
                  dim_M_A=m_a.dim, dim_pointer=pointer_alg.dim,
                  min_coefficient_gap=float(min(diffs)))
    rep.artifacts.update(D_A=d_a, M_A=m_a, pointer_algebra=pointer_alg)
    return rep


def triviality_probe(n: int, samples: int = 10, seed=0, tol: TolerancePolicy = DEFAULT_TOL) -> ScenarioReport:
    """Modal triviality on B(C^n) happens exactly at the maximally mixed state."""
    if n < 2:
        raise ValueError("n must be at least 2")
    rng = rng_from(seed)
    rep = ScenarioReport("triviality")
    full = full_algebra(n)
    eye = np.eye(n) / n
    agree = 0
    min_nontrivial_distance = np.inf
    generic_ok = True
    for s in range(samples):
        if s % 3 == 2:
            # near-tracial: I/n plus a small traceless Hermitian kick
            h = random_density(n, rng) - eye
            h /= op_norm(h)
            eps = 10 ** rng.uniform(-6, -1)
            dens = eye + eps * h / n
        else:
            dens = random_density(n, rng)
        rho = QuantumState.from_density(dens, tol)
        res = modal_algebra(rho, full, tol)
        dist = op_norm(dens - eye)
        threshold = 2 * tol.rank_tol * op_norm(dens)
        agree += res.trivial_flag == (dist <= threshold)
        if not res.trivial_flag:
            min_nontrivial_distance = min(min_nontrivial_distance, dist)
        if s % 3 != 2:
            generic_ok &= res.modal.dim == n
    rep.claim("modal algebra is trivial iff ||D - I/n|| is within the clustering threshold",
              agree == samples, agreeing=agree, samples=samples,
              min_distance_of_nontrivial=float(min_nontrivial_distance))
    rep.claim("random nondegenerate densities give an n-dimensional (maximal abelian) modal algebra",
              generic_ok, n=n)

    mixed = modal_algebra(QuantumState.maximally_mixed(n), full, tol)
    rep.claim("maximally mixed state yields the trivial modal algebra",
              mixed.trivial_flag, modal_dim=mixed.modal.dim)

    z = np.zeros(n)
    z[0], z[1] = 1.0, -1.0
    perturbed = QuantumState.from_density(eye + 1e-3 * np.diag(z) / n, tol)
    res = modal_algebra(perturbed, full, tol)
    rep.claim("1e-3 perturbation of I/n gives a nontrivial modal algebra",
              not res.trivial_flag, modal_dim=res.modal.dim, epsilon=1e-3)
    rep.notes.append("no finite-dimensional faithful state other than I/n has trivial modal "
                     "algebra; the type III ergodic states have no counterpart here")
    return rep


def correlation_demo(x=None, dims=(2, 2), tol: TolerancePolicy = DEFAULT_TOL) -> ScenarioReport:
    """Bijection between projections of Z(C_R) and their doubles in Z(C_R')."""
    if x is None:
        x = schmidt_pair_vector([0.7, 0.3])
    x = np.asarray(x, dtype=complex)
    rep = ScenarioReport("correlation")
    space = TensorSpace(dims, ("system", "environment"))
    rho = QuantumState.from_vector(x, tol)
    r = space.leg_algebra([0])
    rp = commutant(r, tol)
    if not (is_faithful(rho, r, tol) and is_faithful(rho, rp, tol)):
        sf = schmidt(x, space, [0], tol)
        raise NotFaithful(f"state is not faithful on both sides (Schmidt rank {sf.rank})")
    z = center(centralizer(rho, r, tol), tol)
    zp = center(centralizer(rho, rp, tol), tol)
    n = space.ambient_dim
    table = []
    for p in _lattice(minimal_projections(z, tol), n):
        table.append(correlation_pair(rho, r, p, tol, r_prime=rp, z_prime=zp))
    dev = max(t.max_deviation for t in table)
    rep.claim("three-way correlation equalities hold for every projection",
              dev <= 1e-9, max_deviation=dev, lattice_size=len(table))
    rep.claim("every double is a projection in Z(C_R') and is unique",
              all(t.unique and not t.notes for t in table),
              n_unique=sum(bool(t.unique) for t in table))
    images = [t.p_bar for t in table]
    distinct = all(not close(images[i], images[j], tol)
                   for i in range(len(images)) for j in range(i + 1, len(images)))
    rep.claim("P -> P_bar is a bijection onto the projection lattice of Z(C_R')",
              distinct and len(images) == 2 ** zp.dim,
              domain=len(table), codomain=2 ** zp.dim)
    rep.artifacts["table"] = table
    rep.artifacts["correlations"] = [t.joint for t in table]
    return rep


SCENARIOS = {
    "nested_factors": nested_factors_demo,
    "measurement": measurement_demo,
    "triviality": triviality_probe,
    "correlation": correlation_demo,
}
