"""Finite-dimensional von Neumann algebras stored as Hilbert-Schmidt orthonormal bases.

Row-major vectorisation is used throughout: ``vec(A X B) = (A kron B.T) vec(X)``.
All constructors that are known to produce *-closed spans return a basis of
Hermitian matrices, which makes ``trace(A_j A_k) = delta_jk``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DegenerateCenter, DimensionMismatch, ModalLabError
from .linalg import (
    DEFAULT_TOL,
    TolerancePolicy,
    dagger,
    eig_hermitian,
    gram_schmidt,
    hs_norm,
    nullspace,
    vec,
)


@dataclass(frozen=True, eq=False)
class OperatorAlgebra:
    """A unital *-subalgebra of the n x n matrices.

    ``basis`` has shape (dim, n, n) and is Hilbert-Schmidt orthonormal.
    """

    basis: np.ndarray

    @property
    def ambient_dim(self) -> int:
        return self.basis.shape[1]

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    @property
    def vectors(self) -> np.ndarray:
        """Basis as orthonormal columns of shape (n*n, dim)."""
        return self.basis.reshape(self.dim, -1).T

    def coordinates(self, a: np.ndarray) -> np.ndarray:
        return dagger(self.vectors) @ np.asarray(a, dtype=complex).reshape(-1)

    def project(self, a: np.ndarray) -> np.ndarray:
        """Hilbert-Schmidt orthogonal projection onto the algebra."""
        n = self.ambient_dim
        return (self.vectors @ self.coordinates(a)).reshape(n, n)

    def element(self, coords) -> np.ndarray:
        return np.tensordot(np.asarray(coords, dtype=complex), self.basis, axes=1)

    def is_abelian(self, tol: TolerancePolicy = DEFAULT_TOL) -> bool:
        b = self.basis
        comm = np.einsum("aij,bjk->abik", b, b) - np.einsum("bij,ajk->abik", b, b)
        return float(np.abs(comm).max(initial=0.0)) <= tol.eq_tol

    def validate(self, tol: TolerancePolicy = DEFAULT_TOL) -> None:
        """Raise ModalLabError unless the span is unital, *-closed and product-closed."""
        n = self.ambient_dim
        if not 1 <= self.dim <= n * n:
            raise ModalLabError(f"algebra dimension {self.dim} out of range")
        gram = dagger(self.vectors) @ self.vectors
        if np.abs(gram - np.eye(self.dim)).max() > tol.eq_tol:
            raise ModalLabError("basis is not Hilbert-Schmidt orthonormal")
        if not contains(self, np.eye(n), tol):
            raise ModalLabError("algebra does not contain the identity")
        for a in self.basis:
            if not contains(self, dagger(a), tol):
                raise ModalLabError("algebra is not *-closed")
        prods = np.einsum("aij,bjk->abik", self.basis, self.basis).reshape(-1, n, n)
        resid = prods.reshape(len(prods), -1).T
        resid = resid - self.vectors @ (dagger(self.vectors) @ resid)
        if np.linalg.norm(resid, axis=0).max(initial=0.0) > tol.eq_tol * max(1.0, np.sqrt(n)):
            raise ModalLabError("algebra is not closed under products")

    def __repr__(self):
        return f"OperatorAlgebra(ambient_dim={self.ambient_dim}, dim={self.dim})"


@dataclass(frozen=True, eq=False)
class BlockStructure:
    """Minimal central projections with block shapes (n_k, m_k).

    Block k is isomorphic to the full n_k x n_k matrices, repeated m_k times.
    """

    central_projections: tuple
    block_shapes: tuple

    def __len__(self):
        return len(self.central_projections)


def _hermitian_candidates(mats: np.ndarray) -> np.ndarray:
    herm = (mats + dagger(mats)) / 2
    anti = (mats - dagger(mats)) / 2j
    return np.concatenate([herm, anti], axis=0)


def from_span(mats, tol: TolerancePolicy = DEFAULT_TOL, hermitian: bool = True) -> OperatorAlgebra:
    """Wrap the span of ``mats`` (assumed *-closed) as an OperatorAlgebra.

    With ``hermitian=True`` the basis is rebuilt from Hermitian and
    anti-Hermitian parts; for a *-closed span this keeps the complex span.
    """
    mats = np.asarray(mats, dtype=complex)
    if mats.ndim != 3:
        raise ValueError("expected a stack of matrices")
    n = mats.shape[1]
    if hermitian:
        mats = _hermitian_candidates(mats)
    norms = np.linalg.norm(mats.reshape(len(mats), -1), axis=1)
    scale = max(norms.max(initial=0.0), 1e-300)
    q = gram_schmidt(vec(mats), tol, scale=scale) if len(mats) else np.zeros((n * n, 0))
    if hermitian:
        # remove roundoff anti-Hermitian residue
        basis = np.stack([q[:, k].reshape(n, n) for k in range(q.shape[1])]) if q.shape[1] else np.zeros((0, n, n))
        basis = (basis + dagger(basis)) / 2
        q = gram_schmidt(vec(basis), tol, scale=1.0) if len(basis) else q
    basis = np.stack([q[:, k].reshape(n, n) for k in range(q.shape[1])]) if q.shape[1] else np.zeros((0, n, n), dtype=complex)
    return OperatorAlgebra(basis)


def full_algebra(n: int) -> OperatorAlgebra:
    """B(C^n) with the Hermitian matrix-unit basis."""
    mats = []
    for i in range(n):
        for j in range(n):
            e = np.zeros((n, n), dtype=complex)
            if i == j:
                e[i, i] = 1
            elif i < j:
                e[i, j] = e[j, i] = 1 / np.sqrt(2)
            else:
                e[i, j], e[j, i] = 1j / np.sqrt(2), -1j / np.sqrt(2)
            mats.append(e)
    return OperatorAlgebra(np.stack(mats))


def scalar_algebra(n: int) -> OperatorAlgebra:
    return OperatorAlgebra((np.eye(n, dtype=complex) / np.sqrt(n))[None])


def diagonal_algebra(n: int) -> OperatorAlgebra:
    mats = np.zeros((n, n, n), dtype=complex)
    for i in range(n):
        mats[i, i, i] = 1
    return OperatorAlgebra(mats)


def generate(generators: Sequence, tol: TolerancePolicy = DEFAULT_TOL,
             ambient_dim: int | None = None) -> OperatorAlgebra:
    """Smallest unital *-algebra containing ``generators``.

    Repeatedly adds adjoints and pairwise products of the current basis until
    the dimension is stable for a full round.
    """
    gens = [np.asarray(g, dtype=complex) for g in generators]
    if ambient_dim is None:
        if not gens:
            raise ValueError("ambient_dim is required when there are no generators")
        ambient_dim = gens[0].shape[0]
    n = ambient_dim
    for k, g in enumerate(gens):
        if g.shape != (n, n):
            raise DimensionMismatch(f"generator {k} has shape {g.shape}, expected {(n, n)}")
    seeds = [np.eye(n, dtype=complex)]
    for g in gens:
        nrm = hs_norm(g)
        if nrm > 0:
            seeds.append(g / nrm)
    stack = _hermitian_candidates(np.stack(seeds))
    q = gram_schmidt(vec(stack), tol, scale=1.0)
    for _ in range(n * n):
        basis = q.T.reshape(-1, n, n)
        prods = np.einsum("aij,bjk->abik", basis, basis).reshape(-1, n, n)
        new = gram_schmidt(vec(_hermitian_candidates(prods)), tol, basis=q, scale=1.0)
        if new.shape[1] == 0:
            break
        q = np.hstack([q, new])
    basis = q.T.reshape(-1, n, n)
    return from_span(basis, tol)


def _commutator_map(basis: np.ndarray) -> np.ndarray:
    """Stacked matrices of X -> [X, A_k] acting on row-major vec(X)."""
    n = basis.shape[1]
    eye = np.eye(n)
    blocks = [np.kron(eye, a.T) - np.kron(a, eye) for a in basis]
    return np.vstack(blocks)


def commutant(r: OperatorAlgebra, tol: TolerancePolicy = DEFAULT_TOL) -> OperatorAlgebra:
    """All matrices commuting with every basis element of ``r``."""
    n = r.ambient_dim
    null = nullspace(_commutator_map(r.basis), tol, scale=1.0)
    return from_span(null.T.reshape(-1, n, n), tol)


def intersect(r1: OperatorAlgebra, r2: OperatorAlgebra, tol: TolerancePolicy = DEFAULT_TOL) -> OperatorAlgebra:
    """Intersection of two algebras as the joint kernel of (I - Pi_1) and (I - Pi_2)."""
    if r1.ambient_dim != r2.ambient_dim:
        raise DimensionMismatch(f"ambient dims {r1.ambient_dim} and {r2.ambient_dim} differ")
    n = r1.ambient_dim
    eye = np.eye(n * n)
    q1, q2 = r1.vectors, r2.vectors
    stacked = np.vstack([eye - q1 @ dagger(q1), eye - q2 @ dagger(q2)])
    null = nullspace(stacked, tol, scale=1.0)
    return from_span(null.T.reshape(-1, n, n), tol)


def center(r: OperatorAlgebra, tol: TolerancePolicy = DEFAULT_TOL) -> OperatorAlgebra:
    return intersect(r, commutant(r, tol), tol)


def contains(r: OperatorAlgebra, a, tol: TolerancePolicy = DEFAULT_TOL) -> bool:
    a = np.asarray(a, dtype=complex)
    if a.shape != (r.ambient_dim, r.ambient_dim):
        raise DimensionMismatch(f"operator shape {a.shape} does not match ambient dim {r.ambient_dim}")
    norm = hs_norm(a)
    if norm == 0:
        return True
    return hs_norm(a - r.project(a)) <= tol.eq_tol * norm


def is_subalgebra(r1: OperatorAlgebra, r2: OperatorAlgebra, tol: TolerancePolicy = DEFAULT_TOL) -> bool:
    """True iff r1 is contained in r2."""
    return all(contains(r2, a, tol) for a in r1.basis)


def equals(r1: OperatorAlgebra, r2: OperatorAlgebra, tol: TolerancePolicy = DEFAULT_TOL) -> bool:
    if r1.ambient_dim != r2.ambient_dim:
        return False
    return r1.dim == r2.dim and is_subalgebra(r1, r2, tol) and is_subalgebra(r2, r1, tol)


def minimal_projections(z: OperatorAlgebra, tol: TolerancePolicy = DEFAULT_TOL,
                        seed: int = 0, attempts: int = 5) -> list[np.ndarray]:
    """Minimal projections of an abelian algebra via one generic Hermitian element."""
    rng = np.random.default_rng(seed)
    for _ in range(attempts):
        coeffs = rng.standard_normal(z.dim)
        h = z.element(coeffs)
        h = (h + dagger(h)) / 2
        spec = eig_hermitian(h, tol)
        if len(spec) == z.dim:
            return list(spec.projections)
    raise DegenerateCenter(
        f"generic element of a {z.dim}-dimensional centre had clustered eigenvalues "
        f"in {attempts} attempts")


def block_structure(r: OperatorAlgebra, tol: TolerancePolicy = DEFAULT_TOL, seed: int = 0) -> BlockStructure:
    z = center(r, tol)
    projections = minimal_projections(z, tol, seed=seed)
    shapes = []
    for p in projections:
        reduced = np.einsum("ij,ajk->aik", p, r.basis)
        s = np.linalg.svd(vec(reduced), compute_uv=False)
        d = int(np.sum(s > tol.rank_tol * max(s.max(initial=0.0), 1.0)))
        nk = int(round(np.sqrt(d)))
        rank_p = int(round(np.trace(p).real))
        if nk * nk != d or nk == 0 or rank_p % nk:
            raise ModalLabError(f"inconsistent block: reduced dim {d}, projection rank {rank_p}")
        shapes.append((nk, rank_p // nk))
    # larger blocks first, for a stable presentation
    order = sorted(range(len(shapes)), key=lambda k: (-shapes[k][0], -shapes[k][1]))
    return BlockStructure(tuple(projections[k] for k in order), tuple(shapes[k] for k in order))
