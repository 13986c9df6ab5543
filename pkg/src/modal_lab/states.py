"""States, reduced densities, support projections and Schmidt forms."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .algebra import OperatorAlgebra, full_algebra
from .errors import BadLegSet, DimensionMismatch, NotAState, NotUnitVector
from .linalg import (
    DEFAULT_TOL,
    TolerancePolicy,
    as_matrix,
    close,
    dagger,
    op_norm,
    range_projection,
)


@dataclass(frozen=True, eq=False)
class QuantumState:
    """A density matrix on the ambient space; ``vector`` is kept for pure states built from one."""

    density: np.ndarray
    vector: np.ndarray | None = None

    @property
    def ambient_dim(self) -> int:
        return self.density.shape[0]

    @classmethod
    def from_density(cls, d, tol: TolerancePolicy = DEFAULT_TOL) -> "QuantumState":
        d = as_matrix(d)
        if op_norm(d - dagger(d)) > tol.eq_tol * max(op_norm(d), 1.0):
            raise NotAState("density is not Hermitian")
        d = (d + dagger(d)) / 2
        vals = np.linalg.eigvalsh(d)
        if vals.min() < -tol.psd_tol * max(vals.max(), 1.0):
            raise NotAState(f"density has negative eigenvalue {vals.min():.3g}")
        tr = np.trace(d).real
        if abs(tr - 1) > tol.eq_tol:
            raise NotAState(f"density has trace {float(tr):.17g}, expected 1")
        return cls(d)

    @classmethod
    def from_vector(cls, x, tol: TolerancePolicy = DEFAULT_TOL) -> "QuantumState":
        x = np.asarray(x, dtype=complex).reshape(-1)
        nrm = np.linalg.norm(x)
        if abs(nrm - 1) > tol.eq_tol:
            raise NotUnitVector(f"vector has norm {float(nrm):.17g}, expected 1")
        x = x / nrm
        return cls(np.outer(x, x.conj()), x)

    @classmethod
    def maximally_mixed(cls, n: int) -> "QuantumState":
        return cls(np.eye(n, dtype=complex) / n)

    def expect(self, a) -> complex:
        """rho(A) = trace(density A)."""
        a = np.asarray(a, dtype=complex)
        if a.shape != self.density.shape:
            raise DimensionMismatch(f"operator shape {a.shape} does not match state dim {self.ambient_dim}")
        return complex(np.einsum("ij,ji->", self.density, a))

    def __call__(self, a) -> complex:
        return self.expect(a)

    def variance(self, a) -> float:
        """rho(A^2) - rho(A)^2 for Hermitian A."""
        a = np.asarray(a, dtype=complex)
        return float((self.expect(a @ a) - self.expect(a) ** 2).real)


def expectation(rho: QuantumState, a) -> complex:
    return rho.expect(a)


def restrict(rho: QuantumState, r: OperatorAlgebra):
    """The functional A -> rho(A) on r, as coordinates against r's basis."""
    if r.ambient_dim != rho.ambient_dim:
        raise DimensionMismatch("state and algebra live on different spaces")
    return np.array([rho.expect(a) for a in r.basis])


@dataclass(frozen=True)
class TensorSpace:
    leg_dims: tuple
    labels: tuple | None = None

    def __post_init__(self):
        object.__setattr__(self, "leg_dims", tuple(int(d) for d in self.leg_dims))
        if not self.leg_dims or any(d < 1 for d in self.leg_dims):
            raise ValueError("leg dimensions must be positive")
        if self.labels is not None and len(self.labels) != len(self.leg_dims):
            raise ValueError("one label per leg")

    @property
    def ambient_dim(self) -> int:
        return int(np.prod(self.leg_dims))

    @property
    def n_legs(self) -> int:
        return len(self.leg_dims)

    def _check_legs(self, legs) -> tuple:
        legs = tuple(int(k) for k in legs)
        if not legs or len(set(legs)) != len(legs) or any(not 0 <= k < self.n_legs for k in legs):
            raise BadLegSet(f"bad leg set {legs} for {self.n_legs} legs")
        return legs

    def embed(self, op, legs: Sequence[int]) -> np.ndarray:
        """op acting on ``legs`` (in the given order), tensored with identity elsewhere."""
        legs = self._check_legs(legs)
        rest = [k for k in range(self.n_legs) if k not in legs]
        dl = int(np.prod([self.leg_dims[k] for k in legs]))
        op = np.asarray(op, dtype=complex)
        if op.shape != (dl, dl):
            raise DimensionMismatch(f"operator shape {op.shape} does not fit legs {legs}")
        dr = int(np.prod([self.leg_dims[k] for k in rest])) if rest else 1
        full = np.kron(op, np.eye(dr))
        order = list(legs) + rest
        dims = [self.leg_dims[k] for k in order]
        t = full.reshape(dims + dims)
        perm = np.argsort(order)
        k = self.n_legs
        t = t.transpose(list(perm) + [k + p for p in perm])
        n = self.ambient_dim
        return t.reshape(n, n)

    def leg_algebra(self, legs: Sequence[int]) -> OperatorAlgebra:
        """B(tensor of ``legs``) tensored with the identity on the other legs."""
        legs = self._check_legs(legs)
        dl = int(np.prod([self.leg_dims[k] for k in legs]))
        local = full_algebra(dl).basis
        scale = np.sqrt(self.ambient_dim // dl)
        return OperatorAlgebra(np.stack([self.embed(a, legs) / scale for a in local]))


@dataclass(frozen=True, eq=False)
class SchmidtForm:
    coefficients: np.ndarray
    left_basis: np.ndarray  # columns v_i
    right_basis: np.ndarray  # columns w_i

    def reconstruct(self) -> np.ndarray:
        return sum(c * np.kron(self.left_basis[:, i], self.right_basis[:, i])
                   for i, c in enumerate(self.coefficients))

    @property
    def rank(self) -> int:
        return len(self.coefficients)


def _as_state(rho) -> QuantumState:
    return rho if isinstance(rho, QuantumState) else QuantumState.from_density(rho)


def partial_trace(rho: QuantumState, space: TensorSpace, keep: Sequence[int]) -> QuantumState:
    """Reduced state on the legs in ``keep`` (returned in ascending leg order)."""
    rho = _as_state(rho)
    if rho.ambient_dim != space.ambient_dim:
        raise DimensionMismatch("state dimension does not match the tensor space")
    keep = sorted(space._check_legs(keep))
    k = space.n_legs
    dims = list(space.leg_dims)
    t = rho.density.reshape(dims + dims)
    # traced legs share their row and column index
    letters = "abcdefghijklmnopqrstuvwxyz"
    row = [letters[i] for i in range(k)]
    col = [letters[k + i] if i in keep else letters[i] for i in range(k)]
    out = [letters[i] for i in keep] + [letters[k + i] for i in keep]
    red = np.einsum("".join(row + col) + "->" + "".join(out), t)
    dk = int(np.prod([dims[i] for i in keep]))
    return QuantumState(red.reshape(dk, dk))


def density_in_algebra(rho: QuantumState, r: OperatorAlgebra, tol: TolerancePolicy = DEFAULT_TOL) -> np.ndarray:
    """The unique h in r with trace(h A) = rho(A) for every A in r.

    Solves the linear system in r's basis coordinates; for the Hermitian
    orthonormal bases produced by this package the system matrix is the
    identity and h is the trace-orthogonal projection of the density onto r.
    """
    if r.ambient_dim != rho.ambient_dim:
        raise DimensionMismatch("state and algebra live on different spaces")
    b = r.basis
    gram = np.einsum("aij,bji->ab", b, b)  # trace(A_a A_b)
    rhs = restrict(rho, r)
    # trace(h A_a) = sum_b c_b trace(A_b A_a) = rho(A_a)
    c = np.linalg.solve(gram.T, rhs)
    h = r.element(c)
    return (h + dagger(h)) / 2


def support_projection(rho: QuantumState, r: OperatorAlgebra, tol: TolerancePolicy = DEFAULT_TOL) -> np.ndarray:
    """Smallest projection P in r with rho(P) = 1."""
    return range_projection(density_in_algebra(rho, r, tol), tol)


def is_faithful(rho: QuantumState, r: OperatorAlgebra, tol: TolerancePolicy = DEFAULT_TOL) -> bool:
    p = support_projection(rho, r, tol)
    return close(p, np.eye(r.ambient_dim), tol)


def schmidt(x, space: TensorSpace, cut: Sequence[int], tol: TolerancePolicy = DEFAULT_TOL) -> SchmidtForm:
    """Schmidt decomposition of x across (cut, complement of cut).

    ``v_i`` live on the legs of ``cut`` in ascending order, ``w_i`` on the
    remaining legs; coefficients below rank_tol are dropped.
    """
    x = np.asarray(x, dtype=complex).reshape(-1)
    if x.shape[0] != space.ambient_dim:
        raise DimensionMismatch("vector length does not match the tensor space")
    if abs(np.linalg.norm(x) - 1) > tol.eq_tol:
        raise NotUnitVector(f"vector has norm {float(np.linalg.norm(x)):.17g}")
    left = sorted(space._check_legs(cut))
    right = [k for k in range(space.n_legs) if k not in left]
    if not right:
        raise BadLegSet("cut must leave a nonempty complement")
    t = x.reshape(space.leg_dims).transpose(left + right)
    dl = int(np.prod([space.leg_dims[k] for k in left]))
    m = t.reshape(dl, -1)
    u, s, vh = np.linalg.svd(m, full_matrices=False)
    keep = s > tol.rank_tol
    return SchmidtForm(s[keep], u[:, keep], vh[keep].T)


def subspace_space(space: TensorSpace, legs: Sequence[int]) -> TensorSpace:
    legs = sorted(space._check_legs(legs))
    labels = None if space.labels is None else tuple(space.labels[k] for k in legs)
    return TensorSpace(tuple(space.leg_dims[k] for k in legs), labels)

