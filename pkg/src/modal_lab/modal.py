"""Centralizers, the modal algebra, dispersion-free mixtures, modular flow and doubles.

Notation: ``R`` is an OperatorAlgebra, ``rho`` a QuantumState on the same
space, ``h`` the density representative of rho inside R, ``P`` the support
projection of rho in R.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Sequence

import numpy as np

from .algebra import (
    OperatorAlgebra,
    center,
    commutant,
    contains,
    from_span,
    full_algebra,
    generate,
    intersect,
    minimal_projections,
)
from .errors import NoDouble, NotFaithful, NotInAlgebra
from .linalg import (
    DEFAULT_TOL,
    TolerancePolicy,
    as_matrix,
    close,
    complex_power,
    dagger,
    eig_hermitian,
    is_projection,
    nullspace,
    range_projection,
)
from .states import QuantumState, density_in_algebra, is_faithful, support_projection


@dataclass(frozen=True, eq=False)
class ModalResult:
    support: np.ndarray
    centralizer: OperatorAlgebra
    centralizer_center: OperatorAlgebra
    modal: OperatorAlgebra
    orthodox: OperatorAlgebra
    trivial_flag: bool


@dataclass(frozen=True, eq=False)
class DispersionFreeDecomposition:
    weights: np.ndarray
    component_states: tuple
    target_algebra: OperatorAlgebra

    def mixture(self, a) -> complex:
        return complex(sum(w * s.expect(a) for w, s in zip(self.weights, self.component_states)))


@dataclass(frozen=True, eq=False)
class DoublePair:
    p: np.ndarray
    p_bar: np.ndarray
    joint: float
    left: float
    right: float
    unique: bool | None = None
    lattice_size: int | None = None
    notes: list = field(default_factory=list)

    @property
    def max_deviation(self) -> float:
        return max(abs(self.joint - self.left), abs(self.joint - self.right))


def _span_from_coords(r: OperatorAlgebra, coords: np.ndarray, tol: TolerancePolicy) -> OperatorAlgebra:
    mats = np.einsum("ak,aij->kij", coords, r.basis)
    return from_span(mats, tol)


def _structure_constants(rho: QuantumState, r: OperatorAlgebra) -> np.ndarray:
    """T[j, k] = rho(A_j A_k) over r's basis."""
    b = r.basis
    return np.einsum("ij,ajk,bki->ab", rho.density, b, b)


def centralizer(rho: QuantumState, r: OperatorAlgebra, tol: TolerancePolicy = DEFAULT_TOL) -> OperatorAlgebra:
    """{A in R : rho([A, B]) = 0 for all B in R}, as a joint kernel in R's coordinates."""
    t = _structure_constants(rho, r)
    # row j: A = sum_k a_k A_k  ->  rho(A_k B_j) - rho(B_j A_k)
    constraints = t.T - t
    null = nullspace(constraints, tol, scale=1.0)
    return _span_from_coords(r, null, tol)


def centralizer_via_density(rho: QuantumState, r: OperatorAlgebra, tol: TolerancePolicy = DEFAULT_TOL) -> OperatorAlgebra:
    """R intersected with the commutant of h (faithful states only)."""
    if not is_faithful(rho, r, tol):
        raise NotFaithful("centralizer_via_density requires a faithful state")
    h = density_in_algebra(rho, r, tol)
    return intersect(r, commutant(generate([h], tol), tol), tol)


def orthodox_algebra(rho: QuantumState, r: OperatorAlgebra, tol: TolerancePolicy = DEFAULT_TOL) -> OperatorAlgebra:
    """Elements A of R on which rho factorises: rho(AB) = rho(A)rho(B) = rho(BA) for all B.

    The one-sided condition alone is not *-closed (for a pure qubit state it
    admits lower-triangular matrices); imposing both sides gives the complex
    span of the self-adjoint elements on which rho is dispersion-free.
    """
    t = _structure_constants(rho, r)
    m = np.array([rho.expect(a) for a in r.basis])
    outer = np.outer(m, m)
    left = t.T - outer.T   # row j: rho(A_k B_j) - rho(A_k) rho(B_j)
    right = t - outer.T    # row j: rho(B_j A_k) - rho(B_j) rho(A_k)
    null = nullspace(np.vstack([left, right]), tol, scale=1.0)
    return _span_from_coords(r, null, tol)


def _direct_sum(first: Sequence[np.ndarray], second: Sequence[np.ndarray], n: int,
                tol: TolerancePolicy) -> OperatorAlgebra:
    mats = [m for m in list(first) + list(second) if np.linalg.norm(m) > tol.rank_tol]
    return generate(mats, tol, ambient_dim=n)


def modal_algebra(rho: QuantumState, r: OperatorAlgebra, tol: TolerancePolicy = DEFAULT_TOL) -> ModalResult:
    """P_perp R P_perp + Z(C) P together with the ingredients it is built from."""
    n = r.ambient_dim
    p = support_projection(rho, r, tol)
    p_perp = np.eye(n) - p
    cent = centralizer(rho, r, tol)
    z = center(cent, tol)
    first = [p_perp @ a @ p_perp for a in r.basis]
    second = [zb @ p for zb in z.basis]
    modal = _direct_sum(first, second, n, tol)
    orth = orthodox_algebra(rho, r, tol)
    return ModalResult(
        support=p,
        centralizer=cent,
        centralizer_center=z,
        modal=modal,
        orthodox=orth,
        trivial_flag=modal.dim == 1,
    )


def modal_algebra_type_I(d, tol: TolerancePolicy = DEFAULT_TOL) -> OperatorAlgebra:
    """P_perp B(H) P_perp + D'' P for a density matrix D on the whole space."""
    d = as_matrix(d.density if isinstance(d, QuantumState) else d)
    n = d.shape[0]
    p = range_projection(d, tol)
    p_perp = np.eye(n) - p
    spec = eig_hermitian(d, tol)
    d_double = generate(list(spec.projections), tol, ambient_dim=n)
    first = [p_perp @ a @ p_perp for a in full_algebra(n).basis]
    second = [a @ p for a in d_double.basis]
    return _direct_sum(first, second, n, tol)


def dispersion_free_check(rho: QuantumState, s: OperatorAlgebra, tol: TolerancePolicy = DEFAULT_TOL) -> bool:
    """rho([A, B]* [A, B]) = 0 for all basis pairs of S."""
    return dispersion_residual(rho, s) <= tol.eq_tol


def dispersion_residual(rho: QuantumState, s: OperatorAlgebra) -> float:
    b = s.basis
    comm = np.einsum("aij,bjk->abik", b, b) - np.einsum("bij,ajk->abik", b, b)
    # rho(C* C) = trace(D C* C) summed entrywise, per pair
    vals = np.einsum("ij,abkj,abki->ab", rho.density, comm.conj(), comm)
    return float(np.abs(vals).max(initial=0.0))


def dispersion_free_decomposition(rho: QuantumState, r: OperatorAlgebra,
                                  tol: TolerancePolicy = DEFAULT_TOL,
                                  result: ModalResult | None = None) -> DispersionFreeDecomposition:
    """rho as a mixture of states that are dispersion-free on the modal algebra.

    Components are rho compressed to the minimal projections E_j of Z(C) P and
    renormalised; weights are rho(E_j). For R = B(H) the E_j are the nonzero
    spectral projections Q_j of the density and the components reduce to
    Q_j / trace(Q_j) with weights lambda_j trace(Q_j).
    """
    res = result if result is not None else modal_algebra(rho, r, tol)
    p = res.support
    weights, comps = [], []
    for f in minimal_projections(res.centralizer_center, tol):
        e = f @ p
        w = rho.expect(e).real
        if w <= tol.rank_tol:
            continue
        comp = e @ rho.density @ e / w
        weights.append(w)
        comps.append(QuantumState((comp + dagger(comp)) / 2))
    weights = np.array(weights)
    return DispersionFreeDecomposition(weights, tuple(comps), res.modal)


def _require_faithful(rho: QuantumState, r: OperatorAlgebra, tol: TolerancePolicy) -> np.ndarray:
    if not is_faithful(rho, r, tol):
        raise NotFaithful("state is not faithful on the algebra")
    return density_in_algebra(rho, r, tol)


def modular_flow(rho: QuantumState, r: OperatorAlgebra, a, t: float,
                 tol: TolerancePolicy = DEFAULT_TOL) -> np.ndarray:
    """sigma_t(A) = h^{it} A h^{-it}."""
    h = _require_faithful(rho, r, tol)
    a = np.asarray(a, dtype=complex)
    if not contains(r, a, tol):
        raise NotInAlgebra("operator is not in the algebra")
    u = complex_power(h, 1j * t, tol)
    return u @ a @ dagger(u)


def kms_function(h: np.ndarray, a, b, z: complex, tol: TolerancePolicy = DEFAULT_TOL) -> complex:
    """f(z) = trace(h h^{iz} A h^{-iz} B), evaluated as a double sum over eigenprojections."""
    spec = eig_hermitian(h, tol)
    lam = spec.eigenvalues
    ps = spec.projections
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    total = 0j
    for j, pj in enumerate(ps):
        for k, pk in enumerate(ps):
            coeff = np.exp((1 + 1j * z) * np.log(lam[j]) - 1j * z * np.log(lam[k]))
            total += coeff * np.trace(pj @ a @ pk @ b)
    return complex(total)


def kms_residuals(rho: QuantumState, r: OperatorAlgebra, a, b, t_samples: Sequence[float],
                  tol: TolerancePolicy = DEFAULT_TOL) -> dict:
    """Boundary values of the KMS function against rho(sigma_t(A) B) and rho(B sigma_t(A))."""
    h = _require_faithful(rho, r, tol)
    for name, op in (("A", a), ("B", b)):
        if not contains(r, op, tol):
            raise NotInAlgebra(f"{name} is not in the algebra")
    lower, upper, values = [], [], []
    for t in t_samples:
        sa = modular_flow(rho, r, a, t, tol)
        f_t = kms_function(h, a, b, t, tol)
        f_ti = kms_function(h, a, b, t + 1j, tol)
        lower.append(abs(f_t - rho.expect(sa @ b)))
        upper.append(abs(f_ti - rho.expect(b @ sa)))
        values.append(f_t)
    spread = max(abs(v - values[0]) for v in values) if values else 0.0
    return {
        "lower_boundary": max(lower, default=0.0),
        "upper_boundary": max(upper, default=0.0),
        "spread": spread,
        "values": values,
    }


def kms_check(rho: QuantumState, r: OperatorAlgebra, a, b, t_samples: Sequence[float],
              tol: TolerancePolicy = DEFAULT_TOL) -> bool:
    res = kms_residuals(rho, r, a, b, t_samples, tol)
    return max(res["lower_boundary"], res["upper_boundary"]) <= tol.eq_tol


def double_of(x, r: OperatorAlgebra, a, tol: TolerancePolicy = DEFAULT_TOL,
              r_prime: OperatorAlgebra | None = None) -> np.ndarray:
    """The unique B in R' with Bx = Ax and B*x = A*x."""
    rho = x if isinstance(x, QuantumState) else QuantumState.from_vector(x, tol)
    x = rho.vector
    if x is None:
        raise ValueError("double_of needs a vector state")
    rp = r_prime if r_prime is not None else commutant(r, tol)
    if not is_faithful(rho, r, tol) or not is_faithful(rho, rp, tol):
        raise NotFaithful("vector state must be faithful on R and on R'")
    a = np.asarray(a, dtype=complex)
    if not contains(r, a, tol):
        raise NotInAlgebra("operator is not in R")
    # Hermitian basis C_k: B* x = sum conj(b_k) C_k x, conjugated to stay complex-linear
    cx = np.stack([c @ x for c in rp.basis], axis=1)
    m = np.vstack([cx, cx.conj()])
    rhs = np.concatenate([a @ x, (dagger(a) @ x).conj()])
    coef, *_ = np.linalg.lstsq(m, rhs, rcond=None)
    resid = np.linalg.norm(m @ coef - rhs)
    if resid > tol.eq_tol * max(1.0, np.linalg.norm(rhs)):
        raise NoDouble(f"no double in R' (residual {resid:.3g}); A is not in the centralizer")
    if nullspace(m, tol, scale=1.0).shape[1] != 0:
        raise NoDouble("double is not unique")
    return rp.element(coef)


def _lattice(projections: Sequence[np.ndarray], n: int):
    for mask in product((0, 1), repeat=len(projections)):
        yield sum((p for p, bit in zip(projections, mask) if bit), np.zeros((n, n), dtype=complex))


def _correlations(x: np.ndarray, p: np.ndarray, q: np.ndarray) -> tuple[float, float, float]:
    joint = np.vdot(x, p @ q @ x).real
    left = np.vdot(x, p @ x).real
    right = np.vdot(x, q @ x).real
    return float(joint), float(left), float(right)


LATTICE_DIM_CAP = 12


def correlation_pair(x, r: OperatorAlgebra, p, tol: TolerancePolicy = DEFAULT_TOL,
                     r_prime: OperatorAlgebra | None = None,
                     z_prime: OperatorAlgebra | None = None) -> DoublePair:
    """P in Z(C_R) paired with its double in Z(C_R'), with the three correlation numbers.

    Uniqueness is confirmed by scanning every projection of Z(C_R') when that
    algebra has dimension at most LATTICE_DIM_CAP.
    """
    rho = x if isinstance(x, QuantumState) else QuantumState.from_vector(x, tol)
    vec_x = rho.vector
    p = np.asarray(p, dtype=complex)
    if not is_projection(p, tol):
        raise ValueError("P must be a Hermitian idempotent")
    z = center(centralizer(rho, r, tol), tol)
    if not contains(z, p, tol):
        raise NotInAlgebra("P is not in the centre of the centralizer")
    rp = r_prime if r_prime is not None else commutant(r, tol)
    p_bar = double_of(rho, r, p, tol, r_prime=rp)
    p_bar = (p_bar + dagger(p_bar)) / 2
    notes = []
    if not is_projection(p_bar, tol):
        notes.append("double is not a projection")
    zp = z_prime if z_prime is not None else center(centralizer(rho, rp, tol), tol)
    if not contains(zp, p_bar, tol):
        notes.append("double is not in Z(C_R')")
    joint, left, right = _correlations(vec_x, p, p_bar)
    unique = None
    if zp.dim <= LATTICE_DIM_CAP:
        n = r.ambient_dim
        hits = []
        for q in _lattice(minimal_projections(zp, tol), n):
            j, l_, r_ = _correlations(vec_x, p, q)
            if abs(j - l_) <= tol.eq_tol and abs(j - r_) <= tol.eq_tol:
                hits.append(q)
        unique = len(hits) == 1 and close(hits[0], p_bar, tol)
        size = 2 ** zp.dim
    else:
        notes.append(f"uniqueness scan skipped: dim Z(C_R') = {zp.dim} > {LATTICE_DIM_CAP}")
        size = None
    return DoublePair(p, p_bar, joint, left, right, unique, size, notes)


def is_trivial(alg: OperatorAlgebra) -> bool:
    return alg.dim == 1

