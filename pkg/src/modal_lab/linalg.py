"""Dense complex matrix helpers with a single, explicit tolerance policy.

Every numerical predicate in the package (rank, equality, positivity) is
decided here, relative to an operator norm, so that results do not depend on
the overall scale of the inputs.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Iterable, Sequence

import numpy as np

from .errors import NotHermitian, NotPositiveDefinite, NotPSD

_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class TolerancePolicy:
    """Relative thresholds used throughout.

    rank_tol: singular values below ``rank_tol * scale`` count as zero.
    eq_tol: relative equality threshold for matrices and numbers.
    psd_tol: allowed relative negativity of eigenvalues of a PSD matrix.
    """

    rank_tol: float = 1e-9
    eq_tol: float = 1e-8
    psd_tol: float = 1e-10

    def __post_init__(self):
        for name in ("rank_tol", "eq_tol", "psd_tol"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be strictly positive")
        if self.rank_tol < _EPS:
            raise ValueError("rank_tol must be at least machine epsilon")

    def with_overrides(self, **kwargs) -> "TolerancePolicy":
        return replace(self, **{k: float(v) for k, v in kwargs.items() if v is not None})

    def as_dict(self) -> dict:
        return {"rank_tol": self.rank_tol, "eq_tol": self.eq_tol, "psd_tol": self.psd_tol}


DEFAULT_TOL = TolerancePolicy()


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    """Distinct eigenvalues (strictly descending) and their eigenprojections."""

    eigenvalues: np.ndarray
    projections: tuple

    def reconstruct(self) -> np.ndarray:
        return sum(lam * p for lam, p in zip(self.eigenvalues, self.projections))

    def __len__(self):
        return len(self.eigenvalues)


def as_matrix(a) -> np.ndarray:
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    return m


def dagger(a: np.ndarray) -> np.ndarray:
    return a.conj().swapaxes(-1, -2)


def op_norm(a: np.ndarray) -> float:
    """Spectral norm."""
    if a.size == 0:
        return 0.0
    return float(np.linalg.norm(a, 2))


def hs_inner(a: np.ndarray, b: np.ndarray) -> complex:
    """Hilbert-Schmidt inner product trace(a* b)."""
    return complex(np.vdot(a, b))


def hs_norm(a: np.ndarray) -> float:
    return float(np.linalg.norm(a))


def commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b - b @ a


def is_hermitian(a: np.ndarray, tol: TolerancePolicy = DEFAULT_TOL) -> bool:
    return op_norm(a - dagger(a)) <= tol.eq_tol * max(op_norm(a), _EPS)


def is_unitary(u: np.ndarray, tol: TolerancePolicy = DEFAULT_TOL) -> bool:
    return op_norm(dagger(u) @ u - np.eye(u.shape[0])) <= tol.eq_tol


def is_projection(p: np.ndarray, tol: TolerancePolicy = DEFAULT_TOL) -> bool:
    return op_norm(p - dagger(p)) <= tol.eq_tol and op_norm(p @ p - p) <= tol.eq_tol


def close(a: np.ndarray, b: np.ndarray, tol: TolerancePolicy = DEFAULT_TOL) -> bool:
    """Equality in operator norm, relative to the larger of the two norms (floor 1)."""
    scale = max(op_norm(a), op_norm(b), 1.0)
    return op_norm(np.asarray(a) - np.asarray(b)) <= tol.eq_tol * scale


def _hermitian_part(a: np.ndarray, tol: TolerancePolicy) -> tuple[np.ndarray, float]:
    a = as_matrix(a)
    norm = op_norm(a)
    if op_norm(a - dagger(a)) > tol.eq_tol * max(norm, _EPS):
        raise NotHermitian(f"matrix is not Hermitian: ||A - A*|| = {op_norm(a - dagger(a)):.3g}")
    return (a + dagger(a)) / 2, norm


def eig_hermitian(a, tol: TolerancePolicy = DEFAULT_TOL) -> SpectralDecomposition:
    """Spectral decomposition with eigenvalue clustering.

    Neighbouring eigenvalues closer than ``2 * rank_tol * ||A||`` are merged
    into one eigenspace; the reported eigenvalue is the cluster mean.
    """
    h, norm = _hermitian_part(a, tol)
    vals, vecs = np.linalg.eigh(h)
    order = np.argsort(vals)[::-1]
    vals, vecs = vals[order], vecs[:, order]
    gap = 2.0 * tol.rank_tol * norm
    groups: list[list[int]] = [[0]]
    for i in range(1, len(vals)):
        if vals[groups[-1][-1]] - vals[i] <= gap:
            groups[-1].append(i)
        else:
            groups.append([i])
    eigenvalues = np.array([vals[g].mean() for g in groups])
    projections = tuple(vecs[:, g] @ dagger(vecs[:, g]) for g in groups)
    return SpectralDecomposition(eigenvalues, projections)


def _check_psd(vals: np.ndarray, norm: float, tol: TolerancePolicy) -> None:
    if len(vals) and vals.min() < -tol.psd_tol * max(norm, _EPS):
        raise NotPSD(f"matrix has negative eigenvalue {vals.min():.3g}")


def range_projection(a, tol: TolerancePolicy = DEFAULT_TOL) -> np.ndarray:
    """Projection onto the span of eigenvectors with eigenvalue > rank_tol * ||A||."""
    h, norm = _hermitian_part(a, tol)
    vals, vecs = np.linalg.eigh(h)
    _check_psd(vals, norm, tol)
    keep = vecs[:, vals > tol.rank_tol * norm]
    return keep @ dagger(keep)


def nullspace(m, tol: TolerancePolicy = DEFAULT_TOL, scale: float = 0.0) -> np.ndarray:
    """Orthonormal basis (as columns) of the kernel of ``m``.

    Singular values at most ``rank_tol * max(sigma_max, scale)`` are treated as
    zero. Pass ``scale`` when the natural size of the map is known, so that a
    map which is numerically zero is not mistaken for a full-rank one.
    """
    m = np.asarray(m, dtype=complex)
    rows, cols = m.shape
    if cols == 0:
        return np.zeros((0, 0), dtype=complex)
    if rows == 0:
        return np.eye(cols, dtype=complex)
    if rows > 2 * cols:
        # same right singular structure, much cheaper SVD
        m = np.linalg.qr(m, mode="r")
    _, s, vh = np.linalg.svd(m)
    cutoff = tol.rank_tol * max(s[0] if len(s) else 0.0, scale)
    rank = int(np.sum(s > cutoff))
    return dagger(vh[rank:])


def gram_schmidt(vectors: np.ndarray, tol: TolerancePolicy = DEFAULT_TOL,
                 basis: np.ndarray | None = None, scale: float | None = None) -> np.ndarray:
    """Order-preserving Gram-Schmidt on the columns of ``vectors``.

    Columns are orthogonalised (twice, for stability) against ``basis`` and
    the already accepted columns; those with residual norm at most
    ``rank_tol * scale`` are dropped. Returns only the new orthonormal columns.
    """
    vectors = np.asarray(vectors, dtype=complex)
    dim = vectors.shape[0]
    q = np.zeros((dim, 0), dtype=complex) if basis is None else np.asarray(basis, dtype=complex)
    n_old = q.shape[1]
    if scale is None:
        scale = max((np.linalg.norm(vectors, axis=0).max() if vectors.shape[1] else 0.0), _EPS)
    cutoff = tol.rank_tol * scale
    if q.shape[1]:
        # cheap pre-filter: skip candidates already in the span
        resid = vectors - q @ (dagger(q) @ vectors)
        vectors = vectors[:, np.linalg.norm(resid, axis=0) > cutoff]
    accepted = [q]
    for j in range(vectors.shape[1]):
        v = vectors[:, j]
        cur = np.hstack(accepted) if len(accepted) > 1 else accepted[0]
        for _ in range(2):
            v = v - cur @ (dagger(cur) @ v)
        norm = np.linalg.norm(v)
        if norm > cutoff:
            accepted.append((v / norm)[:, None])
    full = np.hstack(accepted)
    return full[:, n_old:]


def orthonormalize_hs(ops: Sequence, tol: TolerancePolicy = DEFAULT_TOL) -> list[np.ndarray]:
    """Hilbert-Schmidt orthonormal basis of span(ops), preserving input order.

    Linearly dependent inputs (residual below rank_tol relative to the largest
    input norm) are dropped.
    """
    ops = [as_matrix(a) for a in ops]
    if not ops:
        return []
    n = ops[0].shape[0]
    cols = np.stack([a.reshape(-1) for a in ops], axis=1)
    q = gram_schmidt(cols, tol)
    return [q[:, k].reshape(n, n) for k in range(q.shape[1])]


def complex_power(d, z: complex, tol: TolerancePolicy = DEFAULT_TOL,
                  spectrum: SpectralDecomposition | None = None) -> np.ndarray:
    """``D**z = sum_j lambda_j**z P_j`` for positive-definite D and complex z."""
    spec = spectrum if spectrum is not None else eig_hermitian(d, tol)
    norm = float(np.max(np.abs(spec.eigenvalues)))
    if spec.eigenvalues.min() <= tol.rank_tol * norm:
        raise NotPositiveDefinite(
            f"smallest eigenvalue {spec.eigenvalues.min():.3g} is not positive")
    logs = np.log(spec.eigenvalues)
    return sum(np.exp(z * lg) * p for lg, p in zip(logs, spec.projections))


def imaginary_power(d, t: float, tol: TolerancePolicy = DEFAULT_TOL) -> np.ndarray:
    """The unitary ``D**(i t)``."""
    return complex_power(d, 1j * t, tol)


def vec(ops: Iterable[np.ndarray]) -> np.ndarray:
    """Stack matrices as columns of their row-major vectorisations."""
    ops = list(ops)
    if not ops:
        return np.zeros((0, 0), dtype=complex)
    return np.stack([np.asarray(a, dtype=complex).reshape(-1) for a in ops], axis=1)
