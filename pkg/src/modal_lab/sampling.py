"""Seeded random instances: unitaries, densities, vectors and block *-algebras."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import OperatorAlgebra, from_span
from .linalg import dagger


def rng_from(seed) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def random_unitary(n: int, rng) -> np.ndarray:
    """Haar-random unitary via QR of a complex Ginibre matrix."""
    rng = rng_from(rng)
    g = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    q, r = np.linalg.qr(g)
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_vector(n: int, rng) -> np.ndarray:
    rng = rng_from(rng)
    v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return v / np.linalg.norm(v)


def random_density(n: int, rng, rank: int | None = None, spectrum=None) -> np.ndarray:
    """Random density matrix with a given rank or a prescribed spectrum."""
    rng = rng_from(rng)
    u = random_unitary(n, rng)
    if spectrum is None:
        rank = n if rank is None else rank
        vals = np.zeros(n)
        vals[:rank] = rng.dirichlet(np.ones(rank))
    else:
        vals = np.asarray(spectrum, dtype=float)
        vals = vals / vals.sum()
    d = u @ np.diag(vals) @ dagger(u)
    return (d + dagger(d)) / 2


def degenerate_spectrum(n: int, rng, zeros: int = 0) -> np.ndarray:
    """A spectrum with at least one repeated eigenvalue (and ``zeros`` zero eigenvalues)."""
    rng = rng_from(rng)
    support = n - zeros
    levels = int(rng.integers(1, support)) if support > 1 else 1
    values = rng.dirichlet(np.ones(levels)) + 0.05
    labels = np.concatenate([np.arange(levels), rng.integers(0, levels, support - levels)])
    spec = np.concatenate([values[labels], np.zeros(zeros)])
    return spec / spec.sum()


@dataclass(frozen=True, eq=False)
class BlockAlgebraSample:
    algebra: OperatorAlgebra
    shapes: tuple
    unitary: np.ndarray
    generators: tuple


def random_block_shapes(n: int, rng) -> tuple:
    """Random (n_k, m_k) pairs with sum n_k * m_k = n."""
    rng = rng_from(rng)
    shapes = []
    remaining = n
    while remaining > 0:
        nk = int(rng.integers(1, remaining + 1))
        mk = int(rng.integers(1, remaining // nk + 1))
        shapes.append((nk, mk))
        remaining -= nk * mk
    return tuple(shapes)


def block_algebra(shapes, unitary: np.ndarray | None = None) -> OperatorAlgebra:
    """U (direct sum of M_{n_k} tensor 1_{m_k}) U*."""
    n = sum(nk * mk for nk, mk in shapes)
    u = np.eye(n) if unitary is None else unitary
    mats = []
    offset = 0
    for nk, mk in shapes:
        for i in range(nk):
            for j in range(nk):
                e = np.zeros((nk, nk), dtype=complex)
                e[i, j] = 1
                m = np.zeros((n, n), dtype=complex)
                m[offset:offset + nk * mk, offset:offset + nk * mk] = np.kron(e, np.eye(mk))
                mats.append(u @ m @ dagger(u))
        offset += nk * mk
    return from_span(np.stack(mats))


def random_element(r: OperatorAlgebra, rng, hermitian: bool = False) -> np.ndarray:
    rng = rng_from(rng)
    if hermitian:
        coeffs = rng.standard_normal(r.dim)
        a = r.element(coeffs)
        return (a + dagger(a)) / 2
    coeffs = rng.standard_normal(r.dim) + 1j * rng.standard_normal(r.dim)
    return r.element(coeffs)


def random_block_algebra(n: int, rng, shapes=None) -> BlockAlgebraSample:
    rng = rng_from(rng)
    shapes = random_block_shapes(n, rng) if shapes is None else tuple(shapes)
    u = random_unitary(n, rng)
    alg = block_algebra(shapes, u)
    gens = tuple(random_element(alg, rng) for _ in range(2))
    return BlockAlgebraSample(alg, shapes, u, gens)
