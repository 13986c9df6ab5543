#!/usr/bin/env python3
"""Empirical probe for states that are not faithful on R.

The uniqueness argument for the modal algebra needs a faithful state. For a
non-faithful state with support P in R, this compares the modal part
Z(C_{rho,R}) P with the same construction carried out on the range of P,
where the compressed state is faithful on the compressed algebra. Agreement
on every sample is evidence (not proof) that the construction extends.
"""
import argparse
import sys

import numpy as np

from modal_lab import QuantumState, center, centralizer, equals, from_span, support_projection
from modal_lab.linalg import DEFAULT_TOL, dagger
from modal_lab.sampling import random_block_algebra, random_density, rng_from


def compressed_modal_part(rho, r, p, tol):
    """Z(C) of the compressed faithful state on V* R V, lifted back by V."""
    vals, vecs = np.linalg.eigh(p)
    v = vecs[:, vals > 0.5]
    corner = from_span(np.stack([dagger(v) @ a @ v for a in r.basis]), tol)
    small = QuantumState.from_density(dagger(v) @ rho.density @ v, tol)
    z = center(centralizer(small, corner, tol), tol)
    return from_span(np.stack([v @ b @ dagger(v) for b in z.basis]), tol)


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--samples", type=int, default=60)
    ap.add_argument("--seed", type=int, default=7)
    args = ap.parse_args()
    tol = DEFAULT_TOL
    rng = rng_from(args.seed)
    agree = tested = 0
    for _ in range(args.samples):
        n = int(rng.integers(3, 7))
        r = random_block_algebra(n, rng).algebra
        rho = QuantumState.from_density(random_density(n, rng, rank=int(rng.integers(1, n))), tol)
        p = support_projection(rho, r, tol)
        if np.allclose(p, np.eye(n)):
            continue
        tested += 1
        z = center(centralizer(rho, r, tol), tol)
        direct = from_span(np.stack([b @ p for b in z.basis]), tol)
        lifted = compressed_modal_part(rho, r, p, tol)
        same = equals(direct, lifted, tol)
        agree += same
        if not same:
            print(f"disagreement: n={n}, dim R={r.dim}, rank P={round(np.trace(p).real)}, "
                  f"dims {direct.dim} vs {lifted.dim}")
    print(f"non-faithful samples: {tested}, Z(C)P equals compressed construction: {agree}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
