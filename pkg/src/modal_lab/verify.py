"""Seeded property suite: the exit criteria of the package.

Each ``criterion_*`` function draws its own random stream from the seed and
returns a CriterionResult; ``run_all`` runs them in order.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .algebra import (
    OperatorAlgebra,
    center,
    commutant,
    contains,
    equals,
    from_span,
    full_algebra,
    generate,
    is_subalgebra,
    minimal_projections,
)
from .linalg import DEFAULT_TOL, TolerancePolicy, dagger, eig_hermitian, hs_norm, nullspace, op_norm
from .modal import (
    centralizer,
    centralizer_via_density,
    dispersion_free_check,
    dispersion_free_decomposition,
    dispersion_residual,
    kms_function,
    kms_residuals,
    modal_algebra,
    modal_algebra_type_I,
    modular_flow,
)
from .sampling import (
    degenerate_spectrum,
    random_block_algebra,
    random_density,
    random_element,
    random_unitary,
)
from .scenarios import correlation_demo, measurement_demo, nested_factors_demo, schmidt_pair_vector, triviality_probe
from .states import QuantumState, density_in_algebra, is_faithful, support_projection

MODULAR_TIMES = (-2.0, -0.5, 0.5, 2.0)


@dataclass
class CriterionResult:
    key: str
    title: str
    passed: bool
    evidence: dict = field(default_factory=dict)
    seconds: float = 0.0

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        ev = ", ".join(f"{k}={_fmt(v)}" for k, v in self.evidence.items())
        return f"[{status}] {self.key} {self.title} ({ev})"


def _fmt(v):
    if isinstance(v, float):
        return f"{v:.3g}"
    return str(v)


def containment_residual(r1: OperatorAlgebra, r2: OperatorAlgebra) -> float:
    """Largest HS distance of an r1 basis element from r2."""
    return max(hs_norm(a - r2.project(a)) for a in r1.basis)


def _seed(seed, offset: int) -> np.random.Generator:
    return np.random.default_rng([int(seed), offset])


def _random_generated_algebra(n: int, rng, kind: int):
    """(generated algebra, algebra it should equal) for a few generator families."""
    if kind == 0:
        g = [rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)) for _ in range(2)]
        return generate(g), full_algebra(n)
    if kind == 1:
        h = random_density(n, rng)
        return generate([h]), generate(list(eig_hermitian(h).projections))
    sample = random_block_algebra(n, rng)
    return generate(list(sample.generators)), sample.algebra


def criterion_double_commutant(seed=42, count: int = 50, tol: TolerancePolicy = DEFAULT_TOL) -> CriterionResult:
    rng = _seed(seed, 1)
    worst, failures, gen_fail = 0.0, 0, 0
    for i in range(count):
        n = int(rng.integers(2, 7))
        r, expected = _random_generated_algebra(n, rng, i % 5 if i % 5 < 2 else 2)
        gen_fail += not equals(r, expected, tol)
        rr = commutant(commutant(r, tol), tol)
        worst = max(worst, containment_residual(rr, r), containment_residual(r, rr))
        failures += not equals(rr, r, tol)
    return CriterionResult("C1", "double commutant R'' = R", failures == 0 and gen_fail == 0,
                           {"instances": count, "failures": failures,
                            "generation_mismatches": gen_fail, "worst_residual": worst})


def _type_i_density(n: int, rng, kind: int) -> np.ndarray:
    if kind == 0:
        return random_density(n, rng)
    if kind == 1:
        return random_density(n, rng, spectrum=degenerate_spectrum(n, rng))
    if kind == 2:
        zeros = int(rng.integers(1, n))
        return random_density(n, rng, spectrum=degenerate_spectrum(n, rng, zeros=zeros))
    if kind == 3:
        return random_density(n, rng, rank=1)
    return random_density(n, rng, rank=int(rng.integers(1, n + 1)))


def criterion_type_i_reduction(seed=42, count: int = 50, tol: TolerancePolicy = DEFAULT_TOL) -> CriterionResult:
    rng = _seed(seed, 2)
    failures, inclusion_fail, degenerate = 0, 0, 0
    worst = 0.0
    for i in range(count):
        n = 2 + i % 7
        dens = _type_i_density(n, rng, i % 5)
        spec = eig_hermitian(dens, tol)
        degenerate += len(spec) < n
        rho = QuantumState.from_density(dens, tol)
        general = modal_algebra(rho, full_algebra(n), tol).modal
        type_i = modal_algebra_type_I(dens, tol)
        worst = max(worst, containment_residual(general, type_i), containment_residual(type_i, general))
        failures += not equals(general, type_i, tol)
        d_double = generate(list(spec.projections), tol, ambient_dim=n)
        d_prime = commutant(generate([dens], tol), tol)
        inclusion_fail += not is_subalgebra(d_double, d_prime, tol)
    return CriterionResult("C2", "type-I reduction: general modal algebra equals P_perp B(H) P_perp + D'' P",
                           failures == 0 and inclusion_fail == 0 and degenerate > 0,
                           {"instances": count, "degenerate_spectra": degenerate, "failures": failures,
                            "D''_not_in_D'": inclusion_fail, "worst_residual": worst})


def _faithful_instance(rng, n_range=(2, 7)):
    n = int(rng.integers(*n_range))
    r = random_block_algebra(n, rng).algebra
    rho = QuantumState.from_density(random_density(n, rng))
    return rho, r


def modular_fixed_points(rho: QuantumState, r: OperatorAlgebra, times=MODULAR_TIMES,
                         tol: TolerancePolicy = DEFAULT_TOL) -> OperatorAlgebra:
    """Joint fixed points of sigma_t over ``times``, solved in r's coordinates."""
    blocks = []
    for t in times:
        images = np.stack([r.coordinates(modular_flow(rho, r, a, t, tol)) for a in r.basis], axis=1)
        blocks.append(images - np.eye(r.dim))
    null = nullspace(np.vstack(blocks), tol, scale=1.0)
    return from_span(np.einsum("ak,aij->kij", null, r.basis), tol)


def criterion_centralizer_routes(seed=42, count: int = 50, tol: TolerancePolicy = DEFAULT_TOL) -> CriterionResult:
    rng = _seed(seed, 3)
    route_fail, fixed_fail, flow_fail = 0, 0, 0
    worst_flow = 0.0
    for _ in range(count):
        rho, r = _faithful_instance(rng)
        c1 = centralizer(rho, r, tol)
        c2 = centralizer_via_density(rho, r, tol)
        route_fail += not equals(c1, c2, tol)
        for a in c1.basis:
            for t in MODULAR_TIMES:
                dev = op_norm(modular_flow(rho, r, a, t, tol) - a)
                worst_flow = max(worst_flow, dev)
                flow_fail += dev > 1e-7
        fixed_fail += not equals(modular_fixed_points(rho, r, tol=tol), c1, tol)
    passed = route_fail == 0 and fixed_fail == 0 and flow_fail == 0
    return CriterionResult("C3", "centralizer routes agree and equal modular fixed points", passed,
                           {"instances": count, "route_mismatches": route_fail,
                            "fixed_point_mismatches": fixed_fail, "worst_flow_deviation": worst_flow})


def criterion_kms(seed=42, count: int = 20, tol: TolerancePolicy = DEFAULT_TOL) -> CriterionResult:
    rng = _seed(seed, 4)
    worst, worst_const = 0.0, 0.0
    for _ in range(count):
        rho, r = _faithful_instance(rng, (2, 6))
        a, b = random_element(r, rng), random_element(r, rng)
        ts = rng.uniform(-3, 3, size=5)
        res = kms_residuals(rho, r, a, b, ts, tol)
        worst = max(worst, res["lower_boundary"], res["upper_boundary"])
        c = centralizer(rho, r, tol)
        ac = random_element(c, rng)
        res_c = kms_residuals(rho, r, ac, b, ts, tol)
        h = density_in_algebra(rho, r, tol)
        strip = max(abs(kms_function(h, ac, b, t + 1j, tol) - kms_function(h, ac, b, t, tol)) for t in ts)
        worst = max(worst, res_c["lower_boundary"], res_c["upper_boundary"])
        worst_const = max(worst_const, res_c["spread"], strip)
    return CriterionResult("C4", "KMS boundary values; constant f on the centralizer",
                           worst <= 1e-7 and worst_const <= 1e-7,
                           {"instances": count, "worst_boundary_residual": worst,
                            "worst_constancy_residual": worst_const})


def _mixed_instances(seed, count: int):
    rng = _seed(seed, 5)
    out = []
    for i in range(count):
        n = int(rng.integers(2, 7))
        r = random_block_algebra(n, rng).algebra
        kind = i % 3
        if kind == 0:
            dens = random_density(n, rng)
        elif kind == 1:
            dens = random_density(n, rng, rank=1)
        else:
            dens = random_density(n, rng, rank=int(rng.integers(1, n + 1)))
        out.append((QuantumState.from_density(dens), r, rng))
    return out


def _nonabelian_subalgebras(r: OperatorAlgebra, rng, tol: TolerancePolicy):
    """R itself and, for each block of size >= 2, the block compressed with the rest scalar."""
    subs = []
    if not r.is_abelian(tol):
        subs.append(r)
    z = center(r, tol)
    for p in minimal_projections(z, tol):
        gens = [p @ random_element(r, rng) @ p for _ in range(2)]
        s = generate(gens, tol, ambient_dim=r.ambient_dim)
        if not s.is_abelian(tol):
            subs.append(s)
    return subs


def criterion_mixture(seed=42, count: int = 50, tol: TolerancePolicy = DEFAULT_TOL) -> CriterionResult:
    check_fail, recon_fail, component_fail, abelian_fail = 0, 0, 0, 0
    worst_recon, faithful_checked, min_nonabelian = 0.0, 0, np.inf
    for rho, r, rng in _mixed_instances(seed, count):
        res = modal_algebra(rho, r, tol)
        check_fail += not dispersion_free_check(rho, res.modal, tol)
        dec = dispersion_free_decomposition(rho, r, tol, result=res)
        for a in res.modal.basis:
            err = abs(dec.mixture(a) - rho.expect(a))
            worst_recon = max(worst_recon, err)
            recon_fail += err > 1e-9
        for w in dec.component_states:
            component_fail += not all(abs(w.variance(a)) <= tol.eq_tol for a in res.modal.basis)
        if is_faithful(rho, r, tol):
            for s in _nonabelian_subalgebras(r, rng, tol):
                faithful_checked += 1
                min_nonabelian = min(min_nonabelian, dispersion_residual(rho, s))
                abelian_fail += dispersion_free_check(rho, s, tol)
    passed = check_fail == recon_fail == component_fail == abelian_fail == 0 and faithful_checked > 0
    return CriterionResult("C5", "rho is a dispersion-free mixture on M; nonabelian subalgebras fail",
                           passed, {"instances": count, "check_failures": check_fail,
                                    "worst_reconstruction": worst_recon,
                                    "component_failures": component_fail,
                                    "nonabelian_checked": faithful_checked,
                                    "nonabelian_passing": abelian_fail,
                                    "min_nonabelian_residual": float(min_nonabelian)})


def criterion_orthodox(seed=42, count: int = 50, tol: TolerancePolicy = DEFAULT_TOL) -> CriterionResult:
    inclusion_fail, trivial_fail, faithful = 0, 0, 0
    for rho, r, _ in _mixed_instances(seed, count):
        res = modal_algebra(rho, r, tol)
        inclusion_fail += not is_subalgebra(res.orthodox, res.modal, tol)
        if is_faithful(rho, r, tol):
            faithful += 1
            trivial_fail += res.orthodox.dim != 1
    return CriterionResult("C6", "O is contained in M; O = CI for faithful states",
                           inclusion_fail == 0 and trivial_fail == 0 and faithful > 0,
                           {"instances": count, "faithful_instances": faithful,
                            "inclusion_failures": inclusion_fail, "nontrivial_O_on_faithful": trivial_fail})


def criterion_doubles(seed=42, tol: TolerancePolicy = DEFAULT_TOL) -> CriterionResult:
    rng = _seed(seed, 7)
    vectors = [((2, 2), schmidt_pair_vector([0.7, 0.3]))]
    for i in range(20):
        d = 2 if i < 10 else 3
        u, v = random_unitary(d, rng), random_unitary(d, rng)
        c = np.sqrt(rng.dirichlet(np.ones(d)) * 0.8 + 0.2 / d)
        x = sum(c[k] * np.kron(u[:, k], v[:, k]) for k in range(d))
        vectors.append(((d, d), x / np.linalg.norm(x)))
    worst, failed, pairs = 0.0, 0, 0
    for dims, x in vectors:
        rep = correlation_demo(x, dims, tol)
        worst = max(worst, rep.claims[0].evidence["max_deviation"])
        failed += not rep.passed
        pairs += rep.claims[0].evidence["lattice_size"]
    return CriterionResult("C7", "unique doubles with three-way correlation equalities",
                           failed == 0 and worst <= 1e-9,
                           {"vectors": len(vectors), "projections": pairs, "failed_vectors": failed,
                            "worst_deviation": worst})


def criterion_nested(seed=42, tol: TolerancePolicy = DEFAULT_TOL) -> CriterionResult:
    rep = nested_factors_demo(tol)
    witness = rep.artifacts["witness"]
    m1, m2 = rep.artifacts["M1"], rep.artifacts["M2"]
    disp = rep.claims[3].evidence["dispersion"]
    ok = (contains(m2, witness, tol) and not contains(m1, witness, tol)
          and abs(disp - 0.84) <= 1e-9 and is_subalgebra(rep.artifacts["N2"], rep.artifacts["N1"], tol)
          and rep.passed)
    return CriterionResult("C8", "nested factors: witness in M2 \\ M1 with dispersion 0.84", ok,
                           {"dispersion": disp, "claims_passed": f"{rep.n_passed}/{len(rep.claims)}"})


def criterion_triviality(seed=42, tol: TolerancePolicy = DEFAULT_TOL) -> CriterionResult:
    reports = [triviality_probe(n, 10, _seed(seed, 90 + n), tol) for n in range(2, 7)]
    samples = sum(r.claims[0].evidence["samples"] for r in reports)
    agreeing = sum(r.claims[0].evidence["agreeing"] for r in reports)
    return CriterionResult("C9", "modal = CI iff D = I/n (within clustering threshold)",
                           all(r.passed for r in reports),
                           {"samples": samples, "agreeing": agreeing,
                            "claims_passed": sum(r.n_passed for r in reports),
                            "claims": sum(len(r.claims) for r in reports)})


def criterion_measurement(seed=42, tol: TolerancePolicy = DEFAULT_TOL) -> CriterionResult:
    cases = [([0.7, 0.3], None), ([0.7, 0.3], int(seed)), ([0.5, 0.3, 0.2], int(seed) + 1),
             ([0.4, 0.3, 0.2, 0.1], int(seed) + 2)]
    worst, ok = 0.0, True
    for coeffs, s in cases:
        rep = measurement_demo(coeffs, s, tol)
        worst = max(worst, rep.claims[0].evidence["max_error"])
        ok &= rep.passed and rep.claims[1].description.startswith("M_A equals")
    return CriterionResult("C10", "Born rule and pointer algebra after measurement", ok and worst <= 1e-9,
                           {"cases": len(cases), "worst_born_error": worst})


def invariant_centralizer_unitaries(seed=42, count: int = 20, tol: TolerancePolicy = DEFAULT_TOL) -> CriterionResult:
    """U Z(C) U* = Z(C) for random unitaries U in C, and sigma_t fixes Z(C) pointwise."""
    rng = _seed(seed, 11)
    fail = 0
    for _ in range(count):
        rho, r = _faithful_instance(rng)
        c = centralizer(rho, r, tol)
        z = center(c, tol)
        h = random_element(c, rng, hermitian=True)
        spec = eig_hermitian(h, tol)
        u = sum(np.exp(1j * rng.uniform(0, 2 * np.pi)) * p for p in spec.projections)
        rotated = from_span(np.stack([u @ a @ dagger(u) for a in z.basis]), tol)
        fail += not equals(rotated, z, tol)
        for a in z.basis:
            fail += any(op_norm(modular_flow(rho, r, a, t, tol) - a) > 1e-7 for t in MODULAR_TIMES)
    return CriterionResult("I1", "Z(C) invariant under centralizer unitaries and modular flow",
                           fail == 0, {"instances": count, "failures": fail})


def invariant_support_minimality(seed=42, count: int = 20, tol: TolerancePolicy = DEFAULT_TOL) -> CriterionResult:
    """P Q = P for projections Q in R with rho(Q) = 1."""
    rng = _seed(seed, 12)
    fail = 0
    for _ in range(count):
        n = int(rng.integers(2, 7))
        r = random_block_algebra(n, rng).algebra
        rho = QuantumState.from_density(random_density(n, rng, rank=int(rng.integers(1, n + 1))))
        p = support_projection(rho, r, tol)
        q = p + (np.eye(n) - p) @ random_projection_in(intersect_perp(r, p, tol), rng, tol)
        fail += not (contains(r, q, tol) and abs(rho.expect(q) - 1) <= tol.eq_tol
                     and op_norm(p @ q - p) <= tol.eq_tol)
    return CriterionResult("I2", "support projection is minimal", fail == 0,
                           {"instances": count, "failures": fail})


def intersect_perp(r: OperatorAlgebra, p: np.ndarray, tol: TolerancePolicy) -> OperatorAlgebra:
    """The corner (I-P) R (I-P), made unital by adding P."""
    n = r.ambient_dim
    pp = np.eye(n) - p
    mats = [pp @ a @ pp for a in r.basis] + [p]
    return generate([m for m in mats if hs_norm(m) > tol.rank_tol], tol, ambient_dim=n)


def random_projection_in(alg: OperatorAlgebra, rng, tol: TolerancePolicy) -> np.ndarray:
    """A random spectral projection of a random Hermitian element."""
    h = random_element(alg, rng, hermitian=True)
    spec = eig_hermitian(h, tol)
    keep = rng.integers(0, 2, size=len(spec))
    return sum((p for p, k in zip(spec.projections, keep) if k), np.zeros_like(h))


CRITERIA = (
    criterion_double_commutant,
    criterion_type_i_reduction,
    criterion_centralizer_routes,
    criterion_kms,
    criterion_mixture,
    criterion_orthodox,
    criterion_doubles,
    criterion_nested,
    criterion_triviality,
    criterion_measurement,
    invariant_centralizer_unitaries,
    invariant_support_minimality,
)


def run_all(seed=42, tol: TolerancePolicy = DEFAULT_TOL) -> list[CriterionResult]:
    results = []
    for fn in CRITERIA:
        t0 = time.perf_counter()
        res = fn(seed=seed, tol=tol)
        res.seconds = time.perf_counter() - t0
        results.append(res)
    return results

