"""``modal-lab`` command-line front end.

Every command builds a report dict (command echo, tolerances, results,
claims, summary) and exits 0 when all claims pass, 1 when any fails and 2
on input errors.
"""
from __future__ import annotations

import argparse
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import verify as verify_mod
from .algebra import (
    OperatorAlgebra,
    block_structure,
    center,
    commutant,
    contains,
    equals,
    is_subalgebra,
    minimal_projections,
)
from .document import ParseError, emit, encode_algebra, encode_matrix, encode_vector, parse
from .errors import DegenerateCenter, ModalLabError
from .linalg import DEFAULT_TOL, TolerancePolicy, commutator, is_projection
from .modal import (
    LATTICE_DIM_CAP,
    DoublePair,
    _lattice,
    centralizer,
    centralizer_via_density,
    correlation_pair,
    dispersion_free_decomposition,
    dispersion_residual,
    kms_residuals,
    modal_algebra,
    modular_flow,
    orthodox_algebra,
)
from .sampling import random_element, rng_from
from .scenarios import SCENARIOS
from .states import QuantumState, is_faithful, support_projection

COMMANDS = ("generate", "commutant", "center", "centralizer", "support", "modal", "orthodox",
            "decompose", "doubles", "kms-check", "scenario", "verify")
DEFAULT_T_SAMPLES = (-2.0, -0.5, 0.0, 0.5, 1.0, 3.0)


class UsageError(ModalLabError):
    pass


def jsonable(v):
    """Plain-JSON view of results: complex and matrices become [re, im] pairs."""
    if isinstance(v, OperatorAlgebra):
        return encode_algebra(v)
    if isinstance(v, DoublePair):
        return {"p": encode_matrix(v.p), "p_bar": encode_matrix(v.p_bar), "joint": v.joint,
                "left": v.left, "right": v.right, "unique": v.unique,
                "lattice_size": v.lattice_size, "notes": list(v.notes)}
    if isinstance(v, np.ndarray):
        if v.ndim > 2:
            return [jsonable(m) for m in v]
        if v.ndim == 2:
            return encode_matrix(v)
        if np.iscomplexobj(v):
            return encode_vector(v)
        return [jsonable(x) for x in v.tolist()]
    if isinstance(v, (complex, np.complexfloating)):
        return [float(v.real), float(v.imag)]
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        return float(v)
    if isinstance(v, dict):
        return {str(k): jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [jsonable(x) for x in v]
    if v is None or isinstance(v, str):
        return v
    raise TypeError(f"cannot serialise {type(v).__name__}")


class Report:
    def __init__(self, command: str, tol: TolerancePolicy):
        self.command = command
        self.tol = tol
        self.results: dict = {}
        self.claims: list = []
        self.notes: list = []
        self.seed = None

    def claim(self, description: str, passed: bool, **evidence):
        self.claims.append({"description": description, "passed": bool(passed), "evidence": evidence})

    @property
    def failed(self) -> int:
        return sum(not c["passed"] for c in self.claims)

    def document(self, echo: dict, duration: float | None) -> dict:
        doc = {
            "command": self.command,
            "flags": echo,
            "tolerances": self.tol.as_dict(),
            "results": jsonable(self.results),
            "claims": jsonable(self.claims),
            "notes": list(self.notes),
            "summary": {"passed": len(self.claims) - self.failed, "failed": self.failed,
                        "total": len(self.claims)},
        }
        if self.seed is not None:
            doc["seed"] = self.seed
        if duration is not None:
            doc["duration_s"] = duration
        return doc


def _need(args, *names):
    missing = [f"--{n.replace('_', '-')}" for n in names if getattr(args, n) is None]
    if missing:
        raise UsageError(f"{args.command} needs {', '.join(missing)}")


def _load(args):
    _need(args, "input")
    try:
        data = Path(args.input).read_bytes()
    except OSError as exc:
        raise UsageError(f"cannot read {args.input}: {exc.strerror}") from None
    return parse(data, args.tol_policy)


def _algebra_state(args, need_state=True):
    doc = _load(args)
    _need(args, "algebra", *(["state"] if need_state else []))
    r = doc.algebra(args.algebra)
    rho = doc.state(args.state) if need_state else None
    return doc, r, rho


def _closure_claim(rep: Report, alg: OperatorAlgebra, label: str):
    try:
        alg.validate(rep.tol)
        ok, why = True, "closed"
    except ModalLabError as exc:
        ok, why = False, str(exc)
    rep.claim(f"{label} is a unital *-algebra", ok, dim=alg.dim, check=why)


def _max_state_commutator(rho: QuantumState, alg: OperatorAlgebra, other: OperatorAlgebra) -> float:
    return max((abs(rho.expect(commutator(a, b))) for a in alg.basis for b in other.basis), default=0.0)


def cmd_generate(args, rep: Report):
    _, r, _ = _algebra_state(args, need_state=False)
    rep.results.update(dim=r.dim, ambient_dim=r.ambient_dim, abelian=r.is_abelian(rep.tol), basis=r.basis)
    try:
        bs = block_structure(r, rep.tol, seed=args.seed_value)
        rep.results["block_shapes"] = [list(s) for s in bs.block_shapes]
        rep.claim("block shapes account for the algebra dimension",
                  sum(n * n for n, _ in bs.block_shapes) == r.dim,
                  blocks=len(bs), dim=r.dim)
    except DegenerateCenter as exc:
        rep.notes.append(f"block structure unavailable: {exc}")
    _closure_claim(rep, r, "generated algebra")


def cmd_commutant(args, rep: Report):
    _, r, _ = _algebra_state(args, need_state=False)
    rp = commutant(r, rep.tol)
    rpp = commutant(rp, rep.tol)
    rep.results.update(dim=rp.dim, algebra_dim=r.dim, basis=rp.basis)
    rep.claim("double commutant returns the algebra", equals(rpp, r, rep.tol),
              dim_double_commutant=rpp.dim, dim_algebra=r.dim)
    _closure_claim(rep, rp, "commutant")


def cmd_center(args, rep: Report):
    _, r, _ = _algebra_state(args, need_state=False)
    z = center(r, rep.tol)
    rep.results.update(dim=z.dim, algebra_dim=r.dim, factor=z.dim == 1, basis=z.basis)
    rep.claim("centre is abelian and inside the algebra",
              z.is_abelian(rep.tol) and is_subalgebra(z, r, rep.tol), dim=z.dim)


def cmd_centralizer(args, rep: Report):
    _, r, rho = _algebra_state(args)
    c = centralizer(rho, r, rep.tol)
    rep.results.update(dim=c.dim, algebra_dim=r.dim, basis=c.basis)
    resid = _max_state_commutator(rho, c, r)
    rep.claim("state does not see commutators with the algebra", resid <= rep.tol.eq_tol,
              max_residual=resid)
    if is_faithful(rho, r, rep.tol):
        alt = centralizer_via_density(rho, r, rep.tol)
        rep.claim("matches the commutant of the algebra's density", equals(alt, c, rep.tol),
                  dim_density_route=alt.dim)
    else:
        rep.notes.append("state is not faithful on the algebra; density route skipped")
    _closure_claim(rep, c, "centralizer")


def cmd_support(args, rep: Report):
    _, r, rho = _algebra_state(args)
    p = support_projection(rho, r, rep.tol)
    rank = int(round(np.trace(p).real))
    rep.results.update(rank=rank, faithful=rank == r.ambient_dim, projection=p)
    weight = rho.expect(p).real
    rep.claim("support carries the whole state", abs(weight - 1) <= rep.tol.eq_tol, weight=weight)
    rep.claim("support is a projection in the algebra",
              is_projection(p, rep.tol) and contains(r, p, rep.tol), rank=rank)


def _modal_claims(rep: Report, rho, res):
    rep.claim("support lies in the centralizer", contains(res.centralizer, res.support, rep.tol),
              support_rank=int(round(np.trace(res.support).real)))
    rep.claim("orthodox algebra sits inside the modal algebra",
              is_subalgebra(res.orthodox, res.modal, rep.tol),
              dim_orthodox=res.orthodox.dim, dim_modal=res.modal.dim)
    resid = dispersion_residual(rho, res.orthodox)
    rep.claim("state is dispersion-free on the orthodox algebra", resid <= rep.tol.eq_tol,
              dispersion_residual=resid)


def cmd_modal(args, rep: Report):
    _, r, rho = _algebra_state(args)
    res = modal_algebra(rho, r, rep.tol)
    rep.results.update(
        modal_dim=res.modal.dim, trivial=res.trivial_flag, orthodox_dim=res.orthodox.dim,
        centralizer_dim=res.centralizer.dim, centralizer_center_dim=res.centralizer_center.dim,
        support_rank=int(round(np.trace(res.support).real)), modal_basis=res.modal.basis,
    )
    _modal_claims(rep, rho, res)
    _closure_claim(rep, res.modal, "modal algebra")


def cmd_orthodox(args, rep: Report):
    _, r, rho = _algebra_state(args)
    o = orthodox_algebra(rho, r, rep.tol)
    m = modal_algebra(rho, r, rep.tol).modal
    rep.results.update(dim=o.dim, modal_dim=m.dim, basis=o.basis)
    resid = dispersion_residual(rho, o)
    rep.claim("state is dispersion-free on the orthodox algebra", resid <= rep.tol.eq_tol,
              dispersion_residual=resid)
    rep.claim("orthodox algebra sits inside the modal algebra", is_subalgebra(o, m, rep.tol),
              dim_orthodox=o.dim, dim_modal=m.dim)


def cmd_decompose(args, rep: Report):
    _, r, rho = _algebra_state(args)
    res = modal_algebra(rho, r, rep.tol)
    dec = dispersion_free_decomposition(rho, r, rep.tol, result=res)
    rep.results.update(weights=dec.weights, components=[s.density for s in dec.component_states],
                       modal_dim=res.modal.dim)
    err = max(abs(dec.mixture(a) - rho.expect(a)) for a in r.basis)
    rep.claim("mixture reproduces the state on the algebra", err <= rep.tol.eq_tol, max_error=err)
    worst = max((dispersion_residual(s, dec.target_algebra) for s in dec.component_states), default=0.0)
    rep.claim("each component is dispersion-free on the modal algebra", worst <= rep.tol.eq_tol,
              max_dispersion=worst, components=len(dec.component_states))
    rep.claim("weights sum to one", abs(dec.weights.sum() - 1) <= rep.tol.eq_tol,
              weight_sum=float(dec.weights.sum()))


def cmd_doubles(args, rep: Report):
    _, r, rho = _algebra_state(args)
    if rho.vector is None:
        raise UsageError(f"doubles needs a vector state; {args.state!r} is a density")
    if not is_faithful(rho, r, rep.tol):
        raise UsageError(f"state {args.state!r} is not faithful on {args.algebra!r}")
    rp = commutant(r, rep.tol)
    if not is_faithful(rho, rp, rep.tol):
        raise UsageError(f"state {args.state!r} is not faithful on the commutant of {args.algebra!r}")
    z = center(centralizer(rho, r, rep.tol), rep.tol)
    zp = center(centralizer(rho, rp, rep.tol), rep.tol)
    mins = minimal_projections(z, rep.tol, seed=args.seed_value)
    if z.dim <= LATTICE_DIM_CAP:
        candidates = list(_lattice(mins, r.ambient_dim))
    else:
        candidates = list(mins)
        rep.notes.append(f"dim Z(C_R) = {z.dim} exceeds {LATTICE_DIM_CAP}; only minimal projections tabulated")
    table = [correlation_pair(rho, r, p, rep.tol, r_prime=rp, z_prime=zp) for p in candidates]
    rep.results.update(table=table, center_dim=z.dim, commutant_center_dim=zp.dim)
    dev = max(t.max_deviation for t in table)
    rep.claim("joint and marginal probabilities agree for every pair", dev <= rep.tol.eq_tol,
              max_deviation=dev, pairs=len(table))
    defects = [n for t in table for n in t.notes if not n.startswith("uniqueness scan skipped")]
    rep.claim("every double is a projection of Z(C_R') with no competitor",
              not defects and all(t.unique is not False for t in table),
              n_unique=sum(bool(t.unique) for t in table), defects=len(defects))


def cmd_kms(args, rep: Report):
    _, r, rho = _algebra_state(args)
    if not is_faithful(rho, r, rep.tol):
        raise UsageError(f"state {args.state!r} is not faithful on {args.algebra!r}")
    rng = rng_from(args.seed_value)
    a = random_element(r, rng)
    b = random_element(r, rng)
    ts = args.t_samples
    res = kms_residuals(rho, r, a, b, ts, rep.tol)
    rep.seed = args.seed_value
    rep.results.update(t_samples=list(ts), lower_boundary=res["lower_boundary"],
                       upper_boundary=res["upper_boundary"], values=res["values"])
    rep.claim("boundary value at Im z = 0 matches rho(sigma_t(A) B)",
              res["lower_boundary"] <= rep.tol.eq_tol, max_residual=res["lower_boundary"])
    rep.claim("boundary value at Im z = 1 matches rho(B sigma_t(A))",
              res["upper_boundary"] <= rep.tol.eq_tol, max_residual=res["upper_boundary"])
    c = random_element(centralizer(rho, r, rep.tol), rng)
    drift = max(float(np.abs(modular_flow(rho, r, c, t, rep.tol) - c).max()) for t in ts)
    rep.claim("a centralizer element is fixed by the modular flow", drift <= rep.tol.eq_tol * max(1.0, float(np.abs(c).max())),
              max_drift=drift)


def _scenario_kwargs(args):
    name = args.scenario
    if name == "measurement":
        coeffs = args.coefficients if args.coefficients is not None else [0.5, 0.3, 0.2]
        return {"coefficients": coeffs, "seed": args.seed}
    if name == "triviality":
        return {"n": args.dim or 3, "samples": args.samples or 10, "seed": args.seed_value}
    if name == "correlation":
        if args.input is None:
            return {}
        doc = _load(args)
        _need(args, "state")
        rho = doc.state(args.state)
        if rho.vector is None or doc.space is None or doc.space.n_legs != 2:
            raise UsageError("correlation needs a vector state on a two-leg ambient")
        return {"x": rho.vector, "dims": doc.space.leg_dims}
    return {}


def cmd_scenario(args, rep: Report):
    _need(args, "scenario")
    if args.scenario not in SCENARIOS:
        raise UsageError(f"unknown scenario {args.scenario!r} (have {sorted(SCENARIOS)})")
    out = SCENARIOS[args.scenario](tol=rep.tol, **_scenario_kwargs(args))
    rep.results.update(scenario=out.name, artifacts=out.artifacts)
    for c in out.claims:
        rep.claim(c.description, c.passed, **c.evidence)
    rep.notes.extend(out.notes)


def cmd_verify(args, rep: Report):
    rep.seed = args.seed_value
    timings = {}
    for res in verify_mod.run_all(args.seed_value, rep.tol):
        rep.claim(f"{res.key} {res.title}", res.passed, **res.evidence)
        timings[res.key] = res.seconds
    if args.timing:
        rep.results["seconds"] = timings


HANDLERS = {
    "generate": cmd_generate, "commutant": cmd_commutant, "center": cmd_center,
    "centralizer": cmd_centralizer, "support": cmd_support, "modal": cmd_modal,
    "orthodox": cmd_orthodox, "decompose": cmd_decompose, "doubles": cmd_doubles,
    "kms-check": cmd_kms, "scenario": cmd_scenario, "verify": cmd_verify,
}


def _float_list(text: str) -> list:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="modal-lab", description="Modal algebras of finite-dimensional states.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--input", metavar="FILE", help="problem document (JSON)")
    p.add_argument("--algebra", metavar="NAME")
    p.add_argument("--state", metavar="NAME")
    p.add_argument("--out", choices=("text", "json"), default="text")
    p.add_argument("--output", metavar="FILE", help="write the report here instead of stdout")
    p.add_argument("--tol", type=float, metavar="X", help="equality tolerance (eq_tol)")
    p.add_argument("--seed", type=int, metavar="N", help="default: $MODAL_LAB_SEED, else 0")
    p.add_argument("--t-samples", type=_float_list, metavar="LIST", default=list(DEFAULT_T_SAMPLES),
                   help="comma-separated modular times for kms-check; write --t-samples=-1,0,2 when the list starts negative")
    p.add_argument("--scenario", metavar="NAME", help=f"one of {', '.join(SCENARIOS)}")
    p.add_argument("--coefficients", type=_float_list, metavar="LIST", help="measurement scenario weights")
    p.add_argument("--dim", type=int, help="ambient dimension for the triviality scenario")
    p.add_argument("--samples", type=int, help="sample count for the triviality scenario")
    p.add_argument("--timing", action="store_true", help="include wall-clock times in json output")
    return p


def _resolve_seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get("MODAL_LAB_SEED")
    if env is None or env == "":
        return 0
    try:
        return int(env)
    except ValueError:
        raise UsageError(f"MODAL_LAB_SEED must be an integer, got {env!r}") from None


def run(argv=None) -> tuple[int, dict | None]:
    """Execute one command; returns (exit status, report document)."""
    args = build_parser().parse_args(argv)
    t0 = time.perf_counter()
    try:
        args.seed_value = _resolve_seed(args)
        args.tol_policy = DEFAULT_TOL.with_overrides(eq_tol=args.tol) if args.tol is not None else None
        tol = args.tol_policy or DEFAULT_TOL
        if args.input is not None and args.command != "scenario":
            tol = _load(args).tolerances
            args.tol_policy = tol
        rep = Report(args.command, tol)
        HANDLERS[args.command](args, rep)
    except ParseError as exc:
        for d in exc.diagnostics:
            print(f"modal-lab: {args.input}: {d}", file=sys.stderr)
        return 2, None
    except (ModalLabError, ValueError) as exc:
        print(f"modal-lab: {exc}", file=sys.stderr)
        return 2, None
    elapsed = time.perf_counter() - t0
    echo = {k: v for k, v in vars(args).items()
            if k in ("input", "algebra", "state", "tol", "seed", "scenario", "t_samples", "coefficients",
                     "dim", "samples") and v is not None}
    if args.command != "kms-check":
        echo.pop("t_samples", None)
    show_time = args.out == "text" or args.timing
    doc = rep.document(jsonable(echo), elapsed if show_time else None)
    payload = emit(doc, args.out)
    if args.output:
        Path(args.output).write_bytes(payload)
    else:
        sys.stdout.buffer.write(payload)
        sys.stdout.flush()
    return (1 if rep.failed else 0), doc


def main(argv=None) -> int:
    return run(argv)[0]


if __name__ == "__main__":
    sys.exit(main())
