"""Problem documents (JSON in) and report documents (JSON or text out).

Complex numbers are ``[re, im]`` pairs (a bare real number is also
accepted on input); matrices are row-major lists of rows. See
docs/format.md for the full layout.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .algebra import OperatorAlgebra, diagonal_algebra, full_algebra, generate, scalar_algebra
from .errors import ModalLabError
from .linalg import DEFAULT_TOL, TolerancePolicy
from .states import QuantumState, TensorSpace

BUILTIN_ALGEBRAS = {"full": full_algebra, "scalars": scalar_algebra, "diagonal": diagonal_algebra}


class ParseError(ModalLabError):
    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(self.diagnostics))


@dataclass
class ProblemDocument:
    ambient_dim: int
    space: TensorSpace | None
    algebra_specs: dict
    states: dict
    tolerances: TolerancePolicy = DEFAULT_TOL
    description: str = ""
    _cache: dict = field(default_factory=dict, repr=False)

    def algebra(self, name: str) -> OperatorAlgebra:
        if name not in self.algebra_specs:
            raise ParseError([f"algebras: no algebra named {name!r} (have {sorted(self.algebra_specs)})"])
        if name not in self._cache:
            kind, payload = self.algebra_specs[name]
            if kind == "builtin":
                alg = BUILTIN_ALGEBRAS[payload](self.ambient_dim)
            elif kind == "legs":
                alg = self.space.leg_algebra(payload)
            else:
                alg = generate(payload, self.tolerances, ambient_dim=self.ambient_dim)
            self._cache[name] = alg
        return self._cache[name]

    def state(self, name: str) -> QuantumState:
        if name not in self.states:
            raise ParseError([f"states: no state named {name!r} (have {sorted(self.states)})"])
        return self.states[name]


def _complex(v, where: str, errors: list) -> complex:
    if isinstance(v, bool):
        errors.append(f"{where}: expected a number or [re, im] pair, got {v!r}")
        return 0j
    if isinstance(v, (int, float)):
        return complex(v)
    if isinstance(v, list) and len(v) == 2 and all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in v):
        return complex(v[0], v[1])
    errors.append(f"{where}: expected a number or [re, im] pair, got {v!r}")
    return 0j


def decode_vector(data, where: str, errors: list) -> np.ndarray:
    if not isinstance(data, list) or not data:
        errors.append(f"{where}: expected a nonempty list of entries")
        return np.zeros(0, dtype=complex)
    return np.array([_complex(v, f"{where}[{i}]", errors) for i, v in enumerate(data)])


def decode_matrix(data, where: str, errors: list, dim: int | None = None) -> np.ndarray:
    if not isinstance(data, list) or not data or not all(isinstance(r, list) for r in data):
        errors.append(f"{where}: expected a list of rows")
        return np.zeros((0, 0), dtype=complex)
    rows = [[_complex(v, f"{where}[{i}][{j}]", errors) for j, v in enumerate(row)] for i, row in enumerate(data)]
    n = len(rows)
    if any(len(r) != n for r in rows):
        errors.append(f"{where}: matrix is not square")
        return np.zeros((0, 0), dtype=complex)
    if dim is not None and n != dim:
        errors.append(f"{where}: matrix is {n}x{n}, ambient dimension is {dim}")
    return np.array(rows, dtype=complex)


def encode_complex(z) -> list:
    z = complex(z)
    return [float(z.real), float(z.imag)]


def encode_matrix(m) -> list:
    return [[encode_complex(v) for v in row] for row in np.asarray(m)]


def encode_vector(v) -> list:
    return [encode_complex(z) for z in np.asarray(v).reshape(-1)]


def encode_algebra(alg: OperatorAlgebra, with_basis: bool = True) -> dict:
    out = {"ambient_dim": alg.ambient_dim, "dim": alg.dim}
    if with_basis:
        out["basis"] = [encode_matrix(a) for a in alg.basis]
    return out


def _location(exc: json.JSONDecodeError) -> str:
    return f"line {exc.lineno}, column {exc.colno}: {exc.msg}"


def parse(data, tol: TolerancePolicy | None = None) -> ProblemDocument:
    """Validate a problem document; raises ParseError with every diagnostic found."""
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError([f"document is not UTF-8: {exc}"]) from None
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise ParseError([_location(exc)]) from None
    if not isinstance(doc, dict):
        raise ParseError(["document: top level must be an object"])
    errors: list[str] = []

    tols = doc.get("tolerances", {}) or {}
    try:
        policy = (tol or DEFAULT_TOL).with_overrides(**{k: tols.get(k) for k in ("rank_tol", "eq_tol", "psd_tol")})
    except (TypeError, ValueError) as exc:
        errors.append(f"tolerances: {exc}")
        policy = tol or DEFAULT_TOL
    if tol is not None:
        # command-line overrides win over the document
        policy = policy.with_overrides(**{k: v for k, v in tol.as_dict().items() if v != getattr(DEFAULT_TOL, k)})

    amb = doc.get("ambient")
    space = None
    dim = 0
    if isinstance(amb, dict) and "dim" in amb and isinstance(amb["dim"], int) and amb["dim"] >= 1:
        dim = amb["dim"]
    elif isinstance(amb, dict) and isinstance(amb.get("legs"), list) and amb["legs"] \
            and all(isinstance(d, int) and d >= 1 for d in amb["legs"]):
        space = TensorSpace(tuple(amb["legs"]), tuple(amb["labels"]) if "labels" in amb else None)
        dim = space.ambient_dim
    else:
        raise ParseError(["ambient: expected {\"dim\": n} or {\"legs\": [d1, ...]}"])

    specs = {}
    for name, spec in (doc.get("algebras") or {}).items():
        where = f"algebras.{name}"
        if isinstance(spec, dict) and "builtin" in spec:
            spec = spec["builtin"]
        if isinstance(spec, str):
            if spec not in BUILTIN_ALGEBRAS:
                errors.append(f"{where}: unknown builtin {spec!r} (use one of {sorted(BUILTIN_ALGEBRAS)})")
                continue
            specs[name] = ("builtin", spec)
        elif isinstance(spec, dict) and "legs" in spec:
            if space is None:
                errors.append(f"{where}: 'legs' needs an ambient given by legs")
                continue
            legs = spec["legs"]
            if not (isinstance(legs, list) and legs and all(isinstance(k, int) and 0 <= k < space.n_legs for k in legs)
                    and len(set(legs)) == len(legs)):
                errors.append(f"{where}.legs: bad leg list {legs!r}")
                continue
            specs[name] = ("legs", legs)
        else:
            gens = spec.get("generators") if isinstance(spec, dict) else spec
            if not isinstance(gens, list):
                errors.append(f"{where}: expected a list of generator matrices")
                continue
            mats = [decode_matrix(g, f"{where}[{k}]", errors, dim) for k, g in enumerate(gens)]
            specs[name] = ("generators", mats)

    states = {}
    for name, spec in (doc.get("states") or {}).items():
        where = f"states.{name}"
        n_err = len(errors)
        try:
            if isinstance(spec, dict) and "density" in spec:
                d = decode_matrix(spec["density"], f"{where}.density", errors, dim)
                if len(errors) == n_err:
                    states[name] = QuantumState.from_density(d, policy)
            elif isinstance(spec, dict) and "vector" in spec:
                v = decode_vector(spec["vector"], f"{where}.vector", errors)
                if len(errors) == n_err and len(v) != dim:
                    errors.append(f"{where}.vector: length {len(v)}, ambient dimension is {dim}")
                if len(errors) == n_err:
                    states[name] = QuantumState.from_vector(v, policy)
            else:
                errors.append(f"{where}: expected {{\"density\": ...}} or {{\"vector\": ...}}")
        except ModalLabError as exc:
            errors.append(f"{where}: {exc}")
    if errors:
        raise ParseError(errors)
    return ProblemDocument(dim, space, specs, states, policy, str(doc.get("description", "")))


def emit(report: dict, fmt: str = "json") -> bytes:
    """Serialise a report; json output is key-sorted so identical reports give identical bytes."""
    if fmt == "json":
        return (json.dumps(report, sort_keys=True, indent=2) + "\n").encode("utf-8")
    if fmt == "text":
        return render_text(report).encode("utf-8")
    raise ValueError(f"unknown format {fmt!r}")


def _is_pair(v) -> bool:
    return isinstance(v, list) and len(v) == 2 and all(isinstance(x, float) for x in v)


def _is_matrix(v) -> bool:
    return isinstance(v, list) and bool(v) and all(isinstance(r, list) and r and all(_is_pair(x) for x in r) for r in v)


def _text_value(v) -> str:
    if isinstance(v, float):
        return f"{v:.6g}"
    if _is_pair(v):
        return f"{v[0]:.6g}{v[1]:+.6g}j"
    if _is_matrix(v):
        return f"<{len(v)}x{len(v)} matrix>"
    if isinstance(v, list) and v and all(_is_matrix(m) for m in v):
        return f"<{len(v)} matrices, {len(v[0])}x{len(v[0])}>"
    if isinstance(v, list):
        return "[" + ", ".join(_text_value(x) for x in v) + "]"
    if isinstance(v, dict):
        return "{" + ", ".join(f"{k}: {_text_value(x)}" for k, x in v.items()) + "}"
    return str(v)


def render_text(report: dict) -> str:
    lines = [f"command: {report.get('command')}"]
    tol = report.get("tolerances", {})
    lines.append("tolerances: " + ", ".join(f"{k}={v:g}" for k, v in sorted(tol.items())))
    if "seed" in report:
        lines.append(f"seed: {report['seed']}")
    results = report.get("results", {})
    if results:
        lines.append("results:")
        width = max(len(k) for k in results)
        for k in sorted(results):
            v = results[k]
            if isinstance(v, list) and v and all(isinstance(x, dict) for x in v):
                lines.append(f"  {k}:")
                lines.extend(f"    {i}: {_text_value(x)}" for i, x in enumerate(v))
            else:
                lines.append(f"  {k:<{width}}  {_text_value(v)}")
    claims = report.get("claims", [])
    if claims:
        lines.append("claims:")
        for c in claims:
            status = "PASS" if c["passed"] else "FAIL"
            ev = ", ".join(f"{k}={_text_value(v)}" for k, v in sorted(c["evidence"].items()))
            lines.append(f"  [{status}] {c['description']} ({ev})")
    for note in report.get("notes", []):
        lines.append(f"note: {note}")
    s = report.get("summary", {})
    lines.append(f"summary: {s.get('passed', 0)} passed, {s.get('failed', 0)} failed, "
                 f"{s.get('total', 0)} claims")
    if "duration_s" in report:
        lines.append(f"duration: {report['duration_s']:.3f} s")
    return "\n".join(lines) + "\n"
