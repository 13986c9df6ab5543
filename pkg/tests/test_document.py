import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from modal_lab.document import (
    ParseError,
    decode_matrix,
    emit,
    encode_matrix,
    parse,
    render_text,
)
from modal_lab.linalg import TolerancePolicy

MINIMAL = {"ambient": {"dim": 2}, "states": {"tracial": {"density": [[0.5, 0], [0, 0.5]]}}}


def doc(**kw):
    base = json.loads(json.dumps(MINIMAL))
    base.update(kw)
    return json.dumps(base)


def test_minimal_document():
    d = parse(json.dumps(MINIMAL))
    assert d.ambient_dim == 2 and np.allclose(d.state("tracial").density, np.eye(2) / 2)


def test_bad_trace_names_state():
    with pytest.raises(ParseError) as exc:
        parse(doc(states={"rho": {"density": [[0.5, 0], [0, 0.4]]}}))
    assert any(d.startswith("states.rho") and "trace" in d for d in exc.value.diagnostics)


def test_near_unit_vector_accepted():
    d = parse(doc(states={"x": {"vector": [1 + 1e-12, 0]}}))
    assert np.isclose(np.linalg.norm(d.state("x").vector), 1)


def test_non_psd_rejected():
    with pytest.raises(ParseError, match="states.bad"):
        parse(doc(states={"bad": {"density": [[1.5, 0], [0, -0.5]]}}))


def test_malformed_number_has_path():
    with pytest.raises(ParseError) as exc:
        parse(doc(algebras={"g": [[[1, "x"], [0, 0]]]}))
    assert exc.value.diagnostics == ["algebras.g[0][0][1]: expected a number or [re, im] pair, got 'x'"]


def test_dimension_mismatch_names_entity():
    with pytest.raises(ParseError, match=r"algebras.g\[0\]: matrix is 3x3"):
        parse(doc(algebras={"g": [np.eye(3).tolist()]}))


def test_syntax_error_has_line_and_column():
    with pytest.raises(ParseError, match="line 2, column"):
        parse('{"ambient": {"dim": 2},\n  "states": {,}}')


def test_collects_several_diagnostics():
    with pytest.raises(ParseError) as exc:
        parse(doc(algebras={"a": "nonsense", "b": {"legs": [0]}}))
    assert len(exc.value.diagnostics) == 2


def test_bad_ambient():
    with pytest.raises(ParseError, match="ambient"):
        parse('{"ambient": {"dim": 0}}')


def test_tolerance_overrides():
    d = parse(doc(tolerances={"eq_tol": 1e-6}))
    assert d.tolerances.eq_tol == 1e-6
    d = parse(doc(tolerances={"eq_tol": 1e-6}), TolerancePolicy(eq_tol=1e-4))
    assert d.tolerances.eq_tol == 1e-4


def test_algebra_forms():
    d = parse(json.dumps({
        "ambient": {"legs": [2, 2]},
        "algebras": {"f": "full", "b": {"builtin": "diagonal"}, "l": {"legs": [1]},
                     "g": {"generators": [np.diag([1, 0, 0, 0]).tolist()]}},
    }))
    assert [d.algebra(k).dim for k in "fblg"] == [16, 4, 4, 2]
    with pytest.raises(ParseError):
        d.algebra("missing")


def test_complex_pairs():
    d = parse(doc(states={"y": {"vector": [[0.6, 0], [0, 0.8]]}}))
    assert np.allclose(d.state("y").vector, [0.6, 0.8j])


matrices = st.integers(1, 4).flatmap(lambda n: st.lists(
    st.tuples(st.floats(allow_nan=False, allow_infinity=False, width=64),
              st.floats(allow_nan=False, allow_infinity=False, width=64)),
    min_size=n * n, max_size=n * n).map(lambda xs: np.array([complex(a, b) for a, b in xs]).reshape(n, n)))


@given(matrices)
def test_matrix_round_trip(m):
    text = json.dumps(encode_matrix(m))
    errors = []
    back = decode_matrix(json.loads(text), "m", errors)
    assert not errors
    assert np.array_equal(back, m)


@given(st.integers(0, 2**32 - 1))
def test_density_round_trip_through_document(seed):
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    d = a @ a.conj().T
    d /= np.trace(d).real
    d = (d + d.conj().T) / 2  # exactly Hermitian, so loading leaves it untouched
    text = json.dumps({"ambient": {"dim": 3}, "states": {"s": {"density": encode_matrix(d)}}})
    assert np.array_equal(parse(text).state("s").density, d)


def test_emit_empty_report():
    report = {"command": "x", "tolerances": {}, "results": {}, "claims": [],
              "summary": {"passed": 0, "failed": 0, "total": 0}}
    assert json.loads(emit(report, "json")) == report
    assert "0 claims" in render_text(report)


def test_emit_is_deterministic():
    report = {"b": 1.0 / 3, "a": [0.1, 0.2]}
    assert emit(report) == emit(dict(reversed(list(report.items()))))


def test_emit_rejects_unknown_format():
    with pytest.raises(ValueError):
        emit({}, "xml")
