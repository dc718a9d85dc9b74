# tests/test_codec.py
import json
from fractions import Fraction

import pytest

from backend.errors import InputError
from backend.models.linalg import Matrix, Scalar
from backend.services.codec import Decoded, dumps, load_problem, parse_int, parse_scalar
from backend.services.commands import run


def decode(doc):
    return Decoded(load_problem(doc))


def _doc(**extra):
    doc = {"schema_version": 1, "dim": 2}
    doc.update(extra)
    return doc


# --------------- escalares -----------------
@pytest.mark.parametrize(
    "text, value",
    [
        ("2+i", Scalar(2, 1)),
        ("3i", Scalar(0, 3)),
        ("-1/2i", Scalar(0, Fraction(-1, 2))),
        ("1/3-2/5i", Scalar(Fraction(1, 3), Fraction(-2, 5))),
        (" 4 ", Scalar(4)),
        (7, Scalar(7)),
    ],
)
def test_parse_scalar_grammar(text, value):
    assert parse_scalar(text) == value


@pytest.mark.parametrize("text", ["abc", "1+", "i2", "1.5", 1.5, True, None])
def test_parse_scalar_rejects_malformed(text):
    with pytest.raises(InputError) as err:
        parse_scalar(text, "$.matrices.N[0][1]")
    assert err.value.details["position"] == "$.matrices.N[0][1]"


def test_parse_scalar_zero_denominator():
    with pytest.raises(InputError) as err:
        parse_scalar("1/0")
    assert "denominador" in err.value.message


# --------------- documento -----------------
def test_invalid_json_reports_position():
    with pytest.raises(InputError) as err:
        load_problem("{")
    assert err.value.details["position"].startswith("line 1")


def test_unsupported_schema_version():
    with pytest.raises(InputError) as err:
        load_problem(_doc(schema_version=2))
    assert err.value.details["position"] == "$.schema_version"


def test_missing_dim_is_located():
    with pytest.raises(InputError) as err:
        load_problem({"schema_version": 1})
    assert err.value.details["position"] == "$.dim"


def test_document_accepts_bytes():
    problem = load_problem(json.dumps(_doc(name="x")).encode())
    assert problem.name == "x" and problem.dim == 2


def test_missing_object_has_json_position():
    dec = decode(_doc())
    with pytest.raises(InputError) as err:
        dec.matrix("X")
    assert err.value.details["position"] == "$.matrices.X"
    with pytest.raises(InputError) as err:
        dec.orbit()
    assert err.value.details["position"] == "$.orbit"


# --------------- matrizes e filtrações -----------------
def test_matrix_maps_form():
    dec = decode(_doc(matrices={"N": {"maps": {"e0": ["0", "1"]}}, "M": [["0", "0"], ["1", "0"]]}))
    assert dec.matrix("N") == dec.matrix("M") == Matrix([[0, 0], [1, 0]])


def test_matrix_bad_basis_label():
    dec = decode(_doc(matrices={"N": {"maps": {"e5": ["0", "1"]}}}))
    with pytest.raises(InputError) as err:
        dec.matrix("N")
    assert err.value.details["position"] == "$.matrices.N.maps"


def test_matrix_wrong_row_length():
    dec = decode(_doc(matrices={"N": [["0", "0"], ["1"]]}))
    with pytest.raises(InputError) as err:
        dec.matrix("N")
    assert err.value.details["position"] == "$.matrices.N[1]"


def test_filtration_kind_is_checked():
    dec = decode(_doc(filtrations={"W": {"kind": "sideways", "steps": {"0": [["1", "0"]]}}}))
    with pytest.raises(InputError) as err:
        dec.filtration("W")
    assert err.value.details["position"] == "$.filtrations.W.kind"


def test_filtration_direction_is_checked(fixture_doc):
    dec = decode(fixture_doc("fix1"))
    with pytest.raises(InputError):
        dec.increasing("F")
    assert dec.decreasing("F").step(0).dim == 1


def test_dumps_is_valid_json():
    text = dumps({"result": {"x": ["1/2", "i"]}}, pretty=True)
    assert json.loads(text) == {"result": {"x": ["1/2", "i"]}}


# --------------- valores malformados viram erro de entrada -----------------
@pytest.mark.parametrize("value, expected", [(3, 3), ("-1", -1), (" 2 ", 2)])
def test_parse_int_accepts_integers(value, expected):
    assert parse_int(value, "$.params.k") == expected


@pytest.mark.parametrize("value", ["abc", "1.5", 1.5, True, None, [1]])
def test_parse_int_rejects_other_values(value):
    with pytest.raises(InputError) as err:
        parse_int(value, "$.params.k")
    assert err.value.details["position"] == "$.params.k"


def test_maps_must_be_an_object():
    dec = decode(_doc(matrices={"N": {"maps": [["0", "1"], ["0", "0"]]}}))
    with pytest.raises(InputError) as err:
        dec.matrix("N")
    assert err.value.details["position"] == "$.matrices.N.maps"


def test_eigenspace_keys_must_be_integers():
    dec = decode(_doc(gradings={"Y": {"eigenspaces": {"x": [["1", "0"]], "0": [["0", "1"]]}}}))
    with pytest.raises(InputError) as err:
        dec.grading("Y")
    assert err.value.details["position"] == "$.gradings.Y.eigenspaces.x"


def test_eigenspaces_keep_integer_keys():
    dec = decode(_doc(gradings={"Y": {"eigenspaces": {"1": [["1", "0"]], "-1": [["0", "1"]]}}}))
    assert sorted(dec.grading("Y").spectrum) == [-1, 1]


def test_orbit_form_keys_must_be_integers(fixture_doc):
    doc = fixture_doc("fix3")
    doc["orbit"]["forms"] = {"w": [["1"]]}
    with pytest.raises(InputError) as err:
        decode(doc).orbit()
    assert err.value.details["position"] == "$.orbit.forms.w"


def test_typed_params():
    dec = decode(_doc(params={"depth": "3", "weights": [1, "2"], "N": ["x"]}))
    assert dec.int_param("depth") == 3
    assert dec.int_param("box", 1) == 1
    assert dec.ints_param("weights") == [1, 2]
    assert dec.ints_param("missing") is None
    with pytest.raises(InputError) as err:
        dec.name_param("N", "N")
    assert err.value.details["position"] == "$.params.N"


_NILPOTENT = [["0", "0"], ["1", "0"]]
_PURE_W = {"W": {"kind": "increasing", "steps": {"0": [["1", "0"], ["0", "1"]]}}}


@pytest.mark.parametrize(
    "group, action, doc, position",
    [
        ("filt", "monodromy", _doc(matrices={"N": _NILPOTENT}, params={"center": "abc"}), "$.params.center"),
        ("filt", "monodromy", _doc(matrices={"N": {"maps": [["0", "1"]]}}), "$.matrices.N.maps"),
        ("filt", "monodromy", _doc(matrices={"N": _NILPOTENT}, params={"N": 5}), "$.params.N"),
        ("sl2", "uniqueness", _doc(matrices={"N": _NILPOTENT}, filtrations=_PURE_W, params={"box": "x"}), "$.params.box"),
    ],
)
def test_run_reports_malformed_values_as_input_errors(group, action, doc, position):
    out, code = run(group, action, doc)
    assert code == 2
    assert out["status"] == "error"
    assert out["error"]["details"]["position"] == position


def test_run_rejects_non_integer_probe_weights(fixture_doc):
    out, code = run("orbit", "probe", fixture_doc("fix3_twist", weights=["x"], depth=2))
    assert code == 2
    assert out["error"]["details"]["position"] == "$.params.weights[0]"


def test_run_rejects_malformed_samples(fixture_doc):
    out, code = run("zloc", "limit", fixture_doc("fix7", samples=3))
    assert code == 2
    assert out["error"]["details"]["position"] == "$.params.samples"
