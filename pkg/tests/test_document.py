from __future__ import annotations

import typing as t

import pytest

from dgmanifold import examples
from dgmanifold.config import Settings
from dgmanifold.document import dumps
from dgmanifold.document import parse
from dgmanifold.errors import DocumentError


def _errors(data: t.Any) -> dict[str, str]:
    with pytest.raises(DocumentError) as info:
        parse(data)

    return info.value.errors


def _bundle(**kwargs: t.Any) -> dict[str, t.Any]:
    return {"base": {"dimension": 0}, "fibre": [["e", 1]], **kwargs}


def test_names() -> None:
    assert examples.names() == [
        "affine-curvature",
        "broken-curvature",
        "connection-pair",
        "curvature-line",
        "linear-pair",
        "non-submersive",
        "projection",
        "quadratic",
        "quadratic-fibration",
        "zero-line",
    ]


def test_missing_example() -> None:
    with pytest.raises(KeyError):
        examples.load("nothing")


@pytest.mark.parametrize("name", examples.names())
def test_canonical_form_is_stable(name: str) -> None:
    """Parsing the canonical form gives it back unchanged."""
    first = examples.load(name)
    second = parse(first.dump())
    assert second.dump() == first.dump()
    assert second.dumps() == first.dumps()


def test_fibre_sorted() -> None:
    document = parse(
        {
            "version": 1,
            "bundle": {"fibre": [["c", 3], ["b", 1], ["a", 1]]},
        }
    )
    assert document.dump()["bundle"] == {
        "base": {"dimension": 0},
        "amplitude": 3,
        "fibre": [["a", 1], ["b", 1], ["c", 3]],
        "lambda": {},
    }
    assert document.bundle.labels == ["a", "b", "c"]


def test_zero_entries_dropped() -> None:
    bundle = _bundle(**{"lambda": {"0": {"": {"e": "0"}}}})
    document = parse({"version": 1, "bundle": bundle})
    assert document.dump()["bundle"]["lambda"] == {}


def test_dumps() -> None:
    assert dumps({"b": 1, "a": [1]}) == '{\n  "a": [\n    1\n  ],\n  "b": 1\n}\n'


def test_top_level_errors() -> None:
    errors = _errors({"version": 2, "command": "draw", "extra": 1})
    assert errors == {
        "$.extra": "unknown field",
        "$.version": "must be 1",
        "$.command": "unknown command 'draw'",
        "$.bundle": "required",
    }
    assert _errors([]) == {"$": "must be an object"}


@pytest.mark.parametrize(
    ("fibre", "path", "message"),
    [
        ([["x1", 1]], "$.bundle.fibre[0]", "label 'x1' is not allowed"),
        ([["e", 0]], "$.bundle.fibre[0]", "degrees must be at least 1"),
        ([["e", 1], ["e", 2]], "$.bundle.fibre[1]", "duplicate label 'e'"),
        ([["e"]], "$.bundle.fibre[0]", "must be a [label, degree] pair"),
    ],
)
def test_fibre_errors(fibre: list[t.Any], path: str, message: str) -> None:
    errors = _errors({"version": 1, "bundle": {"fibre": fibre}})
    assert errors[path] == message


def test_amplitude_bound() -> None:
    bundle = {"amplitude": 1, "fibre": [["e", 2]]}
    errors = _errors({"version": 1, "bundle": bundle})
    assert errors == {"$.bundle.fibre": "degrees must be at most 1"}


def test_lambda_errors() -> None:
    errors = _errors(
        {"version": 1, "bundle": _bundle(**{"lambda": {"1": {"e,e": {"e": "1"}}}})}
    )
    assert errors == {"$.bundle.lambda.1.e,e": "expected 1 known input labels"}


def test_morphism_needs_target() -> None:
    errors = _errors({"version": 1, "bundle": _bundle(), "morphism": {}})
    assert errors == {"$.morphism": "needs a target bundle"}


def test_params() -> None:
    errors = _errors(
        {
            "version": 1,
            "bundle": _bundle(),
            "params": {"window": [1], "truncate_order": 0, "complex": "spheres"},
        }
    )
    assert errors["$.params.window"] == "must be [t0, t1]"
    assert errors["$.params.truncate_order"] == "must be an integer of at least 1"
    assert errors["$.params.complex"].startswith("must be one of functions")


def test_settings_and_window() -> None:
    document = parse(
        {
            "version": 1,
            "bundle": _bundle(),
            "params": {"truncate_arity": 4, "window": [-2, 2]},
        }
    )
    base = Settings(truncate_arity=1, truncate_order=3, todd_order=2)
    assert document.settings(base) == Settings(
        truncate_arity=4, truncate_order=3, todd_order=2
    )
    assert document.settings(base, truncate_arity=None, todd_order=5).todd_order == 5
    assert document.window() == (-2, 2)
    assert document.window([0, 1]) == (0, 1)
    assert parse({"version": 1, "bundle": _bundle()}).window() is None


def test_affine_connection() -> None:
    document = examples.load("connection-pair")
    vector_fields = document.vector_fields()
    connection = document.affine_connection(
        "other_connection", vector_fields=vector_fields
    )
    a = document.bundle.algebra.gen("a")
    assert connection.symbol("∂a", "∂b").coeffs == {"∂c": a}
    assert not document.affine_connection(vector_fields=vector_fields).table


def test_affine_connection_degree() -> None:
    data = examples.load_data("quadratic")
    data["connection"] = {"affine": {"∂a,∂b": {"∂c": {"": "1"}}}}
    errors = _errors(data)
    assert "does not have degree" in errors["$.connection"]


def test_points() -> None:
    document = examples.load("affine-curvature")
    assert document.dump()["points"] == [["0"]]
    assert document.points() == [(0,)]
    errors = _errors(examples.load_data("affine-curvature") | {"points": [["0", "1"]]})
    assert errors == {"$.points[0]": "must have 1 coordinates"}
