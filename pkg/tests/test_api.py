from __future__ import annotations

import typing as t

import pytest

from dgmanifold import examples
from dgmanifold.api import field_name
from dgmanifold.commands import COMMANDS

from .conftest import Execute

QUERY = (
    "query($document: JSON!, $window: [Int!], $truncate_order: Int) {"
    " %s(document: $document, window: $window, truncate_order: $truncate_order) }"
)


def _run(
    execute: Execute, command: str, name: str, **variables: t.Any
) -> dict[str, t.Any]:
    field = field_name(command)
    result = execute.expect_data(
        QUERY % field,
        variables={"document": examples.load_data(name), **variables},
    )
    return result[field]


def test_fields() -> None:
    """Every command has a snake case query field."""
    assert [field_name(c) for c in COMMANDS] == [
        "validate",
        "tangent_complex",
        "classify",
        "cohomology",
        "kernel_acyclicity",
        "ladder",
        "atiyah",
        "compare_classes",
        "todd",
        "invariance",
        "hkr_check",
        "hochschild_window",
    ]


@pytest.mark.parametrize(
    ("command", "name", "status"),
    [
        ("validate", "quadratic", "pass"),
        ("validate", "broken-curvature", "fail"),
        ("tangent-complex", "quadratic", "pass"),
        ("classify", "non-submersive", "fail"),
        ("cohomology", "linear-pair", "pass"),
        ("kernel-acyclicity", "projection", "pass"),
        ("ladder", "projection", "pass"),
        ("atiyah", "quadratic", "pass"),
        ("compare-classes", "connection-pair", "pass"),
        ("todd", "quadratic", "pass"),
        ("invariance", "quadratic-fibration", "pass"),
        ("hkr-check", "zero-line", "pass"),
    ],
)
def test_status(execute: Execute, command: str, name: str, status: str) -> None:
    report = _run(execute, command, name)
    assert report["command"] == command
    assert report["status"] == status


def test_validate_names_relation(execute: Execute) -> None:
    report = _run(execute, "validate", "broken-curvature")
    failed = [r["name"] for r in report["bundle"] if not r["passed"]]
    assert failed == ["λ₁(λ₀)=0"]


def test_cohomology(execute: Execute) -> None:
    """Only the constants survive for an isomorphism ``lambda_1``."""
    report = _run(execute, "cohomology", "linear-pair", window=[-2, 1])
    assert report["cohomology"] == {"-2": 0, "-1": 0, "0": 1, "1": 0}
    assert not report["acyclic"]


def test_atiyah(execute: Execute) -> None:
    report = _run(execute, "atiyah", "quadratic")
    assert not report["is_zero"]
    assert report["cocycle"]
    assert all(i["passed"] for i in report["identities"])


def test_compare_classes(execute: Execute) -> None:
    report = _run(execute, "compare-classes", "connection-pair")
    assert report["cohomologous"]
    assert report["degree"] == 1
    assert report["witness"] is not None


def test_todd(execute: Execute) -> None:
    report = _run(execute, "todd", "quadratic")
    assert report["trivial"]
    assert report["order"] == 3
    assert report["bernoulli"] == ["1", "-1/2", "1/6", "0"]
    assert report["characteristic"]["2"]["factor"] == "1/2"
    assert report["vanishing"] == ["s1", "s2", "s3", "Td1", "Td2", "Td3"]
    assert list(report["root"]["0"]) == ["1"]
    assert [report["root"][j] for j in "123"] == [{}, {}, {}]
    assert report["form_degrees"] == {}


def test_hochschild_window(execute: Execute) -> None:
    """The document asks for arity 3, so degrees up to 6 are stable."""
    report = _run(execute, "hochschild-window", "zero-line", window=[-1, 2])
    assert report["status"] == "pass"
    assert report["arity"] == 3
    assert [c["rank"] for c in report["cells"]] == [1, 1, 1, 1]


def test_hochschild_inconclusive(execute: Execute) -> None:
    report = _run(execute, "hochschild-window", "zero-line", window=[5, 8])
    assert report["status"] == "inconclusive"
    assert report["inconclusive"] == [7, 8]


def test_engine_error_is_failure(execute: Execute) -> None:
    """Comparing classes over an affine base reports the error."""
    report = _run(execute, "compare-classes", "affine-curvature")
    assert report["status"] == "fail"
    assert report["error"].startswith("degree component not finitely materializable")


def test_invalid_document(execute: Execute) -> None:
    document = examples.load_data("quadratic") | {"version": 2}
    result = execute.expect_validation_error(
        QUERY % "validate", variables={"document": document}
    )
    assert result["document"][0] == {"$.version": "must be 1"}


def test_document_for_other_command(execute: Execute) -> None:
    document = examples.load_data("quadratic") | {"command": "ladder"}
    result = execute.expect_validation_error(
        QUERY % "validate", variables={"document": document}
    )
    assert result["document"][0] == {"$.command": "document is for 'ladder'"}


def test_bad_window(execute: Execute) -> None:
    result = execute.expect_validation_error(
        QUERY % "cohomology",
        variables={"document": examples.load_data("quadratic"), "window": [3, 1]},
    )
    assert result["window"][0] == "The lower end must not be greater than the upper."


def test_truncation_bound(execute: Execute) -> None:
    result = execute.expect_validation_error(
        QUERY % "hochschild_window",
        variables={"document": examples.load_data("zero-line"), "truncate_order": 0},
    )
    assert result["truncate_order"][0] == "Must be at least 1."
