from __future__ import annotations

import argparse
import json
import typing as t
from pathlib import Path

import pytest

from dgmanifold import examples
from dgmanifold.cli import main
from dgmanifold.cli import parse_window


def _write(tmp_path: Path, data: t.Any, name: str = "document.json") -> str:
    path = tmp_path / name
    path.write_text(json.dumps(data), encoding="utf-8")
    return str(path)


@pytest.mark.parametrize(
    ("command", "name", "code"),
    [
        ("validate", "quadratic", 0),
        ("validate", "broken-curvature", 3),
        ("ladder", "projection", 0),
        ("classify", "non-submersive", 3),
    ],
)
def test_exit_status(
    tmp_path: Path,
    capsys: pytest.CaptureFixture[str],
    command: str,
    name: str,
    code: int,
) -> None:
    path = _write(tmp_path, examples.load_data(name))
    assert main([command, path]) == code
    report = json.loads(capsys.readouterr().out)
    assert report["command"] == command


def test_inconclusive(tmp_path: Path) -> None:
    path = _write(tmp_path, examples.load_data("zero-line"))
    assert main(["hochschild-window", path, "--window", "5..8"]) == 4


def test_unreadable(tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
    path = tmp_path / "broken.json"
    path.write_text("{", encoding="utf-8")
    assert main(["validate", str(path)]) == 2
    assert capsys.readouterr().err.startswith("[error]")
    assert main(["validate", str(tmp_path / "missing.json")]) == 2


def test_invalid_document(tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
    path = _write(tmp_path, {"version": 1})
    assert main(["validate", path]) == 2
    assert "$.bundle" in capsys.readouterr().err


def test_markdown(tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
    path = _write(tmp_path, examples.load_data("quadratic"))
    assert main(["validate", path, "--report-format", "md"]) == 0
    assert capsys.readouterr().out.startswith("# validate: pass\n")


def test_output(tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
    path = _write(tmp_path, examples.load_data("quadratic"))
    output = tmp_path / "report.json"
    assert main(["atiyah", path, "--output", str(output)]) == 0
    assert capsys.readouterr().out == ""
    text = output.read_text(encoding="utf-8")
    assert text.endswith("}\n")
    assert json.loads(text)["status"] == "pass"


def test_parse_window() -> None:
    assert parse_window("-2..3") == [-2, 3]

    with pytest.raises(argparse.ArgumentTypeError, match="t0..t1"):
        parse_window("3")
