"""Render command reports. JSON is canonical: sorted keys, two space indent, a
trailing newline. Markdown is for reading; lists of named identities and lists of
rows become tables.
"""

from __future__ import annotations

import typing as t

from .document import dumps

FORMATS = ("json", "md")


def render_json(report: t.Mapping[str, t.Any]) -> str:
    return dumps(report)


def render(report: t.Mapping[str, t.Any], format: str = "json") -> str:
    if format == "md":
        return render_markdown(report)

    return render_json(report)


def render_markdown(report: t.Mapping[str, t.Any]) -> str:
    lines = [f"# {report['command']}: {report['status']}", ""]
    _section(lines, report, level=2, skip={"command", "status"})
    return "\n".join(lines).rstrip() + "\n"


def _cell(value: t.Any) -> str:
    if isinstance(value, bool):
        return "yes" if value else "no"

    if value is None:
        return ""

    if isinstance(value, (dict, list)):
        return f"`{dumps(value).strip()}`".replace("\n", " ")

    return str(value).replace("|", "\\|")


def _is_rows(value: t.Any) -> bool:
    return (
        isinstance(value, list)
        and bool(value)
        and all(isinstance(row, dict) for row in value)
        and all(not isinstance(v, list) for row in value for v in row.values())
    )


def _table(lines: list[str], rows: list[dict[str, t.Any]]) -> None:
    columns: list[str] = []

    for row in rows:
        columns.extend(c for c in row if c not in columns)

    lines.append("| " + " | ".join(columns) + " |")
    lines.append("|" + "---|" * len(columns))

    for row in rows:
        lines.append("| " + " | ".join(_cell(row.get(c)) for c in columns) + " |")

    lines.append("")


def _section(
    lines: list[str],
    data: t.Mapping[str, t.Any],
    level: int,
    skip: t.Container[str] = (),
) -> None:
    scalars = [
        (k, v) for k, v in sorted(data.items()) if k not in skip and not _nested(v)
    ]

    for key, value in scalars:
        lines.append(f"- **{key}**: {_cell(value)}")

    if scalars:
        lines.append("")

    for key, value in sorted(data.items()):
        if key in skip or not _nested(value):
            continue

        lines.append(f"{'#' * level} {key}")
        lines.append("")

        if _is_rows(value):
            _table(lines, value)
        elif isinstance(value, list):
            for i, item in enumerate(value):
                lines.append(f"{'#' * (level + 1)} {key} {i}")
                lines.append("")

                if isinstance(item, dict):
                    _section(lines, item, level + 2)
                else:
                    lines.extend([f"- {_cell(item)}", ""])
        elif all(not _nested(v) for v in value.values()):
            _table(lines, [{"key": k, "value": v} for k, v in value.items()])
        else:
            _section(lines, value, level + 1)


def _nested(value: t.Any) -> bool:
    if isinstance(value, list):
        return any(isinstance(v, (dict, list)) for v in value)

    return isinstance(value, dict) and bool(value)
