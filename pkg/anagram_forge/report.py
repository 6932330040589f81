# Copyright 2021 Canonical Ltd.
# See LICENSE file for licensing details.
"""
Module in charge of rendering reports

Every command builds one JSON-compatible mapping; text mode lays it out as
plain tables, json mode dumps it with stable key order.
"""
from typing import Any, Dict, List, Sequence

from anagram_forge.files import dump_json
from tabulate import tabulate


def _cell(value: Any) -> str:
    if isinstance(value, bool):
        return "yes" if value else "no"
    if value is None:
        return "-"
    if isinstance(value, (list, tuple)):
        if all(not isinstance(v, (dict, list, tuple)) for v in value):
            return " ".join(str(v) for v in value)
        return dump_json(value).replace("\n", "")
    if isinstance(value, dict):
        return ", ".join("{}={}".format(k, _cell(v)) for k, v in sorted(value.items()))
    return str(value)


def table(rows: Sequence[Sequence[Any]], headers: Sequence[str]) -> str:
    return tabulate(
        [[_cell(v) for v in row] for row in rows],
        headers=list(headers),
        tablefmt="plain",
        numalign="left",
    )


def render_text(content: Dict[str, Any], tables: Dict[str, List[Dict[str, Any]]] = None) -> str:
    """
    Key/value table of the scalar entries, followed by one table per entry of tables

    Args:
        content: Report mapping
        tables: Row lists rendered as separate tables, keyed by title
    """
    lines = [table([[k, v] for k, v in sorted(content.items())], ["Field", "Value"])]
    for title, rows in (tables or {}).items():
        if not rows:
            continue
        headers = list(rows[0])
        lines.extend(["", title, table([[row.get(h) for h in headers] for row in rows], headers)])
    return "\n".join(lines)


def render(
    content: Dict[str, Any], output_format: str, tables: Dict[str, List[Dict[str, Any]]] = None
) -> str:
    if output_format == "json":
        return dump_json(content)
    return render_text(content, tables)
