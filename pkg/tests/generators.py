"""Seeded random builders for charts, filters and whole documents.

Everything here produces plain JSON-compatible values (dicts, lists) so a
test can serialize, mutate or parse them freely. Every generated document is
meant to be valid; tests assert that rather than assume it.
"""

from __future__ import annotations

import datetime as dt
import json
import random
from typing import Any

CATEGORIES = ["A", "B", "C", "D", "E", "F", "G", "H", "north", "south", "it's", 'q"x']
GROUPS = ["g1", "g2", "g3"]
SHAPES = ["circle", "cross", "square", "triangle"]
COLORS = ["red", "#d62728", "steelblue", "#333333"]

X_KIND_BY_TYPE = {
    "bar": ("nominal",),
    "grouped_bar": ("nominal",),
    "line": ("temporal", "quantitative"),
    "grouped_line": ("temporal", "quantitative"),
    "scatter": ("quantitative",),
    "grouped_scatter": ("quantitative",),
    "pie": ("nominal",),
}


def _number(rng: random.Random, lo: float, hi: float) -> int | float:
    if rng.random() < 0.5:
        return rng.randint(int(lo), int(hi))
    return round(rng.uniform(lo, hi), 2)


def _date(rng: random.Random) -> str:
    d = dt.date(2020, 1, 1) + dt.timedelta(days=rng.randint(0, 1500))
    return d.strftime("%Y-%m") if rng.random() < 0.3 else d.isoformat()


def random_x_values(rng: random.Random, kind: str, n: int, distinct: bool = False) -> list:
    if kind == "nominal":
        if distinct:
            return rng.sample(CATEGORIES, n)
        return [rng.choice(CATEGORIES) for _ in range(n)]
    if kind == "temporal":
        if distinct:
            days = rng.sample(range(0, 1500 + 4 * n), n)
            return [(dt.date(2020, 1, 1) + dt.timedelta(days=d)).isoformat() for d in days]
        return [_date(rng) for _ in range(n)]
    if distinct:
        return rng.sample(range(-50, 200 + 4 * n), n)
    return [_number(rng, -50, 200) for _ in range(n)]


def random_chart(rng: random.Random, chart_type: str | None = None, x_kind: str | None = None, n: int | None = None) -> dict:
    """A valid chart. Grouped charts give every group at least two distinct x values."""
    chart_type = chart_type or rng.choice(list(X_KIND_BY_TYPE))
    x_kind = x_kind or rng.choice(X_KIND_BY_TYPE[chart_type])
    grouped = chart_type.startswith("grouped_")
    chart: dict[str, Any] = {"title": f"chart {rng.randint(0, 999)}", "type": chart_type, "x_name": "X col", "y_name": "Value"}
    if chart_type == "pie":
        k = n or rng.randint(2, 6)
        chart["x_data"] = rng.sample(CATEGORIES, min(k, len(CATEGORIES)))
        chart["y_data"] = [_number(rng, 0, 100) for _ in chart["x_data"]]
        return chart
    if grouped:
        groups = rng.sample(GROUPS, rng.randint(2, 3))
        per = max(2, (n or rng.randint(4, 24)) // len(groups))
        xs, gs = [], []
        for g in groups:
            distinct = x_kind != "nominal" or per <= len(CATEGORIES)
            xs.extend(random_x_values(rng, x_kind, per, distinct=distinct))
            gs.extend([g] * per)
        chart["x_data"], chart["group_name"], chart["group_data"] = xs, "Team", gs
    else:
        k = n or rng.randint(2, 24)
        distinct = x_kind != "nominal" or k <= len(CATEGORIES)
        chart["x_data"] = random_x_values(rng, x_kind, k, distinct=distinct)
    chart["y_data"] = [_number(rng, -20, 300) for _ in chart["x_data"]]
    return chart


# ----------------------------------------------------------------------------
# Filters, kept as small trees of tuples so tests can interpret them naively
# ----------------------------------------------------------------------------


def column_kinds(chart: dict) -> dict[str, str]:
    kinds = {"y": "quantitative", "x": classify(chart["x_data"])}
    if chart.get("group_data") is not None:
        kinds["group"] = "nominal"
    return kinds


def classify(values: list) -> str:
    if all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in values):
        return "quantitative"
    if all(isinstance(v, str) and _iso_days(v) is not None for v in values):
        return "temporal"
    return "nominal"


def _iso_days(v: str) -> int | None:
    """Independent date reading: full ISO dates plus year-month."""
    text = v + "-01" if len(v) == 7 else v
    if len(text) != 10:
        return None
    try:
        return (dt.date.fromisoformat(text) - dt.date(1970, 1, 1)).days
    except ValueError:
        return None


def _field_name(rng: random.Random, chart: dict, column: str) -> str:
    aliases = {"x": chart.get("x_name"), "y": chart.get("y_name"), "group": chart.get("group_name")}
    alias = aliases.get(column)
    if alias and rng.random() < 0.25:
        return alias
    return column


def random_literal(rng: random.Random, chart: dict, column: str, kind: str):
    data = {"x": chart["x_data"], "y": chart["y_data"], "group": chart.get("group_data") or []}[column]
    if data and rng.random() < 0.6:
        return rng.choice(data)
    if kind == "quantitative":
        return _number(rng, -60, 320)
    if kind == "temporal":
        return _date(rng)
    return rng.choice(CATEGORIES + GROUPS)


def random_filter(rng: random.Random, chart: dict, depth: int = 3) -> tuple:
    """Tree nodes: ("cmp", field, op, literal) | ("and", [..]) | ("or", [..]) | ("not", e) | ("true",)."""
    kinds = column_kinds(chart)
    roll = rng.random()
    if depth <= 0 or roll < 0.4:
        if rng.random() < 0.05:
            return ("true",)
        column = rng.choice(sorted(kinds))
        kind = kinds[column]
        ops = ["==", "!="] if kind == "nominal" else ["==", "!=", "<", "<=", ">", ">="]
        return ("cmp", _field_name(rng, chart, column), rng.choice(ops), random_literal(rng, chart, column, kind))
    if roll < 0.6:
        return ("not", random_filter(rng, chart, depth - 1))
    op = "and" if roll < 0.8 else "or"
    return (op, [random_filter(rng, chart, depth - 1) for _ in range(rng.randint(2, 3))])


def filter_source(tree: tuple) -> str:
    """Render a tuple tree in the filter syntax, fully parenthesized."""
    tag = tree[0]
    if tag == "true":
        return "true"
    if tag == "cmp":
        _, name, op, lit = tree
        field = name if name.isidentifier() and name not in ("and", "or", "not", "true") else f"`{name}`"
        return f"{field} {op} {json.dumps(lit)}"
    if tag == "not":
        return f"not ({filter_source(tree[1])})"
    joiner = f" {tag} "
    return joiner.join(f"({filter_source(t)})" for t in tree[1])


def naive_eval(tree: tuple, chart: dict) -> list[int]:
    """Row indices satisfying ``tree``, interpreting one row at a time."""
    aliases = {"x": "x", "y": "y", "group": "group", chart["x_name"]: "x", chart["y_name"]: "y"}
    if chart.get("group_name"):
        aliases[chart["group_name"]] = "group"
    x_kind = classify(chart["x_data"])

    def value(row: int, column: str):
        if column == "x":
            v = chart["x_data"][row]
            return _iso_days(v) if x_kind == "temporal" else v
        if column == "y":
            return chart["y_data"][row]
        return chart["group_data"][row]

    def holds(t, row) -> bool:
        tag = t[0]
        if tag == "true":
            return True
        if tag == "not":
            return not holds(t[1], row)
        if tag == "and":
            return all(holds(s, row) for s in t[1])
        if tag == "or":
            return any(holds(s, row) for s in t[1])
        _, name, op, lit = t
        column = aliases[name]
        left = value(row, column)
        right = _iso_days(lit) if column == "x" and x_kind == "temporal" else lit
        return {
            "==": left == right,
            "!=": left != right,
            "<": left < right,
            "<=": left <= right,
            ">": left > right,
            ">=": left >= right,
        }[op]

    return [i for i in range(len(chart["y_data"])) if holds(tree, i)]


# ----------------------------------------------------------------------------
# Annotations and documents
# ----------------------------------------------------------------------------


def _marker(rng: random.Random, *groups: str) -> dict:
    out: dict[str, Any] = {}
    if rng.random() < 0.4:
        return out
    for g in groups:
        if rng.random() < 0.5:
            continue
        if g == "line":
            out["line"] = {"size": rng.choice([1, 1.5, 2]), "dashed": rng.random() < 0.5, "color": rng.choice(COLORS)}
        elif g == "text":
            out["text"] = {"fontSize": rng.choice([10, 12, 14]), "anchor": rng.choice(["start", "middle", "end"]), "dy": -4}
        elif g == "symbol":
            out["symbol"] = {"shape": rng.choice(SHAPES), "size": rng.choice([40, 64, 90]), "color": rng.choice(COLORS)}
        elif g == "rect":
            out["rect"] = {"fill": rng.choice(COLORS), "fillOpacity": rng.choice([0.1, 0.2, 0.5])}
    return out


def _x_pair(rng: random.Random, chart: dict) -> tuple:
    xs = chart["x_data"]
    a, b = rng.choice(xs), rng.choice(xs)
    return a, b


def _op(name: str, target: dict, marker: dict | None = None) -> dict:
    return {"name": name, "target": target, "marker": marker or {}}


def _data_items(rng: random.Random, chart: dict) -> dict:
    return {"type": "data_items", "filter": filter_source(random_filter(rng, chart, depth=2))}


def random_annotation(rng: random.Random, chart: dict, ann_id: str, refs: tuple[str, ...] = ()) -> dict:
    """One valid annotation; ``refs`` become add_text notes attached to those ids."""
    kind = classify(chart["x_data"])
    ann: dict[str, Any]
    if refs:
        ann = {
            "task": {"type": "description"},
            "data": {"source": "external", "values": [{"type": "text", "content": f"about {', '.join(refs)}"}]},
            "operations": [_op("add_text", {"type": "annotation", "ref_id": r}, _marker(rng, "text")) for r in refs],
        }
    elif chart["type"] == "pie":
        name = rng.choice(["set_color", "set_opacity"])
        marker = _marker(rng, "rect") if name == "set_opacity" else _marker(rng, "symbol")
        ann = {
            "task": {"type": "highlight"},
            "data": {"source": "internal", "values": []},
            "operations": [_op(name, _data_items(rng, chart), marker)],
        }
    else:
        choices = [
            "highlight", "reference_y", "box", "shade", "note", "symbol", "labels", "grid", "mean",
        ]
        if kind in ("quantitative", "temporal"):
            choices.append("trend")
        pick = rng.choice(choices)
        ext_text = {"source": "external", "values": [{"type": "text", "content": f"note {ann_id}"}]}
        if pick == "highlight":
            ops = [_op("set_color", _data_items(rng, chart), _marker(rng, "symbol"))]
            if rng.random() < 0.5:
                ops.append(_op("set_opacity", ops[0]["target"], _marker(rng, "rect")))
            ann = {"task": {"type": "highlight"}, "data": {"source": "internal", "values": []}, "operations": ops}
        elif pick == "reference_y":
            target = {"type": "coordinate", "y": _number(rng, 0, 250)}
            ann = {"task": {"type": "reference"}, "data": {"source": "none", "values": []},
                   "operations": [_op("add_reference_line", target, _marker(rng, "line"))]}
        elif pick == "box":
            x, x2 = _x_pair(rng, chart)
            target = {"type": "coordinate", "x": x, "x2": x2, "y": _number(rng, 0, 100), "y2": _number(rng, 100, 300)}
            ann = {"task": {"type": "reference"}, "data": {"source": "none", "values": []},
                   "operations": [_op("add_bounding_box", target, _marker(rng, "rect"))]}
        elif pick == "shade":
            x, x2 = _x_pair(rng, chart)
            ann = {"task": {"type": "reference"}, "data": {"source": "none", "values": []},
                   "operations": [_op("add_shading", {"type": "coordinate", "x": x, "x2": x2}, _marker(rng, "rect"))]}
        elif pick == "note":
            target = {"type": "coordinate", "x": rng.choice(chart["x_data"]), "y": _number(rng, 0, 300)}
            ann = {"task": {"type": "description"}, "data": ext_text,
                   "operations": [_op("add_text", target, _marker(rng, "text"))]}
        elif pick == "symbol":
            ops = [_op("add_symbol", _data_items(rng, chart), _marker(rng, "symbol"))]
            if rng.random() < 0.5:
                ops.append(_op("add_legend", {"type": "annotation", "ref_id": ann_id}))
            ann = {"task": {"type": "highlight"}, "data": ext_text, "operations": ops}
        elif pick == "labels":
            ann = {"task": {"type": "description"}, "data": {"source": "internal", "values": []},
                   "operations": [_op("add_value_label", _data_items(rng, chart), _marker(rng, "text"))]}
        elif pick == "grid":
            values = [{"type": "number", "content": rng.randint(2, 10)}]
            target = {"type": "chart_element", "element_id": rng.choice(["x_axis", "y_axis"])}
            ann = {"task": {"type": "reference"}, "data": {"source": "external", "values": values},
                   "operations": [_op("configure_gridlines", target, _marker(rng, "line"))]}
        elif pick == "mean":
            sub = rng.choice(["mean", "max", "min"])
            ops = [_op("add_reference_line", _data_items(rng, chart), _marker(rng, "line"))]
            if rng.random() < 0.5:
                ops.append(_op("add_text", {"type": "annotation", "ref_id": ann_id}, _marker(rng, "text")))
            ann = {"task": {"type": "summary", "subType": sub}, "data": {"source": "derived", "values": []}, "operations": ops}
        else:
            ann = {"task": {"type": "trend"}, "data": {"source": "derived", "values": []},
                   "operations": [_op("add_trend_line", {"type": "data_items", "filter": "true"}, _marker(rng, "line"))]}
    return {"id": ann_id, **ann}


def random_document(rng: random.Random, n_annotations: int | None = None, chart_type: str | None = None) -> dict:
    chart = random_chart(rng, chart_type)
    if rng.random() < 0.3:
        chart["source_note"] = {"origin": "synthetic", "rev": rng.randint(1, 9)}
    n = rng.randint(0, 5) if n_annotations is None else n_annotations
    anns = []
    for i in range(n):
        ids = [a["id"] for a in anns]
        refs = tuple(rng.sample(ids, 1)) if ids and chart["type"] != "pie" and rng.random() < 0.25 else ()
        anns.append(random_annotation(rng, chart, f"a{i}", refs))
    return {"chart": chart, "annotations": anns}


def dumps(doc: dict) -> str:
    return json.dumps(doc, ensure_ascii=False)
