"""ChartMark JSON <-> AST.

:func:`parse` walks the whole document and collects every structural problem
(missing fields, wrong JSON types, unknown enum values, unknown annotation
keys) before giving up, so one call reports all independent errors. Chart
objects are open: unknown chart keys are kept verbatim in ``Chart.extra``.

:func:`serialize` writes canonical JSON: sorted keys, no whitespace, shortest
round-trip numbers.
"""

from __future__ import annotations

import json
from dataclasses import fields
from typing import Any, Callable

from . import ast
from .ast import (
    AnnotatedChart,
    Annotation,
    Chart,
    DataSpec,
    LineStyle,
    Marker,
    Operation,
    RectStyle,
    SymbolStyle,
    Target,
    Task,
    TextStyle,
    ValueUnit,
    is_number,
)
from .canonical import canonical_dumps
from .errors import ChartMarkError, Diagnostic, pointer
from .registry import Registry, default_registry

_MISSING = object()


def _reject_constant(name: str):
    raise ValueError(f"{name} is not a valid JSON number")


class _DuplicateKeys(dict):
    """Marker subclass so the reader can report duplicated object keys."""

    duplicates: list[str]


def _pairs_hook(pairs):
    obj = _DuplicateKeys()
    obj.duplicates = []
    for k, v in pairs:
        if k in obj:
            obj.duplicates.append(k)
        obj[k] = v
    return obj


def load_json(text: str | bytes) -> Any:
    """Decode JSON, mapping every failure to a ``MALFORMED_JSON`` error."""
    if isinstance(text, (bytes, bytearray)):
        try:
            text = bytes(text).decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ChartMarkError(Diagnostic("MALFORMED_JSON", "", f"input is not UTF-8: {exc}")) from None
    try:
        return json.loads(text, object_pairs_hook=_pairs_hook, parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise ChartMarkError(
            Diagnostic("MALFORMED_JSON", "", exc.msg, line=exc.lineno, column=exc.colno)
        ) from None
    except ValueError as exc:
        raise ChartMarkError(Diagnostic("MALFORMED_JSON", "", str(exc))) from None


class _Reader:
    def __init__(self, registry: Registry):
        self.registry = registry
        self.errors: list[Diagnostic] = []

    def err(self, code: str, path: str, message: str) -> None:
        self.errors.append(Diagnostic(code, path, message))

    # -- primitive accessors ------------------------------------------------

    def obj(self, value: Any, path: str) -> dict | None:
        if not isinstance(value, dict):
            self.err("WRONG_TYPE", path, f"expected an object, got {_json_type(value)}")
            return None
        for key in getattr(value, "duplicates", ()):
            self.err("DUPLICATE_KEY", path + pointer(key), f"key {key!r} appears more than once")
        return value

    def field(self, o: dict, key: str, path: str, check: Callable[[Any], bool], expected: str, required: bool = True):
        value = o.get(key, _MISSING)
        if value is _MISSING or (value is None and not required):
            if required:
                self.err("MISSING_FIELD", path + pointer(key), f"missing required field {key!r}")
            return None
        if not check(value):
            self.err("WRONG_TYPE", path + pointer(key), f"expected {expected}, got {_json_type(value)}")
            return None
        return value

    def text(self, o, key, path, required=True) -> str | None:
        return self.field(o, key, path, lambda v: isinstance(v, str), "a string", required)

    def number(self, o, key, path, required=False) -> float | None:
        return self.field(o, key, path, is_number, "a number", required)

    def boolean(self, o, key, path, required=False) -> bool | None:
        return self.field(o, key, path, lambda v: isinstance(v, bool), "a boolean", required)

    def array(self, o, key, path, required=True) -> list | None:
        return self.field(o, key, path, lambda v: isinstance(v, list), "an array", required)

    def enum(self, o, key, path, allowed: Callable[[str], bool] | tuple, required=True) -> str | None:
        value = self.text(o, key, path, required)
        if value is None:
            return None
        ok = allowed(value) if callable(allowed) else value in allowed
        if not ok:
            self.err("UNKNOWN_ENUM", path + pointer(key), f"unknown value {value!r}")
        return value

    def unknown_keys(self, o: dict, known: tuple, path: str) -> None:
        for key in o:
            if key not in known:
                self.err("UNKNOWN_FIELD", path + pointer(key), f"unknown field {key!r}")

    # -- grammar ------------------------------------------------------------

    def document(self, raw: Any) -> AnnotatedChart | None:
        root = self.obj(raw, "")
        if root is None:
            return None
        self.unknown_keys(root, ("chart", "annotations"), "")
        chart = None
        if "chart" not in root:
            self.err("MISSING_FIELD", "/chart", "missing required field 'chart'")
        else:
            chart = self.chart(root["chart"], "/chart")
        annotations: list[Annotation] = []
        raw_anns = self.array(root, "annotations", "")
        if raw_anns is not None:
            for i, item in enumerate(raw_anns):
                ann = self.annotation(item, pointer("annotations", i))
                if ann is not None:
                    annotations.append(ann)
        if self.errors or chart is None:
            return None
        return AnnotatedChart(chart, tuple(annotations))

    def chart(self, raw: Any, path: str) -> Chart | None:
        o = self.obj(raw, path)
        if o is None:
            return None
        n = len(self.errors)
        title = self.text(o, "title", path)
        ctype = self.enum(o, "type", path, self.registry.is_chart_type)
        x_name = self.text(o, "x_name", path)
        y_name = self.text(o, "y_name", path)
        x_data = self.array(o, "x_data", path)
        y_data = self.array(o, "y_data", path)
        group_name = self.text(o, "group_name", path, required=False)
        group_data = self.array(o, "group_data", path, required=False)
        for i, v in enumerate(x_data or ()):
            if not (is_number(v) or isinstance(v, str)):
                self.err("WRONG_TYPE", path + pointer("x_data", i), f"expected a number or string, got {_json_type(v)}")
        for i, v in enumerate(y_data or ()):
            if not is_number(v):
                self.err("WRONG_TYPE", path + pointer("y_data", i), f"expected a number, got {_json_type(v)}")
        for i, v in enumerate(group_data or ()):
            if not isinstance(v, str):
                self.err("WRONG_TYPE", path + pointer("group_data", i), f"expected a string, got {_json_type(v)}")
        known = ("title", "type", "x_name", "y_name", "x_data", "y_data", "group_name", "group_data")
        extra = {k: v for k, v in o.items() if k not in known}
        if len(self.errors) != n:
            return None
        return Chart(
            title=title,
            type=ctype,
            x_name=x_name,
            y_name=y_name,
            x_data=tuple(x_data),
            y_data=tuple(y_data),
            group_name=group_name,
            group_data=tuple(group_data) if group_data is not None else None,
            extra=_plain(extra),
        )

    def annotation(self, raw: Any, path: str) -> Annotation | None:
        o = self.obj(raw, path)
        if o is None:
            return None
        n = len(self.errors)
        self.unknown_keys(o, ("id", "task", "data", "operations"), path)
        ann_id = self.text(o, "id", path)
        task = self._required_obj(o, "task", path, self.task)
        data = self._required_obj(o, "data", path, self.data)
        ops: list[Operation] = []
        raw_ops = self.array(o, "operations", path)
        for j, item in enumerate(raw_ops or ()):
            op = self.operation(item, path + pointer("operations", j))
            if op is not None:
                ops.append(op)
        if len(self.errors) != n:
            return None
        return Annotation(ann_id, task, data, tuple(ops))

    def _required_obj(self, o: dict, key: str, path: str, reader):
        if key not in o:
            self.err("MISSING_FIELD", path + pointer(key), f"missing required field {key!r}")
            return None
        return reader(o[key], path + pointer(key))

    def task(self, raw: Any, path: str) -> Task | None:
        o = self.obj(raw, path)
        if o is None:
            return None
        self.unknown_keys(o, ("type", "subType"), path)
        ttype = self.enum(o, "type", path, ast.TASK_TYPES)
        sub = self.text(o, "subType", path, required=False)
        return Task(ttype, sub)

    def data(self, raw: Any, path: str) -> DataSpec | None:
        o = self.obj(raw, path)
        if o is None:
            return None
        self.unknown_keys(o, ("source", "values"), path)
        source = self.enum(o, "source", path, ast.DATA_SOURCES)
        values = []
        for i, item in enumerate(self.array(o, "values", path, required=False) or ()):
            unit = self.value_unit(item, path + pointer("values", i))
            if unit is not None:
                values.append(unit)
        return DataSpec(source, tuple(values))

    def value_unit(self, raw: Any, path: str) -> ValueUnit | None:
        o = self.obj(raw, path)
        if o is None:
            return None
        self.unknown_keys(o, ("type", "content", "url"), path)
        vtype = self.enum(o, "type", path, ast.VALUE_TYPES)
        content = self.field(
            o, "content", path, lambda v: is_number(v) or isinstance(v, (str, bool)), "a scalar", required=False
        )
        url = self.text(o, "url", path, required=False)
        return ValueUnit(vtype, content, url)

    def operation(self, raw: Any, path: str) -> Operation | None:
        o = self.obj(raw, path)
        if o is None:
            return None
        self.unknown_keys(o, ("name", "target", "marker"), path)
        name = self.enum(o, "name", path, self.registry.is_operation)
        target = self._required_obj(o, "target", path, self.target)
        marker = Marker()
        if o.get("marker") is not None:
            marker = self.marker(o["marker"], path + pointer("marker"))
        return Operation(name, target, marker)

    def target(self, raw: Any, path: str) -> Target | None:
        o = self.obj(raw, path)
        if o is None:
            return None
        self.unknown_keys(o, ("type", "filter", "x", "x2", "y", "y2", "element_id", "ref_id"), path)
        ttype = self.enum(o, "type", path, ast.TARGET_TYPES)
        flt = self.text(o, "filter", path, required=False)
        coords = {}
        for key in Target.COORDINATE_KEYS:
            coords[key] = self.field(
                o, key, path, lambda v: is_number(v) or isinstance(v, str), "a number or string", required=False
            )
        element_id = self.text(o, "element_id", path, required=False)
        ref_id = self.text(o, "ref_id", path, required=False)
        return Target(ttype, flt, element_id=element_id, ref_id=ref_id, **coords)

    def marker(self, raw: Any, path: str) -> Marker:
        o = self.obj(raw, path)
        if o is None:
            return Marker()
        self.unknown_keys(o, Marker.GROUPS, path)
        groups = {}
        readers = {"line": self.line_style, "text": self.text_style, "symbol": self.symbol_style, "rect": self.rect_style}
        for key, reader in readers.items():
            if o.get(key) is not None:
                sub = self.obj(o[key], path + pointer(key))
                if sub is not None:
                    groups[key] = reader(sub, path + pointer(key))
        return Marker(**groups)

    def line_style(self, o: dict, path: str) -> LineStyle:
        self.unknown_keys(o, ("size", "dashed", "color", "opacity"), path)
        return LineStyle(
            size=self.number(o, "size", path),
            dashed=self.boolean(o, "dashed", path),
            color=self.text(o, "color", path, required=False),
            opacity=self.number(o, "opacity", path),
        )

    def text_style(self, o: dict, path: str) -> TextStyle:
        self.unknown_keys(o, ("fontSize", "color", "dx", "dy", "anchor"), path)
        return TextStyle(
            fontSize=self.number(o, "fontSize", path),
            color=self.text(o, "color", path, required=False),
            dx=self.number(o, "dx", path),
            dy=self.number(o, "dy", path),
            anchor=self.enum(o, "anchor", path, ast.TEXT_ANCHORS, required=False),
        )

    def symbol_style(self, o: dict, path: str) -> SymbolStyle:
        self.unknown_keys(o, ("shape", "size", "color"), path)
        return SymbolStyle(
            shape=self.enum(o, "shape", path, ast.SYMBOL_SHAPES, required=False),
            size=self.number(o, "size", path),
            color=self.text(o, "color", path, required=False),
        )

    def rect_style(self, o: dict, path: str) -> RectStyle:
        self.unknown_keys(o, ("fill", "fillOpacity", "stroke", "strokeWidth"), path)
        return RectStyle(
            fill=self.text(o, "fill", path, required=False),
            fillOpacity=self.number(o, "fillOpacity", path),
            stroke=self.text(o, "stroke", path, required=False),
            strokeWidth=self.number(o, "strokeWidth", path),
        )


def _json_type(value: Any) -> str:
    if value is None:
        return "null"
    if isinstance(value, bool):
        return "boolean"
    if is_number(value):
        return "number"
    if isinstance(value, str):
        return "string"
    if isinstance(value, list):
        return "array"
    if isinstance(value, dict):
        return "object"
    return type(value).__name__


def _plain(value: Any) -> Any:
    """Strip the duplicate-key bookkeeping subclass from decoded JSON."""
    if isinstance(value, dict):
        return {k: _plain(v) for k, v in value.items()}
    if isinstance(value, list):
        return [_plain(v) for v in value]
    return value


def parse_value(raw: Any, registry: Registry | None = None) -> AnnotatedChart:
    """Build an AST from already-decoded JSON."""
    reader = _Reader(registry or default_registry())
    doc = reader.document(raw)
    if reader.errors:
        raise ChartMarkError(reader.errors)
    return doc


def parse(text: str | bytes, registry: Registry | None = None) -> AnnotatedChart:
    """Parse ChartMark JSON text.

    Raises :class:`ChartMarkError` listing every structural error found.
    """
    return parse_value(load_json(text), registry)


# ----------------------------------------------------------------------------
# Serialization
# ----------------------------------------------------------------------------


def _style(style) -> dict:
    return {f.name: getattr(style, f.name) for f in fields(style) if getattr(style, f.name) is not None}


def chart_to_value(chart: Chart) -> dict:
    out = dict(chart.extra)
    out.update(
        title=chart.title,
        type=chart.type,
        x_name=chart.x_name,
        y_name=chart.y_name,
        x_data=list(chart.x_data),
        y_data=list(chart.y_data),
    )
    if chart.group_name is not None:
        out["group_name"] = chart.group_name
    if chart.group_data is not None:
        out["group_data"] = list(chart.group_data)
    return out


def target_to_value(target: Target) -> dict:
    out = {"type": target.type}
    for key in ("filter", "x", "x2", "y", "y2", "element_id", "ref_id"):
        value = getattr(target, key)
        if value is not None:
            out[key] = value
    return out


def marker_to_value(marker: Marker) -> dict:
    out = {}
    for key in Marker.GROUPS:
        style = getattr(marker, key)
        if style is not None:
            out[key] = _style(style)
    return out


def annotation_to_value(ann: Annotation) -> dict:
    task = {"type": ann.task.type}
    if ann.task.subType is not None:
        task["subType"] = ann.task.subType
    values = []
    for v in ann.data.values:
        unit = {"type": v.type}
        if v.content is not None:
            unit["content"] = v.content
        if v.url is not None:
            unit["url"] = v.url
        values.append(unit)
    return {
        "id": ann.id,
        "task": task,
        "data": {"source": ann.data.source, "values": values},
        "operations": [
            {"name": op.name, "target": target_to_value(op.target), "marker": marker_to_value(op.marker)}
            for op in ann.operations
        ],
    }


def to_value(doc: AnnotatedChart) -> dict:
    return {
        "chart": chart_to_value(doc.chart),
        "annotations": [annotation_to_value(a) for a in doc.annotations],
    }


def serialize(doc: AnnotatedChart) -> str:
    return canonical_dumps(to_value(doc))
