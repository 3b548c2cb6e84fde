"""Semantic checks over a parsed document.

:func:`validate_document` never raises; it returns every violated rule as a
:class:`~chartmark.errors.Diagnostic` with a stable code and a JSON-pointer
path. A document is compilable iff the report holds no errors (warnings are
allowed).
"""

from __future__ import annotations

from . import ast
from .ast import AnnotatedChart, Annotation, Chart, Marker, Operation, Target, is_number, parse_date
from .errors import Diagnostic, error, pointer, warning
from .filter_lang import FilterError, parse_filter
from .registry import Registry, default_registry
from .resolver import dangling_references, reference_cycles

# Target types each core operation accepts.
OP_TARGETS = {
    "set_color": {"data_items"},
    "set_opacity": {"data_items"},
    "add_reference_line": {"coordinate", "data_items"},
    "add_bounding_box": {"coordinate"},
    "add_shading": {"coordinate"},
    "add_trend_line": {"data_items"},
    "add_text": {"annotation", "coordinate", "data_items"},
    "add_symbol": {"data_items"},
    "add_legend": {"annotation"},
    "configure_gridlines": {"chart_element"},
    "add_value_label": {"data_items"},
}

# Coordinate shapes accepted by operations that take coordinate targets.
OP_SHAPES = {
    "add_reference_line": {"line"},
    "add_bounding_box": {"region"},
    "add_shading": {"interval", "region"},
    "add_text": {"line", "point", "interval", "region"},
}

# Operations that only make sense on a cartesian chart.
CARTESIAN_OPS = frozenset(ast.OPERATIONS) - {"set_color", "set_opacity"}


def op_supports_chart(op_name: str, chart: Chart, registry: Registry) -> str | None:
    """Reason why ``op_name`` cannot apply to ``chart``, or None."""
    ext = registry.extension("operation", op_name)
    if ext is not None:
        if chart.type in ext.unsupported_charts:
            return f"{op_name} is not available for {chart.type} charts"
        return None
    if chart.type == "pie" and op_name in CARTESIAN_OPS:
        return f"{op_name} needs x/y axes; pie charts have none"
    if op_name == "add_trend_line" and chart.x_kind not in ("quantitative", "temporal"):
        return "add_trend_line needs a numeric or temporal x axis"
    return None


def op_supports_target(op_name: str, target: Target, registry: Registry) -> str | None:
    allowed = OP_TARGETS.get(op_name)
    if allowed is None:
        return None
    if target.type not in allowed:
        return f"{op_name} does not accept {target.type} targets (expects {', '.join(sorted(allowed))})"
    if target.type == "coordinate" and op_name in OP_SHAPES:
        shape = target.coordinate_shape
        if shape is not None and shape not in OP_SHAPES[op_name]:
            return f"{op_name} expects a {' or '.join(sorted(OP_SHAPES[op_name]))} coordinate, got a {shape}"
    return None


class _Validator:
    def __init__(self, doc: AnnotatedChart, registry: Registry):
        self.doc = doc
        self.chart = doc.chart
        self.registry = registry
        self.out: list[Diagnostic] = []

    def add(self, code: str, path: str, message: str) -> None:
        self.out.append(error(code, path, message))

    def run(self) -> list[Diagnostic]:
        self.check_chart()
        seen: dict[str, int] = {}
        for i, ann in enumerate(self.doc.annotations):
            path = pointer("annotations", i)
            if not ann.id:
                self.add("EMPTY_ID", path + "/id", "annotation id is empty")
            elif ann.id in seen:
                self.add("DUPLICATE_ID", path + "/id", f"id {ann.id!r} already used by /annotations/{seen[ann.id]}")
            else:
                seen[ann.id] = i
            self.check_annotation(ann, path)
        self.out.extend(dangling_references(self.doc))
        if len(seen) == len(self.doc.annotations):
            for cycle in reference_cycles(self.doc):
                self.add(
                    "CYCLIC_REF", pointer("annotations", self.doc.index_of(cycle[0])), "reference cycle: " + " -> ".join(cycle)
                )
        return self.out

    # -- chart --------------------------------------------------------------

    def check_chart(self) -> None:
        c = self.chart
        if len(c.x_data) != len(c.y_data):
            self.add("LENGTH_MISMATCH", "/chart/y_data", f"x_data has {len(c.x_data)} values, y_data has {len(c.y_data)}")
        if c.group_data is not None and len(c.group_data) != len(c.x_data):
            self.add(
                "LENGTH_MISMATCH", "/chart/group_data", f"x_data has {len(c.x_data)} values, group_data has {len(c.group_data)}"
            )
        if c.type in ast.GROUPED_CHART_TYPES and c.group_data is None:
            self.add("GROUP_REQUIRED", "/chart/group_data", f"{c.type} charts need group_data")
        if c.x_kind == "mixed":
            self.add("MIXED_X_TYPES", "/chart/x_data", "x_data mixes numbers and strings")
        if c.type == "pie":
            for i, v in enumerate(c.x_data):
                if not isinstance(v, str):
                    self.add("WRONG_TYPE", pointer("chart", "x_data", i), "pie slices need category labels")
            for i, v in enumerate(c.y_data):
                if v < 0:
                    self.add("NEGATIVE_VALUE", pointer("chart", "y_data", i), f"pie slice value {v} is negative")
        ext = self.registry.extension("chart_type", c.type)
        if ext is not None and ext.validator is not None and not ext.validator(c, self.doc):
            self.add("EXT_VALIDATION_FAILED", "/chart", f"chart type {c.type!r} rejected this chart")

    # -- annotation ---------------------------------------------------------

    def check_annotation(self, ann: Annotation, path: str) -> None:
        task = ann.task
        if task.type == "summary":
            if task.subType is None:
                self.out.append(warning("SUMMARY_DEFAULT_MEAN", path + "/task", "summary without subType; using mean"))
            elif not self.registry.is_summary_subtype(task.subType):
                self.add("UNKNOWN_SUBTYPE", path + "/task/subType", f"unknown summary subType {task.subType!r}")
        data = ann.data
        if data.source == "none" and data.values:
            self.add("VALUES_FOR_NONE_SOURCE", path + "/data/values", "source 'none' takes no values")
        for k, unit in enumerate(data.values):
            upath = path + pointer("data", "values", k)
            has_content, has_url = unit.content is not None, unit.url is not None
            if has_content == has_url:
                self.add("VALUE_CONTENT_URL", upath, "a value needs exactly one of content or url")
            elif unit.type == "image" and not has_url:
                self.add("VALUE_TYPE_MISMATCH", upath, "image values need a url")
            elif unit.type in ("text", "number", "config") and not has_content:
                self.add("VALUE_TYPE_MISMATCH", upath, f"{unit.type} values need content")
            elif unit.type == "number" and not is_number(unit.content):
                self.add("VALUE_TYPE_MISMATCH", upath + "/content", "number values need numeric content")
        if not ann.operations:
            self.add("EMPTY_OPERATIONS", path + "/operations", "annotation has no operations")
        for j, op in enumerate(ann.operations):
            self.check_operation(ann, op, path + pointer("operations", j))

    def check_operation(self, ann: Annotation, op: Operation, path: str) -> None:
        target_ok = self.check_target(op.target, path + "/target")
        self.check_marker(op.marker, path + "/marker")
        reason = op_supports_chart(op.name, self.chart, self.registry)
        if reason:
            self.add("UNSUPPORTED_OP_FOR_CHART", path + "/name", reason)
        if target_ok:
            reason = op_supports_target(op.name, op.target, self.registry)
            if reason:
                self.add("UNSUPPORTED_TARGET_FOR_OP", path + "/target/type", reason)
        if op.name == "add_trend_line" and not (ann.task.type == "trend" and ann.data.source == "derived"):
            self.add("OP_REQUIRES_DERIVED", path + "/name", "add_trend_line needs a trend task with derived data")
        if op.name == "add_reference_line" and op.target.type == "data_items" and ann.data.source != "derived":
            self.add("OP_REQUIRES_DERIVED", path + "/name", "a data_items reference line needs derived data")
        ext = self.registry.extension("operation", op.name)
        if ext is not None and ext.validator is not None and not ext.validator(op, self.doc):
            self.add("EXT_VALIDATION_FAILED", path, f"extension {op.name!r} rejected this operation")

    def check_target(self, t: Target, path: str) -> bool:
        groups = t.populated()
        stray = sorted(k for g, keys in groups.items() if g != t.type for k in keys)
        if stray:
            self.add("TARGET_PARAMS", path, f"{t.type} target must not set {', '.join(stray)}")
            return False
        if t.type == "data_items":
            if t.filter is None:
                self.add("TARGET_PARAMS", path, "data_items target needs a filter")
                return False
            try:
                parse_filter(t.filter, self.chart)
            except FilterError as exc:
                self.add(exc.code, path + "/filter", str(exc))
                return False
        elif t.type == "coordinate":
            if t.coordinate_shape is None:
                keys = sorted(groups.get("coordinate", ()))
                self.add("COORDINATE_SHAPE", path, f"coordinate parameters {keys or 'none'} form no point, line, interval or region")
                return False
            ok = True
            for key in ("x", "x2"):
                v = getattr(t, key)
                if v is not None and not self._x_value_ok(v):
                    self.add("COORDINATE_TYPE_MISMATCH", path + "/" + key, f"{v!r} does not fit a {self.chart.x_kind} x axis")
                    ok = False
            for key in ("y", "y2"):
                v = getattr(t, key)
                if v is not None and not is_number(v):
                    self.add("COORDINATE_TYPE_MISMATCH", path + "/" + key, f"{v!r} is not a number")
                    ok = False
            return ok
        elif t.type == "chart_element":
            if t.element_id is None:
                self.add("TARGET_PARAMS", path, "chart_element target needs element_id")
                return False
            if t.element_id not in ast.CHART_ELEMENTS:
                self.add("UNKNOWN_ELEMENT", path + "/element_id", f"unknown chart element {t.element_id!r}")
                return False
        elif t.type == "annotation":
            if t.ref_id is None:
                self.add("TARGET_PARAMS", path, "annotation target needs ref_id")
                return False
        return True

    def _x_value_ok(self, v) -> bool:
        kind = self.chart.x_kind
        if kind == "temporal":
            return parse_date(v) is not None
        if kind == "quantitative":
            return is_number(v)
        if kind == "nominal":
            return isinstance(v, str)
        return False

    def check_marker(self, m: Marker, path: str) -> None:
        def unit_interval(group, key, value):
            if value is not None and not 0 <= value <= 1:
                self.add("INVALID_MARKER", f"{path}/{group}/{key}", f"{key} must lie in [0, 1], got {value}")

        def positive(group, key, value):
            if value is not None and not value > 0:
                self.add("INVALID_MARKER", f"{path}/{group}/{key}", f"{key} must be positive, got {value}")

        if m.line is not None:
            positive("line", "size", m.line.size)
            unit_interval("line", "opacity", m.line.opacity)
        if m.text is not None:
            positive("text", "fontSize", m.text.fontSize)
        if m.symbol is not None:
            positive("symbol", "size", m.symbol.size)
        if m.rect is not None:
            unit_interval("rect", "fillOpacity", m.rect.fillOpacity)
            positive("rect", "strokeWidth", m.rect.strokeWidth)


def validate_document(doc: AnnotatedChart, registry: Registry | None = None) -> list[Diagnostic]:
    return _Validator(doc, registry or default_registry()).run()


def errors_only(diagnostics: list[Diagnostic]) -> list[Diagnostic]:
    return [d for d in diagnostics if d.is_error]
