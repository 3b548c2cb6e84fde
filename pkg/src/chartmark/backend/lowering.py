"""Lowering of resolved operations into render layers.

Each operation name has exactly one rule here (core names) or in the
registry (extensions). A rule returns zero or more :class:`RenderLayer`;
``configure_gridlines`` contributes to ``axis_overrides`` instead.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Callable, Mapping

from ..ast import AnnotatedChart, Annotation, Chart, Marker, Operation, is_number
from ..errors import ChartMarkError, error, pointer
from ..filter_lang import parse_filter, to_source
from ..registry import Registry, default_registry
from ..resolver import ResolvedAnnotation
from ..validate import op_supports_chart, op_supports_target
from .ir import AxisConfig, BaseChartSpec, RenderLayer, RenderSpec

DASH = (4, 4)

# Defaults applied when a marker leaves a value unset.
RULE_DEFAULTS = {"color": "gray", "width": 1, "dash": None, "opacity": 1}
TREND_DEFAULTS = {"color": None, "width": 1.5, "dash": list(DASH), "opacity": 1}
BOX_DEFAULTS = {"fill": "transparent", "fill_opacity": 0, "stroke": "#333333", "stroke_width": 1.5}
SHADE_DEFAULTS = {"fill": "gray", "fill_opacity": 0.15, "stroke": None, "stroke_width": None}
TEXT_DEFAULTS = {"font_size": 12, "color": "black", "dx": 0, "dy": 0, "anchor": "start"}
VALUE_LABEL_DEFAULTS = {"font_size": 12, "color": "black", "dx": 0, "dy": -6, "anchor": "middle"}
SYMBOL_DEFAULTS = {"shape": "circle", "size": 64, "color": "#e45756"}
HIGHLIGHT_COLOR = "#e45756"
FADED_OPACITY = 0.3

MARKS = {
    "bar": "bar",
    "grouped_bar": "bar",
    "line": "line",
    "grouped_line": "line",
    "scatter": "point",
    "grouped_scatter": "point",
    "pie": "arc",
}


def format_number(value: Any) -> str:
    if isinstance(value, float) and value.is_integer() and abs(value) < 1e15:
        return str(int(value))
    return repr(value) if isinstance(value, float) else str(value)


def _pick(*values, default=None):
    for v in values:
        if v is not None:
            return v
    return default


# ----------------------------------------------------------------------------
# Style flattening
# ----------------------------------------------------------------------------


def line_style(marker: Marker, defaults: Mapping[str, Any]) -> dict:
    line = marker.line
    style = dict(defaults)
    if line is not None:
        if line.color is not None:
            style["color"] = line.color
        if line.size is not None:
            style["width"] = line.size
        if line.dashed is not None:
            style["dash"] = list(DASH) if line.dashed else None
        if line.opacity is not None:
            style["opacity"] = line.opacity
    return style


def rect_style(marker: Marker, defaults: Mapping[str, Any]) -> dict:
    rect = marker.rect
    style = dict(defaults)
    if rect is not None:
        for src, dst in (("fill", "fill"), ("fillOpacity", "fill_opacity"), ("stroke", "stroke"), ("strokeWidth", "stroke_width")):
            v = getattr(rect, src)
            if v is not None:
                style[dst] = v
    return style


def text_style(marker: Marker, defaults: Mapping[str, Any]) -> dict:
    text = marker.text
    style = dict(defaults)
    if text is not None:
        for src, dst in (("fontSize", "font_size"), ("color", "color"), ("dx", "dx"), ("dy", "dy"), ("anchor", "anchor")):
            v = getattr(text, src)
            if v is not None:
                style[dst] = v
    return style


def symbol_style(marker: Marker) -> dict:
    style = dict(SYMBOL_DEFAULTS)
    sym = marker.symbol
    if sym is not None:
        for key in ("shape", "size", "color"):
            v = getattr(sym, key)
            if v is not None:
                style[key] = v
    return style


def marker_color(marker: Marker) -> str | None:
    return _pick(
        marker.symbol.color if marker.symbol else None,
        marker.rect.fill if marker.rect else None,
        marker.line.color if marker.line else None,
        marker.text.color if marker.text else None,
    )


def marker_opacity(marker: Marker) -> float | None:
    return _pick(marker.rect.fillOpacity if marker.rect else None, marker.line.opacity if marker.line else None)


# ----------------------------------------------------------------------------
# Context passed to every rule
# ----------------------------------------------------------------------------


@dataclass
class LoweringContext:
    doc: AnnotatedChart
    annotation: Annotation
    annotation_index: int
    operation: Operation
    operation_index: int
    resolved: ResolvedAnnotation
    all_resolved: Mapping[str, ResolvedAnnotation]
    registry: Registry

    @property
    def chart(self) -> Chart:
        return self.doc.chart

    @property
    def marker(self) -> Marker:
        return self.operation.marker

    @property
    def path(self) -> str:
        return pointer("annotations", self.annotation_index, "operations", self.operation_index)

    @property
    def selection(self):
        return self.resolved.selections.get(self.operation_index, ())

    def canonical_filter(self) -> str:
        return to_source(parse_filter(self.operation.target.filter, self.chart))

    def layer(self, kind: str, geometry: Mapping[str, Any], style: Mapping[str, Any] | None = None) -> RenderLayer:
        return RenderLayer(
            annotation_id=self.annotation.id,
            operation_index=self.operation_index,
            operation=self.operation.name,
            kind=kind,
            geometry=dict(geometry),
            style=dict(style or {}),
        )

    def payload_text(self) -> str | list[str] | None:
        texts = self.annotation.data.texts()
        if not texts:
            return None
        return texts[0] if len(texts) == 1 else texts


# ----------------------------------------------------------------------------
# Core rules
# ----------------------------------------------------------------------------


def _patch(ctx: LoweringContext, channel: str, selected: Any, deselected: Any) -> list[RenderLayer]:
    if not ctx.selection:
        return []
    geometry = {"filter": ctx.canonical_filter(), "channels": {channel: {"selected": selected, "deselected": deselected}}}
    return [ctx.layer("encoding_patch", geometry)]


def lower_set_color(ctx):
    return _patch(ctx, "color", _pick(marker_color(ctx.marker), default=HIGHLIGHT_COLOR), None)


def lower_set_opacity(ctx):
    return _patch(ctx, "opacity", 1, _pick(marker_opacity(ctx.marker), default=FADED_OPACITY))


def lower_reference_line(ctx):
    t = ctx.operation.target
    style = line_style(ctx.marker, RULE_DEFAULTS)
    if t.type == "coordinate":
        axis = "x" if t.x is not None else "y"
        return [ctx.layer("rule", {"axis": axis, "value": getattr(t, axis)}, style)]
    derived = ctx.resolved.derived
    if derived is None or derived.scalar is None or not ctx.selection:
        return []
    return [ctx.layer("rule", {"axis": "y", "value": derived.scalar}, style)]


def _rect_geometry(t) -> dict:
    return {k: getattr(t, k) for k in ("x", "x2", "y", "y2") if getattr(t, k) is not None}


def lower_bounding_box(ctx):
    return [ctx.layer("rect", _rect_geometry(ctx.operation.target), rect_style(ctx.marker, BOX_DEFAULTS))]


def lower_shading(ctx):
    return [ctx.layer("rect", _rect_geometry(ctx.operation.target), rect_style(ctx.marker, SHADE_DEFAULTS))]


def lower_trend_line(ctx):
    derived = ctx.resolved.derived
    if derived is None or not derived.per_group or not ctx.selection:
        return []
    style = line_style(ctx.marker, TREND_DEFAULTS)
    out = []
    for group, line in derived.per_group.items():
        geometry = {
            "group": group if ctx.chart.grouped else None,
            "x": line.x_start,
            "x2": line.x_end,
            "y": line.y_start,
            "y2": line.y_end,
            "slope": line.slope,
            "intercept": line.intercept,
        }
        out.append(ctx.layer("line_segment", geometry, style))
    return out


def lower_text(ctx):
    anchor = ctx.resolved.anchor_for(ctx.operation_index)
    text = ctx.payload_text()
    if text is None and ctx.resolved.derived is not None and ctx.resolved.derived.scalar is not None:
        text = format_number(ctx.resolved.derived.scalar)
    if anchor is None or text is None:
        return []
    return [ctx.layer("text", {"x": anchor.x, "y": anchor.y, "text": text}, text_style(ctx.marker, TEXT_DEFAULTS))]


def _points(rows) -> list[dict]:
    return [{"x": r.x, "y": r.y} for r in rows]


def lower_symbol(ctx):
    if not ctx.selection:
        return []
    geometry = {"filter": ctx.canonical_filter(), "points": _points(ctx.selection)}
    return [ctx.layer("point_overlay", geometry, symbol_style(ctx.marker))]


def lower_legend(ctx):
    ref = ctx.operation.target.ref_id
    ref_ann = ctx.doc.annotation(ref)
    ref_res = ctx.all_resolved.get(ref)
    if ref_ann is None or ref_res is None:
        return []
    for j, op in enumerate(ref_ann.operations):
        if op.name == "add_symbol" or (op.marker.symbol is not None and op.target.type == "data_items"):
            if ref == ctx.annotation.id and j == ctx.operation_index:
                continue
            points = ref_res.selections.get(j, ())
            if not points:
                return []
            label = ctx.payload_text()
            if isinstance(label, list):
                label = " ".join(label)
            geometry = {
                "label": label if label is not None else ref,
                "points": _points(points),
                "symbol_of": {"annotation_id": ref, "operation_index": j},
            }
            return [ctx.layer("legend_entry", geometry, symbol_style(op.marker))]
    return []


def lower_value_label(ctx):
    style = text_style(ctx.marker, VALUE_LABEL_DEFAULTS)
    return [ctx.layer("text", {"x": r.x, "y": r.y, "text": format_number(r.y)}, style) for r in ctx.selection]


def axis_config(ctx) -> AxisConfig:
    tick_count = None
    grid = None
    for unit in ctx.annotation.data.values:
        if unit.type == "number" and is_number(unit.content):
            tick_count = int(unit.content)
        elif unit.type == "config" and isinstance(unit.content, str) and "=" in unit.content:
            key, _, raw = unit.content.partition("=")
            key, raw = key.strip(), raw.strip()
            if key == "tick_count" and raw.isdigit():
                tick_count = int(raw)
            elif key == "grid" and raw in ("true", "false"):
                grid = raw == "true"
    line = ctx.marker.line
    dash = color = width = opacity = None
    if line is not None:
        grid = True if grid is None else grid
        dash = DASH if line.dashed else None
        color, width, opacity = line.color, line.size, line.opacity
    if tick_count is not None and tick_count < 2:
        raise ChartMarkError(error("INVALID_AXIS_CONFIG", ctx.path, f"tick count must be at least 2, got {tick_count}"))
    if tick_count is not None and grid is None:
        grid = True
    return AxisConfig(tick_count=tick_count, grid=grid, grid_dash=dash, grid_color=color, grid_width=width, grid_opacity=opacity)


CORE_RULES: dict[str, Callable[[LoweringContext], list[RenderLayer]]] = {
    "set_color": lower_set_color,
    "set_opacity": lower_set_opacity,
    "add_reference_line": lower_reference_line,
    "add_bounding_box": lower_bounding_box,
    "add_shading": lower_shading,
    "add_trend_line": lower_trend_line,
    "add_text": lower_text,
    "add_symbol": lower_symbol,
    "add_legend": lower_legend,
    "add_value_label": lower_value_label,
}


# ----------------------------------------------------------------------------
# Entry points
# ----------------------------------------------------------------------------


def base_spec(chart: Chart) -> BaseChartSpec:
    mark = MARKS.get(chart.type, chart.type)
    kind = chart.x_kind
    if kind == "quantitative" and mark == "bar":
        x_type = "ordinal"
    elif kind in ("quantitative", "temporal"):
        x_type = kind
    else:
        x_type = "nominal"
    values = []
    for i in range(chart.n_rows):
        row = {"x": chart.x_data[i], "y": chart.y_data[i]}
        if chart.group_data is not None and i < len(chart.group_data):
            row["group"] = chart.group_data[i]
        values.append(row)
    return BaseChartSpec(
        chart_type=chart.type,
        mark=mark,
        title=chart.title,
        x_title=chart.x_name,
        y_title=chart.y_name,
        x_type=x_type,
        x_kind=kind,
        group_title=chart.group_name if chart.group_data is not None else None,
        values=tuple(values),
    )


def lower(
    doc: AnnotatedChart, resolved: list[ResolvedAnnotation], registry: Registry | None = None
) -> RenderSpec:
    """Translate a resolved document into a :class:`RenderSpec`.

    Layers follow document order of annotations, then operation order.
    """
    registry = registry or default_registry()
    by_id = {r.id: r for r in resolved}
    layers: list[RenderLayer] = []
    axes: dict[str, AxisConfig] = {}
    for i, ann in enumerate(doc.annotations):
        res = by_id.get(ann.id)
        if res is None:
            raise ChartMarkError(error("LOWER_UNRESOLVED", pointer("annotations", i), f"annotation {ann.id!r} was not resolved"))
        for j, op in enumerate(ann.operations):
            ctx = LoweringContext(doc, ann, i, op, j, res, by_id, registry)
            reason = op_supports_chart(op.name, doc.chart, registry)
            if reason:
                raise ChartMarkError(error("UNSUPPORTED_OP_FOR_CHART", ctx.path + "/name", reason))
            reason = op_supports_target(op.name, op.target, registry)
            if reason:
                raise ChartMarkError(error("UNSUPPORTED_TARGET_FOR_OP", ctx.path + "/target/type", reason))
            if op.name == "configure_gridlines":
                element = op.target.element_id
                cfg = axis_config(ctx)
                axes[element] = axes[element].merged(cfg) if element in axes else cfg
                continue
            rule = CORE_RULES.get(op.name)
            if rule is None:
                ext = registry.extension("operation", op.name)
                if ext is None:
                    raise ChartMarkError(error("UNKNOWN_ENUM", ctx.path + "/name", f"unknown operation {op.name!r}"))
                rule = ext.lowering["ir"]
            layers.extend(rule(ctx))
    return RenderSpec(base=base_spec(doc.chart), layers=tuple(layers), axis_overrides=axes)
