"""Vega-Lite v5 code generation from a :class:`RenderSpec`.

Output shape: a single-view spec when nothing but the base chart (plus
conditional encodings and axis settings) is needed, otherwise a layered spec
whose first layer is the base chart. Highlight patches never become layers;
they fold into the base layer as conditional encodings.
"""

from __future__ import annotations

import datetime as dt
import json
from typing import Any

from ..ast import parse_date
from ..canonical import canonical_dumps
from ..errors import ChartMarkError, error
from ..filter_lang import And, Comparison, Not, Or, TrueExpr, parse_filter
from .ir import RenderLayer, RenderSpec

SCHEMA_URL = "https://vega.github.io/schema/vega-lite/v5.json"
TREND_COLOR = "#333333"
# Vega-Lite's own default mark color; used when a color patch leaves the rest unchanged.
DEFAULT_MARK_COLOR = "#4c78a8"

_VEGA_OPS = {"==": "===", "!=": "!==", "<": "<", "<=": "<=", ">": ">", ">=": ">="}
_EPOCH = dt.date(1970, 1, 1)
_ALIGN = {"start": "left", "middle": "center", "end": "right"}


def _literal(value: Any) -> str:
    if isinstance(value, str):
        return json.dumps(value)
    return repr(value) if isinstance(value, float) else str(value)


def filter_to_vega(src: str, x_temporal: bool) -> str:
    """Translate a canonical filter into a Vega expression over ``datum``."""

    def walk(e) -> str:
        if isinstance(e, TrueExpr):
            return "true"
        if isinstance(e, Comparison):
            op = _VEGA_OPS[e.op]
            if e.field == "x" and x_temporal:
                d = _EPOCH + dt.timedelta(days=parse_date(e.literal))
                return f"time(datum.x) {op} utc({d.year}, {d.month - 1}, {d.day})"
            return f"datum.{e.field} {op} {_literal(e.literal)}"
        if isinstance(e, And):
            return "(" + " && ".join(walk(i) for i in e.items) + ")"
        if isinstance(e, Or):
            return "(" + " || ".join(walk(i) for i in e.items) + ")"
        if isinstance(e, Not):
            return "!(" + walk(e.expr) + ")"
        raise TypeError(e)

    return walk(parse_filter(src))


def _x_encoding(spec: RenderSpec, field: str = "x") -> dict:
    return {"field": field, "type": spec.base.x_type}


def _y_encoding(field: str = "y") -> dict:
    return {"field": field, "type": "quantitative"}


def base_layer(spec: RenderSpec) -> dict:
    base = spec.base
    data = {"values": [dict(v) for v in base.values]}
    if base.mark == "arc":
        encoding = {
            "theta": {"field": "y", "type": "quantitative", "title": base.y_title},
            "color": {"field": "x", "type": "nominal", "title": base.x_title},
        }
        return {"data": data, "mark": {"type": "arc"}, "encoding": encoding}
    encoding = {
        "x": {"field": "x", "type": base.x_type, "title": base.x_title},
        "y": {"field": "y", "type": "quantitative", "title": base.y_title},
    }
    if base.group_title is not None:
        encoding["color"] = {"field": "group", "type": "nominal", "title": base.group_title}
        if base.mark == "bar":
            encoding["xOffset"] = {"field": "group"}
    mark: dict[str, Any] = {"type": base.mark}
    if base.mark == "point":
        mark["filled"] = True
    return {"data": data, "mark": mark, "encoding": encoding}


def _fold_patch(layer: dict, patch: RenderLayer, x_temporal: bool) -> None:
    test = filter_to_vega(patch.geometry["filter"], x_temporal)
    encoding = layer["encoding"]
    for channel, values in patch.geometry["channels"].items():
        enc = encoding.setdefault(channel, {})
        enc.setdefault("condition", []).append({"test": test, "value": values["selected"]})
        if "field" in enc:
            continue
        if values.get("deselected") is not None:
            enc["value"] = values["deselected"]
        elif channel == "color" and "value" not in enc:
            enc["value"] = DEFAULT_MARK_COLOR


def _apply_axes(layer: dict, spec: RenderSpec) -> None:
    names = {"x_axis": "x", "y_axis": "y"}
    for element, cfg in sorted(spec.axis_overrides.items()):
        channel = names.get(element)
        if channel is None or channel not in layer["encoding"]:
            continue
        axis = layer["encoding"][channel].setdefault("axis", {})
        if cfg.tick_count is not None:
            axis["tickCount"] = cfg.tick_count
        if cfg.grid is not None:
            axis["grid"] = cfg.grid
        if cfg.grid_dash is not None:
            axis["gridDash"] = list(cfg.grid_dash)
        if cfg.grid_color is not None:
            axis["gridColor"] = cfg.grid_color
        if cfg.grid_width is not None:
            axis["gridWidth"] = cfg.grid_width
        if cfg.grid_opacity is not None:
            axis["gridOpacity"] = cfg.grid_opacity


def _without_none(d: dict) -> dict:
    return {k: v for k, v in d.items() if v is not None}


def _rule(spec: RenderSpec, layer: RenderLayer) -> dict:
    g, s = layer.geometry, layer.style
    axis = g["axis"]
    enc = _x_encoding(spec) if axis == "x" else _y_encoding()
    mark = _without_none(
        {"type": "rule", "color": s.get("color"), "strokeWidth": s.get("width"), "strokeDash": s.get("dash"), "opacity": s.get("opacity")}
    )
    return {"data": {"values": [{axis: g["value"]}]}, "mark": mark, "encoding": {axis: enc}}


def _rect(spec: RenderSpec, layer: RenderLayer) -> dict:
    g, s = layer.geometry, layer.style
    datum = {k: g[k] for k in ("x", "x2", "y", "y2") if k in g}
    enc: dict[str, Any] = {}
    if "x" in datum:
        enc["x"] = _x_encoding(spec)
    if "x2" in datum:
        enc["x2"] = {"field": "x2"}
    if "y" in datum:
        enc["y"] = _y_encoding()
    if "y2" in datum:
        enc["y2"] = {"field": "y2"}
    mark = _without_none(
        {
            "type": "rect",
            "fill": s.get("fill"),
            "fillOpacity": s.get("fill_opacity"),
            "stroke": s.get("stroke"),
            "strokeWidth": s.get("stroke_width"),
        }
    )
    return {"data": {"values": [datum]}, "mark": mark, "encoding": enc}


def _segment(spec: RenderSpec, layer: RenderLayer) -> dict:
    g, s = layer.geometry, layer.style
    values = [{"x": g["x"], "y": g["y"]}, {"x": g["x2"], "y": g["y2"]}]
    enc: dict[str, Any] = {"x": _x_encoding(spec), "y": _y_encoding()}
    mark = _without_none(
        {"type": "line", "strokeWidth": s.get("width"), "strokeDash": s.get("dash"), "opacity": s.get("opacity")}
    )
    if s.get("color") is not None:
        mark["color"] = s["color"]
    elif g.get("group") is not None:
        enc["color"] = {"datum": g["group"]}
    else:
        mark["color"] = TREND_COLOR
    return {"data": {"values": values}, "mark": mark, "encoding": enc}


def _text(spec: RenderSpec, layer: RenderLayer) -> dict:
    g, s = layer.geometry, layer.style
    mark = _without_none(
        {
            "type": "text",
            "align": _ALIGN.get(s.get("anchor"), "left"),
            "dx": s.get("dx"),
            "dy": s.get("dy"),
            "fontSize": s.get("font_size"),
            "color": s.get("color"),
        }
    )
    return {
        "data": {"values": [{"x": g["x"], "y": g["y"], "text": g["text"]}]},
        "mark": mark,
        "encoding": {"x": _x_encoding(spec), "y": _y_encoding(), "text": {"field": "text"}},
    }


def _symbol_mark(s) -> dict:
    return _without_none(
        {"type": "point", "shape": s.get("shape"), "size": s.get("size"), "color": s.get("color"), "filled": True}
    )


def _points(spec: RenderSpec, layer: RenderLayer) -> dict:
    return {
        "data": {"values": [dict(p) for p in layer.geometry["points"]]},
        "mark": _symbol_mark(layer.style),
        "encoding": {"x": _x_encoding(spec), "y": _y_encoding()},
    }


def _legend(spec: RenderSpec, layer: RenderLayer) -> dict:
    g, s = layer.geometry, layer.style
    label = g["label"]
    mark = _symbol_mark(s)
    # The glyphs already exist in the symbol layer; this layer only feeds the legend.
    mark["opacity"] = 0
    legend = _without_none(
        {"title": label, "symbolFillColor": s.get("color"), "symbolStrokeColor": s.get("color"), "symbolOpacity": 1}
    )
    return {
        "data": {"values": [dict(p, label=label) for p in g["points"]]},
        "mark": mark,
        "encoding": {
            "x": _x_encoding(spec),
            "y": _y_encoding(),
            "shape": {"field": "label", "type": "nominal", "scale": {"range": [s.get("shape")]}, "legend": legend},
        },
    }


_EMITTERS = {
    "rule": _rule,
    "rect": _rect,
    "line_segment": _segment,
    "text": _text,
    "point_overlay": _points,
    "legend_entry": _legend,
}


def build_vegalite(spec: RenderSpec, registry=None) -> dict:
    """The Vega-Lite spec as a Python dict."""
    base = spec.base
    if registry is not None:
        ext = registry.extension("chart_type", base.chart_type)
    else:
        ext = None
    if ext is not None:
        rule = ext.lowering.get("vegalite")
        if rule is None:
            raise ChartMarkError(
                error("BACKEND_UNSUPPORTED_CHART", "/chart/type", f"chart type {base.chart_type!r} has no Vega-Lite rule")
            )
        head = rule(base)
    else:
        head = base_layer(spec)
    x_temporal = base.x_kind == "temporal"
    extra: list[dict] = []
    for layer in spec.layers:
        custom = None
        if registry is not None:
            op_ext = registry.extension("operation", layer.operation)
            if op_ext is not None and "vegalite" in op_ext.lowering:
                custom = op_ext.lowering["vegalite"](layer)
        if custom is not None:
            extra.append(custom)
        elif layer.kind == "encoding_patch":
            _fold_patch(head, layer, x_temporal)
        elif layer.kind in _EMITTERS:
            extra.append(_EMITTERS[layer.kind](spec, layer))
        else:
            raise ChartMarkError(
                error("UNSUPPORTED_LAYER_KIND", "", f"layer kind {layer.kind!r} from {layer.operation!r} has no Vega-Lite rule")
            )
    if "encoding" in head:
        _apply_axes(head, spec)
    out: dict[str, Any] = {"$schema": SCHEMA_URL, "title": base.title}
    if not extra:
        out.update(head)
        return out
    out["layer"] = [head] + extra
    if any(layer.kind == "legend_entry" for layer in spec.layers):
        out["resolve"] = {"scale": {"shape": "independent"}}
    return out


def emit_vegalite(spec: RenderSpec, registry=None) -> str:
    return canonical_dumps(build_vegalite(spec, registry))
