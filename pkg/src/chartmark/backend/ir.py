"""Backend-neutral render IR.

A :class:`RenderSpec` is what every code generator consumes: the base chart,
an ordered list of :class:`RenderLayer` (one or more per lowered operation,
in document order) and per-axis overrides. Geometry is in data space.

The canonical JSON form produced by :func:`RenderSpec.to_value` is the "ir"
backend's output and a stable schema; see README for the field reference.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Mapping

LAYER_KINDS = ("rule", "rect", "line_segment", "text", "point_overlay", "encoding_patch", "legend_entry")

IR_VERSION = 1


@dataclass(frozen=True)
class BaseChartSpec:
    chart_type: str
    mark: str
    title: str
    x_title: str
    y_title: str
    x_type: str
    # Column classification before any mark-specific adjustment.
    x_kind: str
    group_title: str | None
    values: tuple[Mapping[str, Any], ...] = ()

    def to_value(self) -> dict:
        return {
            "chart_type": self.chart_type,
            "mark": self.mark,
            "title": self.title,
            "x_title": self.x_title,
            "y_title": self.y_title,
            "x_type": self.x_type,
            "x_kind": self.x_kind,
            "group_title": self.group_title,
            "values": [dict(v) for v in self.values],
        }


@dataclass(frozen=True)
class RenderLayer:
    annotation_id: str
    operation_index: int
    operation: str
    kind: str
    geometry: Mapping[str, Any]
    style: Mapping[str, Any] = field(default_factory=dict)

    @property
    def origin(self) -> tuple[str, int]:
        return (self.annotation_id, self.operation_index)

    def to_value(self) -> dict:
        return {
            "origin": {"annotation_id": self.annotation_id, "operation_index": self.operation_index},
            "operation": self.operation,
            "kind": self.kind,
            "geometry": dict(self.geometry),
            "style": dict(self.style),
        }


@dataclass(frozen=True)
class AxisConfig:
    tick_count: int | None = None
    grid: bool | None = None
    grid_dash: tuple[float, ...] | None = None
    grid_color: str | None = None
    grid_width: float | None = None
    grid_opacity: float | None = None

    def merged(self, other: AxisConfig) -> AxisConfig:
        """``other`` wins wherever it sets a value."""
        vals = {k: getattr(other, k) if getattr(other, k) is not None else getattr(self, k) for k in self.__dataclass_fields__}
        return AxisConfig(**vals)

    def to_value(self) -> dict:
        out = {}
        for k in self.__dataclass_fields__:
            v = getattr(self, k)
            if v is not None:
                out[k] = list(v) if isinstance(v, tuple) else v
        return out


@dataclass(frozen=True)
class RenderSpec:
    base: BaseChartSpec
    layers: tuple[RenderLayer, ...] = ()
    axis_overrides: Mapping[str, AxisConfig] = field(default_factory=dict)

    def to_value(self) -> dict:
        return {
            "ir_version": IR_VERSION,
            "base": self.base.to_value(),
            "layers": [layer.to_value() for layer in self.layers],
            "axis_overrides": {k: v.to_value() for k, v in sorted(self.axis_overrides.items())},
        }

    def layers_of(self, annotation_id: str) -> list[RenderLayer]:
        return [layer for layer in self.layers if layer.annotation_id == annotation_id]
