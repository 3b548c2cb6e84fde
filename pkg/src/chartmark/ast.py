"""Typed object model for ChartMark documents.

The hierarchy mirrors the JSON layering of a document:

    AnnotatedChart
      chart: Chart
      annotations: Annotation*
        task: Task          data: DataSpec (values: ValueUnit*)
        operations: Operation*
          target: Target    marker: Marker (line/text/symbol/rect)

Every node is a frozen dataclass. Construction never enforces the grammar's
semantic rules; :func:`chartmark.validate.validate_document` reports them as
diagnostics so that one pass can surface every problem in a document.
"""

from __future__ import annotations

import datetime as _dt
import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Mapping

# ----------------------------------------------------------------------------
# Core vocabulary
# ----------------------------------------------------------------------------

CHART_TYPES = ("bar", "grouped_bar", "line", "grouped_line", "scatter", "grouped_scatter", "pie")
GROUPED_CHART_TYPES = frozenset({"grouped_bar", "grouped_line", "grouped_scatter"})

TASK_TYPES = ("reference", "highlight", "description", "summary", "trend", "encoding")
SUMMARY_SUBTYPES = ("max", "min", "mean")

DATA_SOURCES = ("external", "derived", "internal", "none")
VALUE_TYPES = ("text", "image", "number", "config")

TARGET_TYPES = ("data_items", "coordinate", "chart_element", "annotation")
CHART_ELEMENTS = ("x_axis", "y_axis")

OPERATIONS = (
    "set_color",
    "set_opacity",
    "add_reference_line",
    "add_bounding_box",
    "add_shading",
    "add_trend_line",
    "add_text",
    "add_symbol",
    "add_legend",
    "configure_gridlines",
    "add_value_label",
)

SYMBOL_SHAPES = ("circle", "cross", "square", "triangle")
TEXT_ANCHORS = ("start", "middle", "end")

# ----------------------------------------------------------------------------
# Temporal values
# ----------------------------------------------------------------------------

_DATE_RE = re.compile(r"^(\d{4})-(\d{2})(?:-(\d{2}))?$")
_EPOCH = _dt.date(1970, 1, 1)


def parse_date(value: Any) -> int | None:
    """Epoch days for a ``YYYY-MM`` or ``YYYY-MM-DD`` string, else None.

    ``YYYY-MM`` denotes the first day of that month.
    """
    if not isinstance(value, str):
        return None
    m = _DATE_RE.match(value)
    if not m:
        return None
    year, month, day = int(m.group(1)), int(m.group(2)), int(m.group(3) or 1)
    try:
        return (_dt.date(year, month, day) - _EPOCH).days
    except ValueError:
        return None


def is_date(value: Any) -> bool:
    return parse_date(value) is not None


def format_epoch_days(days: float) -> str:
    """ISO text for a (possibly fractional) epoch-day value."""
    whole = _dt.datetime(1970, 1, 1) + _dt.timedelta(days=days)
    if whole.hour == whole.minute == whole.second == whole.microsecond == 0:
        return whole.date().isoformat()
    return whole.replace(microsecond=0).isoformat()


def is_number(value: Any) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool)


def classify_x(values: tuple) -> str:
    """Classify an x column as ``quantitative``, ``temporal``, ``nominal`` or ``mixed``."""
    if not values:
        return "quantitative"
    if all(is_number(v) for v in values):
        return "quantitative"
    if all(isinstance(v, str) for v in values):
        if all(is_date(v) for v in values):
            return "temporal"
        return "nominal"
    return "mixed"


# ----------------------------------------------------------------------------
# Chart entity
# ----------------------------------------------------------------------------


@dataclass(frozen=True)
class Chart:
    title: str
    type: str
    x_name: str
    y_name: str
    x_data: tuple = ()
    y_data: tuple = ()
    group_name: str | None = None
    group_data: tuple | None = None
    extra: Mapping[str, Any] = field(default_factory=dict)

    @cached_property
    def x_kind(self) -> str:
        return classify_x(self.x_data)

    @cached_property
    def x_numeric(self) -> tuple[float | None, ...]:
        """x projected onto a number line: raw numbers, or epoch days when temporal."""
        kind = self.x_kind
        if kind == "quantitative":
            return tuple(float(v) for v in self.x_data)
        if kind == "temporal":
            return tuple(float(parse_date(v)) for v in self.x_data)
        return tuple(None for _ in self.x_data)

    @property
    def grouped(self) -> bool:
        return self.group_data is not None

    @property
    def n_rows(self) -> int:
        return min(len(self.x_data), len(self.y_data))

    def to_numeric_x(self, value: Any) -> float | None:
        """Project a coordinate value onto this chart's x number line."""
        if self.x_kind == "temporal":
            d = parse_date(value)
            return None if d is None else float(d)
        if self.x_kind == "quantitative" and is_number(value):
            return float(value)
        return None

    def from_numeric_x(self, value: float) -> Any:
        if self.x_kind == "temporal":
            return format_epoch_days(value)
        return value


# ----------------------------------------------------------------------------
# Annotation components
# ----------------------------------------------------------------------------


@dataclass(frozen=True)
class Task:
    type: str
    subType: str | None = None


@dataclass(frozen=True)
class ValueUnit:
    type: str
    content: Any = None
    url: str | None = None


@dataclass(frozen=True)
class DataSpec:
    source: str
    values: tuple[ValueUnit, ...] = ()

    def texts(self) -> list[str]:
        return [str(v.content) for v in self.values if v.type == "text" and v.content is not None]


@dataclass(frozen=True)
class Target:
    type: str
    filter: str | None = None
    x: Any = None
    x2: Any = None
    y: Any = None
    y2: Any = None
    element_id: str | None = None
    ref_id: str | None = None

    COORDINATE_KEYS = ("x", "x2", "y", "y2")

    def populated(self) -> dict[str, set[str]]:
        """Parameter groups that carry at least one value, keyed by target type."""
        groups: dict[str, set[str]] = {}
        if self.filter is not None:
            groups.setdefault("data_items", set()).add("filter")
        for key in self.COORDINATE_KEYS:
            if getattr(self, key) is not None:
                groups.setdefault("coordinate", set()).add(key)
        if self.element_id is not None:
            groups.setdefault("chart_element", set()).add("element_id")
        if self.ref_id is not None:
            groups.setdefault("annotation", set()).add("ref_id")
        return groups

    @property
    def coordinate_shape(self) -> str | None:
        """``line``, ``point``, ``interval``, ``region`` or None for an invalid combination."""
        keys = frozenset(k for k in self.COORDINATE_KEYS if getattr(self, k) is not None)
        return _COORD_SHAPES.get(keys)


_COORD_SHAPES = {
    frozenset({"x"}): "line",
    frozenset({"y"}): "line",
    frozenset({"x", "y"}): "point",
    frozenset({"x", "x2"}): "interval",
    frozenset({"y", "y2"}): "interval",
    frozenset({"x", "x2", "y", "y2"}): "region",
}


@dataclass(frozen=True)
class LineStyle:
    size: float | None = None
    dashed: bool | None = None
    color: str | None = None
    opacity: float | None = None


@dataclass(frozen=True)
class TextStyle:
    fontSize: float | None = None
    color: str | None = None
    dx: float | None = None
    dy: float | None = None
    anchor: str | None = None


@dataclass(frozen=True)
class SymbolStyle:
    shape: str | None = None
    size: float | None = None
    color: str | None = None


@dataclass(frozen=True)
class RectStyle:
    fill: str | None = None
    fillOpacity: float | None = None
    stroke: str | None = None
    strokeWidth: float | None = None


@dataclass(frozen=True)
class Marker:
    line: LineStyle | None = None
    text: TextStyle | None = None
    symbol: SymbolStyle | None = None
    rect: RectStyle | None = None

    GROUPS = ("line", "text", "symbol", "rect")


@dataclass(frozen=True)
class Operation:
    name: str
    target: Target
    marker: Marker = field(default_factory=Marker)


@dataclass(frozen=True)
class Annotation:
    id: str
    task: Task
    data: DataSpec
    operations: tuple[Operation, ...] = ()


@dataclass(frozen=True)
class AnnotatedChart:
    chart: Chart
    annotations: tuple[Annotation, ...] = ()

    def annotation(self, annotation_id: str) -> Annotation | None:
        for a in self.annotations:
            if a.id == annotation_id:
                return a
        return None

    def index_of(self, annotation_id: str) -> int:
        for i, a in enumerate(self.annotations):
            if a.id == annotation_id:
                return i
        raise KeyError(annotation_id)

    def with_annotations(self, annotations) -> AnnotatedChart:
        return AnnotatedChart(self.chart, tuple(annotations))
