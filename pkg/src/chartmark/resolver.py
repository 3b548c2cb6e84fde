"""Data resolution: selections, derived statistics, references and anchors.

Annotations are resolved in dependency order so that an annotation targeting
another one (a note attached to a trend line, say) can anchor itself on the
referenced annotation's geometry. Anchors always live in chart-data space.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from typing import Any, Mapping, Sequence

from .ast import AnnotatedChart, Annotation, Chart, Target, Task, ValueUnit, is_number
from .errors import ChartMarkError, Diagnostic, error, pointer, warning
from .filter_lang import FilterError, Row, chart_rows, eval_filter
from .registry import Registry, default_registry


@dataclass(frozen=True)
class TrendLine:
    slope: float
    intercept: float
    x_start: Any
    x_end: Any
    y_start: float
    y_end: float
    # Endpoints on the numeric x line (epoch days for temporal charts).
    x_start_num: float = 0.0
    x_end_num: float = 0.0

    def midpoint(self) -> tuple[float, float]:
        xm = (self.x_start_num + self.x_end_num) / 2
        return xm, self.slope * xm + self.intercept


@dataclass(frozen=True)
class DerivedResult:
    kind: str
    scalar: float | None = None
    per_group: Mapping[str, TrendLine] | None = None


@dataclass(frozen=True)
class Anchor:
    x: Any
    y: float
    source_annotation: str | None = None
    operation_index: int | None = None


@dataclass(frozen=True)
class ResolvedAnnotation:
    id: str
    task: Task
    rows: tuple[Row, ...] = ()
    derived: DerivedResult | None = None
    payload: tuple[ValueUnit, ...] = ()
    anchors: tuple[Anchor, ...] = ()
    # Rows selected by each data_items operation, keyed by operation index.
    selections: Mapping[int, tuple[Row, ...]] = field(default_factory=dict)
    # Where other annotations attach when they target this one.
    self_anchor: Anchor | None = None
    warnings: tuple[Diagnostic, ...] = ()

    def anchor_for(self, operation_index: int) -> Anchor | None:
        for a in self.anchors:
            if a.operation_index == operation_index:
                return a
        return None


# ----------------------------------------------------------------------------
# Reference graph
# ----------------------------------------------------------------------------


def references(annotation: Annotation) -> list[str]:
    """Ids of other annotations this one targets, in first-use order.

    A target naming the annotation itself points at its own earlier operations
    (a legend for its own symbols) and is not a dependency.
    """
    out: list[str] = []
    for op in annotation.operations:
        t = op.target
        if t.type == "annotation" and t.ref_id is not None and t.ref_id != annotation.id and t.ref_id not in out:
            out.append(t.ref_id)
    return out


def dangling_references(doc: AnnotatedChart) -> list[Diagnostic]:
    ids = {a.id for a in doc.annotations}
    out = []
    for i, ann in enumerate(doc.annotations):
        for j, op in enumerate(ann.operations):
            t = op.target
            if t.type == "annotation" and t.ref_id is not None and t.ref_id not in ids:
                out.append(
                    error(
                        "DANGLING_REF",
                        pointer("annotations", i, "operations", j, "target", "ref_id"),
                        f"annotation {ann.id!r} references unknown annotation {t.ref_id!r}",
                    )
                )
    return out


def _find_cycle(start: str, graph: Mapping[str, list[str]], alive: set[str]) -> list[str] | None:
    """Follow references from ``start`` depth-first; return the first cycle met as [a, b, ..., a]."""
    stack: list[str] = []
    on_stack: dict[str, int] = {}
    done: set[str] = set()

    def visit(node: str) -> list[str] | None:
        on_stack[node] = len(stack)
        stack.append(node)
        for nxt in graph.get(node, ()):
            if nxt not in alive or nxt in done:
                continue
            if nxt in on_stack:
                return stack[on_stack[nxt]:] + [nxt]
            found = visit(nxt)
            if found:
                return found
        stack.pop()
        del on_stack[node]
        done.add(node)
        return None

    return visit(start)


def reference_cycles(doc: AnnotatedChart) -> list[list[str]]:
    """Every disjoint reference cycle, each as a closed id path."""
    graph = {a.id: references(a) for a in doc.annotations}
    remaining = _unsorted(doc, graph)
    cycles = []
    alive = set(remaining)
    for ann in doc.annotations:
        if ann.id not in alive:
            continue
        cycle = _find_cycle(ann.id, graph, alive)
        if cycle:
            cycles.append(cycle)
            alive -= set(cycle)
    return cycles


def _kahn(doc: AnnotatedChart, graph: Mapping[str, list[str]]) -> tuple[list[int], set[str]]:
    index = {a.id: i for i, a in enumerate(doc.annotations)}
    pending = {a.id: len([r for r in graph[a.id] if r in index]) for a in doc.annotations}
    dependents: dict[str, list[str]] = {a.id: [] for a in doc.annotations}
    for a in doc.annotations:
        for r in graph[a.id]:
            if r in dependents:
                dependents[r].append(a.id)
    ready = [index[k] for k, n in pending.items() if n == 0]
    heapq.heapify(ready)
    order: list[int] = []
    while ready:
        i = heapq.heappop(ready)
        order.append(i)
        for dep in dependents[doc.annotations[i].id]:
            pending[dep] -= 1
            if pending[dep] == 0:
                heapq.heappush(ready, index[dep])
    left = {a.id for a in doc.annotations} - {doc.annotations[i].id for i in order}
    return order, left


def _unsorted(doc: AnnotatedChart, graph) -> set[str]:
    return _kahn(doc, graph)[1]


def order_annotations(doc: AnnotatedChart) -> list[Annotation]:
    """Annotations with every referenced annotation before its referrers.

    Ties are broken by document position, so a document without references
    keeps its order.
    """
    dangling = dangling_references(doc)
    if dangling:
        raise ChartMarkError(dangling)
    graph = {a.id: references(a) for a in doc.annotations}
    order, left = _kahn(doc, graph)
    if left:
        diags = []
        for cycle in reference_cycles(doc):
            diags.append(
                error(
                    "CYCLIC_REF",
                    pointer("annotations", doc.index_of(cycle[0])),
                    "reference cycle: " + " -> ".join(cycle),
                )
            )
        raise ChartMarkError(diags)
    return [doc.annotations[i] for i in order]


# ----------------------------------------------------------------------------
# Statistics
# ----------------------------------------------------------------------------


def compute_aggregate(kind: str, rows: Sequence[Row]) -> float:
    if not rows:
        raise ChartMarkError(error("RESOLVE_EMPTY_SELECTION", "", f"cannot compute {kind} of an empty selection"))
    ys = [r.y for r in rows]
    if kind == "mean":
        total = 0.0
        for y in ys:
            total += y
        return total / len(ys)
    if kind == "max":
        return max(ys)
    if kind == "min":
        return min(ys)
    raise ChartMarkError(error("UNKNOWN_SUBTYPE", "", f"unknown aggregate {kind!r}"))


def fit_trend(rows: Sequence[Row], grouped: bool) -> dict[str, TrendLine]:
    """Ordinary least-squares line per group.

    Groups keep order of first appearance; an ungrouped selection forms the
    single group ``""``.
    """
    groups: dict[str, list[Row]] = {}
    for r in rows:
        key = (r.group or "") if grouped else ""
        groups.setdefault(key, []).append(r)
    if not groups:
        raise ChartMarkError(error("TREND_TOO_FEW_POINTS", "", "no rows to fit"))
    out: dict[str, TrendLine] = {}
    for name, members in groups.items():
        label = f"group {name!r}" if grouped else "selection"
        if len(members) < 2:
            raise ChartMarkError(error("TREND_TOO_FEW_POINTS", "", f"{label} has {len(members)} point(s); need 2"))
        if any(r.x_num is None for r in members):
            raise ChartMarkError(error("TREND_NON_NUMERIC_X", "", f"{label} has categorical x values"))
        xs = [r.x_num for r in members]
        ys = [float(r.y) for r in members]
        if len(set(xs)) < 2:
            raise ChartMarkError(error("TREND_DEGENERATE", "", f"{label}: all x values are equal"))
        n = len(xs)
        x_mean = math.fsum(xs) / n
        y_mean = math.fsum(ys) / n
        sxy = math.fsum((x - x_mean) * (y - y_mean) for x, y in zip(xs, ys))
        sxx = math.fsum((x - x_mean) ** 2 for x in xs)
        slope = sxy / sxx
        intercept = y_mean - slope * x_mean
        lo = min(range(n), key=lambda k: xs[k])
        hi = max(range(n), key=lambda k: xs[k])
        out[name] = TrendLine(
            slope=slope,
            intercept=intercept,
            x_start=members[lo].x,
            x_end=members[hi].x,
            y_start=slope * xs[lo] + intercept,
            y_end=slope * xs[hi] + intercept,
            x_start_num=xs[lo],
            x_end_num=xs[hi],
        )
    return out


# ----------------------------------------------------------------------------
# Geometry helpers
# ----------------------------------------------------------------------------


def x_center(chart: Chart) -> Any:
    if chart.x_kind in ("quantitative", "temporal") and chart.n_rows:
        xs = chart.x_numeric
        return chart.from_numeric_x((min(xs) + max(xs)) / 2)
    if chart.x_kind == "nominal" and chart.n_rows:
        cats = list(dict.fromkeys(chart.x_data))
        return cats[(len(cats) - 1) // 2]
    return 0


def y_center(chart: Chart) -> float:
    if not chart.n_rows:
        return 0.0
    return (min(chart.y_data) + max(chart.y_data)) / 2


def _mid_x(chart: Chart, a: Any, b: Any) -> Any:
    na, nb = chart.to_numeric_x(a), chart.to_numeric_x(b)
    if na is None or nb is None:
        return a
    return chart.from_numeric_x((na + nb) / 2)


def centroid(chart: Chart, target: Target) -> tuple[Any, float]:
    if target.x is not None and target.x2 is not None:
        x = _mid_x(chart, target.x, target.x2)
    elif target.x is not None:
        x = target.x
    else:
        x = x_center(chart)
    if target.y is not None and target.y2 is not None and is_number(target.y) and is_number(target.y2):
        y = (target.y + target.y2) / 2
    elif target.y is not None:
        y = target.y
    else:
        y = y_center(chart)
    return x, y


def highest_row(rows: Sequence[Row]) -> Row | None:
    best = None
    for r in rows:
        if best is None or r.y > best.y:
            best = r
    return best


# ----------------------------------------------------------------------------
# Resolution
# ----------------------------------------------------------------------------


def aggregate_kind(task: Task, registry: Registry) -> str:
    if task.subType is not None and registry.is_summary_subtype(task.subType):
        return task.subType
    return "mean"


def _resolve_one(
    doc: AnnotatedChart,
    index: int,
    done: Mapping[str, ResolvedAnnotation],
    registry: Registry,
    all_rows: list[Row],
) -> ResolvedAnnotation:
    ann = doc.annotations[index]
    chart = doc.chart
    base = pointer("annotations", index)
    warns: list[Diagnostic] = []

    def fail(exc: ChartMarkError, where: str) -> ChartMarkError:
        return ChartMarkError(
            Diagnostic(d.code, where + d.path, f"annotation {ann.id!r}: {d.message}", d.severity) for d in exc.diagnostics
        )

    selections: dict[int, tuple[Row, ...]] = {}
    for j, op in enumerate(ann.operations):
        if op.target.type != "data_items" or op.target.filter is None:
            continue
        where = base + pointer("operations", j, "target", "filter")
        try:
            rows = eval_filter(op.target.filter, chart)
        except FilterError as exc:
            raise ChartMarkError(error(exc.code, where, f"annotation {ann.id!r}: {exc}")) from None
        if not rows:
            warns.append(warning("RESOLVE_EMPTY_SELECTION", where, f"filter {op.target.filter!r} selects no rows"))
        selections[j] = tuple(rows)

    if selections:
        picked = sorted({r.index for rows in selections.values() for r in rows})
        rows = tuple(all_rows[i] for i in picked)
    else:
        rows = tuple(all_rows) if ann.data.source == "derived" else ()

    derived = None
    if ann.data.source == "derived":
        if not rows:
            if not selections:
                warns.append(warning("RESOLVE_EMPTY_SELECTION", base + "/data", "chart has no rows to derive from"))
        elif ann.task.type == "trend":
            try:
                derived = DerivedResult("trend", per_group=fit_trend(rows, chart.grouped))
            except ChartMarkError as exc:
                raise fail(exc, base) from None
        else:
            kind = aggregate_kind(ann.task, registry)
            ext = registry.extension("subtype", kind)
            if ext is not None:
                if ext.aggregate is None:
                    raise ChartMarkError(
                        error("RESOLVE_UNSUPPORTED_SUBTYPE", base + "/task/subType", f"subtype {kind!r} has no aggregate rule")
                    )
                scalar = ext.aggregate([r.y for r in rows])
            else:
                scalar = compute_aggregate(kind, rows)
            derived = DerivedResult(kind, scalar=scalar)
            if kind in ("max", "min"):
                selections = {j: tuple(r for r in sel if r.y == scalar) for j, sel in selections.items()}

    self_anchor = _self_anchor(chart, ann, derived, rows, selections)

    anchors: list[Anchor] = []
    for j, op in enumerate(ann.operations):
        t = op.target
        anchor = None
        if t.type == "annotation" and t.ref_id is not None:
            src = self_anchor if t.ref_id == ann.id else (done[t.ref_id].self_anchor if t.ref_id in done else None)
            if src is not None:
                anchor = Anchor(src.x, src.y, source_annotation=t.ref_id, operation_index=j)
        elif t.type == "coordinate":
            x, y = centroid(chart, t)
            anchor = Anchor(x, y, operation_index=j)
        elif t.type == "data_items":
            top = highest_row(selections.get(j, ()))
            if top is not None:
                anchor = Anchor(top.x, top.y, operation_index=j)
        if anchor is not None:
            anchors.append(anchor)

    return ResolvedAnnotation(
        id=ann.id,
        task=ann.task,
        rows=rows,
        derived=derived,
        payload=ann.data.values,
        anchors=tuple(anchors),
        selections=selections,
        self_anchor=self_anchor,
        warnings=tuple(warns),
    )


def _self_anchor(chart, ann, derived, rows, selections) -> Anchor | None:
    if derived is not None and derived.per_group:
        first = next(iter(derived.per_group.values()))
        xm, ym = first.midpoint()
        return Anchor(chart.from_numeric_x(xm), ym, source_annotation=ann.id)
    if derived is not None and derived.scalar is not None:
        if derived.kind in ("max", "min"):
            for r in rows:
                if r.y == derived.scalar:
                    return Anchor(r.x, r.y, source_annotation=ann.id)
        return Anchor(x_center(chart), derived.scalar, source_annotation=ann.id)
    selected = [r for sel in selections.values() for r in sel]
    top = highest_row(sorted(selected, key=lambda r: r.index))
    if top is not None:
        return Anchor(top.x, top.y, source_annotation=ann.id)
    for op in ann.operations:
        if op.target.type == "coordinate":
            x, y = centroid(chart, op.target)
            return Anchor(x, y, source_annotation=ann.id)
    return None


def resolve(doc: AnnotatedChart, registry: Registry | None = None) -> list[ResolvedAnnotation]:
    """Resolve every annotation, in dependency order."""
    registry = registry or default_registry()
    ordered = order_annotations(doc)
    all_rows = chart_rows(doc.chart)
    done: dict[str, ResolvedAnnotation] = {}
    out = []
    for ann in ordered:
        res = _resolve_one(doc, doc.index_of(ann.id), done, registry, all_rows)
        done[ann.id] = res
        out.append(res)
    return out
