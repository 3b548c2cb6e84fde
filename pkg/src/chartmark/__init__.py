"""ChartMark: a compiler for annotated-chart documents.

Pipeline: ``parse`` -> ``validate_document`` -> ``resolve`` -> ``lower`` ->
backend (``vegalite`` or ``ir``). :class:`Compiler` bundles the stages with a
session-scoped :class:`Registry`.
"""

from .ast import AnnotatedChart, Annotation, Chart, DataSpec, Marker, Operation, Target, Task, ValueUnit
from .backend import RenderLayer, RenderSpec, emit_ir, emit_vegalite, lower
from .compiler import Compiler, compile_document, emit_base_chart
from .errors import ChartMarkError, Diagnostic
from .extensions import add_stroke_extension
from .filter_lang import Row, eval_filter, parse_filter
from .parser import parse, serialize
from .registry import ExtensionDescriptor, Registry, registered_chart_types
from .resolver import compute_aggregate, fit_trend, order_annotations, resolve
from .validate import validate_document

__version__ = "0.1.0"

__all__ = [
    "AnnotatedChart",
    "Annotation",
    "Chart",
    "ChartMarkError",
    "Compiler",
    "DataSpec",
    "Diagnostic",
    "ExtensionDescriptor",
    "Marker",
    "Operation",
    "Registry",
    "RenderLayer",
    "RenderSpec",
    "Row",
    "Target",
    "Task",
    "ValueUnit",
    "add_stroke_extension",
    "compile_document",
    "compute_aggregate",
    "emit_base_chart",
    "emit_ir",
    "emit_vegalite",
    "eval_filter",
    "fit_trend",
    "lower",
    "order_annotations",
    "parse",
    "parse_filter",
    "registered_chart_types",
    "resolve",
    "serialize",
    "validate_document",
]
