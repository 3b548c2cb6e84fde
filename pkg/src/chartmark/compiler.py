"""One compiler session: a registry plus the parse/validate/resolve/lower/emit pipeline."""

from __future__ import annotations

from .ast import AnnotatedChart, Chart
from .backend import RenderSpec, lower
from .errors import ChartMarkError, Diagnostic
from .parser import parse, serialize
from .registry import ExtensionDescriptor, Registry
from .resolver import ResolvedAnnotation, resolve
from .validate import errors_only, validate_document


class Compiler:
    """Compile ChartMark documents with a private registry.

    >>> c = Compiler()
    >>> c.register_extension(add_stroke_extension())   # doctest: +SKIP
    >>> c.compile(text)                                 # doctest: +SKIP
    """

    def __init__(self, registry: Registry | None = None):
        self.registry = registry if registry is not None else Registry()
        self.warnings: list[Diagnostic] = []

    def register_extension(self, desc: ExtensionDescriptor) -> None:
        self.registry.register_extension(desc)

    def register_backend(self, name: str, codegen) -> None:
        self.registry.register_backend(name, codegen)

    def chart_types(self) -> list[str]:
        return self.registry.chart_types()

    def parse(self, text: str | bytes) -> AnnotatedChart:
        return parse(text, self.registry)

    def serialize(self, doc: AnnotatedChart) -> str:
        return serialize(doc)

    def diagnose(self, source: str | bytes | AnnotatedChart) -> list[Diagnostic]:
        """Parse (if needed) and validate; every finding, never raises for document problems."""
        if isinstance(source, AnnotatedChart):
            doc = source
        else:
            try:
                doc = self.parse(source)
            except ChartMarkError as exc:
                return exc.diagnostics
        return validate_document(doc, self.registry)

    def validate(self, doc: AnnotatedChart) -> list[Diagnostic]:
        return validate_document(doc, self.registry)

    def resolve(self, doc: AnnotatedChart) -> list[ResolvedAnnotation]:
        return resolve(doc, self.registry)

    def lower(self, doc: AnnotatedChart) -> RenderSpec:
        """Validate, resolve and lower; raises :class:`ChartMarkError` on any error."""
        report = self.validate(doc)
        errors = errors_only(report)
        if errors:
            raise ChartMarkError(errors)
        resolved = self.resolve(doc)
        self.warnings = [d for d in report if not d.is_error] + [w for r in resolved for w in r.warnings]
        return lower(doc, resolved, self.registry)

    def compile(self, source: str | bytes | AnnotatedChart, backend: str = "vegalite") -> str:
        doc = source if isinstance(source, AnnotatedChart) else self.parse(source)
        codegen = self.registry.backend(backend)
        return codegen(self.lower(doc))

    def compile_base(self, chart: Chart, backend: str = "vegalite") -> str:
        return self.compile(AnnotatedChart(chart, ()), backend)


def compile_document(source, backend: str = "vegalite", registry: Registry | None = None) -> str:
    return Compiler(registry).compile(source, backend)


def emit_base_chart(chart: Chart, registry: Registry | None = None) -> str:
    return Compiler(registry).compile_base(chart)
