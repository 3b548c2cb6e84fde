"""Session-scoped vocabulary and extension registry.

A :class:`Registry` owns every name the compiler accepts: chart types,
operation names, summary subtypes, and code-generation backends. Core names
are fixed; extensions may only add new names together with the rules that
give them meaning. Each compiler session holds its own registry, so
registering an extension in one session leaves no trace in another.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from typing import Any, Callable, Mapping, Sequence

from . import ast
from .errors import ChartMarkError, error

EXTENSION_KINDS = ("chart_type", "operation", "subtype")


@dataclass(frozen=True)
class ExtensionDescriptor:
    """One extension: a new name plus the rules that give it meaning.

    ``validator`` receives the AST node using the name (an ``Operation`` for
    operations, the ``Chart`` for chart types, the ``Task`` for subtypes) and the
    whole document; returning False yields an ``EXT_VALIDATION_FAILED``
    diagnostic.

    ``lowering`` maps backend names to rules. For operations the ``"ir"`` rule is
    mandatory and has the signature ``rule(ctx) -> list[RenderLayer]``; rules
    for other backends receive one of the operation's layers and return the
    backend's fragment for it (for Vega-Lite, a layer dict) or None to fall back
    to the backend's generic handling. For chart types a ``"vegalite"`` rule
    ``rule(base) -> dict`` supplies the base mark/encoding.

    ``aggregate`` is used by subtype extensions: it maps the selected y values
    to the summary scalar.
    """

    kind: str
    name: str
    validator: Callable[..., bool] | None = None
    lowering: Mapping[str, Callable[..., Any]] = field(default_factory=dict)
    aggregate: Callable[[Sequence[float]], float] | None = None
    unsupported_charts: frozenset[str] = frozenset()


class Registry:
    """Names and rules available to one compiler session."""

    def __init__(self) -> None:
        self._lock = threading.Lock()
        self._sealed = False
        self._extensions: dict[tuple[str, str], ExtensionDescriptor] = {}
        self._backends: dict[str, Callable[[Any], str]] = {}
        # Imported here: the backend package itself depends on this module.
        from .backend import builtin_backends

        self._backends.update(builtin_backends(self))

    # -- vocabulary ---------------------------------------------------------

    def chart_types(self) -> list[str]:
        names = set(ast.CHART_TYPES)
        names.update(n for (k, n) in self._extensions if k == "chart_type")
        return sorted(names)

    def operations(self) -> list[str]:
        names = set(ast.OPERATIONS)
        names.update(n for (k, n) in self._extensions if k == "operation")
        return sorted(names)

    def summary_subtypes(self) -> list[str]:
        names = set(ast.SUMMARY_SUBTYPES)
        names.update(n for (k, n) in self._extensions if k == "subtype")
        return sorted(names)

    def is_chart_type(self, name: str) -> bool:
        return name in ast.CHART_TYPES or ("chart_type", name) in self._extensions

    def is_operation(self, name: str) -> bool:
        return name in ast.OPERATIONS or ("operation", name) in self._extensions

    def is_summary_subtype(self, name: str) -> bool:
        return name in ast.SUMMARY_SUBTYPES or ("subtype", name) in self._extensions

    def extension(self, kind: str, name: str) -> ExtensionDescriptor | None:
        return self._extensions.get((kind, name))

    # -- mutation -----------------------------------------------------------

    def register_extension(self, desc: ExtensionDescriptor) -> None:
        if desc.kind not in EXTENSION_KINDS:
            raise ChartMarkError(error("EXT_INVALID", "", f"unknown extension kind {desc.kind!r}"))
        if not desc.name:
            raise ChartMarkError(error("EXT_INVALID", "", "extension name is empty"))
        if desc.kind == "operation" and "ir" not in desc.lowering:
            raise ChartMarkError(
                error("EXT_MISSING_LOWERING", "", f"operation {desc.name!r} has no lowering rule for the 'ir' backend")
            )
        with self._lock:
            self._check_open()
            if self._collides(desc.kind, desc.name):
                raise ChartMarkError(error("EXT_DUPLICATE", "", f"{desc.kind} {desc.name!r} is already registered"))
            self._extensions[(desc.kind, desc.name)] = desc

    def register_backend(self, name: str, codegen: Callable[[Any], str]) -> None:
        with self._lock:
            self._check_open()
            if name in self._backends:
                raise ChartMarkError(error("BACKEND_DUPLICATE", "", f"backend {name!r} is already registered"))
            self._backends[name] = codegen

    def seal(self) -> Registry:
        """Freeze the registry; later registrations raise ``REGISTRY_SEALED``."""
        self._sealed = True
        return self

    @property
    def sealed(self) -> bool:
        return self._sealed

    def backend(self, name: str) -> Callable[[Any], str]:
        try:
            return self._backends[name]
        except KeyError:
            raise ChartMarkError(
                error("BACKEND_UNKNOWN", "", f"unknown backend {name!r}; available: {', '.join(self.backends())}")
            ) from None

    def backends(self) -> list[str]:
        return sorted(self._backends)

    def _check_open(self) -> None:
        if self._sealed:
            raise ChartMarkError(error("REGISTRY_SEALED", "", "registry is sealed"))

    def _collides(self, kind: str, name: str) -> bool:
        if kind == "chart_type":
            return self.is_chart_type(name)
        if kind == "operation":
            return self.is_operation(name)
        return self.is_summary_subtype(name)


_default: Registry | None = None


def default_registry() -> Registry:
    """A sealed registry holding only the core vocabulary."""
    global _default
    if _default is None:
        _default = Registry().seal()
    return _default


def registered_chart_types(registry: Registry | None = None) -> list[str]:
    return (registry or default_registry()).chart_types()


def register_extension(desc: ExtensionDescriptor, registry: Registry) -> None:
    registry.register_extension(desc)
