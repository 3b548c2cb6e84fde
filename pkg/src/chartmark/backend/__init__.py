"""Render IR, lowering rules and code generators."""

from __future__ import annotations

from ..canonical import canonical_dumps
from .ir import AxisConfig, BaseChartSpec, RenderLayer, RenderSpec
from .lowering import LoweringContext, base_spec, lower
from .vegalite import build_vegalite, emit_vegalite


def emit_ir(spec: RenderSpec) -> str:
    return canonical_dumps(spec.to_value())


def builtin_backends(registry) -> dict:
    return {
        "vegalite": lambda spec: emit_vegalite(spec, registry),
        "ir": emit_ir,
    }


__all__ = [
    "AxisConfig",
    "BaseChartSpec",
    "LoweringContext",
    "RenderLayer",
    "RenderSpec",
    "base_spec",
    "build_vegalite",
    "builtin_backends",
    "emit_ir",
    "emit_vegalite",
    "lower",
]
