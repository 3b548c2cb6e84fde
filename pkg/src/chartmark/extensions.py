"""Ready-made extensions.

``add_stroke`` outlines selected pie slices. It is built the way any
extension is: choose the components (reuse Task/Data/Target, take the stroke
settings from ``marker.rect``), register the name, and supply the lowering
rule. The rule emits an ``encoding_patch`` on the ``stroke`` and
``strokeWidth`` channels, which the Vega-Lite generator folds into the base
layer as conditional encodings.
"""

from __future__ import annotations

from .backend.lowering import LoweringContext
from .registry import ExtensionDescriptor

STROKE_COLOR = "black"
STROKE_WIDTH = 2


def _lower_add_stroke(ctx: LoweringContext):
    if not ctx.selection:
        return []
    rect = ctx.marker.rect
    color = rect.stroke if rect is not None and rect.stroke is not None else STROKE_COLOR
    width = rect.strokeWidth if rect is not None and rect.strokeWidth is not None else STROKE_WIDTH
    geometry = {
        "filter": ctx.canonical_filter(),
        "channels": {
            "stroke": {"selected": color, "deselected": None},
            "strokeWidth": {"selected": width, "deselected": 0},
        },
    }
    return [ctx.layer("encoding_patch", geometry)]


def _data_items_only(op, doc) -> bool:
    return op.target.type == "data_items"


def add_stroke_extension() -> ExtensionDescriptor:
    return ExtensionDescriptor(
        kind="operation",
        name="add_stroke",
        validator=_data_items_only,
        lowering={"ir": _lower_add_stroke},
    )
