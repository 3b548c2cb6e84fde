"""Canonical JSON text: sorted keys, no insignificant whitespace."""

from __future__ import annotations

import json
from typing import Any


def canonical_dumps(obj: Any) -> str:
    # json uses repr() for floats, which is the shortest round-trip form.
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False, allow_nan=False)
