"""Diagnostics and the exception that carries them."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable


@dataclass(frozen=True)
class Diagnostic:
    """A single finding about a document.

    ``path`` is a JSON-pointer style locator (``/annotations/1/id``); the
    empty string addresses the document root.
    """

    code: str
    path: str
    message: str
    severity: str = "error"
    line: int | None = None
    column: int | None = None

    @property
    def is_error(self) -> bool:
        return self.severity == "error"

    def to_dict(self) -> dict:
        out = {
            "code": self.code,
            "path": self.path,
            "message": self.message,
            "severity": self.severity,
        }
        if self.line is not None:
            out["line"] = self.line
        if self.column is not None:
            out["column"] = self.column
        return out


# The parser reports through the same record.
ParseError = Diagnostic


class ChartMarkError(Exception):
    """Raised when a stage cannot proceed; carries every diagnostic found."""

    def __init__(self, diagnostics: Iterable[Diagnostic] | Diagnostic):
        if isinstance(diagnostics, Diagnostic):
            diagnostics = [diagnostics]
        self.diagnostics: list[Diagnostic] = list(diagnostics)
        summary = "; ".join(f"{d.code} at {d.path or '/'}: {d.message}" for d in self.diagnostics[:5])
        if len(self.diagnostics) > 5:
            summary += f" (+{len(self.diagnostics) - 5} more)"
        super().__init__(summary)

    @property
    def code(self) -> str:
        return self.diagnostics[0].code if self.diagnostics else ""

    @property
    def codes(self) -> list[str]:
        return [d.code for d in self.diagnostics]


def pointer(*parts: object) -> str:
    """Join path segments into a JSON pointer, escaping ``~`` and ``/``."""
    out = []
    for p in parts:
        s = str(p).replace("~", "~0").replace("/", "~1")
        out.append("/" + s)
    return "".join(out)


def error(code: str, path: str, message: str) -> Diagnostic:
    return Diagnostic(code, path, message)


def warning(code: str, path: str, message: str) -> Diagnostic:
    return Diagnostic(code, path, message, severity="warning")
