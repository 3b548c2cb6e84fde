"""Reconstructions of the annotated charts used as reference examples.

Data values are synthetic. They were chosen so every property an entry is
meant to show is checkable (a score below 60, monthly values straddling 190,
data inside Jun-Oct 2024 at 240-280).

Each entry has a ChartMark document and two frozen outputs, the Vega-Lite
spec and the IR, stored byte-exact under ``data/goldens``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from ..compiler import Compiler
from ..extensions import add_stroke_extension

_EXTENSIONS = {"add_stroke": add_stroke_extension}


@dataclass(frozen=True)
class CorpusEntry:
    name: str
    source_figure: str
    summary: str
    document: str
    extensions: tuple[str, ...]
    golden_vegalite: str | None
    golden_ir: str | None
    golden_vegalite_path: Path
    golden_ir_path: Path

    def compiler(self) -> Compiler:
        """A fresh session with this entry's extensions registered."""
        c = Compiler()
        for name in self.extensions:
            c.register_extension(_EXTENSIONS[name]())
        return c

    def compile(self, backend: str = "vegalite") -> str:
        return self.compiler().compile(self.document, backend)


def data_dir() -> Path:
    return Path(str(resources.files(__package__) / "data"))


def _read(path: Path) -> str | None:
    return path.read_text(encoding="utf-8") if path.exists() else None


def corpus_entries() -> list[CorpusEntry]:
    base = data_dir()
    manifest = json.loads((base / "manifest.json").read_text(encoding="utf-8"))
    out = []
    for e in manifest["entries"]:
        vl_path = base / e["golden_vegalite"]
        ir_path = base / e["golden_ir"]
        out.append(
            CorpusEntry(
                name=e["name"],
                source_figure=e["source_figure"],
                summary=e.get("summary", ""),
                document=(base / e["document"]).read_text(encoding="utf-8"),
                extensions=tuple(e.get("extensions", ())),
                golden_vegalite=_read(vl_path),
                golden_ir=_read(ir_path),
                golden_vegalite_path=vl_path,
                golden_ir_path=ir_path,
            )
        )
    return out


def corpus_entry(name: str) -> CorpusEntry:
    for e in corpus_entries():
        if e.name == name:
            return e
    raise KeyError(name)


def freeze_goldens() -> list[str]:
    """Recompile every entry and overwrite its golden files; returns the names written."""
    written = []
    for e in corpus_entries():
        e.golden_vegalite_path.parent.mkdir(parents=True, exist_ok=True)
        e.golden_vegalite_path.write_text(e.compile("vegalite"), encoding="utf-8")
        e.golden_ir_path.write_text(e.compile("ir"), encoding="utf-8")
        written.append(e.name)
    return written
