"""Command-line front end.

    chartmark validate FILE
    chartmark compile FILE [--output PATH] [--backend NAME] [--base-only]
    chartmark chart-types

Exit codes: 0 success, 1 the document has errors, 2 I/O or usage error.
``validate`` prints its report (one JSON object per line) on stdout, since
the report is its product. ``compile`` keeps stdout for the artifact and
writes diagnostics, warnings included, to stderr.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Sequence, TextIO

from .ast import AnnotatedChart
from .canonical import canonical_dumps
from .compiler import Compiler
from .errors import ChartMarkError, Diagnostic

EXIT_OK = 0
EXIT_DOCUMENT = 1
EXIT_USAGE = 2


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="chartmark", description="Validate and compile ChartMark documents.")
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("validate", help="report every diagnostic for a document")
    v.add_argument("input", metavar="FILE")

    c = sub.add_parser("compile", help="compile a document with a backend")
    c.add_argument("input", metavar="FILE")
    c.add_argument("-o", "--output", metavar="PATH", help="write here instead of stdout")
    c.add_argument("--backend", default="vegalite", help="backend name (default: vegalite)")
    c.add_argument("--base-only", action="store_true", help="ignore annotations and emit the base chart")

    sub.add_parser("chart-types", help="list supported chart types")
    return p


def _emit(diags: Sequence[Diagnostic], stream: TextIO) -> None:
    for d in diags:
        stream.write(canonical_dumps(d.to_dict()) + "\n")


def _read(path: str, stderr: TextIO) -> str | None:
    try:
        return Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        stderr.write(f"chartmark: cannot read {path}: {exc}\n")
        return None


def cmd_validate(args, compiler: Compiler, stdout: TextIO, stderr: TextIO) -> int:
    text = _read(args.input, stderr)
    if text is None:
        return EXIT_USAGE
    diags = compiler.diagnose(text)
    _emit(diags, stdout)
    return EXIT_DOCUMENT if any(d.is_error for d in diags) else EXIT_OK


def cmd_compile(args, compiler: Compiler, stdout: TextIO, stderr: TextIO) -> int:
    text = _read(args.input, stderr)
    if text is None:
        return EXIT_USAGE
    try:
        codegen = compiler.registry.backend(args.backend)
    except ChartMarkError as exc:
        _emit(exc.diagnostics, stderr)
        return EXIT_USAGE
    try:
        doc = compiler.parse(text)
        if args.base_only:
            doc = AnnotatedChart(doc.chart, ())
        out = codegen(compiler.lower(doc))
    except ChartMarkError as exc:
        _emit(exc.diagnostics, stderr)
        return EXIT_DOCUMENT
    _emit(compiler.warnings, stderr)
    if args.output:
        try:
            Path(args.output).write_text(out, encoding="utf-8")
        except OSError as exc:
            stderr.write(f"chartmark: cannot write {args.output}: {exc}\n")
            return EXIT_USAGE
    else:
        stdout.write(out + "\n")
    return EXIT_OK


def cmd_chart_types(args, compiler: Compiler, stdout: TextIO, stderr: TextIO) -> int:
    for name in compiler.chart_types():
        stdout.write(name + "\n")
    return EXIT_OK


_COMMANDS = {"validate": cmd_validate, "compile": cmd_compile, "chart-types": cmd_chart_types}


def run(argv: Sequence[str] | None = None, stdout: TextIO | None = None, stderr: TextIO | None = None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    return _COMMANDS[args.command](args, Compiler(), stdout, stderr)


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
