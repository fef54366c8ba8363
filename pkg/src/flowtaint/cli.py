"""Command-line interface.

Exit codes: 0 clean, 1 taint findings, 2 validation violations,
3 usage, parse or I/O errors.
"""

from __future__ import annotations

import argparse
import os
import sys
from typing import Sequence, TextIO

from flowtaint.ingest import ModelParseError, load_model_file
from flowtaint.report import (
    build_report,
    export_dfd_dot,
    export_goal_model_dot,
    render_structured,
    render_text,
)
from flowtaint.taint import analyse_model
from flowtaint.traversal import enumerate_sequences
from flowtaint.validation import check_model

EXIT_CLEAN = 0
EXIT_FINDINGS = 1
EXIT_VIOLATIONS = 2
EXIT_ERROR = 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        raise UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


def _parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="flowtaint",
        description="Find potentially tainted data flows in a DFD put in context "
                    "with usability and requirements models.",
    )
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("validate", help="check a model for well-formedness")
    p.add_argument("file")

    p = sub.add_parser("sequences", help="list data flow sequences")
    p.add_argument("file")

    p = sub.add_parser("analyse", help="run the pre-/post-process taint analysis")
    p.add_argument("file")
    p.add_argument("--format", choices=("text", "json"), default="text")

    p = sub.add_parser("export", help="emit a DOT diagram")
    p.add_argument("file")
    p.add_argument("--view", choices=("dfd", "goals"), required=True)
    p.add_argument("--with-findings", action="store_true",
                   help="highlight tainted flows (dfd view)")
    return parser


def _use_color(stream: TextIO) -> bool:
    if os.environ.get("FLOWTAINT_NO_COLOR"):
        return False
    return hasattr(stream, "isatty") and stream.isatty()


def run(argv: Sequence[str], stdout: TextIO | None = None, stderr: TextIO | None = None) -> int:
    out = stdout or sys.stdout
    err = stderr or sys.stderr
    try:
        args = _parser().parse_args(list(argv))
    except UsageError as exc:
        print(exc, file=err)
        return EXIT_ERROR
    except SystemExit as exc:  # --help
        return EXIT_CLEAN if not exc.code else EXIT_ERROR

    try:
        model = load_model_file(args.file)
    except OSError as exc:
        print(f"flowtaint: cannot read {args.file}: {exc.strerror or exc}", file=err)
        return EXIT_ERROR
    except UnicodeDecodeError as exc:
        print(f"flowtaint: {args.file} is not UTF-8: {exc}", file=err)
        return EXIT_ERROR
    except ModelParseError as exc:
        print(f"flowtaint: cannot parse {args.file}", file=err)
        for issue in exc.issues:
            print(f"  {issue}", file=err)
        return EXIT_ERROR

    violations = check_model(model)
    if violations:
        print(f"flowtaint: {len(violations)} validation violation(s) in {args.file}", file=err)

    if args.command == "validate":
        if violations:
            print(render_text(build_report(model, violations)), end="", file=out)
            return EXIT_VIOLATIONS
        print(f"{model.name}: no violations", file=out)
        return EXIT_CLEAN

    if args.command == "sequences":
        if violations:
            print(render_text(build_report(model, violations)), end="", file=out)
            return EXIT_VIOLATIONS
        report = build_report(model, sequences=enumerate_sequences(model))
        print(render_text(report, color=_use_color(out)), end="", file=out)
        return EXIT_CLEAN

    if args.command == "analyse":
        if violations:
            report = build_report(model, violations)
        else:
            report = build_report(model, analysis=analyse_model(model))
        if args.format == "json":
            print(render_structured(report), end="", file=out)
        else:
            print(render_text(report, color=_use_color(out)), end="", file=out)
        if violations:
            return EXIT_VIOLATIONS
        return EXIT_FINDINGS if report.findings else EXIT_CLEAN

    # export
    if violations:
        for v in violations:
            print(f"  {v}", file=err)
        return EXIT_VIOLATIONS
    if args.view == "goals":
        print(export_goal_model_dot(model), end="", file=out)
        return EXIT_CLEAN
    findings = analyse_model(model).findings if args.with_findings else None
    print(export_dfd_dot(model, findings), end="", file=out)
    return EXIT_FINDINGS if findings else EXIT_CLEAN


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
