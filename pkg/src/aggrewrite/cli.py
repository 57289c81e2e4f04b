"""Command-line front end: detect, confirm, rewrite, write, optionally solve."""

from __future__ import annotations

import argparse
import os
import shlex
import subprocess
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Sequence

from . import oracle
from .detector import RewriteCandidate, find_candidate
from .parser import ERROR, PASSTHROUGH, parse, render, render_rule
from .rewriter import FreshNames, SplittabilityViolation, apply_results, rewrite
from .syntax import Program, predicate_signatures

EXIT_OK = 0
EXIT_PARSE = 1
EXIT_OUTPUT = 2
EXIT_SOLVER = 3


@dataclass
class CliConfig:
    input_paths: List[str]
    output_path: Optional[str] = None
    no_rewrite: bool = False
    no_prompt: bool = False
    use_anonymous_variable: bool = False
    aggregate_form: int = 1
    debug: bool = False
    run_solver: bool = False
    solver_command: str = "clingo"
    self_check: bool = False
    oracle_size_cap: int = oracle.DEFAULT_SIZE_CAP

    def __post_init__(self):
        if not self.input_paths:
            raise ValueError("at least one input encoding is required")


class Console:
    """Terminal I/O used by ``run``; tests substitute a scripted double."""

    def __init__(self, stdin=None, stdout=None, stderr=None):
        self.stdin = stdin or sys.stdin
        self.stdout = stdout or sys.stdout
        self.stderr = stderr or sys.stderr

    def write(self, text: str = ""):
        print(text, file=self.stdout, flush=True)

    def error(self, text: str):
        print(text, file=self.stderr, flush=True)

    def confirm(self, question: str) -> bool:
        self.stdout.write(f"{question} [y/N] ")
        self.stdout.flush()
        answer = self.stdin.readline()
        if not answer or not self.stdin.isatty():
            # the answer was not echoed by a terminal
            self.write()
        if not answer:
            return False
        return answer.strip().lower() in ("y", "yes")


@dataclass
class RunSummary:
    rules: int = 0
    candidates: int = 0
    rewritten: int = 0
    refused: int = 0
    declined: int = 0
    output_path: Optional[str] = None
    self_check: Optional[str] = None
    fresh: list = field(default_factory=list)


def derive_output_path(first_input, taken: Sequence = ()) -> Path:
    """``ham.lp`` -> ``ham.aagg.lp``; numbered when that path is taken."""
    path = Path(first_input)
    taken = {Path(p).resolve() for p in taken}
    stem, suffix = (path.stem, path.suffix) if path.suffix else (path.name, "")
    candidate = path.with_name(f"{stem}.aagg{suffix}")
    k = 0
    while candidate.exists() or candidate.resolve() in taken:
        k += 1
        candidate = path.with_name(f"{stem}.aagg.{k}{suffix}")
    return candidate


def _describe(candidate: RewriteCandidate) -> str:
    name, arity = candidate.predicate
    return (f"{name}/{arity}, b={candidate.bound}, counting variables "
            f"{', '.join(candidate.counting_vars)} at argument {candidate.counting_position}")


def run(config: CliConfig, console: Optional[Console] = None, summary: Optional[RunSummary] = None
        ) -> int:
    console = console or Console()
    summary = summary if summary is not None else RunSummary()
    statements = []
    failed = False
    for path in config.input_paths:
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            console.error(f"{path}: {exc.strerror or exc}")
            return EXIT_PARSE
        program, diagnostics = parse(text)
        for diag in diagnostics:
            if diag.severity == ERROR:
                console.error(f"{path}:{diag}")
                failed = True
            elif config.debug and diag.severity == PASSTHROUGH:
                console.write(f"{path}:{diag}")
        statements.extend(program.statements)
    if failed:
        return EXIT_PARSE
    original = Program(tuple(statements))
    summary.rules = len(original)

    names = FreshNames(predicate_signatures(original))
    results = []
    for index, rule in enumerate(original):
        candidate = find_candidate(rule, index)
        if candidate is None:
            if config.debug and not rule.is_raw:
                console.write(f"statement {index + 1}: no candidate")
            continue
        summary.candidates += 1
        if config.debug:
            console.write(f"statement {index + 1}: candidate {_describe(candidate)}")
        if config.no_rewrite:
            continue
        try:
            result = rewrite(original, candidate, config.aggregate_form,
                             config.use_anonymous_variable, names)
        except SplittabilityViolation as exc:
            summary.refused += 1
            console.write(f"statement {index + 1}: form {config.aggregate_form} refused "
                          f"({exc.verdict.reason}); rule kept unchanged")
            continue
        console.write(f"statement {index + 1}:")
        console.write(f"  {render_rule(rule)}")
        console.write(f"proposed rewriting (form {config.aggregate_form}):")
        for replacement in result.replacement_rules:
            console.write(f"  {render_rule(replacement)}")
        if config.no_prompt or console.confirm("Apply this rewriting?"):
            for name, arity in result.fresh_predicates:
                names.commit(name, arity)
            results.append(result)
            summary.rewritten += 1
        else:
            summary.declined += 1

    final = apply_results(original, results)
    summary.fresh = [sig for r in results for sig in r.fresh_predicates]
    output = Path(config.output_path) if config.output_path else derive_output_path(
        config.input_paths[0], config.input_paths)
    try:
        output.write_text(render(final), encoding="utf-8")
    except OSError as exc:
        console.error(f"cannot write {output}: {exc.strerror or exc}")
        return EXIT_OUTPUT
    summary.output_path = str(output)
    console.write(f"wrote {output}")

    if config.debug:
        console.write(f"statistics: {summary.rules} statements, {summary.candidates} candidates, "
                      f"{summary.rewritten} rewritten, {summary.refused} refused, "
                      f"{summary.declined} declined")

    if config.self_check:
        summary.self_check = _self_check(original, final, summary.fresh, config.oracle_size_cap)
        console.write(f"self-check: {summary.self_check}")

    if config.run_solver:
        return _run_solver(config.solver_command, output, console)
    return EXIT_OK


def _self_check(original: Program, final: Program, hidden, cap: int) -> str:
    try:
        verdict = oracle.equivalent_modulo(original, final, hidden, cap)
    except oracle.SizeExceeded:
        return "SKIPPED(size)"
    except oracle.GroundingError as exc:
        return f"SKIPPED({exc})"
    if verdict:
        return "PASS"
    return f"FAIL (answer set {oracle.format_interpretation(verdict.witness)} only on the {verdict.side})"


def _run_solver(command: str, output: Path, console: Console) -> int:
    argv = shlex.split(command) + [str(output)]
    try:
        proc = subprocess.Popen(argv, stdout=subprocess.PIPE, stderr=subprocess.STDOUT, text=True)
    except OSError as exc:
        console.error(f"cannot launch {argv[0]}: {exc.strerror or exc}")
        return EXIT_SOLVER
    for line in proc.stdout:
        console.write(line.rstrip("\n"))
    proc.wait()
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="aggrewrite",
        description="Rewrite rules that name b distinct objects into #count aggregates.",
    )
    parser.add_argument("encodings", nargs="+", metavar="encoding",
                        help="input program files, concatenated in order")
    parser.add_argument("-o", "--output", metavar="FILENAME",
                        help="output file (default: <first input>.aagg.<ext>)")
    parser.add_argument("--no-rewrite", action="store_true",
                        help="report candidates only; no prompts, no rewriting")
    parser.add_argument("--no-prompt", action="store_true",
                        help="rewrite wherever possible without asking")
    parser.add_argument("--use-anonymous-variable", action="store_true",
                        help="use F(_,Y) : F(_,Y) as the aggregate element")
    parser.add_argument("--aggregate-form", type=int, choices=(1, 2, 3), default=1, metavar="ID",
                        help="1: b <= #count, 2: not #count < b, 3: not #count = i for i < b")
    parser.add_argument("-d", "--debug", action="store_true",
                        help="print discovery traces and statistics")
    parser.add_argument("-r", "--run-clingo", action="store_true",
                        help="run the solver on the output program")
    parser.add_argument("--solver-cmd", default="clingo",
                        help="solver command used by -r (default: clingo)")
    parser.add_argument("--self-check", action="store_true",
                        help="verify answer-set equivalence with the built-in oracle")
    parser.add_argument("--oracle-cap", type=int, default=oracle.DEFAULT_SIZE_CAP,
                        help="largest Herbrand base the self-check will enumerate")
    return parser


def config_from_args(argv: Optional[Sequence[str]] = None) -> CliConfig:
    args = build_parser().parse_args(argv)
    return CliConfig(
        input_paths=list(args.encodings),
        output_path=args.output,
        no_rewrite=args.no_rewrite,
        no_prompt=args.no_prompt,
        use_anonymous_variable=args.use_anonymous_variable,
        aggregate_form=args.aggregate_form,
        debug=args.debug,
        run_solver=args.run_clingo,
        solver_command=args.solver_cmd,
        self_check=args.self_check,
        oracle_size_cap=args.oracle_cap,
    )


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        return run(config_from_args(argv))
    except BrokenPipeError:
        # reader went away (e.g. piped into head); silence the final flush
        devnull = os.open(os.devnull, os.O_WRONLY)
        os.dup2(devnull, sys.stdout.fileno())
        return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
