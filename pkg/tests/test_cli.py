import io
import shutil
import sys

import pytest

from aggrewrite.cli import (
    EXIT_OK,
    EXIT_OUTPUT,
    EXIT_PARSE,
    EXIT_SOLVER,
    CliConfig,
    Console,
    RunSummary,
    config_from_args,
    derive_output_path,
    main,
    run,
)
from aggrewrite.parser import ERROR, parse

from conftest import CORPUS, load


class Scripted(Console):
    def __init__(self, answers=""):
        super().__init__(io.StringIO(answers), io.StringIO(), io.StringIO())
        self.prompts = 0

    def confirm(self, question):
        self.prompts += 1
        return super().confirm(question)

    @property
    def out(self):
        return self.stdout.getvalue()


@pytest.fixture
def ham(tmp_path):
    path = tmp_path / "ham.lp"
    shutil.copy(CORPUS / "hamiltonian.lp", path)
    return path


def output_program(summary):
    with open(summary.output_path) as fh:
        program, diags = parse(fh.read())
    assert not [d for d in diags if d.severity == ERROR]
    return program


def test_derive_output_path(tmp_path):
    assert derive_output_path(tmp_path / "ham.lp").name == "ham.aagg.lp"
    assert derive_output_path(tmp_path / "enc").name == "enc.aagg"
    (tmp_path / "ham.aagg.lp").write_text("")
    assert derive_output_path(tmp_path / "ham.lp").name == "ham.aagg.1.lp"
    (tmp_path / "ham.aagg.1.lp").write_text("")
    assert derive_output_path(tmp_path / "ham.lp").name == "ham.aagg.2.lp"


def test_derived_path_never_an_input(tmp_path):
    first = tmp_path / "ham.lp"
    other = tmp_path / "ham.aagg.lp"
    assert derive_output_path(first, [first, other]).name == "ham.aagg.1.lp"


def test_config_defaults():
    config = config_from_args(["a.lp"])
    assert config.aggregate_form == 1
    assert config.solver_command == "clingo"
    assert config.oracle_size_cap == 24
    assert not (config.no_rewrite or config.no_prompt or config.use_anonymous_variable)
    with pytest.raises(ValueError):
        CliConfig([])


def test_no_prompt_rewrites_both_constraints(ham):
    console, summary = Scripted(), RunSummary()
    assert run(CliConfig([str(ham)], no_prompt=True), console, summary) == EXIT_OK
    assert summary.output_path.endswith("ham.aagg.lp")
    assert summary.rewritten == 2 and console.prompts == 0
    assert len(output_program(summary)) == 10


def test_no_rewrite_keeps_program(ham):
    console, summary = Scripted(), RunSummary()
    assert run(CliConfig([str(ham)], no_rewrite=True, no_prompt=True), console, summary) == 0
    assert console.prompts == 0 and summary.candidates == 2 and summary.rewritten == 0
    assert output_program(summary) == load("hamiltonian.lp")


def test_declining_all_prompts(ham):
    console, summary = Scripted("n\nn\n"), RunSummary()
    assert run(CliConfig([str(ham)]), console, summary) == 0
    assert console.prompts == 2 and summary.declined == 2
    assert output_program(summary) == load("hamiltonian.lp")
    assert "[y/N]" in console.out


def test_eof_counts_as_decline(ham):
    console, summary = Scripted(""), RunSummary()
    assert run(CliConfig([str(ham)]), console, summary) == 0
    assert summary.declined == 2


def test_accept_one_prompt(ham):
    console, summary = Scripted("y\nn\n"), RunSummary()
    run(CliConfig([str(ham)]), console, summary)
    assert summary.rewritten == 1 and summary.fresh == [("hc_project", 1)]
    assert len(output_program(summary)) == 9


def test_prompt_shows_original_and_replacement(ham):
    console = Scripted("n\nn\n")
    run(CliConfig([str(ham)]), console)
    assert ":- hc(X,Y), hc(X,Z), Y!=Z." in console.out
    assert ":- 2 <= #count{ Y : hc(X,Y) }, hc_project(X)." in console.out
    assert "hc_project(X) :- hc(X,Y)." in console.out


def test_form3_cli_output(ham, tmp_path):
    out = tmp_path / "out.lp"
    summary = RunSummary()
    run(CliConfig([str(ham)], output_path=str(out), no_prompt=True, aggregate_form=3),
        Scripted(), summary)
    text = out.read_text()
    assert (":- not #count{ Y : hc(X,Y) } = 0, not #count{ Y : hc(X,Y) } = 1, hc_project(X)."
            in text)


def test_refusal_reported(tmp_path):
    path = tmp_path / "loop.lp"
    shutil.copy(CORPUS / "eq14_recursive_count.lp", path)
    console, summary = Scripted(), RunSummary()
    assert run(CliConfig([str(path)], no_prompt=True, aggregate_form=2), console, summary) == 0
    assert summary.refused == 1 and summary.rewritten == 0
    assert "refused" in console.out
    assert output_program(summary) == load("eq14_recursive_count.lp")


def test_debug_traces_and_statistics(ham):
    console = Scripted()
    run(CliConfig([str(ham)], no_prompt=True, debug=True), console)
    assert "statement 4: candidate hc/2, b=2" in console.out
    assert "statement 1: no candidate" in console.out
    assert "statistics: 8 statements, 2 candidates, 2 rewritten, 0 refused" in console.out


def test_multiple_inputs_concatenated(ham, tmp_path):
    facts = tmp_path / "inst.lp"
    facts.write_text("edge(1,2). edge(2,1).\n")
    console, summary = Scripted(), RunSummary()
    run(CliConfig([str(ham), str(facts)], no_prompt=True, self_check=True), console, summary)
    assert summary.rules == 10
    assert summary.self_check == "PASS"
    assert "self-check: PASS" in console.out


def test_self_check_skipped_when_too_large(ham, tmp_path):
    facts = tmp_path / "inst.lp"
    facts.write_text("".join(f"edge({a},{b}). " for a in range(1, 5) for b in range(1, 5) if a != b))
    summary = RunSummary()
    run(CliConfig([str(ham), str(facts)], no_prompt=True, self_check=True), Scripted(), summary)
    assert summary.self_check == "SKIPPED(size)"


def test_parse_error_exit(tmp_path):
    bad = tmp_path / "bad.lp"
    bad.write_text("p(1.\n")
    console = Scripted()
    assert run(CliConfig([str(bad)]), console) == EXIT_PARSE
    assert "unbalanced" in console.stderr.getvalue()
    assert run(CliConfig([str(tmp_path / "missing.lp")]), Scripted()) == EXIT_PARSE


def test_unwritable_output(ham, tmp_path):
    target = tmp_path / "no" / "such" / "dir" / "out.lp"
    assert run(CliConfig([str(ham)], output_path=str(target), no_prompt=True), Scripted()) == EXIT_OUTPUT


def test_solver_launch_failure(ham):
    config = CliConfig([str(ham)], no_prompt=True, run_solver=True,
                       solver_command="definitely-not-a-solver-binary")
    console = Scripted()
    assert run(config, console) == EXIT_SOLVER
    assert "cannot launch" in console.stderr.getvalue()


def test_solver_output_streamed(ham, tmp_path):
    fake = tmp_path / "fake_solver.py"
    fake.write_text("import sys\nprint('solving', sys.argv[1].endswith('.aagg.lp'))\nprint('SATISFIABLE')\n")
    config = CliConfig([str(ham)], no_prompt=True, run_solver=True,
                       solver_command=f"{sys.executable} {fake}")
    console = Scripted()
    assert run(config, console) == EXIT_OK
    assert "solving True" in console.out and "SATISFIABLE" in console.out


def test_main_entry(ham, capsys):
    assert main([str(ham), "--no-prompt", "--use-anonymous-variable", "-o",
                 str(ham.with_name("anon.lp"))]) == 0
    text = ham.with_name("anon.lp").read_text()
    assert "2 <= #count{ hc(X,_) : hc(X,_) }" in text
    assert "wrote" in capsys.readouterr().out


def test_help_lists_flags(capsys):
    with pytest.raises(SystemExit):
        main(["-h"])
    text = capsys.readouterr().out
    for flag in ["--no-rewrite", "--no-prompt", "--use-anonymous-variable", "--aggregate-form",
                 "--debug", "--run-clingo", "--output", "--self-check", "--oracle-cap", "--solver-cmd"]:
        assert flag in text
