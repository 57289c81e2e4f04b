"""Rewrite detected rules into one of three #count output forms.

Form 1 replaces the counting literals by ``b <= #count{ X : F(..X..) }``,
form 2 by ``not #count{...} < b`` and form 3 by the conjunction
``not #count{...} = 0, ..., not #count{...} = b-1``. When the counted
predicate has further arguments, a projection predicate keeps them bound.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, List, Optional, Set, Tuple

from . import depgraph
from .detector import RewriteCandidate, find_all_candidates
from .syntax import (
    ANONYMOUS,
    AggregateElement,
    AggregateLiteral,
    Atom,
    AtomLiteral,
    Constant,
    CountAggregate,
    Function,
    Guard,
    Program,
    Rule,
    Variable,
    predicate_signatures,
)

FORMS = (1, 2, 3)


class SplittabilityViolation(Exception):
    def __init__(self, verdict):
        super().__init__(verdict.reason)
        self.verdict = verdict


@dataclass(frozen=True)
class RewriteResult:
    replacement_rules: Tuple[Rule, ...]
    fresh_predicates: Tuple[Tuple[str, int], ...]
    form: int
    used_anonymous_variable: bool
    candidate: Optional[RewriteCandidate] = None


class FreshNames:
    """Issues ``<F>_project`` names that collide with nothing seen so far.

    ``propose`` is side-effect free; a name is reserved only by ``commit``,
    so a declined rewrite does not burn a suffix.
    """

    def __init__(self, existing: Iterable[Tuple[str, int]] = ()):
        self.taken: Set[Tuple[str, int]] = set(existing)

    def propose(self, base: str, arity: int) -> str:
        name = f"{base}_project"
        k = 0
        while (name, arity) in self.taken:
            k += 1
            name = f"{base}_project_{k}"
        return name

    def commit(self, name: str, arity: int):
        self.taken.add((name, arity))

    def issue(self, base: str, arity: int) -> str:
        name = self.propose(base, arity)
        self.commit(name, arity)
        return name


def fresh_predicate_name(base: str, existing, arity: int) -> str:
    return FreshNames(existing).propose(base, arity)


def _counted_atom(candidate: RewriteCandidate, slot) -> Atom:
    args = list(candidate.context)
    args.insert(candidate.counting_position, slot)
    return Atom(candidate.predicate[0], tuple(args))


def _element(candidate: RewriteCandidate, var_name: str, anonymous: bool) -> AggregateElement:
    if anonymous:
        atom = _counted_atom(candidate, Variable(ANONYMOUS))
        return AggregateElement((Function(atom.predicate, atom.args),), (AtomLiteral(atom),))
    atom = _counted_atom(candidate, Variable(var_name))
    return AggregateElement((Variable(var_name),), (AtomLiteral(atom),))


def build_aggregate_literal(candidate: RewriteCandidate, form: int, var_name: str,
                            anonymous: bool = False) -> List[AggregateLiteral]:
    if form not in FORMS:
        raise ValueError(f"unknown aggregate form {form}")
    elements = (_element(candidate, var_name, anonymous),)
    b = candidate.bound
    if form == 1:
        return [AggregateLiteral(CountAggregate(elements, lower=Guard("<=", Constant(b))))]
    if form == 2:
        return [AggregateLiteral(CountAggregate(elements, upper=Guard("<", Constant(b))), negated=True)]
    return [AggregateLiteral(CountAggregate(elements, upper=Guard("=", Constant(i))), negated=True)
            for i in range(b)]


def rewrite(program: Program, candidate: RewriteCandidate, form: int = 1,
            anonymous: bool = False, names: Optional[FreshNames] = None) -> RewriteResult:
    """Rewrite the candidate rule of ``program``.

    Raises SplittabilityViolation for forms 2 and 3 when the program offers
    no splitting with the counted predicate below the rewritten rule.
    """
    if form in (2, 3):
        verdict = depgraph.check_splittable(program, candidate)
        if not verdict:
            raise SplittabilityViolation(verdict)
    if names is None:
        names = FreshNames(predicate_signatures(program))
    rule = program.statements[candidate.rule_index]
    var_name = candidate.first_var
    inserted = list(build_aggregate_literal(candidate, form, var_name, anonymous))
    fresh = []
    extra = []
    if candidate.context:
        arity = len(candidate.context)
        name = names.propose(candidate.predicate[0], arity)
        projected = Atom(name, tuple(candidate.context))
        inserted.append(AtomLiteral(projected))
        extra.append(Rule(projected, (AtomLiteral(_counted_atom(candidate, Variable(var_name))),)))
        fresh.append((name, arity))
    consumed = set(candidate.counting_literals)
    first = min(consumed)
    body = []
    for index, literal in enumerate(rule.body):
        if index == first:
            body.extend(inserted)
        if index not in consumed:
            body.append(literal)
    rewritten = Rule(rule.head, tuple(body))
    return RewriteResult((rewritten, *extra), tuple(fresh), form, anonymous, candidate)


def apply_results(program: Program, results: Iterable[RewriteResult]) -> Program:
    """Splice replacement rules in place of their original statements."""
    by_index = {r.candidate.rule_index: r for r in results}
    out = []
    for index, rule in enumerate(program):
        if index in by_index:
            out.extend(by_index[index].replacement_rules)
        else:
            out.append(rule)
    return Program(tuple(out))


def rewrite_program(program: Program, form: int = 1, anonymous: bool = False):
    """Rewrite every candidate that the chosen form allows.

    Returns (new_program, results, refusals) where refusals pairs each
    candidate refused by the splitting gate with its verdict.
    """
    names = FreshNames(predicate_signatures(program))
    results, refusals = [], []
    for candidate in find_all_candidates(program):
        try:
            result = rewrite(program, candidate, form, anonymous, names)
        except SplittabilityViolation as exc:
            refusals.append((candidate, exc.verdict))
            continue
        for name, arity in result.fresh_predicates:
            names.commit(name, arity)
        results.append(result)
    return apply_results(program, results), results, refusals
