"""Detection of rules that name ``b`` distinct objects with explicit variables.

A rule qualifies when some set of variables ``X1..Xb`` is pairwise
constrained (a full ``!=`` clique or a monotone ``<``/``>`` chain), each
``Xi`` occurs in exactly one positive literal of a common predicate ``F`` at a
common argument position with identical remaining arguments, and the
variables occur nowhere else in the rule.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from .syntax import (
    Arithmetic,
    Atom,
    AtomLiteral,
    Comparison,
    Constant,
    Function,
    Program,
    Rule,
    Term,
    Variable,
    atom_variables,
    literal_variables,
    term_variables,
)

DISTINCT = "distinct"
LESS_THAN = "lessThan"


@dataclass(frozen=True)
class ComparisonFact:
    var_a: str
    var_b: str
    relation: str
    source: int  # body index of the comparison literal


@dataclass(frozen=True)
class RewriteCandidate:
    rule_index: int
    predicate: Tuple[str, int]
    bound: int
    counting_vars: Tuple[str, ...]
    counting_position: int
    context: Tuple[Term, ...]
    counting_literals: Tuple[int, ...]
    residual: Tuple[int, ...]
    head: object = None

    @property
    def first_var(self) -> str:
        return self.counting_vars[0]


def _offset_form(term) -> Optional[Tuple[str, int]]:
    """Split ``V``, ``V+k``, ``k+V`` or ``V-k`` into (name, k)."""
    if isinstance(term, Variable):
        return None if term.anonymous else (term.name, 0)
    if not isinstance(term, Arithmetic) or term.op == "*":
        return None
    left, right = term.left, term.right
    if isinstance(left, Variable) and isinstance(right, Constant) and isinstance(right.value, int):
        if left.anonymous:
            return None
        return (left.name, right.value if term.op == "+" else -right.value)
    if (term.op == "+" and isinstance(right, Variable) and not right.anonymous
            and isinstance(left, Constant) and isinstance(left.value, int)):
        return (right.name, left.value)
    return None


def normalize_comparison(literal, index: int = -1) -> Optional[ComparisonFact]:
    """Turn ``X != Y``/``X < Y``/``X > Y`` (with equal offsets) into a fact."""
    if not isinstance(literal, Comparison) or literal.op not in ("!=", "<", ">"):
        return None
    left, right = _offset_form(literal.left), _offset_form(literal.right)
    if left is None or right is None or left[1] != right[1] or left[0] == right[0]:
        return None
    if literal.op == "!=":
        return ComparisonFact(left[0], right[0], DISTINCT, index)
    if literal.op == "<":
        return ComparisonFact(left[0], right[0], LESS_THAN, index)
    return ComparisonFact(right[0], left[0], LESS_THAN, index)


def _components(facts: Sequence[ComparisonFact]) -> List[List[ComparisonFact]]:
    parent: Dict[str, str] = {}

    def find(x):
        while parent.setdefault(x, x) != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for fact in facts:
        parent[find(fact.var_a)] = find(fact.var_b)
    groups: Dict[str, List[ComparisonFact]] = defaultdict(list)
    for fact in facts:
        groups[find(fact.var_a)].append(fact)
    return list(groups.values())


def _is_clique(variables: set, facts: Sequence[ComparisonFact]) -> bool:
    pairs = {frozenset((f.var_a, f.var_b)) for f in facts}
    n = len(variables)
    return len(pairs) == n * (n - 1) // 2


def _chain_order(variables: set, facts: Sequence[ComparisonFact]) -> Optional[List[str]]:
    """Return the unique X1 < ... < Xb order if the facts contain that chain."""
    succ = defaultdict(set)
    indegree = {v: 0 for v in variables}
    for f in facts:
        if f.var_b not in succ[f.var_a]:
            succ[f.var_a].add(f.var_b)
            indegree[f.var_b] += 1
    order = []
    ready = [v for v, d in indegree.items() if d == 0]
    while ready:
        if len(ready) != 1:
            return None
        v = ready.pop()
        if order and v not in succ[order[-1]]:
            return None
        order.append(v)
        for w in succ[v]:
            indegree[w] -= 1
            if indegree[w] == 0:
                ready.append(w)
    return order if len(order) == len(variables) else None


def _plain_context_term(term) -> bool:
    if isinstance(term, (Constant, Variable)):
        return not (isinstance(term, Variable) and term.anonymous)
    if isinstance(term, Function):
        return all(_plain_context_term(a) for a in term.args)
    return False


def _match_counting_literals(rule: Rule, variables: set):
    """Find exactly one positive F literal per counting variable.

    Returns (predicate, position, context, indices) or None.
    """
    found = {}
    shape = None
    for index, literal in enumerate(rule.body):
        if not isinstance(literal, AtomLiteral):
            continue
        mentioned = set(atom_variables(literal.atom)) & variables
        if not mentioned:
            continue
        if literal.negated or len(mentioned) != 1:
            return None
        var = mentioned.pop()
        atom: Atom = literal.atom
        positions = [i for i, a in enumerate(atom.args) if a == Variable(var)]
        if len(positions) != 1:
            return None
        position = positions[0]
        context = atom.args[:position] + atom.args[position + 1:]
        if any(var in term_variables(t) for t in context):
            return None
        if not all(_plain_context_term(t) for t in context):
            return None
        this_shape = (atom.signature, position, context)
        if shape is None:
            shape = this_shape
        elif shape != this_shape:
            return None
        if var in found:
            return None
        found[var] = index
    if shape is None or set(found) != variables:
        return None
    signature, position, context = shape
    return signature, position, context, sorted(found.values())


def _body_order(rule: Rule, variables: set) -> List[str]:
    seen: List[str] = []
    for literal in rule.body:
        for name in literal_variables(literal):
            if name in variables and name not in seen:
                seen.append(name)
    return seen


def _check_set(rule: Rule, rule_index: int, facts: List[ComparisonFact]):
    variables = {f.var_a for f in facts} | {f.var_b for f in facts}
    relations = {f.relation for f in facts}
    if len(relations) != 1:
        return None
    if relations == {DISTINCT}:
        if not _is_clique(variables, facts):
            return None
    elif _chain_order(variables, facts) is None:
        return None
    matched = _match_counting_literals(rule, variables)
    if matched is None:
        return None
    signature, position, context, literal_indices = matched
    consumed = set(literal_indices) | {f.source for f in facts}
    # nothing outside the consumed literals may mention X1..Xb
    for index, literal in enumerate(rule.body):
        if index not in consumed and variables & set(literal_variables(literal)):
            return None
    for atom in rule.head_atoms():
        if variables & set(atom_variables(atom)):
            return None
    return RewriteCandidate(
        rule_index=rule_index,
        predicate=signature,
        bound=len(variables),
        counting_vars=tuple(_body_order(rule, variables)),
        counting_position=position,
        context=tuple(context),
        counting_literals=tuple(sorted(consumed)),
        residual=tuple(i for i in range(len(rule.body)) if i not in consumed),
        head=rule.head,
    )


def find_candidate(rule: Rule, rule_index: int = 0) -> Optional[RewriteCandidate]:
    """Return the single rewrite candidate of ``rule``, if any.

    Among several valid variable sets the largest wins; ties go to the set
    whose first comparison literal comes earliest in the body.
    """
    if rule.is_raw or not rule.body:
        return None
    facts = []
    for index, literal in enumerate(rule.body):
        fact = normalize_comparison(literal, index)
        if fact is not None:
            facts.append(fact)
    best = None
    best_key = None
    for group in _components(facts):
        candidate = _check_set(rule, rule_index, group)
        if candidate is None:
            continue
        key = (-candidate.bound, min(f.source for f in group))
        if best_key is None or key < best_key:
            best, best_key = candidate, key
    return best


def find_all_candidates(program: Program) -> List[RewriteCandidate]:
    out = []
    for index, rule in enumerate(program):
        candidate = find_candidate(rule, index)
        if candidate is not None:
            out.append(candidate)
    return out
