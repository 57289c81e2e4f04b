"""Predicate dependency graph and the splitting gate for output forms 2 and 3."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import FrozenSet, List, Set, Tuple

from .syntax import Program, Rule, literal_atoms

Signature = Tuple[str, int]


@dataclass(frozen=True)
class DependencyGraph:
    nodes: Tuple[Signature, ...]
    edges: Tuple[Tuple[Signature, Signature], ...]
    conservative_failure: bool = False

    def successors(self, node: Signature) -> List[Signature]:
        return [dst for src, dst in self.edges if src == node]

    def closure(self, start: Signature) -> Set[Signature]:
        """``start`` plus every predicate reachable from it."""
        adjacency = {}
        for src, dst in self.edges:
            adjacency.setdefault(src, []).append(dst)
        seen = {start}
        queue = deque([start])
        while queue:
            for nxt in adjacency.get(queue.popleft(), ()):
                if nxt not in seen:
                    seen.add(nxt)
                    queue.append(nxt)
        return seen

    def to_dot(self) -> str:
        lines = ["digraph dependencies {"]
        for name, arity in self.nodes:
            lines.append(f'  "{name}/{arity}";')
        for (a, b), (c, d) in self.edges:
            lines.append(f'  "{a}/{b}" -> "{c}/{d}";')
        lines.append("}")
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class SplitVerdict:
    splittable: bool
    bottom: FrozenSet[Signature] = field(default_factory=frozenset)
    reason: str = ""

    def __bool__(self):
        return self.splittable


def _body_signatures(rule: Rule) -> Set[Signature]:
    out = set()
    for literal in rule.body:
        for atom in literal_atoms(literal):
            out.add(atom.signature)
    return out


def build(program: Program) -> DependencyGraph:
    nodes = set()
    edges = set()
    raw = False
    for rule in program:
        if rule.is_raw:
            raw = True
            continue
        body = _body_signatures(rule)
        heads = {atom.signature for atom in rule.head_atoms()}
        nodes |= body | heads
        for head in heads:
            for dep in body:
                edges.add((head, dep))
    return DependencyGraph(tuple(sorted(nodes)), tuple(sorted(edges)), raw)


def check_splittable(program: Program, candidate) -> SplitVerdict:
    """Decide whether the candidate rule sits on top of a splitting.

    The bottom part is every rule whose head predicate lies in the
    dependency closure of the counted predicate; the candidate rule has to
    stay in the top part, and no top-part head may occur in the bottom part.
    A counted predicate with no defining rule is accepted: its atoms are
    false in every answer set, so the aggregate is constant.
    """
    graph = build(program)
    if graph.conservative_failure:
        return SplitVerdict(False, frozenset(), "program has raw statements with unknown dependencies")
    bottom = graph.closure(tuple(candidate.predicate))
    rule = program.statements[candidate.rule_index]
    for atom in rule.head_atoms():
        if atom.signature in bottom:
            return SplitVerdict(False, frozenset(bottom),
                                f"head {atom.predicate}/{len(atom.args)} depends on itself through "
                                f"{candidate.predicate[0]}/{candidate.predicate[1]}")
    bottom_rules, top_heads = [], set()
    for index, other in enumerate(program):
        heads = {atom.signature for atom in other.head_atoms()}
        if heads & bottom:
            bottom_rules.append(other)
        else:
            top_heads |= heads
    mentioned = set()
    for other in bottom_rules:
        mentioned |= {atom.signature for atom in other.head_atoms()} | _body_signatures(other)
    clash = sorted(top_heads & mentioned)
    if clash:
        name, arity = clash[0]
        return SplitVerdict(False, frozenset(bottom),
                            f"{name}/{arity} is defined above the split but used below it")
    return SplitVerdict(True, frozenset(bottom))
