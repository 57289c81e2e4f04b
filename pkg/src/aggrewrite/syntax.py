"""Non-ground program vocabulary shared by the parser, rewriter and oracle.

All node types are frozen dataclasses, so structural equality and hashing
come for free and values can be shared between threads.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator, Optional, Tuple, Union

VARIABLE_NAME = re.compile(r"[A-Z_][A-Za-z0-9_]*\Z")
ANONYMOUS = "_"

ARITHMETIC_OPS = ("+", "-", "*")
COMPARISON_OPS = ("<", "<=", "=", "!=", ">", ">=")


@dataclass(frozen=True)
class Constant:
    value: Union[str, int]

    def __post_init__(self):
        if isinstance(self.value, str) and not self.value.lstrip("_")[:1].islower():
            raise ValueError(f"symbolic constant must start lowercase: {self.value!r}")


@dataclass(frozen=True)
class Variable:
    name: str

    def __post_init__(self):
        if not VARIABLE_NAME.match(self.name):
            raise ValueError(f"invalid variable name: {self.name!r}")

    @property
    def anonymous(self) -> bool:
        return self.name == ANONYMOUS


@dataclass(frozen=True)
class Function:
    name: str
    args: Tuple["Term", ...]

    def __post_init__(self):
        if not self.args:
            raise ValueError("function terms need at least one argument")


@dataclass(frozen=True)
class Arithmetic:
    op: str
    left: "Term"
    right: "Term"

    def __post_init__(self):
        if self.op not in ARITHMETIC_OPS:
            raise ValueError(f"unsupported arithmetic operator {self.op!r}")


Term = Union[Constant, Variable, Function, Arithmetic]


@dataclass(frozen=True)
class Atom:
    predicate: str
    args: Tuple[Term, ...] = ()

    @property
    def signature(self) -> Tuple[str, int]:
        return (self.predicate, len(self.args))


@dataclass(frozen=True)
class AtomLiteral:
    atom: Atom
    negated: bool = False


@dataclass(frozen=True)
class Comparison:
    left: Term
    op: str
    right: Term

    def __post_init__(self):
        if self.op not in COMPARISON_OPS:
            raise ValueError(f"unsupported comparison operator {self.op!r}")


@dataclass(frozen=True)
class AggregateElement:
    terms: Tuple[Term, ...]
    condition: Tuple["Literal", ...]

    def __post_init__(self):
        if not self.terms or not self.condition:
            raise ValueError("aggregate elements need terms and a condition")


@dataclass(frozen=True)
class Guard:
    """One side of an aggregate comparison.

    For a lower guard ``s op #count{...}`` the term sits on the left; for an
    upper guard ``#count{...} op s`` it sits on the right. ``op`` is always
    read left to right as written.
    """

    op: str
    term: Term


@dataclass(frozen=True)
class CountAggregate:
    elements: Tuple[AggregateElement, ...]
    lower: Optional[Guard] = None
    upper: Optional[Guard] = None

    def __post_init__(self):
        if not self.elements:
            raise ValueError("#count needs at least one element")


@dataclass(frozen=True)
class AggregateLiteral:
    aggregate: CountAggregate
    negated: bool = False


Literal = Union[AtomLiteral, Comparison, AggregateLiteral]


@dataclass(frozen=True)
class Choice:
    atoms: Tuple[Atom, ...]


Head = Union[Atom, Choice]


@dataclass(frozen=True)
class Rule:
    head: Optional[Head] = None
    body: Tuple[Literal, ...] = ()
    raw: Optional[str] = None

    def __post_init__(self):
        if self.raw is not None and (self.head is not None or self.body):
            raise ValueError("raw statements carry no structure")
        if self.raw is None and self.head is None and not self.body:
            raise ValueError("a constraint needs a body")

    @property
    def is_raw(self) -> bool:
        return self.raw is not None

    @property
    def is_constraint(self) -> bool:
        return self.raw is None and self.head is None

    @property
    def is_fact(self) -> bool:
        return self.raw is None and self.head is not None and not self.body

    def head_atoms(self) -> Tuple[Atom, ...]:
        if self.head is None:
            return ()
        if isinstance(self.head, Choice):
            return self.head.atoms
        return (self.head,)


@dataclass(frozen=True)
class Program:
    statements: Tuple[Rule, ...] = ()

    def __iter__(self) -> Iterator[Rule]:
        return iter(self.statements)

    def __len__(self) -> int:
        return len(self.statements)

    @property
    def has_raw(self) -> bool:
        return any(rule.is_raw for rule in self.statements)


def term_variables(term: Term) -> Iterator[str]:
    if isinstance(term, Variable):
        yield term.name
    elif isinstance(term, Function):
        for arg in term.args:
            yield from term_variables(arg)
    elif isinstance(term, Arithmetic):
        yield from term_variables(term.left)
        yield from term_variables(term.right)


def literal_variables(literal: Literal) -> Iterator[str]:
    """Yield every variable name occurring in ``literal``, repeats included."""
    if isinstance(literal, AtomLiteral):
        for arg in literal.atom.args:
            yield from term_variables(arg)
    elif isinstance(literal, Comparison):
        yield from term_variables(literal.left)
        yield from term_variables(literal.right)
    else:
        aggregate = literal.aggregate
        for guard in (aggregate.lower, aggregate.upper):
            if guard is not None:
                yield from term_variables(guard.term)
        for element in aggregate.elements:
            for term in element.terms:
                yield from term_variables(term)
            for inner in element.condition:
                yield from literal_variables(inner)


def atom_variables(atom: Atom) -> Iterator[str]:
    for arg in atom.args:
        yield from term_variables(arg)


def literal_atoms(literal: Literal) -> Iterator[Atom]:
    """Atoms of a literal, descending into aggregate element conditions."""
    if isinstance(literal, AtomLiteral):
        yield literal.atom
    elif isinstance(literal, AggregateLiteral):
        for element in literal.aggregate.elements:
            for inner in element.condition:
                yield from literal_atoms(inner)


def predicate_signatures(program: Program) -> set:
    """Every (name, arity) occurring in a head or body of a structured rule."""
    signatures = set()
    for rule in program:
        if rule.is_raw:
            continue
        for atom in rule.head_atoms():
            signatures.add(atom.signature)
        for literal in rule.body:
            for atom in literal_atoms(literal):
                signatures.add(atom.signature)
    return signatures
