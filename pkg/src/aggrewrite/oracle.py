"""Desk-scale grounder and stable-model enumerator used to certify rewrites.

Grounding is relevance based: only atoms derivable from a positive
over-approximation of the program (negation and aggregates assumed true) are
instantiated, so the Herbrand base is the set of atoms that can possibly
hold. Stable models follow FLP semantics: an interpretation ``I`` is an
answer set if it is a model of the program and a minimal model of the rules
whose bodies ``I`` satisfies.

Two enumerators are provided. ``answer_sets`` searches with interval
propagation and checks minimality exactly; ``answer_sets_naive`` walks every
subset of the base and every proper subset of each model and is only usable
for a dozen atoms or so. Tests cross-check one against the other.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple

from .syntax import (
    ANONYMOUS,
    AggregateElement,
    AggregateLiteral,
    Arithmetic,
    Atom,
    AtomLiteral,
    Choice,
    Comparison,
    Constant,
    CountAggregate,
    Function,
    Program,
    Rule,
    Variable,
    atom_variables,
    literal_variables,
    term_variables,
)

DEFAULT_SIZE_CAP = 24


class GroundingError(Exception):
    pass


class SizeExceeded(GroundingError):
    def __init__(self, size, cap):
        super().__init__(f"Herbrand base has {size} atoms, cap is {cap}")
        self.size = size
        self.cap = cap


class UnsafeRule(GroundingError):
    def __init__(self, rule_index, detail=""):
        super().__init__(f"rule {rule_index} is unsafe{': ' + detail if detail else ''}")
        self.rule_index = rule_index


class UnsupportedTerm(GroundingError):
    pass


class RawStatement(GroundingError):
    pass


# ground program


@dataclass(frozen=True)
class GroundAtomLiteral:
    atom: Atom
    negated: bool = False


@dataclass(frozen=True)
class GroundAggregate:
    """A ground #count literal; elements are (term tuple, condition) pairs."""

    elements: FrozenSet[Tuple[tuple, Tuple[GroundAtomLiteral, ...]]]
    lower: Optional[Tuple[str, object]] = None
    upper: Optional[Tuple[str, object]] = None
    negated: bool = False


@dataclass(frozen=True)
class GroundRule:
    head: Tuple[Atom, ...]
    body: tuple
    choice: bool = False

    @property
    def is_constraint(self):
        return not self.head and not self.choice


@dataclass(frozen=True)
class GroundProgram:
    rules: Tuple[GroundRule, ...]
    base: FrozenSet[Atom]


Interpretation = FrozenSet[Atom]


def _order_key(term):
    # integers < symbolic constants < function terms
    if isinstance(term, Constant):
        if isinstance(term.value, int):
            return (0, term.value)
        return (1, term.value)
    return (2, term.name, len(term.args), tuple(_order_key(a) for a in term.args))


def compare(left, op, right) -> bool:
    a, b = _order_key(left), _order_key(right)
    return {
        "<": a < b, "<=": a <= b, "=": a == b,
        "!=": a != b, ">": a > b, ">=": a >= b,
    }[op]


class _Undefined(Exception):
    pass


def _evaluate(term, binding):
    if isinstance(term, Constant):
        return term
    if isinstance(term, Variable):
        return binding[term.name]
    if isinstance(term, Function):
        return Function(term.name, tuple(_evaluate(a, binding) for a in term.args))
    left, right = _evaluate(term.left, binding), _evaluate(term.right, binding)
    if not (isinstance(left, Constant) and isinstance(left.value, int)
            and isinstance(right, Constant) and isinstance(right.value, int)):
        raise _Undefined()
    if term.op == "+":
        return Constant(left.value + right.value)
    if term.op == "-":
        return Constant(left.value - right.value)
    return Constant(left.value * right.value)


def _ground_atom(atom: Atom, binding) -> Atom:
    return Atom(atom.predicate, tuple(_evaluate(a, binding) for a in atom.args))


def _match(pattern, ground, binding) -> Optional[dict]:
    if isinstance(pattern, Variable):
        known = binding.get(pattern.name)
        if known is None:
            extended = dict(binding)
            extended[pattern.name] = ground
            return extended
        return binding if known == ground else None
    if isinstance(pattern, Constant):
        return binding if pattern == ground else None
    if isinstance(pattern, Function):
        if not isinstance(ground, Function) or ground.name != pattern.name \
                or len(ground.args) != len(pattern.args):
            return None
        for p, g in zip(pattern.args, ground.args):
            binding = _match(p, g, binding)
            if binding is None:
                return None
        return binding
    try:
        return binding if _evaluate(pattern, binding) == ground else None
    except _Undefined:
        return None


def _arith_vars(term) -> Set[str]:
    if isinstance(term, Arithmetic):
        return set(term_variables(term))
    if isinstance(term, Function):
        out = set()
        for a in term.args:
            out |= _arith_vars(a)
        return out
    return set()


def _plan(atoms: Sequence[Atom], comparisons: Sequence[Comparison], bound: Set[str]):
    """Order positive atoms and comparisons so every step is evaluable.

    Returns (steps, bound_after, leftover) where leftover lists comparisons
    that could never be evaluated.
    """
    bound = set(bound)
    atoms, comparisons = list(atoms), list(comparisons)
    steps = []
    while True:
        for comp in list(comparisons):
            if set(literal_variables(comp)) <= bound:
                steps.append(("filter", comp))
                comparisons.remove(comp)
        pick = next((a for a in atoms
                     if all(_arith_vars(t) <= bound for t in a.args)), None)
        if pick is not None:
            atoms.remove(pick)
            steps.append(("atom", pick))
            bound |= set(atom_variables(pick))
            continue
        assign = None
        for comp in comparisons:
            if comp.op != "=":
                continue
            for var, other in ((comp.left, comp.right), (comp.right, comp.left)):
                if isinstance(var, Variable) and var.name not in bound \
                        and set(term_variables(other)) <= bound:
                    assign = (comp, var.name, other)
                    break
            if assign:
                break
        if assign is None:
            break
        comparisons.remove(assign[0])
        steps.append(("assign", assign[1], assign[2]))
        bound.add(assign[1])
    if atoms:
        raise _PlanFailure(f"cannot bind arithmetic in {atoms[0].predicate}")
    return steps, bound, comparisons


class _PlanFailure(Exception):
    pass


def _run_plan(steps, binding, index: Dict[Tuple[str, int], List[Atom]]):
    if not steps:
        yield binding
        return
    step, rest = steps[0], steps[1:]
    kind = step[0]
    if kind == "filter":
        comp = step[1]
        try:
            ok = compare(_evaluate(comp.left, binding), comp.op, _evaluate(comp.right, binding))
        except _Undefined:
            ok = False
        if ok:
            yield from _run_plan(rest, binding, index)
    elif kind == "assign":
        try:
            value = _evaluate(step[2], binding)
        except _Undefined:
            return
        extended = dict(binding)
        extended[step[1]] = value
        yield from _run_plan(rest, extended, index)
    else:
        pattern = step[1]
        for ground in index.get(pattern.signature, ()):
            extended = binding
            for p, g in zip(pattern.args, ground.args):
                extended = _match(p, g, extended)
                if extended is None:
                    break
            if extended is not None:
                yield from _run_plan(rest, extended, index)


def _rename_anonymous(rule: Rule) -> Rule:
    """Give each ``_`` its own variable.

    In an element ``F(..,_,..) : F(..,_,..)`` whose term repeats a condition
    atom, the anonymous variables of term and atom are identified
    position by position, so the element counts distinct ``F`` atoms.
    """
    counter = itertools.count()

    def fresh():
        return Variable(f"_Anon{next(counter)}")

    def rename(term, shared=None):
        if isinstance(term, Variable) and term.anonymous:
            return shared.pop(0) if shared else fresh()
        if isinstance(term, Function):
            return Function(term.name, tuple(rename(a, shared) for a in term.args))
        if isinstance(term, Arithmetic):
            return Arithmetic(term.op, rename(term.left, shared), rename(term.right, shared))
        return term

    def rename_atom(atom, shared=None):
        return Atom(atom.predicate, tuple(rename(a, shared) for a in atom.args))

    def rename_literal(lit):
        if isinstance(lit, AtomLiteral):
            return AtomLiteral(rename_atom(lit.atom), lit.negated)
        if isinstance(lit, Comparison):
            return Comparison(rename(lit.left), lit.op, rename(lit.right))
        elements = []
        for element in lit.aggregate.elements:
            elements.append(rename_element(element))
        agg = lit.aggregate
        return AggregateLiteral(CountAggregate(tuple(elements), agg.lower, agg.upper), lit.negated)

    def rename_element(element):
        term_atoms = [Atom(t.name, t.args) for t in element.terms if isinstance(t, Function)]
        twin = None
        if len(element.terms) == 1 and term_atoms:
            twin = next((i for i, c in enumerate(element.condition)
                         if isinstance(c, AtomLiteral) and not c.negated and c.atom == term_atoms[0]),
                        None)
        if twin is None:
            return AggregateElement(tuple(rename(t) for t in element.terms),
                                    tuple(rename_literal(c) for c in element.condition))
        count = sum(1 for v in atom_variables(term_atoms[0]) if v == ANONYMOUS)
        names = [fresh() for _ in range(count)]
        term = rename(element.terms[0], list(names))
        condition = []
        for i, c in enumerate(element.condition):
            if i == twin:
                condition.append(AtomLiteral(rename_atom(c.atom, list(names))))
            else:
                condition.append(rename_literal(c))
        return AggregateElement((term,), tuple(condition))

    head = rule.head
    if isinstance(head, Atom):
        head = rename_atom(head)
    elif isinstance(head, Choice):
        head = Choice(tuple(rename_atom(a) for a in head.atoms))
    return Rule(head, tuple(rename_literal(lit) for lit in rule.body))


def _check_terms(rule: Rule, index: int):
    def atom_ok(atom):
        return not any(isinstance(a, Function) for a in atom.args)

    atoms = list(rule.head_atoms())
    for lit in rule.body:
        if isinstance(lit, AtomLiteral):
            atoms.append(lit.atom)
        elif isinstance(lit, AggregateLiteral):
            for element in lit.aggregate.elements:
                atoms.extend(c.atom for c in element.condition if isinstance(c, AtomLiteral))
    for atom in atoms:
        if not atom_ok(atom):
            raise UnsupportedTerm(f"rule {index}: function term in {atom.predicate}")


@dataclass
class _RulePlan:
    rule: Rule
    steps: list
    bound: Set[str]
    element_plans: dict  # (body index, element index) -> steps


def _prepare(rule: Rule, index: int) -> _RulePlan:
    positives = [lit.atom for lit in rule.body if isinstance(lit, AtomLiteral) and not lit.negated]
    comparisons = [lit for lit in rule.body if isinstance(lit, Comparison)]
    try:
        steps, bound, leftover = _plan(positives, comparisons, set())
    except _PlanFailure as exc:
        raise UnsafeRule(index, str(exc))
    if leftover:
        raise UnsafeRule(index, "comparison over unbound variables")
    required = set()
    for atom in rule.head_atoms():
        required |= set(atom_variables(atom))
    for lit in rule.body:
        if isinstance(lit, AtomLiteral) and lit.negated:
            required |= set(atom_variables(lit.atom))
    element_plans = {}
    for i, lit in enumerate(rule.body):
        if not isinstance(lit, AggregateLiteral):
            continue
        agg = lit.aggregate
        for guard in (agg.lower, agg.upper):
            if guard is not None:
                required |= set(term_variables(guard.term))
        for j, element in enumerate(agg.elements):
            cond_pos = [c.atom for c in element.condition
                        if isinstance(c, AtomLiteral) and not c.negated]
            cond_cmp = [c for c in element.condition if isinstance(c, Comparison)]
            try:
                e_steps, e_bound, e_left = _plan(cond_pos, cond_cmp, bound)
            except _PlanFailure as exc:
                raise UnsafeRule(index, str(exc))
            needed = set()
            for t in element.terms:
                needed |= set(term_variables(t))
            for c in element.condition:
                if isinstance(c, AtomLiteral) and c.negated:
                    needed |= set(atom_variables(c.atom))
            if e_left or not needed <= e_bound:
                raise UnsafeRule(index, "unbound variable in aggregate element")
            element_plans[(i, j)] = e_steps
    missing = required - bound
    if missing:
        raise UnsafeRule(index, "unbound " + ", ".join(sorted(missing)))
    return _RulePlan(rule, steps, bound, element_plans)


def _index(atoms: Iterable[Atom]):
    out: Dict[Tuple[str, int], List[Atom]] = {}
    for atom in atoms:
        out.setdefault(atom.signature, []).append(atom)
    return out


def ground(program: Program, size_cap: int = DEFAULT_SIZE_CAP) -> GroundProgram:
    plans = []
    for index, rule in enumerate(program):
        if rule.is_raw:
            raise RawStatement(f"statement {index} is outside the supported subset")
        rule = _rename_anonymous(rule)
        _check_terms(rule, index)
        plans.append(_prepare(rule, index))

    possible: Set[Atom] = set()
    changed = True
    while changed:
        changed = False
        index = _index(possible)
        for plan in plans:
            heads = plan.rule.head_atoms()
            if not heads:
                continue
            for binding in _run_plan(plan.steps, {}, index):
                for atom in heads:
                    try:
                        g = _ground_atom(atom, binding)
                    except _Undefined:
                        continue
                    if g not in possible:
                        possible.add(g)
                        changed = True
                        if len(possible) > size_cap:
                            raise SizeExceeded(len(possible), size_cap)

    index = _index(possible)
    rules = []
    seen = set()
    for plan in plans:
        for binding in _run_plan(plan.steps, {}, index):
            try:
                grounded = _instantiate(plan, binding, possible, index)
            except _Undefined:
                continue
            if grounded is not None and grounded not in seen:
                seen.add(grounded)
                rules.append(grounded)
    return GroundProgram(tuple(rules), frozenset(possible))


def _instantiate(plan: _RulePlan, binding, possible, index) -> Optional[GroundRule]:
    rule = plan.rule
    body = []
    for i, lit in enumerate(rule.body):
        if isinstance(lit, Comparison):
            continue  # already applied as a plan filter
        if isinstance(lit, AtomLiteral):
            atom = _ground_atom(lit.atom, binding)
            if lit.negated:
                if atom in possible:
                    body.append(GroundAtomLiteral(atom, True))
            else:
                body.append(GroundAtomLiteral(atom))
            continue
        agg = lit.aggregate
        elements = set()
        for j, element in enumerate(agg.elements):
            for local in _run_plan(plan.element_plans[(i, j)], binding, index):
                try:
                    terms = tuple(_evaluate(t, local) for t in element.terms)
                    condition = []
                    for c in element.condition:
                        if isinstance(c, Comparison):
                            continue
                        atom = _ground_atom(c.atom, local)
                        if c.negated and atom not in possible:
                            continue
                        condition.append(GroundAtomLiteral(atom, c.negated))
                except _Undefined:
                    continue
                elements.add((terms, tuple(condition)))
        lower = (agg.lower.op, _evaluate(agg.lower.term, binding)) if agg.lower else None
        upper = (agg.upper.op, _evaluate(agg.upper.term, binding)) if agg.upper else None
        body.append(GroundAggregate(frozenset(elements), lower, upper, lit.negated))
    heads = tuple(_ground_atom(a, binding) for a in rule.head_atoms())
    return GroundRule(heads, tuple(body), isinstance(rule.head, Choice))


# evaluation over intervals [low, high] of interpretations, as bitmasks

_T, _F, _U = True, False, None


class _Compiled:
    """Ground program with atoms numbered and literals in flat tuples."""

    def __init__(self, program: GroundProgram):
        atoms = set(program.base)
        for rule in program.rules:
            atoms.update(rule.head)
            for lit in rule.body:
                if isinstance(lit, GroundAtomLiteral):
                    atoms.add(lit.atom)
                else:
                    for _, cond in lit.elements:
                        atoms.update(c.atom for c in cond)
        self.atoms = sorted(atoms, key=lambda a: (a.predicate, tuple(_order_key(x) for x in a.args)))
        self.ids = {atom: i for i, atom in enumerate(self.atoms)}
        self.rules = []
        for rule in program.rules:
            body = tuple(self._literal(lit) for lit in rule.body)
            head = tuple(1 << self.ids[a] for a in rule.head)
            self.rules.append((head, rule.choice, body))
        self.support: Dict[int, List[int]] = {}
        for r, (head, _, _) in enumerate(self.rules):
            for bit in head:
                self.support.setdefault(bit, []).append(r)

    def _literal(self, lit):
        if isinstance(lit, GroundAtomLiteral):
            return ("a", 1 << self.ids[lit.atom], lit.negated)
        groups: Dict[tuple, list] = {}
        for terms, cond in lit.elements:
            groups.setdefault(terms, []).append(
                tuple((1 << self.ids[c.atom], c.negated) for c in cond))
        return ("g", tuple(groups.values()), lit.lower, lit.upper, lit.negated)

    def mask(self, atoms: Iterable[Atom]) -> int:
        out = 0
        for atom in atoms:
            out |= 1 << self.ids[atom]
        return out

    def interpretation(self, mask: int) -> Interpretation:
        return frozenset(a for i, a in enumerate(self.atoms) if mask >> i & 1)


def _atom_value(bit, negated, low, high):
    if low & bit:
        value = _T
    elif not high & bit:
        value = _F
    else:
        return _U
    return (not value) if negated else value


def _guards_hold(count, lower, upper):
    c = Constant(count)
    if lower is not None and not compare(lower[1], lower[0], c):
        return False
    if upper is not None and not compare(c, upper[0], upper[1]):
        return False
    return True


def _literal_value(lit, low, high):
    if lit[0] == "a":
        return _atom_value(lit[1], lit[2], low, high)
    _, groups, lower, upper, negated = lit
    lo = hi = 0
    for group in groups:
        status = _F
        for cond in group:
            value = _T
            for bit, neg in cond:
                v = _atom_value(bit, neg, low, high)
                if v is _F:
                    value = _F
                    break
                if v is _U:
                    value = _U
            if value is _T:
                status = _T
                break
            if value is _U:
                status = _U
        if status is _T:
            lo += 1
            hi += 1
        elif status is _U:
            hi += 1
    outcomes = {_guards_hold(c, lower, upper) for c in range(lo, hi + 1)}
    if len(outcomes) > 1:
        return _U
    value = outcomes.pop()
    return (not value) if negated else value


def _body_value(body, low, high):
    result = _T
    for lit in body:
        v = _literal_value(lit, low, high)
        if v is _F:
            return _F
        if v is _U:
            result = _U
    return result


def _is_model(compiled: _Compiled, mask: int) -> bool:
    for head, choice, body in compiled.rules:
        if _body_value(body, mask, mask) is not _T:
            continue
        if choice:
            continue
        if not head or not any(mask & bit for bit in head):
            return False
    return True


def _reduct(compiled: _Compiled, mask: int):
    """Rules of the FLP reduct as (head bit, body) pairs; choices keep true atoms."""
    out = []
    for head, choice, body in compiled.rules:
        if _body_value(body, mask, mask) is not _T:
            continue
        for bit in head:
            if not choice or mask & bit:
                out.append((bit, body))
    return out


def _satisfies(reduct, mask) -> bool:
    return all(mask & bit for bit, body in reduct if _body_value(body, mask, mask) is _T)


def _is_minimal(compiled: _Compiled, mask: int) -> bool:
    """No proper subset of ``mask`` is a model of the reduct of ``mask``."""
    reduct = _reduct(compiled, mask)

    def search(low, high):
        # forward closure only; bodies need not be monotone inside [low, high]
        changed = True
        while changed:
            changed = False
            for bit, body in reduct:
                if not low & bit and _body_value(body, low, high) is _T:
                    if not high & bit:
                        return False
                    low |= bit
                    changed = True
        if low == mask:
            return False
        if low == high:
            return _satisfies(reduct, low)
        free = high & ~low
        bit = free & -free
        return search(low, high & ~bit) or search(low | bit, high)

    return not search(0, mask)


def _propagate(compiled: _Compiled, low: int, high: int):
    changed = True
    while changed:
        changed = False
        for head, choice, body in compiled.rules:
            if choice:
                continue
            if not head:
                if _body_value(body, low, high) is _T:
                    return None
                continue
            bit = head[0]
            if low & bit:
                continue
            if _body_value(body, low, high) is _T:
                if not high & bit:
                    return None
                low |= bit
                changed = True
        undecided = high & ~low
        pending = low | undecided
        while pending:
            bit = pending & -pending
            pending &= ~bit
            supported = any(_body_value(compiled.rules[r][2], low, high) is not _F
                            for r in compiled.support.get(bit, ()))
            if supported:
                continue
            if low & bit:
                return None
            high &= ~bit
            changed = True
    return low, high


def answer_sets(program: GroundProgram) -> Set[Interpretation]:
    compiled = _Compiled(program)
    found: Set[Interpretation] = set()
    full = (1 << len(compiled.atoms)) - 1

    def search(low, high):
        state = _propagate(compiled, low, high)
        if state is None:
            return
        low, high = state
        if low == high:
            if _is_model(compiled, low) and _is_minimal(compiled, low):
                found.add(compiled.interpretation(low))
            return
        free = high & ~low
        bit = free & -free
        search(low | bit, high)
        search(low, high & ~bit)

    search(0, full)
    return found


def answer_sets_naive(program: GroundProgram) -> Set[Interpretation]:
    """Reference enumeration over all subsets; exponential twice over."""
    compiled = _Compiled(program)
    n = len(compiled.atoms)
    found = set()
    for mask in range(1 << n):
        if not _is_model(compiled, mask):
            continue
        reduct = _reduct(compiled, mask)
        sub = (mask - 1) & mask
        minimal = True
        while True:
            if sub != mask and _satisfies(reduct, sub):
                minimal = False
                break
            if sub == 0:
                break
            sub = (sub - 1) & mask
        if minimal:
            found.add(compiled.interpretation(mask))
    return found


def is_model(program: GroundProgram, interpretation: Iterable[Atom]) -> bool:
    compiled = _Compiled(program)
    return _is_model(compiled, compiled.mask(interpretation))


def solve(program: Program, size_cap: int = DEFAULT_SIZE_CAP) -> Set[Interpretation]:
    return answer_sets(ground(program, size_cap))


def project(models: Iterable[Interpretation], hidden) -> Set[Interpretation]:
    hidden = {tuple(sig) for sig in hidden}
    return {frozenset(a for a in model if a.signature not in hidden) for model in models}


@dataclass(frozen=True)
class Equivalence:
    equivalent: bool
    witness: Optional[Interpretation] = None
    side: Optional[str] = None  # "left" or "right": which program has the witness

    def __bool__(self):
        return self.equivalent


def equivalent_modulo(left: Program, right: Program, hidden=(), size_cap: int = DEFAULT_SIZE_CAP
                      ) -> Equivalence:
    """Compare answer sets after dropping atoms of the ``hidden`` predicates."""
    a = project(solve(left, size_cap), hidden)
    b = project(solve(right, size_cap), hidden)
    if a == b:
        return Equivalence(True)
    only_left = sorted(a - b, key=format_interpretation)
    if only_left:
        return Equivalence(False, only_left[0], "left")
    return Equivalence(False, sorted(b - a, key=format_interpretation)[0], "right")


def format_interpretation(model: Iterable[Atom]) -> str:
    from .parser import render_atom
    return "{" + ", ".join(sorted(render_atom(a) for a in model)) + "}"


def canonical_ground(program: GroundProgram):
    """Ground rules with aggregate element terms abstracted away.

    Two groundings that differ only in how element tuples are named (for
    instance ``1 : p(1)`` versus ``p(1) : p(1)``) map to the same value.
    """
    def literal(lit):
        if isinstance(lit, GroundAtomLiteral):
            return lit
        groups: Dict[tuple, set] = {}
        for terms, cond in lit.elements:
            groups.setdefault(terms, set()).add(frozenset(cond))
        return ("count", frozenset(frozenset(g) for g in groups.values()),
                lit.lower, lit.upper, lit.negated)

    rules = frozenset((r.head, r.choice, frozenset(literal(l) for l in r.body)) for r in program.rules)
    return rules, program.base
