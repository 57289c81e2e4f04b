"""Parser and renderer for a gringo-style subset of ASP-Core-2.

Supported statements are normal rules, facts, constraints and choice rules
whose head is a plain list of atoms in braces. Bodies may contain atoms,
default negation, comparisons and ``#count`` aggregates with at most two
guards. Everything else that is still well-delimited (directives,
disjunctions, weak constraints, other aggregates, ...) is kept verbatim as a
raw statement so that it survives a rewrite byte for byte.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import List, Optional, Tuple

from .syntax import (
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
    Guard,
    Program,
    Rule,
    Variable,
)

ERROR = "error"
PASSTHROUGH = "passthrough-note"


@dataclass(frozen=True)
class ParseDiagnostic:
    line: int
    column: int
    message: str
    severity: str

    def __str__(self):
        return f"{self.line}:{self.column}: {self.severity}: {self.message}"


@dataclass(frozen=True)
class Token:
    kind: str  # name, var, num, string, directive, op, dot, other
    text: str
    offset: int
    line: int
    column: int


class _Unsupported(Exception):
    """Statement is balanced but outside the structured subset."""


_OPERATORS = (
    ":-", ":~", "..", "!=", "<>", "<=", ">=", "==",
    "<", ">", "=", "+", "-", "*", "/", "\\", "(", ")", "{", "}", "[", "]",
    ",", ";", ":", "|", "@", "&", "^", "?", "~",
)
_NAME = re.compile(r"_*[a-z][A-Za-z0-9_']*")
_VAR = re.compile(r"_*[A-Z][A-Za-z0-9_']*|_")
_NUM = re.compile(r"0x[0-9A-Fa-f]+|0o[0-7]+|0b[01]+|\d+")
_DIRECTIVE = re.compile(r"#[A-Za-z_]+")
_SCRIPT_END = re.compile(r"#end\s*\.")

_COMPARISON_TOKENS = {"<": "<", "<=": "<=", "=": "=", "==": "=", "!=": "!=",
                      "<>": "!=", ">": ">", ">=": ">="}
_PAIRS = {"(": ")", "{": "}", "[": "]"}


class _Lexer:
    def __init__(self, source: str):
        self.source = source
        self.pos = 0
        self.line = 1
        self.column = 1
        self.errors: List[ParseDiagnostic] = []

    def _advance(self, count: int):
        chunk = self.source[self.pos:self.pos + count]
        newlines = chunk.count("\n")
        if newlines:
            self.line += newlines
            self.column = count - chunk.rfind("\n")
        else:
            self.column += count
        self.pos += count

    def tokens(self) -> List[Token]:
        out = []
        src = self.source
        while self.pos < len(src):
            ch = src[self.pos]
            if ch.isspace():
                self._advance(1)
                continue
            if src.startswith("%*", self.pos):
                end = src.find("*%", self.pos + 2)
                if end < 0:
                    self.errors.append(ParseDiagnostic(
                        self.line, self.column, "unterminated block comment", ERROR))
                    self._advance(len(src) - self.pos)
                else:
                    self._advance(end + 2 - self.pos)
                continue
            if ch == "%":
                end = src.find("\n", self.pos)
                self._advance((len(src) if end < 0 else end) - self.pos)
                continue
            start = (self.pos, self.line, self.column)
            if ch == '"':
                match = re.compile(r'"(?:\\.|[^"\\\n])*"').match(src, self.pos)
                if match is None:
                    self.errors.append(ParseDiagnostic(
                        self.line, self.column, "unterminated string", ERROR))
                    end = src.find("\n", self.pos)
                    self._advance((len(src) if end < 0 else end) - self.pos)
                    continue
                kind, text = "string", match.group()
            elif src.startswith("#script", self.pos):
                match = _SCRIPT_END.search(src, self.pos)
                stop = len(src) if match is None else match.start()
                kind, text = "script", src[self.pos:stop]
            elif ch == "#":
                match = _DIRECTIVE.match(src, self.pos)
                kind, text = ("directive", match.group()) if match else ("other", ch)
            elif ch == "." and not src.startswith("..", self.pos):
                kind, text = "dot", ch
            elif ch.isdigit():
                kind, text = "num", _NUM.match(src, self.pos).group()
            elif _NAME.match(src, self.pos):
                kind, text = "name", _NAME.match(src, self.pos).group()
            elif _VAR.match(src, self.pos):
                kind, text = "var", _VAR.match(src, self.pos).group()
            else:
                text = next((op for op in _OPERATORS if src.startswith(op, self.pos)), ch)
                kind = "op" if text in _OPERATORS else "other"
            out.append(Token(kind, text, *start))
            self._advance(len(text))
        return out


def _split_statements(tokens: List[Token]):
    """Group tokens into statements; yields (tokens, end_offset, complete)."""
    current: List[Token] = []
    i = 0
    while i < len(tokens):
        tok = tokens[i]
        current.append(tok)
        i += 1
        if tok.kind != "dot":
            continue
        end = tok.offset + 1
        if current[0].text == ":~" and i < len(tokens) and tokens[i].text == "[":
            # weak constraint: the weight/priority annotation follows the dot
            while i < len(tokens) and tokens[i].text != "]":
                current.append(tokens[i])
                i += 1
            if i < len(tokens):
                current.append(tokens[i])
                end = tokens[i].offset + 1
                i += 1
            else:
                yield current, None, False
                current = []
                continue
        yield current, end, True
        current = []
    if current:
        yield current, None, False


def _balance_error(tokens: List[Token]) -> Optional[Token]:
    stack = []
    for tok in tokens:
        if tok.kind != "op":
            continue
        if tok.text in _PAIRS:
            stack.append(tok)
        elif tok.text in _PAIRS.values():
            if not stack or _PAIRS[stack[-1].text] != tok.text:
                return tok
            stack.pop()
    return stack[0] if stack else None


class _StatementParser:
    def __init__(self, tokens: List[Token]):
        self.tokens = tokens
        self.i = 0

    def peek(self, ahead: int = 0) -> Optional[Token]:
        j = self.i + ahead
        return self.tokens[j] if j < len(self.tokens) else None

    def at(self, text: str, ahead: int = 0) -> bool:
        tok = self.peek(ahead)
        return tok is not None and tok.kind in ("op", "name", "directive") and tok.text == text

    def take(self) -> Token:
        tok = self.peek()
        if tok is None:
            raise _Unsupported("unexpected end of statement")
        self.i += 1
        return tok

    def expect(self, text: str) -> Token:
        if not self.at(text):
            raise _Unsupported(f"expected {text!r}")
        return self.take()

    def done(self) -> bool:
        return self.i >= len(self.tokens)

    # statements

    def statement(self) -> Rule:
        if not self.tokens:
            raise _Unsupported("empty statement")
        head = None
        if not self.at(":-"):
            head = self.head()
        body: Tuple = ()
        if self.at(":-"):
            self.take()
            body = self.body()
        if not self.done():
            raise _Unsupported(f"unexpected {self.peek().text!r}")
        if head is None and not body:
            raise _Unsupported("empty constraint")
        return Rule(head, body)

    def head(self):
        if self.at("{"):
            self.take()
            atoms = [self.atom()]
            while self.at(";"):
                self.take()
                atoms.append(self.atom())
            self.expect("}")
            return Choice(tuple(atoms))
        return self.atom()

    def atom(self) -> Atom:
        tok = self.peek()
        if tok is None or tok.kind != "name" or tok.text == "not":
            raise _Unsupported("expected an atom")
        term = self.primary()
        return _as_atom(term)

    def body(self) -> Tuple:
        literals = [self.literal()]
        while self.at(",") or self.at(";"):
            self.take()
            literals.append(self.literal())
        return tuple(literals)

    def literal(self, in_condition: bool = False):
        negated = False
        if self.at("not") and not self._name_is_term():
            self.take()
            negated = True
            if self.at("not"):
                raise _Unsupported("double negation")
        if self.at("#count"):
            if in_condition:
                raise _Unsupported("nested aggregate")
            return AggregateLiteral(self.aggregate(None), negated)
        left = self.term()
        op = self.comparison_op()
        if op is not None:
            if self.at("#count"):
                if in_condition:
                    raise _Unsupported("nested aggregate")
                return AggregateLiteral(self.aggregate(Guard(op, left)), negated)
            if negated:
                raise _Unsupported("negated comparison")
            return Comparison(left, op, self.term())
        return AtomLiteral(_as_atom(left), negated)

    def _name_is_term(self) -> bool:
        # "not" directly followed by "(" would be a predicate called not
        return self.at("(", 1)

    def comparison_op(self) -> Optional[str]:
        tok = self.peek()
        if tok is not None and tok.kind == "op" and tok.text in _COMPARISON_TOKENS:
            self.take()
            return _COMPARISON_TOKENS[tok.text]
        return None

    def aggregate(self, lower: Optional[Guard]) -> CountAggregate:
        self.expect("#count")
        self.expect("{")
        elements = [self.element()]
        while self.at(";"):
            self.take()
            elements.append(self.element())
        self.expect("}")
        upper = None
        op = self.comparison_op()
        if op is not None:
            upper = Guard(op, self.term())
        if lower is None and upper is None:
            raise _Unsupported("unguarded aggregate")
        return CountAggregate(tuple(elements), lower, upper)

    def element(self) -> AggregateElement:
        terms = [self.term()]
        while self.at(","):
            self.take()
            terms.append(self.term())
        self.expect(":")
        condition = [self.literal(in_condition=True)]
        while self.at(","):
            self.take()
            condition.append(self.literal(in_condition=True))
        return AggregateElement(tuple(terms), tuple(condition))

    # terms

    def term(self):
        left = self.product()
        while self.at("+") or self.at("-"):
            op = self.take().text
            left = Arithmetic(op, left, self.product())
        return left

    def product(self):
        left = self.unary()
        while self.at("*"):
            self.take()
            left = Arithmetic("*", left, self.unary())
        return left

    def unary(self):
        if self.at("-"):
            nxt = self.peek(1)
            if nxt is not None and nxt.kind == "num":
                self.take()
                return Constant(-_integer(self.take().text))
            raise _Unsupported("unary minus on a non-number")
        return self.primary()

    def primary(self):
        tok = self.take()
        if tok.kind == "num":
            return Constant(_integer(tok.text))
        if tok.kind == "var":
            return Variable(tok.text)
        if tok.kind == "name":
            if self.at("("):
                self.take()
                args = [self.term()]
                while self.at(","):
                    self.take()
                    args.append(self.term())
                self.expect(")")
                return Function(tok.text, tuple(args))
            return Constant(tok.text)
        if tok.kind == "op" and tok.text == "(":
            inner = self.term()
            self.expect(")")
            return inner
        raise _Unsupported(f"unexpected {tok.text!r}")


def _integer(text: str) -> int:
    return int(text, 0) if text[:2] in ("0x", "0o", "0b") else int(text)


def _as_atom(term) -> Atom:
    if isinstance(term, Constant) and isinstance(term.value, str):
        return Atom(term.value)
    if isinstance(term, Function):
        return Atom(term.name, term.args)
    raise _Unsupported("expected an atom")


def parse(source: str) -> Tuple[Program, List[ParseDiagnostic]]:
    """Parse program text into a Program plus diagnostics.

    Statements with unbalanced delimiters or without a terminating ``.`` are
    reported as errors and skipped; everything else becomes a structured or
    raw rule, in source order.
    """
    lexer = _Lexer(source)
    tokens = lexer.tokens()
    diagnostics = list(lexer.errors)
    statements = []
    for group, end, complete in _split_statements(tokens):
        first = group[0]
        if not complete:
            diagnostics.append(ParseDiagnostic(
                first.line, first.column, "statement is missing its terminating '.'", ERROR))
            continue
        bad = _balance_error(group)
        if bad is not None:
            diagnostics.append(ParseDiagnostic(
                bad.line, bad.column, f"unbalanced {bad.text!r}", ERROR))
            continue
        body_tokens = group[:-1] if group[-1].kind == "dot" else None
        try:
            if body_tokens is None or any(t.kind in ("other", "string", "script") for t in group):
                raise _Unsupported("unsupported tokens")
            parser = _StatementParser(body_tokens)
            statements.append(parser.statement())
        except (_Unsupported, ValueError) as exc:
            statements.append(Rule(raw=source[first.offset:end]))
            diagnostics.append(ParseDiagnostic(
                first.line, first.column, f"kept verbatim ({exc})", PASSTHROUGH))
    return Program(tuple(statements)), diagnostics


def parse_file(path) -> Tuple[Program, List[ParseDiagnostic]]:
    with open(path, encoding="utf-8") as handle:
        return parse(handle.read())


# rendering

_PRECEDENCE = {"+": 1, "-": 1, "*": 2}


def render_term(term) -> str:
    if isinstance(term, Constant):
        return str(term.value)
    if isinstance(term, Variable):
        return term.name
    if isinstance(term, Function):
        return f"{term.name}({','.join(render_term(a) for a in term.args)})"
    prec = _PRECEDENCE[term.op]
    left, right = render_term(term.left), render_term(term.right)
    if isinstance(term.left, Arithmetic) and _PRECEDENCE[term.left.op] < prec:
        left = f"({left})"
    if isinstance(term.right, Arithmetic) and _PRECEDENCE[term.right.op] <= prec:
        right = f"({right})"
    return f"{left}{term.op}{right}"


def render_atom(atom: Atom) -> str:
    if not atom.args:
        return atom.predicate
    return f"{atom.predicate}({','.join(render_term(a) for a in atom.args)})"


def render_literal(literal) -> str:
    if isinstance(literal, Comparison):
        return f"{render_term(literal.left)}{literal.op}{render_term(literal.right)}"
    prefix = "not " if literal.negated else ""
    if isinstance(literal, AtomLiteral):
        return prefix + render_atom(literal.atom)
    aggregate = literal.aggregate
    elements = "; ".join(
        f"{','.join(render_term(t) for t in e.terms)} : "
        f"{', '.join(render_literal(c) for c in e.condition)}"
        for e in aggregate.elements
    )
    text = f"#count{{ {elements} }}"
    if aggregate.lower is not None:
        text = f"{render_term(aggregate.lower.term)} {aggregate.lower.op} {text}"
    if aggregate.upper is not None:
        text = f"{text} {aggregate.upper.op} {render_term(aggregate.upper.term)}"
    return prefix + text


def render_rule(rule: Rule) -> str:
    if rule.raw is not None:
        return rule.raw
    if isinstance(rule.head, Choice):
        head = "{ " + "; ".join(render_atom(a) for a in rule.head.atoms) + " }"
    elif rule.head is not None:
        head = render_atom(rule.head)
    else:
        head = ""
    if not rule.body:
        return head + "."
    body = ", ".join(render_literal(lit) for lit in rule.body)
    return f"{head} :- {body}." if head else f":- {body}."


def render(program: Program) -> str:
    return "".join(render_rule(rule) + "\n" for rule in program)
