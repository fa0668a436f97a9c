"""Reader and writer for the ``.shiq`` text format.

One statement per line is conventional but not required; whitespace is
insignificant and ``#`` starts a comment running to the end of the line::

    Transitive(partOf)
    SubRoleOf(inv(hasPart), partOf)
    SubClassOf(some(R0, B), A)
    EquivalentClasses(Parent, some(hasChild, top))
    ClassAssertion(B, b)
    RoleAssertion(R0, a, b)
    Different(a, b)

``EquivalentClasses(C, D)`` is stored as the two GCIs ``C ⊑ D`` and ``D ⊑ C``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .model import (
    BOTTOM,
    FRESH_PREFIX,
    TOP,
    All,
    And,
    Atomic,
    ClassAssertion,
    Concept,
    Different,
    Max,
    Min,
    Not,
    Ontology,
    Or,
    Role,
    RoleAssertion,
    Some,
    SubClassOf,
    SubRoleOf,
    Transitive,
    ValidationError,
)


@dataclass(frozen=True)
class SourceSpan:
    line: int
    column: int

    def __str__(self) -> str:
        return f"{self.line}:{self.column}"


class ParseError(ValueError):
    def __init__(self, message: str, span: SourceSpan):
        super().__init__(f"{span}: {message}")
        self.span = span


class SpannedValidationError(ValidationError):
    def __init__(self, message: str, span: SourceSpan):
        super().__init__(f"{span}: {message}")
        self.span = span


_TOKEN = re.compile(
    r"(?P<ws>[ \t\r\n]+)|(?P<comment>\#[^\n]*)|(?P<int>\d+(?![A-Za-z_]))"
    r"|(?P<ident>[A-Za-z_][A-Za-z0-9_.\-]*)|(?P<punct>[(),])"
)


def _tokenize(text: str):
    pos, line, line_start = 0, 1, 0
    tokens = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        span = SourceSpan(line, pos - line_start + 1)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", span)
        kind = m.lastgroup
        value = m.group()
        if kind == "ws":
            for i, ch in enumerate(value):
                if ch == "\n":
                    line += 1
                    line_start = pos + i + 1
        elif kind != "comment":
            tokens.append((kind, value, span))
        pos = m.end()
    tokens.append(("eof", "", SourceSpan(line, pos - line_start + 1)))
    return tokens


_BINARY = {"and": And, "or": Or}
_QUANT = {"some": Some, "all": All}
_NUMBER = {"min": Min, "max": Max}


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def next(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value: str):
        kind, val, span = self.next()
        if val != value or kind == "eof":
            found = "end of input" if kind == "eof" else repr(val)
            raise ParseError(f"expected {value!r}, found {found}", span)
        return span

    def name(self, what: str) -> str:
        kind, val, span = self.next()
        if kind != "ident":
            found = "end of input" if kind == "eof" else repr(val)
            raise ParseError(f"expected {what} name, found {found}", span)
        if val.startswith(FRESH_PREFIX):
            raise SpannedValidationError(
                f"identifier {val!r} uses the reserved prefix {FRESH_PREFIX!r}", span
            )
        return val

    def integer(self) -> int:
        kind, val, span = self.next()
        if kind != "int":
            raise ParseError(f"expected a non-negative integer, found {val!r}", span)
        return int(val)

    def role(self) -> Role:
        kind, val, _ = self.peek()
        if kind == "ident" and val == "inv" and self.tokens[self.i + 1][1] == "(":
            self.next()
            self.expect("(")
            r = Role(self.name("role"), True)
            self.expect(")")
            return r
        return Role(self.name("role"))

    def concept(self) -> Concept:
        kind, val, span = self.peek()
        if kind != "ident":
            found = "end of input" if kind == "eof" else repr(val)
            raise ParseError(f"expected a concept, found {found}", span)
        follows_paren = self.tokens[self.i + 1][1] == "("
        if val == "top" and not follows_paren:
            self.next()
            return TOP
        if val == "bottom" and not follows_paren:
            self.next()
            return BOTTOM
        if not follows_paren:
            return Atomic(self.name("concept"))
        self.next()
        self.expect("(")
        if val == "not":
            c = Not(self.concept())
        elif val in _BINARY:
            left = self.concept()
            self.expect(",")
            c = _BINARY[val](left, self.concept())
        elif val in _QUANT:
            r = self.role()
            self.expect(",")
            c = _QUANT[val](r, self.concept())
        elif val in _NUMBER:
            n = self.integer()
            self.expect(",")
            r = self.role()
            self.expect(",")
            c = _NUMBER[val](n, r, self.concept())
        else:
            raise ParseError(f"unknown concept constructor {val!r}", span)
        self.expect(")")
        return c

    def statement(self, tbox: list, abox: list):
        kind, val, span = self.next()
        if kind != "ident":
            raise ParseError(f"expected a statement, found {val!r}", span)
        self.expect("(")
        if val == "Transitive":
            tbox.append(Transitive(self.name("role")))
        elif val == "SubRoleOf":
            sub = self.role()
            self.expect(",")
            tbox.append(SubRoleOf(sub, self.role()))
        elif val in ("SubClassOf", "EquivalentClasses"):
            lhs = self.concept()
            self.expect(",")
            rhs = self.concept()
            tbox.append(SubClassOf(lhs, rhs))
            if val == "EquivalentClasses":
                tbox.append(SubClassOf(rhs, lhs))
        elif val == "ClassAssertion":
            cspan = self.peek()[2]
            c = self.concept()
            if not isinstance(c, Atomic):
                raise SpannedValidationError(
                    f"class assertions take a concept name, got {c}", cspan
                )
            self.expect(",")
            abox.append(ClassAssertion(len(abox), c.name, self.name("individual")))
        elif val == "RoleAssertion":
            r = self.role()
            self.expect(",")
            s = self.name("individual")
            self.expect(",")
            abox.append(RoleAssertion(len(abox), r, s, self.name("individual")))
        elif val == "Different":
            a = self.name("individual")
            self.expect(",")
            abox.append(Different(len(abox), a, self.name("individual")))
        else:
            raise ParseError(f"unknown statement {val!r}", span)
        self.expect(")")

    def ontology(self) -> Ontology:
        tbox, abox = [], []
        while self.peek()[0] != "eof":
            self.statement(tbox, abox)
        return Ontology(tuple(tbox), tuple(abox))


def parse(text: str) -> Ontology:
    """Parse ``.shiq`` text. Assertion ids are positions among assertions."""
    return _Parser(text).ontology()


def parse_concept(text: str) -> Concept:
    p = _Parser(text)
    c = p.concept()
    if p.peek()[0] != "eof":
        raise ParseError("trailing input after concept", p.peek()[2])
    return c


def parse_assertion(text: str):
    """Parse a single ABox statement such as ``ClassAssertion(A, a)``."""
    onto = parse(text)
    if onto.tbox or len(onto.abox) != 1:
        raise ValidationError(f"expected exactly one assertion: {text!r}")
    return onto.abox[0]


def load(path) -> Ontology:
    with open(path, encoding="utf-8") as fh:
        return parse(fh.read())


def serialize(onto: Ontology) -> str:
    lines = [str(ax) for ax in onto.tbox] + [str(a) for a in onto.abox]
    return "".join(line + "\n" for line in lines)


def dump(onto: Ontology, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(serialize(onto))
