"""Formula syntax for single-agent dynamic epistemic logic.

Text grammar (loosest binding first)::

    iff     := imp ['<->' iff]
    imp     := or ['->' imp]
    or      := and ('|' and)*
    and     := unary ('&' unary)*
    unary   := '~' unary | 'K' unary | 'Kw' unary | '[' name ']' unary | primary
    primary := 'true' | 'false' | name | '(' iff ')'

``&`` and ``|`` associate to the left, ``->`` and ``<->`` to the right.
The unicode connectives are accepted on input as aliases.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Iterator, List, Optional, Tuple, Union


class FormulaSyntaxError(ValueError):
    """Raised on malformed formula text; ``position`` is a 0-based offset."""

    def __init__(self, message: str, position: int, text: str):
        super().__init__(f"{message} at position {position}: {text!r}")
        self.position = position
        self.text = text


class Formula:
    """Base class of all formula nodes."""

    __slots__ = ()

    def __str__(self) -> str:
        return render_formula(self)


@dataclass(frozen=True)
class Atom(Formula):
    name: str


@dataclass(frozen=True)
class Top(Formula):
    pass


@dataclass(frozen=True)
class Bot(Formula):
    pass


@dataclass(frozen=True)
class Neg(Formula):
    sub: Formula


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Implies(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Iff(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Know(Formula):
    sub: Formula


@dataclass(frozen=True)
class KnowWhether(Formula):
    sub: Formula


@dataclass(frozen=True)
class DynEvent(Formula):
    """``[ref] sub`` where ``ref`` names an event model."""

    ref: str
    sub: Formula


@dataclass(frozen=True)
class DynAction(Formula):
    """``[action] sub`` evaluated against a domain's transitions."""

    action: str
    sub: Formula


BINARY = (And, Or, Implies, Iff)
UNARY = (Neg, Know, KnowWhether, DynEvent, DynAction)
Binary = Union[And, Or, Implies, Iff]


def conj(parts: Iterable[Formula]) -> Formula:
    """Left-nested conjunction; ``Top`` when empty."""
    out: Optional[Formula] = None
    for f in parts:
        out = f if out is None else And(out, f)
    return Top() if out is None else out


def disj(parts: Iterable[Formula]) -> Formula:
    """Left-nested disjunction; ``Bot`` when empty."""
    out: Optional[Formula] = None
    for f in parts:
        out = f if out is None else Or(out, f)
    return Bot() if out is None else out


def atoms(f: Formula) -> frozenset:
    """Proposition names occurring in ``f``."""
    if isinstance(f, Atom):
        return frozenset([f.name])
    if isinstance(f, BINARY):
        return atoms(f.left) | atoms(f.right)
    if isinstance(f, UNARY):
        return atoms(f.sub)
    return frozenset()


def subformulas(f: Formula) -> Iterator[Formula]:
    yield f
    if isinstance(f, BINARY):
        yield from subformulas(f.left)
        yield from subformulas(f.right)
    elif isinstance(f, UNARY):
        yield from subformulas(f.sub)


def is_static(f: Formula) -> bool:
    """True when ``f`` has no dynamic modality."""
    return not any(isinstance(g, (DynEvent, DynAction)) for g in subformulas(f))


def dynamic_labels(f: Formula) -> frozenset:
    """Names used inside ``[...]`` anywhere in ``f``."""
    out = set()
    for g in subformulas(f):
        if isinstance(g, DynEvent):
            out.add(g.ref)
        elif isinstance(g, DynAction):
            out.add(g.action)
    return frozenset(out)


# ---------------------------------------------------------------- rendering

_PREC = {Iff: 1, Implies: 2, Or: 3, And: 4}
_UNARY_PREC = 5
_OPS = {Iff: "<->", Implies: "->", Or: "|", And: "&"}
_RIGHT_ASSOC = (Implies, Iff)


def _render(f: Formula, ctx: int) -> str:
    if isinstance(f, Atom):
        return f.name
    if isinstance(f, Top):
        return "true"
    if isinstance(f, Bot):
        return "false"
    if isinstance(f, BINARY):
        prec = _PREC[type(f)]
        if isinstance(f, _RIGHT_ASSOC):
            lhs, rhs = _render(f.left, prec + 1), _render(f.right, prec)
        else:
            lhs, rhs = _render(f.left, prec), _render(f.right, prec + 1)
        text = f"{lhs} {_OPS[type(f)]} {rhs}"
        return f"({text})" if prec < ctx else text
    body = _render(f.sub, _UNARY_PREC)
    if isinstance(f, Neg):
        return "~" + body
    if isinstance(f, DynEvent):
        return f"[{f.ref}]" + body
    if isinstance(f, DynAction):
        return f"[{f.action}]" + body
    op = "K" if isinstance(f, Know) else "Kw"
    return op + body if body.startswith("(") else f"{op} {body}"


def render_formula(f: Formula) -> str:
    """Canonical ASCII text with minimal parentheses."""
    return _render(f, 0)


# ---------------------------------------------------------------- parsing

_TOKEN = re.compile(
    r"\s*(?:(?P<op><->|->|[~&|()\[\]¬∧∨→↔⊤⊥])|(?P<name>[A-Za-z_][A-Za-z0-9_']*)|(?P<bad>\S))"
)
_ALIASES = {"¬": "~", "∧": "&", "∨": "|", "→": "->", "↔": "<->", "⊤": "true", "⊥": "false"}
_KEYWORDS = {"K", "Kw", "true", "false"}

Token = Tuple[str, str, int]  # kind, value, position


def _tokenize(text: str) -> List[Token]:
    tokens: List[Token] = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:  # only trailing whitespace left
            break
        start = m.start(m.lastgroup)
        if m.lastgroup == "bad":
            raise FormulaSyntaxError(f"unexpected character {m.group('bad')!r}", start, text)
        value = m.group(m.lastgroup)
        value = _ALIASES.get(value, value)
        if m.lastgroup == "name" or value in ("true", "false"):
            kind = value if value in _KEYWORDS else "name"
        else:
            kind = value
        tokens.append((kind, value, start))
        pos = m.end()
    tokens.append(("eof", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, action_modalities: bool):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0
        self.dyn = DynAction if action_modalities else DynEvent

    def peek(self) -> str:
        return self.tokens[self.i][0]

    def take(self, kind: str) -> Token:
        tok = self.tokens[self.i]
        if tok[0] != kind:
            found = "end of input" if tok[0] == "eof" else repr(tok[1])
            raise FormulaSyntaxError(f"expected {kind!r}, found {found}", tok[2], self.text)
        self.i += 1
        return tok

    def parse(self) -> Formula:
        f = self.iff()
        self.take("eof")
        return f

    def iff(self) -> Formula:
        left = self.imp()
        if self.peek() == "<->":
            self.i += 1
            return Iff(left, self.iff())
        return left

    def imp(self) -> Formula:
        left = self.disj()
        if self.peek() == "->":
            self.i += 1
            return Implies(left, self.imp())
        return left

    def disj(self) -> Formula:
        f = self.conj()
        while self.peek() == "|":
            self.i += 1
            f = Or(f, self.conj())
        return f

    def conj(self) -> Formula:
        f = self.unary()
        while self.peek() == "&":
            self.i += 1
            f = And(f, self.unary())
        return f

    def unary(self) -> Formula:
        kind = self.peek()
        if kind == "~":
            self.i += 1
            return Neg(self.unary())
        if kind == "K":
            self.i += 1
            return Know(self.unary())
        if kind == "Kw":
            self.i += 1
            return KnowWhether(self.unary())
        if kind == "[":
            self.i += 1
            label = self.take("name")[1]
            self.take("]")
            return self.dyn(label, self.unary())
        return self.primary()

    def primary(self) -> Formula:
        kind, value, pos = self.tokens[self.i]
        if kind == "true":
            self.i += 1
            return Top()
        if kind == "false":
            self.i += 1
            return Bot()
        if kind == "name":
            self.i += 1
            return Atom(value)
        if kind == "(":
            self.i += 1
            f = self.iff()
            self.take(")")
            return f
        found = "end of input" if kind == "eof" else repr(value)
        raise FormulaSyntaxError(f"expected a formula, found {found}", pos, self.text)


def parse_formula(text: str, action_modalities: bool = False) -> Formula:
    """Parse formula text.

    ``[name]`` becomes a ``DynEvent`` by default and a ``DynAction`` when
    ``action_modalities`` is set (formulas evaluated on domain states).
    """
    return _Parser(text, action_modalities).parse()
