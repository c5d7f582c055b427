"""Tokenizer, s-expression reader and printer for SMT-LIB v2.6 text."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence, Union

from .errors import LexError, ParseError


@dataclass(frozen=True, order=True)
class Span:
    line: int
    column: int

    def __str__(self):
        return f"{self.line}:{self.column}"


# Token kinds
LPAREN = "LParen"
RPAREN = "RParen"
SYMBOL = "Symbol"
NUMERAL = "Numeral"
DECIMAL = "Decimal"
HEXADECIMAL = "Hexadecimal"
BINARY = "Binary"
STRING = "String"
KEYWORD = "Keyword"


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    span: Span = field(compare=False)
    quoted: bool = False

    def __repr__(self):
        if self.kind in (LPAREN, RPAREN):
            return self.kind
        return f"{self.kind}({self.text})"


_SIMPLE_SYMBOL_CHARS = "~!@$%^&*_-+=<>.?/"
_SIMPLE_SYMBOL = re.compile(r"[A-Za-z~!@$%^&*_\-+=<>.?/][A-Za-z0-9~!@$%^&*_\-+=<>.?/]*")
_ATOM_END = set(" \t\r\n()|\";")


def tokenize(text: str) -> list[Token]:
    """Split ``text`` into tokens, dropping whitespace and ``;`` comments.

    Raises :class:`LexError` on unterminated quoted symbols or string literals.
    Balance of parentheses is left to the parser.
    """
    tokens: list[Token] = []
    i, n = 0, len(text)
    line, col = 1, 1

    def advance(upto: int) -> None:
        nonlocal i, line, col
        chunk = text[i:upto]
        newlines = chunk.count("\n")
        if newlines:
            line += newlines
            col = len(chunk) - chunk.rfind("\n")
        else:
            col += len(chunk)
        i = upto

    while i < n:
        c = text[i]
        if c in " \t\r\n":
            advance(i + 1)
            continue
        if c == ";":
            end = text.find("\n", i)
            advance(n if end < 0 else end)
            continue
        span = Span(line, col)
        if c == "(":
            tokens.append(Token(LPAREN, "(", span))
            advance(i + 1)
        elif c == ")":
            tokens.append(Token(RPAREN, ")", span))
            advance(i + 1)
        elif c == "|":
            end = text.find("|", i + 1)
            if end < 0:
                raise LexError("unterminated quoted symbol", span)
            body = text[i + 1:end]
            if "\\" in body:
                raise LexError("backslash is not allowed in a quoted symbol", span)
            tokens.append(Token(SYMBOL, body, span, quoted=True))
            advance(end + 1)
        elif c == '"':
            j = i + 1
            chars = []
            while True:
                if j >= n:
                    raise LexError("unterminated string literal", span)
                if text[j] == '"':
                    if j + 1 < n and text[j + 1] == '"':
                        chars.append('"')
                        j += 2
                        continue
                    break
                chars.append(text[j])
                j += 1
            tokens.append(Token(STRING, "".join(chars), span))
            advance(j + 1)
        else:
            j = i
            while j < n and text[j] not in _ATOM_END:
                j += 1
            word = text[i:j]
            tokens.append(Token(_classify(word, span), word, span))
            advance(j)
    return tokens


def _classify(word: str, span: Span) -> str:
    if word[0].isdigit():
        if word.isdigit():
            if len(word) > 1 and word[0] == "0":
                raise LexError(f"numeral with leading zero: {word}", span)
            return NUMERAL
        if re.fullmatch(r"(0|[1-9][0-9]*)\.[0-9]+", word):
            return DECIMAL
        raise LexError(f"malformed numeral: {word}", span)
    if word.startswith("#x") and re.fullmatch(r"#x[0-9A-Fa-f]+", word):
        return HEXADECIMAL
    if word.startswith("#b") and re.fullmatch(r"#b[01]+", word):
        return BINARY
    if word[0] == ":":
        if len(word) == 1 or not _SIMPLE_SYMBOL.fullmatch("a" + word[1:]):
            raise LexError(f"malformed keyword: {word}", span)
        return KEYWORD
    if not _SIMPLE_SYMBOL.fullmatch(word):
        raise LexError(f"illegal character in symbol: {word}", span)
    return SYMBOL


# ---------------------------------------------------------------------------
# S-expression tree. Spans are carried for diagnostics but never compared.


@dataclass(frozen=True)
class Symbol:
    name: str
    span: Span | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Numeral:
    value: int
    span: Span | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Keyword:
    name: str  # without the leading colon
    span: Span | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Literal:
    """Decimal, hexadecimal, binary or string constant kept as source text."""

    kind: str
    text: str
    span: Span | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class SList:
    items: tuple
    span: Span | None = field(default=None, compare=False, repr=False)

    def __len__(self):
        return len(self.items)

    def __getitem__(self, index):
        return self.items[index]

    def __iter__(self) -> Iterator:
        return iter(self.items)


SExpr = Union[Symbol, Numeral, Keyword, Literal, SList]


def sym(name: str) -> Symbol:
    return Symbol(name)


def slist(*items) -> SList:
    return SList(tuple(items))


def head_symbol(e: SExpr) -> str | None:
    if isinstance(e, SList) and e.items and isinstance(e.items[0], Symbol):
        return e.items[0].name
    return None


def parse_sexprs(tokens: Sequence[Token]) -> list[SExpr]:
    """Group a token stream into top-level s-expressions."""
    stack: list[tuple[Span, list]] = []
    out: list[SExpr] = []
    for tok in tokens:
        if tok.kind == LPAREN:
            stack.append((tok.span, []))
            continue
        if tok.kind == RPAREN:
            if not stack:
                raise ParseError("unbalanced ')'", tok.span)
            span, items = stack.pop()
            node: SExpr = SList(tuple(items), span)
        elif tok.kind == SYMBOL:
            node = Symbol(tok.text, tok.span)
        elif tok.kind == NUMERAL:
            node = Numeral(int(tok.text), tok.span)
        elif tok.kind == KEYWORD:
            node = Keyword(tok.text[1:], tok.span)
        else:
            node = Literal(tok.kind, tok.text, tok.span)
        if stack:
            stack[-1][1].append(node)
        else:
            out.append(node)
    if stack:
        raise ParseError("unbalanced '(': list is never closed", stack[-1][0])
    return out


def read(text: str) -> list[SExpr]:
    return parse_sexprs(tokenize(text))


def read_one(text: str) -> SExpr:
    exprs = read(text)
    if len(exprs) != 1:
        raise ParseError(f"expected exactly one s-expression, found {len(exprs)}")
    return exprs[0]


# ---------------------------------------------------------------------------
# Printing


def quote_symbol(name: str) -> str:
    if _SIMPLE_SYMBOL.fullmatch(name):
        return name
    return f"|{name}|"


def atom_text(e: SExpr) -> str:
    if isinstance(e, Symbol):
        return quote_symbol(e.name)
    if isinstance(e, Numeral):
        return str(e.value)
    if isinstance(e, Keyword):
        return ":" + e.name
    if isinstance(e, Literal):
        if e.kind == STRING:
            return '"' + e.text.replace('"', '""') + '"'
        return e.text
    raise TypeError(f"not an atom: {e!r}")


def to_text(e: SExpr) -> str:
    """Single-line rendering."""
    if isinstance(e, SList):
        return "(" + " ".join(to_text(x) for x in e.items) + ")"
    return atom_text(e)


def pretty(e: SExpr, width: int = 100, indent: int = 0) -> str:
    """Deterministic multi-line layout: a list that does not fit on the
    current line keeps its head (and first argument when it is an atom) on
    the opening line and puts each remaining child on its own line."""
    flat = to_text(e)
    if not isinstance(e, SList) or indent + len(flat) <= width or len(e.items) < 2:
        return flat
    items = list(e.items)
    first = [items.pop(0)]
    if not isinstance(first[0], SList) and items and not isinstance(items[0], SList):
        first.append(items.pop(0))
    opening = "(" + " ".join(to_text(x) for x in first)
    pad = " " * (indent + 2)
    lines = [opening]
    for child in items:
        lines.append(pad + pretty(child, width, indent + 2))
    return "\n".join(lines) + ")"


def print_sexprs(exprs: Iterable[SExpr], width: int = 100) -> str:
    rendered = [pretty(e, width) for e in exprs]
    return "".join(r + "\n" for r in rendered)
