"""Recursive-descent parser for the infix formula syntax.

Grammar (precedence high to low, `U` right-associative)::

    expr   := or
    or     := and ('|' or)?
    and    := until ('&' and)?
    until  := unary ('U' until)?
    unary  := ('!' | 'X' | 'F' | 'G') unary | atom
    atom   := 'true' | 'false' | identifier | '(' expr ')'

The word tokens ``X``, ``F``, ``G`` act as unary operators only when a
formula can start right after them; otherwise they are read as plain
propositions. That keeps single capital letters usable as propositions
("F G" is eventually-G, "F & G" is the conjunction of props F and G).
``U`` is always the binary operator and can never name a proposition.
"""

from __future__ import annotations

import re

from .formula import (
    FALSE,
    TRUE,
    Always,
    And,
    Eventually,
    Formula,
    Next,
    Not,
    Or,
    Prop,
    Until,
    Vocabulary,
    valid_prop_name,
)

__all__ = ["parse", "ParseError"]


class ParseError(ValueError):
    """Syntax or vocabulary error, with the byte offset of the problem."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at offset {offset})")
        self.offset = offset


_TOKEN_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*|[!&|()]|\S")

_UNARY_WORDS = {"X": Next, "F": Eventually, "G": Always}


def _tokenize(text: str) -> list[tuple[str, int]]:
    tokens = []
    for m in _TOKEN_RE.finditer(text):
        tok = m.group()
        if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*|[!&|()]", tok):
            raise ParseError(f"unexpected character {tok!r}", m.start())
        tokens.append((tok, m.start()))
    tokens.append(("", len(text)))  # end marker
    return tokens


class _Parser:
    def __init__(self, text: str, vocab: Vocabulary | None):
        self.tokens = _tokenize(text)
        self.pos = 0
        self.vocab = vocab

    def peek(self) -> tuple[str, int]:
        return self.tokens[self.pos]

    def advance(self) -> tuple[str, int]:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def _starts_operand(self, tok: str) -> bool:
        if tok in ("(", "!"):
            return True
        # any word except the infix-only U can begin a formula
        return bool(tok) and tok not in ("U", ")", "&", "|")

    def expr(self) -> Formula:
        return self.or_expr()

    def or_expr(self) -> Formula:
        left = self.and_expr()
        if self.peek()[0] == "|":
            self.advance()
            return Or(left, self.or_expr())
        return left

    def and_expr(self) -> Formula:
        left = self.until_expr()
        if self.peek()[0] == "&":
            self.advance()
            return And(left, self.and_expr())
        return left

    def until_expr(self) -> Formula:
        left = self.unary_expr()
        if self.peek()[0] == "U":
            self.advance()
            return Until(left, self.until_expr())
        return left

    def unary_expr(self) -> Formula:
        tok, _ = self.peek()
        if tok == "!":
            self.advance()
            return Not(self.unary_expr())
        if tok in _UNARY_WORDS and self._starts_operand(self.tokens[self.pos + 1][0]):
            self.advance()
            return _UNARY_WORDS[tok](self.unary_expr())
        return self.atom()

    def atom(self) -> Formula:
        tok, off = self.advance()
        if tok == "(":
            inner = self.expr()
            close, coff = self.advance()
            if close != ")":
                raise ParseError("expected ')'", coff)
            return inner
        if tok == "true":
            return TRUE
        if tok == "false":
            return FALSE
        if tok == "" or tok in (")", "&", "|", "U", "!"):
            shown = tok if tok else "end of input"
            raise ParseError(f"expected a formula, found {shown!r}", off)
        if not valid_prop_name(tok):
            raise ParseError(f"invalid proposition name {tok!r}", off)
        if self.vocab is not None and tok not in self.vocab:
            raise ParseError(f"unknown proposition {tok!r}", off)
        return Prop(tok)


def parse(text: str, vocab: Vocabulary | None = None) -> Formula:
    """Parse an infix formula string into its unique AST.

    With ``vocab`` the parse is strict: propositions not in the vocabulary
    raise :class:`ParseError`. Without it, any identifier is accepted;
    collect the result's propositions afterwards (e.g. via
    ``Vocabulary.from_formulas``) to register them.
    """
    parser = _Parser(text, vocab)
    result = parser.expr()
    tok, off = parser.peek()
    if tok != "":
        raise ParseError(f"unexpected trailing input {tok!r}", off)
    return result
