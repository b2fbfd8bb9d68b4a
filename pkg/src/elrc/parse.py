"""Text format for knowledge bases and single axioms.

Grammar::

    document   := { section }
    section    := ("tbox:" | "dbox:") NEWLINE { axiom-line }
    axiom      := concept ("<=" | "<~" | "==") concept
    concept    := primary { "&" primary }
    primary    := "top" | "bot" | NAME | "{" NAME "}" | "<" NAME ">"
                | "some" NAME "." primary | "(" concept ")"

``<=`` and ``==`` belong in ``tbox:``; ``<~`` belongs in ``dbox:``.  A ``#``
starts a comment that runs to the end of the line.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path

from .model import (
    BOT,
    TOP,
    Atom,
    Concept,
    DefeasibleGci,
    DefNominal,
    Exists,
    KnowledgeBase,
    Nominal,
    StrictGci,
    canonicalize,
    conj,
    is_reserved,
)

KEYWORDS = {"top", "bot", "some"}

_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t\r]+)
  | (?P<op><=|<~|==)
  | (?P<name>[A-Za-z_][A-Za-z0-9_-]*(?:\.[A-Za-z0-9_-]+)*)
  | (?P<punct>[&{}()<>.])
    """,
    re.VERBOSE,
)


class ParseError(ValueError):
    def __init__(self, line: int, column: int, message: str, origin: str = "<input>"):
        self.line = line
        self.column = column
        self.message = message
        self.origin = origin
        super().__init__(f"{origin}:{line}:{column}: {message}")


@dataclass(frozen=True)
class SourceDocument:
    text: str
    origin: str = "<input>"

    @classmethod
    def from_path(cls, path: str | Path) -> SourceDocument:
        p = Path(path)
        return cls(p.read_text(encoding="utf-8"), str(p))


@dataclass(frozen=True)
class _Tok:
    kind: str
    text: str
    col: int


def _tokenize(line: str, lineno: int, origin: str) -> list[_Tok]:
    toks: list[_Tok] = []
    pos = 0
    while pos < len(line):
        if line[pos] == "#":
            break
        m = _TOKEN.match(line, pos)
        if m is None:
            raise ParseError(lineno, pos + 1, f"unexpected character {line[pos]!r}", origin)
        kind = m.lastgroup
        if kind != "ws":
            toks.append(_Tok(kind, m.group(), pos + 1))
        pos = m.end()
    return toks


class _LineParser:
    def __init__(self, toks: list[_Tok], lineno: int, end_col: int, origin: str):
        self.toks = toks
        self.i = 0
        self.lineno = lineno
        self.end_col = end_col
        self.origin = origin

    def error(self, message: str, tok: _Tok | None = None) -> ParseError:
        col = tok.col if tok is not None else self.end_col
        return ParseError(self.lineno, col, message, self.origin)

    def peek(self) -> _Tok | None:
        return self.toks[self.i] if self.i < len(self.toks) else None

    def take(self) -> _Tok:
        tok = self.peek()
        if tok is None:
            raise self.error("unexpected end of line")
        self.i += 1
        return tok

    def expect(self, text: str) -> _Tok:
        tok = self.take()
        if tok.text != text:
            raise self.error(f"expected {text!r}, found {tok.text!r}", tok)
        return tok

    def name(self, what: str) -> str:
        tok = self.take()
        if tok.kind != "name" or tok.text in KEYWORDS:
            raise self.error(f"expected {what} name, found {tok.text!r}", tok)
        if is_reserved(tok.text):
            raise self.error(f"name {tok.text!r} uses the reserved prefix '__rc.'", tok)
        return tok.text

    def concept(self) -> Concept:
        ops = [self.primary()]
        while (tok := self.peek()) is not None and tok.text == "&":
            self.take()
            ops.append(self.primary())
        return conj(*ops)

    def primary(self) -> Concept:
        tok = self.take()
        if tok.text == "top":
            return TOP
        if tok.text == "bot":
            return BOT
        if tok.text == "some":
            return self._some()
        if tok.text == "{":
            ind = self.name("individual")
            self.expect("}")
            return Nominal(ind)
        if tok.text == "<":
            ind = self.name("individual")
            self.expect(">")
            return DefNominal(ind)
        if tok.text == "(":
            c = self.concept()
            self.expect(")")
            return c
        if tok.kind == "name":
            self.i -= 1
            return Atom(self.name("concept"))
        raise self.error(f"unexpected {tok.text!r}", tok)

    def _some(self) -> Concept:
        tok = self.peek()
        nxt = self.toks[self.i + 1] if self.i + 1 < len(self.toks) else None
        if tok is not None and tok.kind == "name" and "." in tok.text and (nxt is None or nxt.text != "."):
            # "some r.C" written without a space: split the role off the dotted token
            role, rest = tok.text.split(".", 1)
            self.toks[self.i] = _Tok("name", rest, tok.col + len(role) + 1)
            self.toks.insert(self.i, _Tok("punct", ".", tok.col + len(role)))
            self.toks.insert(self.i, _Tok("name", role, tok.col))
        role = self.name("role")
        self.expect(".")
        return Exists(role, self.primary())

    def axiom(self) -> tuple[Concept, str, Concept, _Tok]:
        lhs = self.concept()
        op = self.take()
        if op.kind != "op":
            raise self.error(f"expected '<=', '<~' or '==', found {op.text!r}", op)
        rhs = self.concept()
        if (tok := self.peek()) is not None:
            raise self.error(f"unexpected {tok.text!r} after axiom", tok)
        return lhs, op.text, rhs, op


def _axioms_of_line(line: str, lineno: int, section: str, origin: str):
    toks = _tokenize(line, lineno, origin)
    if not toks:
        return []
    p = _LineParser(toks, lineno, len(line.rstrip()) + 1, origin)
    lhs, op, rhs, op_tok = p.axiom()
    if section == "tbox":
        if op == "<=":
            return [StrictGci(lhs, rhs)]
        if op == "==":
            return [StrictGci(lhs, rhs), StrictGci(rhs, lhs)]
        raise p.error("defeasible '<~' axiom inside tbox: section", op_tok)
    if op != "<~":
        raise p.error(f"strict {op!r} axiom inside dbox: section", op_tok)
    return [DefeasibleGci(lhs, rhs)]


def parse_kb(doc: SourceDocument | str) -> KnowledgeBase:
    if isinstance(doc, str):
        doc = SourceDocument(doc)
    tbox: list[StrictGci] = []
    dbox: list[DefeasibleGci] = []
    section: str | None = None
    seen: set[str] = set()
    for lineno, line in enumerate(doc.text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if stripped in ("tbox:", "dbox:"):
            name = stripped[:-1]
            if name in seen:
                raise ParseError(lineno, line.index(stripped) + 1, f"duplicate section {stripped!r}", doc.origin)
            seen.add(name)
            section = name
            continue
        if section is None:
            raise ParseError(lineno, line.index(stripped) + 1, "axiom outside a 'tbox:' or 'dbox:' section", doc.origin)
        for ax in _axioms_of_line(line, lineno, section, doc.origin):
            (tbox if section == "tbox" else dbox).append(ax)
    return KnowledgeBase.of(tbox, dbox)


def parse_axiom(text: str, kind: str | None = None) -> StrictGci | DefeasibleGci:
    """Parse one axiom.  ``kind`` is ``"strict"``, ``"defeasible"`` or ``None`` (infer from the operator)."""
    toks = _tokenize(text, 1, "<query>")
    if not toks:
        raise ParseError(1, 1, "empty axiom", "<query>")
    p = _LineParser(toks, 1, len(text.rstrip()) + 1, "<query>")
    lhs, op, rhs, op_tok = p.axiom()
    if op == "==":
        raise p.error("'==' is only allowed in a tbox: section", op_tok)
    inferred = "defeasible" if op == "<~" else "strict"
    if kind is not None and kind != inferred:
        raise p.error(f"expected a {kind} axiom, found {op!r}", op_tok)
    cls = DefeasibleGci if inferred == "defeasible" else StrictGci
    return cls(canonicalize(lhs), canonicalize(rhs))


def parse_concept(text: str) -> Concept:
    toks = _tokenize(text, 1, "<concept>")
    p = _LineParser(toks, 1, len(text.rstrip()) + 1, "<concept>")
    c = p.concept()
    if (tok := p.peek()) is not None:
        raise p.error(f"unexpected {tok.text!r}", tok)
    return c


def serialize_kb(kb: KnowledgeBase) -> str:
    lines = ["tbox:"]
    lines += [f"  {ax}" for ax in kb.sorted_tbox()]
    lines.append("dbox:")
    lines += [f"  {ax}" for ax in kb.sorted_dbox()]
    return "\n".join(lines) + "\n"


def load_kb(path: str | Path) -> KnowledgeBase:
    return parse_kb(SourceDocument.from_path(path))
