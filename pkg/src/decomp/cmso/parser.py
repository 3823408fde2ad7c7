"""ASCII DSL for CMSO2 formulas.

Grammar sketch (lowercase identifiers are element variables, uppercase are
set variables; ``#`` starts a comment)::

    formula   := quantified | iff
    quantified:= ("exists" | "forall") var "." formula
    iff       := implies ("<->" implies)*
    implies   := or ("->" implies)?
    or        := and ("|" and)*
    and       := unary ("&" unary)*
    unary     := "!" unary | quantified | atom
    atom      := "(" formula ")" | "C2" "(" setterm ")"
               | name "(" args ")" | term (("=" | "in" | "subseteq") term)
    setterm   := setatom (("union" | "inter" | "minus") setatom)*
    setatom   := "U" | "empty" | "{" var "}" | SETVAR
               | "leafset" "(" var ["," var] ")" | "(" setterm ")"

The set operators associate left at equal precedence; parenthesize to mix.
Relation applications take element variables; predicate applications take
set terms; ``children(Y, y)`` is the built-in exact-children binding.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from ..errors import FormulaSyntaxError, ScopeError
from . import formulas as F

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<comment>#[^\n]*)|(?P<op><->|->|[().,{}=&|!])|(?P<name>[A-Za-z][A-Za-z0-9_-]*))"
)

_KEYWORDS = {"exists", "forall", "in", "subseteq", "union", "inter", "minus", "leafset", "empty", "U", "C2", "children"}


@dataclass
class _Token:
    kind: str  # 'op' | 'name'
    text: str
    line: int
    col: int


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    pos = 0
    line = 1
    line_start = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m or m.end() == pos:
            rest = text[pos:].lstrip()
            if not rest:
                break
            line += text.count("\n", line_start, pos)
            raise FormulaSyntaxError(f"line {line}: cannot tokenize near {rest[:20]!r}")
        line += text.count("\n", pos, m.start(m.lastgroup))
        if m.lastgroup != "comment":
            col = m.start(m.lastgroup) - text.rfind("\n", 0, m.start(m.lastgroup))
            tokens.append(_Token("op" if m.lastgroup == "op" else "name", m.group(m.lastgroup), line, col))
        pos = m.end()
    return tokens


class _Parser:
    def __init__(self, tokens: list[_Token]):
        self.tokens = tokens
        self.pos = 0

    def _err(self, msg: str) -> FormulaSyntaxError:
        if self.pos < len(self.tokens):
            t = self.tokens[self.pos]
            return FormulaSyntaxError(f"line {t.line}, col {t.col}: {msg} (near {t.text!r})")
        return FormulaSyntaxError(f"end of input: {msg}")

    def peek(self) -> _Token | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def take(self, text: str | None = None) -> _Token:
        tok = self.peek()
        if tok is None or (text is not None and tok.text != text):
            raise self._err(f"expected {text!r}")
        self.pos += 1
        return tok

    def at(self, text: str) -> bool:
        tok = self.peek()
        return tok is not None and tok.text == text

    # formulas ---------------------------------------------------------------

    def formula(self) -> F.Formula:
        if self.at("exists") or self.at("forall"):
            return self.quantified()
        return self.iff()

    def quantified(self) -> F.Formula:
        kw = self.take().text
        var = self.take().text
        if not var[0].isalpha() or var in _KEYWORDS:
            raise self._err("expected a variable after quantifier")
        self.take(".")
        body = self.formula()
        if var[0].isupper():
            return F.ExistsS(var, body) if kw == "exists" else F.ForallS(var, body)
        return F.ExistsE(var, body) if kw == "exists" else F.ForallE(var, body)

    def iff(self) -> F.Formula:
        out = self.impl()
        while self.at("<->"):
            self.take()
            out = F.Iff(out, self.impl())
        return out

    def impl(self) -> F.Formula:
        left = self.disj()
        if self.at("->"):
            self.take()
            return F.Implies(left, self.impl())
        return left

    def disj(self) -> F.Formula:
        parts = [self.conj()]
        while self.at("|"):
            self.take()
            parts.append(self.conj())
        return F.lor(*parts) if len(parts) > 1 else parts[0]

    def conj(self) -> F.Formula:
        parts = [self.unary()]
        while self.at("&"):
            self.take()
            parts.append(self.unary())
        return F.land(*parts) if len(parts) > 1 else parts[0]

    def unary(self) -> F.Formula:
        if self.at("!"):
            self.take()
            return F.Not(self.unary())
        if self.at("exists") or self.at("forall"):
            return self.quantified()
        return self.atom()

    def atom(self) -> F.Formula:
        if self.at("("):
            mark = self.pos
            try:
                self.take("(")
                inner = self.formula()
                self.take(")")
                return inner
            except FormulaSyntaxError:
                self.pos = mark  # fall through: maybe a parenthesized set term
        tok = self.peek()
        if tok is None:
            raise self._err("expected a formula")
        if tok.text == "C2":
            self.take()
            self.take("(")
            term = self.setterm()
            self.take(")")
            return F.C2(term)
        if tok.text == "children":
            self.take()
            self.take("(")
            sv = self.take().text
            self.take(",")
            ev = self.take().text
            self.take(")")
            if not sv[0].isupper() or not ev[0].islower():
                raise self._err("children takes a set variable then an element variable")
            return F.Children(sv, ev)
        if (
            tok.kind == "name"
            and tok.text not in _KEYWORDS
            and self.pos + 1 < len(self.tokens)
            and self.tokens[self.pos + 1].text == "("
            and tok.text[0].islower()
        ):
            name = self.take().text
            self.take("(")
            args: list = []
            while True:
                args.append(self._rel_or_set_arg())
                if self.at(","):
                    self.take()
                    continue
                break
            self.take(")")
            if all(isinstance(a, str) for a in args):
                return F.Rel(name, tuple(args))
            terms = tuple(a if isinstance(a, F.SetTerm) else F.Singleton(a) for a in args)
            return F.SetPred(name, terms)
        # predicate application with uppercase name, e.g. SET(X union Y)
        if (
            tok.kind == "name"
            and tok.text not in _KEYWORDS
            and tok.text[0].isupper()
            and self.pos + 1 < len(self.tokens)
            and self.tokens[self.pos + 1].text == "("
        ):
            name = self.take().text
            self.take("(")
            terms = [self.setterm()]
            while self.at(","):
                self.take()
                terms.append(self.setterm())
            self.take(")")
            return F.SetPred(name, tuple(terms))
        return self._relational()

    def _rel_or_set_arg(self):
        tok = self.peek()
        if (
            tok is not None
            and tok.kind == "name"
            and tok.text not in _KEYWORDS
            and tok.text[0].islower()
            and not (self.pos + 1 < len(self.tokens) and self.tokens[self.pos + 1].text == "(")
        ):
            return self.take().text
        return self.setterm()

    def _relational(self) -> F.Formula:
        left = self._term()
        tok = self.peek()
        if tok is None:
            raise self._err("dangling term")
        if tok.text == "=":
            self.take()
            right = self._term()
            if isinstance(left, str) and isinstance(right, str):
                return F.EqVar(left, right)
            return F.EqSet(self._to_set(left), self._to_set(right))
        if tok.text == "in":
            self.take()
            if not isinstance(left, str):
                raise self._err("left side of 'in' must be an element variable")
            return F.Member(left, self.setterm())
        if tok.text == "subseteq":
            self.take()
            return F.SubsetEq(self._to_set(left), self.setterm())
        raise self._err("expected '=', 'in' or 'subseteq'")

    def _to_set(self, x) -> F.SetTerm:
        if isinstance(x, F.SetTerm):
            return x
        raise self._err("expected a set term")

    def _term(self):
        """Either a bare element variable or a set term."""
        tok = self.peek()
        if (
            tok is not None
            and tok.kind == "name"
            and tok.text not in _KEYWORDS
            and tok.text[0].islower()
            and not (self.pos + 1 < len(self.tokens) and self.tokens[self.pos + 1].text == "(")
        ):
            nxt = self.tokens[self.pos + 1].text if self.pos + 1 < len(self.tokens) else None
            if nxt not in ("union", "inter", "minus"):
                return self.take().text
        return self.setterm()

    # set terms ----------------------------------------------------------------

    def setterm(self) -> F.SetTerm:
        out = self.setatom()
        while True:
            tok = self.peek()
            if tok is None or tok.text not in ("union", "inter", "minus"):
                return out
            op = self.take().text
            rhs = self.setatom()
            out = {"union": F.Union, "inter": F.Inter, "minus": F.Minus}[op](out, rhs)

    def setatom(self) -> F.SetTerm:
        tok = self.peek()
        if tok is None:
            raise self._err("expected a set term")
        if tok.text == "U":
            self.take()
            return F.UniverseT()
        if tok.text == "empty":
            self.take()
            return F.EmptyT()
        if tok.text == "{":
            self.take()
            var = self.take().text
            self.take("}")
            if not var[0].islower():
                raise self._err("singleton takes an element variable")
            return F.Singleton(var)
        if tok.text == "leafset":
            self.take()
            self.take("(")
            a = self.take().text
            if self.at(","):
                self.take()
                b = self.take().text
                self.take(")")
                return F.Leafset2(a, b)
            self.take(")")
            return F.Leafset(a)
        if tok.text == "(":
            self.take()
            inner = self.setterm()
            self.take(")")
            return inner
        if tok.kind == "name" and tok.text[0].isupper() and tok.text not in _KEYWORDS:
            return F.SVar(self.take().text)
        raise self._err("expected a set term")


def parse_formula(text: str, free: tuple[str, ...] = ()) -> F.Formula:
    """Parse the DSL; variables outside ``free`` must be bound (ScopeError)."""
    tokens = _tokenize(text)
    parser = _Parser(tokens)
    out = parser.formula()
    if parser.pos != len(parser.tokens):
        raise parser._err("trailing input after formula")
    stray = F.free_vars(out) - set(free)
    if stray:
        raise ScopeError(f"unbound variables: {', '.join(sorted(stray))}")
    return out
