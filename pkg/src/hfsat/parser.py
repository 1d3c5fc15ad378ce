"""Concrete syntax: tokenizer, recursive-descent parser, and printer.

Map variables carry an ``@`` prefix; set variables are bare identifiers
built from letters, digits, ``'`` and ``_`` (``#`` and ``$`` are accepted too
so that machine-generated fresh names read back).  Precedence, tightest
first: ``not`` > ``and`` > ``or`` > ``->`` (right associative) > ``<->``.
A quantifier body extends as far to the right as possible.
"""

from __future__ import annotations

import re

from .errors import ParseError, SortError
from .syntax import (
    MAP, SET, And, EqualMap, EqualSet, ExistsIn, ExistsInNonpairs, ExistsPairIn,
    ForallIn, ForallInNonpairs, ForallPairIn, Iff, Implies, MemberNonpairs,
    MemberSet, Not, Or, PairMember, SubComp, SubDom, SubImage, SubRange, Var,
)

__all__ = ["parse", "print_formula", "KEYWORDS"]

KEYWORDS = frozenset(
    "forall exists in notin not and or sub dom ran img comp nonpairs".split()
)

_UNICODE = {
    "∀": "forall", "∃": "exists", "∈": "in", "∉": "notin", "∧": "and",
    "∨": "or", "¬": "not", "⊆": "sub", "→": "->", "↔": "<->", "≠": "!=",
}

_TOKEN = re.compile(
    r"(?P<ws>\s+)"
    r"|(?P<op><->|->|!=|[()\[\],.=@])"
    r"|(?P<uni>[∀∃∈∉∧∨¬⊆→↔≠])"
    r"|(?P<word>[A-Za-z_][A-Za-z0-9_'#$]*)"
)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", text, pos)
        kind = m.lastgroup
        value = m.group()
        if kind == "uni":
            value = _UNICODE[value]
            kind = "op" if value in ("->", "<->", "!=") else "word"
        if kind != "ws":
            if kind == "word" and value in KEYWORDS:
                kind = "kw"
            tokens.append((kind, value, pos))
        pos = m.end()
    tokens.append(("eof", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    # token helpers
    def peek(self, offset: int = 0):
        return self.tokens[min(self.i + offset, len(self.tokens) - 1)]

    def at(self, value: str) -> bool:
        kind, v, _ = self.peek()
        return v == value and kind in ("op", "kw")

    def advance(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value: str):
        if not self.at(value):
            self.fail(f"expected {value!r}")
        return self.advance()

    def fail(self, message: str, cls=ParseError):
        kind, v, pos = self.peek()
        found = "end of input" if kind == "eof" else repr(v)
        raise cls(f"{message}, found {found}", self.text, pos)

    # variables
    def set_ident(self) -> Var:
        kind, v, pos = self.peek()
        if kind == "word":
            self.advance()
            return Var(v, SET)
        if self.at("@"):
            self.fail("map variable where a set variable is required", SortError)
        self.fail("expected a set variable")

    def map_ref(self) -> Var:
        if not self.at("@"):
            kind, v, pos = self.peek()
            if kind == "word":
                self.fail("set variable where a map variable is required", SortError)
            self.fail("expected a map variable")
        self.advance()
        kind, v, pos = self.peek()
        if kind != "word":
            self.fail("expected an identifier after '@'")
        self.advance()
        return Var(v, MAP)

    def container(self) -> Var:
        """Right side of a pair membership: a map, or a set in the nonpairs dialect."""
        if self.at("@"):
            return self.map_ref()
        return self.set_ident()

    # grammar
    def formula(self):
        left = self.implication()
        while self.at("<->"):
            self.advance()
            left = Iff(left, self.implication())
        return left

    def implication(self):
        left = self.disjunction()
        if self.at("->"):
            self.advance()
            return Implies(left, self.implication())
        return left

    def disjunction(self):
        items = [self.conjunction()]
        while self.at("or"):
            self.advance()
            items.append(self.conjunction())
        return items[0] if len(items) == 1 else Or(tuple(items))

    def conjunction(self):
        items = [self.unary()]
        while self.at("and"):
            self.advance()
            items.append(self.unary())
        return items[0] if len(items) == 1 else And(tuple(items))

    def unary(self):
        if self.at("not"):
            self.advance()
            return Not(self.unary())
        if self.at("forall") or self.at("exists"):
            return self.quantifier()
        if self.at("("):
            self.advance()
            inner = self.formula()
            self.expect(")")
            return inner
        return self.atom()

    def quantifier(self):
        universal = self.advance()[1] == "forall"
        if self.at("["):
            self.advance()
            x = self.set_ident()
            self.expect(",")
            y = self.set_ident()
            self.expect("]")
            self.expect("in")
            f = self.container()
            self.expect(".")
            body = self.formula()
            return (ForallPairIn if universal else ExistsPairIn)(x, y, f, body)
        var = self.set_ident()
        self.expect("in")
        if self.at("nonpairs"):
            self.advance()
            self.expect("(")
            dom = self.set_ident()
            self.expect(")")
            cls = ForallInNonpairs if universal else ExistsInNonpairs
        else:
            dom = self.set_ident()
            cls = ForallIn if universal else ExistsIn
        self.expect(".")
        return cls(var, dom, self.formula())

    def membership_op(self) -> bool:
        """Consume 'in' or 'notin'; return True when negated."""
        if self.at("in"):
            self.advance()
            return False
        if self.at("notin"):
            self.advance()
            return True
        self.fail("expected 'in' or 'notin'")

    def atom(self):
        if self.at("["):
            self.advance()
            x = self.set_ident()
            self.expect(",")
            y = self.set_ident()
            self.expect("]")
            negated = self.membership_op()
            a = PairMember(x, y, self.container())
            return Not(a) if negated else a
        if self.at("@"):
            f = self.map_ref()
            if self.at("=") or self.at("!="):
                negated = self.advance()[1] == "!="
                a = EqualMap(f, self.map_ref())
                return Not(a) if negated else a
            if self.at("sub"):
                self.advance()
                self.expect("comp")
                self.expect("(")
                g1 = self.map_ref()
                self.expect(",")
                g2 = self.map_ref()
                self.expect(")")
                return SubComp(f, g1, g2)
            if self.at("in") or self.at("notin"):
                self.fail("a map variable cannot be a member", SortError)
            self.fail("expected '=', '!=' or 'sub' after a map variable")
        kind, v, pos = self.peek()
        if kind != "word":
            self.fail("expected a formula")
        x = self.set_ident()
        if self.at("in") or self.at("notin"):
            negated = self.membership_op()
            if self.at("nonpairs"):
                self.advance()
                self.expect("(")
                a = MemberNonpairs(x, self.set_ident())
                self.expect(")")
            else:
                a = MemberSet(x, self.set_ident())
            return Not(a) if negated else a
        if self.at("=") or self.at("!="):
            negated = self.advance()[1] == "!="
            a = EqualSet(x, self.set_ident())
            return Not(a) if negated else a
        if self.at("sub"):
            self.advance()
            if self.at("dom") or self.at("ran"):
                cls = SubDom if self.advance()[1] == "dom" else SubRange
                self.expect("(")
                f = self.map_ref()
                self.expect(")")
                return cls(x, f)
            if self.at("img"):
                self.advance()
                self.expect("(")
                f = self.map_ref()
                self.expect(",")
                arg = self.set_ident()
                self.expect(")")
                return SubImage(x, f, arg)
            self.fail("expected dom, ran or img after 'sub'")
        self.fail("expected 'in', 'notin', '=', '!=' or 'sub'")


def parse(text: str):
    """Parse formula source into a sorted syntax tree."""
    p = _Parser(text)
    result = p.formula()
    if p.peek()[0] != "eof":
        p.fail("unexpected trailing input")
    return result


# -- printing -------------------------------------------------------------------

_P_IFF, _P_IMP, _P_OR, _P_AND, _P_UNARY = 1, 2, 3, 4, 5


def _atom_text(a) -> str:
    t = type(a)
    if t is MemberSet:
        return f"{a.x} in {a.y}"
    if t is MemberNonpairs:
        return f"{a.x} in nonpairs({a.y})"
    if t is EqualSet:
        return f"{a.x} = {a.y}"
    if t is PairMember:
        return f"[{a.x},{a.y}] in {a.f}"
    if t is EqualMap:
        return f"{a.f} = {a.g}"
    if t is SubDom:
        return f"{a.x} sub dom({a.f})"
    if t is SubRange:
        return f"{a.x} sub ran({a.f})"
    if t is SubImage:
        return f"{a.y} sub img({a.f}, {a.x})"
    if t is SubComp:
        return f"{a.h} sub comp({a.f}, {a.g})"
    raise TypeError(f"not an atom: {a!r}")


def _negated_atom_text(a):
    t = type(a)
    if t is MemberSet:
        return f"{a.x} notin {a.y}"
    if t is MemberNonpairs:
        return f"{a.x} notin nonpairs({a.y})"
    if t is EqualSet:
        return f"{a.x} != {a.y}"
    if t is PairMember:
        return f"[{a.x},{a.y}] notin {a.f}"
    if t is EqualMap:
        return f"{a.f} != {a.g}"
    return None


def _binder_text(q) -> str:
    t = type(q)
    if t in (ForallPairIn, ExistsPairIn):
        return f"[{q.x},{q.y}] in {q.f}"
    if t in (ForallInNonpairs, ExistsInNonpairs):
        return f"{q.var} in nonpairs({q.dom})"
    return f"{q.var} in {q.dom}"


def _fmt(node, ctx: int) -> str:
    t = type(node)
    if t is Not:
        sugar = _negated_atom_text(node.arg)
        if sugar is not None:
            return sugar
        return "not " + _fmt(node.arg, _P_UNARY)
    if t is And:
        s, prec = " and ".join(_fmt(a, _P_UNARY) for a in node.args), _P_AND
    elif t is Or:
        s, prec = " or ".join(_fmt(a, _P_AND) for a in node.args), _P_OR
    elif t is Implies:
        s, prec = f"{_fmt(node.left, _P_OR)} -> {_fmt(node.right, _P_IMP)}", _P_IMP
    elif t is Iff:
        s, prec = f"{_fmt(node.left, _P_IFF)} <-> {_fmt(node.right, _P_IMP)}", _P_IFF
    elif t in (ForallIn, ForallPairIn, ForallInNonpairs):
        s, prec = f"forall {_binder_text(node)} . {_fmt(node.body, 0)}", 0
    elif t in (ExistsIn, ExistsPairIn, ExistsInNonpairs):
        s, prec = f"exists {_binder_text(node)} . {_fmt(node.body, 0)}", 0
    else:
        return _atom_text(node)
    return f"({s})" if ctx > prec else s


def print_formula(f) -> str:
    """Canonical concrete syntax with minimal parentheses; parse() inverts it."""
    return _fmt(f, 0)
