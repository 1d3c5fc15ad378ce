"""Sorted abstract syntax for two-sorted restricted-quantifier set formulas.

Set variables and map variables share one :class:`Var` type distinguished by
``sort``.  The same tree also carries the nonpairs forms used by the
map-free target language and the domain/range/image/composition inclusion
atoms, which :func:`validate` rejects unless explicitly enabled.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, NamedTuple, Union

__all__ = [
    "SET",
    "MAP",
    "Var",
    "set_var",
    "map_var",
    "MemberSet",
    "MemberNonpairs",
    "EqualSet",
    "PairMember",
    "EqualMap",
    "SubDom",
    "SubRange",
    "SubImage",
    "SubComp",
    "Not",
    "And",
    "Or",
    "Implies",
    "Iff",
    "ForallIn",
    "ExistsIn",
    "ForallPairIn",
    "ExistsPairIn",
    "ForallInNonpairs",
    "ExistsInNonpairs",
    "Formula",
    "ATOMS",
    "CORE_ATOMS",
    "EXTENSION_ATOMS",
    "QUANTIFIERS",
    "UNIVERSAL",
    "EXISTENTIAL",
    "conj",
    "disj",
    "Diagnostic",
    "validate",
    "free_vars",
    "all_vars",
    "variables_of",
    "size",
    "prefix_of",
    "is_quantifier_free",
    "subformulas",
    "rename_free",
]

SET = "set"
MAP = "map"


class Var(NamedTuple):
    name: str
    sort: str = SET

    def __str__(self) -> str:
        return "@" + self.name if self.sort == MAP else self.name


def set_var(name: str) -> Var:
    return Var(name, SET)


def map_var(name: str) -> Var:
    return Var(name, MAP)


# -- atoms -------------------------------------------------------------------


@dataclass(frozen=True)
class MemberSet:
    """x in y"""

    x: Var
    y: Var


@dataclass(frozen=True)
class MemberNonpairs:
    """x in nonpairs(y): x is a non-pair member of y."""

    x: Var
    y: Var


@dataclass(frozen=True)
class EqualSet:
    x: Var
    y: Var


@dataclass(frozen=True)
class PairMember:
    """[x,y] in f; ``f`` is a map variable, or a set variable in the nonpairs dialect."""

    x: Var
    y: Var
    f: Var


@dataclass(frozen=True)
class EqualMap:
    f: Var
    g: Var


@dataclass(frozen=True)
class SubDom:
    """x sub dom(f)"""

    x: Var
    f: Var


@dataclass(frozen=True)
class SubRange:
    """x sub ran(f)"""

    x: Var
    f: Var


@dataclass(frozen=True)
class SubImage:
    """y sub img(f, x): y is included in the image of x under f."""

    y: Var
    f: Var
    x: Var


@dataclass(frozen=True)
class SubComp:
    """h sub comp(f, g), composing left to right: {[a,c] : [a,b] in f, [b,c] in g}."""

    h: Var
    f: Var
    g: Var


# -- connectives ---------------------------------------------------------------


@dataclass(frozen=True)
class Not:
    arg: "Formula"


@dataclass(frozen=True)
class And:
    args: tuple

    def __post_init__(self):
        if len(self.args) < 2:
            raise ValueError("And needs at least two operands; use conj()")


@dataclass(frozen=True)
class Or:
    args: tuple

    def __post_init__(self):
        if len(self.args) < 2:
            raise ValueError("Or needs at least two operands; use disj()")


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Iff:
    left: "Formula"
    right: "Formula"


# -- restricted quantifiers ----------------------------------------------------


@dataclass(frozen=True)
class ForallIn:
    var: Var
    dom: Var
    body: "Formula"


@dataclass(frozen=True)
class ExistsIn:
    var: Var
    dom: Var
    body: "Formula"


@dataclass(frozen=True)
class ForallPairIn:
    x: Var
    y: Var
    f: Var
    body: "Formula"


@dataclass(frozen=True)
class ExistsPairIn:
    x: Var
    y: Var
    f: Var
    body: "Formula"


@dataclass(frozen=True)
class ForallInNonpairs:
    var: Var
    dom: Var
    body: "Formula"


@dataclass(frozen=True)
class ExistsInNonpairs:
    var: Var
    dom: Var
    body: "Formula"


Formula = Union[
    MemberSet, MemberNonpairs, EqualSet, PairMember, EqualMap,
    SubDom, SubRange, SubImage, SubComp,
    Not, And, Or, Implies, Iff,
    ForallIn, ExistsIn, ForallPairIn, ExistsPairIn, ForallInNonpairs, ExistsInNonpairs,
]

CORE_ATOMS = (MemberSet, EqualSet, PairMember, EqualMap, MemberNonpairs)
EXTENSION_ATOMS = (SubDom, SubRange, SubImage, SubComp)
ATOMS = CORE_ATOMS + EXTENSION_ATOMS
UNIVERSAL = (ForallIn, ForallPairIn, ForallInNonpairs)
EXISTENTIAL = (ExistsIn, ExistsPairIn, ExistsInNonpairs)
QUANTIFIERS = UNIVERSAL + EXISTENTIAL


def conj(parts) -> "Formula":
    """Flattening n-ary conjunction; a single operand is returned unchanged."""
    flat = []
    for p in parts:
        if isinstance(p, And):
            flat.extend(p.args)
        else:
            flat.append(p)
    if not flat:
        raise ValueError("empty conjunction")
    return flat[0] if len(flat) == 1 else And(tuple(flat))


def disj(parts) -> "Formula":
    flat = []
    for p in parts:
        if isinstance(p, Or):
            flat.extend(p.args)
        else:
            flat.append(p)
    if not flat:
        raise ValueError("empty disjunction")
    return flat[0] if len(flat) == 1 else Or(tuple(flat))


# -- traversal helpers -----------------------------------------------------------


def atom_vars(a) -> tuple:
    if isinstance(a, (MemberSet, MemberNonpairs, EqualSet)):
        return (a.x, a.y)
    if isinstance(a, PairMember):
        return (a.x, a.y, a.f)
    if isinstance(a, EqualMap):
        return (a.f, a.g)
    if isinstance(a, (SubDom, SubRange)):
        return (a.x, a.f)
    if isinstance(a, SubImage):
        return (a.y, a.f, a.x)
    if isinstance(a, SubComp):
        return (a.h, a.f, a.g)
    raise TypeError(f"not an atom: {a!r}")


def bound_of(q) -> tuple:
    """Variables bound by a quantifier node."""
    if isinstance(q, (ForallPairIn, ExistsPairIn)):
        return (q.x, q.y)
    return (q.var,)


def domain_of(q) -> Var:
    if isinstance(q, (ForallPairIn, ExistsPairIn)):
        return q.f
    return q.dom


def children(f) -> tuple:
    if isinstance(f, Not):
        return (f.arg,)
    if isinstance(f, (And, Or)):
        return f.args
    if isinstance(f, (Implies, Iff)):
        return (f.left, f.right)
    if isinstance(f, QUANTIFIERS):
        return (f.body,)
    return ()


def subformulas(f) -> Iterator:
    stack = [f]
    while stack:
        node = stack.pop()
        yield node
        stack.extend(reversed(children(node)))


def free_vars(f) -> tuple[frozenset, frozenset]:
    """Free variables split into (set variables, map variables)."""
    out: set = set()

    def go(node, bound: frozenset) -> None:
        if isinstance(node, ATOMS):
            out.update(v for v in atom_vars(node) if v not in bound)
        elif isinstance(node, QUANTIFIERS):
            d = domain_of(node)
            if d not in bound:
                out.add(d)
            go(node.body, bound | frozenset(bound_of(node)))
        else:
            for c in children(node):
                go(c, bound)

    go(f, frozenset())
    sets = frozenset(v for v in out if v.sort == SET)
    maps = frozenset(v for v in out if v.sort == MAP)
    return sets, maps


def variables_of(f) -> frozenset:
    s, m = free_vars(f)
    return s | m


def all_vars(f) -> set:
    """Every variable occurring anywhere, bound or free."""
    out = set()
    for node in subformulas(f):
        if isinstance(node, ATOMS):
            out.update(atom_vars(node))
        elif isinstance(node, QUANTIFIERS):
            out.update(bound_of(node))
            out.add(domain_of(node))
    return out


def size(f) -> int:
    """Node count plus variable occurrences (binders included)."""
    total = 0
    for node in subformulas(f):
        total += 1
        if isinstance(node, ATOMS):
            total += len(atom_vars(node))
        elif isinstance(node, QUANTIFIERS):
            total += len(bound_of(node)) + 1
    return total


def prefix_of(f) -> tuple[list, "Formula"]:
    """Split a prenex formula into its quantifier nodes and its matrix."""
    prefix = []
    while isinstance(f, QUANTIFIERS):
        prefix.append(f)
        f = f.body
    return prefix, f


def is_quantifier_free(f) -> bool:
    return not any(isinstance(n, QUANTIFIERS) for n in subformulas(f))


def rename_free(f, mapping: dict):
    """Substitute variables for free occurrences; bound names are left alone."""

    def r(v, bound):
        return v if v in bound else mapping.get(v, v)

    def go(node, bound: frozenset):
        t = type(node)
        if t in (MemberSet, MemberNonpairs, EqualSet):
            return t(r(node.x, bound), r(node.y, bound))
        if t is PairMember:
            return PairMember(r(node.x, bound), r(node.y, bound), r(node.f, bound))
        if t is EqualMap:
            return EqualMap(r(node.f, bound), r(node.g, bound))
        if t in (SubDom, SubRange):
            return t(r(node.x, bound), r(node.f, bound))
        if t is SubImage:
            return SubImage(r(node.y, bound), r(node.f, bound), r(node.x, bound))
        if t is SubComp:
            return SubComp(r(node.h, bound), r(node.f, bound), r(node.g, bound))
        if t is Not:
            return Not(go(node.arg, bound))
        if t in (And, Or):
            return t(tuple(go(a, bound) for a in node.args))
        if t in (Implies, Iff):
            return t(go(node.left, bound), go(node.right, bound))
        if t in (ForallPairIn, ExistsPairIn):
            inner = bound | {node.x, node.y}
            return t(node.x, node.y, r(node.f, bound), go(node.body, inner))
        if t in QUANTIFIERS:
            return t(node.var, r(node.dom, bound), go(node.body, bound | {node.var}))
        raise TypeError(f"unknown node {node!r}")

    return go(f, frozenset())


# -- validation --------------------------------------------------------------------


@dataclass(frozen=True)
class Diagnostic:
    kind: str
    message: str

    def __str__(self) -> str:
        return f"{self.kind}: {self.message}"


BASE = "base"
NONPAIRS = "nonpairs"


def validate(f, *, extensions: bool = False, dialect: str = BASE) -> list[Diagnostic]:
    """Return the list of well-formedness problems in ``f`` (empty when valid).

    ``dialect="base"`` is the two-sorted language; ``dialect="nonpairs"`` is
    the map-free target language that uses ``nonpairs(.)`` terms.
    """
    if dialect not in (BASE, NONPAIRS):
        raise ValueError(f"unknown dialect {dialect!r}")
    diags: list[Diagnostic] = []
    seen = set()

    def add(kind: str, message: str) -> None:
        d = Diagnostic(kind, message)
        if d not in seen:
            seen.add(d)
            diags.append(d)

    def want(v: Var, sort: str, where: str) -> None:
        if v.sort != sort:
            add("sort", f"{v} is a {v.sort} variable but {where} needs a {sort} variable")

    names: dict[str, str] = {}
    for v in sorted(all_vars(f)):
        other = names.setdefault(v.name, v.sort)
        if other != v.sort:
            add("sort", f"name {v.name!r} is used both as a set and as a map variable")
        if dialect == NONPAIRS and v.sort == MAP:
            add("dialect", f"map variable {v} in a nonpairs-dialect formula")

    def check_atom(a) -> None:
        t = type(a)
        if t in (MemberSet, EqualSet, MemberNonpairs):
            want(a.x, SET, t.__name__)
            want(a.y, SET, t.__name__)
        elif t is PairMember:
            want(a.x, SET, "a pair term")
            want(a.y, SET, "a pair term")
            if dialect == BASE:
                want(a.f, MAP, "the right side of a pair membership")
        elif t is EqualMap:
            want(a.f, MAP, "map equality")
            want(a.g, MAP, "map equality")
        elif t in EXTENSION_ATOMS:
            if not extensions:
                add("extension", f"{t.__name__} literal needs the extension flag")
            if t is SubComp:
                for v in atom_vars(a):
                    want(v, MAP, t.__name__)
            else:
                want(a.f, MAP, t.__name__)
                want(a.x, SET, t.__name__)
                if t is SubImage:
                    want(a.y, SET, t.__name__)
        if dialect == BASE and t is MemberNonpairs:
            add("dialect", "nonpairs(.) terms belong to the nonpairs dialect")
        if dialect == NONPAIRS and t is MemberSet:
            add("dialect", "plain membership x in y is not allowed in the nonpairs dialect")

    def check_matrix(node) -> None:
        for n in subformulas(node):
            if isinstance(n, QUANTIFIERS):
                add("non-prenex", "quantifier nested under a connective inside a quantifier matrix")
                return
            if isinstance(n, ATOMS):
                check_atom(n)

    def check_prenex(node) -> None:
        prefix, matrix = prefix_of(node)
        kinds = {isinstance(q, UNIVERSAL) for q in prefix}
        if len(kinds) > 1:
            add("mixed-prefix", "quantifier prefix mixes universal and existential quantifiers")
        quantified, domains = set(), set()
        for q in prefix:
            t = type(q)
            if t in (ForallPairIn, ExistsPairIn):
                want(q.x, SET, "a pair binder")
                want(q.y, SET, "a pair binder")
                if q.x == q.y:
                    add("binder", f"pair binder repeats {q.x}")
                if dialect == BASE:
                    want(q.f, MAP, "a pair quantifier domain")
            else:
                want(q.var, SET, "a quantifier binder")
                want(q.dom, SET, "a quantifier domain")
                if dialect == BASE and t in (ForallInNonpairs, ExistsInNonpairs):
                    add("dialect", "nonpairs(.) quantifiers belong to the nonpairs dialect")
                if dialect == NONPAIRS and t in (ForallIn, ExistsIn):
                    add("dialect", "plain restricted quantifier in the nonpairs dialect")
            quantified.update(bound_of(q))
            domains.add(domain_of(q))
        for v in sorted(quantified & domains):
            add("non-simple", f"{v} is quantified and also used as a domain variable")
        check_matrix(matrix)

    def walk(node) -> None:
        if isinstance(node, QUANTIFIERS):
            check_prenex(node)
        elif isinstance(node, ATOMS):
            check_atom(node)
        else:
            for c in children(node):
                walk(c)

    walk(f)
    return diags
