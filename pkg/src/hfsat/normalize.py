"""From arbitrary formulas to streams of normalized conjunctions.

Pipeline: existential prefixes are dualized into negated universal ones, the
propositional skeleton is extracted (placeholders stand for atoms and for
universal prenex blocks), and every satisfying valuation of the skeleton is
turned into a conjunction of universal prenex formulas.  Falsified universal
blocks contribute explicit witnesses instead.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Callable, Iterator, Optional, Sequence

from .errors import ValidationError
from .parser import print_formula
from .syntax import (
    ATOMS, EXISTENTIAL, QUANTIFIERS, UNIVERSAL, And, Diagnostic, ExistsIn,
    ExistsInNonpairs, ExistsPairIn, ForallIn, ForallInNonpairs, ForallPairIn, Iff,
    Implies, MemberNonpairs, MemberSet, Not, Or, PairMember, Var, all_vars, bound_of,
    conj, domain_of, free_vars, is_quantifier_free, prefix_of, rename_free,
)

__all__ = [
    "FreshNames",
    "Placeholder",
    "Skeleton",
    "NormalizedConjunction",
    "dualize",
    "eliminate_existential",
    "skeleton",
    "normalized_conjunctions",
    "check_normalized",
]

_TO_UNIVERSAL = {ExistsIn: ForallIn, ExistsPairIn: ForallPairIn, ExistsInNonpairs: ForallInNonpairs}
_TO_EXISTENTIAL = {v: k for k, v in _TO_UNIVERSAL.items()}
_SUFFIX = re.compile(r"#\d+$")


class FreshNames:
    """Generates ``name#k`` variables with one global counter, skipping taken names."""

    def __init__(self, taken: Sequence[str] = ()):
        self.taken = set(taken)
        self.counter = 0

    def __call__(self, v: Var) -> Var:
        base = _SUFFIX.sub("", v.name)
        while True:
            self.counter += 1
            name = f"{base}#{self.counter}"
            if name not in self.taken:
                self.taken.add(name)
                return Var(name, v.sort)


# -- prefix manipulation ----------------------------------------------------------


def _rebuild(prefix: list, matrix):
    out = matrix
    for q in reversed(prefix):
        if isinstance(q, (ForallPairIn, ExistsPairIn)):
            out = type(q)(q.x, q.y, q.f, out)
        else:
            out = type(q)(q.var, q.dom, out)
    return out


def _negate(f):
    return f.arg if isinstance(f, Not) else Not(f)


def dualize(f):
    """Rewrite every existential prefix as a negated universal one."""
    if isinstance(f, QUANTIFIERS):
        prefix, matrix = prefix_of(f)
        if all(isinstance(q, UNIVERSAL) for q in prefix):
            return f
        if not all(isinstance(q, EXISTENTIAL) for q in prefix):
            raise ValidationError([Diagnostic("mixed-prefix", "quantifier prefix mixes universal and existential quantifiers")])
        flipped = [_swap(q, _TO_UNIVERSAL[type(q)]) for q in prefix]
        return Not(_rebuild(flipped, _negate(matrix)))
    if isinstance(f, Not):
        return Not(dualize(f.arg))
    if isinstance(f, (And, Or)):
        return type(f)(tuple(dualize(a) for a in f.args))
    if isinstance(f, (Implies, Iff)):
        return type(f)(dualize(f.left), dualize(f.right))
    return f


def _swap(q, cls):
    if isinstance(q, (ForallPairIn, ExistsPairIn)):
        return cls(q.x, q.y, q.f, q.body)
    return cls(q.var, q.dom, q.body)


def _membership(q, mapping: dict):
    if isinstance(q, (ForallPairIn, ExistsPairIn)):
        return PairMember(mapping[q.x], mapping[q.y], q.f)
    if isinstance(q, (ForallInNonpairs, ExistsInNonpairs)):
        return MemberNonpairs(mapping[q.var], q.dom)
    return MemberSet(mapping[q.var], q.dom)


def eliminate_existential(f, fresh: Optional[FreshNames] = None):
    """Replace an existential prefix by memberships of freshly named witnesses.

    ``exists x in z . d`` becomes ``x#k in z and d[x#k/x]``; the result is
    equisatisfiable with the input.
    """
    prefix, matrix = prefix_of(f)
    if not prefix or not all(isinstance(q, EXISTENTIAL) for q in prefix):
        raise ValidationError([Diagnostic("not-existential", "expected an existential prenex formula")])
    if not is_quantifier_free(matrix):
        raise ValueError("matrix of an existential prenex formula must be quantifier-free")
    if fresh is None:
        fresh = FreshNames(v.name for v in all_vars(f))
    mapping: dict = {}
    for q in prefix:
        for v in bound_of(q):
            mapping[v] = fresh(v)
    parts = [_membership(q, mapping) for q in prefix]
    parts.append(rename_free(matrix, mapping))
    return conj(parts)


def _freshen_universal(f, fresh: FreshNames):
    prefix, matrix = prefix_of(f)
    if not prefix:
        return f
    mapping = {v: fresh(v) for q in prefix for v in bound_of(q)}
    renamed = []
    for q in prefix:
        if isinstance(q, ForallPairIn):
            renamed.append(ForallPairIn(mapping[q.x], mapping[q.y], q.f, None))
        else:
            renamed.append(type(q)(mapping[q.var], q.dom, None))
    return _rebuild(renamed, rename_free(matrix, mapping))


# -- skeleton ----------------------------------------------------------------------


@dataclass(frozen=True)
class Placeholder:
    index: int

    def __str__(self) -> str:
        return f"p{self.index + 1}"


def _prop_value(node, valuation) -> Optional[bool]:
    """Three-valued evaluation; ``None`` entries in ``valuation`` are unknown."""
    t = type(node)
    if t is Placeholder:
        return valuation[node.index]
    if t is Not:
        v = _prop_value(node.arg, valuation)
        return None if v is None else not v
    if t is And:
        result = True
        for a in node.args:
            v = _prop_value(a, valuation)
            if v is False:
                return False
            if v is None:
                result = None
        return result
    if t is Or:
        result = False
        for a in node.args:
            v = _prop_value(a, valuation)
            if v is True:
                return True
            if v is None:
                result = None
        return result
    if t is Implies:
        left = _prop_value(node.left, valuation)
        right = _prop_value(node.right, valuation)
        if left is False or right is True:
            return True
        if left is None or right is None:
            return None
        return False
    if t is Iff:
        left = _prop_value(node.left, valuation)
        right = _prop_value(node.right, valuation)
        if left is None or right is None:
            return None
        return left == right
    raise TypeError(f"not a propositional node: {node!r}")


def _prop_text(node, ctx: int = 0) -> str:
    t = type(node)
    if t is Placeholder:
        return str(node)
    if t is Not:
        return "not " + _prop_text(node.arg, 5)
    if t is And:
        s, prec = " and ".join(_prop_text(a, 5) for a in node.args), 4
    elif t is Or:
        s, prec = " or ".join(_prop_text(a, 4) for a in node.args), 3
    elif t is Implies:
        s, prec = f"{_prop_text(node.left, 3)} -> {_prop_text(node.right, 2)}", 2
    else:
        s, prec = f"{_prop_text(node.left, 1)} <-> {_prop_text(node.right, 2)}", 1
    return f"({s})" if ctx > prec else s


@dataclass(frozen=True)
class Skeleton:
    """A boolean tree over placeholders plus the formula each one stands for."""

    proposition: object
    substitution: tuple

    def apply(self, replacement: Optional[Sequence] = None):
        subst = self.substitution if replacement is None else replacement

        def go(node):
            t = type(node)
            if t is Placeholder:
                return subst[node.index]
            if t is Not:
                return Not(go(node.arg))
            if t in (And, Or):
                return t(tuple(go(a) for a in node.args))
            return t(go(node.left), go(node.right))

        return go(self.proposition)

    def holds(self, valuation: Sequence[Optional[bool]]) -> Optional[bool]:
        return _prop_value(self.proposition, valuation)

    def satisfying_valuations(self) -> Iterator[tuple]:
        """All satisfying valuations, lexicographically (False before True).

        Branches are cut as soon as the partial valuation already falsifies
        the proposition.
        """
        n = len(self.substitution)
        valuation: list = [None] * n

        def go(k: int):
            status = _prop_value(self.proposition, valuation)
            if status is False:
                return
            if k == n:
                yield tuple(valuation)
                return
            for value in (False, True):
                valuation[k] = value
                yield from go(k + 1)
            valuation[k] = None

        yield from go(0)

    def __str__(self) -> str:
        return _prop_text(self.proposition)


def skeleton(f) -> Skeleton:
    """Propositional skeleton of a boolean combination of prenex formulas."""
    g = dualize(f)
    index: dict = {}
    table: list = []

    def leaf(node):
        if node not in index:
            index[node] = len(table)
            table.append(node)
        return Placeholder(index[node])

    def go(node):
        if isinstance(node, ATOMS) or isinstance(node, QUANTIFIERS):
            return leaf(node)
        if isinstance(node, Not):
            return Not(go(node.arg))
        if isinstance(node, (And, Or)):
            return type(node)(tuple(go(a) for a in node.args))
        return type(node)(go(node.left), go(node.right))

    prop = go(g)
    return Skeleton(prop, tuple(table))


# -- normalized conjunctions ------------------------------------------------------------


@dataclass(frozen=True)
class NormalizedConjunction:
    """A conjunction of universal simple-prenex formulas (prefixes may be empty)."""

    conjuncts: tuple

    @property
    def formula(self):
        return conj(self.conjuncts)

    @classmethod
    def from_formula(cls, f, *, freshen: bool = True) -> "NormalizedConjunction":
        """Split a top-level conjunction.

        With ``freshen`` set, clashing bound variables get fresh names so the
        hygiene invariant holds; otherwise names are kept as written.
        """
        parts = f.args if isinstance(f, And) else (f,)
        for p in parts:
            prefix, matrix = prefix_of(p)
            if any(not isinstance(q, UNIVERSAL) for q in prefix) or not is_quantifier_free(matrix):
                raise ValidationError(
                    [Diagnostic("not-normalized", f"conjunct is not universal prenex: {print_formula(p)}")]
                )
        nc = cls(tuple(parts))
        if freshen and check_normalized(nc):
            fresh = FreshNames(v.name for v in all_vars(f))
            nc = cls(tuple(_freshen_universal(p, fresh) for p in parts))
        return nc

    def __str__(self) -> str:
        return print_formula(self.formula)


def check_normalized(nc: NormalizedConjunction) -> list[Diagnostic]:
    """Diagnostics for conjunct shape and bound-variable hygiene."""
    diags = []
    free_s, free_m = free_vars(nc.formula)
    free = free_s | free_m
    seen: set = set()
    for p in nc.conjuncts:
        prefix, matrix = prefix_of(p)
        if any(not isinstance(q, UNIVERSAL) for q in prefix):
            diags.append(Diagnostic("not-normalized", "existential quantifier in a normalized conjunction"))
        if not is_quantifier_free(matrix):
            diags.append(Diagnostic("non-prenex", "quantifier inside a matrix"))
        domains = {domain_of(q) for q in prefix}
        for q in prefix:
            for v in bound_of(q):
                if v in seen or v in free:
                    diags.append(Diagnostic("hygiene", f"quantified variable {v} is not unique"))
                if v in domains:
                    diags.append(Diagnostic("non-simple", f"{v} is quantified and a domain variable"))
                seen.add(v)
    return diags


def _witness(formula, fresh: FreshNames) -> list:
    """Conjuncts of an equisatisfiable replacement for ``not formula``."""
    if isinstance(formula, UNIVERSAL):
        prefix, matrix = prefix_of(formula)
        flipped = [_swap(q, _TO_EXISTENTIAL[type(q)]) for q in prefix]
        result = eliminate_existential(_rebuild(flipped, _negate(matrix)), fresh)
    else:
        result = _negate(formula)
    return list(result.args) if isinstance(result, And) else [result]


def normalized_conjunctions(
    f, prune: Optional[Callable[[tuple], bool]] = None
) -> Iterator[NormalizedConjunction]:
    """Yield one normalized conjunction per satisfying skeleton valuation.

    ``f`` is satisfiable iff at least one yielded conjunction is, and every
    model of a yielded conjunction is a model of ``f``.  ``prune`` may veto
    valuations before any conjunction is built.
    """
    sk = skeleton(f)
    fresh = FreshNames(v.name for v in all_vars(f))
    for valuation in sk.satisfying_valuations():
        if prune is not None and not prune(valuation):
            continue
        parts: list = []
        for value, formula in zip(valuation, sk.substitution):
            if value:
                parts.append(_freshen_universal(formula, fresh))
            else:
                parts.extend(_witness(formula, fresh))
        yield NormalizedConjunction(tuple(parts))
