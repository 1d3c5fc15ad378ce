"""Seeded random generators for formulas, used by tests and benchmarks."""

from __future__ import annotations

import itertools
import random
from typing import Optional, Sequence

from .normalize import NormalizedConjunction
from .syntax import (
    MAP, SET, And, EqualMap, EqualSet, ExistsIn, ExistsPairIn, ForallIn, ForallPairIn,
    Iff, Implies, MemberSet, Not, Or, PairMember, Var,
)

__all__ = [
    "random_matrix",
    "random_prenex",
    "random_formula",
    "random_conjunction",
    "free_pool",
    "prop_formulas",
    "prop_shapes",
]


def free_pool(n_sets: int, n_maps: int) -> tuple[list[Var], list[Var]]:
    sets = [Var(n, SET) for n in ("a", "b", "c", "d", "e")[:n_sets]]
    maps = [Var(n, MAP) for n in ("f", "g", "h")[:n_maps]]
    return sets, maps


def _atom(rng: random.Random, sets: Sequence[Var], maps: Sequence[Var]):
    kinds = ["in", "in", "eq"]
    if maps:
        kinds += ["pair", "pair"]
    if len(maps) > 1:
        kinds.append("mapeq")
    kind = rng.choice(kinds)
    if kind == "in":
        return MemberSet(rng.choice(sets), rng.choice(sets))
    if kind == "eq":
        return EqualSet(rng.choice(sets), rng.choice(sets))
    if kind == "pair":
        return PairMember(rng.choice(sets), rng.choice(sets), rng.choice(maps))
    f, g = rng.sample(list(maps), 2)
    return EqualMap(f, g)


def random_matrix(rng: random.Random, sets, maps, depth: int = 2):
    """Quantifier-free formula over the given variables."""
    if depth <= 0 or rng.random() < 0.35:
        a = _atom(rng, sets, maps)
        return Not(a) if rng.random() < 0.3 else a
    op = rng.choice(["and", "or", "not", "imp", "iff", "and", "or"])
    if op == "not":
        return Not(random_matrix(rng, sets, maps, depth - 1))
    left = random_matrix(rng, sets, maps, depth - 1)
    right = random_matrix(rng, sets, maps, depth - 1)
    if op == "and":
        return And((left, right))
    if op == "or":
        return Or((left, right))
    if op == "imp":
        return Implies(left, right)
    return Iff(left, right)


class _Names:
    def __init__(self):
        self.k = 0

    def __call__(self, base: str) -> Var:
        self.k += 1
        return Var(f"{base}{self.k}", SET)


def random_prenex(
    rng: random.Random,
    sets: Sequence[Var],
    maps: Sequence[Var],
    *,
    universal: bool = True,
    max_prefix: int = 2,
    names: Optional[_Names] = None,
    matrix_depth: int = 2,
):
    """A simple-prenex formula whose domains are free variables."""
    names = names or _Names()
    length = rng.randint(1, max_prefix)
    prefix = []
    bound: list[Var] = []
    for _ in range(length):
        if maps and rng.random() < 0.4:
            x, y = names("u"), names("v")
            prefix.append(("pair", x, y, rng.choice(maps)))
            bound += [x, y]
        else:
            x = names("u")
            prefix.append(("set", x, rng.choice(sets)))
            bound.append(x)
    body = random_matrix(rng, list(sets) + bound + bound, maps, matrix_depth)
    for item in reversed(prefix):
        if item[0] == "pair":
            cls = ForallPairIn if universal else ExistsPairIn
            body = cls(item[1], item[2], item[3], body)
        else:
            cls = ForallIn if universal else ExistsIn
            body = cls(item[1], item[2], body)
    return body


def random_formula(
    rng: random.Random,
    n_sets: int = 2,
    n_maps: int = 1,
    *,
    max_prefix: int = 2,
    blocks: int = 2,
    matrix_depth: int = 1,
):
    """Boolean combination of atoms and universal/existential prenex blocks."""
    sets, maps = free_pool(n_sets, n_maps)
    names = _Names()

    def leaf():
        r = rng.random()
        if r < 0.3:
            return _atom(rng, sets, maps)
        return random_prenex(
            rng, sets, maps, universal=rng.random() < 0.5, max_prefix=max_prefix,
            names=names, matrix_depth=matrix_depth,
        )

    parts = [leaf() for _ in range(blocks)]
    out = parts[0]
    for p in parts[1:]:
        op = rng.choice(["and", "or", "imp", "and"])
        if rng.random() < 0.25:
            p = Not(p)
        out = And((out, p)) if op == "and" else Or((out, p)) if op == "or" else Implies(out, p)
    return out


def random_conjunction(
    rng: random.Random,
    n_sets: int = 2,
    n_maps: int = 1,
    *,
    conjuncts: int = 2,
    max_prefix: int = 2,
    matrix_depth: int = 1,
) -> NormalizedConjunction:
    """A normalized conjunction with pairwise distinct bound variables."""
    sets, maps = free_pool(n_sets, n_maps)
    names = _Names()
    parts = []
    for _ in range(conjuncts):
        if rng.random() < 0.2:
            a = _atom(rng, sets, maps)
            parts.append(Not(a) if rng.random() < 0.3 else a)
        else:
            parts.append(
                random_prenex(rng, sets, maps, max_prefix=max_prefix, names=names, matrix_depth=matrix_depth)
            )
    return NormalizedConjunction(tuple(parts))


_PROP_BINARY = (And, Or, Implies, Iff)


def _binary(op, left, right):
    return op((left, right)) if op in (And, Or) else op(left, right)


def prop_formulas(max_depth: int, names: Sequence[str] = ("p", "q", "r")) -> list:
    """Every propositional formula over ``names`` of depth at most ``max_depth``."""
    from .encoders import PVar

    level = [PVar(n) for n in names]
    for _ in range(max_depth):
        nxt = list(level)
        nxt += [Not(a) for a in level]
        nxt += [_binary(op, a, b) for op in _PROP_BINARY for a, b in itertools.product(level, repeat=2)]
        level = nxt
    return level


def prop_shapes(max_depth: int, names: Sequence[str] = ("p", "q", "r")) -> list:
    """One formula per tree shape of depth at most ``max_depth``.

    A shape fixes where leaves, negations and binary nodes sit; leaves are
    labelled by cycling through ``names`` and binary nodes by cycling
    through the four binary connectives, both in left-to-right order.
    """
    from .encoders import PVar

    shapes: list = ["leaf"]
    for _ in range(max_depth):
        shapes = ["leaf"] + [("not", a) for a in shapes] + [("bin", a, b) for a in shapes for b in shapes]

    def label(shape, counters):
        if shape == "leaf":
            counters[0] += 1
            return PVar(names[(counters[0] - 1) % len(names)])
        if shape[0] == "not":
            return Not(label(shape[1], counters))
        counters[1] += 1
        op = _PROP_BINARY[(counters[1] - 1) % len(_PROP_BINARY)]
        left = label(shape[1], counters)
        return _binary(op, left, label(shape[2], counters))

    return [label(s, [0, 0]) for s in shapes]
