"""Macro library for common set and map constructs.

Each construct expands into a core formula; composite constructs refer to
simpler ones and are expanded recursively.  Independently of the macros,
every construct also has a direct meaning written as relation algebra over
characteristic vectors (sets) and boolean matrices (maps), which serves as
the ground truth in sweeps.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Callable, NamedTuple, Optional, Sequence

import numpy as np

from .batch import ValueTable, evaluate_batch
from .errors import ValidationError
from .hf import HFSet, universe
from .parser import parse
from .semantics import Interpretation, as_var, decode_map, evaluate
from .syntax import (
    MAP, SET, And, Diagnostic, EqualMap, EqualSet, ExistsIn, ExistsInNonpairs,
    ExistsPairIn, ForallIn, ForallInNonpairs, ForallPairIn, Iff, Implies, MemberNonpairs,
    MemberSet, Not, Or, PairMember, SubComp, SubImage, SubRange, Var, conj,
)

__all__ = [
    "CONSTRUCTS",
    "ConstructCall",
    "expand",
    "oracle_check",
    "oracle_batch",
    "sweep",
    "SweepReport",
    "rewrite_dom_literal",
    "rewrite_witness",
]

# name -> (parameters, parts); a part is template text or a nested call
_ROWS: dict[str, tuple[tuple[str, ...], tuple]] = {
    "empty_set": (("x",), ("forall x' in x . x' != x'",)),
    "subseteq": (("x", "y"), ("forall x' in x . x' in y",)),
    "union": (("x", "y", "z"), (("subseteq", "y", "x"), ("subseteq", "z", "x"),
                                "forall x' in x . x' in y or x' in z")),
    "inter": (("x", "y", "z"), (("subseteq", "x", "y"), ("subseteq", "x", "z"),
                                "forall y' in y . y' in z -> y' in x")),
    "diff": (("x", "y", "z"), (("subseteq", "x", "y"),
                               "forall y' in y . (y' in x <-> y' notin z)")),
    "singleton": (("x", "y"), ("y in x", "forall x' in x . x' = y")),
    "map_empty": (("@f",), ("forall [x,y] in @f . x != x",)),
    "map_subseteq": (("@f", "@g"), ("forall [x,y] in @f . [x,y] in @g",)),
    "map_union": (("@f", "@g", "@h"), (("map_subseteq", "@g", "@f"), ("map_subseteq", "@h", "@f"),
                                       "forall [x,y] in @f . [x,y] in @g or [x,y] in @h")),
    "map_inter": (("@f", "@g", "@h"), (("map_subseteq", "@f", "@g"), ("map_subseteq", "@f", "@h"),
                                       "forall [x,y] in @g . [x,y] in @h -> [x,y] in @f")),
    "map_diff": (("@f", "@g", "@h"), (("map_subseteq", "@f", "@g"),
                                      "forall [x,y] in @g . ([x,y] in @f <-> [x,y] notin @h)")),
    "map_singleton": (("@f", "x", "y"), ("[x,y] in @f", "forall [x',y'] in @f . x' = x and y' = y")),
    "inverse": (("@f", "@g"), ("forall [x,y] in @f . [y,x] in @g", "forall [x,y] in @g . [y,x] in @f")),
    "cartesian": (("@f", "x", "y"), ("forall x' in x . forall y' in y . [x',y'] in @f",
                                     "forall [x',y'] in @f . x' in x and y' in y")),
    "restrict_left": (("@f", "@g", "x"), (("map_subseteq", "@f", "@g"),
                                          "forall [x',y'] in @g . ([x',y'] in @f <-> x' in x)")),
    "restrict_right": (("@f", "@g", "y"), (("map_subseteq", "@f", "@g"),
                                           "forall [x',y'] in @g . ([x',y'] in @f <-> y' in y)")),
    "restrict_both": (("@f", "@g", "x", "y"), (("map_subseteq", "@f", "@g"),
                                               "forall [x',y'] in @g . ([x',y'] in @f <-> x' in x and y' in y)")),
    "identity_on": (("@f", "x"), ("forall x' in x . [x',x'] in @f",
                                  "forall [x',y'] in @f . x' = y' and x' in x")),
    "sym": (("@f", "@g"), ("forall [x,y] in @f . [x,y] in @g or [y,x] in @g",
                           "forall [x,y] in @g . [x,y] in @f and [y,x] in @f")),
    "single_valued": (("@f",), ("forall [x,y] in @f . forall [x',y'] in @f . x = x' -> y = y'",)),
    "injective": (("@f",), ("forall [x,y] in @f . forall [x',y'] in @f . y = y' -> x = x'",)),
    "bijective": (("@f",), ("forall [x,y] in @f . forall [x',y'] in @f . (x = x' <-> y = y')",)),
    "is_transitive": (("@f",), ("forall [x,y] in @f . forall [x',y'] in @f . y = x' -> [x,y'] in @f",)),
    "is_irreflexive": (("@f",), ("forall [x,y] in @f . x != y",)),
    "is_asymmetric": (("@f",), ("forall [x,y] in @f . x = y or [y,x] notin @f",)),
    "comp_subseteq": (("@f", "@g", "@h"), ("forall [x,y] in @f . forall [x',y'] in @g . y = x' -> [x,y'] in @h",)),
    "dom_subseteq": (("@f", "x"), ("forall [x',y'] in @f . x' in x",)),
    "range_subseteq": (("@f", "y"), ("forall [x',y'] in @f . y' in y",)),
    "image_subseteq": (("@f", "x", "y"), ("forall [x',y'] in @f . x' in x -> y' in y",)),
}

CONSTRUCTS = tuple(_ROWS)

_TEMPLATES = {
    name: (params, tuple(parse(p) if isinstance(p, str) else p for p in parts))
    for name, (params, parts) in _ROWS.items()
}


def _param_sorts(name: str) -> tuple[str, ...]:
    return tuple(MAP if p.startswith("@") else SET for p in _ROWS[name][0])


@dataclass(frozen=True)
class ConstructCall:
    name: str
    args: tuple

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(as_var(a) for a in self.args))
        if self.name not in _ROWS:
            raise ValidationError([Diagnostic("unknown-construct", f"no construct named {self.name!r}")])
        want = _param_sorts(self.name)
        if len(want) != len(self.args):
            raise ValidationError(
                [Diagnostic("arity", f"{self.name} takes {len(want)} arguments, got {len(self.args)}")]
            )
        for k, (s, a) in enumerate(zip(want, self.args)):
            if a.sort != s:
                raise ValidationError(
                    [Diagnostic("sort", f"argument {k + 1} of {self.name} must be a {s} variable, got {a}")]
                )

    def __str__(self) -> str:
        return f"{self.name}({', '.join(map(str, self.args))})"


class _Fresh:
    def __init__(self, taken):
        self.taken = set(taken)

    def __call__(self, v: Var) -> Var:
        name = v.name
        while name in self.taken:
            name += "'"
        self.taken.add(name)
        return Var(name, v.sort)


def _instantiate(node, env: dict, fresh: _Fresh):
    t = type(node)
    r = env.get
    if t in (MemberSet, MemberNonpairs, EqualSet):
        return t(r(node.x), r(node.y))
    if t is PairMember:
        return PairMember(r(node.x), r(node.y), r(node.f))
    if t is EqualMap:
        return EqualMap(r(node.f), r(node.g))
    if t is Not:
        return Not(_instantiate(node.arg, env, fresh))
    if t in (And, Or):
        return t(tuple(_instantiate(a, env, fresh) for a in node.args))
    if t in (Implies, Iff):
        return t(_instantiate(node.left, env, fresh), _instantiate(node.right, env, fresh))
    if t in (ForallPairIn, ExistsPairIn):
        x, y = fresh(node.x), fresh(node.y)
        inner = {**env, node.x: x, node.y: y}
        return t(x, y, r(node.f), _instantiate(node.body, inner, fresh))
    if t in (ForallIn, ExistsIn, ForallInNonpairs, ExistsInNonpairs):
        x = fresh(node.var)
        return t(x, r(node.dom), _instantiate(node.body, {**env, node.var: x}, fresh))
    raise TypeError(f"unexpected template node {node!r}")


def _expand(name: str, args: Sequence[Var], fresh: _Fresh) -> list:
    params, parts = _TEMPLATES[name]
    env = {as_var(p): a for p, a in zip(params, args)}
    out = []
    for part in parts:
        if isinstance(part, tuple):
            sub_args = [env[as_var(p)] for p in part[1:]]
            out.extend(_expand(part[0], sub_args, fresh))
        else:
            out.append(_instantiate(part, env, fresh))
    return out


def expand(call: ConstructCall, *, avoid: Sequence = ()):
    """Core formula for ``call``; bound names avoid the arguments and ``avoid``."""
    taken = {a.name for a in call.args} | {as_var(v).name if not isinstance(v, str) else v for v in avoid}
    return conj(_expand(call.name, call.args, _Fresh(taken)))


# -- relation-algebra ground truth ---------------------------------------------------


class SetArg(NamedTuple):
    """A set value as (its own element index, characteristic vector of its members)."""

    idx: np.ndarray
    vec: np.ndarray


def _sub(a, b):
    return ~(a & ~b).any(-1)


def _eq(a, b):
    return (a == b).all(-1)


def _msub(f, g):
    return ~(f & ~g).any((-1, -2))


def _meq(f, g):
    return (f == g).all((-1, -2))


def _mm(a, b):
    return np.matmul(a.astype(np.uint8), b.astype(np.uint8)) > 0


def _onehot(idx, n):
    return np.asarray(idx)[..., None] == np.arange(n)


def _T(f):
    return np.swapaxes(f, -1, -2)


def _eye(f):
    return np.eye(f.shape[-1], dtype=bool)


def _oracle_table() -> dict[str, Callable]:
    def n_of(a):
        return a.vec.shape[-1]

    return {
        "empty_set": lambda x: ~x.vec.any(-1),
        "subseteq": lambda x, y: _sub(x.vec, y.vec),
        "union": lambda x, y, z: _eq(x.vec, y.vec | z.vec),
        "inter": lambda x, y, z: _eq(x.vec, y.vec & z.vec),
        "diff": lambda x, y, z: _eq(x.vec, y.vec & ~z.vec),
        "singleton": lambda x, y: _eq(x.vec, _onehot(y.idx, n_of(x))),
        "map_empty": lambda f: ~f.any((-1, -2)),
        "map_subseteq": lambda f, g: _msub(f, g),
        "map_union": lambda f, g, h: _meq(f, g | h),
        "map_inter": lambda f, g, h: _meq(f, g & h),
        "map_diff": lambda f, g, h: _meq(f, g & ~h),
        "map_singleton": lambda f, x, y: _meq(
            f, _onehot(x.idx, f.shape[-1])[..., :, None] & _onehot(y.idx, f.shape[-1])[..., None, :]
        ),
        "inverse": lambda f, g: _meq(f, _T(g)),
        "cartesian": lambda f, x, y: _meq(f, x.vec[..., :, None] & y.vec[..., None, :]),
        "restrict_left": lambda f, g, x: _meq(f, g & x.vec[..., :, None]),
        "restrict_right": lambda f, g, y: _meq(f, g & y.vec[..., None, :]),
        "restrict_both": lambda f, g, x, y: _meq(f, g & x.vec[..., :, None] & y.vec[..., None, :]),
        "identity_on": lambda f, x: _meq(f, _eye(f) & x.vec[..., :, None]),
        "sym": lambda f, g: _meq(f, g | _T(g)),
        "single_valued": lambda f: (f.sum(-1) <= 1).all(-1),
        "injective": lambda f: (f.sum(-2) <= 1).all(-1),
        "bijective": lambda f: (f.sum(-1) <= 1).all(-1) & (f.sum(-2) <= 1).all(-1),
        "is_transitive": lambda f: _msub(_mm(f, f), f),
        "is_irreflexive": lambda f: ~np.diagonal(f, axis1=-2, axis2=-1).any(-1),
        # the row as written forbids symmetric pairs off the diagonal only
        "is_asymmetric": lambda f: ~(f & _T(f) & ~_eye(f)).any((-1, -2)),
        "comp_subseteq": lambda f, g, h: _msub(_mm(f, g), h),
        "dom_subseteq": lambda f, x: _sub(f.any(-1), x.vec),
        "range_subseteq": lambda f, y: _sub(f.any(-2), y.vec),
        "image_subseteq": lambda f, x, y: _sub((x.vec[..., :, None] & f).any(-2), y.vec),
    }


_ORACLES = _oracle_table()


def oracle_batch(name: str, args: Sequence) -> np.ndarray:
    """Evaluate the direct meaning of a construct on encoded (broadcast) arguments."""
    return _ORACLES[name](*args)


def _encode_set(value: HFSet, elems: dict) -> SetArg:
    vec = np.zeros(len(elems), dtype=bool)
    for c in value.children:
        vec[elems[c]] = True
    return SetArg(np.intp(elems[value]), vec)


def _encode_map(pairs, elems: dict) -> np.ndarray:
    mat = np.zeros((len(elems), len(elems)), dtype=bool)
    for u, v in pairs:
        mat[elems[u], elems[v]] = True
    return mat


def oracle_check(call: ConstructCall, i: Interpretation) -> bool:
    """Direct meaning of ``call`` under ``i``, without looking at the macro."""
    pool: set = set()
    decoded = {}
    for a in call.args:
        value = i[a]
        if a.sort == MAP:
            decoded[a] = decode_map(value, i.pairing)
            for u, v in decoded[a]:
                pool.update((u, v))
        else:
            pool.add(value)
            pool.update(value.children)
    elems = {e: k for k, e in enumerate(sorted(pool))}
    args = [
        _encode_map(decoded[a], elems) if a.sort == MAP else _encode_set(i[a], elems)
        for a in call.args
    ]
    return bool(oracle_batch(call.name, args))


# -- exhaustive sweep -------------------------------------------------------------------


@dataclass
class SweepReport:
    name: str
    interpretations: int
    mismatches: int
    seconds: float
    example: Optional[dict] = None

    @property
    def ok(self) -> bool:
        return self.mismatches == 0


def sweep(name: str, level: int = 3, breadth: int = 3, *, budget: int = 1 << 22) -> SweepReport:
    """Compare macro evaluation with the direct meaning on every interpretation.

    Set arguments range over ``universe(level)``; map arguments over sets of
    at most ``breadth`` Kuratowski pairs of ``universe(level)`` elements.
    """
    from .solver import map_candidates

    started = time.perf_counter()
    params = _ROWS[name][0]
    args = [Var(f"a{k}", MAP if p.startswith("@") else SET) for k, p in enumerate(params)]
    call = ConstructCall(name, tuple(args))
    formula = expand(call)
    elems_list = universe(level)
    elems = {e: k for k, e in enumerate(elems_list)}
    sets = elems_list
    maps = map_candidates(level, breadth)
    table = ValueTable(list(sets) + list(maps))
    set_enc = [_encode_set(s, elems) for s in sets]
    set_idx = np.array([e.idx for e in set_enc], dtype=np.intp)
    set_vec = np.stack([e.vec for e in set_enc])
    map_mat = np.stack([_encode_map(decode_map(m, table.pairing), elems) for m in maps])
    domains = [sets if a.sort == SET else maps for a in args]
    sizes = [len(d) for d in domains]
    total = int(np.prod(sizes))
    rest = total // sizes[0]
    step = max(1, budget // max(1, rest * len(elems_list)))
    mismatches = 0
    example = None
    for start in range(0, sizes[0], step):
        stop = min(sizes[0], start + step)
        env = {}
        oracle_args = []
        for axis, (a, d) in enumerate(zip(args, domains)):
            sel = slice(start, stop) if axis == 0 else slice(None)
            shape = [1] * len(args)
            shape[axis] = -1
            pos = np.arange(len(d))[sel]
            env[a] = table.indices(d[k] for k in pos).reshape(shape)
            if a.sort == SET:
                oracle_args.append(SetArg(set_idx[pos].reshape(shape), set_vec[pos].reshape(shape + [len(elems)])))
            else:
                oracle_args.append(map_mat[pos].reshape(shape + [len(elems), len(elems)]))
        got = evaluate_batch(formula, table, env)
        want = oracle_batch(name, oracle_args)
        bad = np.broadcast_to(got, want.shape) != want
        count = int(bad.sum())
        if count and example is None:
            where = np.unravel_index(int(np.argmax(bad)), bad.shape)
            pick = [int(where[0]) + start] + [int(w) for w in where[1:]]
            example = {str(a): str(d[p]) for a, d, p in zip(args, domains, pick)}
        mismatches += count
    return SweepReport(name, total, mismatches, time.perf_counter() - started, example)


# -- dom-literal rewrites -----------------------------------------------------------------


def _rewrite_names(x: Var, f: Var) -> dict:
    return {
        "inverse": Var(f"inv${f.name}", MAP),
        "identity": Var(f"id${x.name}", MAP),
        "range": Var(f"R${f.name}", SET),
    }


def rewrite_dom_literal(kind: str, x, f):
    """Replace ``x sub dom(@f)`` by a literal of another kind plus definitions.

    ``range`` and ``composition`` give formulas equivalent to the original
    once the fresh maps are read as their definitions; ``image`` gives an
    equisatisfiable formula only (the fresh set must be chosen suitably).
    """
    x, f = as_var(x), as_var(f)
    names = _rewrite_names(x, f)
    g = names["inverse"]
    inverse = expand(ConstructCall("inverse", (g, f)), avoid=[x.name, names["identity"].name])
    if kind == "range":
        return conj([SubRange(x, g), inverse])
    if kind == "composition":
        ident = names["identity"]
        identity = expand(ConstructCall("identity_on", (ident, x)), avoid=[g.name, f.name])
        return conj([identity, inverse, SubComp(ident, f, g)])
    if kind == "image":
        return conj([SubImage(x, g, names["range"]), inverse])
    raise ValueError(f"unknown rewrite kind {kind!r}; expected range, composition or image")


def rewrite_witness(kind: str, i: Interpretation, x, f) -> Interpretation:
    """Extend ``i`` with the intended values of the fresh rewrite variables."""
    x, f = as_var(x), as_var(f)
    names = _rewrite_names(x, f)
    p = i.pairing
    pairs = decode_map(i[f], p)
    new = dict(i.assignment)
    new[names["inverse"]] = HFSet(p.pair(v, u) for u, v in pairs)
    if kind == "composition":
        new[names["identity"]] = HFSet(p.pair(u, u) for u in i[x].children)
    if kind == "image":
        new[names["range"]] = HFSet(v for _, v in pairs)
    return Interpretation(new, p)


def check_expansion(call: ConstructCall, i: Interpretation) -> bool:
    """Evaluate the macro under ``i``; convenience for tests and the CLI."""
    return evaluate(i, expand(call))
