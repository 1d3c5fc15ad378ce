"""Vectorised evaluation over many interpretations at once.

Values are interned into a :class:`ValueTable` (closed under membership) and
variables are bound to integer index arrays that broadcast against each
other, so one call evaluates a formula on a whole grid of assignments.
Quantifiers bind their variables to scalars, one candidate member at a
time, which keeps intermediate arrays no larger than the variables they
actually depend on.
"""

from __future__ import annotations

from typing import Iterable, Mapping

import numpy as np

from .hf import KURATOWSKI, HFSet, PairingSpec
from .semantics import _ev_extension
from .syntax import (
    And, EqualMap, EqualSet, ExistsIn, ExistsInNonpairs, ExistsPairIn, ForallIn,
    ForallInNonpairs, ForallPairIn, Iff, Implies, MemberNonpairs, MemberSet, Not, Or,
    PairMember, SubComp, SubDom, SubImage, SubRange, Var, atom_vars,
)

__all__ = ["ValueTable", "evaluate_batch", "evaluate_grid"]


class ValueTable:
    """Dense membership data for a finite, membership-closed family of sets.

    Index ``len(table)`` is a sentinel standing for "some set not in the
    table"; it is a member of nothing and has no members.
    """

    def __init__(self, values: Iterable[HFSet], pairing: PairingSpec = KURATOWSKI):
        self.pairing = pairing
        order: list[HFSet] = []
        index: dict[HFSet, int] = {}
        stack = list(values)
        while stack:
            v = stack.pop()
            if v in index:
                continue
            index[v] = len(order)
            order.append(v)
            stack.extend(v.children)
        order.sort()
        self.values = order
        self.index = {v: k for k, v in enumerate(order)}
        n = self.absent = len(order)
        member = np.zeros((n + 1, n + 1), dtype=bool)
        for j, v in enumerate(order):
            for c in v.children:
                member[self.index[c], j] = True
        self.member = member
        self.is_pair = np.zeros(n + 1, dtype=bool)
        self.first = np.full(n + 1, n, dtype=np.intp)
        self.second = np.full(n + 1, n, dtype=np.intp)
        for k, v in enumerate(order):
            d = pairing.unpair(v)
            if d is not None:
                self.is_pair[k] = True
                self.first[k] = self.index[d[0]]
                self.second[k] = self.index[d[1]]
        self._pair_cache: dict[tuple[int, int], int] = {}

    def __len__(self) -> int:
        return self.absent

    def indices(self, values: Iterable[HFSet]) -> np.ndarray:
        return np.array([self.index[v] for v in values], dtype=np.intp)

    def _pair_one(self, i: int, j: int) -> int:
        key = (i, j)
        hit = self._pair_cache.get(key)
        if hit is None:
            n = self.absent
            if i == n or j == n:
                hit = n
            else:
                w = self.pairing.pair(self.values[i], self.values[j])
                hit = self.index.get(w, n)
            self._pair_cache[key] = hit
        return hit

    def pair_index(self, xs, ys):
        """Table index of pair(x, y), elementwise and broadcast."""
        if np.ndim(xs) == 0 and np.ndim(ys) == 0:
            return np.intp(self._pair_one(int(xs), int(ys)))
        xb, yb = np.broadcast_arrays(xs, ys)
        keys = xb.astype(np.int64) * (self.absent + 1) + yb
        uniq, inverse = np.unique(keys, return_inverse=True)
        base = self.absent + 1
        looked = np.array([self._pair_one(int(k // base), int(k % base)) for k in uniq], dtype=np.intp)
        return looked[inverse].reshape(xb.shape)

    def members_of_any(self, idx) -> np.ndarray:
        """Indices that belong to at least one of the values in ``idx``."""
        cols = np.unique(np.asarray(idx))
        return np.flatnonzero(self.member[: self.absent, cols].any(axis=1))


def _quantify(table: ValueTable, env: dict, node, universal: bool):
    t = type(node)
    m = table.member
    if t in (ForallPairIn, ExistsPairIn):
        dom = env[node.f]
        bound = (node.x, node.y)
    else:
        dom = env[node.dom]
        bound = (node.var,)
    saved = [env.get(v) for v in bound]
    result = np.bool_(universal)
    try:
        for w in table.members_of_any(dom):
            if t in (ForallPairIn, ExistsPairIn):
                if not table.is_pair[w]:
                    continue
                env[node.x] = table.first[w]
                env[node.y] = table.second[w]
            else:
                if t in (ForallInNonpairs, ExistsInNonpairs) and table.is_pair[w]:
                    continue
                env[node.var] = np.intp(w)
            inside = m[w, dom]
            body = _bev(table, env, node.body)
            if universal:
                result = result & (~inside | body)
                if not np.any(result):
                    return result
            else:
                result = result | (inside & body)
                if np.all(result):
                    return result
    finally:
        for v, old in zip(bound, saved):
            if old is None:
                env.pop(v, None)
            else:
                env[v] = old
    return result


def _extension(table: ValueTable, env: dict, node):
    vars_ = atom_vars(node)
    arrays = np.broadcast_arrays(*(np.asarray(env[v]) for v in vars_))
    shape = arrays[0].shape
    stacked = np.stack([a.reshape(-1) for a in arrays], axis=1)
    uniq, inverse = np.unique(stacked, axis=0, return_inverse=True)
    out = np.empty(len(uniq), dtype=bool)
    for k, row in enumerate(uniq):
        scalar_env = {v: table.values[i] for v, i in zip(vars_, row)}
        out[k] = _ev_extension(node, scalar_env, table.pairing)
    return out[np.asarray(inverse).reshape(-1)].reshape(shape)


def _bev(table: ValueTable, env: dict, node):
    t = type(node)
    m = table.member
    if t is MemberSet:
        return m[env[node.x], env[node.y]]
    if t is EqualSet:
        return env[node.x] == env[node.y]
    if t is PairMember:
        return m[table.pair_index(env[node.x], env[node.y]), env[node.f]]
    if t is MemberNonpairs:
        x = env[node.x]
        return m[x, env[node.y]] & ~table.is_pair[x]
    if t is EqualMap:
        return env[node.f] == env[node.g]
    if t is Not:
        return ~_bev(table, env, node.arg)
    if t is And:
        result = np.bool_(True)
        for a in node.args:
            result = result & _bev(table, env, a)
            if not np.any(result):
                break
        return result
    if t is Or:
        result = np.bool_(False)
        for a in node.args:
            result = result | _bev(table, env, a)
            if np.all(result):
                break
        return result
    if t is Implies:
        return ~_bev(table, env, node.left) | _bev(table, env, node.right)
    if t is Iff:
        return _bev(table, env, node.left) == _bev(table, env, node.right)
    if t in (ForallIn, ForallPairIn, ForallInNonpairs):
        return _quantify(table, env, node, True)
    if t in (ExistsIn, ExistsPairIn, ExistsInNonpairs):
        return _quantify(table, env, node, False)
    if t in (SubDom, SubRange, SubImage, SubComp):
        return _extension(table, env, node)
    raise TypeError(f"unknown formula node {node!r}")


def evaluate_batch(formula, table: ValueTable, assignment: Mapping[Var, object]) -> np.ndarray:
    """Truth values of ``formula`` on every broadcast combination of indices.

    ``assignment`` maps each free variable to an integer array (or scalar) of
    table indices; the result has the broadcast shape of those arrays.
    Extension atoms are always accepted here.
    """
    env = {v: np.asarray(a, dtype=np.intp) for v, a in assignment.items()}
    shape = np.broadcast_shapes(*(a.shape for a in env.values())) if env else ()
    return np.broadcast_to(_bev(table, env, formula), shape)


def evaluate_grid(formula, domains: Mapping[Var, list], pairing: PairingSpec = KURATOWSKI) -> np.ndarray:
    """Truth values over the full product of ``domains``, one axis per variable.

    Axes follow the iteration order of ``domains``.
    """
    variables = list(domains)
    table = ValueTable([v for vs in domains.values() for v in vs], pairing)
    k = len(variables)
    assignment = {}
    for axis, var in enumerate(variables):
        shape = [1] * k
        shape[axis] = len(domains[var])
        assignment[var] = table.indices(domains[var]).reshape(shape)
    full = tuple(len(domains[v]) for v in variables)
    return np.broadcast_to(evaluate_batch(formula, table, assignment), full)
