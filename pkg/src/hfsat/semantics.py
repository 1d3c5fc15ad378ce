"""Pair-aware interpretations and the truth evaluator."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Mapping

from .errors import EvaluationError, InvalidInterpretationError, ParseError
from .hf import KURATOWSKI, HFSet, PairingSpec, delta_pairing, parse_hf, to_text
from .syntax import (
    MAP, SET, And, EqualMap, EqualSet, ExistsIn, ExistsInNonpairs, ExistsPairIn,
    ForallIn, ForallInNonpairs, ForallPairIn, Iff, Implies, MemberNonpairs,
    MemberSet, Not, Or, PairMember, SubComp, SubDom, SubImage, SubRange, Var,
)

__all__ = [
    "Interpretation",
    "as_var",
    "variant",
    "evaluate",
    "extended_evaluate",
    "load_model",
    "read_model",
    "dump_model",
    "decode_map",
]


def as_var(key) -> Var:
    """Accept a Var, or a string where an ``@`` prefix marks a map variable."""
    if isinstance(key, Var):
        return key
    if isinstance(key, str):
        return Var(key[1:], MAP) if key.startswith("@") else Var(key, SET)
    raise TypeError(f"not a variable: {key!r}")


@dataclass(frozen=True, eq=False)
class Interpretation:
    """An assignment of HF sets to variables together with a pairing function.

    Map variables may only hold sets of pairs (under ``pairing``).
    """

    assignment: Mapping[Var, HFSet]
    pairing: PairingSpec = field(default=KURATOWSKI)

    def __post_init__(self):
        frozen = {as_var(k): v for k, v in dict(self.assignment).items()}
        for var, value in frozen.items():
            if not isinstance(value, HFSet):
                raise TypeError(f"value of {var} is not an HFSet")
            if var.sort == MAP:
                for w in value.children:
                    if self.pairing.unpair(w) is None:
                        raise InvalidInterpretationError(
                            f"{var} holds {w}, which is not a {self.pairing.name} pair"
                        )
        object.__setattr__(self, "assignment", MappingProxyType(frozen))

    def __getitem__(self, key) -> HFSet:
        return self.assignment[as_var(key)]

    def __contains__(self, key) -> bool:
        return as_var(key) in self.assignment

    def __eq__(self, other) -> bool:
        if not isinstance(other, Interpretation):
            return NotImplemented
        return self.pairing is other.pairing and dict(self.assignment) == dict(other.assignment)

    def __hash__(self) -> int:
        return hash((id(self.pairing), frozenset(self.assignment.items())))

    def restrict(self, variables) -> "Interpretation":
        keep = {as_var(v) for v in variables}
        return Interpretation({k: v for k, v in self.assignment.items() if k in keep}, self.pairing)

    def __repr__(self) -> str:
        body = ", ".join(f"{k}={to_text(v)}" for k, v in sorted(self.assignment.items()))
        return f"Interpretation({body}; pairing={self.pairing.name})"


def variant(i: Interpretation, w, updates: Mapping) -> Interpretation:
    """The ``w``-variant of ``i`` obtained by applying ``updates``."""
    allowed = {as_var(v) for v in w}
    changes = {as_var(k): v for k, v in updates.items()}
    stray = set(changes) - allowed
    if stray:
        raise ValueError(f"updates touch variables outside W: {sorted(map(str, stray))}")
    new = dict(i.assignment)
    new.update(changes)
    return Interpretation(new, i.pairing)


def decode_map(value: HFSet, pairing: PairingSpec, *, strict: bool = True) -> list:
    """Decode the members of a map value into (u, v) tuples."""
    out = []
    for w in value.children:
        d = pairing.unpair(w)
        if d is None:
            if strict:
                raise EvaluationError(f"{w} is not a {pairing.name} pair")
            continue
        out.append(d)
    return out


# -- evaluator ------------------------------------------------------------------

_MISSING = object()


def _bind(env: dict, var: Var, value):
    old = env.get(var, _MISSING)
    env[var] = value
    return old


def _unbind(env: dict, var: Var, old) -> None:
    if old is _MISSING:
        env.pop(var, None)
    else:
        env[var] = old


def _pair_members(value: HFSet, container: Var, pairing: PairingSpec):
    for w in value.children:
        d = pairing.unpair(w)
        if d is None:
            if container.sort == MAP:
                raise EvaluationError(
                    f"member {w} of {container} is not a pair: interpretation is not pair-aware"
                )
            continue
        yield w, d


def _ev(node, env: dict, p: PairingSpec, ext: bool) -> bool:
    t = type(node)
    if t is MemberSet:
        return env[node.x] in env[node.y]
    if t is EqualSet:
        return env[node.x] is env[node.y]
    if t is PairMember:
        return p.pair(env[node.x], env[node.y]) in env[node.f]
    if t is Not:
        return not _ev(node.arg, env, p, ext)
    if t is And:
        for a in node.args:
            if not _ev(a, env, p, ext):
                return False
        return True
    if t is Or:
        for a in node.args:
            if _ev(a, env, p, ext):
                return True
        return False
    if t is Implies:
        return (not _ev(node.left, env, p, ext)) or _ev(node.right, env, p, ext)
    if t is Iff:
        return _ev(node.left, env, p, ext) == _ev(node.right, env, p, ext)
    if t is ForallIn or t is ExistsIn:
        want = t is ForallIn
        var = node.var
        dom = env[node.dom]
        old = env.get(var, _MISSING)
        try:
            for u in dom.children:
                env[var] = u
                if _ev(node.body, env, p, ext) is not want:
                    return not want
        finally:
            _unbind(env, var, old)
        return want
    if t is ForallPairIn or t is ExistsPairIn:
        want = t is ForallPairIn
        value = env[node.f]
        ox, oy = env.get(node.x, _MISSING), env.get(node.y, _MISSING)
        try:
            for _, (u, v) in _pair_members(value, node.f, p):
                env[node.x] = u
                env[node.y] = v
                if _ev(node.body, env, p, ext) is not want:
                    return not want
        finally:
            _unbind(env, node.y, oy)
            _unbind(env, node.x, ox)
        return want
    if t is ForallInNonpairs or t is ExistsInNonpairs:
        want = t is ForallInNonpairs
        var = node.var
        dom = env[node.dom]
        old = env.get(var, _MISSING)
        try:
            for u in dom.children:
                if p.unpair(u) is not None:
                    continue
                env[var] = u
                if _ev(node.body, env, p, ext) is not want:
                    return not want
        finally:
            _unbind(env, var, old)
        return want
    if t is MemberNonpairs:
        u = env[node.x]
        return u in env[node.y] and p.unpair(u) is None
    if t is EqualMap:
        return env[node.f] is env[node.g]
    if t in (SubDom, SubRange, SubImage, SubComp):
        if not ext:
            raise EvaluationError(f"{t.__name__} literal needs extended evaluation")
        return _ev_extension(node, env, p)
    raise TypeError(f"unknown formula node {node!r}")


def _ev_extension(node, env: dict, p: PairingSpec) -> bool:
    t = type(node)
    if t is SubComp:
        f_pairs = decode_map(env[node.f], p)
        g_pairs = decode_map(env[node.g], p)
        succ: dict = {}
        for b, c in g_pairs:
            succ.setdefault(b, set()).add(c)
        comp = {(a, c) for a, b in f_pairs for c in succ.get(b, ())}
        return all(d in comp for d in decode_map(env[node.h], p))
    pairs = decode_map(env[node.f], p)
    if t is SubDom:
        target = {u for u, _ in pairs}
        return all(m in target for m in env[node.x].children)
    if t is SubRange:
        target = {v for _, v in pairs}
        return all(m in target for m in env[node.x].children)
    source = env[node.x]
    target = {v for u, v in pairs if u in source}
    return all(m in target for m in env[node.y].children)


def evaluate(i: Interpretation, f, *, extensions: bool = False) -> bool:
    """Truth value of ``f`` under ``i``.

    Extension inclusion atoms are rejected unless ``extensions`` is set.
    """
    env = dict(i.assignment)
    try:
        return _ev(f, env, i.pairing, extensions)
    except KeyError as exc:
        raise EvaluationError(f"unassigned free variable {exc.args[0]}") from None


def extended_evaluate(i: Interpretation, f) -> bool:
    """Evaluate a formula that may contain dom/ran/img/comp inclusion atoms."""
    return evaluate(i, f, extensions=True)


# -- model files ------------------------------------------------------------------

_LINE = re.compile(r"^(@?[A-Za-z_][A-Za-z0-9_'#$]*)\s*=\s*(.+)$")


def read_model(text: str) -> tuple[PairingSpec, dict[Var, HFSet]]:
    """Parse a model file without checking pair-awareness."""
    pairing = KURATOWSKI
    assignment: dict[Var, HFSet] = {}
    offset = 0
    for raw in text.splitlines(keepends=True):
        line = raw.strip()
        start = offset
        offset += len(raw)
        if not line or line.startswith("#"):
            continue
        if line.startswith("pairing:"):
            kind = line[len("pairing:"):].strip()
            if kind == "kuratowski":
                pairing = KURATOWSKI
            elif kind.startswith("delta"):
                pairing = delta_pairing(parse_hf(kind[len("delta"):].strip()))
            else:
                raise ParseError(f"unknown pairing {kind!r}", text, start)
            continue
        m = _LINE.match(line)
        if m is None:
            raise ParseError("expected 'name = {...}'", text, start)
        var = as_var(m.group(1))
        if var in assignment:
            raise ParseError(f"{var} assigned twice", text, start)
        try:
            assignment[var] = parse_hf(m.group(2))
        except ParseError as exc:
            raise ParseError(f"bad set value for {var}: {exc.message}", text, start) from None
    return pairing, assignment


def load_model(text: str) -> Interpretation:
    """Read ``pairing: ...`` plus ``x = {...}`` / ``@f = {...}`` lines."""
    pairing, assignment = read_model(text)
    return Interpretation(assignment, pairing)


def dump_model(i: Interpretation) -> str:
    if i.pairing is KURATOWSKI:
        head = "pairing: kuratowski"
    elif i.pairing.name.startswith("delta:"):
        head = "pairing: delta " + i.pairing.name[len("delta:"):]
    else:
        raise ValueError(f"pairing {i.pairing.name!r} has no model-file form")
    lines = [head]
    ordered = sorted(i.assignment.items(), key=lambda kv: (kv[0].sort == MAP, kv[0].name))
    lines += [f"{var} = {to_text(value)}" for var, value in ordered]
    return "\n".join(lines) + "\n"
