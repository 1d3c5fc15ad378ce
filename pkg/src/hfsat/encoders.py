"""Formula generators for hardness arguments, and a finite Peano-axiom checker."""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from typing import Mapping, Optional

from .constructs import ConstructCall, expand
from .errors import ParseError, ResourceError
from .hf import KURATOWSKI, HFSet, PairingSpec, to_text
from .semantics import Interpretation
from .syntax import (
    MAP, SET, And, EqualSet, ForallIn, ForallPairIn, Iff, Implies, MemberSet, Not, Or,
    PairMember, SubDom, Var, conj, disj,
)

__all__ = [
    "PVar",
    "parse_propositional",
    "encode_propositional",
    "truth_table_sat",
    "prop_vars",
    "DominoSystem",
    "parse_domino",
    "encode_domino",
    "domino_parts",
    "grid_interpretation",
    "PeanoCandidate",
    "PeanoReport",
    "check_peano",
    "DEFAULT_PEANO_CAP",
]

DEFAULT_PEANO_CAP = 12


# -- propositional formulas -------------------------------------------------------------


@dataclass(frozen=True)
class PVar:
    name: str


_PTOKEN = re.compile(r"\s*(?:(<->|->|[&|~()!∧∨¬→↔])|([A-Za-z_][A-Za-z0-9_]*))")
_PWORDS = {"and": "&", "or": "|", "not": "~"}
_PUNI = {"∧": "&", "∨": "|", "¬": "~", "!": "~", "→": "->", "↔": "<->"}


def parse_propositional(text: str):
    """Parse ``p & ~q -> r``-style text (words and/or/not also accepted)."""
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _PTOKEN.match(text, pos)
        if m is None:
            raise ParseError("unexpected character", text, pos)
        op, word = m.group(1), m.group(2)
        start = m.start(1) if op else m.start(2)
        if op:
            tokens.append((_PUNI.get(op, op), start))
        elif word in _PWORDS:
            tokens.append((_PWORDS[word], start))
        else:
            tokens.append((PVar(word), start))
        pos = m.end()
    tokens.append(("", len(text)))
    k = 0

    def peek():
        return tokens[k][0]

    def take(expected=None):
        nonlocal k
        tok, at = tokens[k]
        if expected is not None and tok != expected:
            raise ParseError(f"expected {expected!r}", text, at)
        k += 1
        return tok

    def iff():
        left = imp()
        while peek() == "<->":
            take()
            left = Iff(left, imp())
        return left

    def imp():
        left = disjunction()
        if peek() == "->":
            take()
            return Implies(left, imp())
        return left

    def disjunction():
        items = [conjunction()]
        while peek() == "|":
            take()
            items.append(conjunction())
        return items[0] if len(items) == 1 else Or(tuple(items))

    def conjunction():
        items = [unary()]
        while peek() == "&":
            take()
            items.append(unary())
        return items[0] if len(items) == 1 else And(tuple(items))

    def unary():
        tok = peek()
        if tok == "~":
            take()
            return Not(unary())
        if tok == "(":
            take()
            inner = iff()
            take(")")
            return inner
        if isinstance(tok, PVar):
            take()
            return tok
        raise ParseError("expected a proposition", text, tokens[k][1])

    result = iff()
    if peek() != "":
        raise ParseError("unexpected trailing input", text, tokens[k][1])
    return result


def prop_vars(q) -> list[str]:
    out: set = set()

    def go(node):
        if isinstance(node, PVar):
            out.add(node.name)
        elif isinstance(node, Not):
            go(node.arg)
        elif isinstance(node, (And, Or)):
            for a in node.args:
                go(a)
        else:
            go(node.left)
            go(node.right)

    go(q)
    return sorted(out)


def _truth(node, env: Mapping[str, bool]) -> bool:
    if isinstance(node, PVar):
        return env[node.name]
    if isinstance(node, Not):
        return not _truth(node.arg, env)
    if isinstance(node, And):
        return all(_truth(a, env) for a in node.args)
    if isinstance(node, Or):
        return any(_truth(a, env) for a in node.args)
    if isinstance(node, Implies):
        return (not _truth(node.left, env)) or _truth(node.right, env)
    return _truth(node.left, env) == _truth(node.right, env)


def truth_table_sat(q) -> bool:
    if isinstance(q, str):
        q = parse_propositional(q)
    names = prop_vars(q)
    return any(
        _truth(q, dict(zip(names, values)))
        for values in itertools.product((False, True), repeat=len(names))
    )


def encode_propositional(q, *, container: str = "X"):
    """Replace each proposition ``p`` by the atom ``x_p in X``."""
    if isinstance(q, str):
        q = parse_propositional(q)
    box = Var(container, SET)

    def go(node):
        if isinstance(node, PVar):
            return MemberSet(Var(f"x_{node.name}", SET), box)
        if isinstance(node, Not):
            return Not(go(node.arg))
        if isinstance(node, (And, Or)):
            return type(node)(tuple(go(a) for a in node.args))
        return type(node)(go(node.left), go(node.right))

    return go(q)


# -- domino systems -----------------------------------------------------------------------


@dataclass(frozen=True)
class DominoSystem:
    """Tile types with horizontal (H) and vertical (V) compatibility."""

    types: tuple
    H: Mapping[str, frozenset] = field(default_factory=dict)
    V: Mapping[str, frozenset] = field(default_factory=dict)

    def __post_init__(self):
        if not self.types:
            raise ValueError("a domino system needs at least one type")
        if len(set(self.types)) != len(self.types):
            raise ValueError("duplicate domino type")
        known = set(self.types)
        for rel_name, rel in (("H", self.H), ("V", self.V)):
            for k, vs in rel.items():
                if k not in known or not set(vs) <= known:
                    raise ValueError(f"{rel_name} mentions an unknown type")
        object.__setattr__(self, "H", {t: frozenset(self.H.get(t, ())) for t in self.types})
        object.__setattr__(self, "V", {t: frozenset(self.V.get(t, ())) for t in self.types})


def parse_domino(text: str) -> DominoSystem:
    """Read ``types: d1 d2; H d1: d1 d2; V d1: d1`` (``;`` or newlines separate)."""
    types: list[str] = []
    rel: dict[str, dict[str, list[str]]] = {"H": {}, "V": {}}
    for raw in re.split(r"[;\n]", text):
        part = raw.strip()
        if not part or part.startswith("#"):
            continue
        head, sep, body = part.partition(":")
        if not sep:
            raise ParseError(f"missing ':' in {part!r}", text, text.find(part))
        words = head.split()
        if words == ["types"]:
            types = body.split()
        elif len(words) == 2 and words[0] in rel:
            rel[words[0]][words[1]] = body.split()
        else:
            raise ParseError(f"unrecognised entry {part!r}", text, text.find(part))
    try:
        return DominoSystem(tuple(types), rel["H"], rel["V"])
    except ValueError as exc:
        raise ParseError(str(exc), text, 0) from None


_N, _Z, _ZS, _M = (Var(n, SET) for n in ("N", "Z", "Zs", "M"))
_S, _SINV = Var("S", MAP), Var("Sinv", MAP)


def _q(k: int) -> Var:
    return Var(f"Q{k + 1}", MAP)


def _comp_into(f: Var, g: Var, targets: list, names: tuple) -> object:
    """(forall [x,y] in f)(forall [x',y'] in g)(y = x' -> [x,y'] in some target)."""
    x, y, x2, y2 = (Var(n, SET) for n in names)
    hit = disj([PairMember(x, y2, t) for t in targets]) if targets else Not(EqualSet(x, x))
    return ForallPairIn(x, y, f, ForallPairIn(x2, y2, g, Implies(EqualSet(y, x2), hit)))


def domino_parts(d: DominoSystem) -> dict:
    """The named pieces of the tiling formula, each a formula."""
    avoid = ["N", "Z", "Zs", "M", "S", "Sinv"] + [_q(k).name for k in range(len(d.types))]
    peano = conj([
        MemberSet(_Z, _N),
        expand(ConstructCall("bijective", (_S,)), avoid=avoid),
        expand(ConstructCall("dom_subseteq", (_S, _N)), avoid=avoid),
        SubDom(_N, _S),
        expand(ConstructCall("singleton", (_ZS, _Z)), avoid=avoid),
        expand(ConstructCall("diff", (_M, _N, _ZS)), avoid=avoid),
        expand(ConstructCall("inverse", (_SINV, _S)), avoid=avoid),
        expand(ConstructCall("dom_subseteq", (_SINV, _M)), avoid=avoid),
        SubDom(_M, _SINV),
        ForallPairIn(Var("x", SET), Var("y", SET), _S, MemberSet(Var("x", SET), Var("y", SET))),
    ])
    qs = [_q(k) for k in range(len(d.types))]
    u, v = Var("u", SET), Var("v", SET)
    cover = ForallIn(u, _N, ForallIn(v, _N, disj([PairMember(u, v, q) for q in qs])))
    disjoint = [
        ForallPairIn(u, v, qs[i], Not(PairMember(u, v, qs[j])))
        for i in range(len(qs))
        for j in range(i + 1, len(qs))
    ]
    index = {t: k for k, t in enumerate(d.types)}
    names = ("x", "y", "x'", "y'")
    hor = [_comp_into(_SINV, qs[i], [qs[index[t]] for t in d.types if t in d.H[ti]], names)
           for i, ti in enumerate(d.types)]
    ver = [_comp_into(qs[i], _S, [qs[index[t]] for t in d.types if t in d.V[ti]], names)
           for i, ti in enumerate(d.types)]
    return {
        "is_peano": peano,
        "partition": conj([cover] + disjoint),
        "hor": hor,
        "ver": ver,
    }


def encode_domino(d: DominoSystem):
    """Conjunction forcing a Peano system plus a compatible tiling of N x N.

    Uses exactly two ``sub dom`` literals; everything else is core syntax.
    """
    parts = domino_parts(d)
    return conj([parts["is_peano"], parts["partition"], *parts["hor"], *parts["ver"]])


def grid_interpretation(d: DominoSystem, tiling: Mapping[tuple, str], size: int = 3) -> Interpretation:
    """A finite truncated grid: N = first ``size`` numerals n -> {n}, S the partial successor.

    ``tiling[(col, row)]`` names the tile at that position.
    """
    nums = [HFSet()]
    for _ in range(size - 1):
        nums.append(HFSet((nums[-1],)))
    p = KURATOWSKI
    succ = [(nums[k], nums[k + 1]) for k in range(size - 1)]
    assignment = {
        _N: HFSet(nums),
        _Z: nums[0],
        _ZS: HFSet((nums[0],)),
        _M: HFSet(nums[1:]),
        _S: HFSet(p.pair(a, b) for a, b in succ),
        _SINV: HFSet(p.pair(b, a) for a, b in succ),
    }
    for k, t in enumerate(d.types):
        assignment[_q(k)] = HFSet(
            p.pair(nums[c], nums[r]) for (c, r), tile in tiling.items() if tile == t
        )
    return Interpretation(assignment, p)


# -- Peano candidates ------------------------------------------------------------------------


@dataclass(frozen=True)
class PeanoCandidate:
    N: HFSet
    Z: HFSet
    S: HFSet
    pairing: PairingSpec = KURATOWSKI


@dataclass(frozen=True)
class PeanoReport:
    passed: bool
    axiom: Optional[str] = None
    witness: Optional[str] = None

    def __str__(self) -> str:
        if self.passed:
            return "pass"
        return f"fail {self.axiom}: {self.witness}"


def check_peano(c: PeanoCandidate, *, cap: int = DEFAULT_PEANO_CAP) -> PeanoReport:
    """Check the five Peano axioms on a finite candidate; report the first failure."""
    if len(c.N) > cap:
        raise ResourceError(f"|N| = {len(c.N)} exceeds the induction-check cap {cap}")
    if c.Z not in c.N:
        return PeanoReport(False, "P1", f"Z = {to_text(c.Z)} is not in N")
    succ: dict = {}
    for w in c.S.children:
        d = c.pairing.unpair(w)
        if d is None:
            return PeanoReport(False, "P2", f"{to_text(w)} in S is not a pair")
        a, b = d
        if a not in c.N or b not in c.N:
            return PeanoReport(False, "P2", f"pair ({to_text(a)}, {to_text(b)}) leaves N x N")
        if a in succ and succ[a] is not b:
            return PeanoReport(False, "P2", f"S is not single-valued at {to_text(a)}")
        succ[a] = b
    for n in c.N.children:
        if n not in succ:
            return PeanoReport(False, "P2", f"{to_text(n)} in N is outside dom(S)")
    seen: dict = {}
    for a, b in succ.items():
        if b in seen:
            return PeanoReport(False, "P3", f"{to_text(seen[b])} and {to_text(a)} share a successor")
        seen[b] = a
    if c.Z in seen:
        return PeanoReport(False, "P4", f"Z is the successor of {to_text(seen[c.Z])}")
    members = c.N.children
    for mask in range(1 << len(members)):
        chosen = {m for k, m in enumerate(members) if mask >> k & 1}
        if len(chosen) == len(members) or c.Z not in chosen:
            continue
        if all(succ[n] in chosen for n in chosen):
            return PeanoReport(False, "P5", f"X = {to_text(HFSet(chosen))} is closed but not N")
    return PeanoReport(True)
