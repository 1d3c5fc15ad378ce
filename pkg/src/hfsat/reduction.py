"""Map elimination: tau, the guarded companion formula, and model transfer.

``tau`` turns a normalized conjunction into a map-free formula of the
nonpairs dialect by renaming every map variable ``@f`` to a set variable
``p$f`` and restricting set quantifiers and memberships to non-pairs.  The
guarded formula adds conjuncts that force set values to be pair-free and
renamed maps to be pure sets of pairs, which makes it equisatisfiable with
the source.  Both directions of that equivalence are constructive here.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from .errors import ContractError
from .hf import HFSet, PairingSpec, delta_pairing
from .normalize import NormalizedConjunction
from .semantics import Interpretation, evaluate
from .syntax import (
    MAP, SET, And, EqualMap, EqualSet, ExistsIn, ExistsInNonpairs, ExistsPairIn,
    ForallIn, ForallInNonpairs, ForallPairIn, Iff, Implies, MemberNonpairs, MemberSet,
    Not, Or, PairMember, Var, all_vars, conj, free_vars,
)

__all__ = [
    "RenamingMap",
    "tau",
    "build_psi_prime",
    "reduce_conjunction",
    "rebase_pairing",
    "transfer_model_backward",
    "transfer_model_forward",
]


@dataclass(frozen=True)
class RenamingMap:
    """Map variable -> fresh set variable, plus the fresh universe variable."""

    forward: Mapping[Var, Var]
    universe: Var

    def __str__(self) -> str:
        lines = [f"{f} -> {x}" for f, x in sorted(self.forward.items())]
        lines.append(f"universe -> {self.universe}")
        return "\n".join(lines)


def _fresh(base: str, taken: set) -> str:
    name = base
    while name in taken:
        name += "$"
    taken.add(name)
    return name


def _as_formula(psi):
    return psi.formula if isinstance(psi, NormalizedConjunction) else psi


def _renaming(f, taken: set) -> RenamingMap:
    _, maps = free_vars(f)
    forward = {m: Var(_fresh(f"p${m.name}", taken), SET) for m in sorted(maps)}
    return RenamingMap(forward, Var(_fresh("U$0", taken), SET))


def _tau(node, fwd: Mapping[Var, Var]):
    t = type(node)
    if t is MemberSet:
        return MemberNonpairs(node.x, node.y)
    if t is PairMember:
        return PairMember(node.x, node.y, fwd.get(node.f, node.f))
    if t is EqualMap:
        return EqualSet(fwd[node.f], fwd[node.g])
    if t in (EqualSet, MemberNonpairs):
        return node
    if t is Not:
        return Not(_tau(node.arg, fwd))
    if t in (And, Or):
        return t(tuple(_tau(a, fwd) for a in node.args))
    if t in (Implies, Iff):
        return t(_tau(node.left, fwd), _tau(node.right, fwd))
    if t is ForallIn:
        return ForallInNonpairs(node.var, node.dom, _tau(node.body, fwd))
    if t is ExistsIn:
        return ExistsInNonpairs(node.var, node.dom, _tau(node.body, fwd))
    if t in (ForallPairIn, ExistsPairIn):
        return t(node.x, node.y, fwd.get(node.f, node.f), _tau(node.body, fwd))
    if t in (ForallInNonpairs, ExistsInNonpairs):
        return t(node.var, node.dom, _tau(node.body, fwd))
    raise ValueError(f"{t.__name__} has no map-free translation")


def tau(psi) -> tuple:
    """Return ``(tau(psi), renaming)``."""
    f = _as_formula(psi)
    r = _renaming(f, {v.name for v in all_vars(f)})
    return _tau(f, r.forward), r


def reduce_conjunction(psi) -> tuple:
    """Return ``(psi_prime, renaming)`` for a normalized conjunction."""
    f = _as_formula(psi)
    taken = {v.name for v in all_vars(f)}
    r = _renaming(f, taken)
    sets, maps = free_vars(f)
    parts = [_tau(f, r.forward)]
    k = 0
    for z in sorted(sets):
        k += 1
        x = Var(_fresh(f"x${k}", taken), SET)
        y = Var(_fresh(f"y${k}", taken), SET)
        parts.append(ForallPairIn(x, y, z, Not(EqualSet(x, x))))
    for m in sorted(maps):
        k += 1
        x = Var(_fresh(f"x${k}", taken), SET)
        parts.append(ForallInNonpairs(x, r.forward[m], Not(EqualSet(x, x))))
    for z in sorted(sets):
        parts.append(MemberNonpairs(z, r.universe))
    return conj(parts), r


def build_psi_prime(psi):
    """The guarded map-free formula equisatisfiable with ``psi``."""
    return reduce_conjunction(psi)[0]


def rebase_pairing(i: Interpretation, p: PairingSpec) -> Interpretation:
    """Re-encode every map value under pairing ``p``; set variables are untouched."""
    new = {}
    for var, value in i.assignment.items():
        if var.sort == MAP:
            new[var] = HFSet(p.pair(*i.pairing.unpair(w)) for w in value.children)
        else:
            new[var] = value
    return Interpretation(new, p)


def transfer_model_backward(i: Interpretation, psi, *, verify: bool = True) -> Interpretation:
    """Turn a model of ``psi`` into a model of its guarded map-free companion."""
    f = _as_formula(psi)
    if verify and not evaluate(i, f):
        raise ContractError("interpretation is not a model of the conjunction")
    sets, maps = free_vars(f)
    delta = HFSet(i[z] for z in sets)
    j = rebase_pairing(i.restrict(sets | maps), delta_pairing(delta))
    psi_prime, r = reduce_conjunction(f)
    assignment = dict(j.assignment)
    for m in maps:
        assignment[r.forward[m]] = j[m]
    assignment[r.universe] = HFSet(j[z] for z in sets)
    out = Interpretation(assignment, j.pairing)
    if verify and not evaluate(out, psi_prime):
        raise ContractError("constructed interpretation does not satisfy the guarded formula")
    return out


def transfer_model_forward(
    j: Interpretation, psi, r: RenamingMap, *, verify: bool = True
) -> Interpretation:
    """Turn a model of the guarded formula back into a model of ``psi``."""
    f = _as_formula(psi)
    if verify:
        psi_prime, _ = reduce_conjunction(f)
        if not evaluate(j, psi_prime):
            raise ContractError("interpretation is not a model of the guarded formula")
    assignment = dict(j.assignment)
    for m, x in r.forward.items():
        assignment[m] = j[x]
    out = Interpretation(assignment, j.pairing)
    if verify and not evaluate(out, f):
        raise ContractError("transferred interpretation does not satisfy the conjunction")
    return out
