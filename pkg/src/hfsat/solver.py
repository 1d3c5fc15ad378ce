"""Bounded finite-model search over hereditarily finite universes.

A formula is normalized into conjunctions; each conjunction is searched over
the candidate space given by a :class:`SearchBound`.  Small-domain variables
are enumerated one by one (conjuncts are checked as soon as their variables
are assigned) and the remaining large-domain variables are evaluated as one
vectorised grid.  A returned model is always re-checked with the scalar
evaluator.  Failing to find a model only means there is none inside the bound.
"""

from __future__ import annotations

import itertools
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Mapping, Optional, Sequence

import numpy as np

from .batch import ValueTable, evaluate_batch
from .errors import HFSatError, ResourceError, ValidationError
from .hf import DEFAULT_UNIVERSE_CAP, KURATOWSKI, HFSet, kur_pair, universe
from .normalize import normalized_conjunctions
from .semantics import Interpretation, as_var, evaluate
from .syntax import (
    EXTENSION_ATOMS, MAP, SET, ExistsInNonpairs, ForallInNonpairs, MemberNonpairs,
    PairMember, Var, free_vars, subformulas, validate,
)

__all__ = [
    "SearchBound",
    "SearchStats",
    "Sat",
    "NoModelWithinBound",
    "map_candidates",
    "candidate_domains",
    "decide_bounded",
    "oracle_enumerate",
]

GRID_LIMIT = 1 << 18


@dataclass(frozen=True)
class SearchBound:
    universe_level: int = 3
    map_breadth: int = 4
    candidate_cap: int = 10**7

    def __post_init__(self):
        if not 0 <= self.universe_level <= DEFAULT_UNIVERSE_CAP:
            raise ResourceError(
                f"universe level {self.universe_level} outside 0..{DEFAULT_UNIVERSE_CAP}"
            )
        if self.map_breadth < 0 or self.candidate_cap < 1:
            raise ValueError("map_breadth must be >= 0 and candidate_cap >= 1")

    def __str__(self) -> str:
        return f"level={self.universe_level}, breadth={self.map_breadth}, cap={self.candidate_cap}"


@dataclass
class SearchStats:
    conjunctions: int = 0
    candidate_space: int = 0
    leaves: int = 0
    timings: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "conjunctions": self.conjunctions,
            "candidate_space": self.candidate_space,
            "leaves": self.leaves,
            "timings": dict(self.timings),
        }


@dataclass
class Sat:
    model: Interpretation
    stats: SearchStats = field(default_factory=SearchStats)
    kind = "sat"


@dataclass
class NoModelWithinBound:
    bound: SearchBound
    stats: SearchStats = field(default_factory=SearchStats)
    kind = "no-model-within-bound"


@lru_cache(maxsize=32)
def _map_candidates(level: int, breadth: int) -> tuple:
    elems = universe(level)
    pairs = [kur_pair(u, v) for u in elems for v in elems]
    out = [HFSet(c) for k in range(min(breadth, len(pairs)) + 1) for c in itertools.combinations(pairs, k)]
    return tuple(sorted(out))


def map_candidates(level: int, breadth: int) -> list[HFSet]:
    """Sets of at most ``breadth`` Kuratowski pairs over ``universe(level)``."""
    return list(_map_candidates(level, breadth))


def _count_map_candidates(level: int, breadth: int) -> int:
    n = len(universe(level)) ** 2
    return sum(math.comb(n, k) for k in range(min(breadth, n) + 1))


def candidate_domains(variables, b: SearchBound, overrides: Optional[Mapping] = None) -> dict:
    """Candidate values for each variable; ``overrides`` wins where given."""
    overrides = {as_var(k): list(v) for k, v in (overrides or {}).items()}
    out = {}
    for v in variables:
        if v in overrides:
            out[v] = overrides[v]
        elif v.sort == MAP:
            out[v] = map_candidates(b.universe_level, b.map_breadth)
        else:
            out[v] = universe(b.universe_level)
    return out


def _check_cap(variables, b: SearchBound, overrides: Mapping) -> int:
    sizes = []
    for v in variables:
        if v in overrides:
            sizes.append(len(overrides[v]))
        elif v.sort == MAP:
            sizes.append(_count_map_candidates(b.universe_level, b.map_breadth))
        else:
            sizes.append(len(universe(b.universe_level)))
    total = math.prod(sizes)
    if total > b.candidate_cap:
        desc = " x ".join(f"{n}[{v}]" for n, v in zip(sizes, variables))
        raise ResourceError(
            f"candidate space {desc} = {total} exceeds cap {b.candidate_cap} "
            f"(blow-up factor {total / b.candidate_cap:.3g})"
        )
    return total


def _dialect_of(f) -> str:
    for node in subformulas(f):
        if isinstance(node, (ForallInNonpairs, ExistsInNonpairs, MemberNonpairs)):
            return "nonpairs"
        if isinstance(node, PairMember) and node.f.sort == SET:
            return "nonpairs"
    return "base"


def _has_extensions(f) -> bool:
    return any(isinstance(n, EXTENSION_ATOMS) for n in subformulas(f))


# -- search over one conjunction ----------------------------------------------------


class _Search:
    def __init__(self, conjuncts: Sequence, domains: Mapping[Var, list], pairing=KURATOWSKI):
        self.conjuncts = list(conjuncts)
        self.domains = dict(domains)
        values = {v for d in domains.values() for v in d}
        self.table = ValueTable(values, pairing)
        self.dom_idx = {v: self.table.indices(d) for v, d in domains.items()}
        self.needs = [frozenset().union(*free_vars(c)) for c in self.conjuncts]
        self._plan()

    def _plan(self) -> None:
        variables = sorted(self.domains, key=lambda v: (v.sort, v.name))
        suffix: list[Var] = []
        size = 1
        for v in sorted(variables, key=lambda v: (-len(self.domains[v]), v.sort, v.name)):
            n = len(self.domains[v])
            if size * n <= GRID_LIMIT:
                suffix.append(v)
                size *= n
        rest = [v for v in variables if v not in suffix]
        order: list[Var] = []
        assigned: set = set()
        while rest:
            def score(v):
                done = sum(1 for need in self.needs if v in need and need <= assigned | {v})
                touched = sum(1 for need in self.needs if v in need)
                return (-done, -touched, len(self.domains[v]), v.sort, v.name)

            best = min(rest, key=score)
            order.append(best)
            assigned.add(best)
            rest.remove(best)
        self.prefix = order
        self.suffix = sorted(suffix, key=lambda v: (v.sort, v.name))
        # conjuncts checked at each prefix depth; the rest go to the grid
        self.stage: list[list[int]] = [[] for _ in range(len(order) + 1)]
        grid: list[int] = []
        for k, need in enumerate(self.needs):
            if need & set(self.suffix):
                grid.append(k)
                continue
            depth = max((order.index(v) + 1 for v in need), default=0)
            self.stage[depth].append(k)
        self.grid_conjuncts = grid
        shape = [len(self.domains[v]) for v in self.suffix]
        self.grid_env = {}
        for axis, v in enumerate(self.suffix):
            reshape = [1] * len(shape)
            reshape[axis] = -1
            self.grid_env[v] = self.dom_idx[v].reshape(reshape)
        self.grid_shape = tuple(shape)

    def _holds(self, indices: list[int], env: dict) -> bool:
        for k in indices:
            if not bool(evaluate_batch(self.conjuncts[k], self.table, env)):
                return False
        return True

    def run(self, first_values: Optional[Sequence[int]] = None, stats: Optional[SearchStats] = None):
        """Least model (as {Var: position in domain}) or None."""
        stats = stats or SearchStats()
        env: dict = {}
        if not self._holds(self.stage[0], env):
            return None
        choice: dict = {}

        def leaf():
            stats.leaves += 1
            full = dict(env)
            full.update(self.grid_env)
            ok = np.ones(self.grid_shape, dtype=bool)
            if ok.size == 0:
                return None
            for k in self.grid_conjuncts:
                ok &= evaluate_batch(self.conjuncts[k], self.table, full)
                if not ok.any():
                    return None
            flat = int(np.argmax(ok.reshape(-1)))
            if not ok.reshape(-1)[flat]:
                return None
            pos = np.unravel_index(flat, self.grid_shape) if self.grid_shape else ()
            out = dict(choice)
            out.update({v: int(p) for v, p in zip(self.suffix, pos)})
            return out

        def go(depth: int):
            if depth == len(self.prefix):
                return leaf()
            v = self.prefix[depth]
            positions = range(len(self.domains[v]))
            if depth == 0 and first_values is not None:
                positions = first_values
            for p in positions:
                env[v] = self.dom_idx[v][p]
                choice[v] = p
                if self._holds(self.stage[depth + 1], env):
                    found = go(depth + 1)
                    if found is not None:
                        return found
            env.pop(v, None)
            choice.pop(v, None)
            return None

        return go(0)


def _run_partition(args):
    conjuncts, domains, pairing, first_values = args
    search = _Search(conjuncts, domains, pairing)
    stats = SearchStats()
    return search.run(first_values, stats), stats.leaves


def _search(conjuncts, domains, pairing, jobs: int, stats: SearchStats):
    search = _Search(conjuncts, domains, pairing)
    if jobs <= 1 or not search.prefix:
        return search.run(None, stats)
    first = search.prefix[0]
    n = len(domains[first])
    step = max(1, math.ceil(n / (jobs * 4)))
    chunks = [list(range(s, min(n, s + step))) for s in range(0, n, step)]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        futures = [pool.submit(_run_partition, (conjuncts, domains, pairing, c)) for c in chunks]
        try:
            for fut in futures:
                found, leaves = fut.result()
                stats.leaves += leaves
                if found is not None:
                    return found
        finally:
            for fut in futures:
                fut.cancel()
    return None


def decide_bounded(
    f,
    b: SearchBound = SearchBound(),
    *,
    domains: Optional[Mapping] = None,
    extensions: Optional[bool] = None,
    jobs: int = 1,
):
    """Search for a model of ``f`` inside the bound.

    Returns :class:`Sat` with an evaluator-confirmed model, or
    :class:`NoModelWithinBound`, which says nothing beyond the bound.
    ``domains`` overrides the candidate list of individual variables.
    """
    if extensions is None:
        extensions = _has_extensions(f)
    dialect = _dialect_of(f)
    diags = validate(f, extensions=extensions, dialect=dialect)
    if diags:
        raise ValidationError(diags)
    overrides = {as_var(k): list(v) for k, v in (domains or {}).items()}
    stats = SearchStats()
    started = time.perf_counter()
    norm_time = 0.0
    sets, maps = free_vars(f)
    targets = sorted(sets | maps, key=lambda v: (v.sort, v.name))
    stream = normalized_conjunctions(f)
    while True:
        t0 = time.perf_counter()
        nc = next(stream, None)
        norm_time += time.perf_counter() - t0
        if nc is None:
            break
        stats.conjunctions += 1
        s, m = free_vars(nc.formula)
        variables = sorted(s | m | set(targets), key=lambda v: (v.sort, v.name))
        stats.candidate_space += _check_cap(variables, b, overrides)
        doms = candidate_domains(variables, b, overrides)
        found = _search(nc.conjuncts, doms, KURATOWSKI, jobs, stats)
        if found is None:
            continue
        model = Interpretation({v: doms[v][found[v]] for v in targets})
        if not evaluate(model, f, extensions=extensions):
            raise HFSatError("internal error: search result is not a model")
        stats.timings = {"normalize": norm_time, "search": time.perf_counter() - started - norm_time}
        return Sat(model, stats)
    stats.timings = {"normalize": norm_time, "search": time.perf_counter() - started - norm_time}
    return NoModelWithinBound(b, stats)


def oracle_enumerate(
    f, b: SearchBound = SearchBound(), *, domains: Optional[Mapping] = None, extensions: Optional[bool] = None
) -> list[Interpretation]:
    """Every model of ``f`` inside the bound, by brute force, in lexicographic order."""
    if extensions is None:
        extensions = _has_extensions(f)
    overrides = {as_var(k): list(v) for k, v in (domains or {}).items()}
    sets, maps = free_vars(f)
    variables = sorted(sets | maps, key=lambda v: (v.sort, v.name))
    _check_cap(variables, b, overrides)
    doms = candidate_domains(variables, b, overrides)
    models = []
    for combo in itertools.product(*(doms[v] for v in variables)):
        i = Interpretation(dict(zip(variables, combo)))
        if evaluate(i, f, extensions=extensions):
            models.append(i)
    return models
