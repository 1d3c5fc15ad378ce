"""Acceptance checks. Each test prints exactly one PASS/FAIL line.

Run directly (``python3 tests/test_acceptance.py``) or through pytest, where
the lines are repeated in the terminal summary.
"""

from __future__ import annotations

import itertools
import random
import statistics
import time

import numpy as np

from hfsat.batch import evaluate_grid
from hfsat.constructs import CONSTRUCTS, rewrite_dom_literal, rewrite_witness, sweep
from hfsat.corpus import prop_formulas, prop_shapes, random_conjunction, random_formula
from hfsat.encoders import (
    DominoSystem, PeanoCandidate, check_peano, domino_parts, encode_domino, encode_propositional,
    truth_table_sat,
)
from hfsat.hf import EMPTY, HFSet, delta_pairing, kur_pair, pairs_of, universe
from hfsat.parser import parse, print_formula
from hfsat.reduction import (
    rebase_pairing, reduce_conjunction, tau, transfer_model_backward, transfer_model_forward,
)
from hfsat.semantics import Interpretation, evaluate, extended_evaluate
from hfsat.solver import SearchBound, decide_bounded, map_candidates, oracle_enumerate
from hfsat.syntax import EXTENSION_ATOMS, MAP, SET, SubDom, Var, conj, free_vars, size, subformulas, validate

RESULTS: dict[str, tuple[bool, str]] = {}

V3 = universe(3)
V4 = universe(4)


def record(name: str, ok: bool, detail: str) -> None:
    RESULTS[name] = (ok, detail)
    print(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
    assert ok, detail


def _domains(f, sets, maps) -> dict:
    s, m = free_vars(f)
    return {v: (sets if v.sort == SET else maps) for v in sorted(s | m)}


def test_construct_oracle_equivalence():
    started = time.perf_counter()
    bad = []
    total = 0
    for name in CONSTRUCTS:
        rep = sweep(name, level=3, breadth=3)
        total += rep.interpretations
        if rep.mismatches:
            bad.append(f"{name} ({rep.mismatches}, e.g. {rep.example})")
    seconds = time.perf_counter() - started
    ok = not bad and seconds < 300
    record(
        "construct-oracle-equivalence",
        ok,
        f"{len(CONSTRUCTS)} rows, {total} interpretations, {len(bad)} rows with mismatches, {seconds:.1f}s (limit 300s)"
        + (f"; {bad}" if bad else ""),
    )


def test_pairing_rebase_agreement():
    rng = random.Random(101)
    maps = map_candidates(3, 3)
    triples = 0
    disagree = 0
    while triples < 10_000:
        psi = random_conjunction(rng, 2, 2, conjuncts=rng.randint(1, 3))
        f = psi.formula
        doms = _domains(f, V3, maps)
        for _ in range(10):
            i = Interpretation({v: rng.choice(d) for v, d in doms.items()})
            if rng.random() < 0.5:
                delta = HFSet(i[v] for v in doms if v.sort == SET)
            else:
                delta = rng.choice(V4)
            j = rebase_pairing(i, delta_pairing(delta))
            disagree += evaluate(i, f) != evaluate(j, f)
            triples += 1
    record("pairing-rebase-agreement", disagree == 0, f"{triples} triples, {disagree} disagreements")


def test_tau_agreement_under_side_conditions():
    rng = random.Random(202)
    # subsets of V3 with no pair member; {{}} itself is a pair, so this drops half of V4
    pair_free = [z for z in V4 if not pairs_of(z)]
    maps = map_candidates(3, 3)
    checked = 0
    disagree = 0
    for _ in range(500):
        psi = random_conjunction(rng, 2, 1, conjuncts=rng.randint(1, 3))
        out, r = tau(psi)
        doms = _domains(psi.formula, pair_free, maps)
        want = evaluate_grid(psi.formula, doms)
        got = evaluate_grid(out, {r.forward.get(v, v): d for v, d in doms.items()})
        checked += want.size
        disagree += int((want != got).sum())
    record(
        "tau-agreement-under-side-conditions",
        disagree == 0,
        f"500 formulas, {checked} interpretations ({len(pair_free)} pair-free set values), {disagree} disagreements",
    )


def test_constructive_equisatisfiability():
    rng = random.Random(303)
    b = SearchBound(3, 3)
    failures = []
    ratios = []
    sat_psi = sat_prime = 0
    for k in range(500):
        psi = random_conjunction(rng, 2, 1)
        psi_prime, r = reduce_conjunction(psi)
        ratios.append(size(psi_prime) / size(psi.formula))
        res = decide_bounded(psi.formula, b)
        if res.kind == "sat":
            sat_psi += 1
            j = transfer_model_backward(res.model, psi, verify=False)
            if not evaluate(j, psi_prime):
                failures.append(f"backward #{k}")
        doms = {x: map_candidates(3, 3) for x in r.forward.values()}
        doms[r.universe] = V4
        res2 = decide_bounded(psi_prime, b, domains=doms)
        if res2.kind == "sat":
            sat_prime += 1
            i = transfer_model_forward(res2.model, psi, r, verify=False)
            if not evaluate(i, psi.formula):
                failures.append(f"forward #{k}")
        if res.kind != res2.kind:
            failures.append(f"bounded verdicts differ #{k}")
    worst = max(ratios)
    ok = not failures and worst <= 6
    record(
        "constructive-equisatisfiability",
        ok,
        f"500 conjunctions, {sat_psi} satisfiable, {sat_prime} guarded satisfiable, {len(failures)} transfer failures; "
        f"size ratio max {worst:.2f} median {statistics.median(ratios):.2f} (limit 6)"
        + (f"; {failures[:5]}" if failures else ""),
    )


def test_end_to_end_oracle_agreement():
    rng = random.Random(404)
    b = SearchBound(3, 2)
    disagree = []
    sat = 0
    for k in range(200):
        n_sets = rng.randint(1, 3)
        n_maps = rng.randint(0, min(1, 3 - n_sets))
        f = random_formula(rng, n_sets, n_maps)
        got = decide_bounded(f, b).kind == "sat"
        want = bool(oracle_enumerate(f, b))
        sat += want
        if got != want:
            disagree.append(print_formula(f))
    record(
        "end-to-end-oracle-agreement",
        not disagree,
        f"200 formulas at level 3 breadth 2, {sat} satisfiable, {len(disagree)} disagreements",
    )


def test_propositional_encoder_agreement():
    b = SearchBound(3)
    seen = set()
    corpus = []
    for q in itertools.chain(prop_formulas(2), prop_shapes(4)):
        if q not in seen:
            seen.add(q)
            corpus.append(q)
    disagree = 0
    for q in corpus:
        disagree += (decide_bounded(encode_propositional(q), b).kind == "sat") != truth_table_sat(q)
    record(
        "propositional-encoder-agreement",
        disagree == 0,
        f"{len(corpus)} formulas over p,q,r (all of depth <= 2, every shape to depth 4), {disagree} disagreements",
    )


def test_bounded_prefix_runtime():
    rng = random.Random(505)
    # the cap limits the nominal product of domains, which pruning never enumerates
    b = SearchBound(3, 4, 10**12)
    times = []
    for _ in range(100):
        f = random_formula(rng, 3, 1, max_prefix=2, blocks=2)
        t0 = time.perf_counter()
        decide_bounded(f, b)
        times.append(time.perf_counter() - t0)
    med = statistics.median(times)
    record(
        "bounded-prefix-runtime",
        med < 1.0,
        f"100 formulas (prefix <= 2, 4 free variables) at level 3 breadth 4: median {med * 1000:.1f}ms, max {max(times):.2f}s (limit median 1s)",
    )


def _chain(k: int) -> DominoSystem:
    types = tuple(f"d{i}" for i in range(1, k + 1))
    return DominoSystem(types, {t: [types[(i + 1) % k]] for i, t in enumerate(types)}, {t: [t] for t in types})


def test_domino_encoder():
    problems = []
    sizes = []
    rest = []
    started = time.perf_counter()
    for k in range(1, 6):
        d = _chain(k)
        g = encode_domino(d)
        if validate(g, extensions=True):
            problems.append(f"l={k} invalid")
        lits = sum(isinstance(n, SubDom) for n in subformulas(g))
        if lits != 2:
            problems.append(f"l={k} has {lits} dom literals")
        disjoint = sum(size(c) for c in domino_parts(d)["partition"].args[1:]) if k > 1 else 0
        if disjoint != 9 * k * (k - 1) // 2:
            problems.append(f"l={k} disjointness size {disjoint}")
        sizes.append(size(g))
        rest.append(size(g) - disjoint)
        for b in (SearchBound(1), SearchBound(2, 1)):
            if decide_bounded(g, b).kind != "no-model-within-bound":
                problems.append(f"l={k} model at {b}")
    steps = [b - a for a, b in zip(rest[1:], rest[2:])]
    if len(set(steps)) != 1:
        problems.append(f"non-disjointness part not affine: {rest}")
    seconds = time.perf_counter() - started
    ok = not problems and seconds < 60
    record(
        "domino-encoder",
        ok,
        f"sizes {sizes} = affine part {rest} + 9*l(l-1)/2; two dom literals each; "
        f"no model within levels 1 and 2 in {seconds:.2f}s" + (f"; {problems}" if problems else ""),
    )


def test_peano_sweep():
    from collections import Counter

    axioms: Counter = Counter()
    passes = 0
    for r in range(5):
        for members in itertools.combinations(V3, r):
            n = HFSet(members)
            grid = [kur_pair(a, b) for a in members for b in members]
            for z in V3:
                for mask in range(1 << len(grid)):
                    s = HFSet(p for k, p in enumerate(grid) if mask >> k & 1)
                    rep = check_peano(PeanoCandidate(n, z, s))
                    passes += rep.passed
                    axioms[rep.axiom] += 1
                for s in V4:
                    rep = check_peano(PeanoCandidate(n, z, s))
                    passes += rep.passed
                    axioms[rep.axiom] += 1
    p1 = check_peano(PeanoCandidate(EMPTY, EMPTY, EMPTY)).axiom
    p2 = check_peano(PeanoCandidate(HFSet([EMPTY]), EMPTY, EMPTY)).axiom
    ok = passes == 0 and p1 == "P1" and p2 == "P2"
    record(
        "peano-sweep",
        ok,
        f"{sum(axioms.values())} candidates, {passes} passes, first failures {dict(sorted(axioms.items()))}; "
        f"N=empty -> {p1}, S=empty -> {p2}",
    )


def _exists_agreement(kind: str, extra: dict) -> tuple[int, int]:
    """Compare ``x sub dom(@f)`` with the rewrite, fresh variables read existentially."""
    x, f = Var("x", SET), Var("f", MAP)
    maps = map_candidates(3, 3)
    want = evaluate_grid(parse("x sub dom(@f)"), {x: V3, f: maps})
    g = rewrite_dom_literal(kind, "x", "@f")
    lits = [a for a in g.args if isinstance(a, EXTENSION_ATOMS)]
    defs = conj([a for a in g.args if not isinstance(a, EXTENSION_ATOMS)])
    doms = {x: V3, f: maps, **extra}
    names = list(doms)
    got = np.zeros(want.shape, dtype=bool)
    for hit in np.argwhere(evaluate_grid(defs, doms)):
        i = Interpretation({v: doms[v][k] for v, k in zip(names, hit)})
        if all(extended_evaluate(i, lit) for lit in lits):
            got[hit[0], hit[1]] = True
    witness_bad = 0
    for (ix, xv), (jf, fv) in itertools.product(enumerate(V3), enumerate(maps)):
        i = rewrite_witness(kind, Interpretation({x: xv, f: fv}), x, f)
        witness_bad += extended_evaluate(i, g) != bool(want[ix, jf])
    return int((got != want).sum()), witness_bad


def test_dom_literal_rewrites():
    maps = map_candidates(3, 3)
    identities = [HFSet(kur_pair(u, u) for u in a) for r in range(5) for a in itertools.combinations(V3, r)]
    range_bad = _exists_agreement("range", {Var("inv$f", MAP): maps})
    comp_bad = _exists_agreement("composition", {Var("inv$f", MAP): maps, Var("id$x", MAP): identities})

    rng = random.Random(606)
    b = SearchBound(3, 2, 10**12)
    a, f = Var("a", SET), Var("f", MAP)
    image_bad = 0
    sat = 0
    for _ in range(100):
        psi = random_conjunction(rng, 2, 1)
        orig = conj([psi.formula, SubDom(a, f)])
        rewritten = conj([psi.formula, rewrite_dom_literal("image", a, f)])
        r1, r2 = decide_bounded(orig, b), decide_bounded(rewritten, b)
        image_bad += r1.kind != r2.kind
        if r1.kind == "sat":
            sat += 1
            image_bad += not extended_evaluate(rewrite_witness("image", r1.model, a, f), rewritten)
    ok = range_bad == (0, 0) and comp_bad == (0, 0) and image_bad == 0
    record(
        "dom-literal-rewrites",
        ok,
        f"range/composition over {len(V3) * len(maps)} interpretations: mismatches {range_bad}/{comp_bad} "
        f"(existential, witness); image: 100 formulas, {sat} satisfiable, {image_bad} disagreements",
    )


if __name__ == "__main__":
    import sys

    failed = 0
    for name, fn in list(globals().items()):
        if name.startswith("test_") and callable(fn):
            try:
                fn()
            except AssertionError:
                failed += 1
    sys.exit(1 if failed else 0)
