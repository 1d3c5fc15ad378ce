import itertools
import random

import numpy as np

from hfsat.batch import ValueTable, evaluate_batch, evaluate_grid
from hfsat.corpus import random_formula
from hfsat.hf import EMPTY, delta_pairing, hf, universe
from hfsat.parser import parse
from hfsat.semantics import Interpretation, evaluate
from hfsat.solver import map_candidates
from hfsat.syntax import SET, free_vars


def test_table_closed_under_membership():
    t = ValueTable([hf(hf(hf(EMPTY)))])
    assert len(t) == 4
    assert t.member.shape == (5, 5)


def test_grid_matches_scalar_on_random_formulas():
    rng = random.Random(31)
    sets, maps = universe(3), map_candidates(2, 2)
    for _ in range(60):
        g = random_formula(rng, 2, 1)
        s, m = free_vars(g)
        variables = sorted(s | m)
        doms = {v: (sets if v.sort == SET else maps) for v in variables}
        grid = evaluate_grid(g, doms)
        assert grid.shape == tuple(len(doms[v]) for v in variables)
        for combo in itertools.islice(itertools.product(*(range(len(doms[v])) for v in variables)), 0, None, 7):
            i = Interpretation({v: doms[v][k] for v, k in zip(variables, combo)})
            assert bool(grid[combo]) == evaluate(i, g)


def test_nonpairs_dialect_and_other_pairing():
    p = delta_pairing(hf(EMPTY))
    g = parse("forall u in nonpairs(a) . u in b")
    doms = {v: universe(4) for v in sorted(set().union(*free_vars(g)))}
    grid = evaluate_grid(g, doms, p)
    for (ia, a), (ib, b) in itertools.product(enumerate(universe(4)), repeat=2):
        assert bool(grid[ia, ib]) == evaluate(Interpretation({"a": a, "b": b}, p), g)


def test_extension_atoms_fall_back():
    g = parse("x sub dom(@f)")
    doms = {v: (universe(3) if v.sort == SET else map_candidates(2, 2)) for v in sorted(set().union(*free_vars(g)))}
    grid = evaluate_grid(g, doms)
    assert grid.dtype == np.bool_ and grid.any() and not grid.all()


def test_batch_broadcasting():
    t = ValueTable(universe(3))
    x = t.indices(universe(3)).reshape(-1, 1)
    y = t.indices(universe(3)).reshape(1, -1)
    out = evaluate_batch(parse("x in y"), t, {parse("x in y").x: x, parse("x in y").y: y})
    assert out.shape == (4, 4) and int(out.sum()) == 4
