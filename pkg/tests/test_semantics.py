import itertools
import random

import pytest

from hfsat.corpus import random_formula
from hfsat.errors import EvaluationError, InvalidInterpretationError, ParseError
from hfsat.hf import EMPTY, KURATOWSKI, delta_pairing, hf, kur_pair, universe
from hfsat.parser import parse
from hfsat.semantics import (
    Interpretation, dump_model, evaluate, extended_evaluate, load_model, read_model, variant,
)
from hfsat.solver import map_candidates
from hfsat.syntax import (
    ExistsIn, ExistsPairIn, ForallIn, ForallPairIn, Not, free_vars, subformulas,
)

E = EMPTY
ONE = hf(E)


def test_variant_changes_only_w():
    i = Interpretation({"x": E, "y": ONE})
    j = variant(i, {"x"}, {"x": ONE})
    assert j["x"] is ONE and j["y"] is ONE
    assert variant(i, set(), {}) == i


def test_variant_rejects_nonpair_map():
    i = Interpretation({"@f": E})
    with pytest.raises(InvalidInterpretationError):
        variant(i, {"@f"}, {"@f": hf(E)})


def test_variant_rejects_stray_updates():
    with pytest.raises(ValueError):
        variant(Interpretation({"x": E}), {"y"}, {"x": ONE})


def test_evaluate_examples():
    assert evaluate(Interpretation({"x": E}), parse("forall x' in x . x' != x'"))
    i = Interpretation({"@f": hf(kur_pair(E, E))})
    assert evaluate(i, parse("forall [a,b] in @f . a = b"))
    j = Interpretation({"x": hf(kur_pair(E, E))})
    assert evaluate(j, parse("forall a in nonpairs(x) . a != a"))
    assert not evaluate(j, parse("forall a in x . a != a"))


def test_pair_atom_uses_interpretation_pairing():
    p = delta_pairing(ONE)
    i = Interpretation({"a": E, "b": ONE, "@f": hf(p.pair(E, ONE))}, p)
    assert evaluate(i, parse("[a,b] in @f"))
    assert not evaluate(i, parse("[b,a] in @f"))


def test_unassigned_variable():
    with pytest.raises(EvaluationError):
        evaluate(Interpretation({"x": E}), parse("x in y"))


def test_extended_examples():
    f = hf(kur_pair(E, ONE))
    assert extended_evaluate(Interpretation({"x": ONE, "@f": f}), parse("x sub dom(@f)"))
    assert not extended_evaluate(Interpretation({"x": hf(ONE), "@f": f}), parse("x sub dom(@f)"))
    assert extended_evaluate(Interpretation({"x": hf(ONE), "@f": f}), parse("x sub ran(@f)"))


def test_extension_atoms_need_flag():
    i = Interpretation({"x": E, "@f": E})
    with pytest.raises(EvaluationError):
        evaluate(i, parse("x sub dom(@f)"))


def _dual(q):
    if isinstance(q, ExistsIn):
        return Not(ForallIn(q.var, q.dom, Not(q.body)))
    return Not(ForallPairIn(q.x, q.y, q.f, Not(q.body)))


def test_existential_duality():
    rng = random.Random(3)
    sets = universe(3)
    maps = map_candidates(3, 2)
    checked = 0
    for _ in range(150):
        g = random_formula(rng, 2, 1)
        for q in subformulas(g):
            if not isinstance(q, (ExistsIn, ExistsPairIn)):
                continue
            s, m = free_vars(q)
            for _ in range(20):
                i = Interpretation({**{v: rng.choice(sets) for v in s}, **{v: rng.choice(maps) for v in m}})
                assert evaluate(i, q) == evaluate(i, _dual(q))
                checked += 1
    assert checked > 500


def test_model_file_roundtrip():
    i = Interpretation({"x": E, "y": hf(E, ONE), "@f": hf(kur_pair(E, ONE))})
    text = dump_model(i)
    assert text.startswith("pairing: kuratowski")
    assert load_model(text) == i


def test_model_file_errors():
    with pytest.raises(ParseError):
        load_model("pairing: kuratowski\nx = {")
    with pytest.raises(InvalidInterpretationError):
        load_model("pairing: kuratowski\n@f = {{}}")


def test_read_model_skips_pair_check():
    pairing, values = read_model("pairing: kuratowski\n@S = {{}}\nN = {}\n")
    assert pairing is KURATOWSKI
    assert {str(v) for v in values} == {"@S", "N"}


def test_interpretation_equality_and_hash():
    a = Interpretation({"x": E})
    b = Interpretation({"x": E})
    assert a == b and hash(a) == hash(b)
    assert a != Interpretation({"x": E}, delta_pairing(E))


def test_evaluate_total_on_small_grid():
    g = parse("forall [u,v] in @f . u in x or (exists w in x . w = v)")
    for x, f in itertools.product(universe(3), map_candidates(2, 2)):
        evaluate(Interpretation({"x": x, "@f": f}), g)
