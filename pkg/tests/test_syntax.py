import random

import pytest

from hfsat.constructs import ConstructCall, expand
from hfsat.corpus import random_formula
from hfsat.errors import ParseError, SortError
from hfsat.parser import parse, print_formula
from hfsat.syntax import (
    MAP, SET, EqualSet, ForallIn, Implies, MemberSet, Not, PairMember, Var, free_vars,
    map_var, set_var, validate,
)

x, y, z = set_var("x"), set_var("y"), set_var("z")
xp = set_var("x'")
f = map_var("f")


def kinds(text, **kw):
    return [d.kind for d in validate(parse(text), **kw)]


def test_parse_emptiness_row():
    assert parse("forall x' in x . not (x' = x')") == ForallIn(xp, x, Not(EqualSet(xp, xp)))


def test_parse_pair_implication():
    assert parse("[x,y] in @f -> x in y") == Implies(PairMember(x, y, f), MemberSet(x, y))


def test_sort_error():
    with pytest.raises(SortError):
        parse("x in @f")
    with pytest.raises(SortError):
        parse("@f in x")


def test_parse_error_has_position():
    with pytest.raises(ParseError) as info:
        parse("x in")
    assert info.value.pos is not None
    with pytest.raises(ParseError):
        parse("forall x in y x = x")


def test_print_canonical():
    assert print_formula(ForallIn(x, y, EqualSet(x, x))) == "forall x in y . x = x"


def test_sugar_desugars():
    assert parse("x != y") == Not(EqualSet(x, y))
    assert parse("x notin y") == Not(MemberSet(x, y))


def test_unicode_input():
    assert parse("∀ x ∈ y . x ≠ x") == parse("forall x in y . x != x")


def test_precedence_and_associativity():
    assert parse("a in a -> b in b -> c in c") == parse("a in a -> (b in b -> c in c)")
    assert parse("x in y or x in z and y in z") == parse("x in y or (x in z and y in z)")
    assert parse("not x in y and y in z") == parse("(not x in y) and y in z")


def test_roundtrip_random_corpus():
    rng = random.Random(0)
    for _ in range(1000):
        g = random_formula(rng, rng.randint(1, 3), rng.randint(0, 2), blocks=rng.randint(1, 3), matrix_depth=2)
        text = print_formula(g)
        assert parse(text) == g, text
        assert print_formula(parse(text)) == text


def test_minimal_parentheses():
    text = "(x in y or y in z) and not (x = y <-> y = z)"
    assert print_formula(parse(text)) == text
    assert print_formula(parse("((x in y))")) == "x in y"


def test_validate_examples():
    assert kinds("forall x in y . forall z in x . z = z") == ["non-simple"]
    assert kinds("forall [x,y] in @f . x in y") == []
    assert kinds("x sub dom(@f)") != []
    assert kinds("x sub dom(@f)", extensions=True) == []


def test_validate_nonpairs_dialect():
    assert kinds("forall x in nonpairs(y) . x in nonpairs(z)", dialect="nonpairs") == []
    assert kinds("forall x in nonpairs(y) . x in z") != []
    assert kinds("[x,y] in @f", dialect="nonpairs") != []


def test_sort_clash_across_formula():
    assert kinds("[x,y] in @f and @x = @x") != []


def test_free_vars_examples():
    assert free_vars(parse("forall x in y . x in z")) == ({y, z}, set())
    assert free_vars(parse("[x,y] in @f")) == ({x, y}, {f})
    g = map_var("g")
    assert free_vars(expand(ConstructCall("inverse", (f, g)))) == (set(), {f, g})


def test_free_vars_excludes_bound():
    rng = random.Random(1)
    for _ in range(200):
        g = random_formula(rng, 2, 1)
        sets, maps = free_vars(g)
        assert all(v.name[0] in "abcdef" for v in sets | maps)


def test_every_parsed_formula_validates_or_diagnoses():
    for text in ["x in y", "forall x in x . x in x", "exists [a,b] in @f . a = b", "@f = @g"]:
        out1 = validate(parse(text))
        assert out1 == validate(parse(text))


def test_var_sorts():
    assert Var("f", MAP) != Var("f", SET)
    assert str(map_var("f")) == "@f"
