import itertools
import pickle

import pytest

from hfsat.errors import ParseError, ResourceError
from hfsat.hf import (
    EMPTY, KURATOWSKI, HFSet, canonicalize, delta_pairing, hf, kur_pair, kur_unpair,
    pairs_of, parse_hf, rank, to_text, universe,
)

E = EMPTY
ONE = hf(E)
TWO = hf(E, ONE)


def test_canonicalize_examples():
    assert canonicalize([[], []]) is ONE
    assert canonicalize([]) is E
    assert canonicalize([[[]], [[], []]]) is hf(ONE)


def test_canonicalize_idempotent():
    for s in universe(4):
        assert canonicalize(s) is s
        assert canonicalize(canonicalize([s, [s]])) is canonicalize([s, [s]])


def test_canonicalize_depth_limit():
    raw: list = []
    for _ in range(50):
        raw = [raw]
    with pytest.raises(ResourceError):
        canonicalize(raw, max_depth=10)


def test_rank_starts_at_one():
    assert rank(E) == 1
    assert rank(ONE) == 2
    assert rank(hf(ONE)) == 3


def test_kuratowski_examples():
    assert kur_pair(E, E) is hf(ONE)
    assert kur_pair(E, ONE) is hf(ONE, hf(E, ONE))
    assert kur_unpair(hf(ONE)) == (E, E)
    assert kur_unpair(ONE) is None
    assert kur_unpair(E) is None


@pytest.mark.parametrize("p", [KURATOWSKI, delta_pairing(E), delta_pairing(TWO)])
def test_pairing_roundtrip_on_v3(p):
    for u, v in itertools.product(universe(3), repeat=2):
        assert p.unpair(p.pair(u, v)) == (u, v)


def test_pairing_injective_on_v3():
    for p in (KURATOWSKI, delta_pairing(ONE)):
        images = {p.pair(u, v) for u, v in itertools.product(universe(3), repeat=2)}
        assert len(images) == 16


def test_delta_pairing_shape():
    p = delta_pairing(E)
    assert p.pair(E, E) is hf(hf(ONE), ONE)
    assert p.unpair(kur_pair(E, E)) is None
    assert delta_pairing(E) is p


def test_pairs_of_examples():
    assert pairs_of(E, KURATOWSKI) is E
    assert pairs_of(hf(E, hf(ONE)), KURATOWSKI) is hf(hf(ONE))
    w = kur_pair(E, ONE)
    assert pairs_of(hf(w), KURATOWSKI) is hf(w)


def test_pairs_of_is_subset():
    for s in universe(4):
        assert pairs_of(s).issubset(s)


def test_universe_sizes():
    assert universe(1) == [E]
    assert len(universe(3)) == 4
    assert len(universe(4)) == 16
    with pytest.raises(ResourceError):
        universe(5)


def _ext_equal(a: HFSet, b: HFSet) -> bool:
    return all(any(_ext_equal(x, y) for y in b) for x in a) and all(
        any(_ext_equal(x, y) for x in a) for y in b
    )


def test_extensionality_on_v4():
    v4 = universe(4)
    for a, b in itertools.product(v4, repeat=2):
        assert (a is b) == _ext_equal(a, b)


def test_kuratowski_rank_gap():
    for u, v in itertools.product(universe(3), repeat=2):
        assert rank(kur_pair(u, v)) >= max(rank(u), rank(v)) + 2


def test_canonical_order_is_total_and_deterministic():
    v4 = universe(4)
    assert sorted(reversed(v4)) == v4
    assert len(set(v4)) == 16


def test_text_roundtrip():
    for s in universe(4):
        assert parse_hf(to_text(s)) is s
    assert to_text(TWO) == "{{},{{}}}"
    assert parse_hf(" { {} , {} } ") is ONE


def test_parse_errors():
    for bad in ["{", "}", "{{}", "{}x", "x"]:
        with pytest.raises(ParseError):
            parse_hf(bad)


def test_pickle_preserves_identity():
    s = hf(TWO, ONE)
    assert pickle.loads(pickle.dumps(s)) is s
    p = delta_pairing(ONE)
    q = pickle.loads(pickle.dumps(p))
    assert q.pair(E, E) is p.pair(E, E)
