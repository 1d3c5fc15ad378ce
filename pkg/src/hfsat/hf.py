"""Hereditarily finite sets and pairing functions.

Every :class:`HFSet` is interned: two values are extensionally equal exactly
when they are the same Python object, so ``==``/``hash`` fall back to identity
and membership tests are frozenset lookups.  Children are kept sorted under a
fixed total order (shorter child list first, then elementwise), which makes the
textual form and every enumeration deterministic.
"""

from __future__ import annotations

import itertools
import threading
import weakref
from collections.abc import Iterable, Iterator
from functools import lru_cache
from typing import Callable, Optional, Tuple

from .errors import ParseError, ResourceError

__all__ = [
    "HFSet",
    "EMPTY",
    "hf",
    "canonicalize",
    "rank",
    "parse_hf",
    "universe",
    "PairingSpec",
    "KURATOWSKI",
    "kur_pair",
    "kur_unpair",
    "delta_pairing",
    "pairs_of",
    "DEFAULT_UNIVERSE_CAP",
    "MAX_LIVE_SETS",
    "MAX_DEPTH",
]

DEFAULT_UNIVERSE_CAP = 4
MAX_LIVE_SETS = 10**6
MAX_DEPTH = 200

_table: "weakref.WeakValueDictionary[frozenset, HFSet]" = weakref.WeakValueDictionary()
_table_lock = threading.Lock()


class HFSet:
    """An immutable, interned hereditarily finite set."""

    __slots__ = ("children", "_members", "_key", "_rank", "__weakref__")

    children: Tuple["HFSet", ...]

    def __new__(cls, elements: Iterable["HFSet"] = ()) -> "HFSet":
        members = frozenset(elements)
        found = _table.get(members)
        if found is not None:
            return found
        for m in members:
            if not isinstance(m, HFSet):
                raise TypeError(f"HFSet members must be HFSet, got {type(m).__name__}")
        with _table_lock:
            found = _table.get(members)
            if found is not None:
                return found
            if len(_table) >= MAX_LIVE_SETS:
                raise ResourceError(f"more than {MAX_LIVE_SETS} distinct live HF sets")
            self = object.__new__(cls)
            children = tuple(sorted(members, key=_sort_key))
            self.children = children
            self._members = members
            self._key = (len(children), tuple(c._key for c in children))
            self._rank = 1 + max((c._rank for c in children), default=0)
            _table[members] = self
            return self

    def __reduce__(self):
        return (HFSet, (self.children,))

    def __contains__(self, item: object) -> bool:
        return item in self._members

    def __iter__(self) -> Iterator["HFSet"]:
        return iter(self.children)

    def __len__(self) -> int:
        return len(self.children)

    def __bool__(self) -> bool:
        return bool(self.children)

    def __lt__(self, other: "HFSet") -> bool:
        return self._key < other._key

    def __le__(self, other: "HFSet") -> bool:
        return self._key <= other._key

    def __gt__(self, other: "HFSet") -> bool:
        return self._key > other._key

    def __ge__(self, other: "HFSet") -> bool:
        return self._key >= other._key

    @property
    def members(self) -> frozenset:
        return self._members

    @property
    def sort_key(self) -> tuple:
        return self._key

    def issubset(self, other: "HFSet") -> bool:
        return self._members <= other._members

    def union(self, other: "HFSet") -> "HFSet":
        return HFSet(self._members | other._members)

    def __str__(self) -> str:
        return to_text(self)

    def __repr__(self) -> str:
        return f"HFSet({to_text(self)!r})"


def _sort_key(s: HFSet) -> tuple:
    return s._key


EMPTY = HFSet()


def hf(*elements: HFSet) -> HFSet:
    """Build the set whose members are ``elements``."""
    return HFSet(elements)


def canonicalize(raw, *, max_depth: int = MAX_DEPTH) -> HFSet:
    """Turn nested finite collections (lists, tuples, sets, HFSets) into an HFSet.

    Raises :class:`ResourceError` when nesting exceeds ``max_depth``.
    """

    def go(node, depth: int) -> HFSet:
        if isinstance(node, HFSet):
            return node
        if depth > max_depth:
            raise ResourceError(f"nesting deeper than {max_depth}")
        if isinstance(node, (str, bytes)):
            raise TypeError("strings are not finite collections; use parse_hf")
        return HFSet(go(child, depth + 1) for child in node)

    return go(raw, 0)


def rank(s: HFSet) -> int:
    """Least n with s in V_n; note rank(EMPTY) == 1 because V_0 is empty."""
    return s._rank


def to_text(s: HFSet) -> str:
    return "{" + ",".join(to_text(c) for c in s.children) + "}"


def parse_hf(text: str) -> HFSet:
    """Parse the nested-brace notation, e.g. ``{{},{{}}}``."""
    pos = 0
    n = len(text)

    def skip() -> None:
        nonlocal pos
        while pos < n and text[pos].isspace():
            pos += 1

    def parse_set(depth: int) -> HFSet:
        nonlocal pos
        if depth > MAX_DEPTH:
            raise ResourceError(f"nesting deeper than {MAX_DEPTH}")
        skip()
        if pos >= n or text[pos] != "{":
            raise ParseError("expected '{'", text, pos)
        pos += 1
        items = []
        skip()
        if pos < n and text[pos] == "}":
            pos += 1
            return EMPTY
        while True:
            items.append(parse_set(depth + 1))
            skip()
            if pos < n and text[pos] == ",":
                pos += 1
                continue
            if pos < n and text[pos] == "}":
                pos += 1
                return HFSet(items)
            raise ParseError("expected ',' or '}'", text, pos)

    result = parse_set(0)
    skip()
    if pos != n:
        raise ParseError("trailing characters after set", text, pos)
    return result


@lru_cache(maxsize=None)
def _universe(level: int) -> Tuple[HFSet, ...]:
    if level == 0:
        return ()
    below = _universe(level - 1)
    subsets = (
        HFSet(combo)
        for k in range(len(below) + 1)
        for combo in itertools.combinations(below, k)
    )
    return tuple(sorted(subsets, key=_sort_key))


def universe(level: int, *, cap: int = DEFAULT_UNIVERSE_CAP) -> list[HFSet]:
    """All members of V_level in canonical order."""
    if level < 0:
        raise ValueError("level must be non-negative")
    if level > cap:
        raise ResourceError(
            f"universe level {level} exceeds cap {cap} "
            f"(|V_{level}| would be {_universe_size(level)})"
        )
    return list(_universe(level))


def _universe_size(level: int) -> int:
    size = 0
    for _ in range(level):
        if size > 64:
            return -1
        size = 2**size
    return size


class PairingSpec:
    """An injective binary operation on HF sets together with its inverse.

    ``unpair(w)`` returns ``(u, v)`` when ``w == pair(u, v)`` and ``None``
    otherwise.  Results are memoised per instance.
    """

    def __init__(
        self,
        name: str,
        pair: Callable[[HFSet, HFSet], HFSet],
        unpair: Callable[[HFSet], Optional[Tuple[HFSet, HFSet]]],
        reduce_args: tuple | None = None,
    ):
        self.name = name
        self._reduce_args = reduce_args
        self.pair = lru_cache(maxsize=1 << 16)(pair)
        self.unpair = lru_cache(maxsize=1 << 16)(unpair)

    def is_pair(self, w: HFSet) -> bool:
        return self.unpair(w) is not None

    def __reduce__(self):
        if self._reduce_args is None:
            raise TypeError(f"pairing {self.name!r} cannot be pickled")
        return self._reduce_args

    def __repr__(self) -> str:
        return f"PairingSpec({self.name!r})"


def kur_pair(u: HFSet, v: HFSet) -> HFSet:
    """Kuratowski pair {{u},{u,v}}."""
    return HFSet((HFSet((u,)), HFSet((u, v))))


def kur_unpair(w: HFSet) -> Optional[Tuple[HFSet, HFSet]]:
    ch = w.children
    if len(ch) == 1:
        (c,) = ch
        if len(c.children) == 1:
            u = c.children[0]
            return (u, u)
        return None
    if len(ch) == 2:
        for s, t in ((ch[0], ch[1]), (ch[1], ch[0])):
            if len(s.children) == 1 and len(t.children) == 2:
                u = s.children[0]
                if u in t:
                    a, b = t.children
                    return (u, b if a is u else a)
    return None


def _kuratowski() -> "PairingSpec":
    return KURATOWSKI


KURATOWSKI = PairingSpec("kuratowski", kur_pair, kur_unpair, reduce_args=(_kuratowski, ()))


@lru_cache(maxsize=256)
def delta_pairing(delta: HFSet) -> PairingSpec:
    """The tagged pairing (u, v) -> {kur_pair(u, v), {delta}}.

    Any set containing a value of this pairing has ``delta`` three membership
    levels down, which is what keeps such pairs out of members of ``delta``.
    """
    tag = HFSet((delta,))

    def pair(u: HFSet, v: HFSet) -> HFSet:
        return HFSet((kur_pair(u, v), tag))

    def unpair(w: HFSet) -> Optional[Tuple[HFSet, HFSet]]:
        if tag not in w or len(w) > 2:
            return None
        for candidate in w.children:
            decoded = kur_unpair(candidate)
            if decoded is not None and pair(*decoded) is w:
                return decoded
        return None

    return PairingSpec(
        f"delta:{to_text(delta)}", pair, unpair, reduce_args=(delta_pairing, (delta,))
    )


def pairs_of(s: HFSet, p: PairingSpec = KURATOWSKI) -> HFSet:
    """The members of ``s`` that are pairs under ``p``."""
    return HFSet(u for u in s.children if p.unpair(u) is not None)
