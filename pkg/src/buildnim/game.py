"""Building positions, move generation and partition ranking.

A position is a non-increasing tuple of stack heights. Stacks of equal height
are interchangeable, so a move is identified by the *height class* it raises:
``Move(0)`` raises one of the tallest stacks, ``Move(1)`` one stack of the next
distinct height, and so on.

Tablebase layers are indexed by :func:`partition_rank`, the position's index in
the descending-lexicographic list of all length-``l`` non-increasing vectors
with the same sum. That order is part of the on-disk format.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Sequence

from .exceptions import InvalidInput

MAX_TOKENS = 2**16

Position = tuple  # tuple[int, ...], canonical (non-increasing)


@dataclass(frozen=True)
class GameParams:
    """BN(n_tokens, n_stacks)."""

    n_tokens: int
    n_stacks: int

    def __post_init__(self):
        if int(self.n_stacks) < 1:
            raise InvalidInput(f"need at least one stack, got {self.n_stacks}")
        if int(self.n_tokens) < 0:
            raise InvalidInput(f"negative token count {self.n_tokens}")
        if int(self.n_tokens) > MAX_TOKENS:
            raise InvalidInput(f"{self.n_tokens} tokens exceeds the cap of {MAX_TOKENS}")
        object.__setattr__(self, "n_tokens", int(self.n_tokens))
        object.__setattr__(self, "n_stacks", int(self.n_stacks))

    def root(self) -> "BuildingPosition":
        return BuildingPosition((0,) * self.n_stacks, self.n_tokens)


@dataclass(frozen=True)
class BuildingPosition:
    """A canonical position plus the number of tokens still to be placed."""

    heights: Position
    remaining: int

    def __post_init__(self):
        h = tuple(int(x) for x in self.heights)
        if any(x < 0 for x in h):
            raise InvalidInput(f"negative height in {h}")
        if any(h[i] < h[i + 1] for i in range(len(h) - 1)):
            raise InvalidInput(f"position {h} is not canonical (non-increasing)")
        if int(self.remaining) < 0:
            raise InvalidInput(f"negative remaining count {self.remaining}")
        object.__setattr__(self, "heights", h)
        object.__setattr__(self, "remaining", int(self.remaining))

    @property
    def placed(self) -> int:
        return sum(self.heights)

    @property
    def n_tokens(self) -> int:
        return self.placed + self.remaining

    @property
    def n_stacks(self) -> int:
        return len(self.heights)

    @property
    def params(self) -> GameParams:
        return GameParams(self.n_tokens, self.n_stacks)

    @property
    def p1_to_move(self) -> bool:
        """P1 places when an even number of tokens is already on the board."""
        return self.placed % 2 == 0

    def __str__(self) -> str:
        return format_building_position(self)


@dataclass(frozen=True, order=True)
class Move:
    """Raise one stack of the ``target``-th distinct height (tallest first)."""

    target: int


def canonicalize(raw: Sequence[int], n_stacks: int | None = None) -> Position:
    """Sort ``raw`` into non-increasing order."""
    if n_stacks is not None and len(raw) != n_stacks:
        raise InvalidInput(f"expected {n_stacks} heights, got {len(raw)}")
    h = tuple(sorted((int(x) for x in raw), reverse=True))
    if h and h[-1] < 0:
        raise InvalidInput(f"negative height in {tuple(raw)}")
    return h


def height_classes(heights: Position) -> list[int]:
    """Distinct heights, tallest first; index ``i`` is the height of ``Move(i)``."""
    out: list[int] = []
    for h in heights:
        if not out or out[-1] != h:
            out.append(h)
    return out


def class_of_height(heights: Position, h: int) -> Move:
    classes = height_classes(heights)
    try:
        return Move(classes.index(h))
    except ValueError:
        raise InvalidInput(f"no stack of height {h} in {heights}") from None


def raise_height(heights: Position, h: int) -> Position:
    """Add a token to one stack of height ``h``; the result stays canonical."""
    i = heights.index(h)
    return heights[:i] + (h + 1,) + heights[i + 1 :]


def apply_move(b: BuildingPosition, move: Move) -> BuildingPosition:
    if b.remaining < 1:
        raise InvalidInput("building is over; no token left to place")
    classes = height_classes(b.heights)
    if not 0 <= move.target < len(classes):
        raise InvalidInput(f"move target {move.target} out of range for {b.heights}")
    return BuildingPosition(raise_height(b.heights, classes[move.target]), b.remaining - 1)


def legal_moves(b: BuildingPosition) -> list[tuple[Move, BuildingPosition]]:
    """One successor per distinct resulting position, ordered by target index."""
    if b.remaining < 1:
        raise InvalidInput("no building moves at remaining=0; the Nim stage has started")
    return [
        (Move(i), BuildingPosition(raise_height(b.heights, h), b.remaining - 1))
        for i, h in enumerate(height_classes(b.heights))
    ]


def moved_height(before: Position, after: Position) -> int:
    """Height of the stack that received the token between two positions."""
    for h in height_classes(before):
        if raise_height(before, h) == after:
            return h
    raise InvalidInput(f"{after} does not follow from {before} by one token")


# -- partition ranking -----------------------------------------------------


@lru_cache(maxsize=None)
def _bounded_count(parts: int, total: int, cap: int) -> int:
    """Non-increasing vectors of length ``parts``, entries <= ``cap``, summing to ``total``."""
    if total == 0:
        return 1
    if parts == 0 or cap == 0 or total > parts * cap:
        return 0
    if parts == 1:
        return 1 if total <= cap else 0
    lo = -(-total // parts)
    return sum(_bounded_count(parts - 1, total - v, v) for v in range(lo, min(cap, total) + 1))


def layer_size(n_stacks: int, total: int) -> int:
    """Number of partitions of ``total`` into at most ``n_stacks`` parts."""
    if n_stacks < 1 or total < 0:
        raise InvalidInput(f"bad layer ({n_stacks}, {total})")
    return _bounded_count(n_stacks, total, total)


def partition_rank(heights: Sequence[int]) -> int:
    """Index of ``heights`` in its layer, descending-lex order; ``(m, 0, ...)`` is 0."""
    h = tuple(heights)
    if any(h[i] < h[i + 1] for i in range(len(h) - 1)) or (h and h[-1] < 0):
        raise InvalidInput(f"position {h} is not canonical")
    rank = 0
    rest = sum(h)
    cap = rest
    n = len(h)
    for i in range(n - 1):
        v = h[i]
        tail = n - i - 1
        for w in range(v + 1, min(cap, rest) + 1):
            rank += _bounded_count(tail, rest - w, w)
        rest -= v
        cap = v
    return rank


def partition_unrank(n_stacks: int, total: int, rank: int) -> Position:
    """Inverse of :func:`partition_rank`."""
    size = layer_size(n_stacks, total)
    if not 0 <= rank < size:
        raise InvalidInput(f"rank {rank} outside layer of size {size}")
    out = []
    rest = total
    cap = total
    for i in range(n_stacks - 1):
        tail = n_stacks - i - 1
        lo = -(-rest // (tail + 1))
        for w in range(min(cap, rest), lo - 1, -1):
            c = _bounded_count(tail, rest - w, w)
            if rank < c:
                break
            rank -= c
        out.append(w)
        rest -= w
        cap = w
    out.append(rest)
    return tuple(out)


def iter_layer(n_stacks: int, total: int) -> Iterator[Position]:
    """All canonical positions with the given sum, in rank order."""

    def rec(parts: int, rest: int, cap: int) -> Iterator[tuple]:
        if parts == 1:
            yield (rest,)
            return
        lo = -(-rest // parts)
        for w in range(min(cap, rest), lo - 1, -1):
            for tail in rec(parts - 1, rest - w, w):
                yield (w,) + tail

    yield from rec(n_stacks, total, total)


# -- text formats ----------------------------------------------------------

_BP_RE = re.compile(r"^\s*([0-9,\s]+?)\s*;\s*(?:(?:ξ|xi|r)\s*=\s*)?(\d+)\s*$", re.IGNORECASE)


def parse_position(text: str) -> Position:
    """Parse ``"5,3,2,1"`` into a canonical position."""
    parts = [p.strip() for p in text.split(",")]
    if not parts or any(not p.isdigit() for p in parts):
        raise InvalidInput(f"cannot parse position {text!r}")
    return canonicalize([int(p) for p in parts])


def parse_building_position(text: str) -> BuildingPosition:
    """Parse ``"5,3,2,1;ξ=4"`` (also ``xi=4`` or a bare ``;4``)."""
    m = _BP_RE.match(text)
    if not m:
        raise InvalidInput(f"cannot parse building position {text!r}")
    return BuildingPosition(parse_position(m.group(1)), int(m.group(2)))


def format_position(heights: Sequence[int]) -> str:
    return ",".join(str(h) for h in heights)


def format_building_position(b: BuildingPosition) -> str:
    return f"{format_position(b.heights)};ξ={b.remaining}"
