"""Nim-sum arithmetic and the Nim-sum facts Building Nim strategies rely on.

Values are plain non-negative Python ints. Board heights are capped separately
(see ``buildnim.game.MAX_TOKENS``); the predicates here accept any width so
they can be property-tested on 64-bit inputs.
"""

from __future__ import annotations

from enum import Enum
from functools import reduce
from operator import xor
from typing import Iterable, Sequence

from .exceptions import InvalidInput

NS_FACTS = ("NS1", "NS2", "NS3", "NS4", "NS5", "NS6", "NS7")


class Outcome(str, Enum):
    """Outcome class of a position from the point of view of the mover."""

    N = "N"  # next player (the mover) wins
    P = "P"  # previous player wins

    def __str__(self) -> str:
        return self.value


def _check_value(x: int) -> int:
    if not isinstance(x, (int,)) or isinstance(x, bool):
        x = int(x)
    if x < 0:
        raise InvalidInput(f"negative value {x}")
    return x


def nim_sum(values: Iterable[int]) -> int:
    """Bitwise exclusive-or of ``values``; 0 for an empty sequence."""
    return reduce(xor, (_check_value(v) for v in values), 0)


def bouton_outcome(heights: Sequence[int]) -> Outcome:
    """Normal-play Nim outcome: P iff the Nim-sum is 0."""
    return Outcome.P if nim_sum(heights) == 0 else Outcome.N


def is_mersenne(x: int) -> bool:
    """True iff ``x == 2**k - 1`` for some ``k >= 0`` (so 0 qualifies)."""
    x = _check_value(x)
    return (x & (x + 1)) == 0


def has_k_component(x: int, k: int) -> bool:
    """True iff bit ``k`` of ``x`` is set."""
    x = _check_value(x)
    if k < 0:
        raise InvalidInput(f"negative bit index {k}")
    return (x >> k) & 1 == 1


def corollary1_safe(heights: Sequence[int]) -> bool:
    """True iff the Nim-sum is neither 0 nor ``2**h - 1`` with ``h >= 1``.

    A builder who finishes on such a position cannot be answered into Nim-sum 0
    with one more token.
    """
    s = nim_sum(heights)
    return s != 0 and not is_mersenne(s)


def check_ns_fact(fact: str, args: Sequence[int]) -> bool:
    """Evaluate one instance of a Nim-sum fact; True iff the implication holds.

    Argument layouts:

    * NS1, NS2: ``(x, y)``
    * NS3, NS4: ``(x,)``
    * NS5: ``(y, x)``; instances with ``x > y`` are outside the hypothesis and
      hold vacuously
    * NS6: ``(s1, ..., sl)``
    * NS7: ``(y, s1, ..., sl)``
    """
    fact = fact.upper()
    args = tuple(_check_value(a) for a in args)
    arity = {"NS1": 2, "NS2": 2, "NS3": 1, "NS4": 1, "NS5": 2}
    if fact in arity:
        if len(args) != arity[fact]:
            raise InvalidInput(f"{fact} takes {arity[fact]} argument(s), got {len(args)}")
    elif fact == "NS6":
        if len(args) < 1:
            raise InvalidInput("NS6 needs at least one stack height")
    elif fact == "NS7":
        if len(args) < 2:
            raise InvalidInput("NS7 needs y and at least one stack height")
    else:
        raise InvalidInput(f"unknown Nim-sum fact {fact!r}")

    if fact == "NS1":
        x, y = args
        return (x ^ y == 0) == (x == y)
    if fact == "NS2":
        x, y = args
        return x ^ y <= x + y
    if fact == "NS3":
        (x,) = args
        s = x ^ (x + 1)
        return s >= 1 and is_mersenne(s)
    if fact == "NS4":
        (x,) = args
        s = x ^ (x + 1)
        if is_mersenne(x):
            return s == 2 * x + 1
        return s < x
    if fact == "NS5":
        # only the direction used downstream: Mersenne y => x ^ (y - x) == y
        y, x = args
        if x > y or y == 0 or not is_mersenne(y):
            return True
        return x ^ (y - x) == y
    if fact == "NS6":
        s1, rest = args[0], args[1:]
        if nim_sum((s1 + 1, *rest)) != 0:
            return True
        t = nim_sum(args)
        return t >= 1 and is_mersenne(t)
    # NS7
    y, rest = args[0], args[1:]
    if y <= sum(rest):
        return True
    return nim_sum(args) > 0
