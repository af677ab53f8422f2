"""Layered retrograde solver for Building Nim.

Layer ``m`` holds every canonical position with ``m`` tokens placed, indexed by
:func:`buildnim.game.partition_rank`. The last layer (``m == n_tokens``) is the
start of Nim and is labelled by the terminal rule; each earlier layer only
looks one layer ahead, since placing a token moves from ``m`` to ``m + 1``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterator

import numpy as np

from .exceptions import BudgetExceeded, InvalidInput, MissingGrundy, ParamsMismatch
from .game import (
    BuildingPosition,
    GameParams,
    Move,
    height_classes,
    iter_layer,
    layer_size,
    partition_rank,
    raise_height,
)
from .nim import Outcome, nim_sum

logger = logging.getLogger(__name__)

RULES = ("normal", "misere")
FORMAT_VERSION = 1
DEFAULT_BUDGET_MB = 1024
# bytes of transient index per entry of the layer being looked up
_INDEX_BYTES_PER_ENTRY = 200
GRUNDY_BOUNDARY = "nim-sum"


def misere_terminal_outcome(heights) -> Outcome:
    """Misère Nim outcome (the player who cannot move wins)."""
    if max(heights, default=0) >= 2:
        return Outcome.P if nim_sum(heights) == 0 else Outcome.N
    ones = sum(1 for h in heights if h == 1)
    return Outcome.P if ones % 2 == 1 else Outcome.N


def _terminal(rule: str):
    if rule == "normal":
        return lambda h: nim_sum(h) != 0
    return lambda h: misere_terminal_outcome(h) is Outcome.N


def estimate_bytes(params: GameParams, want_grundy: bool) -> int:
    sizes = [layer_size(params.n_stacks, m) for m in range(params.n_tokens + 1)]
    per_entry = 2 if want_grundy else 1
    return sum(sizes) * per_entry + max(sizes) * _INDEX_BYTES_PER_ENTRY


@dataclass
class SolveTable:
    """Outcome (and optionally Grundy) data for every position of BN(n, l).

    ``outcomes[m][r]`` is True when the position of rank ``r`` with ``m``
    tokens placed is an N-position. Layers that were not retained are None.
    """

    params: GameParams
    rule: str
    outcomes: list
    grundy: list | None = None
    metadata: dict = field(default_factory=dict)

    @property
    def has_grundy(self) -> bool:
        return self.grundy is not None

    @property
    def root(self) -> BuildingPosition:
        return self.params.root()

    def root_outcome(self) -> Outcome:
        return self.outcome_of(self.root)

    def _locate(self, b: BuildingPosition) -> tuple[int, int]:
        if b.n_stacks != self.params.n_stacks or b.n_tokens != self.params.n_tokens:
            raise ParamsMismatch(
                f"{b} belongs to BN({b.n_tokens},{b.n_stacks}), table is "
                f"BN({self.params.n_tokens},{self.params.n_stacks})"
            )
        m = b.placed
        if self.outcomes[m] is None:
            raise InvalidInput(f"layer {m} was not retained in this table")
        return m, partition_rank(b.heights)

    def outcome_of(self, b: BuildingPosition) -> Outcome:
        m, r = self._locate(b)
        return Outcome.N if self.outcomes[m][r] else Outcome.P

    def grundy_of(self, b: BuildingPosition) -> int:
        if self.grundy is None:
            raise MissingGrundy("table was built without Grundy values")
        m, r = self._locate(b)
        return int(self.grundy[m][r])

    def best_moves(self, b: BuildingPosition) -> list[Move]:
        """Moves to a P-position, ascending target index; empty iff ``b`` is P."""
        if b.remaining < 1:
            raise InvalidInput("building is over; use Nim play at remaining=0")
        self._locate(b)
        succ = self.outcomes[b.placed + 1]
        out = []
        for i, h in enumerate(height_classes(b.heights)):
            if not succ[partition_rank(raise_height(b.heights, h))]:
                out.append(Move(i))
        return out

    def entries(self) -> Iterator[tuple[BuildingPosition, bool, int | None]]:
        """Yield ``(position, is_N, grundy_or_None)`` over every retained entry."""
        n, l = self.params.n_tokens, self.params.n_stacks
        for m, layer in enumerate(self.outcomes):
            if layer is None:
                continue
            g = self.grundy[m] if self.grundy is not None else None
            for r, h in enumerate(iter_layer(l, m)):
                yield BuildingPosition(h, n - m), bool(layer[r]), None if g is None else int(g[r])

    def n_entries(self) -> int:
        return sum(len(x) for x in self.outcomes if x is not None)


def solve(
    params: GameParams,
    rule: str = "normal",
    want_grundy: bool = False,
    *,
    retain: str = "all",
    budget_mb: float = DEFAULT_BUDGET_MB,
) -> SolveTable:
    """Build the outcome table of BN(``params``) by backward induction.

    ``retain="root"`` keeps only layer 0 and drops the others as soon as they
    are no longer needed (outcome-only sweeps).
    """
    if rule not in RULES:
        raise InvalidInput(f"rule must be one of {RULES}, got {rule!r}")
    if retain not in ("all", "root"):
        raise InvalidInput(f"retain must be 'all' or 'root', got {retain!r}")
    if want_grundy and rule == "misere":
        raise InvalidInput("Grundy values are only defined here for normal play")
    n, l = params.n_tokens, params.n_stacks
    if want_grundy and n > 255:
        raise InvalidInput("Grundy tables store one byte per entry; need n_tokens <= 255")
    est = estimate_bytes(params, want_grundy)
    if est > budget_mb * 2**20:
        raise BudgetExceeded(
            f"BN({n},{l}) needs about {est / 2**20:.1f} MiB, budget is {budget_mb} MiB", est
        )

    is_n_terminal = _terminal(rule)
    outcomes: list = [None] * (n + 1)
    grundy: list | None = [None] * (n + 1) if want_grundy else None

    layer = list(iter_layer(l, n))
    cur_out = np.fromiter((is_n_terminal(h) for h in layer), dtype=bool, count=len(layer))
    cur_g = np.fromiter((nim_sum(h) for h in layer), dtype=np.uint8, count=len(layer)) if want_grundy else None
    keep_all = retain == "all"

    for m in range(n - 1, -1, -1):
        index = {h: i for i, h in enumerate(layer)}
        if keep_all:
            outcomes[m + 1] = cur_out
            if grundy is not None:
                grundy[m + 1] = cur_g
        layer = list(iter_layer(l, m))
        nxt_out = np.empty(len(layer), dtype=bool)
        nxt_g = np.empty(len(layer), dtype=np.uint8) if want_grundy else None
        for r, h in enumerate(layer):
            win = False
            seen = 0
            for i in range(l):
                if i and h[i] == h[i - 1]:
                    continue
                j = index[h[:i] + (h[i] + 1,) + h[i + 1 :]]
                if not cur_out[j]:
                    win = True
                    if not want_grundy:
                        break
                if want_grundy:
                    seen |= 1 << int(cur_g[j])
            nxt_out[r] = win
            if want_grundy:
                g = 0
                while seen >> g & 1:
                    g += 1
                nxt_g[r] = g
        cur_out, cur_g = nxt_out, nxt_g
        logger.debug("BN(%d,%d) layer %d: %d entries", n, l, m, len(layer))

    outcomes[0] = cur_out
    if grundy is not None:
        grundy[0] = cur_g
    meta = {
        "format_version": FORMAT_VERSION,
        "grundy_boundary": GRUNDY_BOUNDARY if want_grundy else None,
        "order": "descending-lex",
    }
    return SolveTable(params, rule, outcomes, grundy, meta)


@lru_cache(maxsize=64)
def cached_solve(n_tokens: int, n_stacks: int, rule: str = "normal", want_grundy: bool = False) -> SolveTable:
    """In-process memo of :func:`solve` for tables reused by players and checks."""
    return solve(GameParams(n_tokens, n_stacks), rule, want_grundy)


def audit_table(t: SolveTable) -> list[str]:
    """Re-check every retained entry against the recurrence; returns violations."""
    problems = []
    n, l = t.params.n_tokens, t.params.n_stacks
    term = _terminal(t.rule)
    for m, layer in enumerate(t.outcomes):
        if layer is None:
            continue
        for r, h in enumerate(iter_layer(l, m)):
            is_n = bool(layer[r])
            if m == n:
                if is_n != term(h):
                    problems.append(f"terminal {h}: stored {'N' if is_n else 'P'}")
                if t.grundy is not None and int(t.grundy[m][r]) != nim_sum(h):
                    problems.append(f"terminal {h}: grundy {t.grundy[m][r]} != nim-sum")
                continue
            succ = t.outcomes[m + 1]
            if succ is None:
                continue
            kids = [partition_rank(raise_height(h, c)) for c in height_classes(h)]
            has_p = any(not succ[k] for k in kids)
            if is_n != has_p:
                problems.append(f"{h};ξ={n - m}: stored {'N' if is_n else 'P'}, recurrence says otherwise")
            if t.grundy is not None:
                vals = {int(t.grundy[m + 1][k]) for k in kids}
                g = 0
                while g in vals:
                    g += 1
                if int(t.grundy[m][r]) != g:
                    problems.append(f"{h};ξ={n - m}: grundy {t.grundy[m][r]} != mex {g}")
                if (g == 0) == is_n:
                    problems.append(f"{h};ξ={n - m}: grundy/outcome disagree")
    return problems
