"""Scripted Building Nim players.

Every player exposes ``next_move(history, b)``: ``history`` is the list of
building positions from the root up to and including ``b``, and the return
value is a :class:`~buildnim.game.Move` for the side to move at ``b``.
Players may keep private state (phase plans, stack labels); that state is
updated from ``history`` on each call, so a player must be fed the real game
line. ``state_key()`` summarises the private state for memoised adversary
enumeration, and ``clone()`` gives an independent copy for branching.

Where a rule leaves a free choice, the lowest canonical target index wins.
"""

from __future__ import annotations

import copy
from typing import Callable, Sequence

from .exceptions import InvalidInput, StrategyRefusal
from .game import (
    BuildingPosition,
    GameParams,
    Move,
    apply_move,
    canonicalize,
    class_of_height,
    height_classes,
    legal_moves,
    moved_height,
)
from .nim import nim_sum
from .solver import SolveTable, cached_solve

STRATEGY_IDS = ("strategy-i", "strategy-ii", "mirror", "high", "low", "p2-endgame", "p1-composite", "table")


def _history(history: Sequence[BuildingPosition] | None, b: BuildingPosition | None) -> list[BuildingPosition]:
    hist = list(history or [])
    if b is None:
        if not hist:
            raise InvalidInput("need a history or a current position")
        return hist
    if not hist or hist[-1] != b:
        hist.append(b)
    return hist


class Player:
    """Base class; subclasses implement ``_choose``."""

    strategy_id = "player"
    role: str | None = None  # "P1", "P2" or None for either side
    uses_previous = True  # decisions read the position before the adversary's move

    def __init__(self, params: GameParams):
        self.params = params

    def next_move(self, history: Sequence[BuildingPosition] | None, b: BuildingPosition | None = None) -> Move:
        hist = _history(history, b)
        b = hist[-1]
        if b.remaining < 1:
            raise StrategyRefusal(f"{b}: building is over", "nim-stage")
        if b.n_tokens != self.params.n_tokens or b.n_stacks != self.params.n_stacks:
            raise StrategyRefusal(f"{b} does not belong to BN({self.params.n_tokens},{self.params.n_stacks})", "params")
        if self.role == "P1" and not b.p1_to_move:
            raise StrategyRefusal(f"{b}: {self.strategy_id} plays P1 but P2 is to move", "role")
        if self.role == "P2" and b.p1_to_move:
            raise StrategyRefusal(f"{b}: {self.strategy_id} plays P2 but P1 is to move", "role")
        return self._choose(hist, b)

    def _choose(self, history: list[BuildingPosition], b: BuildingPosition) -> Move:
        raise NotImplementedError

    def clone(self) -> "Player":
        return copy.copy(self)

    def state_key(self):
        return ()

    def __repr__(self) -> str:
        return f"{type(self).__name__}(BN({self.params.n_tokens},{self.params.n_stacks}))"


def _adversary_height(history: list[BuildingPosition]) -> tuple[tuple, int]:
    """Position before the adversary's last token, and the height it raised."""
    if len(history) < 2:
        raise StrategyRefusal("no adversary move to answer", "history")
    before = history[-2].heights
    return before, moved_height(before, history[-1].heights)


# -- simple movers ------------------------------------------------------------


def high_move(b: BuildingPosition, exclude_pair: int | None = None) -> Move:
    """Raise the tallest stack, optionally ignoring two stacks of height ``exclude_pair``."""
    if b.remaining < 1:
        raise InvalidInput("building is over")
    heights = list(b.heights)
    if exclude_pair is not None:
        for _ in range(2):
            if exclude_pair in heights:
                heights.remove(exclude_pair)
    if not heights:
        return Move(0)
    return class_of_height(b.heights, heights[0])


def low_move(b: BuildingPosition) -> Move:
    """Raise a minimal stack."""
    if b.remaining < 1:
        raise InvalidInput("building is over")
    return Move(len(height_classes(b.heights)) - 1)


class HighPlayer(Player):
    strategy_id = "high"
    uses_previous = False

    def __init__(self, params: GameParams, exclude_pair: int | None = None):
        super().__init__(params)
        self.exclude_pair = exclude_pair

    def _choose(self, history, b):
        return high_move(b, self.exclude_pair)


class LowPlayer(Player):
    strategy_id = "low"
    uses_previous = False

    def _choose(self, history, b):
        return low_move(b)


class TablePlayer(Player):
    """Perfect play from a solved table; delays with the lowest index when lost."""

    strategy_id = "table"
    uses_previous = False

    def __init__(self, params: GameParams, table: SolveTable | None = None):
        super().__init__(params)
        if table is None:
            table = cached_solve(params.n_tokens, params.n_stacks)
        if table.params != params:
            raise InvalidInput(f"table is for BN({table.params.n_tokens},{table.params.n_stacks})")
        self.table = table

    def _choose(self, history, b):
        return table_player_move(self.table, b)


def table_player_move(t: SolveTable, b: BuildingPosition) -> Move:
    if t is None:
        raise StrategyRefusal("no table supplied", "table-missing")
    if b.remaining < 1:
        raise StrategyRefusal(f"{b}: Nim stage, not a building move", "nim-stage")
    wins = t.best_moves(b)
    return wins[0] if wins else Move(0)


# -- three stacks ---------------------------------------------------------------


class StrategyIPlayer(Player):
    """P1 on three stacks: after each own move the position is (y, x, x), y >= x."""

    strategy_id = "strategy-i"
    role = "P1"

    def _choose(self, history, b):
        if b.n_stacks != 3:
            raise StrategyRefusal("Strategy I needs three stacks", "stacks")
        if b.placed == 0:
            return Move(0)
        before, h = _adversary_height(history)
        y, x, x2 = before
        if x != x2:
            raise StrategyRefusal(f"{before} is not of the form (y, x, x)", "strategy-i-form")
        if h == y:
            move = Move(0)  # the raised stack is now the tallest; raise it again
        else:
            # the adversary raised one of the matched pair; raise the other
            move = class_of_height(b.heights, x)
        y2, a, c = apply_move(b, move).heights
        if a != c or y2 < a:
            raise StrategyRefusal(f"cannot restore (y, x, x) from {b}", "strategy-i-form")
        return move


class StrategyIIPlayer(Player):
    """P2 on three stacks: after each own move the position is (z, x, y), z = x + y."""

    strategy_id = "strategy-ii"
    role = "P2"

    def _choose(self, history, b):
        if b.n_stacks != 3:
            raise StrategyRefusal("Strategy II needs three stacks", "stacks")
        before, h = _adversary_height(history)
        z, x, y = before
        if z != x + y:
            raise StrategyRefusal(f"{before} does not satisfy z = x + y", "strategy-ii-form")
        if h == z:
            # tallest raised: answer on a shorter stack, the taller one first
            move = Move(1)
        else:
            move = Move(0)
        s1, s2, s3 = apply_move(b, move).heights
        if s1 != s2 + s3:
            raise StrategyRefusal(f"cannot restore z = x + y from {b}", "strategy-ii-form")
        return move


# -- mirroring and the short-game P2 endgame -----------------------------------------


def _paired(heights: Sequence[int], allow_odd_zero: bool) -> bool:
    counts: dict[int, int] = {}
    for h in heights:
        counts[h] = counts.get(h, 0) + 1
    return all(c % 2 == 0 or (allow_odd_zero and h == 0) for h, c in counts.items())


class MirrorPlayer(Player):
    """P2 answers a token on a stack of height h with a token on another stack of height h."""

    strategy_id = "mirror"
    role = "P2"

    def _choose(self, history, b):
        before, h = _adversary_height(history)
        if h not in b.heights:
            raise StrategyRefusal(f"no second stack of height {h} left in {b}", "mirror-unpaired")
        return class_of_height(b.heights, h)


class P2EndgamePlayer(Player):
    """P2 for odd l > 3 and even n <= l + 3: mirror, adjusted near the end.

    * last token: any move to Nim-sum 0 (matched stacks or a 1-2-3 pattern);
    * n = l + 1 at (1,...,1,0,0; 3): put the token on a 1;
    * n = l + 3 at (1,...,1; 3): forced onto a 1;
    * n = l + 3 at (2,2,1,...,1,0,0; 3) with l >= 7: put the token on a 1,
      which replays the n = l + 1 endgame beside the matched 2s;
    * otherwise mirror.
    """

    strategy_id = "p2-endgame"
    role = "P2"

    def __init__(self, params: GameParams):
        super().__init__(params)
        l, n = params.n_stacks, params.n_tokens
        if l <= 3 or l % 2 == 0 or n % 2 == 1 or n > l + 3:
            raise StrategyRefusal(f"BN({n},{l}) is outside odd l > 3, even n <= l + 3", "params")

    def _choose(self, history, b):
        l, n = self.params.n_stacks, self.params.n_tokens
        if b.remaining == 1:
            for move, nb in legal_moves(b):
                if nim_sum(nb.heights) == 0:
                    return move
            raise StrategyRefusal(f"no final move to Nim-sum 0 from {b}", "endgame-final")
        if b.remaining == 3:
            if n == l + 1 and b.heights == (1,) * (l - 2) + (0, 0):
                return Move(0)
            if n == l + 3 and b.heights == (1,) * l:
                return Move(0)
            if n == l + 3 and l >= 7 and b.heights == (2, 2) + (1,) * (l - 4) + (0, 0):
                return class_of_height(b.heights, 1)
        before, h = _adversary_height(history)
        if h not in b.heights:
            raise StrategyRefusal(f"mirroring broke down at {b}", "mirror-unpaired")
        return class_of_height(b.heights, h)


# -- five stacks: the constructive P1 strategy ----------------------------------


def _is_power_of_two(x: int) -> bool:
    return x > 0 and x & (x - 1) == 0


def largest_power_below(n: int) -> int:
    """Largest power of two strictly below ``n`` (``n >= 2``)."""
    p = 1
    while p * 2 < n:
        p *= 2
    return p


def plan_for(n: int) -> dict:
    """Which branch of the five-stack argument applies to BN(2n, 5).

    ``use_table`` marks the base range 5 <= n <= 12, where the player takes
    its moves from a solved table whatever the branch.
    """
    if n < 5:
        raise StrategyRefusal(f"P1 has no winning strategy in BN({2 * n},5)", "params")
    if _is_power_of_two(n + 1) and n >= 15:
        plan = {"case": "lemma-2k2", "K": (2 * n + 2).bit_length() - 1}
    else:
        p = largest_power_below(n)
        plan = {"case": "case-1", "pi": p, "delta": n - p} if n - p > 4 else {"case": "case-2", "p": p}
    plan["use_table"] = n <= 12
    return plan


class PowerOfTwoMinusTwoPlayer(Player):
    """P1 in BN(2**K - 2, 5), K >= 5: play low, defend against a matched (K-2)-component.

    The bottom layers are the first ``B = 2**(K-3)`` tokens of every stack.
    P1 plays low until the adversary has put ``B`` tokens into the bottom
    layers and starts building a second stack above them while the tallest
    stack carries the (K-2)-component. From then on P1 stays off that second
    stack: for K = 5 she puts her remaining tokens on the tallest of the other
    three stacks, for K > 5 she plays high.
    """

    strategy_id = "lemma-2k2"
    role = "P1"

    def __init__(self, params: GameParams):
        super().__init__(params)
        T = params.n_tokens
        K = (T + 2).bit_length() - 1
        if params.n_stacks != 5 or T + 2 != 2**K or K < 5:
            raise StrategyRefusal(f"BN({T},{params.n_stacks}) is not BN(2^K-2, 5) with K >= 5", "params")
        self.K = K
        self.bottom = 2 ** (K - 3)
        self.adv_bottom = 0
        self.mode = "low"
        self.board = [0] * 5
        self.own: set[int] = set()
        self.synced = 1
        self.guard: int | None = None  # label of the adversary's second stack
        self.build: int | None = None  # label P1 builds on (K = 5)

    uses_previous = False

    def clone(self):
        c = copy.copy(self)
        c.board = list(self.board)
        c.own = set(self.own)
        return c

    def state_key(self):
        return (self.mode, self.adv_bottom, tuple(self.board), self.guard, self.build)

    def _label_for(self, h: int, avoid=()) -> int:
        cands = [i for i, x in enumerate(self.board) if x == h]
        pref = [i for i in cands if i not in avoid]
        return (pref or cands)[0]

    def _sync(self, history):
        for i in range(self.synced, len(history)):
            if i in self.own:
                continue
            h = moved_height(history[i - 1].heights, history[i].heights)
            lab = self._label_for(h, avoid=(0,))
            if h < self.bottom:
                self.adv_bottom += 1
            self.board[lab] += 1
            self._after_adversary(lab, h, history[i].remaining)
        self.synced = len(history)

    def _after_adversary(self, lab: int, h: int, remaining: int) -> None:
        if self.mode != "low":
            return
        tall = max(range(5), key=lambda i: (self.board[i], -i))
        top = self.board[tall]
        if (
            lab != tall
            and h >= self.bottom
            and self.adv_bottom == self.bottom
            and top >> (self.K - 2) & 1
            and self.board[lab] < 2 ** (self.K - 2)
        ):
            self.guard = lab
            if self.K == 5 and remaining == 10:
                self.mode = "build"
                others = [i for i in range(5) if i not in (tall, lab)]
                self.build = max(others, key=lambda i: (self.board[i], -i))
            else:
                self.mode = "high"

    def _play_label(self, history, b, lab: int) -> Move:
        move = class_of_height(b.heights, self.board[lab])
        self.board[lab] += 1
        self.own.add(len(history))
        self.synced = len(history) + 1
        return move

    def _choose(self, history, b):
        self._sync(history)
        if canonicalize(self.board) != b.heights:
            raise StrategyRefusal(f"label bookkeeping lost track at {b}", "lemma-2k2-labels")
        if self.mode == "build":
            return self._play_label(history, b, self.build)
        if self.mode == "high":
            cands = [i for i in range(5) if i != self.guard]
            lab = max(cands, key=lambda i: (self.board[i], -i))
            return self._play_label(history, b, lab)
        lab = min(range(5), key=lambda i: (self.board[i], i))
        return self._play_label(history, b, lab)


class P1CompositePlayer(Player):
    """P1 in BN(2n, 5) for n >= 5, following the five-stack induction.

    * n <= 12: perfect play from the solved table.
    * n = 2**k - 1: :class:`PowerOfTwoMinusTwoPlayer`.
    * case-1 (n - p > 4, p the largest power of two below n): pi = p. Play high
      for the first pi tokens. If P2 touched the tallest stack, keep playing
      high. If P2 matched it, play BN(2 delta, 5) on top of the matched pair.
      Otherwise build the third stack until s2 - xi < pi - delta, then play high.
    * case-2 (1 <= n - p <= 4): if P2 matches the first p/2 tokens, recurse with
      pi = p/2; otherwise play high to pi = p and continue as case-1 without the
      matched branch.
    """

    strategy_id = "p1-composite"
    role = "P1"

    def __init__(self, params: GameParams):
        super().__init__(params)
        if params.n_stacks != 5 or params.n_tokens % 2:
            raise StrategyRefusal(f"BN({params.n_tokens},{params.n_stacks}) is not BN(2n, 5)", "params")
        self.n = params.n_tokens // 2
        self.plan = plan_for(self.n)
        self.case = "table" if self.plan["use_table"] else self.plan["case"]
        self.inner: Player | None = None
        if self.case == "table":
            self.inner = TablePlayer(params)
        elif self.case == "lemma-2k2":
            self.inner = PowerOfTwoMinusTwoPlayer(params)
        self.board = [0] * 5
        self.own: set[int] = set()
        self.synced = 1
        self.pi = self.plan.get("pi")
        self.delta = self.plan.get("delta")
        self.regime: str | None = None  # "high", "ontop", "watch", "high-forever"
        self.pair: tuple[int, int] | None = None
        self.sub: Player | None = None
        self.sub_history: list[BuildingPosition] = []

    def clone(self):
        c = copy.copy(self)
        c.board = list(self.board)
        c.own = set(self.own)
        if self.inner is not None:
            c.inner = self.inner.clone()
        if self.sub is not None:
            c.sub = self.sub.clone()
            c.sub_history = list(self.sub_history)
        return c

    def state_key(self):
        if self.inner is not None:
            return (self.case, self.inner.state_key())
        sub = None
        if self.sub is not None:
            sub = (self.sub.state_key(), self.sub_history[-1] if self.sub_history else None)
        return (self.case, self.pi, self.delta, self.regime, self.pair, tuple(self.board), sub)

    # labelled-board bookkeeping
    def _sync(self, history):
        for i in range(self.synced, len(history)):
            if i in self.own:
                continue
            h = moved_height(history[i - 1].heights, history[i].heights)
            lab = min(j for j, x in enumerate(self.board) if x == h)
            self.board[lab] += 1
            if self.sub is not None:
                self._push_sub()
        self.synced = len(history)

    def _translated(self) -> tuple:
        pi = self.pi
        return canonicalize([x - pi if i in self.pair else x for i, x in enumerate(self.board)])

    def _push_sub(self) -> None:
        sub_total = self.sub.params.n_tokens
        t = self._translated()
        self.sub_history.append(BuildingPosition(t, sub_total - sum(t)))

    def _play_label(self, history, b, lab: int) -> Move:
        move = class_of_height(b.heights, self.board[lab])
        self.board[lab] += 1
        self.own.add(len(history))
        self.synced = len(history) + 1
        if self.sub is not None:
            self._push_sub()
        return move

    def _tallest_label(self) -> int:
        return max(range(5), key=lambda i: (self.board[i], -i))

    def _choose(self, history, b):
        if self.inner is not None:
            return self.inner.next_move(history, b)
        self._sync(history)
        if canonicalize(self.board) != b.heights:
            raise StrategyRefusal(f"label bookkeeping lost track at {b}", "composite-labels")
        own_moves = b.placed // 2  # tokens P1 has placed so far

        if self.case == "case-2" and self.regime is None:
            half = self.plan["p"] // 2
            if own_moves < half:
                return self._play_label(history, b, 0)
            others = [i for i in range(1, 5) if self.board[i] > 0]
            if self.board[0] == half and len(others) == 1 and self.board[others[0]] == half:
                self.pi, self.delta = half, self.n - half
                self._start_ontop(others[0])
            else:
                self.pi, self.delta = self.plan["p"], self.n - self.plan["p"]
                self.regime = "pi-phase"

        if self.regime in (None, "pi-phase"):
            if own_moves < self.pi:
                return self._play_label(history, b, 0)
            self._classify(b)

        if self.regime == "ontop":
            move = self.sub.next_move(self.sub_history)
            t = self.sub_history[-1].heights
            target_h = height_classes(t)[move.target]
            pi = self.pi
            lab = min(
                i for i, x in enumerate(self.board) if (x - pi if i in self.pair else x) == target_h
            )
            return self._play_label(history, b, lab)
        if self.regime in ("high", "high-forever"):
            return self._play_label(history, b, self._tallest_label())
        if self.regime == "watch":
            xi = own_moves - self.pi
            s = b.heights
            if s[1] - xi < self.pi - self.delta:
                self.regime = "high-forever"
                return self._play_label(history, b, self._tallest_label())
            lab = min(i for i, x in enumerate(self.board) if x == s[2])
            return self._play_label(history, b, lab)
        raise StrategyRefusal(f"no regime for {b}", "composite-regime")

    def _classify(self, b: BuildingPosition) -> None:
        pi, delta = self.pi, self.delta
        if self.board[0] > pi:
            self.regime = "high"  # P2 touched the tallest stack
            return
        matched = [i for i in range(1, 5) if self.board[i] == pi]
        if matched:
            if self.case == "case-2":
                raise StrategyRefusal(f"{b}: P2 matched at pi = p after declining at p/2", "late-match")
            self._start_ontop(matched[0])  # matched pair
            return
        if delta == pi:
            self.regime = "high"  # n = 2 pi: the k-component on stack 1 stays single
            return
        if not delta < pi - 1:
            raise StrategyRefusal(f"{b}: building the third stack needs delta < pi - 1", "third-stack-gap")
        self.regime = "watch"  # build until the gap closes

    def _start_ontop(self, partner: int) -> None:
        self.pair = (0, partner)
        self.regime = "ontop"
        sub_params = GameParams(2 * self.delta, 5)
        self.sub = P1CompositePlayer(sub_params)
        self.sub_history = []
        self._push_sub()


# -- registry and function-style entry points --------------------------------------


def make_player(strategy_id: str, params: GameParams, table: SolveTable | None = None) -> Player:
    factories: dict[str, Callable[[], Player]] = {
        "strategy-i": lambda: StrategyIPlayer(params),
        "strategy-ii": lambda: StrategyIIPlayer(params),
        "mirror": lambda: MirrorPlayer(params),
        "high": lambda: HighPlayer(params),
        "low": lambda: LowPlayer(params),
        "p2-endgame": lambda: P2EndgamePlayer(params),
        "p1-composite": lambda: P1CompositePlayer(params),
        "lemma-2k2": lambda: PowerOfTwoMinusTwoPlayer(params),
        "table": lambda: TablePlayer(params, table),
    }
    if strategy_id not in factories:
        raise InvalidInput(f"unknown strategy {strategy_id!r}; choose from {', '.join(STRATEGY_IDS)}")
    return factories[strategy_id]()


def replay(player: Player, history: Sequence[BuildingPosition]) -> Player:
    """Feed ``history`` to ``player``, checking that its own past moves match.

    Raises :class:`StrategyRefusal` if the line is not one the strategy plays.
    """
    hist = list(history)
    for i in range(len(hist) - 1):
        b = hist[i]
        if _holder_moves(player, b):
            move = player.next_move(hist[: i + 1])
            if apply_move(b, move) != hist[i + 1]:
                raise StrategyRefusal(
                    f"{hist[i + 1]} is not the {player.strategy_id} reply at {b}", "off-strategy-history"
                )
    return player


def _holder_moves(player: Player, b: BuildingPosition) -> bool:
    if player.role == "P1":
        return b.p1_to_move
    if player.role == "P2":
        return not b.p1_to_move
    return False


def _function_move(strategy_id: str, history, b) -> Move:
    hist = _history(history, b)
    player = make_player(strategy_id, hist[-1].params)
    replay(player, hist)
    return player.next_move(hist)


def strategy_I_move(history, b: BuildingPosition | None = None) -> Move:
    return _function_move("strategy-i", history, b)


def strategy_II_move(history, b: BuildingPosition | None = None) -> Move:
    return _function_move("strategy-ii", history, b)


def mirror_move(history, b: BuildingPosition | None = None) -> Move:
    return _function_move("mirror", history, b)


def p2_endgame_move(history, b: BuildingPosition | None = None) -> Move:
    return _function_move("p2-endgame", history, b)


def p1_composite_move(history, b: BuildingPosition | None = None, params: GameParams | None = None) -> Move:
    hist = _history(history, b)
    if params is not None and params != hist[-1].params:
        raise InvalidInput("params do not match the position")
    return _function_move("p1-composite", hist, None)
