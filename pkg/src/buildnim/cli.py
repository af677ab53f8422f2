"""Command-line front end (``buildnim`` / ``python -m buildnim``)."""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path
from typing import Sequence, TextIO

import numpy as np

from .exceptions import BudgetExceeded, BuildingNimError, InvalidInput, StrategyRefusal, TableFormatError
from .game import (
    BuildingPosition,
    GameParams,
    apply_move,
    class_of_height,
    format_building_position,
    format_position,
    height_classes,
    parse_building_position,
    parse_position,
)
from .nim import Outcome, bouton_outcome
from .solver import DEFAULT_BUDGET_MB, FORMAT_VERSION, RULES, SolveTable, misere_terminal_outcome, solve
from .strategies import STRATEGY_IDS, Player, make_player
from .tablebase import load_table, save_table
from .verification import CLAIMS, RANGE_KEYS, certify, sweep, sweep_csv, verify

log = logging.getLogger("buildnim")

CACHE_ENV = "BUILDNIM_CACHE_DIR"
EXIT_OK, EXIT_FAIL, EXIT_FINDING, EXIT_SKIPPED = 0, 1, 2, 3
EXIT_USAGE = 64


# -- table cache --------------------------------------------------------------------


def cache_path(cache_dir: str | os.PathLike, params: GameParams, rule: str, grundy: bool) -> Path:
    tag = "g" if grundy else "o"
    return Path(cache_dir) / f"bn_l{params.n_stacks}_n{params.n_tokens}_{rule}_{tag}_v{FORMAT_VERSION}.bntb"


def get_table(
    params: GameParams,
    rule: str = "normal",
    grundy: bool = False,
    cache_dir: str | os.PathLike | None = None,
    budget_mb: float = DEFAULT_BUDGET_MB,
) -> SolveTable:
    """Solve, or load from ``cache_dir`` when a valid cached table exists."""
    if cache_dir is None:
        return solve(params, rule, grundy, budget_mb=budget_mb)
    path = cache_path(cache_dir, params, rule, grundy)
    if path.exists():
        try:
            return load_table(path, params, rule)
        except (TableFormatError, BuildingNimError) as e:
            log.warning("ignoring cached table %s: %s", path, e)
    table = solve(params, rule, grundy, budget_mb=budget_mb)
    path.parent.mkdir(parents=True, exist_ok=True)
    save_table(table, path)
    return table


# -- Nim stage --------------------------------------------------------------------


def nim_moves(heights: Sequence[int]) -> list[tuple[int, int, tuple]]:
    """Every Nim move as ``(stack index, tokens removed, canonical result)``."""
    out = []
    for i, h in enumerate(heights):
        for take in range(1, h + 1):
            rest = list(heights)
            rest[i] -= take
            out.append((i, take, tuple(sorted(rest, reverse=True))))
    return out


def nim_engine_move(heights: Sequence[int], rule: str = "normal") -> tuple[int, int]:
    """Perfect Nim play.

    Among winning moves, pick the lexicographically smallest canonical
    result; from a lost position take one token from the shortest non-empty
    stack.
    """
    moves = nim_moves(heights)
    if not moves:
        raise InvalidInput("no tokens left to take")
    lose = bouton_outcome if rule == "normal" else misere_terminal_outcome
    winning = [m for m in moves if lose(m[2]) is Outcome.P]
    if winning:
        i, take, _ = min(winning, key=lambda m: (m[2], m[0]))
        return i, take
    i = min((i for i, h in enumerate(heights) if h > 0), key=lambda i: (heights[i], -i))
    return i, 1


# -- output helpers ---------------------------------------------------------------


def _emit(out: TextIO, fmt: str, text: str, record: dict) -> None:
    if fmt == "json":
        out.write(json.dumps(record, ensure_ascii=False, sort_keys=True) + "\n")
    elif fmt == "csv":
        keys = list(record)
        out.write(",".join(keys) + "\n" + ",".join(str(record[k]) for k in keys) + "\n")
    else:
        out.write(text + "\n")


def _winner(outcome: Outcome, b: BuildingPosition) -> str:
    mover = "P1" if b.p1_to_move else "P2"
    other = "P2" if mover == "P1" else "P1"
    return mover if outcome is Outcome.N else other


def _params(args) -> GameParams:
    if args.tokens is None or args.stacks is None:
        raise InvalidInput("--tokens and --stacks are required")
    if args.tokens < 0 or args.stacks < 1:
        raise InvalidInput("--tokens must be >= 0 and --stacks >= 1")
    return GameParams(args.tokens, args.stacks)


def _table(args, params: GameParams, grundy: bool = False) -> SolveTable:
    return get_table(params, args.rule, grundy, args.cache_dir, args.budget_mb)


# -- subcommands ------------------------------------------------------------------


def cmd_outcome(args, out: TextIO) -> int:
    params = _params(args)
    t = _table(args, params)
    o = t.root_outcome()
    winner = _winner(o, params.root())
    _emit(out, args.format, f"{o}: {winner} wins",
          {"tokens": params.n_tokens, "stacks": params.n_stacks, "rule": args.rule, "outcome": str(o), "winner": winner})
    return EXIT_OK


def cmd_best_move(args, out: TextIO) -> int:
    text = args.position
    if ";" not in text:
        if args.remaining is None:
            raise InvalidInput("give the remaining count as 'h1,...;ξ=r' or with --remaining")
        b = BuildingPosition(parse_position(text), args.remaining)
    else:
        b = parse_building_position(text)
    if args.tokens is not None and b.n_tokens != args.tokens:
        raise InvalidInput(f"{b} has {b.n_tokens} tokens in total, not {args.tokens}")
    if args.stacks is not None and b.n_stacks != args.stacks:
        raise InvalidInput(f"{b} has {b.n_stacks} stacks, not {args.stacks}")
    t = _table(args, b.params)
    moves = t.best_moves(b)
    succ = [format_building_position(apply_move(b, m)) for m in moves]
    if args.format == "json":
        _emit(out, "json", "", {"position": format_building_position(b), "outcome": str(t.outcome_of(b)),
                                "moves": [m.target for m in moves], "successors": succ})
    elif args.format == "csv":
        out.write("target,successor\n" + "".join(f"{m.target},{s}\n" for m, s in zip(moves, succ)))
    elif succ:
        out.write("".join(f"→ {s}\n" for s in succ))
    else:
        out.write("no winning move\n")
    return EXIT_OK


def cmd_solve(args, out: TextIO) -> int:
    params = _params(args)
    t = solve(params, args.rule, args.grundy, budget_mb=args.budget_mb)
    if args.out:
        save_table(t, args.out)
    o = t.root_outcome()
    _emit(out, args.format, f"BN({params.n_tokens},{params.n_stacks}) {args.rule}: root {o}, {t.n_entries()} entries"
          + (f", written to {args.out}" if args.out else ""),
          {"tokens": params.n_tokens, "stacks": params.n_stacks, "rule": args.rule, "outcome": str(o),
           "entries": t.n_entries(), "grundy": bool(args.grundy), "path": args.out})
    return EXIT_OK


def cmd_grundy(args, out: TextIO) -> int:
    params = _params(args)
    if args.rule != "normal":
        raise InvalidInput("Grundy values are only computed for normal play")
    t = _table(args, params, grundy=True)
    rows = []
    for m in range(params.n_tokens, -1, -1):
        xi = params.n_tokens - m
        vals, counts = _hist(t.grundy[m])
        for v, c in zip(vals, counts):
            rows.append({"xi": xi, "grundy": v, "count": c})
    if args.format == "json":
        for r in rows:
            out.write(json.dumps(r, sort_keys=True) + "\n")
    elif args.format == "csv":
        out.write("xi,grundy,count\n" + "".join(f"{r['xi']},{r['grundy']},{r['count']}\n" for r in rows))
    else:
        out.write(f"Grundy histogram for BN({params.n_tokens},{params.n_stacks}) (ξ=0 uses the Nim-sum)\n")
        by_xi: dict[int, list] = {}
        for r in rows:
            by_xi.setdefault(r["xi"], []).append(f"{r['grundy']}:{r['count']}")
        for xi in sorted(by_xi):
            out.write(f"ξ={xi}: {' '.join(by_xi[xi])}\n")
        support = sorted({r["grundy"] for r in rows if r["xi"] >= 1})
        out.write(f"support for ξ>=1: {{{', '.join(map(str, support))}}}\n")
    return EXIT_OK


def _hist(arr):
    vals, counts = np.unique(arr, return_counts=True)
    return [int(v) for v in vals], [int(c) for c in counts]


def _parse_ranges(items: Sequence[str] | None) -> dict:
    ranges: dict = {}
    for item in items or ():
        key, sep, value = item.partition("=")
        if not sep:
            raise InvalidInput(f"--set expects key=value, got {item!r}")
        try:
            ranges[key.strip()] = json.loads(value)
        except json.JSONDecodeError:
            raise InvalidInput(f"cannot parse value in {item!r}; use JSON, e.g. max_tokens=20") from None
    return ranges


def _write_report(report, fmt: str, out: TextIO, timings: bool) -> None:
    if fmt == "json":
        out.write(report.to_json_lines(timings))
    else:
        out.write(report.to_text(timings))


def cmd_verify(args, out: TextIO) -> int:
    ranges = _parse_ranges(args.set)
    if args.extended:
        ranges["extended"] = True
    claims = CLAIMS if args.claim == "all" else (args.claim,)
    if args.claim == "all":
        stray = set(ranges) - set().union(*RANGE_KEYS.values()) - {"extended"}
        if stray:
            raise InvalidInput(f"no claim takes {', '.join(sorted(stray))}")
    worst = EXIT_OK
    for c in claims:
        sub = ranges if args.claim != "all" else {k: v for k, v in ranges.items() if k in RANGE_KEYS[c] | {"extended"}}
        report = verify(c, sub, args.budget_mb)
        _write_report(report, args.format, out, args.timings)
        worst = _worse(worst, report.exit_code)
    return worst


def _worse(a: int, b: int) -> int:
    rank = {EXIT_OK: 0, EXIT_SKIPPED: 1, EXIT_FINDING: 2, EXIT_FAIL: 3}
    return a if rank[a] >= rank[b] else b


def cmd_sweep(args, out: TextIO) -> int:
    stacks = args.sweep_stacks or [3, 5, 7]
    tokens = args.sweep_tokens or [62, 24, 20][: len(stacks)]
    if len(tokens) != len(stacks):
        raise InvalidInput("give one maximum token count per stack count")
    for l in stacks:
        if l % 2 == 0:
            raise InvalidInput(f"the sweep is over odd stack counts, got {l}")
    report, rows = sweep(dict(zip(stacks, tokens)), args.budget_mb)
    if args.csv_out:
        Path(args.csv_out).write_text(sweep_csv(rows))
    if args.format == "csv":
        out.write(sweep_csv(rows))
    else:
        _write_report(report, args.format, out, args.timings)
    return report.exit_code


def play_match(p1: Player, p2: Player, params: GameParams, rule: str = "normal") -> tuple[list, str]:
    """Scripted building, then perfect Nim on both sides; returns (line, winner)."""
    hist = [params.root()]
    while hist[-1].remaining:
        b = hist[-1]
        player = p1 if b.p1_to_move else p2
        hist.append(apply_move(b, player.next_move(hist)))
    end = hist[-1]
    terminal = bouton_outcome(end.heights) if rule == "normal" else misere_terminal_outcome(end.heights)
    return hist, _winner(terminal, end)


def cmd_simulate(args, out: TextIO) -> int:
    params = _params(args)
    if args.p1 == "exhaustive" and args.p2 == "exhaustive":
        raise InvalidInput("at most one side can be exhaustive")
    if "exhaustive" in (args.p1, args.p2):
        role = "P1" if args.p2 == "exhaustive" else "P2"
        sid = args.p1 if role == "P1" else args.p2
        res = certify(make_player(sid, params), role, params, args.rule)
        verdict = "pass" if res.ok else "fail"
        record = {"strategy": sid, "role": role, "tokens": params.n_tokens, "stacks": params.n_stacks,
                  "verdict": verdict, "nodes": res.nodes,
                  "counterexample": None if res.ok else " -> ".join(res.counterexample), "reason": res.reason}
        text = f"{sid} as {role} in BN({params.n_tokens},{params.n_stacks}): {verdict} ({res.nodes} nodes)"
        if not res.ok:
            text += f"\ncounterexample: {record['counterexample']}\nreason: {res.reason}"
        _emit(out, args.format, text, record)
        return EXIT_OK if res.ok else EXIT_FAIL
    table = None
    if "table" in (args.p1, args.p2):
        table = _table(args, params)
    line, winner = play_match(make_player(args.p1, params, table), make_player(args.p2, params, table), params, args.rule)
    record = {"p1": args.p1, "p2": args.p2, "tokens": params.n_tokens, "stacks": params.n_stacks,
              "final": format_position(line[-1].heights), "winner": winner}
    text = " -> ".join(format_position(b.heights) for b in line) + f"\nwinner: {winner} ({args.p1} vs {args.p2})"
    _emit(out, args.format, text, record)
    return EXIT_OK


# -- interactive play ---------------------------------------------------------------


class _Transcript:
    def __init__(self, out: TextIO, path: str | None):
        self.out = out
        self.file = open(path, "w", encoding="utf-8") if path else None

    def say(self, text: str) -> None:
        self.out.write(text + "\n")
        self.out.flush()
        if self.file:
            self.file.write(text + "\n")

    def close(self) -> None:
        if self.file:
            self.file.close()


def _ask(inp: TextIO, tr: _Transcript, prompt: str) -> str | None:
    tr.out.write(prompt)
    tr.out.flush()
    line = inp.readline()
    if not line:
        return None
    line = line.strip()
    if tr.file:
        tr.file.write(prompt + line + "\n")
    return line


def cmd_play(args, out: TextIO, inp: TextIO | None = None) -> int:
    inp = inp or sys.stdin
    params = _params(args)
    table = _table(args, params) if args.engine == "table" else None
    engine = make_player(args.engine, params, table)
    engine_role = "P2" if args.human == "P1" else "P1"
    if engine.role and engine.role != engine_role:
        raise InvalidInput(f"{args.engine} plays {engine.role}; choose --human {'P2' if engine.role == 'P1' else 'P1'}")
    tr = _Transcript(out, args.transcript)
    try:
        return _play_loop(params, engine, engine_role, args, inp, tr)
    finally:
        tr.close()


def _play_loop(params, engine: Player, engine_role: str, args, inp, tr: _Transcript) -> int:
    tr.say(f"BN({params.n_tokens},{params.n_stacks}), you are {args.human}, engine plays {args.engine}")
    hist = [params.root()]
    while hist[-1].remaining:
        b = hist[-1]
        mover = "P1" if b.p1_to_move else "P2"
        tr.say(f"building {format_building_position(b)}  ({mover} to place)")
        if mover == engine_role:
            try:
                move = engine.next_move(hist)
            except StrategyRefusal as e:
                tr.say(f"engine strategy stopped: {e}; switching to table play")
                engine = make_player("table", params, _table(args, params))
                move = engine.next_move(hist)
            nb = apply_move(b, move)
            tr.say(f"engine places on a stack of height {height_classes(b.heights)[move.target]} -> {format_position(nb.heights)}")
        else:
            nb = None
            while nb is None:
                line = _ask(inp, tr, f"stack to raise (1-{params.n_stacks}): ")
                if line is None:
                    tr.say("input closed, game aborted")
                    return EXIT_FAIL
                try:
                    i = int(line) - 1
                    if not 0 <= i < params.n_stacks:
                        raise ValueError
                except ValueError:
                    tr.say(f"enter a number from 1 to {params.n_stacks}")
                    continue
                nb = apply_move(b, class_of_height(b.heights, b.heights[i]))
        hist.append(nb)

    heights = list(hist[-1].heights)
    mover = "P1" if hist[-1].p1_to_move else "P2"
    tr.say(f"Nim starts from {format_position(heights)}, {mover} to move")
    while any(heights):
        if mover == engine_role:
            i, take = nim_engine_move(heights, args.rule)
            tr.say(f"engine takes {take} from stack {i + 1}")
        else:
            while True:
                line = _ask(inp, tr, "stack and count to remove: ")
                if line is None:
                    tr.say("input closed, game aborted")
                    return EXIT_FAIL
                parts = line.replace(",", " ").split()
                try:
                    i, take = int(parts[0]) - 1, int(parts[1])
                    if len(parts) != 2 or not 0 <= i < len(heights) or not 1 <= take <= heights[i]:
                        raise ValueError
                except (ValueError, IndexError):
                    tr.say("enter a stack number and a count between 1 and its height")
                    continue
                break
        heights[i] -= take
        tr.say(f"heights {format_position(heights)}")
        last = mover
        mover = "P2" if mover == "P1" else "P1"
    winner = last if args.rule == "normal" else mover
    tr.say(f"{winner} wins" + (" (you)" if winner == args.human else " (engine)"))
    return EXIT_OK


# -- parser -----------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    # exit code 2 is reserved for findings
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--tokens", type=int, help="total number of tokens")
    common.add_argument("--stacks", type=int, help="number of stacks")
    common.add_argument("--rule", choices=RULES, default="normal")
    common.add_argument("--format", choices=("text", "json", "csv"), default="text")
    common.add_argument("--cache-dir", default=os.environ.get(CACHE_ENV),
                        help=f"directory for cached tables (default: ${CACHE_ENV}, unset disables caching)")
    common.add_argument("--jobs", type=int, default=1, help="worker count (the solver currently runs on one)")
    common.add_argument("--budget-mb", type=float, default=DEFAULT_BUDGET_MB, help="memory budget per table")
    common.add_argument("-v", "--verbose", action="store_true")

    p = _Parser(prog="buildnim", description="Building Nim solver, strategies and checks.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sub.add_parser("outcome", parents=[common], help="outcome of the start position")

    bm = sub.add_parser("best-move", parents=[common], help="winning moves from a position")
    bm.add_argument("position", help='e.g. "1,0,0;ξ=1"')
    bm.add_argument("--remaining", type=int)

    pl = sub.add_parser("play", parents=[common], help="play against the engine in the terminal")
    pl.add_argument("--human", choices=("P1", "P2"), default="P1")
    pl.add_argument("--engine", choices=STRATEGY_IDS, default="table")
    pl.add_argument("--transcript", help="also write the session to this file")

    so = sub.add_parser("solve", parents=[common], help="solve and optionally save a tablebase")
    so.add_argument("--out", help="tablebase path")
    so.add_argument("--grundy", action="store_true")

    sub.add_parser("grundy", parents=[common], help="Grundy histogram per layer")

    ve = sub.add_parser("verify", parents=[common], help="run a claim check")
    ve.add_argument("claim", choices=CLAIMS + ("all",))
    ve.add_argument("--set", action="append", metavar="KEY=VALUE", help="override a range (JSON value)")
    ve.add_argument("--extended", action="store_true", help="include the large optional cells")
    ve.add_argument("--timings", action="store_true")

    sw = sub.add_parser("sweep", parents=[common], help="solve a grid of odd stack counts")
    sw.add_argument("--sweep-stacks", type=int, nargs="+", metavar="L")
    sw.add_argument("--sweep-tokens", type=int, nargs="+", metavar="MAX")
    sw.add_argument("--csv-out")
    sw.add_argument("--timings", action="store_true")

    si = sub.add_parser("simulate", parents=[common], help="scripted match or exhaustive certification")
    si.add_argument("--p1", required=True, choices=STRATEGY_IDS + ("lemma-2k2", "exhaustive"))
    si.add_argument("--p2", required=True, choices=STRATEGY_IDS + ("exhaustive",))
    return p


COMMANDS = {
    "outcome": cmd_outcome,
    "best-move": cmd_best_move,
    "play": cmd_play,
    "solve": cmd_solve,
    "grundy": cmd_grundy,
    "verify": cmd_verify,
    "sweep": cmd_sweep,
    "simulate": cmd_simulate,
}


def main(argv: Sequence[str] | None = None, out: TextIO | None = None, inp: TextIO | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    out = out or sys.stdout
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "play":
            return cmd_play(args, out, inp)
        return COMMANDS[args.command](args, out)
    except BudgetExceeded as e:
        sys.stderr.write(f"buildnim: {e} (estimate {e.estimate_bytes} bytes)\n")
        return EXIT_SKIPPED
    except (InvalidInput, StrategyRefusal) as e:
        sys.stderr.write(f"buildnim: {e}\n")
        return EXIT_USAGE
    except BuildingNimError as e:
        sys.stderr.write(f"buildnim: {e}\n")
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
