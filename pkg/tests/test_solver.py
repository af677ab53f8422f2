import io

import numpy as np
import pytest

from buildnim.exceptions import BudgetExceeded, InvalidInput, MissingGrundy, ParamsMismatch, TableFormatError
from buildnim.game import BuildingPosition, GameParams, Move, iter_layer
from buildnim.nim import Outcome, nim_sum
from buildnim.solver import audit_table, cached_solve, estimate_bytes, misere_terminal_outcome, solve
from buildnim.tablebase import dumps_table, load_table, loads_table, save_table, tables_equal
from buildnim.verification import naive_outcome

B = BuildingPosition


@pytest.mark.parametrize("n, l, expected", [(6, 3, Outcome.P), (10, 5, Outcome.N), (8, 5, Outcome.P), (4, 3, Outcome.N)])
def test_root_examples(n, l, expected):
    assert solve(GameParams(n, l)).root_outcome() is expected


def test_lemma_cases_roots():
    for n in range(5, 13):
        assert cached_solve(2 * n, 5).root_outcome() is Outcome.N


def test_outcome_of_examples():
    t = cached_solve(7, 5)
    assert cached_solve(2, 3).outcome_of(B((1, 1, 0), 0)) is Outcome.P
    assert cached_solve(1, 3).outcome_of(B((1, 0, 0), 0)) is Outcome.N
    pos = B((1, 1, 1, 1, 0), 3)
    assert t.outcome_of(pos) is naive_outcome(pos.heights, pos.remaining)


def test_outcome_of_param_mismatch():
    t = cached_solve(6, 3)
    with pytest.raises(ParamsMismatch):
        t.outcome_of(B((1, 0, 0, 0), 5))
    with pytest.raises(ParamsMismatch):
        t.outcome_of(B((1, 0, 0), 7))


def test_grundy_examples():
    t = cached_solve(2, 5, want_grundy=True)
    assert t.grundy_of(B((1, 1, 0, 0, 0), 0)) == 0
    t = cached_solve(11, 5, want_grundy=True)
    assert t.grundy_of(B((5, 3, 2, 1, 0), 0)) == 5
    with pytest.raises(MissingGrundy):
        cached_solve(6, 3).grundy_of(B((0, 0, 0), 6))


def test_grundy_bounded_and_consistent():
    for n in range(10, 21, 2):
        t = cached_solve(n, 5, want_grundy=True)
        for m in range(n + 1):
            assert np.array_equal(t.grundy[m] != 0, t.outcomes[m])
            if m < n:
                assert int(t.grundy[m].max()) <= 2


def test_best_moves_examples():
    assert cached_solve(2, 3).best_moves(B((1, 0, 0), 1)) == [Move(1)]
    assert cached_solve(6, 3).best_moves(B((0, 0, 0), 6)) == []
    assert cached_solve(10, 5).best_moves(B((0,) * 5, 10))
    with pytest.raises(InvalidInput):
        cached_solve(2, 3).best_moves(B((1, 1, 0), 0))


def test_best_moves_empty_iff_p():
    t = cached_solve(12, 5)
    for b, is_n, _ in t.entries():
        if b.remaining:
            assert bool(t.best_moves(b)) == is_n


@pytest.mark.parametrize("h, expected", [((2, 2, 0), Outcome.P), ((1, 1, 1), Outcome.P), ((1, 1, 0), Outcome.N), ((0, 0), Outcome.N), ((3, 1), Outcome.N)])
def test_misere_terminal(h, expected):
    assert misere_terminal_outcome(h) is expected


def _misere_brute(h):
    h = tuple(sorted(h, reverse=True))
    if not any(h):
        return Outcome.N  # the player facing an empty board wins
    for i, x in enumerate(h):
        for k in range(1, x + 1):
            nxt = h[:i] + (x - k,) + h[i + 1 :]
            if _misere_brute(nxt) is Outcome.P:
                return Outcome.N
    return Outcome.P


def test_misere_terminal_matches_game_tree():
    for l in (1, 2, 3):
        for m in range(8):
            for h in iter_layer(l, m):
                assert misere_terminal_outcome(h) is _misere_brute(h)


def test_audit_clean():
    assert audit_table(cached_solve(14, 5, want_grundy=True)) == []
    assert audit_table(cached_solve(10, 4, "misere")) == []


def test_audit_detects_tampering():
    t = solve(GameParams(8, 3))
    t.outcomes[3] = t.outcomes[3].copy()
    t.outcomes[3][0] = not t.outcomes[3][0]
    assert audit_table(t)


def test_refusals():
    with pytest.raises(InvalidInput):
        solve(GameParams(6, 3), "misere", want_grundy=True)
    with pytest.raises(InvalidInput):
        solve(GameParams(6, 3), "other")
    with pytest.raises(InvalidInput):
        solve(GameParams(300, 2), want_grundy=True)
    with pytest.raises(BudgetExceeded) as e:
        solve(GameParams(126, 5), budget_mb=1)
    assert e.value.estimate_bytes == estimate_bytes(GameParams(126, 5), False)


def test_retain_root_only():
    t = solve(GameParams(20, 5), retain="root")
    assert t.outcomes[0] is not None and all(x is None for x in t.outcomes[1:])
    assert t.root_outcome() is Outcome.N
    with pytest.raises(InvalidInput):
        t.outcome_of(B((1, 0, 0, 0, 0), 19))


def test_deterministic():
    a = solve(GameParams(20, 5), want_grundy=True)
    b = solve(GameParams(20, 5), want_grundy=True)
    assert tables_equal(a, b)
    assert a.metadata["grundy_boundary"] == "nim-sum"


def test_terminal_layer_is_bouton():
    t = cached_solve(16, 5, want_grundy=True)
    for r, h in enumerate(iter_layer(5, 16)):
        assert bool(t.outcomes[16][r]) == (nim_sum(h) != 0)
        assert int(t.grundy[16][r]) == nim_sum(h)


# -- tablebase -----------------------------------------------------------------------


@pytest.mark.parametrize("grundy", [False, True])
def test_round_trip(tmp_path, grundy):
    t = solve(GameParams(10, 5), want_grundy=grundy)
    path = tmp_path / "bn.bntb"
    save_table(t, path)
    u = load_table(path, GameParams(10, 5), "normal")
    assert tables_equal(t, u)
    assert not (tmp_path / "bn.bntb.tmp").exists()


def test_round_trip_stream():
    t = solve(GameParams(9, 4), "misere")
    buf = io.BytesIO()
    save_table(t, buf)
    buf.seek(0)
    u = load_table(buf)
    assert u.rule == "misere" and tables_equal(t, u)


def test_corruption_detected():
    data = bytearray(dumps_table(solve(GameParams(10, 5))))
    data[20] ^= 0x01
    with pytest.raises(TableFormatError, match="checksum"):
        loads_table(bytes(data))


def test_truncation_detected():
    data = dumps_table(solve(GameParams(10, 5)))
    with pytest.raises(TableFormatError):
        loads_table(data[:-9])
    with pytest.raises(TableFormatError):
        loads_table(data[:6])


def test_bad_magic_and_version():
    data = bytearray(dumps_table(solve(GameParams(4, 3))))
    bad = bytes(b"XXXX" + data[4:])
    with pytest.raises(TableFormatError, match="magic"):
        loads_table(bad)
    data[4] = 9
    with pytest.raises(TableFormatError, match="version"):
        loads_table(bytes(data))


def test_params_mismatch_on_load():
    data = dumps_table(solve(GameParams(10, 5)))
    with pytest.raises(ParamsMismatch):
        loads_table(data, expected=GameParams(10, 3))
    with pytest.raises(ParamsMismatch):
        loads_table(data, rule="misere")


def test_partial_table_cannot_be_saved():
    with pytest.raises(ValueError):
        dumps_table(solve(GameParams(6, 3), retain="root"))
