import pytest

from buildnim.exceptions import InvalidInput, StrategyRefusal
from buildnim.game import BuildingPosition, GameParams, Move, apply_move, parse_building_position
from buildnim.solver import cached_solve
from buildnim.strategies import (
    PowerOfTwoMinusTwoPlayer,
    P1CompositePlayer,
    high_move,
    largest_power_below,
    low_move,
    make_player,
    mirror_move,
    p1_composite_move,
    p2_endgame_move,
    plan_for,
    replay,
    strategy_I_move,
    strategy_II_move,
    table_player_move,
)


def line(n, *heights):
    """Building line with tokens counted from the heights."""
    out = []
    for h in heights:
        out.append(BuildingPosition(h, n - sum(h)))
    return out


def after(hist, move):
    return apply_move(hist[-1], move).heights


# strategy I: a P1 line reaching (3,1,1)
S1 = [(0, 0, 0), (1, 0, 0), (2, 0, 0), (3, 0, 0), (3, 1, 0), (3, 1, 1)]


def test_strategy_i_first_move():
    hist = line(8, (0, 0, 0))
    assert after(hist, strategy_I_move(hist)) == (1, 0, 0)


def test_strategy_i_adversary_on_tallest():
    hist = line(8, *S1, (4, 1, 1))
    assert after(hist, strategy_I_move(hist)) == (5, 1, 1)


def test_strategy_i_adversary_on_short_stack():
    hist = line(8, *S1, (3, 2, 1))
    assert after(hist, strategy_I_move(hist)) == (3, 2, 2)


def test_strategy_i_rejects_foreign_history():
    hist = line(8, (0, 0, 0), (1, 0, 0), (1, 1, 0), (2, 1, 0), (2, 1, 1))
    with pytest.raises(StrategyRefusal):
        strategy_I_move(hist)


def test_strategy_i_wrong_stack_count():
    with pytest.raises(StrategyRefusal):
        strategy_I_move(line(8, (0, 0, 0, 0)))


S2 = [(0, 0, 0), (1, 0, 0), (1, 1, 0), (1, 1, 1), (2, 1, 1), (2, 2, 1), (3, 2, 1)]


def test_strategy_ii_opening_reply():
    hist = line(8, (0, 0, 0), (1, 0, 0))
    assert after(hist, strategy_II_move(hist)) == (1, 1, 0)


@pytest.mark.parametrize("adversary", [(4, 2, 1), (3, 3, 1)])
def test_strategy_ii_restores_sum(adversary):
    hist = line(10, *S2, adversary)
    assert after(hist, strategy_II_move(hist)) == (4, 3, 1)


def test_strategy_ii_refuses_p1_turn():
    with pytest.raises(StrategyRefusal):
        strategy_II_move(line(8, (0, 0, 0)))


def test_mirror_examples():
    hist = line(4, (0, 0, 0, 0), (1, 0, 0, 0))
    assert after(hist, mirror_move(hist)) == (1, 1, 0, 0)
    hist = line(4, (0,) * 5, (1, 0, 0, 0, 0), (1, 1, 0, 0, 0), (2, 1, 0, 0, 0))
    assert after(hist, mirror_move(hist)) == (2, 2, 0, 0, 0)
    hist = line(8, (0, 0, 0, 0), (1, 0, 0, 0), (1, 1, 0, 0), (1, 1, 1, 0), (1, 1, 1, 1), (2, 1, 1, 1), (2, 2, 1, 1))
    for adv in [(3, 2, 1, 1), (2, 2, 2, 1)]:
        h = hist + [BuildingPosition(adv, 8 - sum(adv))]
        res = after(h, mirror_move(h))
        assert all(res.count(x) % 2 == 0 for x in res)


def test_mirror_refuses_unpaired():
    hist = line(4, (0,) * 3, (1, 0, 0), (1, 1, 0), (1, 1, 1))
    with pytest.raises(StrategyRefusal) as e:
        mirror_move(hist)
    assert e.value.case == "mirror-unpaired"


def test_p2_endgame_stacks_the_tallest():
    hist = line(6, (0,) * 5, (1, 0, 0, 0, 0), (1, 1, 0, 0, 0), (1, 1, 1, 0, 0))
    assert after(hist, p2_endgame_move(hist)) == (2, 1, 1, 0, 0)


def test_p2_endgame_range():
    with pytest.raises(StrategyRefusal):
        make_player("p2-endgame", GameParams(10, 5))
    with pytest.raises(StrategyRefusal):
        make_player("p2-endgame", GameParams(6, 3))


def test_high_low():
    b = BuildingPosition((4, 2, 2, 1, 1), 3)
    assert apply_move(b, high_move(b)).heights == (5, 2, 2, 1, 1)
    assert apply_move(b, low_move(b)).heights == (4, 2, 2, 2, 1)
    b = BuildingPosition((4, 4, 3, 1, 0), 3)
    assert apply_move(b, high_move(b, exclude_pair=4)).heights == (4, 4, 4, 1, 0)


def test_plans():
    assert plan_for(13) == {"case": "case-1", "pi": 8, "delta": 5, "use_table": False}
    assert plan_for(9) == {"case": "case-2", "p": 8, "use_table": True}
    assert plan_for(31) == {"case": "lemma-2k2", "K": 6, "use_table": False}
    assert plan_for(15)["K"] == 5
    assert plan_for(7)["use_table"]
    with pytest.raises(StrategyRefusal):
        plan_for(4)
    assert largest_power_below(9) == 8 and largest_power_below(8) == 4


def test_composite_preconditions():
    with pytest.raises(StrategyRefusal):
        P1CompositePlayer(GameParams(8, 5))
    with pytest.raises(StrategyRefusal):
        P1CompositePlayer(GameParams(21, 5))
    with pytest.raises(StrategyRefusal):
        PowerOfTwoMinusTwoPlayer(GameParams(28, 5))


def test_composite_function_form():
    params = GameParams(26, 5)
    hist = [params.root()]
    mv = p1_composite_move(hist, params=params)
    assert mv == Move(0)
    with pytest.raises(InvalidInput):
        p1_composite_move(hist, params=GameParams(24, 5))


def test_table_player():
    t = cached_solve(2, 3)
    assert apply_move(BuildingPosition((1, 0, 0), 1), table_player_move(t, BuildingPosition((1, 0, 0), 1))).heights == (1, 1, 0)
    assert table_player_move(cached_solve(6, 3), BuildingPosition((0, 0, 0), 6)) == Move(0)
    with pytest.raises(StrategyRefusal):
        table_player_move(t, BuildingPosition((1, 1, 0), 0))
    with pytest.raises(StrategyRefusal):
        table_player_move(None, BuildingPosition((1, 0, 0), 1))


def test_replay_detects_off_strategy_line():
    params = GameParams(8, 3)
    hist = line(8, (0, 0, 0), (1, 0, 0), (1, 1, 0), (2, 1, 0))
    with pytest.raises(StrategyRefusal) as e:
        replay(make_player("strategy-i", params), hist)
    assert e.value.case == "off-strategy-history"


def test_unknown_strategy():
    with pytest.raises(InvalidInput):
        make_player("nope", GameParams(4, 3))


def test_clone_is_independent():
    params = GameParams(26, 5)
    p = make_player("p1-composite", params)
    hist = [params.root()]
    p.next_move(hist)
    q = p.clone()
    assert q.state_key() == p.state_key()
    hist2 = hist + [parse_building_position("1,0,0,0,0;25"), parse_building_position("2,0,0,0,0;24")]
    q.next_move(hist2)
    assert q.state_key() != p.state_key()
