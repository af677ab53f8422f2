import itertools
from collections import Counter

import pytest
from hypothesis import given, strategies as st

from buildnim.exceptions import InvalidInput
from buildnim.game import (
    BuildingPosition,
    GameParams,
    MAX_TOKENS,
    Move,
    apply_move,
    canonicalize,
    class_of_height,
    format_building_position,
    height_classes,
    iter_layer,
    layer_size,
    legal_moves,
    moved_height,
    parse_building_position,
    parse_position,
    partition_rank,
    partition_unrank,
)


def brute_layer(l, m):
    return sorted({tuple(sorted(c, reverse=True)) for c in itertools.product(range(m + 1), repeat=l) if sum(c) == m}, reverse=True)


@pytest.mark.parametrize(
    "raw, expected",
    [((1, 3, 2), (3, 2, 1)), ((0,) * 5, (0,) * 5), ((2, 2, 10, 8, 7), (10, 8, 7, 2, 2))],
)
def test_canonicalize(raw, expected):
    assert canonicalize(raw) == expected
    assert canonicalize(canonicalize(raw)) == expected


def test_canonicalize_wrong_length():
    with pytest.raises(InvalidInput):
        canonicalize((1, 2), n_stacks=3)


@given(st.lists(st.integers(min_value=0, max_value=50), min_size=1, max_size=7), st.randoms())
def test_canonicalize_permutation_invariant(v, rnd):
    w = list(v)
    rnd.shuffle(w)
    assert canonicalize(w) == canonicalize(v)


def test_params_validation():
    with pytest.raises(InvalidInput):
        GameParams(4, 0)
    with pytest.raises(InvalidInput):
        GameParams(-1, 3)
    with pytest.raises(InvalidInput):
        GameParams(MAX_TOKENS + 1, 3)
    assert GameParams(6, 3).root() == BuildingPosition((0, 0, 0), 6)


def test_position_validation_and_properties():
    with pytest.raises(InvalidInput):
        BuildingPosition((1, 2), 1)
    with pytest.raises(InvalidInput):
        BuildingPosition((2, 1), -1)
    b = BuildingPosition((5, 3, 2, 1), 4)
    assert (b.placed, b.n_tokens, b.n_stacks) == (11, 15, 4)
    assert not b.p1_to_move
    assert str(b) == "5,3,2,1;ξ=4"


def test_legal_moves_examples():
    succ = [nb for _, nb in legal_moves(BuildingPosition((1, 1, 0), 2))]
    assert succ == [BuildingPosition((2, 1, 0), 1), BuildingPosition((1, 1, 1), 1)]
    assert [nb.heights for _, nb in legal_moves(BuildingPosition((0,) * 5, 10))] == [(1, 0, 0, 0, 0)]
    assert len(legal_moves(BuildingPosition((5, 3, 2, 1), 1))) == 4


def test_legal_moves_at_nim_stage():
    with pytest.raises(InvalidInput):
        legal_moves(BuildingPosition((1, 1), 0))
    with pytest.raises(InvalidInput):
        apply_move(BuildingPosition((1, 1), 0), Move(0))


def test_apply_move_bad_target():
    with pytest.raises(InvalidInput):
        apply_move(BuildingPosition((1, 1, 0), 2), Move(2))


@pytest.mark.parametrize("l", [3, 4, 5])
def test_merged_moves_match_all_stack_choices(l):
    # token conservation, and the merged move set equals the full per-stack set
    for m in range(9):
        for h in iter_layer(l, m):
            b = BuildingPosition(h, 3)
            merged = {nb.heights for _, nb in legal_moves(b)}
            full = {canonicalize(h[:i] + (h[i] + 1,) + h[i + 1 :]) for i in range(l)}
            assert merged == full
            assert len(merged) == len(set(h)) <= l
            for _, nb in legal_moves(b):
                assert nb.placed + nb.remaining == b.n_tokens


def test_height_classes_and_class_of_height():
    h = (4, 2, 2, 1, 1)
    assert height_classes(h) == [4, 2, 1]
    assert class_of_height(h, 1) == Move(2)
    with pytest.raises(InvalidInput):
        class_of_height(h, 3)
    assert moved_height((4, 2, 2, 1, 1), (4, 2, 2, 2, 1)) == 1
    with pytest.raises(InvalidInput):
        moved_height((4, 2), (6, 2))


@pytest.mark.parametrize("l, m, expected", [(3, 3, 3), (5, 0, 1), (5, 4, 5), (3, 4, 4), (6, 6, 11), (10, 10, 42)])
def test_layer_size(l, m, expected):
    assert layer_size(l, m) == expected


def test_layer_size_matches_brute_force():
    for l in range(1, 6):
        for m in range(13):
            assert layer_size(l, m) == len(brute_layer(l, m))


@pytest.mark.parametrize(
    "h, rank",
    [((3, 0, 0), 0), ((2, 1, 0), 1), ((1, 1, 1), 2), ((0,) * 5, 0), ((2, 2, 0), 2), ((4, 0, 0), 0), ((2, 1, 1), 3)],
)
def test_partition_rank_examples(h, rank):
    assert partition_rank(h) == rank


@pytest.mark.parametrize("args, expected", [((3, 3, 2), (1, 1, 1)), ((5, 0, 0), (0,) * 5), ((3, 4, 1), (3, 1, 0))])
def test_partition_unrank_examples(args, expected):
    assert partition_unrank(*args) == expected


def test_rank_errors():
    with pytest.raises(InvalidInput):
        partition_rank((1, 2, 0))
    with pytest.raises(InvalidInput):
        partition_unrank(3, 3, 3)
    with pytest.raises(InvalidInput):
        partition_unrank(3, 3, -1)


def test_iter_layer_is_descending_lex_order():
    for l in range(1, 6):
        for m in range(12):
            assert list(iter_layer(l, m)) == brute_layer(l, m)


def test_rank_unrank_bijection():
    for l in range(1, 8):
        for m in range(41):
            size = layer_size(l, m)
            seen = Counter()
            for r, h in enumerate(iter_layer(l, m)):
                assert partition_rank(h) == r
                assert partition_unrank(l, m, r) == h
                seen[h] += 1
            assert len(seen) == size and max(seen.values()) == 1


@pytest.mark.parametrize(
    "text, expected",
    [
        ("5,3,2,1;ξ=4", BuildingPosition((5, 3, 2, 1), 4)),
        ("1,3,2; xi=2", BuildingPosition((3, 2, 1), 2)),
        ("0,0,0;6", BuildingPosition((0, 0, 0), 6)),
        (" 1, 0 ;r=1", BuildingPosition((1, 0), 1)),
    ],
)
def test_parse_building_position(text, expected):
    assert parse_building_position(text) == expected


@pytest.mark.parametrize("text", ["1,,0;1", "a,b;2", "1,0", "1,0;x=2", "-1,0;1"])
def test_parse_errors(text):
    with pytest.raises(InvalidInput):
        parse_building_position(text)


def test_format_round_trip():
    b = BuildingPosition((4, 4, 1, 0, 0), 7)
    assert parse_building_position(format_building_position(b)) == b
    assert parse_position("2,5,1") == (5, 2, 1)
