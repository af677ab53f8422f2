import csv
import io
import json

import pytest

from buildnim.exceptions import InvalidInput
from buildnim.game import GameParams
from buildnim.nim import Outcome
from buildnim.strategies import HighPlayer, make_player
from buildnim.verification import (
    CLAIMS,
    EXIT_CODES,
    Report,
    certify,
    exhaustive_strategy_check,
    naive_outcome,
    oracle_equivalence,
    sweep,
    sweep_csv,
    verify,
)


def test_report_verdict_precedence():
    r = Report("x", "g")
    assert r.verdict == "pass" and r.exit_code == 0
    r.add("a", True)
    r.add("b", "skipped")
    assert r.verdict == "skipped" and r.exit_code == 3
    r.add("c", "finding", "line")
    assert r.exit_code == 2
    r.add("d", False, "cex")
    assert r.verdict == "fail" and r.exit_code == 1
    assert set(EXIT_CODES) == {"pass", "fail", "finding", "skipped"}


def test_report_serialisation_is_stable():
    r = Report("x", "g")
    r.add("a", True, millis=12)
    r.add("b", False, "1,0;ξ=0", millis=7)
    rows = [json.loads(line) for line in r.to_json_lines().splitlines()]
    assert rows[1] == {"claim": "x", "cell": "b", "verdict": "fail", "counterexample": "1,0;ξ=0"}
    assert "millis" in json.loads(r.to_json_lines(timings=True).splitlines()[0])
    text = r.to_text()
    assert "verdict: fail" in text and "b: fail counterexample=1,0;ξ=0" in text


@pytest.mark.parametrize(
    "sid, role, n, ok",
    [("strategy-i", "P1", 4, True), ("strategy-i", "P1", 6, False), ("strategy-ii", "P2", 6, True)],
)
def test_exhaustive_check_examples(sid, role, n, ok):
    rep = exhaustive_strategy_check(sid, role, GameParams(n, 3))
    assert rep.passed is ok
    if not ok:
        cex = rep.cells[0].counterexample
        assert cex.startswith("0,0,0;ξ=6") and "adversary wins" in cex


def test_refusal_mid_line_is_a_failure():
    rep = exhaustive_strategy_check("mirror", "P2", GameParams(4, 3))
    assert not rep.passed
    assert "mirror-unpaired" in rep.cells[0].counterexample


def test_refusal_at_construction_is_a_failure():
    rep = exhaustive_strategy_check("p2-endgame", "P2", GameParams(12, 5))
    assert not rep.passed


def test_certify_node_count_is_stable():
    p = GameParams(12, 5)
    a = certify(make_player("p1-composite", p), "P1", p)
    b = certify(make_player("p1-composite", p), "P1", p)
    assert a.ok and a.nodes == b.nodes


def test_high_player_loses_somewhere():
    p = GameParams(10, 5)
    assert not certify(HighPlayer(p), "P1", p).ok


def test_naive_oracle():
    assert naive_outcome((0, 0, 0), 6) is Outcome.P
    assert naive_outcome((0, 0, 0), 4) is Outcome.N
    assert naive_outcome((1, 1, 0), 0, "misere") is Outcome.N


def test_oracle_equivalence_small():
    assert oracle_equivalence(6, 4).passed
    assert oracle_equivalence(6, 3, "misere").passed


def test_unknown_claim():
    with pytest.raises(InvalidInput):
        verify("thm9")


def test_every_claim_has_a_procedure():
    assert len(CLAIMS) == 15
    small = {
        "thm1-bouton-consistency": {"max_tokens": 6, "max_stacks": 4},
        "thm2-easy-cases": {"max_tokens": 8, "max_stacks": 4},
        "lemma1-strategies": {"max_tokens": 8},
        "lemma2-ns-facts": {"ns_bits": 5},
        "thm3-three-stacks": {"max_tokens": 14},
        "thm4-small-n": {"cells": [[5, 6], [7, 8]]},
        "lemma-ds8": {"max_height": 6},
        "thm5-five-stacks": {"max_n": 7, "max_n_strategy": 6},
        "grundy-range": {"max_tokens": 12},
        "grundy-parity": {"max_tokens": 12},
        "misere-equivalence": {"max_tokens": 8},
        "conjecture1-sweep": {"grid": {5: 12}},
    }
    for claim in CLAIMS:
        if claim == "lemma-2k2":
            continue  # covered by the acceptance suite
        rep = verify(claim, small.get(claim))
        assert rep.claim == claim
        assert rep.verdict == "pass", rep.to_text()


def test_verify_is_reproducible():
    a = verify("thm3-three-stacks", {"max_tokens": 30})
    b = verify("thm3-three-stacks", {"max_tokens": 30})
    assert a.to_json_lines() == b.to_json_lines()


def test_budget_skip_is_marked():
    rep = verify("lemma-special-cases", budget_mb=0.001)
    assert rep.verdict == "skipped" and rep.exit_code == 3
    assert all(c.verdict == "skipped" for c in rep.cells)


def test_sweep_csv_and_three_stack_column():
    rep, rows = sweep({3: 14, 5: 12})
    assert rep.passed
    table = list(csv.DictReader(io.StringIO(sweep_csv(rows))))
    assert list(table[0]) == ["stacks", "tokens", "outcome", "solve_seconds", "table_entries"]
    p_cells = {int(r["tokens"]) for r in table if r["stacks"] == "3" and r["outcome"] == "P"}
    assert p_cells == {2, 6, 14}


def test_sweep_marks_findings(monkeypatch):
    import buildnim.verification as v

    class Fake:
        def root_outcome(self):
            return Outcome.P

    monkeypatch.setattr(v, "solve", lambda *a, **k: Fake())
    rep, _ = sweep({5: 10})
    assert rep.verdict == "finding" and rep.exit_code == 2
    assert [c.cell for c in rep.cells if c.verdict == "finding"] == ["BN(10,5)"]


def test_unknown_override_key_rejected():
    with pytest.raises(InvalidInput, match="accepted: max_tokens, min_tokens, stacks"):
        verify("grundy-range", {"tokens": 30})
    assert verify("corollary1", {"extended": True}).verdict == "pass"
