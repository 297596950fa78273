"""Wiring encoding, composition, signatures, and the certified sweep."""

import json
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from minehunt import boxes, games, wirings


def test_total_count():
    assert wirings.TOTAL_WIRINGS == 4_194_304


@settings(max_examples=200, deadline=None)
@given(st.integers(0, wirings.TOTAL_WIRINGS - 1))
def test_id_round_trip(wid):
    w = wirings.wiring_from_id(wid)
    assert wirings.wiring_id(w) == wid


def test_reference_wiring_layout():
    w = wirings.theorem2_wiring()
    assert wirings.wiring_id(w) == 3746906
    assert w.x_choice == (0, 1, 0, 1)
    assert w.y_choice == (0, 1)
    assert w.guess == (0, 1, 2, 3)
    assert wirings.theorem6_wiring() == w


def test_reference_wiring_support_table():
    expected = (
        ((8,), (12,), (1,), (5,)),
        ((10,), (14,), (3,), (7,)),
        ((0, 8), (4, 12), (), ()),
        ((), (), (3, 11), (7, 15)),
    )
    assert wirings.support(wirings.theorem2_wiring()) == expected


def test_forced_zeros_per_game():
    w = wirings.theorem2_wiring()
    assert wirings.forced_zeros(w, games.dmh_game()) == (3, 5, 10)
    assert wirings.forced_zeros(w, games.dmh_prime_game()) == (5, 10)


def test_compose_pr_box():
    w = wirings.theorem2_wiring()
    s = wirings.compose(w, boxes.pr_box())
    half = Fraction(1, 2)
    assert s.rows == (
        (0, half, half, 0),
        (0, half, 0, half),
        (half, half, 0, 0),
        (0, 0, half, half),
    )
    assert games.payoff(games.dmh_game(), s) == Fraction(1, 8)
    assert games.payoff(games.dmh_prime_game(), s) == Fraction(1, 8)


def test_compose_matches_support_sums():
    rng = np.random.default_rng(11)
    w = wirings.theorem2_wiring()
    table = wirings.support(w)
    for _ in range(20):
        box = boxes.random_hardy_box(rng)
        s = wirings.compose(w, box)
        for m in range(4):
            for z in range(4):
                assert s.rows[m][z] == sum(box.entries[i] for i in table[m][z])


def test_hardy_payoff_identity():
    rng = np.random.default_rng(12)
    w = wirings.theorem2_wiring()
    g = games.dmh_game()
    for _ in range(50):
        box = boxes.random_hardy_box(rng)
        assert games.payoff(g, wirings.compose(w, box)) == box.entries[0] / 4


def test_cabello_payoff_identity():
    rng = np.random.default_rng(13)
    w = wirings.theorem6_wiring()
    g = games.dmh_prime_game()
    for _ in range(50):
        box = boxes.random_cabello_box(rng)
        expected = (box.entries[0] - box.entries[3]) / 4
        assert games.payoff(g, wirings.compose(w, box)) == expected


@settings(max_examples=150, deadline=None)
@given(st.integers(0, wirings.TOTAL_WIRINGS - 1), st.sampled_from(["dmh", "dmh-prime"]))
def test_vectorized_signature_matches_direct(wid, game_name):
    game = games.game_by_name(game_name)
    w = wirings.wiring_from_id(wid)
    direct = wirings.signature_of(w, game)
    tables = wirings._game_tables(game)
    batch = wirings._signatures(np.array([wid], dtype=np.int64), *tables)
    assert int(batch[0]) == direct


def test_unpack_signature_round_trip():
    w = wirings.theorem2_wiring()
    g = games.dmh_game()
    sig = wirings.signature_of(w, g)
    zeros, coeffs = wirings.unpack_signature(sig)
    assert zeros == wirings.forced_zeros(w, g)
    assert coeffs == wirings.payoff_coefficients(w, g)


def test_analysis_categories():
    g = games.dmh_game()
    a = wirings.analyze_wiring(wirings.wiring_from_id(0), g)
    assert a.category == "bomb-unavoidable"
    assert a.max_payoff is None
    a = wirings.analyze_wiring(wirings.wiring_from_id(3746816), g)
    assert a.category == "nonpositive"
    assert a.max_payoff == 0
    a = wirings.analyze_wiring(wirings.theorem2_wiring(), g)
    assert a.category == "positive"
    assert a.max_payoff == Fraction(1, 8)
    assert a.zeros == (3, 5, 10)
    assert a.relabelling is not None
    assert a.pinned_max <= 0


def test_positive_wiring_witness_attains_the_maximum():
    g = games.dmh_game()
    a = wirings.analyze_wiring(wirings.theorem2_wiring(), g)
    witness = boxes.NSBox(a.witness)
    assert boxes.validate_ns(witness)
    s = wirings.compose(wirings.theorem2_wiring(), witness)
    assert games.payoff(g, s) == a.max_payoff


def test_sweep_shard_around_the_reference_wiring(tmp_path):
    records = tmp_path / "records.jsonl"
    rep = wirings.verify_theorem3(
        games.dmh_game(), id_range=(3746816, 3747072), records_path=str(records)
    )
    assert rep.total == 256
    assert rep.bomb_unavoidable == 16
    assert rep.nonpositive == 208
    assert rep.positive == 32
    assert rep.unique_signatures == 120
    assert rep.positive_signatures == 16
    assert rep.max_payoff == Fraction(1, 8)
    assert rep.counterexamples == []
    lines = [json.loads(line) for line in records.read_text().splitlines()]
    assert len(lines) == 32
    ids = {r["id"] for r in lines}
    assert 3746906 in ids
    for r in lines[:5]:
        w = wirings.wiring_from_id(r["id"])
        assert list(wirings.forced_zeros(w, games.dmh_game())) == r["zeros"]
        assert Fraction(r["max_payoff"]) > 0
        assert Fraction(r["pinned_max"]) <= 0
        assert set(r["relabelling"]) == {"flip_x", "flip_y", "add_a", "add_b"}


def test_sweep_shards_merge_to_the_whole():
    g = games.dmh_game()
    lo = wirings.verify_theorem3(g, id_range=(0, 1 << 15))
    hi = wirings.verify_theorem3(g, id_range=(1 << 15, 1 << 16))
    both = wirings.verify_theorem3(g, id_range=(0, 1 << 16))
    assert lo.total + hi.total == both.total
    assert lo.bomb_unavoidable + hi.bomb_unavoidable == both.bomb_unavoidable
    assert lo.nonpositive + hi.nonpositive == both.nonpositive
    assert lo.positive + hi.positive == both.positive


def test_sweep_worker_count_does_not_change_results():
    g = games.dmh_game()
    one = wirings.verify_theorem3(g, id_range=(3746816, 3747072), workers=1)
    two = wirings.verify_theorem3(g, id_range=(3746816, 3747072), workers=2)
    assert one.to_json()["positive"] == two.to_json()["positive"]
    assert one.max_payoff == two.max_payoff
    assert one.counterexamples == two.counterexamples


def test_full_variant_game_sweep():
    rep = wirings.verify_theorem3(games.dmh_prime_game())
    assert rep.total == wirings.TOTAL_WIRINGS
    assert rep.bomb_unavoidable == 2_814_544
    assert rep.nonpositive == 1_378_736
    assert rep.positive == 1_024
    assert rep.unique_signatures == 535_374
    assert rep.positive_signatures == 256
    assert rep.max_payoff == Fraction(1, 8)
    assert rep.counterexamples == []


def test_invalid_range_rejected():
    with pytest.raises(ValueError):
        wirings.verify_theorem3(games.dmh_game(), id_range=(10, 5))
    with pytest.raises(ValueError):
        wirings.verify_theorem3(games.dmh_game(), id_range=(0, wirings.TOTAL_WIRINGS + 1))


def test_wiring_validation():
    with pytest.raises(ValueError):
        wirings.Wiring((0, 1, 0), (0,) * 8, (0, 1), (0, 1, 2, 3))
    with pytest.raises(ValueError):
        wirings.Wiring((0, 1, 0, 2), (0,) * 8, (0, 1), (0, 1, 2, 3))
    with pytest.raises(ValueError):
        wirings.wiring_from_id(-1)
    with pytest.raises(ValueError):
        wirings.wiring_from_id(wirings.TOTAL_WIRINGS)
