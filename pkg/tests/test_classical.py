"""Vertex counting and the one-bit payoff bound for both games."""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from minehunt import classical, games

DMH_SAFE = [
    (0, 3, 0, 3),
    (1, 1, 1, 2),
    (1, 1, 1, 3),
    (1, 3, 1, 3),
    (2, 1, 1, 2),
]
DMH_PRIME_SAFE = [
    (0, 2, 0, 2),
    (0, 3, 0, 3),
    (1, 1, 1, 2),
    (1, 1, 1, 3),
    (1, 2, 1, 2),
    (1, 3, 1, 3),
    (2, 1, 1, 2),
    (2, 2, 0, 2),
    (2, 2, 1, 2),
]


def test_stirling_known_values():
    assert classical.stirling2(0, 0) == 1
    assert classical.stirling2(4, 2) == 7
    assert classical.stirling2(4, 4) == 1
    assert classical.stirling2(5, 3) == 25
    assert classical.stirling2(3, 0) == 0


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 9), st.integers(0, 9))
def test_stirling_formula_matches_recurrence(n, k):
    assert classical.stirling2(n, k) == classical.stirling2_recurrence(n, k)


def test_vertex_count_known_values():
    assert classical.vertex_count(1, 2, 2) == 4
    assert classical.vertex_count(1, 4, 4) == 88
    assert classical.vertex_count(2, 4, 4) == 256


def test_vertex_count_matches_enumeration_on_a_grid():
    for n in (1, 2):
        for m_card in (2, 3, 4):
            for z_card in (2, 3, 4):
                verts = classical.enumerate_vertices(n, m_card, z_card)
                assert len(verts) == len(set(verts))
                assert classical.vertex_count(n, m_card, z_card) == len(verts)


def test_enumerated_vertices_are_valid_assignments():
    for guesses in classical.enumerate_vertices(1, 4, 4):
        assert len(guesses) == 4
        assert all(0 <= z < 4 for z in guesses)
        # one channel bit means at most two distinct receiver guesses
        assert len(set(guesses)) <= 2


def test_dmh_one_bit_bound():
    report = classical.verify_classical_bound(games.dmh_game())
    assert report.bits == 1
    assert report.count_formula == 88
    assert report.count_enumerated == 88
    assert list(report.safe_assignments) == DMH_SAFE
    assert all(p == 0 for p in report.safe_payoffs)
    assert report.max_payoff == 0


def test_dmh_prime_one_bit_bound():
    report = classical.verify_classical_bound(games.dmh_prime_game())
    assert report.count_formula == 88
    assert list(report.safe_assignments) == DMH_PRIME_SAFE
    assert report.max_payoff == 0
    assert min(report.safe_payoffs) == Fraction(-1, 4)


def test_two_bits_beat_the_bound():
    report = classical.verify_classical_bound(games.dmh_game(), n=2)
    assert report.count_formula == 256
    assert report.count_enumerated == 256
    assert report.max_payoff == Fraction(1, 4)


def test_two_bit_optimum_is_a_safe_identity_like_strategy():
    report = classical.verify_classical_bound(games.dmh_game(), n=2)
    best = [a for a, p in zip(report.safe_assignments, report.safe_payoffs)
            if p == report.max_payoff]
    # the winning strategies read the full message and guess the paying cell
    assert (2, 1, 0, 2) in best or (2, 1, 0, 3) in best


def test_bits_out_of_range():
    with pytest.raises(ValueError):
        classical.verify_classical_bound(games.dmh_game(), n=0)
    with pytest.raises(ValueError):
        classical.verify_classical_bound(games.dmh_game(), n=5)
