"""Game matrices, strategy matrices, and the strict bomb rule."""

from fractions import Fraction

import pytest

from minehunt import games


def test_dmh_matrix_layout():
    g = games.dmh_game()
    assert g.name == "dmh"
    assert g.prior == (Fraction(1, 4),) * 4
    assert g.payoffs[0] == (-1, 0, 0, games.NEG_INF)
    assert g.payoffs[1] == (games.NEG_INF, 0, games.NEG_INF, 0)
    assert g.payoffs[2] == (1, 0, games.NEG_INF, games.NEG_INF)
    assert g.payoffs[3] == (games.NEG_INF, games.NEG_INF, 0, 0)
    assert set(g.bombs()) == {(0, 3), (1, 0), (1, 2), (2, 2), (2, 3), (3, 0), (3, 1)}


def test_dmh_prime_differs_only_in_the_second_row():
    g = games.dmh_game()
    gp = games.dmh_prime_game()
    assert gp.name == "dmh-prime"
    assert gp.payoffs[1] == (games.NEG_INF, 0, -1, 0)
    for m in (0, 2, 3):
        assert gp.payoffs[m] == g.payoffs[m]
    assert set(gp.bombs()) == {(0, 3), (1, 0), (2, 2), (2, 3), (3, 0), (3, 1)}


def test_game_by_name():
    assert games.game_by_name("dmh").name == "dmh"
    assert games.game_by_name("dmh-prime").name == "dmh-prime"
    with pytest.raises(ValueError):
        games.game_by_name("poker")


def test_is_bomb():
    assert games.is_bomb(games.NEG_INF)
    assert not games.is_bomb(0)
    assert not games.is_bomb(-1)


def test_assignment_round_trip():
    s = games.StrategyMatrix.from_assignment((0, 3, 0, 3))
    assert s.assignment() == (0, 3, 0, 3)
    assert s.rows[0] == (1, 0, 0, 0)
    assert s.rows[1] == (0, 0, 0, 1)
    assert s.exact


def test_safe_assignment_payoffs():
    g = games.dmh_game()
    s = games.StrategyMatrix.from_assignment((0, 3, 0, 3))
    assert games.payoff(g, s) == 0
    s = games.StrategyMatrix.from_assignment((2, 1, 1, 2))
    assert games.payoff(g, s) == 0


def test_unsafe_assignment_is_minus_infinity():
    g = games.dmh_game()
    s = games.StrategyMatrix.from_assignment((0, 2, 0, 2))
    assert games.payoff(g, s) == games.NEG_INF
    # the same guesses are merely penalized, not fatal, in the variant game
    assert games.payoff(games.dmh_prime_game(), s) == Fraction(-1, 4)


def test_any_bomb_weight_is_fatal():
    g = games.dmh_game()
    rows = (
        (1.0 - 1e-300, 0.0, 0.0, 1e-300),  # bomb column for m=0 carries dust
        (0.0, 1.0, 0.0, 0.0),
        (0.0, 1.0, 0.0, 0.0),
        (0.0, 0.0, 1.0, 0.0),
    )
    s = games.StrategyMatrix(rows, exact=False)
    assert games.payoff(g, s) == games.NEG_INF


def test_mixed_strategy_payoff_is_exact():
    g = games.dmh_prime_game()
    half = Fraction(1, 2)
    rows = (
        (half, half, 0, 0),  # -1/2
        (0, 0, half, half),  # -1/2 via the penalized middle cell
        (half, half, 0, 0),  # +1/2
        (0, 0, half, half),  # 0
    )
    s = games.StrategyMatrix(rows)
    assert games.payoff(g, s) == Fraction(-1, 8)


def test_strategy_shape_is_enforced_at_construction():
    with pytest.raises(ValueError):
        games.StrategyMatrix(((1, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1)))
    with pytest.raises(ValueError):
        games.StrategyMatrix.from_assignment((0, 1, 2))
    with pytest.raises(ValueError):
        games.StrategyMatrix.from_assignment((0, 1, 2, 5))


def test_stochasticity_is_checked_by_validate():
    negative = games.StrategyMatrix(
        ((2, -1, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1))
    )
    assert not negative.validate()
    bad_sum = games.StrategyMatrix(
        ((Fraction(1, 2), 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1))
    )
    assert not bad_sum.validate()
    assert games.StrategyMatrix.from_assignment((0, 1, 2, 3)).validate()


def test_float_strategy_tolerance():
    rows = ((1.0 + 5e-10, -5e-10, 0.0, 0.0),) + ((0.0, 1.0, 0.0, 0.0),) * 3
    s = games.StrategyMatrix(rows, exact=False)
    assert s.validate(tol=1e-8)
    assert not s.validate(tol=1e-12)


def test_game_json_round_trip():
    for g in (games.dmh_game(), games.dmh_prime_game()):
        encoded = games.game_to_json(g)
        assert encoded["payoff"][1][0] == "-inf"
        assert games.game_from_json(encoded) == g


def test_strategy_json_shape():
    s = games.StrategyMatrix.from_assignment((1, 1, 1, 2))
    encoded = games.strategy_to_json(s)
    assert encoded["exact"] is True
    assert encoded["rows"][0] == ["0", "1", "0", "0"]
