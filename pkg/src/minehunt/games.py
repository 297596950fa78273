"""Mine-hunting guessing games and their extended-real payoffs.

A game is a 4x4 payoff matrix over (message m, guess z) whose entries are
exact rationals or -infinity (a bomb), plus a prior on messages.  A strategy
is a row-stochastic 4x4 matrix S[m][z] of guess probabilities.  The payoff
of a strategy is -infinity as soon as it puts any weight on a bomb,
otherwise the prior-weighted sum of payoff times probability.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

NEG_INF = float("-inf")


def is_bomb(entry) -> bool:
    return isinstance(entry, float) and math.isinf(entry)


@dataclass(frozen=True)
class GameMatrix:
    """Payoff entries (Fraction or -inf) and a rational prior on messages."""

    name: str
    payoffs: tuple
    prior: tuple

    def __post_init__(self):
        if len(self.payoffs) != 4 or any(len(r) != 4 for r in self.payoffs):
            raise ValueError("payoff matrix must be 4x4")
        rows = tuple(
            tuple(e if is_bomb(e) else Fraction(e) for e in row) for row in self.payoffs
        )
        object.__setattr__(self, "payoffs", rows)
        pr = tuple(Fraction(p) for p in self.prior)
        if len(pr) != 4 or sum(pr) != 1 or any(p < 0 for p in pr):
            raise ValueError("prior must be a distribution over 4 messages")
        object.__setattr__(self, "prior", pr)

    def bombs(self) -> list[tuple[int, int]]:
        """0-based (message, guess) pairs carrying -infinity."""
        return [
            (m, z) for m in range(4) for z in range(4) if is_bomb(self.payoffs[m][z])
        ]


def dmh_game() -> GameMatrix:
    """The mine-hunting game: one reward cell, seven bombs across the rows."""
    return GameMatrix(
        name="dmh",
        payoffs=(
            (-1, 0, 0, NEG_INF),
            (NEG_INF, 0, NEG_INF, 0),
            (1, 0, NEG_INF, NEG_INF),
            (NEG_INF, NEG_INF, 0, 0),
        ),
        prior=(Fraction(1, 4),) * 4,
    )


def dmh_prime_game() -> GameMatrix:
    """Variant with one bomb in row 2 replaced by a -1 penalty."""
    return GameMatrix(
        name="dmh-prime",
        payoffs=(
            (-1, 0, 0, NEG_INF),
            (NEG_INF, 0, -1, 0),
            (1, 0, NEG_INF, NEG_INF),
            (NEG_INF, NEG_INF, 0, 0),
        ),
        prior=(Fraction(1, 4),) * 4,
    )


def game_by_name(name: str) -> GameMatrix:
    games = {"dmh": dmh_game, "dmh-prime": dmh_prime_game}
    if name not in games:
        raise ValueError(f"unknown game {name!r}; choose from {sorted(games)}")
    return games[name]()


@dataclass(frozen=True)
class StrategyMatrix:
    """Row-stochastic 4x4 guess distribution; exact rows or float rows."""

    rows: tuple
    exact: bool = True

    def __post_init__(self):
        if len(self.rows) != 4 or any(len(r) != 4 for r in self.rows):
            raise ValueError("strategy matrix must be 4x4")
        if self.exact:
            rows = tuple(tuple(Fraction(e) for e in row) for row in self.rows)
        else:
            rows = tuple(tuple(float(e) for e in row) for row in self.rows)
        object.__setattr__(self, "rows", rows)

    def validate(self, tol: float = 1e-9) -> bool:
        for row in self.rows:
            if self.exact:
                if any(e < 0 for e in row) or sum(row) != 1:
                    return False
            else:
                if any(e < -tol for e in row) or abs(sum(row) - 1) > tol:
                    return False
        return True

    @staticmethod
    def from_assignment(guesses: Sequence[int]) -> "StrategyMatrix":
        """Deterministic strategy guessing z = guesses[m] (0-based)."""
        if len(guesses) != 4 or any(not 0 <= z < 4 for z in guesses):
            raise ValueError("need one guess in 0..3 per message")
        rows = tuple(
            tuple(Fraction(1 if z == g else 0) for z in range(4)) for g in guesses
        )
        return StrategyMatrix(rows)

    def assignment(self) -> tuple[int, ...] | None:
        """The guess per message if deterministic, else None."""
        out = []
        for row in self.rows:
            ones = [z for z, e in enumerate(row) if e == 1]
            if len(ones) != 1:
                return None
            out.append(ones[0])
        return tuple(out)


def payoff(game: GameMatrix, strategy: StrategyMatrix):
    """Extended-real payoff; -infinity iff the strategy touches a bomb.

    The bomb test is an exact zero test on strategy entries, so float
    strategies must be cleaned by the caller if tiny numerical weights on
    bombs are to be forgiven.
    """
    zero = Fraction(0) if strategy.exact else 0.0
    total = zero
    for m in range(4):
        pm = game.prior[m]
        for z in range(4):
            s = strategy.rows[m][z]
            g = game.payoffs[m][z]
            if is_bomb(g):
                if s > 0:
                    return NEG_INF
            elif s != 0 and pm != 0:
                total += pm * g * s
    return total


def game_to_json(game: GameMatrix) -> dict:
    return {
        "name": game.name,
        "payoff": [
            ["-inf" if is_bomb(e) else str(e) for e in row] for row in game.payoffs
        ],
        "prior": [str(p) for p in game.prior],
    }


def game_from_json(data: dict) -> GameMatrix:
    def parse(e):
        if isinstance(e, str) and e.strip() in ("-inf", "-Infinity"):
            return NEG_INF
        return Fraction(str(e))

    return GameMatrix(
        name=data.get("name", "custom"),
        payoffs=tuple(tuple(parse(e) for e in row) for row in data["payoff"]),
        prior=tuple(Fraction(str(p)) for p in data["prior"]),
    )


def strategy_to_json(strategy: StrategyMatrix) -> dict:
    if strategy.exact:
        rows = [[str(e) for e in row] for row in strategy.rows]
    else:
        rows = [list(row) for row in strategy.rows]
    return {"rows": rows, "exact": strategy.exact}
