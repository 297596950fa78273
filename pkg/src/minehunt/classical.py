"""Classical one-shot strategies: n bits of communication plus shared randomness.

The achievable strategy polytope is the convex hull of deterministic
protocols (encoder M -> {0..2^n - 1}, decoder {0..2^n - 1} -> Z), so the
optimal payoff is attained at a vertex.  The number of distinct vertices has
a closed form in binomials and Stirling numbers of the second kind; both the
formula and a brute-force enumeration are provided so each can check the
other.
"""

from __future__ import annotations

import functools
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

from . import games


def stirling2(n: int, k: int) -> int:
    """Partitions of an n-set into k nonempty blocks (inclusion-exclusion)."""
    if k < 0 or n < 0:
        raise ValueError("negative arguments")
    if k == 0 or k > n:
        return 1 if n == k else 0
    total = sum((-1) ** j * math.comb(k, j) * (k - j) ** n for j in range(k + 1))
    q, r = divmod(total, math.factorial(k))
    assert r == 0
    return q


@functools.cache
def stirling2_recurrence(n: int, k: int) -> int:
    """Same numbers via S(n,k) = k S(n-1,k) + S(n-1,k-1); used as a cross-check."""
    if n == 0 and k == 0:
        return 1
    if n == 0 or k == 0 or k > n:
        return 0
    return k * stirling2_recurrence(n - 1, k) + stirling2_recurrence(n - 1, k - 1)


def vertex_count(n: int, m_card: int, z_card: int) -> int:
    """Distinct deterministic strategies for n bits, |M| inputs, |Z| guesses.

    Counts surjections onto each possible used-guess set: k ranges over the
    number of distinct guesses actually emitted.
    """
    if n < 0 or m_card <= 0 or z_card <= 0:
        raise ValueError("invalid cardinalities")
    return sum(
        math.factorial(k) * math.comb(z_card, k) * stirling2(m_card, k)
        for k in range(1, 2**n + 1)
    )


# enumeration is meant for small scale; compositions beyond this are refused
MAX_COMPOSITIONS = 1 << 16


def enumerate_vertices(n: int, m_card: int, z_card: int) -> list[tuple[int, ...]]:
    """All distinct deterministic strategies, as guess-per-message tuples.

    Composes every encoder with every decoder and deduplicates; sorted
    lexicographically (guesses are 0-based).
    """
    c_card = 2**n
    work = c_card**m_card * z_card**c_card
    if work > MAX_COMPOSITIONS:
        raise ValueError(
            f"{work} encoder/decoder compositions exceed the enumeration limit"
        )
    seen = set()
    for enc in itertools.product(range(c_card), repeat=m_card):
        for dec in itertools.product(range(z_card), repeat=c_card):
            seen.add(tuple(dec[c] for c in enc))
    return sorted(seen)


@dataclass(frozen=True)
class ClassicalReport:
    """Vertex census of the n-bit strategy polytope against a game."""

    game: str
    bits: int
    count_formula: int
    count_enumerated: int
    safe_assignments: tuple  # vertices with finite payoff, 0-based guesses
    safe_payoffs: tuple
    max_payoff: object  # Fraction, or -inf if every vertex hits a bomb

    @property
    def counts_match(self) -> bool:
        return self.count_formula == self.count_enumerated


def verify_classical_bound(game: games.GameMatrix, n: int = 1) -> ClassicalReport:
    """Enumerate every deterministic n-bit strategy and score it.

    The polytope maximum equals the best vertex payoff, so `max_payoff`
    bounds every shared-randomness strategy as well.
    """
    if not 1 <= n <= 4:
        raise ValueError("bits must be between 1 and 4")
    assignments = enumerate_vertices(n, 4, 4)
    safe = []
    safe_payoffs = []
    best = games.NEG_INF
    for guesses in assignments:
        value = games.payoff(game, games.StrategyMatrix.from_assignment(guesses))
        if not games.is_bomb(value):
            safe.append(guesses)
            safe_payoffs.append(value)
            if value > best:
                best = value
    return ClassicalReport(
        game=game.name,
        bits=n,
        count_formula=vertex_count(n, 4, 4),
        count_enumerated=len(assignments),
        safe_assignments=tuple(safe),
        safe_payoffs=tuple(safe_payoffs),
        max_payoff=best,
    )
