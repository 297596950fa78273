"""Quantum strategies for the mine-hunting game on two qubits.

Covers three computations: Born-rule boxes from local measurements on a
Schmidt-form state; maximization of the hardy coordinate over projective
measurements for each entanglement angle; and a seesaw ascent over general
one-bit-communication POVM strategies with the bomb cells held at zero,
used to falsify any positive payoff from the maximally entangled state.

Conventions: qubit basis order |00>, |01>, |10>, |11>; the state is
cos(theta)|00> + sin(theta)|11>; Alice's binary POVM outcome doubles as the
communicated bit c; Bob holds one four-outcome POVM per value of c.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import boxes, games, wirings

I2 = np.eye(2)


def schmidt_state(theta: float) -> np.ndarray:
    """cos(theta)|00> + sin(theta)|11> as a length-4 complex vector."""
    v = np.zeros(4, dtype=complex)
    v[0] = math.cos(theta)
    v[3] = math.sin(theta)
    return v


def phi_plus() -> np.ndarray:
    return schmidt_state(math.pi / 4)


def projector(angle: float) -> np.ndarray:
    """Rank-one projector onto (cos angle, sin angle) in the real plane."""
    v = np.array([math.cos(angle), math.sin(angle)])
    return np.outer(v, v).astype(complex)


def projective_pair(angle: float) -> tuple[np.ndarray, np.ndarray]:
    p = projector(angle)
    return p, I2 - p


def random_unit_vector(rng) -> np.ndarray:
    v = rng.normal(size=2) + 1j * rng.normal(size=2)
    return v / np.linalg.norm(v)


def random_projective_pair(rng) -> tuple[np.ndarray, np.ndarray]:
    v = random_unit_vector(rng)
    p = np.outer(v, v.conj())
    return p, I2 - p


def random_binary_povm(rng) -> tuple[np.ndarray, np.ndarray]:
    """E0 = V diag(u) V* with u uniform in [0,1]^2; E1 completes to identity."""
    g = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    v, _ = np.linalg.qr(g)
    e0 = v @ np.diag(rng.uniform(0, 1, size=2)) @ v.conj().T
    e0 = (e0 + e0.conj().T) / 2
    return e0, I2 - e0


def povm_valid(elements, tol: float = 1e-7) -> bool:
    total = np.zeros((2, 2), dtype=complex)
    for e in elements:
        if np.abs(e - e.conj().T).max() > tol:
            return False
        if np.linalg.eigvalsh((e + e.conj().T) / 2).min() < -tol:
            return False
        total = total + e
    return np.abs(total - I2).max() <= tol


def born_box(state: np.ndarray, alice_pairs, bob_pairs) -> boxes.NSBox:
    """Float box p(a,b|x,y) = <psi| A^x_a (x) B^y_b |psi>."""
    ent = []
    for a in (0, 1):
        for b in (0, 1):
            for x in (0, 1):
                for y in (0, 1):
                    op = np.kron(alice_pairs[x][a], bob_pairs[y][b])
                    ent.append(float(np.real(state.conj() @ op @ state)))
    return boxes.NSBox(tuple(ent), exact=False)


def mes_pairing_residual(e: np.ndarray, n: np.ndarray) -> float:
    """|<phi+|E (x) N|phi+> - Tr[E N^T]/2|, zero for the maximally
    entangled state by the transpose trick."""
    psi = phi_plus()
    lhs = psi.conj() @ np.kron(e, n) @ psi
    rhs = np.trace(e @ n.T) / 2
    return abs(complex(lhs - rhs))


# --- hardy coordinate maximization ------------------------------------------
#
# With real projective measurements (angles a0, a1 for Alice, b0, b1 for
# Bob) the three zero constraints can be solved in closed form: writing
# c = cos(theta), s = sin(theta) and t = tan(a1),
#   zero at p(0,1|0,1)  =>  tan(b1) = (s/c) tan(a0)
#   zero at p(1,0|1,0)  =>  tan(b0) = (c/s) tan(a1)
#   zero at p(0,0|1,1)  =>  tan(a1) tan(b1) = -c/s
# which eliminates everything but t:
#   tan(a0) = -c^2/(s^2 t),  tan(b0) = (c/s) t,  tan(b1) = -c/(s t)
# leaving a one-dimensional maximization of the remaining coordinate.


@dataclass(frozen=True)
class HardyOptimum:
    theta: float
    value: float
    t: float | None
    angles: tuple  # (a0, a1, b0, b1)
    box: boxes.NSBox


def _hardy_angles(theta: float, t: float) -> tuple[float, float, float, float]:
    c, s = math.cos(theta), math.sin(theta)
    a1 = math.atan(t)
    a0 = math.atan(-c * c / (s * s * t))
    b0 = math.atan(c * t / s)
    b1 = math.atan(-c / (s * t))
    return a0, a1, b0, b1


def _hardy_value(theta: float, t: float) -> float:
    a0, _, b0, _ = _hardy_angles(theta, t)
    c, s = math.cos(theta), math.sin(theta)
    amp = c * math.cos(a0) * math.cos(b0) + s * math.sin(a0) * math.sin(b0)
    return amp * amp


def hardy_box_from_angles(theta: float, angles) -> boxes.NSBox:
    a0, a1, b0, b1 = angles
    state = schmidt_state(theta)
    return born_box(
        state,
        (projective_pair(a0), projective_pair(a1)),
        (projective_pair(b0), projective_pair(b1)),
    )


def optimize_hardy(theta: float, grid: int = 4096) -> HardyOptimum:
    """Best projective-measurement hardy value for the angle-theta state.

    Scans the eliminated parameter on an atan grid and polishes the best
    bracket with golden-section search.  Degenerate angles (separable state,
    or the maximally entangled state where the value vanishes identically)
    come out as zero.
    """
    from scipy import optimize as sopt

    c, s = math.cos(theta), math.sin(theta)
    if abs(s) < 1e-12 or abs(c) < 1e-12:
        angles = (0.0, 0.0, 0.0, 0.0)
        return HardyOptimum(theta, 0.0, None, angles, hardy_box_from_angles(theta, angles))

    us = np.linspace(-math.pi / 2, math.pi / 2, grid + 1)[1:-1]
    vals = [
        _hardy_value(theta, math.tan(u)) if abs(math.tan(u)) > 1e-9 else 0.0
        for u in us
    ]
    k = int(np.argmax(vals))
    lo = us[max(0, k - 1)]
    hi = us[min(len(us) - 1, k + 1)]
    res = sopt.minimize_scalar(
        lambda u: -_hardy_value(theta, math.tan(u)),
        bounds=(lo, hi),
        method="bounded",
        options={"xatol": 1e-14},
    )
    t = math.tan(res.x)
    value = _hardy_value(theta, t)
    if value < vals[k]:
        t = math.tan(us[k])
        value = vals[k]
    angles = _hardy_angles(theta, t)
    return HardyOptimum(theta, value, t, angles, hardy_box_from_angles(theta, angles))


def optimize_hardy_global(n_theta: int = 256, grid: int = 1024):
    """Maximize the hardy value over the entanglement angle as well."""
    from scipy import optimize as sopt

    thetas = np.linspace(1e-3, math.pi / 4 - 1e-3, n_theta)
    vals = [optimize_hardy(t, grid=grid).value for t in thetas]
    k = int(np.argmax(vals))
    lo = thetas[max(0, k - 1)]
    hi = thetas[min(len(thetas) - 1, k + 1)]
    res = sopt.minimize_scalar(
        lambda th: -optimize_hardy(th, grid=grid).value,
        bounds=(lo, hi),
        method="bounded",
        options={"xatol": 1e-12},
    )
    best_theta = float(res.x)
    best = optimize_hardy(best_theta, grid=grid)
    return best_theta, best.value


# --- general one-bit strategies ----------------------------------------------


@dataclass(frozen=True)
class QuantumStrategy:
    """State plus four sender binary POVMs and two receiver 4-outcome POVMs."""

    state: np.ndarray
    alice: tuple  # 4 pairs (E0, E1)
    bob: tuple  # 2 quadruples (N_1..N_4)

    def valid(self, tol: float = 1e-7) -> bool:
        return all(povm_valid(pair, tol) for pair in self.alice) and all(
            povm_valid(quad, tol) for quad in self.bob
        )


def _complex_pairs(matrix) -> list:
    """Nested [re, im] encoding for a complex vector or matrix."""
    arr = np.asarray(matrix, dtype=complex)
    if arr.ndim == 1:
        return [[float(z.real), float(z.imag)] for z in arr]
    return [_complex_pairs(row) for row in arr]


def strategy_to_json(qs: QuantumStrategy | None) -> dict | None:
    """Serialize state amplitudes and all POVM elements as [re, im] pairs."""
    if qs is None:
        return None
    return {
        "state": _complex_pairs(qs.state),
        "alice": [[_complex_pairs(e) for e in pair] for pair in qs.alice],
        "bob": [[_complex_pairs(n) for n in quad] for quad in qs.bob],
    }


def strategy_matrix(qs: QuantumStrategy) -> np.ndarray:
    """4x4 guess distribution s[m][z] = sum_c <E^(m)_c (x) N^(c)_z>."""
    s = np.zeros((4, 4))
    for m in range(4):
        for z in range(4):
            val = 0.0
            for c in range(2):
                op = np.kron(qs.alice[m][c], qs.bob[c][z])
                val += float(np.real(qs.state.conj() @ op @ qs.state))
            s[m][z] = val
    return s


def scored_payoff(game: games.GameMatrix, smatrix: np.ndarray, tol: float = 1e-9):
    """Finite payoff if every bomb cell is below tol, else None."""
    total = 0.0
    for m in range(4):
        for z in range(4):
            g = game.payoffs[m][z]
            if games.is_bomb(g):
                if smatrix[m][z] > tol:
                    return None
            else:
                total += float(game.prior[m]) * float(g) * smatrix[m][z]
    return total


def wiring_strategy(state: np.ndarray, alice_pairs, bob_pairs) -> QuantumStrategy:
    """Lift box measurements to a one-bit strategy along the payoff wiring:
    the sender's bit is the wired function of (m, a), the receiver guesses
    z = 2c + b."""
    w = wirings.theorem2_wiring()
    alice = []
    for m in range(4):
        x = w.x_choice[m]
        ops = [np.zeros((2, 2), dtype=complex), np.zeros((2, 2), dtype=complex)]
        for a in (0, 1):
            ops[w.bit[2 * m + a]] += alice_pairs[x][a]
        alice.append(tuple(ops))
    bob = []
    for c in range(2):
        y = w.y_choice[c]
        quad = [np.zeros((2, 2), dtype=complex) for _ in range(4)]
        for b in (0, 1):
            quad[w.guess[2 * c + b]] += bob_pairs[y][b]
        bob.append(tuple(quad))
    return QuantumStrategy(state, tuple(alice), tuple(bob))


def hardy_strategy(theta: float, t: float | None = None) -> QuantumStrategy:
    """One-bit strategy from the hardy measurements at angle theta."""
    if t is None:
        opt = optimize_hardy(theta)
        angles = opt.angles
    else:
        angles = _hardy_angles(theta, t)
    a0, a1, b0, b1 = angles
    return wiring_strategy(
        schmidt_state(theta),
        (projective_pair(a0), projective_pair(a1)),
        (projective_pair(b0), projective_pair(b1)),
    )


def classical_strategy(state: np.ndarray) -> QuantumStrategy:
    """Bomb-free reference strategy with payoff zero for any state: the
    sender's bit is deterministic per message, the receiver's guess is a
    safe column for that bit."""
    zero = np.zeros((2, 2), dtype=complex)
    ident = I2.astype(complex)
    alice = (
        (ident, zero),
        (ident, zero),
        (ident, zero),
        (zero, ident),
    )
    n0 = (zero, ident, zero, zero)  # guess z=2 on bit 0
    n1 = (zero, zero, zero, ident)  # guess z=4 on bit 1
    return QuantumStrategy(state, alice, (n0, n1))


def aligned_family_strategy(state: np.ndarray, rng) -> QuantumStrategy:
    """The forced solution family aligned with the state's Schmidt basis:
    receiver outcomes 1 and 4 are dropped, outcomes 2 and 3 are basis
    projectors, and the message-1 POVM is free.  Every bomb cell vanishes
    for any Schmidt-form state."""
    p0 = np.diag([1.0, 0.0]).astype(complex)
    p1 = np.diag([0.0, 1.0]).astype(complex)
    zero = np.zeros((2, 2), dtype=complex)
    e1 = random_binary_povm(rng)
    alice = (e1, (p0, p1), (p0, p1), (p1, p0))
    bob = ((zero, p0, p1, zero), (zero, p1, p0, zero))
    return QuantumStrategy(state, alice, bob)


# --- constraint report for the maximally entangled state ----------------------

# bomb cells of the main game, 0-based (message, guess)
_DMH_BOMBS = ((0, 3), (1, 0), (1, 2), (2, 2), (2, 3), (3, 0), (3, 1))


def check_theorem4_constraints(qs: QuantumStrategy) -> dict:
    """Trace residuals that any positive-payoff strategy on the maximally
    entangled state would have to satisfy.

    For each bomb cell (m, z) and each bit c the pairing identity turns
    <E^(m)_c (x) N^(c)_z> into Tr[E^(m)_c conj(N^(c)_z)]/2, and both terms
    must vanish separately (they are traces of products of positive
    operators).  A positive payoff additionally needs a positive margin
    Tr[(E^(3)_0 - E^(1)_0)(conj(N^(0)_1) - conj(N^(1)_1))] > 0.
    """
    residuals = {}
    worst = 0.0
    for m, z in _DMH_BOMBS:
        for c in range(2):
            r = abs(complex(np.trace(qs.alice[m][c] @ qs.bob[c][z].conj())))
            residuals[f"m{m + 1}z{z + 1}c{c}"] = float(r)
            worst = max(worst, float(r))
    diff = qs.bob[0][0].conj() - qs.bob[1][0].conj()
    margin = float(
        np.real(np.trace((qs.alice[2][0] - qs.alice[0][0]) @ diff))
    )
    smat = strategy_matrix(qs)
    return {
        "residuals": residuals,
        "max_residual": worst,
        "margin": margin,
        "strategy_matrix": smat,
        "payoff": scored_payoff(games.dmh_game(), smat),
    }


def random_feasible_family(rng) -> QuantumStrategy:
    """Random strategy from the two closed-form families satisfying all
    fourteen trace conditions on the maximally entangled state.

    Branch one aligns the message-1 and message-3 measurements along a
    random direction; branch two drops receiver outcomes 1 and 4 and leaves
    the message-1 measurement free.
    """
    psi = random_unit_vector(rng)
    p = np.outer(psi, psi.conj())
    q = I2 - p
    zero = np.zeros((2, 2), dtype=complex)
    # the receiver operators are conjugated so that the trace conditions
    # hold for the actual measurements
    pc, qc = p.conj(), q.conj()
    if rng.integers(0, 2) == 0:
        # sender-aligned branch: free weights on the receiver's bit-0 POVM
        w1 = float(rng.uniform(0, 1))
        w3 = float(rng.uniform(0, 1))
        alice = ((p, q), (zero, I2.astype(complex)), (p, q), (q, p))
        bob = (
            (w1 * pc, (1 - w1) * pc, w3 * qc, (1 - w3) * qc),
            (zero, qc, zero, pc),
        )
    else:
        # forced branch: receiver outcomes 1 and 4 vanish, message-1 free
        e1 = random_binary_povm(rng)
        alice = (e1, (p, q), (p, q), (q, p))
        bob = ((zero, pc, qc, zero), (zero, qc, pc, zero))
    return QuantumStrategy(phi_plus(), alice, bob)


# --- seesaw ascent ------------------------------------------------------------


class _SeesawEngine:
    """Alternating POVM optimization with bomb cells pinned near zero.

    Each half-step is a small semidefinite program built once with
    parameters and re-solved per iteration: the sender's step decouples
    per message through the receiver-side reduced operators, the
    receiver's step is one program over both of his POVMs.
    """

    def __init__(self, game: games.GameMatrix, state: np.ndarray, bomb_rhs: float = 1e-10):
        import cvxpy as cp

        self.cp = cp
        self.game = game
        self.psi = state.reshape(2, 2)
        self.bomb_rhs = bomb_rhs
        self.weights = np.zeros((4, 4))
        self.bombs = [[] for _ in range(4)]
        for m in range(4):
            for z in range(4):
                g = game.payoffs[m][z]
                if games.is_bomb(g):
                    self.bombs[m].append(z)
                else:
                    self.weights[m][z] = float(game.prior[m] * g)
        self._build_alice()
        self._build_bob()

    def _solve(self, problem):
        import warnings

        try:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                problem.solve(
                    solver="CLARABEL",
                    tol_feas=1e-10,
                    tol_gap_abs=1e-10,
                    tol_gap_rel=1e-9,
                )
        except self.cp.error.SolverError as exc:
            # treat a hard solver crash like any other dead-end iterate
            raise RuntimeError(f"seesaw subproblem solver failure: {exc}") from exc
        if problem.status not in ("optimal", "optimal_inaccurate"):
            raise RuntimeError(f"seesaw subproblem status {problem.status}")

    def _build_alice(self):
        cp = self.cp
        self.a_params = [
            [cp.Parameter((2, 2), hermitian=True) for _ in range(4)] for _ in range(2)
        ]
        self.a_probs = {}
        self.a_vars = {}
        for m in range(4):
            if not self.weights[m].any():
                continue  # nothing to gain; the current POVM stays feasible
            e0 = cp.Variable((2, 2), hermitian=True)
            s = [
                cp.real(cp.trace(e0 @ (self.a_params[0][z] - self.a_params[1][z])))
                + cp.real(cp.trace(self.a_params[1][z]))
                for z in range(4)
            ]
            cons = [e0 >> 0, np.eye(2) - e0 >> 0]
            cons += [s[z] <= self.bomb_rhs for z in self.bombs[m]]
            obj = cp.Maximize(
                sum(self.weights[m][z] * s[z] for z in range(4) if self.weights[m][z])
            )
            self.a_vars[m] = e0
            self.a_probs[m] = cp.Problem(obj, cons)

    def _build_bob(self):
        cp = self.cp
        self.b_params = [
            [cp.Parameter((2, 2), hermitian=True) for _ in range(2)] for _ in range(4)
        ]
        n = [[cp.Variable((2, 2), hermitian=True) for _ in range(4)] for _ in range(2)]
        self.b_vars = n
        cons = []
        for c in range(2):
            cons += [n[c][z] >> 0 for z in range(4)]
            cons.append(sum(n[c]) == np.eye(2))
        exprs = {}
        for m in range(4):
            for z in range(4):
                exprs[(m, z)] = cp.real(
                    cp.trace(self.b_params[m][0] @ n[0][z])
                    + cp.trace(self.b_params[m][1] @ n[1][z])
                )
        for m in range(4):
            for z in self.bombs[m]:
                cons.append(exprs[(m, z)] <= self.bomb_rhs)
        obj = cp.Maximize(
            sum(
                self.weights[m][z] * exprs[(m, z)]
                for m in range(4)
                for z in range(4)
                if self.weights[m][z]
            )
        )
        self.b_prob = cp.Problem(obj, cons)

    def alice_step(self, alice, bob):
        for c in range(2):
            for z in range(4):
                r = self.psi @ bob[c][z].T @ self.psi.conj().T
                self.a_params[c][z].value = (r + r.conj().T) / 2
        out = []
        for m in range(4):
            if m not in self.a_probs:
                out.append(alice[m])
                continue
            self._solve(self.a_probs[m])
            e0 = self.a_vars[m].value
            e0 = (e0 + e0.conj().T) / 2
            out.append((e0, I2 - e0))
        return tuple(out)

    def bob_step(self, alice):
        for m in range(4):
            for c in range(2):
                q = self.psi.T @ alice[m][c].T @ self.psi.conj()
                self.b_params[m][c].value = (q + q.conj().T) / 2
        self._solve(self.b_prob)
        out = []
        for c in range(2):
            quad = []
            for z in range(4):
                v = self.b_vars[c][z].value
                quad.append((v + v.conj().T) / 2)
            out.append(tuple(quad))
        return tuple(out)


@dataclass
class SeesawReport:
    theta: float
    game: str
    restarts: int
    best_payoff: float | None
    best_strategy: QuantumStrategy | None
    restart_payoffs: list
    infeasible_restarts: int

    def to_json(self) -> dict:
        return {
            "theta": self.theta,
            "game": self.game,
            "restarts": self.restarts,
            "best_payoff": self.best_payoff,
            "best_strategy": strategy_to_json(self.best_strategy),
            "restart_payoffs": self.restart_payoffs,
            "infeasible_restarts": self.infeasible_restarts,
        }


def _initial_strategy(theta: float, state: np.ndarray, restart: int, rng) -> QuantumStrategy:
    """Deterministic cycle of bomb-free starting points."""
    mode = restart % 3
    if mode == 0:
        c, s = math.cos(theta), math.sin(theta)
        if restart == 0 and min(abs(c), abs(s)) > 1e-12:
            return hardy_strategy(theta)
        if min(abs(c), abs(s)) > 1e-12:
            t = math.tan(rng.uniform(-math.pi / 2 + 1e-3, math.pi / 2 - 1e-3))
            if abs(t) > 1e-6:
                return hardy_strategy(theta, t=t)
        return classical_strategy(state)
    if mode == 1:
        return aligned_family_strategy(state, rng)
    return classical_strategy(state)


def seesaw_dmh(
    theta: float,
    restarts: int = 200,
    seed: int = 0,
    tol: float = 1e-9,
    max_iters: int = 500,
    game: games.GameMatrix | None = None,
) -> SeesawReport:
    """Best payoff found by alternating maximization from many starts.

    Every restart begins at a strategy with exactly vanishing bomb cells,
    and each half-step keeps them below a hard threshold, so the ascent is
    monotone over feasible strategies.  Restarts whose final matrix puts
    more than `tol` on a bomb are rejected rather than scored.
    """
    game = game or games.dmh_game()
    state = schmidt_state(theta)
    engine = _SeesawEngine(game, state)
    best = None
    best_strategy = None
    payoffs = []
    infeasible = 0
    for r in range(restarts):
        rng = np.random.default_rng([seed, r])
        qs = _initial_strategy(theta, state, r, rng)
        alice, bob = qs.alice, qs.bob
        local = None
        local_strategy = None

        def snapshot(alice, bob):
            nonlocal local, local_strategy
            cand = QuantumStrategy(state, alice, bob)
            value = scored_payoff(game, strategy_matrix(cand), tol=tol)
            if value is not None and (local is None or value > local):
                local = value
                local_strategy = cand
            return value

        snapshot(alice, bob)
        prev = -np.inf
        for _ in range(max_iters):
            # near the optimum the pinned cells force singular iterates and
            # the subproblems may fail; keep the best feasible pair seen
            try:
                alice = engine.alice_step(alice, bob)
                snapshot(alice, bob)
                bob = engine.bob_step(alice)
                snapshot(alice, bob)
            except RuntimeError:
                break
            cur = float(
                np.sum(engine.weights * strategy_matrix(QuantumStrategy(state, alice, bob)))
            )
            if cur - prev < 1e-10:
                break
            prev = cur
        if local is None:
            infeasible += 1
            payoffs.append(None)
            continue
        payoffs.append(local)
        if best is None or local > best:
            best = local
            best_strategy = local_strategy
    return SeesawReport(
        theta=theta,
        game=game.name,
        restarts=restarts,
        best_payoff=best,
        best_strategy=best_strategy,
        restart_payoffs=payoffs,
        infeasible_restarts=infeasible,
    )
