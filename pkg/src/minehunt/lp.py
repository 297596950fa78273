"""Exact rational linear programming.

Dense two-phase simplex over `fractions.Fraction` with Bland's rule, so
every solve terminates and every reported optimum is exact.  Intended for
the small, highly degenerate programs that show up when slicing the
no-signaling polytope: a few dozen variables, mostly equality rows.

Also provides exact convex-hull membership with certificates (convex
weights when inside, a separating functional when outside).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

LE = "<="
GE = ">="
EQ = "="

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"

Rational = Fraction | int


def _frac(x: Rational) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    raise TypeError(f"expected an exact rational, got {type(x).__name__}")


@dataclass(frozen=True)
class LpResult:
    """Outcome of an exact solve.

    `value` and `witness` are None unless `status == OPTIMAL`.  The witness
    is always a vertex (basic feasible solution) of the feasible region.
    """

    status: str
    value: Fraction | None = None
    witness: tuple[Fraction, ...] | None = None

    @property
    def optimal(self) -> bool:
        return self.status == OPTIMAL


class LinearProgram:
    """Maximization problem over rational variables.

    Variables are free by default; use `set_bounds` for box constraints.
    Relations are LE, GE or EQ.
    """

    def __init__(self, num_vars: int, objective: Sequence[Rational] | None = None):
        if num_vars <= 0:
            raise ValueError("a linear program needs at least one variable")
        self.n = num_vars
        if objective is None:
            objective = [0] * num_vars
        self.objective = self._vector(objective)
        self.rows: list[tuple[tuple[Fraction, ...], str, Fraction]] = []
        self.lower: list[Fraction | None] = [None] * num_vars
        self.upper: list[Fraction | None] = [None] * num_vars

    def _vector(self, coeffs: Sequence[Rational]) -> tuple[Fraction, ...]:
        if len(coeffs) != self.n:
            raise ValueError(f"expected {self.n} coefficients, got {len(coeffs)}")
        return tuple(_frac(c) for c in coeffs)

    def set_objective(self, coeffs: Sequence[Rational]) -> None:
        self.objective = self._vector(coeffs)

    def set_bounds(self, var: int, lower: Rational | None, upper: Rational | None) -> None:
        if not 0 <= var < self.n:
            raise ValueError(f"variable index {var} out of range")
        lo = None if lower is None else _frac(lower)
        up = None if upper is None else _frac(upper)
        if lo is not None and up is not None and lo > up:
            raise ValueError(f"empty bound interval for variable {var}")
        self.lower[var] = lo
        self.upper[var] = up

    def add_constraint(self, coeffs: Sequence[Rational], relation: str, rhs: Rational) -> None:
        if relation == "==":
            relation = EQ
        if relation not in (LE, GE, EQ):
            raise ValueError(f"unknown relation {relation!r}")
        self.rows.append((self._vector(coeffs), relation, _frac(rhs)))

    def solve(self) -> LpResult:
        return _solve(self)


def _solve(lp: LinearProgram) -> LpResult:
    # Rewrite onto nonnegative standard-form variables.  Each original
    # variable becomes a shifted, mirrored or split column; finite two-sided
    # bounds add one extra row for the far end.
    cols: list[tuple] = []  # ("shift", j, lo) | ("mirror", j, up) | ("pos", j) | ("neg", j)
    extra_rows: list[tuple[dict[int, Fraction], str, Fraction]] = []
    var_cols: list[tuple] = []
    for j in range(lp.n):
        lo, up = lp.lower[j], lp.upper[j]
        if lo is not None:
            c = len(cols)
            cols.append(("shift", j, lo))
            var_cols.append(("shift", c, lo))
            if up is not None:
                extra_rows.append(({c: Fraction(1)}, LE, up - lo))
        elif up is not None:
            c = len(cols)
            cols.append(("mirror", j, up))
            var_cols.append(("mirror", c, up))
        else:
            cp = len(cols)
            cols.append(("pos", j))
            cn = len(cols)
            cols.append(("neg", j))
            var_cols.append(("split", cp, cn))

    n_struct = len(cols)

    def rewrite(coeffs: Sequence[Fraction], rhs: Fraction) -> tuple[list[Fraction], Fraction]:
        out = [Fraction(0)] * n_struct
        r = rhs
        for j, a in enumerate(coeffs):
            if a == 0:
                continue
            kind = var_cols[j]
            if kind[0] == "shift":
                out[kind[1]] += a
                r -= a * kind[2]
            elif kind[0] == "mirror":
                out[kind[1]] -= a
                r -= a * kind[2]
            else:
                out[kind[1]] += a
                out[kind[2]] -= a
        return out, r

    rows: list[tuple[list[Fraction], str, Fraction]] = []
    for coeffs, rel, rhs in lp.rows:
        body, r = rewrite(coeffs, rhs)
        rows.append((body, rel, r))
    for sparse, rel, rhs in extra_rows:
        body = [Fraction(0)] * n_struct
        for c, a in sparse.items():
            body[c] = a
        rows.append((body, rel, rhs))

    m = len(rows)
    # Columns: structural, then one slack per inequality, then artificials.
    n_slack = sum(1 for _, rel, _ in rows if rel != EQ)
    tableau: list[list[Fraction]] = []
    slack_col = {}
    si = 0
    for i, (body, rel, rhs) in enumerate(rows):
        row = list(body) + [Fraction(0)] * n_slack
        if rel != EQ:
            col = n_struct + si
            row[col] = Fraction(1) if rel == LE else Fraction(-1)
            slack_col[i] = col
            si += 1
        row.append(rhs)
        tableau.append(row)
    for row in tableau:
        if row[-1] < 0:
            for k in range(len(row)):
                row[k] = -row[k]

    n_cols = n_struct + n_slack
    basis: list[int] = []
    art_cols: list[int] = []
    for i, row in enumerate(tableau):
        col = slack_col.get(i)
        if col is not None and row[col] == 1:
            basis.append(col)
        else:
            # append an artificial column
            col = n_cols + len(art_cols)
            art_cols.append(col)
            for k, r in enumerate(tableau):
                r.insert(len(r) - 1, Fraction(1) if k == i else Fraction(0))
            basis.append(col)
    total_cols = n_cols + len(art_cols)

    def make_zrow(costs: list[Fraction]) -> list[Fraction]:
        z = costs + [Fraction(0)]
        for i, bi in enumerate(basis):
            cb = costs[bi]
            if cb != 0:
                row = tableau[i]
                for k in range(total_cols + 1):
                    if row[k] != 0:
                        z[k] -= cb * row[k]
        return z

    def pivot(i: int, j: int, zrow: list[Fraction]) -> None:
        row = tableau[i]
        piv = row[j]
        if piv != 1:
            inv = Fraction(1) / piv
            for k in range(total_cols + 1):
                if row[k] != 0:
                    row[k] *= inv
        for r in tableau + [zrow]:
            if r is row:
                continue
            f = r[j]
            if f != 0:
                for k in range(total_cols + 1):
                    if row[k] != 0:
                        r[k] -= f * row[k]
        basis[i] = j

    def run(zrow: list[Fraction], allowed: Iterable[int]) -> str:
        allowed = sorted(allowed)
        while True:
            enter = -1
            for j in allowed:
                if zrow[j] < 0:
                    enter = j
                    break
            if enter < 0:
                return OPTIMAL
            leave = -1
            best: Fraction | None = None
            for i in range(m):
                a = tableau[i][enter]
                if a > 0:
                    ratio = tableau[i][-1] / a
                    if best is None or ratio < best or (ratio == best and basis[i] < basis[leave]):
                        best = ratio
                        leave = i
            if leave < 0:
                return UNBOUNDED
            pivot(leave, enter, zrow)

    # Phase 1: drive the artificials to zero.
    if art_cols:
        costs1 = [Fraction(0)] * total_cols
        for c in art_cols:
            costs1[c] = Fraction(1)
        z1 = make_zrow(costs1)
        status = run(z1, range(total_cols))
        assert status == OPTIMAL  # phase-1 objective is bounded below by 0
        infeas = sum(tableau[i][-1] for i in range(m) if basis[i] in art_cols)
        if infeas > 0:
            return LpResult(INFEASIBLE)
        # Pivot leftover zero-level artificials out, dropping redundant rows.
        art_set = set(art_cols)
        drop = []
        for i in range(m):
            if basis[i] in art_set:
                j = next((k for k in range(n_cols) if tableau[i][k] != 0), -1)
                if j < 0:
                    drop.append(i)
                else:
                    pivot(i, j, z1)
        for i in reversed(drop):
            del tableau[i]
            del basis[i]
        m = len(tableau)

    # Phase 2 on the real objective (maximize => minimize the negation).
    costs2 = [Fraction(0)] * total_cols
    for j in range(lp.n):
        a = lp.objective[j]
        if a == 0:
            continue
        kind = var_cols[j]
        if kind[0] == "shift":
            costs2[kind[1]] -= a
        elif kind[0] == "mirror":
            costs2[kind[1]] += a
        else:
            costs2[kind[1]] -= a
            costs2[kind[2]] += a
    z2 = make_zrow(costs2)
    status = run(z2, range(n_cols))
    if status == UNBOUNDED:
        return LpResult(UNBOUNDED)

    values = [Fraction(0)] * total_cols
    for i, bi in enumerate(basis):
        values[bi] = tableau[i][-1]
    witness = []
    for j in range(lp.n):
        kind = var_cols[j]
        if kind[0] == "shift":
            witness.append(kind[2] + values[kind[1]])
        elif kind[0] == "mirror":
            witness.append(kind[2] - values[kind[1]])
        else:
            witness.append(values[kind[1]] - values[kind[2]])
    obj = sum((c * w for c, w in zip(lp.objective, witness)), Fraction(0))
    return LpResult(OPTIMAL, obj, tuple(witness))


def solve_square(matrix: Sequence[Sequence[Rational]], rhs: Sequence[Rational]) -> list[Fraction] | None:
    """Solve a square rational system exactly; None if the matrix is singular."""
    n = len(rhs)
    aug = [[_frac(a) for a in row] + [_frac(rhs[i])] for i, row in enumerate(matrix)]
    if any(len(row) != n + 1 for row in aug):
        raise ValueError("matrix is not square")
    for col in range(n):
        piv = next((r for r in range(col, n) if aug[r][col] != 0), -1)
        if piv < 0:
            return None
        aug[col], aug[piv] = aug[piv], aug[col]
        inv = Fraction(1) / aug[col][col]
        aug[col] = [a * inv for a in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [a - f * b for a, b in zip(aug[r], aug[col])]
    return [aug[r][n] for r in range(n)]


@dataclass(frozen=True)
class MembershipResult:
    """Certificate for a convex-hull membership query.

    Inside: `weights` are convex coefficients reproducing the point (up to
    the tolerance used).  Outside: `functional` f separates, with
    f.point > max_i f.vertex_i; `gap` is that difference.
    """

    inside: bool
    weights: tuple[Fraction, ...] | None = None
    functional: tuple[Fraction, ...] | None = None
    point_value: Fraction | None = None
    vertex_max: Fraction | None = None

    @property
    def gap(self) -> Fraction | None:
        if self.point_value is None or self.vertex_max is None:
            return None
        return self.point_value - self.vertex_max


def membership(
    point: Sequence[Rational],
    vertices: Sequence[Sequence[Rational]],
    tol: Rational = 0,
) -> MembershipResult:
    """Decide whether `point` lies in the convex hull of `vertices`.

    Exact when tol == 0.  With tol > 0 the hull is fattened by tol in each
    coordinate (for points carrying floating-point noise), and a separation
    is only reported when it survives that fattening.
    """
    if not vertices:
        raise ValueError("membership query against an empty vertex list")
    p = [_frac(x) for x in point]
    d = len(p)
    verts = [[_frac(x) for x in v] for v in vertices]
    if any(len(v) != d for v in verts):
        raise ValueError("vertex dimension mismatch")
    tol = _frac(tol)
    if tol < 0:
        raise ValueError("tolerance must be nonnegative")
    nv = len(verts)

    weights_lp = LinearProgram(nv)
    for i in range(nv):
        weights_lp.set_bounds(i, 0, None)
    weights_lp.add_constraint([1] * nv, EQ, 1)
    for k in range(d):
        row = [verts[i][k] for i in range(nv)]
        if tol == 0:
            weights_lp.add_constraint(row, EQ, p[k])
        else:
            weights_lp.add_constraint(row, LE, p[k] + tol)
            weights_lp.add_constraint(row, GE, p[k] - tol)
    res = weights_lp.solve()
    if res.optimal:
        return MembershipResult(True, weights=res.witness)

    # No convex combination exists; find a separating functional f, offset t
    # with f.v + t <= 0 on every vertex and f.p + t maximal.
    sep = LinearProgram(d + 1, objective=list(p) + [1])
    for j in range(d + 1):
        sep.set_bounds(j, -1, 1)
    for v in verts:
        sep.add_constraint(list(v) + [1], LE, 0)
    sres = sep.solve()
    assert sres.optimal  # box bounds keep it feasible (f=0) and bounded
    f = sres.witness[:d]
    point_value = sum((a * b for a, b in zip(f, p)), Fraction(0))
    vertex_max = max(sum((a * b for a, b in zip(f, v)), Fraction(0)) for v in verts)
    gap = point_value - vertex_max
    if gap > d * tol:
        return MembershipResult(
            False, functional=tuple(f), point_value=point_value, vertex_max=vertex_max
        )
    raise ArithmeticError(
        "membership undecided: no convex weights within tolerance, but the "
        "best separation does not clear the tolerance either"
    )
