"""Two-input two-output no-signaling boxes.

A box is the conditional distribution p(a,b|x,y) with all four variables binary,
stored as a flat 16-vector indexed by a*8 + b*4 + x*2 + y.  Exact boxes carry
`fractions.Fraction` entries; float boxes carry numerical noise and are
validated against a tolerance.

The module knows the polytope structure (local vertices, no-signaling
vertices, relabelling symmetries) and the two nonlocality patterns used by
the mine-hunting analysis: the hardy pattern (one strictly positive
coordinate forced nonlocal by three zeros) and the cabello pattern (its
two-zero relaxation).
"""

from __future__ import annotations

import functools
import itertools
import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

from . import lp

HARDY_POSITIVE = 0  # p(0,0|0,0)
HARDY_ZEROS = (3, 5, 10)  # p(0,0|1,1), p(0,1|0,1), p(1,0|1,0)
CABELLO_GAIN = 0  # p(0,0|0,0)
CABELLO_LOSS = 3  # p(0,0|1,1)
CABELLO_ZEROS = (5, 10)

DEFAULT_TOL = 1e-9


def index(a: int, b: int, x: int, y: int) -> int:
    """Flat coordinate of p(a,b|x,y)."""
    return a * 8 + b * 4 + x * 2 + y


def unindex(i: int) -> tuple[int, int, int, int]:
    return (i >> 3) & 1, (i >> 2) & 1, (i >> 1) & 1, i & 1


@dataclass(frozen=True)
class NSBox:
    """A 16-entry conditional distribution; `exact` marks rational entries."""

    entries: tuple
    exact: bool = True

    def __post_init__(self):
        if len(self.entries) != 16:
            raise ValueError("a box needs exactly 16 entries")
        if self.exact:
            object.__setattr__(
                self, "entries", tuple(Fraction(e) for e in self.entries)
            )
        else:
            object.__setattr__(self, "entries", tuple(float(e) for e in self.entries))

    def prob(self, a: int, b: int, x: int, y: int):
        return self.entries[index(a, b, x, y)]

    def as_exact(self) -> "NSBox":
        """Rationalize float entries exactly (floats are dyadic rationals)."""
        if self.exact:
            return self
        return NSBox(tuple(Fraction(e) for e in self.entries), exact=True)


def box_from_function(f: Callable[[int, int, int, int], object], exact: bool = True) -> NSBox:
    ent = [f(a, b, x, y) for a in (0, 1) for b in (0, 1) for x in (0, 1) for y in (0, 1)]
    # comprehension order matches the flat index: a major, then b, x, y
    return NSBox(tuple(ent), exact=exact)


def deterministic_box(f0: int, f1: int, g0: int, g1: int) -> NSBox:
    """Local vertex a = f(x), b = g(y)."""
    f = (f0, f1)
    g = (g0, g1)
    return box_from_function(lambda a, b, x, y: 1 if (a == f[x] and b == g[y]) else 0)


def pr_box() -> NSBox:
    return box_from_function(
        lambda a, b, x, y: Fraction(1, 2) if (a ^ b) == (x & y) else Fraction(0)
    )


def uniform_box() -> NSBox:
    return NSBox((Fraction(1, 4),) * 16)


def enumerate_local_vertices() -> list[NSBox]:
    """All 16 deterministic boxes, ordered by (f0, f1, g0, g1)."""
    return [
        deterministic_box(f0, f1, g0, g1)
        for f0, f1, g0, g1 in itertools.product((0, 1), repeat=4)
    ]


def _ns_equality_rows() -> tuple[list[list[Fraction]], list[Fraction]]:
    """A rank-8 equality system cutting out the no-signaling polytope.

    Four normalization rows plus the a=0 marginal match for each x and the
    b=0 marginal match for each y; the remaining marginal constraints follow
    from these.
    """
    rows = []
    rhs = []
    for x in (0, 1):
        for y in (0, 1):
            row = [Fraction(0)] * 16
            for a in (0, 1):
                for b in (0, 1):
                    row[index(a, b, x, y)] = Fraction(1)
            rows.append(row)
            rhs.append(Fraction(1))
    for x in (0, 1):
        row = [Fraction(0)] * 16
        for b in (0, 1):
            row[index(0, b, x, 0)] += 1
            row[index(0, b, x, 1)] -= 1
        rows.append(row)
        rhs.append(Fraction(0))
    for y in (0, 1):
        row = [Fraction(0)] * 16
        for a in (0, 1):
            row[index(a, 0, 0, y)] += 1
            row[index(a, 0, 1, y)] -= 1
        rows.append(row)
        rhs.append(Fraction(0))
    return rows, rhs


def ns_violation(box: NSBox):
    """Largest absolute violation of positivity or a defining equality."""
    rows, rhs = _ns_equality_rows()
    worst = max((-e for e in box.entries), default=0)
    zero = Fraction(0) if box.exact else 0.0
    worst = max(worst, zero)
    for row, r in zip(rows, rhs):
        v = sum(c * e for c, e in zip(row, box.entries) if c != 0) - r
        worst = max(worst, abs(v))
    return worst


def validate_ns(box: NSBox, tol: float = DEFAULT_TOL) -> bool:
    """Exact boxes must satisfy the constraints exactly; floats up to tol."""
    v = ns_violation(box)
    return v == 0 if box.exact else float(v) <= tol


def hardy_check(box: NSBox, tol: float = 0.0):
    """Return the positive-coordinate value if the three hardy zeros hold, else None.

    Exact boxes use exact zero tests; pass tol > 0 for float boxes.
    """
    limit = 0 if box.exact else tol
    if all(abs(box.entries[i]) <= limit for i in HARDY_ZEROS):
        return box.entries[HARDY_POSITIVE]
    return None


def cabello_check(box: NSBox, tol: float = 0.0):
    """Return (gain, loss) = (p(0,0|0,0), p(0,0|1,1)) if both cabello zeros hold."""
    limit = 0 if box.exact else tol
    if all(abs(box.entries[i]) <= limit for i in CABELLO_ZEROS):
        return box.entries[CABELLO_GAIN], box.entries[CABELLO_LOSS]
    return None


def chsh_value(box: NSBox):
    """E00 + E01 + E10 - E11 with E_xy the output-parity correlator."""
    zero = Fraction(0) if box.exact else 0.0
    total = zero
    for x in (0, 1):
        for y in (0, 1):
            corr = zero
            for a in (0, 1):
                for b in (0, 1):
                    s = 1 if (a ^ b) == 0 else -1
                    corr += s * box.entries[index(a, b, x, y)]
            total += -corr if (x and y) else corr
    return total


@dataclass(frozen=True)
class Relabelling:
    """Local symmetry: flip inputs, flip outputs conditioned on the new input.

    Acts by q(a,b|x,y) = p(a + add_a[x], b + add_b[y] | x + flip_x, y + flip_y)
    with all additions mod 2.  There are 64 such maps and they form a group.
    """

    flip_x: int = 0
    flip_y: int = 0
    add_a: tuple[int, int] = (0, 0)
    add_b: tuple[int, int] = (0, 0)

    def permutation(self) -> tuple[int, ...]:
        """perm with q[i] = p[perm[i]] for every box."""
        out = []
        for i in range(16):
            a, b, x, y = unindex(i)
            out.append(
                index(a ^ self.add_a[x], b ^ self.add_b[y], x ^ self.flip_x, y ^ self.flip_y)
            )
        return tuple(out)

    def apply(self, box: NSBox) -> NSBox:
        perm = self.permutation()
        return NSBox(tuple(box.entries[j] for j in perm), exact=box.exact)

    def inverse(self) -> "Relabelling":
        u, v = self.flip_x, self.flip_y
        return Relabelling(
            flip_x=u,
            flip_y=v,
            add_a=(self.add_a[0 ^ u], self.add_a[1 ^ u]),
            add_b=(self.add_b[0 ^ v], self.add_b[1 ^ v]),
        )

    def as_dict(self) -> dict:
        return {
            "flip_x": self.flip_x,
            "flip_y": self.flip_y,
            "add_a": list(self.add_a),
            "add_b": list(self.add_b),
        }


def all_relabellings() -> list[Relabelling]:
    """The 64 local relabellings, identity first."""
    out = []
    for u, v, a0, a1, b0, b1 in itertools.product((0, 1), repeat=6):
        out.append(Relabelling(u, v, (a0, a1), (b0, b1)))
    return out


@functools.cache
def enumerate_ns_vertices() -> tuple[NSBox, ...]:
    """All vertices of the no-signaling polytope.

    Enumerates basic feasible solutions of the rank-8 equality system with
    nonnegative entries: every 8-column basis is solved exactly and kept when
    the solution is feasible.  Yields the 16 local vertices plus 8 of
    pr-box type.
    """
    rows, rhs = _ns_equality_rows()
    found = set()
    for cols in itertools.combinations(range(16), 8):
        square = [[rows[r][c] for c in cols] for r in range(8)]
        sol = lp.solve_square(square, rhs)
        if sol is None or any(s < 0 for s in sol):
            continue
        full = [Fraction(0)] * 16
        for c, s in zip(cols, sol):
            full[c] = s
        found.add(tuple(full))
    return tuple(NSBox(e) for e in sorted(found, reverse=True))


def _face_vertices(zero_coords: Sequence[int]) -> list[NSBox]:
    return [
        v
        for v in enumerate_ns_vertices()
        if all(v.entries[i] == 0 for i in zero_coords)
    ]


def hardy_face_vertices() -> list[NSBox]:
    """Vertices of the no-signaling polytope with the three hardy zeros."""
    return _face_vertices(HARDY_ZEROS)


def cabello_face_vertices() -> list[NSBox]:
    return _face_vertices(CABELLO_ZEROS)


def _random_face_mix(rng, verts: list[NSBox], forced: int, boost: int = 0) -> NSBox:
    """Random rational convex mix of face vertices with a guaranteed share of
    the `forced` vertex."""
    weights = [int(rng.integers(0, 100)) for _ in verts]
    weights[forced] += (1 + int(rng.integers(0, 100))) << boost
    total = sum(weights)
    ent = [
        sum(Fraction(w) * v.entries[i] for w, v in zip(weights, verts)) / total
        for i in range(16)
    ]
    return NSBox(tuple(ent))


def random_hardy_box(rng) -> NSBox:
    """Exact random box satisfying the hardy zeros with a strictly positive
    p(0,0|0,0): convex mix over the hardy face with nonzero pr-box weight."""
    verts = hardy_face_vertices()
    pr = pr_box()
    forced = next(i for i, v in enumerate(verts) if v == pr)
    return _random_face_mix(rng, verts, forced)


def random_cabello_box(rng) -> NSBox:
    """Exact random box satisfying the cabello zeros with gain > loss."""
    verts = cabello_face_vertices()
    pr = pr_box()
    forced = next(i for i, v in enumerate(verts) if v == pr)
    for boost in range(64):
        # retries skew toward the pr box until gain > loss holds
        box = _random_face_mix(rng, verts, forced, boost=boost)
        gl = cabello_check(box)
        if gl is not None and gl[0] > gl[1]:
            return box
    raise RuntimeError("failed to sample a cabello box")  # pragma: no cover


def local_membership(box: NSBox, tol: float = DEFAULT_TOL) -> lp.MembershipResult:
    """Certified test against the local polytope.

    Exact boxes are decided exactly; float boxes are rationalized and decided
    against a tol-fattened hull, so a separation certificate survives the
    numerical noise.
    """
    verts = [v.entries for v in enumerate_local_vertices()]
    exact = box.as_exact()
    t = Fraction(0) if box.exact else Fraction(tol).limit_denominator(10**12)
    return lp.membership(exact.entries, verts, tol=t)


def box_to_json(box: NSBox) -> dict:
    if box.exact:
        entries = [str(e) for e in box.entries]
    else:
        entries = list(box.entries)
    return {"entries": entries, "exact": box.exact}


def box_from_json(data: dict) -> NSBox:
    entries = data["entries"]
    exact = bool(data.get("exact", True))
    if exact:
        return NSBox(tuple(Fraction(str(e)) for e in entries))
    return NSBox(tuple(float(e) for e in entries), exact=False)


def load_box(path: str) -> NSBox:
    with open(path) as fh:
        return box_from_json(json.load(fh))
