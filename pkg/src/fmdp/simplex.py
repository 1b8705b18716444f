"""Exact two-phase primal simplex over rationals.

Free variables are split into nonnegative pairs, every row gets a slack,
rows are sign-flipped so right-hand sides start nonnegative, and one
artificial variable per row seeds the basis.  Bland's rule (lowest
eligible column enters, ties on the ratio test broken by the lowest basic
index) guarantees termination without cycling.

Artificial columns are kept through both phases but never re-enter the
basis.  Their reduced costs express the pricing functional in original row
coordinates, which is where every certificate comes from: Farkas vectors
from the phase-one objective row when the artificial optimum stays
positive, dual optima from the phase-two objective row, and rays straight
from an entering column with no positive entries.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import LpInternalError
from .lp import Certificate, Infeasible, Optimal, StdLp, Unbounded

__all__ = ["solve_lp"]

_ZERO = Fraction(0)
_ONE = Fraction(1)


def solve_lp(std: StdLp, stats: dict | None = None) -> Certificate:
    """Solve `min c^T x, A x <= b` exactly and certify the outcome.

    Certificates follow the package-wide dual convention
    `max -b^T y, A^T y = -c, y >= 0`.  When ``stats`` is given, pivot
    counts and tableau dimensions are recorded in it.
    """
    n = std.num_cols
    m = std.num_rows
    u0, v0, s0, a0 = 0, n, 2 * n, 2 * n + m
    ncols = 2 * n + 2 * m

    sigma = [1 if b >= 0 else -1 for b in std.rhs]
    rows: list[list[Fraction]] = []
    rhs: list[Fraction] = []
    basis: list[int] = []
    for i, sparse in enumerate(std.rows):
        row = [_ZERO] * ncols
        sg = sigma[i]
        for j, q in sparse:
            row[u0 + j] = sg * q
            row[v0 + j] = -sg * q
        row[s0 + i] = Fraction(sg)
        row[a0 + i] = _ONE
        rows.append(row)
        rhs.append(sg * std.rhs[i])
        basis.append(a0 + i)

    counts = {"phase1": 0, "phase2": 0, "driveout": 0}

    def pivot(r: int, e: int, objective: list[Fraction] | None) -> None:
        p = rows[r][e]
        if p != 0 and p != 1:
            inv = 1 / p
            rows[r] = [q * inv for q in rows[r]]
            rhs[r] = rhs[r] * inv
        for k in range(len(rows)):
            if k == r:
                continue
            f = rows[k][e]
            if f == 0:
                continue
            pr = rows[r]
            rows[k] = [a - f * b for a, b in zip(rows[k], pr)]
            rhs[k] = rhs[k] - f * rhs[r]
        if objective is not None:
            f = objective[e]
            if f != 0:
                pr = rows[r]
                objective[:] = [a - f * b for a, b in zip(objective, pr)]
        basis[r] = e

    def run(objective: list[Fraction], phase: str) -> int | None:
        """Iterate to optimality; return the entering column on unboundedness."""
        while True:
            enter = None
            for j in range(a0):
                if objective[j] < 0:
                    enter = j
                    break
            if enter is None:
                return None
            leave = None
            best: tuple[Fraction, int] | None = None
            for r in range(len(rows)):
                t = rows[r][enter]
                if t > 0:
                    key = (rhs[r] / t, basis[r])
                    if best is None or key < best:
                        best = key
                        leave = r
            if leave is None:
                return enter
            pivot(leave, enter, objective)
            counts[phase] += 1

    # Phase one: minimize the artificial sum from the all-artificial basis.
    z1 = [_ZERO] * ncols
    for j in range(ncols):
        total = _ZERO
        for r in range(len(rows)):
            total += rows[r][j]
        z1[j] = (_ONE if j >= a0 else _ZERO) - total
    blocked = run(z1, "phase1")
    if blocked is not None:
        raise LpInternalError("artificial phase cannot be unbounded")

    art_value = _ZERO
    for r in range(len(rows)):
        if basis[r] >= a0:
            art_value += rhs[r]
    if art_value > 0:
        farkas = tuple(sigma[i] * (z1[a0 + i] - _ONE) for i in range(m))
        _record(stats, counts, len(rows), ncols)
        return Infeasible(farkas)

    # Evict artificials still sitting in the basis at value zero.  Such a
    # row always offers a real pivot: expressing it as a combination of
    # input rows, the weight on its own is one (the basic artificial
    # column is a unit vector), so its own slack appears with coefficient
    # +1 or -1.  Pivoting at value zero preserves feasibility either way.
    for r in range(len(rows)):
        if basis[r] >= a0:
            enter = next((j for j in range(a0) if rows[r][j] != 0), None)
            if enter is None:
                raise LpInternalError("dependent row lost its slack column")
            pivot(r, enter, None)
            counts["driveout"] += 1

    # Phase two: the real objective, artificial columns still priced but
    # barred from entering.
    cvec = [_ZERO] * ncols
    for j, q in std.objective:
        cvec[u0 + j] += q
        cvec[v0 + j] -= q
    z2 = list(cvec)
    for r in range(len(rows)):
        cb = cvec[basis[r]]
        if cb != 0:
            pr = rows[r]
            z2 = [a - cb * b for a, b in zip(z2, pr)]
    blocked = run(z2, "phase2")
    _record(stats, counts, len(rows), ncols)

    values = [_ZERO] * ncols
    for r in range(len(rows)):
        values[basis[r]] = rhs[r]
    point = tuple(values[u0 + j] - values[v0 + j] for j in range(n))

    if blocked is not None:
        delta = [_ZERO] * ncols
        delta[blocked] = _ONE
        for r in range(len(rows)):
            delta[basis[r]] = -rows[r][blocked]
        ray = tuple(delta[u0 + j] - delta[v0 + j] for j in range(n))
        return Unbounded(point, ray)

    dual = tuple(sigma[i] * z2[a0 + i] for i in range(m))
    return Optimal(point, dual)


def _record(stats: dict | None, counts: dict, live_rows: int, ncols: int) -> None:
    if stats is None:
        return
    stats["pivots_phase1"] = counts["phase1"]
    stats["pivots_phase2"] = counts["phase2"]
    stats["pivots_driveout"] = counts["driveout"]
    stats["pivots"] = counts["phase1"] + counts["phase2"] + counts["driveout"]
    stats["rows"] = live_rows
    stats["cols"] = ncols
