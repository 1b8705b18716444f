"""Independent certificate checkers.

Each check replays the defining inequalities of its certificate against a
standard-form program and reports a plain boolean.  Nothing here trusts
the solver: a certificate that fails any condition is rejected no matter
where it came from.

Two arithmetic backends are available.  The default reduces through
``Fraction``.  With ``normalized=False`` every value is carried as an
unreduced numerator/denominator pair with positive denominator and
comparisons cross-multiply, so no gcd is ever taken; useful as an
independent path when the reduced arithmetic itself is under suspicion.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

from .errors import InvalidInputError
from .lp import StdLp

__all__ = ["check_optimality", "check_infeasible", "check_unbounded"]


@dataclass(frozen=True)
class _Arith:
    conv: Callable
    zero: object
    add: Callable
    mul: Callable
    le: Callable
    lt: Callable
    eq: Callable


def _raw_le(a: tuple[int, int], b: tuple[int, int]) -> bool:
    return a[0] * b[1] <= b[0] * a[1]


_FRACTIONS = _Arith(
    conv=lambda q: q,
    zero=Fraction(0),
    add=lambda a, b: a + b,
    mul=lambda a, b: a * b,
    le=lambda a, b: a <= b,
    lt=lambda a, b: a < b,
    eq=lambda a, b: a == b,
)

_RAW_PAIRS = _Arith(
    conv=lambda q: (q.numerator, q.denominator),
    zero=(0, 1),
    add=lambda a, b: (a[0] * b[1] + b[0] * a[1], a[1] * b[1]),
    mul=lambda a, b: (a[0] * b[0], a[1] * b[1]),
    le=_raw_le,
    lt=lambda a, b: a[0] * b[1] < b[0] * a[1],
    eq=lambda a, b: a[0] * b[1] == b[0] * a[1],
)


def _arith(normalized: bool) -> _Arith:
    return _FRACTIONS if normalized else _RAW_PAIRS


def _require_len(name: str, vec: Sequence, want: int) -> None:
    if len(vec) != want:
        raise InvalidInputError(f"{name} has length {len(vec)}, expected {want}")


def _row_values(std: StdLp, x: Sequence, ar: _Arith) -> list:
    out = []
    for sparse in std.rows:
        acc = ar.zero
        for j, q in sparse:
            acc = ar.add(acc, ar.mul(ar.conv(q), x[j]))
        out.append(acc)
    return out


def _objective_value(std: StdLp, x: Sequence, ar: _Arith):
    acc = ar.zero
    for j, q in std.objective:
        acc = ar.add(acc, ar.mul(ar.conv(q), x[j]))
    return acc


def _transpose_times(std: StdLp, y: Sequence, ar: _Arith) -> list:
    out = [ar.zero] * std.num_cols
    for i, sparse in enumerate(std.rows):
        yi = y[i]
        for j, q in sparse:
            out[j] = ar.add(out[j], ar.mul(ar.conv(q), yi))
    return out


def check_optimality(
    std: StdLp,
    primal: Sequence[Fraction],
    dual: Sequence[Fraction],
    *,
    normalized: bool = True,
) -> bool:
    """Verify a claimed optimal pair.

    Requires primal feasibility, dual feasibility under the convention
    `max -b^T y, A^T y = -c, y >= 0`, and exact objective equality
    `c^T x = -b^T y`.
    """
    _require_len("primal", primal, std.num_cols)
    _require_len("dual", dual, std.num_rows)
    ar = _arith(normalized)
    x = [ar.conv(q) for q in primal]
    y = [ar.conv(q) for q in dual]
    b = [ar.conv(q) for q in std.rhs]
    for lhs, rhs in zip(_row_values(std, x, ar), b):
        if not ar.le(lhs, rhs):
            return False
    for yi in y:
        if not ar.le(ar.zero, yi):
            return False
    c = [ar.zero] * std.num_cols
    for j, q in std.objective:
        c[j] = ar.add(c[j], ar.conv(q))
    for lhs, cj in zip(_transpose_times(std, y, ar), c):
        if not ar.eq(ar.add(lhs, cj), ar.zero):
            return False
    primal_obj = _objective_value(std, x, ar)
    dual_obj = ar.zero
    for bi, yi in zip(b, y):
        dual_obj = ar.add(dual_obj, ar.mul(bi, yi))
    return ar.eq(ar.add(primal_obj, dual_obj), ar.zero)


def check_infeasible(
    std: StdLp,
    farkas: Sequence[Fraction],
    *,
    normalized: bool = True,
) -> bool:
    """Verify a Farkas vector: y >= 0, A^T y = 0, and b^T y < 0."""
    _require_len("farkas", farkas, std.num_rows)
    ar = _arith(normalized)
    y = [ar.conv(q) for q in farkas]
    for yi in y:
        if not ar.le(ar.zero, yi):
            return False
    for entry in _transpose_times(std, y, ar):
        if not ar.eq(entry, ar.zero):
            return False
    pairing = ar.zero
    for bi, yi in zip(std.rhs, y):
        pairing = ar.add(pairing, ar.mul(ar.conv(bi), yi))
    return ar.lt(pairing, ar.zero)


def check_unbounded(
    std: StdLp,
    point: Sequence[Fraction],
    ray: Sequence[Fraction],
    *,
    normalized: bool = True,
) -> bool:
    """Verify an unboundedness witness: a feasible point plus a ray with
    A r <= 0 and c^T r < 0."""
    _require_len("point", point, std.num_cols)
    _require_len("ray", ray, std.num_cols)
    ar = _arith(normalized)
    x = [ar.conv(q) for q in point]
    r = [ar.conv(q) for q in ray]
    for lhs, rhs in zip(_row_values(std, x, ar), std.rhs):
        if not ar.le(lhs, ar.conv(rhs)):
            return False
    for entry in _row_values(std, r, ar):
        if not ar.le(entry, ar.zero):
            return False
    return ar.lt(_objective_value(std, r, ar), ar.zero)
