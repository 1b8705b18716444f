"""Linear program data model shared by the builder, solver, and checkers.

Constraints are sparse rational rows over three kinds of variables: the
objective scalar phi, one weight per basis function, and private function
variables introduced by the factored construction.  Private variables carry
a tag naming the branch and sign half they belong to, so unions of
constraint sets from different branches never share them.

``to_standard_form`` flattens a constraint list to `minimize c^T x subject
to A x <= b` with free x, the only shape the simplex and the certificate
checkers speak.  Equalities become two adjacent rows.  The dual convention
is fixed once for the whole package: the dual of `min c^T x, Ax <= b` is
`max -b^T y, A^T y = -c, y >= 0`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Union

from .factored import PartialState

__all__ = [
    "Phi",
    "PHI",
    "Weight",
    "Tag",
    "FnId",
    "FnVar",
    "LpVar",
    "Constraint",
    "make_constraint",
    "Lp",
    "StdLp",
    "to_standard_form",
    "Optimal",
    "Infeasible",
    "Unbounded",
    "Certificate",
]


@dataclass(frozen=True, slots=True)
class Phi:
    """The objective scalar; a single shared instance is enough."""


PHI = Phi()


@dataclass(frozen=True, slots=True)
class Weight:
    i: int


@dataclass(frozen=True, slots=True)
class Tag:
    """Identity of one factored-LP invocation: branch state, action, sign."""

    t: PartialState
    action: int
    pos: bool


@dataclass(frozen=True, slots=True)
class FnId:
    """Which function a private variable tabulates.

    kind "c" with a basis index, "b" with a summand index, or "e" with the
    variable eliminated in the round that created it.
    """

    kind: str
    idx: int


@dataclass(frozen=True, slots=True)
class FnVar:
    tag: Tag
    fn: FnId
    z: PartialState


LpVar = Union[Phi, Weight, FnVar, str]


def _var_key(v: LpVar):
    if isinstance(v, Phi):
        return (0, 0)
    if isinstance(v, Weight):
        return (1, v.i)
    if isinstance(v, FnVar):
        return (
            2,
            (v.tag.t.items, v.tag.action, v.tag.pos, v.fn.kind, v.fn.idx, v.z.items),
        )
    return (3, str(v))


@dataclass(frozen=True, slots=True)
class Constraint:
    """A single row: sum of coef * var `kind` rhs, kind "le" or "eq".

    Coefficients are stored zero-free and canonically ordered, so two
    constraints are structurally equal exactly when they say the same thing.
    """

    kind: str
    coefs: tuple[tuple[LpVar, Fraction], ...]
    rhs: Fraction


def make_constraint(
    kind: str,
    coefs: Mapping[LpVar, Fraction] | Iterable[tuple[LpVar, Fraction]],
    rhs: Fraction | int,
) -> Constraint:
    if kind not in ("le", "eq"):
        raise ValueError(f"constraint kind {kind!r}")
    items = coefs.items() if isinstance(coefs, Mapping) else coefs
    acc: dict[LpVar, Fraction] = {}
    for v, q in items:
        acc[v] = acc.get(v, Fraction(0)) + q
    cleaned = [(v, q) for v, q in acc.items() if q != 0]
    cleaned.sort(key=lambda p: _var_key(p[0]))
    return Constraint(kind, tuple(cleaned), Fraction(rhs))


@dataclass(frozen=True)
class Lp:
    """Ordered constraints plus the variable to minimize."""

    constraints: tuple[Constraint, ...]
    objective: LpVar


@dataclass(frozen=True)
class StdLp:
    """`minimize c^T x subject to A x <= b`, x free, rows and c sparse.

    ``constraint_rows[k]`` lists the row indices produced by the k-th input
    constraint (one for an inequality, two adjacent for an equality), which
    lets duals built against the input constraints translate to row space.
    """

    columns: tuple[LpVar, ...]
    rows: tuple[tuple[tuple[int, Fraction], ...], ...]
    rhs: tuple[Fraction, ...]
    objective: tuple[tuple[int, Fraction], ...]
    constraint_rows: tuple[tuple[int, ...], ...]
    col_of: dict = field(compare=False, repr=False)

    @property
    def num_rows(self) -> int:
        return len(self.rows)

    @property
    def num_cols(self) -> int:
        return len(self.columns)


def to_standard_form(lp: Lp) -> StdLp:
    """Flatten to inequality form with a deterministic column order.

    The objective variable takes column 0; the rest follow in order of
    first appearance across the constraint list.
    """
    columns: list[LpVar] = [lp.objective]
    col_of: dict[LpVar, int] = {lp.objective: 0}
    for con in lp.constraints:
        for v, _ in con.coefs:
            if v not in col_of:
                col_of[v] = len(columns)
                columns.append(v)
    rows: list[tuple[tuple[int, Fraction], ...]] = []
    rhs: list[Fraction] = []
    constraint_rows: list[tuple[int, ...]] = []
    for con in lp.constraints:
        sparse = tuple(sorted(((col_of[v], q) for v, q in con.coefs)))
        produced = [len(rows)]
        rows.append(sparse)
        rhs.append(con.rhs)
        if con.kind == "eq":
            produced.append(len(rows))
            rows.append(tuple((j, -q) for j, q in sparse))
            rhs.append(-con.rhs)
        constraint_rows.append(tuple(produced))
    return StdLp(
        columns=tuple(columns),
        rows=tuple(rows),
        rhs=tuple(rhs),
        objective=((0, Fraction(1)),),
        constraint_rows=tuple(constraint_rows),
        col_of=col_of,
    )


@dataclass(frozen=True)
class Optimal:
    primal: tuple[Fraction, ...]
    dual: tuple[Fraction, ...]


@dataclass(frozen=True)
class Infeasible:
    farkas: tuple[Fraction, ...]


@dataclass(frozen=True)
class Unbounded:
    point: tuple[Fraction, ...]
    ray: tuple[Fraction, ...]


Certificate = Union[Optimal, Infeasible, Unbounded]
