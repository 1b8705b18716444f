"""Compact linear programs whose projection onto (phi, w) enforces
`sum_i w_i C_i(x) + sum_j B_j(x) <= phi` for every full assignment x,
without ever enumerating the assignments.

The trick mirrors variable elimination.  Each input function gets one
private variable per point of its scope, tied down by equalities; each
elimination round introduces a fresh function variable whose inequalities
say it dominates every one-variable extension of its dependents; a final
row says the surviving constants sum to at most phi.  Eliminating a
variable therefore costs rows proportional to the local joint scope, not
to the full state space.

Branch blocks come in mirrored pairs: the positive tag bounds how far the
linear value estimate can sit above the backed-up value on the branch's
states, the negative tag the other direction.  Negated indicator summands
release every state some earlier branch already claimed, because any
sum through minus infinity imposes nothing.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .elim import identity_order
from .errors import InvalidInputError, LpInternalError
from .error import indicator_fns
from .factored import EMPTY_STATE, PartialState, ScopedFn, assignments, instantiate, restrict
from .lp import PHI, Constraint, FnId, FnVar, Lp, Tag, Weight, make_constraint
from .model import FactoredMdp
from .policy import DecisionList
from .values import fin

__all__ = ["ElimRound", "TagBlock", "min_lp", "branch_lp", "weight_lp_blocks", "weight_lp"]


@dataclass(frozen=True)
class ElimRound:
    """One elimination round: the variable removed, the functions consumed
    with the scopes they had, and the scope of the replacement."""

    var: int
    dependents: tuple[tuple[FnId, tuple[int, ...]], ...]
    scope_e: tuple[int, ...]


@dataclass(frozen=True)
class TagBlock:
    """Everything one tag contributes: its summands, the elimination
    trace, and the finished constraint rows in generation order."""

    tag: Tag
    c_fns: tuple[ScopedFn, ...]
    b_fns: tuple[ScopedFn, ...]
    rounds: tuple[ElimRound, ...]
    final_fns: tuple[FnId, ...]
    constraints: tuple[Constraint, ...]


def _check_scope(name: str, fn: ScopedFn, dims: tuple[int, ...]) -> None:
    if any(v < 0 or v >= len(dims) for v in fn.scope):
        raise InvalidInputError(f"{name} scope {fn.scope} leaves 0..{len(dims) - 1}")
    want = tuple(dims[v] for v in fn.scope)
    if fn.card != want:
        raise InvalidInputError(f"{name} cardinalities {fn.card} do not match {want}")


def min_lp(
    dims: tuple[int, ...],
    tag: Tag,
    c_fns: tuple[ScopedFn, ...],
    b_fns: tuple[ScopedFn, ...],
    order: tuple[int, ...],
) -> TagBlock:
    """Build the constraint block for one tag.

    ``c_fns`` carry rational tables and enter scaled by their weight;
    ``b_fns`` carry extended-real tables and enter additively, with a
    minus-infinity entry simply leaving its variable unpinned.
    """
    if sorted(order) != list(range(len(dims))):
        raise InvalidInputError(f"order {order} is not a permutation of 0..{len(dims) - 1}")
    for i, fn in enumerate(c_fns):
        _check_scope(f"weighted summand {i}", fn, dims)
    for j, fn in enumerate(b_fns):
        _check_scope(f"constant summand {j}", fn, dims)

    cons: list[Constraint] = []
    for i, fn in enumerate(c_fns):
        fid = FnId("c", i)
        for z in assignments(fn.scope, dims):
            cons.append(
                make_constraint(
                    "eq", [(FnVar(tag, fid, z), Fraction(-1)), (Weight(i), fn(z))], 0
                )
            )
    for j, fn in enumerate(b_fns):
        fid = FnId("b", j)
        for z in assignments(fn.scope, dims):
            val = fn(z)
            if val.is_finite:
                cons.append(
                    make_constraint("eq", [(FnVar(tag, fid, z), Fraction(1))], val.unwrap())
                )

    live: list[tuple[FnId, tuple[int, ...]]] = [
        (FnId("c", i), fn.scope) for i, fn in enumerate(c_fns)
    ] + [(FnId("b", j), fn.scope) for j, fn in enumerate(b_fns)]
    rounds: list[ElimRound] = []
    for var in order:
        dependents = tuple(entry for entry in live if var in entry[1])
        joint: set[int] = set()
        for _, scope in dependents:
            joint.update(scope)
        joint.discard(var)
        scope_e = tuple(sorted(joint))
        fid = FnId("e", var)
        for z in assignments(scope_e, dims):
            for xl in range(dims[var]):
                ext = z.override(PartialState.of({var: xl}))
                coefs: list[tuple[FnVar, Fraction]] = [
                    (FnVar(tag, fid, z), Fraction(-1))
                ]
                for dep_id, dep_scope in dependents:
                    coefs.append((FnVar(tag, dep_id, restrict(ext, dep_scope)), Fraction(1)))
                cons.append(make_constraint("le", coefs, 0))
        live = [entry for entry in live if entry not in dependents]
        live.append((fid, scope_e))
        rounds.append(ElimRound(var, dependents, scope_e))

    if any(scope for _, scope in live):
        raise LpInternalError("elimination left a function with live variables")
    gen = [(FnVar(tag, fid, EMPTY_STATE), Fraction(1)) for fid, _ in live]
    gen.append((PHI, Fraction(-1)))
    cons.append(make_constraint("le", gen, 0))

    unique: list[Constraint] = []
    seen: set[Constraint] = set()
    for con in cons:
        if con not in seen:
            seen.add(con)
            unique.append(con)
    return TagBlock(
        tag=tag,
        c_fns=tuple(c_fns),
        b_fns=tuple(b_fns),
        rounds=tuple(rounds),
        final_fns=tuple(fid for fid, _ in live),
        constraints=tuple(unique),
    )


def _difference_fns(mdp: FactoredMdp, t: PartialState, a: int) -> tuple[ScopedFn, ...]:
    """The weighted summands h_i - gamma * g_i^a, instantiated by t."""
    out = []
    for i, h in enumerate(mdp.basis):
        g = mdp.g(i, a)
        joint = tuple(sorted(set(h.scope) | set(g.scope)))
        combined = ScopedFn.tabulate(
            joint, mdp.dims, lambda x, h=h, g=g: h(x) - mdp.discount * g(x)
        )
        out.append(instantiate(combined, t))
    return tuple(out)


def branch_lp(
    mdp: FactoredMdp,
    t: PartialState,
    a: int,
    ts: tuple[PartialState, ...],
    order: tuple[int, ...],
) -> tuple[TagBlock, TagBlock]:
    """The mirrored pair of blocks for one branch, given the branch states
    claimed earlier in the list."""
    if not 0 <= a < len(mdp.actions):
        raise InvalidInputError(f"action index {a} out of range")
    diffs = _difference_fns(mdp, t, a)
    rewards = tuple(instantiate(r, t).map_table(fin) for r in mdp.rewards[a])
    shadows = tuple(indicator_fns(ts, t, mdp.dims))
    pos = min_lp(
        mdp.dims,
        Tag(t, a, True),
        diffs,
        tuple(r.map_table(lambda v: -v if v.is_finite else v) for r in rewards) + shadows,
        order,
    )
    neg = min_lp(
        mdp.dims,
        Tag(t, a, False),
        tuple(d.map_table(lambda q: -q) for d in diffs),
        rewards + shadows,
        order,
    )
    return pos, neg


def weight_lp_blocks(
    mdp: FactoredMdp, pol: DecisionList, order: tuple[int, ...] | None = None
) -> tuple[TagBlock, ...]:
    if order is None:
        order = identity_order(len(mdp.dims))
    blocks: list[TagBlock] = []
    earlier: list[PartialState] = []
    for branch in pol.branches:
        pos, neg = branch_lp(mdp, branch.t, branch.action, tuple(earlier), order)
        blocks.extend((pos, neg))
        earlier.append(branch.t)
    return tuple(blocks)


def weight_lp(
    mdp: FactoredMdp, pol: DecisionList, order: tuple[int, ...] | None = None
) -> Lp:
    """The full program: minimize phi over the union of every branch block."""
    return assemble_lp(weight_lp_blocks(mdp, pol, order))


def assemble_lp(blocks: tuple[TagBlock, ...]) -> Lp:
    cons: list[Constraint] = []
    seen: set[Constraint] = set()
    for block in blocks:
        for con in block.constraints:
            if con not in seen:
                seen.add(con)
                cons.append(con)
    return Lp(tuple(cons), PHI)
