"""Weight fitting by cutting planes, certified against the full program.

The full program per branch block is far too wide to hand a dense solver,
but its projection onto (phi, w) is what actually matters.  So a small
master program over (phi, w) collects one cut per violated block per
round: pricing a block at the master optimum is a numeric elimination
sweep, and its argmax yields the affine inequality the master was
missing.  A box trust region keeps the early masters bounded; whenever a
box row carries positive dual weight at convergence the box grows and
pricing resumes, since a binding box could be hiding the true optimum.

Convergence alone is not trusted.  The finished point is lifted to a full
primal solution (private variables recomputed by forward elimination,
entries pinned nowhere pushed far enough down that every summary row
still holds) and the master duals are propagated backwards along each
cut's argmax path into a full dual vector.  The pair must then survive
``check_optimality`` on the complete standard form; anything less raises
``LpInternalError``.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .certify import check_optimality
from .elim import identity_order, max_sum_decode
from .errors import LpInternalError
from .factored import EMPTY_STATE, PartialState, assignments, restrict
from .lp import PHI, Constraint, FnId, FnVar, Lp, Optimal, Weight, make_constraint, to_standard_form
from .lpbuild import TagBlock, assemble_lp, weight_lp_blocks
from .model import FactoredMdp, Weights
from .policy import DecisionList
from .simplex import solve_lp
from .values import ExtReal, ext_sum, fin

__all__ = ["update_weights"]

_INITIAL_BOX = Fraction(1024)
_BOX_GROWTH = 16
_MAX_BOX_GROWTHS = 40
_MAX_ROUNDS = 10000


@dataclass(frozen=True)
class _Cut:
    block_index: int
    witness: PartialState
    alpha: tuple[Fraction, ...]
    beta: Fraction


def _price(block: TagBlock, w: Sequence[Fraction], order, dims) -> tuple[ExtReal, PartialState]:
    fns = [
        c.map_table(lambda q, wi=wi: fin(wi * q))
        for wi, c in zip(w, block.c_fns)
    ] + list(block.b_fns)
    return max_sum_decode(fns, order, dims)


def _cut_at(block_index: int, block: TagBlock, x: PartialState) -> _Cut:
    alpha = tuple(c(restrict(x, c.scope)) for c in block.c_fns)
    parts = [b(restrict(x, b.scope)) for b in block.b_fns]
    total = ext_sum(parts)
    if not total.is_finite:
        raise LpInternalError("cut witness passed through an excluded state")
    return _Cut(block_index, x, alpha, total.unwrap())


def _master_lp(m: int, box: Fraction, cuts: Sequence[_Cut]) -> Lp:
    cons = []
    for i in range(m):
        cons.append(make_constraint("le", {Weight(i): Fraction(1)}, box))
        cons.append(make_constraint("le", {Weight(i): Fraction(-1)}, box))
    for cut in cuts:
        coefs: dict = {PHI: Fraction(-1)}
        for i, a in enumerate(cut.alpha):
            coefs[Weight(i)] = coefs.get(Weight(i), Fraction(0)) + a
        cons.append(make_constraint("le", coefs, -cut.beta))
    return Lp(tuple(cons), PHI)


def update_weights(
    mdp: FactoredMdp,
    pol: DecisionList,
    order: Sequence[int] | None = None,
    *,
    trace: dict | None = None,
) -> tuple[Weights, Fraction]:
    """Best linear value weights for a fixed decision list.

    Returns the minimizing weights together with the optimal bound phi.
    The result is exact and certified; see the module notes for how.
    """
    if order is None:
        order = identity_order(len(mdp.dims))
    order = tuple(order)
    dims = mdp.dims
    m = len(mdp.basis)
    started = time.perf_counter()
    blocks = weight_lp_blocks(mdp, pol, order)

    cuts: list[_Cut] = []
    keys: set[tuple] = set()

    def consider(idx: int, witness: PartialState) -> bool:
        cut = _cut_at(idx, blocks[idx], witness)
        key = (cut.alpha, cut.beta)
        if key in keys:
            return False
        keys.add(key)
        cuts.append(cut)
        return True

    zero = tuple(Fraction(0) for _ in range(m))
    for idx, block in enumerate(blocks):
        value, witness = _price(block, zero, order, dims)
        if value.is_finite:
            consider(idx, witness)
    if not cuts:
        raise LpInternalError("no branch block admits any state")

    box = _INITIAL_BOX
    growths = 0
    rounds = 0
    while True:
        rounds += 1
        if rounds > _MAX_ROUNDS:
            raise LpInternalError("cut generation failed to converge")
        master_std = to_standard_form(_master_lp(m, box, cuts))
        cert = solve_lp(master_std)
        if not isinstance(cert, Optimal):
            raise LpInternalError(f"master program came back {type(cert).__name__}")
        if not check_optimality(master_std, cert.primal, cert.dual):
            raise LpInternalError("master certificate failed verification")
        phi = cert.primal[master_std.col_of[PHI]]
        w = tuple(
            cert.primal[master_std.col_of[Weight(i)]] if Weight(i) in master_std.col_of else Fraction(0)
            for i in range(m)
        )
        progressed = False
        for idx, block in enumerate(blocks):
            value, witness = _price(block, w, order, dims)
            if value > fin(phi):
                if not consider(idx, witness):
                    raise LpInternalError("violated block repeated an existing cut")
                progressed = True
        if progressed:
            continue
        box_binding = any(cert.dual[r] > 0 for r in range(2 * m))
        if box_binding:
            growths += 1
            if growths > _MAX_BOX_GROWTHS:
                raise LpInternalError("trust region kept binding after repeated growth")
            box *= _BOX_GROWTH
            continue
        cut_duals = tuple(cert.dual[2 * m + k] for k in range(len(cuts)))
        break

    full_lp = assemble_lp(blocks)
    std = to_standard_form(full_lp)
    primal = _complete_primal(std, blocks, phi, w, dims)
    dual = _lift_dual(full_lp, std, blocks, cuts, cut_duals)
    lp_seconds = time.perf_counter() - started
    if not check_optimality(std, primal, dual):
        raise LpInternalError("assembled certificate failed verification")
    if trace is not None:
        trace["rounds"] = rounds
        trace["cuts"] = len(cuts)
        trace["box_growths"] = growths
        trace["blocks"] = len(blocks)
        trace["lp_rows"] = std.num_rows
        trace["lp_cols"] = std.num_cols
        trace["lp_seconds"] = lp_seconds
        trace["certificate"] = Optimal(primal, dual)
        trace["std"] = std
        trace["lp"] = full_lp
    return w, phi


def _block_tables(
    block: TagBlock, w: Sequence[Fraction], phi: Fraction, dims: tuple[int, ...]
) -> dict[FnId, dict[tuple, Fraction]]:
    """Exact values for every private variable of one block.

    Entries that the program leaves unpinned start at a stand-in far below
    everything finite; if the summary row still ends up above phi the
    stand-in doubles until it does not.
    """
    reach = abs(phi) + 1
    for wi, c in zip(w, block.c_fns):
        reach += max((abs(wi * q) for q in c.table), default=Fraction(0))
    for b in block.b_fns:
        reach += max((abs(v.unwrap()) for v in b.table if v.is_finite), default=Fraction(0))
    stand_in = -reach
    while True:
        tables: dict[FnId, dict[tuple, Fraction]] = {}
        for i, c in enumerate(block.c_fns):
            tables[FnId("c", i)] = {
                z.items: w[i] * c(z) for z in assignments(c.scope, dims)
            }
        for j, b in enumerate(block.b_fns):
            tables[FnId("b", j)] = {
                z.items: (v.unwrap() if (v := b(z)).is_finite else stand_in)
                for z in assignments(b.scope, dims)
            }
        for rnd in block.rounds:
            table: dict[tuple, Fraction] = {}
            for z in assignments(rnd.scope_e, dims):
                best: Fraction | None = None
                for xl in range(dims[rnd.var]):
                    ext = z.override(PartialState.of({rnd.var: xl}))
                    total = Fraction(0)
                    for dep_id, dep_scope in rnd.dependents:
                        total += tables[dep_id][restrict(ext, dep_scope).items]
                    if best is None or total > best:
                        best = total
                table[z.items] = best if best is not None else Fraction(0)
            tables[FnId("e", rnd.var)] = table
        summary = sum((tables[fid][()] for fid in block.final_fns), Fraction(0))
        if summary <= phi:
            return tables
        stand_in *= 2


def _complete_primal(
    std,
    blocks: Sequence[TagBlock],
    phi: Fraction,
    w: Sequence[Fraction],
    dims: tuple[int, ...],
) -> tuple[Fraction, ...]:
    primal = [Fraction(0)] * std.num_cols
    primal[std.col_of[PHI]] = phi
    for i, wi in enumerate(w):
        col = std.col_of.get(Weight(i))
        if col is not None:
            primal[col] = wi
    for block in blocks:
        tables = _block_tables(block, w, phi, dims)
        for fid, table in tables.items():
            for z_items, value in table.items():
                col = std.col_of.get(FnVar(block.tag, fid, PartialState(z_items)))
                if col is not None:
                    primal[col] = value
    return tuple(primal)


def _lift_dual(
    full_lp: Lp,
    std,
    blocks: Sequence[TagBlock],
    cuts: Sequence[_Cut],
    cut_duals: Sequence[Fraction],
) -> tuple[Fraction, ...]:
    row_of: dict[Constraint, tuple[int, ...]] = {}
    for k, con in enumerate(full_lp.constraints):
        row_of[con] = std.constraint_rows[k]
    dual = [Fraction(0)] * std.num_rows

    for cut, lam in zip(cuts, cut_duals):
        if lam == 0:
            continue
        block = blocks[cut.block_index]
        tag = block.tag
        x = cut.witness
        gen = _gen_constraint(block)
        dual[row_of[gen][0]] += lam
        demand: dict[FnId, Fraction] = {fid: lam for fid in block.final_fns}
        for rnd in reversed(block.rounds):
            fid = FnId("e", rnd.var)
            flow = demand.pop(fid, Fraction(0))
            if flow == 0:
                continue
            z = restrict(x, rnd.scope_e)
            xl = x.value(rnd.var)
            ext = z.override(PartialState.of({rnd.var: xl}))
            coefs: list[tuple[FnVar, Fraction]] = [(FnVar(tag, fid, z), Fraction(-1))]
            for dep_id, dep_scope in rnd.dependents:
                coefs.append((FnVar(tag, dep_id, restrict(ext, dep_scope)), Fraction(1)))
            rows = row_of[make_constraint("le", coefs, 0)]
            dual[rows[0]] += flow
            for dep_id, _ in rnd.dependents:
                demand[dep_id] = demand.get(dep_id, Fraction(0)) + flow
        for fid, flow in demand.items():
            if flow == 0:
                continue
            if fid.kind == "c":
                fn = block.c_fns[fid.idx]
                z = restrict(x, fn.scope)
                con = make_constraint(
                    "eq", [(FnVar(tag, fid, z), Fraction(-1)), (Weight(fid.idx), fn(z))], 0
                )
                dual[row_of[con][0]] += flow
            elif fid.kind == "b":
                fn = block.b_fns[fid.idx]
                z = restrict(x, fn.scope)
                val = fn(z)
                if not val.is_finite:
                    raise LpInternalError("dual flow reached an unpinned entry")
                con = make_constraint("eq", [(FnVar(tag, fid, z), Fraction(1))], val.unwrap())
                dual[row_of[con][1]] += flow
            else:
                raise LpInternalError(f"dual flow stranded on {fid}")
    return tuple(dual)


def _gen_constraint(block: TagBlock) -> Constraint:
    coefs: list[tuple[object, Fraction]] = [
        (FnVar(block.tag, fid, EMPTY_STATE), Fraction(1)) for fid in block.final_fns
    ]
    coefs.append((PHI, Fraction(-1)))
    return make_constraint("le", coefs, 0)
