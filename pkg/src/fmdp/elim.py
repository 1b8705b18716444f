"""Variable elimination for maximizing a sum of scoped functions.

Computes max over all full states of sum(f(x) for f in fs) without touching
the full joint space: variables are eliminated one at a time along a fixed
order, each step replacing the functions that mention the variable by their
locally maximized combination.  Values live in the extended rationals, where
negative infinity marks assignments excluded by indicator functions.

``explicit_max`` is the deliberately inefficient reference that enumerates
every full state; tests hold the two implementations against each other.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import InvalidInputError
from .factored import EMPTY_STATE, PartialState, ScopedFn, assignments
from .values import NEG_INF, ExtReal, ext_sum, fin

__all__ = [
    "ElimState",
    "elim_step",
    "max_sum",
    "max_sum_decode",
    "explicit_max",
    "identity_order",
    "min_degree_order",
]


@dataclass(frozen=True, slots=True)
class ElimState:
    """Worklist of not-yet-combined functions after ``iteration`` steps."""

    iteration: int
    worklist: tuple[ScopedFn, ...]


def identity_order(n: int) -> tuple[int, ...]:
    return tuple(range(n))


def min_degree_order(scopes: Iterable[Sequence[int]], n: int) -> tuple[int, ...]:
    """Greedy minimum-degree elimination order for the given scope family.

    Builds the interaction graph (variables adjacent when they share a
    scope), then repeatedly eliminates a variable with the fewest live
    neighbors, connecting those neighbors into a clique.  Ties break toward
    the lowest variable index, so the order is deterministic.
    """
    neighbors: dict[int, set[int]] = {v: set() for v in range(n)}
    for scope in scopes:
        for u in scope:
            for v in scope:
                if u != v:
                    neighbors[u].add(v)
    alive = set(range(n))
    order: list[int] = []
    while alive:
        v = min(alive, key=lambda u: (len(neighbors[u] & alive), u))
        order.append(v)
        clique = neighbors[v] & alive
        for u in clique:
            neighbors[u] |= clique - {u}
        alive.remove(v)
    return tuple(order)


def _check_inputs(fs: Sequence[ScopedFn], order: Sequence[int], dims: Sequence[int]) -> None:
    n = len(dims)
    if sorted(order) != list(range(n)):
        raise InvalidInputError(f"order {order!r} is not a permutation of 0..{n - 1}")
    for f in fs:
        if any(v < 0 or v >= n for v in f.scope):
            raise InvalidInputError(f"scope {f.scope!r} outside the {n}-variable space")


def elim_step(dims: Sequence[int], order: Sequence[int], state: ElimState) -> ElimState:
    """Eliminate the next variable of ``order`` from the worklist.

    The functions mentioning the variable are replaced by a single function
    over the union of their scopes minus the variable, holding the maximum
    over the variable's domain of their sum.  When nothing mentions the
    variable, the replacement degenerates to the constant zero (empty sum),
    keeping the step total.
    """
    var = order[state.iteration]
    dependent = [f for f in state.worklist if var in f.scope]
    rest = [f for f in state.worklist if var not in f.scope]
    if not dependent:
        combined = ScopedFn.constant(fin(0))
    else:
        joint: set[int] = set()
        for f in dependent:
            joint.update(f.scope)
        joint.discard(var)

        def local_max(z: PartialState) -> ExtReal:
            return max(
                ext_sum(f(z.override(PartialState(((var, y),)))) for f in dependent)
                for y in range(dims[var])
            )

        combined = ScopedFn.tabulate(joint, dims, local_max)
    return ElimState(state.iteration + 1, tuple(rest) + (combined,))


def max_sum(fs: Sequence[ScopedFn], order: Sequence[int], dims: Sequence[int]) -> ExtReal:
    """Maximum over all full states of the sum of ``fs``.

    Runs one elimination step per variable, after which every scope is empty,
    and adds up the surviving constants.  The result is negative infinity
    exactly when every full state is excluded.
    """
    _check_inputs(fs, order, dims)
    state = ElimState(0, tuple(fs))
    for _ in range(len(dims)):
        state = elim_step(dims, order, state)
    return ext_sum(f(EMPTY_STATE) for f in state.worklist)


def max_sum_decode(
    fs: Sequence[ScopedFn], order: Sequence[int], dims: Sequence[int]
) -> tuple[ExtReal, PartialState]:
    """Like ``max_sum`` but also returns a full state attaining the maximum.

    Each elimination step records which value of the eliminated variable won
    for every assignment of the replacement's scope; walking those tables
    backwards reconstructs an argmax.  When the maximum is negative infinity
    the returned state is still a valid full state (every state is equally
    excluded, so an arbitrary consistent choice is fine).
    """
    _check_inputs(fs, order, dims)
    worklist = tuple(fs)
    choices: list[tuple[int, ScopedFn | None]] = []
    for step in range(len(dims)):
        var = order[step]
        dependent = [f for f in worklist if var in f.scope]
        rest = tuple(f for f in worklist if var not in f.scope)
        if not dependent:
            choices.append((var, None))
            worklist = rest + (ScopedFn.constant(fin(0)),)
            continue
        joint: set[int] = set()
        for f in dependent:
            joint.update(f.scope)
        joint.discard(var)

        def best_value_and_choice(z: PartialState) -> tuple[ExtReal, int]:
            best: tuple[ExtReal, int] | None = None
            for y in range(dims[var]):
                total = ext_sum(
                    f(z.override(PartialState(((var, y),)))) for f in dependent
                )
                if best is None or best[0] < total:
                    best = (total, y)
            assert best is not None
            return best

        paired = ScopedFn.tabulate(joint, dims, best_value_and_choice)
        choices.append((var, paired.map_table(lambda p: p[1])))
        worklist = rest + (paired.map_table(lambda p: p[0]),)
    value = ext_sum(f(EMPTY_STATE) for f in worklist)
    witness = EMPTY_STATE
    for var, choice in reversed(choices):
        y = 0 if choice is None else choice(witness)
        witness = witness.override(PartialState(((var, y),)))
    return value, witness


def explicit_max(fs: Sequence[ScopedFn], dims: Sequence[int]) -> ExtReal:
    """Brute-force maximum over every full state; the oracle for ``max_sum``."""
    best: ExtReal | None = None
    for x in assignments(range(len(dims)), dims):
        total = ext_sum(f(x) for f in fs)
        if best is None or best < total:
            best = total
    if best is None:
        return NEG_INF
    return best
