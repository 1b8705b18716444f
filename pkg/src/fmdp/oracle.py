"""Brute-force reference answers for small state spaces.

Everything here works on explicitly enumerated states, which is exactly
what the rest of the package exists to avoid.  That makes these routines
the measuring stick: slow, simple, and with no shared machinery beyond
the model accessors.  ``enumerate_states`` refuses state spaces past an
explicit limit, because the costs downstream range from quadratic
(backed-up values) to cubic (exact linear solves) in the state count.
"""

from __future__ import annotations

from fractions import Fraction
from math import prod
from typing import Sequence

from .errors import FmdpError, OracleLimitError
from .factored import PartialState, restrict
from .lp import PHI, Lp, Weight, make_constraint
from .model import FactoredMdp, Weights
from .policy import DecisionList, select_action

__all__ = [
    "enumerate_states",
    "explicit_q",
    "explicit_bellman_err",
    "explicit_weight_lp",
    "policy_value",
    "optimal_value",
]

DEFAULT_STATE_LIMIT = 4096


def enumerate_states(mdp: FactoredMdp, limit: int = DEFAULT_STATE_LIMIT) -> list[PartialState]:
    """All full states in table order, refusing oversized spaces."""
    count = prod(mdp.dims)
    if count > limit:
        raise OracleLimitError(
            f"state space has {count} states, above the limit of {limit}"
        )
    states: list[PartialState] = [PartialState(())]
    for var, dim in enumerate(mdp.dims):
        states = [
            s.override(PartialState(((var, val),))) for s in states for val in range(dim)
        ]
    return states


def _successors(mdp: FactoredMdp, a: int, x: PartialState) -> list[tuple[PartialState, Fraction]]:
    out: list[tuple[PartialState, Fraction]] = [(PartialState(()), Fraction(1))]
    for var in range(mdp.n):
        fn = mdp.transitions[a][var]
        dist = fn(restrict(x, fn.scope))
        step: list[tuple[PartialState, Fraction]] = []
        for partial, p in out:
            for val, q in enumerate(dist):
                if q != 0:
                    step.append((partial.override(PartialState(((var, val),))), p * q))
        out = step
    return out


def explicit_q(mdp: FactoredMdp, w: Weights, a: int, x: PartialState) -> Fraction:
    """One-step backup of the linear value estimate, by full expansion."""
    total = mdp.reward(a, x)
    for nxt, p in _successors(mdp, a, x):
        total += mdp.discount * p * mdp.nu_w(w, nxt)
    return total


def explicit_bellman_err(
    mdp: FactoredMdp, w: Weights, pol: DecisionList, limit: int = DEFAULT_STATE_LIMIT
) -> Fraction:
    """sup |Q_w(pi(x), x) - nu_w(x)| over every enumerated state."""
    best = Fraction(0)
    for x in enumerate_states(mdp, limit):
        a = select_action(pol, x)
        gap = abs(explicit_q(mdp, w, a, x) - mdp.nu_w(w, x))
        if gap > best:
            best = gap
    return best


def explicit_weight_lp(
    mdp: FactoredMdp, pol: DecisionList, limit: int = DEFAULT_STATE_LIMIT
) -> Lp:
    """The same feasible (phi, w) region as the compact construction, one
    mirrored pair of rows per enumerated state."""
    cons = []
    for x in enumerate_states(mdp, limit):
        a = select_action(pol, x)
        coef: list[Fraction] = []
        for i, h in enumerate(mdp.basis):
            expected = Fraction(0)
            for nxt, p in _successors(mdp, a, x):
                expected += p * h(restrict(nxt, h.scope))
            coef.append(h(restrict(x, h.scope)) - mdp.discount * expected)
        r = mdp.reward(a, x)
        above = {Weight(i): c for i, c in enumerate(coef)}
        above[PHI] = Fraction(-1)
        cons.append(make_constraint("le", above, r))
        below = {Weight(i): -c for i, c in enumerate(coef)}
        below[PHI] = Fraction(-1)
        cons.append(make_constraint("le", below, -r))
    return Lp(tuple(cons), PHI)


def _solve_exact(matrix: list[list[Fraction]], rhs: list[Fraction]) -> list[Fraction]:
    n = len(matrix)
    aug = [row[:] + [rhs[i]] for i, row in enumerate(matrix)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if pivot is None:
            raise FmdpError("singular linear system in value solve")
        aug[col], aug[pivot] = aug[pivot], aug[col]
        inv = 1 / aug[col][col]
        aug[col] = [q * inv for q in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [a - f * b for a, b in zip(aug[r], aug[col])]
    return [aug[r][n] for r in range(n)]


def _action_values(
    mdp: FactoredMdp, states: list[PartialState], act_of: Sequence[int]
) -> dict[PartialState, Fraction]:
    index = {x: k for k, x in enumerate(states)}
    n = len(states)
    matrix = [[Fraction(0)] * n for _ in range(n)]
    rhs = [Fraction(0)] * n
    for k, x in enumerate(states):
        a = act_of[k]
        matrix[k][k] += 1
        for nxt, p in _successors(mdp, a, x):
            matrix[k][index[nxt]] -= mdp.discount * p
        rhs[k] = mdp.reward(a, x)
    values = _solve_exact(matrix, rhs)
    return dict(zip(states, values))


def policy_value(
    mdp: FactoredMdp, pol: DecisionList, limit: int = DEFAULT_STATE_LIMIT
) -> dict[PartialState, Fraction]:
    """Exact expected discounted return of a decision list, per state."""
    states = enumerate_states(mdp, limit)
    return _action_values(mdp, states, [select_action(pol, x) for x in states])


def optimal_value(
    mdp: FactoredMdp, limit: int = DEFAULT_STATE_LIMIT
) -> dict[PartialState, Fraction]:
    """Exact optimal values by policy iteration from the default action.

    Greedy improvement breaks ties toward the lowest action index, and each
    sweep is checked to never lower any state's value, which exact
    arithmetic guarantees.
    """
    states = enumerate_states(mdp, limit)
    act_of = [mdp.default] * len(states)
    values = _action_values(mdp, states, act_of)
    while True:
        improved = list(act_of)
        for k, x in enumerate(states):
            best_a = act_of[k]
            best_q = None
            for a in range(len(mdp.actions)):
                q = mdp.reward(a, x)
                for nxt, p in _successors(mdp, a, x):
                    q += mdp.discount * p * values[nxt]
                if best_q is None or q > best_q:
                    best_q = q
                    best_a = a
            current = values[x]
            if best_q > current:
                improved[k] = best_a
        if improved == act_of:
            return values
        next_values = _action_values(mdp, states, improved)
        for x in states:
            if next_values[x] < values[x]:
                raise FmdpError("policy iteration regressed a state value")
        act_of = improved
        values = next_values
