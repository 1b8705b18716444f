"""Solve a small ring network end to end and narrate each step.

The model is a cycle of machines.  Each machine works or is broken, a
broken left neighbour drags a working machine down, and the only repair
is to restart one machine per step.  Rewards count working machines.

Run from the repository root after an editable install:

    python demos/ring_walkthrough.py [n]
"""

import sys
from fractions import Fraction

from fmdp.api import ApiConfig, api, posterior_bound
from fmdp.model import make_ring
from fmdp.policy import decision_list_to_text
from fmdp.values import format_rational


def main() -> None:
    n = int(sys.argv[1]) if len(sys.argv) > 1 else 3
    mdp = make_ring(n)
    print(f"ring with {n} machines")
    print(f"  state variables : {mdp.n} (each working or broken)")
    print(f"  actions         : {len(mdp.actions)} ({', '.join(mdp.actions)})")
    print(f"  basis functions : {len(mdp.basis)} (a constant plus one indicator per machine)")
    print(f"  discount        : {format_rational(mdp.discount)}")
    print()

    trace: list[dict] = []
    result = api(mdp, ApiConfig(epsilon=Fraction(0), t_max=30), trace=trace)

    print("policy iteration, weights refit by linear programming each round:")
    for step in trace:
        w_text = ", ".join(format_rational(q) for q in step["w"])
        print(
            f"  iteration {step['t']}: err={format_rational(step['err'])}"
            f"  lp rows={step['lp_rows']}  w=({w_text})"
        )
    print()

    reason = "repeated weights" if result.w_eq else (
        "error within tolerance" if result.err_le else "iteration cap"
    )
    print(f"stopped after iteration {result.t}: {reason}")
    print(f"final Bellman error: {format_rational(result.err)}")
    print()
    print("greedy policy as a decision list (first matching branch wins):")
    for line in decision_list_to_text(mdp, result.pol).splitlines():
        print(f"  {line}")
    print()

    if result.w_eq:
        bound = posterior_bound(mdp, result)
        print("distance to the true optimum, checked by state enumeration:")
        print(f"  (1 - discount) * max gap = {format_rational(bound.lhs)}")
        print(f"  2 * discount * err       = {format_rational(bound.rhs)}")
        print(f"  bound holds: {'yes' if bound.holds else 'no'}")
    else:
        print("run did not stop on repeated weights, skipping the optimality bound")


if __name__ == "__main__":
    main()
