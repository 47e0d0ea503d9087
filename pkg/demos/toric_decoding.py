"""Decoding a toric-code memory: syndromes, matching, and what it buys.

Walks one lattice by hand: flip a few qubits, read the plaquette syndrome,
run minimum-weight matching, and check whether error + correction wraps a
noncontractible loop (a logical failure).  Includes the case the decoder
cannot see -- a syndrome-free loop spanning the torus -- and ends with the
payoff in simulation: at fixed temperature, matched readout outlives the
bare loop observable.

Edge convention on the L x L torus: horizontal edge h(x, y) has index
y*L + x, vertical edge v(x, y) has index L^2 + y*L + x.
"""

import numpy as np

from memlab import (
    SimulationParams,
    build_model,
    decode_matching,
    dressed_logical,
    is_logical_failure,
    kitaev_memory_lifetime,
    logical_bare,
    logical_operator,
    syndrome,
)

L = 4


def h(x, y):
    return y * L + x


def v(x, y):
    return L * L + y * L + x


def inspect_error(model, op, error, label):
    syn = syndrome(model, error, "plaquette")
    corr = decode_matching(syn, L)
    failed = is_logical_failure(error, corr, op)
    print(f"{label}:")
    print(f"  error edges      {sorted(error)}")
    print(f"  anyons           {sorted(syn.anyons) or '(none)'}")
    print(f"  correction edges {sorted(corr.edges) or '(none)'}")
    print(f"  bare loop value  {logical_bare(model, error, op):+d}")
    print(f"  logical failure  {failed}\n")


def main():
    model = build_model("Kitaev2D", L=L)
    op = logical_operator(model, 1)  # Z-loop along the y = 0 row
    print(f"tracked loop: mu = {op.mu}, support = {sorted(op.support)}\n")

    inspect_error(model, op, {h(1, 1)}, "single flipped edge")
    inspect_error(model, op, {h(1, 1), v(2, 1)}, "two-edge chain (shared plaquette cancels)")
    inspect_error(model, op, {h(1, y) for y in range(L)},
                  "column of horizontal edges spanning the torus")

    # Same story through the measurement-side API: +-1 outcomes per qubit.
    outcomes = np.ones(2 * L * L, dtype=np.int64)
    for e in (h(1, 1), v(2, 1)):
        outcomes[e] = -1
    print(f"dressed readout of the two-edge chain: {dressed_logical(outcomes, op, L):+d}"
          " (correctly +1)\n")

    beta, L_sim, n_traj = 1.5, 8, 150
    params = SimulationParams(beta=beta, t_max=3000.0, n_traj=n_traj)
    print(f"memory lifetime at beta = {beta}, L = {L_sim}, {n_traj} trajectories:")
    for decoder in ("matching", "bare"):
        res = kitaev_memory_lifetime(L_sim, params, decoder=decoder, seed=5)
        print(f"  {decoder:>8}: {res.mean:6.3f} +- {res.stderr:5.3f}"
              f"  (censored {res.censored})")
    print("\nMatching buys time by absorbing contractible noise, but thermal")
    print("anyons still diffuse across the torus at a size-independent rate,")
    print("so the advantage is a prefactor, not a new scaling law.")


if __name__ == "__main__":
    main()
