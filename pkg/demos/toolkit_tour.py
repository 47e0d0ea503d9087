"""A walk through the density-matrix toolkit: entropies, distances, channels.

Every inequality the toolkit enforces in tests, demonstrated on concrete
states: von Neumann entropy anchors, the trace-norm distance, channels
contracting that distance, a 3-qubit repetition code whose recovery acts as
an isometry on the code space, the Fannes continuity bound tying distance
to entropy difference, and the erasure bookkeeping that charges the bath at
least the entropy the system lost.
"""

import math

import numpy as np

from memlab import (
    DensityMatrix,
    apply_channel,
    correctable_isometry_check,
    depolarizing_channel,
    entropy,
    erasure_balance,
    fannes_allowance,
    fannes_check,
    random_channel,
    random_density,
    repetition_code_channels,
    trace_distance,
)


def diag(*probs):
    return DensityMatrix(np.diag(probs).astype(complex))


def main():
    rng = np.random.default_rng(2024)

    print("entropy (nats):")
    print(f"  pure state            {entropy(diag(1.0, 0.0)) + 0.0:.6f}")
    print(f"  maximally mixed qubit {entropy(diag(0.5, 0.5)):.6f}  (ln 2 = {math.log(2):.6f})")
    print(f"  diag(0.75, 0.25)      {entropy(diag(0.75, 0.25)):.6f}")

    print("\ntrace-norm distance (0 = same state, 2 = perfectly distinguishable):")
    print(f"  orthogonal pure states          {trace_distance(diag(1.0, 0.0), diag(0.0, 1.0)):.4f}")
    print(f"  diag(0.9,0.1) vs diag(0.6,0.4)  {trace_distance(diag(0.9, 0.1), diag(0.6, 0.4)):.4f}")

    n_pairs = 300
    worst = -math.inf
    for _ in range(n_pairs):
        ch = random_channel(2, 3, rng)
        a, b = random_density(2, rng), random_density(2, rng)
        _, rep = apply_channel(ch, a, check_pairs=[(a, b)])
        worst = max(worst, rep.max_violation)
    print(f"\nchannels never increase distance: worst growth over {n_pairs}")
    print(f"random channel/pair draws = {worst:.3e}  (<= 0 means contraction)")

    rho = random_density(2, rng)
    depol = apply_channel(depolarizing_channel(2), rho)
    print(f"fully depolarized state sits at the maximally mixed point:"
          f" distance {trace_distance(depol, diag(0.5, 0.5)):.2e}")

    noise, recovery, encoder = repetition_code_channels(p_flip=0.15)
    code = [apply_channel(encoder, random_density(2, rng)) for _ in range(6)]
    rep = correctable_isometry_check(noise, recovery, code)
    sent = code[0]
    fixed = apply_channel(recovery, apply_channel(noise, sent))
    print("\n3-qubit repetition code, bit-flip noise at p = 0.15:")
    print(f"  recover(noise(rho)) vs rho:  distance {trace_distance(fixed, sent):.2e}")
    print(f"  isometry check on {len(code)} encoded states: passed = {rep.passed},"
          f" max pairwise distance deviation {rep.max_deviation:.2e}")

    a = diag(0.8, 0.2)
    b = diag(0.75, 0.25)
    eps = trace_distance(a, b)
    gap = abs(entropy(a) - entropy(b))
    print("\nFannes continuity (close states have close entropies):")
    print(f"  distance {eps:.4f}, |dS| = {gap:.4f}, allowance {fannes_allowance(eps, 2):.4f},"
          f" slack {fannes_check(a, b, 2):.4f}")

    print("\nerasing one bit, audited on the bath side (needs dS_bath >= ln 2):")
    for label, before, after in (
        ("dump into a pure qubit", diag(1.0, 0.0), diag(0.5, 0.5)),
        ("sloppy dump into a qutrit", diag(1.0, 0.0, 0.0), diag(0.4, 0.3, 0.3)),
        ("bath left untouched", diag(0.5, 0.5), diag(0.5, 0.5)),
    ):
        bal = erasure_balance(before, after)
        print(f"  {label:<26} dS_bath {bal.delta_s_bath:+.4f}  -> {bal.verdict}")


if __name__ == "__main__":
    main()
