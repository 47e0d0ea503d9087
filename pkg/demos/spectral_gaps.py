"""Relaxation gaps of the exact generators: what sets the slowest timescale.

Diagonalizes the full continuous-time generator (2^N or 2^(2L^2) states,
dense below 4096 states, sparse above) and reports the spectral gap -- the
inverse of the slowest relaxation time.

Three readings:
  * toric code: the gap rides the anyon pair-creation rate e^(-2 beta), so
    gap * e^(2 beta) is the number to compare across temperatures.  At the
    sizes where exact diagonalization is possible (L = 2, 3) that
    normalized gap still moves noticeably with L -- these lattices are
    tiny, with 8 and 18 qubits -- but it stays of order one instead of
    collapsing, which is the no-barrier signature.
  * mean-field magnet: the gap collapses with N (extensive barrier), and
    1/gap tracks the exact escape time of the metastable branch.
  * ring magnet: the gap saturates with N (domain-wall pair costs 4J once).
"""

import numpy as np

from memlab import build_generator, build_model, spectral_gap


def gap_of(kind, beta, **dims):
    model = build_model(kind, **dims)
    return spectral_gap(build_generator(model, beta))


def main():
    print("toric code, exact gap vs temperature and size:")
    print(f"  {'L':>2}  {'beta':>4}  {'gap':>10}  {'gap*e^(2b)':>10}")
    for L in (2, 3):
        for beta in (0.5, 1.0, 1.5):
            g = gap_of("Kitaev2D", beta, L=L)
            print(f"  {L:>2}  {beta:>4}  {g:10.6f}  {g * np.exp(2 * beta):10.4f}")

    beta = 1.35
    print(f"\nmean-field magnet at beta = {beta}: gap collapses with N")
    print(f"  {'N':>2}  {'gap':>10}  {'1/gap':>8}")
    for N in (4, 6, 8, 10):
        g = gap_of("IsingMeanField", beta, N=N)
        print(f"  {N:>2}  {g:10.6f}  {1.0 / g:8.2f}")

    print(f"\nring magnet at beta = {beta}: gap saturates with N")
    print(f"  {'N':>2}  {'gap':>10}  {'1/gap':>8}")
    for N in (4, 6, 8, 10):
        g = gap_of("Ising1D", beta, N=N)
        print(f"  {N:>2}  {g:10.6f}  {1.0 / g:8.2f}")

    print("\nA shrinking gap is the spectral face of a growing barrier.  The")
    print("toric gap refuses to shrink: no self-correction from size alone.")


if __name__ == "__main__":
    main()
