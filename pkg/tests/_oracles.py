"""Hand-rolled reference implementations the test suite checks against.

Everything here is deliberately written from scratch against the definitions
(direct enumeration, linear solves, closed forms) rather than reusing library
code paths, so agreement is meaningful.
"""

import itertools
import math

import numpy as np
from scipy.integrate import solve_ivp


def heat_bath(x):
    if x > 0:
        return math.exp(-x) / (1.0 + math.exp(-x))
    return 1.0 / (1.0 + math.exp(x))


def mean_field_mfpt(N, beta, J):
    """Exact mean first-passage time M(0) >= ... > 0 for the mean-field bit.

    The all-up state has k=0 overturned spins; magnetization N - 2k stops
    being positive once k reaches ceil(N/2).  The magnetization is a lumped
    birth-death chain (all states with equal k are exchangeable), so the
    MFPT solves a tridiagonal linear system.
    """
    k_abs = (N + 1) // 2
    size = k_abs  # transient states k = 0 .. k_abs-1
    A = np.zeros((size, size))
    b = -np.ones(size)
    for k in range(size):
        M = N - 2 * k
        up = (N - k) * heat_bath(beta * (2.0 * J / N) * (M - 1.0))
        down = k * heat_bath(beta * (2.0 * J / N) * (-M - 1.0))
        A[k, k] = -(up + down)
        if k + 1 < size:
            A[k, k + 1] = up
        if k - 1 >= 0:
            A[k, k - 1] = down
    tau = np.linalg.solve(A, b)
    return tau[0]


def ring_energy(spins, J):
    n = len(spins)
    return -J * sum(spins[i] * spins[(i + 1) % n] for i in range(n))


def mean_field_energy(spins, J):
    n = len(spins)
    return -J / (2.0 * n) * sum(spins) ** 2


def boltzmann(energies, beta):
    e = np.asarray(energies, dtype=float)
    w = np.exp(-beta * (e - e.min()))
    return w / w.sum()


# --- toric-code geometry, rebuilt from scratch -----------------------------


def torus_edges(L):
    """Edge list as ((site), (site)) pairs: horizontal block then vertical."""
    edges = []
    for y in range(L):
        for x in range(L):
            edges.append(((x, y), ((x + 1) % L, y)))
    for y in range(L):
        for x in range(L):
            edges.append(((x, y), (x, (y + 1) % L)))
    return edges


def plaquette_edge_sets(L):
    """For each plaquette (x, y): the 4 bounding edge indices (independent walk)."""
    sets = []
    for y in range(L):
        for x in range(L):
            bottom = y * L + x
            top = ((y + 1) % L) * L + x
            left = L * L + y * L + x
            right = L * L + y * L + (x + 1) % L
            sets.append(frozenset({bottom, top, left, right}))
    return sets


def star_edge_sets(L):
    """For each vertex (x, y): the 4 incident edge indices (independent walk)."""
    sets = []
    for y in range(L):
        for x in range(L):
            left = y * L + (x - 1) % L
            right = y * L + x
            down = L * L + ((y - 1) % L) * L + x
            up = L * L + y * L + x
            sets.append(frozenset({left, right, down, up}))
    return sets


def brute_plaquette_syndrome(error_edges, L):
    """Plaquettes with odd overlap against the rebuilt edge sets."""
    err = set(error_edges)
    return frozenset(p for p, es in enumerate(plaquette_edge_sets(L))
                     if len(es & err) % 2 == 1)


def boundary_group(L):
    """All 2^(L*L) star products: the plaquette-syndrome-free contractible sets.

    X-type error chains live on the dual lattice, so the sets invisible to
    every plaquette stabilizer are generated by vertex stars, not faces.
    """
    stars = star_edge_sets(L)
    out = set()
    for bits in range(1 << (L * L)):
        acc = set()
        for s in range(L * L):
            if (bits >> s) & 1:
                acc ^= set(stars[s])
        out.add(frozenset(acc))
    return out


def homology_coefficients(edge_set, L, boundaries, conjugate_cycles):
    """(c1, c2) such that edge_set ~ c1*X1 + c2*X2 up to a boundary."""
    for c1, c2 in itertools.product((0, 1), repeat=2):
        trial = set(edge_set)
        if c1:
            trial ^= set(conjugate_cycles[0])
        if c2:
            trial ^= set(conjugate_cycles[1])
        if frozenset(trial) in boundaries:
            return c1, c2
    raise AssertionError("edge set not in any homology class (broken oracle)")


def min_pairing_weight(points, dist):
    """Exact minimum-weight perfect matching by recursion over (2k-1)!! pairings."""
    pts = tuple(points)
    if not pts:
        return 0.0

    def rec(remaining):
        if not remaining:
            return 0.0
        first, rest = remaining[0], remaining[1:]
        best = math.inf
        for i, other in enumerate(rest):
            sub = rest[:i] + rest[i + 1:]
            best = min(best, dist(first, other) + rec(sub))
        return best

    return rec(pts)


def torus_dist(a, b, L):
    dx = abs(a[0] - b[0])
    dy = abs(a[1] - b[1])
    return min(dx, L - dx) + min(dy, L - dy)


# --- driven two-level closed forms ------------------------------------------


def relax_p1(p1_0, delta, gamma, beta, t):
    """Occupation of the upper level after time t at fixed splitting delta."""
    p_eq = heat_bath(beta * delta)
    return p_eq + (p1_0 - p_eq) * math.exp(-gamma * t)


def quasistatic_extracted(E, beta):
    """Work extracted by an infinitely slow ramp of one level from E to 0."""
    return (math.log(2.0) - math.log(1.0 + math.exp(-beta * E))) / beta


def mean_sigma_ode(schedule, p0, rates="heat-bath"):
    """Exact mean trajectory entropy production for a two-level protocol.

    Integrates the flip-flux expectation sum_{x!=y} r p ln(r_fwd/r_bwd)
    alongside the master equation and adds the Shannon boundary terms
    S(p_fin) - S(p_init).
    """
    from memlab.exact import two_level_rates

    def shannon(p):
        return -sum(v * math.log(v) for v in p if v > 0)

    p1 = p0[1]
    acc = 0.0
    for seg in schedule.segments:
        if not seg.coupled:
            continue
        T = seg.t1 - seg.t0
        de0 = (seg.eps0[1] - seg.eps0[0]) / T
        de1 = (seg.eps1[1] - seg.eps1[0]) / T

        def rhs(t, y):
            q1, _ = y
            d = (seg.eps1[0] + de1 * (t - seg.t0)) - (seg.eps0[0] + de0 * (t - seg.t0))
            up, down = two_level_rates(d, schedule.gamma, schedule.beta, rates)
            flux = up * (1.0 - q1) - down * q1
            return (flux, flux * math.log(up / down))

        sol = solve_ivp(rhs, (seg.t0, seg.t1), (p1, acc), rtol=1e-10,
                        atol=1e-12, method="DOP853")
        p1, acc = float(sol.y[0, -1]), float(sol.y[1, -1])
    p_fin = (1.0 - p1, p1)
    return acc + shannon(p_fin) - shannon(tuple(p0))
