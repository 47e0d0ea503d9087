"""Exact numerics for small systems.

Markov generators over the full configuration space (column convention:
``G[y, x]`` is the rate x -> y, columns sum to zero), their stationary laws
and spectral gaps via Gibbs symmetrization, and a driven two-level master
equation with work/heat integration for protocol ledgers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.integrate import solve_ivp

from .dynamics import _heat_bath
from .lattice import LatticeModel

MAX_STATES = 1 << 20
DENSE_LIMIT = 4096  # strictly below this dimension the solvers go dense


@dataclass(frozen=True)
class GeneratorMatrix:
    """Transition-rate matrix of a model at fixed inverse temperature.

    Attributes:
        matrix: (dim, dim) ndarray, or CSR matrix above the dense limit.
        energies: per-state energies defining the Gibbs weights.
        beta: inverse temperature the rates were built at.
        kind: model kind string.
        size: N (Ising kinds) or L (Kitaev2D).
    """

    matrix: object
    energies: np.ndarray
    beta: float
    kind: str
    size: int

    @property
    def dimension(self) -> int:
        return self.matrix.shape[0]

    @property
    def is_sparse(self) -> bool:
        return sp.issparse(self.matrix)

    def gibbs(self) -> np.ndarray:
        """Normalized Boltzmann vector e^{-beta E} / Z."""
        w = np.exp(-self.beta * (self.energies - self.energies.min()))
        return w / w.sum()


def _spin_matrix(n_states: int, n: int) -> np.ndarray:
    x = np.arange(n_states, dtype=np.int64)
    bits = (x[:, None] >> np.arange(n)) & 1
    return (1 - 2 * bits).astype(np.float64)  # bit 0 -> spin +1


def _ising_generator(model: LatticeModel, beta: float):
    n = model.N
    dim = 1 << n
    spins = _spin_matrix(dim, n)
    J = model.J
    if model.kind == "Ising1D":
        energies = -J * np.sum(spins * np.roll(spins, -1, axis=1), axis=1)
        field = np.roll(spins, 1, axis=1) + np.roll(spins, -1, axis=1)
        delta = 2.0 * J * spins * field
        if n == 2:  # the two-spin ring has a doubled bond
            delta = 2.0 * J * spins * (2.0 * np.roll(spins, 1, axis=1))
            energies = -2.0 * J * spins[:, 0] * spins[:, 1]
    elif model.kind == "IsingMeanField":
        M = spins.sum(axis=1)
        energies = -(J / (2 * n)) * M**2
        delta = (2.0 * J / n) * (spins * M[:, None] - 1.0)
    else:  # Ising2D
        L = model.L
        grid = spins.reshape(dim, L, L)
        energies = -J * (np.sum(grid * np.roll(grid, -1, 1), axis=(1, 2))
                         + np.sum(grid * np.roll(grid, -1, 2), axis=(1, 2)))
        field = np.zeros_like(spins)
        for i in range(n):
            field[:, i] = spins[:, model.neighbours[i]].sum(axis=1)
        delta = 2.0 * J * spins * field
    with np.errstate(over="ignore"):
        rates = 1.0 / (1.0 + np.exp(beta * delta))
    x = np.arange(dim, dtype=np.int64)
    rows = np.concatenate([x ^ (1 << i) for i in range(n)])
    cols = np.tile(x, n)
    vals = rates.T.ravel()
    return rows, cols, vals, energies


def _kitaev_generator(model: LatticeModel, beta: float):
    """One-sector toric code: states are X-error sets, energies count plaquette anyons."""
    L = model.L
    n_e = 2 * L * L
    dim = 1 << n_e
    plaq_mask = np.zeros(L * L, dtype=np.int64)
    for p in range(L * L):
        for e in model.plaquette_edges[p]:
            plaq_mask[p] |= 1 << int(e)
    x = np.arange(dim, dtype=np.int64)
    parity = np.empty((dim, L * L), dtype=np.int8)
    for p in range(L * L):
        parity[:, p] = np.bitwise_count(x & plaq_mask[p]) & 1
    energies = parity.sum(axis=1).astype(np.float64)
    rate_by_key = np.array([math.exp(-2.0 * beta), model.move_rate, 1.0])
    rows_parts, vals_parts = [], []
    for e in range(n_e):
        p1, p2 = model.edge_plaquettes[e]
        key = parity[:, p1] + parity[:, p2]
        rows_parts.append(x ^ (1 << e))
        vals_parts.append(rate_by_key[key])
    rows = np.concatenate(rows_parts)
    cols = np.tile(x, n_e)
    vals = np.concatenate(vals_parts)
    return rows, cols, vals, energies


def build_generator(model: LatticeModel, beta: float) -> GeneratorMatrix:
    """Full-state-space generator with the jump rates of the dynamics module.

    Ising kinds enumerate all 2^N spin states; Kitaev2D enumerates one error
    sector (2^(2L^2) edge sets).  Off-diagonal entry (y, x) is the rate of the
    single flip taking x to y; diagonals make columns sum to zero.

    Raises:
        ValueError: state space above 2^20 states.
    """
    if model.kind == "Kitaev2D":
        dim = 1 << (2 * model.L * model.L)
        size = model.L
    else:
        dim = 1 << model.N
        size = model.N
    if dim > MAX_STATES:
        raise ValueError(f"state space of {dim} states is above the 2^20 limit")
    if model.kind == "Kitaev2D":
        rows, cols, vals, energies = _kitaev_generator(model, beta)
    else:
        rows, cols, vals, energies = _ising_generator(model, beta)
    G = sp.coo_matrix((vals, (rows, cols)), shape=(dim, dim)).tocsr()
    G.setdiag(-np.asarray(G.sum(axis=0)).ravel())
    if dim < DENSE_LIMIT:
        G = G.toarray()
    return GeneratorMatrix(G, energies, float(beta), model.kind, int(size))


def _symmetrized(G: GeneratorMatrix):
    pi = G.gibbs()
    d = np.sqrt(pi)
    if G.is_sparse:
        S = sp.diags(1.0 / d) @ G.matrix @ sp.diags(d)
        asym = abs(S - S.T).max()
        S = (S + S.T) * 0.5
    else:
        S = G.matrix * (d[None, :] / d[:, None])
        asym = np.abs(S - S.T).max()
        S = (S + S.T) * 0.5
    scale = np.abs(G.matrix.diagonal()).max() or 1.0
    if asym > 1e-9 * scale:
        raise RuntimeError(f"generator is not reversible: symmetrization residual {asym:g}")
    return S, d


def stationary_distribution(G: GeneratorMatrix) -> np.ndarray:
    """Null vector of the generator, normalized to a probability vector.

    Solved through the Gibbs symmetrization (the top eigenvector of the
    symmetric form, mapped back); agrees with the Boltzmann distribution to
    solver precision for detailed-balance rates.
    """
    S, d = _symmetrized(G)
    if G.is_sparse:
        w, v = spla.eigsh(S, k=1, which="LA", v0=d)
        vec = v[:, 0]
    else:
        w, v = np.linalg.eigh(S)
        vec = v[:, -1]
    pi = d * vec
    pi = np.abs(pi)
    pi /= pi.sum()
    resid = np.abs(G.matrix @ pi).max()
    if resid > 1e-8:
        raise RuntimeError(f"stationary solve did not converge: residual {resid:g}")
    return pi


def spectral_gap(G: GeneratorMatrix) -> float:
    """|second-largest eigenvalue| of the generator via Gibbs symmetrization."""
    S, d = _symmetrized(G)
    if G.is_sparse:
        w = spla.eigsh(S, k=2, which="LA", v0=d, return_eigenvectors=False)
        gap = -np.sort(w)[0]
    else:
        w = np.linalg.eigvalsh(S)
        gap = -w[-2]
    return float(max(gap, 0.0))


# ---------------------------------------------------------------------------
# driven two-level system


@dataclass(frozen=True)
class Segment:
    """Piecewise-linear schedule interval.

    Energies move linearly from ``eps0[0]``/``eps1[0]`` at ``t0`` to
    ``eps0[1]``/``eps1[1]`` at ``t1``.  When ``coupled`` is false the bath
    does not act (populations freeze).
    """

    t0: float
    t1: float
    eps0: tuple
    eps1: tuple
    coupled: bool = True

    def __post_init__(self):
        if not self.t1 > self.t0:
            raise ValueError("segment needs t1 > t0")


@dataclass(frozen=True)
class Jump:
    """Instantaneous energy move at time t, from/to explicit values.

    Sudden quenches are explicit events: they do work p_i * delta_eps_i on
    whatever population sits on each level, and the bath has no time to act.
    ``eps0`` and ``eps1`` are (before, after) pairs, mirroring Segment's
    (start, end) convention.
    """

    t: float
    eps0: tuple
    eps1: tuple


@dataclass(frozen=True)
class ProtocolSchedule:
    """Contiguous segments plus explicit jumps for a driven two-level system."""

    segments: tuple
    jumps: tuple = ()
    gamma: float = 1.0
    beta: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "segments", tuple(self.segments))
        object.__setattr__(self, "jumps", tuple(self.jumps))
        if self.gamma <= 0:
            raise ValueError("gamma must be positive")
        if not self.segments:
            raise ValueError("schedule needs at least one segment")
        segs = self.segments
        for a, b in zip(segs[:-1], segs[1:]):
            if abs(a.t1 - b.t0) > 1e-12:
                raise ValueError("segments must be contiguous in time")
        jump_times = [j.t for j in self.jumps]
        if jump_times != sorted(jump_times):
            raise ValueError("jumps must be time-ordered")
        boundaries = [segs[0].t0] + [s.t1 for s in segs]
        for j in self.jumps:
            if not any(abs(j.t - b) < 1e-12 for b in boundaries):
                raise ValueError("jumps must sit on segment boundaries")
        # walk the timeline; any energy mismatch between consecutive events
        # is an implicit discontinuity and gets rejected
        eps = None
        for start, end in self._events():
            if eps is not None and (abs(eps[0] - start[0]) > 1e-9
                                    or abs(eps[1] - start[1]) > 1e-9):
                raise ValueError(
                    "schedule discontinuity inside a coupled interval; "
                    "sudden moves must be declared as explicit jumps")
            eps = end

    def _jumps_at(self, t: float):
        return [j for j in self.jumps if abs(j.t - t) < 1e-12]

    def _events(self):
        """(start energies, end energies) pairs in timeline order."""
        out = []
        for j in self._jumps_at(self.segments[0].t0):
            out.append(((j.eps0[0], j.eps1[0]), (j.eps0[1], j.eps1[1])))
        for s in self.segments:
            out.append(((s.eps0[0], s.eps1[0]), (s.eps0[1], s.eps1[1])))
            for j in self._jumps_at(s.t1):
                out.append(((j.eps0[0], j.eps1[0]), (j.eps0[1], j.eps1[1])))
        return out

    @property
    def t_start(self) -> float:
        return self.segments[0].t0

    @property
    def t_end(self) -> float:
        return self.segments[-1].t1


def two_level_rates(delta: float, gamma: float, beta: float,
                    convention: str = "heat-bath"):
    """(up rate 0->1, down rate 1->0) for level splitting ``delta``.

    Heat-bath rates sum to gamma; Metropolis moves downhill at gamma.
    Both satisfy detailed balance with the instantaneous Gibbs ratio.
    """
    x = beta * delta
    if convention == "heat-bath":
        return gamma * _heat_bath(x), gamma * _heat_bath(-x)
    if convention == "metropolis":
        return gamma * min(1.0, math.exp(-x)), gamma * min(1.0, math.exp(x))
    raise ValueError(f"unknown rate convention: {convention!r}")


@dataclass(frozen=True)
class SegmentRecord:
    """Ledger line of one schedule interval (or jump): energy bookkeeping."""

    label: str
    t0: float
    t1: float
    work: float
    heat: float
    delta_u: float


@dataclass(frozen=True)
class MasterSolution:
    """Time-resolved populations and the work/heat integrals of a protocol."""

    ts: np.ndarray
    ps: np.ndarray       # (K, 2) populations
    eps: np.ndarray      # (K, 2) level energies
    work: float
    heat: float
    delta_u: float
    segments: tuple
    p_final: np.ndarray


def integrate_master(schedule: ProtocolSchedule, p0, rates: str = "heat-bath",
                     rtol: float = 1e-8) -> MasterSolution:
    """Solve dp/dt = G(t) p through the schedule, with work/heat integrands.

    Populations are propagated as p1 (p0 = 1 - p1), so normalization is exact
    by construction.  Work accumulates as sum_i p_i d(eps_i)/dt inside
    segments plus p_i * delta(eps_i) at explicit jumps; heat accumulates as
    sum_i eps_i dp_i/dt.  Adaptive integration at relative tolerance
    ``rtol`` (default 1e-8).
    """
    p = np.asarray(p0, dtype=np.float64)
    if p.shape != (2,) or abs(p.sum() - 1.0) > 1e-9 or np.any(p < -1e-12):
        raise ValueError("p0 must be a 2-state probability vector")
    p1 = float(p[1])
    gamma, beta = schedule.gamma, schedule.beta

    first_jumps = schedule._jumps_at(schedule.t_start)
    if first_jumps:
        eps = (first_jumps[0].eps0[0], first_jumps[0].eps1[0])
    else:
        eps = (schedule.segments[0].eps0[0], schedule.segments[0].eps1[0])
    ts = [schedule.t_start]
    ps = [(1.0 - p1, p1)]
    eps_track = [eps]
    records = []
    work_total = heat_total = 0.0

    def apply_jumps(t):
        nonlocal eps, work_total
        for j in schedule._jumps_at(t):
            w = (1.0 - p1) * (j.eps0[1] - j.eps0[0]) + p1 * (j.eps1[1] - j.eps1[0])
            # populations frozen during an instantaneous move, so dU = W
            records.append(SegmentRecord("jump", t, t, w, 0.0, w))
            work_total += w
            eps = (j.eps0[1], j.eps1[1])
            ts.append(t)
            ps.append((1.0 - p1, p1))
            eps_track.append(eps)

    apply_jumps(schedule.t_start)
    for seg in schedule.segments:
        T = seg.t1 - seg.t0
        de0 = (seg.eps0[1] - seg.eps0[0]) / T
        de1 = (seg.eps1[1] - seg.eps1[0]) / T
        u_before = (1.0 - p1) * eps[0] + p1 * eps[1]
        if not seg.coupled:
            w = (1.0 - p1) * (seg.eps0[1] - seg.eps0[0]) + p1 * (seg.eps1[1] - seg.eps1[0])
            records.append(SegmentRecord("decoupled", seg.t0, seg.t1, w, 0.0, w))
            work_total += w
            grid = np.linspace(seg.t0, seg.t1, 9)
            for tg in grid[1:]:
                ts.append(float(tg))
                ps.append((1.0 - p1, p1))
                frac = (tg - seg.t0) / T
                eps_track.append((seg.eps0[0] + frac * (seg.eps0[1] - seg.eps0[0]),
                                  seg.eps1[0] + frac * (seg.eps1[1] - seg.eps1[0])))
        else:
            def rhs(t, y):
                q1, _, _ = y
                e0 = seg.eps0[0] + de0 * (t - seg.t0)
                e1 = seg.eps1[0] + de1 * (t - seg.t0)
                up, down = two_level_rates(e1 - e0, gamma, beta, rates)
                dq1 = up * (1.0 - q1) - down * q1
                dw = (1.0 - q1) * de0 + q1 * de1
                dq = e0 * (-dq1) + e1 * dq1
                return (dq1, dw, dq)

            sol = solve_ivp(rhs, (seg.t0, seg.t1), (p1, 0.0, 0.0),
                            method="DOP853", rtol=rtol, atol=1e-12,
                            dense_output=True)
            if not sol.success:
                raise RuntimeError(f"master-equation integration failed: {sol.message}")
            grid = np.linspace(seg.t0, seg.t1, 33)
            dense = sol.sol(grid)
            for tg, q1 in zip(grid[1:], dense[0, 1:]):
                ts.append(float(tg))
                ps.append((1.0 - q1, q1))
                frac = (tg - seg.t0) / T
                eps_track.append((seg.eps0[0] + frac * (seg.eps0[1] - seg.eps0[0]),
                                  seg.eps1[0] + frac * (seg.eps1[1] - seg.eps1[0])))
            p1 = float(sol.y[0, -1])
            w, q = float(sol.y[1, -1]), float(sol.y[2, -1])
            records.append(SegmentRecord("coupled", seg.t0, seg.t1, w, q,
                                         (1.0 - p1) * seg.eps0[1] + p1 * seg.eps1[1] - u_before))
            work_total += w
            heat_total += q
        eps = (seg.eps0[1], seg.eps1[1])
        apply_jumps(seg.t1)

    u_first = ps[0][0] * eps_track[0][0] + ps[0][1] * eps_track[0][1]
    u_last = (1.0 - p1) * eps[0] + p1 * eps[1]
    return MasterSolution(np.asarray(ts), np.asarray(ps), np.asarray(eps_track),
                          work_total, heat_total, u_last - u_first,
                          tuple(records), np.array([1.0 - p1, p1]))
