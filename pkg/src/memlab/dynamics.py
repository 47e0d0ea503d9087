"""Continuous-time Monte Carlo for the lattice models.

Exact (rejection-free) Gillespie sampling: waiting times are exponential in
the total escape rate and events are drawn proportionally to their rates.
Sites are grouped into rate classes -- an Ising spin's class is its local
field, a toric-code edge's class is the occupation of its two plaquettes --
so each event costs O(1) bookkeeping regardless of system size.  That is what
makes the low-temperature runs feasible: a wait of order e^{2 beta} is one
exponential draw, not e^{2 beta} rejected sweeps.

Ensembles derive every trajectory's generator from (master seed, trajectory
index) alone, so results never depend on how many workers ran them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from multiprocessing import Pool

import numpy as np

from .lattice import LatticeModel, SpinConfiguration, Syndrome, build_model
from . import decoder as _decoder_mod


@dataclass(frozen=True)
class SimulationParams:
    """Ensemble parameters: inverse temperature, horizon, size, probe interval."""

    beta: float
    t_max: float
    n_traj: int = 1
    probe_cadence: float | None = None

    def __post_init__(self):
        if self.beta < 0:
            raise ValueError("beta must be nonnegative")
        if not self.t_max > 0:
            raise ValueError("t_max must be positive")
        if self.n_traj < 1:
            raise ValueError("n_traj must be at least 1")


@dataclass(frozen=True)
class EventClass:
    """A single executable flip: its tag, location and rate."""

    tag: str
    site: int
    rate: float


@dataclass
class TrajectoryRecord:
    """One simulated trajectory.

    Attributes:
        seed: 64-bit token the trajectory's generator was derived from.
        events: list of (time, EventClass), strictly increasing times.
        probes: list of (time, observable) sampled on the probe cadence
            (magnetization for Ising kinds, anyon count for Kitaev2D).
        final_state: SpinConfiguration (Ising) or frozenset of edges (Kitaev).
    """

    seed: int
    events: list = field(default_factory=list)
    probes: list = field(default_factory=list)
    final_state: object = None


@dataclass(frozen=True)
class LifetimeResult:
    """First-passage ensemble summary; censored runs enter at t_max (lower bound)."""

    mean: float
    stderr: float
    n_traj: int
    censored: int
    times: np.ndarray = field(repr=False, default=None)


def _heat_bath(x: float) -> float:
    """1 / (1 + e^x), safe for large |x|."""
    if x > 500.0:
        return math.exp(-x)
    return 1.0 / (1.0 + math.exp(x))


# ---------------------------------------------------------------------------
# rate classes


class _IsingCore:
    """Class-indexed Gillespie state for the Ising kinds."""

    def __init__(self, model: LatticeModel, beta: float, spins: np.ndarray):
        self.model = model
        self.kind = model.kind
        self.beta = beta
        self.J = model.J
        self.N = model.N
        self.spins = spins.astype(np.int8).copy()
        self.M = int(self.spins.sum())
        if self.kind == "Ising1D":
            self.keys = [-2, 0, 2]
        elif self.kind == "Ising2D":
            self.keys = [-4, -2, 0, 2, 4]
        else:
            self.keys = [-1, 1]
        self.members = {k: [] for k in self.keys}
        self.pos = np.empty(self.N, dtype=np.int64)
        self.key_of = np.empty(self.N, dtype=np.int64)
        for i in range(self.N):
            k = self._site_key(i)
            self.key_of[i] = k
            self.pos[i] = len(self.members[k])
            self.members[k].append(i)

    def _site_key(self, i: int) -> int:
        s = self.spins
        if self.kind == "Ising1D":
            return int(s[i]) * (int(s[i - 1]) + int(s[(i + 1) % self.N]))
        if self.kind == "Ising2D":
            nb = self.model.neighbours[i]
            return int(s[i]) * int(s[nb[0]] + s[nb[1]] + s[nb[2]] + s[nb[3]])
        return int(s[i])

    def delta_e(self, key: int) -> float:
        if self.kind == "IsingMeanField":
            return (2.0 * self.J / self.N) * (key * self.M - 1.0)
        return 2.0 * self.J * key

    def rate(self, key: int) -> float:
        return _heat_bath(self.beta * self.delta_e(key))

    def total_and_rates(self):
        rates = {k: self.rate(k) for k in self.keys}
        total = sum(len(self.members[k]) * rates[k] for k in self.keys)
        return total, rates

    def _move(self, i: int, new_key: int):
        old = self.key_of[i]
        if old == new_key:
            return
        lst = self.members[old]
        p = self.pos[i]
        last = lst[-1]
        lst[p] = last
        self.pos[last] = p
        lst.pop()
        self.key_of[i] = new_key
        self.pos[i] = len(self.members[new_key])
        self.members[new_key].append(i)

    def apply_flip(self, i: int):
        self.spins[i] = -self.spins[i]
        self.M += 2 * int(self.spins[i])
        self._move(i, self._site_key(i))
        if self.kind == "Ising1D":
            for j in ((i - 1) % self.N, (i + 1) % self.N):
                if j != i:
                    self._move(j, self._site_key(j))
        elif self.kind == "Ising2D":
            for j in self.model.neighbours[i]:
                self._move(int(j), self._site_key(int(j)))
        # mean-field neighbours are everyone, but keys depend only on the
        # spin itself; rates pick up the new M through delta_e at draw time.

    def draw(self, rng) -> tuple | None:
        total, rates = self.total_and_rates()
        if total <= 0.0:
            return None
        dt = rng.exponential() / total
        u = rng.random() * total
        live = [k for k in self.keys if self.members[k] and rates[k] > 0.0]
        for k in live[:-1]:
            w = len(self.members[k]) * rates[k]
            if u < w:
                break
            u -= w
        else:
            k = live[-1]
        lst = self.members[k]
        i = lst[int(rng.integers(len(lst)))]
        return dt, i, rates[k]

    def observable(self) -> float:
        return float(self.M)

    def state_view(self):
        return self.spins


class _KitaevCore:
    """Class-indexed Gillespie state for the one-sector toric code.

    Edge classes by adjacent-plaquette occupation: 0 occupied -> pair
    creation at rate e^{-2 beta}, 1 occupied -> anyon hop, 2 occupied ->
    pair annihilation at rate 1.
    """

    TAGS = {0: "create-pair", 1: "move-anyon", 2: "annihilate-pair"}

    def __init__(self, model: LatticeModel, beta: float,
                 error: frozenset = frozenset()):
        self.model = model
        L = model.L
        self.L = L
        self.n_edges = 2 * L * L
        self.occ = np.zeros(L * L, dtype=np.int8)
        self.err = np.zeros(self.n_edges, dtype=bool)
        self.rates = {0: math.exp(-2.0 * beta), 1: model.move_rate, 2: 1.0}
        self.ep = model.edge_plaquettes
        self.pe = model.plaquette_edges
        for e in error:
            self.err[e] = True
            self.occ[self.ep[e, 0]] ^= 1
            self.occ[self.ep[e, 1]] ^= 1
        self.n_anyons = int(self.occ.sum())
        self.members = {0: [], 1: [], 2: []}
        self.pos = np.empty(self.n_edges, dtype=np.int64)
        self.key_of = np.empty(self.n_edges, dtype=np.int64)
        for e in range(self.n_edges):
            k = self._edge_key(e)
            self.key_of[e] = k
            self.pos[e] = len(self.members[k])
            self.members[k].append(e)

    def _edge_key(self, e: int) -> int:
        return int(self.occ[self.ep[e, 0]]) + int(self.occ[self.ep[e, 1]])

    def _move(self, e: int, new_key: int):
        old = self.key_of[e]
        if old == new_key:
            return
        lst = self.members[old]
        p = self.pos[e]
        last = lst[-1]
        lst[p] = last
        self.pos[last] = p
        lst.pop()
        self.key_of[e] = new_key
        self.pos[e] = len(self.members[new_key])
        self.members[new_key].append(e)

    def apply_flip(self, e: int):
        self.err[e] = not self.err[e]
        p1, p2 = self.ep[e]
        delta = 0
        for p in (p1, p2):
            self.occ[p] ^= 1
            delta += 1 if self.occ[p] else -1
        self.n_anyons += delta
        for p in (p1, p2):
            for f in self.pe[p]:
                self._move(int(f), self._edge_key(int(f)))

    def draw(self, rng) -> tuple | None:
        r = self.rates
        m = self.members
        total = len(m[0]) * r[0] + len(m[1]) * r[1] + len(m[2]) * r[2]
        if total <= 0.0:
            return None
        dt = rng.exponential() / total
        u = rng.random() * total
        live = [k for k in (0, 1, 2) if m[k] and r[k] > 0.0]
        for k in live[:-1]:
            w = len(m[k]) * r[k]
            if u < w:
                break
            u -= w
        else:
            k = live[-1]
        lst = m[k]
        e = lst[int(rng.integers(len(lst)))]
        return dt, e, r[k]

    def observable(self) -> float:
        return float(self.n_anyons)

    def state_view(self):
        return frozenset(np.flatnonzero(self.err).tolist())


def _make_core(model: LatticeModel, beta: float, initial=None):
    if model.kind == "Kitaev2D":
        err = frozenset() if initial is None else frozenset(int(e) for e in initial)
        return _KitaevCore(model, beta, err)
    if initial is None:
        spins = np.ones(model.N, dtype=np.int8)
    elif isinstance(initial, SpinConfiguration):
        spins = initial.spins
    else:
        spins = np.asarray(initial, dtype=np.int8)
    return _IsingCore(model, beta, spins)


# ---------------------------------------------------------------------------
# public operations


def classify_flip(model: LatticeModel, state, site: int) -> EventClass:
    """Rate and event class of flipping one site in the given state.

    Kitaev2D inspects the two plaquettes adjacent to the edge (both clear ->
    pair creation at e^{-2 beta}, both occupied -> annihilation at 1, mixed ->
    hop); Ising kinds use the heat-bath rate 1/(1 + e^{beta dE}).  The
    inverse temperature is taken from the model (see ``with_beta``).
    """
    beta = model.require_beta()
    if model.kind == "Kitaev2D":
        if not 0 <= site < model.N:
            raise ValueError(f"invalid edge index: {site}")
        if isinstance(state, SpinConfiguration):
            error = frozenset(np.flatnonzero(state.spins < 0).tolist())
        else:
            error = frozenset(int(e) for e in state)
        occ = 0
        for p in model.edge_plaquettes[site]:
            occ += sum(int(e) in error for e in model.plaquette_edges[p]) % 2
        if occ == 0:
            return EventClass("create-pair", site, math.exp(-2.0 * beta))
        if occ == 2:
            return EventClass("annihilate-pair", site, 1.0)
        return EventClass("move-anyon", site, model.move_rate)
    if not isinstance(state, SpinConfiguration):
        state = SpinConfiguration(np.asarray(state))
    if not 0 <= site < model.N:
        raise ValueError(f"invalid site index: {site}")
    core = _IsingCore(model, beta, state.spins)
    rate = core.rate(core._site_key(site))
    return EventClass("ising-flip", site, rate)


def _seed_sequence(master_seed, index: int) -> np.random.SeedSequence:
    return np.random.SeedSequence(master_seed, spawn_key=(index,))


def simulate_trajectory(model: LatticeModel, params: SimulationParams,
                        seed=0, initial=None) -> TrajectoryRecord:
    """One exact Gillespie trajectory with a full event record.

    Args:
        model: lattice model (its beta slot is overridden by ``params.beta``).
        params: simulation parameters.
        seed: integer token or SeedSequence; identical inputs give
            bit-identical records.
        initial: optional starting state (default: all-up / no errors).

    Returns:
        A :class:`TrajectoryRecord`; probes hold magnetization (Ising) or
        anyon count (Kitaev) on the cadence grid.
    """
    if isinstance(seed, np.random.SeedSequence):
        ss = seed
        token = int(ss.generate_state(1, np.uint64)[0])
    else:
        ss = np.random.SeedSequence(seed)
        token = int(seed) if np.isscalar(seed) else int(ss.generate_state(1, np.uint64)[0])
    rng = np.random.default_rng(ss)
    core = _make_core(model, params.beta, initial)
    record = TrajectoryRecord(seed=token)
    cadence = params.probe_cadence
    next_probe = cadence if cadence else math.inf
    t = 0.0
    kitaev = model.kind == "Kitaev2D"
    while True:
        drawn = core.draw(rng)
        if drawn is None:
            if math.isinf(params.t_max):
                raise RuntimeError("absorbing state: total rate is zero and t_max is infinite")
            t_next = math.inf
        else:
            dt, site, rate = drawn
            t_next = t + dt
        while next_probe <= min(t_next, params.t_max):
            record.probes.append((next_probe, core.observable()))
            next_probe += cadence
        if t_next > params.t_max:
            break
        t = t_next
        if kitaev:
            tag = _KitaevCore.TAGS[int(core.key_of[site])]
        else:
            tag = "ising-flip"
        record.events.append((t, EventClass(tag, int(site), rate)))
        core.apply_flip(site)
    record.final_state = (core.state_view() if kitaev
                          else SpinConfiguration(core.state_view().copy()))
    return record


def magnetization_nonpositive(state) -> bool:
    """Default Ising lifetime predicate: total magnetization has left +."""
    return int(np.sum(state)) <= 0


def _first_passage_once(model, params, predicate, ss) -> float:
    rng = np.random.default_rng(ss)
    core = _make_core(model, params.beta, None)
    if predicate(core.state_view()):
        raise ValueError("predicate already true in the initial state")
    t = 0.0
    while True:
        drawn = core.draw(rng)
        if drawn is None:
            if math.isinf(params.t_max):
                raise RuntimeError("absorbing state: total rate is zero and t_max is infinite")
            return params.t_max
        dt, site, _ = drawn
        t += dt
        if t > params.t_max:
            return params.t_max
        core.apply_flip(site)
        if predicate(core.state_view()):
            return t


def _fp_chunk(args):
    model, params, predicate, master_seed, lo, hi = args
    return [
        _first_passage_once(model, params, predicate, _seed_sequence(master_seed, i))
        for i in range(lo, hi)
    ]


def _summarize(times: np.ndarray, t_max: float) -> LifetimeResult:
    censored = int(np.sum(times >= t_max))
    mean = float(np.mean(times))
    stderr = float(np.std(times, ddof=1) / math.sqrt(len(times))) if len(times) > 1 else 0.0
    return LifetimeResult(mean, stderr, len(times), censored, times)


def _run_chunks(worker, common, n_traj: int, workers: int):
    if workers <= 1:
        return worker(common + (0, n_traj))
    bounds = np.linspace(0, n_traj, workers + 1).astype(int)
    jobs = [common + (int(lo), int(hi)) for lo, hi in zip(bounds[:-1], bounds[1:])
            if hi > lo]
    with Pool(processes=workers) as pool:
        parts = pool.map(worker, jobs)
    return [t for part in parts for t in part]


def first_passage(model: LatticeModel, params: SimulationParams, predicate=None,
                  seed=0, workers: int = 1) -> LifetimeResult:
    """Mean first time an ensemble of trajectories satisfies a predicate.

    Trajectories start from the ordered state (all spins up / no errors).
    The default predicate is the magnetization sign change, the classical
    memory-failure criterion.  Runs reaching t_max enter the mean censored
    at t_max, so the reported lifetime is a lower bound; the censored count
    is part of the result.

    Args:
        model: lattice model.
        params: ensemble parameters (beta, t_max, n_traj).
        predicate: state -> bool, false initially (picklable if workers > 1).
        seed: master seed; trajectory i uses (seed, i) regardless of workers.
        workers: process count (results are identical for any value).
    """
    if predicate is None:
        predicate = magnetization_nonpositive
    times = np.asarray(_run_chunks(
        _fp_chunk, (model, params, predicate, seed), params.n_traj, workers))
    return _summarize(times, params.t_max)


def _resolve_decoder(decoder):
    if decoder in ("matching", None) or decoder == "bare":
        return decoder
    if callable(decoder):
        return decoder
    raise ValueError(f"unknown decoder: {decoder!r}")


def _kitaev_lifetime_once(model, params, decoder, op_support, ss) -> float:
    """First probe time at which the (possibly dressed) logical reads -1."""
    rng = np.random.default_rng(ss)
    core = _KitaevCore(model, params.beta, frozenset())
    L = model.L
    cadence = params.probe_cadence
    if cadence is None:
        cadence = 0.5 * math.exp(2.0 * params.beta) / (2 * L * L)
    in_support = np.zeros(core.n_edges, dtype=bool)
    in_support[list(op_support)] = True
    bare = 1
    sign_cache = {}
    t = 0.0
    next_probe = cadence
    while True:
        drawn = core.draw(rng)
        if drawn is None and math.isinf(params.t_max):
            raise RuntimeError("absorbing state: total rate is zero and t_max is infinite")
        t_next = t + drawn[0] if drawn is not None else math.inf
        while next_probe <= min(t_next, params.t_max):
            if decoder == "bare":
                value = bare
            else:
                key = tuple(np.flatnonzero(core.occ).tolist())
                sign = sign_cache.get(key)
                if sign is None:
                    syn = Syndrome(frozenset(int(p) for p in key), "plaquette")
                    if decoder == "matching" or decoder is None:
                        corr = _decoder_mod.decode_matching(syn, L)
                    else:
                        try:
                            corr = decoder(syn, L)
                        except Exception as exc:
                            raise RuntimeError(
                                f"decoder failed at t={next_probe:g} "
                                f"on syndrome {sorted(syn.anyons)}") from exc
                    sign = 1 if len(corr.edges & op_support) % 2 == 0 else -1
                    sign_cache[key] = sign
                value = bare * sign
            if value == -1:
                return next_probe
            next_probe += cadence
        if t_next > params.t_max:
            return params.t_max
        t = t_next
        edge = drawn[1]
        if in_support[edge]:
            bare = -bare
        core.apply_flip(edge)


def _kl_chunk(args):
    model, params, decoder, op_support, master_seed, lo, hi = args
    return [
        _kitaev_lifetime_once(model, params, decoder, op_support,
                              _seed_sequence(master_seed, i))
        for i in range(lo, hi)
    ]


def kitaev_memory_lifetime(L: int, params: SimulationParams, decoder="matching",
                           seed=0, workers: int = 1, mu: int = 1,
                           move_rate: float = 1.0) -> LifetimeResult:
    """Ensemble lifetime of an encoded toric-code bit under thermal noise.

    Each trajectory starts in the clean code state; on the probe cadence the
    syndrome is extracted, decoded (unless ``decoder="bare"``), and the run
    fails at the first probe where the corrected (or bare) logical reads -1.
    The probe cadence defaults to half the mean first-event time,
    e^{2 beta} / (4 L^2).

    Args:
        L: linear lattice size (>= 2).
        params: ensemble parameters.
        decoder: ``"matching"``, ``"bare"``, or a callable (Syndrome, L) ->
            Correction.
        seed: master seed (per-trajectory derivation as in first_passage).
        workers: process count.
        mu: tracked logical direction (1 or 2).
        move_rate: anyon hop rate override.
    """
    from .lattice import logical_operator

    model = build_model("Kitaev2D", L=L, move_rate=move_rate)
    op = logical_operator(model, mu, "Z-type")
    dec = _resolve_decoder(decoder)
    times = np.asarray(_run_chunks(
        _kl_chunk, (model, params, dec, op.support, seed), params.n_traj, workers))
    return _summarize(times, params.t_max)
