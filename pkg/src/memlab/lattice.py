"""Spin models: lattice geometry, energies, stabilizer syndromes, logical loops.

Four model kinds are supported:

* ``Ising1D`` -- ferromagnetic ring, H = -J sum_j s_j s_{j+1} (periodic).
* ``IsingMeanField`` -- Curie-Weiss form H = -(J/2N) M^2 with M = sum_j s_j
  (the self-interaction term is a constant shift and never enters differences).
* ``Ising2D`` -- nearest-neighbour ferromagnet on an L x L torus.
* ``Kitaev2D`` -- toric code on an L x L torus: 2L^2 edge qubits, L^2 star
  (vertex) stabilizers and L^2 plaquette (face) stabilizers.

For ``Kitaev2D`` the state of interest is an *error set*: the set of edges
flipped relative to the all-up reference frame.  By convention the flips are
X-type, so they excite plaquette stabilizers; the star sector behaves
identically under lattice duality and is available through the ``sector``
arguments without a separate code path.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

KINDS = ("Ising1D", "IsingMeanField", "Ising2D", "Kitaev2D")


@dataclass(frozen=True)
class SpinConfiguration:
    """Ordered +-1 spins of a lattice model.

    Args:
        spins: sequence of +-1 values, one per site (stored as int8).
    """

    spins: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.spins, dtype=np.int8)
        if arr.ndim != 1 or arr.size == 0:
            raise ValueError("spins must be a non-empty 1-d sequence")
        if not np.all(np.abs(arr) == 1):
            raise ValueError("spins must take values +1 or -1")
        object.__setattr__(self, "spins", arr)

    @property
    def n(self) -> int:
        return int(self.spins.size)

    def pack(self) -> bytes:
        """Bit-packed form (1 bit per spin, set bit = spin down)."""
        return np.packbits(self.spins < 0).tobytes()

    @classmethod
    def unpack(cls, data: bytes, n: int) -> "SpinConfiguration":
        """Inverse of :meth:`pack`; ``n`` is the spin count."""
        bits = np.unpackbits(np.frombuffer(data, dtype=np.uint8), count=n)
        return cls(np.where(bits == 1, -1, 1).astype(np.int8))

    @classmethod
    def all_up(cls, n: int) -> "SpinConfiguration":
        return cls(np.ones(n, dtype=np.int8))


@dataclass(frozen=True)
class Syndrome:
    """Set of violated stabilizers of one sector.

    Args:
        anyons: indices of stabilizers with eigenvalue -1.
        sector: ``"star"`` or ``"plaquette"``.
    """

    anyons: frozenset
    sector: str

    def __post_init__(self):
        object.__setattr__(self, "anyons", frozenset(int(a) for a in self.anyons))
        if self.sector not in ("star", "plaquette"):
            raise ValueError(f"unknown sector: {self.sector!r}")
        if len(self.anyons) % 2 != 0:
            raise ValueError("anyon number must be even")

    def __len__(self):
        return len(self.anyons)


@dataclass(frozen=True)
class LogicalOperator:
    """Non-contractible loop observable of the toric code.

    Args:
        mu: winding direction index, 1 (x) or 2 (y).
        sector: ``"Z-type"`` (sigma-z string on a primal loop) or ``"X-type"``
            (sigma-x string on a dual loop).
        support: edges carrying the Pauli factors.
    """

    mu: int
    sector: str
    support: frozenset

    def __post_init__(self):
        object.__setattr__(self, "support", frozenset(int(e) for e in self.support))
        if self.mu not in (1, 2):
            raise ValueError("mu must be 1 or 2")
        if self.sector not in ("Z-type", "X-type"):
            raise ValueError(f"unknown sector: {self.sector!r}")


@dataclass(frozen=True)
class LatticeModel:
    """Geometry plus Hamiltonian descriptor; build via :func:`build_model`.

    Fields `edge_stars` etc. are precomputed incidence tables (Kitaev2D only).
    ``beta`` is the inverse-temperature slot used by rate computations; it may
    be left unset and supplied later through simulation parameters.
    """

    kind: str
    N: int
    J: float = 1.0
    L: int | None = None
    beta: float | None = None
    move_rate: float = 1.0
    # Kitaev2D incidence tables (None for Ising kinds)
    edge_plaquettes: np.ndarray | None = field(default=None, repr=False)
    edge_stars: np.ndarray | None = field(default=None, repr=False)
    plaquette_edges: np.ndarray | None = field(default=None, repr=False)
    star_edges: np.ndarray | None = field(default=None, repr=False)
    # Ising2D neighbour table
    neighbours: np.ndarray | None = field(default=None, repr=False)

    @property
    def n_sites(self) -> int:
        return self.N

    def with_beta(self, beta: float) -> "LatticeModel":
        """Copy of the model with the inverse-temperature slot set."""
        return replace(self, beta=float(beta))

    def require_beta(self) -> float:
        if self.beta is None:
            raise ValueError("model has no inverse temperature set; "
                             "use with_beta() or pass SimulationParams")
        return self.beta


def _kitaev_tables(L: int):
    """Incidence tables for the L x L torus.

    Edges: horizontal h(x, y) = y*L + x joins vertices (x,y)-(x+1,y);
    vertical v(x, y) = L^2 + y*L + x joins (x,y)-(x,y+1).
    Plaquette p(x, y) = y*L + x is the face with corners (x,y)..(x+1,y+1);
    star s(x, y) = y*L + x is the vertex (x, y).
    """
    n_e = 2 * L * L
    edge_plaq = np.empty((n_e, 2), dtype=np.int64)
    edge_star = np.empty((n_e, 2), dtype=np.int64)
    for y in range(L):
        for x in range(L):
            h = y * L + x
            v = L * L + y * L + x
            edge_plaq[h] = (y * L + x, ((y - 1) % L) * L + x)
            edge_plaq[v] = (y * L + x, y * L + (x - 1) % L)
            edge_star[h] = (y * L + x, y * L + (x + 1) % L)
            edge_star[v] = (y * L + x, ((y + 1) % L) * L + x)
    plaq_edges = [[] for _ in range(L * L)]
    star_edges = [[] for _ in range(L * L)]
    for e in range(n_e):
        for p in edge_plaq[e]:
            plaq_edges[p].append(e)
        for s in edge_star[e]:
            star_edges[s].append(e)
    return (edge_plaq, edge_star,
            np.array(plaq_edges, dtype=np.int64),
            np.array(star_edges, dtype=np.int64))


def build_model(kind: str, N: int | None = None, L: int | None = None,
                J: float = 1.0, beta: float | None = None,
                move_rate: float = 1.0) -> LatticeModel:
    """Construct a lattice model with precomputed incidence tables.

    Args:
        kind: one of ``Ising1D``, ``IsingMeanField``, ``Ising2D``, ``Kitaev2D``.
        N: site count (Ising1D, IsingMeanField).
        L: linear size (Ising2D, Kitaev2D).
        J: coupling energy.
        beta: optional inverse temperature to store on the model.
        move_rate: anyon hop rate override (Kitaev2D only; default 1).

    Returns:
        An immutable :class:`LatticeModel`.
    """
    if kind not in KINDS:
        raise ValueError(f"unsupported model kind: {kind!r}")
    if kind == "Ising1D":
        if N is None or N < 2:
            raise ValueError("Ising1D needs N >= 2 (a ring of at least two spins)")
        return LatticeModel(kind, int(N), float(J), None, beta)
    if kind == "IsingMeanField":
        if N is None or N < 1:
            raise ValueError("IsingMeanField needs N >= 1")
        return LatticeModel(kind, int(N), float(J), None, beta)
    if kind == "Ising2D":
        if L is None or L < 2:
            raise ValueError("Ising2D needs L >= 2")
        L = int(L)
        idx = np.arange(L * L).reshape(L, L)
        nbrs = np.stack([np.roll(idx, 1, 0), np.roll(idx, -1, 0),
                         np.roll(idx, 1, 1), np.roll(idx, -1, 1)],
                        axis=-1).reshape(L * L, 4)
        return LatticeModel(kind, L * L, float(J), L, beta, neighbours=nbrs)
    # Kitaev2D
    if L is None or L < 2:
        raise ValueError("Kitaev2D needs L >= 2")
    L = int(L)
    ep, es, pe, se = _kitaev_tables(L)
    return LatticeModel(kind, 2 * L * L, float(J), L, beta,
                        move_rate=float(move_rate),
                        edge_plaquettes=ep, edge_stars=es,
                        plaquette_edges=pe, star_edges=se)


def _as_error_set(model: LatticeModel, config) -> frozenset:
    """Normalize a Kitaev state (SpinConfiguration or edge iterable) to an error set."""
    if isinstance(config, SpinConfiguration):
        if config.n != model.N:
            raise ValueError(f"configuration has {config.n} spins, model has {model.N}")
        return frozenset(np.flatnonzero(config.spins < 0).tolist())
    edges = frozenset(int(e) for e in config)
    for e in edges:
        if not 0 <= e < model.N:
            raise ValueError(f"invalid edge index: {e}")
    return edges


def syndrome(model: LatticeModel, error, sector: str = "plaquette") -> Syndrome:
    """Stabilizers of ``sector`` sharing an odd number of edges with ``error``.

    Args:
        model: a Kitaev2D model.
        error: set of flipped edges (or a SpinConfiguration relative to all-up).
        sector: ``"plaquette"`` or ``"star"``.
    """
    if model.kind != "Kitaev2D":
        raise ValueError("syndrome is defined for Kitaev2D models")
    if sector not in ("plaquette", "star"):
        raise ValueError(f"unknown sector: {sector!r}")
    edges = _as_error_set(model, error)
    table = model.edge_plaquettes if sector == "plaquette" else model.edge_stars
    counts = np.zeros(model.L * model.L, dtype=np.int64)
    for e in edges:
        counts[table[e, 0]] += 1
        counts[table[e, 1]] += 1
    return Syndrome(frozenset(np.flatnonzero(counts % 2 == 1).tolist()), sector)


def energy(model: LatticeModel, config) -> float:
    """Energy of a configuration.

    Ising kinds take a :class:`SpinConfiguration`.  ``Kitaev2D`` takes an
    error set (edges flipped from the reference frame) or a SpinConfiguration,
    and returns the total anyon count over both sectors -- one energy unit per
    anyon, so that creating one excitation pair costs 2.
    """
    if model.kind == "Kitaev2D":
        edges = _as_error_set(model, config)
        return float(len(syndrome(model, edges, "star").anyons)
                     + len(syndrome(model, edges, "plaquette").anyons))
    if not isinstance(config, SpinConfiguration):
        config = SpinConfiguration(np.asarray(config))
    if config.n != model.N:
        raise ValueError(f"configuration has {config.n} spins, model has {model.N}")
    s = config.spins.astype(np.float64)
    if model.kind == "Ising1D":
        return float(-model.J * np.dot(s, np.roll(s, -1)))
    if model.kind == "IsingMeanField":
        return float(-(model.J / (2 * model.N)) * s.sum() ** 2)
    # Ising2D
    grid = s.reshape(model.L, model.L)
    return float(-model.J * (np.sum(grid * np.roll(grid, -1, 0))
                             + np.sum(grid * np.roll(grid, -1, 1))))


def block_flip_delta(model: LatticeModel, k: int) -> float:
    """Energy cost of flipping a contiguous block of ``k`` spins in the all-up state.

    Closed forms (verified against direct energy evaluation in the tests):
    ring = 4J for any 0 < k < N; mean-field = 2Jk(1 - k/N).
    """
    if model.kind not in ("Ising1D", "IsingMeanField"):
        raise ValueError("block flips are defined for Ising1D and IsingMeanField")
    if not 0 < k < model.N:
        raise ValueError(f"block length k={k} out of range (0 < k < {model.N})")
    if model.kind == "Ising1D":
        return 4.0 * model.J
    return 2.0 * model.J * k * (1.0 - k / model.N)


def logical_operator(model: LatticeModel, mu: int, sector: str = "Z-type") -> LogicalOperator:
    """A minimal-support logical loop of the given winding direction and type.

    Z-type loops are primal cycles (row of horizontal edges for mu=1, column
    of vertical edges for mu=2); X-type loops are the dual cycles conjugate to
    them (column of horizontal edges for mu=1, row of vertical edges for mu=2),
    so that X^mu and Z^mu share exactly one edge.
    """
    if model.kind != "Kitaev2D":
        raise ValueError("logical operators are defined for Kitaev2D models")
    L = model.L
    if sector == "Z-type":
        if mu == 1:      # winds in x: horizontal edges of row y=0
            support = {0 * L + x for x in range(L)}
        else:            # winds in y: vertical edges of column x=0
            support = {L * L + y * L + 0 for y in range(L)}
    elif sector == "X-type":
        if mu == 1:      # dual loop crossing Z^1: horizontal edges of column x=0
            support = {y * L + 0 for y in range(L)}
        else:            # dual loop crossing Z^2: vertical edges of row y=0
            support = {L * L + 0 * L + x for x in range(L)}
    else:
        raise ValueError(f"unknown sector: {sector!r}")
    return LogicalOperator(mu, sector, frozenset(support))


def logical_bare(model: LatticeModel, error, op: LogicalOperator) -> int:
    """Bare value of a logical under an X-type error set: parity of crossings.

    Returns (-1)**|error intersect op.support| for Z-type operators (the edges
    where a sigma-x flip anticommutes with the sigma-z string).  X-type
    operators commute with X errors and always read +1.
    """
    edges = _as_error_set(model, error)
    if any(e >= model.N for e in op.support):
        raise ValueError("operator does not fit this model")
    if op.sector == "X-type":
        return 1
    return -1 if len(edges & op.support) % 2 else 1
