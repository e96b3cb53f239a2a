"""Circuit model, ``.sqc`` text format, layering and random circuit ensembles.

The ``.sqc`` format is line oriented::

    # comment
    qubits 3
    gate h 0
    gate cx 0 1
    barrier
    gate t 2

``barrier`` forces a layer boundary when the circuit is layered.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import gates as G
from .decomposition import ProjectorDecomposition, decompose_matrix, diagonal_decomposition, pad_layer
from .prng import SplitMix64


class CircuitError(ValueError):
    """Malformed circuit text or invalid gate placement."""


@dataclass(frozen=True)
class Gate:
    name: str
    qubits: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "name", self.name.lower())
        object.__setattr__(self, "qubits", tuple(int(q) for q in self.qubits))
        if self.name not in G.ARITY:
            raise CircuitError(f"unknown gate {self.name!r}")
        if len(self.qubits) != G.ARITY[self.name]:
            raise CircuitError(f"gate {self.name} takes {G.ARITY[self.name]} qubit(s), got {len(self.qubits)}")
        if len(set(self.qubits)) != len(self.qubits):
            raise CircuitError(f"gate {self.name} has repeated qubits {self.qubits}")

    @property
    def is_clifford(self) -> bool:
        return G.is_clifford(self.name)

    @property
    def is_diagonal(self) -> bool:
        return G.is_diagonal(self.name)

    @property
    def params(self) -> tuple:
        return G.PARAMS.get(self.name, ())

    @property
    def matrix(self) -> np.ndarray:
        return G.gate_matrix(self.name)

    def __str__(self) -> str:
        return f"{self.name} {' '.join(map(str, self.qubits))}"


@dataclass
class Circuit:
    n: int
    gates: list[Gate] = field(default_factory=list)
    barriers: set[int] = field(default_factory=set)  # gate indices preceded by a barrier

    def __post_init__(self):
        if self.n < 1:
            raise CircuitError("circuit needs at least one qubit")
        for g in self.gates:
            self._check(g)

    def _check(self, g: Gate) -> None:
        for q in g.qubits:
            if not 0 <= q < self.n:
                raise CircuitError(f"qubit {q} out of range for {self.n} qubits")

    def append(self, name: str, *qubits: int) -> "Circuit":
        g = Gate(name, qubits)
        self._check(g)
        self.gates.append(g)
        return self

    def barrier(self) -> "Circuit":
        self.barriers.add(len(self.gates))
        return self

    def to_dense(self) -> np.ndarray:
        u = np.eye(1 << self.n, dtype=complex)
        for g in self.gates:
            u = np.stack([G.apply_matrix(u[:, c], g.matrix, g.qubits, self.n) for c in range(u.shape[1])], axis=1)
        return u

    def statevector(self) -> np.ndarray:
        v = np.zeros(1 << self.n, dtype=complex)
        v[0] = 1.0
        for g in self.gates:
            v = G.apply_matrix(v, g.matrix, g.qubits, self.n)
        return v

    def __len__(self) -> int:
        return len(self.gates)


# --- text format ------------------------------------------------------------


def parse(text: str) -> Circuit:
    circ = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        key = parts[0].lower()
        try:
            if key == "qubits":
                if circ is not None:
                    raise CircuitError("duplicate qubits header")
                if len(parts) != 2:
                    raise CircuitError("expected 'qubits N'")
                circ = Circuit(int(parts[1]))
            elif key == "gate":
                if circ is None:
                    raise CircuitError("gate before 'qubits' header")
                if len(parts) < 2:
                    raise CircuitError("expected 'gate <name> <qubits...>'")
                name = parts[1].lower()
                if name not in G.SUPPORTED_GATES:
                    raise CircuitError(f"unknown gate {parts[1]!r}")
                circ.append(name, *(int(q) for q in parts[2:]))
            elif key == "barrier":
                if circ is None:
                    raise CircuitError("barrier before 'qubits' header")
                if len(parts) != 1:
                    raise CircuitError("barrier takes no arguments")
                circ.barrier()
            else:
                raise CircuitError(f"unrecognised line {line!r}")
        except CircuitError as exc:
            raise CircuitError(f"line {lineno}: {exc}") from None
        except ValueError:
            raise CircuitError(f"line {lineno}: malformed integer in {line!r}") from None
    if circ is None:
        raise CircuitError("missing 'qubits N' header")
    return circ


def serialize(circ: Circuit) -> str:
    lines = [f"qubits {circ.n}"]
    for i, g in enumerate(circ.gates):
        if i in circ.barriers:
            lines.append("barrier")
        lines.append(f"gate {g}")
    if len(circ.gates) in circ.barriers:
        lines.append("barrier")
    return "\n".join(lines) + "\n"


def load(path) -> Circuit:
    with open(path, encoding="utf-8") as fh:
        return parse(fh.read())


# --- layering ---------------------------------------------------------------------


@lru_cache(maxsize=256)
def _decompose_cached(key: bytes, dim: int) -> ProjectorDecomposition:
    u = np.frombuffer(key, dtype=complex).reshape(dim, dim)
    return decompose_matrix(u)


@dataclass
class FusedGate:
    """Non-Clifford gates on at most two qubits merged into one unitary."""

    qubits: tuple[int, ...]
    gates: list[Gate]
    _matrix: np.ndarray | None = field(default=None, repr=False)
    _decomp: ProjectorDecomposition | None = field(default=None, repr=False)

    @property
    def name(self) -> str:
        return "*".join(g.name for g in self.gates)

    @property
    def is_diagonal(self) -> bool:
        return all(g.is_diagonal for g in self.gates)

    @property
    def matrix(self) -> np.ndarray:
        if self._matrix is None:
            k = len(self.qubits)
            pos = {q: i for i, q in enumerate(self.qubits)}
            u = np.eye(1 << k, dtype=complex)
            for g in self.gates:
                u = G.embed_matrix(g.matrix, [pos[q] for q in g.qubits], k) @ u
            self._matrix = u
        return self._matrix

    @property
    def decomposition(self) -> ProjectorDecomposition:
        if self._decomp is None:
            u = np.ascontiguousarray(self.matrix)
            if len(self.qubits) > 2:
                if not self.is_diagonal:
                    raise CircuitError("non-diagonal composite on more than two qubits is unsupported")
                self._decomp = diagonal_decomposition(np.diag(u))
            else:
                self._decomp = _decompose_cached(u.tobytes(), u.shape[0])
        return self._decomp


@dataclass
class NonCliffordLayer:
    n: int
    placements: list[FusedGate]
    _padded: ProjectorDecomposition | None = field(default=None, repr=False)

    @property
    def decomposition(self) -> ProjectorDecomposition:
        """Full-width decomposition (placements padded with basis projectors)."""
        if self._padded is None:
            self._padded = pad_layer([(fg.decomposition, fg.qubits) for fg in self.placements], self.n)
        return self._padded

    @property
    def kappa(self) -> int:
        return self.decomposition.rank

    @property
    def gates(self) -> list[Gate]:
        return [g for fg in self.placements for g in fg.gates]

    @property
    def is_diagonal(self) -> bool:
        return all(fg.is_diagonal for fg in self.placements)


@dataclass
class LayeredCircuit:
    """Clifford layers ``C_0 .. C_d`` interleaved with non-Clifford ``N_1 .. N_d``.

    The circuit is ``C_d N_d ... C_1 N_1 C_0``.
    """

    n: int
    clifford_layers: list[list[Gate]]
    nc_layers: list[NonCliffordLayer]

    def __post_init__(self):
        if len(self.clifford_layers) != len(self.nc_layers) + 1:
            raise ValueError("need exactly one more Clifford layer than non-Clifford layers")

    @property
    def d_nc(self) -> int:
        return len(self.nc_layers)

    @property
    def layers(self) -> list:
        out: list = [self.clifford_layers[0]]
        for nc, cl in zip(self.nc_layers, self.clifford_layers[1:]):
            out += [nc, cl]
        return out

    def gate_sequence(self) -> list[Gate]:
        seq = list(self.clifford_layers[0])
        for nc, cl in zip(self.nc_layers, self.clifford_layers[1:]):
            seq += nc.gates + list(cl)
        return seq

    def statevector(self) -> np.ndarray:
        v = np.zeros(1 << self.n, dtype=complex)
        v[0] = 1.0
        for layer in self.layers:
            if isinstance(layer, NonCliffordLayer):
                for fg in layer.placements:
                    v = G.apply_matrix(v, fg.matrix, fg.qubits, self.n)
            else:
                for g in layer:
                    v = G.apply_matrix(v, g.matrix, g.qubits, self.n)
        return v

    def to_dense(self) -> np.ndarray:
        dim = 1 << self.n
        cols = []
        for c in range(dim):
            v = np.zeros(dim, dtype=complex)
            v[c] = 1.0
            for layer in self.layers:
                if isinstance(layer, NonCliffordLayer):
                    for fg in layer.placements:
                        v = G.apply_matrix(v, fg.matrix, fg.qubits, self.n)
                else:
                    for g in layer:
                        v = G.apply_matrix(v, g.matrix, g.qubits, self.n)
            cols.append(v)
        return np.stack(cols, axis=1)


def layerize(circ: Circuit, fuse: bool = True) -> LayeredCircuit:
    """Split a circuit into alternating Clifford and non-Clifford layers.

    Gates are scanned in order.  A Clifford gate joins the Clifford layer in
    front of the open non-Clifford layer when it shares no qubit with that
    layer or with gates already queued behind it; otherwise it is queued
    behind.  A non-Clifford gate joins the open layer unless queued Clifford
    gates touch its qubits.  Inside the layer it fuses with the gates it
    overlaps when all of their qubits lie within its own (for example a
    sqrt(W) followed by an fSim on the same qubit); any other overlap closes
    the layer and opens a new one.
    """
    n = circ.n
    cliffords: list[list[Gate]] = []
    ncs: list[NonCliffordLayer] = []
    front: list[Gate] = []  # Clifford gates before the open layer
    open_layer: list[FusedGate] = []
    back: list[Gate] = []  # Clifford gates after the open layer
    layer_qubits: set[int] = set()
    back_qubits: set[int] = set()

    def close():
        nonlocal front, open_layer, back, layer_qubits, back_qubits
        if open_layer:
            cliffords.append(front)
            ncs.append(NonCliffordLayer(n, open_layer))
            front, back = back, []
        else:
            front = front + back
            back = []
        open_layer = []
        layer_qubits = set()
        back_qubits = set()

    for idx, g in enumerate(circ.gates):
        if idx in circ.barriers:
            close()
        q = set(g.qubits)
        if g.is_clifford:
            if q & (layer_qubits | back_qubits):
                back.append(g)
                back_qubits |= q
            else:
                front.append(g)
            continue
        if q & back_qubits:
            close()
        touching = [fg for fg in open_layer if q & set(fg.qubits)]
        if touching:
            covered = set().union(*(fg.qubits for fg in touching))
            if fuse and covered <= q:
                merged_gates = [x for fg in touching for x in fg.gates] + [g]
                open_layer = [fg for fg in open_layer if fg not in touching]
                open_layer.append(FusedGate(tuple(sorted(q)), merged_gates))
                layer_qubits |= q
                continue
            close()
        open_layer.append(FusedGate(tuple(sorted(q)), [g]))
        layer_qubits |= q
    close()
    cliffords.append(front)
    for layer in ncs:
        layer.placements.sort(key=lambda fg: fg.qubits)
    return LayeredCircuit(n, cliffords, ncs)


def _components(qsets: list[set[int]]) -> list[list[int]]:
    parent: dict[int, int] = {}

    def find(a):
        while parent.setdefault(a, a) != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for s in qsets:
        items = sorted(s)
        for a in items:
            find(a)
        for a, b in zip(items, items[1:]):
            parent[find(a)] = find(b)
    groups: dict[int, list[int]] = {}
    for a in sorted(parent):
        groups.setdefault(find(a), []).append(a)
    return sorted(groups.values())


def _merge_diagonal(n: int, gates: list[Gate]) -> NonCliffordLayer:
    comps = _components([set(g.qubits) for g in gates])
    placements = []
    for comp in comps:
        comp_set = set(comp)
        members = [g for g in gates if set(g.qubits) <= comp_set]
        placements.append(FusedGate(tuple(comp), members))
    return NonCliffordLayer(n, placements)


def compress_diagonal_layers(layered: LayeredCircuit) -> LayeredCircuit:
    """Merge diagonal non-Clifford layers that are not separated by non-diagonal gates.

    Starting at a diagonal layer, every later diagonal gate whose qubits have
    not yet been touched by a non-diagonal gate commutes back into it.  The
    merged layer holds one fused gate per connected component of the
    absorbed gates; everything left over is layered again and compressed in
    turn.
    """
    n = layered.n
    cl = layered.clifford_layers
    ncs = layered.nc_layers
    out_cl = [list(cl[0])]
    out_nc: list[NonCliffordLayer] = []
    for i, layer in enumerate(ncs):
        if layer.is_diagonal:
            region = list(layer.gates)
            rest: list[Gate] = []
            closed: set[int] = set()
            absorbed_nc = False
            tail = list(cl[i + 1])
            for lay, c in zip(ncs[i + 1:], cl[i + 2:]):
                tail += lay.gates + list(c)
            for g in tail:
                if g.is_diagonal and not closed & set(g.qubits):
                    region.append(g)
                    absorbed_nc |= not g.is_clifford
                else:
                    rest.append(g)
                    closed |= set(g.qubits)
            if absorbed_nc:
                out_nc.append(_merge_diagonal(n, region))
                remainder = compress_diagonal_layers(layerize(Circuit(n, rest)))
                out_cl.append(list(remainder.clifford_layers[0]))
                out_cl.extend(list(c) for c in remainder.clifford_layers[1:])
                out_nc.extend(remainder.nc_layers)
                return LayeredCircuit(n, out_cl, out_nc)
        out_nc.append(layer)
        out_cl.append(list(cl[i + 1]))
    return LayeredCircuit(n, out_cl, out_nc)


# --- ensembles -------------------------------------------------------------------

FAMILIES = ("cz", "cs", "supremacy_like")
CLIFFORD_POOL = ("h", "s", "sx", "sy")
SUPREMACY_POOL = ("sx", "sy", "w")


def ensemble_generate(family: str, n: int, cycles: int, p: float = 0.0, seed: int = 0) -> Circuit:
    """Random layered circuit of one of the benchmark families.

    Each cycle is a single-qubit round followed by a two-qubit round on a
    1-D brickwork: pairs ``(0,1), (2,3), ...`` on even cycles and ``(1,2),
    (3,4), ...`` on odd cycles.  Single-qubit gates use one SplitMix64 stream
    per qubit.  For ``cz`` and ``cs`` each single-qubit gate is T with
    probability ``p`` and otherwise uniform over ``h, s, sx, sy``.  For
    ``supremacy_like`` it is uniform over ``sx, sy, w`` excluding the gate the
    same qubit received in the previous cycle, and the two-qubit gate is fSim.
    """
    if family not in FAMILIES:
        raise CircuitError(f"unknown family {family!r}")
    if not 0.0 <= p <= 1.0:
        raise CircuitError("p must lie in [0, 1]")
    if n < 1 or cycles < 0:
        raise CircuitError("need n >= 1 and cycles >= 0")
    streams = [SplitMix64(seed, stream=q + 1) for q in range(n)]
    two = {"cz": "cz", "cs": "cs", "supremacy_like": "fsim"}[family]
    circ = Circuit(n)
    last: list[str | None] = [None] * n
    for c in range(cycles):
        for q in range(n):
            rng = streams[q]
            if family == "supremacy_like":
                pool = [g for g in SUPREMACY_POOL if g != last[q]]
                name = rng.choice(pool)
            else:
                name = "t" if rng.random() < p else rng.choice(CLIFFORD_POOL)
            last[q] = name
            circ.append(name, q)
        for a in range(c % 2, n - 1, 2):
            circ.append(two, a, a + 1)
    return circ


def iqp_circuit(n: int, rounds: int, seed: int = 0) -> Circuit:
    """``H^n, D_1 ... D_rounds, H^n`` with random diagonal rounds of t, cs and cz."""
    rng = SplitMix64(seed)
    circ = Circuit(n)
    for q in range(n):
        circ.append("h", q)
    for _ in range(rounds):
        for q in range(n):
            if rng.below(2):
                circ.append("t", q)
        for a in range(n - 1):
            r = rng.below(3)
            if r == 1:
                circ.append("cs", a, a + 1)
            elif r == 2:
                circ.append("cz", a, a + 1)
    for q in range(n):
        circ.append("h", q)
    return circ


# --- statistics ----------------------------------------------------------------


@dataclass
class CircuitStats:
    n: int
    m: int
    d: int
    d_nc: int
    t: int
    kappas: list[int]
    log2_spir: float
    log2_spc: float


def circuit_depth(gates, n: int) -> int:
    level = [0] * n
    for g in gates:
        top = max(level[q] for q in g.qubits) + 1
        for q in g.qubits:
            level[q] = top
    return max(level, default=0)


def stats(layered: LayeredCircuit) -> CircuitStats:
    from .cost import spc_cost_log2, spir_cost_log2

    seq = layered.gate_sequence()
    kappas = [layer.kappa for layer in layered.nc_layers]
    return CircuitStats(
        n=layered.n,
        m=len(seq),
        d=circuit_depth(seq, layered.n),
        d_nc=layered.d_nc,
        t=sum(1 for g in seq if not g.is_clifford),
        kappas=kappas,
        log2_spir=spir_cost_log2(kappas, layered.n),
        log2_spc=spc_cost_log2(kappas, layered.n),
    )


def lint_consecutive(circ: Circuit) -> list[tuple[int, str]]:
    """Qubits receiving the same single-qubit gate in two consecutive cycles.

    Cycles are delimited by each qubit's sequence of single-qubit gates.
    Returns ``(qubit, gate)`` pairs for every violation.
    """
    last: dict[int, str] = {}
    bad = []
    for g in circ.gates:
        if len(g.qubits) != 1:
            continue
        q = g.qubits[0]
        if last.get(q) == g.name:
            bad.append((q, g.name))
        last[q] = g.name
    return bad


def log2_or_zero(v: float) -> float:
    return math.log2(v) if v > 0 else 0.0
