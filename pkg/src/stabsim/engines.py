"""Amplitude engines: dense statevector, SPIR, SPC, SPC with Sum-over-Clifford, and cutting.

Every engine computes ``<x|U|0^n>``.  Inner products between stabilizer
states are exact; floating point only enters when they are multiplied by
decomposition coefficients.  All floating sums run in a fixed order (term
index ascending, left branch before right), and worker threads only compute
independent pieces that are reduced in that same order, so results do not
depend on the thread count.
"""

from __future__ import annotations

import itertools
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import gates as G
from .circuit import Circuit, Gate, LayeredCircuit, layerize
from .decomposition import DecompositionError, ProjectorDecomposition, sum_over_clifford
from .exact import ONE, ZERO, ExactScalar
from .stabilizer import (
    DENSE_LIMIT,
    StabilizerState,
    apply_clifford,
    basis_state,
    inner_product,
    project_subsystem,
    zero_state,
)


class EngineError(RuntimeError):
    pass


class CapacityError(EngineError):
    """Live term count would exceed the configured memory cap."""


@dataclass
class ExecutionTrace:
    inner_product_count: int = 0
    leaf_count: int = 0
    max_live_terms: int = 0
    wall_time: float = 0.0
    branch_counts: dict = field(default_factory=dict)  # recursion level -> branches expanded
    layer_terms: list = field(default_factory=list)  # live terms after each non-Clifford layer
    switch_layer: int | None = None  # SoC: index of the first collapsed layer
    configurations: int = 0  # cutting: patched configurations evaluated
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False, compare=False)

    def add(self, ips: int = 0, leaves: int = 0, level: int | None = None, branches: int = 0) -> None:
        with self._lock:
            self.inner_product_count += ips
            self.leaf_count += leaves
            if level is not None:
                self.branch_counts[level] = self.branch_counts.get(level, 0) + branches

    def live(self, k: int) -> None:
        with self._lock:
            self.max_live_terms = max(self.max_live_terms, k)


def _parse_bits(x, n: int) -> int:
    if isinstance(x, str):
        if len(x) != n or any(c not in "01" for c in x):
            raise ValueError(f"bit string must have {n} characters from '01', got {x!r}")
        return int(x, 2)
    x = int(x)
    if not 0 <= x < (1 << n):
        raise ValueError("basis index out of range")
    return x


# --- dense oracle --------------------------------------------------------------------


def amplitude_dense(circuit, x, limit: int = DENSE_LIMIT) -> complex:
    """``<x|U|0>`` by statevector evolution."""
    if circuit.n > limit:
        raise EngineError(f"n={circuit.n} exceeds the dense limit {limit}")
    q = _parse_bits(x, circuit.n)
    return complex(circuit.statevector()[q])


# --- shared helpers -----------------------------------------------------------------------


def apply_layer(state: StabilizerState, layer) -> StabilizerState:
    for g in layer:
        if state.is_zero:
            return state
        state = apply_clifford(state, g.name, g.qubits)
    return state


def apply_layer_inverse(state: StabilizerState, layer) -> StabilizerState:
    for g in reversed(layer):
        if state.is_zero:
            return state
        state = apply_clifford(state, G.INVERSE[g.name], g.qubits)
    return state


def _restrict(y: int, n: int, qubits) -> int:
    out = 0
    for q in qubits:
        out = (out << 1) | ((y >> (n - 1 - q)) & 1)
    return out


def _factors(decomp: ProjectorDecomposition):
    if decomp.factors is not None:
        return decomp.factors
    return [(decomp, list(range(decomp.arity)))]


def layer_coefficients(decomp: ProjectorDecomposition) -> list[complex]:
    """Term coefficients in canonical order, computed the same way as ``terms``."""
    if decomp.factors is None:
        return [t.coefficient for t in decomp.terms]
    out = []
    for combo in itertools.product(*[d.terms for d, _ in decomp.factors]):
        c = 1.0 + 0j
        for t in combo:
            c *= t.coefficient
        out.append(c)
    return out


def overlaps(decomp: ProjectorDecomposition, psi: StabilizerState) -> list[ExactScalar]:
    """Exact ``<phi_i|psi>`` for every term of a (factored) decomposition.

    Terms are visited as a tree over the factors: ``psi`` is projected onto
    one factor state at a time, and a zero projection prunes the whole
    subtree.  At a leaf the projected state equals ``|phi_i><phi_i|psi>`` so
    the overlap is a ratio of two amplitudes at any support point.
    """
    factors = _factors(decomp)
    n = psi.n
    total = decomp.rank
    if psi.is_zero:
        return [ZERO] * total
    sizes = [d.rank for d, _ in factors]
    out: list[ExactScalar] = []

    def walk(level: int, chi: StabilizerState, chosen: list) -> None:
        if level == len(factors):
            y = chi.pivot
            denom = ONE
            for (d, qs), t in zip(factors, chosen):
                denom = denom * t.state.amplitude_at(_restrict(y, n, qs))
            out.append(chi.amp / denom)
            return
        d, qs = factors[level]
        span = 1
        for s in sizes[level + 1:]:
            span *= s
        for t in d.terms:
            nxt = project_subsystem(chi, t.state, qs)
            if nxt.is_zero:
                out.extend([ZERO] * span)
            else:
                chosen.append(t)
                walk(level + 1, nxt, chosen)
                chosen.pop()

    walk(0, psi, [])
    return out


def _map_ordered(fn, items, pool):
    if pool is None:
        return [fn(it) for it in items]
    return list(pool.map(fn, items))


# --- SPIR --------------------------------------------------------------------------------


class _Spir:
    def __init__(self, layered: LayeredCircuit, trace: ExecutionTrace, pool, split=None):
        self.L = layered
        self.trace = trace
        self.pool = pool
        self.split = split
        self.coeffs = [layer_coefficients(l.decomposition) for l in layered.nc_layers]
        self.terms = [None] * layered.d_nc

    def layer_terms(self, j: int):
        # j is the 1-based non-Clifford layer index
        if self.terms[j - 1] is None:
            self.terms[j - 1] = [t.state for t in self.L.nc_layers[j - 1].decomposition.terms]
        return self.terms[j - 1]

    def run(self, a: int, b: int, bra: StabilizerState, ket: StabilizerState, level: int, top: bool = False) -> complex:
        """``<bra| C_b N_b ... N_{a+1} C_a |ket>``."""
        L = self.L
        d = b - a
        if d == 0:
            self.trace.add(ips=1, leaves=1)
            return complex(inner_product(bra, apply_layer(ket, L.clifford_layers[a])))
        if d == 1:
            return self._depth_one(a, bra, ket)
        m = a + (d + 1) // 2
        if top and self.split is not None:
            if not a < self.split <= b:
                raise EngineError(f"split layer {self.split} outside 1..{b}")
            m = self.split
        coeffs = self.coeffs[m - 1]
        kappa = len(coeffs)
        self.trace.add(level=level, branches=kappa)
        self.trace.live(level + 1)
        states = self.layer_terms(m)

        def left_values():
            if m - 1 == a:
                ket_c = apply_layer(ket, L.clifford_layers[a])
                self.trace.add(ips=kappa, leaves=kappa)
                return [complex(v) for v in overlaps(L.nc_layers[m - 1].decomposition, ket_c)]
            return _map_ordered(lambda phi: self.run(a, m - 1, phi, ket, level + 1), states, self.pool if top else None)

        left = left_values()
        live = [i for i in range(kappa) if left[i] != 0]
        if b == m:
            bra_c = apply_layer_inverse(bra, L.clifford_layers[m])
            ov = overlaps(L.nc_layers[m - 1].decomposition, bra_c)
            self.trace.add(ips=len(live), leaves=len(live))
            right = {i: complex(ov[i].conj()) for i in live}
        else:
            vals = _map_ordered(
                lambda i: self.run(m, b, bra, states[i], level + 1), live, self.pool if top else None
            )
            right = dict(zip(live, vals))
        acc = 0j
        for i in live:
            acc += coeffs[i] * (right[i] * left[i])
        return acc

    def _depth_one(self, a: int, bra: StabilizerState, ket: StabilizerState) -> complex:
        L = self.L
        decomp = L.nc_layers[a].decomposition
        coeffs = self.coeffs[a]
        ket_c = apply_layer(ket, L.clifford_layers[a])
        bra_c = apply_layer_inverse(bra, L.clifford_layers[a + 1])
        ov_k = overlaps(decomp, ket_c)
        ov_b = overlaps(decomp, bra_c)
        self.trace.add(ips=len(coeffs), leaves=1)
        acc = 0j
        for c, kb, kk in zip(coeffs, ov_b, ov_k):
            v = kb.conj() * kk
            if v:
                acc += c * complex(v)
        return acc


def amplitude_spir(layered: LayeredCircuit, x, threads: int = 1, split: int | None = None):
    """SPIR amplitude ``<x|U|0^n>`` and its execution trace.

    The recursion splits at the middle non-Clifford layer ``ceil(d/2)`` (or
    at ``split`` for the outermost call) and sums over that layer's terms.
    """
    t0 = time.perf_counter()
    n = layered.n
    q = _parse_bits(x, n)
    trace = ExecutionTrace()
    bra = basis_state(format(q, f"0{n}b"))
    pool = ThreadPoolExecutor(threads) if threads > 1 else None
    try:
        val = _Spir(layered, trace, pool, split).run(0, layered.d_nc, bra, zero_state(n), 0, top=True)
    finally:
        if pool is not None:
            pool.shutdown()
    trace.wall_time = time.perf_counter() - t0
    return val, trace


# --- SPC -------------------------------------------------------------------------------


@dataclass
class StabilizerSum:
    terms: list[tuple[complex, StabilizerState]]

    def __len__(self) -> int:
        return len(self.terms)

    def amplitude(self, q: int) -> complex:
        acc = 0j
        for c, st in self.terms:
            if c != 0:
                a = st.amplitude_at(q)
                if a:
                    acc += c * complex(a)
        return acc

    def to_dense(self) -> np.ndarray:
        out = None
        for c, st in self.terms:
            v = c * st.to_dense()
            out = v if out is None else out + v
        return out

    def gram_sum(self) -> complex:
        """``sum_ij conj(c_i) c_j <phi_i|phi_j>``, the squared norm of the sum."""
        acc = 0j
        for ci, si in self.terms:
            if ci == 0:
                continue
            for cj, sj in self.terms:
                if cj == 0:
                    continue
                v = inner_product(si, sj)
                if v:
                    acc += ci.conjugate() * cj * complex(v)
        return acc


def _collapse(terms, layer, clifford_after, trace, pool, prune, j, mem_cap):
    decomp = layer.decomposition
    kappa = decomp.rank
    if mem_cap is not None and kappa > mem_cap:
        raise CapacityError(f"non-Clifford layer {j} has kappa={kappa}, above the memory cap of {mem_cap} terms")
    coeffs = layer_coefficients(decomp)
    active = [(a, st) for a, st in terms if a != 0 and not st.is_zero]
    ovs = _map_ordered(lambda t: overlaps(decomp, t[1]), active, pool)
    acc = [0j] * kappa
    for (a, _), ov in zip(active, ovs):
        for i, v in enumerate(ov):
            if v:
                acc[i] += a * complex(v)
    trace.add(ips=len(active) * kappa)
    states = [t.state for t in decomp.terms]
    new_states = _map_ordered(lambda st: apply_layer(st, clifford_after), states, pool)
    out = []
    for c, s, st in zip(coeffs, acc, new_states):
        coef = c * s
        if prune and abs(coef) < 1e-12:
            continue
        out.append((coef, st))
    trace.live(len(out))
    trace.layer_terms.append(len(out))
    return out


def evolve_spc(layered: LayeredCircuit, threads: int = 1, mem_cap: int | None = None, prune: bool = False):
    """Run SPC and return the final :class:`StabilizerSum` with its trace."""
    t0 = time.perf_counter()
    trace = ExecutionTrace()
    terms = [(1.0 + 0j, apply_layer(zero_state(layered.n), layered.clifford_layers[0]))]
    trace.live(1)
    pool = ThreadPoolExecutor(threads) if threads > 1 else None
    try:
        for j, layer in enumerate(layered.nc_layers, 1):
            terms = _collapse(terms, layer, layered.clifford_layers[j], trace, pool, prune, j, mem_cap)
    finally:
        if pool is not None:
            pool.shutdown()
    trace.wall_time = time.perf_counter() - t0
    return StabilizerSum(terms), trace


def amplitude_spc(layered: LayeredCircuit, x, threads: int = 1, mem_cap: int | None = None, prune: bool = False):
    q = _parse_bits(x, layered.n)
    t0 = time.perf_counter()
    ssum, trace = evolve_spc(layered, threads, mem_cap, prune)
    val = ssum.amplitude(q)
    trace.inner_product_count += len(ssum)
    trace.wall_time = time.perf_counter() - t0
    return val, trace


# --- SPC with Sum-over-Clifford prefix ----------------------------------------------------------


def _soc_rank(layer) -> int:
    r = 1
    for g in layer.gates:
        r *= len(_soc_terms(g.name))
    return r


def _soc_terms(name: str):
    try:
        return sum_over_clifford(name)
    except DecompositionError:
        raise EngineError(f"gate {name!r} has no Sum-over-Clifford expansion") from None


def _expand_soc(terms, gate: Gate, pool):
    soc = _soc_terms(gate.name)

    def expand(item):
        a, st = item
        out = []
        for t in soc:
            new = st
            for name, rel in t.word:
                new = apply_clifford(new, name, [gate.qubits[r] for r in rel])
            out.append((a * t.coefficient, new))
        return out

    return [x for chunk in _map_ordered(expand, terms, pool) for x in chunk]


def amplitude_spc_soc(layered: LayeredCircuit, x, threads: int = 1, mem_cap: int | None = None, prune: bool = False):
    """Sum-over-Clifford evolution that switches to SPC collapses.

    Terms multiply by each gate's Sum-over-Clifford rank until the predicted
    count for the next layer would exceed that layer's ``kappa``; from then
    on every layer is collapsed as in :func:`evolve_spc`.
    """
    t0 = time.perf_counter()
    q = _parse_bits(x, layered.n)
    trace = ExecutionTrace()
    terms = [(1.0 + 0j, apply_layer(zero_state(layered.n), layered.clifford_layers[0]))]
    trace.live(1)
    collapsed = False
    pool = ThreadPoolExecutor(threads) if threads > 1 else None
    try:
        for j, layer in enumerate(layered.nc_layers, 1):
            after = layered.clifford_layers[j]
            if not collapsed and len(terms) * _soc_rank(layer) > layer.kappa:
                collapsed = True
                trace.switch_layer = j
            if collapsed:
                terms = _collapse(terms, layer, after, trace, pool, prune, j, mem_cap)
                continue
            for g in layer.gates:
                terms = _expand_soc(terms, g, pool)
            if mem_cap is not None and len(terms) > mem_cap:
                raise CapacityError(f"non-Clifford layer {j} has {len(terms)} Clifford terms, above the memory cap")
            terms = _map_ordered(lambda t: (t[0], apply_layer(t[1], after)), terms, pool)
            trace.live(len(terms))
            trace.layer_terms.append(len(terms))
    finally:
        if pool is not None:
            pool.shutdown()
    val = StabilizerSum(terms).amplitude(q)
    trace.inner_product_count += len(terms)
    trace.wall_time = time.perf_counter() - t0
    return val, trace


# --- circuit cutting ---------------------------------------------------------------------------


@dataclass
class CutPlan:
    """Two-patch partition; ``partition[q]`` is 0 for patch A and 1 for patch B."""

    partition: tuple[int, ...]
    cut_gates: tuple[int, ...]

    @property
    def cut_count(self) -> int:
        return len(self.cut_gates)

    def validate(self, circuit: Circuit) -> None:
        if len(self.partition) != circuit.n or set(self.partition) - {0, 1}:
            raise EngineError("partition must assign every qubit to patch 0 or 1")
        if len(set(self.partition)) != 2:
            raise EngineError("both patches must be non-empty")
        crossing = set()
        for idx, g in enumerate(circuit.gates):
            sides = {self.partition[q] for q in g.qubits}
            if len(sides) == 2:
                if g.name != "cz":
                    raise EngineError(f"gate {idx} ({g}) crosses the cut but is not a CZ")
                crossing.add(idx)
        if crossing != set(self.cut_gates):
            raise EngineError("cut_gates must list exactly the cross-patch CZ gates")


def plan_cut(circuit: Circuit, max_cuts: int | None = None) -> CutPlan | None:
    """Contiguous split ``[0, h) | [h, n)`` with fewest crossing gates, all CZ.

    Ties prefer the most balanced split.  Returns ``None`` when no split
    has only CZ gates across it (or more than ``max_cuts`` of them).
    """
    n = circuit.n
    best = None
    for h in range(1, n):
        part = tuple(0 if q < h else 1 for q in range(n))
        cut = []
        ok = True
        for idx, g in enumerate(circuit.gates):
            if len({part[q] for q in g.qubits}) == 2:
                if g.name != "cz":
                    ok = False
                    break
                cut.append(idx)
        if not ok or (max_cuts is not None and len(cut) > max_cuts):
            continue
        key = (len(cut), abs(n - 2 * h))
        if best is None or key < best[0]:
            best = (key, CutPlan(part, tuple(cut)))
    return None if best is None else best[1]


def amplitude_cut_hybrid(circuit: Circuit, plan: CutPlan, x, threads: int = 1, mem_cap: int | None = None):
    """Split every cut CZ as ``|0><0| (x) I + |1><1| (x) Z`` and simulate the patches with SPC.

    For each of the ``2**x`` assignments, taken in lexicographic order, the
    patch A qubit of each cut CZ gets the projector ``|b><b|`` and the patch
    B qubit gets ``Z**b``; the amplitude is the sum of products of the two
    patch amplitudes.
    """
    t0 = time.perf_counter()
    plan.validate(circuit)
    q = _parse_bits(x, circuit.n)
    n = circuit.n
    bits = format(q, f"0{n}b")
    qa = [i for i in range(n) if plan.partition[i] == 0]
    qb = [i for i in range(n) if plan.partition[i] == 1]
    ia = {v: k for k, v in enumerate(qa)}
    ib = {v: k for k, v in enumerate(qb)}
    xa = "".join(bits[i] for i in qa)
    xb = "".join(bits[i] for i in qb)
    cut_set = set(plan.cut_gates)
    trace = ExecutionTrace()
    cache_a: dict = {}
    cache_b: dict = {}

    def patch_amp(side, assignment):
        cache = cache_a if side == 0 else cache_b
        if assignment in cache:
            return cache[assignment]
        idx_map = ia if side == 0 else ib
        sub = Circuit(len(idx_map))
        k = 0
        for idx, g in enumerate(circuit.gates):
            if idx in cut_set:
                b = assignment[k]
                k += 1
                mine = [qq for qq in g.qubits if plan.partition[qq] == side][0]
                if side == 0:
                    sub.gates.append(Gate("p1" if b else "p0", (idx_map[mine],)))
                elif b:
                    sub.gates.append(Gate("z", (idx_map[mine],)))
                continue
            if plan.partition[g.qubits[0]] == side:
                sub.gates.append(Gate(g.name, tuple(idx_map[qq] for qq in g.qubits)))
        amp, tr = amplitude_spc(layerize(sub), xa if side == 0 else xb, threads, mem_cap)
        trace.add(ips=tr.inner_product_count)
        trace.live(tr.max_live_terms)
        cache[assignment] = amp
        return amp

    total = 0j
    for assignment in itertools.product((0, 1), repeat=plan.cut_count):
        a_amp = patch_amp(0, assignment)
        trace.configurations += 1
        if a_amp == 0:
            continue
        total += a_amp * patch_amp(1, assignment)
    trace.wall_time = time.perf_counter() - t0
    return total, trace


METHODS = ("dense", "spir", "spc", "spc-soc", "cut")


def simulate(circuit: Circuit, x, method: str = "spir", threads: int = 1, mem_cap: int | None = None, prune: bool = False):
    """Dispatch helper used by the CLI; returns ``(amplitude, trace)``."""
    if method == "dense":
        t0 = time.perf_counter()
        val = amplitude_dense(circuit, x)
        tr = ExecutionTrace(wall_time=time.perf_counter() - t0)
        return val, tr
    if method == "cut":
        plan = plan_cut(circuit)
        if plan is None:
            raise EngineError("no two-patch split with only CZ gates across it")
        return amplitude_cut_hybrid(circuit, plan, x, threads, mem_cap)
    layered = layerize(circuit)
    if method == "spir":
        return amplitude_spir(layered, x, threads)
    if method == "spc":
        return amplitude_spc(layered, x, threads, mem_cap, prune)
    if method == "spc-soc":
        return amplitude_spc_soc(layered, x, threads, mem_cap, prune)
    raise EngineError(f"unknown method {method!r}")
