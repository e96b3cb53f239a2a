"""Phase-exact stabilizer states.

A state is stored as ``n`` commuting Hermitian Pauli generators plus one
"pivot" computational basis string together with its exact amplitude
``<pivot|psi>``.  The generators fix the state up to a complex factor and the
pivot amplitude fixes that factor, so global phases and the norm of
unnormalized (projected) states are tracked exactly.

Internally a Pauli is the tuple ``(x, z, phase)`` using the same conventions
as :class:`stabsim.pauli.PauliOperator` (bit ``n-1-j`` is qubit ``j``, Y is a
symbol, ``phase`` is a power of ``i``).  Any amplitude ``<q|psi>`` follows
from the pivot amplitude: find the stabilizer element ``S`` whose X part is
``q ^ pivot``; then ``<q|psi> = <q|S|psi>`` is a phase times the pivot
amplitude.  The echelon form needed for that lookup is cached per state.
"""

from __future__ import annotations

import re
from collections.abc import Iterator, Sequence

import numpy as np

from .exact import ONE, ZERO, ExactScalar
from .pauli import PauliOperator
from .prng import SplitMix64

DENSE_LIMIT = 14

_HALF = ExactScalar(0, 2)
_INV_SQRT2 = ExactScalar(0, 1)

Pauli = tuple  # (x, z, phase)


def _pmul(a: Pauli, b: Pauli) -> Pauli:
    x1, z1, p1 = a
    x2, z2, p2 = b
    x = x1 ^ x2
    z = z1 ^ z2
    e = p1 + (x1 & z1).bit_count() + p2 + (x2 & z2).bit_count() + 2 * (z1 & x2).bit_count()
    return (x, z, (e - (x & z).bit_count()) & 3)


def _anticommute(a: Pauli, b: Pauli) -> bool:
    return ((a[0] & b[1]).bit_count() + (a[1] & b[0]).bit_count()) & 1 == 1


def _basis_phase(p: Pauli, b: int) -> int:
    """Exponent ``e`` (power of i) with ``P|b> = i**e |b ^ P.x>``."""
    x, z, ph = p
    return (ph + (x & z).bit_count() + 2 * (z & b).bit_count()) & 3


def _x_echelon(rows: Sequence[Pauli], n: int):
    """Reduced echelon on the X parts.

    Returns ``(xrows, zrows)``: ``xrows`` is a list of ``(lead_bit, row)``
    sorted by decreasing lead bit, each lead bit appearing in exactly one
    row; ``zrows`` are the remaining rows, which have no X part.
    """
    rest = list(rows)
    xrows: list[tuple[int, Pauli]] = []
    for pos in range(n - 1, -1, -1):
        bit = 1 << pos
        idx = -1
        for i, r in enumerate(rest):
            if r[0] & bit:
                idx = i
                break
        if idx < 0:
            continue
        piv = rest.pop(idx)
        rest = [_pmul(r, piv) if r[0] & bit else r for r in rest]
        xrows = [(lb, _pmul(r, piv)) if r[0] & bit else (lb, r) for lb, r in xrows]
        xrows.append((bit, piv))
    return xrows, rest


def _solve_z(zrows: Sequence[Pauli], n: int) -> int:
    """A basis string ``a`` with ``+1`` eigenvalue under every Z-type row."""
    eqs = []
    for x, z, ph in zrows:
        if x:
            raise ValueError("row has an X part")
        if ph & 1:
            raise ValueError("non-Hermitian stabilizer row")
        eqs.append([z, (ph >> 1) & 1])
    pivots = []
    for pos in range(n - 1, -1, -1):
        bit = 1 << pos
        idx = next((i for i in range(len(pivots), len(eqs)) if eqs[i][0] & bit), -1)
        if idx < 0:
            continue
        k = len(pivots)
        eqs[k], eqs[idx] = eqs[idx], eqs[k]
        for i in range(len(eqs)):
            if i != k and eqs[i][0] & bit:
                eqs[i][0] ^= eqs[k][0]
                eqs[i][1] ^= eqs[k][1]
        pivots.append(bit)
    for z, rhs in eqs[len(pivots):]:
        if rhs:
            raise ValueError("inconsistent stabilizer group (contains -I)")
    a = 0
    for bit, (z, rhs) in zip(pivots, eqs):
        if rhs:
            a |= bit
    return a


class StabilizerState:
    """An (optionally unnormalized) stabilizer ket with exact global phase.

    Instances are immutable.  ``amp`` is the exact amplitude at ``pivot``
    and already includes any scalar prefactor; a zero state has
    ``is_zero`` set and no meaningful generators.
    """

    __slots__ = ("n", "gens", "pivot", "amp", "_ech", "_key")

    def __init__(self, n: int, gens, pivot: int, amp: ExactScalar):
        self.n = n
        self.gens = tuple(gens)
        self.pivot = pivot
        self.amp = amp
        self._ech = None
        self._key = None

    # --- constructors -------------------------------------------------
    @classmethod
    def zero_state(cls, n: int) -> "StabilizerState":
        return cls(n, (), 0, ZERO)

    @classmethod
    def from_generators(cls, generators, pivot_amplitude: ExactScalar | None = None, pivot: int | None = None):
        """Build a state from Hermitian generators.

        ``pivot`` defaults to a support point solved from the generators and
        ``pivot_amplitude`` to ``2**(-r/2)`` (a unit ket, ``r`` the X rank).
        """
        gens = []
        n = None
        for g in generators:
            if isinstance(g, str):
                g = PauliOperator.from_string(g)
            if isinstance(g, PauliOperator):
                if n is None:
                    n = g.n
                g = (g.x_bits, g.z_bits, g.phase)
            gens.append(g)
        if n is None:
            raise ValueError("need at least one generator")
        st = cls(n, gens, 0, ONE)
        st._validate()
        xrows, zrows = st._echelon()
        if pivot is None:
            pivot = _solve_z(zrows, n)
        if pivot_amplitude is None:
            pivot_amplitude = ExactScalar(0, len(xrows))
        out = cls(n, gens, pivot, pivot_amplitude)
        if not out.amplitude_at(pivot):
            raise ValueError("pivot is not in the support of the state")
        out._ech = st._ech
        return out

    def _validate(self) -> None:
        gens = self.gens
        if len(gens) != self.n:
            raise ValueError(f"need {self.n} generators, got {len(gens)}")
        for i, g in enumerate(gens):
            if g[2] & 1:
                raise ValueError("generators must be Hermitian")
            for h in gens[i + 1:]:
                if _anticommute(g, h):
                    raise ValueError("generators must commute")
        xrows, zrows = self._echelon()
        if any(r[1] == 0 for r in zrows):
            raise ValueError("generators are dependent")
        _solve_z(zrows, self.n)

    # --- basic properties ---------------------------------------------
    @property
    def is_zero(self) -> bool:
        return self.amp.zero

    @property
    def generators(self) -> list[PauliOperator]:
        return [PauliOperator(self.n, x, z, p) for x, z, p in self.gens]

    def _echelon(self):
        if self._ech is None:
            self._ech = _x_echelon(self.gens, self.n)
        return self._ech

    @property
    def x_rank(self) -> int:
        return 0 if self.is_zero else len(self._echelon()[0])

    def amplitude_at(self, q: int) -> ExactScalar:
        """Exact ``<q|psi>`` for the basis string with integer value ``q``."""
        if self.is_zero:
            return ZERO
        xrows, _ = self._echelon()
        delta = q ^ self.pivot
        acc = (0, 0, 0)
        for lead, row in xrows:
            if delta & lead:
                delta ^= row[0]
                acc = _pmul(acc, row)
        if delta:
            return ZERO
        return self.amp.times_omega(2 * _basis_phase(acc, self.pivot))

    def amplitude(self, bits: str) -> ExactScalar:
        if len(bits) != self.n:
            raise ValueError("bit string length mismatch")
        return self.amplitude_at(int(bits, 2))

    def min_support(self) -> int:
        xrows, _ = self._echelon()
        q = self.pivot
        for lead, row in xrows:
            if q & lead:
                q ^= row[0]
        return q

    @property
    def scalar(self) -> ExactScalar:
        """Prefactor relative to the canonical unit ket.

        The canonical ket has a positive real amplitude at the smallest
        basis string of its support, so this is that amplitude rescaled to
        unit norm.  Its modulus is the norm of the state.
        """
        if self.is_zero:
            return ZERO
        return self.amplitude_at(self.min_support()) * ExactScalar(0, -self.x_rank)

    def norm(self) -> ExactScalar:
        return self.scalar.magnitude()

    def scaled(self, factor: ExactScalar) -> "StabilizerState":
        if factor.zero:
            return StabilizerState.zero_state(self.n)
        out = StabilizerState(self.n, self.gens, self.pivot, self.amp * factor)
        out._ech = self._ech
        return out

    def normalized(self) -> "StabilizerState":
        """Same ket with unit norm, keeping its phase."""
        if self.is_zero:
            raise ValueError("cannot normalize the zero state")
        return self.scaled(ONE / self.norm())

    def support(self) -> Iterator[tuple[int, ExactScalar]]:
        """Yield ``(q, <q|psi>)`` for every basis string in the support."""
        if self.is_zero:
            return
        xrows, _ = self._echelon()
        rows = [r for _, r in xrows]
        acc = (0, 0, 0)
        q = self.pivot
        yield q, self.amp
        for k in range(1, 1 << len(rows)):
            row = rows[(k & -k).bit_length() - 1]
            acc = _pmul(acc, row)
            q ^= row[0]
            yield q, self.amp.times_omega(2 * _basis_phase(acc, self.pivot))

    # --- equality -----------------------------------------------------
    def canonical_key(self):
        """Hashable key identifying the ket (group, phase and norm)."""
        if self._key is None:
            if self.is_zero:
                self._key = ("zero", self.n)
            else:
                self._key = (self.n, _canonical_group(self.gens, self.n), self.scalar)
        return self._key

    def __eq__(self, other) -> bool:
        if not isinstance(other, StabilizerState):
            return NotImplemented
        return self.canonical_key() == other.canonical_key()

    def __hash__(self) -> int:
        return hash(self.canonical_key())

    def __repr__(self) -> str:
        if self.is_zero:
            return f"StabilizerState(n={self.n}, zero)"
        gens = ", ".join(str(g) for g in self.generators)
        return f"StabilizerState([{gens}], scalar={self.scalar!r})"

    def to_dense(self, limit: int = DENSE_LIMIT) -> np.ndarray:
        return to_dense(self, limit)


def _canonical_group(gens, n: int) -> tuple:
    """Fully reduced row echelon form over the (x|z) bits, with signs."""
    rows = list(gens)
    out = []
    for pos in range(2 * n - 1, -1, -1):
        if pos >= n:
            bit = 1 << (pos - n)

            def has(r, bit=bit):
                return r[0] & bit
        else:
            bit = 1 << pos

            def has(r, bit=bit):
                return r[1] & bit
        idx = next((i for i, r in enumerate(rows) if has(r)), -1)
        if idx < 0:
            continue
        piv = rows.pop(idx)
        rows = [_pmul(r, piv) if has(r) else r for r in rows]
        out = [_pmul(r, piv) if has(r) else r for r in out]
        out.append(piv)
    return tuple(out)


# --- Clifford primitives --------------------------------------------------


def _conj_rows(gens, fn):
    return tuple(fn(*g) for g in gens)


def _prim(state: StabilizerState, name: str, qubits: Sequence[int]) -> StabilizerState:
    n = state.n
    bits = [1 << (n - 1 - q) for q in qubits]
    p = state.pivot
    amp = state.amp
    if name == "h":
        (b,) = bits

        def f(x, z, ph):
            xb, zb = x & b, z & b
            if xb and zb:
                ph ^= 2
            x = (x & ~b) | (b if zb else 0)
            z = (z & ~b) | (b if xb else 0)
            return (x, z, ph)

        gens = _conj_rows(state.gens, f)
        a0 = state.amplitude_at(p & ~b)
        a1 = state.amplitude_at(p | b)
        for y in (p, p ^ b):
            second = a1 if not (y & b) else -a1
            val = (a0 + second) * _INV_SQRT2
            if val:
                return StabilizerState(n, gens, y, val)
        raise AssertionError("Hadamard update lost the state")
    if name in ("s", "sdg"):
        (b,) = bits
        flip_if_z = name == "s"

        def f(x, z, ph):
            if x & b:
                if bool(z & b) == flip_if_z:
                    ph ^= 2
                z ^= b
            return (x, z, ph)

        gens = _conj_rows(state.gens, f)
        if p & b:
            amp = amp.times_omega(2 if name == "s" else -2)
        return StabilizerState(n, gens, p, amp)
    if name in ("x", "y", "z"):
        (b,) = bits
        if name == "x":
            flip = lambda x, z: z & b  # noqa: E731
        elif name == "z":
            flip = lambda x, z: x & b  # noqa: E731
        else:
            flip = lambda x, z: (x ^ z) & b  # noqa: E731
        gens = tuple((x, z, ph ^ 2) if flip(x, z) else (x, z, ph) for x, z, ph in state.gens)
        if name == "x":
            p ^= b
        elif name == "z":
            if p & b:
                amp = -amp
        else:
            amp = amp.times_omega(6 if p & b else 2)
            p ^= b
        return StabilizerState(n, gens, p, amp)
    if name == "cx":
        bc, bt = bits

        def f(x, z, ph):
            xc, zt = x & bc, z & bt
            if xc and zt and (bool(x & bt) == bool(z & bc)):
                ph ^= 2
            if xc:
                x ^= bt
            if zt:
                z ^= bc
            return (x, z, ph)

        gens = _conj_rows(state.gens, f)
        if p & bc:
            p ^= bt
        return StabilizerState(n, gens, p, amp)
    if name == "cz":
        ba, bb = bits

        def f(x, z, ph):
            xa, xb = x & ba, x & bb
            if xa and xb and (bool(z & ba) != bool(z & bb)):
                ph ^= 2
            if xb:
                z ^= ba
            if xa:
                z ^= bb
            return (x, z, ph)

        gens = _conj_rows(state.gens, f)
        if (p & ba) and (p & bb):
            amp = -amp
        return StabilizerState(n, gens, p, amp)
    if name == "swap":
        ba, bb = bits

        def sw(v):
            va, vb = v & ba, v & bb
            v &= ~(ba | bb)
            return v | (bb if va else 0) | (ba if vb else 0)

        gens = tuple((sw(x), sw(z), ph) for x, z, ph in state.gens)
        return StabilizerState(n, gens, sw(p), amp)
    raise KeyError(name)


# Composite Cliffords as (omega power, word of primitives); words apply left to right.
_COMPOSITE = {
    "sx": (-1, [("h", 0), ("s", 0), ("h", 0)]),
    "sy": (0, [("z", 0), ("h", 0)]),
    "sxdg": (1, [("h", 0), ("sdg", 0), ("h", 0)]),
    "sydg": (0, [("h", 0), ("z", 0)]),
    "iswap": (0, [("cz", 0, 1), ("swap", 0, 1), ("s", 0), ("s", 1)]),
    "iswapdg": (0, [("z", 0), ("z", 1), ("cz", 0, 1), ("swap", 0, 1), ("s", 0), ("s", 1)]),
}

PRIMITIVES = {"h": 1, "s": 1, "sdg": 1, "x": 1, "y": 1, "z": 1, "cx": 2, "cz": 2, "swap": 2}
CLIFFORD_ARITY = dict(PRIMITIVES)
CLIFFORD_ARITY.update({"sx": 1, "sy": 1, "sxdg": 1, "sydg": 1, "iswap": 2, "iswapdg": 2})
# computational basis projectors |0><0| and |1><1| (not unitary, but they keep
# stabilizer states stabilizer and are needed by circuit cutting)
CLIFFORD_ARITY.update({"p0": 1, "p1": 1})


def apply_clifford(state: StabilizerState, gate: str, qubits: Sequence[int]) -> StabilizerState:
    """Apply a named Clifford gate, tracking the global phase exactly."""
    name = gate.lower()
    if name not in CLIFFORD_ARITY:
        raise ValueError(f"unknown Clifford gate {gate!r}")
    qubits = [int(q) for q in qubits]
    if len(qubits) != CLIFFORD_ARITY[name]:
        raise ValueError(f"gate {gate} expects {CLIFFORD_ARITY[name]} qubits, got {len(qubits)}")
    if len(set(qubits)) != len(qubits):
        raise ValueError("qubit indices must be distinct")
    for q in qubits:
        if not 0 <= q < state.n:
            raise IndexError(f"qubit {q} out of range for n={state.n}")
    if state.is_zero:
        return state
    if name in PRIMITIVES:
        return _prim(state, name, qubits)
    if name in ("p0", "p1"):
        bit = 1 << (state.n - 1 - qubits[0])
        return project_pauli(state, (0, bit, 0), 1 if name == "p0" else -1)
    omega, word = _COMPOSITE[name]
    for step in word:
        state = _prim(state, step[0], [qubits[i] for i in step[1:]])
    return state.scaled(ExactScalar(omega, 0)) if omega else state


def apply_word(state: StabilizerState, word) -> StabilizerState:
    """Apply ``[(name, qubits), ...]`` left to right."""
    for name, qubits in word:
        state = apply_clifford(state, name, qubits)
    return state


def basis_state(bits: str) -> StabilizerState:
    n = len(bits)
    if n == 0 or any(c not in "01" for c in bits):
        raise ValueError(f"bad basis string {bits!r}")
    val = int(bits, 2)
    gens = []
    for j in range(n):
        b = 1 << (n - 1 - j)
        gens.append((0, b, 2 if val & b else 0))
    return StabilizerState(n, gens, val, ONE)


def zero_state(n: int) -> StabilizerState:
    return basis_state("0" * n)


# --- projections and inner products --------------------------------------


def _as_tuple(P) -> Pauli:
    if isinstance(P, str):
        P = PauliOperator.from_string(P)
    if isinstance(P, PauliOperator):
        return (P.x_bits, P.z_bits, P.phase)
    return P


def project_pauli(state: StabilizerState, P, sign: int = 1) -> StabilizerState:
    """Return ``(I + sign*P)/2 |state>`` exactly."""
    if isinstance(P, PauliOperator) and P.n != state.n:
        raise ValueError("dimension mismatch")
    P = _as_tuple(P)
    if P[2] & 1:
        raise ValueError("projection needs a Hermitian Pauli")
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    if state.is_zero:
        return state
    n = state.n
    gens = state.gens
    px = P[0]
    anti = [k for k, g in enumerate(gens) if _anticommute(g, P)]
    if not anti:
        # P is (up to sign) in the group: compare <pivot|P|psi> with <pivot|psi>.
        other = state.amplitude_at(state.pivot ^ px)
        ratio = other.times_omega(-2 * _basis_phase(P, state.pivot)) / state.amp
        eig = 1 if ratio.m == 0 else -1
        return state if eig == sign else StabilizerState.zero_state(n)
    k = anti[0]
    gk = gens[k]
    new = list(gens)
    for j in anti[1:]:
        new[j] = _pmul(new[j], gk)
    new[k] = (P[0], P[1], P[2] if sign == 1 else P[2] ^ 2)

    def value_at(y: int) -> ExactScalar:
        a = state.amplitude_at(y)
        b = state.amplitude_at(y ^ px).times_omega(-2 * _basis_phase(P, y))
        if sign < 0:
            b = -b
        return (a + b) * _HALF

    for y in (state.pivot, state.pivot ^ px):
        v = value_at(y)
        if v:
            return StabilizerState(n, new, y, v)
    out = StabilizerState(n, new, 0, ONE)
    y = _solve_z(out._echelon()[1], n)
    v = value_at(y)
    if not v:
        raise AssertionError("projection support point has zero amplitude")
    res = StabilizerState(n, new, y, v)
    res._ech = out._ech
    return res


def inner_product(bra: StabilizerState, ket: StabilizerState) -> ExactScalar:
    """Exact ``<bra|ket>`` including both prefactors; O(n^3)."""
    if bra.n != ket.n:
        raise ValueError("dimension mismatch")
    if bra.is_zero or ket.is_zero:
        return ZERO
    chi = ket
    for g in bra.gens:
        chi = project_pauli(chi, g, 1)
        if chi.is_zero:
            return ZERO
    y = chi.pivot
    return bra.amplitude_at(y).conj() * chi.amp * ExactScalar(0, -2 * bra.x_rank)


def embed_pauli(P: Pauli, k: int, n: int, qubits: Sequence[int]) -> Pauli:
    x = z = 0
    for j, q in enumerate(qubits):
        src = 1 << (k - 1 - j)
        dst = 1 << (n - 1 - q)
        if P[0] & src:
            x |= dst
        if P[1] & src:
            z |= dst
    return (x, z, P[2])


def project_subsystem(state: StabilizerState, target: StabilizerState, qubits: Sequence[int]) -> StabilizerState:
    """Apply ``|target><target| (x) I`` with ``target`` acting on ``qubits``."""
    qubits = list(qubits)
    if len(qubits) != target.n or len(set(qubits)) != len(qubits):
        raise ValueError("need one distinct qubit per target qubit")
    for q in qubits:
        if not 0 <= q < state.n:
            raise IndexError(f"qubit {q} out of range")
    if target.is_zero:
        return StabilizerState.zero_state(state.n)
    out = state
    for g in target.gens:
        out = project_pauli(out, embed_pauli(g, target.n, state.n, qubits), 1)
        if out.is_zero:
            return out
    norm2 = target.norm() * target.norm()
    return out if norm2 == ONE else out.scaled(norm2)


def tensor(a: StabilizerState, b: StabilizerState) -> StabilizerState:
    """``|a> (x) |b>`` with ``a`` on the leading qubits."""
    n = a.n + b.n
    if a.is_zero or b.is_zero:
        return StabilizerState.zero_state(n)
    gens = [(x << b.n, z << b.n, ph) for x, z, ph in a.gens] + list(b.gens)
    return StabilizerState(n, gens, (a.pivot << b.n) | b.pivot, a.amp * b.amp)


def permute_qubits(state: StabilizerState, perm: Sequence[int]) -> StabilizerState:
    """Move old qubit ``j`` to position ``perm[j]``."""
    n = state.n

    def move(v: int) -> int:
        out = 0
        for j in range(n):
            if v >> (n - 1 - j) & 1:
                out |= 1 << (n - 1 - perm[j])
        return out

    if state.is_zero:
        return state
    gens = [(move(x), move(z), ph) for x, z, ph in state.gens]
    return StabilizerState(n, gens, move(state.pivot), state.amp)


def to_dense(state: StabilizerState, limit: int = DENSE_LIMIT) -> np.ndarray:
    if state.n > limit:
        raise ValueError(f"n={state.n} exceeds the dense limit {limit}")
    vec = np.zeros(1 << state.n, dtype=complex)
    for q, a in state.support():
        vec[q] = complex(a)
    return vec


def random_clifford_word(n: int, rng: SplitMix64, length: int | None = None):
    if length is None:
        length = 4 * n * n + 4
    word = []
    names = ["h", "s", "cx"] if n > 1 else ["h", "s"]
    for _ in range(length):
        g = rng.choice(names)
        if g == "cx":
            c = rng.below(n)
            t = rng.below(n - 1)
            if t >= c:
                t += 1
            word.append((g, (c, t)))
        else:
            word.append((g, (rng.below(n),)))
    return word


def random_stabilizer_state(n: int, seed: int) -> StabilizerState:
    """Deterministic pseudo-random state from a Clifford word of O(n^2) gates."""
    if n < 1:
        raise ValueError("n must be positive")
    rng = SplitMix64(seed)
    state = zero_state(n)
    # a random basis string first so that every sign pattern is reachable
    for q in range(n):
        if rng.below(2):
            state = apply_clifford(state, "x", [q])
    return apply_word(state, random_clifford_word(n, rng))


# --- labelled one- and two-qubit states -----------------------------------

# Local Cliffords mapping |0>,|1> to |a>,|abar> with the usual phases.
_LOCAL = {"z": [], "x": ["h"], "y": ["h", "s"]}

_PAIR_RE = re.compile(r"^(Phi|Psi)([+-]i?)_([xyz])([xyz])$")
_PRODUCT_RE = re.compile(r"^([xyz]b?)+$")


def labeled_state(label: str) -> StabilizerState:
    """Parse a ket label.

    Product labels are a letter per qubit, optionally followed by ``b`` for
    the orthogonal state: ``"z"`` is |0>, ``"zb"`` is |1>, ``"x"``/``"xb"`` are
    |+>/|->, ``"y"``/``"yb"`` are |+i>/|-i>, and ``"xbz"`` is |-0>.

    Entangled labels ``Phi{s}_{ab}`` and ``Psi{s}_{ab}`` with ``s`` one of
    ``+ - +i -i`` denote ``(|ab> s |abar bbar>)/sqrt2`` and
    ``(|a bbar> s |abar b>)/sqrt2``.
    """
    label = label.strip()
    m = _PAIR_RE.match(label)
    if m:
        kind, rel, a, b = m.groups()
        st = basis_state("00")
        st = apply_clifford(st, "h", [0])
        st = apply_clifford(st, "cx", [0, 1])
        extra = {"+": [], "-": ["z"], "+i": ["s"], "-i": ["sdg"]}[rel]
        # the relative phase sits on the |11> (or |10>) branch, which is where qubit 0 is 1
        for g in extra:
            st = apply_clifford(st, g, [0])
        if kind == "Psi":
            st = apply_clifford(st, "x", [1])
        for q, letter in ((0, a), (1, b)):
            for g in _LOCAL[letter]:
                st = apply_clifford(st, g, [q])
        return st
    if not _PRODUCT_RE.match(label):
        raise ValueError(f"bad state label {label!r}")
    tokens = re.findall(r"[xyz]b?", label)
    st = basis_state("".join("1" if t.endswith("b") else "0" for t in tokens))
    for q, t in enumerate(tokens):
        for g in _LOCAL[t[0]]:
            st = apply_clifford(st, g, [q])
    return st


def all_stabilizer_states(n: int) -> list[StabilizerState]:
    """Every n-qubit stabilizer state (n <= 2), each with unit scalar.

    Ordered by breadth-first search from |0...0> over H, S and CX; the
    order is fixed and used by the decomposition search.
    """
    if n not in (1, 2):
        raise ValueError("enumeration supported for n in {1, 2}")
    moves = [("h", (q,)) for q in range(n)] + [("s", (q,)) for q in range(n)]
    if n == 2:
        moves += [("cx", (0, 1)), ("cx", (1, 0))]
    start = zero_state(n)
    seen = {start.canonical_key()[:2]: start}
    order = [start]
    frontier = [start]
    while frontier:
        nxt = []
        for st in frontier:
            for name, qs in moves:
                new = apply_clifford(st, name, qs)
                key = new.canonical_key()[:2]
                if key not in seen:
                    unit = new.scaled(new.scalar.conj())
                    seen[key] = unit
                    order.append(unit)
                    nxt.append(unit)
        frontier = nxt
    return order
