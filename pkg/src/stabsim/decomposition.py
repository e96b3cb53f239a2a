"""Stabilizer projector decompositions ``U = sum_i c_i |phi_i><phi_i|``.

This module holds the decomposition types, the bundled database of gate
decompositions, the combinators used to build full-width layers, a dense
verifier, a least-squares refit of coefficients, a support search, and the
Sum-over-Clifford expansions ``U = sum_j a_j K_j`` of the non-Clifford gates.
"""

from __future__ import annotations

import cmath
import itertools
import math
import os
import warnings
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path

import numpy as np

from . import gates as G
from .exact import ExactScalar
from .prng import SplitMix64
from .stabilizer import (
    StabilizerState,
    all_stabilizer_states,
    basis_state,
    labeled_state,
    permute_qubits,
    tensor as tensor_states,
)

SOURCES = ("builtin", "diagonal", "padded", "tensor", "refit", "searched", "spanning")
DB_ENV = "STABSIM_DB"
DEFAULT_DB = Path(__file__).with_name("data") / "decompositions.db"
FORMAT_HEADER = "format stabsim-decomp 1"

MAX_VERIFY_ARITY = 6


class DecompositionError(ValueError):
    """Unknown gate, malformed input or unsupported composite."""


class DatabaseError(RuntimeError):
    """The decomposition database is malformed or failed verification."""


@dataclass(frozen=True)
class ProjectorTerm:
    coefficient: complex
    state: StabilizerState


@dataclass
class ProjectorDecomposition:
    """Weighted sum of stabilizer projectors on ``arity`` qubits.

    Decompositions built by :func:`pad_layer` or :func:`tensor` also keep
    their factor structure in ``factors`` (a list of ``(decomposition,
    qubits)``) so engines can walk terms as a tree instead of materialising
    all of them.  ``terms`` is produced lazily in that case, in the canonical
    order where the first factor varies slowest.
    """

    arity: int
    terms_: list[ProjectorTerm] | None = None
    source: str = "builtin"
    name: str = ""
    tolerance: float = 1e-9
    unitary: bool = True
    note: str = ""
    target: tuple = ()
    factors: list | None = None
    residual: float | None = None
    flagged: bool = False
    rank_: int | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.source not in SOURCES:
            raise ValueError(f"unknown provenance {self.source!r}")
        if self.terms_ is None and self.factors is None:
            raise ValueError("need terms or factors")

    @property
    def terms(self) -> list[ProjectorTerm]:
        if self.terms_ is None:
            self.terms_ = _expand_factors(self.factors, self.arity)
        return self.terms_

    @property
    def rank(self) -> int:
        if self.terms_ is not None:
            return len(self.terms_)
        if self.rank_ is None:
            self.rank_ = math.prod(d.rank for d, _ in self.factors)
        return self.rank_

    @property
    def coefficients(self) -> np.ndarray:
        return np.array([t.coefficient for t in self.terms], dtype=complex)

    def with_coefficients(self, coeffs, source: str | None = None) -> "ProjectorDecomposition":
        terms = [ProjectorTerm(complex(c), t.state) for c, t in zip(coeffs, self.terms)]
        return ProjectorDecomposition(
            self.arity, terms, source or self.source, self.name, self.tolerance, self.unitary,
            self.note, self.target,
        )

    def to_dense(self) -> np.ndarray:
        if self.arity > MAX_VERIFY_ARITY:
            raise DecompositionError(f"arity {self.arity} too large for dense reconstruction")
        dim = 1 << self.arity
        out = np.zeros((dim, dim), dtype=complex)
        for t in self.terms:
            v = t.state.to_dense()
            out += t.coefficient * np.outer(v, v.conj())
        return out

    def __len__(self) -> int:
        return self.rank


@dataclass(frozen=True)
class CliffordSumTerm:
    coefficient: complex
    word: tuple  # ((gate name, (relative qubits...)), ...) applied left to right


@dataclass
class VerificationReport:
    max_error: float
    rank: int
    tolerance: float
    passed: bool


# --- combinators ----------------------------------------------------------


def diagonal_decomposition(diag_entries) -> ProjectorDecomposition:
    """Computational-basis expansion of a diagonal matrix."""
    entries = np.asarray(diag_entries, dtype=complex).ravel()
    size = len(entries)
    if size < 2 or size & (size - 1):
        raise DecompositionError("diagonal length must be a power of two >= 2")
    k = size.bit_length() - 1
    if not np.allclose(np.abs(entries), 1.0, atol=1e-12):
        warnings.warn("diagonal entries are not unit modulus", stacklevel=2)
    terms = [ProjectorTerm(complex(c), basis_state(format(i, f"0{k}b"))) for i, c in enumerate(entries)]
    return ProjectorDecomposition(k, terms, "diagonal", tolerance=1e-12)


def identity_decomposition(k: int = 1) -> ProjectorDecomposition:
    return diagonal_decomposition(np.ones(1 << k))


def _expand_factors(factors, n: int) -> list[ProjectorTerm]:
    order = [q for _, qs in factors for q in qs]
    perm = order  # old position j (in concatenation order) -> qubit order[j]
    identity_perm = order == list(range(n))
    out = []
    for combo in itertools.product(*[d.terms for d, _ in factors]):
        coef = 1.0 + 0j
        st = None
        for t in combo:
            coef *= t.coefficient
            st = t.state if st is None else tensor_states(st, t.state)
        if not identity_perm:
            st = permute_qubits(st, perm)
        out.append(ProjectorTerm(coef, st))
    return out


def tensor(a: ProjectorDecomposition, b: ProjectorDecomposition) -> ProjectorDecomposition:
    """Kronecker product with ``a`` on the leading qubits."""
    n = a.arity + b.arity
    factors = [(a, list(range(a.arity))), (b, list(range(a.arity, n)))]
    return ProjectorDecomposition(
        n, None, "tensor", f"{a.name}*{b.name}", max(a.tolerance, b.tolerance),
        a.unitary and b.unitary, factors=factors,
    )


def pad_layer(placements, n: int) -> ProjectorDecomposition:
    """Full-width decomposition of gates placed on disjoint qubit sets.

    Every untouched qubit contributes ``|0><0| + |1><1|``; the factors are
    ordered as the placements followed by the untouched qubits ascending.
    """
    used: set[int] = set()
    factors = []
    for decomp, qubits in placements:
        qubits = [int(q) for q in qubits]
        if len(qubits) != decomp.arity:
            raise DecompositionError("placement arity mismatch")
        for q in qubits:
            if not 0 <= q < n:
                raise DecompositionError(f"qubit {q} out of range for n={n}")
            if q in used:
                raise DecompositionError(f"overlapping placements on qubit {q}")
            used.add(q)
        factors.append((decomp, qubits))
    ident = identity_decomposition(1)
    for q in range(n):
        if q not in used:
            factors.append((ident, [q]))
    tol = max([d.tolerance for d, _ in factors] + [1e-12])
    return ProjectorDecomposition(n, None, "padded", "layer", tol, True, factors=factors)


# --- verification and refit -----------------------------------------------


def verify_decomposition(decomp: ProjectorDecomposition, target, tol: float | None = None) -> VerificationReport:
    if decomp.arity > MAX_VERIFY_ARITY:
        raise DecompositionError(f"arity {decomp.arity} exceeds {MAX_VERIFY_ARITY}")
    tol = decomp.tolerance if tol is None else tol
    err = float(np.abs(decomp.to_dense() - np.asarray(target)).max())
    return VerificationReport(err, decomp.rank, tol, err <= tol)


def _projector_columns(states) -> np.ndarray:
    cols = []
    for st in states:
        v = st.to_dense()
        cols.append(np.outer(v, v.conj()).ravel())
    return np.array(cols).T


def refit_coefficients(decomp: ProjectorDecomposition, target, tol: float = 1e-9) -> ProjectorDecomposition:
    """Least-squares coefficients on the fixed projector support.

    Returns a new decomposition tagged ``refit`` with ``residual`` set.  If
    the support cannot reproduce the target (residual above ``tol``) the
    original decomposition is returned, flagged, with the residual attached.
    """
    if decomp.arity > 4:
        raise DecompositionError("refit supports arity <= 4")
    a = _projector_columns([t.state for t in decomp.terms])
    b = np.asarray(target, dtype=complex).ravel()
    coeffs, *_ = np.linalg.lstsq(a, b, rcond=None)
    residual = float(np.abs(a @ coeffs - b).max())
    if residual > tol:
        out = decomp.with_coefficients(decomp.coefficients)
        out.residual = residual
        out.flagged = True
        return out
    out = decomp.with_coefficients(coeffs, source="refit")
    out.residual = residual
    out.tolerance = max(tol, 10 * residual)
    return out


# --- search ----------------------------------------------------------------


@lru_cache(maxsize=None)
def _search_pool(k: int):
    states = all_stabilizer_states(k)
    return states, _projector_columns(states)


def _residual(cols: np.ndarray, b: np.ndarray):
    coeffs, *_ = np.linalg.lstsq(cols, b, rcond=None)
    return float(np.abs(cols @ coeffs - b).max()), coeffs


def search_decomposition(
    target, max_rank: int, budget: int = 20000, seed: int = 0, tol: float = 1e-9, min_rank: int | None = None
):
    """Find a stabilizer projector decomposition of a 1- or 2-qubit matrix.

    Ranks are tried from ``min_rank`` (default ``2**k``) upward.  When every support of a rank fits
    in ``budget`` least-squares solves the scan is exhaustive and
    lexicographic, otherwise a seeded local search over single-element swaps
    is run until the budget is spent.  Among passing supports the
    lexicographically smallest (by index into :func:`all_stabilizer_states`)
    is returned.  Returns ``None`` when nothing is found.
    """
    target = np.asarray(target, dtype=complex)
    dim = target.shape[0]
    if target.shape != (dim, dim) or dim not in (2, 4):
        raise DecompositionError("search needs a 2x2 or 4x4 matrix")
    if max_rank > 16:
        raise DecompositionError("max_rank must be <= 16")
    k = dim.bit_length() - 1
    states, pool = _search_pool(k)
    b = target.ravel()
    size = len(states)
    spent = 0
    rng = SplitMix64(seed)
    for r in range(max(dim, min_rank or 0), min(max_rank, size) + 1):
        found = []
        if math.comb(size, r) <= budget - spent:
            for support in itertools.combinations(range(size), r):
                spent += 1
                res, coeffs = _residual(pool[:, support], b)
                if res <= tol:
                    found.append((support, coeffs))
                    break
        else:
            remaining = budget - spent
            seen = set()
            while remaining > 0:
                support = sorted(_sample(rng, size, r))
                cur, coeffs = _residual(pool[:, support], b)
                remaining -= 1
                while cur > tol and remaining > 0:
                    best = (cur, None)
                    for i in range(r):
                        for cand in range(size):
                            if cand in support:
                                continue
                            trial = sorted(support[:i] + [cand] + support[i + 1:])
                            key = tuple(trial)
                            if key in seen:
                                continue
                            seen.add(key)
                            res, _ = _residual(pool[:, trial], b)
                            remaining -= 1
                            if res < best[0] - 1e-12:
                                best = (res, trial)
                            if remaining <= 0:
                                break
                        if remaining <= 0:
                            break
                    if best[1] is None:
                        break
                    support = best[1]
                    cur, coeffs = _residual(pool[:, support], b)
                if cur <= tol:
                    found.append((tuple(support), coeffs))
                    break
            spent = budget - max(remaining, 0)
        if found:
            support, coeffs = min(found, key=lambda f: f[0])
            terms = [ProjectorTerm(complex(c), states[i]) for c, i in zip(coeffs, support)]
            out = ProjectorDecomposition(k, terms, "searched", tolerance=tol)
            out.residual = _residual(pool[:, list(support)], b)[0]
            return out
        if spent >= budget:
            break
    return None


def spanning_decomposition(target) -> ProjectorDecomposition:
    """Exact fit on product projectors of ``|0>, |1>, |+>, |+i>`` per qubit.

    Those four single-qubit projectors span all 2x2 matrices, so their
    products span every ``k``-qubit operator and the fit always succeeds,
    at rank at most ``4**k``.  Terms with negligible weight are dropped.
    """
    target = np.asarray(target, dtype=complex)
    k = target.shape[0].bit_length() - 1
    if target.shape != (1 << k, 1 << k) or k < 1 or k > 3:
        raise DecompositionError("spanning fit needs a 2x2, 4x4 or 8x8 matrix")
    labels = ["".join(p) for p in itertools.product(("z", "zb", "x", "y"), repeat=k)]
    states = [labeled_state(lab) for lab in labels]
    cols = _projector_columns(states)
    coeffs = np.linalg.solve(cols, target.ravel())
    keep = [i for i, c in enumerate(coeffs) if abs(c) > 1e-14]
    terms = [ProjectorTerm(complex(coeffs[i]), states[i]) for i in keep]
    out = ProjectorDecomposition(k, terms, "spanning", tolerance=1e-10)
    out.residual = float(np.abs(_projector_columns([t.state for t in terms]) @ coeffs[keep] - target.ravel()).max())
    return out


def _sample(rng: SplitMix64, size: int, r: int) -> list[int]:
    items = list(range(size))
    rng.shuffle(items)
    return items[:r]


# --- Sum-over-Clifford ------------------------------------------------------


def sum_over_clifford(gate_name: str) -> list[CliffordSumTerm]:
    """Expansion of a non-Clifford gate as a weighted sum of Clifford words."""
    name = gate_name.lower()
    a = cmath.exp(1j * math.pi / 8) / (2 * math.cos(math.pi / 8))
    if name == "t":
        return [CliffordSumTerm(a, ()), CliffordSumTerm(a * cmath.exp(-1j * math.pi / 4), (("s", (0,)),))]
    if name == "tdg":
        ac = a.conjugate()
        return [CliffordSumTerm(ac, ()), CliffordSumTerm(ac * cmath.exp(1j * math.pi / 4), (("sdg", (0,)),))]
    if name == "cs":
        return [CliffordSumTerm((1 + 1j) / 2, ()), CliffordSumTerm((1 - 1j) / 2, (("cz", (0, 1)),))]
    if name == "diag_pi6":
        th = math.pi / 6
        ph = cmath.exp(1j * th / 2)
        return [
            CliffordSumTerm(ph * math.cos(th / 2), ()),
            CliffordSumTerm(-1j * ph * math.sin(th / 2), (("cz", (0, 1)),)),
        ]
    if name == "fsim":
        # fsim = iSWAP^dagger . diag(1, 1, 1, e^{i pi/6}); the diagonal goes first
        return [
            CliffordSumTerm(t.coefficient, t.word + (("iswapdg", (0, 1)),))
            for t in sum_over_clifford("diag_pi6")
        ]
    if name == "w":
        # sqrt(W) = T sqrt(X) T^dagger, expanding both T factors in two terms
        out = []
        for tdg_term in sum_over_clifford("tdg"):
            for t_term in sum_over_clifford("t"):
                word = tdg_term.word + (("sx", (0,)),) + t_term.word
                out.append(CliffordSumTerm(tdg_term.coefficient * t_term.coefficient, word))
        return out
    raise DecompositionError(f"no Sum-over-Clifford expansion for {gate_name!r}")


def clifford_word_matrix(word, k: int) -> np.ndarray:
    u = np.eye(1 << k, dtype=complex)
    for name, qubits in word:
        u = G.embed_matrix(G.gate_matrix(name), qubits, k) @ u
    return u


def soc_matrix(terms, k: int) -> np.ndarray:
    return sum(t.coefficient * clifford_word_matrix(t.word, k) for t in terms)


# --- targets ----------------------------------------------------------------


def target_matrix(word, k: int) -> np.ndarray:
    """Dense matrix of a gate word ``[(name, qubits), ...]`` applied in order."""
    return clifford_word_matrix(word, k)


def parse_target(text: str):
    word = []
    for tok in text.split():
        name, _, qs = tok.partition(":")
        qubits = tuple(int(q) for q in qs.split(",")) if qs else (0,)
        word.append((name, qubits))
    return tuple(word)


def format_target(word) -> str:
    return " ".join(f"{name}:{','.join(str(q) for q in qs)}" for name, qs in word)


# --- database ------------------------------------------------------------------


def _pauli_str(g, n: int) -> str:
    x, z, ph = g
    sym = ""
    for j in range(n):
        bit = 1 << (n - 1 - j)
        sym += "IXZY"[(1 if x & bit else 0) + (2 if z & bit else 0)]
    return ("+" if ph == 0 else "-") + sym


@lru_cache(maxsize=None)
def _label_table():
    table = {}
    letters = ["z", "zb", "x", "xb", "y", "yb"]
    labels = list(letters)
    labels += [a + b for a in letters for b in letters]
    for a in "zxy":
        for b in "zxy":
            for kind in ("Phi", "Psi"):
                for rel in ("+", "-", "+i", "-i"):
                    labels.append(f"{kind}{rel}_{a}{b}")
    for lab in labels:
        st = labeled_state(lab)
        table.setdefault(st.canonical_key()[:2], lab)
    return table


def state_label(state: StabilizerState) -> str:
    """Ket label of a 1- or 2-qubit state (projector level, phase ignored)."""
    if state.n > 2:
        return ""
    return _label_table().get(state.canonical_key()[:2], "")


def _format_float(v: float) -> str:
    return repr(float(v))


def format_term(term: ProjectorTerm) -> str:
    st = term.state.normalized()
    c = term.coefficient
    gens = " ".join(_pauli_str(g, st.n) for g in st.gens)
    pivot = format(st.pivot, f"0{st.n}b")
    m = (st.amp * ExactScalar(0, -st.x_rank)).m
    lab = state_label(st)
    comment = f"  # {lab}" if lab else ""
    return f"  term {_format_float(c.real)} {_format_float(c.imag)} | {gens} | {pivot} {m}{comment}"


def format_entry(name: str, d: ProjectorDecomposition) -> str:
    lines = [f"gate {name}", f"  arity {d.arity}", f"  source {d.source}", f"  tolerance {d.tolerance:.1e}"]
    if d.target:
        lines.append(f"  target {format_target(d.target)}")
    for note in d.note.splitlines():
        lines.append(f"  note {note}")
    lines += [format_term(t) for t in d.terms]
    lines.append("end")
    return "\n".join(lines)


def format_database(entries: dict) -> str:
    out = ["# Stabilizer projector decompositions of gates.", FORMAT_HEADER, ""]
    for name, d in entries.items():
        out.append(format_entry(name, d))
        out.append("")
    return "\n".join(out)


def _parse_term(body: str, arity: int, lineno: int) -> ProjectorTerm:
    body = body.split("#", 1)[0]
    try:
        coef_txt, gens_txt, piv_txt = (p.strip() for p in body.split("|"))
        re_s, im_s = coef_txt.split()
        pivot_bits, m = piv_txt.split()
        gens = gens_txt.split()
        if len(pivot_bits) != arity:
            raise ValueError("pivot length")
        amp = ExactScalar(int(m), 0)
        st = StabilizerState.from_generators(gens, pivot=int(pivot_bits, 2), pivot_amplitude=amp)
        st = st.scaled(ExactScalar(0, st.x_rank))
    except (ValueError, IndexError) as exc:
        raise DatabaseError(f"line {lineno}: bad term ({exc})") from None
    if st.n != arity:
        raise DatabaseError(f"line {lineno}: generator width does not match arity")
    return ProjectorTerm(complex(float(re_s), float(im_s)), st)


def parse_database(text: str, verify: bool = True) -> dict[str, ProjectorDecomposition]:
    entries: dict[str, ProjectorDecomposition] = {}
    cur = None
    saw_header = False
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line == FORMAT_HEADER:
            saw_header = True
            continue
        key, _, rest = line.partition(" ")
        if key == "gate":
            if cur is not None:
                raise DatabaseError(f"line {lineno}: nested gate block")
            cur = {"name": rest.strip(), "terms": [], "note": [], "line": lineno}
        elif cur is None:
            raise DatabaseError(f"line {lineno}: {key!r} outside a gate block")
        elif key == "arity":
            cur["arity"] = int(rest)
        elif key == "source":
            cur["source"] = rest.strip()
        elif key == "tolerance":
            cur["tolerance"] = float(rest)
        elif key == "target":
            cur["target"] = parse_target(rest)
        elif key == "note":
            cur["note"].append(rest)
        elif key == "term":
            if "arity" not in cur:
                raise DatabaseError(f"line {lineno}: term before arity")
            cur["terms"].append(_parse_term(rest, cur["arity"], lineno))
        elif key == "end":
            d = ProjectorDecomposition(
                cur["arity"], cur["terms"], cur.get("source", "builtin"), cur["name"],
                cur.get("tolerance", 1e-9), True, "\n".join(cur["note"]), cur.get("target", ()),
            )
            if verify:
                if not d.target:
                    raise DatabaseError(f"entry {d.name} has no target")
                rep = verify_decomposition(d, target_matrix(d.target, d.arity))
                if not rep.passed:
                    raise DatabaseError(
                        f"entry {d.name} (line {cur['line']}) fails verification: "
                        f"error {rep.max_error:.3e} > {rep.tolerance:.1e}"
                    )
            entries[d.name] = d
            cur = None
        else:
            raise DatabaseError(f"line {lineno}: unknown key {key!r}")
    if cur is not None:
        raise DatabaseError("unterminated gate block")
    if not saw_header:
        raise DatabaseError("missing format header")
    return entries


def database_path() -> Path:
    env = os.environ.get(DB_ENV)
    return Path(env) if env else DEFAULT_DB


@lru_cache(maxsize=8)
def _load_cached(path: str) -> dict:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise DatabaseError(f"cannot read decomposition database {path}: {exc}") from None
    return parse_database(text)


def load_database(path=None) -> dict[str, ProjectorDecomposition]:
    return _load_cached(str(path or database_path()))


def builtin_decomposition(gate_name: str, path=None) -> ProjectorDecomposition:
    db = load_database(path)
    try:
        return db[gate_name.lower()]
    except KeyError:
        raise DecompositionError(f"no database entry for {gate_name!r}") from None


# --- lookup used by layering ----------------------------------------------------


def _swap_qubits(d: ProjectorDecomposition) -> ProjectorDecomposition:
    terms = [ProjectorTerm(t.coefficient, permute_qubits(t.state, [1, 0])) for t in d.terms]
    return ProjectorDecomposition(2, terms, d.source, d.name + "^swap", d.tolerance, d.unitary, d.note)


@lru_cache(maxsize=None)
def _db_matrices(path: str):
    out = []
    for name, d in load_database(path).items():
        out.append((name, d, target_matrix(d.target, d.arity)))
    return out


def decompose_matrix(u: np.ndarray, path=None, search_budget: int = 20000) -> ProjectorDecomposition:
    """Decomposition for a 1- or 2-qubit unitary (or any diagonal matrix).

    Order of preference: database entry (also with the two qubits swapped),
    diagonal expansion, then :func:`search_decomposition`.
    """
    u = np.asarray(u, dtype=complex)
    k = u.shape[0].bit_length() - 1
    if k <= 2:
        swap = G.gate_matrix("swap")
        for name, d, m in _db_matrices(str(path or database_path())):
            if d.arity != k:
                continue
            if np.allclose(m, u, atol=1e-12, rtol=0):
                return d
            if k == 2 and np.allclose(swap @ m @ swap, u, atol=1e-12, rtol=0):
                return _swap_qubits(d)
    if G.is_diagonal_matrix(u):
        return diagonal_decomposition(np.diag(u))
    if k > 2:
        raise DecompositionError(f"no decomposition available for a non-diagonal {k}-qubit composite")
    found = search_decomposition(u, 16, budget=search_budget)
    return found if found is not None else spanning_decomposition(u)
