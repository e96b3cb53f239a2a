"""Gate definitions shared by the circuit model, decompositions and engines."""

from __future__ import annotations

import cmath
import functools
import math

import numpy as np

from .pauli import PauliOperator

S2 = math.sqrt(2.0)
OMEGA = cmath.exp(1j * math.pi / 4)

CLIFFORD_GATES = ("h", "s", "sdg", "x", "y", "z", "sx", "sy", "cx", "cz", "swap", "iswap")
NON_CLIFFORD_GATES = ("t", "tdg", "cs", "w", "fsim")
SUPPORTED_GATES = CLIFFORD_GATES + NON_CLIFFORD_GATES

# Internal Clifford-like operations that never appear in circuit files:
# daggers used when a Clifford layer is run backwards and the computational
# basis projectors used by circuit cutting.
INTERNAL_GATES = ("sxdg", "sydg", "iswapdg", "p0", "p1")

ARITY = {
    "h": 1, "s": 1, "sdg": 1, "x": 1, "y": 1, "z": 1, "sx": 1, "sy": 1,
    "cx": 2, "cz": 2, "swap": 2, "iswap": 2,
    "t": 1, "tdg": 1, "cs": 2, "w": 1, "fsim": 2,
    "sxdg": 1, "sydg": 1, "iswapdg": 2, "p0": 1, "p1": 1,
}

PARAMS = {"fsim": (math.pi / 2, math.pi / 6)}

INVERSE = {
    "h": "h", "s": "sdg", "sdg": "s", "x": "x", "y": "y", "z": "z",
    "sx": "sxdg", "sxdg": "sx", "sy": "sydg", "sydg": "sy",
    "cx": "cx", "cz": "cz", "swap": "swap", "iswap": "iswapdg", "iswapdg": "iswap",
    # projectors are Hermitian, so they are their own adjoint
    "p0": "p0", "p1": "p1",
}


def fsim_matrix(theta: float, phi: float) -> np.ndarray:
    c, s = math.cos(theta), math.sin(theta)
    return np.array(
        [
            [1, 0, 0, 0],
            [0, c, -1j * s, 0],
            [0, -1j * s, c, 0],
            [0, 0, 0, cmath.exp(1j * phi)],
        ],
        dtype=complex,
    )


def _build() -> dict[str, np.ndarray]:
    h = np.array([[1, 1], [1, -1]], dtype=complex) / S2
    sx = np.array([[1, -1j], [-1j, 1]], dtype=complex) / S2
    sy = np.array([[1, -1], [1, 1]], dtype=complex) / S2
    t = np.diag([1, OMEGA])
    iswap = np.array([[1, 0, 0, 0], [0, 0, 1j, 0], [0, 1j, 0, 0], [0, 0, 0, 1]], dtype=complex)
    mats = {
        "h": h,
        "s": np.diag([1, 1j]).astype(complex),
        "sdg": np.diag([1, -1j]).astype(complex),
        "x": np.array([[0, 1], [1, 0]], dtype=complex),
        "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
        "z": np.diag([1, -1]).astype(complex),
        "sx": sx,
        "sy": sy,
        "sxdg": sx.conj().T,
        "sydg": sy.conj().T,
        "cx": np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex),
        "cz": np.diag([1, 1, 1, -1]).astype(complex),
        "swap": np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex),
        "iswap": iswap,
        "iswapdg": iswap.conj().T,
        "t": t,
        "tdg": t.conj().T,
        "cs": np.diag([1, 1, 1, 1j]).astype(complex),
        # sqrt(W) with W = (X + Y)/sqrt2; equal to T sqrt(X) T^dagger
        "w": np.array([[1, -cmath.sqrt(1j)], [cmath.sqrt(-1j), 1]], dtype=complex) / S2,
        "fsim": fsim_matrix(*PARAMS["fsim"]),
        "p0": np.diag([1, 0]).astype(complex),
        "p1": np.diag([0, 1]).astype(complex),
    }
    for m in mats.values():
        m.setflags(write=False)
    return mats


_MATRICES = _build()


def gate_matrix(name: str) -> np.ndarray:
    """Dense matrix of a named gate; qubit 0 of the gate is the leading factor."""
    try:
        return _MATRICES[name.lower()]
    except KeyError:
        raise ValueError(f"unknown gate {name!r}") from None


def is_diagonal_matrix(u: np.ndarray, tol: float = 1e-12) -> bool:
    return bool(np.all(np.abs(u - np.diag(np.diag(u))) <= tol))


def is_clifford_matrix(u: np.ndarray, tol: float = 1e-9) -> bool:
    """Unitary that maps every single-qubit Pauli to a Pauli (up to sign)."""
    k = int(round(math.log2(u.shape[0])))
    if not np.allclose(u @ u.conj().T, np.eye(1 << k), atol=tol):
        return False
    paulis = [PauliOperator(k, x, z, 0).to_dense() for x in range(1 << k) for z in range(1 << k)]
    for j in range(k):
        for sym in "XZ":
            p = PauliOperator.single(k, j, sym).to_dense()
            img = u @ p @ u.conj().T
            # img is unitary, so its Pauli coefficients have unit 2-norm and
            # img is a Pauli exactly when one of them has modulus one
            best = max(abs(np.trace(q.conj().T @ img)) for q in paulis) / (1 << k)
            if best < 1 - tol:
                return False
    return True


@functools.lru_cache(maxsize=None)
def gate_flags(name: str) -> tuple[bool, bool]:
    """``(is_clifford, is_diagonal)`` checked against the matrix once per name."""
    u = gate_matrix(name)
    return is_clifford_matrix(u), is_diagonal_matrix(u)


def is_clifford(name: str) -> bool:
    return name in CLIFFORD_GATES or name in ("sxdg", "sydg", "iswapdg", "p0", "p1")


def is_diagonal(name: str) -> bool:
    return gate_flags(name)[1]


def apply_matrix(vec: np.ndarray, u: np.ndarray, qubits, n: int) -> np.ndarray:
    """Apply a k-qubit matrix to ``qubits`` of an n-qubit state vector."""
    qubits = list(qubits)
    k = len(qubits)
    t = vec.reshape((2,) * n)
    ut = u.reshape((2,) * (2 * k))
    t = np.tensordot(ut, t, axes=(list(range(k, 2 * k)), qubits))
    t = np.moveaxis(t, list(range(k)), qubits)
    return t.reshape(-1)


def embed_matrix(u: np.ndarray, qubits, n: int) -> np.ndarray:
    """Full 2^n x 2^n matrix of ``u`` acting on ``qubits``."""
    dim = 1 << n
    out = np.empty((dim, dim), dtype=complex)
    eye = np.eye(dim, dtype=complex)
    for col in range(dim):
        out[:, col] = apply_matrix(eye[:, col], u, qubits, n)
    return out
