"""Pauli operators on n qubits stored as integer bitmasks.

Qubit ``j`` lives at bit ``n - 1 - j`` of every mask, so the masks read in
the same order as a basis-state string and the integer of a bit string is its
dense vector index.

The operator is ``i**phase * P_0 (x) P_1 (x) ...`` where each ``P_j`` is one of
the symbols I, X, Y, Z chosen by the bits ``(x_j, z_j)``; Y is the Hermitian
Pauli Y, so an operator is Hermitian exactly when ``phase`` is even.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


def popcount(v: int) -> int:
    return bin(v).count("1")


_SYMBOL = {(0, 0): "I", (1, 0): "X", (1, 1): "Y", (0, 1): "Z"}
_BITS = {"I": (0, 0), "X": (1, 0), "Y": (1, 1), "Z": (0, 1)}
_PREFIX = {"": 0, "+": 0, "i": 1, "+i": 1, "-": 2, "-i": 3}

_MATS = {
    (0, 0): np.eye(2, dtype=complex),
    (1, 0): np.array([[0, 1], [1, 0]], dtype=complex),
    (1, 1): np.array([[0, -1j], [1j, 0]], dtype=complex),
    (0, 1): np.array([[1, 0], [0, -1]], dtype=complex),
}


@dataclass(frozen=True, slots=True)
class PauliOperator:
    n: int
    x_bits: int
    z_bits: int
    phase: int = 0

    def __post_init__(self):
        mask = (1 << self.n) - 1
        if self.x_bits & ~mask or self.z_bits & ~mask:
            raise ValueError("mask has bits beyond n qubits")
        object.__setattr__(self, "phase", self.phase % 4)

    # --- construction -------------------------------------------------
    @classmethod
    def identity(cls, n: int) -> "PauliOperator":
        return cls(n, 0, 0, 0)

    @classmethod
    def from_string(cls, text: str) -> "PauliOperator":
        """Parse e.g. ``"XZ"``, ``"-YI"`` or ``"+iZZX"``."""
        text = text.strip()
        body = text.lstrip("+-i")
        prefix = text[: len(text) - len(body)]
        if prefix not in _PREFIX:
            raise ValueError(f"bad Pauli prefix {prefix!r}")
        n = len(body)
        x = z = 0
        for ch in body.upper():
            if ch not in _BITS:
                raise ValueError(f"bad Pauli symbol {ch!r}")
            bx, bz = _BITS[ch]
            x = (x << 1) | bx
            z = (z << 1) | bz
        return cls(n, x, z, _PREFIX[prefix])

    @classmethod
    def single(cls, n: int, qubit: int, symbol: str, phase: int = 0) -> "PauliOperator":
        bx, bz = _BITS[symbol.upper()]
        bit = 1 << (n - 1 - qubit)
        return cls(n, bit if bx else 0, bit if bz else 0, phase)

    # --- algebra ------------------------------------------------------
    def xz_exponent(self) -> int:
        """Exponent ``e`` with ``self == i**e X^x Z^z`` (X factors to the left)."""
        return (self.phase + popcount(self.x_bits & self.z_bits)) % 4

    @classmethod
    def from_xz(cls, n: int, x: int, z: int, e: int) -> "PauliOperator":
        return cls(n, x, z, e - popcount(x & z))

    def __mul__(self, other: "PauliOperator") -> "PauliOperator":
        if not isinstance(other, PauliOperator):
            return NotImplemented
        if other.n != self.n:
            raise ValueError("qubit count mismatch")
        e = self.xz_exponent() + other.xz_exponent() + 2 * popcount(self.z_bits & other.x_bits)
        return PauliOperator.from_xz(self.n, self.x_bits ^ other.x_bits, self.z_bits ^ other.z_bits, e)

    def __neg__(self) -> "PauliOperator":
        return PauliOperator(self.n, self.x_bits, self.z_bits, self.phase + 2)

    def commutes(self, other: "PauliOperator") -> bool:
        s = popcount(self.x_bits & other.z_bits) + popcount(self.z_bits & other.x_bits)
        return s % 2 == 0

    def is_hermitian(self) -> bool:
        return self.phase % 2 == 0

    def is_identity(self) -> bool:
        return self.x_bits == 0 and self.z_bits == 0

    def weight(self) -> int:
        return popcount(self.x_bits | self.z_bits)

    def apply_to_basis(self, b: int) -> tuple[int, int]:
        """Return ``(b2, e)`` with ``P|b> = i**e |b2>``."""
        e = self.xz_exponent() + 2 * popcount(self.z_bits & b)
        return b ^ self.x_bits, e % 4

    def embed(self, n: int, qubits) -> "PauliOperator":
        """Place this k-qubit operator on ``qubits`` of an n-qubit register."""
        qubits = list(qubits)
        if len(qubits) != self.n:
            raise ValueError("embedding needs one target per qubit")
        x = z = 0
        for j, q in enumerate(qubits):
            src = 1 << (self.n - 1 - j)
            dst = 1 << (n - 1 - q)
            if self.x_bits & src:
                x |= dst
            if self.z_bits & src:
                z |= dst
        return PauliOperator(n, x, z, self.phase)

    def restrict(self, qubits) -> "PauliOperator":
        """Drop the phase and keep only the factors on ``qubits`` (in order)."""
        qubits = list(qubits)
        k = len(qubits)
        x = z = 0
        for j, q in enumerate(qubits):
            src = 1 << (self.n - 1 - q)
            dst = 1 << (k - 1 - j)
            if self.x_bits & src:
                x |= dst
            if self.z_bits & src:
                z |= dst
        return PauliOperator(k, x, z, 0)

    def symbol(self, qubit: int) -> str:
        bit = 1 << (self.n - 1 - qubit)
        return _SYMBOL[(int(bool(self.x_bits & bit)), int(bool(self.z_bits & bit)))]

    def to_dense(self) -> np.ndarray:
        out = np.array([[1.0 + 0j]])
        for j in range(self.n):
            bit = 1 << (self.n - 1 - j)
            key = (int(bool(self.x_bits & bit)), int(bool(self.z_bits & bit)))
            out = np.kron(out, _MATS[key])
        return (1j ** self.phase) * out

    def __str__(self) -> str:
        prefix = ["+", "+i", "-", "-i"][self.phase]
        return prefix + "".join(self.symbol(j) for j in range(self.n))
