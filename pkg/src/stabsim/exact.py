"""Exact scalars of the form ``omega**m * 2**(-p/2)`` with ``omega = exp(i*pi/4)``.

Every amplitude and inner product of stabilizer states lives in this set
(plus zero), so the stabilizer core never touches floating point until a
value is handed to an engine.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

_INV_SQRT2 = 0.7071067811865476  # correctly rounded 1/sqrt(2)

# omega**m for m = 0..7 as (re, im) with entries in {0, +-1}; odd m carry an
# extra 1/sqrt(2) which is folded into the magnitude exponent.
_UNIT = [(1, 0), (1, 1), (0, 1), (-1, 1), (-1, 0), (-1, -1), (0, -1), (1, -1)]


@dataclass(frozen=True, slots=True)
class ExactScalar:
    """``0`` or ``omega**m * 2**(-p/2)``.

    ``m`` is kept modulo 8; ``p`` is any integer. The zero element is
    flagged by ``zero=True`` and compares equal only to other zeros.
    """

    m: int = 0
    p: int = 0
    zero: bool = False

    def __post_init__(self):
        if self.zero:
            object.__setattr__(self, "m", 0)
            object.__setattr__(self, "p", 0)
        else:
            object.__setattr__(self, "m", self.m % 8)

    @classmethod
    def from_complex(cls, value: complex, tol: float = 1e-9) -> "ExactScalar":
        """Snap a floating value onto the ring, raising if it is not close to one."""
        if abs(value) < tol:
            return ZERO
        mag = abs(value)
        p = round(-2 * math.log2(mag))
        m = round(math.atan2(value.imag, value.real) / (math.pi / 4)) % 8
        out = cls(m, p)
        if abs(complex(out) - value) > tol * max(1.0, mag):
            raise ValueError(f"{value!r} is not of the form omega^m 2^(-p/2)")
        return out

    def __bool__(self) -> bool:
        return not self.zero

    def __mul__(self, other: "ExactScalar") -> "ExactScalar":
        if not isinstance(other, ExactScalar):
            return NotImplemented
        if self.zero or other.zero:
            return ZERO
        return ExactScalar(self.m + other.m, self.p + other.p)

    def __truediv__(self, other: "ExactScalar") -> "ExactScalar":
        if other.zero:
            raise ZeroDivisionError("division by exact zero")
        if self.zero:
            return ZERO
        return ExactScalar(self.m - other.m, self.p - other.p)

    def __neg__(self) -> "ExactScalar":
        return self if self.zero else ExactScalar(self.m + 4, self.p)

    def __add__(self, other: "ExactScalar") -> "ExactScalar":
        """Exact sum; raises ``ValueError`` when the result leaves the ring."""
        if not isinstance(other, ExactScalar):
            return NotImplemented
        if self.zero:
            return other
        if other.zero:
            return self
        if self.p == other.p:
            diff = (other.m - self.m) % 8
            if diff == 0:
                return ExactScalar(self.m, self.p - 2)
            if diff == 4:
                return ZERO
            if diff == 2:
                return ExactScalar(self.m + 1, self.p - 1)
            if diff == 6:
                return ExactScalar(self.m - 1, self.p - 1)
        return _from_cyclotomic(*_add_cyclotomic(self, other))

    def __sub__(self, other: "ExactScalar") -> "ExactScalar":
        return self + (-other)

    def conj(self) -> "ExactScalar":
        return self if self.zero else ExactScalar(-self.m, self.p)

    def times_omega(self, k: int) -> "ExactScalar":
        return self if self.zero else ExactScalar(self.m + k, self.p)

    def abs2(self) -> "ExactScalar":
        return self if self.zero else ExactScalar(0, 2 * self.p)

    def magnitude(self) -> "ExactScalar":
        return self if self.zero else ExactScalar(0, self.p)

    def __complex__(self) -> complex:
        if self.zero:
            return 0j
        re, im = _UNIT[self.m]
        q = self.p + (self.m & 1)
        if q % 2 == 0:
            scale = math.ldexp(1.0, -(q // 2))
        else:
            scale = math.ldexp(_INV_SQRT2, -((q - 1) // 2))
        return complex(re * scale, im * scale)

    def __repr__(self) -> str:
        if self.zero:
            return "ExactScalar(0)"
        return f"ExactScalar(w^{self.m} * 2^(-{self.p}/2))"


ZERO = ExactScalar(zero=True)
ONE = ExactScalar(0, 0)
INV_SQRT2 = ExactScalar(0, 1)


# --- Z[omega] helpers for the rare sums that are not equal-magnitude ------


def _zmul(a, b):
    out = [0, 0, 0, 0]
    for i, ai in enumerate(a):
        if not ai:
            continue
        for j, bj in enumerate(b):
            k = i + j
            if k >= 4:
                out[k - 4] -= ai * bj
            else:
                out[k] += ai * bj
    return out


_SQRT2 = [0, 1, 0, -1]  # omega - omega**3


def _monomial(m: int) -> list[int]:
    v = [0, 0, 0, 0]
    m %= 8
    v[m % 4] = -1 if m >= 4 else 1
    return v


def _add_cyclotomic(a: ExactScalar, b: ExactScalar):
    big = max(a.p, b.p)
    total = [0, 0, 0, 0]
    for s in (a, b):
        v = _monomial(s.m)
        k = big - s.p
        v = [c * (1 << (k // 2)) for c in v]
        if k % 2:
            v = _zmul(v, _SQRT2)
        total = [x + y for x, y in zip(total, v)]
    return total, big


def _from_cyclotomic(z, p):
    if not any(z):
        return ZERO
    while True:
        w = _zmul(z, _SQRT2)
        if all(c % 2 == 0 for c in w):
            z = [c // 2 for c in w]
            p -= 1
        else:
            break
    nz = [(i, c) for i, c in enumerate(z) if c]
    if len(nz) != 1 or abs(nz[0][1]) != 1:
        raise ValueError("sum is not a monomial omega^m 2^(-p/2)")
    i, c = nz[0]
    return ExactScalar(i + (4 if c < 0 else 0), p)
