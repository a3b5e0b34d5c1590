"""Table-driven arithmetic in GF(2^m).

Field elements are plain ints holding the m coefficient bits over the
polynomial basis 1, alpha, ..., alpha^(m-1); bit p is the coefficient of
alpha^p. Zero is ``0`` and one is ``1``.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "DEFAULT_PRIMITIVE_POLYNOMIALS",
    "DivisionByZero",
    "Field",
    "NonPrimitivePolynomial",
    "make_field",
]

# Lexicographically smallest primitive polynomial of each degree, as a bit mask
# (bit k is the coefficient of x^k).
DEFAULT_PRIMITIVE_POLYNOMIALS: dict[int, int] = {
    2: 0x7,
    3: 0xB,
    4: 0x13,
    5: 0x25,
    6: 0x43,
    7: 0x83,
    8: 0x11D,
    9: 0x211,
    10: 0x409,
    11: 0x805,
    12: 0x1053,
    13: 0x201B,
    14: 0x402B,
    15: 0x8003,
    16: 0x1002D,
}


class NonPrimitivePolynomial(ValueError):
    """The powers of x modulo the polynomial do not cycle through every nonzero element."""


class DivisionByZero(ZeroDivisionError):
    pass


class Field:
    """GF(2^m) with exp/log tables built from a primitive polynomial.

    Instances are immutable once built and can be shared freely between
    threads and decoders.
    """

    def __init__(self, m: int, prim_poly: int | None = None):
        if not 2 <= m <= 16:
            raise ValueError(f"extension degree must satisfy 2 <= m <= 16, got {m}")
        if prim_poly is None:
            prim_poly = DEFAULT_PRIMITIVE_POLYNOMIALS[m]
        if prim_poly >> m != 1:
            raise NonPrimitivePolynomial(f"{prim_poly:#x} does not have degree {m}")

        self.m = m
        self.prim_poly = prim_poly
        self.order = (1 << m) - 1
        N = self.order

        exp = np.zeros(2 * N, dtype=np.int64)
        log = np.full(N + 1, -1, dtype=np.int64)
        x = 1
        for r in range(N):
            if log[x] != -1:
                raise NonPrimitivePolynomial(
                    f"{prim_poly:#x}: alpha has order {r} < {N} in GF(2^{m})"
                )
            exp[r] = x
            log[x] = r
            x <<= 1
            if x >> m:
                x ^= prim_poly
        if x != 1:
            # only reachable when the polynomial is reducible with x as a zero divisor
            raise NonPrimitivePolynomial(f"{prim_poly:#x}: alpha^{N} != 1")
        exp[N:] = exp[:N]
        exp.setflags(write=False)
        log.setflags(write=False)
        # exp is doubled so exp[a + b] needs no reduction for a, b < N
        self.exp_table = exp
        self.log_table = log
        self._exp = exp.tolist()
        self._log = log.tolist()

    @property
    def size(self) -> int:
        return self.order + 1

    def __repr__(self) -> str:
        return f"Field(m={self.m}, prim_poly={self.prim_poly:#x})"

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Field) and (self.m, self.prim_poly) == (other.m, other.prim_poly)

    def __hash__(self) -> int:
        return hash((self.m, self.prim_poly))

    def __reduce__(self):
        return (Field, (self.m, self.prim_poly))

    def add(self, a: int, b: int) -> int:
        return a ^ b

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return self._exp[self._log[a] + self._log[b]]

    def inv(self, a: int) -> int:
        if a == 0:
            raise DivisionByZero("inverse of zero in GF(2^m)")
        return self._exp[(self.order - self._log[a]) % self.order]

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, k: int) -> int:
        """``a**k`` for k >= 0, with ``pow(0, 0) == 1``."""
        if k < 0:
            raise ValueError("negative exponent; use inv()")
        if a == 0:
            return 1 if k == 0 else 0
        return self._exp[(self._log[a] * k) % self.order]

    def element_from_exponent(self, r: int) -> int:
        """Locator of qubit ``r``: the element alpha^r."""
        if not 0 <= r < self.order:
            raise IndexError(f"exponent {r} outside 0..{self.order - 1}")
        return self._exp[r]

    def log(self, a: int) -> int:
        if a == 0:
            raise DivisionByZero("log of zero")
        return self._log[a]

    # elementwise versions on integer arrays

    def mul_vec(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        a, b = np.broadcast_arrays(np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64))
        nz = (a != 0) & (b != 0)
        out = np.zeros(a.shape, dtype=np.int64)
        out[nz] = self.exp_table[self.log_table[a[nz]] + self.log_table[b[nz]]]
        return out

    def inv_vec(self, a: np.ndarray) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        if np.any(a == 0):
            raise DivisionByZero("inverse of zero in GF(2^m)")
        return self.exp_table[(self.order - self.log_table[a]) % self.order]


def make_field(m: int, prim_poly: int | None = None) -> Field:
    return Field(m, prim_poly)
