"""GF(2) linear algebra on int bitsets.

Rows are Python ints whose bit i is column i; this keeps elimination on
4095-column matrices cheap without a dense array.
"""

from __future__ import annotations

from collections.abc import Iterable

import numpy as np

__all__ = ["Gf2Basis", "rank_gf2", "row_to_int", "support_to_int"]


def row_to_int(row) -> int:
    bits = np.asarray(row, dtype=np.uint8) & 1
    return int.from_bytes(np.packbits(bits, bitorder="little").tobytes(), "little")


def support_to_int(support: Iterable[int]) -> int:
    v = 0
    for i in support:
        v ^= 1 << int(i)
    return v


class Gf2Basis:
    """Incrementally grown echelon basis, keyed by each vector's leading bit."""

    def __init__(self):
        self._pivots: dict[int, int] = {}

    def __len__(self) -> int:
        return len(self._pivots)

    def reduce(self, v: int) -> int:
        pivots = self._pivots
        while v:
            top = v.bit_length() - 1
            p = pivots.get(top)
            if p is None:
                return v
            v ^= p
        return 0

    def add(self, v: int) -> bool:
        """Insert ``v``; False (and no change) if it is already in the span."""
        r = self.reduce(v)
        if r == 0:
            return False
        self._pivots[r.bit_length() - 1] = r
        return True

    def contains(self, v: int) -> bool:
        return self.reduce(v) == 0


def rank_gf2(matrix) -> int:
    """Rank over GF(2) of a dense 0/1 matrix or a sequence of int-bitset rows."""
    if isinstance(matrix, np.ndarray):
        if matrix.ndim != 2:
            raise ValueError("expected a 2-D matrix")
        rows = [row_to_int(r) for r in matrix]
    else:
        rows = [int(r) if isinstance(r, (int, np.integer)) else row_to_int(r) for r in matrix]
    basis = Gf2Basis()
    for r in rows:
        basis.add(r)
    return len(basis)
