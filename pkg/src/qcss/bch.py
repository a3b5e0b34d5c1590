"""Narrow-sense primitive binary BCH code: check matrix, syndromes, decoding.

Qubit ``i`` (0-based) carries the locator alpha^i, so column ``i`` of the
field-valued check matrix is ``(alpha^i, alpha^(3i), ..., alpha^((2t-1)i))``.
"""

from __future__ import annotations

import warnings
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .galois import Field
from .gf2 import Gf2Basis, rank_gf2

__all__ = [
    "BchCode",
    "DecodeFailure",
    "RankDeficiencyWarning",
    "Syndromes",
    "berlekamp_decode",
    "binary_check_matrix",
    "syndromes",
]


class DecodeFailure(Exception):
    """The syndromes are not those of any error of weight <= t."""


class RankDeficiencyWarning(UserWarning):
    pass


@dataclass(frozen=True)
class Syndromes:
    """Odd syndromes (zeta_1, zeta_3, ..., zeta_{2t-1}) and the full run S_1..S_2t."""

    odd: tuple[int, ...]
    full: tuple[int, ...]

    def is_zero(self) -> bool:
        return not any(self.odd)


class BchCode:
    def __init__(self, field: Field, t: int):
        N = field.order
        if t < 1:
            raise ValueError("t must be >= 1")
        if 2 * t + 1 > N:
            raise ValueError(f"2t+1 = {2 * t + 1} exceeds block length {N}")
        self.field = field
        self.t = t
        self.N = N
        self.m = field.m
        self._positions = np.arange(N, dtype=np.int64)
        self._odd = np.arange(1, 2 * t, 2, dtype=np.int64)
        self._chien_neg = (-self._positions) % N
        if self.rank < self.M_z_nominal:
            warnings.warn(
                f"binary check matrix of BCH(m={self.m}, t={t}) has rank {self.rank} "
                f"< {self.M_z_nominal}",
                RankDeficiencyWarning,
                stacklevel=2,
            )

    @classmethod
    def from_params(cls, m: int, t: int, prim_poly: int | None = None) -> BchCode:
        return cls(Field(m, prim_poly), t)

    def __repr__(self) -> str:
        return f"BchCode(m={self.m}, t={self.t}, prim_poly={self.field.prim_poly:#x})"

    def __reduce__(self):
        return (BchCode, (self.field, self.t))

    def __eq__(self, other: object) -> bool:
        return isinstance(other, BchCode) and (self.field, self.t) == (other.field, other.t)

    def __hash__(self) -> int:
        return hash((self.field, self.t))

    @property
    def M_z_nominal(self) -> int:
        return self.t * self.m

    @property
    def M_z(self) -> int:
        """Row count of H^z that enters the rate formulas (its GF(2) rank)."""
        return self.rank

    @cached_property
    def H(self) -> np.ndarray:
        return binary_check_matrix(self)

    @cached_property
    def rank(self) -> int:
        return rank_gf2(self.H)

    @cached_property
    def row_space(self) -> Gf2Basis:
        basis = Gf2Basis()
        for row in self.H:
            basis.add(_row_bits(row))
        return basis

    def syndromes(self, support: Iterable[int]) -> Syndromes:
        return syndromes(self, support)

    def decode(self, synd: Syndromes | Sequence[int]) -> tuple[int, ...]:
        return berlekamp_decode(self, synd)

    def is_codeword(self, support: Iterable[int]) -> bool:
        return syndromes(self, support).is_zero()


def _row_bits(row: np.ndarray) -> int:
    return int.from_bytes(np.packbits(row, bitorder="little").tobytes(), "little")


def _odd_syndromes(code: BchCode, positions: np.ndarray) -> list[int]:
    if positions.size == 0:
        return [0] * code.t
    exps = np.outer(code._odd, positions) % code.N
    return np.bitwise_xor.reduce(code.field.exp_table[exps], axis=1).tolist()


def _expand(field: Field, odd: Sequence[int]) -> tuple[int, ...]:
    t = len(odd)
    full = [0] * (2 * t + 1)  # 1-based
    for j in range(1, 2 * t + 1):
        if j % 2:
            full[j] = odd[(j - 1) // 2]
        else:
            full[j] = field.mul(full[j // 2], full[j // 2])
    return tuple(full[1:])


def syndromes(code: BchCode, support: Iterable[int]) -> Syndromes:
    """zeta_{2s-1} = sum over the support of (alpha^i)^(2s-1), s = 1..t."""
    pos = np.fromiter((int(i) for i in support), dtype=np.int64)
    if pos.size and (pos.min() < 0 or pos.max() >= code.N):
        raise IndexError("error position out of range")
    if np.unique(pos).size != pos.size:
        raise ValueError("error positions must be distinct")
    odd = tuple(_odd_syndromes(code, pos))
    return Syndromes(odd, _expand(code.field, odd))


def binary_check_matrix(code: BchCode) -> np.ndarray:
    """The tm x N binary expansion of the field-valued check matrix.

    Row ``s*m + p`` holds bit p of (alpha^i)^(2s+1) at column i.
    """
    m, N = code.m, code.N
    exps = np.outer(code._odd, code._positions) % N
    vals = code.field.exp_table[exps]  # t x N
    bits = (vals[:, None, :] >> np.arange(m)[None, :, None]) & 1
    return bits.reshape(code.t * m, N).astype(np.uint8)


def _berlekamp_massey(field: Field, S: Sequence[int]) -> list[int]:
    """Shortest LFSR (connection polynomial Lambda, low degree first) generating S."""
    mul = field.mul
    C = [1]
    B = [1]
    L = 0
    shift = 1
    b = 1
    for n in range(len(S)):
        d = S[n]
        for i in range(1, L + 1):
            if i < len(C) and C[i]:
                d ^= mul(C[i], S[n - i])
        if d == 0:
            shift += 1
            continue
        coef = field.div(d, b)
        T = C
        new = C + [0] * max(0, len(B) + shift - len(C))
        for i, bi in enumerate(B):
            if bi:
                new[i + shift] ^= mul(coef, bi)
        C = new
        if 2 * L <= n:
            L = n + 1 - L
            B = T
            b = d
            shift = 1
        else:
            shift += 1
    # deg C <= L always holds; pad/trim to exactly L + 1 coefficients
    return (C + [0] * (L + 1))[: L + 1]


def _chien_positions(code: BchCode, lam: Sequence[int]) -> np.ndarray:
    """Positions i with Lambda(alpha^-i) == 0, by evaluating at every locator."""
    field = code.field
    N = code.N
    acc = np.zeros(N, dtype=np.int64)
    neg = code._chien_neg
    for k, c in enumerate(lam):
        if c == 0:
            continue
        acc ^= field.exp_table[(field.log_table[c] + k * neg) % N]
    return np.flatnonzero(acc == 0)


def berlekamp_decode(code: BchCode, synd: Syndromes | Sequence[int]) -> tuple[int, ...]:
    """Error support (sorted) of weight <= t reproducing ``synd``.

    ``synd`` may be a :class:`Syndromes` or just the odd syndromes. Raises
    :class:`DecodeFailure` when no such support exists; every returned support
    is re-checked against the input syndromes.
    """
    odd = tuple(synd.odd) if isinstance(synd, Syndromes) else tuple(int(s) for s in synd)
    if len(odd) != code.t:
        raise ValueError(f"expected {code.t} odd syndromes, got {len(odd)}")
    if not any(odd):
        return ()
    full = _expand(code.field, odd)
    lam = _berlekamp_massey(code.field, full)
    L = len(lam) - 1
    if L > code.t or lam[L] == 0:
        raise DecodeFailure(f"locator degree {L} exceeds t={code.t}")
    positions = _chien_positions(code, lam)
    if positions.size != L:
        raise DecodeFailure(f"locator of degree {L} has {positions.size} roots among the locators")
    if tuple(_odd_syndromes(code, positions)) != odd:
        raise DecodeFailure("candidate support does not reproduce the syndromes")
    return tuple(positions.tolist())


def full_syndromes_batch(field: Field, odd: np.ndarray) -> np.ndarray:
    """(K, t) odd syndromes -> (K, 2t) syndromes S_1..S_2t."""
    K, t = odd.shape
    full = np.zeros((K, 2 * t + 1), dtype=np.int64)  # column 0 unused
    for j in range(1, 2 * t + 1):
        if j % 2:
            full[:, j] = odd[:, (j - 1) // 2]
        else:
            full[:, j] = field.mul_vec(full[:, j // 2], full[:, j // 2])
    return full[:, 1:]


def berlekamp_massey_batch(field: Field, S: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Row-wise Berlekamp-Massey; returns (Lambda coefficients (K, 2t+1), lengths L (K,))."""
    K, n2 = S.shape
    width = n2 + 1
    rows = np.arange(K)
    C = np.zeros((K, width), dtype=np.int64)
    B = np.zeros((K, width), dtype=np.int64)
    C[:, 0] = 1
    B[:, 0] = 1
    L = np.zeros(K, dtype=np.int64)
    shift = np.ones(K, dtype=np.int64)
    b = np.ones(K, dtype=np.int64)
    for n in range(n2):
        d = S[:, n].copy()
        for i in range(1, n + 1):
            d ^= field.mul_vec(C[:, i], S[:, n - i])
        nz = d != 0
        if not nz.any():
            shift += 1
            continue
        coef = np.zeros(K, dtype=np.int64)
        coef[nz] = field.mul_vec(d[nz], field.inv_vec(b[nz]))
        new = C.copy()
        for j in range(width):
            src = j - shift
            ok = nz & (src >= 0)
            if ok.any():
                new[ok, j] ^= field.mul_vec(coef[ok], B[rows[ok], src[ok]])
        grow = nz & (2 * L <= n)
        B = np.where(grow[:, None], C, B)
        C = np.where(nz[:, None], new, C)
        L = np.where(grow, n + 1 - L, L)
        b = np.where(grow, d, b)
        shift = np.where(grow, 1, shift + 1)
    return C, L
