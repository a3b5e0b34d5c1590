"""Construction of the x-checks: BCH codewords of weight 2t+1 chosen for balanced degrees.

Each candidate check starts from t+1 uniformly random qubits and is completed
by decoding: the BCH decoder finds the t further positions that cancel the
syndrome of the seed, so the whole support is a BCH codeword and therefore
commutes with every z-check.
"""

from __future__ import annotations

import itertools
from collections.abc import Iterator, Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import cached_property
from typing import Literal

import numpy as np

from .bch import (
    BchCode,
    DecodeFailure,
    berlekamp_decode,
    berlekamp_massey_batch,
    full_syndromes_batch,
    syndromes,
)
from .gf2 import Gf2Basis, rank_gf2, support_to_int

__all__ = [
    "CompletionFailure",
    "CssCode",
    "InsufficientPool",
    "PoolExhausted",
    "PoolStats",
    "SelectionStep",
    "build_css_code",
    "build_pool",
    "build_random_ldpc",
    "generate_candidate_check",
    "random_pool",
    "rank_gf2",
    "rates",
    "select_checks",
    "verify_commutativity",
]

XCheck = tuple[int, ...]

# stream tags mixed into every seed so that independent uses never share randomness
POOL_STREAM = 1
SELECT_STREAM = 2
RANDOM_POOL_STREAM = 5

POOL_BLOCK = 2048
POOL_MULTIPLIER = 40


class CompletionFailure(Exception):
    pass


class PoolExhausted(RuntimeError):
    pass


class InsufficientPool(RuntimeError):
    pass


def _seed_rng(*key: int) -> np.random.Generator:
    return np.random.default_rng(list(key))


def _distinct_positions(N: int, k: int, rng: np.random.Generator) -> np.ndarray:
    # rejection keeps the draw uniform over k-subsets
    while True:
        pos = rng.integers(0, N, size=k)
        if np.unique(pos).size == k:
            return pos


def generate_candidate_check(code: BchCode, rng: np.random.Generator) -> XCheck:
    """One attempt at a degree-(2t+1) x-check.

    Raises :class:`CompletionFailure` when the seed syndrome is not that of a
    weight-t pattern disjoint from the seed.
    """
    t = code.t
    seed_pos = _distinct_positions(code.N, t + 1, rng)
    # characteristic 2: the right-hand side equals the seed's own syndromes
    try:
        completion = berlekamp_decode(code, syndromes(code, seed_pos))
    except DecodeFailure as exc:
        raise CompletionFailure(str(exc)) from None
    if len(completion) != t:
        raise CompletionFailure(f"decoder returned {len(completion)} positions, need {t}")
    seed_set = set(seed_pos.tolist())
    if seed_set.intersection(completion):
        raise CompletionFailure("completion collides with the seed positions")
    return tuple(sorted(seed_set.union(completion)))


@dataclass
class PoolStats:
    attempts: int = 0
    accepted: int = 0
    duplicates: int = 0

    @property
    def acceptance_rate(self) -> float:
        return self.accepted / self.attempts if self.attempts else 0.0


def _draw_seeds(N: int, k: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """``count`` rows of k distinct positions; rows with repeats are redrawn."""
    seeds = rng.integers(0, N, size=(count, k))
    while True:
        srt = np.sort(seeds, axis=1)
        bad = np.flatnonzero((srt[:, 1:] == srt[:, :-1]).any(axis=1))
        if bad.size == 0:
            return seeds
        seeds[bad] = rng.integers(0, N, size=(bad.size, k))


def _splits_over_field(field, lam: np.ndarray) -> np.ndarray:
    """Rows whose monic degree-t polynomial divides x^(2^m) - x (t distinct roots in the field)."""
    K, t1 = lam.shape
    t = t1 - 1
    mul = field.mul_vec
    low = lam[:, :t]  # monic: x^t = sum_j low_j x^j in characteristic 2

    def reduce(poly: np.ndarray) -> np.ndarray:
        poly = poly.copy()
        for k in range(poly.shape[1] - 1, t - 1, -1):
            c = poly[:, k]
            poly[:, k - t : k] ^= mul(c[:, None], low)
            poly[:, k] = 0
        return poly[:, :t]

    x = np.zeros((K, max(t, 2)), dtype=np.int64)
    x[:, 1] = 1
    x = reduce(x) if t < 2 else x[:, :t]
    r = x
    for _ in range(field.m):
        sq = np.zeros((K, 2 * t - 1), dtype=np.int64)
        sq[:, ::2] = mul(r, r)
        r = reduce(sq)
    return (r == x).all(axis=1)


def complete_batch(code: BchCode, seeds: np.ndarray) -> list[XCheck | None]:
    """Vectorised :func:`generate_candidate_check` on pre-drawn seed rows."""
    field, N, t = code.field, code.N, code.t
    K = seeds.shape[0]
    out: list[XCheck | None] = [None] * K
    odd_exp = np.arange(1, 2 * t, 2)
    odd = np.bitwise_xor.reduce(
        field.exp_table[(odd_exp[None, :, None] * seeds[:, None, :]) % N], axis=2
    )
    lam, L = berlekamp_massey_batch(field, full_syndromes_batch(field, odd))
    cand = np.flatnonzero((L == t) & (lam[:, t] != 0) & (lam[:, t + 1 :] == 0).all(axis=1))
    if cand.size == 0:
        return out
    monic = field.mul_vec(lam[cand, : t + 1], field.inv_vec(lam[cand, t])[:, None])
    cand = cand[_splits_over_field(field, monic)]
    neg = code._chien_neg
    for row in cand:
        coeffs = lam[row, : t + 1]
        acc = np.zeros(N, dtype=np.int64)
        for k, c in enumerate(coeffs):
            if c:
                acc ^= field.exp_table[(field.log_table[c] + k * neg) % N]
        roots = np.flatnonzero(acc == 0)
        seed_set = set(seeds[row].tolist())
        if roots.size != t or seed_set.intersection(roots.tolist()):
            continue
        support = tuple(sorted(seed_set.union(roots.tolist())))
        if code.is_codeword(support):
            out[row] = support
    return out


def _pool_block(code: BchCode, seed: int, block: int, size: int = POOL_BLOCK) -> list[XCheck | None]:
    rng = _seed_rng(seed, POOL_STREAM, block)
    return complete_batch(code, _draw_seeds(code.N, code.t + 1, size, rng))


def _blocks(fn, workers: int) -> Iterator[list[XCheck | None]]:
    """Blocks 0, 1, 2, ... in order; with workers > 1 they are computed ahead in parallel."""
    if workers <= 1:
        for b in itertools.count():
            yield fn(b)
        return
    with ProcessPoolExecutor(max_workers=workers) as ex:
        for start in itertools.count(0, workers):
            yield from ex.map(fn, range(start, start + workers))


class _BlockFn:
    def __init__(self, code: BchCode, seed: int):
        self.code = code
        self.seed = seed

    def __call__(self, block: int) -> list[XCheck | None]:
        return _pool_block(self.code, self.seed, block)


def build_pool(
    code: BchCode,
    pool_size: int,
    seed: int = 0,
    *,
    workers: int = 1,
    max_stall: int | None = None,
    stats: PoolStats | None = None,
    partial_ok: bool = False,
) -> list[XCheck]:
    """``pool_size`` distinct x-check candidates.

    Attempts are grouped into fixed blocks with their own RNG stream, and
    consumed strictly in (block, attempt) order, so the pool does not depend on
    ``workers``. ``max_stall`` bounds the number of consecutive failed or
    duplicate attempts before :class:`PoolExhausted` is raised, or, with
    ``partial_ok``, before the checks collected so far are returned.
    """
    if pool_size < 0:
        raise ValueError("pool_size must be >= 0")
    stats = stats if stats is not None else PoolStats()
    pool: list[XCheck] = []
    if pool_size == 0:
        return pool
    if max_stall is None:
        max_stall = max(20_000, 200 * _factorial(code.t))
    seen: set[XCheck] = set()
    stall = 0
    blocks = _blocks(_BlockFn(code, seed), workers)
    try:
        for block in blocks:
            for cand in block:
                stats.attempts += 1
                if cand is None:
                    stall += 1
                elif cand in seen:
                    stats.duplicates += 1
                    stall += 1
                else:
                    stats.accepted += 1
                    seen.add(cand)
                    pool.append(cand)
                    stall = 0
                    if len(pool) == pool_size:
                        return pool
                if stall >= max_stall:
                    if partial_ok:
                        return pool
                    raise PoolExhausted(
                        f"{stall} consecutive attempts without a new check "
                        f"({len(pool)}/{pool_size} collected)"
                    )
    finally:
        blocks.close()
    raise AssertionError("unreachable")


def random_pool(N: int, degree: int, pool_size: int, seed: int = 0) -> list[XCheck]:
    """Uniformly random distinct ``degree``-subsets, the unstructured baseline."""
    rng = _seed_rng(seed, RANDOM_POOL_STREAM)
    seen: set[XCheck] = set()
    pool: list[XCheck] = []
    while len(pool) < pool_size:
        cand = tuple(sorted(_distinct_positions(N, degree, rng).tolist()))
        if cand not in seen:
            seen.add(cand)
            pool.append(cand)
    return pool


def _factorial(k: int) -> int:
    out = 1
    for i in range(2, k + 1):
        out *= i
    return out


TieBreak = Literal["uniform", "load"]


@dataclass(frozen=True)
class SelectionStep:
    pool_index: int
    quality: int
    n_tied: int
    accepted: bool
    reason: str = ""  # why a draw was discarded: "dependent" or "4-cycle"


def check_quality(supports: np.ndarray, degree: np.ndarray) -> np.ndarray:
    """Number of minimum-degree variables each candidate would touch."""
    at_min = degree == degree.min()
    return at_min[supports].sum(axis=1)


def select_checks(
    pool: Sequence[XCheck],
    M_x: int,
    rng: np.random.Generator,
    N: int | None = None,
    *,
    tie_break: TieBreak = "uniform",
    avoid_4cycles: bool = False,
    log: list[SelectionStep] | None = None,
) -> list[XCheck]:
    """Greedy degree-balancing selection of ``M_x`` linearly independent checks.

    At every step the unused candidates are ranked by quality and one of the
    best is drawn at random. With ``tie_break="load"`` the draw is restricted
    to the best candidates whose support has the smallest total degree.
    Draws that are linearly dependent on the checks already chosen are
    discarded. With ``avoid_4cycles``, draws sharing two variables with a
    chosen check are deferred; if the pool runs dry before ``M_x`` checks are
    found, the deferred ones return and the constraint is dropped.
    Output is in selection order.
    """
    if tie_break not in ("uniform", "load"):
        raise ValueError(f"unknown tie_break {tie_break!r}")
    if M_x == 0:
        return []
    if M_x > len(pool):
        raise InsufficientPool(f"pool has {len(pool)} checks, {M_x} requested")
    supports = np.array(pool, dtype=np.int64)
    if N is None:
        N = int(supports.max()) + 1
    degree = np.zeros(N, dtype=np.int64)
    available = np.ones(len(pool), dtype=bool)
    basis = Gf2Basis()
    pairs: set[tuple[int, int]] = set()
    chosen: list[XCheck] = []
    deferred: list[int] = []
    quality = None
    while len(chosen) < M_x:
        if quality is None:
            quality = np.where(available, check_quality(supports, degree), -1)
        best = int(quality.max())
        if best < 0 and deferred:
            available[deferred] = True
            deferred.clear()
            avoid_4cycles = False
            quality = None
            continue
        if best < 0:
            raise InsufficientPool(
                f"only {len(chosen)} usable checks in the pool, {M_x} requested"
            )
        tied = np.flatnonzero(quality == best)
        n_tied = tied.size
        if tie_break == "load":
            load = degree[supports[tied]].sum(axis=1)
            tied = tied[load == load.min()]
        idx = int(tied[rng.integers(tied.size)])
        available[idx] = False
        quality[idx] = -1
        cand = tuple(pool[idx])
        cand_pairs = set(itertools.combinations(cand, 2)) if avoid_4cycles else set()
        if cand_pairs & pairs:
            reason = "4-cycle"
            deferred.append(idx)
        elif not basis.add(support_to_int(cand)):
            reason = "dependent"
        else:
            reason = ""
        if log is not None:
            log.append(SelectionStep(idx, best, int(n_tied), not reason, reason))
        if not reason:
            degree[supports[idx]] += 1
            pairs |= cand_pairs
            chosen.append(cand)
            quality = None
    return chosen


@dataclass(frozen=True)
class CssCode:
    """A BCH z-code together with the x-checks W(a) as sorted supports."""

    bch: BchCode
    x_checks: tuple[XCheck, ...]
    seed: int = 0
    pool_size: int = 0
    metadata: dict = field(default_factory=dict, compare=False)

    @property
    def N(self) -> int:
        return self.bch.N

    @property
    def M_x(self) -> int:
        return len(self.x_checks)

    @property
    def M_z(self) -> int:
        return self.bch.M_z

    @cached_property
    def H_x(self) -> np.ndarray:
        H = np.zeros((self.M_x, self.N), dtype=np.uint8)
        for a, supp in enumerate(self.x_checks):
            H[a, list(supp)] = 1
        return H

    @property
    def H_z(self) -> np.ndarray:
        return self.bch.H

    def variable_degrees(self) -> np.ndarray:
        degree = np.zeros(self.N, dtype=np.int64)
        for supp in self.x_checks:
            degree[list(supp)] += 1
        return degree

    def degree_histogram(self) -> dict[int, int]:
        values, counts = np.unique(self.variable_degrees(), return_counts=True)
        return {int(v): int(c) for v, c in zip(values, counts)}

    def rates(self) -> tuple[float, float, float]:
        return rates(self)


def verify_commutativity(css: CssCode) -> tuple[bool, list[tuple[int, int]]]:
    """Check H^z (H^x)^T = 0; violations are (z-row, x-check) index pairs."""
    if css.M_x == 0:
        return True, []
    Hz = css.bch.H
    supports = [list(s) for s in css.x_checks]
    violations: list[tuple[int, int]] = []
    for a_x, supp in enumerate(supports):
        parity = Hz[:, supp].sum(axis=1) & 1
        violations.extend((int(a_z), a_x) for a_z in np.flatnonzero(parity))
    violations.sort()
    return not violations, violations


def rates_from_counts(N: int, M_z: int, M_x: int) -> tuple[float, float, float]:
    return 1 - M_z / N, 1 - M_x / N, 1 - (M_x + M_z) / N


def rates(css: CssCode) -> tuple[float, float, float]:
    """(R_z, R_x, R) from the rank-validated check counts."""
    return rates_from_counts(css.N, css.M_z, css.M_x)


def build_css_code(
    code: BchCode,
    M_x: int,
    *,
    seed: int = 0,
    pool_size: int | None = None,
    tie_break: TieBreak = "load",
    avoid_4cycles: bool = True,
    workers: int = 1,
) -> CssCode:
    """Full pipeline: pool generation, greedy selection, validation.

    The defaults (a pool of ``POOL_MULTIPLIER * M_x`` candidates, load-aware
    tie-breaking, no two checks sharing two variables) keep the degree
    distribution narrow and remove the weight-2 trapping patterns that
    dominate BP failures near the operating point. ``tie_break="uniform"``,
    ``avoid_4cycles=False`` and ``pool_size=4 * M_x`` give the plain greedy.
    """
    # a default-sized pool may stop short on small fields with few codewords
    partial_ok = pool_size is None
    if pool_size is None:
        pool_size = POOL_MULTIPLIER * M_x
    stats = PoolStats()
    pool = build_pool(code, pool_size, seed, workers=workers, stats=stats, partial_ok=partial_ok)
    log: list[SelectionStep] = []
    checks = select_checks(
        pool, M_x, _seed_rng(seed, SELECT_STREAM), code.N,
        tie_break=tie_break, avoid_4cycles=avoid_4cycles, log=log,
    )
    css = CssCode(
        code,
        tuple(checks),
        seed=seed,
        pool_size=len(pool),
        metadata={"pool_stats": stats, "selection_log": log, "pool": pool},
    )
    ok, bad = verify_commutativity(css)
    if not ok:
        raise AssertionError(f"generated x-checks fail commutativity: {bad[:5]}")
    return css


def build_random_ldpc(
    N: int,
    M_x: int,
    degree: int,
    *,
    seed: int = 0,
    pool_size: int | None = None,
    tie_break: TieBreak = "load",
    avoid_4cycles: bool = True,
) -> list[XCheck]:
    """Random baseline with the same block length, check count and check degree.

    Checks are unconstrained random subsets, balanced by the same greedy
    selection as the BCH-completed checks.
    """
    if pool_size is None:
        pool_size = POOL_MULTIPLIER * M_x
    pool = random_pool(N, degree, pool_size, seed)
    rng = _seed_rng(seed, SELECT_STREAM, RANDOM_POOL_STREAM)
    return select_checks(pool, M_x, rng, N, tie_break=tie_break, avoid_4cycles=avoid_4cycles)
