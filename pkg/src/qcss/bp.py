"""Sum-product belief propagation for syndrome decoding, LLR domain, flooding schedule.

The decoder runs a whole batch of syndromes through the same array operations
and drops rows from the batch as they satisfy their syndrome.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

__all__ = ["BpConfig", "BpResult", "TannerGraph", "bp_decode", "bp_decode_batch", "check_syndrome"]

LLR_CLIP = 30.0
# largest |tanh product| fed to arctanh; 2*atanh(1 - 1e-15) ~ 35 > LLR_CLIP
_TANH_CLIP = 1.0 - 1e-15


class TannerGraph:
    """Bipartite check/variable graph of a parity-check matrix given by its row supports."""

    def __init__(self, n_vars: int, checks: Sequence[Sequence[int]]):
        self.n_vars = n = int(n_vars)
        self.checks = tuple(tuple(int(i) for i in c) for c in checks)
        self.n_checks = M = len(self.checks)
        degs = np.array([len(c) for c in self.checks], dtype=np.int64)
        self.n_edges = E = int(degs.sum())
        self.max_check_degree = d = int(degs.max()) if M else 0

        # edge e joins check edge_check[e] and variable edge_var[e]; edges are check-major
        self.edge_check = np.repeat(np.arange(M), degs)
        self.edge_var = np.fromiter((i for c in self.checks for i in c), dtype=np.int64, count=E)
        if E and (self.edge_var.min() < 0 or self.edge_var.max() >= n):
            raise ValueError("variable index out of range")

        # padded check view; padding points at the sentinel edge E / sentinel variable n
        self.check_edges = np.full((M, d), E, dtype=np.int64)
        self.check_vars = np.full((M, d), n, dtype=np.int64)
        offsets = np.concatenate(([0], np.cumsum(degs)))
        for a in range(M):
            k = degs[a]
            self.check_edges[a, :k] = np.arange(offsets[a], offsets[a + 1])
            self.check_vars[a, :k] = self.edge_var[offsets[a] : offsets[a + 1]]

        # check-major edge order makes the unpadded slots of check_edges exactly 0..E-1
        self.valid_slots = np.flatnonzero(self.check_edges.ravel() < E)

        # variable-by-edge incidence, for summing incoming messages per variable
        self.var_edge = sp.csr_matrix(
            (np.ones(E), (self.edge_var, np.arange(E))), shape=(n, E)
        )
        self.var_degrees = np.bincount(self.edge_var, minlength=n)

    def __reduce__(self):
        return (TannerGraph, (self.n_vars, self.checks))

    def vars_of(self, a: int) -> tuple[int, ...]:
        return self.checks[a]

    def checks_of(self, i: int) -> np.ndarray:
        return np.unique(self.edge_check[self.edge_var == i])

    def syndrome_batch(self, estimates: np.ndarray) -> np.ndarray:
        est = np.asarray(estimates, dtype=np.uint8)
        padded = np.concatenate([est, np.zeros((est.shape[0], 1), dtype=np.uint8)], axis=1)
        return np.bitwise_xor.reduce(padded[:, self.check_vars], axis=2) if self.n_checks else (
            np.zeros((est.shape[0], 0), dtype=np.uint8)
        )


def check_syndrome(graph: TannerGraph, estimate) -> np.ndarray:
    """Parity of ``estimate`` over each check support."""
    est = np.asarray(estimate, dtype=np.uint8).reshape(1, -1)
    if est.shape[1] != graph.n_vars:
        raise ValueError(f"estimate has length {est.shape[1]}, expected {graph.n_vars}")
    return graph.syndrome_batch(est)[0]


@dataclass(frozen=True)
class BpConfig:
    p: float
    max_iterations: int = 200
    damping: float = 0.0
    early_exit: bool = True

    def __post_init__(self):
        if not 0 < self.p < 0.5:
            raise ValueError(f"prior flip probability must lie in (0, 1/2), got {self.p}")
        if not 0 <= self.damping < 1:
            raise ValueError("damping must lie in [0, 1)")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")

    @property
    def prior_llr(self) -> float:
        return float(np.log((1 - self.p) / self.p))


@dataclass
class BpResult:
    estimates: np.ndarray  # (B, N) uint8
    converged: np.ndarray  # (B,) bool
    iterations: np.ndarray  # (B,) int


def _leave_one_out_product(x: np.ndarray) -> np.ndarray:
    """Product over the last axis excluding each position, without division."""
    ones = np.ones_like(x[..., :1])
    left = np.cumprod(np.concatenate([ones, x[..., :-1]], axis=-1), axis=-1)
    right = np.cumprod(np.concatenate([ones, x[..., :0:-1]], axis=-1), axis=-1)[..., ::-1]
    return left * right


def bp_decode_batch(graph: TannerGraph, syndromes: np.ndarray, config: BpConfig) -> BpResult:
    synd = np.atleast_2d(np.asarray(syndromes, dtype=np.uint8))
    B = synd.shape[0]
    if synd.shape[1] != graph.n_checks:
        raise ValueError(f"syndrome length {synd.shape[1]} != {graph.n_checks} checks")
    n, E = graph.n_vars, graph.n_edges
    estimates = np.zeros((B, n), dtype=np.uint8)
    converged = np.zeros(B, dtype=bool)
    iterations = np.full(B, config.max_iterations, dtype=np.int64)
    if B == 0:
        return BpResult(estimates, converged, iterations)
    if graph.n_checks == 0:
        converged[:] = True
        iterations[:] = 1
        return BpResult(estimates, converged, iterations)

    prior = config.prior_llr
    active = np.arange(B)
    sign = (1.0 - 2.0 * synd.astype(np.float64))[:, :, None]  # (B, M, 1)
    v2c = np.full((B, E + 1), prior)
    c2v = np.zeros((B, E))
    for it in range(1, config.max_iterations + 1):
        # check update; the sentinel edge carries +inf so tanh = 1 is neutral
        v2c[:, E] = np.inf
        t = np.tanh(0.5 * v2c)[:, graph.check_edges]  # (b, M, d)
        prod = _leave_one_out_product(t) * sign
        new = 2.0 * np.arctanh(np.clip(prod, -_TANH_CLIP, _TANH_CLIP))
        flat = new.reshape(len(active), -1)[:, graph.valid_slots]
        if config.damping:
            flat = (1.0 - config.damping) * flat + config.damping * c2v
        c2v = np.clip(flat, -LLR_CLIP, LLR_CLIP)

        # variable update
        total = prior + (graph.var_edge @ c2v.T).T  # (b, N)
        hard = (total < 0).astype(np.uint8)
        v2c = np.empty((len(active), E + 1))
        v2c[:, :E] = np.clip(total[:, graph.edge_var] - c2v, -LLR_CLIP, LLR_CLIP)

        ok = (graph.syndrome_batch(hard) == synd[active]).all(axis=1)
        last = it == config.max_iterations
        if config.early_exit:
            done = ok | last
        else:
            done = np.full(len(active), last)
        if done.any():
            idx = active[done]
            estimates[idx] = hard[done]
            converged[idx] = ok[done]
            iterations[idx] = it
            keep = ~done
            active = active[keep]
            v2c, c2v, sign = v2c[keep], c2v[keep], sign[keep]
            if active.size == 0:
                break
    return BpResult(estimates, converged, iterations)


def bp_decode(graph: TannerGraph, syndrome, config: BpConfig) -> tuple[np.ndarray, bool, int]:
    """Decode one syndrome; returns (estimate, converged, iterations)."""
    res = bp_decode_batch(graph, np.asarray(syndrome).reshape(1, -1), config)
    return res.estimates[0], bool(res.converged[0]), int(res.iterations[0])
