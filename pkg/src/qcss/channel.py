"""Asymmetric independent-flip channel: analytic z-channel error and Monte Carlo block errors.

Randomness is counter based: trial ``i`` of a run draws from a generator
seeded with ``(seed, stream, i)``. Trials are grouped into fixed chunks, so
counts do not depend on the number of worker processes.
"""

from __future__ import annotations

import math
import time
from collections.abc import Callable, Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Literal

import numpy as np
from scipy import stats

from .bch import BchCode, DecodeFailure, berlekamp_decode, syndromes
from .bp import BpConfig, TannerGraph, bp_decode_batch
from .css import SELECT_STREAM, CssCode, TieBreak, XCheck, _seed_rng, select_checks
from .gf2 import row_to_int

__all__ = [
    "BudgetExhausted",
    "CalibrationProbe",
    "CalibrationResult",
    "NoiseParams",
    "SimReport",
    "analytic_perr_z",
    "calibrate_Mx",
    "poisson_perr_z",
    "run_trials_joint",
    "run_trials_x",
    "run_trials_z",
    "sample_flips",
    "solve_pz_for_target",
    "uncorrected_block_error",
    "wilson_interval",
]

Z_STREAM = 3
X_STREAM = 4
CHUNK = 256
# calibration probes re-test their interval every PROBE_BATCH trials, independent of workers
PROBE_BATCH = 8 * CHUNK

Metric = Literal["strict", "degenerate"]


class BudgetExhausted(RuntimeError):
    pass


@dataclass(frozen=True)
class NoiseParams:
    p_z: float
    p_x: float

    def __post_init__(self):
        for name in ("p_z", "p_x"):
            v = getattr(self, name)
            if not 0 <= v < 0.5:
                raise ValueError(f"{name} must lie in [0, 1/2), got {v}")


def sample_flips(N: int, p: float, rng: np.random.Generator) -> np.ndarray:
    """N independent Bernoulli(p) bits."""
    if not 0 <= p <= 1:
        raise ValueError("p must lie in [0, 1]")
    return (rng.random(N) < p).astype(np.uint8)


def analytic_perr_z(N: int, t: int, p_z: float) -> float:
    """Probability that more than t of N independent flips occur."""
    if p_z <= 0 or t >= N:
        return 0.0
    return float(stats.binom.sf(t, N, p_z))


def poisson_perr_z(N: int, t: int, p_z: float) -> float:
    """Small-p approximation 1 - exp(-N p) sum_{j<=t} (N p)^j / j!."""
    if p_z <= 0:
        return 0.0
    return float(stats.poisson.sf(t, N * p_z))


def solve_pz_for_target(N: int, t: int, P_block: float, rtol: float = 1e-6) -> float:
    """The p_z at which the z-channel block error equals ``P_block`` (bisection in log p)."""
    if not 0 < P_block < 1:
        raise ValueError("P_block must lie in (0, 1)")
    lo, hi = 1e-15, 0.5
    if analytic_perr_z(N, t, hi) < P_block:
        return hi
    while hi - lo > rtol * lo:
        mid = math.sqrt(lo * hi)
        if analytic_perr_z(N, t, mid) < P_block:
            lo = mid
        else:
            hi = mid
    return math.sqrt(lo * hi)


def uncorrected_block_error(N: int, p: float) -> float:
    return -math.expm1(N * math.log1p(-p)) if p < 1 else 1.0


def wilson_interval(errors: int, trials: int, confidence: float = 0.95) -> tuple[float, float]:
    if trials <= 0:
        return 0.0, 1.0
    z = stats.norm.ppf(0.5 + confidence / 2)
    phat = errors / trials
    denom = 1 + z * z / trials
    centre = (phat + z * z / (2 * trials)) / denom
    half = z * math.sqrt(phat * (1 - phat) / trials + z * z / (4 * trials * trials)) / denom
    lo = 0.0 if errors == 0 else max(0.0, centre - half)
    hi = 1.0 if errors == trials else min(1.0, centre + half)
    return lo, hi


@dataclass
class SimReport:
    trials: int
    block_errors: int
    ci_low: float
    ci_high: float
    wall_time: float
    config: dict = field(default_factory=dict)
    nonconverged: int = 0
    mean_iterations: float = 0.0

    @property
    def estimate(self) -> float:
        return self.block_errors / self.trials if self.trials else 0.0

    @classmethod
    def from_counts(cls, trials: int, errors: int, wall_time: float, config: dict, **extra) -> SimReport:
        lo, hi = wilson_interval(errors, trials)
        return cls(trials, errors, lo, hi, wall_time, dict(config), **extra)


def _trial_rng(seed: int, stream: int, trial: int) -> np.random.Generator:
    return np.random.default_rng([seed, stream, trial])


def _chunks(trials: int, start: int = 0) -> list[tuple[int, int]]:
    return [(a, min(a + CHUNK, trials)) for a in range(start, trials, CHUNK)]


def _map_chunks(fn: Callable, chunks: Sequence[tuple[int, int]], workers: int) -> list:
    if workers <= 1 or len(chunks) <= 1:
        return [fn(c) for c in chunks]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, chunks))


# -- z channel ---------------------------------------------------------------


class _ZChunk:
    def __init__(self, code: BchCode, p_z: float, seed: int):
        self.code, self.p_z, self.seed = code, p_z, seed

    def __call__(self, bounds: tuple[int, int]) -> np.ndarray:
        code, t = self.code, self.code.t
        lo, hi = bounds
        errors = np.zeros(hi - lo, dtype=bool)
        for k, i in enumerate(range(lo, hi)):
            flips = sample_flips(code.N, self.p_z, _trial_rng(self.seed, Z_STREAM, i))
            support = tuple(np.flatnonzero(flips).tolist())
            if not support:
                continue
            if len(support) > t:
                # any decoder output has weight <= t, so it cannot equal the true support
                errors[k] = True
                continue
            try:
                errors[k] = berlekamp_decode(code, syndromes(code, support)) != support
            except DecodeFailure:
                errors[k] = True
        return errors


def z_trial_errors(code: BchCode, p_z: float, trials: int, seed: int = 0, workers: int = 1) -> np.ndarray:
    """Per-trial z-channel block-error flags."""
    parts = _map_chunks(_ZChunk(code, p_z, seed), _chunks(trials), workers)
    return np.concatenate(parts) if parts else np.zeros(0, dtype=bool)


def run_trials_z(code: BchCode, p_z: float, trials: int, seed: int = 0, workers: int = 1) -> SimReport:
    if trials < 1:
        raise ValueError("trials must be >= 1")
    t0 = time.perf_counter()
    errs = z_trial_errors(code, p_z, trials, seed, workers)
    config = {"channel": "z", "m": code.m, "t": code.t, "p_z": p_z, "seed": seed}
    return SimReport.from_counts(trials, int(errs.sum()), time.perf_counter() - t0, config)


# -- x channel ---------------------------------------------------------------


@dataclass
class XOutcome:
    strict: np.ndarray
    degenerate: np.ndarray
    converged: np.ndarray
    iterations: np.ndarray


class _XChunk:
    def __init__(self, N, checks, p_x, seed, bp: BpConfig | None, stabilizers, degenerate):
        self.N, self.checks, self.p_x, self.seed = N, checks, p_x, seed
        self.bp = bp
        self.stabilizers = stabilizers
        self.degenerate = degenerate
        self._graph: TannerGraph | None = None

    def __getstate__(self):
        state = dict(self.__dict__)
        state["_graph"] = None
        return state

    @property
    def graph(self) -> TannerGraph:
        if self._graph is None:
            self._graph = TannerGraph(self.N, self.checks)
        return self._graph

    def __call__(self, bounds: tuple[int, int]) -> XOutcome:
        lo, hi = bounds
        n = hi - lo
        flips = np.empty((n, self.N), dtype=np.uint8)
        for k, i in enumerate(range(lo, hi)):
            flips[k] = sample_flips(self.N, self.p_x, _trial_rng(self.seed, X_STREAM, i))
        if self.p_x == 0 or self.bp is None:
            zeros = np.zeros(n, dtype=bool)
            return XOutcome(zeros, zeros.copy(), np.ones(n, dtype=bool), np.ones(n, dtype=np.int64))
        graph = self.graph
        synd = graph.syndrome_batch(flips)
        res = bp_decode_batch(graph, synd, self.bp)
        mismatch = (res.estimates != flips).any(axis=1)
        strict = mismatch | ~res.converged
        degenerate = strict.copy()
        if self.degenerate:
            for k in np.flatnonzero(mismatch & res.converged):
                if self.stabilizers.contains(row_to_int(res.estimates[k] ^ flips[k])):
                    degenerate[k] = False
        return XOutcome(strict, degenerate, res.converged, res.iterations)


def _bp_config(p_x: float, config: BpConfig | None) -> BpConfig | None:
    if p_x == 0:
        return None
    if config is None:
        return BpConfig(p=p_x)
    return config


def x_trial_outcomes(
    css: CssCode,
    p_x: float,
    trials: int,
    *,
    seed: int = 0,
    config: BpConfig | None = None,
    workers: int = 1,
    checks: Sequence[XCheck] | None = None,
    degenerate: bool = True,
    start: int = 0,
) -> XOutcome:
    """Per-trial x-channel outcomes for trials ``start .. trials-1``."""
    checks = css.x_checks if checks is None else tuple(checks)
    fn = _XChunk(css.N, checks, p_x, seed, _bp_config(p_x, config), css.bch.row_space, degenerate)
    parts = _map_chunks(fn, _chunks(trials, start), workers)
    if not parts:
        e = np.zeros(0, dtype=bool)
        return XOutcome(e, e, e, np.zeros(0, dtype=np.int64))
    return XOutcome(
        np.concatenate([p.strict for p in parts]),
        np.concatenate([p.degenerate for p in parts]),
        np.concatenate([p.converged for p in parts]),
        np.concatenate([p.iterations for p in parts]),
    )


def run_trials_x(
    css: CssCode,
    p_x: float,
    trials: int,
    metric: Metric = "strict",
    config: BpConfig | None = None,
    seed: int = 0,
    *,
    workers: int = 1,
    checks: Sequence[XCheck] | None = None,
) -> SimReport:
    """Monte Carlo block error of BP decoding on the x-checks.

    ``strict`` demands the exact error back; ``degenerate`` also accepts a
    residual that is a product of z-stabilizers (a row-space element of H^z).
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if metric not in ("strict", "degenerate"):
        raise ValueError(f"unknown metric {metric!r}")
    t0 = time.perf_counter()
    out = x_trial_outcomes(
        css, p_x, trials, seed=seed, config=config, workers=workers, checks=checks,
        degenerate=metric == "degenerate",
    )
    errs = out.strict if metric == "strict" else out.degenerate
    cfg = {
        "channel": "x", "m": css.bch.m, "t": css.bch.t, "M_x": len(checks) if checks else css.M_x,
        "p_x": p_x, "seed": seed, "metric": metric,
    }
    return SimReport.from_counts(
        trials, int(errs.sum()), time.perf_counter() - t0, cfg,
        nonconverged=int((~out.converged).sum()),
        mean_iterations=float(out.iterations.mean()),
    )


def run_trials_joint(
    css: CssCode,
    noise: NoiseParams,
    trials: int,
    metric: Metric = "strict",
    config: BpConfig | None = None,
    seed: int = 0,
    *,
    workers: int = 1,
) -> dict[str, SimReport]:
    """Both channels on the same trial indices; a block fails if either channel fails."""
    t0 = time.perf_counter()
    z = z_trial_errors(css.bch, noise.p_z, trials, seed, workers)
    x = x_trial_outcomes(css, noise.p_x, trials, seed=seed, config=config, workers=workers,
                         degenerate=metric == "degenerate")
    x_err = x.strict if metric == "strict" else x.degenerate
    wall = time.perf_counter() - t0
    base = {"m": css.bch.m, "t": css.bch.t, "M_x": css.M_x, "p_z": noise.p_z,
            "p_x": noise.p_x, "seed": seed, "metric": metric}
    return {
        "z": SimReport.from_counts(trials, int(z.sum()), wall, {**base, "channel": "z"}),
        "x": SimReport.from_counts(trials, int(x_err.sum()), wall, {**base, "channel": "x"}),
        "joint": SimReport.from_counts(trials, int((z | x_err).sum()), wall, {**base, "channel": "joint"}),
    }


# -- calibration -------------------------------------------------------------


@dataclass(frozen=True)
class CalibrationProbe:
    M_x: int
    trials: int
    block_errors: int
    ci_low: float
    ci_high: float
    verdict: Literal["pass", "fail"]


@dataclass
class CalibrationResult:
    M_x: int
    checks: list[XCheck]
    probes: list[CalibrationProbe]


def _probe(
    css: CssCode, checks, p_x, P_block, trial_budget, seed, metric, config, workers, unresolved
) -> CalibrationProbe:
    errors = 0
    done = 0
    batch = PROBE_BATCH
    while done < trial_budget:
        upto = min(done + batch, trial_budget)
        out = x_trial_outcomes(
            css, p_x, upto, seed=seed, config=config, workers=workers, checks=checks,
            degenerate=metric == "degenerate", start=done,
        )
        errors += int((out.strict if metric == "strict" else out.degenerate).sum())
        done = upto
        lo, hi = wilson_interval(errors, done)
        if hi < P_block:
            return CalibrationProbe(len(checks), done, errors, lo, hi, "pass")
        if lo > P_block:
            return CalibrationProbe(len(checks), done, errors, lo, hi, "fail")
    lo, hi = wilson_interval(errors, done)
    if unresolved == "fail":
        return CalibrationProbe(len(checks), done, errors, lo, hi, "fail")
    raise BudgetExhausted(
        f"M_x={len(checks)}: {errors}/{done} errors, CI [{lo:.3g}, {hi:.3g}] "
        f"does not separate from {P_block:g}"
    )


def calibrate_Mx(
    bch: BchCode,
    pool: Sequence[XCheck],
    p_x: float,
    P_block: float,
    trial_budget: int,
    seed: int = 0,
    *,
    step: int = 1,
    min_Mx: int | None = None,
    max_Mx: int | None = None,
    metric: Metric = "strict",
    config: BpConfig | None = None,
    workers: int = 1,
    unresolved: Literal["raise", "fail"] = "raise",
    tie_break: TieBreak = "load",
    avoid_4cycles: bool = True,
) -> CalibrationResult:
    """Smallest M_x on the grid ``min_Mx + k*step`` whose block error is below ``P_block``.

    One greedy selection of ``max_Mx`` checks is made up front; a probe at M_x
    uses its first M_x checks, which is exactly what a fresh selection of
    M_x checks with the same seed would return. Each probe stops as soon as
    the Wilson interval lies entirely on one side of ``P_block``.
    """
    if max_Mx is None:
        max_Mx = min(len(pool), bch.N - bch.M_z)
    if min_Mx is None:
        min_Mx = step
    if not 0 < min_Mx <= max_Mx:
        raise ValueError("need 0 < min_Mx <= max_Mx")
    order = select_checks(
        pool, max_Mx, _seed_rng(seed, SELECT_STREAM), bch.N,
        tie_break=tie_break, avoid_4cycles=avoid_4cycles,
    )
    css = CssCode(bch, tuple(order), seed=seed)
    probes: list[CalibrationProbe] = []

    def probe(M: int) -> bool:
        pr = _probe(css, order[:M], p_x, P_block, trial_budget, seed, metric, config, workers, unresolved)
        probes.append(pr)
        return pr.verdict == "pass"

    grid = list(range(min_Mx, max_Mx + 1, step))
    if probe(grid[0]):
        return CalibrationResult(grid[0], order[: grid[0]], probes)
    if not probe(grid[-1]):
        raise BudgetExhausted(f"even M_x={grid[-1]} does not reach block error {P_block:g}")
    lo, hi = 0, len(grid) - 1  # grid[lo] fails, grid[hi] passes
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if probe(grid[mid]):
            hi = mid
        else:
            lo = mid
    return CalibrationResult(grid[hi], order[: grid[hi]], probes)
