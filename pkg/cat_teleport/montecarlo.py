"""Average teleportation fidelity over the cat-state Bloch sphere, and the |α| at which it
crosses a classical baseline.

F_ave = (1/4π) ∫ sin θ dθ dφ Σ_i P_i(θ, φ) F_i(θ, φ) is estimated by plain Monte Carlo. Every
sample reads its own random stream (see `sample_batch`), and the per-sample values are reduced
with `math.fsum` in sample order, so the estimate does not depend on the batch size or on how
many workers ran.
"""

# Core dependencies
# The `__future__` import must be listed first. Otherwise, a `SyntaxError` is emitted.
from __future__ import annotations
import asyncio
from dataclasses import dataclass, field
import logging
import math
from typing import NamedTuple

# Package dependencies
import numpy as np
from scipy.optimize import bisect

# Project dependencies
from cat_teleport.async_core.pool import WorkerPool
from cat_teleport.async_workers.sample_worker import SampleWorker
from cat_teleport.errors import InvalidParameter, NoBracket
from cat_teleport.fock_core import DEFAULT_POLICY, DEGENERATE_ALPHA, TruncationPolicy
from cat_teleport.jc_dynamics import DEFAULT_WINDOW_FRACTION
from cat_teleport.protocol import Schedule
from cat_teleport.sample_batch import (
    SEED_LIMIT,
    BatchResult,
    SampleBatch,
    bloch_block,
    evaluate_batch,
    sample_bloch,
    sample_stream,
)


logger = logging.getLogger(__name__)

DEFAULT_SEED = 20240229
CLASSICAL_BASELINE = 5.0 / 6.0
CROSSOVER_INTERVAL = (0.5, 3.0)


@dataclass(frozen=True)
class McConfig:
    """Everything that determines a Monte Carlo estimate. `workers` and `batch_size` change how
    the work is split, never the result.
    """

    n_samples: int
    seed: int = DEFAULT_SEED
    schedule: Schedule = Schedule.BLIND
    alpha: complex = 3.0
    g0: float = 1.0
    window_fraction: float = DEFAULT_WINDOW_FRACTION
    simulated_probabilities: bool = False
    workers: int = 1
    batch_size: int = 4096
    policy: TruncationPolicy = field(default=DEFAULT_POLICY)

    def __post_init__(self) -> None:
        if self.n_samples < 1:
            raise InvalidParameter(f"n_samples must be >= 1, got {self.n_samples}")
        if not 0 <= self.seed < SEED_LIMIT:
            raise InvalidParameter(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if abs(self.alpha) < DEGENERATE_ALPHA:
            raise InvalidParameter(f"|α| must be >= {DEGENERATE_ALPHA}, got {abs(self.alpha)}")
        if not self.g0 > 0.0:
            raise InvalidParameter(f"g0 must be > 0, got {self.g0}")
        if not 0.0 < self.window_fraction <= 1.0:
            raise InvalidParameter(
                f"window_fraction must lie in (0, 1], got {self.window_fraction}"
            )
        if self.workers < 1 or self.batch_size < 1:
            raise InvalidParameter(
                f"workers and batch_size must be >= 1, got {self.workers}, {self.batch_size}"
            )

    def batches(self) -> list[SampleBatch]:
        return [
            SampleBatch(
                alpha=self.alpha,
                seed=self.seed,
                start=start,
                stop=min(start + self.batch_size, self.n_samples),
                schedule=self.schedule,
                window_fraction=self.window_fraction,
                simulated_probabilities=self.simulated_probabilities,
                policy=self.policy,
            )
            for start in range(0, self.n_samples, self.batch_size)
        ]


class McResult(NamedTuple):
    f_ave: float
    std_err: float
    n_samples: int
    mean_probabilities: tuple[float, ...]
    p5_mean: float
    p5_std_err: float


def _mean_and_error(values: np.ndarray) -> tuple[float, float]:
    n = values.size
    mean = math.fsum(values.tolist()) / n
    if n < 2:
        return mean, 0.0
    variance = math.fsum(((values - mean) ** 2).tolist()) / (n - 1)
    return mean, math.sqrt(variance / n)


def summarize(results: list[BatchResult]) -> McResult:
    """Combine batch results, in sample order, into the estimate and its standard error"""
    ordered = sorted(results, key=lambda result: result.start)
    values = np.concatenate([result.values for result in ordered])
    probabilities = np.concatenate([result.probabilities for result in ordered])
    f_ave, std_err = _mean_and_error(values)
    p5_mean, p5_std_err = _mean_and_error(probabilities[:, 4])
    mean_probabilities = tuple(
        math.fsum(column.tolist()) / values.size for column in probabilities.T
    )
    return McResult(f_ave, std_err, int(values.size), mean_probabilities, p5_mean, p5_std_err)


async def average_fidelity_async(cfg: McConfig) -> McResult:
    """`average_fidelity` with the batches spread over a pool of `cfg.workers` workers"""
    async with WorkerPool[SampleBatch](SampleWorker, size=cfg.workers) as pool:
        results = await pool.map(cfg.batches())
    return summarize(results)


def average_fidelity(cfg: McConfig) -> McResult:
    """Monte Carlo estimate of F_ave with its standard error, sample std / √n"""
    if cfg.workers > 1:
        result = asyncio.run(average_fidelity_async(cfg))
    else:
        result = summarize([evaluate_batch(batch) for batch in cfg.batches()])
    logger.info(
        f"F_ave(|α|={abs(cfg.alpha):.6g}, {cfg.schedule.name}) = {result.f_ave:.6f} "
        f"± {result.std_err:.2e} over {cfg.n_samples} samples"
    )
    return result


def sphere_average_failure(alpha: complex) -> float:
    """Exact sphere average of the failure probability, e^{−2|α|²}/(1 + e^{−2|α|²})²"""
    decay = math.exp(-2.0 * abs(alpha) ** 2)
    return decay / (1.0 + decay) ** 2


def crossover_search(
    g0: float = 1.0,
    target: float = CLASSICAL_BASELINE,
    tol: float = 0.01,
    n_samples: int = 100_000,
    seed: int = DEFAULT_SEED,
    schedule: Schedule = Schedule.ORACLE,
    interval: tuple[float, float] = CROSSOVER_INTERVAL,
    workers: int = 1,
    policy: TruncationPolicy = DEFAULT_POLICY,
) -> float:
    """The |α| in `interval` where F_ave crosses `target`, by bisection. Every evaluation uses
    the same seed, hence the same sampled inputs, so F_ave is a smooth function of |α| here.
    """
    if not tol > 0.0:
        raise InvalidParameter(f"tol must be > 0, got {tol}")
    memo: dict[float, float] = {}

    def excess(alpha: float) -> float:
        if alpha not in memo:
            cfg = McConfig(
                n_samples=n_samples,
                seed=seed,
                schedule=schedule,
                alpha=alpha,
                g0=g0,
                workers=workers,
                policy=policy,
            )
            memo[alpha] = average_fidelity(cfg).f_ave - target
        return memo[alpha]

    low, high = interval
    if excess(low) * excess(high) > 0.0:
        raise NoBracket(
            f"F_ave − {target:.6g} has the same sign at |α| = {low} ({excess(low):+.4g}) "
            f"and |α| = {high} ({excess(high):+.4g})"
        )
    alpha_star = float(bisect(excess, low, high, xtol=tol))
    logger.info(f"crossover at |α| = {alpha_star:.4f} after {len(memo)} evaluations")
    return alpha_star


__all__ = [
    "CLASSICAL_BASELINE",
    "McConfig",
    "McResult",
    "average_fidelity",
    "average_fidelity_async",
    "bloch_block",
    "crossover_search",
    "sample_bloch",
    "sample_stream",
    "sphere_average_failure",
]
