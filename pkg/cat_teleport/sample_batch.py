"""One Monte Carlo batch: draw inputs uniformly over the cat-state Bloch sphere and score the
protocol on each of them.

Random numbers come from numpy's `Philox` (Philox4x64-10) counter-based generator. The key is
the run seed and sample `i` reads its own stream, which starts at counter (0, 0, 0, i). The first
two doubles of a stream give cos θ = 1 − 2u and φ = 2πv, so a sample never depends on which
batch or worker evaluated it.
"""

# Core dependencies
# The `__future__` import must be listed first. Otherwise, a `SyntaxError` is emitted.
from __future__ import annotations
from dataclasses import dataclass
from functools import lru_cache
import logging
import math
from typing import NamedTuple

# Package dependencies
import numpy as np

# Project dependencies
from cat_teleport.errors import InvalidParameter
from cat_teleport.fock_core import (
    DEFAULT_POLICY,
    RealArray,
    TruncationPolicy,
    cats_from_bloch,
)
from cat_teleport.jc_dynamics import DEFAULT_WINDOW_FRACTION, FidelityKernel
from cat_teleport.protocol import OutcomeTable, Schedule, outcome_table, table_from_simulation


logger = logging.getLogger(__name__)

SEED_LIMIT = 2**64


def sample_stream(seed: int, index: int) -> np.random.Generator:
    """The generator that owns sample `index` of the run keyed by `seed`"""
    if not 0 <= seed < SEED_LIMIT:
        raise InvalidParameter(f"seed must be a 64-bit unsigned integer, got {seed}")
    if index < 0:
        raise InvalidParameter(f"sample index must be >= 0, got {index}")
    counter = np.array([0, 0, 0, index], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=seed, counter=counter))


def sample_bloch(generator: np.random.Generator) -> tuple[float, float]:
    """(θ, φ) distributed as sin θ dθ dφ / 4π"""
    u, v = generator.random(2)
    return math.acos(1.0 - 2.0 * u), 2.0 * math.pi * v


@lru_cache(maxsize=64)
def bloch_block(seed: int, start: int, stop: int) -> tuple[RealArray, RealArray]:
    """(θ, φ) arrays for samples start..stop−1. Cached so that runs at different α reuse the
    same inputs.
    """
    angles = np.array([sample_bloch(sample_stream(seed, index)) for index in range(start, stop)])
    thetas = angles[:, 0].copy() if angles.size else np.zeros(0)
    phis = angles[:, 1].copy() if angles.size else np.zeros(0)
    thetas.flags.writeable = False
    phis.flags.writeable = False
    return thetas, phis


@lru_cache(maxsize=16)
def fidelity_kernel(alpha: complex, policy: TruncationPolicy) -> FidelityKernel:
    return FidelityKernel(alpha, policy)


@dataclass(frozen=True)
class SampleBatch:
    """Samples start..stop−1 of a run"""

    alpha: complex
    seed: int
    start: int
    stop: int
    schedule: Schedule = Schedule.BLIND
    window_fraction: float = DEFAULT_WINDOW_FRACTION
    simulated_probabilities: bool = False
    policy: TruncationPolicy = DEFAULT_POLICY

    def __post_init__(self) -> None:
        if not 0 <= self.start <= self.stop:
            raise InvalidParameter(f"bad sample range [{self.start}, {self.stop})")

    @property
    def size(self) -> int:
        return self.stop - self.start


class BatchResult(NamedTuple):
    """Per-sample Σ_i P_i F_i and the P_i themselves, in sample order"""

    start: int
    values: RealArray
    probabilities: RealArray


def weighted_fidelity(table: OutcomeTable) -> RealArray:
    """Σ_i P_i F_i for every row of `table`"""
    return np.einsum("bi,bi->b", table.probabilities, table.fidelities)


def evaluate_batch(batch: SampleBatch) -> BatchResult:
    thetas, phis = bloch_block(batch.seed, batch.start, batch.stop)
    x, y = cats_from_bloch(batch.alpha, thetas, phis)
    kernel = fidelity_kernel(batch.alpha, batch.policy)
    if batch.simulated_probabilities:
        table = table_from_simulation(
            kernel, x, y, batch.schedule, batch.window_fraction, batch.policy
        )
    else:
        table = outcome_table(kernel, x, y, batch.schedule, batch.window_fraction)
    logger.debug(f"batch [{batch.start}, {batch.stop}) at |α|={abs(batch.alpha):.6g} evaluated")
    return BatchResult(batch.start, weighted_fidelity(table), table.probabilities)
