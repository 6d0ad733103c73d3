"""Linear optics on `CoherentSuperposition`s: the entangled coherent source, the 50/50 beam
splitter, photon counting on one mode, and classification of the two-detector count pattern.
"""

# Core dependencies
# The `__future__` import must be listed first. Otherwise, a `SyntaxError` is emitted.
from __future__ import annotations
from enum import Enum, auto, verify, UNIQUE
import logging
from typing import NamedTuple

# Package dependencies
import numpy as np

# Project dependencies
from cat_teleport.errors import BadMode, DegenerateAlpha, InvalidParameter
from cat_teleport.fock_core import (
    DEGENERATE_ALPHA,
    ZERO_NORM_SQUARED,
    CoherentSuperposition,
    RealArray,
    coherent_fock_amplitudes,
    state_nmax,
)


logger = logging.getLogger(__name__)

SQRT2 = np.sqrt(2.0)


@verify(UNIQUE)
class OutcomeTag(Enum):
    """Which detector saw what. The values are the outcome indices i of P_1..P_5."""

    ZERO_ODD = 1
    ODD_ZERO = 2
    ZERO_EVEN = 3
    EVEN_ZERO = 4
    BOTH_ZERO = 5
    IMPOSSIBLE = auto()


RESOLVED_TAGS = (
    OutcomeTag.ZERO_ODD,
    OutcomeTag.ODD_ZERO,
    OutcomeTag.ZERO_EVEN,
    OutcomeTag.EVEN_ZERO,
    OutcomeTag.BOTH_ZERO,
)


class BellOutcome(NamedTuple):
    """A photon-count pair (n_E, n_F) together with its classification"""

    tag: OutcomeTag
    n_e: int
    n_f: int


class Projection(NamedTuple):
    """Result of projecting one mode onto a photon number. `conditional` is the normalized
    state of the remaining modes, or `None` when the probability is numerically zero.
    """

    probability: float
    conditional: CoherentSuperposition | None


def entangled_source(alpha: complex) -> CoherentSuperposition:
    """N(|α⟩_A|−α⟩_B − |−α⟩_A|α⟩_B) with N = 1/√(2(1−e^{−4|α|²})); mode 0 is A, mode 1 is B"""
    if abs(alpha) < DEGENERATE_ALPHA:
        raise DegenerateAlpha(f"|α| = {abs(alpha):.3e} makes the entangled source singular")
    normalization = 1.0 / np.sqrt(-2.0 * np.expm1(-4.0 * abs(alpha) ** 2))
    return CoherentSuperposition.from_terms(
        [(normalization, [alpha, -alpha]), (-normalization, [-alpha, alpha])]
    )


def beam_splitter(
    state: CoherentSuperposition, mode_a: int, mode_b: int
) -> CoherentSuperposition:
    """50/50 beam splitter: (α_a, α_b) → ((α_a+α_b)/√2, (α_b−α_a)/√2) in every term.

    The `mode_a` slot receives the sum port. With A on `mode_a` and C on `mode_b` this port is E,
    which is vacuum whenever A and C carry opposite amplitudes. Applying the splitter twice maps
    (α_a, α_b) → (α_b, −α_a).
    """
    state.check_mode(mode_a)
    state.check_mode(mode_b)
    if mode_a == mode_b:
        raise BadMode(f"beam splitter needs two distinct modes, got {mode_a} twice")
    amplitudes = np.array(state.amplitudes)
    first = state.amplitudes[:, mode_a]
    second = state.amplitudes[:, mode_b]
    amplitudes[:, mode_a] = (first + second) / SQRT2
    amplitudes[:, mode_b] = (second - first) / SQRT2
    return CoherentSuperposition(state.coeffs, amplitudes)


def _remove_mode(state: CoherentSuperposition, mode: int) -> np.ndarray:
    return np.delete(state.amplitudes, mode, axis=1)


def project_photon_number(state: CoherentSuperposition, mode: int, n: int) -> Projection:
    """⟨n|_mode applied to `state`: each term's coefficient picks up ⟨n|α_mode⟩ and the mode is
    removed. Returns the probability ‖⟨n|ψ⟩‖² and the normalized remaining state.
    """
    state.check_mode(mode)
    if n < 0:
        raise InvalidParameter(f"photon number must be >= 0, got {n}")
    weights = coherent_fock_amplitudes(state.amplitudes[:, mode], n)[:, n]
    # Terms that coincide once the mode is removed are merged so exact cancellations stay exact
    unnormalized = CoherentSuperposition(
        state.coeffs * weights, _remove_mode(state, mode)
    ).canonical(drop_tol=0.0)
    probability = unnormalized.norm_squared()
    if probability < ZERO_NORM_SQUARED:
        return Projection(probability, None)
    return Projection(probability, unnormalized.scaled(1.0 / np.sqrt(probability)))


def classify_outcome(n_e: int, n_f: int) -> BellOutcome:
    """Map a count pair to its outcome class"""
    if n_e < 0 or n_f < 0:
        raise InvalidParameter(f"photon counts must be >= 0, got ({n_e}, {n_f})")
    match (n_e, n_f):
        case (0, 0):
            tag = OutcomeTag.BOTH_ZERO
        case (0, count) if count % 2 == 1:
            tag = OutcomeTag.ZERO_ODD
        case (0, _):
            tag = OutcomeTag.ZERO_EVEN
        case (count, 0) if count % 2 == 1:
            tag = OutcomeTag.ODD_ZERO
        case (_, 0):
            tag = OutcomeTag.EVEN_ZERO
        case _:
            tag = OutcomeTag.IMPOSSIBLE
    return BellOutcome(tag, n_e, n_f)


def count_distribution(
    state: CoherentSuperposition, mode_e: int, mode_f: int, n_max: int | None = None
) -> RealArray:
    """Joint probabilities P(n_E, n_F) for n_E, n_F = 0..n_max, the remaining modes traced out.
    Entry [n, m] is ‖(⟨n|_E ⊗ ⟨m|_F)|ψ⟩‖². `n_max` defaults to `state_nmax` over both modes.
    """
    state.check_mode(mode_e)
    state.check_mode(mode_f)
    if mode_e == mode_f:
        raise BadMode(f"count distribution needs two distinct modes, got {mode_e} twice")
    if n_max is None:
        n_max = state_nmax(state, [mode_e, mode_f])
    amps_e = coherent_fock_amplitudes(state.amplitudes[:, mode_e], n_max)
    amps_f = coherent_fock_amplitudes(state.amplitudes[:, mode_f], n_max)
    weighted = state.coeffs[:, None, None] * amps_e[:, :, None] * amps_f[:, None, :]
    rest = CoherentSuperposition(
        np.ones(state.n_terms), np.delete(state.amplitudes, [mode_e, mode_f], axis=1)
    )
    gram = rest.gram()
    joint = np.einsum("jnm,jk,knm->nm", np.conj(weighted), gram, weighted)
    logger.debug(f"count distribution: {state.n_terms} terms, n_max={n_max}")
    return np.clip(np.real(joint), 0.0, None)
