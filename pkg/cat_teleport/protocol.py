"""End-to-end teleportation of x|α⟩ + y|−α⟩.

The source sends A and B; Alice mixes A with the input C on a beam splitter and counts photons
at the outputs E and F; Bob corrects B according to the count class. The joint state is kept on
modes (E, F, B) in that order.
"""

# Core dependencies
# The `__future__` import must be listed first. Otherwise, a `SyntaxError` is emitted.
from __future__ import annotations
from enum import Enum, auto, verify, UNIQUE
import logging
from typing import NamedTuple

# Package dependencies
import numpy as np
import numpy.typing as npt

# Project dependencies
from cat_teleport.errors import UnknownOutcome
from cat_teleport.fock_core import (
    DEFAULT_POLICY,
    CoherentSuperposition,
    ComplexArray,
    FockVector,
    RealArray,
    TruncationPolicy,
    input_cat,
    normalized_cat_coefficients,
    parity_apply,
    state_nmax,
    to_fock,
)
from cat_teleport.jc_dynamics import (
    DEFAULT_WINDOW_FRACTION,
    AtomFieldState,
    FidelityKernel,
    HeraldedResult,
    JCParams,
    field_fidelity,
    heralded_fidelity,
    fidelity_trace,
    fixed_time,
    jc_evolve,
    search_fmax,
)
from cat_teleport.optics import (
    RESOLVED_TAGS,
    BellOutcome,
    OutcomeTag,
    Projection,
    beam_splitter,
    classify_outcome,
    count_distribution,
    entangled_source,
    project_photon_number,
)


logger = logging.getLogger(__name__)

MODE_E, MODE_F, MODE_B = 0, 1, 2


@verify(UNIQUE)
class Correction(Enum):
    NONE = auto()
    PARITY = auto()
    JC = auto()
    PARITY_THEN_JC = auto()


@verify(UNIQUE)
class Schedule(Enum):
    """How Bob picks the atom-field interaction time. BLIND uses π/(|α| g0), which needs no
    knowledge of the input; ORACLE uses the time that maximizes the fidelity for the actual input.
    """

    BLIND = auto()
    ORACLE = auto()


CORRECTIONS: dict[OutcomeTag, Correction] = {
    OutcomeTag.ZERO_ODD: Correction.NONE,
    OutcomeTag.ODD_ZERO: Correction.PARITY,
    OutcomeTag.ZERO_EVEN: Correction.JC,
    OutcomeTag.EVEN_ZERO: Correction.PARITY_THEN_JC,
    OutcomeTag.BOTH_ZERO: Correction.NONE,
}

# Bob's conditional state depends only on the class, not on the particular odd or even count
REPRESENTATIVE_COUNTS: dict[OutcomeTag, tuple[int, int]] = {
    OutcomeTag.ZERO_ODD: (0, 1),
    OutcomeTag.ODD_ZERO: (1, 0),
    OutcomeTag.ZERO_EVEN: (0, 2),
    OutcomeTag.EVEN_ZERO: (2, 0),
    OutcomeTag.BOTH_ZERO: (0, 0),
}


class OutcomeProbabilities(NamedTuple):
    """P_1..P_5 for the classes (0,odd), (odd,0), (0,even>0), (even>0,0), (0,0)"""

    p1: float
    p2: float
    p3: float
    p4: float
    p5: float

    def total(self) -> float:
        return float(sum(self))

    def of(self, tag: OutcomeTag) -> float:
        return float(self[tag.value - 1])


class SimulatedProbabilities(NamedTuple):
    probabilities: OutcomeProbabilities
    p_impossible: float
    tail: float
    n_max: int


class CorrectionResult(NamedTuple):
    """`heralded` is set only for atom-field corrections run with heralding"""

    correction: Correction
    corrected: FockVector | AtomFieldState
    fidelity: float
    t_used: float
    heralded: HeraldedResult | None = None


class OutcomeReport(NamedTuple):
    outcome: BellOutcome
    probability: float
    bob_state_pre: CoherentSuperposition | None
    correction: Correction
    fidelity: float
    t_used: float
    heralded: HeraldedResult | None = None


class OutcomeTable(NamedTuple):
    """Per-sample probabilities and fidelities, both of shape (B, 5), for a batch of inputs"""

    probabilities: RealArray
    fidelities: RealArray
    gt_used: RealArray


def build_joint_state(alpha: complex, x: complex, y: complex) -> CoherentSuperposition:
    """The state on (E, F, B) after Alice's beam splitter"""
    source = entangled_source(alpha)  # modes A, B
    joint = source.tensor(input_cat(alpha, x, y)).permuted([0, 2, 1])  # modes A, C, B
    return beam_splitter(joint, 0, 1).normalized()


def failure_probability(
    alpha: complex, x: complex | ComplexArray, y: complex | ComplexArray
) -> float | RealArray:
    """P_F = e^{−2|α|²}/(1 + e^{−2|α|²}) · |x + y|² for normalized (x, y); accepts arrays"""
    decay = np.exp(-2.0 * abs(alpha) ** 2)
    result = decay / (1.0 + decay) * np.abs(np.asarray(x) + np.asarray(y)) ** 2
    return float(result) if np.ndim(result) == 0 else result


def f5_fidelity(
    alpha: complex, x: complex | ComplexArray, y: complex | ComplexArray
) -> float | RealArray:
    """Fidelity of the uncorrected (0, 0) state, (1 − e^{−2|α|²})/2 · |x − y|²"""
    result = -np.expm1(-2.0 * abs(alpha) ** 2) / 2.0 * np.abs(np.asarray(x) - np.asarray(y)) ** 2
    return float(result) if np.ndim(result) == 0 else result


def outcome_probabilities_closed(alpha: complex, x: complex, y: complex) -> OutcomeProbabilities:
    """P_1 = P_2 = 1/4, P_5 = P_F, P_3 = P_4 = 1/4 − P_F/2"""
    x, y = normalized_cat_coefficients(alpha, x, y)
    p5 = float(failure_probability(alpha, x, y))
    return OutcomeProbabilities(0.25, 0.25, 0.25 - p5 / 2.0, 0.25 - p5 / 2.0, p5)


def outcome_probabilities_simulated(
    alpha: complex, x: complex, y: complex, policy: TruncationPolicy = DEFAULT_POLICY
) -> SimulatedProbabilities:
    """Enumerate every count pair up to the truncation of the joint state, classify and
    accumulate.
    `tail` is the probability beyond the enumerated counts.
    """
    source = build_joint_state(alpha, x, y)
    n_max = state_nmax(source, [MODE_E, MODE_F], policy)
    joint = count_distribution(source, MODE_E, MODE_F, n_max)

    totals = dict.fromkeys(OutcomeTag, 0.0)
    for n_e in range(n_max + 1):
        for n_f in range(n_max + 1):
            totals[classify_outcome(n_e, n_f).tag] += float(joint[n_e, n_f])

    probabilities = OutcomeProbabilities(*(totals[tag] for tag in RESOLVED_TAGS))
    tail = 1.0 - float(np.sum(joint))
    logger.debug(f"simulated probabilities: n_max={n_max}, tail={tail:.3e}")
    return SimulatedProbabilities(probabilities, totals[OutcomeTag.IMPOSSIBLE], tail, n_max)


def conditional_state(alpha: complex, x: complex, y: complex, n_e: int, n_f: int) -> Projection:
    """Probability of the count pair (n_E, n_F) and Bob's normalized state given it"""
    first = project_photon_number(build_joint_state(alpha, x, y), MODE_E, n_e)
    if first.conditional is None:
        return first
    second = project_photon_number(first.conditional, 0, n_f)
    return Projection(first.probability * second.probability, second.conditional)


def _correction_time(
    field: FockVector,
    target: FockVector,
    alpha: complex,
    g0: float,
    schedule: Schedule,
    window_fraction: float,
) -> float:
    t_center = fixed_time(alpha, g0)
    match schedule:
        case Schedule.BLIND:
            return t_center
        case Schedule.ORACLE:
            return search_fmax(
                lambda times: fidelity_trace(field, target, g0, times),
                t_center,
                window_fraction * t_center,
            ).t_star


def bob_correct(
    outcome: BellOutcome,
    state: CoherentSuperposition,
    alpha: complex,
    g0: float,
    target: CoherentSuperposition,
    schedule: Schedule = Schedule.BLIND,
    window_fraction: float = DEFAULT_WINDOW_FRACTION,
    policy: TruncationPolicy = DEFAULT_POLICY,
    heralded: bool = False,
) -> CorrectionResult:
    """Apply the correction for `outcome` to Bob's conditional state and score it against
    `target`, the state Alice wanted to send. The fidelity is always the unconditional one of
    the atom-traced field. With `heralded`, atom-field corrections also report the success
    probability of finding the atom in |e⟩ and the fidelity of the field given that result.
    """
    if outcome.tag is OutcomeTag.IMPOSSIBLE:
        raise UnknownOutcome(f"no correction is defined for counts ({outcome.n_e}, {outcome.n_f})")
    correction = CORRECTIONS[outcome.tag]
    n_max = max(state_nmax(state, policy=policy), state_nmax(target, policy=policy))

    match correction:
        case Correction.NONE | Correction.PARITY:
            corrected = parity_apply(state, 0) if correction is Correction.PARITY else state
            fidelity = abs(target.inner(corrected)) ** 2
            return CorrectionResult(correction, to_fock(corrected, n_max=n_max), fidelity, 0.0)
        case Correction.JC | Correction.PARITY_THEN_JC:
            prepared = parity_apply(state, 0) if correction is Correction.PARITY_THEN_JC else state
            field = to_fock(prepared, n_max=n_max).normalized()
            target_fock = to_fock(target, n_max=n_max)
            t_used = _correction_time(field, target_fock, alpha, g0, schedule, window_fraction)
            evolved = jc_evolve(field, JCParams(g0, t_used))
            fidelity = field_fidelity(evolved, target_fock)
            branch = heralded_fidelity(evolved, target_fock) if heralded else None
            return CorrectionResult(correction, evolved, fidelity, t_used, branch)
    raise UnknownOutcome(f"unhandled correction {correction}")


def teleport(
    alpha: complex,
    x: complex,
    y: complex,
    g0: float = 1.0,
    schedule: Schedule = Schedule.BLIND,
    policy: TruncationPolicy = DEFAULT_POLICY,
    heralded: bool = False,
) -> list[OutcomeReport]:
    """Run the protocol for every outcome class: probability, Bob's state before correction,
    the correction applied and the resulting fidelity. `heralded` is passed to `bob_correct`.
    """
    target = input_cat(alpha, x, y)
    simulated = outcome_probabilities_simulated(alpha, x, y, policy)
    reports = []
    for tag in RESOLVED_TAGS:
        n_e, n_f = REPRESENTATIVE_COUNTS[tag]
        outcome = classify_outcome(n_e, n_f)
        projection = conditional_state(alpha, x, y, n_e, n_f)
        if projection.conditional is None:
            # Never observed; report the class's closed-form fidelity (only (0,0) can vanish)
            fidelity = f5_fidelity(alpha, *normalized_cat_coefficients(alpha, x, y))
            reports.append(
                OutcomeReport(outcome, 0.0, None, CORRECTIONS[tag], float(fidelity), 0.0)
            )
            continue
        result = bob_correct(
            outcome,
            projection.conditional,
            alpha,
            g0,
            target,
            schedule,
            policy=policy,
            heralded=heralded,
        )
        reports.append(
            OutcomeReport(
                outcome,
                simulated.probabilities.of(tag),
                projection.conditional,
                result.correction,
                result.fidelity,
                result.t_used,
                result.heralded,
            )
        )
    return reports


def outcome_table(
    kernel: FidelityKernel,
    x: ComplexArray,
    y: ComplexArray,
    schedule: Schedule,
    window_fraction: float = DEFAULT_WINDOW_FRACTION,
) -> OutcomeTable:
    """Closed-form P_i and F_i for a batch of normalized inputs. F_3 = F_4 come from the
    number-basis kernel at the blind time or at the per-input maximum.
    """
    alpha = kernel.alpha
    p5 = np.asarray(failure_probability(alpha, x, y), dtype=float)
    f5 = np.asarray(f5_fidelity(alpha, x, y), dtype=float)
    quarter = np.full_like(p5, 0.25)
    match schedule:
        case Schedule.BLIND:
            gt = np.full_like(p5, np.pi / abs(alpha))
            f_even = kernel.fidelity_at(x, y, gt)
        case Schedule.ORACLE:
            gt, f_even = kernel.maximize(x, y, window_fraction)
    ones = np.ones_like(p5)
    return OutcomeTable(
        probabilities=np.stack([quarter, quarter, quarter - p5 / 2, quarter - p5 / 2, p5], axis=1),
        fidelities=np.stack([ones, ones, f_even, f_even, f5], axis=1),
        gt_used=gt,
    )


def table_from_simulation(
    kernel: FidelityKernel,
    x: npt.ArrayLike,
    y: npt.ArrayLike,
    schedule: Schedule,
    window_fraction: float = DEFAULT_WINDOW_FRACTION,
    policy: TruncationPolicy = DEFAULT_POLICY,
) -> OutcomeTable:
    """`outcome_table` with P_i taken from photon-count enumeration instead of closed forms"""
    table = outcome_table(kernel, np.asarray(x), np.asarray(y), schedule, window_fraction)
    simulated = np.array(
        [
            outcome_probabilities_simulated(kernel.alpha, complex(xi), complex(yi), policy)
            .probabilities
            for xi, yi in zip(np.asarray(x), np.asarray(y))
        ],
        dtype=float,
    ).reshape(-1, 5)
    return table._replace(probabilities=simulated)


__all__ = [
    "Correction",
    "CorrectionResult",
    "OutcomeProbabilities",
    "OutcomeReport",
    "OutcomeTable",
    "Schedule",
    "SimulatedProbabilities",
    "bob_correct",
    "build_joint_state",
    "conditional_state",
    "f5_fidelity",
    "failure_probability",
    "outcome_probabilities_closed",
    "outcome_probabilities_simulated",
    "outcome_table",
    "table_from_simulation",
    "teleport",
]
