# Core dependencies
import math

# Package dependencies
from hypothesis import given, settings
from hypothesis.strategies import floats
import numpy as np
import pytest

# Project dependencies
from cat_teleport.errors import UnknownOutcome
from cat_teleport.fock_core import (
    cat_from_bloch,
    input_cat,
    normalized_cat_coefficients,
    parity_apply,
    to_fock,
    trace_distance,
)
from cat_teleport.jc_dynamics import FidelityKernel
from cat_teleport.optics import RESOLVED_TAGS, OutcomeTag, classify_outcome
from cat_teleport.protocol import (
    Correction,
    Schedule,
    bob_correct,
    conditional_state,
    f5_fidelity,
    failure_probability,
    outcome_probabilities_closed,
    outcome_probabilities_simulated,
    outcome_table,
    table_from_simulation,
    teleport,
)

thetas = floats(0.0, math.pi)
phis = floats(0.0, 2.0 * math.pi)


def even_cat(alpha):
    return cat_from_bloch(alpha, math.pi, 0.0)


def odd_cat(alpha):
    return cat_from_bloch(alpha, 0.0, 0.0)


def test_failure_probability_examples():
    """Verify zero for the odd cat and a negligible value for a large even cat"""
    assert failure_probability(2.0, *odd_cat(2.0)) == 0.0
    assert failure_probability(5.0, *even_cat(5.0)) < 1e-20


@pytest.mark.parametrize("alpha", [0.5, 1.0, 1.5, 2.0])
def test_failure_probability_matches_enumeration(alpha):
    """Verify the closed form against the enumerated (0, 0) probability for 50 random inputs"""
    generator = np.random.default_rng(int(alpha * 10))
    for _ in range(50):
        theta, phi = math.acos(1.0 - 2.0 * generator.random()), 2.0 * math.pi * generator.random()
        x, y = cat_from_bloch(alpha, theta, phi)
        simulated = outcome_probabilities_simulated(alpha, x, y).probabilities
        assert simulated.p5 == pytest.approx(failure_probability(alpha, x, y), abs=1e-8)


@settings(max_examples=30, deadline=None)
@given(floats(0.2, 3.0), thetas, phis, phis)
def test_failure_probability_invariances(alpha, theta, phi, phase):
    """Verify invariance under a global phase of (x, y) and, for real x and y, under α → conj(α)"""
    x, y = cat_from_bloch(alpha, theta, phi)
    rotation = complex(math.cos(phase), math.sin(phase))
    assert failure_probability(alpha, x * rotation, y * rotation) == pytest.approx(
        failure_probability(alpha, x, y), abs=1e-15
    )
    x, y = cat_from_bloch(alpha * 1j, theta, 0.0)
    assert failure_probability(alpha * 1j, x.real, y.real) == pytest.approx(
        failure_probability(-alpha * 1j, x.real, y.real)
    )


@settings(max_examples=30, deadline=None)
@given(floats(0.2, 5.0), thetas, phis)
def test_closed_probabilities_are_complete(alpha, theta, phi):
    """Verify P_1 = P_2 = 1/4, P_3 = P_4 and Σ P_i = 1"""
    probabilities = outcome_probabilities_closed(alpha, *cat_from_bloch(alpha, theta, phi))
    assert probabilities.p1 == probabilities.p2 == 0.25
    assert probabilities.p3 == probabilities.p4
    assert probabilities.total() == pytest.approx(1.0, abs=1e-15)
    assert probabilities.of(OutcomeTag.BOTH_ZERO) == probabilities.p5


def test_closed_probabilities_for_the_odd_cat():
    """Verify P_3 = P_4 = 1/4 when the failure probability vanishes"""
    probabilities = outcome_probabilities_closed(2.0, *odd_cat(2.0))
    assert probabilities == (0.25, 0.25, 0.25, 0.25, 0.0)


@pytest.mark.parametrize("alpha", [0.8, 1.5, 2.0, 3.0])
def test_simulated_probabilities_match_closed_forms(alpha):
    """Verify the enumerated class probabilities and the bookkeeping of the remainder"""
    x, y = cat_from_bloch(alpha, 1.1, 2.3)
    simulated = outcome_probabilities_simulated(alpha, x, y)
    closed = outcome_probabilities_closed(alpha, x, y)
    np.testing.assert_allclose(simulated.probabilities, closed, atol=1e-8)
    assert simulated.p_impossible < 1e-10
    assert simulated.probabilities.total() + simulated.p_impossible + simulated.tail == (
        pytest.approx(1.0, abs=1e-12)
    )
    assert abs(simulated.tail) < 1e-8


def test_simulated_probabilities_even_cat():
    """Verify P_1 ≈ P_2 ≈ 1/4 at α=2 and P_5 against the closed form at α=1"""
    simulated = outcome_probabilities_simulated(2.0, *even_cat(2.0)).probabilities
    assert simulated.p1 == pytest.approx(0.25, abs=1e-8)
    assert simulated.p2 == pytest.approx(0.25, abs=1e-8)
    x, y = even_cat(1.0)
    p5 = outcome_probabilities_simulated(1.0, x, y).probabilities.p5
    assert p5 == pytest.approx(failure_probability(1.0, x, y), abs=1e-10)


@pytest.mark.parametrize("alpha", [1.0, 2.0, 3.0])
def test_conditional_states_follow_the_count_class(alpha):
    """Verify Bob's state for every class and that it does not depend on the particular count"""
    x, y = cat_from_bloch(alpha, 1.3, 0.9)
    flipped = input_cat(alpha, x, -y)
    expected = {
        (0, 1): input_cat(alpha, x, y),
        (0, 3): input_cat(alpha, x, y),
        (1, 0): input_cat(alpha, y, x),
        (3, 0): input_cat(alpha, y, x),
        (0, 2): flipped,
        (0, 4): flipped,
        (2, 0): parity_apply(flipped, 0),
        (4, 0): parity_apply(flipped, 0),
        (0, 0): input_cat(alpha, 1.0, -1.0),
    }
    for (n_e, n_f), state in expected.items():
        projection = conditional_state(alpha, x, y, n_e, n_f)
        assert projection.probability > 0.0
        assert projection.conditional.matches(state), (n_e, n_f)


def test_conditional_state_for_an_impossible_pair():
    """Verify that counts on both detectors have no conditional state"""
    projection = conditional_state(2.0, *even_cat(2.0), 2, 2)
    assert projection.probability < 1e-20
    assert projection.conditional is None


def test_both_zero_is_impossible_for_the_odd_cat():
    """Verify that the (0, 0) amplitude cancels exactly for the odd cat"""
    projection = conditional_state(1.5, *odd_cat(1.5), 0, 0)
    assert projection.probability == 0.0
    assert projection.conditional is None


@settings(max_examples=20, deadline=None)
@given(floats(0.3, 3.0), thetas, phis)
def test_parity_outcomes_are_exact(alpha, theta, phi):
    """Verify F_1 = F_2 = 1 and that Bob ends up with the input state for odd counts"""
    x, y = cat_from_bloch(alpha, theta, phi)
    target = input_cat(alpha, x, y)
    for n_e, n_f in ((0, 1), (1, 0), (0, 5), (3, 0)):
        state = conditional_state(alpha, x, y, n_e, n_f).conditional
        result = bob_correct(classify_outcome(n_e, n_f), state, alpha, 1.0, target)
        assert result.fidelity == pytest.approx(1.0, abs=1e-10)
        assert result.t_used == 0.0
        n_max = result.corrected.amps.size - 1
        assert trace_distance(result.corrected, to_fock(target, n_max=n_max)) < 1e-8
    assert result.correction is Correction.PARITY


@pytest.mark.parametrize("alpha", [2.0, 3.0, 4.0])
def test_both_zero_fidelity_is_the_overlap(alpha):
    """Verify F_5 against the overlap of Bob's uncorrected (0, 0) state with the input"""
    x, y = cat_from_bloch(alpha, 0.7, 1.9)
    target = input_cat(alpha, x, y)
    state = conditional_state(alpha, x, y, 0, 0).conditional
    result = bob_correct(classify_outcome(0, 0), state, alpha, 1.0, target)
    assert result.correction is Correction.NONE
    assert result.fidelity == pytest.approx(abs(target.inner(state)) ** 2, abs=1e-12)
    assert result.fidelity == pytest.approx(f5_fidelity(alpha, x, y), abs=1e-10)


def test_f5_fidelity_trend():
    """Verify F_5 = 0 for the even cat, F_5 = 1 for the odd cat, and growth for |α⟩"""
    assert f5_fidelity(3.0, *even_cat(3.0)) == 0.0
    for alpha in (0.5, 2.0, 3.0, 4.0):
        assert f5_fidelity(alpha, *odd_cat(alpha)) == pytest.approx(1.0, abs=1e-12)
    values = [f5_fidelity(alpha, 1.0, 0.0) for alpha in (0.5, 1.0, 1.5)]
    assert values[0] < values[1] < values[2] < 0.5
    assert values[1] == pytest.approx(-math.expm1(-2.0) / 2.0)


@pytest.mark.parametrize("schedule", [Schedule.BLIND, Schedule.ORACLE])
def test_even_count_correction_at_large_alpha(schedule):
    """Verify that the atom-field correction brings the even cat back with high fidelity"""
    alpha = 5.0
    x, y = even_cat(alpha)
    target = input_cat(alpha, x, y)
    for n_e, n_f in ((0, 2), (2, 0)):
        state = conditional_state(alpha, x, y, n_e, n_f).conditional
        outcome = classify_outcome(n_e, n_f)
        result = bob_correct(outcome, state, alpha, 1.0, target, schedule)
        assert result.fidelity > 0.95
        assert result.t_used == pytest.approx(math.pi / alpha, rel=0.5)
    assert result.correction is Correction.PARITY_THEN_JC


@pytest.mark.parametrize("alpha", [3.0, 5.0])
def test_heralded_correction_splits_the_unconditional_fidelity(alpha):
    """Verify F = P_e·F_herald + |⟨target|g-branch⟩|² and a likely, faithful herald at large α"""
    x, y = even_cat(alpha)
    target = input_cat(alpha, x, y)
    state = conditional_state(alpha, x, y, 0, 2).conditional
    result = bob_correct(classify_outcome(0, 2), state, alpha, 1.0, target, heralded=True)
    assert bob_correct(classify_outcome(0, 2), state, alpha, 1.0, target).heralded is None
    success, heralded = result.heralded
    ground = result.corrected.g_amps
    target_fock = to_fock(target, n_max=ground.size - 1)
    ground_part = abs(np.vdot(target_fock.amps, ground)) ** 2
    assert result.fidelity == pytest.approx(success * heralded + ground_part, abs=1e-12)
    assert 0.0 < success <= 1.0
    if alpha == 5.0:
        assert success > 0.95
        assert heralded > 0.9
        assert heralded >= result.fidelity - (1.0 - success)


def test_parity_corrections_carry_no_herald():
    """Verify that corrections without an atom report no heralded result"""
    x, y = cat_from_bloch(2.0, 1.0, 0.3)
    target = input_cat(2.0, x, y)
    state = conditional_state(2.0, x, y, 1, 0).conditional
    result = bob_correct(classify_outcome(1, 0), state, 2.0, 1.0, target, heralded=True)
    assert result.correction is Correction.PARITY
    assert result.heralded is None
    reports = teleport(3.0, *even_cat(3.0), heralded=True)
    assert [report.heralded is not None for report in reports] == [False, False, True, True, False]


def test_oracle_schedule_dominates_blind():
    """Verify that the searched time scores at least as well as π/(|α| g0)"""
    alpha = 1.5
    x, y = cat_from_bloch(alpha, 2.0, 0.4)
    target = input_cat(alpha, x, y)
    state = conditional_state(alpha, x, y, 0, 2).conditional
    outcome = classify_outcome(0, 2)
    blind = bob_correct(outcome, state, alpha, 2.0, target, Schedule.BLIND)
    oracle = bob_correct(outcome, state, alpha, 2.0, target, Schedule.ORACLE)
    assert blind.t_used == pytest.approx(math.pi / (alpha * 2.0))
    assert oracle.fidelity >= blind.fidelity


def test_bob_correct_rejects_impossible_counts():
    """Verify that no correction exists for counts on both detectors"""
    x, y = even_cat(2.0)
    target = input_cat(2.0, x, y)
    with pytest.raises(UnknownOutcome):
        bob_correct(classify_outcome(1, 1), target, 2.0, 1.0, target)


@pytest.mark.parametrize("theta", [0.0, 1.0, math.pi])
def test_teleport_reports_every_class(theta):
    """Verify one report per class, complete probabilities and exact odd-count fidelities"""
    alpha = 2.0
    x, y = cat_from_bloch(alpha, theta, 0.3)
    reports = teleport(alpha, x, y)
    assert [report.outcome.tag for report in reports] == list(RESOLVED_TAGS)
    assert math.fsum(report.probability for report in reports) == pytest.approx(1.0, abs=1e-8)
    assert reports[0].fidelity == pytest.approx(1.0, abs=1e-10)
    assert reports[1].fidelity == pytest.approx(1.0, abs=1e-10)
    assert all(0.0 <= report.fidelity <= 1.0 + 1e-12 for report in reports)
    both_zero = reports[-1]
    assert both_zero.fidelity == pytest.approx(
        f5_fidelity(alpha, *normalized_cat_coefficients(alpha, x, y)), abs=1e-10
    )
    if theta == 0.0:
        assert both_zero.probability == 0.0
        assert both_zero.bob_state_pre is None


def test_outcome_table_matches_single_input_path():
    """Verify the batched table against the closed forms and the per-input teleport reports"""
    alpha = 2.0
    pairs = [cat_from_bloch(alpha, theta, phi) for theta, phi in ((0.4, 1.0), (2.5, 5.0))]
    x = np.array([pair[0] for pair in pairs])
    y = np.array([pair[1] for pair in pairs])
    kernel = FidelityKernel(alpha)
    table = outcome_table(kernel, x, y, Schedule.BLIND)
    assert table.probabilities.shape == table.fidelities.shape == (2, 5)
    np.testing.assert_allclose(table.probabilities.sum(axis=1), 1.0, atol=1e-15)
    np.testing.assert_allclose(table.gt_used, math.pi / alpha)
    for index, (xi, yi) in enumerate(pairs):
        np.testing.assert_allclose(
            table.probabilities[index], outcome_probabilities_closed(alpha, xi, yi)
        )
        reports = teleport(alpha, xi, yi)
        np.testing.assert_allclose(
            table.fidelities[index], [report.fidelity for report in reports], atol=1e-8
        )

    simulated = table_from_simulation(kernel, x, y, Schedule.BLIND)
    np.testing.assert_allclose(simulated.probabilities, table.probabilities, atol=1e-8)
    np.testing.assert_array_equal(simulated.fidelities, table.fidelities)
