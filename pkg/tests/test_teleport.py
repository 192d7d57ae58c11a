import numpy as np
import pytest
from numpy.testing import assert_allclose

from app.linalg import is_unitary, pauli
from app.sampling import random_vector, spawn_rngs
from app.states import PureState, bell_basis
from app.teleport import (
    Alice,
    AliceStage,
    Bob,
    BobStage,
    ClassicalMessage,
    ResourceState,
    bob_reduced_before_message,
    compose_isometries,
    correction_for,
    correction_table,
    decompose_over_bell,
    generalized_bell_basis,
    is_identity_up_to_phase,
    resource_by_name,
    resource_from_state,
    run_protocol,
)


def _same_up_to_phase(a, b, tol=1e-9) -> bool:
    return abs(abs(np.vdot(a, b)) - 1.0) <= tol


def test_psi_minus_expansion():
    a, b = 0.6, 0.8j
    terms = decompose_over_bell(np.array([a, b]), resource_by_name("psi-"))
    assert_allclose([t.amplitude for t in terms], [0.5, 0.5, -0.5, -0.5], atol=1e-12)
    expected = [[-b, a], [b, a], [a, -b], [a, b]]
    for term, vec in zip(terms, expected):
        assert_allclose(term.conditional.amplitudes, vec, atol=1e-12)


def test_expansion_rebuilds_the_joint_state(rng):
    resource = resource_by_name("psi-")
    psi = random_vector(2, rng)
    joint = np.kron(psi, resource.state.amplitudes)
    rebuilt = np.zeros(8, dtype=complex)
    for term, bell in zip(decompose_over_bell(psi, resource), bell_basis().T):
        rebuilt += term.amplitude * np.kron(bell, term.conditional.amplitudes)
    assert_allclose(rebuilt, joint, atol=1e-12)


def test_generalized_basis_matches_bell_basis_for_qubits():
    assert_allclose(generalized_bell_basis(2), bell_basis(), atol=1e-15)
    assert is_unitary(generalized_bell_basis(3))


@pytest.mark.parametrize("label", ["phi+", "phi-", "psi+", "psi-"])
def test_every_bell_resource_teleports(label):
    resource = resource_by_name(label)
    for rng in spawn_rngs(2024, 100):
        psi = random_vector(2, rng)
        for outcome in range(4):
            trace = run_protocol(psi, resource, outcome)
            assert trace.fidelity == pytest.approx(1.0, abs=1e-9)
            assert trace.outcome_probability == pytest.approx(0.25, abs=1e-12)
        assert_allclose(bob_reduced_before_message(psi, resource), np.eye(2) / 2, atol=1e-9)


def test_qutrit_teleportation_all_outcomes(rng):
    resource = resource_by_name("omega", 3)
    psi = random_vector(3, rng)
    fidelities = [run_protocol(psi, resource, w).fidelity for w in range(9)]
    assert_allclose(fidelities, np.ones(9), atol=1e-9)
    assert_allclose(bob_reduced_before_message(psi, resource), np.eye(3) / 3, atol=1e-9)


def test_psi_minus_corrections_are_paulis():
    table = correction_table(resource_by_name("psi-"))
    expected = [pauli("y"), pauli("x"), pauli("z"), np.eye(2)]
    for (outcome, correction, _), target in zip(table, expected):
        assert is_unitary(correction)
        assert is_identity_up_to_phase(correction @ target), outcome


def test_random_outcome_follows_the_seed():
    resource = resource_by_name("psi-")
    psi = np.array([0.6, 0.8])
    first = run_protocol(psi, resource, "random", rng=np.random.default_rng(9))
    again = run_protocol(psi, resource, "random", rng=np.random.default_rng(9))
    assert first.outcome == again.outcome
    assert first.fidelity == pytest.approx(1.0, abs=1e-9)


def test_classical_message():
    message = ClassicalMessage(2, 2)
    assert message.bits == 2
    assert message.as_bits() == "10"
    assert ClassicalMessage(8, 3).as_bits() == "1000"
    with pytest.raises(ValueError, match="outside"):
        ClassicalMessage(4, 2)


def test_non_maximal_resource_is_rejected():
    psi = PureState(np.array([0.8, 0, 0, 0.6]), (2, 2))
    with pytest.raises(ValueError, match="not maximally entangled"):
        resource_from_state(psi)
    with pytest.raises(ValueError, match="square split"):
        resource_from_state(PureState(np.eye(6)[0], (2, 3)))


def test_resource_isometry_must_be_unitary():
    good = resource_by_name("phi+")
    with pytest.raises(ValueError, match="not unitary"):
        ResourceState(good.state, 2 * np.eye(2))


def test_compose_isometries():
    x, z = pauli("x"), pauli("z")
    assert_allclose(compose_isometries(x, z), x @ z)
    with pytest.raises(ValueError, match="Dimension mismatch"):
        compose_isometries(np.eye(2), np.eye(3))


def test_bad_outcome_and_input():
    resource = resource_by_name("psi-")
    with pytest.raises(ValueError, match="outside"):
        correction_for(7, resource)
    with pytest.raises(ValueError, match="dimension"):
        run_protocol(np.array([1, 0, 0]), resource, 0)
    with pytest.raises(ValueError, match="Message is for"):
        correction_for(ClassicalMessage(0, 3), resource)


def test_alice_and_bob_stage_order():
    resource = resource_by_name("psi-")
    alice = Alice(resource)
    bob = Bob(resource)
    with pytest.raises(RuntimeError, match="prepared"):
        alice.measure(0)
    with pytest.raises(RuntimeError, match="no qubit"):
        bob.receive(ClassicalMessage(0))

    alice.take_input(PureState(np.array([0.6, 0.8]), (2, 1)))
    assert alice.stage == AliceStage.HOLDING_INPUT
    message, probability, collapsed = alice.measure(3)
    assert alice.stage == AliceStage.MEASURED
    assert probability == pytest.approx(0.25)

    bob.collapse_to(collapsed)
    with pytest.raises(RuntimeError, match="waiting"):
        bob.correct()
    bob.receive(message)
    correction, after = bob.correct()
    assert bob.stage == BobStage.CORRECTED
    assert _same_up_to_phase(after.amplitudes, [0.6, 0.8])
    with pytest.raises(RuntimeError):
        bob.receive(message)
