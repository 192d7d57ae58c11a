"""
Teleportation of a d-level state through a maximally entangled resource.

Alice holds the input (C) and her half of the resource (A); Bob holds B. The
only thing Alice sends is a ClassicalMessage naming her Bell outcome.
"""
from dataclasses import dataclass
from enum import Enum
from math import ceil, log2, sqrt

import numpy as np

from app import config
from app.factorization import schmidt_decompose
from app.linalg import ComplexMatrix, dagger, is_unitary, max_abs
from app.states import PureState, bell_state


class AliceStage(str, Enum):
    PREPARED = "prepared"
    HOLDING_INPUT = "holding_input"
    MEASURED = "measured"


class BobStage(str, Enum):
    WAITING = "waiting"
    RECEIVED = "received"
    CORRECTED = "corrected"


@dataclass(frozen=True)
class ResourceState:
    state: PureState
    isometry_ab: ComplexMatrix

    def __post_init__(self):
        d1, d2 = self.state.dims
        if d1 != d2:
            raise ValueError(f"Resource needs a square split d x d, got {d1}x{d2}")
        coeffs = schmidt_decompose(self.state).coefficients
        worst = float(np.max(np.abs(coeffs - 1 / sqrt(d1))))
        if worst > config.current_tolerances().unit_norm:
            raise ValueError(
                "Resource is not maximally entangled: Schmidt coefficients "
                f"{np.round(coeffs, 6).tolist()} differ from 1/sqrt({d1}) by {worst:.3e}"
            )
        if not is_unitary(self.isometry_ab):
            raise ValueError("Resource isometry J_AB is not unitary")

    @property
    def d(self) -> int:
        return self.state.dims[0]


@dataclass(frozen=True)
class ClassicalMessage:
    outcome: int
    d: int = 2

    def __post_init__(self):
        if not 0 <= self.outcome < self.d * self.d:
            raise ValueError(f"Outcome {self.outcome} outside [0, {self.d * self.d})")

    @property
    def bits(self) -> int:
        return ceil(log2(self.d * self.d))

    def as_bits(self) -> str:
        return format(self.outcome, f"0{self.bits}b")


@dataclass(frozen=True)
class BellTerm:
    index: int
    conditional: PureState
    amplitude: complex


@dataclass(frozen=True)
class ProtocolTrace:
    input_state: PureState
    outcome: ClassicalMessage
    outcome_probability: float
    bob_state_before: PureState
    correction: ComplexMatrix
    bob_state_after: PureState
    fidelity: float


def shift_and_clock(d: int) -> tuple[ComplexMatrix, ComplexMatrix]:
    x = np.roll(np.eye(d, dtype=complex), 1, axis=0)
    z = np.diag(np.exp(2j * np.pi * np.arange(d) / d))
    return x, z


def bell_unitaries(d: int) -> list[ComplexMatrix]:
    """X^m Z^n for outcome index m * d + n."""
    x, z = shift_and_clock(d)
    return [
        np.linalg.matrix_power(x, m) @ np.linalg.matrix_power(z, n)
        for m in range(d)
        for n in range(d)
    ]


def generalized_bell_basis(d: int) -> ComplexMatrix:
    """
    Columns (I (x) X^m Z^n)|Omega>, |Omega> = sum_j |jj> / sqrt(d).
    For d = 2 the order is Phi+, Phi-, Psi+, Psi-.
    """
    if d < 2:
        raise ValueError(f"Bell basis needs d >= 2, got {d}")
    omega = np.eye(d, dtype=complex).reshape(-1) / sqrt(d)
    eye = np.eye(d, dtype=complex)
    return np.column_stack([np.kron(eye, u) @ omega for u in bell_unitaries(d)])


def resource_from_state(psi: PureState) -> ResourceState:
    """J_AB from the amplitude matrix: psi = sum_a |a> (x) J_AB|a> / sqrt(d)."""
    d = psi.dims[0]
    j_ab = sqrt(d) * psi.coefficient_matrix().T
    return ResourceState(state=psi, isometry_ab=j_ab)


def resource_by_name(name: str, d: int = 2) -> ResourceState:
    """A Bell label for qubits, or `omega` for the d-level |Omega>."""
    if name == "omega":
        return resource_from_state(PureState(generalized_bell_basis(d)[:, 0], (d, d)))
    return resource_from_state(bell_state(name))


def compose_isometries(j_ab: ComplexMatrix, j_ca: ComplexMatrix) -> ComplexMatrix:
    """J_CB = J_AB o J_CA: apply J_CA first."""
    j_ab = np.asarray(j_ab, dtype=complex)
    j_ca = np.asarray(j_ca, dtype=complex)
    if j_ab.shape != j_ca.shape:
        raise ValueError(f"Dimension mismatch: {j_ab.shape} vs {j_ca.shape}")
    return j_ab @ j_ca


def _as_input(psi, d: int) -> PureState:
    if isinstance(psi, PureState):
        if psi.amplitudes.shape[0] != d:
            raise ValueError(f"Input has dimension {psi.amplitudes.shape[0]}, resource needs {d}")
        return psi
    v = np.asarray(psi, dtype=complex).reshape(-1)
    if v.shape[0] != d:
        raise ValueError(f"Input has dimension {v.shape[0]}, resource needs {d}")
    return PureState(v, (d, 1))


def _split_phase(g: ComplexMatrix) -> tuple[ComplexMatrix, complex]:
    # rescale so the first nonzero entry of column 0 is real positive
    column = g[:, 0]
    lead = column[np.flatnonzero(np.abs(column) > 1e-12)[0]]
    phase = lead / abs(lead)
    return g / phase, phase


def _conditional_map(resource: ResourceState, outcome: int) -> tuple[ComplexMatrix, complex]:
    d = resource.d
    j_ca = np.conj(bell_unitaries(d)[outcome])
    g, phase = _split_phase(compose_isometries(resource.isometry_ab, j_ca))
    return g, phase / d


def decompose_over_bell(psi, resource: ResourceState) -> list[BellTerm]:
    """
    |psi>_C |resource>_AB = sum_w amplitude_w |B_w>_CA (x) |conditional_w>_B.
    """
    d = resource.d
    source = _as_input(psi, d)
    terms = []
    for w in range(d * d):
        g, amplitude = _conditional_map(resource, w)
        terms.append(
            BellTerm(index=w, conditional=PureState(g @ source.amplitudes, (d, 1)), amplitude=amplitude)
        )
    return terms


def correction_for(outcome: ClassicalMessage | int, resource: ResourceState) -> ComplexMatrix:
    d = resource.d
    if isinstance(outcome, ClassicalMessage):
        if outcome.d != d:
            raise ValueError(f"Message is for d={outcome.d}, resource has d={d}")
        outcome = outcome.outcome
    if not 0 <= int(outcome) < d * d:
        raise ValueError(f"Outcome {outcome} outside [0, {d * d})")
    g, _ = _conditional_map(resource, int(outcome))
    return dagger(g)


def bob_reduced_before_message(psi, resource: ResourceState) -> ComplexMatrix:
    """Bob's state averaged over Alice's outcomes; equals I/d."""
    reduced = np.zeros((resource.d, resource.d), dtype=complex)
    for term in decompose_over_bell(psi, resource):
        v = term.conditional.amplitudes
        reduced += abs(term.amplitude) ** 2 * np.outer(v, v.conj())
    return reduced


class Alice:
    def __init__(self, resource: ResourceState):
        self.resource = resource
        self.stage = AliceStage.PREPARED
        self._input: PureState | None = None

    @property
    def input_state(self) -> PureState | None:
        return self._input

    def _require(self, stage: AliceStage):
        if self.stage != stage:
            raise RuntimeError(f"Alice is {self.stage.value}, expected {stage.value}")

    def take_input(self, psi: PureState):
        self._require(AliceStage.PREPARED)
        self._input = _as_input(psi, self.resource.d)
        self.stage = AliceStage.HOLDING_INPUT

    def measure(
        self, outcome: int | str = "random", rng: np.random.Generator | None = None
    ) -> tuple[ClassicalMessage, float, PureState]:
        """
        Bell measurement on (C, A). Returns the message, its probability and
        the state Bob's half collapses to.
        """
        self._require(AliceStage.HOLDING_INPUT)
        d = self.resource.d
        terms = decompose_over_bell(self._input, self.resource)
        probs = np.array([abs(t.amplitude) ** 2 for t in terms])
        if outcome == "random":
            rng = rng or np.random.default_rng(config.DEFAULT_SEED)
            index = int(rng.choice(d * d, p=probs / probs.sum()))
        else:
            index = int(outcome)
        message = ClassicalMessage(index, d)
        self.stage = AliceStage.MEASURED
        return message, float(probs[index]), terms[index].conditional


class Bob:
    def __init__(self, resource: ResourceState):
        self.resource = resource
        self.stage = BobStage.WAITING
        self.state: PureState | None = None
        self._message: ClassicalMessage | None = None

    def _require(self, stage: BobStage):
        if self.stage != stage:
            raise RuntimeError(f"Bob is {self.stage.value}, expected {stage.value}")

    def collapse_to(self, state: PureState):
        self._require(BobStage.WAITING)
        self.state = state

    def receive(self, message: ClassicalMessage):
        self._require(BobStage.WAITING)
        if self.state is None:
            raise RuntimeError("Bob has no qubit to correct yet")
        self._message = message
        self.stage = BobStage.RECEIVED

    def correct(self) -> tuple[ComplexMatrix, PureState]:
        self._require(BobStage.RECEIVED)
        correction = correction_for(self._message, self.resource)
        self.state = PureState(correction @ self.state.amplitudes, self.state.dims)
        self.stage = BobStage.CORRECTED
        return correction, self.state


def run_protocol(
    psi,
    resource: ResourceState,
    outcome: int | str = "random",
    rng: np.random.Generator | None = None,
) -> ProtocolTrace:
    """One teleportation round. `outcome` forces Alice's result, or `random`."""
    alice = Alice(resource)
    bob = Bob(resource)
    alice.take_input(psi)
    message, probability, collapsed = alice.measure(outcome, rng)
    bob.collapse_to(collapsed)
    before = bob.state
    bob.receive(message)
    correction, after = bob.correct()
    source = alice.input_state
    fidelity = float(abs(np.vdot(source.amplitudes, after.amplitudes)) ** 2)
    return ProtocolTrace(
        input_state=source,
        outcome=message,
        outcome_probability=probability,
        bob_state_before=before,
        correction=correction,
        bob_state_after=after,
        fidelity=fidelity,
    )


def correction_table(resource: ResourceState) -> list[tuple[int, ComplexMatrix, complex]]:
    """(outcome, correction, amplitude) for every outcome."""
    rows = []
    for w in range(resource.d * resource.d):
        g, amplitude = _conditional_map(resource, w)
        rows.append((w, dagger(g), amplitude))
    return rows


def is_identity_up_to_phase(m: ComplexMatrix, tol: float = 1e-9) -> bool:
    m = np.asarray(m, dtype=complex)
    phase = m[0, 0] / abs(m[0, 0]) if abs(m[0, 0]) > tol else 1.0
    return max_abs(m / phase - np.eye(m.shape[0])) <= tol
