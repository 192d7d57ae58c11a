"""
Validated state types and the standard constructors.

Constructors validate and never renormalize; `normalize` is the explicit fix.
"""
from dataclasses import dataclass, field
from math import sqrt

import numpy as np

from app import config
from app.linalg import (
    ComplexMatrix,
    as_matrix,
    dagger,
    hermitian_eig,
    kron,
    max_abs,
    partial_trace,
    pauli,
)


BELL_LABELS = ("phi+", "phi-", "psi+", "psi-")
_BELL_ALIASES = {
    "Φ⁺": "phi+", "Φ⁻": "phi-", "Ψ⁺": "psi+", "Ψ⁻": "psi-",
    "phi_plus": "phi+", "phi_minus": "phi-", "psi_plus": "psi+", "psi_minus": "psi-",
}
WORKED_STATE_NAMES = ("rho_U", "rho_V", "rho_KU", "rho_KV", "K")


class DensityMatrixError(ValueError):
    def __init__(self, property_name: str, message: str):
        super().__init__(f"{property_name}: {message}")
        self.property_name = property_name


class PureStateError(ValueError):
    pass


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, dtype=complex)
    arr.setflags(write=False)
    return arr


def _dims(dims) -> tuple[int, int]:
    d1, d2 = (int(x) for x in dims)
    if d1 < 1 or d2 < 1:
        raise ValueError(f"Dimensions must be positive, got {dims}")
    return d1, d2


def validate_density(matrix, dims, tol: float | None = None) -> ComplexMatrix:
    if tol is None:
        tol = config.current_tolerances().density
    try:
        m = as_matrix(matrix)
    except ValueError as e:
        raise DensityMatrixError("dimension", str(e))
    d1, d2 = _dims(dims)
    if m.shape[0] != d1 * d2:
        raise DensityMatrixError(
            "dimension", f"matrix is {m.shape[0]}x{m.shape[0]} but split is {d1}x{d2}"
        )
    trace = np.trace(m)
    if abs(trace - 1.0) > tol:
        raise DensityMatrixError("trace", f"Tr(rho) = {trace.real:.12g}, expected 1")
    herm_err = max_abs(m - dagger(m))
    if herm_err > tol:
        raise DensityMatrixError("hermitian", f"max |rho - rho^dagger| = {herm_err:.3e}")
    min_eig = float(hermitian_eig((m + dagger(m)) / 2).eigenvalues[-1])
    if min_eig < -tol:
        raise DensityMatrixError(
            "positive semidefinite", f"smallest eigenvalue {min_eig:.3e} is negative"
        )
    return m


@dataclass(frozen=True)
class DensityMatrix:
    matrix: ComplexMatrix
    dims: tuple[int, int]

    def __post_init__(self):
        m = validate_density(self.matrix, self.dims)
        object.__setattr__(self, "matrix", _frozen(m))
        object.__setattr__(self, "dims", _dims(self.dims))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class PureState:
    amplitudes: np.ndarray
    dims: tuple[int, int]

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        d1, d2 = _dims(self.dims)
        if amps.shape[0] != d1 * d2:
            raise PureStateError(
                f"State has {amps.shape[0]} amplitudes but split is {d1}x{d2}"
            )
        norm = float(np.linalg.norm(amps))
        if abs(norm - 1.0) > config.current_tolerances().unit_norm:
            raise PureStateError(f"State norm is {norm:.12g}, expected 1")
        object.__setattr__(self, "amplitudes", _frozen(amps))
        object.__setattr__(self, "dims", (d1, d2))

    def coefficient_matrix(self) -> np.ndarray:
        """Amplitudes c_ab arranged as a d1 x d2 matrix."""
        return np.asarray(self.amplitudes).reshape(self.dims)


@dataclass(frozen=True)
class BlochVector:
    s: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        s = np.asarray(self.s, dtype=float).reshape(-1)
        if s.shape != (3,):
            raise ValueError(f"Bloch vector needs 3 components, got {s.shape[0]}")
        length = float(np.linalg.norm(s))
        if length > 1.0 + config.current_tolerances().density:
            raise ValueError(f"Bloch vector length {length:.12g} exceeds 1")
        s.setflags(write=False)
        object.__setattr__(self, "s", s)


def normalize(matrix, dims) -> DensityMatrix:
    m = as_matrix(matrix)
    trace = np.trace(m)
    if abs(trace) == 0.0:
        raise DensityMatrixError("trace", "cannot normalize a traceless matrix")
    return DensityMatrix(m / trace, dims)


def density_from_pure(psi: PureState) -> DensityMatrix:
    v = np.asarray(psi.amplitudes)
    return DensityMatrix(np.outer(v, v.conj()), psi.dims)


def product_density(rho_a: ComplexMatrix, rho_b: ComplexMatrix) -> DensityMatrix:
    rho_a = as_matrix(rho_a)
    rho_b = as_matrix(rho_b)
    return DensityMatrix(kron(rho_a, rho_b), (rho_a.shape[0], rho_b.shape[0]))


def reduced(rho: DensityMatrix, keep: int) -> DensityMatrix:
    m = partial_trace(rho.matrix, rho.dims, keep)
    return DensityMatrix(m, (m.shape[0], 1))


def spectrum(rho: DensityMatrix) -> np.ndarray:
    return hermitian_eig(rho.matrix).eigenvalues


def bell_state(label: str) -> PureState:
    key = _BELL_ALIASES.get(label, label).lower()
    r = 1 / sqrt(2)
    vectors = {
        "phi+": [r, 0, 0, r],
        "phi-": [r, 0, 0, -r],
        "psi+": [0, r, r, 0],
        "psi-": [0, r, -r, 0],
    }
    if key not in vectors:
        raise ValueError(f"Unknown Bell state {label!r}; use one of {', '.join(BELL_LABELS)}")
    return PureState(np.array(vectors[key], dtype=complex), (2, 2))


def bell_basis() -> ComplexMatrix:
    """Columns are Phi+, Phi-, Psi+, Psi- in that order."""
    return np.column_stack([bell_state(label).amplitudes for label in BELL_LABELS])


def tracial(d1: int, d2: int) -> DensityMatrix:
    d = d1 * d2
    return DensityMatrix(np.eye(d, dtype=complex) / d, (d1, d2))


def from_bloch(s: BlochVector) -> DensityMatrix:
    m = np.eye(2, dtype=complex)
    for component, name in zip(s.s, "xyz"):
        m = m + component * pauli(name)
    return DensityMatrix(m / 2, (2, 1))


def bloch_vector(rho: DensityMatrix) -> BlochVector:
    if rho.dim != 2:
        raise ValueError(f"Bloch form needs a single qubit, got dimension {rho.dim}")
    return BlochVector(
        np.array([np.real(np.trace(rho.matrix @ pauli(n))) for n in "xyz"])
    )


def is_pure(rho: DensityMatrix, tol: float | None = None) -> bool:
    if tol is None:
        tol = config.current_tolerances().density
    m = rho.matrix
    return float(np.linalg.norm(m @ m - m)) <= tol


def correlation_coefficients(rho: DensityMatrix) -> np.ndarray:
    """(c_x, c_y, c_z) with c_i = Tr(rho sigma_i (x) sigma_i)."""
    if rho.dims != (2, 2):
        raise ValueError(f"Correlation coefficients need a two-qubit state, got {rho.dims}")
    return np.array(
        [np.real(np.trace(rho.matrix @ kron(pauli(n), pauli(n)))) for n in "xyz"]
    )


def bell_diagonal_matrix(c) -> ComplexMatrix:
    c = np.asarray(c, dtype=float).reshape(3)
    m = np.eye(4, dtype=complex)
    for ci, name in zip(c, "xyz"):
        m = m + ci * kron(pauli(name), pauli(name))
    return m / 4


def bell_diagonal(c) -> DensityMatrix:
    return DensityMatrix(bell_diagonal_matrix(c), (2, 2))


def _k_matrix() -> ComplexMatrix:
    r2 = sqrt(2)
    return np.array(
        [
            [1, 0, 0, 1],
            [0, r2, 0, 0],
            [0, 0, r2, 0],
            [-1, 0, 0, 1],
        ],
        dtype=complex,
    ) / r2


def paper_state(name: str) -> DensityMatrix | ComplexMatrix:
    """
    Worked two-qubit matrices: rho_U, rho_V, their images under K, and K itself.
    """
    if name == "K":
        return _k_matrix()
    if name == "rho_U":
        m = np.array(
            [[1, 0, 0, 1], [0, 1, 1, 0], [0, 1, 1, 0], [1, 0, 0, 1]], dtype=complex
        ) / 4
    elif name == "rho_V":
        m = np.array(
            [[1, 0, 0, 0.5], [0, 1, 0.5, 0], [0, 0.5, 1, 0], [0.5, 0, 0, 1]], dtype=complex
        ) / 4
    elif name == "rho_KU":
        m = np.array(
            [[2, 0, 0, 0], [0, 1, 1, 0], [0, 1, 1, 0], [0, 0, 0, 0]], dtype=complex
        ) / 4
    elif name == "rho_KV":
        m = np.array(
            [[3, 0, 0, 0], [0, 2, 1, 0], [0, 1, 2, 0], [0, 0, 0, 1]], dtype=complex
        ) / 8
    else:
        raise ValueError(
            f"Unknown worked-example name {name!r}; use one of {', '.join(WORKED_STATE_NAMES)}"
        )
    return DensityMatrix(m, (2, 2))
