"""
Factorizations of a finite Hilbert space into two subsystems.

A Factorization (U, (k, l)) stands for the pair of commuting algebras
A = U (M_k (x) I_l) U^dagger and B = U (I_k (x) M_l) U^dagger. A vector psi seen
through it is U^dagger psi in the product basis of C^k (x) C^l.
"""
from dataclasses import dataclass
from math import sqrt
from typing import Callable

import numpy as np

from app import config
from app.linalg import (
    ComplexMatrix,
    algebra_span_dim,
    commutator,
    dagger,
    gram_schmidt_complete,
    hermitian_eig,
    is_unitary,
    kron,
    max_abs,
    partial_transpose,
    spin_operators,
)
from app.log import safe_log
from app.states import DensityMatrix, PureState, PureStateError


@dataclass(frozen=True)
class SchmidtForm:
    coefficients: np.ndarray
    basis_a: ComplexMatrix
    basis_b: ComplexMatrix

    def reconstruct(self) -> np.ndarray:
        return np.einsum("i,ai,bi->ab", self.coefficients, self.basis_a, self.basis_b).reshape(-1)

    @property
    def rank(self) -> int:
        tol = config.current_tolerances().unit_norm
        return int(np.sum(self.coefficients > tol))


@dataclass(frozen=True)
class Factorization:
    u: ComplexMatrix
    dims: tuple[int, int]

    def __post_init__(self):
        u = np.array(self.u, dtype=complex)
        k, l = int(self.dims[0]), int(self.dims[1])
        if u.ndim != 2 or u.shape != (k * l, k * l):
            raise ValueError(f"Unitary shape {u.shape} does not match split {k}x{l}")
        if not is_unitary(u):
            raise ValueError(
                f"Factorization matrix is not unitary "
                f"(max |U^dagger U - I| = {max_abs(dagger(u) @ u - np.eye(k * l)):.3e})"
            )
        u.setflags(write=False)
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "dims", (k, l))


@dataclass(frozen=True)
class TpsReport:
    max_commutator: float
    span_dim: int
    dim: int
    independent: bool
    complete: bool

    @property
    def ok(self) -> bool:
        return self.independent and self.complete


@dataclass(frozen=True)
class SubspaceEntanglement:
    k: ComplexMatrix
    rho_k: DensityMatrix
    entangled: bool
    eigenvalues: np.ndarray
    block: ComplexMatrix
    block_pt: ComplexMatrix
    e1: float
    e2_plus: float
    e2_minus: float

    def __iter__(self):
        # unpacks as (K, rhoK, entangled)
        return iter((self.k, self.rho_k, self.entangled))


def schmidt_decompose(psi: PureState) -> SchmidtForm:
    """
    Schmidt form from the SVD of the d1 x d2 amplitude matrix.

    psi = sum_i s_i |u_i>|v_i> with |u_i> the left singular vectors and |v_i>
    the rows of V^dagger, so the reconstruction is exact (no phase left over).
    """
    u, s, vh = np.linalg.svd(psi.coefficient_matrix(), full_matrices=False)
    return SchmidtForm(coefficients=s, basis_a=u, basis_b=vh.T)


def pure_is_factorized(psi: PureState, tol: float | None = None) -> bool:
    if tol is None:
        tol = config.current_tolerances().unit_norm
    coeffs = schmidt_decompose(psi).coefficients
    return coeffs.shape[0] < 2 or float(coeffs[1]) <= tol


def _as_vector(psi, d: int) -> np.ndarray:
    v = np.asarray(psi.amplitudes if isinstance(psi, PureState) else psi, dtype=complex)
    v = v.reshape(-1)
    if v.shape[0] != d:
        raise ValueError(f"State has {v.shape[0]} amplitudes, expected k*l = {d}")
    norm = float(np.linalg.norm(v))
    if abs(norm - 1.0) > config.current_tolerances().unit_norm:
        raise PureStateError(f"State norm is {norm:.12g}, expected 1")
    return v


def model_vector(k: int, l: int, lambdas) -> np.ndarray:
    """sum_i lambda_i |i>_A |i>_B in C^k (x) C^l."""
    lam = np.asarray(lambdas, dtype=complex).reshape(-1)
    if lam.shape[0] != min(k, l):
        raise ValueError(f"Expected {min(k, l)} coefficients, got {lam.shape[0]}")
    total = float(np.sum(np.abs(lam) ** 2))
    if abs(total - 1.0) > config.current_tolerances().unit_norm:
        raise ValueError(f"Coefficients must satisfy sum |lambda_i|^2 = 1, got {total:.12g}")
    phi = np.zeros(k * l, dtype=complex)
    for i, value in enumerate(lam):
        phi[i * l + i] = value
    return phi


def tailored_generators(
    factorization: Factorization,
) -> tuple[list[ComplexMatrix], list[ComplexMatrix]]:
    """Spin generators of both factors carried through U: U (S_j (x) I) U^dagger."""
    k, l = factorization.dims
    u = factorization.u
    eye_k = np.eye(k, dtype=complex)
    eye_l = np.eye(l, dtype=complex)
    gens_a = [u @ kron(s, eye_l) @ dagger(u) for s in spin_operators(k)]
    gens_b = [u @ kron(eye_k, s) @ dagger(u) for s in spin_operators(l)]
    return gens_a, gens_b


def tps_report(generators_a, generators_b, tol: float | None = None) -> TpsReport:
    """Check independence ([A, B] = 0) and completeness (span = M_d) numerically."""
    if tol is None:
        tol = config.current_tolerances().commutator
    gens_a = [np.asarray(g, dtype=complex) for g in generators_a]
    gens_b = [np.asarray(g, dtype=complex) for g in generators_b]
    d = gens_a[0].shape[0]
    worst = max((max_abs(commutator(a, b)) for a in gens_a for b in gens_b), default=0.0)
    span = algebra_span_dim(gens_a + gens_b)
    return TpsReport(
        max_commutator=worst,
        span_dim=span,
        dim=d,
        independent=worst <= tol,
        complete=span == d * d,
    )


def tailor(
    psi,
    k: int,
    l: int,
    lambdas,
    on_log: Callable[[str], None] | None = None,
) -> tuple[Factorization, list[ComplexMatrix], list[ComplexMatrix]]:
    """
    Build observables under which `psi` has the requested Schmidt coefficients.

    U sends the model vector sum_i lambda_i |i>|i> to psi; both orthonormal
    frames come from canonical Gram-Schmidt completion, so the output is
    deterministic for given inputs.
    """
    if k < 2 or l < 2:
        raise ValueError(f"Both factors need dimension >= 2, got {k}x{l}")
    d = k * l
    target = _as_vector(psi, d)
    phi = model_vector(k, l, lambdas)
    frame_psi = gram_schmidt_complete([target], d)
    frame_phi = gram_schmidt_complete([phi], d)
    factorization = Factorization(frame_psi @ dagger(frame_phi), (k, l))
    gens_a, gens_b = tailored_generators(factorization)
    if on_log:
        report = tps_report(gens_a, gens_b)
        safe_log(
            on_log,
            f"[tailor] d={d} k={k} l={l} span={report.span_dim} "
            f"max_commutator={report.max_commutator:.3e}",
        )
    return factorization, gens_a, gens_b


def closed_form_tailor_unitary(l1: float, l2: float) -> ComplexMatrix:
    """
    Closed-form 4x4 unitary taking l1|00> + l2|11> to |0>, for real l1, l2
    with l1^2 + l2^2 = 1.
    """
    if abs(l1 * l1 + l2 * l2 - 1.0) > config.current_tolerances().unit_norm:
        raise ValueError(f"Need l1^2 + l2^2 = 1, got {l1 * l1 + l2 * l2:.12g}")
    return np.array(
        [
            [l1, 0, 0, l2],
            [0, 1, 0, 0],
            [0, 0, 1, 0],
            [-l2, 0, 0, l1],
        ],
        dtype=complex,
    )


def schmidt_coefficients_in(psi, factorization: Factorization) -> np.ndarray:
    k, l = factorization.dims
    v = _as_vector(psi, k * l)
    seen = PureState(dagger(factorization.u) @ v, (k, l))
    return schmidt_decompose(seen).coefficients


def apply_factorization(rho: DensityMatrix, factorization: Factorization) -> DensityMatrix:
    """The state as it reads in the factorization's own product basis."""
    u = factorization.u
    if u.shape != rho.matrix.shape:
        raise ValueError(f"Dimension mismatch: state {rho.matrix.shape} vs unitary {u.shape}")
    m = dagger(u) @ rho.matrix @ u
    return DensityMatrix((m + dagger(m)) / 2, factorization.dims)


def separating_unitary(rho: DensityMatrix, dims: tuple[int, int] | None = None) -> Factorization:
    """
    Factorization in which `rho` is diagonal in the product basis.

    Eigenvector i (descending eigenvalue order) is paired with |j>|k>,
    i = j * d2 + k, so apply_factorization returns diag(spectrum).
    """
    d1, d2 = dims or rho.dims
    if d1 * d2 != rho.dim:
        raise ValueError(f"Split {d1}x{d2} does not match state dimension {rho.dim}")
    eig = hermitian_eig(rho.matrix)
    return Factorization(eig.eigenvectors, (d1, d2))


_R = 1 / sqrt(2)
# K restricted to V, in the ordered basis (|1>, |n-2>, |n>, |n-1>) read as (uu, ud, du, dd)
_K_BLOCK = np.array(
    [
        [_R, 0, 0, _R],
        [0, 1, 0, 0],
        [0, 0, 1, 0],
        [_R, 0, 0, -_R],
    ],
    dtype=complex,
)


def subspace_closed_forms(p1: float, pa: float, pb: float, pc: float) -> tuple[float, float, float]:
    """
    Eigenvalues of the partially transposed block for eigenvalues
    p1 = rho_1, pa = rho_{n-2}, pb = rho_{n-1}, pc = rho_n.
    """
    e1 = 0.5 * (p1 + pb)
    mean = 0.5 * (pa + pc)
    root = sqrt(max(0.25 * (pa + pc) ** 2 - pa * pc + 0.25 * (p1 - pb) ** 2, 0.0))
    return e1, mean + root, mean - root


def subspace_entangle(
    rho: DensityMatrix, dims: tuple[int, int] | None = None
) -> SubspaceEntanglement:
    """
    Rotate the top eigenvector of `rho` into a maximally entangled direction
    of a 4-dimensional subspace, leaving the rest of the spectrum untouched.
    """
    d1, d2 = dims or rho.dims
    if d1 != d2:
        raise ValueError(f"Subspace construction needs a square split d x d, got {d1}x{d2}")
    if d1 * d2 != rho.dim:
        raise ValueError(f"Split {d1}x{d2} does not match state dimension {rho.dim}")
    n = rho.dim
    eig = hermitian_eig(rho.matrix)
    p = eig.eigenvalues
    picked = [0, n - 3, n - 1, n - 2]
    rest = [i for i in range(n) if i not in picked]
    frame = eig.eigenvectors[:, picked + rest]

    k_frame = np.eye(n, dtype=complex)
    k_frame[:4, :4] = _K_BLOCK
    k = frame @ k_frame @ dagger(frame)

    rho_k_matrix = k @ rho.matrix @ dagger(k)
    rho_k = DensityMatrix((rho_k_matrix + dagger(rho_k_matrix)) / 2, (d1, d2))

    block = _K_BLOCK @ np.diag(p[picked]).astype(complex) @ dagger(_K_BLOCK)
    block_pt = partial_transpose(block, (2, 2), 1)
    min_eig = float(np.min(np.linalg.eigvalsh(block_pt)))
    e1, e2_plus, e2_minus = subspace_closed_forms(p[0], p[n - 3], p[n - 2], p[n - 1])

    return SubspaceEntanglement(
        k=k,
        rho_k=rho_k,
        entangled=min_eig < -config.current_tolerances().ppt,
        eigenvalues=p,
        block=block,
        block_pt=block_pt,
        e1=e1,
        e2_plus=e2_plus,
        e2_minus=e2_minus,
    )
