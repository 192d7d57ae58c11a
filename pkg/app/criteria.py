"""
Separability decisions: partial transpose, witnesses, the nearest separable
state, and the spectral balls around the tracial state.
"""
from dataclasses import dataclass, field
from enum import Enum
from math import sqrt
from typing import Callable

import numpy as np

from app import config
from app.factorization import SubspaceEntanglement, schmidt_decompose
from app.linalg import (
    ComplexMatrix,
    as_matrix,
    dagger,
    hermitian_eig,
    hs_distance,
    hs_inner,
    is_hermitian,
    max_abs,
    partial_transpose,
    top_eigvecs,
)
from app.log import safe_log
from app.states import DensityMatrix, PureState, is_pure, tracial


class Status(str, Enum):
    ENTANGLED = "Entangled"
    SEPARABLE = "Separable"
    PPT_UNDECIDED = "PptUndecided"


# PPT is sufficient for these splits (plus any split with a trivial factor)
_PPT_SUFFICIENT = {(2, 2), (2, 3), (3, 2)}


@dataclass(frozen=True)
class Witness:
    e: ComplexMatrix

    def __post_init__(self):
        e = as_matrix(self.e)
        if not is_hermitian(e, config.current_tolerances().density):
            raise ValueError(
                f"Witness must be Hermitian (max |E - E^dagger| = {max_abs(e - dagger(e)):.3e})"
            )
        e = (e + dagger(e)) / 2
        e.setflags(write=False)
        object.__setattr__(self, "e", e)


@dataclass(frozen=True)
class PtEvidence:
    min_eig: float
    eigenvector: np.ndarray
    subsystem: int = 1


@dataclass(frozen=True)
class Verdict:
    status: Status
    evidence: Witness | PtEvidence | None = None

    def __post_init__(self):
        if self.status == Status.ENTANGLED and self.evidence is None:
            raise ValueError("An Entangled verdict needs a certificate")


@dataclass
class NearestSeparable:
    rho0: DensityMatrix
    distance: float
    iterations: int
    converged: bool
    gap: float
    history: list[float] = field(default_factory=list)


def pt_spectrum(rho: DensityMatrix, which: int = 1):
    return hermitian_eig(partial_transpose(rho.matrix, rho.dims, which))


def ppt_check(rho: DensityMatrix, tol: float | None = None) -> tuple[bool, float]:
    if tol is None:
        tol = config.current_tolerances().ppt
    min_eig = float(pt_spectrum(rho).eigenvalues[-1])
    return min_eig >= -tol, min_eig


def decide_separability(rho: DensityMatrix) -> Verdict:
    eig = pt_spectrum(rho)
    min_eig = float(eig.eigenvalues[-1])
    if min_eig < -config.current_tolerances().ppt:
        return Verdict(
            Status.ENTANGLED,
            PtEvidence(min_eig=min_eig, eigenvector=eig.eigenvectors[:, -1].copy()),
        )
    d1, d2 = rho.dims
    if (d1, d2) in _PPT_SUFFICIENT or d1 == 1 or d2 == 1:
        return Verdict(Status.SEPARABLE)
    return Verdict(Status.PPT_UNDECIDED)


def _matrix_of(rho) -> ComplexMatrix:
    return rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)


def witness_eval(rho, w: Witness) -> float:
    """Tr(rho E); a negative value certifies entanglement."""
    m = _matrix_of(rho)
    if m.shape != w.e.shape:
        raise ValueError(f"Dimension mismatch: state {m.shape} vs witness {w.e.shape}")
    # E is Hermitian, so <E, rho> = Tr(E rho)
    return float(hs_inner(w.e, m).real)


def splitted_witness(pi: DensityMatrix, d: int | None = None) -> Witness:
    """I - d pi for a projector pi onto a maximally entangled d x d vector."""
    d1, d2 = pi.dims
    if d1 != d2:
        raise ValueError(f"Maximally entangled projector needs a square split, got {d1}x{d2}")
    d = d or d1
    if d != d1:
        raise ValueError(f"d = {d} does not match the projector split {d1}x{d2}")
    if not is_pure(pi):
        raise ValueError("pi is not a rank-1 projector")
    eig = hermitian_eig(pi.matrix)
    coeffs = schmidt_decompose(PureState(eig.eigenvectors[:, 0], (d1, d2))).coefficients
    worst = float(np.max(np.abs(coeffs - 1 / sqrt(d))))
    if worst > config.current_tolerances().unit_norm:
        raise ValueError(
            f"pi is not maximally entangled: Schmidt coefficients deviate from 1/sqrt(d) by {worst:.3e}"
        )
    return Witness(np.eye(d * d, dtype=complex) - d * pi.matrix)


def splitted_state(pi: DensityMatrix, sigma: DensityMatrix, beta: float) -> DensityMatrix:
    """beta * pi + (1 - beta) * sigma."""
    if not 0.0 <= beta <= 1.0:
        raise ValueError(f"beta must lie in [0, 1], got {beta}")
    if pi.dims != sigma.dims:
        raise ValueError(f"Dimension mismatch: {pi.dims} vs {sigma.dims}")
    return DensityMatrix(beta * pi.matrix + (1 - beta) * sigma.matrix, pi.dims)


def subspace_witness(result: SubspaceEntanglement) -> tuple[Witness, float]:
    """
    Splitted-state witness I - 2 pi on the restricted 4x4 block, pi the
    projector onto K|1>, with its value on block / Tr(block).
    """
    r = 1 / sqrt(2)
    top = np.array([r, 0, 0, r], dtype=complex)
    w = Witness(np.eye(4, dtype=complex) - 2 * np.outer(top, top.conj()))
    weight = float(np.trace(result.block).real)
    if weight <= 0.0:
        raise ValueError("Restricted block carries no weight")
    return w, witness_eval(result.block / weight, w)


def product_state_oracle(
    m: ComplexMatrix,
    dims: tuple[int, int],
    rng: np.random.Generator,
    restarts: int | None = None,
    tol: float | None = None,
    max_rounds: int = 200,
) -> tuple[np.ndarray, float]:
    """
    Approximately maximize <phi (x) psi| M |phi (x) psi> over unit product vectors.

    Alternates exact top-eigenvector updates on each factor, all restarts
    advanced together as one batched eigensolve per half step.
    """
    if restarts is None:
        restarts = config.WITNESS_RESTARTS
    if tol is None:
        tol = config.current_tolerances().oracle_change
    d1, d2 = dims
    t = np.asarray(m, dtype=complex).reshape(d1, d2, d1, d2)

    psi = rng.standard_normal((restarts, d2)) + 1j * rng.standard_normal((restarts, d2))
    psi /= np.linalg.norm(psi, axis=1, keepdims=True)
    values = np.full(restarts, -np.inf)
    phi = None
    for _ in range(max_rounds):
        eff_a = np.einsum("rk,ikjl,rl->rij", psi.conj(), t, psi)
        _, phi = top_eigvecs((eff_a + np.conj(np.swapaxes(eff_a, 1, 2))) / 2)
        eff_b = np.einsum("ri,ikjl,rj->rkl", phi.conj(), t, phi)
        new_values, psi = top_eigvecs((eff_b + np.conj(np.swapaxes(eff_b, 1, 2))) / 2)
        change = float(np.max(np.abs(new_values - values)))
        values = new_values
        if change < tol:
            break

    best = int(np.argmax(values))
    vec = np.kron(phi[best], psi[best])
    return vec / np.linalg.norm(vec), float(values[best])


def _pairwise_sweep(
    atoms: np.ndarray,
    weights: np.ndarray,
    sigma: ComplexMatrix,
    target: ComplexMatrix,
    steps: int,
    tol: float,
) -> tuple[np.ndarray, np.ndarray, ComplexMatrix]:
    """Corrective pairwise steps restricted to the current active set."""
    for _ in range(steps):
        grad = sigma - target
        scores = np.real(np.einsum("ni,ij,nj->n", atoms.conj(), grad, atoms))
        toward = int(np.argmin(scores))
        live = np.flatnonzero(weights > 0)
        away = int(live[np.argmax(scores[live])])
        if scores[away] - scores[toward] < tol or toward == away:
            break
        overlap = abs(np.vdot(atoms[toward], atoms[away])) ** 2
        curvature = 2.0 - 2.0 * overlap
        if curvature <= 0.0:
            break
        alpha = min((scores[away] - scores[toward]) / curvature, weights[away])
        p_toward = np.outer(atoms[toward], atoms[toward].conj())
        p_away = np.outer(atoms[away], atoms[away].conj())
        sigma = sigma + alpha * (p_toward - p_away)
        weights[toward] += alpha
        weights[away] -= alpha
        if weights[away] <= 0.0:
            weights[away] = 0.0
    keep = weights > 0
    return atoms[keep], weights[keep], sigma


def nearest_separable(
    rho: DensityMatrix,
    max_iter: int | None = None,
    tol: float | None = None,
    rng: np.random.Generator | None = None,
    restarts: int | None = None,
    inner_steps: int = 50,
    on_log: Callable[[str], None] | None = None,
    log_every: int = 50,
) -> NearestSeparable:
    """
    Conditional-gradient search for the closest separable state in
    Hilbert-Schmidt distance.

    The iterate is kept as a convex mixture of pure product projectors, so it
    is separable by construction. `gap` is the duality gap of
    1/2 ||rho - sigma||^2; the search stops when it drops below `tol`.
    """
    if max_iter is None:
        max_iter = config.WITNESS_MAX_ITER
    if tol is None:
        tol = config.WITNESS_TOL
    if rng is None:
        rng = np.random.default_rng(config.DEFAULT_SEED)

    if decide_separability(rho).status == Status.SEPARABLE:
        safe_log(on_log, "[witness] input is separable distance=0")
        return NearestSeparable(rho0=rho, distance=0.0, iterations=0, converged=True, gap=0.0, history=[0.0])

    dims = rho.dims
    dim = rho.dim
    target = rho.matrix
    atoms = np.eye(dim, dtype=complex)
    weights = np.full(dim, 1.0 / dim)
    sigma = np.eye(dim, dtype=complex) / dim

    history: list[float] = []
    gap = np.inf
    converged = False
    iterations = 0
    for iterations in range(1, max_iter + 1):
        history.append(hs_distance(sigma, target))
        vertex, value = product_state_oracle(target - sigma, dims, rng, restarts)
        gap = float(np.real(np.trace((sigma - target) @ sigma))) + value
        if iterations % log_every == 0:
            safe_log(
                on_log,
                f"[witness] iter={iterations} distance={history[-1]:.6f} "
                f"gap={gap:.2e} active={len(weights)}",
            )
        if gap < tol:
            converged = True
            break
        overlaps = np.abs(atoms.conj() @ vertex) ** 2
        if overlaps.size == 0 or float(np.max(overlaps)) < 1.0 - 1e-12:
            atoms = np.vstack([atoms, vertex])
            weights = np.append(weights, 0.0)
        atoms, weights, sigma = _pairwise_sweep(
            atoms, weights, sigma, target, inner_steps, tol * 0.1
        )

    sigma = (sigma + dagger(sigma)) / 2
    sigma = sigma / np.trace(sigma).real
    if not converged:
        # the last sweep moved sigma; report the gap of the iterate we return
        _, value = product_state_oracle(target - sigma, dims, rng, restarts)
        gap = float(np.real(np.trace((sigma - target) @ sigma))) + value
    distance = hs_distance(sigma, target)
    safe_log(
        on_log,
        f"[witness] done iter={iterations} distance={distance:.6f} gap={gap:.2e} converged={converged}",
    )
    return NearestSeparable(
        rho0=DensityMatrix(sigma, dims),
        distance=distance,
        iterations=iterations,
        converged=converged,
        gap=float(gap),
        history=history,
    )


def optimal_witness(rho_ent: DensityMatrix, rho0: DensityMatrix) -> Witness:
    """
    E = (rho0 - rho_ent - <rho0, rho0 - rho_ent> I) / ||rho0 - rho_ent||.

    Tr(rho0 E) = 0 and Tr(rho_ent E) = -||rho0 - rho_ent||.
    """
    if rho_ent.matrix.shape != rho0.matrix.shape:
        raise ValueError(f"Dimension mismatch: {rho_ent.dims} vs {rho0.dims}")
    delta = rho0.matrix - rho_ent.matrix
    norm = hs_distance(rho0.matrix, rho_ent.matrix)
    if norm <= config.current_tolerances().density:
        raise ValueError("Zero denominator: rho0 coincides with rho_ent")
    shift = hs_inner(rho0.matrix, delta).real
    return Witness((delta - shift * np.eye(delta.shape[0])) / norm)


def kz_radius(d: int) -> float:
    if d < 2:
        raise ValueError(f"KZ radius needs D >= 2, got {d}")
    return 1.0 / sqrt(d * (d - 1))


def kz_ball_member(rho: DensityMatrix) -> bool:
    d1, d2 = rho.dims
    dist = hs_distance(rho.matrix, tracial(d1, d2).matrix)
    return dist <= kz_radius(rho.dim) + config.current_tolerances().kz_slack


def absolute_separability_value(rho: DensityMatrix) -> float:
    """rho_1 - rho_3 - 2 sqrt(rho_2 rho_4) on the descending spectrum."""
    if rho.dims != (2, 2):
        raise ValueError(f"Two-qubit test needs dims (2, 2), got {rho.dims}")
    p = np.clip(hermitian_eig(rho.matrix).eigenvalues, 0.0, None)
    return float(p[0] - p[2] - 2 * sqrt(p[1] * p[3]))


def absolutely_separable_2q(rho: DensityMatrix) -> bool:
    return absolute_separability_value(rho) <= 0.0
