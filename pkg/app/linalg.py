"""
Dense complex linear algebra for the small operators used across the package.

Matrices are plain numpy arrays of dtype complex128. Tensor-product indexing is
row-major: |j>_A (x) |k>_B sits at composite index j * d2 + k.
"""
from dataclasses import dataclass
from math import sqrt

import numpy as np

from app import config


ComplexMatrix = np.ndarray

PAULI = {
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
}


class ConvergenceError(RuntimeError):
    pass


@dataclass(frozen=True)
class HermitianEig:
    eigenvalues: np.ndarray
    eigenvectors: ComplexMatrix

    def reconstruct(self) -> ComplexMatrix:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def as_matrix(m) -> ComplexMatrix:
    arr = np.asarray(m, dtype=complex)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValueError(f"Expected a square matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("Matrix has non-finite entries")
    return arr


def dagger(m: ComplexMatrix) -> ComplexMatrix:
    return np.conj(m).T


def max_abs(m: ComplexMatrix) -> float:
    return float(np.max(np.abs(m))) if np.size(m) else 0.0


def is_hermitian(m: ComplexMatrix, tol: float | None = None) -> bool:
    if tol is None:
        tol = config.current_tolerances().hermitian_input
    return max_abs(m - dagger(m)) <= tol


def commutator(a: ComplexMatrix, b: ComplexMatrix) -> ComplexMatrix:
    return a @ b - b @ a


def pauli(name: str) -> ComplexMatrix:
    try:
        return PAULI[name].copy()
    except KeyError:
        raise ValueError(f"Unknown Pauli matrix {name!r}; use x, y or z")


def kron(a: ComplexMatrix, b: ComplexMatrix) -> ComplexMatrix:
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def _check_split(m: ComplexMatrix, dims: tuple[int, int]) -> tuple[int, int]:
    d1, d2 = int(dims[0]), int(dims[1])
    if d1 < 1 or d2 < 1 or m.shape != (d1 * d2, d1 * d2):
        raise ValueError(
            f"Dimension mismatch: matrix shape {m.shape} does not match split {d1}x{d2}"
        )
    return d1, d2


def partial_trace(m: ComplexMatrix, dims: tuple[int, int], keep: int) -> ComplexMatrix:
    """Trace out the subsystem that is not `keep` (0 = A, 1 = B)."""
    m = np.asarray(m, dtype=complex)
    d1, d2 = _check_split(m, dims)
    t = m.reshape(d1, d2, d1, d2)
    if keep == 0:
        return np.einsum("ijkj->ik", t)
    if keep == 1:
        return np.einsum("ijil->jl", t)
    raise ValueError(f"Subsystem index must be 0 or 1, got {keep}")


def partial_transpose(m: ComplexMatrix, dims: tuple[int, int], which: int) -> ComplexMatrix:
    m = np.asarray(m, dtype=complex)
    d1, d2 = _check_split(m, dims)
    t = m.reshape(d1, d2, d1, d2)
    if which == 0:
        t = t.transpose(2, 1, 0, 3)
    elif which == 1:
        t = t.transpose(0, 3, 2, 1)
    else:
        raise ValueError(f"Subsystem index must be 0 or 1, got {which}")
    return t.reshape(d1 * d2, d1 * d2)


def _jacobi(a: ComplexMatrix, offdiag_tol: float, max_sweeps: int) -> tuple[np.ndarray, ComplexMatrix]:
    n = a.shape[0]
    a = a.copy()
    v = np.eye(n, dtype=complex)
    for _ in range(max_sweeps):
        off = float(np.linalg.norm(a - np.diag(np.diag(a))))
        if off < offdiag_tol * max(1.0, float(np.linalg.norm(a))):
            return np.real(np.diag(a)).copy(), v
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                r = abs(apq)
                diff = a[q, q].real - a[p, p].real
                if r < 1e-300 or abs(diff) > 1e18 * r:
                    # rotation angle below rounding; drop the entry
                    a[p, q] = 0.0
                    a[q, p] = 0.0
                    continue
                phase = apq / r
                theta = diff / (2.0 * r)
                t = (1.0 if theta >= 0 else -1.0) / (abs(theta) + sqrt(theta * theta + 1.0))
                c = 1.0 / sqrt(t * t + 1.0)
                s = t * c

                col_p = a[:, p].copy()
                col_q = a[:, q]
                a[:, p] = c * col_p - s * np.conj(phase) * col_q
                a[:, q] = s * phase * col_p + c * col_q

                row_p = a[p, :].copy()
                row_q = a[q, :]
                a[p, :] = c * row_p - s * phase * row_q
                a[q, :] = s * np.conj(phase) * row_p + c * row_q
                a[p, q] = 0.0
                a[q, p] = 0.0

                vec_p = v[:, p].copy()
                vec_q = v[:, q]
                v[:, p] = c * vec_p - s * np.conj(phase) * vec_q
                v[:, q] = s * phase * vec_p + c * vec_q
    raise ConvergenceError(f"Jacobi eigensolver did not converge in {max_sweeps} sweeps")


def hermitian_eig(m: ComplexMatrix, backend: str | None = None) -> HermitianEig:
    """
    Eigendecomposition of a Hermitian matrix, eigenvalues descending.

    The default backend is a cyclic complex Jacobi sweep; `lapack` delegates to
    numpy.linalg.eigh. Within a degenerate cluster the vector order is whatever
    the solver produced; only the cluster span is meaningful.
    """
    tol = config.current_tolerances()
    m = as_matrix(m)
    if not is_hermitian(m, tol.hermitian_input):
        raise ValueError(
            f"Matrix is not Hermitian (max |m - m^dagger| = {max_abs(m - dagger(m)):.3e})"
        )
    m = (m + dagger(m)) / 2
    backend = backend or config.EIG_BACKEND
    if backend == "jacobi":
        w, v = _jacobi(m, tol.eig_offdiag, tol.eig_max_sweeps)
    elif backend == "lapack":
        w, v = np.linalg.eigh(m)
    else:
        raise ValueError(f"Unknown eigensolver backend {backend!r}")
    order = np.argsort(-w, kind="stable")
    return HermitianEig(eigenvalues=w[order], eigenvectors=v[:, order])


def eigvals_desc(m: ComplexMatrix) -> np.ndarray:
    return hermitian_eig(m).eigenvalues


def top_eigvecs(batch: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Largest eigenvalue and its eigenvector for each matrix in a Hermitian stack."""
    w, v = np.linalg.eigh(batch)
    return w[..., -1], v[..., :, -1]


def hs_inner(a: ComplexMatrix, b: ComplexMatrix) -> complex:
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape != b.shape:
        raise ValueError(f"Dimension mismatch: {a.shape} vs {b.shape}")
    return complex(np.vdot(a, b))


def hs_distance(a: ComplexMatrix, b: ComplexMatrix) -> float:
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape != b.shape:
        raise ValueError(f"Dimension mismatch: {a.shape} vs {b.shape}")
    diff = a - b
    return float(np.sqrt(max(hs_inner(diff, diff).real, 0.0)))


def purity(m: ComplexMatrix) -> float:
    m = np.asarray(m, dtype=complex)
    return float(np.real(np.trace(m @ m)))


def gram_schmidt_complete(seed_vectors, dim: int, tol: float | None = None) -> ComplexMatrix:
    """
    Orthonormal basis of C^dim whose leading columns span the same flags as the seeds.

    Completion tries canonical basis vectors in index order and drops candidates
    whose residual norm falls below `tol`. Columns of the result are the vectors.
    """
    if tol is None:
        tol = config.current_tolerances().orthonormal
    basis: list[np.ndarray] = []

    def _residual(vec: np.ndarray) -> np.ndarray:
        # two passes of modified Gram-Schmidt keep the result orthogonal to 1e-15
        for _ in range(2):
            for b in basis:
                vec = vec - np.vdot(b, vec) * b
        return vec

    for idx, seed in enumerate(seed_vectors):
        vec = np.asarray(seed, dtype=complex).reshape(-1)
        if vec.shape[0] != dim:
            raise ValueError(f"Seed {idx} has length {vec.shape[0]}, expected {dim}")
        res = _residual(vec)
        norm = np.linalg.norm(res)
        if norm < tol:
            raise ValueError(f"Seed vectors are linearly dependent (seed {idx})")
        basis.append(res / norm)

    for i in range(dim):
        if len(basis) == dim:
            break
        candidate = np.zeros(dim, dtype=complex)
        candidate[i] = 1.0
        res = _residual(candidate)
        norm = np.linalg.norm(res)
        if norm < tol:
            continue
        basis.append(res / norm)

    return np.column_stack(basis)


def is_unitary(m: ComplexMatrix, tol: float | None = None) -> bool:
    if tol is None:
        tol = config.current_tolerances().orthonormal
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        return False
    return max_abs(dagger(m) @ m - np.eye(m.shape[0])) <= tol


def _span_rows(rows: np.ndarray, tol: float) -> np.ndarray:
    _, s, vh = np.linalg.svd(rows, full_matrices=False)
    if s.size == 0 or s[0] == 0.0:
        return vh[:0]
    # rank of the HS Gram matrix rows rows^dagger, whose eigenvalues are s^2
    rank = int(np.sum(s * s > tol))
    return vh[:rank]


def algebra_span_dim(generators, tol: float | None = None) -> int:
    """Dimension of the unital associative algebra generated by `generators`."""
    if tol is None:
        tol = config.current_tolerances().span_rank
    gens = [np.asarray(g, dtype=complex) for g in generators]
    if not gens:
        return 1
    d = gens[0].shape[0]
    if any(g.shape != (d, d) for g in gens):
        raise ValueError("All generators must share one square dimension")

    seed = np.stack([np.eye(d, dtype=complex)] + gens).reshape(-1, d * d)
    basis = _span_rows(seed, tol)
    while True:
        mats = basis.reshape(-1, d, d)
        products = np.einsum("aij,bjk->abik", mats, mats).reshape(-1, d * d)
        grown = _span_rows(np.vstack([basis, products]), tol)
        if grown.shape[0] == basis.shape[0]:
            return int(grown.shape[0])
        basis = grown


def spin_operators(d: int) -> tuple[ComplexMatrix, ComplexMatrix, ComplexMatrix]:
    """Spin-s generators (Sx, Sy, Sz) on C^d, d = 2s + 1, Sz = diag(s, ..., -s)."""
    if d < 2:
        raise ValueError(f"Spin representation needs d >= 2, got {d}")
    s = (d - 1) / 2
    m = s - np.arange(d)
    raise_op = np.zeros((d, d), dtype=complex)
    for i in range(d - 1):
        mi = m[i + 1]
        raise_op[i, i + 1] = sqrt(s * (s + 1) - mi * (mi + 1))
    lower_op = raise_op.conj().T
    sx = (raise_op + lower_op) / 2
    sy = (raise_op - lower_op) / 2j
    sz = np.diag(m).astype(complex)
    return sx, sy, sz
