"""
Seeded random states and unitaries.

Every function takes an explicit numpy Generator; nothing here touches global
random state, so a seed fixes the whole stream.
"""
import numpy as np

from app.linalg import ComplexMatrix, dagger
from app.states import DensityMatrix, PureState


def spawn_rngs(seed: int, n: int) -> list[np.random.Generator]:
    """Independent child streams for per-task sampling."""
    return [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(n)]


def ginibre(rows: int, cols: int, rng: np.random.Generator) -> ComplexMatrix:
    return rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))


def random_unitary(d: int, rng: np.random.Generator) -> ComplexMatrix:
    """Haar-distributed unitary from the QR of a complex Gaussian matrix."""
    q, r = np.linalg.qr(ginibre(d, d, rng))
    phases = np.diagonal(r) / np.abs(np.diagonal(r))
    return q * phases


def random_vector(d: int, rng: np.random.Generator) -> np.ndarray:
    v = ginibre(d, 1, rng).reshape(-1)
    return v / np.linalg.norm(v)


def random_pure_state(dims: tuple[int, int], rng: np.random.Generator) -> PureState:
    return PureState(random_vector(dims[0] * dims[1], rng), dims)


def random_product_state(dims: tuple[int, int], rng: np.random.Generator) -> np.ndarray:
    """Unit vector |phi> (x) |psi> with both factors Haar-random."""
    return np.kron(random_vector(dims[0], rng), random_vector(dims[1], rng))


def random_density(
    dims: tuple[int, int], rng: np.random.Generator, rank: int | None = None
) -> DensityMatrix:
    """Hilbert-Schmidt measure (full rank) or induced measure of the given rank."""
    d = dims[0] * dims[1]
    g = ginibre(d, rank or d, rng)
    m = g @ dagger(g)
    m = (m + dagger(m)) / 2
    return DensityMatrix(m / np.trace(m).real, dims)


def random_spectrum(n: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform point of the probability simplex, sorted descending."""
    return np.sort(rng.dirichlet(np.ones(n)))[::-1]


def density_with_spectrum(
    spectrum, dims: tuple[int, int], rng: np.random.Generator
) -> DensityMatrix:
    """V diag(spectrum) V^dagger for a Haar-random V."""
    p = np.asarray(spectrum, dtype=float)
    v = random_unitary(p.shape[0], rng)
    m = (v * p) @ dagger(v)
    return DensityMatrix((m + dagger(m)) / 2, dims)
