"""
Bell-diagonal two-qubit states rho = 1/4 (I + sum_i c_i sigma_i (x) sigma_i).

Physical states fill a tetrahedron in c-space, the separable ones the double
pyramid |c_x| + |c_y| + |c_z| <= 1, and the KZ ball is |c| <= 1/sqrt(3).
"""
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Iterator

import numpy as np

from app import config
from app.criteria import kz_ball_member
from app.log import safe_log
from app.states import DensityMatrix, bell_diagonal


class RegionLabel(str, Enum):
    UNPHYSICAL = "Unphysical"
    ENTANGLED_TETRA = "EntangledTetra"
    SEPARABLE_PYRAMID = "SeparablePyramid"
    KZ_BALL = "KzBall"


REGION_ORDER = (
    RegionLabel.UNPHYSICAL,
    RegionLabel.ENTANGLED_TETRA,
    RegionLabel.SEPARABLE_PYRAMID,
    RegionLabel.KZ_BALL,
)

# enum members by position in REGION_ORDER; np.full would coerce them to str
_LABELS = np.empty(len(REGION_ORDER), dtype=object)
for _i, _label in enumerate(REGION_ORDER):
    _LABELS[_i] = _label

# Rows give the sign pattern of (1, c_x, c_y, c_z) for Phi+, Phi-, Psi+, Psi-.
_EIGEN_SIGNS = np.array(
    [
        [1, 1, -1, 1],
        [1, -1, 1, 1],
        [1, 1, 1, -1],
        [1, -1, -1, -1],
    ],
    dtype=float,
)


@dataclass(frozen=True)
class CVector:
    c: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.c, dtype=float).reshape(-1)
        if c.shape != (3,) or not np.all(np.isfinite(c)):
            raise ValueError(f"c needs three finite components, got {self.c!r}")
        c.setflags(write=False)
        object.__setattr__(self, "c", c)

    @classmethod
    def parse(cls, text: str) -> "CVector":
        parts = [p for p in text.replace(" ", "").split(",") if p]
        if len(parts) != 3:
            raise ValueError(f"Expected cx,cy,cz, got {text!r}")
        return cls(np.array([float(p) for p in parts]))


def _vec(c) -> np.ndarray:
    return c.c if isinstance(c, CVector) else CVector(c).c


def eigenvalues_of_c(c) -> np.ndarray:
    """Closed-form eigenvalues in the order Phi+, Phi-, Psi+, Psi-."""
    v = _vec(c)
    return _EIGEN_SIGNS @ np.concatenate(([1.0], v)) / 4


def tetrahedron_vertices() -> dict[str, np.ndarray]:
    """c-coordinates of the four Bell projectors."""
    return {
        "phi+": np.array([1.0, -1.0, 1.0]),
        "phi-": np.array([-1.0, 1.0, 1.0]),
        "psi+": np.array([1.0, 1.0, -1.0]),
        "psi-": np.array([-1.0, -1.0, -1.0]),
    }


def is_physical(c) -> bool:
    return bool(np.min(eigenvalues_of_c(c)) >= -config.current_tolerances().region_slack)


def state_from_c(c) -> DensityMatrix:
    if not is_physical(c):
        raise ValueError(
            f"c = {np.asarray(_vec(c)).tolist()} is outside the physical tetrahedron "
            f"(eigenvalues {np.round(eigenvalues_of_c(c), 12).tolist()})"
        )
    return bell_diagonal(_vec(c))


def classify(c) -> RegionLabel:
    v = _vec(c)
    if not is_physical(v):
        return RegionLabel.UNPHYSICAL
    if np.sum(np.abs(v)) > 1.0 + config.current_tolerances().region_slack:
        return RegionLabel.ENTANGLED_TETRA
    if kz_ball_member(state_from_c(v)):
        return RegionLabel.KZ_BALL
    return RegionLabel.SEPARABLE_PYRAMID


def classify_many(cs) -> np.ndarray:
    """Vectorized `classify`; returns an object array of RegionLabel."""
    tol = config.current_tolerances()
    cs = np.asarray(cs, dtype=float).reshape(-1, 3)
    eig = np.hstack([np.ones((cs.shape[0], 1)), cs]) @ _EIGEN_SIGNS.T / 4
    physical = eig.min(axis=1) >= -tol.region_slack
    # ||rho - I/4||_HS = |c| / 2 and r_B = 1/sqrt(12) for two qubits
    in_ball = np.linalg.norm(cs, axis=1) / 2 <= 1 / np.sqrt(12) + tol.kz_slack
    in_pyramid = np.abs(cs).sum(axis=1) <= 1.0 + tol.region_slack

    codes = np.full(cs.shape[0], 1)
    codes[in_pyramid] = 2
    codes[in_pyramid & in_ball] = 3
    codes[~physical] = 0
    return _LABELS[codes]


def grid_points(resolution: int) -> np.ndarray:
    if resolution < 2:
        raise ValueError(f"Grid resolution must be >= 2, got {resolution}")
    axis = np.linspace(-1.0, 1.0, resolution)
    gx, gy, gz = np.meshgrid(axis, axis, axis, indexing="ij")
    return np.column_stack([gx.ravel(), gy.ravel(), gz.ravel()])


def sample_region(
    resolution: int,
    seed: int | None = None,
    on_log: Callable[[str], None] | None = None,
) -> Iterator[tuple[np.ndarray, RegionLabel]]:
    """
    Labeled points of [-1, 1]^3 in grid-index order.

    With a seed, resolution^3 uniform random points replace the grid.
    """
    if seed is None:
        points = grid_points(resolution)
    else:
        if resolution < 2:
            raise ValueError(f"Grid resolution must be >= 2, got {resolution}")
        points = np.random.default_rng(seed).uniform(-1.0, 1.0, size=(resolution**3, 3))
    labels = classify_many(points)
    safe_log(on_log, f"[geometry] resolution={resolution} points={len(points)}")
    for point, label in zip(points, labels):
        yield point, label


def region_counts(samples) -> dict[RegionLabel, int]:
    counts = {label: 0 for label in REGION_ORDER}
    for _, label in samples:
        counts[RegionLabel(label)] += 1
    return counts


def volume_ratio(resolution: int = 101) -> float:
    """Separable share of the physical tetrahedron, by grid counting."""
    labels = classify_many(grid_points(resolution))
    physical = np.sum(labels != RegionLabel.UNPHYSICAL)
    separable = np.sum(
        (labels == RegionLabel.SEPARABLE_PYRAMID) | (labels == RegionLabel.KZ_BALL)
    )
    return float(separable / physical)
