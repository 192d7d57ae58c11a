import numpy as np
import pytest
from numpy.testing import assert_allclose

from app.factorization import pure_is_factorized
from app.linalg import is_unitary
from app.sampling import (
    density_with_spectrum,
    random_density,
    random_product_state,
    random_pure_state,
    random_spectrum,
    random_unitary,
    spawn_rngs,
)
from app.states import PureState, spectrum


@pytest.mark.parametrize("d", [2, 4, 9])
def test_random_unitary_is_unitary(rng, d):
    assert is_unitary(random_unitary(d, rng))


def test_same_seed_same_stream():
    a = random_unitary(4, np.random.default_rng(3))
    b = random_unitary(4, np.random.default_rng(3))
    assert np.array_equal(a, b)


def test_spawned_streams_are_independent_and_reproducible():
    first = [random_unitary(3, r) for r in spawn_rngs(11, 4)]
    again = [random_unitary(3, r) for r in spawn_rngs(11, 4)]
    for a, b in zip(first, again):
        assert np.array_equal(a, b)
    assert not np.allclose(first[0], first[1])


def test_random_density_is_valid(rng):
    rho = random_density((2, 3), rng)
    assert rho.dims == (2, 3)
    assert spectrum(rho)[-1] > 0


def test_random_density_rank(rng):
    rho = random_density((3, 3), rng, rank=2)
    p = spectrum(rho)
    assert np.sum(p > 1e-9) == 2


def test_random_spectrum(rng):
    p = random_spectrum(9, rng)
    assert p.sum() == pytest.approx(1.0)
    assert np.all(np.diff(p) <= 0)
    assert np.all(p >= 0)


def test_density_with_spectrum(rng):
    p = np.array([0.5, 0.3, 0.15, 0.05])
    rho = density_with_spectrum(p, (2, 2), rng)
    assert_allclose(spectrum(rho), p, atol=1e-9)


def test_random_states_are_unit_vectors(rng):
    psi = random_pure_state((3, 2), rng)
    assert np.linalg.norm(psi.amplitudes) == pytest.approx(1.0)
    v = random_product_state((3, 2), rng)
    assert pure_is_factorized(PureState(v, (3, 2)))
