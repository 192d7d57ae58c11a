import numpy as np
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays


_entries = st.floats(min_value=-1.0, max_value=1.0, allow_nan=False, allow_infinity=False)


@st.composite
def complex_matrices(draw, min_dim: int = 2, max_dim: int = 6, dim: int | None = None):
    n = dim or draw(st.integers(min_value=min_dim, max_value=max_dim))
    re = draw(arrays(np.float64, (n, n), elements=_entries))
    im = draw(arrays(np.float64, (n, n), elements=_entries))
    return re + 1j * im


@st.composite
def hermitian_matrices(draw, min_dim: int = 2, max_dim: int = 6, dim: int | None = None):
    m = draw(complex_matrices(min_dim, max_dim, dim))
    return (m + m.conj().T) / 2


@st.composite
def splits(draw, max_factor: int = 3):
    d1 = draw(st.integers(min_value=2, max_value=max_factor))
    d2 = draw(st.integers(min_value=2, max_value=max_factor))
    return d1, d2


seeds = st.integers(min_value=0, max_value=2**32 - 1)
