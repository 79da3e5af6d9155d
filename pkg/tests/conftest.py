import numpy as np
import pytest
from hypothesis import strategies as st

from periodic_jacobi import make_jacobi, random_jacobi


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def ensemble(seed, count, q_values, a_range=(0.5, 1.5), b_range=(-1.0, 1.0)):
    """Deterministic list of random operators with q drawn from ``q_values``."""
    g = np.random.default_rng(seed)
    return [random_jacobi(g, int(g.choice(q_values)), a_range, b_range) for _ in range(count)]


@st.composite
def operators(draw, q_min=2, q_max=6):
    q = draw(st.integers(q_min, q_max))
    a = draw(st.lists(st.floats(0.3, 2.0), min_size=q, max_size=q))
    b = draw(st.lists(st.floats(-1.5, 1.5), min_size=q, max_size=q))
    return make_jacobi(q, a, b)


def constant(q, a=1.0, b=0.0):
    return make_jacobi(q, [a] * q, [b] * q)
