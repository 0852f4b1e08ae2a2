import numpy as np
import pytest

import bellscope as bs


@pytest.fixture(scope="session")
def catalog():
    return bs.load_catalog()


@pytest.fixture(scope="session")
def by_name(catalog):
    def get(name):
        return bs.find_entry(catalog, name).inequality
    return get


@pytest.fixture(scope="session")
def chsh(by_name):
    return by_name("CHSH")


@pytest.fixture(scope="session")
def i3322(by_name):
    return by_name("I3322")


@pytest.fixture(scope="session")
def switched_chsh(chsh):
    return bs.flip_outcome(bs.flip_outcome(chsh, "A", 1), "B", 1)


def random_transform(m_a, m_b, rng, allow_swap=True):
    """Uniformly random group element (swap only when the shape permits)."""
    swap = bool(rng.integers(2)) if (allow_swap and m_a == m_b) else False
    return bs.Transform(
        swap,
        tuple(rng.permutation(m_a).tolist()),
        tuple(rng.permutation(m_b).tolist()),
        tuple(bool(v) for v in rng.integers(2, size=m_a)),
        tuple(bool(v) for v in rng.integers(2, size=m_b)),
    )


def random_unit_vector(d, rng):
    v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return v / np.linalg.norm(v)
