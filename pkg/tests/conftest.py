import numpy as np
import pytest
from numpy.random import default_rng


@pytest.fixture
def rng():
    return default_rng(20240917)


def random_orthogonal(d: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-ish orthogonal matrix via QR with a fixed sign convention."""
    q, r = np.linalg.qr(rng.standard_normal((d, d)))
    return q * np.sign(np.diag(r))
