"""Shared fixtures and random generators for the test suite."""

import numpy as np
import pytest

from periph.channel import KrausChannel


def crandn(rng, *shape):
    """Complex standard Gaussian array."""
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def random_unitary(rng, d):
    q, r = np.linalg.qr(crandn(rng, d, d))
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_unital_channel(d, m, seed, label=""):
    """Random unital channel with m Kraus operators on M_d.

    Stacks the Kraus operators into the first d columns of a random
    (m*d) x (m*d) unitary, so sum K_i^dag K_i = I holds by construction.
    """
    rng = np.random.default_rng(seed)
    v = random_unitary(rng, m * d)[:, :d]
    kraus = [v[i * d:(i + 1) * d, :] for i in range(m)]
    return KrausChannel(kraus, label=label or f"random(d={d},m={m},seed={seed})")


def dephasing_channel(label="dephasing"):
    """Qubit dephasing: keeps diagonals, halves off-diagonals."""
    p0 = np.diag([1.0, 0.0]).astype(complex)
    p1 = np.diag([0.0, 1.0]).astype(complex)
    s = 1 / np.sqrt(2)
    return KrausChannel([s * np.eye(2) + 0j, s * (p0 - p1)], label=label)


@pytest.fixture
def dephasing():
    return dephasing_channel()


@pytest.fixture
def rng():
    return np.random.default_rng(0)
