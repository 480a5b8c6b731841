import numpy as np
import pytest
import scipy.linalg as sla

from sidecomp.policy import NumericPolicy


def jordan(r, lam=0.0):
    return (np.diag(np.ones(r - 1), 1) + lam * np.eye(r)).astype(complex)


def bd(*blocks):
    return sla.block_diag(*blocks).astype(complex)


@pytest.fixture
def policy():
    return NumericPolicy()


@pytest.fixture
def rng():
    return np.random.default_rng(0xFEED)
