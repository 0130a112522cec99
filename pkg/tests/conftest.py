import numpy as np
import pytest

from thouless_lab import HalfLineLead, SampleSpec


@pytest.fixture
def free_chain() -> SampleSpec:
    """Homogeneous chain: L=1, lambda=0, kappa_s=1; band [-2, 2]."""
    return SampleSpec(hop=(), onsite=(0.0,), kappa_s=1.0)


@pytest.fixture
def dimer() -> SampleSpec:
    """Dimerized chain with bands [-1.5, -0.5] and [0.5, 1.5]."""
    return SampleSpec(hop=(1.0,), onsite=(0.0, 0.0), kappa_s=0.5)


@pytest.fixture
def free_lead() -> HalfLineLead:
    """Half-line matching the free chain; essential support [-2, 2]."""
    return HalfLineLead(t=1.0, v0=0.0)


@pytest.fixture
def wide_lead() -> HalfLineLead:
    """Half-line covering the dimer spectrum including its gap."""
    return HalfLineLead(t=1.2, v0=0.0)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240811)
