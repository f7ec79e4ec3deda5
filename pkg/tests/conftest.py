import numpy as np
import pytest

from qbd_sim import DerivedRates, PhysicalParams

# Default operating point used throughout: 21.456 GHz niobium cavity with
# Q = 2e9 at 1.4 K, probed by 3000 atoms/s.
OPERATING = dict(frequency=21.456e9, q_factor=2e9, temperature=1.4, atom_rate=3000.0)

# Values at that point, frozen from independent evaluation of the closed
# forms (see test_physics/test_master_equation for the evaluations).
NBAR = 0.9203330797212227
GAMMA = 10.728


@pytest.fixture(scope="session")
def qnd_params() -> PhysicalParams:
    """Operating point at the qubit-detection phase pi/2."""
    return PhysicalParams(phase=np.pi / 2, **OPERATING)


@pytest.fixture(scope="session")
def rates(qnd_params) -> DerivedRates:
    return DerivedRates.from_params(qnd_params)
