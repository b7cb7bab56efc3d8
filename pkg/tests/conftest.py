import os
import sys

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

sys.path.insert(0, os.path.dirname(__file__))

from vcoher.model import SystemParams  # noqa: E402

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

angles = st.floats(0.0, 2 * np.pi, allow_nan=False)


@st.composite
def system_params(draw, **fixed):
    values = dict(
        gamma2=draw(st.floats(0.5, 2.0)),
        gamma3=draw(st.floats(0.5, 2.0)),
        eta=draw(st.floats(0.0, 0.95)),
        omega_c_mag=draw(st.floats(0.0, 5.0)),
        phi_c=draw(angles),
        omega_p_mag=draw(st.floats(0.0, 1.0)),
        phi_p=draw(angles),
        delta_c=draw(st.floats(-5.0, 5.0)),
        delta=draw(st.floats(-5.0, 5.0)),
    )
    values.update(fixed)
    return SystemParams(**values)


@st.composite
def density_matrices(draw):
    re = draw(st.lists(st.floats(-1, 1), min_size=9, max_size=9))
    im = draw(st.lists(st.floats(-1, 1), min_size=9, max_size=9))
    a = np.array(re).reshape(3, 3) + 1j * np.array(im).reshape(3, 3) + 0.1 * np.eye(3)
    rho = a @ a.conj().T
    return rho / np.trace(rho)


@pytest.fixture
def fig7():
    return SystemParams(eta=0.5, omega_c_mag=2.0, delta_c=0.0, delta=3.0, omega_p_mag=0.01)
