import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from uwbphy import (
    ModulationConfig,
    PulseShape,
    ReceiverConfig,
    ThCode,
    ThParams,
    sample_pulse,
)

settings.register_profile(
    "suite",
    deadline=None,
    max_examples=25,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("suite")

# Short pulse and frame used throughout the tests: 2.4 ns support fits
# a 5 ns chip even with an orthogonal PPM shift, and one frame is just
# 1000 samples at 50 GS/s, keeping Monte Carlo runs fast.
RATE = 50e9
FAST_PULSE = PulseShape(tau=0.4e-9, duration=2.4e-9)
FAST_DELTA = 2.4e-9


@pytest.fixture(scope="session")
def rate():
    return RATE


@pytest.fixture(scope="session")
def fast_pulse():
    return FAST_PULSE


@pytest.fixture(scope="session")
def fast_template():
    return sample_pulse(FAST_PULSE, RATE)


@pytest.fixture(scope="session")
def fast_params():
    return ThParams(t_c=5e-9, n_c=4)


@pytest.fixture(scope="session")
def wide_params():
    return ThParams(t_c=5e-9, n_c=8)


@pytest.fixture(scope="session")
def fast_code():
    return ThCode(offsets=(2, 0, 3, 1), code_id="fast")


@pytest.fixture(scope="session")
def wide_code():
    return ThCode(offsets=(2, 0, 3, 1, 7, 4, 6, 5), code_id="wide")


def make_mod(scheme):
    return ModulationConfig(
        scheme, delta=FAST_DELTA if scheme == "ppm" else 0.0
    )


def make_receiver(scheme, params, code, template, **kwargs):
    return ReceiverConfig(
        mod=make_mod(scheme),
        params=params,
        code=code,
        template=template,
        **kwargs,
    )


def random_bits(seed, n):
    return np.random.default_rng(seed).integers(0, 2, size=n, dtype=np.int64)
