"""Shared scenarios and random-configuration generators."""
import math

import numpy as np
import pytest
from hypothesis import strategies as st

from irs_deploy.core_model import (
    DoubleGains,
    DoubleIrsGeometry,
    HybridGains,
    PowerConfig,
    SingleIrsGeometry,
    gains_from_geometry,
)

CFG = PowerConfig.from_dbm()
# Hybrid link at 80 m / 50 m; double link with surfaces 5 m from each end.
HYBRID_GEOM = SingleIrsGeometry.from_distances(80.0, 50.0)
DOUBLE_GEOM = DoubleIrsGeometry(L=90.0, x_b=5.0, x_u=5.0, h_d=5.0)
HYBRID_GAINS = gains_from_geometry(HYBRID_GEOM, CFG)
DOUBLE_GAINS = gains_from_geometry(DOUBLE_GEOM, CFG)


@pytest.fixture
def cfg():
    return CFG


@pytest.fixture
def hybrid_gains():
    return HYBRID_GAINS


@pytest.fixture
def double_gains():
    return DOUBLE_GAINS


def random_power_config(rng: np.random.Generator, **fixed) -> PowerConfig:
    """Powers and noises drawn log-uniformly over wide but physical ranges."""
    kw = dict(
        p_b_dbm=rng.uniform(0, 40),
        p_i_dbm=rng.uniform(-10, 30),
        noise0_dbm=rng.uniform(-100, -60),
        noise_r_dbm=rng.uniform(-100, -60),
    )
    kw.update(fixed)
    return PowerConfig.from_dbm(**kw)


def random_gain(rng: np.random.Generator, lo: float = 1e-12, hi: float = 1e-3) -> float:
    return float(10 ** rng.uniform(math.log10(lo), math.log10(hi)))


def random_hybrid_gains(rng) -> HybridGains:
    return HybridGains(bi=random_gain(rng), iu=random_gain(rng))


def random_double_gains(rng) -> DoubleGains:
    return DoubleGains(b=random_gain(rng), i=random_gain(rng), u=random_gain(rng))


# Hypothesis strategies ---------------------------------------------------------

dbm = st.floats(min_value=-20, max_value=40, allow_nan=False)
noise_dbm = st.floats(min_value=-110, max_value=-50, allow_nan=False)
log_gain = st.floats(min_value=-12, max_value=-3, allow_nan=False)


@st.composite
def power_configs(draw):
    return PowerConfig.from_dbm(
        p_b_dbm=draw(dbm), p_i_dbm=draw(dbm),
        noise0_dbm=draw(noise_dbm), noise_r_dbm=draw(noise_dbm),
    )


@st.composite
def hybrid_gains_st(draw):
    return HybridGains(bi=10 ** draw(log_gain), iu=10 ** draw(log_gain))


@st.composite
def double_gains_st(draw):
    return DoubleGains(b=10 ** draw(log_gain), i=10 ** draw(log_gain), u=10 ** draw(log_gain))


# Acceptance summary -------------------------------------------------------------------

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
