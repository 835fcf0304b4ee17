import sys
import numpy as np
import pytest
from hypothesis import settings
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from twopc.structure import Structure

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


def small_shapes(min_dims=1, max_dims=3, max_side=5):
    return hnp.array_shapes(min_dims=min_dims, max_dims=max_dims, min_side=1, max_side=max_side)


@st.composite
def structures(draw, max_phases=4, min_dims=1, max_dims=3, max_side=5):
    shape = draw(small_shapes(min_dims, max_dims, max_side))
    n = draw(st.integers(1, max_phases))
    cells = draw(hnp.arrays(np.int64, shape, elements=st.integers(1, n)))
    return Structure(cells, n)


@st.composite
def int_arrays(draw, shape=None, lo=-9, hi=9):
    if shape is None:
        shape = draw(small_shapes())
    return draw(hnp.arrays(np.int64, shape, elements=st.integers(lo, hi)))


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    if module is None or not module.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(module.RESULTS):
        terminalreporter.write_line(module.RESULTS[number])
