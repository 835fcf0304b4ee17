import itertools
import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from chains import random_chain
from conftest import structures
from twopc.catalog import (
    coalesced_pair_2d,
    kernel_extended_pair_2d,
    kernels_2d,
    kernels_3d,
    phase_extended_pair_1d,
    phase_extended_pair_2d,
    root_pair_1d,
    root_pair_2d,
)
from twopc.derive import CoalescencePlan, KernelList, coalesce, kernel_extend, phase_extend, upsample
from twopc.ndperiodic import trivial_embed
from twopc.structure import Structure, equivalent, independent_set, two_point, volume_fractions

ROOT_PAIRS = [root_pair_1d(), root_pair_2d(), root_pair_2d(mirrored=True)]


def test_phase_extend_examples():
    a, b = phase_extended_pair_1d()
    assert a.dims == (36,) and a.phases == 3
    assert equivalent(a, b)
    c, d = phase_extended_pair_2d()
    assert c.dims == (8, 9) and c.phases == 3
    assert equivalent(c, d)
    np.testing.assert_array_equal(a.cells[::3], root_pair_1d()[0].cells)
    assert (np.delete(a.cells, np.arange(0, 36, 3)) == 3).all()


def test_phase_extend_identity_warns():
    S = root_pair_1d()[0]
    with pytest.warns(UserWarning):
        T = phase_extend(S, 1)
    assert T.phases == 3 and T.counts()[2] == 0


@given(structures(max_phases=3, max_dims=2, max_side=4), st.lists(st.integers(1, 3), min_size=1, max_size=3))
def test_phase_extended_two_point_is_embedded(S, z):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        T = phase_extend(S, z)
    for a, b in itertools.product(range(1, S.phases + 1), repeat=2):
        np.testing.assert_array_equal(two_point(T, a, b), trivial_embed(two_point(S, a, b), z))


def test_kernel_extend_examples():
    a, b = kernel_extended_pair_2d()
    assert a.dims == (8, 9) and a.phases == 3
    assert equivalent(a, b)
    x, y = (kernel_extend(S, kernels_3d()) for S in root_pair_1d())
    assert x.dims == (24, 2, 3) and x.phases == 3
    assert equivalent(x, y)


@given(structures(max_phases=3, max_dims=2, max_side=4), st.lists(st.integers(1, 3), min_size=1, max_size=2))
def test_all_ones_kernels_upsample(S, z):
    if len(z) != S.ndim:
        z = (z + [1] * S.ndim)[: S.ndim]
    K = KernelList(tuple(np.ones(z, int) for _ in range(S.phases)))
    T = kernel_extend(S, K)
    np.testing.assert_array_equal(T.cells, upsample(S, z).cells)


def test_kernel_list_validation():
    with pytest.raises(ValueError):
        KernelList(([[1, 0]], [[1, 0, 1]]))
    with pytest.raises(ValueError):
        KernelList(([[1, 2]],))
    with pytest.raises(ValueError):
        KernelList(([[0, 0]],))
    with pytest.raises(ValueError):
        kernel_extend(root_pair_2d()[0], KernelList(([[1]],)))


def test_coalesce_examples():
    a, b = coalesced_pair_2d()
    assert a.phases == 2 and equivalent(a, b)
    S = Structure.from_cells([[1, 2, 3, 4], [4, 3, 2, 1], [2, 2, 4, 1]])
    T = coalesce(S, CoalescencePlan.from_groups([[1, 2, 3], [4]]))
    expected = sum(two_point(S, a, 4) for a in (1, 2, 3))
    np.testing.assert_array_equal(two_point(T, 1, 2), expected)
    assert coalesce(S, (1, 2, 3, 4)) == S
    merged = coalesce(S, (1, 1, 1, 1))
    assert merged.phases == 1
    np.testing.assert_array_equal(two_point(merged, 1, 1), np.full(S.dims, S.size))
    assert coalesce(S, {1: 2, 2: 1, 3: 1, 4: 2}).phases == 2


def test_plan_validation():
    with pytest.raises(ValueError):
        CoalescencePlan((1, 3))
    with pytest.raises(ValueError):
        CoalescencePlan.from_groups([[1, 2], [2]])
    with pytest.raises(ValueError):
        coalesce(root_pair_1d()[0], (1, 1, 2))


def test_upsample():
    S = root_pair_2d()[0]
    U = upsample(S, (2, 2))
    assert U.dims == (8, 6)
    assert upsample(S, (1, 1)) == S
    with pytest.raises(ValueError):
        upsample(S, (2,))


@given(structures(max_dims=2), st.data())
def test_upsample_keeps_fractions(S, data):
    f = data.draw(st.lists(st.integers(1, 3), min_size=S.ndim, max_size=S.ndim))
    assert volume_fractions(upsample(S, f)) == volume_fractions(S)


@pytest.mark.parametrize("pair", range(len(ROOT_PAIRS)))
def test_random_chains_preserve_equivalence(pair, rng):
    S1, S2 = ROOT_PAIRS[pair]
    for _ in range(20):
        length = int(rng.integers(1, 5))
        T1, T2, ops = random_chain(rng, S1, S2, length)
        assert independent_set(T1).same_as(independent_set(T2)), ops
