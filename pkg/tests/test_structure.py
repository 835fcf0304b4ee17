import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import structures
from oracles import shift_correlate
from twopc.catalog import coalesced_pair_2d, flip_pair_2d, root_pair_1d, root_pair_2d
from twopc.structure import (
    BudgetExceededError,
    CorrelationSet,
    InconsistentCorrelationError,
    Structure,
    complete_correlations,
    equivalent,
    fingerprint,
    independent_pairs,
    independent_set,
    indicators,
    mpc,
    mpc_deviation,
    two_point,
    volume_fractions,
)

SMALL = Structure.from_cells([1, 1, 1, 2, 2, 3])

# Full 2PC table of (1,1,1,2,2,3).
SMALL_TABLE = {
    (1, 1): [3, 2, 1, 0, 1, 2],
    (1, 2): [0, 1, 2, 2, 1, 0],
    (1, 3): [0, 0, 0, 1, 1, 1],
    (2, 1): [0, 0, 1, 2, 2, 1],
    (2, 2): [2, 1, 0, 0, 0, 1],
    (2, 3): [0, 1, 1, 0, 0, 0],
    (3, 1): [0, 1, 1, 1, 0, 0],
    (3, 2): [0, 0, 0, 0, 1, 1],
    (3, 3): [1, 0, 0, 0, 0, 0],
}


def test_structure_validation():
    with pytest.raises(ValueError):
        Structure(np.array([1, 2, 4]), 3)
    with pytest.raises(ValueError):
        Structure(np.array([0, 1]), 2)
    S = Structure.from_cells([[1, 2], [2, 2]])
    assert S.phases == 2 and S.dims == (2, 2) and S.size == 4
    assert list(S.counts()) == [1, 3]
    with pytest.raises(ValueError):
        S.cells[0, 0] = 2


def test_indicators_examples():
    I = indicators(Structure.from_cells([1, 2, 2, 3, 1, 3]))
    np.testing.assert_array_equal(I[0], [1, 0, 0, 0, 1, 0])
    np.testing.assert_array_equal(I[1], [0, 1, 1, 0, 0, 0])
    np.testing.assert_array_equal(I[2], [0, 0, 0, 1, 0, 1])
    (single,) = indicators(Structure.from_cells([[1, 1], [1, 1]]))
    assert single.all()


@given(structures())
def test_indicator_partition(S):
    I = indicators(S)
    assert len(I) == S.phases
    np.testing.assert_array_equal(sum(I), np.ones(S.dims))
    np.testing.assert_array_equal(sum((a + 1) * Ia for a, Ia in enumerate(I)), S.cells)


def test_small_table():
    for (a, b), row in SMALL_TABLE.items():
        np.testing.assert_array_equal(two_point(SMALL, a, b), row)


def test_two_point_single_phase():
    S = Structure.from_cells(np.ones((3, 4), int))
    np.testing.assert_array_equal(two_point(S, 1, 1), np.full((3, 4), 12))


def test_bad_phase_index():
    with pytest.raises(ValueError):
        two_point(SMALL, 1, 4)


def test_independent_pairs():
    assert independent_pairs(3) == [(1, 1), (1, 2), (2, 2)]
    assert independent_pairs(2) == [(1, 1)]
    assert independent_pairs(1) == []
    assert independent_set(Structure.from_cells([1, 1])).entries == {}


def test_completion_small():
    full = complete_correlations(independent_set(SMALL))
    for key, row in SMALL_TABLE.items():
        np.testing.assert_array_equal(full[key], row)


def test_completion_single_phase():
    S = Structure.from_cells([1, 1, 1])
    full = complete_correlations(independent_set(S))
    np.testing.assert_array_equal(full[(1, 1)], [3, 3, 3])


def test_completion_rejects_inconsistent():
    cs = CorrelationSet((3,), 2, {(1, 1): np.array([1, 5, 0])})
    with pytest.raises(InconsistentCorrelationError):
        complete_correlations(cs)


@given(structures())
def test_completion_matches_direct(S):
    full = complete_correlations(independent_set(S))
    I = indicators(S)
    for a, b in itertools.product(range(1, S.phases + 1), repeat=2):
        np.testing.assert_array_equal(full[(a, b)], shift_correlate(I[a - 1], I[b - 1]))


@given(structures())
def test_zero_shift_and_row_sum(S):
    zero = (0,) * S.ndim
    counts = S.counts()
    for a in range(1, S.phases + 1):
        assert two_point(S, a, a)[zero] == counts[a - 1]
        total = sum(two_point(S, a, b) for b in range(1, S.phases + 1))
        np.testing.assert_array_equal(total, np.full(S.dims, counts[a - 1]))


def test_equivalent_examples():
    s1, s2 = root_pair_1d()
    assert equivalent(s1, s2)
    t1, t2 = root_pair_2d()
    assert equivalent(t1, t2)
    assert equivalent(t1, t1)
    for flipped in flip_pair_2d():
        assert not equivalent(t1, flipped)
    assert not equivalent(s1, t1)
    assert not equivalent(t1, Structure(t1.cells, 3))


@given(structures(max_phases=3), structures(max_phases=3))
def test_fingerprint_agrees_with_equivalence(S1, S2):
    same = S1.dims == S2.dims and S1.phases == S2.phases and fingerprint(S1) == fingerprint(S2)
    assert same == equivalent(S1, S2)


def test_volume_fractions():
    assert volume_fractions(root_pair_2d()[0])[0] == Fraction(5, 12)
    assert volume_fractions(coalesced_pair_2d()[0])[0] == Fraction(41, 72)
    assert volume_fractions(Structure.from_cells([1, 1])) == [Fraction(1)]


@given(structures(max_phases=3, max_dims=2, max_side=4), st.data())
def test_mpc_order_two_is_two_point(S, data):
    a = data.draw(st.integers(1, S.phases))
    b = data.draw(st.integers(1, S.phases))
    np.testing.assert_array_equal(mpc(S, (a, b)), two_point(S, a, b))


def test_mpc_three_point_by_definition():
    S = Structure.from_cells([[1, 2, 1], [2, 1, 1]])
    C = mpc(S, (1, 2, 1))
    cells = S.cells
    for p1 in itertools.product(range(2), range(3)):
        for p2 in itertools.product(range(2), range(3)):
            expected = 0
            for q in itertools.product(range(2), range(3)):
                expected += (
                    cells[q] == 1
                    and cells[(q[0] + p1[0]) % 2, (q[1] + p1[1]) % 3] == 2
                    and cells[(q[0] + p2[0]) % 2, (q[1] + p2[1]) % 3] == 1
                )
            assert C[p1 + p2] == expected


def test_mpc_single_phase_constant():
    S = Structure.from_cells(np.ones((2, 2), int))
    np.testing.assert_array_equal(mpc(S, (1, 1, 1)), np.full((2, 2, 2, 2), 4))


def test_mpc_budget():
    with pytest.raises(BudgetExceededError):
        mpc(root_pair_1d()[0], (1, 1, 1, 1), budget=100)


def test_mpc_deviation_streamed_matches_full():
    s1, s2 = root_pair_2d()
    diff, ref = mpc_deviation(s1, s2, (1, 1, 1))
    c1 = mpc(s1, (1, 1, 1))
    c2 = mpc(s2, (1, 1, 1))
    assert diff == pytest.approx(np.linalg.norm((c1 - c2).ravel()))
    assert ref == pytest.approx(np.linalg.norm(c1.ravel()))
    assert mpc_deviation(s1, s1, (1, 1, 1))[0] == 0.0
