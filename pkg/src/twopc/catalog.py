"""Reference structures, kernels and perturbations used in tests and demos."""

from __future__ import annotations

import numpy as np

from .derive import CoalescencePlan, KernelList, coalesce, kernel_extend, phase_extend
from .structure import Structure

__all__ = [
    "ambiguity_delta",
    "coalesced_pair_2d",
    "flip_pair_2d",
    "kernel_extended_pair_2d",
    "kernels_2d",
    "kernels_3d",
    "phase_extended_pair_1d",
    "phase_extended_pair_2d",
    "root_pair_1d",
    "root_pair_2d",
    "vanishing_examples",
]


def root_pair_1d() -> tuple[Structure, Structure]:
    """Two unrelated 2PC-equivalent two-phase structures of period 12."""
    return (
        Structure.from_cells([1, 1, 1, 2, 1, 2, 2, 1, 2, 2, 2, 2]),
        Structure.from_cells([1, 1, 2, 1, 2, 1, 1, 2, 2, 2, 2, 2]),
    )


def root_pair_2d(mirrored: bool = False) -> tuple[Structure, Structure]:
    """Two unrelated 2PC-equivalent two-phase structures on a 4 x 3 grid.

    ``mirrored=True`` reflects the first member along axis 1.  Both
    orientations give the same 2PC class and effective tensor diagonal, but
    kernel extension is orientation dependent; the mirrored member is the
    one whose kernel-extended, coalesced child has the reference tensor
    ``[[4.5169, 0.2396], [0.2396, 3.6756]]`` at 2x.
    """
    first = np.array([[1, 2, 2], [2, 2, 1], [2, 1, 1], [2, 2, 1]])
    second = np.array([[1, 2, 2], [2, 1, 1], [1, 2, 2], [1, 2, 2]])
    if mirrored:
        first = np.roll(first[:, ::-1], 1, axis=1)
    return Structure(first, 2), Structure(second, 2)


def flip_pair_2d() -> tuple[Structure, Structure]:
    """Two-pixel swaps of the first 4 x 3 root; neither is 2PC-equivalent to it.

    The first swap completes column 2 with phase 1, so phase 1 percolates
    along axis 0; the second barely changes the topology.
    """
    base = root_pair_2d()[0].cells
    percolating = base.copy()
    percolating[0, 0], percolating[0, 2] = base[0, 2], base[0, 0]
    mild = base.copy()
    mild[0, 0], mild[0, 1] = base[0, 1], base[0, 0]
    return Structure(percolating, 2), Structure(mild, 2)


def kernels_2d() -> KernelList:
    """Two 2 x 3 kernels for the phases of the 4 x 3 roots."""
    return KernelList(
        (
            [[1, 1, 1], [0, 1, 0]],
            [[1, 0, 0], [1, 1, 0]],
        )
    )


def kernels_3d() -> KernelList:
    """Two 2 x 2 x 3 kernels turning the period-12 roots into 3D structures."""
    k1 = np.zeros((2, 2, 3), dtype=int)
    k2 = np.zeros((2, 2, 3), dtype=int)
    for p in [(0, 0, 0), (0, 0, 1), (0, 0, 2), (0, 1, 0), (1, 0, 0), (1, 1, 0)]:
        k1[p] = 1
    for p in [(0, 0, 0), (0, 0, 1), (0, 1, 0), (0, 1, 2), (1, 0, 0), (1, 0, 1), (1, 0, 2), (1, 1, 2)]:
        k2[p] = 1
    return KernelList((k1, k2))


def phase_extended_pair_1d() -> tuple[Structure, Structure]:
    return tuple(phase_extend(S, (3,)) for S in root_pair_1d())


def phase_extended_pair_2d() -> tuple[Structure, Structure]:
    return tuple(phase_extend(S, (2, 3)) for S in root_pair_2d())


def kernel_extended_pair_2d(mirrored: bool = True) -> tuple[Structure, Structure]:
    return tuple(kernel_extend(S, kernels_2d()) for S in root_pair_2d(mirrored))


def coalesced_pair_2d(mirrored: bool = True) -> tuple[Structure, Structure]:
    """Kernel-extended 4 x 3 roots with phases 1 and 2 merged (8 x 9, two phases)."""
    plan = CoalescencePlan.from_groups([[1, 2], [3]])
    return tuple(coalesce(S, plan) for S in kernel_extended_pair_2d(mirrored))


def vanishing_examples() -> dict[str, Structure]:
    """Small structures whose diagonal 2PC spectra have zeros."""
    return {
        "1d": Structure.from_cells([1, 1, 1, 2, 2, 3]),
        "2d_a": Structure.from_cells([[2, 3, 1], [2, 2, 1], [2, 3, 3], [2, 2, 3]]),
        "2d_b": Structure.from_cells([[1, 1, 3], [1, 2, 3], [1, 1, 3], [3, 1, 2]]),
        "2d_n4": Structure.from_cells(
            [[1, 2, 3, 4, 2], [1, 4, 4, 4, 4], [2, 4, 3, 1, 4], [4, 4, 1, 4, 4]]
        ),
    }


def ambiguity_delta() -> dict:
    """Perturbation of the spectra of ``vanishing_examples()['2d_a']`` that keeps row 1."""
    d = np.zeros((4, 3))
    d[2] = [-2.0, 1.0, 1.0]
    return {(2, 2): d, (3, 3): d.copy(), (2, 3): -d, (3, 2): -d.copy()}
