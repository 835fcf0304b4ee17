"""Operators that turn 2PC-equivalent structures into new 2PC-equivalent ones.

Applying any of :func:`phase_extend`, :func:`kernel_extend`,
:func:`coalesce` or :func:`upsample` identically to two equivalent
structures yields two equivalent children.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .ndperiodic import circ_convolve, trivial_embed
from .structure import Structure

__all__ = [
    "CoalescencePlan",
    "KernelList",
    "OverlapError",
    "coalesce",
    "kernel_extend",
    "phase_extend",
    "upsample",
]


class OverlapError(ValueError):
    """Kernel application produced a cell claimed by more than one phase."""


@dataclass(frozen=True, eq=False)
class KernelList:
    """One binary kernel per phase, all sharing the shape ``z``."""

    kernels: tuple

    def __post_init__(self):
        ks = tuple(np.array(k, dtype=np.int64) for k in self.kernels)
        if not ks:
            raise ValueError("kernel list is empty")
        shape = ks[0].shape
        if len(shape) == 0:
            raise ValueError("kernels need at least one axis")
        for i, k in enumerate(ks, start=1):
            if k.shape != shape:
                raise ValueError(f"kernel {i} has shape {k.shape}, expected {shape}")
            if not np.isin(k, (0, 1)).all():
                raise ValueError(f"kernel {i} is not binary")
            if not k.any():
                raise ValueError(f"kernel {i} is all zeros and would annihilate its phase")
            k.setflags(write=False)
        object.__setattr__(self, "kernels", ks)

    @property
    def shape(self) -> tuple[int, ...]:
        return self.kernels[0].shape

    def __len__(self):
        return len(self.kernels)

    def __eq__(self, other):
        if not isinstance(other, KernelList):
            return NotImplemented
        return len(self) == len(other) and all(
            np.array_equal(a, b) for a, b in zip(self.kernels, other.kernels)
        )


@dataclass(frozen=True)
class CoalescencePlan:
    """Surjective relabeling: old phase ``i`` becomes ``mapping[i - 1]``."""

    mapping: tuple

    def __post_init__(self):
        mapping = tuple(int(v) for v in self.mapping)
        if not mapping:
            raise ValueError("empty coalescence plan")
        m = max(mapping)
        if min(mapping) < 1 or set(mapping) != set(range(1, m + 1)):
            raise ValueError(f"plan {mapping} must map onto every phase 1..{m}")
        object.__setattr__(self, "mapping", mapping)

    @classmethod
    def from_groups(cls, groups: Sequence[Sequence[int]]) -> "CoalescencePlan":
        """Plan from a list of old-phase groups; group ``j`` becomes new phase ``j + 1``."""
        owner: dict[int, int] = {}
        for new, group in enumerate(groups, start=1):
            for old in group:
                if old in owner:
                    raise ValueError(f"phase {old} appears in more than one group")
                owner[int(old)] = new
        n = max(owner) if owner else 0
        if sorted(owner) != list(range(1, n + 1)):
            raise ValueError("groups must cover the phases 1..n exactly once")
        return cls(tuple(owner[i] for i in range(1, n + 1)))

    @property
    def old_phases(self) -> int:
        return len(self.mapping)

    @property
    def new_phases(self) -> int:
        return max(self.mapping)


def phase_extend(S: Structure, z) -> Structure:
    """Trivially embed ``S`` with stride ``z`` and fill the gaps with phase ``n + 1``."""
    embedded = trivial_embed(S.cells, z)
    n = S.phases
    cells = np.where(embedded == 0, n + 1, embedded)
    if not (embedded == 0).any():
        warnings.warn("phase extension with z all ones leaves the new phase empty", stacklevel=2)
    return Structure(cells, n + 1)


def _pad_kernel(kernel: np.ndarray, shape: tuple[int, ...]) -> np.ndarray:
    # Place the kernel in the corner of a zero array of the extended shape;
    # trailing axes beyond the kernel's own are held at index 0.
    out = np.zeros(shape, dtype=np.int64)
    N = kernel.ndim
    out[tuple(slice(0, z) for z in kernel.shape) + (0,) * (len(shape) - N)] = kernel
    return out


def kernel_extend(S: Structure, K: KernelList | Sequence) -> Structure:
    """Stamp kernel ``K_alpha`` onto every cell of phase ``alpha`` after embedding.

    The new phase ``n + 1`` fills whatever no kernel covers.  Raises
    :class:`OverlapError` if two stamps claim the same cell.
    """
    if not isinstance(K, KernelList):
        K = KernelList(tuple(K))
    if len(K) != S.phases:
        raise ValueError(f"need {S.phases} kernels, got {len(K)}")
    z = K.shape
    total = None
    cells = None
    for alpha, kernel in enumerate(K.kernels, start=1):
        embedded = trivial_embed((S.cells == alpha).astype(np.int64), z)
        stamped = circ_convolve(_pad_kernel(kernel, embedded.shape), embedded)
        if total is None:
            total = np.zeros_like(stamped)
            cells = np.full(stamped.shape, S.phases + 1, dtype=np.int64)
        total += stamped
        bad = np.argwhere(total > 1)
        if len(bad):
            raise OverlapError(
                f"cell {tuple(int(v) for v in bad[0])} claimed more than once "
                f"(while stamping phase {alpha})"
            )
        cells[stamped == 1] = alpha
    return Structure(cells, S.phases + 1)


def coalesce(S: Structure, plan: CoalescencePlan | Sequence[int] | Mapping[int, int]) -> Structure:
    """Relabel phases according to ``plan``; merged phases sum their indicators."""
    if isinstance(plan, Mapping):
        plan = CoalescencePlan(tuple(plan[i] for i in range(1, len(plan) + 1)))
    elif not isinstance(plan, CoalescencePlan):
        plan = CoalescencePlan(tuple(plan))
    if plan.old_phases != S.phases:
        raise ValueError(f"plan covers {plan.old_phases} phases, structure has {S.phases}")
    lookup = np.array((0,) + plan.mapping, dtype=np.int64)
    return Structure(lookup[S.cells], plan.new_phases)


def upsample(S: Structure, factor) -> Structure:
    """Replicate every cell ``factor[d]`` times along axis ``d``."""
    factor = tuple(int(f) for f in np.atleast_1d(factor))
    if len(factor) != S.ndim:
        raise ValueError(f"factor has {len(factor)} entries, structure has {S.ndim} axes")
    if any(f < 1 for f in factor):
        raise ValueError(f"factors must be >= 1, got {factor}")
    cells = S.cells
    for axis, f in enumerate(factor):
        cells = np.repeat(cells, f, axis=axis)
    return Structure(cells, S.phases)
