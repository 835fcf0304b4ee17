"""Periodic n-phase structures and their exact correlations.

Phase labels are 1-based everywhere in the public interface: a structure
with ``n`` phases stores integer cells in ``{1, ..., n}``.  Correlations are
kept non-normalized, so every 2PC and MPC is an exact integer array.
"""

from __future__ import annotations

import hashlib
import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Sequence

import numpy as np

from .ndperiodic import circ_correlate, negate_index

__all__ = [
    "BudgetExceededError",
    "CorrelationSet",
    "InconsistentCorrelationError",
    "MPC_BUDGET",
    "Structure",
    "complete_correlations",
    "equivalent",
    "fingerprint",
    "independent_pairs",
    "independent_set",
    "indicators",
    "mpc",
    "mpc_deviation",
    "two_point",
    "volume_fractions",
]

# Maximum number of entries of a materialized M-point correlation.
MPC_BUDGET = 2**26


class BudgetExceededError(RuntimeError):
    """A computation would exceed its configured size budget."""


class InconsistentCorrelationError(ValueError):
    """A correlation set cannot belong to any structure."""


@dataclass(frozen=True, eq=False)
class Structure:
    """Unit cell of a periodic structure with phases ``1..phases``.

    ``cells`` is stored as a read-only ``int64`` array; its shape is the
    period vector.
    """

    cells: np.ndarray
    phases: int

    def __post_init__(self):
        cells = np.array(self.cells, dtype=np.int64, copy=True)
        if cells.ndim == 0:
            raise ValueError("a structure needs at least one axis")
        if cells.size == 0:
            raise ValueError("a structure needs at least one cell")
        n = int(self.phases)
        if n < 1:
            raise ValueError(f"phase count must be >= 1, got {n}")
        if cells.min() < 1 or cells.max() > n:
            raise ValueError(f"cell values must lie in 1..{n}")
        cells.setflags(write=False)
        object.__setattr__(self, "cells", cells)
        object.__setattr__(self, "phases", n)

    @classmethod
    def from_cells(cls, cells, phases: int | None = None) -> "Structure":
        """Build a structure, inferring the phase count from the largest label."""
        cells = np.asarray(cells)
        return cls(cells, int(cells.max()) if phases is None else phases)

    @property
    def dims(self) -> tuple[int, ...]:
        return self.cells.shape

    @property
    def ndim(self) -> int:
        return self.cells.ndim

    @property
    def size(self) -> int:
        return self.cells.size

    def counts(self) -> np.ndarray:
        """Number of cells per phase, index 0 for phase 1."""
        return np.bincount(self.cells.ravel(), minlength=self.phases + 1)[1:]

    def __eq__(self, other):
        if not isinstance(other, Structure):
            return NotImplemented
        return (
            self.phases == other.phases
            and self.dims == other.dims
            and bool(np.array_equal(self.cells, other.cells))
        )

    def __hash__(self):
        return hash((self.phases, self.dims, self.cells.tobytes()))

    def __repr__(self):
        return f"Structure(dims={self.dims}, phases={self.phases})"


def _check_phase(S: Structure, alpha: int) -> int:
    alpha = int(alpha)
    if not 1 <= alpha <= S.phases:
        raise ValueError(f"phase index {alpha} outside 1..{S.phases}")
    return alpha


def indicators(S: Structure) -> list[np.ndarray]:
    """Binary indicator arrays ``I_1, ..., I_n`` (as ``int64``)."""
    return [(S.cells == a).astype(np.int64) for a in range(1, S.phases + 1)]


def two_point(S: Structure, alpha1: int, alpha2: int) -> np.ndarray:
    """Exact 2PC ``C_{alpha1 alpha2} = I_alpha1 ⊛ I_alpha2``."""
    a1 = _check_phase(S, alpha1)
    a2 = _check_phase(S, alpha2)
    return circ_correlate(S.cells == a1, S.cells == a2)


def independent_pairs(n: int) -> list[tuple[int, int]]:
    """Pairs ``(a1, a2)`` with ``a1 <= a2 <= n - 1``, in lexicographic order."""
    return [(a1, a2) for a1 in range(1, n) for a2 in range(a1, n)]


@dataclass(frozen=True)
class CorrelationSet:
    """The ``n(n-1)/2`` independent 2PCs of an ``n``-phase structure."""

    dims: tuple[int, ...]
    phases: int
    entries: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))
        expected = set(independent_pairs(self.phases))
        if set(self.entries) != expected:
            raise ValueError(f"entries must be exactly the pairs {sorted(expected)}")
        for key, value in self.entries.items():
            if np.shape(value) != self.dims:
                raise ValueError(f"entry {key} has shape {np.shape(value)}, expected {self.dims}")

    def __getitem__(self, key):
        return self.entries[key]

    def to_bytes(self) -> bytes:
        """Canonical serialization: header then entries in sorted pair order."""
        head = np.array([len(self.dims), *self.dims, self.phases], dtype="<i8").tobytes()
        body = b"".join(
            np.ascontiguousarray(self.entries[k], dtype="<i8").tobytes()
            for k in sorted(self.entries)
        )
        return head + body

    def same_as(self, other: "CorrelationSet") -> bool:
        if self.dims != other.dims or self.phases != other.phases:
            return False
        return all(np.array_equal(self.entries[k], other.entries[k]) for k in self.entries)


def independent_set(S: Structure) -> CorrelationSet:
    """Independent 2PCs of ``S``; empty for a single-phase structure."""
    entries = {pair: two_point(S, *pair) for pair in independent_pairs(S.phases)}
    return CorrelationSet(S.dims, S.phases, entries)


def fingerprint(cs: CorrelationSet | Structure) -> str:
    """SHA-256 hex digest of the canonical serialization of the independent set."""
    if isinstance(cs, Structure):
        cs = independent_set(cs)
    return hashlib.sha256(cs.to_bytes()).hexdigest()


def complete_correlations(cs: CorrelationSet, total_cells: int | None = None) -> dict:
    """Recover all ``n**2`` 2PCs from the independent set.

    Transposed pairs come from index negation, the last row and column from
    ``C_{a n} = C_{a a}[0] * 1 - sum_{b < n} C_{a b}``.  The last diagonal entry
    needs the total cell count, which equals ``prod(dims)``.

    Raises :class:`InconsistentCorrelationError` if a completed entry is
    negative.
    """
    n = cs.phases
    dims = cs.dims
    size = int(np.prod(dims)) if total_cells is None else int(total_cells)
    full: dict[tuple[int, int], np.ndarray] = {}
    if n == 1:
        full[(1, 1)] = np.full(dims, size, dtype=np.int64)
        return full
    zero = (0,) * len(dims)
    for (a1, a2), c in cs.entries.items():
        full[(a1, a2)] = np.asarray(c, dtype=np.int64)
        if a1 != a2:
            full[(a2, a1)] = negate_index(c).astype(np.int64)
    for a in range(1, n):
        c_an = full[(a, a)][zero] - sum(full[(a, b)] for b in range(1, n))
        full[(a, n)] = np.asarray(c_an, dtype=np.int64)
        full[(n, a)] = negate_index(c_an).astype(np.int64)
    count_n = size - sum(int(full[(a, a)][zero]) for a in range(1, n))
    full[(n, n)] = count_n - sum(full[(n, b)] for b in range(1, n))
    for key, value in full.items():
        if (value < 0).any():
            raise InconsistentCorrelationError(f"completed 2PC {key} has negative entries")
    return full


def equivalent(S1: Structure, S2: Structure) -> bool:
    """True iff both structures share dims, phase count and every 2PC."""
    if S1.dims != S2.dims or S1.phases != S2.phases:
        return False
    if not np.array_equal(S1.counts(), S2.counts()):
        return False
    return independent_set(S1).same_as(independent_set(S2))


def volume_fractions(S: Structure) -> list[Fraction]:
    """Exact phase fractions ``#alpha / prod(dims)``."""
    return [Fraction(int(c), S.size) for c in S.counts()]


def _shift_products(S: Structure, alphas: Sequence[int]) -> Iterator[tuple[tuple, np.ndarray]]:
    # Yields (leading shifts, I_a1(q) * I_a2(q + p1) * ... * I_a(M-1)(q + p(M-2)))
    ind = {a: (S.cells == a).astype(np.int64) for a in set(alphas)}
    axes = tuple(range(S.ndim))
    middle = alphas[1:-1]
    shifts = list(itertools.product(*(range(d) for d in S.dims)))
    for lead in itertools.product(shifts, repeat=len(middle)):
        prod = ind[alphas[0]].copy()
        for a, p in zip(middle, lead):
            prod *= np.roll(ind[a], tuple(-v for v in p), axis=axes)
        yield lead, prod


def _check_alphas(S: Structure, alphas: Sequence[int]) -> tuple[int, ...]:
    alphas = tuple(_check_phase(S, a) for a in alphas)
    if len(alphas) < 2:
        raise ValueError("an M-point correlation needs M >= 2 phases")
    return alphas


def mpc(S: Structure, alphas: Sequence[int], budget: int = MPC_BUDGET) -> np.ndarray:
    """Full M-point correlation for the phase vector ``alphas``.

    The result has ``M - 1`` blocks of ``S.ndim`` axes; entry
    ``[p1, ..., p(M-1)]`` counts cells ``q`` with ``S[q] = a1`` and
    ``S[q + pj] = a(j+1)`` for all ``j``.
    """
    alphas = _check_alphas(S, alphas)
    M = len(alphas)
    total = S.size ** (M - 1)
    if total > budget:
        raise BudgetExceededError(
            f"{M}-point correlation has {total} entries, budget is {budget}; "
            "use mpc_deviation for a streamed reduction"
        )
    out = np.empty(S.dims * (M - 1), dtype=np.int64)
    last = (S.cells == alphas[-1]).astype(np.int64)
    for lead, prod in _shift_products(S, alphas):
        index = tuple(itertools.chain.from_iterable(lead))
        out[index] = circ_correlate(prod, last)
    return out


def mpc_deviation(S1: Structure, S2: Structure, alphas: Sequence[int]) -> tuple[float, float]:
    """Streamed Frobenius norms ``(||C(1) - C(2)||, ||C(1)||)`` of an MPC pair.

    The arrays are never materialized: one correlation slice per combination
    of leading shifts is accumulated at a time.
    """
    if S1.dims != S2.dims:
        raise ValueError(f"dims differ: {S1.dims} vs {S2.dims}")
    alphas = _check_alphas(S1, alphas)
    _check_alphas(S2, alphas)
    last1 = (S1.cells == alphas[-1]).astype(np.int64)
    last2 = (S2.cells == alphas[-1]).astype(np.int64)
    diff_sq = 0
    ref_sq = 0
    for (_, prod1), (_, prod2) in zip(_shift_products(S1, alphas), _shift_products(S2, alphas)):
        c1 = circ_correlate(prod1, last1)
        c2 = circ_correlate(prod2, last2)
        # Python ints: exact accumulation without overflow.
        diff_sq += int(((c1 - c2) ** 2).sum())
        ref_sq += int((c1**2).sum())
    return float(np.sqrt(diff_sq)), float(np.sqrt(ref_sq))
