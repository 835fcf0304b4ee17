"""Brute-force discovery of small 2PC-equivalent root structures.

Every assignment of phases to cells is enumerated, grouped by the exact
bytes of its independent 2PCs, and each group is reduced to structures that
are pairwise unrelated under periodic shifts, axis reflections and phase
permutations.  Groups left with at least two members are reported.
"""

from __future__ import annotations

import itertools
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterator, Sequence

import numpy as np

from .structure import BudgetExceededError, Structure, fingerprint, independent_pairs, independent_set

__all__ = [
    "DEFAULT_BUDGET",
    "GROUP_BUDGET",
    "EquivalenceClass",
    "SearchSpec",
    "canonical_form",
    "enumerate_structures",
    "enumeration_budget",
    "find_root_sets",
    "related",
    "transforms",
]

DEFAULT_BUDGET = 2**24
# Upper bound on (group size) x (cells) for materializing a whole orbit.
GROUP_BUDGET = 2**24
_CHUNK = 2**14


def enumeration_budget() -> int:
    """Candidate budget, overridable through the ``EQ2PC_BUDGET`` variable."""
    value = os.environ.get("EQ2PC_BUDGET")
    return int(value) if value else DEFAULT_BUDGET


@dataclass(frozen=True)
class SearchSpec:
    dims: tuple
    phases: int
    counts: tuple | None = None
    limit: int | None = None
    budget: int | None = None

    def __post_init__(self):
        dims = tuple(int(d) for d in np.atleast_1d(self.dims))
        if not dims or any(d < 1 for d in dims):
            raise ValueError(f"invalid dims {self.dims}")
        object.__setattr__(self, "dims", dims)
        if self.phases < 1:
            raise ValueError("phases must be >= 1")
        if self.counts is not None:
            counts = tuple(int(c) for c in self.counts)
            if len(counts) != self.phases or sum(counts) != self.size or min(counts) < 0:
                raise ValueError(f"counts {counts} must give {self.phases} phases summing to {self.size}")
            object.__setattr__(self, "counts", counts)
        if self.budget is None:
            object.__setattr__(self, "budget", enumeration_budget())

    @property
    def size(self) -> int:
        return math.prod(self.dims)

    def candidate_count(self) -> int:
        if self.counts is None:
            return self.phases**self.size
        out = math.factorial(self.size)
        for c in self.counts:
            out //= math.factorial(c)
        return out

    def check_budget(self) -> None:
        total = self.candidate_count()
        if total > self.budget:
            raise BudgetExceededError(
                f"{total} candidate structures exceed the enumeration budget {self.budget}"
            )


@dataclass
class EquivalenceClass:
    """Pairwise unrelated structures sharing one set of independent 2PCs."""

    fingerprint: str
    members: list = field(default_factory=list)


def _full_block(n: int, size: int, start: int, stop: int) -> np.ndarray:
    k = np.arange(start, stop, dtype=np.int64)[:, None]
    powers = n ** np.arange(size, dtype=np.int64)[None, :]
    return (k // powers) % n + 1


def _colex_with_counts(counts: list[int], size: int) -> Iterator[list[int]]:
    # Colexicographic order compares the last cell first, so assign cells
    # from last to first with ascending values.
    cells = [0] * size

    def rec(pos: int):
        if pos < 0:
            yield list(cells)
            return
        for value, left in enumerate(counts, start=1):
            if left:
                counts[value - 1] -= 1
                cells[pos] = value
                yield from rec(pos - 1)
                counts[value - 1] += 1

    yield from rec(size - 1)


def _blocks(spec: SearchSpec) -> Iterator[np.ndarray]:
    # Candidate cells as (batch, size) blocks in colexicographic order.
    spec.check_budget()
    n, size = spec.phases, spec.size
    if spec.counts is None:
        total = n**size
        for start in range(0, total, _CHUNK):
            yield _full_block(n, size, start, min(total, start + _CHUNK))
        return
    batch = []
    for cells in _colex_with_counts(list(spec.counts), size):
        batch.append(cells)
        if len(batch) == _CHUNK:
            yield np.array(batch, dtype=np.int64)
            batch = []
    if batch:
        yield np.array(batch, dtype=np.int64)


def enumerate_structures(spec: SearchSpec) -> Iterator[Structure]:
    """Yield every structure admitted by ``spec`` exactly once, colexicographically.

    Cell 0 (row-major flat index) varies fastest.
    """
    for block in _blocks(spec):
        for row in block:
            yield Structure(row.reshape(spec.dims), spec.phases)


def _batch_keys(block: np.ndarray, dims: tuple, n: int) -> list[bytes]:
    # Exact independent 2PCs of a whole batch via one batched FFT.
    B = block.shape[0]
    if n == 1:
        return [b""] * B
    axes = tuple(range(1, len(dims) + 1))
    cells = block.reshape((B,) + dims)
    spectra = {a: np.fft.fftn(cells == a, axes=axes) for a in range(1, n)}
    parts = []
    for a1, a2 in independent_pairs(n):
        corr = np.fft.ifftn(np.conj(spectra[a1]) * spectra[a2], axes=axes).real
        parts.append(np.rint(corr).astype("<i8").reshape(B, -1))
    keys = np.ascontiguousarray(np.concatenate(parts, axis=1))
    return [row.tobytes() for row in keys]


def _scan_range(spec: SearchSpec, blocks: Sequence[np.ndarray]) -> dict[bytes, list[np.ndarray]]:
    buckets: dict[bytes, list[np.ndarray]] = {}
    for block in blocks:
        for key, row in zip(_batch_keys(block, spec.dims, spec.phases), block):
            buckets.setdefault(key, []).append(row)
    return buckets


# ---------------------------------------------------------------------------
# symmetry group


@lru_cache(maxsize=64)
def _geometric_table(dims: tuple, axis_permutations: bool) -> np.ndarray:
    """Gather indices: row g lists, for each target cell q, the source cell of transform g."""
    D = len(dims)
    grid = np.indices(dims).reshape(D, -1)
    rows = []
    perms = [tuple(range(D))]
    if axis_permutations:
        perms = [p for p in itertools.permutations(range(D)) if all(dims[i] == dims[p[i]] for i in range(D))]
    for perm in perms:
        for signs in itertools.product((1, -1), repeat=D):
            for shift in itertools.product(*(range(d) for d in dims)):
                src = [
                    (signs[d] * grid[perm[d]] + shift[d]) % dims[d] for d in range(D)
                ]
                rows.append(np.ravel_multi_index(src, dims))
    return np.unique(np.array(rows, dtype=np.int64), axis=0)


def transforms(dims, axis_permutations: bool = False) -> np.ndarray:
    """Gather table of the shift/reflection group (one row per distinct transform)."""
    return _geometric_table(tuple(int(d) for d in dims), bool(axis_permutations))


@lru_cache(maxsize=16)
def _phase_perms(n: int) -> np.ndarray:
    # Row i maps old phase label -> new label (index 0 unused).
    perms = np.array(list(itertools.permutations(range(1, n + 1))), dtype=np.int64)
    return np.concatenate([np.zeros((len(perms), 1), dtype=np.int64), perms], axis=1)


def _lexmin(rows: np.ndarray) -> np.ndarray:
    keep = rows
    for col in range(rows.shape[1]):
        column = keep[:, col]
        keep = keep[column == column.min()]
        if len(keep) == 1:
            break
    return keep[0]


def _group_size(S: Structure, axis_permutations: bool) -> int:
    perms = math.factorial(S.ndim) if axis_permutations else 1
    return S.size * 2**S.ndim * math.factorial(S.phases) * perms


def canonical_form(S: Structure, axis_permutations: bool = False) -> bytes:
    """Lexicographically smallest image of ``S`` under its transformation group.

    Two structures share a canonical form iff :func:`related` holds.
    """
    if _group_size(S, axis_permutations) * S.size > GROUP_BUDGET:
        raise BudgetExceededError("transformation group too large for canonical forms")
    flat = S.cells.ravel()
    images = flat[transforms(S.dims, axis_permutations)]
    relabeled = _phase_perms(S.phases)[:, images].reshape(-1, S.size)
    best = _lexmin(relabeled)
    head = np.array([S.ndim, *S.dims, S.phases], dtype="<i8").tobytes()
    return head + best.astype(np.uint8 if S.phases < 256 else "<i8").tobytes()


def _bijective_relabel(a: np.ndarray, b: np.ndarray, n: int) -> bool:
    # True if some permutation of 1..n maps a onto b cell by cell.
    pairs = np.unique(a * (n + 1) + b)
    return len(pairs) == len(np.unique(a)) == len(np.unique(b))


def related(S1: Structure, S2: Structure, axis_permutations: bool = False) -> bool:
    """True iff a shift, reflection and phase permutation maps ``S1`` onto ``S2``.

    Structures with different dims or phase counts are never related.
    """
    if S1.dims != S2.dims or S1.phases != S2.phases:
        return False
    if not np.array_equal(np.sort(S1.counts()), np.sort(S2.counts())):
        return False
    flat1 = S1.cells.ravel()
    flat2 = S2.cells.ravel()
    for row in transforms(S1.dims, axis_permutations):
        if _bijective_relabel(flat1[row], flat2, S1.phases):
            return True
    return False


def _unrelated_members(rows: list[np.ndarray], spec: SearchSpec, axis_permutations: bool) -> list[Structure]:
    # Greedy reduction in input order to pairwise unrelated structures.
    members: list[Structure] = []
    seen: set[bytes] = set()
    for row in rows:
        S = Structure(row.reshape(spec.dims), spec.phases)
        try:
            key = canonical_form(S, axis_permutations)
        except BudgetExceededError:
            if all(not related(S, T, axis_permutations) for T in members):
                members.append(S)
            continue
        if key not in seen:
            seen.add(key)
            members.append(S)
    return members


def _orbit_signature(members: Sequence[Structure], axis_permutations: bool) -> frozenset:
    sig = []
    for S in members:
        try:
            sig.append(canonical_form(S, axis_permutations))
        except BudgetExceededError:
            sig.append(S.cells.tobytes())
    return frozenset(sig)


def find_root_sets(spec: SearchSpec, axis_permutations: bool = False, workers: int = 1) -> list[EquivalenceClass]:
    """All classes of at least two pairwise unrelated, 2PC-equivalent structures.

    Classes that are images of each other under the transformation group are
    reported once.  Output order follows the enumeration order of each
    class's first member.
    """
    spec.check_budget()
    if workers > 1:
        blocks = list(_blocks(spec))
        chunks = [blocks[i::workers] for i in range(workers)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            partial = list(pool.map(_scan_range, [spec] * workers, chunks))
        buckets: dict[bytes, list[np.ndarray]] = {}
        for part in partial:
            for key, rows in part.items():
                buckets.setdefault(key, []).extend(rows)
        order = {tuple(row): i for i, row in enumerate(itertools.chain.from_iterable(blocks))}
        for rows in buckets.values():
            rows.sort(key=lambda r: order[tuple(r)])
    else:
        buckets = _scan_range(spec, _blocks(spec))

    classes: list[EquivalenceClass] = []
    signatures: set[frozenset] = set()
    firsts = []
    for key, rows in buckets.items():
        if len(rows) < 2:
            continue
        members = _unrelated_members(rows, spec, axis_permutations)
        if len(members) < 2:
            continue
        # Exact re-verification of the bucket key.
        reference = independent_set(members[0])
        if not all(independent_set(m).same_as(reference) for m in members[1:]):
            raise AssertionError("fingerprint bucket holds non-equivalent structures")
        sig = _orbit_signature(members, axis_permutations)
        if sig in signatures:
            continue
        signatures.add(sig)
        classes.append(EquivalenceClass(fingerprint(reference), members))
        firsts.append(tuple(members[0].cells.ravel()[::-1]))
    ordered = [c for _, c in sorted(zip(firsts, classes), key=lambda t: t[0])]
    if spec.limit is not None:
        ordered = ordered[: spec.limit]
    return ordered
