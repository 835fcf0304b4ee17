"""Relations between the DFTs of the 2PCs of a structure.

With ``H[a, b] = dft(C_ab)`` and ``#a`` the cell count of phase ``a`` the
following hold for every structure and every frequency ``p``:

=================  ==================================================
``symmetry``       ``H[a,b][p] == conj(H[a,b][-p])``
``transposition``  ``H[a,b][p] == conj(H[b,a][p])``
``key_product``    ``H[a,g][p] H[g,b][p] == H[g,g][p] H[a,b][p]``
``row_sum``        ``sum_b H[a,b][p] == |P| sqrt(H[a,a][0])`` at p = 0, else 0
``inverse_sum``    ``sum_p H[a,b][p] == |P| sqrt(H[a,a][0])`` if a == b, else 0
``bound_zero``     ``0 <= H[a,b][0] <= |P|**2``
``bound_all``      ``|H[a,b][p]| <= |P|**2``
``bound_tight``    ``|H[a,b][p]| <= #a #b == H[a,b][0]``
=================  ==================================================

The division form ``H[a,b] = H[a,g] H[g,b] / H[g,g]`` breaks down wherever
``H[g,g]`` vanishes, which is what :func:`reconstruct_from_row` exposes.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import null_space

from .ndperiodic import dft, negate_index
from .structure import Structure, two_point

__all__ = [
    "EQUALITY_PROPERTIES",
    "PROPERTIES",
    "AmbiguityReport",
    "DftCorrelationMap",
    "PropertyReport",
    "Reconstruction",
    "check_map",
    "check_properties",
    "count_vanishing",
    "dft_map",
    "reconstruct_from_row",
    "vanishing_tol",
    "verify_ambiguity",
]

EQUALITY_PROPERTIES = ("symmetry", "transposition", "key_product", "row_sum", "inverse_sum")
PROPERTIES = EQUALITY_PROPERTIES + ("bound_zero", "bound_all", "bound_tight")


def vanishing_tol(dims) -> float:
    """Absolute threshold below which a DFT entry counts as zero."""
    return 1e-9 * float(np.prod(dims)) ** 2


@dataclass
class DftCorrelationMap:
    """Full ``n x n`` map of 2PC spectra, with a per-frequency known mask."""

    dims: tuple
    phases: int
    entries: dict
    known: dict = field(default_factory=dict)

    def __post_init__(self):
        self.dims = tuple(int(d) for d in self.dims)
        for key in self.entries:
            self.known.setdefault(key, np.ones(self.dims, dtype=bool))

    def __getitem__(self, key):
        return self.entries[key]

    def undetermined(self, key) -> np.ndarray:
        """Frequencies (as index tuples) of entry ``key`` that are unknown."""
        return np.argwhere(~self.known[key])

    def fully_known(self) -> bool:
        return all(mask.all() for mask in self.known.values())


def dft_map(S: Structure) -> DftCorrelationMap:
    """Spectra of all ``n**2`` 2PCs of ``S``."""
    n = S.phases
    entries = {}
    for a, b in itertools.product(range(1, n + 1), repeat=2):
        entries[(a, b)] = dft(two_point(S, a, b))
    return DftCorrelationMap(S.dims, n, entries)


@dataclass
class PropertyReport:
    """Largest violation of each property, relative to ``|P|**2``."""

    violations: dict
    tol: float

    def holds(self, name: str) -> bool:
        return self.violations[name] <= self.tol

    @property
    def passed(self) -> bool:
        return all(self.holds(name) for name in self.violations)

    def failures(self) -> list[str]:
        return [name for name in self.violations if not self.holds(name)]


def _reflect(a: np.ndarray) -> np.ndarray:
    return negate_index(a)


def check_map(H: DftCorrelationMap, tol: float = 1e-9) -> PropertyReport:
    """Evaluate every listed property on a complete spectrum map."""
    n = H.phases
    size = float(np.prod(H.dims))
    scale = size**2
    zero = (0,) * len(H.dims)
    phases = range(1, n + 1)
    counts = {a: np.sqrt(max(H[(a, a)][zero].real, 0.0)) for a in phases}
    v = dict.fromkeys(PROPERTIES, 0.0)

    def bump(name, value):
        v[name] = max(v[name], float(value) / scale)

    for a, b in itertools.product(phases, repeat=2):
        h = H[(a, b)]
        bump("symmetry", np.abs(h - np.conj(_reflect(h))).max())
        bump("transposition", np.abs(h - np.conj(H[(b, a)])).max())
        target = size * counts[a] if a == b else 0.0
        bump("inverse_sum", abs(h.sum() - target))
        h0 = h[zero]
        below = max(0.0, -h0.real)
        above = max(0.0, h0.real - scale)
        bump("bound_zero", max(below, above, abs(h0.imag)))
        bump("bound_all", max(0.0, np.abs(h).max() - scale))
        tight = counts[a] * counts[b]
        bump("bound_tight", max(0.0, np.abs(h).max() - tight, abs(h0 - tight)))
    for a, b, g in itertools.product(phases, repeat=3):
        lhs = H[(a, g)] * H[(g, b)]
        rhs = H[(g, g)] * H[(a, b)]
        v["key_product"] = max(v["key_product"], float(np.abs(lhs - rhs).max()) / scale**2)
    for a in phases:
        row = sum(H[(a, b)] for b in phases)
        target = np.zeros(H.dims, dtype=complex)
        target[zero] = size * counts[a]
        bump("row_sum", np.abs(row - target).max())
    return PropertyReport(v, tol)


def check_properties(S: Structure, tol: float = 1e-9) -> PropertyReport:
    """Verify all spectral 2PC relations for ``S``; any failure is a bug."""
    return check_map(dft_map(S), tol)


def count_vanishing(S: Structure, tol: float | None = None) -> list[int]:
    """Number of frequencies where ``dft(C_aa)`` vanishes, per phase ``a``."""
    tol = vanishing_tol(S.dims) if tol is None else tol
    out = []
    for a in range(1, S.phases + 1):
        spectrum = dft(two_point(S, a, a))
        out.append(int((np.abs(spectrum) <= tol).sum()))
    return out


# ---------------------------------------------------------------------------
# reconstruction from one row


@dataclass
class Reconstruction:
    """Outcome of completing all spectra from the row of phase ``gamma``.

    ``division`` holds the map reachable through the row-sum, transposition
    and division rules alone.  ``completed`` additionally applies the linear
    constraints (DFT symmetry, transposition, row sums, inverse sums) and
    keeps an entry unknown only if those constraints leave it free.
    """

    gamma: int
    division: DftCorrelationMap
    completed: DftCorrelationMap
    undetermined_frequencies: list
    resolved_by_constraints: dict

    @property
    def unique(self) -> bool:
        return self.completed.fully_known()


def _frequencies(mask: np.ndarray) -> list:
    pts = [tuple(int(v) for v in p) for p in np.argwhere(mask)]
    return [p[0] if len(p) == 1 else p for p in pts]


def reconstruct_from_row(dims, n: int, gamma: int, row: dict, tol: float | None = None) -> Reconstruction:
    """Complete a spectrum map from ``{b: dft(C_gamma_b)}`` for ``b < n``.

    The row entry for phase ``n`` follows from the row sum, the column from
    conjugate transposition, and every other entry from division by
    ``dft(C_gamma_gamma)`` where that spectrum is nonzero.  Frequencies where
    it vanishes are marked unknown, never zero-filled.
    """
    dims = tuple(int(d) for d in np.atleast_1d(dims))
    size = float(np.prod(dims))
    zero = (0,) * len(dims)
    tol = vanishing_tol(dims) if tol is None else tol
    if not 1 <= gamma <= n:
        raise ValueError(f"gamma {gamma} outside 1..{n}")
    needed = list(range(1, n)) + ([n] if gamma == n else [])
    missing = [b for b in needed if b not in row]
    if missing:
        # With gamma == n the count #n solves a quadratic with two admissible
        # roots, so the diagonal has to be supplied.
        raise ValueError(f"row is missing phases {missing}")
    H: dict = {}
    known: dict = {}
    ones = np.ones(dims, dtype=bool)
    for b in sorted(set(needed) | set(row)):
        H[(gamma, b)] = np.asarray(row[b], dtype=complex)
        if H[(gamma, b)].shape != dims:
            raise ValueError(f"row entry {b} has shape {H[(gamma, b)].shape}, expected {dims}")
    g0 = H[(gamma, gamma)][zero]
    if abs(g0.imag) > tol or g0.real < -tol:
        raise ValueError("diagonal spectrum at zero frequency must be a nonnegative real")
    count = np.sqrt(max(g0.real, 0.0))
    expected = np.zeros(dims, dtype=complex)
    expected[zero] = size * count
    if gamma != n:
        H[(gamma, n)] = expected - sum(H[(gamma, b)] for b in range(1, n))
    elif np.abs(sum(H[(gamma, b)] for b in range(1, n + 1)) - expected).max() > tol:
        raise ValueError("row violates the row-sum relation")
    for b in range(1, n + 1):
        known[(gamma, b)] = ones.copy()
        H[(b, gamma)] = np.conj(H[(gamma, b)])
        known[(b, gamma)] = ones.copy()
    diag = H[(gamma, gamma)]
    ok = np.abs(diag) > tol
    safe = np.where(ok, diag, 1.0)
    for a, b in itertools.product(range(1, n + 1), repeat=2):
        if gamma in (a, b):
            continue
        H[(a, b)] = np.where(ok, H[(a, gamma)] * H[(gamma, b)] / safe, 0.0)
        known[(a, b)] = ok.copy()
    division = DftCorrelationMap(dims, n, {k: v.copy() for k, v in H.items()}, {k: m.copy() for k, m in known.items()})
    completed, resolved = _solve_linear(division)
    return Reconstruction(gamma, division, completed, _frequencies(~ok), resolved)


def _solve_linear(H: DftCorrelationMap) -> tuple[DftCorrelationMap, dict]:
    # Unknown complex entries become pairs of real unknowns; every linear
    # relation is imposed, the least-squares solution taken, and an unknown
    # counts as determined iff it is orthogonal to the null space.
    dims, n = H.dims, H.phases
    size = float(np.prod(dims))
    zero = (0,) * len(dims)
    shape = dims
    unknown = []
    index = {}
    for key in sorted(H.entries):
        for p in (tuple(int(v) for v in q) for q in np.argwhere(~H.known[key])):
            index[(key, p)] = len(unknown)
            unknown.append((key, p))
    entries = {k: v.copy() for k, v in H.entries.items()}
    known = {k: m.copy() for k, m in H.known.items()}
    if not unknown:
        return DftCorrelationMap(dims, n, entries, known), {}

    rows: list[dict] = []
    rhs: list[complex] = []

    def term(key, p, coef, eq, const, conj=False):
        # Adds coef * H[key][p] (conjugated if conj) to the equation or to
        # its constant part when the entry is already known.
        if (key, p) in index:
            eq.setdefault(index[(key, p)], []).append((coef, conj))
            return const
        value = entries[key][p]
        return const + coef * (np.conj(value) if conj else value)

    def add(eq, const):
        if eq:
            rows.append(eq)
            rhs.append(-const)

    counts = {a: np.sqrt(max(entries[(a, a)][zero].real, 0.0)) if known[(a, a)][zero] else None for a in range(1, n + 1)}
    missing = [a for a, c in counts.items() if c is None]
    if len(missing) == 1:
        # the counts add up to the cell count
        counts[missing[0]] = size - sum(c for c in counts.values() if c is not None)
    freqs = [tuple(int(v) for v in p) for p in np.ndindex(*shape)]
    for key in sorted(entries):
        a, b = key
        for p in freqs:
            if (key, p) not in index:
                continue
            neg = tuple((-v) % d for v, d in zip(p, dims))
            eq: dict = {}
            const = term(key, p, 1.0, eq, 0.0)
            const = term(key, neg, -1.0, eq, const, conj=True)
            add(eq, const)
            eq = {}
            const = term(key, p, 1.0, eq, 0.0)
            const = term((b, a), p, -1.0, eq, const, conj=True)
            add(eq, const)
    for a in range(1, n + 1):
        if counts[a] is None:
            continue
        for p in freqs:
            eq = {}
            const = -size * counts[a] if p == zero else 0.0
            for b in range(1, n + 1):
                const = term((a, b), p, 1.0, eq, const)
            add(eq, const)
        for b in range(1, n + 1):
            eq = {}
            const = -size * counts[a] if a == b else 0.0
            for p in freqs:
                const = term((a, b), p, 1.0, eq, const)
            add(eq, const)

    m = len(unknown)
    A = np.zeros((2 * len(rows), 2 * m))
    y = np.zeros(2 * len(rows))
    for i, (eq, r) in enumerate(zip(rows, rhs)):
        y[2 * i], y[2 * i + 1] = r.real, r.imag
        for j, items in eq.items():
            for c, conj in items:
                # c * (x + i y) or c * (x - i y)
                A[2 * i, 2 * j] += c
                A[2 * i + 1, 2 * j + 1] += -c if conj else c
    if A.size == 0:
        return DftCorrelationMap(dims, n, entries, known), {}
    x, *_ = np.linalg.lstsq(A, y, rcond=None)
    free = null_space(A, rcond=1e-10)
    resolved: dict = {}
    for j, (key, p) in enumerate(unknown):
        if free.size and np.abs(free[2 * j : 2 * j + 2]).max() > 1e-8:
            continue
        entries[key][p] = complex(x[2 * j], x[2 * j + 1])
        known[key][p] = True
        resolved.setdefault(key, []).append(p[0] if len(p) == 1 else p)
    return DftCorrelationMap(dims, n, entries, known), resolved


# ---------------------------------------------------------------------------
# ambiguity


@dataclass
class AmbiguityReport:
    """Pass/fail per condition for a perturbed spectrum map."""

    row_unchanged: bool
    properties: PropertyReport

    @property
    def checks(self) -> dict:
        out = {"row_unchanged": self.row_unchanged}
        for name in EQUALITY_PROPERTIES + ("bound_zero", "bound_all", "bound_tight"):
            out[name] = self.properties.holds(name)
        return out

    @property
    def passed(self) -> bool:
        return all(self.checks.values())


def verify_ambiguity(S: Structure, gamma: int, delta: dict, tol: float = 1e-9) -> AmbiguityReport:
    """Check that ``dft_map(S) + delta`` keeps row ``gamma`` and every relation.

    ``delta`` maps phase pairs to arrays of the structure's dims; missing
    pairs are zero.  A passing report shows that row ``gamma`` does not pin
    down the remaining spectra.
    """
    H = dft_map(S)
    for key, d in delta.items():
        if np.shape(d) != S.dims:
            raise ValueError(f"perturbation {key} has shape {np.shape(d)}, expected {S.dims}")
        if key not in H.entries:
            raise ValueError(f"perturbation for unknown phase pair {key}")
    perturbed = {k: v + np.asarray(delta.get(k, 0.0), dtype=complex) for k, v in H.entries.items()}
    scale = float(np.prod(S.dims)) ** 2
    row_ok = all(
        np.abs(perturbed[(gamma, b)] - H[(gamma, b)]).max() <= tol * scale
        for b in range(1, S.phases + 1)
    )
    report = check_map(DftCorrelationMap(S.dims, S.phases, perturbed), tol)
    return AmbiguityReport(row_ok, report)
