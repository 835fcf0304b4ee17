"""Effective conductivity of periodic two-phase pixel structures.

Each pixel is one unit-square bilinear (Q1) element with the isotropic
conductivity of its phase.  The periodic fluctuation field is solved for the
two unit macroscopic gradients, and the volume-averaged fluxes give the
columns of the effective tensor.  Voigt/Reuss and the isotropic
Hashin-Shtrikman formulas are provided for comparison.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import cg

from .derive import upsample
from .structure import Structure

__all__ = [
    "BoundsResult",
    "ConductivityProblem",
    "EffectiveTensor",
    "SolverError",
    "bounds",
    "bounds_curve",
    "effective_conductivity",
    "hashin_shtrikman",
    "relative_deviation",
    "voigt_reuss",
]

log = logging.getLogger(__name__)


class SolverError(RuntimeError):
    """The linear solver did not reach the requested tolerance."""


def _check_inputs(v1: float, k1: float, k2: float) -> None:
    if not 0.0 <= v1 <= 1.0:
        raise ValueError(f"volume fraction {v1} outside [0, 1]")
    if k1 <= 0 or k2 <= 0:
        raise ValueError("conductivities must be positive")


def voigt_reuss(v1: float, k1: float, k2: float) -> tuple[float, float]:
    """First-order bounds: arithmetic (Voigt) and harmonic (Reuss) means."""
    v1 = float(v1)
    _check_inputs(v1, k1, k2)
    voigt = v1 * k1 + (1.0 - v1) * k2
    reuss = 1.0 / (v1 / k1 + (1.0 - v1) / k2)
    return voigt, reuss


def hashin_shtrikman(v1: float, k1: float, k2: float) -> tuple[float, float]:
    """Two-dimensional Hashin-Shtrikman values ``(upper, lower)``.

    These assume an isotropic 2PC without long-range order, so for general
    pixel structures they are estimates rather than rigorous bounds.
    """
    v1 = float(v1)
    _check_inputs(v1, k1, k2)

    def hs(k0):
        return 1.0 / (v1 / (k0 + k1) + (1.0 - v1) / (k0 + k2)) - k0

    return hs(max(k1, k2)), hs(min(k1, k2))


@dataclass(frozen=True)
class BoundsResult:
    voigt: float
    reuss: float
    hs_upper: float
    hs_lower: float


def bounds(v1: float, k1: float, k2: float) -> BoundsResult:
    voigt, reuss = voigt_reuss(v1, k1, k2)
    upper, lower = hashin_shtrikman(v1, k1, k2)
    return BoundsResult(voigt, reuss, upper, lower)


def bounds_curve(k1: float, k2: float, samples: int = 101) -> np.ndarray:
    """Table with columns ``v1, voigt, reuss, hs_upper, hs_lower`` on a uniform grid."""
    if samples < 2:
        raise ValueError("need at least two samples")
    rows = []
    for v1 in np.linspace(0.0, 1.0, samples):
        b = bounds(v1, k1, k2)
        rows.append((v1, b.voigt, b.reuss, b.hs_upper, b.hs_lower))
    return np.array(rows)


@dataclass(frozen=True)
class ConductivityProblem:
    structure: Structure
    k1: float
    k2: float

    def __post_init__(self):
        S = self.structure
        if S.ndim != 2 or S.phases != 2:
            raise ValueError("conductivity problems need a 2D two-phase structure")
        if self.k1 <= 0 or self.k2 <= 0:
            raise ValueError("conductivities must be positive")


@dataclass(frozen=True)
class EffectiveTensor:
    """Symmetrized 2x2 effective conductivity and solver diagnostics."""

    matrix: np.ndarray
    asymmetry: float = 0.0
    iterations: tuple = ()

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.matrix, dtype=dtype)

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix)


# Q1 element on the unit square, local nodes (0,0), (1,0), (1,1), (0,1) in
# (axis 0, axis 1) coordinates.
_LOCAL = np.array([(0, 0), (1, 0), (1, 1), (0, 1)])


def _q1_matrices() -> tuple[np.ndarray, np.ndarray]:
    gauss = (0.5 - 0.5 / np.sqrt(3.0), 0.5 + 0.5 / np.sqrt(3.0))
    Ke = np.zeros((4, 4))
    Bint = np.zeros((2, 4))
    for x in gauss:
        for y in gauss:
            B = np.array(
                [
                    [-(1 - y), (1 - y), y, -y],
                    [-(1 - x), -x, x, (1 - x)],
                ]
            )
            Ke += 0.25 * B.T @ B
            Bint += 0.25 * B
    return Ke, Bint


_KE, _BINT = _q1_matrices()


def _assemble(k: np.ndarray):
    P1, P2 = k.shape
    i, j = np.indices((P1, P2))
    nodes = np.stack(
        [((i + a) % P1) * P2 + (j + b) % P2 for a, b in _LOCAL], axis=-1
    ).reshape(-1, 4)
    kflat = k.ravel()
    rows = np.repeat(nodes, 4, axis=1).ravel()
    cols = np.tile(nodes, (1, 4)).ravel()
    vals = (kflat[:, None, None] * _KE[None]).reshape(-1)
    K = sp.csr_matrix((vals, (rows, cols)), shape=(P1 * P2, P1 * P2))
    return K, nodes


def _solve_cell(k: np.ndarray, rtol: float = 1e-10, maxiter: int | None = None) -> EffectiveTensor:
    K, nodes = _assemble(k)
    kflat = k.ravel()
    n_el = kflat.size
    precond = sp.diags(1.0 / K.diagonal())
    columns = []
    iterations = []
    for g in (np.array([1.0, 0.0]), np.array([0.0, 1.0])):
        # Element load -k_e * Bint^T g, scattered to nodes.
        fe = -kflat[:, None] * (g @ _BINT)[None, :]
        f = np.bincount(nodes.ravel(), weights=fe.ravel(), minlength=K.shape[0])
        count = [0]

        def callback(_):
            count[0] += 1

        v, info = cg(K, f, rtol=rtol, atol=0.0, M=precond, maxiter=maxiter or 20 * K.shape[0], callback=callback)
        if info != 0:
            raise SolverError(f"CG did not converge (info={info})")
        grads = g[None, :] + v[nodes] @ _BINT.T
        columns.append((kflat[:, None] * grads).sum(axis=0) / n_el)
        iterations.append(count[0])
    Kbar = np.column_stack(columns)
    asym = float(abs(Kbar[0, 1] - Kbar[1, 0]) / np.abs(Kbar).max())
    if asym > 1e-8:
        log.warning("effective tensor asymmetry %.3e before symmetrization", asym)
    return EffectiveTensor(0.5 * (Kbar + Kbar.T), asym, tuple(iterations))


def effective_conductivity(problem: ConductivityProblem, refinement: int | tuple = 1, rtol: float = 1e-10) -> EffectiveTensor:
    """Effective tensor of ``problem.structure`` upsampled by ``refinement``.

    Phase 1 carries ``k1`` and phase 2 ``k2``.  Entry ``[0, 0]`` is the flux
    along axis 0 under a unit gradient along axis 0.
    """
    factor = (refinement, refinement) if np.isscalar(refinement) else tuple(refinement)
    S = upsample(problem.structure, factor)
    k = np.where(S.cells == 1, float(problem.k1), float(problem.k2))
    if problem.k1 == problem.k2:
        return EffectiveTensor(float(problem.k1) * np.eye(2))
    return _solve_cell(k, rtol=rtol)


def relative_deviation(K1, K2) -> float:
    """``||K1 - K2||_F / ||K1||_F``."""
    A = np.asarray(K1, dtype=float)
    B = np.asarray(K2, dtype=float)
    denom = np.linalg.norm(A)
    if denom == 0:
        raise ZeroDivisionError("reference tensor has zero norm")
    return float(np.linalg.norm(A - B) / denom)
