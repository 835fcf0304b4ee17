"""Exact two-point correlations of periodic discrete structures.

Submodules
----------
ndperiodic  periodic array algebra (embedding, repetition, convolution, DFT)
structure   structures, indicators, exact 2PC/MPC, equivalence
derive      equivalence-preserving operators
search      brute-force root search
niezgoda    spectral 2PC relations and row reconstruction
homog       effective conductivity and bounds
files       JSON/raw/PPM formats and derivation databases
catalog     reference structures
"""

from .derive import CoalescencePlan, KernelList, OverlapError, coalesce, kernel_extend, phase_extend, upsample
from .structure import (
    BudgetExceededError,
    CorrelationSet,
    Structure,
    complete_correlations,
    equivalent,
    independent_set,
    indicators,
    mpc,
    two_point,
    volume_fractions,
)

__version__ = "0.1.0"
