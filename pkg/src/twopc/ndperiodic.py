"""Algebra of periodic multidimensional arrays.

Every array ``A`` of shape ``P = (P1, ..., PD)`` is read as the unit cell of
a ``P``-periodic field, so any integer index is valid after component-wise
reduction modulo ``P``.  Arrays are plain :class:`numpy.ndarray` objects;
axis 0 carries the first period ``P1`` (row-major layout).

Integer inputs give exact integer outputs for convolution and correlation.
The FFT route is used whenever a floating-point error bound guarantees that
rounding recovers the exact result, otherwise direct summation takes over.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

__all__ = [
    "FFT_EXACT_LIMIT",
    "circ_convolve",
    "circ_correlate",
    "dft",
    "direct_convolve",
    "direct_correlate",
    "idft",
    "mod_index",
    "negate_index",
    "repeat",
    "trivial_embed",
]

# Above this many cells integer results are never routed through the FFT.
FFT_EXACT_LIMIT = 2**20


def _shape_vector(z) -> tuple[int, ...]:
    z = tuple(int(v) for v in np.atleast_1d(z))
    if not z:
        raise ValueError("shape vector must have at least one entry")
    if any(v < 1 for v in z):
        raise ValueError(f"shape vector entries must be >= 1, got {z}")
    return z


def mod_index(p: Sequence[int] | int, P: Sequence[int] | int) -> tuple[int, ...]:
    """Reduce the index ``p`` component-wise into ``[0, P_d)``.

    >>> mod_index(-2, 5)
    (3,)
    >>> mod_index((7, -1), (5, 3))
    (2, 2)
    """
    p = tuple(int(v) for v in np.atleast_1d(p))
    P = tuple(int(v) for v in np.atleast_1d(P))
    if len(p) != len(P):
        raise ValueError(f"index has {len(p)} components, period vector has {len(P)}")
    # Python's % already returns the positive remainder for positive moduli.
    return tuple(a % b for a, b in zip(p, P))


def trivial_embed(A, z) -> np.ndarray:
    """Insert ``A`` at stride ``z`` into a zero array.

    For ``len(z) <= A.ndim`` the leading axes are stretched by ``z``.  For
    ``len(z) > A.ndim`` the array additionally gains ``len(z) - A.ndim``
    trailing axes of lengths ``z[D:]``; values are placed only at trailing
    index 0.
    """
    A = np.asarray(A)
    z = _shape_vector(z)
    D, N = A.ndim, len(z)
    if N <= D:
        shape = tuple(zr * Pr for zr, Pr in zip(z, A.shape)) + A.shape[N:]
        out = np.zeros(shape, dtype=A.dtype)
        out[tuple(slice(None, None, zr) for zr in z)] = A
    else:
        shape = tuple(zr * Pr for zr, Pr in zip(z, A.shape)) + z[D:]
        out = np.zeros(shape, dtype=A.dtype)
        out[tuple(slice(None, None, zr) for zr in z[:D]) + (0,) * (N - D)] = A
    return out


def repeat(A, z) -> np.ndarray:
    """Tile ``A`` periodically ``z_r`` times along axis ``r``.

    New trailing axes (``len(z) > A.ndim``) hold copies of ``A``, i.e. the
    result is constant along them.
    """
    A = np.asarray(A)
    z = _shape_vector(z)
    D, N = A.ndim, len(z)
    if N <= D:
        return np.tile(A, z + (1,) * (D - N))
    return np.tile(A.reshape(A.shape + (1,) * (N - D)), z)


def negate_index(A) -> np.ndarray:
    """Return ``B`` with ``B[p] = A[-p mod P]``."""
    A = np.asarray(A)
    axes = tuple(range(A.ndim))
    return np.roll(np.flip(A, axis=axes), 1, axis=axes)


def dft(A) -> np.ndarray:
    """Unnormalized forward DFT over all axes (negative exponent)."""
    return np.fft.fftn(np.asarray(A))


def idft(A_hat) -> np.ndarray:
    """Inverse DFT over all axes, including the ``1/(P1...PD)`` factor."""
    return np.fft.ifftn(np.asarray(A_hat))


def _result_dtype(A: np.ndarray, B: np.ndarray) -> np.dtype:
    return np.result_type(A, B)


def _is_integer(dtype: np.dtype) -> bool:
    return np.issubdtype(dtype, np.integer) or np.issubdtype(dtype, np.bool_)


def _check_dims(A: np.ndarray, B: np.ndarray) -> None:
    if A.shape != B.shape:
        raise ValueError(f"period vectors differ: {A.shape} vs {B.shape}")


def _fft_roundoff_bound(A: np.ndarray, B: np.ndarray) -> float:
    # Standard a-priori bound for FFT-based products: the absolute error of
    # each output entry scales with eps * log2(size) * ||A||_1 * ||B||_1.
    size = A.size
    eps = np.finfo(np.float64).eps
    l1a = float(np.abs(A).sum(dtype=np.float64))
    l1b = float(np.abs(B).sum(dtype=np.float64))
    return 8.0 * eps * max(1.0, np.log2(size)) * l1a * l1b


def _use_fft(A: np.ndarray, B: np.ndarray) -> bool:
    return A.size <= FFT_EXACT_LIMIT and _fft_roundoff_bound(A, B) < 0.5


def direct_correlate(A, B) -> np.ndarray:
    """Correlation ``sum_q A[q] B[q + p]`` by explicit summation.

    Loops over the nonzero entries of ``A`` and accumulates shifted copies of
    ``B``, so the cost is ``nnz(A) * size``.
    """
    A = np.asarray(A)
    B = np.asarray(B)
    _check_dims(A, B)
    dtype = _result_dtype(A, B)
    if _is_integer(dtype):
        dtype = np.int64
    out = np.zeros(A.shape, dtype=dtype)
    axes = tuple(range(A.ndim))
    for q in zip(*np.nonzero(A)):
        # (A ⊛ B)[p] picks up A[q] * B[q + p]  ->  roll B back by q.
        out += A[q] * np.roll(B, tuple(-v for v in q), axis=axes)
    return out


def direct_convolve(A, B) -> np.ndarray:
    """Convolution ``sum_q A[q] B[p - q]`` by explicit summation."""
    A = np.asarray(A)
    B = np.asarray(B)
    _check_dims(A, B)
    dtype = _result_dtype(A, B)
    if _is_integer(dtype):
        dtype = np.int64
    out = np.zeros(A.shape, dtype=dtype)
    axes = tuple(range(A.ndim))
    for q in zip(*np.nonzero(A)):
        out += A[q] * np.roll(B, q, axis=axes)
    return out


def _finish(values: np.ndarray, dtype: np.dtype) -> np.ndarray:
    if _is_integer(dtype):
        return np.rint(values.real).astype(np.int64)
    if np.issubdtype(dtype, np.complexfloating):
        return values
    return values.real


def circ_convolve(A, B) -> np.ndarray:
    """Circular convolution ``(A * B)[p] = sum_q A[q] B[p - q]``.

    Integer inputs return exact ``int64`` arrays; real inputs return real
    arrays; anything complex returns complex.
    """
    A = np.asarray(A)
    B = np.asarray(B)
    _check_dims(A, B)
    dtype = _result_dtype(A, B)
    if _is_integer(dtype) and not _use_fft(A, B):
        return direct_convolve(A, B)
    return _finish(idft(dft(A) * dft(B)), dtype)


def circ_correlate(A, B) -> np.ndarray:
    """Circular correlation ``(A ⊛ B)[p] = sum_q A[q] B[q + p]``.

    Computed as ``idft(conj(dft(conj(A))) * dft(B))``.  Integer inputs give
    exact ``int64`` results.
    """
    A = np.asarray(A)
    B = np.asarray(B)
    _check_dims(A, B)
    dtype = _result_dtype(A, B)
    if _is_integer(dtype) and not _use_fft(A, B):
        return direct_correlate(A, B)
    return _finish(idft(np.conj(dft(np.conj(A))) * dft(B)), dtype)
