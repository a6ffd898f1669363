"""Coefficient-space convolution kernels.

These are the hot inner loops of every right-hand-side evaluation: the
quasilinear flux h^3 (h' + h''') costs three truncated convolutions per
call and the integrator calls the RHS thousands of times per run.

Two interchangeable implementations are provided:

* a numba ``@njit`` version (default when numba is importable), and
* a pure-numpy fallback built on ``np.convolve``.

Selection happens once at import time from the ``TFILM_BACKEND``
environment variable: ``numba``, ``numpy`` or ``auto`` (default).
Both implementations are always importable by name so they can be
cross-checked and benchmarked against each other
(see benchmarks/bench_backends.py).
"""

from __future__ import annotations

import os

import numpy as np

__all__ = [
    "BACKEND",
    "conv_full",
    "conv_center",
    "conv_full_numpy",
    "conv_center_numpy",
    "conv_full_numba",
    "conv_center_numba",
]


def conv_full_numpy(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Full linear convolution of two centered coefficient arrays.

    If ``a`` covers modes -P..P and ``b`` covers -Q..Q, the result covers
    -(P+Q)..(P+Q).  This is the exact (untruncated) product of the two
    trigonometric polynomials.
    """
    return np.convolve(a, b)


def conv_center_numpy(a: np.ndarray, b: np.ndarray, half: int) -> np.ndarray:
    """Central ``2*half + 1`` coefficients of the full convolution."""
    full = np.convolve(a, b)
    mid = (full.size - 1) // 2
    return full[mid - half : mid + half + 1]


def _build_numba():
    from numba import njit

    @njit(cache=True)
    def conv_full_nb(a, b):  # pragma: no cover - exercised via dispatch
        la = a.size
        lb = b.size
        out = np.zeros(la + lb - 1, np.complex128)
        for i in range(la):
            ai = a[i]
            for j in range(lb):
                out[i + j] += ai * b[j]
        return out

    @njit(cache=True)
    def conv_center_nb(a, b, half):  # pragma: no cover - exercised via dispatch
        la = a.size
        lb = b.size
        mid = (la + lb - 2) // 2
        out = np.empty(2 * half + 1, np.complex128)
        for k in range(2 * half + 1):
            idx = mid - half + k
            s = 0.0 + 0.0j
            jlo = max(0, idx - la + 1)
            jhi = min(lb - 1, idx)
            for j in range(jlo, jhi + 1):
                s += a[idx - j] * b[j]
            out[k] = s
        return out

    return conv_full_nb, conv_center_nb


conv_full_numba = None
conv_center_numba = None

_choice = os.environ.get("TFILM_BACKEND", "auto").strip().lower()
if _choice not in ("auto", "numba", "numpy"):
    raise ValueError(
        f"TFILM_BACKEND must be 'auto', 'numba' or 'numpy', got {_choice!r}"
    )

if _choice in ("auto", "numba"):
    try:
        conv_full_numba, conv_center_numba = _build_numba()
        BACKEND = "numba"
    except ImportError:
        if _choice == "numba":
            raise
        BACKEND = "numpy"
else:
    BACKEND = "numpy"

if BACKEND == "numba":
    conv_full = conv_full_numba
    conv_center = conv_center_numba
else:
    conv_full = conv_full_numpy
    conv_center = conv_center_numpy
