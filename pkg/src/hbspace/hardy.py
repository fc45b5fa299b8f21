"""Truncated Hardy-space linear algebra.

Elements of H^2 are represented by their first ``N`` Taylor coefficients
as 1-d complex numpy arrays.  Boundary functions enter through a
:class:`~hbspace.symbols.BoundaryGrid`.
"""

from __future__ import annotations

import numpy as np
from scipy.linalg import toeplitz

from .errors import TruncationError


def h2_inner(f, g) -> complex:
    """``<f, g>_2 = sum_k f_k conj(g_k)`` over the common range."""
    f = np.asarray(f)
    g = np.asarray(g)
    n = min(f.size, g.size)
    return complex(np.vdot(g[:n], f[:n]))


def shift(f, direction: str = "forward", power: int = 1, grow: bool = False):
    """Forward shift ``S^n`` or backward shift ``S*^n`` of a coefficient vector.

    Parameters
    ----------
    f : array_like
        Taylor coefficients.
    direction : {"forward", "backward"}
    power : int
        Number of steps.
    grow : bool
        For the forward shift, lengthen the vector instead of requiring
        headroom (trailing zeros) to absorb the overflow.

    Raises
    ------
    TruncationError
        Forward shift would push nonzero coefficients past the end.

    Examples
    --------
    >>> shift([1, 2, 3, 4], "backward", 2)
    array([3, 4])
    """
    f = np.asarray(f)
    if power < 0:
        raise ValueError("power must be nonnegative")
    if direction == "backward":
        return f[power:].copy()
    if direction != "forward":
        raise ValueError(f"unknown direction {direction!r}")
    out = np.concatenate([np.zeros(power, dtype=f.dtype), f])
    if grow:
        return out
    if np.any(f[f.size - power:] != 0):
        raise TruncationError("forward shift overflows the truncation")
    return out[: f.size]


def toeplitz_conj_apply(b, f):
    """``T_{conj b} f``, i.e. ``(T f)_j = sum_k conj(b_k) f_{j+k}``.

    Exact at truncation since the co-analytic Toeplitz operator never
    raises the degree; ``b`` must be given to at least ``len(f)`` terms.
    """
    f = np.asarray(f, dtype=complex)
    b = np.asarray(b, dtype=complex)
    n = f.size
    if b.size < n:
        b = np.concatenate([b, np.zeros(n - b.size, dtype=complex)])
    full = np.convolve(np.conj(b[:n]), f[::-1])
    return full[:n][::-1].copy()


def toeplitz_analytic_matrix(b, n: int, headroom: int = 0) -> np.ndarray:
    """Matrix of multiplication by ``b`` from degree ``< n`` into degree ``< n + headroom``."""
    rows = n + headroom
    col = np.zeros(rows, dtype=complex)
    b = np.asarray(b, dtype=complex)[:rows]
    col[: b.size] = b
    row = np.zeros(n, dtype=complex)
    row[0] = col[0]
    return toeplitz(col, row)


def weighted_inner(rho, j: int, k: int) -> complex:
    """``<z^j, z^k>`` in ``L^2(rho dtheta/2pi)`` by spectral quadrature.

    ``rho`` is a :class:`BoundaryGrid` (its ``rho_samples`` are used) or an
    array of samples on the uniform grid.
    """
    samples = np.asarray(getattr(rho, "rho_samples", rho), dtype=float)
    theta = 2.0 * np.pi * np.arange(samples.size) / samples.size
    return complex(np.mean(np.exp(1j * (j - k) * theta) * samples))


def cauchy_transform(rho, f, n: int, offset: int = 0):
    """Analytic projection ``P(rho f)``, first ``n`` Taylor coefficients.

    ``f`` holds Laurent coefficients starting at power ``offset`` (so
    ``offset=-1`` represents ``conj(z) p`` for a polynomial ``p``).  The
    product is formed on the grid of ``rho``; ``f`` must be band-limited
    well inside half the grid size.
    """
    samples = np.asarray(getattr(rho, "rho_samples", rho), dtype=float)
    m = samples.size
    f = np.asarray(f, dtype=complex)
    if f.size + abs(offset) > m // 2 or n > m // 2:
        raise TruncationError("grid too coarse for the requested transform")
    spectrum = np.zeros(m, dtype=complex)
    idx = (np.arange(f.size) + offset) % m
    spectrum[idx] = f
    values = m * np.fft.ifft(spectrum)
    modes = np.fft.fft(samples * values) / m
    return modes[:n].copy()


def tail_inner(b, m: int, n: int) -> complex:
    """``<S*^m b, S*^n b>_2 = sum_j b_{m+j} conj(b_{n+j})`` over the available terms."""
    if m < 0 or n < 0:
        raise ValueError("indices must be nonnegative")
    b = np.asarray(b, dtype=complex)
    length = b.size - max(m, n)
    if length <= 0:
        return 0j
    return complex(np.vdot(b[n : n + length], b[m : m + length]))


def tail_bound(b, m: int, n: int, total_energy: float) -> float:
    """Cauchy-Schwarz bound on the part of :func:`tail_inner` beyond the data.

    ``total_energy`` is ``||b||_2^2`` (for instance ``m_0`` from quadrature);
    the energy not represented in ``b`` bounds the missing terms.
    """
    b = np.asarray(b, dtype=complex)
    missing = max(total_energy - float(np.sum(np.abs(b) ** 2)), 0.0)
    tm = float(np.sum(np.abs(b[m:]) ** 2))
    tn = float(np.sum(np.abs(b[n:]) ** 2))
    return float(np.sqrt((tm + missing) * missing) + np.sqrt((tn + missing) * missing))
