"""Exact finite-dimensional model spaces of finite Blaschke products.

For ``theta = c * prod (z - a_j) / (1 - conj(a_j) z)`` of degree ``d`` the
model space ``K_theta = H^2 (-) theta H^2`` equals ``{p / q : deg p < d}``
with ``q(z) = prod (1 - conj(a_j) z)``.  Elements are stored by the
coefficients of the numerator ``p`` in ``C^d``; the metric

    Gamma[i, j] = <z^j / q, z^i / q>_2 ,   <x, y> = y^H Gamma x ,

is a Toeplitz matrix of Fourier coefficients of ``1 / |q|^2`` which we
evaluate by FFT (``1/|q|^2`` is real-analytic, so aliasing is below
roundoff once ``r^M`` is negligible, ``r = max |a_j|``).  Since
``H(theta) = K_theta`` isometrically, this gives the exact leg of every
computation for inner symbols.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import cholesky, solve_triangular
from scipy.signal import lfilter

from .errors import PreconditionError
from .symbols import SymbolSpec


def _poly_from_roots(zeros):
    num = np.array([1.0 + 0j])
    den = np.array([1.0 + 0j])
    for a in zeros:
        num = np.convolve(num, [-a, 1.0])
        den = np.convolve(den, [1.0, -np.conj(a)])
    return num, den


@dataclass
class ModelSpace:
    """Numerator-coordinate model of ``H(theta)`` for a finite Blaschke ``theta``.

    Attributes
    ----------
    zeros : ndarray
        Zeros of ``theta`` (with multiplicity).
    const : complex
        Unimodular constant.
    num, den : ndarray
        Ascending coefficients of ``c * prod (z - a_j)`` and ``prod (1 - conj(a_j) z)``.
    gamma : ndarray
        Metric of the numerator coordinates.
    chol : ndarray
        Upper Cholesky factor ``C`` with ``gamma = C^H C``; ``y = C x`` are
        orthonormal coordinates.
    """

    zeros: np.ndarray
    const: complex
    num: np.ndarray
    den: np.ndarray
    gamma: np.ndarray
    chol: np.ndarray

    @classmethod
    def from_symbol(cls, spec: SymbolSpec) -> ModelSpace:
        found = spec.blaschke_zeros()
        if found is None:
            raise PreconditionError("model space requires a finite Blaschke product")
        zeros, const = found
        return cls.from_zeros(zeros, const)

    @classmethod
    def from_zeros(cls, zeros, const: complex = 1.0) -> ModelSpace:
        zeros = np.asarray(zeros, dtype=complex)
        d = zeros.size
        num, den = _poly_from_roots(zeros)
        num = const * num
        r = float(np.max(np.abs(zeros))) if d else 0.0
        m = 64
        while m < 1 << 20 and (r > 0 and r**m > 1e-18):
            m *= 2
        z = np.exp(2j * np.pi * np.arange(m) / m)
        w = 1.0 / np.abs(np.polynomial.polynomial.polyval(z, den)) ** 2
        c = np.fft.fft(w) / m  # c[k] = (1/2pi) int e^{-ik t} / |q|^2
        idx = np.arange(d)
        # Gamma[i, j] = <z^j/q, z^i/q> = (1/2pi) int e^{i(j-i)t}/|q|^2 = c[i - j]
        gamma = c[(idx[:, None] - idx[None, :]) % m]
        gamma = 0.5 * (gamma + gamma.conj().T)
        chol = cholesky(gamma, lower=False) if d else np.zeros((0, 0))
        return cls(zeros, complex(const), num, den, gamma, chol)

    @property
    def dim(self) -> int:
        return self.zeros.size

    # ------------------------------------------------------------------
    def inner(self, x, y) -> complex:
        return complex(np.conj(y) @ self.gamma @ x)

    def orthonormal(self, x) -> np.ndarray:
        """Orthonormal coordinates ``C x`` of numerator vectors (columns)."""
        return self.chol @ np.asarray(x)

    def backward_shift_matrix(self) -> np.ndarray:
        """Matrix of ``S*`` on numerator coordinates: ``p -> (p - p(0) q) / z``."""
        d = self.dim
        A = np.zeros((d, d), dtype=complex)
        A[np.arange(d - 1), np.arange(1, d)] = 1.0
        A[:, 0] -= self.den[1 : d + 1]
        return A

    def x_matrix(self) -> np.ndarray:
        """``X_theta`` in orthonormal coordinates."""
        A = self.backward_shift_matrix()
        return self.chol @ A @ np.linalg.inv(self.chol)

    def orbit(self, count: int, start: int = 1) -> np.ndarray:
        """Numerators of ``S*^k theta`` for ``k = start .. start+count-1`` (columns)."""
        d = self.dim
        out = np.zeros((d, count), dtype=complex)
        if d == 0:
            return out
        # S* theta = (P - P(0) q) / (z q), numerator of degree < d
        v = (self.num - self.num[0] * self.den)[1:]
        A = self.backward_shift_matrix()
        for _ in range(start - 1):
            v = A @ v
        for k in range(count):
            out[:, k] = v
            v = A @ v
        return out

    def kernel_at_zero(self) -> np.ndarray:
        """Numerator of ``k_0 = 1 - conj(theta(0)) theta``."""
        k = self.den - np.conj(self.num[0]) * self.num
        return k[: self.dim]

    def taylor(self, x, n: int) -> np.ndarray:
        """First ``n`` Taylor coefficients of ``p / q``."""
        impulse = np.zeros(n, dtype=complex)
        impulse[0] = 1.0
        series = lfilter(np.asarray(x, dtype=complex), self.den, impulse)
        return series

    def from_taylor(self, f) -> np.ndarray:
        """Numerator coordinates of a model-space element from its Taylor data."""
        f = np.asarray(f, dtype=complex)
        p = np.convolve(f, self.den)[: self.dim]
        return p

    def gram(self, vectors) -> np.ndarray:
        """``G[i, j] = <v_i, v_j>`` for numerator columns."""
        V = np.asarray(vectors)
        return (V.conj().T @ self.gamma @ V).T

    def project(self, basis):
        """Orthogonal projection (orthonormal coordinates) onto span of ``basis``."""
        Y = self.orthonormal(basis)
        if Y.size == 0:
            return np.zeros((self.dim, self.dim), dtype=complex)
        u, s, _ = np.linalg.svd(Y, full_matrices=False)
        r = int(np.sum(s > 1e-10 * max(s.max(), 1e-300)))
        Q = u[:, :r]
        return Q @ Q.conj().T

    def solve_triangular(self, y):
        return solve_triangular(self.chol, y)
