"""Reducibility tests specific to finite Blaschke products.

Two independent routes are offered.  :func:`inner_case_check` applies the
structural criterion (``theta`` even, or ``theta = p * B`` with ``p`` even and
``B`` a single Blaschke factor).  :func:`commutant_projection_check` solves
the commutant equations of a compressed shift directly in the exact model
space and looks for nontrivial orthogonal projections.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import PreconditionError
from .model_space import ModelSpace
from .symbols import SymbolSpec, parity_classify

_PARITY_TERMS = 512


def _blaschke_coefficients(zeros, const, n=_PARITY_TERMS):
    if len(zeros) == 0:
        return np.concatenate([[const], np.zeros(n - 1)])
    return const * SymbolSpec.blaschke(list(zeros)).coefficients(n)


def _is_even(zeros, const, tol):
    return parity_classify(_blaschke_coefficients(zeros, const), tol=tol).label == "even"


@dataclass(frozen=True)
class InnerCaseResult:
    """Verdict of the structural test.

    Attributes
    ----------
    reducible : bool
    structure : str
        ``"even"``, ``"factor"`` (``theta = p B_{-mu}`` with ``p`` even),
        ``"trivial_dimension"`` (degree at most one) or ``"none"``.
    mu : complex or None
        Witness: the factor ``(z + mu) / (1 + conj(mu) z)``.
    p_zeros : tuple
        Zeros of the even cofactor ``p``.
    """

    reducible: bool
    structure: str
    mu: complex | None = None
    p_zeros: tuple = ()
    candidates: tuple = ()


def inner_case_check(theta: SymbolSpec, tol: float = 1e-8) -> InnerCaseResult:
    """Structural reducibility test for ``X_theta^2``, ``theta`` a finite Blaschke product.

    Candidates for ``mu`` are the negatives of the zeros of ``theta``; the
    deflated product must be even.  Spaces of dimension at most one have no
    proper nontrivial subspace and are reported irreducible.

    Examples
    --------
    >>> inner_case_check(SymbolSpec.blaschke([0, 0, 0])).structure
    'factor'
    """
    found = theta.blaschke_zeros()
    if found is None:
        raise PreconditionError("structural test requires a finite Blaschke product")
    zeros, const = found
    zeros = np.asarray(zeros, dtype=complex)
    if zeros.size <= 1:
        return InnerCaseResult(False, "trivial_dimension")
    if _is_even(zeros, const, tol):
        return InnerCaseResult(True, "even")
    tried = []
    for i, a in enumerate(zeros):
        if any(abs(a - t) <= 1e-12 for t in tried):
            continue
        tried.append(a)
        rest = np.delete(zeros, i)
        if _is_even(rest, const, tol):
            return InnerCaseResult(True, "factor", complex(-a), tuple(complex(x) for x in rest),
                                   tuple(complex(-t) for t in tried))
    return InnerCaseResult(False, "none", candidates=tuple(complex(-t) for t in tried))


# ----------------------------------------------------------------------

@dataclass(frozen=True)
class CommutantResult:
    """Commutant of ``{T, T^*}`` and the projections found in it.

    ``dimension == 1`` means scalars only.  ``projections`` holds nontrivial
    orthogonal projections (orthonormal coordinates) extracted from a
    generic self-adjoint commutant element, with their residuals.
    """

    operator: str
    dimension: int
    reducible: bool
    certified: bool
    projections: tuple = ()
    residuals: dict = field(default_factory=dict)
    singular_values: np.ndarray | None = None


def _commutant_basis(T, tol):
    d = T.shape[0]
    I = np.eye(d)
    blocks = []
    for M in (T, T.conj().T):
        # vec(P M - M P) with column-major vec
        blocks.append(np.kron(M.T, I) - np.kron(I, M))
    A = np.vstack(blocks)
    _, s, vh = np.linalg.svd(A)
    s_full = np.concatenate([s, np.zeros(d * d - s.size)])
    scale = max(s_full[0], 1.0)
    null = vh[s_full <= tol * scale].conj()
    mats = [v.reshape(d, d, order="F") for v in null]
    return mats, s_full


def _spectral_projections(mats, T, tol, rng):
    d = T.shape[0]
    coeffs = rng.standard_normal(len(mats)) + 1j * rng.standard_normal(len(mats))
    C = sum(c * M for c, M in zip(coeffs, mats))
    H = 0.5 * (C + C.conj().T)
    lam, U = np.linalg.eigh(H)
    spread = max(float(lam[-1] - lam[0]), 1e-300)
    groups, start = [], 0
    for k in range(1, d + 1):
        if k == d or lam[k] - lam[k - 1] > 1e3 * tol * max(spread, 1.0):
            groups.append((start, k))
            start = k
    out = []
    for lo, hi in groups:
        if hi - lo == d:
            continue
        Q = U[:, lo:hi]
        P = Q @ Q.conj().T
        res = max(np.linalg.norm(P @ T - T @ P, 2),
                  np.linalg.norm(P @ T.conj().T - T.conj().T @ P, 2))
        out.append((P, float(res)))
    return out


def commutant_projection_check(b: SymbolSpec, operator: str = "z", *, tol: float = 1e-8,
                               n_orbit: int = 10, seed: int = 0) -> CommutantResult:
    """Commutant of ``{A, A^*}`` for ``A = X_b`` (``"z"``) or ``X_b^2`` (``"z2"``).

    Finite Blaschke products are handled exactly in the model space and the
    answer is certified.  Other symbols use the orbit Gram matrix of length
    ``n_orbit`` with the last orbit vector projected back, so the result is
    a diagnostic only.
    """
    if operator not in ("z", "z2"):
        raise ValueError("operator must be 'z' or 'z2'")
    certified = b.blaschke_zeros() is not None
    if certified:
        T = ModelSpace.from_symbol(b).x_matrix()
    else:
        T = _truncated_shift(b, n_orbit)
    if operator == "z2":
        T = T @ T
    d = T.shape[0]
    if d <= 1:
        return CommutantResult(operator, d, False, certified)
    mats, s = _commutant_basis(T, tol)
    dim = len(mats)
    projections = ()
    residuals = {}
    if dim > 1:
        found = _spectral_projections(mats, T, tol, np.random.default_rng(seed))
        projections = tuple(P for P, r in found if r <= max(tol, 1e-10) * 100)
        residuals = {"commutation": max((r for _, r in found), default=0.0),
                     "idempotency": max((float(np.linalg.norm(P @ P - P, 2)) for P in projections),
                                        default=0.0)}
    return CommutantResult(operator, dim, bool(projections), certified, projections,
                           residuals, s)


def _truncated_shift(b: SymbolSpec, n_orbit: int) -> np.ndarray:
    from .space import gram_closed_form

    G = gram_closed_form(b, n_orbit + 1).entries
    L = n_orbit
    M = G[:L, :L].T  # metric on orbit coordinates
    Sh = np.zeros((L, L), dtype=complex)
    Sh[np.arange(1, L), np.arange(L - 1)] = 1.0
    # orbit coordinates of the projection of v_{L+1}
    Sh[:, L - 1] = np.linalg.solve(M, G[L, :L])
    R = np.linalg.cholesky(M).conj().T
    return R @ Sh @ np.linalg.inv(R)
