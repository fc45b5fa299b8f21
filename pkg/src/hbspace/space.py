"""Geometry of H(b): orbit Gram matrices, X_b, its adjoint and defect identities.

The orbit is ``v_k = S*^k b`` for ``k >= 1``.  Gram arrays are 0-based:
``G[i, j] = <v_{i+1}, v_{j+1}>_b`` (linear in the first slot), so for
orbit coordinates ``x, y`` one has ``<sum x_i v_i, sum y_j v_j>_b =
x @ G @ conj(y)``; :func:`form` evaluates this.

Three independent Gram constructions are provided:

``moment_formula``
    ``G(m, n) = <v_m, v_n>_2 + (delta_mn - m_{n-m})``: the H^2 pairing of
    tails plus the H(conj b) term, valid for extreme ``b``.
``closed_form``
    ``G(m, n) = delta_mn - sum_{k<m} b_k conj(b_{k+n-m})`` for ``m <= n``,
    which needs only low-order Taylor coefficients.
``pseudoinverse_oracle``
    ``<D_N^+ v_m, v_n>_2`` from :class:`~hbspace.oracle.RangeOracle`.

Finite Blaschke products additionally have the exact ``model_space``
Gram.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import PreconditionError, RangeResidualError
from .hardy import cauchy_transform, shift, tail_inner
from .model_space import ModelSpace
from .oracle import RangeOracle, to_complex
from .symbols import (
    MomentSequence,
    SymbolSpec,
    evaluate_boundary,
    moments_of_modulus_squared,
    resolved_class,
)

EXTREME_CLASSES = ("inner", "extreme_non_inner")


def default_grid(spec: SymbolSpec) -> int:
    return 4096 if spec.has_outer_factor else 256


def form(G, x, y) -> complex:
    """``<sum x_i v_i, sum y_j v_j>_b`` for orbit coordinates."""
    return complex(np.asarray(x) @ G @ np.conj(np.asarray(y)))


@dataclass(frozen=True)
class GramMatrix:
    """Orbit Gram matrix with provenance.

    Attributes
    ----------
    entries : ndarray
        ``entries[i, j] = <S*^{i+1} b, S*^{j+1} b>_b``.
    method : str
        ``moment_formula``, ``closed_form``, ``pseudoinverse_oracle`` or
        ``model_space``.
    symbol : str
    truncation : dict
        Method-specific metadata (grid size, truncation, cutoff, ...).
    """

    entries: np.ndarray
    method: str
    symbol: str = ""
    truncation: dict = field(default_factory=dict)

    def __post_init__(self):
        G = np.asarray(self.entries, dtype=complex)
        defect = float(np.max(np.abs(G - G.conj().T))) if G.size else 0.0
        G = 0.5 * (G + G.conj().T)
        G.setflags(write=False)
        object.__setattr__(self, "entries", G)
        self.truncation.setdefault("hermitian_defect", defect)

    @property
    def size(self) -> int:
        return self.entries.shape[0]

    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(self.entries)[0]) if self.size else 0.0

    def invariants(self, tol: float = 1e-8) -> dict:
        """Check Hermitian, PSD and unit-interval diagonal invariants."""
        diag = self.entries.diagonal().real
        lam = self.min_eigenvalue()
        return {
            "hermitian_defect": self.truncation["hermitian_defect"],
            "min_eigenvalue": lam,
            "psd": lam >= -tol,
            "diagonal_in_unit_interval": bool(np.all(diag >= -tol) and np.all(diag <= 1 + tol)),
        }

    def __getitem__(self, idx):
        """1-based access ``G[m, n] = <S*^m b, S*^n b>_b``."""
        m, n = idx
        return self.entries[m - 1, n - 1]


def _require_extreme(spec: SymbolSpec, what: str):
    cls = resolved_class(spec)
    if cls not in EXTREME_CLASSES:
        raise PreconditionError(f"{what} requires an extreme symbol (class {cls!r})")
    return cls


def bb_term(moments: MomentSequence, m: int, n: int) -> complex:
    """``<T_{conj b} S*^m b, T_{conj b} S*^n b>_{conj b} = delta_mn - m_{n-m}``."""
    return (1.0 if m == n else 0.0) - moments.pairing(n - m)


def gram_via_moments(spec: SymbolSpec, n_orbit: int, grid_size: int | None = None) -> GramMatrix:
    """Gram matrix from tail pairings and moments of ``|b|^2`` (extreme ``b``)."""
    _require_extreme(spec, "the moment formula")
    size = grid_size or default_grid(spec)
    if n_orbit >= size // 2:
        raise ValueError("orbit too long for the grid")
    grid = evaluate_boundary(spec, size)
    moments = moments_of_modulus_squared(grid, min(2 * n_orbit + 2, size // 2))
    b = spec.coefficients(size // 2)
    G = np.empty((n_orbit, n_orbit), dtype=complex)
    for i in range(n_orbit):
        for j in range(i, n_orbit):
            G[i, j] = tail_inner(b, i + 1, j + 1) + bb_term(moments, i + 1, j + 1)
            G[j, i] = np.conj(G[i, j])
    tail = float(np.sum(np.abs(b[-size // 8:]) ** 2))
    return GramMatrix(G, "moment_formula", spec.label,
                      {"grid": size, "coefficients": size // 2, "tail_energy": tail})


def closed_form_entries(b, n_orbit: int) -> np.ndarray:
    """``delta_mn - sum_{k<m} b_k conj(b_{k+n-m})`` for ``m <= n``, Hermitian."""
    b = np.asarray(b, dtype=complex)
    if b.size < n_orbit:
        b = np.concatenate([b, np.zeros(n_orbit - b.size, dtype=complex)])
    G = np.eye(n_orbit, dtype=complex)
    for d in range(n_orbit):
        prod = b[: n_orbit - d] * np.conj(b[d : n_orbit])
        csum = np.cumsum(prod)
        m = np.arange(1, n_orbit - d + 1)
        G[m - 1, m - 1 + d] -= csum[m - 1]
        if d:
            G[m - 1 + d, m - 1] = np.conj(G[m - 1, m - 1 + d])
    return G


def gram_closed_form(b, n_orbit: int, label: str = "") -> GramMatrix:
    """Gram matrix from the first ``n_orbit`` Taylor coefficients (extreme ``b``).

    ``b`` is a :class:`SymbolSpec` (whose class is checked) or a coefficient
    vector the caller vouches for.
    """
    if isinstance(b, SymbolSpec):
        _require_extreme(b, "the closed form")
        label = label or b.label
        b = b.coefficients(n_orbit + 1)
    return GramMatrix(closed_form_entries(b, n_orbit), "closed_form", label,
                      {"coefficients": int(np.size(b))})


def gram_via_pseudoinverse(spec: SymbolSpec, truncation: int, n_orbit: int,
                           precision: str = "auto", cutoff: float = 1e-10,
                           range_tol: float = 1e-6, oracle: RangeOracle | None = None) -> GramMatrix:
    """Gram matrix ``<D_N^+ v_m, v_n>_2`` from the truncated defect operator."""
    oracle = oracle or get_oracle(spec, truncation, precision, cutoff, range_tol)
    vectors = oracle.orbit(n_orbit)
    residual = oracle.check_range(vectors)
    G = oracle.gram(vectors)
    meta = dict(oracle.diagnostics)
    meta["range_residual"] = residual
    return GramMatrix(G, "pseudoinverse_oracle", spec.label, meta)


def gram_model_space(spec: SymbolSpec, n_orbit: int) -> GramMatrix:
    """Exact Gram matrix in the model space of a finite Blaschke product."""
    ms = ModelSpace.from_symbol(spec)
    return GramMatrix(ms.gram(ms.orbit(n_orbit)), "model_space", spec.label,
                      {"dimension": ms.dim})


@lru_cache(maxsize=16)
def get_oracle(spec: SymbolSpec, truncation: int, precision: str = "auto",
               cutoff: float = 1e-10, range_tol: float = 1e-6) -> RangeOracle:
    """Cached :class:`RangeOracle` for a symbol and truncation."""
    return RangeOracle(spec, truncation, precision, cutoff, range_tol)


def hb_inner_general(f, g, spec: SymbolSpec, truncation: int = 256, **kw) -> complex:
    """``<f, g>_b`` for Taylor vectors in the numerical range of ``D_N``."""
    oracle = get_oracle(spec, truncation, **kw)
    oracle.check_range([f, g])
    return to_complex(oracle.inner(f, g))


def kernel_at_zero(b):
    """``k_0^b = 1 - conj(b(0)) b`` as a Taylor vector."""
    b = np.asarray(b)
    out = -np.conj(b[0]) * b
    out[0] = out[0] + 1
    return out


def apply_Xb(f):
    """``X_b f = S* f`` (one backward step)."""
    return shift(f, "backward", 1)


def apply_Xb_star(f, spec: SymbolSpec | None = None, truncation: int | None = None,
                  oracle: RangeOracle | None = None, pairing=None):
    """``X_b^* f = S f - <f, S* b>_b b``.

    The pairing ``<f, S* b>_b`` is supplied directly (orbit coordinates) or
    obtained from the range oracle.  The result is the length-``N`` prefix.
    """
    if oracle is None:
        if spec is None or truncation is None:
            raise ValueError("need a symbol and truncation or an oracle")
        oracle = get_oracle(spec, truncation)
    f = oracle.lift(f)
    b = oracle.b
    if pairing is None:
        v1 = oracle.orbit(1)[0]
        pairing = oracle.inner(f, v1, keep=True)
    else:
        pairing = oracle.scalar(pairing) if not hasattr(pairing, "mid") else pairing
    with oracle.working():
        return np.concatenate([f[:1] * 0, f[:-1]]) - pairing * b


# ----------------------------------------------------------------------
# defect identities

@dataclass(frozen=True)
class DefectReport:
    """Residual of one operator identity.

    ``residual`` is a spectral norm: in exact mode of the defect matrix in
    an orthonormal basis, in truncated mode of the residual form on the
    normalized test vectors.
    """

    identity: str
    residual: float
    truncation: str
    passed: bool
    detail: str = ""


def _defects_exact(spec, n_max, tol):
    ms = ModelSpace.from_symbol(spec)
    d = ms.dim
    label = f"model_space(d={d})"
    if d == 0:
        return [DefectReport("xx*", 0.0, label, True, "trivial space")]
    T = ms.x_matrix()
    Th = T.conj().T
    I = np.eye(d)
    y1 = ms.orthonormal(ms.orbit(1)[:, 0])
    kap = ms.orthonormal(ms.kernel_at_zero())
    out = []

    def rep(name, M, detail=""):
        r = float(np.linalg.norm(M, 2))
        out.append(DefectReport(name, r, label, r <= tol, detail))

    rep("xx*", I - T @ Th - np.outer(y1, y1.conj()))
    rep("x*x", I - Th @ T - np.outer(kap, kap.conj()))
    for n in range(1, n_max + 1):
        Tn = np.linalg.matrix_power(T, n)
        acc = np.zeros((d, d), dtype=complex)
        w = kap.copy()
        for _ in range(n):
            acc += np.outer(w, w.conj())
            w = Th @ w
        rep(f"power_defect(n={n})", I - Tn.conj().T @ Tn - acc)
    # adjoint formula X* f = S f - <f, S* b>_b b on the numerator basis
    A = ms.backward_shift_matrix()
    Xstar = np.linalg.solve(ms.gamma, A.conj().T @ ms.gamma)
    v1 = ms.orbit(1)[:, 0]
    worst = 0.0
    for i in range(d):
        e = np.zeros(d, dtype=complex)
        e[i] = 1.0
        c = ms.inner(e, v1)
        num = np.concatenate([[0], e]) - c * ms.num  # z p - c P over q
        if abs(num[d]) > 1e-9 * max(1.0, np.abs(num).max()):
            worst = max(worst, abs(num[d]))
        diff = ms.orthonormal(num[:d] - Xstar @ e)
        worst = max(worst, float(np.linalg.norm(diff)))
    out.append(DefectReport("adjoint_formula", worst, label, worst <= tol))
    # reproducing property of k_0 on the orbit
    b = ms.taylor(ms.num, 8)
    V = ms.orbit(5)
    k0 = ms.kernel_at_zero()
    err = max(abs(ms.inner(V[:, n - 1], k0) - b[n]) for n in range(1, 6))
    out.append(DefectReport("reproducing_k0", float(err), label, bool(err <= tol)))
    return out


def _normalized_norm(R, diag):
    s = 1.0 / np.sqrt(np.maximum(np.asarray(diag, dtype=float), 1e-300))
    return float(np.linalg.norm(s[:, None] * R * s[None, :], 2))


def _defects_truncated(spec, n_max, tol, truncation, n_test, precision, extreme):
    oracle = get_oracle(spec, truncation, precision)
    label = f"N={truncation} ({oracle.precision})"
    keep = oracle.precision == "extended"
    cx = to_complex
    b = oracle.b
    if extreme:
        tests = oracle.orbit(n_test + n_max + 1)
        base = tests[:n_test]
    else:
        # polynomials lie in H(b) for nonextreme b
        base = []
        for k in range(n_test):
            e = np.zeros(truncation, dtype=complex)
            e[k] = 1.0
            base.append(e)
        tests = base
    v1 = oracle.orbit(1)[0]
    allv = list(tests) + [v1]
    Gk = oracle.gram(allv, keep=keep)
    G = cx(Gk) if keep else Gk
    t = len(tests)
    diag = G.diagonal()[:n_test].real
    out = []

    # (I - X X*) f = <f, v1> v1 on the test vectors
    us = []
    with oracle.working():
        for i in range(n_test):
            Sf = np.concatenate([base[i][:1] * 0, base[i][:-1]])
            us.append(Sf - Gk[i, t] * b)
    Gu = cx(oracle.gram(us, keep=keep))
    R = G[:n_test, :n_test] - Gu - np.outer(G[:n_test, t], G[t, :n_test])
    r = _normalized_norm(R, diag)
    out.append(DefectReport("xx*", r, label, r <= tol))
    if not extreme:
        out.append(DefectReport("x*x", float("nan"), label, True,
                                "skipped: requires an extreme symbol"))
        return out

    # I - X* X = k0 (x) k0 and the power defect sum through the orbit shift
    with oracle.working():
        k0 = kernel_at_zero(b)
    ws = [k0]
    for _ in range(n_max - 1):
        c = oracle.inner(ws[-1], v1, keep=keep)
        with oracle.working():
            Sw = np.concatenate([ws[-1][:1] * 0, ws[-1][:-1]])
            ws.append(Sw - c * b)
    Gw = cx(oracle.gram(list(base) + ws, keep=keep))
    P = Gw[:n_test, n_test:]  # P[m, j] = <v_m, w_j>
    for n in range(1, n_max + 1):
        lhs = G[n : n + n_test, n : n + n_test]
        acc = P[:, :n] @ P[:, :n].conj().T
        R = lhs - G[:n_test, :n_test] + acc
        r = _normalized_norm(R, diag)
        name = "x*x" if n == 1 else f"power_defect(n={n})"
        out.append(DefectReport(name, r, label, r <= tol))
        if n == 1:
            out.append(DefectReport("power_defect(n=1)", r, label, r <= tol))
    return out


def verify_defect_identities(spec: SymbolSpec, n_max: int = 4, *, truncation: int = 256,
                             n_test: int = 10, precision: str = "auto",
                             tol: float | None = None, exact: bool | None = None):
    """Residuals of the defect identities of ``X_b``.

    Finite Blaschke products use the exact model space (default tolerance
    1e-10); other symbols use the range oracle at truncation ``N`` on
    orbit test vectors (polynomial test vectors for nonextreme ``b``,
    default tolerance 1e-3).
    """
    cls = resolved_class(spec)
    if exact is None:
        exact = spec.blaschke_zeros() is not None
    if exact:
        return _defects_exact(spec, n_max, 1e-10 if tol is None else tol)
    return _defects_truncated(spec, n_max, 1e-3 if tol is None else tol, truncation,
                              n_test, precision, cls in EXTREME_CLASSES)


# ----------------------------------------------------------------------
# cyclicity, Cauchy transform

@dataclass(frozen=True)
class CyclicityReport:
    min_eigenvalue: float
    ranks: tuple
    orbit_size: int


def cyclicity_check(G: GramMatrix, cutoff: float = 1e-12) -> CyclicityReport:
    """Smallest eigenvalue and numerical ranks of the leading minors of ``G``."""
    E = G.entries
    scale = max(float(np.max(np.abs(E.diagonal()))), 1e-300)
    ranks = []
    for k in range(1, G.size + 1):
        lam = np.linalg.eigvalsh(E[:k, :k])
        ranks.append(int(np.sum(lam > cutoff * scale)))
    return CyclicityReport(G.min_eigenvalue(), tuple(ranks), G.size)


def conjugate_defect_matrix(moments: MomentSequence, n: int) -> np.ndarray:
    """``I - T_{|b|^2}`` on degree ``< n``: ``[i, j] = delta_ij - m_{j-i}``."""
    idx = np.arange(n)
    k = idx[None, :] - idx[:, None]
    vals = np.array([[moments.pairing(int(kk)) for kk in row] for row in k])
    return np.eye(n) - vals


def cauchy_isometry_residual(spec: SymbolSpec, degree: int = 6, n: int = 64,
                             grid_size: int | None = None, cutoff: float = 1e-12,
                             seed: int = 0) -> float:
    """``| ||K_rho p||^2_{H(conj b)} - ||p||^2_{L^2(rho)} |`` for a random polynomial.

    The H(conj b) norm uses the pseudoinverse of ``I - T_{conj b} T_b =
    I - T_{|b|^2}`` compressed to degree ``< n``; relative to ``||p||^2``.
    """
    size = grid_size or default_grid(spec)
    grid = evaluate_boundary(spec, size)
    rng = np.random.default_rng(seed)
    p = rng.standard_normal(degree + 1) + 1j * rng.standard_normal(degree + 1)
    K = cauchy_transform(grid, p, n)
    Dbar = conjugate_defect_matrix(moments_of_modulus_squared(grid, n), n)
    lam, U = np.linalg.eigh(0.5 * (Dbar + Dbar.conj().T))
    keep = lam > cutoff * lam.max()
    c = U[:, keep].conj().T @ K
    hbar = float(np.sum(np.abs(c) ** 2 / lam[keep]))
    values = size * np.fft.ifft(np.concatenate([p, np.zeros(size - p.size)]))
    l2 = float(np.mean(grid.rho_samples * np.abs(values) ** 2))
    return abs(hbar - l2) / float(np.sum(np.abs(p) ** 2))


def intertwining_residual(spec: SymbolSpec, degree: int = 6, n: int = 64,
                          grid_size: int | None = None, seed: int = 0) -> float:
    """``||K_rho(conj(z) p) - S* K_rho p||_2 / ||p||_2`` for a random polynomial.

    For extreme ``b`` the operator ``Z_rho^*`` is multiplication by
    ``conj(z)`` on ``L^2(rho)``.
    """
    size = grid_size or default_grid(spec)
    grid = evaluate_boundary(spec, size)
    rng = np.random.default_rng(seed)
    p = rng.standard_normal(degree + 1) + 1j * rng.standard_normal(degree + 1)
    lhs = cauchy_transform(grid, p, n, offset=-1)
    rhs = shift(cauchy_transform(grid, p, n + 1), "backward", 1)
    return float(np.linalg.norm(lhs - rhs) / np.linalg.norm(p))
