"""Reducibility of ``X_b^2`` for extreme symbols.

``X_b^2`` is reducible exactly when there are ``alpha, beta`` with
``alpha * beta != 1`` such that

    S*^{2m}(S*b + alpha S*^2 b)  is orthogonal to  S*^{2n}(beta S*b + S*^2 b)

in H(b) for all ``m, n >= 0``.  Expanding in the orbit Gram matrix gives a
linear system in ``x = (1, alpha, conj(beta), alpha conj(beta))``; the
admissible solutions are its null vectors on the quadric ``x0 x3 = x1 x2``.
The pipeline in :func:`decide_reducibility` solves this system, builds the
reducing subspaces, verifies them and compares the verdict with the
structural predictions (parity for extreme non-inner symbols, the
Blaschke-factor test for inner ones).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import PreconditionError
from .inner_case import commutant_projection_check, inner_case_check
from .model_space import ModelSpace
from .space import (
    EXTREME_CLASSES,
    GramMatrix,
    bb_term,
    form,
    gram_closed_form,
    gram_model_space,
    gram_via_moments,
)
from .symbols import (
    MomentSequence,
    SymbolSpec,
    evaluate_boundary,
    moments_of_modulus_squared,
    parity_classify,
    resolved_class,
)

TOL_EXACT = 1e-8
TOL_TRUNCATED = 1e-4
TOL_PRODUCT = 1e-6
SAMPLE_ALPHAS = (0.0, 1.0, 1j, -0.5 + 0.25j, 2.0 - 1.0j)


@dataclass(frozen=True)
class CandidatePair:
    """Parameters ``(alpha, beta)`` of a reducing pair.

    ``product_ok`` is ``|alpha beta - 1| > tol_product``; ``source`` is one
    of ``nullspace_solver``, ``parity_theory`` or ``inner_structure``.
    """

    alpha: complex
    beta: complex
    product_ok: bool = True
    source: str = "nullspace_solver"
    residual: float = 0.0

    @classmethod
    def make(cls, alpha, beta, source="nullspace_solver", residual=0.0,
             tol_product=TOL_PRODUCT):
        alpha, beta = complex(alpha), complex(beta)
        return cls(alpha, beta, abs(alpha * beta - 1) > tol_product, source, float(residual))

    def unknowns(self) -> np.ndarray:
        a, cb = self.alpha, np.conj(self.beta)
        return np.array([1.0, a, cb, a * cb])

    def to_dict(self) -> dict:
        return {"alpha": [self.alpha.real, self.alpha.imag],
                "beta": [self.beta.real, self.beta.imag],
                "product_ok": self.product_ok, "source": self.source,
                "residual": self.residual}


@dataclass(frozen=True)
class SolutionSet:
    """Admissible ``(alpha, beta)`` found by the solver.

    Attributes
    ----------
    kind : {"empty", "finite", "family"}
    pairs : tuple of CandidatePair
        All finite solutions, or sample members of a family.
    relation : str or None
        ``"beta = -conj(alpha)"`` for the even-symbol family, ``"moebius"``
        for other one-parameter families.
    normal : ndarray or None
        ``n`` with ``n0 + n1 alpha + n2 conj(beta) + n3 alpha conj(beta) = 0``.
    nullspace_dim : int
    singular_values : ndarray
        Relative to the largest.
    min_variety_residual : float
        ``min ||A x|| / sigma_max`` over unit ``x`` on the quadric.
    inadmissible : tuple
        Null vectors on the quadric that admit no normalization.
    """

    kind: str
    pairs: tuple = ()
    relation: str | None = None
    normal: np.ndarray | None = None
    nullspace_dim: int = 0
    singular_values: np.ndarray = field(default_factory=lambda: np.zeros(0))
    min_variety_residual: float = float("nan")
    inadmissible: tuple = ()

    def to_dict(self) -> dict:
        return {"kind": self.kind, "relation": self.relation,
                "pairs": [p.to_dict() for p in self.pairs],
                "nullspace_dim": self.nullspace_dim,
                "singular_values": [float(s) for s in self.singular_values],
                "min_variety_residual": self.min_variety_residual,
                "inadmissible": len(self.inadmissible)}


@dataclass(frozen=True)
class SubspacePair:
    """Generators of ``M1`` and ``M2``.

    ``coords_M1[:, k]`` are orbit coordinates (index ``i`` is ``S*^{i+1} b``)
    of the ``k``-th generator, ``basis_M1`` the matching Taylor vectors.
    """

    coords_M1: np.ndarray
    coords_M2: np.ndarray
    basis_M1: tuple
    basis_M2: tuple
    alpha: complex
    beta: complex
    description: str

    @property
    def generators(self):
        return self.basis_M1[0], self.basis_M2[0]


@dataclass(frozen=True)
class ReducibilityCertificate:
    decision: str
    solution_set: SolutionSet
    parity: str
    recurrence_residuals: dict
    verification: list
    cross_checks: dict
    diagnostics: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"decision": self.decision, "solution_set": self.solution_set.to_dict(),
                "parity": self.parity, "recurrence_residuals": self.recurrence_residuals,
                "verification": self.verification, "cross_checks": self.cross_checks,
                "diagnostics": self.diagnostics}


# ----------------------------------------------------------------------
# bilinear system

def _entries(G):
    return G.entries if isinstance(G, GramMatrix) else np.asarray(G)


def build_bilinear_system(G, cutoff: int, swap: bool = False) -> np.ndarray:
    """Rows ``(G(2m+1,2n+2), G(2m+2,2n+2), G(2m+1,2n+1), G(2m+2,2n+1))``, ``m, n < K``.

    Gram indices are 1-based orbit indices.  ``swap=True`` exchanges the
    roles of the two subspaces (the system for ``<M2, M1>``), whose
    solutions are ``(beta, alpha)`` for each solution ``(alpha, beta)``.
    """
    E = _entries(G)
    if swap:
        E = E.T
    if E.shape[0] < 2 * cutoff + 2:
        raise ValueError(f"Gram of size {E.shape[0]} too small for cutoff {cutoff}")
    m = np.repeat(np.arange(cutoff), cutoff)
    n = np.tile(np.arange(cutoff), cutoff)
    # 0-based: orbit index j lives at j - 1
    return np.column_stack([E[2 * m, 2 * n + 1], E[2 * m + 1, 2 * n + 1],
                            E[2 * m, 2 * n], E[2 * m + 1, 2 * n]])


def variety_residual(A: np.ndarray, starts: int = 8, iters: int = 200, seed: int = 0) -> float:
    """``min ||A x|| / sigma_max`` over unit ``x`` with ``x0 x3 = x1 x2``.

    The quadric consists of ``x = vec([[x0, x2], [x1, x3]]) = vec(u w^H)``;
    alternating minimization over ``u`` and ``w`` from several starts.
    """
    smax = np.linalg.norm(A, 2)
    if smax == 0:
        return 0.0
    A4 = (A / smax).reshape(A.shape[0], 2, 2, order="F")
    rng = np.random.default_rng(seed)
    best = np.inf
    for _ in range(starts):
        w = rng.standard_normal(2) + 1j * rng.standard_normal(2)
        w /= np.linalg.norm(w)
        prev = np.inf
        for _ in range(iters):
            Mu = A4 @ np.conj(w)
            _, V = np.linalg.eigh(Mu.conj().T @ Mu)
            u = V[:, 0]
            Mw = np.einsum("rij,i->rj", A4, u)
            ev, V = np.linalg.eigh(Mw.conj().T @ Mw)
            w = np.conj(V[:, 0])
            val = np.sqrt(max(ev[0], 0.0))
            if prev - val < 1e-15:
                break
            prev = val
        best = min(best, val)
    return float(best)


def _pair_from_vector(x, tol):
    """Direct form from ``x0``, else the swapped form from ``x3``."""
    x = np.asarray(x, dtype=complex)
    scale = np.linalg.norm(x)
    if abs(x[0]) > tol * scale:
        return x[1] / x[0], np.conj(x[2] / x[0])
    if abs(x[3]) > tol * scale:
        # roles exchanged: M1 generated by the second generator
        return np.conj(x[1] / x[3]), x[2] / x[3]
    return None


def _nontrivial(G, alpha, beta, tol):
    if G is None:
        return True
    E = _entries(G)
    f = np.zeros(E.shape[0], dtype=complex)
    g = np.zeros(E.shape[0], dtype=complex)
    f[0], f[1] = 1.0, alpha
    g[0], g[1] = beta, 1.0
    scale = max(abs(E[0, 0]), abs(E[1, 1]), 1e-300)
    nf = form(E, f, f).real / (1 + abs(alpha) ** 2)
    ng = form(E, g, g).real / (1 + abs(beta) ** 2)
    return nf > tol * scale and ng > tol * scale


def _dedupe(pairs, tol=1e-6):
    out = []
    for p in pairs:
        if not any(abs(p.alpha - q.alpha) <= tol * (1 + abs(q.alpha))
                   and abs(p.beta - q.beta) <= tol * (1 + abs(q.beta)) for q in out):
            out.append(p)
    return out


def solve_candidates(A: np.ndarray, tol: float = TOL_EXACT, *, G=None,
                     tol_product: float = TOL_PRODUCT, sample_alphas=SAMPLE_ALPHAS,
                     min_residual: bool = True) -> SolutionSet:
    """Admissible ``(alpha, beta)`` solving ``A x = 0`` on the quadric.

    Singular values below ``max(tol, tol * sigma_max)`` count as zero.  With
    ``G`` supplied, pairs whose generators vanish in H(b) are discarded.

    Raises
    ------
    PreconditionError
        If the system is identically zero (orbit too short).
    """
    A = np.asarray(A, dtype=complex)
    _, s, vh = np.linalg.svd(A, full_matrices=True)
    smax = s[0] if s.size else 0.0
    s_full = np.concatenate([s, np.zeros(4 - s.size)])
    thresh = max(tol, tol * smax)
    rank = int(np.sum(s_full > thresh))
    d = 4 - rank
    rel = s_full / smax if smax > 0 else s_full
    if d == 4:
        raise PreconditionError("bilinear system is identically zero; orbit too short")
    null = vh[rank:].conj().T  # columns span the nullspace

    def residual(p):
        x = p.unknowns()
        return float(np.linalg.norm(A @ x) / (smax * np.linalg.norm(x)))

    def admit(alpha, beta):
        p = CandidatePair.make(alpha, beta, residual=0.0, tol_product=tol_product)
        p = CandidatePair.make(alpha, beta, residual=residual(p), tol_product=tol_product)
        if p.product_ok and p.residual <= max(tol, 1e3 * np.finfo(float).eps) * 10 \
                and _nontrivial(G, alpha, beta, tol):
            return p
        return None

    pairs, inadmissible, relation, normal, kind = [], [], None, None, "empty"
    if d == 0:
        pass
    elif d == 1:
        x = null[:, 0]
        if abs(x[0] * x[3] - x[1] * x[2]) <= tol * np.linalg.norm(x) ** 2:
            ab = _pair_from_vector(x, tol)
            if ab is None:
                inadmissible.append(x)
            elif (p := admit(*ab)) is not None:
                pairs.append(p)
    elif d == 2:
        p_, q_ = null[:, 0], null[:, 1]
        c2 = p_[0] * p_[3] - p_[1] * p_[2]
        c1 = p_[0] * q_[3] + q_[0] * p_[3] - p_[1] * q_[2] - q_[1] * p_[2]
        c0 = q_[0] * q_[3] - q_[1] * q_[2]
        coeffs = np.array([c2, c1, c0])
        if np.max(np.abs(coeffs)) <= tol:
            kind = "family"
            relation = "plane"
            vecs = [p_ + t * q_ for t in sample_alphas]
        else:
            vecs = []
            if abs(c2) <= tol * np.max(np.abs(coeffs)):
                vecs.append(p_)  # root at infinity: s = 1, t = 0
            roots = np.roots(coeffs) if abs(c2) > tol * np.max(np.abs(coeffs)) else \
                (np.array([-c0 / c1]) if abs(c1) > tol else np.zeros(0))
            vecs += [r * p_ + q_ for r in roots]
        for x in vecs:
            ab = _pair_from_vector(x, tol)
            if ab is None:
                inadmissible.append(x)
            elif (p := admit(*ab)) is not None:
                pairs.append(p)
    else:  # d == 3: one linear relation among the four monomials
        normal = vh[0].copy()
        normal = normal / normal[np.argmax(np.abs(normal))]
        n0, n1, n2, n3 = normal
        kind = "family"
        if abs(n0) <= tol and abs(n3) <= tol and abs(n1 - n2) <= tol:
            relation = "beta = -conj(alpha)"
        else:
            relation = "moebius"
        for a in sample_alphas:
            den = n2 + n3 * a
            if abs(den) <= tol:
                continue
            cb = -(n0 + n1 * a) / den
            if (p := admit(a, np.conj(cb))) is not None:
                pairs.append(p)
    pairs = _dedupe(pairs)
    if kind == "empty" and pairs:
        kind = "finite"
    if kind == "family" and not pairs:
        kind, relation = "empty", None
    mres = variety_residual(A) if (min_residual and kind == "empty") else 0.0
    return SolutionSet(kind, tuple(pairs), relation, normal, d, rel, mres, tuple(inadmissible))


# ----------------------------------------------------------------------
# moment certificates

def verify_moment_recurrences(m: MomentSequence, pair: CandidatePair, n_max: int) -> float:
    """Largest residual of the two moment recurrences for ``n = 1..n_max``.

    ``|m_{2n+1} + (a + conj b) m_{2n} + a conj(b) m_{2n-1}|`` and
    ``|conj(a) b m_{2n+1} + (conj a + b) m_{2n} + m_{2n-1}|``.
    """
    if n_max < 1:
        raise ValueError("n_max must be at least 1")
    a, b = pair.alpha, pair.beta
    worst = 0.0
    for n in range(1, n_max + 1):
        m1, m0, mm = m.pairing(2 * n + 1), m.pairing(2 * n), m.pairing(2 * n - 1)
        r1 = abs(m1 + (a + np.conj(b)) * m0 + a * np.conj(b) * mm)
        r2 = abs(np.conj(a) * b * m1 + (np.conj(a) + b) * m0 + mm)
        worst = max(worst, r1, r2)
    return float(worst)


def classify_recurrence_dichotomy(a, alpha: complex, beta: complex, tol: float = 1e-8) -> str:
    """Which branch of the two-recurrence dichotomy a sequence follows.

    Returns ``"case_beta_eq_minus_conj_alpha"``, ``"case_unimodular"`` or
    ``"violated"``.  Residuals are relative to ``max |a_n|``.

    Raises
    ------
    PreconditionError
        Zero sequence, ``alpha beta`` in ``{0, 1}``, or no decay over the window.
    """
    a = np.asarray(a, dtype=complex)
    alpha, beta = complex(alpha), complex(beta)
    scale = float(np.max(np.abs(a))) if a.size else 0.0
    if scale == 0.0:
        raise PreconditionError("sequence is identically zero")
    ab = alpha * beta
    if abs(ab) <= tol or abs(ab - 1) <= tol:
        raise PreconditionError("alpha * beta must avoid 0 and 1")
    tail = a[-max(a.size // 4, 1):]
    if float(np.max(np.abs(tail))) > 0.5 * scale:
        raise PreconditionError("sequence does not decay over the supplied window")
    ca, cb = np.conj(alpha), np.conj(beta)
    worst = 0.0
    for n in range(1, (a.size - 2) // 2 + 1):
        lo, mid, hi = a[2 * n - 1], a[2 * n], a[2 * n + 1]
        r1 = hi + (alpha + cb) * mid + alpha * cb * lo
        r2 = hi + (1 / ca + 1 / beta) * mid + lo / (ca * beta)
        worst = max(worst, abs(r1), abs(r2))
    if worst > tol * scale:
        return "violated"
    odd = np.abs(a[1::2])
    if abs(beta + ca) <= tol and (odd.size == 0 or odd.max() <= tol * scale):
        return "case_beta_eq_minus_conj_alpha"
    if abs(abs(alpha) - 1) <= tol and abs(abs(beta) - 1) <= tol:
        return "case_unimodular"
    return "violated"


# ----------------------------------------------------------------------
# subspaces

def _orbit_vectors(b, count, length):
    b = np.asarray(b, dtype=complex)
    need = count + length + 1
    if b.size < need:
        b = np.concatenate([b, np.zeros(need - b.size, dtype=complex)])
    return np.array([b[k : k + length] for k in range(1, count + 1)])


def construct_reducing_subspaces(b: SymbolSpec, pair=None, n_orbit: int = 24, *,
                                 parity: str | None = None, alpha: complex = 0.0,
                                 taylor_length: int = 128) -> SubspacePair:
    """Generators ``S*^{2n}(S*b + alpha S*^2 b)`` and ``S*^{2n}(beta S*b + S*^2 b)``.

    Parameters
    ----------
    pair : CandidatePair, optional
        Explicit parameters.  Without it ``parity`` decides: ``"even"``
        uses ``beta = -conj(alpha)``, ``"odd"`` uses ``alpha = beta = 0``.
    n_orbit : int
        Orbit length; ``n_orbit // 2`` generators per subspace.
    """
    if pair is None:
        parity = parity or parity_classify(b.coefficients(4 * taylor_length)).label
        if parity == "even":
            pair = CandidatePair.make(alpha, -np.conj(alpha), source="parity_theory")
        elif parity == "odd":
            pair = CandidatePair.make(0.0, 0.0, source="parity_theory")
        else:
            raise PreconditionError("symbol is neither even nor odd; supply a pair")
        desc = f"{parity} symbol, alpha = {pair.alpha:.6g}"
    else:
        desc = f"alpha = {pair.alpha:.6g}, beta = {pair.beta:.6g}"
    K = n_orbit // 2
    C1 = np.zeros((n_orbit, K), dtype=complex)
    C2 = np.zeros((n_orbit, K), dtype=complex)
    for n in range(K):
        C1[2 * n, n], C1[2 * n + 1, n] = 1.0, pair.alpha
        C2[2 * n, n], C2[2 * n + 1, n] = pair.beta, 1.0
    V = _orbit_vectors(b.coefficients(n_orbit + taylor_length + 2), n_orbit, taylor_length)
    B1 = tuple(C1[:, k] @ V for k in range(K))
    B2 = tuple(C2[:, k] @ V for k in range(K))
    return SubspacePair(C1, C2, B1, B2, pair.alpha, pair.beta, desc)


def _gram_rank(M, cutoff):
    lam = np.linalg.eigvalsh(0.5 * (M + M.conj().T))
    return int(np.sum(lam > cutoff * max(lam[-1], 1e-300)))


def verify_subspace_pair(pair: SubspacePair, G, b: SymbolSpec, *, tol: float = 1e-3,
                         moments: MomentSequence | None = None, rank_cutoff: float = 1e-10,
                         model_space: ModelSpace | None = None) -> dict:
    """Orthogonality, invariance, completeness and structural checks of a pair.

    Returns a dict of residuals with an overall ``passed`` flag:

    ``orthogonality``
        ``max |<g_m, h_n>_b| / (||g_m||_b ||h_n||_b)`` over generators.
    ``invariance``
        Relative projection residual of ``S*^2`` images onto each span; with
        an exact ``model_space`` also ``||P T^2 - T^2 P||`` for both ``T^2``
        and its adjoint.
    ``completeness``
        Numerical ranks of the Gram matrix of both bases and of the orbit
        segment they span.
    ``pair_orthogonality``
        ``max |f_{2m} conj(g_{2n}) + f_{2m+1} conj(g_{2n+1})|`` for the two
        leading generators, relative to ``||f||_2 ||g||_2``, and the rank-one
        residual of each coefficient-pair matrix.
    ``conjugate_side``
        The ``T_{conj b}`` pairings ``<T f, T X^{2k} g>`` and
        ``<T g, T X^{2k} f>`` from moments, relative to the H(b) norms.
    """
    E = _entries(G)
    C1, C2 = pair.coords_M1, pair.coords_M2
    L, K = C1.shape
    if E.shape[0] < L:
        raise ValueError("Gram matrix shorter than the subspace coordinates")
    E = E[:L, :L]
    # generators may vanish (finite-dimensional spaces); floor their norms
    floor = np.sqrt(rank_cutoff)

    def norms(C):
        n = np.sqrt(np.clip(np.einsum("ik,ij,jk->k", C, E, C.conj()).real, 0.0, None))
        return np.maximum(n, floor * max(n.max(), 1e-300))

    n1, n2 = norms(C1), norms(C2)
    cross = C1.T @ E @ C2.conj()
    ortho = float(np.max(np.abs(cross) / np.outer(n1, n2)))
    report = {"orthogonality": ortho}

    # S*^2 shifts orbit coordinates by two
    def shifted(C):
        out = np.zeros_like(C)
        out[2:] = C[:-2]
        return out[:, : K - 1]

    # whitened coordinates: <x, y>_b = (W y)^H (W x)
    lam, U = np.linalg.eigh(0.5 * (E.T + E.conj()))
    keep = lam > 1e-13 * max(lam[-1], 1e-300)
    W = np.sqrt(lam[keep])[:, None] * U[:, keep].conj().T
    inv = 0.0
    for C in (C1, C2):
        Yw = W @ shifted(C)
        Cw = W @ C
        coef = np.linalg.lstsq(Cw, Yw, rcond=None)[0]
        num = np.linalg.norm(Yw - Cw @ coef, axis=0)
        den = np.linalg.norm(Yw, axis=0)
        den = np.maximum(den, floor * max(den.max(), 1e-300))
        inv = max(inv, float(np.max(num / den)) if num.size else 0.0)
    report["invariance"] = inv
    if model_space is not None and model_space.dim:
        T = model_space.x_matrix()
        T2 = T @ T
        Vn = model_space.orbit(L)
        P = model_space.project(Vn @ C1)
        report["commutation"] = float(max(np.linalg.norm(P @ T2 - T2 @ P, 2),
                                          np.linalg.norm(P @ T2.conj().T - T2.conj().T @ P, 2)))

    C = np.hstack([C1, C2])
    r_pair = _gram_rank(C.T @ E @ C.conj(), rank_cutoff)
    r_orbit = _gram_rank(E[: 2 * K, : 2 * K], rank_cutoff)
    report["completeness"] = {"rank_pair": r_pair, "rank_orbit": r_orbit, "ok": r_pair == r_orbit}

    f, g = pair.generators
    m = min(f.size, g.size) // 2 * 2
    Pf = f[:m].reshape(-1, 2)
    Pg = g[:m].reshape(-1, 2)
    nf, ng = np.linalg.norm(f), np.linalg.norm(g)
    po = float(np.max(np.abs(Pf @ Pg.conj().T)) / (nf * ng)) if nf and ng else 0.0

    def rank_one(P):
        s = np.linalg.svd(P, compute_uv=False)
        return float(s[1] / s[0]) if s.size > 1 and s[0] > 0 else 0.0

    report["pair_orthogonality"] = po
    report["rank_one"] = max(rank_one(Pf), rank_one(Pg))

    if moments is not None:
        idx = np.arange(L)
        B = np.array([[bb_term(moments, i + 1, j + 1) for j in idx] for i in idx])
        x, y = C1[:, 0], C2[:, 0]
        nx, ny = n1[0], n2[0]
        worst = 0.0
        for k in range(K):
            for u, v in ((x, y), (y, x)):
                w = np.zeros(L, dtype=complex)
                w[2 * k :] = v[: L - 2 * k]
                worst = max(worst, abs(u @ B @ w.conj()) / (nx * ny))
        report["conjugate_side"] = float(worst)

    checks = [report["orthogonality"], report["invariance"], report["pair_orthogonality"],
              report.get("commutation", 0.0), report.get("conjugate_side", 0.0)]
    report["passed"] = bool(all(c <= tol for c in checks) and report["completeness"]["ok"])
    return report


# ----------------------------------------------------------------------
# decision pipeline

@dataclass(frozen=True)
class ReducibilityConfig:
    """Knobs of :func:`decide_reducibility`.

    ``n_orbit`` is the Gram size, ``cutoff`` the system size ``K``
    (default ``min(12, (n_orbit - 2) // 2)``), ``grid`` the quadrature size
    for moments of outer symbols and ``tol`` the nullspace threshold
    (``1e-8`` exact, ``1e-4`` truncated).
    """

    n_orbit: int = 30
    cutoff: int | None = None
    tol: float | None = None
    tol_product: float = TOL_PRODUCT
    tol_verify: float | None = None
    tol_gram: float = 1e-3
    grid: int = 4096
    taylor_length: int = 128
    n_recurrence: int = 10


def _pairs_hold(sol: SolutionSet, A2: np.ndarray, tol: float) -> bool:
    s = np.linalg.norm(A2, 2)
    for p in sol.pairs:
        x = p.unknowns()
        if np.linalg.norm(A2 @ x) / (s * np.linalg.norm(x)) > 10 * tol:
            return False
    return True


def decide_reducibility(b: SymbolSpec, config: ReducibilityConfig | None = None
                        ) -> ReducibilityCertificate:
    """Decide reducibility of ``X_b^2`` and certify the answer.

    Finite Blaschke products use the exact model-space Gram matrix; other
    extreme symbols use the closed-form Gram matrix, validated against the
    moment formula.  The solver runs at cutoffs ``K`` and ``K + 2``; an
    unstable verdict, a failed subspace verification or disagreement with
    the structural prediction gives ``"inconclusive"``.

    Raises
    ------
    PreconditionError
        For nonextreme symbols.
    """
    cfg = config or ReducibilityConfig()
    cls = resolved_class(b)
    if cls not in EXTREME_CLASSES:
        raise PreconditionError(f"reducibility characterization needs an extreme symbol, got {cls!r}")
    exact = b.blaschke_zeros() is not None
    tol = cfg.tol if cfg.tol is not None else (TOL_EXACT if exact else TOL_TRUNCATED)
    tol_verify = cfg.tol_verify if cfg.tol_verify is not None else (TOL_EXACT if exact else 1e-3)
    K = cfg.cutoff or min(12, (cfg.n_orbit - 2) // 2)
    L = max(cfg.n_orbit, 2 * (K + 2) + 2)
    diagnostics = {"mode": "exact" if exact else "truncated", "cutoff": K, "n_orbit": L,
                   "tol": tol, "class": cls}
    cross = {}
    ms = None
    if exact:
        ms = ModelSpace.from_symbol(b)
        G = gram_model_space(b, L)
        grid = evaluate_boundary(b, 256)
        moments = moments_of_modulus_squared(grid, 2 * cfg.n_recurrence + 2)
        diagnostics["dimension"] = ms.dim
        if ms.dim <= 1:
            empty = SolutionSet("empty", nullspace_dim=4, min_variety_residual=float("nan"))
            theory = inner_case_check(b)
            cross["inner_structure"] = "agree" if not theory.reducible else "disagree"
            return ReducibilityCertificate(
                "irreducible", empty, parity_classify(b.coefficients(256)).label, {}, [],
                cross, diagnostics | {"note": "space of dimension at most one"})
    else:
        G = gram_closed_form(b, L)
        Gm = gram_via_moments(b, L, cfg.grid)
        diff = float(np.max(np.abs(G.entries - Gm.entries)))
        diagnostics["gram_moment_difference"] = diff
        cross["gram_moments"] = "agree" if diff <= cfg.tol_gram else "disagree"
        grid = evaluate_boundary(b, cfg.grid)
        moments = moments_of_modulus_squared(grid, 2 * cfg.n_recurrence + 2)

    A = build_bilinear_system(G, K)
    sol = solve_candidates(A, tol, G=G, tol_product=cfg.tol_product)
    A2 = build_bilinear_system(G, K + 2)
    sol2 = solve_candidates(A2, tol, G=G, tol_product=cfg.tol_product)
    if sol.kind == "empty":
        stable = sol2.kind == "empty" and min(sol.min_variety_residual,
                                              sol2.min_variety_residual) >= 10 * tol
    else:
        stable = sol2.kind != "empty" and _pairs_hold(sol, A2, tol)
    diagnostics["stable_under_cutoff"] = bool(stable)
    diagnostics["min_variety_residual"] = {"K": sol.min_variety_residual,
                                           "K+2": sol2.min_variety_residual}

    parity = parity_classify(b.coefficients(max(4 * cfg.taylor_length, 512))).label
    if exact:
        theory = inner_case_check(b)
        predicted = theory.reducible
        cross["inner_structure"] = "agree" if predicted == (sol.kind != "empty") else "disagree"
        diagnostics["inner_structure"] = theory.structure
    else:
        predicted = parity in ("even", "odd")
        cross["parity_theory"] = "agree" if predicted == (sol.kind != "empty") else "disagree"

    recurrences = {}
    verification = []
    if sol.kind != "empty":
        for p in sol.pairs:
            key = f"{p.alpha:.6g},{p.beta:.6g}"
            recurrences[key] = verify_moment_recurrences(moments, p, cfg.n_recurrence)
            sp = construct_reducing_subspaces(b, p, L - 4, taylor_length=cfg.taylor_length)
            rep = verify_subspace_pair(sp, G, b, tol=tol_verify, moments=moments,
                                       model_space=ms)
            rep["alpha"] = [p.alpha.real, p.alpha.imag]
            rep["beta"] = [p.beta.real, p.beta.imag]
            verification.append(rep)
    verified = bool(verification) and all(r["passed"] for r in verification)
    rec_tol = 1e-6 if exact else 1e-3
    rec_ok = all(v <= rec_tol for v in recurrences.values())
    cross["moment_recurrences"] = "agree" if rec_ok else "disagree"

    if any(v == "disagree" for v in cross.values()) or not stable:
        decision = "inconclusive"
    elif sol.kind == "empty":
        decision = "irreducible"
    else:
        decision = "reducible" if verified else "inconclusive"
    return ReducibilityCertificate(decision, sol, parity, recurrences, verification, cross,
                                   diagnostics)


def irreducibility_of_X(b: SymbolSpec, tol: float = 1e-8):
    """Commutant check of ``X_b`` itself (certified for finite Blaschke products)."""
    return commutant_projection_check(b, "z", tol=tol)
