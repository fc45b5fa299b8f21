"""Range-space inner products of H(b) from the truncated defect operator.

For ``D = I - T_b T_{conj b}`` the space H(b) is the range of ``D^{1/2}``
with ``<D f, D g>_b = <D f, g>_2``.  Compressing to the first ``N``
coefficients gives ``D_N = I - L L^H`` with ``L`` the lower-triangular
Toeplitz section of ``b`` (exact, since ``T_{conj b}`` never raises the
degree), and ``<D_N^+ P_N f, P_N g>_2`` approximates ``<f, g>_b`` from
below.

Three backends are available:

``double``
    Eigendecomposition of ``D_N`` with a relative spectral cutoff.  Exact
    for finite Blaschke products (``D`` is the projection onto the model
    space) and accurate for strict contractions.
``banded``
    Banded Cholesky factorization for polynomial symbols with ``D_N``
    positive definite; cheap enough for very large ``N``.
``extended``
    For outer factors ``D_N`` has exponentially small eigenvalues, so
    double precision loses everything beyond the first few orbit vectors.
    The displacement structure ``D_N - Z D_N Z^H = e_0 e_0^H - b b^H`` gives
    an O(N^2) generalized Schur Cholesky factorization which is carried
    out in python-flint ball arithmetic (midpoints only) at a working
    precision chosen from the observed pivot decay.
"""

from __future__ import annotations

from contextlib import contextmanager

import numpy as np
from scipy.linalg import cholesky_banded, eigh

from .errors import RangeResidualError
from .hardy import toeplitz_analytic_matrix
from .symbols import SymbolSpec

_EXTENDED_GUARD_BITS = 96


def _mid(x):
    return x.mid()


_vmid = np.vectorize(_mid, otypes=[object])


def _to_complex(arr) -> np.ndarray:
    a = np.asarray(arr)
    if a.dtype != object:
        return a.astype(complex)
    flat = [complex(float(x.real.mid()), float(x.imag.mid())) for x in a.ravel()]
    return np.array(flat, dtype=complex).reshape(a.shape)


def _is_banded_candidate(spec: SymbolSpec) -> bool:
    if spec.kind == "polynomial":
        return True
    if spec.kind in ("scaled", "product"):
        return all(_is_banded_candidate(f) for f in spec.factors)
    return False


class RangeOracle:
    """Truncated H(b) inner products ``<f, g>_b ~ <D_N^+ f, g>_2``.

    Parameters
    ----------
    symbol : SymbolSpec
    n : int
        Truncation size ``N``.
    precision : {"auto", "double", "banded", "extended"}
    cutoff : float
        Relative spectral cutoff for the ``double`` backend.
    range_tol : float
        Threshold on the relative range residual ``||(I - D D^+) f|| / ||f||``.
    prec : int, optional
        Working precision in bits for the ``extended`` backend; by default
        ``2 N + 128``, raised automatically when the pivots demand it.

    Notes
    -----
    Vectors handed to the oracle must be exact length-``N`` prefixes of the
    functions they represent.  In the ``extended`` backend they must also be
    accurate to the working precision, which is why the orbit and ``b``
    itself are produced by the oracle (:meth:`orbit`, :attr:`b`).
    """

    def __init__(self, symbol: SymbolSpec, n: int, precision: str = "auto",
                 cutoff: float = 1e-10, range_tol: float = 1e-6, prec: int | None = None):
        self.symbol = symbol
        self.n = int(n)
        self.cutoff = cutoff
        self.range_tol = range_tol
        if precision == "auto":
            if symbol.has_outer_factor and symbol.supports_extended_precision:
                precision = "extended"
            elif _is_banded_candidate(symbol) and symbol.blaschke_zeros() is None:
                precision = "banded"
            else:
                precision = "double"
        if precision not in ("double", "banded", "extended"):
            raise ValueError(f"unknown precision mode {precision!r}")
        self.precision = precision
        self.prec = prec if prec is not None else 2 * self.n + 128
        self.diagnostics: dict = {"precision": precision, "truncation": self.n}
        self._coef_cache: dict = {}
        getattr(self, f"_factor_{precision}")()

    # ------------------------------------------------------------------
    # factorizations
    def _factor_double(self):
        b = self.symbol.coefficients(self.n)
        L = toeplitz_analytic_matrix(b, self.n)
        D = np.eye(self.n) - L @ L.conj().T
        D = 0.5 * (D + D.conj().T)
        lam, U = eigh(D)
        keep = lam > self.cutoff * lam.max()
        self._U = U[:, keep]
        self._lam = lam[keep]
        self.diagnostics.update(
            cutoff=self.cutoff, rank=int(keep.sum()),
            min_kept_eigenvalue=float(self._lam.min()) if keep.any() else 0.0,
        )

    def _factor_banded(self):
        b = np.trim_zeros(self.symbol.coefficients(self.n), "b")
        d = max(b.size - 1, 0)
        n = self.n
        # upper banded storage of D = I - L L^H: ab[d + i - j, j] = D[i, j], i <= j
        ab = np.zeros((d + 1, n), dtype=complex)
        for off in range(d + 1):
            j = np.arange(off, n)
            i = j - off
            # (L L^H)[i, j] = sum_{k <= i} b_{i-k} conj(b_{j-k})
            vals = np.zeros(j.size, dtype=complex)
            for t in range(d + 1 - off):
                # k = i - t contributes b_t conj(b_{t+off}) when k >= 0
                vals += np.where(i - t >= 0, b[t] * np.conj(b[t + off]), 0.0)
            ab[d - off, off:] = (1.0 if off == 0 else 0.0) - vals
        try:
            self._cb = cholesky_banded(ab, lower=False)
        except np.linalg.LinAlgError:
            self.precision = "double"
            self.diagnostics["precision"] = "double"
            self._factor_double()
            return
        self._bandwidth = d
        self.diagnostics.update(bandwidth=d, min_pivot=float(np.min(np.abs(self._cb[-1]))**2))

    def _factor_extended(self):
        for _ in range(4):
            try:
                self._schur(self.prec)
            except _Breakdown:
                self.prec *= 2
                continue
            need = self._lost_bits + _EXTENDED_GUARD_BITS
            if need <= self.prec:
                break
            self.prec = max(2 * self.prec, need + 64)
        else:
            raise RangeResidualError("extended-precision factorization did not stabilize")
        self.diagnostics.update(prec=self.prec, lost_bits=self._lost_bits)

    def _schur(self, prec):
        from flint import acb, ctx

        old = ctx.prec
        ctx.prec = prec
        try:
            n = self.n
            b = np.array(self._hp_coefficients(n, prec), dtype=object)
            u = np.array([acb(0)] * n, dtype=object)
            u[0] = acb(1)
            v = b.copy()
            cols = []
            diag = []
            one = acb(1)
            for k in range(n):
                rho = (v[k] / u[k]).mid()
                r2 = (rho * rho.conjugate()).real
                if not r2 < 1:
                    raise _Breakdown
                c = (one - r2).real.sqrt()
                uk = (u[k:] - rho.conjugate() * v[k:]) / c
                v[k:] = _vmid((v[k:] - rho * u[k:]) / c)
                phase = uk[0] / abs(uk[0])
                uk = _vmid(uk * phase.conjugate())
                cols.append(uk)
                diag.append(uk[0].real)
                u[k + 1:] = uk[:-1]
                u[k] = acb(0)
            self._cols = cols
            logs = [float(d.mid().log()) for d in diag]
            self._lost_bits = int(np.ceil(-2.0 * min(logs) / np.log(2.0))) if logs else 0
            self._work_prec = prec
        finally:
            ctx.prec = old

    # ------------------------------------------------------------------
    # vectors
    def _hp_coefficients(self, n, prec):
        key = (n, prec)
        if key not in self._coef_cache:
            self._coef_cache.clear()
            self._coef_cache[key] = self.symbol.coefficients_hp(n, prec)
        return self._coef_cache[key]

    def coefficients(self, n: int):
        """First ``n`` Taylor coefficients of ``b`` in working representation."""
        if self.precision == "extended":
            return np.array(self._hp_coefficients(n, self._work_prec), dtype=object)
        return self.symbol.coefficients(n)

    @property
    def b(self):
        return self.coefficients(self.n)

    def orbit(self, count: int, start: int = 1):
        """Orbit vectors ``S*^k b`` for ``k = start .. start + count - 1``."""
        c = self.coefficients(self.n + start + count)
        return [c[k : k + self.n] for k in range(start, start + count)]

    def lift(self, f):
        """Zero-pad or truncate ``f`` to length ``N`` in working representation."""
        f = np.asarray(f)
        if self.precision == "extended" and f.dtype != object:
            from flint import acb

            f = np.array([acb(complex(x).real, complex(x).imag) for x in f], dtype=object)
        out = np.zeros(self.n, dtype=object if self.precision == "extended" else complex)
        if self.precision == "extended":
            from flint import acb

            out[:] = [acb(0)] * self.n
        m = min(self.n, f.size)
        out[:m] = f[:m]
        return out

    def scalar(self, z):
        """Convert a Python complex to a working-precision scalar."""
        if self.precision == "extended":
            from flint import acb

            return acb(complex(z).real, complex(z).imag)
        return complex(z)

    @contextmanager
    def working(self):
        """Context in which ball arithmetic runs at the working precision.

        Combinations of extended-precision vectors (``S f - c b`` and the
        like) must be formed inside it; outside, flint rounds to 53 bits.
        """
        if self.precision != "extended":
            yield
            return
        from flint import ctx

        old = ctx.prec
        ctx.prec = self._work_prec
        try:
            yield
        finally:
            ctx.prec = old

    # ------------------------------------------------------------------
    # inner products
    def whiten(self, vectors):
        """Coordinates ``Y`` with ``<f_i, f_j>_b = Y[:, j]^H Y[:, i]``."""
        V = [self.lift(f) for f in vectors]
        if self.precision == "double":
            F = np.column_stack(V)
            return (self._U.conj().T @ F) / np.sqrt(self._lam)[:, None]
        if self.precision == "banded":
            F = np.column_stack(V)
            # D = U^H U with U upper banded; whitening y = U^{-H} f
            from scipy.linalg import solve_banded

            d = self._bandwidth
            # U^H is lower banded with bandwidth d
            Uh = np.zeros((d + 1, self.n), dtype=complex)
            for off in range(d + 1):
                Uh[off, : self.n - off] = np.conj(self._cb[d - off, off:])
            return solve_banded((d, 0), Uh, F)
        return self._whiten_extended(V)

    def _whiten_extended(self, V):
        from flint import ctx

        old = ctx.prec
        ctx.prec = self._work_prec
        try:
            W = np.empty((self.n, len(V)), dtype=object)
            for j, f in enumerate(V):
                W[:, j] = f
            Y = np.empty_like(W)
            for k, col in enumerate(self._cols):
                y = _vmid(W[k] / col[0])
                Y[k] = y
                if k + 1 < self.n:
                    W[k + 1:] -= np.outer(col[1:], y)
            return Y
        finally:
            ctx.prec = old

    def gram(self, vectors, keep: bool = False):
        """Matrix ``G[i, j] = <f_i, f_j>_b`` (complex unless ``keep``)."""
        Y = self.whiten(vectors)
        if self.precision == "extended":
            from flint import ctx

            old = ctx.prec
            ctx.prec = self._work_prec
            try:
                G = _vmid(Y.T @ np.vectorize(lambda x: x.conjugate(), otypes=[object])(Y))
            finally:
                ctx.prec = old
            return G if keep else _to_complex(G)
        return Y.T @ Y.conj()

    def inner(self, f, g, keep: bool = False):
        """``<f, g>_b`` (working-precision scalar if ``keep``)."""
        G = self.gram([f, g], keep=keep)
        return G[0, 1]

    def range_residual(self, f) -> float:
        """Relative distance of ``f`` from the numerical range of ``D_N``."""
        if self.precision != "double":
            return 0.0
        x = self.lift(f)
        proj = self._U @ (self._U.conj().T @ x)
        nrm = np.linalg.norm(x)
        return float(np.linalg.norm(x - proj) / nrm) if nrm else 0.0

    def check_range(self, vectors):
        """Raise :class:`RangeResidualError` when a vector leaves the range."""
        worst = max((self.range_residual(f) for f in vectors), default=0.0)
        if worst > self.range_tol:
            raise RangeResidualError(
                f"range residual {worst:.3g} exceeds {self.range_tol:.1g}; "
                "increase the truncation"
            )
        return worst


class _Breakdown(Exception):
    pass


def to_complex(x):
    """Convert working-precision scalars or arrays to numpy complex."""
    if isinstance(x, np.ndarray):
        return _to_complex(x)
    if hasattr(x, "mid"):
        return complex(float(x.real.mid()), float(x.imag.mid()))
    return complex(x)
