"""Outer functions with a prescribed boundary modulus.

A modulus profile ``w`` on the circle is described piecewise: a default
value (constant or expression in ``t``) overridden on a list of arcs.  The
outer function is ``F = exp(h)`` where ``h`` is the Herglotz transform of
``log w``; its Taylor coefficients are obtained by exponentiating the power
series of ``h`` whose coefficients are the Fourier coefficients of
``log w``.  Constant pieces contribute exact closed-form terms, smooth
pieces are integrated with a graded Gauss-Legendre rule.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.optimize import minimize_scalar
from scipy.special import roots_legendre

from .errors import SymbolError

TWO_PI = 2.0 * np.pi

_NUMPY_NAMES = (
    "sin", "cos", "tan", "exp", "log", "sqrt", "abs", "absolute", "minimum",
    "maximum", "where", "clip", "sign", "cosh", "sinh", "tanh", "arctan",
    "arcsin", "arccos", "pi", "e",
)
_NAMESPACE = {name: getattr(np, name) for name in _NUMPY_NAMES}


def _check_names(code, allowed):
    bad = sorted(set(code.co_names) - set(allowed))
    if bad:
        raise SymbolError(f"unsupported names in expression: {', '.join(bad)}")


def parse_angle(value) -> float:
    """Angle given as a number or a string such as ``"-pi/4"``."""
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return float(value)
    if isinstance(value, str):
        code = compile(value, "<angle>", "eval")
        _check_names(code, _NAMESPACE)
        return float(eval(code, {"__builtins__": {}}, _NAMESPACE))
    raise SymbolError(f"cannot interpret angle {value!r}")


@lru_cache(maxsize=64)
def _compile_expression(text: str):
    try:
        code = compile(text, "<modulus>", "eval")
    except SyntaxError as exc:
        raise SymbolError(f"invalid modulus expression {text!r}") from exc
    _check_names(code, set(_NAMESPACE) | {"t"})

    def func(t):
        t = np.asarray(t, dtype=float)
        out = eval(code, {"__builtins__": {}}, {**_NAMESPACE, "t": t})
        return np.broadcast_to(np.asarray(out, dtype=float), t.shape).copy()

    return func


@dataclass(frozen=True)
class Piece:
    """Elementary interval ``[start, stop)`` of a modulus profile."""

    start: float
    stop: float
    value: float | None = None
    expr: str | None = None

    @property
    def constant(self) -> bool:
        return self.expr is None

    def evaluate(self, t):
        if self.expr is None:
            return np.full(np.shape(t), self.value, dtype=float)
        return _compile_expression(self.expr)(t)


def _normalize_source(src):
    if isinstance(src, str):
        return None, src
    v = float(src)
    return v, None


@dataclass(frozen=True)
class ModulusProfile:
    """Piecewise description of a boundary modulus ``w`` on ``[0, 2*pi)``.

    Parameters
    ----------
    default : float or str
        Value of ``w`` off the listed arcs; a string is an expression in
        ``t`` (radians, reduced to ``[0, 2*pi)``) using numpy functions.
    arcs : tuple of (start, stop, value_or_expr)
        Arcs traversed counter-clockwise from ``start`` to ``stop``.  Later
        arcs override earlier ones where they overlap.
    """

    default: float | str = 1.0
    arcs: tuple = ()
    pieces: tuple = field(init=False, repr=False, compare=False)
    breaks: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "arcs", tuple(tuple(a) for a in self.arcs))
        sources = [_normalize_source(self.default)]
        intervals = []  # (lo, hi, source index) on [0, 2pi)
        for i, (start, stop, src) in enumerate(self.arcs, start=1):
            sources.append(_normalize_source(src))
            lo = float(start) % TWO_PI
            length = (float(stop) - float(start)) % TWO_PI
            if length == 0.0:
                length = TWO_PI if stop != start else 0.0
            if length == 0.0:
                continue
            hi = lo + length
            if hi <= TWO_PI + 1e-13:
                intervals.append((lo, min(hi, TWO_PI), i))
            else:
                intervals.append((lo, TWO_PI, i))
                intervals.append((0.0, hi - TWO_PI, i))
        points = sorted({0.0, TWO_PI, *[p for iv in intervals for p in iv[:2]]})
        merged = [points[0]]
        for p in points[1:]:
            if p - merged[-1] > 1e-13:
                merged.append(p)
            else:
                merged[-1] = max(merged[-1], p) if p == TWO_PI else merged[-1]
        merged[-1] = TWO_PI

        def owner(mid):
            idx = 0
            for lo, hi, i in intervals:
                if lo - 1e-13 <= mid < hi + 1e-13:
                    idx = i
            return idx

        pieces = []
        for lo, hi in zip(merged[:-1], merged[1:]):
            idx = owner(0.5 * (lo + hi))
            value, expr = sources[idx]
            if pieces and pieces[-1][2] == idx:
                pieces[-1][1] = hi
            else:
                pieces.append([lo, hi, idx, value, expr])
        built = tuple(Piece(lo, hi, value, expr) for lo, hi, _, value, expr in pieces)
        object.__setattr__(self, "pieces", built)
        object.__setattr__(
            self, "breaks", np.array([p.start for p in built] + [TWO_PI])
        )
        self._validate()

    @property
    def piecewise_constant(self) -> bool:
        return all(p.constant for p in self.pieces)

    def _validate(self):
        for p in self.pieces:
            if p.constant:
                if not 0.0 <= p.value <= 1.0:
                    raise SymbolError(f"modulus value {p.value} outside [0, 1]")
                if p.value == 0.0:
                    raise SymbolError(
                        "modulus vanishes on an arc of positive measure; "
                        "log w is not integrable"
                    )
        t = (np.arange(8192) + 0.5) * (TWO_PI / 8192)
        w = self._raw(t)
        if not np.all(np.isfinite(w)):
            raise SymbolError("modulus expression produced non-finite values")
        if w.min() < -1e-12 or w.max() > 1.0 + 1e-12:
            raise SymbolError("modulus values must lie in [0, 1]")
        if np.mean(w < 1e-12) > 1e-3:
            raise SymbolError(
                "modulus vanishes on a set of positive measure; "
                "log w is not integrable"
            )

    def _interior(self, t):
        return np.clip(self._raw(t), 0.0, None)

    def _raw(self, t):
        t = np.mod(np.asarray(t, dtype=float), TWO_PI)
        idx = np.clip(np.searchsorted(self.breaks, t, side="right") - 1, 0,
                      len(self.pieces) - 1)
        out = np.empty(t.shape)
        for k, piece in enumerate(self.pieces):
            mask = idx == k
            if np.any(mask):
                out[mask] = piece.evaluate(t[mask])
        return out

    def modulus_squared(self, t, atol: float = 1e-12):
        """``w(t)**2``, averaged over the one-sided limits at jumps."""
        t = np.mod(np.asarray(t, dtype=float), TWO_PI)
        w2 = self._interior(t) ** 2
        n = len(self.pieces)
        for k in range(n):
            bp = self.breaks[k]
            near = np.minimum(np.abs(t - bp), TWO_PI - np.abs(t - bp)) < atol
            if not np.any(near):
                continue
            at = bp if k > 0 else TWO_PI
            left = self.pieces[k - 1].evaluate(np.array([at]))[0]
            right = self.pieces[k].evaluate(np.array([bp]))[0]
            w2[near] = 0.5 * (left**2 + right**2)
        return w2

    def __call__(self, t):
        return np.sqrt(self.modulus_squared(t))

    # ------------------------------------------------------------------
    # Fourier coefficients of log w
    def log_fourier(self, order: int) -> np.ndarray:
        r"""Coefficients ``c_k = (1/2pi) \int e^{-ikt} log w(t) dt``, k = 0..order."""
        k = np.arange(order + 1)
        c = np.zeros(order + 1, dtype=complex)
        for piece in self.pieces:
            if piece.constant:
                c += math.log(piece.value) * _exp_integral(piece.start, piece.stop, k)
            else:
                for lo, hi in _split_at_zeros(piece):
                    c += _quadrature_fourier(piece, lo, hi, order)
        return c / TWO_PI

    def log_fourier_hp(self, order: int, prec: int):
        """Extended-precision log-Fourier coefficients (piecewise-constant only)."""
        from flint import acb, arb, ctx

        if not self.piecewise_constant:
            raise NotImplementedError(
                "extended precision needs a piecewise-constant modulus"
            )
        old = ctx.prec
        ctx.prec = prec
        try:
            two_pi = 2 * arb.pi()
            out = [acb(0)] * (order + 1)
            for piece in self.pieces:
                lv = arb(piece.value).log()
                a, b = arb(piece.start), arb(piece.stop)
                out[0] += lv * (b - a) / two_pi
                for kk in range(1, order + 1):
                    eb = acb(0, -kk * b).exp()
                    ea = acb(0, -kk * a).exp()
                    out[kk] += lv * (eb - ea) / acb(0, -kk) / two_pi
            return out
        finally:
            ctx.prec = old


def _exp_integral(a, b, k):
    r"""``\int_a^b e^{-ikt} dt`` for an integer array ``k``."""
    out = np.empty(k.shape, dtype=complex)
    out[k == 0] = b - a
    nz = k != 0
    kk = k[nz]
    out[nz] = (np.exp(-1j * kk * b) - np.exp(-1j * kk * a)) / (-1j * kk)
    return out


def _split_at_zeros(piece: Piece):
    """Split a smooth piece at interior zeros of ``w``."""
    lo, hi = piece.start, piece.stop
    t = np.linspace(lo, hi, 4097)
    w = piece.evaluate(t)
    scale = max(float(np.max(np.abs(w))), 1e-300)
    cuts = []
    for j in range(1, len(t) - 1):
        if w[j] <= w[j - 1] and w[j] <= w[j + 1] and w[j] < 1e-3 * scale:
            res = minimize_scalar(
                lambda s: float(np.abs(piece.evaluate(np.array([s]))[0])),
                bounds=(t[j - 1], t[j + 1]), method="bounded",
                options={"xatol": 1e-15},
            )
            if res.fun < 1e-7 * scale:
                cuts.append(float(res.x))
    edges = [lo] + [c for c in sorted(cuts) if lo + 1e-12 < c < hi - 1e-12] + [hi]
    return list(zip(edges[:-1], edges[1:]))


_GL_NODES, _GL_WEIGHTS = roots_legendre(32)


def _graded_rule(lo, hi, n, p=3):
    """Composite Gauss-Legendre rule on ``[lo, hi]`` graded towards both ends.

    The substitution ``t = lo + (hi - lo) s^p / (s^p + (1-s)^p)`` flattens
    logarithmic endpoint singularities; ``[0, 1]`` is split into panels of
    32 nodes each so that about ``n`` nodes are used.
    """
    panels = max(1, -(-n // 32))
    edges = np.linspace(0.0, 1.0, panels + 1)
    half = 0.5 * np.diff(edges)
    s = ((edges[:-1] + half)[:, None] + half[:, None] * _GL_NODES[None, :]).ravel()
    ws = (half[:, None] * _GL_WEIGHTS[None, :]).ravel()
    num = s**p
    den = s**p + (1.0 - s) ** p
    phi = num / den
    dphi = p * s ** (p - 1) * (1.0 - s) ** (p - 1) / den**2
    return lo + (hi - lo) * phi, (hi - lo) * dphi * ws


def _quadrature_fourier(piece, lo, hi, order):
    n = int(2.0 * max(order, 32) * (hi - lo)) + 64
    t, wts = _graded_rule(lo, hi, n)
    w = piece.evaluate(t)
    with np.errstate(divide="ignore"):
        logw = np.log(w)
    ok = np.isfinite(logw)
    f = np.where(ok, wts * logw, 0.0)
    out = np.empty(order + 1, dtype=complex)
    step = np.exp(-1j * t)
    for k0 in range(0, order + 1, 64):
        cur = np.exp(-1j * k0 * t)
        for k in range(k0, min(k0 + 64, order + 1)):
            out[k] = np.dot(f, cur)
            cur = cur * step
    return out


def exp_series(h: np.ndarray) -> np.ndarray:
    """Taylor coefficients of ``exp(h)`` for a power series ``h``."""
    h = np.asarray(h, dtype=complex)
    n = h.size
    out = np.zeros(n, dtype=complex)
    out[0] = np.exp(h[0])
    kh = np.arange(n) * h
    for m in range(1, n):
        out[m] = np.dot(kh[1 : m + 1], out[m - 1 :: -1][:m]) / m
    return out


def herglotz_series(logc: np.ndarray) -> np.ndarray:
    """Power series of the Herglotz transform from log-Fourier coefficients."""
    h = 2.0 * np.asarray(logc, dtype=complex)
    h[0] = logc[0].real
    return h


def outer_coefficients(profile: ModulusProfile, n: int) -> np.ndarray:
    """First ``n`` Taylor coefficients of the outer function with modulus ``w``."""
    return exp_series(herglotz_series(profile.log_fourier(n - 1)))


def outer_coefficients_hp(profile: ModulusProfile, n: int, prec: int):
    """Extended-precision Taylor coefficients as a list of ``flint.acb``."""
    from flint import acb, acb_series, ctx

    logc = profile.log_fourier_hp(n - 1, prec)
    old_prec, old_cap = ctx.prec, ctx.cap
    ctx.prec, ctx.cap = prec, n
    try:
        h = [2 * c for c in logc]
        h[0] = logc[0].real
        out = list(acb_series(h, prec=n).exp().coeffs())
        return out + [acb(0)] * (n - len(out))
    finally:
        ctx.prec, ctx.cap = old_prec, old_cap


def outer_boundary(profile: ModulusProfile, size: int):
    """Boundary samples of the outer function on the uniform grid.

    The modulus is exact (jump points take the mean-square value); the
    phase is the imaginary part of the Herglotz series truncated at
    ``size // 2`` terms.
    """
    theta = TWO_PI * np.arange(size) / size
    modulus = np.sqrt(profile.modulus_squared(theta))
    h = herglotz_series(profile.log_fourier(size // 2 - 1))
    padded = np.zeros(size, dtype=complex)
    padded[: h.size] = h
    phase = (size * np.fft.ifft(padded)).imag
    return modulus * np.exp(1j * phase)
