"""Symbols ``b`` in the closed unit ball of H-infinity.

A :class:`SymbolSpec` describes ``b`` declaratively (finite Blaschke
product, polynomial, outer function with prescribed modulus, product or
scalar multiple).  From it we obtain Taylor coefficients, samples on the
uniform boundary grid, the moments of ``|b|**2`` and a few diagnostics.

Moment orientation
------------------
Throughout the package ``m_k = <z^k, |b|^2>_2 = (1/2pi) int e^{ik theta}
|b|^2 d theta = sum_j b_j conj(b_{j+k})``, with ``m_{-k} = conj(m_k)``.
:meth:`MomentSequence.pairing` is the single accessor downstream code uses.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path

import numpy as np
from scipy.optimize import minimize_scalar
from scipy.signal import lfilter

from .errors import SymbolError
from .outer import (
    TWO_PI,
    ModulusProfile,
    outer_boundary,
    outer_coefficients,
    outer_coefficients_hp,
    parse_angle,
)

KINDS = ("blaschke", "polynomial", "outer_from_modulus", "product", "scaled")
CLASSES = ("inner", "extreme_non_inner", "nonextreme", "unknown")

TOL_NORM = 1e-10


def _as_complex(value) -> complex:
    if isinstance(value, bool):
        raise SymbolError(f"cannot interpret {value!r} as a complex number")
    if isinstance(value, (int, float, complex)):
        return complex(value)
    if isinstance(value, (list, tuple)) and len(value) == 2:
        return complex(float(value[0]), float(value[1]))
    if isinstance(value, dict) and set(value) <= {"re", "im"}:
        return complex(float(value.get("re", 0.0)), float(value.get("im", 0.0)))
    if isinstance(value, str):
        try:
            return complex(value.replace(" ", "").replace("i", "j"))
        except ValueError:
            pass
    raise SymbolError(f"cannot interpret {value!r} as a complex number")


@dataclass(frozen=True)
class SymbolSpec:
    """Declarative description of a symbol ``b``.

    Use the class-method constructors (:meth:`blaschke`, :meth:`polynomial`,
    :meth:`outer`, :meth:`product`, :meth:`scaled`) or :func:`parse_symbol`.
    """

    kind: str
    zeros: tuple = ()
    coeffs: tuple = ()
    modulus: ModulusProfile | None = None
    factors: tuple = ()
    scale: complex = 1.0
    declared_class: str = "unknown"
    name: str | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise SymbolError(f"unknown symbol kind {self.kind!r}")
        if self.declared_class not in CLASSES:
            raise SymbolError(f"unknown declared_class {self.declared_class!r}")
        object.__setattr__(self, "zeros", tuple(complex(z) for z in self.zeros))
        object.__setattr__(self, "coeffs", tuple(complex(c) for c in self.coeffs))
        object.__setattr__(self, "factors", tuple(self.factors))
        object.__setattr__(self, "scale", complex(self.scale))
        if self.kind == "blaschke":
            for z in self.zeros:
                if abs(z) >= 1.0:
                    raise SymbolError(f"zero outside disk: {z}")
        elif self.kind == "polynomial":
            if not self.coeffs:
                raise SymbolError("polynomial symbol needs coefficients")
            if _polynomial_sup(np.array(self.coeffs)) > 1.0 + TOL_NORM:
                raise SymbolError("polynomial has sup norm greater than 1")
        elif self.kind == "outer_from_modulus":
            if not isinstance(self.modulus, ModulusProfile):
                raise SymbolError("outer_from_modulus needs a modulus profile")
        elif self.kind in ("product", "scaled"):
            if not self.factors:
                raise SymbolError(f"{self.kind} symbol needs factors")
            if not all(isinstance(f, SymbolSpec) for f in self.factors):
                raise SymbolError("factors must be symbol specifications")
        if abs(self.scale) > 1.0 + 1e-15:
            raise SymbolError("|scale| must not exceed 1")
        if self.kind != "scaled" and self.scale != 1.0:
            raise SymbolError("scale is only meaningful for kind 'scaled'")

    # -- constructors ---------------------------------------------------
    @classmethod
    def blaschke(cls, zeros, **kw) -> SymbolSpec:
        return cls("blaschke", zeros=tuple(zeros), **kw)

    @classmethod
    def polynomial(cls, coeffs, **kw) -> SymbolSpec:
        return cls("polynomial", coeffs=tuple(coeffs), **kw)

    @classmethod
    def outer(cls, default, arcs=(), **kw) -> SymbolSpec:
        return cls("outer_from_modulus", modulus=ModulusProfile(default, tuple(arcs)), **kw)

    @classmethod
    def product(cls, *factors, **kw) -> SymbolSpec:
        return cls("product", factors=tuple(factors), **kw)

    @classmethod
    def scaled(cls, scale, *factors, **kw) -> SymbolSpec:
        return cls("scaled", factors=tuple(factors), scale=scale, **kw)

    # -- derived data ---------------------------------------------------
    @property
    def label(self) -> str:
        return self.name or describe(self)

    def coefficients(self, n: int) -> np.ndarray:
        """First ``n`` Taylor coefficients ``b_0, ..., b_{n-1}``."""
        return _coefficients(self, int(n)).copy()

    def coefficients_hp(self, n: int, prec: int):
        """First ``n`` Taylor coefficients as ``flint.acb`` at ``prec`` bits."""
        return _coefficients_hp(self, int(n), int(prec))

    def modulus_at(self, theta) -> np.ndarray:
        """``|b(e^{i theta})|`` at arbitrary angles."""
        return _modulus_at(self, np.asarray(theta, dtype=float))

    @property
    def supports_extended_precision(self) -> bool:
        if self.kind == "outer_from_modulus":
            return self.modulus.piecewise_constant
        if self.kind in ("product", "scaled"):
            return all(f.supports_extended_precision for f in self.factors)
        return True

    @property
    def has_outer_factor(self) -> bool:
        if self.kind == "outer_from_modulus":
            return True
        return any(f.has_outer_factor for f in self.factors)

    @property
    def has_inner_factor(self) -> bool:
        """Whether ``b`` visibly carries a nonconstant inner factor (zeros in the open disk)."""
        if self.kind == "blaschke":
            return bool(self.zeros)
        if self.kind == "polynomial":
            c = np.trim_zeros(np.array(self.coeffs), "b")
            if c.size <= 1:
                return False
            roots = np.polynomial.polynomial.polyroots(c)
            return bool(np.any(np.abs(roots) < 1.0 - 1e-12))
        return any(f.has_inner_factor for f in self.factors)

    def blaschke_zeros(self):
        """Zeros and unimodular constant if ``b`` is a finite Blaschke product.

        Returns ``None`` otherwise.
        """
        if self.kind == "blaschke":
            return list(self.zeros), 1.0 + 0j
        if self.kind in ("product", "scaled"):
            zeros, const = [], complex(self.scale)
            for f in self.factors:
                sub = f.blaschke_zeros()
                if sub is None:
                    return None
                zeros += sub[0]
                const *= sub[1]
            if abs(abs(const) - 1.0) > 1e-14:
                return None
            return zeros, const
        if self.kind == "polynomial":
            c = np.trim_zeros(np.array(self.coeffs), "b")
            nz = np.flatnonzero(np.abs(c) > 0)
            if nz.size == 1 and abs(abs(c[nz[0]]) - 1.0) < 1e-14:
                return [0j] * int(nz[0]), complex(c[nz[0]])
        return None

    def to_dict(self) -> dict:
        """Plain-data form accepted by :func:`parse_symbol`."""
        out = {"kind": self.kind}
        if self.name is not None:
            out["name"] = self.name
        out["declared_class"] = self.declared_class
        if self.kind == "blaschke":
            out["zeros"] = [[z.real, z.imag] for z in self.zeros]
        elif self.kind == "polynomial":
            out["coeffs"] = [[c.real, c.imag] for c in self.coeffs]
        elif self.kind == "outer_from_modulus":
            out["modulus"] = {
                "default": self.modulus.default,
                "arcs": [
                    {"arc": [a, b], ("expr" if isinstance(v, str) else "value"): v}
                    for a, b, v in self.modulus.arcs
                ],
            }
        else:
            out["factors"] = [f.to_dict() for f in self.factors]
            if self.kind == "scaled":
                out["scale"] = [self.scale.real, self.scale.imag]
        return out


def describe(spec: SymbolSpec) -> str:
    if spec.kind == "blaschke":
        return "blaschke(" + ", ".join(f"{z:.4g}" for z in spec.zeros) + ")"
    if spec.kind == "polynomial":
        return "poly(" + ", ".join(f"{c:.4g}" for c in spec.coeffs) + ")"
    if spec.kind == "outer_from_modulus":
        return f"outer({len(spec.modulus.arcs)} arcs)"
    inner = " * ".join(describe(f) for f in spec.factors)
    return inner if spec.kind == "product" else f"{spec.scale:.4g} * {inner}"


# ----------------------------------------------------------------------
# parsing

def _load_document(document):
    if isinstance(document, dict):
        return document
    if isinstance(document, bytes):
        document = document.decode()
    if isinstance(document, str) and document.lstrip().startswith("{"):
        try:
            return json.loads(document)
        except json.JSONDecodeError as exc:
            raise SymbolError(f"malformed symbol document: {exc}") from exc
    if isinstance(document, (str, os.PathLike)):
        path = Path(document)
        try:
            text = path.read_text()
        except OSError as exc:
            raise SymbolError(f"cannot read symbol file {path}: {exc}") from exc
        try:
            return json.loads(text)
        except json.JSONDecodeError as exc:
            raise SymbolError(f"malformed symbol document {path}: {exc}") from exc
    raise SymbolError(f"unsupported symbol document type {type(document).__name__}")


def _parse_profile(doc) -> ModulusProfile:
    if not isinstance(doc, dict):
        raise SymbolError("modulus profile must be an object")
    default = doc.get("default", 1.0)
    if isinstance(default, dict):
        default = default.get("expr", default.get("value"))
    arcs = []
    for item in doc.get("arcs", []):
        if not isinstance(item, dict) or "arc" not in item:
            raise SymbolError("each modulus arc needs an 'arc' field")
        start, stop = (parse_angle(a) for a in item["arc"])
        if "expr" in item:
            src = str(item["expr"])
        elif "value" in item:
            src = float(item["value"])
        else:
            raise SymbolError("each modulus arc needs 'value' or 'expr'")
        arcs.append((start, stop, src))
    if not isinstance(default, (int, float, str)) or isinstance(default, bool):
        raise SymbolError("modulus default must be a number or an expression")
    return ModulusProfile(default if isinstance(default, str) else float(default), tuple(arcs))


def _from_dict(doc) -> SymbolSpec:
    if not isinstance(doc, dict):
        raise SymbolError("symbol document must be an object")
    kind = doc.get("kind")
    if kind not in KINDS:
        raise SymbolError(f"schema violation: unknown or missing kind {kind!r}")
    common = {
        "declared_class": doc.get("declared_class", "unknown"),
        "name": doc.get("name"),
    }
    if kind == "blaschke":
        zeros = doc.get("zeros", doc.get("blaschke_zeros"))
        if not isinstance(zeros, list):
            raise SymbolError("schema violation: blaschke needs a 'zeros' list")
        return SymbolSpec.blaschke([_as_complex(z) for z in zeros], **common)
    if kind == "polynomial":
        coeffs = doc.get("coeffs", doc.get("poly_coeffs"))
        if not isinstance(coeffs, list) or not coeffs:
            raise SymbolError("schema violation: polynomial needs a 'coeffs' list")
        return SymbolSpec.polynomial([_as_complex(c) for c in coeffs], **common)
    if kind == "outer_from_modulus":
        profile = doc.get("modulus", doc.get("modulus_profile"))
        return SymbolSpec("outer_from_modulus", modulus=_parse_profile(profile), **common)
    factors = doc.get("factors")
    if factors is None and "factor" in doc:
        factors = [doc["factor"]]
    if not isinstance(factors, list) or not factors:
        raise SymbolError(f"schema violation: {kind} needs 'factors'")
    parsed = [_from_dict(f) for f in factors]
    if kind == "product":
        return SymbolSpec.product(*parsed, **common)
    scale = _as_complex(doc.get("scale", 1.0))
    if abs(scale) > 1.0 + 1e-15:
        raise SymbolError("|scale| must not exceed 1")
    return SymbolSpec.scaled(scale, *parsed, **common)


def parse_symbol(document) -> SymbolSpec:
    """Build a :class:`SymbolSpec` from JSON text, a file path or a dict.

    Examples
    --------
    >>> parse_symbol('{"kind": "blaschke", "zeros": [0, 0, 0]}').coefficients(5)
    array([0.+0.j, 0.+0.j, 0.+0.j, 1.+0.j, 0.+0.j])
    """
    try:
        return _from_dict(_load_document(document))
    except SymbolError:
        raise
    except (TypeError, ValueError, KeyError) as exc:
        raise SymbolError(f"schema violation: {exc}") from exc


# ----------------------------------------------------------------------
# coefficients and boundary values

def _polynomial_sup(c: np.ndarray) -> float:
    theta = TWO_PI * np.arange(4096) / 4096

    def mod(t):
        return float(np.abs(np.polynomial.polynomial.polyval(np.exp(1j * t), c)))

    vals = np.abs(np.polynomial.polynomial.polyval(np.exp(1j * theta), c))
    j = int(np.argmax(vals))
    h = TWO_PI / 4096
    res = minimize_scalar(lambda t: -mod(t), bounds=(theta[j] - h, theta[j] + h),
                          method="bounded", options={"xatol": 1e-13})
    return max(float(vals[j]), -float(res.fun))


def _blaschke_polys(zeros):
    num = np.array([1.0 + 0j])
    den = np.array([1.0 + 0j])
    for a in zeros:
        num = np.convolve(num, [-a, 1.0])
        den = np.convolve(den, [1.0, -np.conj(a)])
    return num, den


@lru_cache(maxsize=256)
def _coefficients(spec: SymbolSpec, n: int) -> np.ndarray:
    if spec.kind == "blaschke":
        num, den = _blaschke_polys(spec.zeros)
        impulse = np.zeros(n, dtype=complex)
        impulse[0] = 1.0
        return lfilter(num, den, impulse)
    if spec.kind == "polynomial":
        out = np.zeros(n, dtype=complex)
        c = np.array(spec.coeffs)[:n]
        out[: c.size] = c
        return out
    if spec.kind == "outer_from_modulus":
        return outer_coefficients(spec.modulus, n)
    out = np.zeros(n, dtype=complex)
    out[0] = spec.scale
    for f in spec.factors:
        out = np.convolve(out, _coefficients(f, n))[:n]
    return out


def _coefficients_hp(spec: SymbolSpec, n: int, prec: int):
    from flint import acb, acb_series, ctx

    old_prec, old_cap = ctx.prec, ctx.cap
    ctx.prec, ctx.cap = prec, n
    try:
        if spec.kind == "blaschke":
            num, den = [acb(1)], [acb(1)]
            for a in spec.zeros:
                aa = acb(a.real, a.imag)
                num = _poly_mul(num, [-aa, acb(1)])
                den = _poly_mul(den, [acb(1), -aa.conjugate()])
            series = acb_series(num, prec=n) / acb_series(den, prec=n)
        elif spec.kind == "polynomial":
            series = acb_series([acb(c.real, c.imag) for c in spec.coeffs[:n]], prec=n)
        elif spec.kind == "outer_from_modulus":
            return outer_coefficients_hp(spec.modulus, n, prec)
        else:
            series = acb_series([acb(spec.scale.real, spec.scale.imag)], prec=n)
            for f in spec.factors:
                series = series * acb_series(_coefficients_hp(f, n, prec), prec=n)
        out = list(series.coeffs())[:n]
        return out + [acb(0)] * (n - len(out))
    finally:
        ctx.prec, ctx.cap = old_prec, old_cap


def _poly_mul(p, q):
    from flint import acb

    out = [acb(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        for j, b in enumerate(q):
            out[i + j] += a * b
    return out


def _modulus_at(spec: SymbolSpec, theta: np.ndarray) -> np.ndarray:
    if spec.kind == "blaschke":
        return np.abs(_blaschke_values(spec.zeros, np.exp(1j * theta)))
    if spec.kind == "polynomial":
        return np.abs(np.polynomial.polynomial.polyval(np.exp(1j * theta),
                                                       np.array(spec.coeffs)))
    if spec.kind == "outer_from_modulus":
        return spec.modulus(theta)
    out = np.full(theta.shape, abs(spec.scale))
    for f in spec.factors:
        out = out * _modulus_at(f, theta)
    return out


def _blaschke_values(zeros, z):
    out = np.ones(np.shape(z), dtype=complex)
    for a in zeros:
        out *= (z - a) / (1.0 - np.conj(a) * z)
    return out


def _boundary_samples(spec: SymbolSpec, size: int) -> np.ndarray:
    theta = TWO_PI * np.arange(size) / size
    if spec.kind == "blaschke":
        return _blaschke_values(spec.zeros, np.exp(1j * theta))
    if spec.kind == "polynomial":
        return np.polynomial.polynomial.polyval(np.exp(1j * theta), np.array(spec.coeffs))
    if spec.kind == "outer_from_modulus":
        return outer_boundary(spec.modulus, size)
    out = np.full(size, spec.scale, dtype=complex)
    for f in spec.factors:
        out = out * _boundary_samples(f, size)
    return out


# ----------------------------------------------------------------------
# grids and moments

@dataclass(frozen=True)
class BoundaryGrid:
    """Samples of ``b`` and ``rho = 1 - |b|^2`` at ``theta_j = 2 pi j / size``."""

    size: int
    samples: np.ndarray
    rho_samples: np.ndarray
    label: str = ""

    def __post_init__(self):
        for arr in (self.samples, self.rho_samples):
            arr.setflags(write=False)

    @property
    def theta(self) -> np.ndarray:
        return TWO_PI * np.arange(self.size) / self.size

    @property
    def modulus_squared(self) -> np.ndarray:
        return 1.0 - self.rho_samples


def _check_size(size):
    if size < 16 or size & (size - 1):
        raise ValueError(f"grid size must be a power of two >= 16, got {size}")


def evaluate_boundary(spec: SymbolSpec, size: int, tol_norm: float = TOL_NORM) -> BoundaryGrid:
    """Sample ``b`` and ``rho`` on the uniform grid of ``size`` points.

    Values of ``rho`` in ``[-tol_norm, 0)`` are clamped to zero; anything
    more negative means ``|b| > 1`` somewhere and the symbol is rejected.
    """
    _check_size(size)
    samples = _boundary_samples(spec, size)
    if spec.kind == "outer_from_modulus":
        w2 = spec.modulus.modulus_squared(TWO_PI * np.arange(size) / size)
    elif spec.blaschke_zeros() is not None:
        w2 = np.ones(size)  # unimodular by construction
    else:
        w2 = np.abs(samples) ** 2
    rho = 1.0 - w2
    if rho.min() < -tol_norm:
        raise SymbolError(f"sup norm of b exceeds 1 (max |b|^2 = {w2.max():.12g})")
    rho = np.where(rho < 0.0, 0.0, rho)
    return BoundaryGrid(size, samples, rho, spec.label)


def construct_outer_from_modulus(profile: ModulusProfile, size: int):
    """Outer function with ``|F| = w``: boundary grid and Taylor coefficients.

    Returns
    -------
    grid : BoundaryGrid
    coeffs : ndarray
        Taylor coefficients ``F_0 .. F_{size/2 - 1}``.
    """
    spec = SymbolSpec("outer_from_modulus", modulus=profile)
    return evaluate_boundary(spec, size), spec.coefficients(size // 2)


def taylor_coefficients(grid: BoundaryGrid, order: int, return_discarded: bool = False):
    """Taylor coefficients ``b_0..b_{order-1}`` by discrete Fourier analysis.

    With ``return_discarded`` the energy in the discarded modes (aliasing
    and truncation indicator) is returned as well.
    """
    if order > grid.size // 2:
        raise ValueError("order must not exceed size/2")
    modes = np.fft.fft(grid.samples) / grid.size
    coeffs = modes[:order].copy()
    if return_discarded:
        return coeffs, float(np.sum(np.abs(modes[order:]) ** 2))
    return coeffs


@dataclass(frozen=True)
class MomentSequence:
    """Moments ``m_k = <z^k, |b|^2>_2`` for ``k = 0..order``."""

    values: np.ndarray

    def __post_init__(self):
        self.values.setflags(write=False)

    @property
    def order(self) -> int:
        return self.values.size - 1

    def pairing(self, k: int) -> complex:
        """``<z^k, |b|^2>_2`` for any integer ``k`` (zero beyond the order)."""
        if abs(k) > self.order:
            return 0j
        v = self.values[abs(k)]
        return complex(v) if k >= 0 else complex(np.conj(v))

    def __getitem__(self, k):
        return self.pairing(k)


def moments_of_modulus_squared(grid: BoundaryGrid, order: int) -> MomentSequence:
    """Spectral quadrature of the moments of ``|b|^2`` on the grid."""
    if order > grid.size // 2:
        raise ValueError("order must not exceed size/2")
    m = np.fft.ifft(grid.modulus_squared)[: order + 1].copy()
    m[0] = m[0].real
    return MomentSequence(m)


def moments_from_coefficients(coeffs, order: int) -> np.ndarray:
    """``sum_j b_j conj(b_{j+k})`` for ``k = 0..order`` from Taylor data."""
    b = np.asarray(coeffs, dtype=complex)
    return np.array([np.vdot(b[k:], b[: b.size - k]) for k in range(order + 1)])


# ----------------------------------------------------------------------
# diagnostics

@dataclass(frozen=True)
class ParityResult:
    label: str
    odd_fraction: float
    even_fraction: float


def parity_classify(coeffs, tol: float = 1e-8) -> ParityResult:
    """Classify a coefficient vector as even, odd or neither.

    The residuals are the fractions of energy carried by odd and even
    indices respectively; a fraction below ``tol**2`` counts as zero.
    """
    c = np.asarray(coeffs, dtype=complex)
    e = np.abs(c) ** 2
    total = float(e.sum())
    if total == 0.0:
        raise ValueError("parity of the zero vector is undefined")
    odd = float(e[1::2].sum()) / total
    even = float(e[0::2].sum()) / total
    if odd <= tol**2:
        label = "even"
    elif even <= tol**2:
        label = "odd"
    else:
        label = "neither"
    return ParityResult(label, odd, even)


@dataclass(frozen=True)
class InnerDiagnostic:
    label: str
    deviation: float


def inner_diagnostic(grid: BoundaryGrid, tol: float = 1e-10) -> InnerDiagnostic:
    """``inner`` iff ``max | |b|^2 - 1 |`` on the grid is at most ``tol``."""
    dev = float(np.max(np.abs(grid.modulus_squared - 1.0)))
    return InnerDiagnostic("inner" if dev <= tol else "not_inner", dev)


@dataclass(frozen=True)
class ExtremalityDiagnostic:
    label: str
    sizes: tuple
    estimates: tuple
    zero_fractions: tuple


def extremality_diagnostic(spec: SymbolSpec, size: int = 256, levels: int = 5,
                           floor: float = 1e-300) -> ExtremalityDiagnostic:
    """Heuristic test of ``int log(1 - |b|^2) = -infinity``.

    ``int log rho dtheta/2pi`` is estimated on successively doubled grids
    (offset by half a cell so isolated zeros of ``rho`` are not sampled).
    Symbols with ``rho = 0`` on a resolved arc, or with estimates drifting
    linearly to minus infinity, are reported extreme; converging estimates
    mean nonextreme.
    """
    _check_size(size)
    grid = evaluate_boundary(spec, size)
    if inner_diagnostic(grid).label == "inner":
        return ExtremalityDiagnostic("extreme", (size,), (-math.inf,), (1.0,))
    sizes, estimates, fractions = [], [], []
    for lvl in range(levels):
        n = size << lvl
        theta = TWO_PI * (np.arange(n) + 0.5) / n
        rho = 1.0 - spec.modulus_at(theta) ** 2
        rho = np.where(rho < 1e-14, 0.0, rho)
        fractions.append(float(np.mean(rho == 0.0)))
        estimates.append(float(np.mean(np.log(np.maximum(rho, floor)))))
        sizes.append(n)
    f = np.array(fractions)
    if f[-1] > 0 and np.all(f[-3:] * sizes[-1] >= 8) and np.ptp(f[-3:]) < 0.02:
        label = "extreme"
    else:
        d = np.diff(estimates)
        if abs(d[-1]) < 1e-2 and abs(d[-1]) <= 0.75 * abs(d[-2]) + 1e-12:
            label = "nonextreme"
        elif d[-1] < -0.05 and abs(d[-1] - d[-2]) < 0.25 * abs(d[-1]):
            label = "extreme"
        else:
            label = "inconclusive"
    return ExtremalityDiagnostic(label, tuple(sizes), tuple(estimates), tuple(fractions))


def resolved_class(spec: SymbolSpec) -> str:
    """Declared class, or the diagnostic verdict when undeclared."""
    if spec.declared_class != "unknown":
        return spec.declared_class
    if spec.blaschke_zeros() is not None:
        return "inner"
    grid = evaluate_boundary(spec, 256 if not spec.has_outer_factor else 4096)
    if inner_diagnostic(grid).label == "inner":
        return "inner"
    ext = extremality_diagnostic(spec).label
    return {"extreme": "extreme_non_inner", "nonextreme": "nonextreme"}.get(ext, "unknown")
