"""Periodic grid, field containers, spectral differentiation and quadrature."""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import integrate

BOUNDARY_MASS_THRESHOLD = 1e-10


class BoundaryMassWarning(UserWarning):
    """Raised when an integrand has not decayed at the edge of the box."""


def _frozen(a, dtype=None):
    a = np.array(a, dtype=dtype, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class Grid:
    """Uniform periodic grid on [-L/2, L/2).

    Parameters
    ----------
    L : float
        Box length.
    N : int
        Number of nodes, a power of two and at least 16.
    """

    L: float = 80.0
    N: int = 4096

    def __post_init__(self):
        if not (self.L > 0 and np.isfinite(self.L)):
            raise ValueError(f"box length must be positive, got {self.L}")
        n = int(self.N)
        if n < 16 or n & (n - 1):
            raise ValueError(f"N must be a power of two >= 16, got {self.N}")
        object.__setattr__(self, "N", n)
        object.__setattr__(self, "L", float(self.L))
        h = self.L / n
        object.__setattr__(self, "_x", _frozen(-self.L / 2 + h * np.arange(n)))
        object.__setattr__(self, "_k", _frozen(2 * np.pi * np.fft.fftfreq(n, d=h)))

    @property
    def h(self) -> float:
        return self.L / self.N

    @property
    def x(self) -> np.ndarray:
        return self._x

    @property
    def k(self) -> np.ndarray:
        """Angular wavenumbers 2 pi k / L in DFT order."""
        return self._k

    @property
    def dxi(self) -> float:
        return 2 * np.pi / self.L

    def dealias_mask(self) -> np.ndarray:
        """Two-thirds rule mask in DFT order."""
        kmax = np.abs(self.k).max()
        return np.abs(self.k) < (2.0 / 3.0) * kmax

    def boundary_mass(self, values) -> float:
        """Largest modulus among the outer 2% of nodes on either side."""
        v = np.abs(np.asarray(values))
        m = max(2, self.N // 50)
        return float(max(v[:m].max(), v[-m:].max()))


def _check_finite(values):
    if not np.all(np.isfinite(values)):
        raise ValueError("field contains non-finite samples")


@dataclass(frozen=True)
class Field:
    """Real or complex samples on a grid. Arrays are read-only."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values)
        if v.shape != (self.grid.N,):
            raise ValueError(f"expected {self.grid.N} samples, got shape {v.shape}")
        _check_finite(v)
        object.__setattr__(self, "values", _frozen(v))

    @property
    def is_complex(self) -> bool:
        return np.iscomplexobj(self.values)


@dataclass(frozen=True)
class FieldPair:
    """State (first, second) of the first-order system on one grid."""

    grid: Grid
    first: np.ndarray
    second: np.ndarray

    def __post_init__(self):
        for name in ("first", "second"):
            v = np.asarray(getattr(self, name))
            if v.shape != (self.grid.N,):
                raise ValueError(f"{name}: expected {self.grid.N} samples, got {v.shape}")
            _check_finite(v)
            object.__setattr__(self, name, _frozen(v))

    @classmethod
    def zeros(cls, grid: Grid, dtype=float) -> "FieldPair":
        z = np.zeros(grid.N, dtype=dtype)
        return cls(grid, z, z)

    def _same(self, other):
        if other.grid != self.grid:
            raise ValueError("field pairs live on different grids")

    def __add__(self, other: "FieldPair") -> "FieldPair":
        self._same(other)
        return FieldPair(self.grid, self.first + other.first, self.second + other.second)

    def __sub__(self, other: "FieldPair") -> "FieldPair":
        self._same(other)
        return FieldPair(self.grid, self.first - other.first, self.second - other.second)

    def __mul__(self, c) -> "FieldPair":
        return FieldPair(self.grid, c * self.first, c * self.second)

    __rmul__ = __mul__

    def __neg__(self) -> "FieldPair":
        return FieldPair(self.grid, -self.first, -self.second)

    def conj(self) -> "FieldPair":
        return FieldPair(self.grid, np.conj(self.first), np.conj(self.second))

    @property
    def real(self) -> "FieldPair":
        return FieldPair(self.grid, self.first.real, self.second.real)

    def J(self) -> "FieldPair":
        """Symplectic rotation J(a, b) = (b, -a)."""
        return FieldPair(self.grid, self.second, -self.first)

    def sup(self) -> float:
        return float(max(np.abs(self.first).max(), np.abs(self.second).max()))


def derivative_values(values, k, order: int = 1) -> np.ndarray:
    """Fourier multiplier (ik)^order applied to periodic samples."""
    values = np.asarray(values)
    mult = (1j * k) ** order
    if order % 2 == 1:
        # the Nyquist mode has no consistent odd derivative
        mult = mult.copy()
        mult[len(k) // 2] = 0.0
    out = np.fft.ifft(mult * np.fft.fft(values))
    return out if np.iscomplexobj(values) else out.real


def spectral_derivative(f, order: int = 1, grid: Grid | None = None):
    """Spectral derivative of a periodic field.

    Parameters
    ----------
    f : Field or ndarray
        Samples to differentiate. A bare array needs ``grid``.
    order : int
        1, 2 or 3.

    Returns
    -------
    Field or ndarray
        Same kind as the input.
    """
    if order not in (1, 2, 3):
        raise ValueError(f"order must be 1, 2 or 3, got {order}")
    if isinstance(f, Field):
        return Field(f.grid, derivative_values(f.values, f.grid.k, order))
    if grid is None:
        raise ValueError("a grid is required for array input")
    values = np.asarray(f)
    _check_finite(values)
    return derivative_values(values, grid.k, order)


@dataclass(frozen=True)
class QuadratureResult:
    value: complex
    boundary_mass: float
    boundary_warning: bool

    def __float__(self):
        return float(np.real(self.value))


def integrate_values(values, h: float):
    """Periodic trapezoid sum h * sum(values)."""
    return h * np.sum(values)


def quadrature(f, grid: Grid | None = None,
               threshold: float = BOUNDARY_MASS_THRESHOLD) -> QuadratureResult:
    """Trapezoid integral over the box with a boundary-decay check."""
    if isinstance(f, Field):
        grid, values = f.grid, f.values
    else:
        if grid is None:
            raise ValueError("a grid is required for array input")
        values = np.asarray(f)
    _check_finite(values)
    mass = grid.boundary_mass(values)
    flag = mass > threshold
    if flag:
        warnings.warn(f"integrand has boundary mass {mass:.2e}", BoundaryMassWarning,
                      stacklevel=2)
    val = integrate_values(values, grid.h)
    if not np.iscomplexobj(values):
        val = float(val)
    return QuadratureResult(val, mass, flag)


@dataclass(frozen=True)
class OscillatoryResult:
    value: complex
    error: float
    converged: bool
    message: str = ""


def oscillatory_quadrature(g: Callable, zeta: float, *, half_width: float = 40.0,
                           tol: float = 1e-13, max_panels: int = 400,
                           zeta_max: float = 200.0, breakpoints=()) -> OscillatoryResult:
    """Integral of exp(i x zeta) g(x) over the line.

    The integrand is truncated to |x| <= half_width, which is harmless for
    profiles decaying like exp(-|x|). Each piece between breakpoints is
    handled by adaptive panel subdivision with cosine and sine weights.

    Parameters
    ----------
    g : callable
        Complex or real profile, vectorized or scalar.
    zeta : float
        Frequency, ``|zeta| <= zeta_max``.
    tol : float
        Absolute tolerance per weighted piece.
    max_panels : int
        Subdivision budget per piece.

    Returns
    -------
    OscillatoryResult
        ``converged`` is False when some piece missed the tolerance.
    """
    if abs(zeta) > zeta_max:
        raise ValueError(f"|zeta|={abs(zeta)} exceeds zeta_max={zeta_max}")
    edges = np.unique(np.concatenate([[-half_width, half_width],
                                      [b for b in breakpoints if abs(b) < half_width]]))

    def re(x):
        return float(np.real(g(x)))

    def im(x):
        return float(np.imag(g(x)))

    total = 0j
    err = 0.0
    ok = True
    msgs = []
    for a, b in zip(edges[:-1], edges[1:]):
        parts = {}
        for name, fn in (("r", re), ("i", im)):
            for wname in ("cos", "sin"):
                if zeta == 0 and wname == "sin":
                    parts[name + wname] = 0.0
                    continue
                with warnings.catch_warnings(record=True) as caught:
                    warnings.simplefilter("always")
                    if zeta == 0:
                        val, e, info = integrate.quad(fn, a, b, epsabs=tol, epsrel=0,
                                                      limit=max_panels, full_output=1)[:3]
                    else:
                        val, e, info = integrate.quad(fn, a, b, weight=wname, wvar=zeta,
                                                      epsabs=tol, epsrel=0,
                                                      limit=max_panels, full_output=1)[:3]
                parts[name + wname] = val
                err += e
                if caught and e > 10 * tol:
                    ok = False
                    msgs.append(str(caught[0].message).split("\n")[0])
        # exp(i x z) (gr + i gi) = (cos gr - sin gi) + i (cos gi + sin gr)
        total += (parts["rcos"] - parts["isin"]) + 1j * (parts["icos"] + parts["rsin"])
    return OscillatoryResult(total, err, ok, "; ".join(msgs))
