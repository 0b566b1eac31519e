"""Distorted Fourier transform around a moving kink.

The basis is e(y, xi) = (2 pi)^{-1/2} m(gamma y, xi) exp(i y xi) with
m = (eta + i tanh(gamma y)) / (|eta| - i) and eta = gamma (xi + l <xi>).
Since m is affine in tanh, every transform is two FFTs.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .grid import Field, FieldPair, Grid, derivative_values
from .kink import gamma_of, sech
from .spectral import apply_H, h1l2_norm2, inner, project_essential, random_smooth_pair

SQRT2PI = np.sqrt(2 * np.pi)


def japanese(xi):
    return np.sqrt(1.0 + np.asarray(xi, dtype=float) ** 2)


def eta_of(xi, ell: float):
    """eta = gamma (xi + l <xi>)."""
    return gamma_of(ell) * (np.asarray(xi, dtype=float) + ell * japanese(xi))


def omega_of(xi, ell: float):
    """Dispersion <xi> + l xi."""
    return japanese(xi) + ell * np.asarray(xi, dtype=float)


def e_sharp(y, xi, ell: float):
    """Pointwise basis element; broadcasts over y and xi."""
    y = np.asarray(y, dtype=float)
    xi = np.asarray(xi, dtype=float)
    g = gamma_of(ell)
    eta = eta_of(xi, ell)
    return (eta + 1j * np.tanh(g * y)) / (np.abs(eta) - 1j) * np.exp(1j * y * xi) / SQRT2PI


def e_sharp_dy(y, xi, ell: float):
    """d/dy of ``e_sharp``."""
    y = np.asarray(y, dtype=float)
    xi = np.asarray(xi, dtype=float)
    g = gamma_of(ell)
    eta = eta_of(xi, ell)
    num = 1j * g * sech(g * y) ** 2 + 1j * xi * (eta + 1j * np.tanh(g * y))
    return num / (np.abs(eta) - 1j) * np.exp(1j * y * xi) / SQRT2PI


def De_sharp(y, xi, ell: float):
    """(-l d_y + i omega) e, the kernel of the D-transform."""
    return -ell * e_sharp_dy(y, xi, ell) + 1j * omega_of(xi, ell) * e_sharp(y, xi, ell)


@dataclass(frozen=True)
class SpectralFunction:
    """Complex samples on the dual lattice xi_k = 2 pi k / L (DFT order)."""

    xi: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex)
        if v.shape != np.shape(self.xi):
            raise ValueError("values and frequencies differ in shape")
        if not np.all(np.isfinite(v)):
            raise ValueError("spectral samples must be finite")
        v = v.copy()
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def dxi(self) -> float:
        return float(abs(self.xi[1] - self.xi[0]))

    def __add__(self, other):
        return SpectralFunction(self.xi, self.values + other.values)

    def __sub__(self, other):
        return SpectralFunction(self.xi, self.values - other.values)

    def __mul__(self, c):
        return SpectralFunction(self.xi, c * self.values)

    __rmul__ = __mul__

    def norm(self, weight=None) -> float:
        w = 1.0 if weight is None else weight
        return float(np.sqrt(np.sum(w * np.abs(self.values) ** 2) * self.dxi))

    def sorted(self):
        """(xi, values) in increasing xi."""
        order = np.argsort(self.xi)
        return self.xi[order], self.values[order]


class DistortedBasis:
    """Discrete transforms for boost ``ell`` on ``grid``."""

    def __init__(self, grid: Grid, ell: float):
        if not abs(ell) < 1:
            raise ValueError("boost must lie in (-1, 1)")
        self.grid = grid
        self.ell = float(ell)
        self.gamma = float(gamma_of(ell))

    @cached_property
    def xi(self):
        return self.grid.k

    @cached_property
    def eta(self):
        return eta_of(self.xi, self.ell)

    @cached_property
    def omega(self):
        return omega_of(self.xi, self.ell)

    @cached_property
    def jxi(self):
        return japanese(self.xi)

    @cached_property
    def tanh(self):
        return np.tanh(self.gamma * self.grid.x)

    @cached_property
    def _shift(self):
        # exp(-i x_j xi_k) = exp(i L xi_k / 2) exp(-2 pi i j k / N)
        return np.exp(1j * self.xi * self.grid.L / 2)

    def _dft(self, v):
        return self.grid.h * self._shift * np.fft.fft(v)

    def _idft(self, c):
        return self.grid.N * np.fft.ifft(np.conj(self._shift) * c) * self.grid.dxi

    def _values(self, g):
        if isinstance(g, Field):
            return g.values
        return np.asarray(g)

    def forward(self, g) -> SpectralFunction:
        """Integral of conj(e(x, xi)) g(x) on the lattice."""
        g = self._values(g)
        den = np.abs(self.eta) + 1j
        out = (self.eta * self._dft(g) - 1j * self._dft(self.tanh * g)) / den / SQRT2PI
        return SpectralFunction(self.xi, out)

    def forward_D(self, g) -> SpectralFunction:
        """Integral of conj(e) (l d - i omega) g."""
        g = self._values(g)
        dg = derivative_values(g, self.grid.k, 1)
        a = self.forward(dg).values
        b = self.forward(g).values
        return SpectralFunction(self.xi, self.ell * a - 1j * self.omega * b)

    def vector_transform(self, f: FieldPair) -> SpectralFunction:
        """T f = F_D[Re f1] - F[Re f2]."""
        a = self.forward_D(np.real(f.first)).values
        b = self.forward(np.real(f.second)).values
        return SpectralFunction(self.xi, a - b)

    def _adjoint_parts(self, h):
        den = np.abs(self.eta) - 1j
        A = self._idft(self.eta / den * h) / SQRT2PI
        B = self._idft(1j / den * h) / SQRT2PI
        return A, B

    def adjoint(self, h) -> np.ndarray:
        """Sum over the lattice of e(x, xi) h(xi) dxi."""
        h = h.values if isinstance(h, SpectralFunction) else np.asarray(h)
        A, B = self._adjoint_parts(h)
        return A + self.tanh * B

    def adjoint_D(self, h) -> np.ndarray:
        """Sum over the lattice of (-l d_x + i omega) e(x, xi) h(xi) dxi."""
        h = h.values if isinstance(h, SpectralFunction) else np.asarray(h)
        A, B = self._adjoint_parts(h)
        k = self.grid.k
        dA = derivative_values(A, k, 1)
        dB = derivative_values(B, k, 1)
        g = self.gamma
        d = dA + g * sech(g * self.grid.x) ** 2 * B + self.tanh * dB
        return -self.ell * d + self.adjoint(1j * self.omega * h)

    def vector_adjoint(self, h) -> FieldPair:
        """T* h = (Re F_D* h, -Re F* h)."""
        h = h.values if isinstance(h, SpectralFunction) else np.asarray(h)
        return FieldPair(self.grid, np.real(self.adjoint_D(h)), -np.real(self.adjoint(h)))

    def invert_physical(self, h) -> FieldPair:
        """J^T T*[i h / <xi>], which equals P_e f when h = T f."""
        h = h.values if isinstance(h, SpectralFunction) else np.asarray(h)
        hh = 1j * h / self.jxi
        return FieldPair(self.grid, np.real(self.adjoint(hh)), np.real(self.adjoint_D(hh)))

    def propagate(self, h, t: float) -> SpectralFunction:
        return propagator_multiplier(h, t, self.ell)


def forward(g, grid: Grid, ell: float) -> SpectralFunction:
    return DistortedBasis(grid, ell).forward(g)


def forward_D(g, grid: Grid, ell: float) -> SpectralFunction:
    return DistortedBasis(grid, ell).forward_D(g)


def vector_transform(f: FieldPair, ell: float) -> SpectralFunction:
    return DistortedBasis(f.grid, ell).vector_transform(f)


def invert_physical(h: SpectralFunction, grid: Grid, ell: float) -> FieldPair:
    return DistortedBasis(grid, ell).invert_physical(h)


def propagator_multiplier(h: SpectralFunction, t: float, ell: float) -> SpectralFunction:
    """Multiply by exp(i t (<xi> + l xi))."""
    return SpectralFunction(h.xi, np.exp(1j * t * omega_of(h.xi, ell)) * h.values)


def forward_direct(g, y, xi, ell: float, D: bool = False, dg=None):
    """Reference transform by dense quadrature at arbitrary frequencies.

    ``y`` must be a uniform grid on which g has decayed; off-lattice
    frequencies are allowed.
    """
    y = np.asarray(y)
    xi = np.atleast_1d(np.asarray(xi, dtype=float))
    h = y[1] - y[0]
    E = e_sharp(y[None, :], xi[:, None], ell)
    if not D:
        return h * (np.conj(E) @ g)
    if dg is None:
        raise ValueError("the D-transform needs the derivative of g")
    w = omega_of(xi, ell)
    return h * (np.conj(E) @ (ell * dg)) - 1j * w * h * (np.conj(E) @ g)


@dataclass(frozen=True)
class PlancherelReport:
    lhs: float
    rhs: float
    defect: float


def plancherel_defect(f: FieldPair, g: FieldPair, ell: float) -> PlancherelReport:
    """Compare <H P_e f, g> with the weighted pairing of T f and T g.

    The discrete modes carry no energy on the transform side, so the
    identity only holds once f is projected onto the essential spectrum.
    """
    b = DistortedBasis(f.grid, ell)
    lhs = inner(apply_H(project_essential(f, ell), ell), g)
    tf, tg = b.vector_transform(f).values, b.vector_transform(g).values
    rhs = float(np.real(np.sum(tf * np.conj(tg) * b.omega / b.jxi)) * f.grid.dxi)
    return PlancherelReport(lhs, rhs, abs(lhs - rhs))


@dataclass(frozen=True)
class SobolevConstants:
    ell: float
    lower: float
    upper: float
    samples: int


def sobolev_constants(grid: Grid, ell: float, samples: int = 100, seed: int = 0) -> SobolevConstants:
    """Observed range of |T f|_{L2} / |P_e f|_{H1 x L2} over random f."""
    rng = np.random.default_rng(seed)
    b = DistortedBasis(grid, ell)
    ratios = []
    for _ in range(samples):
        f = random_smooth_pair(grid, rng)
        pe = project_essential(f, ell)
        ratios.append(b.vector_transform(f).norm() / np.sqrt(h1l2_norm2(pe)))
    return SobolevConstants(ell, float(min(ratios)), float(max(ratios)), samples)
