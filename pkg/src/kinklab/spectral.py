"""Scalar scattering data, the matrix operators L and H, projections and the resolvent."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import FieldPair, Grid, derivative_values, integrate_values
from .kink import KinkParams, gamma_of, inner, kernel_elements, sech


def transmission(zeta):
    """Transmission coefficient (zeta + i) / (zeta - i) of the Poschl-Teller well."""
    zeta = np.asarray(zeta, dtype=complex)
    return (zeta + 1j) / (zeta - 1j)


def jost_coefficient(zeta, sign: int):
    return -sign / (1j * np.asarray(zeta, dtype=complex) - 1)


def jost(x, zeta, sign: int):
    """Jost solution f_sign(x, zeta) of -f'' - 2 sech^2 f = zeta^2 f.

    ``sign`` is +1 (plane wave at +infinity) or -1 (at -infinity).
    """
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    x = np.asarray(x, dtype=float)
    zeta = np.asarray(zeta, dtype=complex)
    return jost_coefficient(zeta, sign) * (-sign * 1j * zeta + np.tanh(x)) * np.exp(sign * 1j * x * zeta)


def jost_derivative(x, zeta, sign: int):
    """d/dx of ``jost``."""
    x = np.asarray(x, dtype=float)
    zeta = np.asarray(zeta, dtype=complex)
    c = jost_coefficient(zeta, sign)
    e = np.exp(sign * 1j * x * zeta)
    return c * (sech(x) ** 2 + sign * 1j * zeta * (-sign * 1j * zeta + np.tanh(x))) * e


def wronskian_scaled(x, sigma, gamma: float):
    """Wronskian in x of f_+(gamma x, sigma) and f_-(gamma x, sigma)."""
    s = gamma * np.asarray(x, dtype=float)
    fp, fm = jost(s, sigma, 1), jost(s, sigma, -1)
    dp, dm = gamma * jost_derivative(s, sigma, 1), gamma * jost_derivative(s, sigma, -1)
    return fp * dm - dp * fm


@dataclass(frozen=True)
class ScatteringData:
    """Evaluators for the reflectionless scattering problem."""

    def f_plus(self, x, zeta):
        return jost(x, zeta, 1)

    def f_minus(self, x, zeta):
        return jost(x, zeta, -1)

    def T(self, zeta):
        return transmission(zeta)

    def W(self, zeta):
        """Wronskian W(f_+, f_-) = -2 i zeta / T(zeta)."""
        zeta = np.asarray(zeta, dtype=complex)
        return -2j * zeta / transmission(zeta)


def potential(grid: Grid, ell: float) -> np.ndarray:
    """V(y) = -2 sech^2(gamma y)."""
    return -2 * sech(gamma_of(ell) * grid.x) ** 2


def apply_Lscalar(grid: Grid, ell: float, u) -> np.ndarray:
    """Scalar operator -u'' + V u + u."""
    return -derivative_values(u, grid.k, 2) + potential(grid, ell) * u + u


def apply_L(f: FieldPair, ell: float) -> FieldPair:
    """Linearized generator [[l d, 1], [-L_l, l d]] in the moving frame."""
    g = f.grid
    d1 = derivative_values(f.first, g.k, 1)
    d2 = derivative_values(f.second, g.k, 1)
    return FieldPair(g, ell * d1 + f.second, -apply_Lscalar(g, ell, f.first) + ell * d2)


def apply_H(f: FieldPair, ell: float) -> FieldPair:
    """Energy Hessian [[L_l, -l d], [l d, 1]], so that L = J H."""
    g = f.grid
    d1 = derivative_values(f.first, g.k, 1)
    d2 = derivative_values(f.second, g.k, 1)
    return FieldPair(g, apply_Lscalar(g, ell, f.first) - ell * d2, ell * d1 + f.second)


def apply_L_free(f: FieldPair, ell: float) -> FieldPair:
    g = f.grid
    d1 = derivative_values(f.first, g.k, 1)
    d2 = derivative_values(f.second, g.k, 1)
    return FieldPair(g, ell * d1 + f.second,
                     derivative_values(f.first, g.k, 2) - f.first + ell * d2)


def energy_inner(f: FieldPair, g: FieldPair) -> float:
    """Pairing <A0 f, g> with A0 = diag(-d^2 + 1, 1)."""
    gr = f.grid
    a = -derivative_values(f.first, gr.k, 2) + f.first
    return inner(FieldPair(gr, a, f.second), g)


def h1l2_norm2(f: FieldPair) -> float:
    gr = f.grid
    d = derivative_values(f.first, gr.k, 1)
    return float(np.real(integrate_values(np.abs(f.first) ** 2 + np.abs(d) ** 2
                                          + np.abs(f.second) ** 2, gr.h)))


def smooth_window(grid: Grid, fraction: float = 0.8, width: float | None = None) -> np.ndarray:
    """Plateau equal to 1 on the inner ``fraction`` of the box, smooth decay outside."""
    a = fraction * grid.L / 2
    w = width if width is not None else grid.L / 160
    x = grid.x
    return 0.5 * (np.tanh((x + a) / w) - np.tanh((x - a) / w))


def interior_mask(grid: Grid, fraction: float = 0.6) -> np.ndarray:
    return np.abs(grid.x) <= fraction * grid.L / 2


def windowed(f: FieldPair, window: np.ndarray) -> FieldPair:
    return FieldPair(f.grid, window * f.first, window * f.second)


@dataclass(frozen=True)
class RieszProjection:
    d0: float
    d1: float
    essential: FieldPair


class DegenerateKernelError(RuntimeError):
    pass


def riesz_projections(f: FieldPair, ell: float) -> RieszProjection:
    """Split f into d0 Y0 + d1 Y1 plus its essential part."""
    ke = kernel_elements(f.grid, KinkParams(ell, 0.0))
    Y0, Y1 = ke.Y0, ke.Y1
    den = inner(Y0, Y1.J())
    if abs(den) < 1e-12:
        raise DegenerateKernelError("<Y0, J Y1> vanishes")
    d0 = inner(f, Y1.J()) / den
    d1 = -inner(f, Y0.J()) / den
    return RieszProjection(d0, d1, f - d0 * Y0 - d1 * Y1)


def project_essential(f: FieldPair, ell: float) -> FieldPair:
    return riesz_projections(f, ell).essential


class SpectrumProximityError(ValueError):
    """Raised when the spectral parameter is too close to the spectrum."""

    def __init__(self, distance: float, margin: float):
        super().__init__(f"spectral parameter is {distance:.3g} from the spectrum "
                         f"(margin {margin})")
        self.distance = distance


def spectrum_distance(lam: complex, ell: float) -> float:
    """Distance from lam to {0} and the two half-lines |lam| >= 1/gamma."""
    lam = complex(lam)
    edge = 1.0 / gamma_of(ell)
    dre = max(0.0, edge - abs(lam.real))
    return min(abs(lam), float(np.hypot(dre, lam.imag)))


def _causal_convolution(h: np.ndarray, rate: complex, grid: Grid) -> np.ndarray:
    """a(x) = integral over y < x of exp(i rate (x - y)) h(y), for Im rate > 0.

    Solved as a' = i rate a + h with the Fourier multiplier 1/(i(k - rate)).
    The periodic wrap is of relative size exp(-Im(rate) d), d the distance
    from the support of h to the box edge; callers need Im(rate) d >> 1.
    """
    return np.fft.ifft(np.fft.fft(h) / (1j * (grid.k - rate)))


def _reflect(v: np.ndarray) -> np.ndarray:
    """Samples of v(-x) on the same grid."""
    return np.roll(v[::-1], 1)


def resolvent_apply(g: FieldPair, lam: complex, ell: float, margin: float = 0.05) -> FieldPair:
    """Solve (L - i lam) u = g with the explicit Jost kernel.

    The scalar part u1 = R[(l d - i lam) g1 - g2] uses the Poschl-Teller
    Green's function conjugated by exp(i c x), c = gamma^2 l lam. The Jost
    exponentials are pulled out of the two one-sided integrals so that each
    becomes a decaying causal convolution evaluated spectrally.
    """
    dist = spectrum_distance(lam, ell)
    if dist < margin:
        raise SpectrumProximityError(dist, margin)
    grid = g.grid
    lam = complex(lam)
    gam = gamma_of(ell)
    zeta = np.sqrt(complex(gam * gam * lam * lam - 1))
    if zeta.imag < 0:
        zeta = -zeta
    c = gam * gam * ell * lam
    x = grid.x
    s = gam * x
    g1 = np.asarray(g.first, dtype=complex)
    g2 = np.asarray(g.second, dtype=complex)
    G = ell * derivative_values(g1, grid.k, 1) - 1j * lam * g1 - g2
    # f_+(s) = P exp(i zeta s), f_-(s) = M exp(-i zeta s)
    P = jost_coefficient(zeta, 1) * (-1j * zeta + np.tanh(s))
    M = jost_coefficient(zeta, -1) * (1j * zeta + np.tanh(s))
    ph = np.exp(1j * c * x)
    rate = gam * zeta
    a = _causal_convolution(M * ph * G, rate, grid)
    # anti-causal part via reflection x -> -x
    b = _reflect(_causal_convolution(_reflect(P * ph * G), rate, grid))
    Ws = -2j * zeta / transmission(zeta)
    u1 = np.exp(-1j * c * x) * (gam / Ws) * (P * a + M * b)
    u2 = g1 - (ell * derivative_values(u1, grid.k, 1) - 1j * lam * u1)
    return FieldPair(grid, u1, u2)


@dataclass(frozen=True)
class CoercivityReport:
    ell: float
    mu_min: float
    upper_max: float
    samples: int


def random_smooth_pair(grid: Grid, rng: np.random.Generator, n_bumps: int = 6,
                       spread: float = 8.0) -> FieldPair:
    """Sum of random gaussian bumps and wave packets in each component."""
    x = grid.x
    comps = []
    for _ in range(2):
        v = np.zeros(grid.N)
        for _ in range(n_bumps):
            c = rng.uniform(-spread, spread)
            w = rng.uniform(0.5, 3.0)
            k = rng.uniform(-3, 3)
            v += rng.normal() * np.exp(-((x - c) / w) ** 2) * np.cos(k * x + rng.uniform(0, 2 * np.pi))
        comps.append(v)
    return FieldPair(grid, *comps)


def coercivity(grid: Grid, ell: float, samples: int = 200, seed: int = 0) -> CoercivityReport:
    """Smallest observed gamma^2 <Hu,u> / |u|^2 over random u with <J Y1, u> = 0."""
    rng = np.random.default_rng(seed)
    ke = kernel_elements(grid, KinkParams(ell, 0.0))
    JY1 = ke.Y1.J()
    denom = inner(ke.Y0, JY1)
    gam2 = gamma_of(ell) ** 2
    lo, hi = np.inf, -np.inf
    for _ in range(samples):
        u = random_smooth_pair(grid, rng)
        # remove the Y0 direction, which H annihilates
        u = u - (inner(u, JY1) / denom) * ke.Y0
        n2 = h1l2_norm2(u)
        r = inner(apply_H(u, ell), u) / n2
        lo = min(lo, gam2 * r)
        hi = max(hi, r)
    return CoercivityReport(ell, float(lo), float(hi), samples)
