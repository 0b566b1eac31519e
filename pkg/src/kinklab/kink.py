"""Kink profiles, the moving-kink family, kernel elements and conserved quantities."""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import sympy as sp

from .grid import FieldPair, Grid, derivative_values, integrate_values

KPRIME_NORM2 = 8.0  # squared L2 norm of K'


def sech(z):
    """Overflow-free hyperbolic secant."""
    a = np.exp(-np.abs(z))
    return 2 * a / (1 + a * a)


def kink(x):
    """Static kink 4 arctan(e^x), computed without overflow."""
    x = np.asarray(x, dtype=float)
    # arctan(e^x) = pi/2 - arctan(e^-x) for x > 0
    a = np.exp(-np.abs(x))
    out = 4 * np.arctan(a)
    return np.where(x > 0, 2 * np.pi - out, out)


def kink_d1(z):
    return 2 * sech(z)


def kink_d2(z):
    return -2 * sech(z) * np.tanh(z)


def kink_d3(z):
    s, t = sech(z), np.tanh(z)
    return 2 * s * t * t - 2 * s ** 3


@dataclass(frozen=True)
class KinkParams:
    """Boost ell in (-1, 1) and center q."""

    ell: float = 0.0
    q: float = 0.0

    def __post_init__(self):
        if not (np.isfinite(self.ell) and abs(self.ell) < 1):
            raise ValueError(f"boost must lie in (-1, 1), got {self.ell}")
        if not np.isfinite(self.q):
            raise ValueError("center must be finite")
        object.__setattr__(self, "ell", float(self.ell))
        object.__setattr__(self, "q", float(self.q))

    @property
    def gamma(self) -> float:
        return 1.0 / np.sqrt(1.0 - self.ell ** 2)


def gamma_of(ell):
    return 1.0 / np.sqrt(1.0 - np.asarray(ell) ** 2)


def kink_pair_values(x, ell, q):
    """Samples of K_{ell,q}(x) as two arrays."""
    g = 1.0 / np.sqrt(1.0 - ell ** 2)
    z = g * (np.asarray(x) - q)
    return kink(z), -g * ell * kink_d1(z)


def moving_kink(grid: Grid, p: KinkParams, t: float = 0.0) -> FieldPair:
    """Traveling kink with center q + ell t at time t."""
    a, b = kink_pair_values(grid.x, p.ell, p.q + p.ell * t)
    return FieldPair(grid, a, b)


class _KinkFn(sp.Function):
    """Symbolic K with K' = 2 sech."""

    def fdiff(self, argindex=1):
        return 2 * sp.sech(self.args[0])


@lru_cache(maxsize=None)
def _parameter_derivatives():
    """Lambdified (q,l)-derivatives of the moving kink, as functions of (y, ell)."""
    x, q, ell, y = sp.symbols("x q ell y", real=True)
    g = 1 / sp.sqrt(1 - ell ** 2)
    z = g * (x - q)
    comp = (_KinkFn(z), -g * ell * 2 * sp.sech(z))
    wrt = {
        "dq": (q,), "dl": (ell,),
        "dqq": (q, q), "dll": (ell, ell), "dql": (q, ell),
    }
    mods = [{"_KinkFn": kink, "sech": sech, "tanh": np.tanh, "sqrt": np.sqrt}, "numpy"]
    out = {}
    for name, vars_ in wrt.items():
        fns = []
        for c in comp:
            e = sp.diff(c, *vars_).subs({x: y + q}).subs(q, 0)
            fns.append(sp.lambdify((y, ell), e, modules=mods))
        out[name] = tuple(fns)
    return out


def _eval(fn, y, ell):
    return np.broadcast_to(np.asarray(fn(y, ell), dtype=float), np.shape(y)).copy()


@dataclass(frozen=True)
class KernelElements:
    """Generalized kernel Y0, Y1 and second parameter derivatives Z1..Z3.

    All fields are sampled in the frame y = x - q. Y0 = d_q K, Y1 = d_l K,
    Z1 = d_q^2 K, Z2 = d_l^2 K, Z3 = d_q d_l K.
    """

    Y0: FieldPair
    Y1: FieldPair
    Z1: FieldPair
    Z2: FieldPair
    Z3: FieldPair


def kernel_elements(grid: Grid, p: KinkParams, centered: bool = True) -> KernelElements:
    """Kernel elements on ``grid``.

    With ``centered`` the fields are in the moving frame (kink at y = 0),
    otherwise they are sampled at x with the kink at ``p.q``.
    """
    y = grid.x if centered else grid.x - p.q
    ell, g = p.ell, p.gamma
    z = g * y
    Y0 = FieldPair(grid, -g * kink_d1(z), g * g * ell * kink_d2(z))
    Y1 = FieldPair(grid, ell * g ** 3 * y * kink_d1(z),
                   -g ** 3 * kink_d1(z) - ell ** 2 * g ** 4 * y * kink_d2(z))
    d = _parameter_derivatives()
    zs = []
    for name in ("dqq", "dll", "dql"):
        f1, f2 = d[name]
        zs.append(FieldPair(grid, _eval(f1, y, ell), _eval(f2, y, ell)))
    return KernelElements(Y0, Y1, *zs)


def symbolic_first_derivatives(grid: Grid, p: KinkParams):
    """(d_q K, d_l K) from symbolic differentiation, moving frame."""
    d = _parameter_derivatives()
    y = grid.x
    return tuple(FieldPair(grid, _eval(d[n][0], y, p.ell), _eval(d[n][1], y, p.ell))
                 for n in ("dq", "dl"))


@dataclass(frozen=True)
class ThresholdResonance:
    plus: FieldPair
    minus: FieldPair


def threshold_resonances(grid: Grid, p: KinkParams) -> ThresholdResonance:
    """Bounded solutions of L Phi = +-i/gamma Phi in the moving frame."""
    g, ell = p.gamma, p.ell
    y = grid.x
    th = np.tanh(g * y)
    s2 = sech(g * y) ** 2
    ph = np.exp(-1j * g * ell * y)
    plus = FieldPair(grid, th * ph, (1j * g * th - ell * g * s2) * ph)
    return ThresholdResonance(plus, plus.conj())


def inner(f: FieldPair, g: FieldPair) -> float:
    """Real L2 pairing summed over both components."""
    h = f.grid.h
    return float(np.real(integrate_values(f.first * np.conj(g.first)
                                          + f.second * np.conj(g.second), h)))


class VacuumWarning(UserWarning):
    """Raised when a state is not at a vacuum value at the box edge."""


@dataclass(frozen=True)
class Conserved:
    E: float
    P: float
    M: float
    vacuum_warning: bool


def winding_background(grid: Grid, phi1):
    """Number of kinks n and the background n K(x) carrying the 2 pi jump."""
    n = int(np.rint((phi1[-1] - phi1[0]) / (2 * np.pi)))
    return n, n * kink(grid.x), n * kink_d1(grid.x)


def field_gradient(grid: Grid, phi1) -> np.ndarray:
    """d_x phi1 with the kink background differentiated in closed form."""
    n, bg, dbg = winding_background(grid, phi1)
    return dbg + derivative_values(phi1 - bg, grid.k, 1)


def conserved_quantities(phi: FieldPair, tol: float = 1e-8) -> Conserved:
    """Energy, momentum and E^2 - P^2."""
    grid = phi.grid
    p1, p2 = phi.first, phi.second
    px = field_gradient(grid, p1)
    m = max(2, grid.N // 50)
    edge = np.concatenate([p1[:m], p1[-m:]])
    off = np.abs(np.sin(edge / 2)).max()
    flag = bool(off > np.sqrt(tol) or np.abs(np.concatenate([p2[:m], p2[-m:]])).max() > np.sqrt(tol))
    if flag:
        warnings.warn("state is not at a vacuum value at the boundary", VacuumWarning,
                      stacklevel=2)
    dens = 0.5 * px ** 2 + 0.5 * p2 ** 2 + 2 * np.sin(p1 / 2) ** 2
    E = float(integrate_values(dens, grid.h))
    P = float(integrate_values(p2 * px, grid.h))
    return Conserved(E, P, E * E - P * P, flag)
