"""Effective profile, asymptotic radiation profile and long-time fits."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.stats import linregress

from .dft import DistortedBasis, japanese
from .grid import FieldPair
from .kink import gamma_of, sech
from .spectral import project_essential


@dataclass(frozen=True)
class EffectiveProfileSeries:
    """g^#(t_n, xi) on the lattice frequencies (DFT order)."""

    times: np.ndarray
    xi: np.ndarray
    values: np.ndarray
    ell_bar: float

    def weighted(self) -> np.ndarray:
        """<xi>^{3/2} g^#."""
        return japanese(self.xi) ** 1.5 * self.values

    def band(self, lo: float = 0.3, hi: float = 3.0) -> np.ndarray:
        """Mask of |xi + gamma l| in [lo, hi], away from the stationary frequency."""
        d = np.abs(self.xi + gamma_of(self.ell_bar) * self.ell_bar)
        return (d >= lo) & (d <= hi)


def effective_profile(snapshots: Sequence[FieldPair], times, ell_bar: float,
                      project: bool = True) -> EffectiveProfileSeries:
    """g^#(t) = exp(-i t omega) T_{l}[P_e u(t)] for moving-frame radiation snapshots."""
    if len(snapshots) != len(times):
        raise ValueError("one time per snapshot is required")
    if not snapshots:
        raise ValueError("no snapshots")
    grid = snapshots[0].grid
    b = DistortedBasis(grid, ell_bar)
    w = b.omega
    rows = []
    for t, u in zip(times, snapshots):
        ue = project_essential(u, ell_bar) if project else u
        rows.append(np.exp(-1j * t * w) * b.vector_transform(ue).values)
    return EffectiveProfileSeries(np.asarray(times, dtype=float), b.xi.copy(),
                                  np.array(rows), float(ell_bar))


@dataclass(frozen=True)
class PowerLawFit:
    exponent: float
    stderr: float
    intercept: float
    n: int


def _power_fit(t, a) -> PowerLawFit:
    t, a = np.asarray(t, dtype=float), np.asarray(a, dtype=float)
    keep = (a > 0) & np.isfinite(a)
    t, a = t[keep], a[keep]
    if len(t) < 3:
        raise ValueError("need at least three positive samples to fit")
    r = linregress(np.log(t), np.log(a))
    return PowerLawFit(float(r.slope), float(r.stderr), float(r.intercept), len(t))


def _window(t, window):
    t0, t1 = window
    if not t1 >= 5 * t0:
        raise ValueError("the fit window must span at least a factor 5 in time")
    t = np.asarray(t, dtype=float)
    return (t >= t0) & (t <= t1)


def fit_decay(t, values, window=(20.0, 200.0)) -> PowerLawFit:
    """Least-squares slope of log values against log t on the window."""
    m = _window(t, window)
    return _power_fit(np.asarray(t)[m], np.asarray(values)[m])


def envelope(t, values, window, bins: int = 12):
    """Maxima of |values| over log-spaced bins; returns bin-argmax times and maxima."""
    t = np.asarray(t, dtype=float)
    v = np.abs(np.asarray(values, dtype=float))
    edges = np.geomspace(window[0], window[1], bins + 1)
    ts, vs = [], []
    for lo, hi in zip(edges[:-1], edges[1:]):
        m = (t >= lo) & (t <= hi)
        if m.any():
            i = np.argmax(np.where(m, v, -np.inf))
            ts.append(t[i])
            vs.append(v[i])
    return np.array(ts), np.array(vs)


@dataclass(frozen=True)
class ModulationFit:
    ell: PowerLawFit
    qdot: PowerLawFit


def fit_modulation_convergence(t, ell, qdot, window=(20.0, 200.0), bins: int = 12,
                               method: str = "envelope") -> ModulationFit:
    """Exponents of |l(t) - l(T)| and |q'(t) - l(t)|.

    ``envelope`` fits maxima over log-spaced bins, which is robust to the
    zero crossings of an oscillating series; ``pointwise`` fits every sample.
    """
    _window(t, window)
    t = np.asarray(t, dtype=float)
    ell = np.asarray(ell, dtype=float)
    a = np.abs(ell - ell[-1])
    b = np.abs(np.asarray(qdot, dtype=float) - ell)
    fits = []
    for series in (a, b):
        if method == "envelope":
            fits.append(_power_fit(*envelope(t, series, window, bins)))
        elif method == "pointwise":
            m = (t >= window[0]) & (t <= window[1])
            fits.append(_power_fit(t[m], series[m]))
        else:
            raise ValueError("method must be 'envelope' or 'pointwise'")
    return ModulationFit(*fits)


@dataclass(frozen=True)
class PhaseDiagnostics:
    times: np.ndarray
    xi: np.ndarray
    Lambda: np.ndarray
    theta: np.ndarray
    corrected: np.ndarray
    uncorrected: np.ndarray
    band: np.ndarray
    pairs: list
    drift_corrected: float
    drift_uncorrected: float

    @property
    def drift_ratio(self) -> float:
        return self.drift_uncorrected / self.drift_corrected


def accumulate_lambda(times, weighted, xi) -> np.ndarray:
    """(1/16) <xi>^{-3} times the integral from 1 to t of |<xi>^{3/2} g|^2 ds / s.

    ``weighted`` holds <xi>^{3/2} g per time row. Trapezoid rule in log t;
    times below 1 contribute nothing.
    """
    t = np.asarray(times, dtype=float)
    w = np.abs(np.asarray(weighted)) ** 2
    out = np.zeros(w.shape)
    s = np.log(np.maximum(t, 1.0))
    for i in range(1, len(t)):
        out[i] = out[i - 1] + 0.5 * (s[i] - s[i - 1]) * (w[i] + w[i - 1])
    return out / (16.0 * japanese(xi) ** 3)


def _dyadic_pairs(times, window):
    t = np.asarray(times, dtype=float)
    pairs = []
    for i, t1 in enumerate(t):
        if t1 < window[0] or 2 * t1 > window[1]:
            continue
        j = int(np.argmin(np.abs(t - 2 * t1)))
        if abs(t[j] - 2 * t1) <= 0.5 * (t[min(j + 1, len(t) - 1)] - t[max(j - 1, 0)]) + 1e-9:
            pairs.append((i, j))
    return pairs


def phase_diagnostics(series: EffectiveProfileSeries, q_times, q, window=(20.0, 200.0),
                      band=(0.3, 3.0)) -> PhaseDiagnostics:
    """Lambda, theta and the dyadic drift of corrected and uncorrected profiles.

    theta(t) = q(t) - q(0) - l t with l the reference boost and q sampled from
    time 0. The corrected
    profile is exp(-i Lambda) exp(-i xi theta) <xi>^{3/2} g^#.
    """
    t = series.times
    if np.any(np.diff(t) <= 0):
        raise ValueError("times must increase")
    q_times, q = np.asarray(q_times, dtype=float), np.asarray(q, dtype=float)
    theta = np.interp(t, q_times, q) - q[0] - series.ell_bar * (t - q_times[0])
    weighted = series.weighted()
    lam = accumulate_lambda(t, weighted, series.xi)
    corrected = np.exp(-1j * lam) * np.exp(-1j * series.xi[None, :] * theta[:, None]) * weighted
    mask = series.band(*band)
    pairs = _dyadic_pairs(t, window)
    if not pairs:
        raise ValueError("no dyadic time pairs inside the window")

    def drift(arr):
        return max(float(np.abs(arr[j, mask] - arr[i, mask]).max()) for i, j in pairs)

    return PhaseDiagnostics(t, series.xi, lam, theta, corrected, weighted, mask, pairs,
                            drift(corrected), drift(weighted))


def band_sup_variation(series: EffectiveProfileSeries, window=(20.0, 200.0),
                       band=(0.3, 3.0)) -> float:
    """(max - min) / max over the window of sup_band |<xi>^{3/2} g^#(t)|."""
    m = (series.times >= window[0]) & (series.times <= window[1])
    mask = series.band(*band)
    sups = np.abs(series.weighted()[m][:, mask]).max(axis=1)
    return float((sups.max() - sups.min()) / sups.max())


@dataclass
class AsymptoticProfile:
    """Data of the asymptotic radiation state.

    ``g_inf`` is sampled on increasing ``xi`` and interpolated linearly;
    ``theta`` maps t to the accumulated center shift.
    """

    ell_inf: float
    q0: float
    xi: np.ndarray
    g_inf: np.ndarray
    theta: Callable = field(default=lambda t: 0.0)

    def __post_init__(self):
        if not abs(self.ell_inf) < 1:
            raise ValueError("boost must lie in (-1, 1)")
        order = np.argsort(self.xi)
        self.xi = np.asarray(self.xi, dtype=float)[order]
        self.g_inf = np.asarray(self.g_inf, dtype=complex)[order]

    @classmethod
    def from_series(cls, ell_inf, q0, xi, g_inf, times, theta):
        ts, th = np.asarray(times, dtype=float), np.asarray(theta, dtype=float)
        return cls(ell_inf, q0, xi, g_inf, lambda t: float(np.interp(t, ts, th)))

    def g(self, xi):
        return (np.interp(xi, self.xi, self.g_inf.real)
                + 1j * np.interp(xi, self.xi, self.g_inf.imag))

    def Gamma(self, xi):
        """(1/16) <xi>^{-3} |g_inf(xi)|^2."""
        return np.abs(self.g(xi)) ** 2 / (16 * japanese(xi) ** 3)


@dataclass(frozen=True)
class ConeFields:
    rho: np.ndarray
    xi_star: np.ndarray
    inside: np.ndarray
    m1: np.ndarray
    m2: np.ndarray


def cone_fields(a: AsymptoticProfile, t: float, x) -> ConeFields:
    """rho, xi*, and the two profile components; zero outside the light cone."""
    x = np.asarray(x, dtype=float)
    th = a.theta(t)
    r = x - th - a.q0
    inside = np.abs(r) < t
    rho = np.where(inside, np.sqrt(np.maximum(t * t - r * r, 0.0)), np.nan)
    xs = np.where(inside, -r / np.where(inside, rho, 1.0), 0.0)
    g = gamma_of(a.ell_inf)
    jx = japanese(xs)
    e = g * (xs + a.ell_inf * jx)
    z = g * (x - a.ell_inf * t - th - a.q0)
    den = np.abs(e) - 1j
    m1 = (e + 1j * np.tanh(z)) / den / jx
    dm1 = 1j * g * sech(z) ** 2 / den / jx
    m2 = 1j * jx * m1 - a.ell_inf * dm1
    zero = np.zeros_like(m1)
    return ConeFields(np.where(inside, rho, 0.0), xs, inside,
                      np.where(inside, m1, zero), np.where(inside, m2, zero))


def build_asymptotic_profile(a: AsymptoticProfile, t: float, grid_or_x) -> FieldPair | tuple:
    """u_inf(t, x) = t^{-1/2} Im(e^{i pi/4} e^{i rho} e^{i Gamma log t} e^{i xi* theta} g m).

    Accepts a Grid (returns a FieldPair) or an array of points (returns a pair of arrays).
    """
    if t < 1:
        raise ValueError("the asymptotic profile is defined for t >= 1")
    x = grid_or_x.x if hasattr(grid_or_x, "x") else np.asarray(grid_or_x, dtype=float)
    c = cone_fields(a, t, x)
    xs = c.xi_star
    phase = np.exp(1j * (np.pi / 4 + c.rho + a.Gamma(xs) * np.log(t) + xs * a.theta(t)))
    amp = np.where(c.inside, phase * a.g(xs), 0.0) / np.sqrt(t)
    u1, u2 = np.imag(amp * c.m1), np.imag(amp * c.m2)
    if hasattr(grid_or_x, "x"):
        return FieldPair(grid_or_x, u1, u2)
    return u1, u2
