"""Time stepping for the sine-Gordon system, its moving-frame form and its linearization."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import warnings

import numpy as np

from .grid import FieldPair, Grid, derivative_values
from .kink import KinkParams, conserved_quantities, kernel_elements, kink, kink_d2, kink_pair_values
from .modulation import frame_defects, modulation_rhs_values, nonlinearity
from .spectral import apply_L, apply_Lscalar


class SolverBlowup(RuntimeError):
    """Sup-norm exceeded the blow-up threshold."""

    def __init__(self, t: float, value: float):
        super().__init__(f"sup-norm {value:.3e} exceeded threshold at t={t:.4f}")
        self.t = t
        self.value = value


@dataclass(frozen=True)
class SolverConfig:
    """Time-stepping parameters.

    ``dt=None`` selects 0.5 h. ``monitor_every`` is in time units.
    """

    T: float
    dt: float | None = None
    integrator: str = "rk4"
    dealias: bool = True
    monitor_every: float = 1.0
    sponge: bool = False
    sponge_strength: float = 1.0
    sponge_fraction: float = 0.1
    blowup: float = 1e3
    store_snapshots: bool = True

    def __post_init__(self):
        if self.integrator not in ("rk4", "strang"):
            raise ValueError(f"unknown integrator {self.integrator!r}")
        if not self.T >= 0:
            raise ValueError("final time must be non-negative")
        if self.dt is not None and not self.dt > 0:
            raise ValueError("time step must be positive")
        if not self.monitor_every > 0:
            raise ValueError("monitor cadence must be positive")

    def step(self, grid: Grid) -> float:
        dt = 0.5 * grid.h if self.dt is None else self.dt
        if dt > stability_bound(grid):
            raise ValueError(f"dt={dt} exceeds the RK4 stability bound {stability_bound(grid):.4g}")
        return dt

    def schedule(self, grid: Grid):
        """(number of steps, step size, steps between records)."""
        dt = self.step(grid)
        n = int(np.ceil(self.T / dt - 1e-9)) if self.T > 0 else 0
        dt = self.T / n if n else dt
        every = max(1, int(round(self.monitor_every / dt))) if n else 1
        return n, dt, every


def stability_bound(grid: Grid) -> float:
    """RK4 imaginary-axis limit 2.8 divided by the largest wave frequency."""
    kmax = np.pi / grid.h
    return 2.8 / np.sqrt(1 + kmax ** 2)


@dataclass
class RunRecord:
    """Column store of diagnostics sampled over time."""

    columns: dict = field(default_factory=dict)

    def append(self, **row):
        if self.columns and "t" in row and self.columns["t"] and row["t"] < self.columns["t"][-1]:
            raise ValueError("time stamps must be monotone")
        for k, v in row.items():
            self.columns.setdefault(k, []).append(v)

    def __getitem__(self, key) -> np.ndarray:
        return np.asarray(self.columns[key])

    def __contains__(self, key):
        return key in self.columns

    @property
    def names(self):
        return list(self.columns)

    def __len__(self):
        return len(self.columns.get("t", []))


@dataclass
class Trajectory:
    times: list
    snapshots: list
    record: RunRecord


def sponge_profile(grid: Grid, fraction: float, strength: float) -> np.ndarray:
    """Damping rate rising smoothly from 0 to ``strength`` across the outer layer."""
    width = fraction * grid.L
    start = grid.L / 2 - width
    s = np.clip((np.abs(grid.x) - start) / width, 0.0, 1.0)
    return strength * s * s * (3 - 2 * s)


def _rk4(f, y, dt):
    k1 = f(y)
    k2 = f([a + 0.5 * dt * b for a, b in zip(y, k1)])
    k3 = f([a + 0.5 * dt * b for a, b in zip(y, k2)])
    k4 = f([a + dt * b for a, b in zip(y, k3)])
    return [a + dt / 6 * (b + 2 * c + 2 * d + e) for a, b, c, d, e in zip(y, k1, k2, k3, k4)]


class _LabSystem:
    """phi1 = n K(x) + w1; w1 and phi2 are periodic."""

    def __init__(self, grid: Grid, n: int, cfg: SolverConfig):
        self.grid = grid
        self.n = n
        self.bg = n * kink(grid.x)
        self.bg2 = n * kink_d2(grid.x)
        self.mask = grid.dealias_mask() if cfg.dealias else None
        self.sigma = (sponge_profile(grid, cfg.sponge_fraction, cfg.sponge_strength)
                      if cfg.sponge else None)
        k = grid.k
        self.k2 = k * k
        self.w = np.sqrt(1 + self.k2)

    def _filter(self, v):
        if self.mask is None:
            return v
        return np.fft.ifft(np.fft.fft(v) * self.mask).real

    def nonlinear(self, w1):
        """Everything in d_t phi2 except the free part d^2 w1 - w1."""
        return self.bg2 + w1 - self._filter(np.sin(self.bg + w1))

    def rhs(self, y):
        w1, p2 = y
        d2 = derivative_values(w1, self.grid.k, 2)
        a = p2.copy()
        b = self.bg2 + d2 - self._filter(np.sin(self.bg + w1))
        if self.sigma is not None:
            a -= self.sigma * w1
            b -= self.sigma * p2
        return [a, b]

    def free_half(self, y, dt):
        """Exact Klein-Gordon flow for time dt."""
        w1h, p2h = np.fft.fft(y[0]), np.fft.fft(y[1])
        c, s = np.cos(self.w * dt), np.sin(self.w * dt)
        a = c * w1h + s / self.w * p2h
        b = -self.w * s * w1h + c * p2h
        return [np.fft.ifft(a).real, np.fft.ifft(b).real]

    def strang(self, y, dt):
        y = self.free_half(y, dt / 2)
        p2 = y[1] + dt * self.nonlinear(y[0])
        y = [y[0], p2]
        if self.sigma is not None:
            damp = np.exp(-self.sigma * dt)
            y = [y[0] * damp, y[1] * damp]
        return self.free_half(y, dt / 2)


def evolve(phi0: FieldPair, cfg: SolverConfig, reference: KinkParams | None = None,
           callback: Callable | None = None) -> Trajectory:
    """Integrate the lab-frame system.

    Parameters
    ----------
    reference : KinkParams, optional
        Traveling kink against which the sup-norm diagnostics are measured.
    callback : callable, optional
        Called as ``callback(t, state)`` at every record.
    """
    grid = phi0.grid
    n = int(np.rint((phi0.first[-1] - phi0.first[0]) / (2 * np.pi)))
    sys_ = _LabSystem(grid, n, cfg)
    y = [phi0.first - sys_.bg, np.array(phi0.second, dtype=float)]
    nsteps, dt, every = cfg.schedule(grid)
    rec = RunRecord()
    times, snaps = [], []

    def emit(t):
        state = FieldPair(grid, y[0] + sys_.bg, y[1])
        c = conserved_quantities(state)
        row = dict(t=t, E=c.E, P=c.P, M=c.M, boundary_flag=float(c.vacuum_warning))
        if reference is not None:
            k1, k2 = kink_pair_values(grid.x, reference.ell, reference.q + reference.ell * t)
            u1, u2 = state.first - k1, state.second - k2
            row.update(sup_u1=float(np.abs(u1).max()), sup_u2=float(np.abs(u2).max()),
                       sup_du1=float(np.abs(derivative_values(u1, grid.k, 1)).max()))
        rec.append(**row)
        times.append(t)
        if cfg.store_snapshots:
            snaps.append(state)
        if callback is not None:
            callback(t, state)

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        emit(0.0)
        for i in range(1, nsteps + 1):
            if cfg.integrator == "rk4":
                y = _rk4(sys_.rhs, y, dt)
            else:
                y = sys_.strang(y, dt)
            sup = max(np.abs(y[0]).max(), np.abs(y[1]).max())
            if not np.isfinite(sup) or sup > cfg.blowup:
                raise SolverBlowup(i * dt, float(sup))
            if i % every == 0 or i == nsteps:
                emit(i * dt)
    return Trajectory(times, snaps, rec)


@dataclass
class MovingFrameTrajectory(Trajectory):
    ell: list = field(default_factory=list)
    q: list = field(default_factory=list)


def moving_frame_rhs(u1, u2, ell, qdot, elldot, grid: Grid, ke, sigma=None):
    """d_t u for given modulation rates; ke are the kernel elements at ell."""
    k = grid.k
    d1 = derivative_values(u1, k, 1)
    d2 = derivative_values(u2, k, 1)
    n2 = nonlinearity(u1, ell, grid)
    a = qdot * d1 + u2 - (qdot - ell) * ke.Y0.first - elldot * ke.Y1.first
    b = (-apply_Lscalar(grid, ell, u1) + qdot * d2 + n2
         - (qdot - ell) * ke.Y0.second - elldot * ke.Y1.second)
    if sigma is not None:
        a = a - sigma * u1
        b = b - sigma * u2
    return a, b


def evolve_moving_frame(u0: FieldPair, params0: KinkParams, cfg: SolverConfig,
                        paths: Callable | None = None) -> MovingFrameTrajectory:
    """Evolve the radiation in the frame y = x - q(t).

    Parameters
    ----------
    u0 : FieldPair
        Radiation at t = 0 in the moving frame.
    params0 : KinkParams
        (ell, q) at t = 0.
    paths : callable, optional
        ``paths(t) -> (ell, q, ell', q')`` prescribes the modulation. When
        omitted, (ell, q) are co-evolved with the modulation equations.
    """
    grid = u0.grid
    sigma = sponge_profile(grid, cfg.sponge_fraction, cfg.sponge_strength) if cfg.sponge else None
    nsteps, dt, every = cfg.schedule(grid)
    rec = RunRecord()
    traj = MovingFrameTrajectory([], [], rec)

    def rates(t, u1, u2, ell):
        if paths is not None:
            l, q, ld, qd = paths(t)
            return l, ld, qd, kernel_elements(grid, KinkParams(l, 0.0))
        ke = kernel_elements(grid, KinkParams(ell, 0.0))
        ld, mq = modulation_rhs_values(FieldPair(grid, u1, u2), ell, ke)
        return ell, ld, ell + mq, ke

    def f(t, y):
        u1, u2, ell, q = y
        l, ld, qd, ke = rates(t, u1, u2, ell)
        a, b = moving_frame_rhs(u1, u2, l, qd, ld, grid, ke, sigma)
        return [a, b, ld, qd]

    y = [np.array(u0.first, dtype=float), np.array(u0.second, dtype=float),
         float(params0.ell), float(params0.q)]

    def emit(t):
        u1, u2, ell, q = y
        l, ld, qd, _ = rates(t, u1, u2, ell)
        u = FieldPair(grid, u1, u2)
        k1, k2 = kink_pair_values(grid.x, l, 0.0)
        c = conserved_quantities(FieldPair(grid, k1 + u1, k2 + u2))
        d0, d1 = frame_defects(u, l)
        rec.append(t=t, ell=l, q=q if paths is None else paths(t)[1], qdot=qd, elldot=ld,
                   defect1=d0, defect2=d1, E=c.E, P=c.P, M=c.M,
                   sup_u1=float(np.abs(u1).max()), sup_u2=float(np.abs(u2).max()),
                   sup_du1=float(np.abs(derivative_values(u1, grid.k, 1)).max()),
                   boundary_mass=grid.boundary_mass(u1))
        traj.times.append(t)
        traj.ell.append(l)
        traj.q.append(rec["q"][-1])
        if cfg.store_snapshots:
            traj.snapshots.append(u)

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        emit(0.0)
        for i in range(1, nsteps + 1):
            t0 = (i - 1) * dt
            k1 = f(t0, y)
            k2 = f(t0 + dt / 2, [a + dt / 2 * b for a, b in zip(y, k1)])
            k3 = f(t0 + dt / 2, [a + dt / 2 * b for a, b in zip(y, k2)])
            k4 = f(t0 + dt, [a + dt * b for a, b in zip(y, k3)])
            y = [a + dt / 6 * (b + 2 * c + 2 * d + e) for a, b, c, d, e in zip(y, k1, k2, k3, k4)]
            sup = max(np.abs(y[0]).max(), np.abs(y[1]).max())
            if not np.isfinite(sup) or sup > cfg.blowup:
                raise SolverBlowup(i * dt, float(sup))
            if not abs(y[2]) < 1:
                raise SolverBlowup(i * dt, float(abs(y[2])))
            if i % every == 0 or i == nsteps:
                emit(i * dt)
    return traj


def evolve_linearized(f0: FieldPair, ell: float, T: float, dt: float | None = None,
                      record_every: float | None = None):
    """Integrate d_t f = L f with RK4.

    Returns the final state, or (times, states) when ``record_every`` is set.
    """
    grid = f0.grid
    cfg = SolverConfig(T=T, dt=dt, monitor_every=record_every or max(T, 1.0))
    nsteps, h, every = cfg.schedule(grid)
    y = f0
    times, states = [0.0], [f0]
    for i in range(1, nsteps + 1):
        k1 = apply_L(y, ell)
        k2 = apply_L(y + (h / 2) * k1, ell)
        k3 = apply_L(y + (h / 2) * k2, ell)
        k4 = apply_L(y + h * k3, ell)
        y = y + (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4)
        if y.sup() > 1e3:
            raise SolverBlowup(i * h, y.sup())
        if record_every is not None and (i % every == 0 or i == nsteps):
            times.append(i * h)
            states.append(y)
    if record_every is None:
        return y
    return times, states
