"""Modulated-kink decomposition and the modulation equations."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import FieldPair, Grid
from .kink import KinkParams, inner, kernel_elements, kink, kink_pair_values
from .spectral import h1l2_norm2


class FitError(RuntimeError):
    """Newton fit failed; carries the last residual."""

    def __init__(self, message: str, residual: float):
        super().__init__(f"{message} (last residual {residual:.3e})")
        self.residual = residual


class SingularModulationError(RuntimeError):
    pass


@dataclass(frozen=True)
class Decomposition:
    """phi = K_{ell,q} + u(. - q) with u given in the moving frame."""

    ell: float
    q: float
    u: FieldPair
    defects: tuple
    iterations: int = 0

    @property
    def params(self) -> KinkParams:
        return KinkParams(self.ell, self.q)

    @property
    def gamma(self) -> float:
        return self.params.gamma


def shift_values(values, grid: Grid, a: float) -> np.ndarray:
    """Samples of v(x + a) by Fourier phase interpolation."""
    out = np.fft.ifft(np.fft.fft(values) * np.exp(1j * grid.k * a))
    return out if np.iscomplexobj(values) else out.real


def lab_defects(phi: FieldPair, p: KinkParams):
    """Orthogonality defects and their Jacobian in (q, ell), lab frame."""
    grid = phi.grid
    ke = kernel_elements(grid, p, centered=False)
    k1, k2 = kink_pair_values(grid.x, p.ell, p.q)
    w = FieldPair(grid, phi.first - k1, phi.second - k2)
    G = np.array([inner(ke.Y0.J(), w), inner(ke.Y1.J(), w)])
    c = 8.0 * p.gamma ** 3
    a11 = inner(ke.Z1.J(), w)
    a12 = inner(ke.Z3.J(), w) + c
    a21 = inner(ke.Z3.J(), w) - c
    a22 = inner(ke.Z2.J(), w)
    # columns: d/dq, d/dl
    return G, np.array([[a11, a12], [a21, a22]]), w


def fit(phi: FieldPair, seed: KinkParams, threshold: float = 0.3, tol: float = 1e-10,
        max_iter: int = 25) -> Decomposition:
    """Newton solve for (ell, q) making the radiation symplectically orthogonal.

    Parameters
    ----------
    phi : FieldPair
        Lab-frame state.
    seed : KinkParams
        Starting guess; |phi - K_seed| in H1 x L2 must not exceed ``threshold``.
    """
    grid = phi.grid
    k1, k2 = kink_pair_values(grid.x, seed.ell, seed.q)
    dist = np.sqrt(h1l2_norm2(FieldPair(grid, phi.first - k1, phi.second - k2)))
    if dist > threshold:
        raise FitError(f"state is {dist:.3g} from the seed kink, above {threshold}", dist)
    ell, q = seed.ell, seed.q
    res = np.inf
    for it in range(1, max_iter + 1):
        G, Jac, _ = lab_defects(phi, KinkParams(ell, q))
        res = float(np.abs(G).max())
        if not np.all(np.isfinite(Jac)) or abs(np.linalg.det(Jac)) < 1e-14:
            raise FitError("singular Jacobian", res)
        dq, dl = np.linalg.solve(Jac, -G)
        q += dq
        ell += dl
        if not abs(ell) < 1:
            raise FitError("boost left (-1, 1)", res)
        if max(abs(dq), abs(dl)) < 1e-15 or res < 1e-15:
            break
    G, _, w = lab_defects(phi, KinkParams(ell, q))
    res = float(np.abs(G).max())
    if res > tol:
        raise FitError(f"no convergence in {max_iter} steps", res)
    u = FieldPair(grid, shift_values(w.first, grid, q), shift_values(w.second, grid, q))
    return Decomposition(float(ell), float(q), u, (float(G[0]), float(G[1])), it)


def frame_defects(u: FieldPair, ell: float):
    """<J Y0, u> and <J Y1, u> in the moving frame."""
    ke = kernel_elements(u.grid, KinkParams(ell, 0.0))
    return inner(ke.Y0.J(), u), inner(ke.Y1.J(), u)


def reconstruct(d: Decomposition) -> FieldPair:
    """Lab-frame state K_{ell,q} + u(. - q)."""
    grid = d.u.grid
    k1, k2 = kink_pair_values(grid.x, d.ell, d.q)
    return FieldPair(grid, k1 + shift_values(d.u.first, grid, -d.q),
                     k2 + shift_values(d.u.second, grid, -d.q))


def nonlinearity(u1, ell: float, grid: Grid) -> np.ndarray:
    """Second component of N(u): -sin(K+u1) + sin K + cos K u1."""
    g = 1.0 / np.sqrt(1 - ell * ell)
    K = kink(g * grid.x)
    # rearranged to avoid cancellation for small u1
    return np.sin(K) * 2 * np.sin(u1 / 2) ** 2 - np.cos(K) * (np.sin(u1) - u1)


@dataclass(frozen=True)
class ModulationMatrix:
    entries: np.ndarray
    cond: float


def _matrix(u: FieldPair, ell: float, ke=None) -> np.ndarray:
    if ke is None:
        ke = kernel_elements(u.grid, KinkParams(ell, 0.0))
    c = 8.0 * (1.0 / np.sqrt(1 - ell * ell)) ** 3
    z1 = inner(ke.Z1.J(), u)
    z2 = inner(ke.Z2.J(), u)
    z3 = inner(ke.Z3.J(), u)
    return np.array([[c + z3, z1], [-z2, c - z3]])


def modulation_matrix(d: Decomposition) -> ModulationMatrix:
    """Matrix acting on (ell', q' - ell) in the modulation equations."""
    m = _matrix(d.u, d.ell)
    return ModulationMatrix(m, float(np.linalg.cond(m)))


def modulation_rhs_values(u: FieldPair, ell: float, ke=None):
    """(ell', q' - ell) for radiation u in the moving frame."""
    grid = u.grid
    if ke is None:
        ke = kernel_elements(grid, KinkParams(ell, 0.0))
    m = _matrix(u, ell, ke)
    n2 = nonlinearity(u.first, ell, grid)
    N = FieldPair(grid, np.zeros(grid.N), n2)
    b = np.array([-inner(ke.Y0.J(), N), inner(ke.Y1.J(), N)])
    det = np.linalg.det(m)
    if not np.isfinite(det) or abs(det) < 1e-12 * abs(m).max() ** 2:
        raise SingularModulationError("modulation matrix is singular; perturbation too large")
    sol = np.linalg.solve(m, b)
    return float(sol[0]), float(sol[1])


def modulation_rhs(d: Decomposition):
    return modulation_rhs_values(d.u, d.ell)
