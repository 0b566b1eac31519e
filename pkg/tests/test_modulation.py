import numpy as np
import pytest
from hypothesis import given, strategies as st
from numpy.testing import assert_allclose

from kinklab.grid import FieldPair, Grid
from kinklab.kink import KinkParams, inner, kernel_elements, moving_kink
from kinklab.modulation import (FitError, SingularModulationError, fit, frame_defects,
                                modulation_matrix, modulation_rhs, modulation_rhs_values,
                                nonlinearity, reconstruct)
from kinklab.solver import SolverConfig, evolve_moving_frame

from conftest import bump


def perturbed(grid, ell, eps, c=1.0):
    k = moving_kink(grid, KinkParams(ell, 0.0))
    return FieldPair(grid, k.first + eps * bump(grid.x, c, 1.0),
                     k.second + 0.5 * eps * bump(grid.x, -c, 1.5))


@given(ell=st.floats(-0.6, 0.6), eps=st.floats(-0.1, 0.1), c=st.floats(-3, 3))
def test_fit_is_idempotent(grid, ell, eps, c):
    d = fit(perturbed(grid, ell, eps, c), KinkParams(ell, 0.0))
    assert max(abs(x) for x in d.defects) < 1e-10
    d2 = fit(reconstruct(d), d.params)
    assert abs(d2.ell - d.ell) < 1e-12
    assert abs(d2.q - d.q) < 1e-12


@given(ell=st.floats(-0.6, 0.6), s=st.integers(-40, 40))
def test_fit_translation_equivariant(grid, ell, s):
    phi = perturbed(grid, ell, 0.05)
    d = fit(phi, KinkParams(ell, 0.0))
    a = s * grid.h
    shifted = FieldPair(grid, np.roll(phi.first, s), np.roll(phi.second, s))
    # np.roll wraps the 2 pi jump; restore the winding on the wrapped nodes
    f1 = np.array(shifted.first)
    if s > 0:
        f1[:s] -= 2 * np.pi
    elif s < 0:
        f1[s:] += 2 * np.pi
    d2 = fit(FieldPair(grid, f1, shifted.second), KinkParams(ell, a))
    assert abs(d2.ell - d.ell) < 1e-10
    assert abs(d2.q - (d.q + a)) < 1e-10
    assert np.abs(d2.u.first - d.u.first).max() < 1e-8


def test_fit_rejects_far_state(grid):
    with pytest.raises(FitError):
        fit(moving_kink(grid, KinkParams(0.0, 3.0)), KinkParams(0.0, 0.0))


def test_fit_of_exact_kink(grid):
    d = fit(moving_kink(grid, KinkParams(0.3, 0.7)), KinkParams(0.29, 0.68))
    assert_allclose([d.ell, d.q], [0.3, 0.7], atol=1e-12)
    assert d.u.sup() < 1e-10


def test_nonlinearity_is_cubic_small(grid):
    u = 1e-3 * bump(grid.x)
    n = nonlinearity(u, 0.2, grid)
    n2 = nonlinearity(2 * u, 0.2, grid)
    # leading term is quadratic where sin K != 0
    assert_allclose(n2[np.abs(n) > 1e-9] / n[np.abs(n) > 1e-9], 4.0, rtol=1e-2)


def test_modulation_matrix_near_constant(grid):
    d = fit(perturbed(grid, 0.3, 0.01), KinkParams(0.3, 0.0))
    m = modulation_matrix(d)
    g = 1 / np.sqrt(1 - 0.09)
    assert_allclose(np.diag(m.entries), 8 * g ** 3, rtol=0.05)
    assert m.cond < 1.2


def test_modulation_rates_vanish_for_exact_kink(grid):
    u = FieldPair.zeros(grid)
    assert modulation_rhs_values(u, 0.4) == (0.0, 0.0)


def test_singular_matrix_detected(grid):
    ke = kernel_elements(grid, KinkParams(0.0, 0.0))
    w = ke.Z3.J()
    n = lambda a, b: inner(a.J(), b)
    # u = a w makes det = 64 - a^2 (n33^2 - n13 n23); pick a to zero it
    k = n(ke.Z3, w) ** 2 - n(ke.Z1, w) * n(ke.Z2, w)
    assert k > 0
    u = np.sqrt(64.0 / k) * w
    with pytest.raises(SingularModulationError):
        modulation_rhs_values(u, 0.0, ke)


@pytest.mark.parametrize("ell", [0.0, 0.3, -0.5])
def test_coevolved_defects_stay_zero(ell):
    grid = Grid(80.0, 1024)
    d = fit(perturbed(grid, ell, 0.05), KinkParams(ell, 0.0))
    tr = evolve_moving_frame(d.u, d.params, SolverConfig(T=5.0, monitor_every=0.25))
    t = tr.record["t"]
    for key in ("defect1", "defect2"):
        rate = np.abs(np.diff(tr.record[key]) / np.diff(t)).max()
        assert rate < 1e-7


def test_printed_sign_breaks_orthogonality():
    # flipping the sign of the (2,1) entry makes the defects drift
    import kinklab.modulation as M
    grid = Grid(80.0, 1024)
    d = fit(perturbed(grid, 0.3, 0.1), KinkParams(0.3, 0.0))
    orig = M._matrix

    def flipped(u, ell, ke=None):
        m = orig(u, ell, ke)
        m[1, 0] = -m[1, 0]
        return m

    M._matrix = flipped
    try:
        tr = evolve_moving_frame(d.u, d.params, SolverConfig(T=5.0))
    finally:
        M._matrix = orig
    tr2 = evolve_moving_frame(d.u, d.params, SolverConfig(T=5.0))
    bad = np.abs(tr.record["defect2"]).max() + np.abs(tr.record["defect1"]).max()
    good = np.abs(tr2.record["defect2"]).max() + np.abs(tr2.record["defect1"]).max()
    assert bad > 100 * good


def test_frame_defects_of_fit(grid):
    d = fit(perturbed(grid, 0.2, 0.05), KinkParams(0.2, 0.0))
    assert max(abs(x) for x in frame_defects(d.u, d.ell)) < 1e-10
    assert len(modulation_rhs(d)) == 2
