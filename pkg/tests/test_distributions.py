import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from numpy.testing import assert_allclose

from kinklab import distributions as D
from kinklab.dft import omega_of

freqs = st.floats(-3, 3)
ells = st.floats(-0.6, 0.6)


def test_cosech_regular_at_zero():
    assert_allclose(D.z_cosech(0.0), 2 / np.pi)
    assert_allclose(D.z_cosech(1e-8), 2 / np.pi, rtol=1e-12)


@pytest.mark.parametrize("ident", D.IDENTITIES, ids=lambda i: i.name)
def test_corrected_transforms_match_quadrature(ident):
    for z in D.ORACLE_POINTS:
        q = D.transform_by_quadrature(ident.profile, z)
        assert D._rel_err(ident.corrected(z), q) < 1e-9


def test_printed_sech_transform_is_wrong():
    rep = {(r.identity, r.form): r for r in D.transform_oracle()}
    assert rep[("sech", "printed")].verdict == "fail"
    assert rep[("sech", "corrected")].verdict == "pass"
    assert rep[("sech^2", "printed")].verdict == "pass"


@given(z=st.floats(-6, 6))
def test_transform_parity(z):
    # sech tanh^k has parity (-1)^k, so its transform is real or imaginary accordingly
    for k in (1, 2, 3, 4):
        v = complex(D.ft_sech_tanh(z, k))
        assert abs(v.imag if k % 2 == 0 else v.real) < 1e-14
        assert_allclose(complex(D.ft_sech_tanh(-z, k)), (-1) ** k * v, atol=1e-14)


@settings(max_examples=100, deadline=None)
@given(kind=st.sampled_from(D.QUAD_KINDS), ell=ells, a=freqs, b=freqs)
def test_quadratic_closed_forms(kind, ell, a, b):
    c = complex(D.quad_dist(kind, ell, a, b))
    q = D.quad_dist(kind, ell, a, b, method="quadrature")
    assert abs(c - q) <= 1e-6 * max(abs(q), 1e-6)


def test_minus_minus_is_conjugate():
    a, b = np.linspace(-2, 2, 7), np.linspace(-1, 3, 7)
    assert_allclose(D.quad_dist("--", 0.3, a, b), np.conj(D.quad_dist("++", 0.3, a, b)))


@given(ell=ells, a=freqs, b=freqs)
def test_kappa_times_phase_is_mu(ell, a, b):
    for kind in ("+-", "++"):
        mu = complex(D.quad_dist(kind, ell, a, b))
        k = complex(D.kappa(kind, ell, a, b))
        assert abs(k * D.quad_phase(kind, ell, a, b) - mu) < 1e-14 * max(1, abs(mu))


@pytest.mark.parametrize("ell", [0.0, 0.3, -0.5])
def test_kappa_continuous_across_zero_set(ell):
    a = 0.8
    for h in (1e-2, 1e-4, 1e-6):
        b = a + h
        ratio = complex(D.quad_dist("+-", ell, a, b)) / D.quad_phase("+-", ell, a, b)
        assert abs(ratio - complex(D.kappa("+-", ell, a, a))) < 5 * h
    # ++ phase never vanishes but the quotient is smooth all the same
    assert np.isfinite(complex(D.kappa("++", ell, a, -a)))


@pytest.mark.parametrize("ell", [0.0, 0.4, -0.7])
def test_resonant_frequencies_are_null(ell):
    nd = D.NullFactorData(ell)
    for xi in nd.resonant_frequencies():
        assert_allclose(omega_of(xi, ell), 2 * np.sqrt(1 - ell * ell), rtol=1e-14)
        assert abs(nd.source_transform(xi)) < 1e-10


@pytest.mark.parametrize("ell", [0.0, 0.4])
def test_psi_factorization(ell):
    g = 1 / np.sqrt(1 - ell * ell)
    for xi in (-1.7, -0.3, 0.5, 2.2):
        lhs = D.sharp_transform_quadrature(D.quadratic_source(ell, 1), ell, xi)
        rhs = (omega_of(xi, ell) - 2 / g) * D.null_factor_psi(ell, xi)
        assert abs(lhs - rhs) < 1e-12


def test_printed_psi_fails_when_boosted():
    xi, ell = 0.5, 0.4
    g = 1 / np.sqrt(1 - ell * ell)
    lhs = D.sharp_transform_quadrature(D.quadratic_source(ell, 1), ell, xi)
    rhs = (omega_of(xi, ell) - 2 / g) * D.null_factor_psi(ell, xi, printed=True)
    assert abs(lhs - rhs) > 1e-4


@given(ell=ells, xi=freqs)
def test_cubic_diagonal(ell, xi):
    assert_allclose(complex(D.cubic_coeff("+-+", "delta", ell, xi, xi, xi, xi)),
                    1 / (2 * np.pi), atol=1e-12)
    assert abs(complex(D.cubic_coeff("+-+", "pv", ell, xi, xi, xi, xi))) < 1e-12


@given(ell=ells, xi=freqs, a=freqs, b=freqs, c=freqs)
def test_triple_plus_delta_symmetric(ell, xi, a, b, c):
    ref = complex(D.cubic_coeff("+++", "delta", ell, xi, a, b, c))
    for p in itertools.permutations((a, b, c)):
        v = complex(D.cubic_coeff("+++", "delta", ell, xi, *p))
        assert abs(v - ref) < 1e-13 * max(1.0, abs(ref))


@pytest.mark.parametrize("pattern", list(D.CUBIC_PATTERNS))
def test_mollified_pairing_reconstructs_integral(pattern):
    tests = (D.Gaussian(1.0, 0.2), D.Gaussian(1.4, 0.2), D.Gaussian(0.9, 0.2))
    r = D.mollified_pairing(pattern, 0.3, 1.0, tests)
    assert r.rel_err < 1e-8


def test_cubic_pattern_rejected():
    with pytest.raises((KeyError, ValueError)):
        D.cubic_coeff("+-?", "delta", 0.0, 0, 0, 0, 0)
    with pytest.raises(ValueError):
        D.cubic_coeff("+-+", "regular", 0.0, 0, 0, 0, 0)


def test_static_factorization_points():
    for kind in D.STATIC_KINDS:
        for p in ((0.5, -1.0, 1.5), (-2.0, 0.0, 1.0)):
            q = D.static_quadrature(kind, *p)
            assert abs(complex(D.static_q(kind, *p)) - q) < 1e-7 * max(abs(q), 1e-3)


def test_static_vanishing_point():
    assert abs(complex(D.static_q("++", np.sqrt(3), 0.0, 0.0))) < 1e-15
