"""Quadratic and cubic spectral distributions, null-structure factorizations and
identity oracles for Fourier transforms of hyperbolic profiles.

Fourier convention in this module: the transform of f at zeta is the integral
of exp(i x zeta) f(x).
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from itertools import product

import numpy as np

from .dft import SQRT2PI, e_sharp, eta_of, japanese, omega_of
from .grid import oscillatory_quadrature
from .kink import gamma_of, sech


class QuadratureFailure(RuntimeError):
    """The oscillatory quadrature missed its tolerance."""


def _x_over_sinh(x):
    x = np.asarray(x, dtype=float)
    small = np.abs(x) < 1e-8
    xs = np.where(small, 1.0, x)
    return np.where(small, 1.0 - x * x / 6, xs / np.sinh(xs))


def z_cosech(z):
    """z cosech(pi z / 2), continuous at 0 with value 2/pi."""
    return (2 / np.pi) * _x_over_sinh(np.pi * np.asarray(z, dtype=float) / 2)


def cosech(z):
    return 1.0 / np.sinh(z)


# Closed-form transforms. Each entry maps zeta to the integral of exp(i x zeta) f(x).
def ft_sech(z):
    return np.pi * sech(np.pi * np.asarray(z) / 2)


def ft_sech2(z):
    return np.pi * z_cosech(z)


def ft_sech_tanh(z, k: int):
    z = np.asarray(z, dtype=float)
    s = sech(np.pi * z / 2)
    if k == 1:
        return 1j * np.pi * z * s
    if k == 2:
        return np.pi / 2 * (1 - z * z) * s
    if k == 3:
        return -1j * np.pi / 6 * z * (z * z - 5) * s
    if k == 4:
        return np.pi / 24 * (9 - 14 * z * z + z ** 4) * s
    raise ValueError("k must be 1..4")


def ft_sech2_tanh(z, k: int):
    z = np.asarray(z, dtype=float)
    zc = z_cosech(z)
    if k == 1:
        return 1j * np.pi / 2 * z * zc
    if k == 2:
        return -np.pi / 6 * (z * z - 2) * zc
    if k == 3:
        return -1j * np.pi / 24 * z * (z * z - 8) * zc
    raise ValueError("k must be 1..3")


def ft_sech4(z):
    z = np.asarray(z, dtype=float)
    return np.pi / 6 * (z * z + 4) * z_cosech(z)


@dataclass(frozen=True)
class Identity:
    """A transform identity with the printed closed form and the verified one."""

    name: str
    profile: object
    printed: object
    corrected: object


def _printed_sech(z):
    return np.pi * cosech(np.pi * np.asarray(z, dtype=float) / 2)


def _printed_sech2_tanh(k):
    c = {1: 1j / 4, 2: -1 / 12, 3: -1j / 48}[k]

    def f(z):
        z = np.asarray(z, dtype=float)
        poly = {1: z * z, 2: z * (z * z - 2), 3: z * z * (z * z - 8)}[k]
        return c * poly * cosech(np.pi * z / 2)
    return f


def _sech_tanh_profile(m, k):
    return lambda x: sech(x) ** m * np.tanh(x) ** k


IDENTITIES = (
    Identity("sech", _sech_tanh_profile(1, 0), _printed_sech, ft_sech),
    Identity("sech^2", _sech_tanh_profile(2, 0), ft_sech2, ft_sech2),
    *(Identity(f"sech*tanh^{k}", _sech_tanh_profile(1, k),
               (lambda z, k=k: ft_sech_tanh(z, k)), (lambda z, k=k: ft_sech_tanh(z, k)))
      for k in (1, 2, 3, 4)),
    *(Identity(f"sech^2*tanh^{k}", _sech_tanh_profile(2, k), _printed_sech2_tanh(k),
               (lambda z, k=k: ft_sech2_tanh(z, k)))
      for k in (1, 2, 3)),
)

# Smallest sample stands in for the one-sided limit at zero.
ORACLE_POINTS = (0.01, 0.5, 1.0, 2.0, 4.0)


def transform_by_quadrature(profile, zeta: float, tol: float = 1e-13) -> complex:
    r = oscillatory_quadrature(profile, zeta, tol=tol)
    if not r.converged:
        raise QuadratureFailure(r.message)
    return r.value


@dataclass(frozen=True)
class IdentityReport:
    identity: str
    form: str
    points: list
    max_rel_err: float
    verdict: str

    def as_dict(self):
        return asdict(self)


def _rel_err(a, b, floor: float = 1e-6):
    """Relative error, falling back to absolute error where |b| < floor (zeros of b)."""
    return abs(a - b) / max(abs(b), floor)


def transform_oracle(points=ORACLE_POINTS, rtol: float = 1e-9) -> list:
    """Check every transform identity, printed and corrected, against quadrature."""
    out = []
    for ident in IDENTITIES:
        quad = [transform_by_quadrature(ident.profile, z) for z in points]
        for form, fn in (("printed", ident.printed), ("corrected", ident.corrected)):
            with np.errstate(all="ignore"):
                errs = [_rel_err(complex(fn(z)), q) for z, q in zip(points, quad)]
            m = float(max(errs))
            if not np.isfinite(m):
                m = float("inf")
            out.append(IdentityReport(ident.name, form, list(points), m,
                                      "pass" if m < rtol else "fail"))
    return out


# ---------------------------------------------------------------------------
# Quadratic distributions for the modulation equations

def _m(y, xi, ell):
    """(eta + i tanh(gamma y)) / (|eta| - i), the profile part of e^#."""
    g = gamma_of(ell)
    eta = eta_of(xi, ell)
    return (eta + 1j * np.tanh(g * y)) / (np.abs(eta) - 1j)


QUAD_KINDS = ("+-", "++", "--")


def _mu_closed(kind, ell, xi1, xi2):
    g = gamma_of(ell)
    e1, e2 = eta_of(xi1, ell), eta_of(xi2, ell)
    if kind == "+-":
        s = (xi1 - xi2) / g
        a = 12 * s * e1 * e2 + 4 * (s * s - 2) * (e1 - e2) - s * (s * s - 8)
        return 1j / 96 * z_cosech(s) * a / ((np.abs(e1) - 1j) * (np.abs(e2) + 1j))
    s = (xi1 + xi2) / g
    a = 12 * s * e1 * e2 - 4 * (s * s - 2) * (e1 + e2) + s * (s * s - 8)
    val = 1j / 192 * z_cosech(s) * a / ((np.abs(e1) - 1j) * (np.abs(e2) - 1j))
    return val if kind == "++" else np.conj(val)


def _mu_quadrature(kind, ell, xi1, xi2, tol):
    g = gamma_of(ell)
    xi1, xi2 = float(xi1), float(xi2)
    w = 0.5 if kind == "+-" else 0.25
    weight = lambda y: w / (2 * np.pi) * g * sech(g * y) ** 2 * np.tanh(g * y)
    if kind == "+-":
        zeta = xi1 - xi2
        f = lambda y: weight(y) * _m(y, xi1, ell) * np.conj(_m(y, xi2, ell))
    elif kind == "++":
        zeta = xi1 + xi2
        f = lambda y: weight(y) * _m(y, xi1, ell) * _m(y, xi2, ell)
    else:
        zeta = -(xi1 + xi2)
        f = lambda y: weight(y) * np.conj(_m(y, xi1, ell) * _m(y, xi2, ell))
    r = oscillatory_quadrature(f, zeta, tol=tol, half_width=40.0 / g)
    if not r.converged:
        raise QuadratureFailure(r.message)
    return r.value


def quad_dist(kind: str, ell: float, xi1, xi2, method: str = "closed", tol: float = 1e-14):
    """Quadratic spectral distribution mu_{ell; kind}(xi1, xi2).

    ``closed`` evaluates the factorized closed form and broadcasts over
    arrays; ``quadrature`` integrates the defining integral at one point.
    """
    if kind not in QUAD_KINDS:
        raise ValueError(f"kind must be one of {QUAD_KINDS}")
    if method == "closed":
        return _mu_closed(kind, ell, np.asarray(xi1, dtype=float), np.asarray(xi2, dtype=float))
    if method == "quadrature":
        return _mu_quadrature(kind, ell, xi1, xi2, tol)
    raise ValueError("method must be 'closed' or 'quadrature'")


def quad_phase(kind: str, ell: float, xi1, xi2):
    """Phase factor omega(xi1) -+ omega(xi2) dividing mu."""
    w1, w2 = omega_of(xi1, ell), omega_of(xi2, ell)
    return w1 - w2 if kind == "+-" else w1 + w2


def kappa(kind: str, ell: float, xi1, xi2):
    """Quotient mu / phase, written without division so it is smooth across the zero set."""
    g = gamma_of(ell)
    xi1 = np.asarray(xi1, dtype=float)
    xi2 = np.asarray(xi2, dtype=float)
    e1, e2 = eta_of(xi1, ell), eta_of(xi2, ell)
    w1, w2 = omega_of(xi1, ell), omega_of(xi2, ell)
    if kind == "+-":
        s = (xi1 - xi2) / g
        B = (3 * g * g * (w1 + w2) * (e1 + e2) - 3 * g * ell * (e1 + e2) ** 2
             + ell * (xi1 - xi2) * (-6 * (e1 - e2) + 3 * g * ell * (w1 - w2))
             + 4 * g * ell * (s * s - 2))
        return 1j / 96 * z_cosech(s) * B / ((np.abs(e1) - 1j) * (np.abs(e2) + 1j))
    if kind == "++":
        s = (xi1 + xi2) / g
        B = (-3 * g * g * (w1 - w2) * (e1 - e2) + 3 * g * ell * (e1 - e2) ** 2
             + ell * (xi1 + xi2) * (6 * (e1 + e2) - 3 * g * ell * (w1 + w2))
             - 4 * g * ell * (s * s - 2))
        return 1j / 192 * z_cosech(s) * B / ((np.abs(e1) - 1j) * (np.abs(e2) - 1j))
    raise ValueError("kappa is defined for '+-' and '++'")


# ---------------------------------------------------------------------------
# Null structure of the quadratic source in the radiation equation

def alpha(y):
    """Quadratic coefficient -sech tanh."""
    return -sech(y) * np.tanh(y)


def resonant_frequencies(ell: float):
    """Frequencies gamma(-2 l +- sqrt 3) where the phase <xi> + l xi equals 2/gamma."""
    g = float(gamma_of(ell))
    r = np.sqrt(3.0)
    return g * (-2 * ell + r), g * (-2 * ell - r)


def stationary_mode(y, ell: float):
    """e^#(y, -gamma l) = -tanh(gamma y) exp(-i gamma l y) / sqrt(2 pi)."""
    g = gamma_of(ell)
    return e_sharp(y, -g * ell, ell)


def null_factor_psi(ell: float, xi, printed: bool = False):
    """psi with F^#[alpha(gamma .) e^#(., -gamma l)^2] = (omega - 2/gamma) psi.

    ``printed=True`` drops the factor z multiplying the boost term, which
    reproduces the expression as originally stated; that version does not
    satisfy the factorization unless l = 0.
    """
    g = gamma_of(ell)
    xi = np.asarray(xi, dtype=float)
    z = xi / g + 2 * ell
    eta = eta_of(xi, ell)
    boost = 4 * ell * g * (z * z - 5) * (1.0 if printed else z)
    rest = 3 * (japanese(xi) - ell * xi + 2 / g) * (1 + z * z)
    return (boost + rest) * sech(np.pi * z / 2) / (48j * g * (np.abs(eta) + 1j)) / SQRT2PI


def sharp_transform_quadrature(profile, ell: float, xi: float, tol: float = 1e-14) -> complex:
    """F^#_l[profile](xi) by oscillatory quadrature; profile must decay exponentially."""
    g = gamma_of(ell)
    eta = float(eta_of(xi, ell))
    f = lambda y: (eta - 1j * np.tanh(g * y)) / (abs(eta) + 1j) * profile(y) / SQRT2PI
    r = oscillatory_quadrature(f, -float(xi), tol=tol, half_width=40.0 / g)
    if not r.converged:
        raise QuadratureFailure(r.message)
    return r.value


def quadratic_source(ell: float, which: int):
    """alpha(gamma y) times e^2, |e|^2 or conj(e)^2 at the stationary frequency."""
    g = gamma_of(ell)
    if which == 1:
        return lambda y: alpha(g * y) * stationary_mode(y, ell) ** 2
    if which == 2:
        return lambda y: alpha(g * y) * np.abs(stationary_mode(y, ell)) ** 2
    if which == 3:
        return lambda y: alpha(g * y) * np.conj(stationary_mode(y, ell)) ** 2
    raise ValueError("which must be 1, 2 or 3")


@dataclass(frozen=True)
class NullFactorData:
    ell: float

    def psi(self, xi, printed: bool = False):
        return null_factor_psi(self.ell, xi, printed)

    def resonant_frequencies(self):
        return resonant_frequencies(self.ell)

    def source_transform(self, xi) -> complex:
        """F^#[alpha(gamma .) e^#(., -gamma l)^2] by quadrature."""
        return sharp_transform_quadrature(quadratic_source(self.ell, 1), self.ell, xi)

    def normal_form_coefficient(self, which: int, xi) -> complex:
        """q_1 = F^#[..e^2]/4, q_2 = F^#[..|e|^2]/2, q_3 = F^#[..conj(e)^2]/4."""
        w = {1: 0.25, 2: 0.5, 3: 0.25}[which]
        return w * sharp_transform_quadrature(quadratic_source(self.ell, which), self.ell, xi)


# ---------------------------------------------------------------------------
# Cubic distributions

CUBIC_PATTERNS = {
    # conjugation flags for (xi, xi1, xi2, xi3); the output slot is always conjugated
    "+++": (True, False, False, False),
    "+-+": (True, False, True, False),
    "+--": (True, False, True, True),
    "---": (True, True, True, True),
}


def _tanh_polynomial(etas, conj_flags):
    """Coefficients c_0..c_4 of prod_j (eta_j +- i T) in powers of T = tanh."""
    coeffs = [np.ones(np.broadcast(*etas).shape, dtype=complex)]
    for eta, cj in zip(etas, conj_flags):
        s = -1j if cj else 1j
        new = [np.zeros_like(coeffs[0]) for _ in range(len(coeffs) + 1)]
        for k, c in enumerate(coeffs):
            new[k] = new[k] + c * eta
            new[k + 1] = new[k + 1] + c * s
        coeffs = new
    return coeffs


def _denominator(etas, conj_flags):
    den = 1.0 + 0j
    for eta, cj in zip(etas, conj_flags):
        den = den * (np.abs(eta) + (1j if cj else -1j))
    return den


@dataclass(frozen=True)
class CubicParts:
    """Coefficients of delta_0, pv cosech and the regular kernels.

    The regular part is r2 * S2 + r3 * TS2 + r4 * S4 with Sk the transforms
    of sech^2, tanh sech^2 and sech^4 at zeta / gamma, scaled by 1/gamma.
    """

    delta: np.ndarray
    pv: np.ndarray
    r2: np.ndarray
    r3: np.ndarray
    r4: np.ndarray


def cubic_parts(pattern: str, ell: float, xi, xi1, xi2, xi3) -> CubicParts:
    """Split the cubic distribution into its delta, principal-value and regular parts.

    With T = tanh(gamma y), S = sech(gamma y) the integrand is
    (2 pi)^-2 P(T) exp(i y zeta) / Den; T^2 = 1 - S^2 reduces P to
    1, T, S^2, T S^2 and S^4.
    """
    if pattern not in CUBIC_PATTERNS:
        raise ValueError(f"pattern must be one of {tuple(CUBIC_PATTERNS)}")
    flags = CUBIC_PATTERNS[pattern]
    g = gamma_of(ell)
    etas = [eta_of(np.asarray(v, dtype=float), ell) for v in (xi, xi1, xi2, xi3)]
    c = _tanh_polynomial(etas, flags)
    den = _denominator(etas, flags)
    pref = 1 / (4 * np.pi ** 2 * den)
    delta = (c[0] + c[2] + c[4]) / (2 * np.pi * den)
    pv = 1j * (c[1] + c[3]) / (4 * np.pi * g * den)
    return CubicParts(delta, pv, -(c[2] + 2 * c[4]) * pref, -c[3] * pref, c[4] * pref)


def cubic_coeff(pattern: str, kind: str, ell: float, xi, xi1, xi2, xi3):
    """m^{delta_0} (kind 'delta') or m^{pv} (kind 'pv') for a sign pattern."""
    p = cubic_parts(pattern, ell, xi, xi1, xi2, xi3)
    if kind in ("delta", "delta0"):
        return p.delta
    if kind == "pv":
        return p.pv
    raise ValueError("kind must be 'delta' or 'pv'")


def cubic_zeta(pattern: str, xi, xi1, xi2, xi3):
    """Frequency -xi + sum of +-xi_j carried by exp(i y zeta)."""
    flags = CUBIC_PATTERNS[pattern]
    out = -np.asarray(xi, dtype=float)
    for v, cj in zip((xi1, xi2, xi3), flags[1:]):
        out = out + (-1 if cj else 1) * np.asarray(v, dtype=float)
    return out


def regular_kernel(parts: CubicParts, ell: float, zeta):
    """Value of the regular part at frequency zeta."""
    g = gamma_of(ell)
    z = np.asarray(zeta, dtype=float) / g
    return (parts.r2 * ft_sech2(z) + parts.r3 * ft_sech2_tanh(z, 1)
            + parts.r4 * ft_sech4(z)) / g


def cubic_integrand(pattern: str, ell: float, y, xi, xi1, xi2, xi3):
    """Pointwise product of the four basis elements in the defining integral."""
    flags = CUBIC_PATTERNS[pattern]
    out = 1.0 + 0j
    for v, cj in zip((xi, xi1, xi2, xi3), flags):
        e = e_sharp(y, v, ell)
        out = out * (np.conj(e) if cj else e)
    return out


def _gauss_legendre(a: float, b: float, n: int, breaks=()):
    pts = [a] + sorted(t for t in breaks if a < t < b) + [b]
    x0, w0 = np.polynomial.legendre.leggauss(n)
    xs, ws = [], []
    for lo, hi in zip(pts[:-1], pts[1:]):
        xs.append(0.5 * (hi - lo) * x0 + 0.5 * (hi + lo))
        ws.append(0.5 * (hi - lo) * w0)
    return np.concatenate(xs), np.concatenate(ws)


@dataclass(frozen=True)
class Gaussian:
    center: float
    width: float

    def __call__(self, x):
        return np.exp(-0.5 * ((np.asarray(x) - self.center) / self.width) ** 2)

    def support(self, cut: float = 9.0):
        return self.center - cut * self.width, self.center + cut * self.width


@dataclass(frozen=True)
class PairingResult:
    direct: complex
    delta: complex
    pv: complex
    regular: complex

    @property
    def reconstructed(self) -> complex:
        return self.delta + self.pv + self.regular

    @property
    def rel_err(self) -> float:
        return abs(self.reconstructed - self.direct) / abs(self.direct)


def mollified_pairing(pattern: str, ell: float, xi: float, tests, n: int = 40,
                      n_direct: int = 160, y_max: float = 30.0,
                      hy: float = 0.02) -> PairingResult:
    """Pair the cubic distribution at fixed xi with phi_1 x phi_2 x phi_3.

    The direct route integrates the product of the smeared basis elements in
    y. The reconstructed route integrates the delta, principal-value and
    regular parts separately in frequency.
    """
    flags = CUBIC_PATTERNS[pattern]
    g = float(gamma_of(ell))
    kink = -g * ell  # |eta| is not smooth here
    nodes = [_gauss_legendre(*t.support(), n, (kink,)) for t in tests]

    y = np.arange(-y_max, y_max + hy / 2, hy)
    prod = np.conj(e_sharp(y, xi, ell)) if flags[0] else e_sharp(y, xi, ell)
    fine = [_gauss_legendre(*t.support(), n_direct, (kink,)) for t in tests]
    for (x, w), t, cj in zip(fine, tests, flags[1:]):
        E = (e_sharp(y[:, None], x[None, :], ell) * (w * t(x))[None, :]).sum(axis=1)
        prod = prod * (np.conj(E) if cj else E)
    direct = complex(np.sum(prod) * hy)

    (x1, w1), (x2, w2), (x3, w3) = nodes
    s1, s2, s3 = [(-1 if cj else 1) for cj in flags[1:]]
    # delta part: integrate out xi3 on the plane zeta = 0
    X1, X2 = np.meshgrid(x1, x2, indexing="ij")
    W12 = np.outer(w1 * tests[0](x1), w2 * tests[1](x2))
    X3 = (xi - s1 * X1 - s2 * X2) * s3
    m = cubic_parts(pattern, ell, xi, X1, X2, X3).delta
    delta = complex(np.sum(W12 * m * tests[2](X3)))

    # principal value: xi3 = s3 (zeta + xi - s1 xi1 - s2 xi2), symmetric in zeta
    lo3, hi3 = tests[2].support()
    zmax = max(abs(hi3 - lo3) + 20.0, 40.0)
    zn, zw = _gauss_legendre(0.0, zmax, n, tuple(np.linspace(0, zmax, 9)[1:-1]))
    pv = 0j
    for sgn in (1, -1):
        Z = sgn * zn
        X3 = s3 * (Z[None, None, :] + xi - s1 * X1[..., None] - s2 * X2[..., None])
        mm = cubic_parts(pattern, ell, xi, X1[..., None], X2[..., None], X3).pv
        f = mm * tests[2](X3) * W12[..., None]
        pv += sgn * complex(np.sum(f * (zw * cosech(np.pi * zn / (2 * g)))[None, None, :]))

    # regular part: full triple integral
    p = cubic_parts(pattern, ell, xi, X1[..., None], X2[..., None], x3[None, None, :])
    zeta = cubic_zeta(pattern, xi, X1[..., None], X2[..., None], x3[None, None, :])
    reg = regular_kernel(p, ell, zeta) * W12[..., None] * (w3 * tests[2](x3))[None, None, :]
    return PairingResult(direct, delta, pv, complex(np.sum(reg)))


# ---------------------------------------------------------------------------
# Quadratic null structures for odd perturbations of the static kink

def _sharp0(x, xi):
    return e_sharp(x, xi, 0.0)


STATIC_KINDS = ("++", "-+", "--")


def static_phase(kind: str, xi, eta, sigma):
    jx, je, js = japanese(xi), japanese(eta), japanese(sigma)
    return {"++": -jx + je + js, "-+": -jx - je + js, "--": -jx - je - js}[kind]


def static_poly(kind: str, xi, eta, sigma):
    """Printed factors p with the integral equal to phase times p."""
    jx, je, js = japanese(xi), japanese(eta), japanese(sigma)
    xi, eta, sigma = (np.asarray(v, dtype=float) for v in (xi, eta, sigma))
    c = 1j * np.pi / 8
    if kind == "++":
        return c * (jx + je + js) * (jx ** 2 - (je - js) ** 2) * sech(np.pi / 2 * (xi - eta - sigma))
    if kind == "-+":
        return c * (jx + je + js) * (js ** 2 - (jx - je) ** 2) * sech(np.pi / 2 * (xi + eta - sigma))
    if kind == "--":
        return -c * (-jx + je + js) * (jx ** 2 - (je - js) ** 2) * sech(np.pi / 2 * (xi + eta + sigma))
    raise ValueError(f"kind must be one of {STATIC_KINDS}")


def static_prefactor(kind: str, xi, eta, sigma):
    """-(2 pi)^{-3/2} over the three normalizing denominators."""
    xi, eta, sigma = (np.asarray(v, dtype=float) for v in (xi, eta, sigma))
    d2 = np.abs(eta) + (-1j if kind == "++" else 1j)
    d3 = np.abs(sigma) + (1j if kind == "--" else -1j)
    return -1.0 / ((2 * np.pi) ** 1.5 * (np.abs(xi) + 1j) * d2 * d3)


def static_q(kind: str, xi, eta, sigma, printed: bool = False):
    """Closed form of q_kind = integral of alpha times three basis elements.

    ``printed=True`` returns phase times p alone, without the normalizing
    prefactor.
    """
    v = static_phase(kind, xi, eta, sigma) * static_poly(kind, xi, eta, sigma)
    return v if printed else static_prefactor(kind, xi, eta, sigma) * v


def static_quadrature(kind: str, xi: float, eta: float, sigma: float,
                          tol: float = 1e-14) -> complex:
    """Defining integral of q_kind by oscillatory quadrature."""
    xi, eta, sigma = float(xi), float(eta), float(sigma)
    m = lambda x, v: (v + 1j * np.tanh(x)) / (abs(v) - 1j)
    a = m if kind == "++" else (lambda x, v: np.conj(m(x, v)))
    b = (lambda x, v: np.conj(m(x, v))) if kind == "--" else m
    f = lambda x: (alpha(x) * np.conj(m(x, xi)) * a(x, eta) * b(x, sigma)
                   / (2 * np.pi) ** 1.5)
    zeta = {"++": -xi + eta + sigma, "-+": -xi - eta + sigma, "--": -xi - eta - sigma}[kind]
    r = oscillatory_quadrature(f, zeta, tol=tol)
    if not r.converged:
        raise QuadratureFailure(r.message)
    return r.value


@dataclass(frozen=True)
class StaticKinkData:
    def q(self, kind, xi, eta, sigma, printed=False):
        return static_q(kind, xi, eta, sigma, printed)

    def p(self, kind, xi, eta, sigma):
        return static_poly(kind, xi, eta, sigma)

    def phase(self, kind, xi, eta, sigma):
        return static_phase(kind, xi, eta, sigma)


def static_oracle(points=tuple(np.linspace(-2, 2, 5)), rtol: float = 1e-7) -> list:
    """Compare closed forms with quadrature on a cubic grid of (xi, eta, sigma)."""
    out = []
    for kind in STATIC_KINDS:
        pts = list(product(points, repeat=3))
        quad = np.array([static_quadrature(kind, *p) for p in pts])
        scale = np.abs(quad).max()
        for form, printed in (("printed", True), ("corrected", False)):
            vals = np.array([complex(static_q(kind, *p, printed=printed)) for p in pts])
            err = float((np.abs(vals - quad) / np.maximum(np.abs(quad), 1e-3 * scale)).max())
            out.append(IdentityReport(f"q{kind}", form, [list(map(float, p)) for p in pts],
                                      err, "pass" if err < rtol else "fail"))
    return out
