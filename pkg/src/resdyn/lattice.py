"""T-shaped quantum-dot model: discrete spectrum and survival dynamics.

A dot site d1 couples through d2 to two semi-infinite leads with dispersion
E_k = -2b cos k.  On the lambda = e^{ik} plane the four discrete eigenvalues
are roots of a quartic; their residue weights give a component decomposition
of the survival amplitude in which resonant and anti-resonant contributions
break time-reversal symmetry individually while their sum restores it.

All amplitudes here are matrix elements <d1| . >; energies are in units of
the lead hopping b.
"""

from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    AssumptionViolated,
    DegenerateLeadCoupling,
    DomainError,
    NearDegenerateSpectrum,
    NoResonance,
    NoSignChange,
    Unclassifiable,
    Underflow,
    ValidityWarning,
)
from .kernel import (
    Polynomial,
    bessel_j1,
    piecewise_quad,
    poly_roots,
    upper_gamma_mhalf,
)


@dataclass(frozen=True)
class Tolerances:
    """Quadrature tolerances threaded through the amplitude evaluations."""

    abs_tol: float = 1e-10
    rel_tol: float = 1e-8

    def __post_init__(self):
        if self.abs_tol <= 0 or self.rel_tol <= 0:
            raise DomainError("tolerances must be positive")


DEFAULT_TOLERANCES = Tolerances()


@dataclass(frozen=True)
class TDotParams:
    """Physical parameters: lead hopping b, on-site energies, couplings."""

    b: float
    eps1: float
    eps2: float
    g: float
    t2l: float
    t2r: float

    def __post_init__(self):
        vals = (self.b, self.eps1, self.eps2, self.g, self.t2l, self.t2r)
        if not all(np.isfinite(v) for v in vals):
            raise DomainError("parameters must be finite")
        if self.b <= 0:
            raise DomainError("b must be positive")

    @property
    def lead_coupling(self):
        """T = (t2L^2 + t2R^2)/b, the combined dot-lead coupling scale."""
        return (self.t2l ** 2 + self.t2r ** 2) / self.b


@dataclass(frozen=True)
class BrillouinPoint:
    """A wave number in (-pi, pi] with its band energy E_k = -2b cos k."""

    k: float
    energy: float

    def __post_init__(self):
        if not (-np.pi < self.k <= np.pi):
            raise DomainError("wave number outside the first Brillouin zone")

    @classmethod
    def from_wavenumber(cls, k, b):
        return cls(float(k), -2.0 * b * np.cos(k))

    @property
    def lam(self):
        """The unit-circle coordinate e^{ik} of the contour integrals."""
        return complex(np.exp(1j * self.k))


class StateClass(enum.Enum):
    BOUND = "bound"
    ANTI_BOUND = "anti-bound"
    RESONANT = "resonant"
    ANTI_RESONANT = "anti-resonant"


class Representation(enum.Enum):
    DIRECT_CONTOUR = "direct-contour"
    BESSEL_COMPONENT_SUM = "bessel-component-sum"
    ORACLE = "oracle"
    ISOLATED_RESIDUE = "isolated-residue"
    SHORT_TIME = "short-time"
    LONG_TIME_ASYMPTOTIC = "long-time-asymptotic"


@dataclass(frozen=True)
class DiscreteState:
    """One point-spectrum eigenstate and its survival-weight residues.

    weight_w is w_n = lam_n <d1|psi_n><psi~_n|d1>; weight_q the d1-d2
    analogue feeding superposition initial states; dyad_phi the product
    <d1|phi_n><phi~_n|d1> in the conventionally normalized eigenstates,
    equal to (1/lam - lam) * weight_w.
    """

    lam: complex
    energy: complex
    state_class: StateClass
    weight_w: complex
    dyad_phi: complex
    weight_q: complex


@dataclass(frozen=True)
class ThetaState:
    """Relative phase of the (|d1> + e^{i theta}|d2>)/sqrt(2) initial state."""

    theta: float

    def __post_init__(self):
        if not np.isfinite(self.theta):
            raise DomainError("theta must be finite")


@dataclass(frozen=True)
class ZenoReport:
    """Symmetry-breaking time t0, Zeno scale tZ, and how non-real t0 was."""

    t0: float
    tz: float
    imag_fraction: float


@dataclass(frozen=True)
class AmplitudeSeries:
    """Amplitude values on a time grid, tagged with their provenance."""

    times: tuple
    values: tuple
    representation: Representation
    component: str = "total"

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        v = np.asarray(self.values, dtype=complex)
        if t.ndim != 1 or len(t) != len(v) or len(t) == 0:
            raise DomainError("times and values must be matching 1-d sequences")
        if len(t) > 1 and not np.all(np.diff(t) > 0):
            raise DomainError("times must be strictly increasing")
        if not (np.all(np.isfinite(t)) and np.all(np.isfinite(v))):
            raise DomainError("times and values must be finite")
        object.__setattr__(self, "times", tuple(float(x) for x in t))
        object.__setattr__(self, "values", tuple(complex(x) for x in v))


_CLASS_ORDER = {
    StateClass.BOUND: 0,
    StateClass.ANTI_BOUND: 1,
    StateClass.RESONANT: 2,
    StateClass.ANTI_RESONANT: 3,
}


@dataclass(frozen=True)
class Spectrum:
    """The discrete spectrum (4 states, or 3 when the quartic degenerates)."""

    states: tuple
    params: TDotParams
    flags: tuple = field(default=())

    def by_class(self, state_class):
        return [s for s in self.states if s.state_class is state_class]

    def resonant(self):
        res = self.by_class(StateClass.RESONANT)
        if not res:
            raise NoResonance("spectrum has no resonant state (left of the EP)")
        return res[0]

    def completeness_defect(self):
        """|sum_n w_n/lam_n - 1|; zero for an exact expansion of <d1|d1>."""
        return abs(sum(s.weight_w / s.lam for s in self.states) - 1.0)


def h_lambda(params, lam):
    """h(lambda) = -b(lambda + 1/lambda) - eps1; symmetric under lam -> 1/lam."""
    lam = complex(lam)
    if lam == 0:
        raise DomainError("lambda = 0 is a pole of h")
    return -params.b * (lam + 1.0 / lam) - params.eps1


def f_lambda(params, lam):
    """The secular function whose roots are the discrete eigenvalues."""
    lam = complex(lam)
    if lam == 0:
        raise DomainError("lambda = 0 is a pole of f")
    e = -params.b * (lam + 1.0 / lam)
    return (e - params.eps1) * (e - params.eps2 + lam * params.lead_coupling) \
        - params.g ** 2


def f_lambda_prime(params, lam):
    """d f / d lambda, analytically."""
    lam = complex(lam)
    if lam == 0:
        raise DomainError("lambda = 0 is a pole of f")
    b = params.b
    de = -b * (1.0 - 1.0 / lam ** 2)
    u = -b * (lam + 1.0 / lam) - params.eps2 + lam * params.lead_coupling
    h = -b * (lam + 1.0 / lam) - params.eps1
    return de * u + h * (de + params.lead_coupling)


def p4_coefficients(params):
    """Ascending coefficients of P4(lambda) = lambda^2 f(lambda) / b^2."""
    b, e1, e2, g = params.b, params.eps1, params.eps2, params.g
    t = params.lead_coupling
    c4 = b * (b - t)
    c3 = b * e2 + e1 * (b - t)
    c2 = b * b + e1 * e2 + b * (b - t) - g * g
    c1 = b * (e1 + e2)
    c0 = b * b
    return [c / b ** 2 for c in (c0, c1, c2, c3, c4)]


def classify(lam, energy, tol=1e-9):
    """Sort one eigenvalue into bound / anti-bound / resonant / anti-resonant.

    Raises Unclassifiable when |lambda| = 1 within tol (band edge).
    """
    lam = complex(lam)
    energy = complex(energy)
    if abs(abs(lam) - 1.0) <= tol:
        raise Unclassifiable(f"|lambda| = 1 within {tol:g}: band-edge degeneracy")
    if abs(lam.imag) < tol:
        return StateClass.BOUND if abs(lam) < 1.0 else StateClass.ANTI_BOUND
    return StateClass.RESONANT if energy.imag < 0 else StateClass.ANTI_RESONANT


def discrete_spectrum(params, root_tol=1e-12):
    """Roots of the quartic plus residue weights, classified.

    Weights follow from residues of the resolvent matrix elements:
    W_n = 1/(h(lam_n) f'(lam_n)), w_n = b g^2 W_n / lam_n, and the d1-d2
    channel q_n = -g b/(lam_n f'(lam_n)).  Near-degenerate root pairs and
    the quartic-to-cubic degeneracy T = b are flagged, not fatal.
    """
    if params.g == 0:
        raise DomainError("g = 0 decouples d1; residue weights are undefined")
    coeffs = p4_coefficients(params)
    scale = max(abs(c) for c in coeffs)
    flags = []
    if abs(coeffs[4]) <= 1e-12 * scale:
        flags.append("degenerate-lead-coupling")
        warnings.warn("lead coupling makes the quartic a cubic; 3 states",
                      DegenerateLeadCoupling)
        coeffs = coeffs[:4]
    roots = poly_roots(Polynomial(coeffs), tol=root_tol)

    for i in range(len(roots)):
        for j in range(i + 1, len(roots)):
            # near a double root the achievable root accuracy is ~sqrt(eps),
            # so a detector much below 1e-6 could never fire
            if abs(roots[i] - roots[j]) < 1e-6 * max(1.0, abs(roots[i])):
                flags.append("near-degenerate")
                warnings.warn("two eigenvalues nearly coincide (EP vicinity)",
                              NearDegenerateSpectrum)
                break

    b, g = params.b, params.g
    states = []
    for lam in roots:
        energy = -b * (lam + 1.0 / lam)
        fp = f_lambda_prime(params, lam)
        w_big = 1.0 / (h_lambda(params, lam) * fp)
        w = b * g * g * w_big / lam
        dyad = (1.0 / lam - lam) * w
        q = -g * b / (lam * fp)
        states.append(DiscreteState(lam, energy, classify(lam, energy), w, dyad, q))
    states.sort(key=lambda s: (_CLASS_ORDER[s.state_class], s.energy.real, s.energy.imag))
    return Spectrum(tuple(states), params, tuple(dict.fromkeys(flags)))


# ---------------------------------------------------------------------------
# Bessel-integral engines shared by the component amplitudes


def _j1_over_t(b, tp):
    x = 2.0 * b * tp
    out = np.empty_like(tp)
    nz = tp != 0
    out[nz] = bessel_j1(x[nz]) / tp[nz]
    out[~nz] = b
    return out


def _bessel_integral_to_t(b, energy, t, tol):
    """I(t) = integral_0^t e^{i E t'} J1(2 b t')/t' dt' (t of either sign)."""
    if t == 0:
        return 0.0 + 0.0j
    lo, hi = (0.0, t) if t > 0 else (t, 0.0)
    period = np.pi / (2.0 * b + abs(energy.real) + abs(energy.imag))

    def integrand(tp):
        return np.exp(1j * energy * tp) * _j1_over_t(b, tp)

    pts = _period_breakpoints(lo, hi, period)
    res = piecewise_quad(integrand, pts, abs_tol=tol.abs_tol, rel_tol=tol.rel_tol)
    return res.value if t > 0 else -res.value


def _power_exp_tails(alpha, t_from):
    """G_s = integral_{t_from}^inf t^{-s} e^{i alpha t} dt for s = 3/2, 5/2,
    7/2 (Im alpha >= 0), via w^{s-1} Gamma(1-s, w t_from) with w = -i alpha
    and the downward recurrence from Gamma(-1/2, .)."""
    w = -1j * alpha
    z = w * t_from
    g_half = upper_gamma_mhalf(z)
    core = z ** -1.5 * np.exp(-z)
    g_3half = (2.0 / 3.0) * (core - g_half)
    g_5half = (2.0 / 5.0) * (core / z - g_3half)
    return (np.sqrt(w) * g_half, w ** 1.5 * g_3half, w ** 2.5 * g_5half)


def _bessel_tail_analytic(b, energy, t_from):
    """Closed form of integral_{t_from}^inf e^{-iEt'} J1(2bt')/t' dt' from
    the two-term Hankel expansion of J1; absolute error O((b t_from)^{-7/2}),
    so t_from must be well past the first few oscillations.
    """
    alpha1 = 2.0 * b - energy
    alpha2 = -(2.0 * b + energy)
    p2 = 15.0 / (512.0 * b * b)
    q1 = 3.0 / (16.0 * b)
    g1_32, g1_52, g1_72 = _power_exp_tails(alpha1, t_from)
    g2_32, g2_52, g2_72 = _power_exp_tails(alpha2, t_from)
    ph_m = np.exp(-0.25j * np.pi)
    ph_p = np.exp(0.25j * np.pi)
    sin_part = (ph_m * (g1_32 + p2 * g1_72) - ph_p * (g2_32 + p2 * g2_72)) / 2j
    cos_part = q1 * (ph_m * g1_52 + ph_p * g2_52) / 2.0
    return (sin_part + cos_part) / np.sqrt(np.pi * b)


def _bessel_tail(b, energy, t0, tol):
    """integral_{t0}^inf e^{-i E t'} J1(2 b t')/t' dt' for Im E < 0.

    Quadrature runs to whichever comes first: the point where the e^{Im E t'}
    envelope makes the remainder negligible, or a fixed horizon past which
    the analytic incomplete-gamma tail takes over (essential near the EP,
    where Im E is tiny and the envelope alone would force a huge range).
    """
    gamma = -energy.imag
    if gamma <= 0:
        raise DomainError("tail integral needs Im E < 0")
    t_exp = (np.log(1.0 / tol.abs_tol) + np.log1p(1.0 / gamma) + 8.0) / gamma
    horizon = max(400.0 / b, t0 * 0.2)
    t_cut = t0 + min(t_exp, horizon)
    use_analytic_tail = t_exp > horizon
    if use_analytic_tail:
        t_cut = max(t_cut, 150.0 / b)  # Hankel validity for the closed tail
    period = np.pi / (2.0 * b + abs(energy.real) + gamma)

    def integrand(tp):
        return np.exp(-1j * energy * tp) * _j1_over_t(b, tp)

    pts = _period_breakpoints(t0, t_cut, period)
    res = piecewise_quad(integrand, pts, abs_tol=tol.abs_tol, rel_tol=tol.rel_tol)
    value = res.value
    if use_analytic_tail:
        value += _bessel_tail_analytic(b, energy, t_cut)
    return value


def _period_breakpoints(lo, hi, period, extra=()):
    n = int(np.ceil((hi - lo) / period))
    pts = list(np.linspace(lo, hi, max(n, 1) + 1))
    for p in extra:
        if lo < p < hi:
            pts.append(p)
    return np.array(sorted(set(pts)))


def _component_amplitude(b, lam, energy, weight, state_class, t, tol):
    """<d1|chi(t)> for one discrete state with an arbitrary weight in place
    of w_n (theta superpositions reuse this with (w + e^{i theta} q)/sqrt2).

    Bound, anti-bound and positive-time resonant states share the closed
    form weight * e^{-iEt} [1/lam - i I(t)]; the negative-time resonant
    value comes from the decaying tail integral, and anti-resonant states
    are exact conjugate reflections of their resonant partner.
    """
    if state_class is StateClass.ANTI_RESONANT:
        partner = _component_amplitude(
            b, np.conj(lam), np.conj(energy), np.conj(weight),
            StateClass.RESONANT, -t, tol)
        return np.conj(partner)
    if state_class is StateClass.RESONANT and t < 0:
        tail = _bessel_tail(b, energy, -t, tol)
        return -1j * weight * np.exp(-1j * energy * t) * tail
    integral = _bessel_integral_to_t(b, energy, t, tol)
    return weight * np.exp(-1j * energy * t) * (1.0 / lam - 1j * integral)


def component_chi(spectrum, n, t, tol=DEFAULT_TOLERANCES):
    """<d1|chi_n(t)>, the n-th eigenstate's share of the survival amplitude."""
    state = spectrum.states[n]
    return _component_amplitude(spectrum.params.b, state.lam, state.energy,
                                state.weight_w, state.state_class, t, tol)


def theta_amplitude(spectrum, theta_state, n, t, tol=DEFAULT_TOLERANCES):
    """<d1|chi_n(t)> for the (|d1> + e^{i theta}|d2>)/sqrt(2) initial state.

    ``n`` is a state index or "total" for the sum over all states.
    """
    phase = np.exp(1j * theta_state.theta)
    b = spectrum.params.b

    def one(state):
        weight = (state.weight_w + phase * state.weight_q) / np.sqrt(2.0)
        return _component_amplitude(b, state.lam, state.energy, weight,
                                    state.state_class, t, tol)

    if n == "total":
        return sum(one(s) for s in spectrum.states)
    return one(spectrum.states[n])


def survival_direct(params, t, tol=DEFAULT_TOLERANCES, spectrum=None):
    """A(t) = <d1|e^{-iHt}|d1> from bound-pole residues plus the unit-circle
    integral of the partial-fraction contour integrand.
    """
    s = spectrum if spectrum is not None else discrete_spectrum(params)
    b, g = params.b, params.g
    bound_sum = sum(
        st.dyad_phi * np.exp(-1j * st.energy * t)
        for st in s.by_class(StateClass.BOUND)
    )
    lams = np.array([st.lam for st in s.states])
    w_big = np.array([st.weight_w * st.lam / (b * g * g) for st in s.states])

    def integrand(k):
        # scattering-state density on the band: at t = 0 this is the positive
        # weight sum_a |<d1|phi_ka>|^2 / 2pi, which pins the overall sign
        lam = np.exp(1j * k)
        frac = (w_big[None, :] / (lam[:, None] - lams[None, :])).sum(axis=1)
        return (b * g * g / np.pi) * 1j * np.sin(k) * np.exp(2j * b * t * np.cos(k)) * frac

    extra = []
    for st in s.states:
        if st.state_class in (StateClass.RESONANT, StateClass.ANTI_RESONANT):
            extra.append(float(np.angle(st.lam)))
    spacing = np.pi / max(8.0, 2.0 * b * abs(t))
    pts = _period_breakpoints(-np.pi, np.pi, spacing, extra=extra)
    circle = piecewise_quad(integrand, pts, abs_tol=tol.abs_tol, rel_tol=tol.rel_tol)
    return bound_sum + circle.value


def isolated_residue_amplitude(spectrum, t):
    """The bare resonant-pole projection <d1|phi_R> e^{-i E_R t} <phi~_R|d1>.

    This is the hand-isolated irreversible component; it grows without bound
    for t < 0, which is what the full component decomposition avoids.
    """
    res = spectrum.resonant()
    return res.dyad_phi * np.exp(-1j * res.energy * t)


def ratio_r(spectrum, t, tol=DEFAULT_TOLERANCES):
    """r(t) = |chi_R(t)/chi_R(-t)|^2, the symmetry-breaking measure."""
    idx = spectrum.states.index(spectrum.resonant())
    with np.errstate(all="ignore"):
        num = component_chi(spectrum, idx, t, tol)
        den = component_chi(spectrum, idx, -t, tol)
    if not (np.isfinite(num) and np.isfinite(den)) or abs(den) < 1e-300:
        raise Underflow("resonant/anti-resonant amplitudes exceed the "
                        "representable dynamic range at this time")
    return float(abs(num) ** 2 / abs(den) ** 2)


def zeno_time(spectrum):
    """Symmetry-breaking time t0 and the Zeno scale tZ = 1/|Re E_R|.

    t0 solves the vanishing of the short-time resonant probability; the
    closed form is nearly real when |Im E_R| << |Re E_R|, and the report
    carries the leftover imaginary fraction instead of hiding it.
    """
    res = spectrum.resonant()
    e_r, lam_r = res.energy, res.lam
    if abs(e_r.imag) >= abs(e_r.real):
        warnings.warn("|Im E_R| >= |Re E_R|: t0 formula outside its regime",
                      AssumptionViolated)
    t0_complex = -(2.0 * np.log(lam_r) - 1j * np.pi) / (-1j * e_r)
    t0 = abs(t0_complex.real)
    imag_fraction = abs(t0_complex.imag) / max(abs(t0_complex.real), 1e-300)
    tz = 1.0 / abs(e_r.real)
    return ZenoReport(float(t0), float(tz), float(imag_fraction))


def short_time_resonant_prob(spectrum, t):
    """P_R(t) in the small-|t| approximation J1(2bt) ~ bt."""
    res = spectrum.resonant()
    b = spectrum.params.b
    e_r, lam_r = res.energy, res.lam
    psi_prod = res.weight_w / lam_r
    bracket = 1.0 - (b * lam_r / e_r) * (np.exp(1j * e_r * t) - 1.0)
    return float(abs(psi_prod * np.exp(-1j * e_r * t) * bracket) ** 2)


def longtime_asymptotic(spectrum, t, sign=+1):
    """Closed-form resonant amplitude in the power-law regime, A_R(+t) or
    A_R(-t) for t > 0; |value|^2 decays as t^-3 with band-edge oscillations.
    """
    if t <= 0:
        raise DomainError("t must be positive; choose the side with `sign`")
    res = spectrum.resonant()
    b = spectrum.params.b
    if b * t <= 50:
        warnings.warn("asymptotic form used below b*t = 50", ValidityWarning)
    e_r = res.energy
    pref = 1j * res.weight_w / (2.0 * np.sqrt(np.pi)) * (b * t) ** -1.5
    phase_p = np.exp(2j * b * t)
    phase_m = np.exp(-2j * b * t)
    if sign > 0:
        return pref * (b * np.exp(-1j * np.pi / 4) / (2 * b + e_r) * phase_p
                       + b * np.exp(1j * np.pi / 4) / (2 * b - e_r) * phase_m)
    return -pref * (b * np.exp(-1j * np.pi / 4) / (2 * b - e_r) * phase_p
                    + b * np.exp(1j * np.pi / 4) / (2 * b + e_r) * phase_m)


def longtime_ratio(spectrum, t):
    """Closed-form r(t) in the power-law regime (squared modulus ratio)."""
    return float(abs(longtime_asymptotic(spectrum, t, +1)) ** 2
                 / abs(longtime_asymptotic(spectrum, t, -1)) ** 2)


def _quartic_discriminant(c0, c1, c2, c3, c4):
    a, b, c, d, e = c4, c3, c2, c1, c0
    return (256 * a**3 * e**3 - 192 * a**2 * b * d * e**2
            - 128 * a**2 * c**2 * e**2 + 144 * a**2 * c * d**2 * e
            - 27 * a**2 * d**4 + 144 * a * b**2 * c * e**2
            - 6 * a * b**2 * d**2 * e - 80 * a * b * c**2 * d * e
            + 18 * a * b * c * d**3 + 16 * a * c**4 * e
            - 4 * a * c**3 * d**2 - 27 * b**4 * e**2
            + 18 * b**3 * c * d * e - 4 * b**3 * d**3
            - 4 * b**2 * c**3 * e + b**2 * c**2 * d**2)


def ep_discriminant(params):
    """Discriminant of the quartic; changes sign at the exceptional point."""
    return _quartic_discriminant(*p4_coefficients(params))


def ep_locate(params, eps1_lo, eps1_hi, tol=1e-9):
    """Bisect eps1 to the exceptional point where the discriminant vanishes."""
    if not eps1_lo < eps1_hi:
        raise DomainError("bracket must satisfy eps1_lo < eps1_hi")

    def disc(e1):
        p = TDotParams(params.b, e1, params.eps2, params.g, params.t2l, params.t2r)
        return ep_discriminant(p)

    d_lo, d_hi = disc(eps1_lo), disc(eps1_hi)
    if d_lo == 0.0:
        return float(eps1_lo)
    if d_hi == 0.0:
        return float(eps1_hi)
    if np.sign(d_lo) == np.sign(d_hi):
        raise NoSignChange(
            f"discriminant sign is the same at both ends of [{eps1_lo}, {eps1_hi}]")
    lo, hi = float(eps1_lo), float(eps1_hi)
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        d_mid = disc(mid)
        if d_mid == 0.0:
            return mid
        if np.sign(d_mid) == np.sign(d_lo):
            lo, d_lo = mid, d_mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
