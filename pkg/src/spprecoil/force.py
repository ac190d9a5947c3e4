"""Lateral recoil force on a two-level emitter above the magnetized surface.

All routines report the force in units of the near-field normalization

    F0 = 3 |gamma|^2 / (16 pi eps0 d^4),

the natural scale of the quasi-static image interaction, so the dimensionless
components F_tilde_x, F_tilde_y are directly comparable across heights and
dipole magnitudes.  Four computation paths of increasing approximation are
provided:

* ``resonant_force``            -- full retarded spectral integral (exact),
* ``quasistatic_force_integral``-- electrostatic image response, angular
                                   integral over the directional image
                                   coefficient (small loss required),
* ``quasistatic_force_residue`` -- lossless pole-residue evaluation of the
                                   same integral (surface-mode emission
                                   picture),
* ``weak_bias_force``           -- closed form valid for small bias near the
                                   unbiased surface-resonance frequency.

Internal units: c = omega_p = eps0 = hbar = 1; heights in c/omega_p,
frequencies in omega_p.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .dynamics import PopulationTrace, population_trace
from .dispersion import (
    _omega_theta_dtheta,
    emission_angle,
    quasistatic_reflection,
)
from .greens import NumericalError, QuadratureSpec, green_suite
from .material import PlasmaParams, characteristic_frequencies

__all__ = [
    "DEBYE_SI",
    "EPSILON0_SI",
    "Emitter",
    "ForceResult",
    "ForceTrajectory",
    "FORCE_PATHS",
    "force_normalization",
    "force_trajectory",
    "quasistatic_force_integral",
    "quasistatic_force_residue",
    "resonant_force",
    "weak_bias_force",
]

#: 1 debye in C m.
DEBYE_SI = 3.33564e-30
#: vacuum permittivity in F/m.
EPSILON0_SI = 8.8541878128e-12

#: the computation paths a ForceResult can report.
FORCE_PATHS = ("exact", "quasistatic-integral", "quasistatic-residue", "weak-bias")

_OMEGA_SPP = float(np.sqrt(0.5))


@dataclass(frozen=True)
class Emitter:
    """Two-level emitter: dipole orientation, height and transition frequency.

    ``gamma_vec`` fixes the orientation only; it is normalized internally and
    every force is reported in units of F0, which carries the magnitude.  The
    physical dipole moment (debye) and height (nm) may be supplied separately
    purely for SI conversion of F0.

    Invariants: d > 0, omega0 > 0, gamma_vec != 0.
    """

    gamma_vec: tuple
    d: float
    omega0: float
    gamma_debye: float | None = None
    d_nm: float | None = None

    def __post_init__(self):
        vec = tuple(complex(c) for c in np.asarray(self.gamma_vec).ravel())
        if len(vec) != 3:
            raise ValueError("gamma_vec must have exactly three components")
        if not all(np.isfinite([c.real for c in vec] + [c.imag for c in vec])):
            raise ValueError("gamma_vec must be finite")
        if max(abs(c) for c in vec) == 0.0:
            raise ValueError("gamma_vec must be nonzero")
        object.__setattr__(self, "gamma_vec", vec)
        if not (self.d > 0.0):
            raise ValueError("emitter height d must be positive")
        if not (self.omega0 > 0.0):
            raise ValueError("transition frequency omega0 must be positive")
        if self.gamma_debye is not None and not (self.gamma_debye > 0.0):
            raise ValueError("gamma_debye must be positive when given")
        if self.d_nm is not None and not (self.d_nm > 0.0):
            raise ValueError("d_nm must be positive when given")

    @property
    def unit_dipole(self) -> np.ndarray:
        """Orientation as a complex unit 3-vector."""
        g = np.asarray(self.gamma_vec, dtype=complex)
        return g / np.linalg.norm(g)


@dataclass(frozen=True)
class ForceResult:
    """Lateral force components in units of F0, with provenance.

    ``F0_SI`` is the normalization in newtons when the emitter carried SI
    inputs (dipole in debye, height in nm); None otherwise.  ``err_estimate``
    is a dimensionless absolute-error estimate on the components, >= 0.
    """

    F_tilde_x: float
    F_tilde_y: float
    F0_SI: float | None
    err_estimate: float
    path: str

    def __post_init__(self):
        if self.path not in FORCE_PATHS:
            raise ValueError(f"unknown path {self.path!r}")
        if not (self.err_estimate >= 0.0):
            raise ValueError("err_estimate must be >= 0")


@dataclass(frozen=True)
class ForceTrajectory:
    """Time series of the lateral force during pumped decay.

    ``t_tilde`` is time in units of the inverse decay rate; ``F_tilde_x`` is
    the instantaneous force (units of F0); ``static`` is the fully-excited
    recoil force it is proportional to; ``trace`` the population history.
    """

    t_tilde: np.ndarray
    F_tilde_x: np.ndarray
    static: ForceResult
    trace: PopulationTrace


def _f0_si_newtons(emitter: Emitter) -> float | None:
    if emitter.gamma_debye is None or emitter.d_nm is None:
        return None
    return force_normalization(emitter.gamma_debye, emitter.d_nm) * 1e-12


def _mode_vector(theta):
    """Angular field factors of one evanescent image component.

    The electrostatic plane-wave components e^{i k.rho - k z} carry field
    direction (i cos(theta), i sin(theta), -1) per unit potential amplitude;
    contraction with the dipole gives both the emission weight and the
    scattered-field pickup.
    """
    return np.array([1j * np.cos(theta), 1j * np.sin(theta), -1.0])


def _polarization_weight(theta, unit_dipole) -> float:
    """|gamma_hat^* . v(theta)|^2 -- the dipole's angular emission weight.

    Equals 1 for a vertical dipole at every angle.
    """
    return float(abs(np.vdot(unit_dipole, _mode_vector(theta))) ** 2)


def resonant_force(emitter: Emitter, params: PlasmaParams,
                   quad: QuadratureSpec | None = None) -> ForceResult:
    """Exact lateral recoil force from the retarded scattered dyadic.

    Contracts the lateral gradients of the scattered Green dyadic at the
    emitter with the dipole orientation:

        F_alpha = 2 omega0^2 Re{gamma^* . d_alpha G_s . gamma},

    reported in units of F0, i.e. F_tilde_alpha = (32 pi / 3) omega0^2 d^4
    Re{gamma_hat^* . d_alpha G_s . gamma_hat}.  Positive F_tilde_x points
    along +x.  Requires a dissipative substrate (gamma_damp > 0) so the
    spectral integrand is regular on the real axis.
    """
    if not (params.gamma_damp > 0.0):
        raise ValueError("resonant_force requires gamma_damp > 0")
    res = green_suite(emitter.d, emitter.omega0, params, quad)
    g = emitter.unit_dipole
    pref = (32.0 * np.pi / 3.0) * emitter.omega0**2 * emitter.d**4
    fx = pref * float(np.real(np.vdot(g, res.dG_x @ g)))
    fy = pref * float(np.real(np.vdot(g, res.dG_y @ g)))
    scale = max(np.max(np.abs(res.dG_x)), np.max(np.abs(res.dG_y)))
    err = pref * res.err_rel * float(scale)
    return ForceResult(fx, fy, _f0_si_newtons(emitter), err, "exact")


def quasistatic_force_integral(emitter: Emitter,
                               params: PlasmaParams) -> ForceResult:
    """Quasi-static lateral force from the electrostatic image response.

    In the near-field limit the radial spectral integral factorizes and is
    done analytically (int k^3 e^{-2kd} dk = 3/(8 d^4), which cancels the d
    dependence of F0 exactly), leaving one adaptive angular integral over the
    directional image coefficient:

        F_tilde_alpha = -(1/2 pi) int u_alpha(theta) w(theta)
                         Im r(theta, omega0) dtheta,

    with u = (cos, sin) and w the dipole's angular weight.  Loss is required:
    the lossless image coefficient is real away from its poles.
    """
    if not (params.gamma_damp > 0.0):
        raise ValueError("quasistatic_force_integral requires gamma_damp > 0")
    g = emitter.unit_dipole
    w0 = emitter.omega0

    def _imag_r(theta: float) -> float:
        return float(np.imag(quasistatic_reflection(theta, w0, params)))

    theta0 = emission_angle(w0, params.lossless())
    points = None
    if theta0 is not None and 0.0 < theta0 < np.pi:
        points = [theta0, 2.0 * np.pi - theta0]

    def fx(theta: float) -> float:
        return np.cos(theta) * _polarization_weight(theta, g) * _imag_r(theta)

    def fy(theta: float) -> float:
        return np.sin(theta) * _polarization_weight(theta, g) * _imag_r(theta)

    try:
        ix, ex = integrate.quad(fx, 0.0, 2.0 * np.pi, points=points, limit=400)
        iy, ey = integrate.quad(fy, 0.0, 2.0 * np.pi, points=points, limit=400)
    except Exception as exc:  # pragma: no cover - defensive
        raise NumericalError(f"angular quadrature failed: {exc}") from exc
    inv = -1.0 / (2.0 * np.pi)
    return ForceResult(inv * ix, inv * iy, _f0_si_newtons(emitter),
                       (ex + ey) / (2.0 * np.pi), "quasistatic-integral")


def _image_pole_residue(theta0: float, omega_pole: float,
                        params: PlasmaParams, n: int = 64):
    """Residue of the directional image coefficient at its frequency pole.

    Trapezoid rule on a small circle around the pole; exact up to the
    (geometrically convergent) analytic remainder.  Returns (residue,
    error_estimate) where the error compares against the half-resolution
    rule.
    """
    radius = 1e-4 * omega_pole
    phi = 2.0 * np.pi * np.arange(n) / n
    ring = np.exp(1j * phi)
    vals = np.array([
        quasistatic_reflection(theta0, omega_pole + radius * z, params)
        for z in ring
    ])
    full = radius * np.mean(vals * ring)
    half = radius * np.mean(vals[::2] * ring[::2])
    return full, abs(full - half)


def quasistatic_force_residue(emitter: Emitter,
                              params: PlasmaParams) -> ForceResult:
    """Lossless quasi-static force via the surface-mode pole residue.

    In the lossless limit the angular integral of
    ``quasistatic_force_integral`` collapses onto the two directions +-theta0
    whose surface resonance matches omega0.  Writing W = -Res_omega r at the
    pole and s = |d omega_theta / d theta| at theta0,

        F_tilde_x = -cos(theta0) W (w(+theta0) + w(-theta0)) / (2 s),
        F_tilde_y = -sin(theta0) W (w(+theta0) - w(-theta0)) / (2 s),

    so the force opposes the in-plane wavevector of the resonant directions
    and a vertical dipole (w = 1) gets F_tilde_y = 0 exactly.  Valid for
    omega0 strictly inside the surface-mode band; refuses the band edges,
    where s -> 0 and the force diverges (regularized only by loss, which
    lives on the other paths).
    """
    p0 = params.lossless()
    freqs = characteristic_frequencies(p0)
    w0 = emitter.omega0
    if not (freqs.omega_minus < w0 < freqs.omega_plus) or p0.omega_c == 0.0:
        raise ValueError(
            "quasistatic_force_residue needs omega0 strictly inside the "
            f"surface-mode band ({freqs.omega_minus:.6g}, "
            f"{freqs.omega_plus:.6g}) at nonzero bias"
        )
    theta0 = emission_angle(w0, p0)
    if theta0 is None:  # pragma: no cover - band check above is equivalent
        raise ValueError("no resonant direction inside the band")
    slope = abs(_omega_theta_dtheta(theta0, p0))
    if slope < 1e-6:
        raise ValueError(
            "resonant direction has vanishing angular dispersion "
            f"(|d omega/d theta| = {slope:.2e}); the quasi-static force "
            "diverges at the band edges"
        )
    residue, res_err = _image_pole_residue(theta0, w0, p0)
    strength = -residue
    g = emitter.unit_dipole
    w_plus = _polarization_weight(theta0, g)
    w_minus = _polarization_weight(-theta0, g)
    fx = -np.cos(theta0) * strength.real * (w_plus + w_minus) / (2.0 * slope)
    fy = -np.sin(theta0) * strength.real * (w_plus - w_minus) / (2.0 * slope)
    err = (res_err + abs(strength.imag)) * (w_plus + w_minus) / (2.0 * slope)
    return ForceResult(float(fx), float(fy), _f0_si_newtons(emitter),
                       float(err), "quasistatic-residue")


def weak_bias_force(omega0: float, omega_c: float,
                    rho_ee: float = 1.0) -> float:
    """Closed-form F_tilde_x for weak bias near the unbiased resonance.

    For |omega0 - omega_spp| < |omega_c|/2 the surface-mode band is narrow
    and the residue evaluation collapses to

        F_tilde_x = -rho_ee (omega_spp / omega_c) (omega0 - omega_spp)
                    / sqrt((omega_c/2)^2 - (omega0 - omega_spp)^2).

    Odd in the detuning from omega_spp and divergent at the band edges;
    raises outside the open interval.
    """
    if omega_c == 0.0:
        raise ValueError("weak_bias_force requires a nonzero bias")
    detuning = omega0 - _OMEGA_SPP
    half_band = abs(omega_c) / 2.0
    if abs(detuning) >= half_band:
        raise ValueError(
            f"omega0 - omega_spp = {detuning:.6g} outside the open band "
            f"(-{half_band:.6g}, {half_band:.6g}); the closed form diverges "
            "at the edges"
        )
    return (-rho_ee * (_OMEGA_SPP / omega_c) * detuning
            / np.sqrt(half_band**2 - detuning**2))


def force_trajectory(emitter: Emitter, params: PlasmaParams,
                     quad: QuadratureSpec | None,
                     pump_Omega_tilde: float,
                     time_grid) -> ForceTrajectory:
    """Instantaneous lateral force during driven decay.

    The recoil force follows the excited-state population:
    F_tilde_x(t) = rho_ee(t) * F_tilde_Rx, with the fully-excited force
    computed once on the exact path and the population from the pumped
    two-level closed form.  ``time_grid`` is in units of the inverse decay
    rate; the ground-state (quantum-vacuum) force contribution has no lateral
    component and is dropped.
    """
    static = resonant_force(emitter, params, quad)
    trace = population_trace(time_grid, pump_Omega_tilde)
    return ForceTrajectory(
        t_tilde=trace.t_tilde,
        F_tilde_x=trace.rho_ee * static.F_tilde_x,
        static=static,
        trace=trace,
    )


def force_normalization(gamma_debye: float, d_nm: float) -> float:
    """Normalization force F0 = 3 |gamma|^2 / (16 pi eps0 d^4) in piconewtons.

    ``gamma_debye`` is the dipole matrix element in debye, ``d_nm`` the
    height in nanometres.  Quadratic in the dipole and quartic in the height:
    1 D at 1 nm gives 0.075 pN.
    """
    if not (gamma_debye > 0.0):
        raise ValueError("gamma_debye must be positive")
    if not (d_nm > 0.0):
        raise ValueError("d_nm must be positive")
    gamma_si = gamma_debye * DEBYE_SI
    d_si = d_nm * 1e-9
    f0_newton = 3.0 * gamma_si**2 / (16.0 * np.pi * EPSILON0_SI * d_si**4)
    return f0_newton * 1e12
