"""Emitter relaxation: decay rates, pumped population, pair coupling rates.

The two-level emitter decays at rate Gamma set by the imaginary part of the
total (vacuum + scattered) Green dyadic at its own position.  Under resonant
driving with Rabi frequency Omega the excited-state population follows the
optical Bloch equations at zero detuning; with time measured in units of
1/Gamma and the pump strength as Omega_tilde = Omega / (2 Gamma) the closed
form involves only the two relaxation eigenvalues

    lambda_{1,2} = (1/2) (-3/2 +- sqrt(1/4 - 16 Omega_tilde^2))

and the steady state rho_ss = 4 Omega_tilde^2 / (1 + 8 Omega_tilde^2).

Internal units: c = omega_p = eps0 = hbar = 1 and unit dipole magnitude, so
the free-space decay rate is Gamma_0 = omega0^3 / (3 pi).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .greens import (
    NumericalError,
    QuadratureSpec,
    green_suite,
    scattered_green_pair,
    vacuum_green,
    vacuum_green_imag_coincident,
)
from .material import PlasmaParams

__all__ = [
    "CouplingRates",
    "DecayRate",
    "PopulationTrace",
    "PumpConfig",
    "coupling_rates",
    "decay_rate",
    "laser_gradient_force",
    "population",
    "population_trace",
    "rabi_eigenvalues",
    "steady_state_population",
]

#: 1 debye in C m.
_DEBYE_SI = 3.33564e-30

#: relative eigenvalue separation below which the confluent (equal-rate)
#: closed form is used; the switch is continuous to ~1e-12 at this width.
DEGENERATE_RATE_TOL = 1e-6


@dataclass(frozen=True)
class PumpConfig:
    """Resonant drive strength in decay-rate units.

    ``Omega_tilde`` is the Rabi frequency over twice the decay rate; the
    drive is taken exactly on resonance (the detuning field exists to make
    that choice explicit and must stay zero).
    """

    Omega_tilde: float
    detuning: float = 0.0

    def __post_init__(self):
        if not (self.Omega_tilde >= 0.0):
            raise ValueError("Omega_tilde must be >= 0")
        if self.detuning != 0.0:
            raise ValueError("only zero detuning is supported")


def _as_pump(pump) -> PumpConfig:
    if isinstance(pump, PumpConfig):
        return pump
    return PumpConfig(float(pump))


@dataclass(frozen=True)
class PopulationTrace:
    """Excited-state population history with its relaxation constants.

    Invariants: 0 <= rho_ee <= 1 everywhere, both eigenvalues have negative
    real part, and 0 <= rho_ss < 1/2.
    """

    t_tilde: np.ndarray
    rho_ee: np.ndarray
    lambda1: complex
    lambda2: complex
    rho_ss: float

    def __post_init__(self):
        t = np.asarray(self.t_tilde, dtype=float)
        r = np.asarray(self.rho_ee, dtype=float)
        if t.shape != r.shape:
            raise ValueError("t_tilde and rho_ee must have matching shapes")
        if r.size and (r.min() < 0.0 or r.max() > 1.0):
            raise ValueError("population out of [0, 1]")
        if self.lambda1.real >= 0.0 or self.lambda2.real >= 0.0:
            raise ValueError("relaxation eigenvalues must have Re < 0")
        if not (0.0 <= self.rho_ss < 0.5):
            raise ValueError("steady state must lie in [0, 1/2)")
        object.__setattr__(self, "t_tilde", t)
        object.__setattr__(self, "rho_ee", r)


class CouplingRates(NamedTuple):
    """Dissipative and coherent pair rates (Gamma_ij, g_ij)."""

    gamma_ij: float
    g_ij: float


@dataclass(frozen=True)
class DecayRate:
    """Total decay rate, its free-space value, and the Purcell factor."""

    gamma_total: float
    gamma_free: float
    purcell: float
    err_estimate: float


def rabi_eigenvalues(pump) -> tuple[complex, complex]:
    """Relaxation eigenvalues of the driven two-level system.

    In units of the decay rate: lambda_{1,2} = (1/2)(-3/2 +- sqrt(1/4 -
    16 Omega_tilde^2)).  Real for Omega_tilde <= 1/8; a conjugate pair with
    real part -3/4 above (damped Rabi oscillation).
    """
    cfg = _as_pump(pump)
    disc = 0.25 - 16.0 * cfg.Omega_tilde**2
    root = np.sqrt(complex(disc))
    return (complex(0.5 * (-1.5 + root)), complex(0.5 * (-1.5 - root)))


def steady_state_population(pump) -> float:
    """Long-time excited-state population 4 Omega_tilde^2/(1+8 Omega_tilde^2).

    Saturates at 1/2 for strong pumping.
    """
    cfg = _as_pump(pump)
    x = cfg.Omega_tilde**2
    return 4.0 * x / (1.0 + 8.0 * x)


def population(t_tilde, pump):
    """Excited-state population rho_ee(t) under resonant pumping.

    Closed-form solution of the zero-detuning Bloch equations for an emitter
    that starts fully excited with no coherence: rho_ee(0) = 1 and
    d rho_ee/d t_tilde(0) = -1.  ``t_tilde`` is time in units of the inverse
    decay rate (scalar or array).  Near the critical pump Omega_tilde = 1/8
    the two eigenvalues collide; below a relative separation of
    ``DEGENERATE_RATE_TOL`` the confluent limit with a secular (linear-in-t)
    term replaces the two-exponential form, keeping the result finite and
    continuous.  The output is real and clipped to [0, 1] only against
    sub-1e-9 floating-point excursions.
    """
    cfg = _as_pump(pump)
    t = np.asarray(t_tilde, dtype=float)
    lam1, lam2 = rabi_eigenvalues(cfg)
    rho_ss = steady_state_population(cfg)
    amp = 1.0 - rho_ss
    # rho' (0) = -1: decay only, since the initial state carries no coherence
    split = abs(lam1 - lam2)
    if split < DEGENERATE_RATE_TOL * max(abs(lam1), abs(lam2)):
        lam = 0.5 * (lam1 + lam2)
        secular = -1.0 - lam * amp
        out = rho_ss + np.exp(lam * t) * (amp + secular * t)
    else:
        c1 = (-1.0 - lam2 * amp) / (lam1 - lam2)
        c2 = amp - c1
        out = rho_ss + c1 * np.exp(lam1 * t) + c2 * np.exp(lam2 * t)
    out = np.real(out)
    excess = max(float(np.max(out, initial=0.0)) - 1.0,
                 -float(np.min(out, initial=0.0)), 0.0)
    if excess > 1e-9:
        raise NumericalError(
            f"population left [0, 1] by {excess:.2e}; closed form unstable"
        )
    out = np.clip(out, 0.0, 1.0)
    return out if out.ndim else float(out)


def population_trace(t_tilde, pump) -> PopulationTrace:
    """Population history over a time grid, bundled with its constants."""
    cfg = _as_pump(pump)
    t = np.atleast_1d(np.asarray(t_tilde, dtype=float))
    if t.size == 0:
        raise ValueError("time grid must be nonempty")
    if np.any(t < 0.0):
        raise ValueError("time grid must be nonnegative")
    lam1, lam2 = rabi_eigenvalues(cfg)
    return PopulationTrace(
        t_tilde=t,
        rho_ee=np.atleast_1d(population(t, cfg)),
        lambda1=lam1,
        lambda2=lam2,
        rho_ss=steady_state_population(cfg),
    )


def decay_rate(emitter, params: PlasmaParams | None = None,
               quad: QuadratureSpec | None = None) -> DecayRate:
    """Total spontaneous decay rate and Purcell factor at the emitter.

    Gamma = 2 omega0^2 Im{gamma_hat^* . (G_vac + G_s) . gamma_hat} in units
    where the free-space rate is Gamma_0 = omega0^3/(3 pi) (unit dipole
    magnitude).  With ``params`` None the emitter sits in free space and the
    analytic vacuum rate is returned exactly.
    """
    g = emitter.unit_dipole
    w0 = emitter.omega0
    pref = 2.0 * w0**2
    gamma_free = pref * float(np.real(np.vdot(
        g, vacuum_green_imag_coincident(w0) @ g)))
    if params is None:
        return DecayRate(gamma_free, gamma_free, 1.0, 0.0)
    res = green_suite(emitter.d, w0, params, quad)
    gamma_scat = pref * float(np.imag(np.vdot(g, res.G @ g)))
    total = gamma_free + gamma_scat
    err = pref * res.err_rel * float(np.max(np.abs(res.G)))
    if total < -err:
        raise NumericalError(
            f"negative decay rate {total:.3e} exceeds error budget {err:.1e}"
        )
    total = max(total, 0.0)
    return DecayRate(total, gamma_free, total / gamma_free, err)


def _as_point(pos) -> np.ndarray:
    arr = np.asarray(pos, dtype=float)
    if arr.ndim == 0:
        return np.array([0.0, 0.0, float(arr)])
    if arr.shape != (3,):
        raise ValueError("position must be a height or a 3-vector")
    return arr


def coupling_rates(pos_i, pos_j, gamma_i, gamma_j, omega0: float,
                   params: PlasmaParams,
                   quad: QuadratureSpec | None = None) -> CouplingRates:
    """Dissipative and coherent coupling rates between two emitters.

    From the total dyadic G = G_vac + G_s between the two positions (each a
    height above the surface or a full 3-vector),

        2 omega0^2 gamma_i_hat^* . G . gamma_j_hat = 2 g_ij + i Gamma_ij,

    so Gamma_ij generalizes the decay rate (Gamma_ii equals
    ``decay_rate``) and g_ij is the coherent (dipole-dipole) shift.  At
    coincident positions the real part of the vacuum dyadic diverges -- it
    renormalizes the bare transition frequency -- so g_ii is reported from
    the scattered part alone.  Above a nonreciprocal substrate Gamma_ij and
    Gamma_ji generally differ; no symmetry is assumed or enforced.
    """
    ri, rj = _as_point(pos_i), _as_point(pos_j)
    gi = np.asarray(gamma_i, dtype=complex)
    gj = np.asarray(gamma_j, dtype=complex)
    if gi.shape != (3,) or gj.shape != (3,):
        raise ValueError("dipole vectors must have three components")
    if np.linalg.norm(gi) == 0.0 or np.linalg.norm(gj) == 0.0:
        raise ValueError("dipole vectors must be nonzero")
    gi = gi / np.linalg.norm(gi)
    gj = gj / np.linalg.norm(gj)
    separation = np.linalg.norm(ri - rj)
    if separation < 1e-12 * max(1.0, float(np.max(np.abs(ri)))):
        scattered = green_suite(ri, omega0, params, quad).G
        total = scattered + 1j * vacuum_green_imag_coincident(omega0)
    else:
        total = (vacuum_green(ri, rj, omega0)
                 + scattered_green_pair(ri, rj, omega0, params, quad))
    contraction = 2.0 * omega0**2 * complex(np.vdot(gi, total @ gj))
    return CouplingRates(gamma_ij=contraction.imag, g_ij=contraction.real / 2.0)


def laser_gradient_force(gamma_z_debye: float, E0_V_per_m: float,
                         k0_per_m: float) -> float:
    """Scale of the laser gradient force on the driven emitter, in newtons.

    The trapping/driving beam exerts a force of order |gamma_z k0 E0| on the
    dipole; this converts the debye-valued vertical dipole component to SI
    and returns gamma_z * E0 * k0.  Linear in each factor, zero at zero
    field.
    """
    if not (gamma_z_debye >= 0.0):
        raise ValueError("gamma_z_debye must be >= 0")
    if not (E0_V_per_m >= 0.0):
        raise ValueError("E0_V_per_m must be >= 0")
    if not (k0_per_m >= 0.0):
        raise ValueError("k0_per_m must be >= 0")
    return gamma_z_debye * _DEBYE_SI * E0_V_per_m * k0_per_m
