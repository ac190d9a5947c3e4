"""Lateral recoil forces on emitters above a magnetized-plasma surface.

A drift-free magnetized plasma half-space breaks time-reversal symmetry and
its surface modes become one-way within a bias-controlled frequency band.  A
two-level emitter relaxing above such a surface launches those modes
asymmetrically and feels the corresponding lateral recoil.  This package
computes that force exactly (retarded spectral integral), in quasi-static
approximations (angular image integral, surface-mode pole residue) and in a
weak-bias closed form, together with the supporting electromagnetics: the
material tensor, surface-mode dispersion and equifrequency contours, the
scattered Green dyadic, decay rates, and pumped population dynamics.

Internal unit system: c = omega_p = eps0 = hbar = 1 (frequencies in units of
the plasma frequency, lengths in c/omega_p); forces are reported in units of
the near-field scale F0 = 3|gamma|^2/(16 pi eps0 d^4).
"""

from .material import (
    DEFAULT_DAMPING,
    CharacteristicFrequencies,
    PermittivityValues,
    PlasmaParams,
    characteristic_frequencies,
    insb_params,
    permittivity,
    permittivity_tensor,
)
from .dispersion import (
    EfcContour,
    EfcSample,
    FarFieldPattern,
    emission_angle,
    farfield_pattern,
    omega_theta,
    quasistatic_reflection,
    spp_wavenumber_exact,
    trace_efc,
)
from .greens import (
    GreenResult,
    NumericalError,
    QuadratureSpec,
    ReflectionMatrix,
    boundary_determinant,
    green_suite,
    gyrotropic_kz_modes,
    lateral_green_derivative,
    reflection_matrix,
    scattered_green,
    scattered_green_pair,
    vacuum_green,
    vacuum_green_imag_coincident,
)
from .force import (
    Emitter,
    ForceResult,
    ForceTrajectory,
    FORCE_PATHS,
    force_normalization,
    force_trajectory,
    quasistatic_force_integral,
    quasistatic_force_residue,
    resonant_force,
    weak_bias_force,
)
from .dynamics import (
    CouplingRates,
    DecayRate,
    PopulationTrace,
    PumpConfig,
    coupling_rates,
    decay_rate,
    laser_gradient_force,
    population,
    population_trace,
    rabi_eigenvalues,
    steady_state_population,
)

__version__ = "0.1.0"

__all__ = [
    "CharacteristicFrequencies",
    "CouplingRates",
    "DecayRate",
    "DEFAULT_DAMPING",
    "EfcContour",
    "EfcSample",
    "Emitter",
    "FarFieldPattern",
    "FORCE_PATHS",
    "ForceResult",
    "ForceTrajectory",
    "GreenResult",
    "NumericalError",
    "PermittivityValues",
    "PlasmaParams",
    "PopulationTrace",
    "PumpConfig",
    "QuadratureSpec",
    "ReflectionMatrix",
    "boundary_determinant",
    "characteristic_frequencies",
    "coupling_rates",
    "decay_rate",
    "emission_angle",
    "farfield_pattern",
    "force_normalization",
    "force_trajectory",
    "green_suite",
    "gyrotropic_kz_modes",
    "insb_params",
    "laser_gradient_force",
    "lateral_green_derivative",
    "omega_theta",
    "permittivity",
    "permittivity_tensor",
    "population",
    "population_trace",
    "quasistatic_force_integral",
    "quasistatic_force_residue",
    "quasistatic_reflection",
    "rabi_eigenvalues",
    "reflection_matrix",
    "resonant_force",
    "scattered_green",
    "scattered_green_pair",
    "spp_wavenumber_exact",
    "steady_state_population",
    "trace_efc",
    "vacuum_green",
    "vacuum_green_imag_coincident",
    "weak_bias_force",
    "__version__",
]
