"""Magnetized plasma permittivity and the characteristic surface-wave frequencies.

A free-electron plasma in a static magnetic bias along +y is gyrotropic: the
relative permittivity is a tensor with equal transverse diagonal entries, a
distinct entry along the bias axis, and antisymmetric off-diagonal entries
proportional to the bias.  All frequencies here are expressed in units of the
plasma frequency and lengths in units of c/omega_p; ``omega_p`` in SI units is
carried along only so callers can convert results back to laboratory numbers.

Time convention is e^{-i omega t}, so passive loss means positive imaginary
permittivity.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

__all__ = [
    "PlasmaParams",
    "PermittivityValues",
    "CharacteristicFrequencies",
    "permittivity",
    "permittivity_tensor",
    "characteristic_frequencies",
    "insb_params",
]

#: Default collision rate in units of omega_p, used across the package.
DEFAULT_DAMPING = 0.015


@dataclass(frozen=True)
class PlasmaParams:
    """Drude plasma with a static bias field along +y.

    Parameters
    ----------
    omega_p : plasma frequency in rad/s, or 1.0 when working in normalized
        units.  Only SI conversions look at this value.
    omega_c : signed cyclotron frequency in units of omega_p.  The sign
        encodes the bias direction along +y; omega_c -> -omega_c mirrors the
        response about the x = 0 plane.
    gamma_damp : collision rate in units of omega_p (>= 0).
    """

    omega_p: float = 1.0
    omega_c: float = 0.0
    gamma_damp: float = DEFAULT_DAMPING

    def __post_init__(self):
        if not self.omega_p > 0:
            raise ValueError("omega_p must be positive")
        if self.gamma_damp < 0:
            raise ValueError("gamma_damp must be non-negative")

    def with_bias(self, omega_c: float) -> "PlasmaParams":
        return PlasmaParams(self.omega_p, omega_c, self.gamma_damp)

    def lossless(self) -> "PlasmaParams":
        return PlasmaParams(self.omega_p, self.omega_c, 0.0)


@dataclass(frozen=True)
class PermittivityValues:
    """Scalar components of the relative permittivity tensor.

    eps_t multiplies the identity transverse to the bias, eps_a sits on the
    bias (y) axis, and eps_g is the gyrotropic magnitude entering the tensor
    as +(i eps_g) at (x,z) and -(i eps_g) at (z,x).
    """

    eps_t: complex
    eps_a: complex
    eps_g: complex

    bias_axis = "y"


class CharacteristicFrequencies(NamedTuple):
    omega_spp: float
    omega_minus: float
    omega_plus: float


def permittivity(omega, params: PlasmaParams) -> PermittivityValues:
    """Permittivity components at ``omega`` (units of omega_p; may be complex).

    Raises ValueError at omega == 0 where the Drude terms are singular.
    """
    w = complex(omega)
    if w == 0:
        raise ValueError("permittivity is singular at zero frequency")
    wc = params.omega_c
    g = params.gamma_damp
    wg = w + 1j * g
    eps_t = 1 - (1 + 1j * g / w) / (wg * wg - wc * wc)
    eps_a = 1 - 1 / (w * wg)
    eps_g = (1 / w) * wc / (wc * wc - wg * wg)
    return PermittivityValues(eps_t, eps_a, eps_g)


def permittivity_tensor(omega, params: PlasmaParams) -> np.ndarray:
    """Relative permittivity tensor (3x3 complex) in the (x, y, z) basis.

    Layout for bias along +y:

        [[eps_t, 0,     +i eps_g],
         [0,     eps_a, 0       ],
         [-i eps_g, 0,  eps_t  ]]
    """
    v = permittivity(omega, params)
    return np.array(
        [
            [v.eps_t, 0.0, 1j * v.eps_g],
            [0.0, v.eps_a, 0.0],
            [-1j * v.eps_g, 0.0, v.eps_t],
        ]
    )


def characteristic_frequencies(params: PlasmaParams) -> CharacteristicFrequencies:
    """Surface-wave band markers (units of omega_p, lossless).

    omega_spp is the unbiased surface-plasmon frequency 1/sqrt(2).  The band
    edges are the extremal surface-resonance frequencies along the +x and -x
    directions; omega_minus <= omega_spp <= omega_plus, the band width equals
    |omega_c| exactly, and omega_minus * omega_plus = omega_spp^2.
    """
    wc = params.omega_c
    root = np.sqrt(2.0 + wc * wc)
    w_fwd = 0.5 * (wc + root)   # theta = 0
    w_bwd = 0.5 * (-wc + root)  # theta = pi
    return CharacteristicFrequencies(
        omega_spp=np.sqrt(0.5),
        omega_minus=min(w_fwd, w_bwd),
        omega_plus=max(w_fwd, w_bwd),
    )


def insb_params(bias_tesla: float, gamma_damp: float = DEFAULT_DAMPING) -> PlasmaParams:
    """PlasmaParams for n-type InSb at a given magnetic bias.

    Uses the quoted sample values omega_p ~= 31 THz with the cyclotron
    frequency scaling linearly from 8 THz at 1 T to 40 THz at 5 T, i.e.
    omega_c/omega_p = 8 B / 31 per tesla.  Intended for back-of-envelope SI
    conversions, not as a fit to any particular wafer.
    """
    omega_p_si = 31.0e12
    return PlasmaParams(
        omega_p=omega_p_si,
        omega_c=8.0e12 * bias_tesla / omega_p_si,
        gamma_damp=gamma_damp,
    )
