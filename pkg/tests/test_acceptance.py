"""Acceptance gate: one test per shipped guarantee, at the stated tolerance.

Each criterion below runs as its own pytest item so `pytest -v` emits one
pass/fail line per guarantee (parametrized sub-cases pinpoint which input
breaks when one does).  Tolerances are asserted exactly as stated; no test
here is loosened to accommodate the implementation.  Known-failing sub-cases
are documented in the project notes, not skipped.
"""

from __future__ import annotations

import numpy as np
import pytest
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from spprecoil import (
    Emitter,
    NumericalError,
    PlasmaParams,
    QuadratureSpec,
    characteristic_frequencies,
    decay_rate,
    farfield_pattern,
    force_normalization,
    omega_theta,
    population,
    quasistatic_force_integral,
    quasistatic_force_residue,
    quasistatic_reflection,
    reflection_matrix,
    resonant_force,
    steady_state_population,
    trace_efc,
    weak_bias_force,
)

from conftest import SCAN_HEIGHT, SCAN_OMEGA0, SCAN_PARAMS, in_band

W_SPP = np.sqrt(0.5)


def _z_emitter(omega0: float, d: float = SCAN_HEIGHT) -> Emitter:
    return Emitter((0, 0, 1), d=d, omega0=omega0)


# --------------------------------------------------------------------------
# 1. SI normalization of the recoil force scale
# --------------------------------------------------------------------------

@pytest.mark.parametrize("gamma_debye,d_nm,expected_pN", [
    (7900.0, 100.0, 0.047),
    (1.0, 1.0, 0.075),
])
def test_c01_force_scale_si(gamma_debye, d_nm, expected_pN):
    got = force_normalization(gamma_debye, d_nm)
    print(f"F0({gamma_debye} D, {d_nm} nm) = {got:.6f} pN")
    assert got == pytest.approx(expected_pN, rel=0.02)


# --------------------------------------------------------------------------
# 2. Characteristic frequencies of the surface-wave band
# --------------------------------------------------------------------------

def test_c02_characteristic_frequencies():
    unbiased = characteristic_frequencies(PlasmaParams())
    assert round(unbiased.omega_spp, 5) == 0.70711
    biased = characteristic_frequencies(PlasmaParams(omega_c=0.4))
    print(f"omega_- = {biased.omega_minus:.6f}, omega_+ = {biased.omega_plus:.6f}")
    assert biased.omega_plus == pytest.approx(0.93485, abs=1e-5)
    assert biased.omega_minus == pytest.approx(0.53485, abs=1e-5)


# --------------------------------------------------------------------------
# 3. Exact path vs quasi-static spectral integral, in band
# --------------------------------------------------------------------------

@pytest.mark.parametrize("omega0", [0.60, 0.70, 0.80, 0.90])
def test_c03_exact_vs_quasistatic_integral(omega0, exact_scan):
    exact = exact_scan[omega0].F_tilde_x
    qs = quasistatic_force_integral(_z_emitter(omega0), SCAN_PARAMS).F_tilde_x
    rel = abs(exact - qs) / abs(exact)
    print(f"omega0={omega0}: exact={exact:+.6f}, quasistatic={qs:+.6f}, "
          f"rel diff = {rel:.4%}")
    assert rel < 0.05


# --------------------------------------------------------------------------
# 4. Sign structure of the frequency scan
# --------------------------------------------------------------------------

def test_c04_sign_structure_of_scan(exact_scan):
    bands = characteristic_frequencies(SCAN_PARAMS)
    omegas = np.array(SCAN_OMEGA0)
    fx = np.array([exact_scan[w].F_tilde_x for w in SCAN_OMEGA0])
    for w, f in zip(omegas, fx):
        print(f"  omega0={w:<6} F_x = {f:+.6f}")

    signs = np.sign(fx)
    assert np.all(signs != 0), "scan produced an exact zero"
    flips = int(np.sum(signs[:-1] != signs[1:]))
    assert flips == 1, f"expected one interior sign change, found {flips}"

    near_minus = omegas[np.argmin(np.abs(omegas - bands.omega_minus))]
    near_plus = omegas[np.argmin(np.abs(omegas - bands.omega_plus))]
    assert exact_scan[near_minus].F_tilde_x > 0
    assert exact_scan[near_plus].F_tilde_x < 0

    window = 2.0 * SCAN_PARAMS.gamma_damp
    peak_pos = omegas[np.argmax(np.where(fx > 0, fx, -np.inf))]
    peak_neg = omegas[np.argmax(np.where(fx < 0, -fx, -np.inf))]
    print(f"positive peak at {peak_pos}, negative peak at {peak_neg}")
    assert abs(peak_pos - bands.omega_minus) <= window
    assert abs(peak_neg - bands.omega_plus) <= window


# --------------------------------------------------------------------------
# 5. Antisymmetry under bias reversal
# --------------------------------------------------------------------------

def test_c05_bias_antisymmetry(quad_fast, exact_scan):
    sample = [(w0, d) for w0 in (0.56, 0.60, 0.70, 0.80, 0.90)
              for d in (SCAN_HEIGHT, 0.015)]
    assert len(sample) == 10
    flipped = SCAN_PARAMS.with_bias(-SCAN_PARAMS.omega_c)
    plus, minus = [], []
    for w0, d in sample:
        if d == SCAN_HEIGHT:
            plus.append(exact_scan[w0].F_tilde_x)
        else:
            plus.append(resonant_force(_z_emitter(w0, d), SCAN_PARAMS,
                                       quad_fast).F_tilde_x)
        minus.append(resonant_force(_z_emitter(w0, d), flipped,
                                    quad_fast).F_tilde_x)
    plus, minus = np.array(plus), np.array(minus)
    residual = np.max(np.abs(plus + minus)) / np.max(np.abs(plus))
    print(f"max |F(+bias) + F(-bias)| / max|F| = {residual:.2e}")
    assert residual < 1e-3


# --------------------------------------------------------------------------
# 6. Recoil direction independent of dipole orientation
# --------------------------------------------------------------------------

def test_c06_orientation_independent_sign(quad_fast, exact_scan):
    omega0 = 0.80
    signs = {"z": np.sign(exact_scan[omega0].F_tilde_x)}
    for name, vec in (("x", (1, 0, 0)), ("x+iz", (1 / np.sqrt(2), 0, 1j / np.sqrt(2)))):
        res = resonant_force(Emitter(vec, d=SCAN_HEIGHT, omega0=omega0),
                             SCAN_PARAMS, quad_fast)
        signs[name] = np.sign(res.F_tilde_x)
    print(f"signs at omega0=0.8: {signs}")
    assert len(set(signs.values())) == 1


# --------------------------------------------------------------------------
# 7. No transverse force for a vertical dipole
# --------------------------------------------------------------------------

def test_c07_vertical_dipole_no_transverse_force(exact_scan):
    checked = 0
    for w0 in SCAN_OMEGA0:
        if not in_band(w0):
            continue
        res = exact_scan[w0]
        print(f"omega0={w0}: |F_y|/|F_x| = {abs(res.F_tilde_y) / abs(res.F_tilde_x):.2e}")
        assert abs(res.F_tilde_y) < 1e-3 * abs(res.F_tilde_x)
        checked += 1
    assert checked >= 8


# --------------------------------------------------------------------------
# 8. Distance scaling: normalized force is height-independent
# --------------------------------------------------------------------------

def test_c08_distance_scaling(quad_fast, exact_scan):
    # F0 already carries the d^-4 law, so F_x * d^4 constant (in units of
    # the d-independent prefactor) is exactly F_tilde_x constant.
    omega0 = 0.70
    values = []
    for d in (0.005, 0.01, 0.02):
        if d == SCAN_HEIGHT:
            values.append(exact_scan[omega0].F_tilde_x)
        else:
            values.append(resonant_force(_z_emitter(omega0, d), SCAN_PARAMS,
                                         quad_fast).F_tilde_x)
    values = np.array(values)
    spread = (values.max() - values.min()) / np.max(np.abs(values))
    print(f"F_x over d in {{0.005, 0.01, 0.02}}: {values}, spread = {spread:.2%}")
    assert spread < 0.10


# --------------------------------------------------------------------------
# 9. Weak-bias closed form vs residue evaluation near the band centre
# --------------------------------------------------------------------------

@pytest.mark.parametrize("offset_frac", [0.125, -0.125, 0.25, -0.25, 0.45, -0.45])
def test_c09_weak_bias_law(offset_frac):
    omega_c = 0.01
    omega0 = W_SPP + offset_frac * omega_c
    params = PlasmaParams(omega_c=omega_c, gamma_damp=0.0)
    residue = quasistatic_force_residue(_z_emitter(omega0), params).F_tilde_x
    closed = weak_bias_force(omega0, omega_c)
    rel = abs(residue - closed) / abs(closed)
    print(f"offset {offset_frac:+.3f} w_c: residue={residue:+.4f}, "
          f"closed={closed:+.4f}, rel diff = {rel:.4%}")
    assert rel < 0.02


def test_c09_weak_bias_divergence_at_band_edge():
    omega_c = 0.01
    omega0 = W_SPP + 0.49999 * omega_c
    value = abs(weak_bias_force(omega0, omega_c))
    print(f"|F_x| at offset 0.49999 w_c = {value:.1f}")
    assert value > 1e3


# --------------------------------------------------------------------------
# 10. Driven population dynamics vs an independent ODE oracle
# --------------------------------------------------------------------------

def _bloch_population_oracle(t_grid, omega_tilde):
    """Two-level optical Bloch system integrated numerically."""
    om = 2.0 * omega_tilde  # Rabi frequency over the decay rate

    def rhs(_, y):
        rho, s = y
        return [0.5 * om * s - rho, -om * (2.0 * rho - 1.0) - 0.5 * s]

    sol = solve_ivp(rhs, (0.0, float(t_grid[-1])), [1.0, 0.0],
                    t_eval=t_grid, rtol=1e-11, atol=1e-13, method="DOP853")
    return sol.y[0]


@pytest.mark.parametrize("omega_tilde", [0.0, 0.3, 1.0])
def test_c10_population_vs_ode_oracle(omega_tilde):
    t = np.linspace(0.0, 20.0, 401)
    closed = population(t, omega_tilde)
    oracle = _bloch_population_oracle(t, omega_tilde)
    err = np.max(np.abs(closed - oracle))
    print(f"Omega_tilde={omega_tilde}: max |closed - ODE| = {err:.2e}")
    assert err < 1e-6
    assert abs(population(0.0, omega_tilde) - 1.0) < 1e-12
    target = 4 * omega_tilde**2 / (1 + 8 * omega_tilde**2)
    assert steady_state_population(omega_tilde) == pytest.approx(target, abs=1e-12)
    assert abs(population(50.0, omega_tilde) - target) < 1e-8


# --------------------------------------------------------------------------
# 11. Free-space decay rate
# --------------------------------------------------------------------------

@pytest.mark.parametrize("omega0,dipole", [
    (0.70, (0, 0, 1)),
    (1.30, (1, 2j, 0.5)),
])
def test_c11_free_space_decay(omega0, dipole):
    # rates are per unit dipole moment: the |gamma|^2 factor of the
    # dimensional rate normalizes out of Emitter's unit vector
    got = decay_rate(Emitter(dipole, d=1.0, omega0=omega0))
    expected = omega0**3 / (3.0 * np.pi)
    print(f"Gamma_free({omega0}) = {got.gamma_total:.8e} vs {expected:.8e}")
    assert got.gamma_total == pytest.approx(expected, rel=1e-6)
    assert got.purcell == pytest.approx(1.0, abs=1e-12)


# --------------------------------------------------------------------------
# 12. Reflection-matrix oracles
# --------------------------------------------------------------------------

def test_c12_fresnel_reduction_unbiased():
    from spprecoil import permittivity
    omega = 0.9
    params = PlasmaParams(omega_c=0.0, gamma_damp=0.01)
    eps = permittivity(omega, params).eps_t
    for factor in (0.3, 0.9, 2.0, 5.0, 50.0):
        krho = factor * omega
        for phi in (0.0, 2.1, 4.4):
            ref = reflection_matrix(krho * np.cos(phi), krho * np.sin(phi),
                                    omega, params)
            kz1 = np.sqrt(complex(omega**2 - krho**2))
            kz1 = -kz1 if kz1.imag < 0 else kz1
            kz2 = np.sqrt(eps * omega**2 - krho**2)
            kz2 = -kz2 if kz2.imag < 0 else kz2
            rs = (kz1 - kz2) / (kz1 + kz2)
            rp = (eps * kz1 - kz2) / (eps * kz1 + kz2)
            assert ref.r_ss == pytest.approx(rs, rel=1e-9, abs=1e-9)
            assert ref.r_pp == pytest.approx(rp, rel=1e-9, abs=1e-9)
            assert abs(ref.r_sp) < 1e-9 and abs(ref.r_ps) < 1e-9


def test_c12_electrostatic_limit():
    from spprecoil import permittivity
    omega = 0.9
    params = PlasmaParams(omega_c=0.0, gamma_damp=0.01)
    eps = permittivity(omega, params).eps_t
    ref = reflection_matrix(100.0 * omega, 0.0, omega, params)
    target = (eps - 1.0) / (eps + 1.0)
    print(f"r_pp(k=100 w/c) = {ref.r_pp:.6f} vs image limit {target:.6f}")
    assert abs(ref.r_pp - target) < 1e-4


def test_c12_quasistatic_pole_frequencies():
    params = PlasmaParams(omega_c=0.4, gamma_damp=0.0)

    def recip(omega, theta):
        try:
            return float(np.real(1.0 / quasistatic_reflection(theta, omega, params)))
        except NumericalError:
            return 0.0  # landed exactly on the pole: 1/r is exactly zero

    worst = 0.0
    for theta in np.linspace(-np.pi, np.pi, 36, endpoint=False):
        target = omega_theta(theta, params)
        root = brentq(recip, target - 0.02, target + 0.02, args=(theta,),
                      xtol=1e-13)
        worst = max(worst, abs(root - target))
    print(f"worst pole-frequency mismatch over 36 angles = {worst:.2e}")
    assert worst < 1e-6


# --------------------------------------------------------------------------
# 13. Equifrequency-contour topology and launched beam pattern
# --------------------------------------------------------------------------

@pytest.mark.parametrize("omega_c,expected", [
    (0.01, "closed"),
    (0.05, "closed"),
    (0.80, "open-hyperbolic"),
])
def test_c13_efc_topology(omega_c, expected):
    contour = trace_efc(0.7, PlasmaParams(omega_c=omega_c))
    print(f"omega_c={omega_c}: topology={contour.topology}, "
          f"{len(contour.samples)} samples")
    assert contour.topology == expected


def test_c13_farfield_two_lobes_strong_bias():
    pattern = farfield_pattern(0.7, (0, 0, 1), PlasmaParams(omega_c=0.8),
                               theta_grid=np.linspace(-np.pi, np.pi, 181))
    above = pattern.intensity > 0.5 * pattern.intensity.max()
    lobes = int(np.sum(above != np.roll(above, 1))) // 2
    print(f"lobes above half maximum = {lobes}")
    assert lobes == 2


def test_c13_farfield_uniform_unbiased():
    pattern = farfield_pattern(0.7, (0, 0, 1), PlasmaParams(omega_c=0.0),
                               theta_grid=np.linspace(-np.pi, np.pi, 181))
    spread = pattern.intensity.max() - pattern.intensity.min()
    print(f"azimuthal spread = {spread / pattern.intensity.max():.3%}")
    assert spread < 0.01 * pattern.intensity.max()
