"""Scattered Green dyadic of a gyrotropic half-space, by plane-wave matching.

The half-space fills z < 0; the emitter sits in vacuum at height z > 0.  Each
in-plane wavevector (kx, ky) contributes an s/p vacuum doublet matched at the
interface against the two downward-decaying eigenmodes of the magnetized
plasma, giving a 2x2 reflection matrix.  The scattered dyadic at the source
is the Sommerfeld-type integral of the reflected plane-wave dyads over the
spectral plane, evaluated in polar coordinates with adaptive Gauss-Kronrod
panels in both the radial and angular directions.

Green convention: E_scat(r) = (omega^2 / (eps0 c^2)) G_s . p, so the vacuum
dyadic satisfies Im G_zz(r, r) = omega / (6 pi c).  Internally c = eps0 = 1
and frequencies are in units of omega_p.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import _quad
from .material import PlasmaParams, characteristic_frequencies, permittivity, permittivity_tensor

__all__ = [
    "NumericalError",
    "QuadratureSpec",
    "ReflectionMatrix",
    "KzModes",
    "GreenResult",
    "gyrotropic_kz_modes",
    "reflection_matrix",
    "boundary_determinant",
    "scattered_green",
    "lateral_green_derivative",
    "green_suite",
    "scattered_green_pair",
    "vacuum_green",
    "vacuum_green_imag_coincident",
]

ISOTROPIC_EPS_G = 1e-10     # |eps_g| below this uses the closed-form s/p branch
DEGENERATE_KZ_TOL = 1e-8    # relative kz separation treated as degenerate


class NumericalError(RuntimeError):
    """A solver step failed to produce a trustworthy number."""


@dataclass(frozen=True)
class QuadratureSpec:
    """Controls for the spectral integration.

    rel_tol is relative to the largest dyadic component of each derivative
    block.  k_max_factor Lambda truncates the radial integral at
    k = Lambda / d, where the evanescent weight e^{-2kd} has decayed to
    e^{-2 Lambda}.
    """

    rel_tol: float = 1e-6
    k_max_factor: float = 30.0
    max_evals: int = 1_500_000
    theta_panels: int = 12

    def __post_init__(self):
        if not (0 < self.rel_tol <= 1e-2):
            raise ValueError("rel_tol must be in (0, 1e-2]")
        if self.k_max_factor < 5:
            raise ValueError("k_max_factor below 5 truncates a non-negligible tail")
        if self.theta_panels < 4:
            raise ValueError("need at least 4 angular panels")


@dataclass(frozen=True)
class ReflectionMatrix:
    """2x2 reflection in the (s, p) basis: [b_s, b_p] = R [a_s, a_p]."""

    r_ss: complex
    r_sp: complex
    r_ps: complex
    r_pp: complex
    kz_vacuum: complex
    det_denominator: complex

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.r_ss, self.r_sp], [self.r_ps, self.r_pp]])


@dataclass(frozen=True)
class GreenResult:
    """Scattered dyadic with its two lateral derivatives and diagnostics."""

    G: np.ndarray
    dG_x: np.ndarray
    dG_y: np.ndarray
    err_rel: float
    n_eval: int
    converged: bool


# ---------------------------------------------------------------------------
# medium eigenmodes
# ---------------------------------------------------------------------------

_T_NODES = np.array([-2.0, -1.0, 0.0, 1.0, 2.0])
_VINV_T = np.linalg.inv(np.vander(_T_NODES, 5, increasing=True)).T


def _det_wave_matrix(kx, ky, kz, k0sq, et, ea, eg):
    """det[k k - k^2 I + k0^2 eps] for broadcastable kz arrays."""
    m11 = k0sq * et - ky * ky - kz * kz
    m12 = kx * ky
    m13 = kx * kz + 1j * k0sq * eg
    m22 = k0sq * ea - kx * kx - kz * kz
    m23 = ky * kz
    m31 = kx * kz - 1j * k0sq * eg
    m33 = k0sq * et - kx * kx - ky * ky
    return (
        m11 * (m22 * m33 - m23 * m23)
        - m12 * (m12 * m33 - m23 * m31)
        + m13 * (m12 * m23 - m22 * m31)
    )


def _wave_matrix_rows(kx, ky, kz, k0sq, et, ea, eg):
    """Rows of the wave matrix, shape (..., 3, 3)."""
    zeros = np.zeros_like(kz)
    m = np.empty(kz.shape + (3, 3), dtype=complex)
    m[..., 0, 0] = k0sq * et - ky * ky - kz * kz
    m[..., 0, 1] = kx * ky + zeros
    m[..., 0, 2] = kx * kz + 1j * k0sq * eg
    m[..., 1, 0] = m[..., 0, 1]
    m[..., 1, 1] = k0sq * ea - kx * kx - kz * kz
    m[..., 1, 2] = ky * kz
    m[..., 2, 0] = kx * kz - 1j * k0sq * eg
    m[..., 2, 1] = m[..., 1, 2]
    m[..., 2, 2] = k0sq * et - kx * kx - ky * ky + zeros
    return m


def _null_vectors(m):
    """Null vector of each (nearly singular) 3x3 matrix in a stack.

    Uses the largest pairwise cross product of rows, which spans the null
    space when the matrix has rank 2.
    """
    c01 = np.cross(m[..., 0, :], m[..., 1, :])
    c02 = np.cross(m[..., 0, :], m[..., 2, :])
    c12 = np.cross(m[..., 1, :], m[..., 2, :])
    cand = np.stack([c01, c02, c12], axis=-2)
    norms = np.linalg.norm(cand, axis=-1)
    best = np.argmax(norms, axis=-1)
    v = np.take_along_axis(cand, best[..., None, None], axis=-2)[..., 0, :]
    nrm = np.linalg.norm(v, axis=-1)
    rowscale = np.linalg.norm(m, axis=(-2, -1)) ** 2
    if np.any(nrm < 1e-12 * rowscale):
        raise NumericalError(
            "medium eigenmode is numerically degenerate; the closed-form "
            "isotropic branch covers eps_g ~ 0"
        )
    v = v / nrm[..., None]
    # canonical phase: largest component made real positive for determinism
    idx = np.argmax(np.abs(v), axis=-1)
    lead = np.take_along_axis(v, idx[..., None], axis=-1)[..., 0]
    v = v * np.conj(lead / np.abs(lead))[..., None]
    return v


def _medium_modes_batch(kx, ky, omega, params: PlasmaParams):
    """Two downward modes per point: kz (M, 2), field polarizations (M, 2, 3)."""
    vals = permittivity(omega, params)
    et, ea, eg = vals.eps_t, vals.eps_a, vals.eps_g
    k0sq = omega * omega
    scale = np.maximum(np.abs(omega), np.abs(kx) + np.abs(ky))

    kz_nodes = scale[:, None] * _T_NODES[None, :]
    f = _det_wave_matrix(kx[:, None], ky[:, None], kz_nodes, k0sq, et, ea, eg)
    ct = f @ _VINV_T  # coefficients of t^m, t = kz/scale

    lead = ct[:, 4]
    if np.any(np.abs(lead) < 1e-12 * np.max(np.abs(ct), axis=1)):
        raise NumericalError("kz quartic lost its leading coefficient")

    a = ct[:, :4] / lead[:, None]
    comp = np.zeros(a.shape[:1] + (4, 4), dtype=complex)
    comp[:, 1, 0] = comp[:, 2, 1] = comp[:, 3, 2] = 1.0
    comp[:, :, 3] = -a
    troots = np.linalg.eigvals(comp)

    # Newton polish on the scaled quartic
    for _ in range(3):
        p = ct[:, 4, None] * troots**4 + ct[:, 3, None] * troots**3 \
            + ct[:, 2, None] * troots**2 + ct[:, 1, None] * troots + ct[:, 0, None]
        dp = 4 * ct[:, 4, None] * troots**3 + 3 * ct[:, 3, None] * troots**2 \
            + 2 * ct[:, 2, None] * troots + ct[:, 1, None]
        step = p / dp
        step[~np.isfinite(step)] = 0.0
        troots = troots - step
    kz_all = troots * scale[:, None]

    imtol = 1e-9
    im = np.imag(troots)
    rows = _wave_matrix_rows(kx[:, None], ky[:, None], kz_all, k0sq, et, ea, eg)
    vecs = _null_vectors(rows)  # (M, 4, 3)

    bound = im < -imtol
    n_bound = bound.sum(axis=1)
    if np.all(n_bound == 2):
        order = np.argsort(np.where(bound, im, np.inf), axis=1)[:, :2]
    else:
        # lossless points can carry propagating bulk roots: split them by
        # vertical Poynting flux and keep the two that carry energy downward
        kvec = np.stack(
            [np.broadcast_to(kx[:, None], kz_all.shape), np.broadcast_to(ky[:, None], kz_all.shape), kz_all],
            axis=-1,
        )
        hvec = np.cross(kvec, vecs) / omega
        sz = 0.5 * np.real(np.cross(vecs, np.conj(hvec))[..., 2])
        score = np.where(bound, -1e9 + im, np.where(im > imtol, 1e9 + im, sz / (np.abs(sz).max() + 1e-300)))
        order = np.argsort(score, axis=1)
        ok = np.take_along_axis(score, order[:, 1:2], axis=1)[:, 0] < 0
        if not np.all(ok):
            raise NumericalError("could not identify two downward medium modes")
        order = order[:, :2]

    kz_sel = np.take_along_axis(kz_all, order, axis=1)
    vec_sel = np.take_along_axis(vecs, order[:, :, None], axis=1)

    # Near-coincident roots defeat the cross-product nullspace: the wave
    # matrix is then nearly rank-1-deficient at both roots, the surviving
    # row pair cancels almost completely in its cross product, and the
    # residual of the near-zero row (finite root precision) wins the argmax
    # with a vector from the wrong mode.  Degenerate perturbation theory at
    # the pair midpoint is immune to that: restrict M and dM/dkz to the
    # near-null two-dimensional subspace, solve the 2x2 linear pencil for
    # the split, and take its eigenvectors.  Everything is evaluated at the
    # midpoint, so individual root errors never enter.
    sep = np.abs(kz_sel[:, 0] - kz_sel[:, 1]) / scale
    idx = np.where(sep < 1e-3)[0]
    if idx.size:
        kxs, kys = kx[idx], ky[idx]
        kz0 = 0.5 * (kz_sel[idx, 0] + kz_sel[idx, 1])
        m = _wave_matrix_rows(kxs, kys, kz0, k0sq, et, ea, eg)  # (N, 3, 3)
        dm = np.zeros_like(m)                                   # dM/dkz at kz0
        dm[:, 0, 0] = dm[:, 1, 1] = -2.0 * kz0
        dm[:, 0, 2] = dm[:, 2, 0] = kxs
        dm[:, 1, 2] = dm[:, 2, 1] = kys
        # Linearize the full 3x3 problem: det(M + delta dM) = 0.  Its two
        # small generalized eigenvalues relocate both roots of the pair with
        # O(delta^2) error; the quadratic kz^2 correction is negligible at
        # this separation.  Projecting onto the near-null subspace first
        # would drop the O(delta) coupling through the third direction,
        # which is not small for this non-normal matrix.
        detdm = np.linalg.det(dm)
        ok = np.abs(detdm) > 1e-280 * np.maximum(1.0, scale[idx]) ** 6
        lam = np.full((idx.size, 3), np.inf, dtype=complex)
        if np.any(ok):
            lam[ok] = np.linalg.eigvals(-np.linalg.solve(dm[ok], m[ok]))
        order3 = np.argsort(np.abs(lam), axis=1)[:, :2]
        deltas = np.take_along_axis(lam, order3, axis=1)        # (N, 2)
        swap = (deltas[:, 0].imag > deltas[:, 1].imag) | (
            (deltas[:, 0].imag == deltas[:, 1].imag)
            & (deltas[:, 0].real > deltas[:, 1].real)
        )
        deltas[swap] = deltas[swap][:, ::-1]
        split = np.abs(deltas[:, 0] - deltas[:, 1])
        degenerate = ~np.isfinite(deltas[:, 0]) | ~np.isfinite(deltas[:, 1]) \
            | (split < np.maximum(
                1e-3 * (np.abs(deltas[:, 0]) + np.abs(deltas[:, 1])),
                1e-13 * scale[idx]))
        # at an (effectively) exact double root any orthonormal pair spans
        # the null space; the midpoint singular vectors provide one
        fall_vh = np.linalg.svd(m)[2]

        # The pencil roots are far more accurate than the raw quartic roots
        # here (those scatter on a circle of radius ~sqrt(eps) around the
        # double point), so they replace the selected kz outright.
        for j in (0, 1):
            dj = np.where(degenerate, 0.0, deltas[:, j])
            kz_j = np.where(degenerate, kz_sel[idx, j], kz0 + dj)
            kz_sel[idx, j] = kz_j
            mj = _wave_matrix_rows(kxs, kys, kz_j, k0sq, et, ea, eg)
            v = np.conj(np.linalg.svd(mj)[2][:, 2, :])
            v = np.where(degenerate[:, None], np.conj(fall_vh[:, 1 + j, :]), v)
            lead = np.take_along_axis(
                v, np.argmax(np.abs(v), axis=1)[:, None], axis=1
            )[:, 0]
            vec_sel[idx, j] = v * np.conj(lead / np.abs(lead))[:, None]
        sep[idx] = np.where(degenerate, sep[idx], split / scale[idx])
    return kz_sel, vec_sel, kz_all, sep


class KzModes(NamedTuple):
    """Vertical-wavenumber eigenproblem result at one in-plane wavevector."""

    roots: np.ndarray         # all four quartic roots
    kz: np.ndarray            # the two selected downward-decaying roots
    polarization: np.ndarray  # (2, 3) unit field vectors of the selected modes


def gyrotropic_kz_modes(kx: float, ky: float, omega: float, params: PlasmaParams) -> KzModes:
    """Plane-wave eigenmodes of the biased plasma at one (kx, ky).

    Solves the quartic det[k k - k^2 I + (omega^2/c^2) eps] = 0 in kz and
    selects the two modes that decay into z < 0 (Im kz < 0, or for lossless
    propagating roots, energy flux into the medium).
    """
    if omega <= 0:
        raise ValueError("omega must be positive")
    vals = permittivity(omega, params)
    if abs(vals.eps_g) < ISOTROPIC_EPS_G:
        krho = float(np.hypot(kx, ky))
        kz = -np.sqrt(vals.eps_t * omega**2 - krho**2 + 0j)
        if krho == 0:
            shat = np.array([0.0, 1.0, 0.0], dtype=complex)
            ct, st = 1.0, 0.0
        else:
            ct, st = kx / krho, ky / krho
            shat = np.array([-st, ct, 0.0], dtype=complex)
        pm = np.array([-kz * ct, -kz * st, krho]) / (np.sqrt(vals.eps_t) * omega)
        return KzModes(
            roots=np.array([kz, kz, -kz, -kz]),
            kz=np.array([kz, kz]),
            polarization=np.stack([shat, pm / np.linalg.norm(pm)]),
        )
    kz, vec, roots, sep = _medium_modes_batch(
        np.atleast_1d(float(kx)), np.atleast_1d(float(ky)), omega, params
    )
    if sep[0] < DEGENERATE_KZ_TOL:
        raise NumericalError(
            "selected kz roots coincide within tolerance; the medium is "
            "effectively isotropic here (eps_g ~ 0)"
        )
    return KzModes(roots=roots[0], kz=kz[0], polarization=vec[0])


# ---------------------------------------------------------------------------
# reflection matrix
# ---------------------------------------------------------------------------

def _batch_reflection(krho, theta, omega, params: PlasmaParams, need_r: bool = True):
    """Vectorized reflection solve.

    Returns R (M, 2, 2), detD (M,) from column-normalized matching matrices,
    kz_vacuum (M,), and the s/p basis vectors needed to build dyads.  With
    need_r=False the linear solve is skipped (R comes back None), which keeps
    determinant scans usable at points where the matching system is singular.
    """
    krho = np.asarray(krho)
    krho = krho.astype(complex) if np.iscomplexobj(krho) else krho.astype(float)
    theta = np.asarray(theta, dtype=float)
    k0 = float(omega)
    ct, st = np.cos(theta), np.sin(theta)
    kx, ky = krho * ct, krho * st
    kzv = np.sqrt(k0 * k0 - krho * krho + 0j)
    # Decaying-upward branch.  The principal sqrt puts its cut on the real
    # axis for krho > k0, so complex root searches crossing the axis would
    # otherwise land on the exponentially growing vacuum solution.
    kzv = np.where(kzv.imag < 0.0, -kzv, kzv)

    zeros = np.zeros_like(krho)
    shat = np.stack([-st, ct, zeros], axis=-1).astype(complex)
    p_up = np.stack([-kzv * ct, -kzv * st, krho.astype(complex)], axis=-1) / k0
    p_dn = np.stack([+kzv * ct, +kzv * st, krho.astype(complex)], axis=-1) / k0

    vals = permittivity(omega, params)
    if abs(vals.eps_g) < ISOTROPIC_EPS_G:
        et = vals.eps_t
        kzm = np.sqrt(et * k0 * k0 - krho * krho + 0j)
        rs = (kzv - kzm) / (kzv + kzm)
        rp = (et * kzv - kzm) / (et * kzv + kzm)
        R = np.zeros(krho.shape + (2, 2), dtype=complex)
        R[..., 0, 0] = rs
        R[..., 1, 1] = rp
        detd = ((kzv + kzm) / (np.abs(kzv) + np.abs(kzm))) * (
            (et * kzv + kzm) / (np.abs(et * kzv) + np.abs(kzm))
        )
        return R, detd, kzv, shat, p_up, p_dn

    kz_m, e_m, _, _ = _medium_modes_batch(kx, ky, omega, params)
    kvec = np.stack(
        [np.broadcast_to(kx[:, None], kz_m.shape), np.broadcast_to(ky[:, None], kz_m.shape), kz_m],
        axis=-1,
    )
    h_m = np.cross(kvec, e_m) / k0

    A = np.empty(krho.shape + (4, 4), dtype=complex)
    A[..., 0, 0] = shat[..., 0]
    A[..., 1, 0] = shat[..., 1]
    A[..., 2, 0] = p_up[..., 0]
    A[..., 3, 0] = p_up[..., 1]
    A[..., 0, 1] = p_up[..., 0]
    A[..., 1, 1] = p_up[..., 1]
    A[..., 2, 1] = -shat[..., 0]
    A[..., 3, 1] = -shat[..., 1]
    for m in (0, 1):
        A[..., 0, 2 + m] = -e_m[..., m, 0]
        A[..., 1, 2 + m] = -e_m[..., m, 1]
        A[..., 2, 2 + m] = -h_m[..., m, 0]
        A[..., 3, 2 + m] = -h_m[..., m, 1]

    # Normalize before the determinant so |det| stays O(1) away from surface
    # modes.  Three effects need scaling out: H-field rows grow like krho/k0
    # (row normalization); column magnitudes vary (column normalization); and
    # at weak gyrotropy the two transmitted modes become nearly parallel --
    # the pair approaches a defective Jordan basis, with overlap 1 - O(1/k^2)
    # -- which would send the raw determinant to zero along every direction.
    # Orthonormalizing the two medium columns (thin QR, a right-multiply by
    # an invertible triangular factor) removes that collapse without moving
    # any zero of the determinant.
    rownorm = np.linalg.norm(A, axis=-1)
    rownorm = np.where(rownorm == 0.0, 1.0, rownorm)
    A_eq = A / rownorm[..., :, None]
    q_med, r_med = np.linalg.qr(A_eq[..., :, 2:])
    diag = np.abs(np.diagonal(r_med, axis1=-2, axis2=-1))
    defective = np.any(diag < 1e-150 * np.maximum(diag.max(axis=-1, keepdims=True), 1.0), axis=-1)
    A_eq = np.concatenate([A_eq[..., :, :2], q_med], axis=-1)
    colnorm = np.linalg.norm(A_eq, axis=-2)
    colnorm = np.where(colnorm == 0.0, 1.0, colnorm)
    detd = np.linalg.det(A_eq / colnorm[..., None, :])
    detd = np.where(defective, np.nan, detd)
    if not need_r:
        return None, detd, kzv, shat, p_up, p_dn

    B = np.empty(krho.shape + (4, 2), dtype=complex)
    B[..., 0, 0] = -shat[..., 0]
    B[..., 1, 0] = -shat[..., 1]
    B[..., 2, 0] = -p_dn[..., 0]
    B[..., 3, 0] = -p_dn[..., 1]
    B[..., 0, 1] = -p_dn[..., 0]
    B[..., 1, 1] = -p_dn[..., 1]
    B[..., 2, 1] = shat[..., 0]
    B[..., 3, 1] = shat[..., 1]

    try:
        X = np.linalg.solve(A, B)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(
            f"boundary matching singular at omega={omega:.6g} "
            f"(krho up to {np.max(np.abs(krho)):.6g})"
        ) from exc
    R = X[..., :2, :]
    return R, detd, kzv, shat, p_up, p_dn


def reflection_matrix(kx: float, ky: float, omega: float, params: PlasmaParams) -> ReflectionMatrix:
    """Reflection of an (s, p) doublet at in-plane wavevector (kx, ky).

    The incident wave travels downward onto the interface; amplitudes are in
    the basis s-hat = z-hat x k-hat and p-hat^= (-/+ kz k-hat + krho z-hat)/k0
    for the up/down branches.  At omega_c = 0 this reduces to the Fresnel
    coefficients of the isotropic Drude permittivity.
    """
    if omega <= 0:
        raise ValueError("omega must be positive")
    krho = float(np.hypot(kx, ky))
    if krho == 0:
        raise ValueError("normal incidence has no defined s/p split; offset kx or ky")
    theta = float(np.arctan2(ky, kx))
    R, detd, kzv, *_ = _batch_reflection(
        np.atleast_1d(krho), np.atleast_1d(theta), omega, params
    )
    return ReflectionMatrix(
        r_ss=complex(R[0, 0, 0]),
        r_sp=complex(R[0, 0, 1]),
        r_ps=complex(R[0, 1, 0]),
        r_pp=complex(R[0, 1, 1]),
        kz_vacuum=complex(kzv[0]),
        det_denominator=complex(detd[0]),
    )


def boundary_determinant(krho, theta, omega: float, params: PlasmaParams):
    """Normalized determinant of the interface-matching system (vectorized).

    Zeros along real krho locate bound surface modes at the given frequency.
    krho may be complex (analytic continuation for root polishing).  Points
    where the medium-mode selection is ambiguous come back as NaN rather than
    poisoning the whole batch.
    """
    krho = np.atleast_1d(np.asarray(krho))
    krho = krho.astype(complex) if np.iscomplexobj(krho) else krho.astype(float)
    theta = np.broadcast_to(np.asarray(theta, dtype=float), krho.shape).copy()
    try:
        _, detd, *_ = _batch_reflection(krho, theta, omega, params, need_r=False)
        return detd
    except NumericalError:
        if krho.size == 1:
            return np.array([np.nan + 0j])
    out = np.empty(krho.shape, dtype=complex)
    for i in range(krho.size):
        try:
            _, di, *_ = _batch_reflection(
                krho[i : i + 1], theta[i : i + 1], omega, params, need_r=False
            )
            out[i] = di[0]
        except NumericalError:
            out[i] = np.nan
    return out


# ---------------------------------------------------------------------------
# spectral integration
# ---------------------------------------------------------------------------

class _KIntegrals:
    """Adaptive radial integrals shared by all angular nodes of one dyadic job.

    Each angular node keeps its own panel list over the two radial segments:
    segment 0 uses w = kz_vac on the propagating arc (k in [0, k0]) and
    segment 1 uses q = -i kz_vac on the evanescent tail, both of which remove
    the 1/kz_vac measure singularity exactly.
    """

    def __init__(self, omega, z_sum, params, quad, offset):
        self.omega = omega
        self.z_sum = z_sum
        self.params = params
        self.quad = quad
        self.offset = offset
        self.k0 = float(omega)
        self.qmax = max(
            np.sqrt(max((quad.k_max_factor / (0.5 * z_sum)) ** 2 - self.k0**2, 0.0)),
            4.0 * self.k0,
        )
        self.thetas: list[float] = []
        self.panels: list[list] = []   # per theta: list of [seg, a, b, val, err]
        self.n_eval = 0

    def _initial_panels(self):
        k0 = self.k0
        edges_a = [0.0, 0.75 * k0, k0]
        out = [(0, a, b) for a, b in zip(edges_a[:-1], edges_a[1:])]
        lin = [0.0, 0.5 * k0, k0, 2 * k0, 4 * k0, 8 * k0, 16 * k0]
        lin = [e for e in lin if e < self.qmax] + [min(16 * k0, self.qmax)]
        lin = sorted(set(lin))
        out += [(1, a, b) for a, b in zip(lin[:-1], lin[1:])]
        if self.qmax > 16 * k0:
            logs = np.geomspace(16 * k0, self.qmax, 6)
            out += [(1, a, b) for a, b in zip(logs[:-1], logs[1:])]
        return out

    def _evaluate(self, jobs):
        """jobs: list of (theta_idx, seg, a, b); returns per-job (val, err)."""
        panels = np.array([[a, b] for (_, _, a, b) in jobs])
        pts = _quad.panel_points(panels)            # (P, 15)
        seg = np.array([s for (_, s, _, _) in jobs])
        tidx = np.array([t for (t, _, _, _) in jobs])
        th = np.array(self.thetas)[tidx]

        x = pts.ravel()
        seg_f = np.repeat(seg, _quad.NPTS)
        th_f = np.repeat(th, _quad.NPTS)

        k0 = self.k0
        prop = seg_f == 0
        krho = np.empty_like(x)
        krho[prop] = np.sqrt(np.maximum(k0 * k0 - x[prop] ** 2, 0.0))
        krho[~prop] = np.sqrt(k0 * k0 + x[~prop] ** 2)
        krho = np.maximum(krho, 1e-12 * max(k0, 1.0))

        R, _, kzv, shat, p_up, p_dn = _batch_reflection(krho, th_f, self.omega, self.params)
        dy = (
            R[:, 0, 0, None, None] * shat[:, :, None] * shat[:, None, :]
            + R[:, 0, 1, None, None] * shat[:, :, None] * p_dn[:, None, :]
            + R[:, 1, 0, None, None] * p_up[:, :, None] * shat[:, None, :]
            + R[:, 1, 1, None, None] * p_up[:, :, None] * p_dn[:, None, :]
        )

        phase = np.exp(1j * kzv * self.z_sum)
        meas = np.where(prop, 1.0, -1j) * phase
        if self.offset is not None:
            dx, dyoff = self.offset
            kx = krho * np.cos(th_f)
            ky = krho * np.sin(th_f)
            meas = meas * np.exp(1j * (kx * dx + ky * dyoff))

        kx = krho * np.cos(th_f)
        ky = krho * np.sin(th_f)
        base = dy * meas[:, None, None]
        stack = np.concatenate(
            [
                base.reshape(-1, 9),
                (1j * kx)[:, None] * base.reshape(-1, 9),
                (1j * ky)[:, None] * base.reshape(-1, 9),
            ],
            axis=1,
        )
        self.n_eval += x.size
        vals, errs = _quad.panel_sums(stack.reshape(len(jobs), _quad.NPTS, 27), panels)
        return vals, errs

    def add_thetas(self, new_thetas, abs_tol):
        start = len(self.thetas)
        self.thetas.extend(float(t) for t in new_thetas)
        jobs = []
        for i in range(start, len(self.thetas)):
            self.panels.append([])
            for seg, a, b in self._initial_panels():
                jobs.append((i, seg, a, b))
        self._run(jobs, abs_tol)
        return np.arange(start, len(self.thetas))

    def refine_all(self, abs_tol):
        self._run([], abs_tol)

    def _run(self, pending, abs_tol):
        while True:
            if pending:
                vals, errs = self._evaluate(pending)
                for (ti, seg, a, b), v, e in zip(pending, vals, errs):
                    self.panels[ti].append([seg, a, b, v, e])
                pending = []
            # choose splits
            for ti, plist in enumerate(self.panels):
                if not plist:
                    continue
                tot = np.sum([p[4] for p in plist], axis=0)
                ratio = tot / abs_tol
                if np.max(ratio) <= 1.0:
                    continue
                worst = np.argmax(ratio)
                plist.sort(key=lambda p: -p[4][worst])
                ncut = max(1, int(0.3 * len(plist)))
                cut = [p for p in plist[:ncut]
                       if (p[2] - p[1]) > 1e-12 * max(p[2], 1.0)
                       and p[4][worst] > 0.02 * tot[worst]]
                if not cut:
                    continue
                cut_ids = {id(p) for p in cut}
                self.panels[ti] = [p for p in plist if id(p) not in cut_ids]
                for seg, a, b, _, _ in cut:
                    mid = 0.5 * (a + b)
                    pending.append((ti, seg, a, mid))
                    pending.append((ti, seg, mid, b))
            if not pending:
                return
            if self.n_eval > self.quad.max_evals:
                # evaluate what is queued, then stop refining
                vals, errs = self._evaluate(pending)
                for (ti, seg, a, b), v, e in zip(pending, vals, errs):
                    self.panels[ti].append([seg, a, b, v, e])
                return

    def values(self):
        vals = np.zeros((len(self.thetas), 27), dtype=complex)
        errs = np.zeros((len(self.thetas), 27))
        for i, plist in enumerate(self.panels):
            vals[i] = np.sum([p[3] for p in plist], axis=0)
            errs[i] = np.sum([p[4] for p in plist], axis=0)
        return vals, errs


def _block_scales(est27):
    scale = np.empty(27)
    for b in range(3):
        blk = np.abs(est27[9 * b : 9 * (b + 1)])
        top = max(blk.max(), 1e-300)
        scale[9 * b : 9 * (b + 1)] = np.maximum(blk, 1e-2 * top)
    return scale


def _seed_angles(omega, params):
    """Angular panel edges around the quasi-static resonance directions."""
    try:
        from .dispersion import emission_angle  # local import to avoid a cycle

        th0 = emission_angle(omega, params)
    except Exception:
        return []
    if th0 is None:
        return []
    return [th0, 2 * np.pi - th0]


def _green_stack(omega, z_sum, params, quad, offset=None):
    if params.gamma_damp <= 0:
        raise ValueError("spectral integration needs gamma_damp > 0 to regularize the pole ridge")
    ki = _KIntegrals(omega, z_sum, params, quad, offset)

    edges = list(np.linspace(0.0, 2 * np.pi, quad.theta_panels + 1))
    for a in _seed_angles(omega, params):
        if 0 < a < 2 * np.pi:
            edges.append(a)
    edges = sorted(set(edges))
    panels = np.array([[a, b] for a, b in zip(edges[:-1], edges[1:])])

    # bootstrap with a loose radial tolerance to learn the scale
    abs_tol = np.full(27, np.inf)
    node_idx = []
    for p in panels:
        pts = _quad.panel_points(p[None, :])[0]
        node_idx.append(ki.add_thetas(pts, abs_tol))
    node_idx = [np.asarray(ix) for ix in node_idx]

    for _ in range(12):
        vals, kerrs = ki.values()
        pvals = np.stack([vals[ix] for ix in node_idx])      # (P, 15, 27)
        ints, therr = _quad.panel_sums(pvals, panels)
        est = ints.sum(axis=0)
        scale = _block_scales(est)
        target = quad.rel_tol * scale

        halves = 0.5 * (panels[:, 1] - panels[:, 0])
        wts = halves[:, None] * _quad.WGK[None, :]           # (P, 15)
        kerr_tot = np.einsum("pn,pnc->c", wts, np.stack([kerrs[ix] for ix in node_idx]))
        therr_tot = therr.sum(axis=0)
        if np.all(kerr_tot + therr_tot <= target) or ki.n_eval > quad.max_evals:
            break

        did = False
        if np.any(kerr_tot > 0.4 * target):
            ki.refine_all(target / (6 * np.pi))
            did = True
        if np.any(therr_tot > 0.4 * target):
            ratios = (therr / target[None, :]).max(axis=1)
            order = np.argsort(-ratios)
            nsplit = max(1, int(0.35 * len(order[ratios[order] > 0.3])))
            split_ids = sorted(order[:nsplit].tolist())
            new_panels = []
            new_nodes = []
            for i, p in enumerate(panels):
                if i in split_ids and (p[1] - p[0]) > 1e-6:
                    mid = 0.5 * (p[0] + p[1])
                    for a, b in ((p[0], mid), (mid, p[1])):
                        new_panels.append([a, b])
                        pts = _quad.panel_points(np.array([[a, b]]))[0]
                        new_nodes.append(ki.add_thetas(pts, target / (6 * np.pi)))
                    did = True
                else:
                    new_panels.append(list(p))
                    new_nodes.append(node_idx[i])
            panels = np.array(new_panels)
            node_idx = new_nodes
        if not did:
            break

    vals, kerrs = ki.values()
    pvals = np.stack([vals[ix] for ix in node_idx])
    ints, therr = _quad.panel_sums(pvals, panels)
    est = ints.sum(axis=0)
    scale = _block_scales(est)
    halves = 0.5 * (panels[:, 1] - panels[:, 0])
    wts = halves[:, None] * _quad.WGK[None, :]
    kerr_tot = np.einsum("pn,pnc->c", wts, np.stack([kerrs[ix] for ix in node_idx]))
    err = (kerr_tot + therr.sum(axis=0)) / scale
    converged = bool(np.max(err) <= quad.rel_tol * 1.5)

    pref = 1j / (8 * np.pi**2)
    est = pref * est
    return GreenResult(
        G=est[0:9].reshape(3, 3),
        dG_x=est[9:18].reshape(3, 3),
        dG_y=est[18:27].reshape(3, 3),
        err_rel=float(np.max(err)),
        n_eval=ki.n_eval,
        converged=converged,
    )


def _height_of(r0) -> float:
    """Accept a bare height or an (x, y, z) position; only z matters here."""
    arr = np.atleast_1d(np.asarray(r0, dtype=float))
    if arr.size == 1:
        d = float(arr[0])
    elif arr.size == 3:
        d = float(arr[2])
    else:
        raise ValueError("position must be a height scalar or an (x, y, z) triple")
    if d <= 0:
        raise ValueError("emitter height d must be positive")
    return d


def green_suite(r0, omega: float, params: PlasmaParams,
                quad: QuadratureSpec | None = None) -> GreenResult:
    """Scattered dyadic and both lateral derivatives at the source, in one pass.

    r0 is a height above the interface or an (x, y, z) position (the surface
    is laterally uniform, so only z enters).
    """
    d = _height_of(r0)
    if omega <= 0:
        raise ValueError("omega must be positive")
    return _green_stack(omega, 2.0 * d, params, quad or QuadratureSpec())


def scattered_green(r0, omega: float, params: PlasmaParams,
                    quad: QuadratureSpec | None = None,
                    full_output: bool = False):
    """Scattered part of the Green dyadic at the source point (3x3 complex).

    With full_output=True returns the GreenResult carrying the error estimate
    and convergence flag; otherwise a non-converged integral emits a warning
    and the best estimate is returned.
    """
    res = green_suite(r0, omega, params, quad)
    if full_output:
        return res
    if not res.converged:
        import warnings

        warnings.warn(
            f"spectral integral not converged (err_rel={res.err_rel:.2e})",
            RuntimeWarning,
            stacklevel=2,
        )
    return res.G


def lateral_green_derivative(r0, omega: float, alpha: str, params: PlasmaParams,
                             quad: QuadratureSpec | None = None) -> np.ndarray:
    """d/d(alpha) of the scattered dyadic at the source, alpha in {'x', 'y'}.

    Computed in-spectrum (integrand times i k_alpha), not by numerical
    differentiation.
    """
    res = green_suite(r0, omega, params, quad)
    if alpha == "x":
        return res.dG_x
    if alpha == "y":
        return res.dG_y
    raise ValueError("alpha must be 'x' or 'y'")


def scattered_green_pair(r_field, r_source, omega: float, params: PlasmaParams,
                         quad: QuadratureSpec | None = None) -> np.ndarray:
    """Scattered dyadic between two points above the interface.

    r_field and r_source are (x, y, z) with z > 0; the integrand gains the
    lateral phase e^{i k . (rho_f - rho_s)} and decays with z_f + z_s.
    """
    rf = np.asarray(r_field, dtype=float)
    rs = np.asarray(r_source, dtype=float)
    if rf[2] <= 0 or rs[2] <= 0:
        raise ValueError("both points must sit above the interface (z > 0)")
    res = _green_stack(
        omega,
        rf[2] + rs[2],
        params,
        quad or QuadratureSpec(),
        offset=(rf[0] - rs[0], rf[1] - rs[1]),
    )
    return res.G


def vacuum_green(r_field, r_source, omega: float) -> np.ndarray:
    """Free-space dyadic between distinct points (3x3 complex).

    Satisfies E = (omega^2/eps0 c^2) G p with Im G -> omega/(6 pi c) I at
    coincidence; raises there because the real part diverges.
    """
    rf = np.asarray(r_field, dtype=float)
    rs = np.asarray(r_source, dtype=float)
    dr = rf - rs
    R = np.linalg.norm(dr)
    if R == 0:
        raise ValueError("coincident points: use vacuum_green_imag_coincident")
    k = omega
    kR = k * R
    rh = dr / R
    ph = np.exp(1j * kR) / (4 * np.pi * R)
    t1 = 1 + (1j * kR - 1) / kR**2
    t2 = (3 - 3j * kR - kR**2) / kR**2
    return ph * (t1 * np.eye(3) + t2 * np.outer(rh, rh))


def vacuum_green_imag_coincident(omega: float) -> np.ndarray:
    """Im G of free space at coincident points: (omega / 6 pi) I with c = 1."""
    return (omega / (6 * np.pi)) * np.eye(3)
