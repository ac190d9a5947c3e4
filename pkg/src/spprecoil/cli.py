"""Batch command-line front-end: sweeps and maps written as CSV or JSON.

Every subcommand resolves its inputs in three layers -- built-in defaults,
then an optional config file (``--config``, YAML or JSON; YAML is a superset
of JSON so one loader serves both), then explicit command-line flags, which
win.  The resolved configuration is embedded verbatim in the output header so
a run can be reproduced from its artifact alone.

Config file schema (all blocks optional)::

    material:   {omega_c: 0.4, gamma_damp: 0.015}
    emitter:    {dipole: z, d: 0.01, omega0: 0.8, gamma_debye: 7900, d_nm: 100}
    sweep:      {start: 0.45, stop: 1.0, steps: 56}
    bias:       {start: -0.8, stop: 0.8, steps: 33}      # map only
    pump:       {Omega_tilde: 0.5}                       # pump only
    contour:    {omega: 0.7, theta_steps: 180}           # efc / farfield
    quadrature: {rel_tol: 1.0e-6, k_max_factor: 30.0}
    run:        {path: exact}
    output:     {path: out.csv, format: csv}

``dipole`` accepts the shorthands ``x``/``y``/``z``/``x+iz`` or three
comma-separated complex components (``"1,0,1j"``).

Exit codes: 0 success; 2 configuration error; 3 numerical failure (no usable
points); 4 partial results (some points failed; failed rows carry ok=0 and an
error message instead of numbers -- NaN is never emitted).

Point-level parallelism: set ``SPPRECOIL_WORKERS`` to a thread count; output
order is always the sweep order regardless of completion order.
"""

from __future__ import annotations

import io
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import click
import numpy as np
import yaml

from . import __version__
from .dispersion import emission_angle, farfield_pattern, trace_efc
from .dynamics import population_trace
from .force import (
    Emitter,
    FORCE_PATHS,
    force_normalization,
    quasistatic_force_integral,
    quasistatic_force_residue,
    resonant_force,
    weak_bias_force,
)
from .greens import NumericalError, QuadratureSpec
from .material import PlasmaParams, characteristic_frequencies

_CONFIG_BLOCKS = ("material", "emitter", "sweep", "bias", "pump", "contour",
                  "quadrature", "run", "output")

_DIPOLE_SHORTHANDS = {
    "x": (1.0, 0.0, 0.0),
    "y": (0.0, 1.0, 0.0),
    "z": (0.0, 0.0, 1.0),
    "x+iz": (1.0, 0.0, 1.0j),
}


# ---------------------------------------------------------------------------
# config resolution
# ---------------------------------------------------------------------------

def _load_config_file(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = yaml.safe_load(fh)
    except OSError as exc:
        raise click.UsageError(f"cannot read config file: {exc}")
    except yaml.YAMLError as exc:
        raise click.UsageError(f"config file is not valid YAML/JSON: {exc}")
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise click.UsageError("config file must hold a mapping of blocks")
    unknown = set(data) - set(_CONFIG_BLOCKS)
    if unknown:
        raise click.UsageError(
            f"unknown config block(s): {', '.join(sorted(unknown))}"
        )
    for block, content in data.items():
        if not isinstance(content, dict):
            raise click.UsageError(f"config block {block!r} must be a mapping")
    return data


def _resolve(flag_value, file_block: dict, key: str, default):
    """Flag > config file > default."""
    if flag_value is not None:
        return flag_value
    if key in file_block:
        return file_block[key]
    return default


def _parse_dipole(text) -> tuple:
    if isinstance(text, (list, tuple)):
        parts = list(text)
    else:
        lowered = str(text).strip().lower()
        if lowered in _DIPOLE_SHORTHANDS:
            return _DIPOLE_SHORTHANDS[lowered]
        parts = lowered.split(",")
        if len(parts) != 3:
            raise click.UsageError(
                f"dipole must be one of {sorted(_DIPOLE_SHORTHANDS)} or "
                f"three comma-separated complex numbers, got {text!r}"
            )
    try:
        vec = tuple(complex(str(c).strip()) for c in parts)
    except ValueError as exc:
        raise click.UsageError(f"cannot parse dipole {text!r}: {exc}")
    if max(abs(c) for c in vec) == 0.0:
        raise click.UsageError("dipole must be nonzero")
    return vec


def _dipole_repr(vec: tuple) -> str:
    return ",".join(format(c, "g").replace("(", "").replace(")", "")
                    for c in vec)


class _Resolved:
    """Fully resolved run inputs shared by the subcommands."""

    def __init__(self, ctx_params: dict, needs_omega0: bool = False):
        cfg = _load_config_file(ctx_params.get("config"))
        mat = cfg.get("material", {})
        emi = cfg.get("emitter", {})
        qd = cfg.get("quadrature", {})
        run = cfg.get("run", {})
        out = cfg.get("output", {})
        p = ctx_params

        self.omega_c = float(_resolve(p.get("omega_c"), mat, "omega_c", 0.4))
        self.gamma_damp = float(
            _resolve(p.get("gamma_damp"), mat, "gamma_damp", 0.015))
        if self.gamma_damp < 0.0:
            raise click.UsageError("gamma_damp must be >= 0")

        dipole_raw = _resolve(p.get("dipole"), emi, "dipole", "z")
        self.dipole = _parse_dipole(dipole_raw)
        self.d = float(_resolve(p.get("emitter_d"), emi, "d", 0.01))
        self.omega0 = _resolve(p.get("omega0"), emi, "omega0",
                               0.8 if needs_omega0 else None)
        if self.omega0 is not None:
            self.omega0 = float(self.omega0)
        self.gamma_debye = _resolve(p.get("gamma_debye"), emi, "gamma_debye",
                                    None)
        if self.gamma_debye is not None:
            self.gamma_debye = float(self.gamma_debye)
        self.d_nm = _resolve(p.get("d_nm"), emi, "d_nm", None)
        if self.d_nm is not None:
            self.d_nm = float(self.d_nm)
        if self.d <= 0.0:
            raise click.UsageError("emitter height d must be positive")

        self.rel_tol = float(_resolve(p.get("rel_tol"), qd, "rel_tol", 1e-6))
        self.k_max_factor = float(
            _resolve(p.get("k_max_factor"), qd, "k_max_factor", 30.0))
        if self.rel_tol <= 0.0 or self.k_max_factor <= 1.0:
            raise click.UsageError(
                "quadrature needs rel_tol > 0 and k_max_factor > 1")

        self.path = _resolve(p.get("path"), run, "path", None)
        if self.path is not None and self.path not in FORCE_PATHS:
            raise click.UsageError(
                f"unknown path {self.path!r}; choose from {FORCE_PATHS}")

        self.out = _resolve(p.get("out"), out, "path", "-")
        self.format = _resolve(p.get("format"), out, "format", "csv")
        if self.format not in ("csv", "json"):
            raise click.UsageError("format must be csv or json")

        self.file_cfg = cfg

    def params(self, omega_c: float | None = None) -> PlasmaParams:
        wc = self.omega_c if omega_c is None else omega_c
        return PlasmaParams(omega_c=wc, gamma_damp=self.gamma_damp)

    def quad(self) -> QuadratureSpec:
        return QuadratureSpec(rel_tol=self.rel_tol,
                              k_max_factor=self.k_max_factor)

    def emitter(self, omega0: float | None = None,
                d: float | None = None) -> Emitter:
        w0 = self.omega0 if omega0 is None else omega0
        if w0 is None:
            raise click.UsageError("omega0 is required (flag or config)")
        return Emitter(self.dipole, d=self.d if d is None else d, omega0=w0,
                       gamma_debye=self.gamma_debye, d_nm=self.d_nm)

    def resolved_dict(self, command: str, extra: dict) -> dict:
        return {
            "command": command,
            "material": {"omega_c": self.omega_c,
                         "gamma_damp": self.gamma_damp},
            "emitter": {"dipole": _dipole_repr(self.dipole), "d": self.d,
                        "omega0": self.omega0,
                        "gamma_debye": self.gamma_debye, "d_nm": self.d_nm},
            "quadrature": {"rel_tol": self.rel_tol,
                           "k_max_factor": self.k_max_factor},
            "run": {"path": self.path},
            **extra,
        }


# ---------------------------------------------------------------------------
# output plumbing
# ---------------------------------------------------------------------------

def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), ".12g")


def _derived_block(resolved: _Resolved) -> dict:
    freqs = characteristic_frequencies(resolved.params())
    return {
        "omega_spp": float(freqs.omega_spp),
        "omega_minus": float(freqs.omega_minus),
        "omega_plus": float(freqs.omega_plus),
    }


def _write_output(resolved: _Resolved, command: str, extra_cfg: dict,
                  columns: list, rows: list):
    """Serialize rows; returns the exit code contribution (0/3/4)."""
    config = resolved.resolved_dict(command, extra_cfg)
    derived = _derived_block(resolved)
    ok_idx = columns.index("ok") if "ok" in columns else None
    n_fail = 0
    if ok_idx is not None:
        n_fail = sum(1 for r in rows if not r[ok_idx])

    if resolved.format == "csv":
        buf = io.StringIO()
        buf.write(f"# spprecoil {__version__}\n")
        buf.write("# config: "
                  + json.dumps(config, sort_keys=True, default=str) + "\n")
        buf.write("# derived: " + json.dumps(derived, sort_keys=True) + "\n")
        buf.write(",".join(columns) + "\n")
        for row in rows:
            cells = []
            for cell in row:
                text = _fmt(cell)
                if "," in text or '"' in text:
                    text = '"' + text.replace('"', '""') + '"'
                cells.append(text)
            buf.write(",".join(cells) + "\n")
        payload = buf.getvalue()
    else:
        payload = json.dumps(
            {
                "tool": "spprecoil",
                "version": __version__,
                "config": config,
                "derived": derived,
                "columns": columns,
                "rows": [[(None if c is None else c) for c in row]
                         for row in rows],
            },
            sort_keys=True, indent=1, default=str,
        ) + "\n"

    if resolved.out in ("-", ""):
        sys.stdout.write(payload)
    else:
        with open(resolved.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(payload)

    if rows and n_fail == len(rows):
        return 3
    if n_fail:
        return 4
    return 0


def _worker_count() -> int:
    raw = os.environ.get("SPPRECOIL_WORKERS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise click.UsageError(f"SPPRECOIL_WORKERS must be an integer: {raw!r}")
    return max(1, n)


def _map_points(fn, points):
    """Evaluate fn over points, preserving order; failures become messages.

    Returns a list of (payload, error) with exactly one of the two set.
    """
    def safe(pt):
        try:
            return fn(pt), None
        except (NumericalError, ValueError, ZeroDivisionError) as exc:
            return None, f"{type(exc).__name__}: {exc}"

    workers = _worker_count()
    if workers == 1:
        return [safe(pt) for pt in points]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(safe, points))


def _finite_or_fail(values):
    if not all(np.isfinite(v) for v in values):
        raise NumericalError("non-finite result")
    return values


# ---------------------------------------------------------------------------
# shared options
# ---------------------------------------------------------------------------

def _common_options(fn):
    decorators = [
        click.option("--config", type=click.Path(), default=None,
                     help="YAML/JSON config file; flags override it."),
        click.option("--omega-c", type=float, default=None,
                     help="Cyclotron bias in omega_p units."),
        click.option("--gamma-damp", type=float, default=None,
                     help="Collision damping in omega_p units."),
        click.option("--dipole", type=str, default=None,
                     help="x | y | z | x+iz | 'cx,cy,cz' complex triple."),
        click.option("--emitter-d", "--d", "emitter_d", type=float,
                     default=None, help="Emitter height in c/omega_p."),
        click.option("--gamma-debye", type=float, default=None,
                     help="Dipole magnitude in debye (SI output only)."),
        click.option("--d-nm", type=float, default=None,
                     help="Emitter height in nm (SI output only)."),
        click.option("--rel-tol", type=float, default=None,
                     help="Spectral-integral relative tolerance."),
        click.option("--k-max-factor", type=float, default=None,
                     help="Spectral cutoff multiplier (units of 1/d)."),
        click.option("--out", type=str, default=None,
                     help="Output file ('-' for stdout)."),
        click.option("--format", "format", type=click.Choice(["csv", "json"]),
                     default=None, help="Output format."),
    ]
    for dec in reversed(decorators):
        fn = dec(fn)
    return fn


def _path_option(default_help):
    return click.option("--path", type=click.Choice(FORCE_PATHS),
                        default=None,
                        help=f"Force computation path (default {default_help}).")


def _force_for_path(resolved: _Resolved, emitter: Emitter,
                    params: PlasmaParams, path: str):
    if path == "exact":
        return resonant_force(emitter, params, resolved.quad())
    if path == "quasistatic-integral":
        return quasistatic_force_integral(emitter, params)
    if path == "quasistatic-residue":
        return quasistatic_force_residue(emitter, params)
    if path == "weak-bias":
        fx = weak_bias_force(emitter.omega0, params.omega_c)
        return type("WB", (), {"F_tilde_x": fx, "F_tilde_y": 0.0,
                               "err_estimate": 0.0})()
    raise click.UsageError(f"unknown path {path!r}")


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

@click.group()
@click.version_option(version=__version__, prog_name="spprecoil")
def main():
    """Lateral recoil force on emitters above a magnetized plasma surface."""


@main.command("sweep-frequency")
@_common_options
@_path_option("exact")
@click.option("--start", type=float, default=None, help="First omega0.")
@click.option("--stop", type=float, default=None, help="Last omega0.")
@click.option("--steps", type=int, default=None, help="Number of points.")
def sweep_frequency(**kw):
    """Force versus transition frequency at fixed bias."""
    resolved = _Resolved(kw)
    sweep = resolved.file_cfg.get("sweep", {})
    start = float(_resolve(kw.get("start"), sweep, "start", 0.45))
    stop = float(_resolve(kw.get("stop"), sweep, "stop", 1.0))
    steps = int(_resolve(kw.get("steps"), sweep, "steps", 23))
    if steps < 1:
        raise click.UsageError("steps must be >= 1")
    path = resolved.path or "exact"
    params = resolved.params()
    grid = np.linspace(start, stop, steps)

    def point(w0: float):
        res = _force_for_path(resolved, resolved.emitter(omega0=w0), params,
                              path)
        return _finite_or_fail(
            [res.F_tilde_x, res.F_tilde_y, res.err_estimate])

    rows = []
    for w0, (payload, err) in zip(grid, _map_points(point, grid)):
        if err is None:
            rows.append([w0, *payload, 1, ""])
        else:
            rows.append([w0, None, None, None, 0, err])
    code = _write_output(
        resolved, "sweep-frequency",
        {"sweep": {"start": start, "stop": stop, "steps": steps}},
        ["omega0", "F_tilde_x", "F_tilde_y", "err", "ok", "error"], rows)
    sys.exit(code)


@main.command("map")
@_common_options
@_path_option("quasistatic-integral")
@click.option("--start", type=float, default=None, help="First omega0.")
@click.option("--stop", type=float, default=None, help="Last omega0.")
@click.option("--steps", type=int, default=None, help="omega0 points.")
@click.option("--bias-start", type=float, default=None, help="First omega_c.")
@click.option("--bias-stop", type=float, default=None, help="Last omega_c.")
@click.option("--bias-steps", type=int, default=None, help="omega_c points.")
def map_cmd(**kw):
    """|F_tilde_x| over the (omega0, omega_c) plane."""
    resolved = _Resolved(kw)
    sweep = resolved.file_cfg.get("sweep", {})
    bias = resolved.file_cfg.get("bias", {})
    start = float(_resolve(kw.get("start"), sweep, "start", 0.45))
    stop = float(_resolve(kw.get("stop"), sweep, "stop", 1.0))
    steps = int(_resolve(kw.get("steps"), sweep, "steps", 23))
    b0 = float(_resolve(kw.get("bias_start"), bias, "start", 0.05))
    b1 = float(_resolve(kw.get("bias_stop"), bias, "stop", 0.8))
    bn = int(_resolve(kw.get("bias_steps"), bias, "steps", 16))
    if steps < 1 or bn < 1:
        raise click.UsageError("steps must be >= 1")
    path = resolved.path or "quasistatic-integral"
    grid = [(w0, wc) for wc in np.linspace(b0, b1, bn)
            for w0 in np.linspace(start, stop, steps)]

    def point(pt):
        w0, wc = pt
        res = _force_for_path(resolved, resolved.emitter(omega0=w0),
                              resolved.params(wc), path)
        return _finite_or_fail([abs(res.F_tilde_x)])

    rows = []
    for (w0, wc), (payload, err) in zip(grid, _map_points(point, grid)):
        if err is None:
            rows.append([w0, wc, payload[0], 1, ""])
        else:
            rows.append([w0, wc, None, 0, err])
    code = _write_output(
        resolved, "map",
        {"sweep": {"start": start, "stop": stop, "steps": steps},
         "bias": {"start": b0, "stop": b1, "steps": bn}},
        ["omega0", "omega_c", "abs_F_tilde_x", "ok", "error"], rows)
    sys.exit(code)


@main.command("sweep-bias")
@_common_options
@_path_option("quasistatic-integral")
@click.option("--omega0", type=float, default=None,
              help="Transition frequency.")
@click.option("--start", type=float, default=None, help="First omega_c.")
@click.option("--stop", type=float, default=None, help="Last omega_c.")
@click.option("--steps", type=int, default=None, help="Number of points.")
def sweep_bias(**kw):
    """Force versus bias at fixed transition frequency."""
    resolved = _Resolved(kw, needs_omega0=True)
    sweep = resolved.file_cfg.get("bias", resolved.file_cfg.get("sweep", {}))
    start = float(_resolve(kw.get("start"), sweep, "start", 0.01))
    stop = float(_resolve(kw.get("stop"), sweep, "stop", 0.8))
    steps = int(_resolve(kw.get("steps"), sweep, "steps", 17))
    if steps < 1:
        raise click.UsageError("steps must be >= 1")
    path = resolved.path or "quasistatic-integral"
    emitter = resolved.emitter()
    grid = np.linspace(start, stop, steps)

    def point(wc: float):
        res = _force_for_path(resolved, emitter, resolved.params(wc), path)
        return _finite_or_fail(
            [res.F_tilde_x, res.F_tilde_y, res.err_estimate])

    rows = []
    for wc, (payload, err) in zip(grid, _map_points(point, grid)):
        if err is None:
            rows.append([wc, *payload, 1, ""])
        else:
            rows.append([wc, None, None, None, 0, err])
    code = _write_output(
        resolved, "sweep-bias",
        {"bias": {"start": start, "stop": stop, "steps": steps},
         "emitter_omega0": emitter.omega0},
        ["omega_c", "F_tilde_x", "F_tilde_y", "err", "ok", "error"], rows)
    sys.exit(code)


@main.command("angle")
@_common_options
@click.option("--start", type=float, default=None, help="First omega0.")
@click.option("--stop", type=float, default=None, help="Last omega0.")
@click.option("--steps", type=int, default=None, help="Number of points.")
def angle(**kw):
    """Resonant surface-mode launch angle versus transition frequency."""
    resolved = _Resolved(kw)
    sweep = resolved.file_cfg.get("sweep", {})
    params = resolved.params().lossless()
    freqs = characteristic_frequencies(params)
    start = float(_resolve(kw.get("start"), sweep, "start",
                           freqs.omega_minus))
    stop = float(_resolve(kw.get("stop"), sweep, "stop", freqs.omega_plus))
    steps = int(_resolve(kw.get("steps"), sweep, "steps", 37))
    if steps < 1:
        raise click.UsageError("steps must be >= 1")
    rows = []
    n_fail = 0
    for w0 in np.linspace(start, stop, steps):
        theta0 = emission_angle(float(w0), params)
        if theta0 is None:
            rows.append([w0, None, 0, "outside the surface-mode band"])
            n_fail += 1
        else:
            rows.append([w0, np.degrees(theta0), 1, ""])
    code = _write_output(
        resolved, "angle",
        {"sweep": {"start": start, "stop": stop, "steps": steps}},
        ["omega0", "theta0_deg", "ok", "error"], rows)
    sys.exit(code)


@main.command("efc")
@_common_options
@click.option("--omega", type=float, default=None,
              help="Contour frequency in omega_p units.")
@click.option("--theta-steps", type=int, default=None,
              help="Number of directions scanned.")
def efc(**kw):
    """Equifrequency contour of the bound surface mode."""
    resolved = _Resolved(kw)
    contour_cfg = resolved.file_cfg.get("contour", {})
    omega = float(_resolve(kw.get("omega"), contour_cfg, "omega", 0.7))
    n = int(_resolve(kw.get("theta_steps"), contour_cfg, "theta_steps", 181))
    if n < 4:
        raise click.UsageError("theta_steps must be >= 4")
    contour = trace_efc(omega, resolved.params(),
                        theta_grid=np.linspace(-np.pi, np.pi, n))
    rows = [
        [s.theta, s.k * np.cos(s.theta), s.k * np.sin(s.theta),
         float(s.vg_dir[0]), float(s.vg_dir[1]), contour.topology, 1, ""]
        for s in contour.samples
    ]
    code = _write_output(
        resolved, "efc", {"contour": {"omega": omega, "theta_steps": n}},
        ["theta", "kx_over_k0", "ky_over_k0", "vgx", "vgy", "topology",
         "ok", "error"], rows)
    if not rows:
        code = 3
    sys.exit(code)


@main.command("farfield")
@_common_options
@click.option("--omega", type=float, default=None,
              help="Emission frequency in omega_p units.")
@click.option("--theta-steps", type=int, default=None,
              help="Number of directions scanned.")
@click.option("--bin-deg", type=float, default=None, help="Bin width (deg).")
@click.option("--smooth-deg", type=float, default=None,
              help="Smoothing half-width (deg).")
def farfield(**kw):
    """Azimuthal surface-wave power pattern launched by the dipole."""
    resolved = _Resolved(kw)
    contour_cfg = resolved.file_cfg.get("contour", {})
    omega = float(_resolve(kw.get("omega"), contour_cfg, "omega", 0.7))
    n = int(_resolve(kw.get("theta_steps"), contour_cfg, "theta_steps", 720))
    if n < 4:
        raise click.UsageError("theta-steps must be at least 4")
    bin_deg = float(_resolve(kw.get("bin_deg"), contour_cfg, "bin_deg", 1.0))
    smooth = float(_resolve(kw.get("smooth_deg"), contour_cfg, "smooth_deg",
                            3.0))
    # half-step offset keeps isotropic contours off the bin edges
    step = 2.0 * np.pi / n
    grid = np.linspace(-np.pi, np.pi, n + 1)[:-1] + 0.5 * step
    pattern = farfield_pattern(omega, np.asarray(resolved.dipole),
                               resolved.params(), theta_grid=grid,
                               height=resolved.d,
                               bin_deg=bin_deg, smooth_deg=smooth)
    rows = [[np.degrees(az), inten, 1, ""]
            for az, inten in zip(pattern.azimuth, pattern.intensity)]
    code = _write_output(
        resolved, "farfield",
        {"contour": {"omega": omega, "theta_steps": n, "bin_deg": bin_deg,
                     "smooth_deg": smooth}},
        ["azimuth_deg", "intensity", "ok", "error"], rows)
    if not rows:
        code = 3
    sys.exit(code)


@main.command("pump")
@_common_options
@_path_option("exact")
@click.option("--omega0", type=float, default=None,
              help="Transition frequency.")
@click.option("--omega-tilde", type=float, default=None,
              help="Pump strength Omega/(2 Gamma).")
@click.option("--t-stop", type=float, default=None,
              help="Last time in 1/Gamma units.")
@click.option("--t-steps", type=int, default=None, help="Number of times.")
def pump(**kw):
    """Force and population decay under resonant pumping."""
    resolved = _Resolved(kw, needs_omega0=True)
    pump_cfg = resolved.file_cfg.get("pump", {})
    om_tilde = float(_resolve(kw.get("omega_tilde"), pump_cfg, "Omega_tilde",
                              0.0))
    t_stop = float(_resolve(kw.get("t_stop"), pump_cfg, "t_stop", 10.0))
    t_steps = int(_resolve(kw.get("t_steps"), pump_cfg, "t_steps", 101))
    if t_steps < 1 or t_stop < 0.0:
        raise click.UsageError("need t_steps >= 1 and t_stop >= 0")
    path = resolved.path or "exact"
    emitter = resolved.emitter()
    try:
        static = _force_for_path(resolved, emitter, resolved.params(), path)
        trace = population_trace(np.linspace(0.0, t_stop, t_steps), om_tilde)
    except (NumericalError, ValueError) as exc:
        click.echo(f"numerical failure: {exc}", err=True)
        sys.exit(3)
    rows = [[t, rho, rho * static.F_tilde_x, 1, ""]
            for t, rho in zip(trace.t_tilde, trace.rho_ee)]
    code = _write_output(
        resolved, "pump",
        {"pump": {"Omega_tilde": om_tilde, "t_stop": t_stop,
                  "t_steps": t_steps},
         "static_F_tilde_x": static.F_tilde_x},
        ["t_tilde", "rho_ee", "F_tilde_x", "ok", "error"], rows)
    sys.exit(code)


@main.command("force-point")
@_common_options
@_path_option("exact")
@click.option("--omega0", type=float, default=None,
              help="Transition frequency.")
def force_point(**kw):
    """Single-point force with SI conversion and path cross-check."""
    resolved = _Resolved(kw, needs_omega0=True)
    path = resolved.path or "exact"
    emitter = resolved.emitter()
    params = resolved.params()
    try:
        res = _force_for_path(resolved, emitter, params, path)
        comparator = (quasistatic_force_integral(emitter, params)
                      if path != "quasistatic-integral" else None)
    except (NumericalError, ValueError) as exc:
        click.echo(f"numerical failure: {exc}", err=True)
        sys.exit(3)
    f0_pn = (force_normalization(emitter.gamma_debye, emitter.d_nm)
             if emitter.gamma_debye is not None and emitter.d_nm is not None
             else None)
    delta = None
    if comparator is not None and res.F_tilde_x != 0.0:
        delta = abs(comparator.F_tilde_x - res.F_tilde_x) / abs(res.F_tilde_x)
    fx_pn = res.F_tilde_x * f0_pn if f0_pn is not None else None
    rows = [[emitter.omega0, res.F_tilde_x, res.F_tilde_y, res.err_estimate,
             f0_pn, fx_pn, delta, 1, ""]]
    code = _write_output(
        resolved, "force-point", {},
        ["omega0", "F_tilde_x", "F_tilde_y", "err", "F0_pN", "F_x_pN",
         "delta_vs_quasistatic", "ok", "error"], rows)
    sys.exit(code)
