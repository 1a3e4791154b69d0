"""Command-line surface: derive Kraus sets, verify invariants, emit figure data.

Exit codes are part of the interface: 0 success, 1 failed verification
check, 2 configuration error, 3 pipeline error, 4 unwritable output. The
environment variable KRAUS_FORGE_TOL globally overrides every verification
tolerance. Identical configurations produce byte-identical output files.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from dataclasses import dataclass, field

import numpy as np

from . import bloch as bloch_mod
from . import gad as gad_mod
from . import pd as pd_mod
from .errors import KrausForgeError
from .kraus import (
    WEIGHT_CUTOFF,
    choi_distance,
    choi_from_propagator,
    kraus_from_choi,
    kraus_set_to_dict,
    propagate,
)
from .linalg import hermitian_eig, matrix_exp


class ConfigError(Exception):
    """Bad flags or config file; maps to exit code 2."""


# ----------------------------------------------------------------------
# configuration
# ----------------------------------------------------------------------

_GAD_PHYSICAL_KEYS = ("alpha", "omega0", "cutoff", "temperature")


@dataclass
class RunConfig:
    """Merged view of config-file values and command-line flags."""

    channel: str = "gad"
    parameterization: dict = field(default_factory=dict)
    times: list[float] = field(default_factory=list)
    output: str | None = None
    fmt: str = "json"
    weight_cutoff: float = WEIGHT_CUTOFF
    tolerances: dict[str, float] = field(default_factory=dict)
    tol_override: float | None = None
    # figure-specific
    figure: str | None = None
    temperatures: list[float] = field(default_factory=list)
    figure_times: list[float] = field(default_factory=list)
    grid: tuple[int, int] = (24, 12)


def _load_config_file(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            doc = json.load(handle)
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError("config file must hold a JSON object")
    return doc


def _floats_csv(text: str, what: str) -> list[float]:
    try:
        return [float(part) for part in text.split(",") if part.strip() != ""]
    except ValueError as exc:
        raise ConfigError(f"cannot parse {what} list {text!r}") from exc


def _resolve_times(cfg_file: dict, args: argparse.Namespace, param: dict) -> list[float]:
    if getattr(args, "t", None) is not None:
        return [args.t]
    # for the scaled parameterization the time variable is tau itself
    if param.get("kind") == "scaled" and param.get("tau") is not None:
        return [float(param["tau"])]
    grid = cfg_file.get("time_grid", {})
    start = args.t_start if args.t_start is not None else grid.get("start")
    end = args.t_end if args.t_end is not None else grid.get("end")
    steps = args.steps if args.steps is not None else grid.get("steps")
    if start is None or end is None or steps is None:
        raise ConfigError(
            "no time specified: use --t, --tau (scaled), or --t-start/--t-end/--steps"
        )
    start, end, steps = float(start), float(end), int(steps)
    if steps < 1:
        raise ConfigError(f"steps must be >= 1, got {steps}")
    if start > end:
        raise ConfigError(f"t_start {start} exceeds t_end {end}")
    if steps == 1:
        return [start]
    return list(np.linspace(start, end, steps))


def _resolve_parameterization(cfg_file: dict, args: argparse.Namespace, channel: str) -> dict:
    param = dict(cfg_file.get("parameterization", {}))
    kinds = [
        kind
        for kind, flag in (
            ("scaled", getattr(args, "scaled", False)),
            ("physical", getattr(args, "physical", False)),
            ("rates", getattr(args, "rates", False)),
        )
        if flag
    ]
    if len(kinds) > 1:
        raise ConfigError("give at most one of --scaled / --physical / --rates")
    if kinds:
        param["kind"] = kinds[0]

    for key in ("theta", "omega", "tau", "alpha", "omega0", "cutoff", "temperature", "x", "y", "z", "rate"):
        value = getattr(args, key, None)
        if value is not None:
            param[key] = value
    if getattr(args, "shift", False):
        param["shift"] = True

    if "kind" not in param:
        # infer from which flags are present
        if channel == "pd" and param.get("rate") is not None:
            param["kind"] = "rates"
        elif all(param.get(k) is not None for k in _GAD_PHYSICAL_KEYS):
            param["kind"] = "physical"
        elif channel == "gad" and param.get("y") is not None:
            param["kind"] = "rates"
        else:
            raise ConfigError("no parameterization given (use --scaled, --physical, or --rates)")

    kind = param["kind"]
    if channel == "gad" and kind == "scaled":
        if param.get("theta") is None or param.get("omega") is None:
            raise ConfigError("scaled parameterization needs --theta and --omega")
    elif kind == "physical":
        missing = [k for k in _GAD_PHYSICAL_KEYS if param.get(k) is None]
        if missing:
            raise ConfigError(f"physical parameterization needs --{', --'.join(missing)}")
    elif channel == "gad" and kind == "rates":
        if param.get("y") is None or param.get("z") is None:
            raise ConfigError("rates parameterization needs --y and --z (and optionally --x)")
    elif channel == "pd" and kind == "rates":
        if param.get("rate") is None:
            raise ConfigError("pd rates parameterization needs --rate")
    elif channel == "pd" and kind == "scaled":
        raise ConfigError("the scaled parameterization applies to the gad channel only")
    return param


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    cfg_file = _load_config_file(args.config) if getattr(args, "config", None) else {}
    channel = getattr(args, "channel", None) or cfg_file.get("channel")
    if args.command in ("derive",) and channel not in ("gad", "pd"):
        raise ConfigError(f"channel must be 'gad' or 'pd', got {channel!r}")

    cfg = RunConfig(channel=channel or "gad")
    cfg.output = getattr(args, "output", None) or cfg_file.get("output")
    cfg.fmt = getattr(args, "format", None) or cfg_file.get("format") or "json"
    if getattr(args, "weight_cutoff", None) is not None:
        cfg.weight_cutoff = args.weight_cutoff
    elif "weight_cutoff" in cfg_file:
        cfg.weight_cutoff = float(cfg_file["weight_cutoff"])
    tolerances = cfg_file.get("tolerances", {})
    if not isinstance(tolerances, dict):
        raise ConfigError("'tolerances' must be an object of name -> value")
    cfg.tolerances = {str(k): float(v) for k, v in tolerances.items()}
    if getattr(args, "tol", None) is not None:
        cfg.tol_override = args.tol
    env_tol = os.environ.get("KRAUS_FORGE_TOL")
    if env_tol is not None:
        try:
            cfg.tol_override = float(env_tol)
        except ValueError as exc:
            raise ConfigError(f"KRAUS_FORGE_TOL is not a float: {env_tol!r}") from exc

    if args.command == "derive":
        cfg.parameterization = _resolve_parameterization(cfg_file, args, cfg.channel)
        cfg.times = _resolve_times(cfg_file, args, cfg.parameterization)
        if cfg.fmt != "json":
            raise ConfigError("derive emits JSON documents; use --format json")
    elif args.command == "figure":
        fig_file = cfg_file.get("figure", {})
        cfg.figure = getattr(args, "figure", None) or fig_file.get("kind")
        if cfg.figure not in ("bloch3d", "volume_rate"):
            raise ConfigError("figure kind must be 'bloch3d' or 'volume_rate'")
        temps = getattr(args, "temperatures", None) or fig_file.get("temperatures")
        if temps is None:
            raise ConfigError("figure needs --temperatures")
        cfg.temperatures = _floats_csv(temps, "temperatures") if isinstance(temps, str) else [float(t) for t in temps]
        times = getattr(args, "times", None) or fig_file.get("times")
        if cfg.figure == "bloch3d":
            if times is None:
                raise ConfigError("bloch3d needs --times")
            cfg.figure_times = _floats_csv(times, "times") if isinstance(times, str) else [float(t) for t in times]
        else:
            cfg.times = _resolve_times(cfg_file, args, {})
        grid = getattr(args, "grid", None) or fig_file.get("grid")
        if grid is not None:
            if isinstance(grid, str):
                try:
                    n_u, n_v = (int(part) for part in grid.lower().split("x"))
                except ValueError as exc:
                    raise ConfigError(f"cannot parse grid {grid!r}, expected like 24x12") from exc
            else:
                n_u, n_v = int(grid[0]), int(grid[1])
            cfg.grid = (n_u, n_v)
        bath = dict(cfg_file.get("bath", {}))
        for key, default in (("alpha", 0.02), ("omega0", 10.0), ("cutoff", 15.0)):
            value = getattr(args, key, None)
            bath[key] = value if value is not None else bath.get(key, default)
        cfg.parameterization = bath
        if cfg.output is None:
            raise ConfigError("figure needs --output DIRECTORY")
    return cfg


# ----------------------------------------------------------------------
# derive
# ----------------------------------------------------------------------

def _gad_rates_from_param(param: dict) -> gad_mod.GadRates:
    if param["kind"] == "physical":
        bath = gad_mod.BathSpectrum(
            alpha=param["alpha"],
            omega0=param["omega0"],
            omega_c=param["cutoff"],
            temperature=param["temperature"],
        )
        x = param.get("x")
        if x is None:
            x = gad_mod.hamiltonian_shift(bath) if param.get("shift") else 0.0
        return gad_mod.rates_from_physics(bath, x=x)
    return gad_mod.GadRates(
        x=param.get("x") or 0.0, y=param["y"], z=param["z"]
    )


def _derive_document(cfg: RunConfig) -> dict:
    points = []
    param = cfg.parameterization
    if cfg.channel == "gad" and param["kind"] == "scaled":
        for tau in cfg.times:
            scaled = gad_mod.GadScaled(param["theta"], param["omega"], tau)
            generator = gad_mod.gad_L_scaled(scaled)
            points.append(_derive_point(generator, tau, cfg.weight_cutoff, scaled=scaled))
    elif cfg.channel == "gad":
        rates = _gad_rates_from_param(param)
        generator = gad_mod.gad_L(rates)
        for t in cfg.times:
            points.append(
                _derive_point(
                    generator, t, cfg.weight_cutoff, scaled=gad_mod.rescale(rates, t), rates=rates
                )
            )
    else:
        if param["kind"] == "physical":
            bath = gad_mod.BathSpectrum(
                alpha=param["alpha"],
                omega0=param["omega0"],
                omega_c=param["cutoff"],
                temperature=param["temperature"],
            )
            pd_params = pd_mod.pd_rate_from_physics(bath)
        else:
            pd_params = pd_mod.PdParams(param["rate"])
        generator = pd_mod.pd_L(pd_params)
        for t in cfg.times:
            point = _derive_point(generator, t, cfg.weight_cutoff)
            point["rate"] = pd_params.r
            points.append(point)
    return {
        "channel": cfg.channel,
        "parameterization": param,
        "points": points,
    }


def _derive_point(
    generator: np.ndarray,
    t: float,
    cutoff: float,
    scaled: gad_mod.GadScaled | None = None,
    rates: gad_mod.GadRates | None = None,
) -> dict:
    propagator = propagate(generator, t)
    choi = choi_from_propagator(propagator)
    kset = kraus_from_choi(choi, cutoff=cutoff)
    point = {
        "t": float(t),
        "kraus": kraus_set_to_dict(kset),
        "choi_eigenvalues": [float(v) for v in hermitian_eig(choi)[0]],
        "completeness_residual": kset.completeness_residual(),
    }
    if scaled is not None:
        point["scaled"] = {"theta": scaled.theta, "omega": scaled.omega, "tau": scaled.tau}
    if rates is not None:
        point["rates"] = {"x": rates.x, "y": rates.y, "z": rates.z}
    return point


def cmd_derive(cfg: RunConfig) -> int:
    document = _derive_document(cfg)
    text = json.dumps(document, indent=2) + "\n"
    if cfg.output in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(cfg.output, "w", encoding="utf-8") as handle:
            handle.write(text)
    return 0


# ----------------------------------------------------------------------
# verify
# ----------------------------------------------------------------------

_GAD_GRID = {
    "theta": (0.0, 1.0, 5.0),
    "omega": (-2.0, -1.0, -0.1),
    "tau": (0.1, 0.5, 1.0, 2.0, 5.0),
}


def _check(name: str, residual: float, tolerance: float) -> dict:
    return {
        "name": name,
        "residual": float(residual),
        "tolerance": float(tolerance),
        "passed": bool(residual <= tolerance),
    }


def _verify_gad_checks() -> list[tuple[str, float, float]]:
    closed_vs_numeric = 0.0
    spectrum = 0.0
    eig_sum = 0.0
    completeness = 0.0
    closed_vs_pipeline = 0.0
    reference_vs_pipeline = 0.0
    textbook = 0.0
    for theta in _GAD_GRID["theta"]:
        for omega in _GAD_GRID["omega"]:
            for tau in _GAD_GRID["tau"]:
                scaled = gad_mod.GadScaled(theta, omega, tau)
                closed_f = gad_mod.gad_F_closed(scaled)
                numeric_f = matrix_exp(gad_mod.gad_L_scaled(scaled), tau)
                closed_vs_numeric = max(
                    closed_vs_numeric, float(np.abs(closed_f - numeric_f).max())
                )
                choi = choi_from_propagator(closed_f)
                pipeline_vals = hermitian_eig(choi)[0]
                closed_vals = np.sort(gad_mod.gad_choi_eigenvalues(scaled))[::-1]
                spectrum = max(spectrum, float(np.abs(pipeline_vals - closed_vals).max()))
                eig_sum = max(eig_sum, abs(float(closed_vals.sum()) - 2.0))
                pipeline_set = kraus_from_choi(choi)
                closed_set = gad_mod.gad_kraus_closed(scaled)
                reference_set = gad_mod.compose_z_rotation(
                    gad_mod.reference_gad_kraus(gad_mod.ReferenceGadParams.from_scaled(scaled)),
                    theta * tau,
                )
                completeness = max(
                    completeness,
                    pipeline_set.completeness_residual(),
                    closed_set.completeness_residual(),
                    reference_set.completeness_residual(),
                )
                closed_vs_pipeline = max(
                    closed_vs_pipeline, choi_distance(closed_set, pipeline_set)
                )
                reference_vs_pipeline = max(
                    reference_vs_pipeline, choi_distance(reference_set, pipeline_set)
                )
    asymptotic = 0.0
    for omega in _GAD_GRID["omega"]:
        pipeline_set = kraus_from_choi(
            choi_from_propagator(gad_mod.gad_F_closed(gad_mod.GadScaled(0.0, omega, 20.0)))
        )
        asymptotic = max(
            asymptotic, choi_distance(pipeline_set, gad_mod.gad_kraus_asymptotic(omega))
        )
    for tau in _GAD_GRID["tau"]:
        lam = -math.expm1(-2.0 * tau)
        textbook = max(
            textbook,
            choi_distance(
                gad_mod.textbook_ad_kraus(lam),
                gad_mod.gad_kraus_closed(gad_mod.GadScaled(0.0, -2.0, tau)),
            ),
        )
    return [
        ("gad_closed_vs_numeric_propagator", closed_vs_numeric, 1e-9),
        ("gad_choi_spectrum", spectrum, 1e-10),
        ("gad_choi_eigenvalue_sum", eig_sum, 1e-12),
        ("gad_completeness", completeness, 1e-9),
        ("gad_closed_vs_pipeline_choi", closed_vs_pipeline, 1e-9),
        ("gad_reference_vs_pipeline_choi", reference_vs_pipeline, 1e-9),
        ("gad_asymptotic_limit", asymptotic, 1e-7),
        ("gad_textbook_equivalence", textbook, 1e-10),
    ]


def _verify_pd_checks() -> list[tuple[str, float, float]]:
    params = pd_mod.PdParams(1.0)
    generator = pd_mod.pd_L(params)
    pipeline_vs_closed = 0.0
    pipeline_vs_standard = 0.0
    completeness = 0.0
    bloch_residual = 0.0
    for t in (0.1, 1.0, 5.0):
        pipeline_set = kraus_from_choi(choi_from_propagator(propagate(generator, t)))
        closed_set = pd_mod.pd_kraus(params, t)
        standard_set = pd_mod.pd_standard_kraus(-math.expm1(-2.0 * params.r * t))
        completeness = max(
            completeness,
            pipeline_set.completeness_residual(),
            closed_set.completeness_residual(),
            standard_set.completeness_residual(),
        )
        pipeline_vs_closed = max(pipeline_vs_closed, choi_distance(pipeline_set, closed_set))
        pipeline_vs_standard = max(
            pipeline_vs_standard, choi_distance(pipeline_set, standard_set)
        )
        bmap = bloch_mod.bloch_map(closed_set)
        for u in np.linspace(0.0, 2.0 * np.pi, 6, endpoint=False):
            for v in np.linspace(0.0, np.pi, 6):
                direction = np.array(
                    [math.sin(v) * math.cos(u), math.sin(v) * math.sin(u), math.cos(v)]
                )
                solution = pd_mod.pd_bloch(params, t, u, v)
                bloch_residual = max(
                    bloch_residual, float(np.abs(bmap(direction) - solution).max())
                )
    return [
        ("pd_pipeline_vs_closed_choi", pipeline_vs_closed, 1e-12),
        ("pd_pipeline_vs_standard_choi", pipeline_vs_standard, 1e-12),
        ("pd_completeness", completeness, 1e-12),
        ("pd_bloch_solution", bloch_residual, 1e-9),
    ]


def cmd_verify(cfg: RunConfig) -> int:
    raw: list[tuple[str, float, float]] = []
    if cfg.channel in ("gad", "all", None):
        raw.extend(_verify_gad_checks())
    if cfg.channel in ("pd", "all", None):
        raw.extend(_verify_pd_checks())
    checks = []
    for name, residual, default_tol in raw:
        tol = cfg.tolerances.get(name, default_tol)
        if cfg.tol_override is not None:
            tol = cfg.tol_override
        checks.append(_check(name, residual, tol))
    for check in checks:
        status = "PASS" if check["passed"] else "FAIL"
        print(
            f"[{status}] {check['name']}: residual={check['residual']:.3e} "
            f"tolerance={check['tolerance']:.1e}"
        )
    if cfg.output not in (None, "-"):
        report = {"checks": checks, "all_passed": all(c["passed"] for c in checks)}
        with open(cfg.output, "w", encoding="utf-8") as handle:
            handle.write(json.dumps(report, indent=2) + "\n")
    return 0 if all(c["passed"] for c in checks) else 1


# ----------------------------------------------------------------------
# figure
# ----------------------------------------------------------------------

def _write_csv(path: str, header: list[str], rows: list[list[float]]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(header)
        for row in rows:
            writer.writerow([f"{value:.12g}" for value in row])


def _figure_bath(cfg: RunConfig, temperature: float) -> gad_mod.BathSpectrum:
    bath = cfg.parameterization
    return gad_mod.BathSpectrum(
        alpha=bath["alpha"],
        omega0=bath["omega0"],
        omega_c=bath["cutoff"],
        temperature=temperature,
    )


def cmd_figure(cfg: RunConfig) -> int:
    os.makedirs(cfg.output, exist_ok=True)
    written = []
    if cfg.figure == "bloch3d":
        uv = bloch_mod.spherical_grid(*cfg.grid)
        for temperature in cfg.temperatures:
            rates = gad_mod.rates_from_physics(_figure_bath(cfg, temperature))
            for t in cfg.figure_times:
                scaled = gad_mod.rescale(rates, t)
                bmap = bloch_mod.bloch_map(gad_mod.gad_kraus_closed(scaled))
                points = bloch_mod.sample_ellipsoid(bmap, cfg.grid)
                rows = [
                    [uv[i, 0], uv[i, 1], points[i, 0], points[i, 1], points[i, 2]]
                    for i in range(len(points))
                ]
                path = os.path.join(cfg.output, f"bloch3d_T{temperature:g}_t{t:g}.csv")
                _write_csv(path, ["u", "v", "x", "y", "z"], rows)
                written.append(path)
    else:
        for temperature in cfg.temperatures:
            rates = gad_mod.rates_from_physics(_figure_bath(cfg, temperature))
            rows = [[t, bloch_mod.volume_rate(rates, t)] for t in cfg.times]
            path = os.path.join(cfg.output, f"volume_rate_T{temperature:g}.csv")
            _write_csv(path, ["t", "kappa"], rows)
            written.append(path)
    for path in written:
        print(path)
    return 0


# ----------------------------------------------------------------------
# entry point
# ----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kraus-forge",
        description="Derive, verify, and visualize qubit noise-channel Kraus operators.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", help="JSON config file; flags override its values")
        p.add_argument("--output", help="output path ('-' for stdout)")
        p.add_argument("--tol", type=float, help="override every verification tolerance")

    derive = sub.add_parser("derive", help="run the generator -> propagator -> Choi -> Kraus pipeline")
    add_common(derive)
    derive.add_argument("--channel", choices=("gad", "pd"))
    derive.add_argument("--format", choices=("json", "csv"))
    derive.add_argument("--scaled", action="store_true", help="use (theta, omega, tau)")
    derive.add_argument("--physical", action="store_true", help="use (alpha, omega0, cutoff, temperature)")
    derive.add_argument("--rates", action="store_true", help="use raw rates (x, y, z) or --rate")
    derive.add_argument("--theta", type=float)
    derive.add_argument("--omega", type=float)
    derive.add_argument("--tau", type=float)
    derive.add_argument("--alpha", type=float)
    derive.add_argument("--omega0", type=float)
    derive.add_argument("--cutoff", type=float, help="bath cutoff frequency")
    derive.add_argument("--temperature", type=float)
    derive.add_argument("--shift", action="store_true", help="include the dispersive frequency shift in x")
    derive.add_argument("--x", type=float)
    derive.add_argument("--y", type=float)
    derive.add_argument("--z", type=float)
    derive.add_argument("--rate", type=float, help="pd dephasing rate")
    derive.add_argument("--t", type=float, help="single evaluation time")
    derive.add_argument("--t-start", dest="t_start", type=float)
    derive.add_argument("--t-end", dest="t_end", type=float)
    derive.add_argument("--steps", type=int)
    derive.add_argument("--weight-cutoff", dest="weight_cutoff", type=float)

    verify = sub.add_parser("verify", help="run the invariant and equivalence suites")
    add_common(verify)
    verify.add_argument("--channel", choices=("gad", "pd", "all"), default="all")

    figure = sub.add_parser("figure", help="emit CSV data reproducing the reference figures")
    add_common(figure)
    figure.add_argument("--figure", choices=("bloch3d", "volume_rate"))
    figure.add_argument("--temperatures", help="comma-separated temperatures")
    figure.add_argument("--times", help="comma-separated times (bloch3d)")
    figure.add_argument("--grid", help="ellipsoid sampling grid, e.g. 24x12")
    figure.add_argument("--alpha", type=float)
    figure.add_argument("--omega0", type=float)
    figure.add_argument("--cutoff", type=float)
    figure.add_argument("--t-start", dest="t_start", type=float)
    figure.add_argument("--t-end", dest="t_end", type=float)
    figure.add_argument("--steps", type=int)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _config_from_args(args)
        if args.command == "derive":
            return cmd_derive(cfg)
        if args.command == "verify":
            return cmd_verify(cfg)
        return cmd_figure(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except KrausForgeError as exc:
        print(f"pipeline error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
