"""Command-line front end.

    cavityio resonances --config scenario.ini --out results/
    cavityio extraction --preset highq_demo --out results/
    cavityio cat-demo   --preset fig2a --out results/ --format grid,json
    cavityio wigner-map --config scenario.ini --out results/

Configs are INI files; values are JSON literals, complex numbers are
``[re, im]`` pairs.  Exit status: 0 ok, 1 numerical failure, 2 bad config.
"""
from __future__ import annotations

import argparse
import configparser
import json
import sys
import warnings
from importlib import resources
from pathlib import Path

import numpy as np

from . import io as cio
from .extraction import NO_OUTPUT, ExtractionSettings, eta_curve, extract
from .optics import CavityGeometry, OpticalMedium, spectral_denominators
from .resonances import ResonanceError, locate_resonances
from .states import (ChannelConfig, ChannelCoupling, GridSpec, StateSpec,
                     cat_channels, cat_output_wigner, fidelity_condition,
                     line_values, negativity_metrics, output_wigner, sign_changes,
                     wigner_of)

EXIT_OK, EXIT_NUMERIC, EXIT_CONFIG = 0, 1, 2
FORMATS = ("csv", "json", "grid")


class ConfigError(ValueError):
    pass


# ---------------------------------------------------------------------------
# config access
# ---------------------------------------------------------------------------

class Scenario:
    """Typed access to an INI config with field-naming diagnostics."""

    def __init__(self, text: str, base: Path | None = None):
        self.raw = text.encode("utf-8")
        self.hash = cio.config_hash(self.raw)
        self.base = base or Path.cwd()
        self.cp = configparser.ConfigParser(interpolation=None)
        try:
            self.cp.read_string(text)
        except configparser.Error as exc:
            raise ConfigError(f"unparseable config: {exc}") from None

    def has(self, section, key=None):
        if key is None:
            return self.cp.has_section(section)
        return self.cp.has_option(section, key)

    def get(self, section, key, default=KeyError):
        if not self.cp.has_option(section, key):
            if default is KeyError:
                raise ConfigError(f"missing field [{section}] {key}")
            return default
        raw = self.cp.get(section, key)
        try:
            return json.loads(raw)
        except json.JSONDecodeError:
            return raw.strip()

    def number(self, section, key, default=KeyError, kind=float):
        v = self.get(section, key, default)
        if v is default and default is not KeyError:
            return v
        try:
            if isinstance(v, bool):
                raise TypeError
            return kind(v)
        except (TypeError, ValueError):
            raise ConfigError(f"field [{section}] {key} must be a {kind.__name__}, got {v!r}") from None

    def complex(self, section, key, default=KeyError):
        v = self.get(section, key, default)
        if v is default and default is not KeyError:
            return v
        return _as_complex(v, f"[{section}] {key}")


def _as_complex(v, name):
    if isinstance(v, (int, float, complex)) and not isinstance(v, bool):
        return complex(v)
    if isinstance(v, list) and len(v) == 2 and all(isinstance(x, (int, float)) for x in v):
        return complex(v[0], v[1])
    raise ConfigError(f"field {name} must be a number or [re, im] pair, got {v!r}")


def _guard(name, fn, *args, **kwargs):
    """Run a constructor, turning its validation error into a config error."""
    try:
        return fn(*args, **kwargs)
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"{name}: {exc}") from None


def load_scenario(args) -> Scenario:
    if args.preset:
        try:
            text = resources.files("cavityio").joinpath("presets", f"{args.preset}.ini").read_text()
        except FileNotFoundError:
            raise ConfigError(f"unknown preset {args.preset!r}; available: {', '.join(list_presets())}") from None
        return Scenario(text)
    if not args.config:
        raise ConfigError("either --config or --preset is required")
    path = Path(args.config)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    return Scenario(path.read_text(encoding="utf-8"), base=path.parent)


def list_presets():
    root = resources.files("cavityio").joinpath("presets")
    return sorted(p.name[:-4] for p in root.iterdir() if p.name.endswith(".ini"))


# ---------------------------------------------------------------------------
# section builders
# ---------------------------------------------------------------------------

def _medium(sc: Scenario, key):
    table_key = f"{key}_table"
    if sc.has("geometry", table_key):
        path = Path(sc.get("geometry", table_key))
        path = path if path.is_absolute() else sc.base / path
        if not path.is_file():
            raise ConfigError(f"field [geometry] {table_key}: file not found: {path}")
        try:
            data = np.loadtxt(path, delimiter=",", comments="#", ndmin=2)
        except ValueError as exc:
            raise ConfigError(f"field [geometry] {table_key}: {exc}") from None
        if data.shape[1] != 3:
            raise ConfigError(f"field [geometry] {table_key}: expected columns omega,re,im")
        return _guard(f"[geometry] {table_key}", OpticalMedium.from_table,
                      data[:, 0], data[:, 1] + 1j * data[:, 2])
    default = 1.0 if key == "n1" else KeyError
    return _guard(f"[geometry] {key}", OpticalMedium, sc.complex("geometry", key, default))


def geometry_from(sc: Scenario) -> CavityGeometry:
    return _guard("[geometry]", CavityGeometry,
                  l=sc.number("geometry", "l"), d=sc.number("geometry", "d"),
                  medium1=_medium(sc, "n1"), medium2=_medium(sc, "n2"))


def k_values(sc: Scenario):
    kr = sc.get("resonance", "k_range")
    if isinstance(kr, int) and not isinstance(kr, bool):
        kr = [kr, kr]
    if (not isinstance(kr, list) or len(kr) != 2
            or not all(isinstance(k, int) and not isinstance(k, bool) for k in kr)
            or kr[0] < 1 or kr[1] < kr[0]):
        raise ConfigError("field [resonance] k_range must be [k_min, k_max] with 1 <= k_min <= k_max")
    return list(range(kr[0], kr[1] + 1))


def _resonance_opts(sc):
    return dict(tol=sc.number("resonance", "tol", 1e-10),
                max_iter=sc.number("resonance", "max_iter", 100, int),
                validity_threshold=sc.number("resonance", "validity_threshold", 0.1))


def settings_from(sc: Scenario, t) -> ExtractionSettings:
    basis_size = sc.get("extraction", "basis_size", None)
    return _guard("[extraction]", ExtractionSettings,
                  t0=sc.number("extraction", "t0", 0.0), t=float(t),
                  delta_t=sc.number("extraction", "delta_t", 0.0),
                  quad_order=sc.number("extraction", "quad_order", 128, int),
                  basis=sc.get("extraction", "basis", "svd"),
                  basis_size=None if basis_size in (None, "none") else int(basis_size),
                  decay_rate=sc.get("extraction", "decay_rate", "closure"))


def state_from(obj, name) -> StateSpec:
    if isinstance(obj, str):
        obj = {"kind": obj}
    if not isinstance(obj, dict) or "kind" not in obj:
        raise ConfigError(f"field {name} must be a state object with a 'kind'")
    kind = obj["kind"]
    if kind == "vacuum":
        return StateSpec.vacuum()
    if kind == "coherent":
        return StateSpec.coherent(_as_complex(obj.get("beta", 0.0), f"{name}.beta"))
    if kind == "thermal":
        return _guard(name, StateSpec.thermal, obj.get("nbar", 0.0))
    if kind == "squeezed_number":
        return _guard(name, StateSpec.squeezed_number, obj.get("r", 0.0), obj.get("n", 0),
                      obj.get("axis", "p"))
    raise ConfigError(f"field {name}: unknown state kind {kind!r}")


def cavity_state(sc: Scenario) -> StateSpec:
    if not sc.has("state"):
        raise ConfigError("missing section [state]")
    obj = {k: sc.get("state", k) for k in sc.cp.options("state")}
    obj.setdefault("kind", "vacuum")
    return state_from(obj, "[state]")


def grid_spec(sc: Scenario, default_center=0j) -> GridSpec:
    center = sc.get("grid", "center", "auto")
    c = default_center if center == "auto" else _as_complex(center, "[grid] center")
    return _guard("[grid]", GridSpec, M=sc.number("grid", "M", 257, int),
                  L=sc.number("grid", "L", 6.0), center=c)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def _want(args, fmt):
    return fmt in args.formats


def _locate_each(sc, geom):
    opts = _resonance_opts(sc)
    modes, failures = [], []
    for k in k_values(sc):
        try:
            modes.extend(locate_resonances(geom, [k], **opts))
        except ResonanceError as exc:
            last = exc.last_iterate
            failures.append({"k": k, "error": str(exc),
                             "last_iterate": None if last is None else complex(last)})
    return modes, failures


def run_resonances(sc: Scenario, out: Path, args):
    geom = geometry_from(sc)
    modes, failures = _locate_each(sc, geom)
    report = {"modes": [m.to_dict() for m in modes], "failures": failures,
              "geometry": {"l": geom.l, "d": geom.d}}
    if _want(args, "json"):
        cio.write_json(out / "resonances.json", report, sc.hash)
    if _want(args, "csv") and modes:
        omega = spectral_sweep(modes, sc.number("resonance", "sweep_points", 2001, int))
        D1, _ = spectral_denominators(geom, omega)
        cio.write_csv(out / "spectrum.csv", ["omega", "inv_abs_D1_sq"],
                      zip(omega, 1.0 / np.abs(D1) ** 2), sc.hash)
        cio.write_csv(out / "modes.csv",
                      ["k", "omega_k", "gamma_k", "gamma_rad", "gamma_rad_out", "gamma_abs",
                       "closure_residual", "linewidth_ratio", "valid"],
                      ([m.k, m.omega_k, m.gamma_k, m.gamma_rad, m.gamma_rad_out, m.gamma_abs,
                        m.closure_residual, m.linewidth_ratio, int(m.valid)] for m in modes),
                      sc.hash)
    return EXIT_NUMERIC if not modes else EXIT_OK


def spectral_sweep(modes, n):
    """Uniform frequency sweep over all mode intervals, refined around each peak."""
    lo = min(m.interval[0] for m in modes)
    hi = max(m.interval[1] for m in modes)
    pts = [np.linspace(lo, hi, n)]
    for m in modes:
        pts.append(m.omega_k + m.gamma_k * np.linspace(-2.0, 2.0, 81))
    omega = np.unique(np.concatenate(pts))
    return omega[(omega >= lo) & (omega <= hi)]


def _single_mode(sc, geom):
    ks = k_values(sc)
    modes = locate_resonances(geom, [ks[0]], **_resonance_opts(sc))
    return modes[0]


def _time_grid(sc, mode):
    rate = mode.gamma_rad + mode.gamma_abs
    t0 = sc.number("extraction", "t0", 0.0)
    unit = sc.get("extraction", "time_unit", "decay")
    if unit not in ("decay", "absolute"):
        raise ConfigError("field [extraction] time_unit must be 'decay' or 'absolute'")
    if sc.has("extraction", "times"):
        times = sc.get("extraction", "times")
        if not isinstance(times, list) or not times:
            raise ConfigError("field [extraction] times must be a nonempty list")
        times = np.array(times, dtype=float)
    else:
        times = np.linspace(sc.number("extraction", "x_min", 0.1),
                            sc.number("extraction", "x_max", 5.0),
                            sc.number("extraction", "n_times", 10, int))
    if np.any(times < 0):
        raise ConfigError("field [extraction] times must be nonnegative")
    return (t0 + times / rate) if unit == "decay" else t0 + times


def run_extraction(sc: Scenario, out: Path, args):
    geom = geometry_from(sc)
    mode = _single_mode(sc, geom)
    ts = _time_grid(sc, mode)
    base = settings_from(sc, ts[-1])
    q, c = eta_curve(mode, base, ts)
    rate = mode.gamma_rad + mode.gamma_abs
    result = extract(mode, base)
    if _want(args, "csv"):
        cio.write_csv(out / "eta_curve.csv",
                      ["t", "decay_time", "eta_quadrature", "eta_closed_form"],
                      zip(ts, rate * (ts - base.t0), q, c), sc.hash)
        if result.phi_out is not NO_OUTPUT:
            cio.write_csv(out / "phi_out.csv", ["omega", "re", "im"],
                          zip(result.omega, result.phi_out.real, result.phi_out.imag), sc.hash)
    if _want(args, "json"):
        table = [{"channel": ch, "index": i, "abs": abs(v), "chi": v}
                 for ch, i, v in result.chi_table()]
        cio.write_json(out / "extraction.json", {
            "mode": mode.to_dict(), "t": base.t, "eta": result.eta,
            "eta_closed_form": result.eta_closed, "residual": result.residual,
            "coupling_sum": result.coupling_sum, "basis": result.basis,
            "quad_order": base.quad_order, "chi": table,
            "eta_asymptote": float(np.sqrt(mode.gamma_rad_out / rate)),
        }, sc.hash)
    return EXIT_OK


def _grid_outputs(args, out, stem, grid, metrics, sc):
    if _want(args, "grid"):
        cio.write_grid(out / f"{stem}.grid", grid, sc.hash)
    if _want(args, "csv"):
        cio.write_grid_csv(out / f"{stem}.csv", grid, sc.hash)
    if _want(args, "json"):
        cio.write_json(out / f"{stem}.json", metrics, sc.hash)


def _grid_metrics(grid):
    mn, nv = negativity_metrics(grid)
    return {"min_W": mn, "negative_volume": nv, "integral": grid.integral(),
            "max_abs_W": grid.max_abs(), "M": grid.resolution, "L": grid.half_extent,
            "center": grid.center, "map": grid.meta}


def run_cat_demo(sc: Scenario, out: Path, args):
    cav = cavity_state(sc)
    eta = sc.number("channels", "eta")
    chi = sc.number("channels", "chi")
    chi_in = sc.number("channels", "chi_in")
    beta = sc.complex("channels", "beta")
    nbar = sc.number("channels", "nbar", 0.0)
    if not 0 < eta <= 1:
        raise ConfigError("field [channels] eta must lie in (0, 1]")
    if nbar < 0:
        raise ConfigError("field [channels] nbar must be nonnegative")
    noise = 2.0 * nbar * chi ** 2
    _, delta = cat_channels(eta, chi_in, beta, noise)
    spec = grid_spec(sc, default_center=delta)
    grid = cat_output_wigner(cav, eta, chi_in, beta, noise, spec)
    c = complex(grid.center)
    span = 0.9 * grid.half_extent
    line = line_values(grid, c - span, c + span, 2001)
    metrics = _grid_metrics(grid)
    metrics.update({"fidelity_condition": fidelity_condition(eta, noise),
                    "sign_changes_x_axis": sign_changes(line),
                    "eta": eta, "chi": chi, "chi_in": chi_in, "beta": beta, "nbar": nbar,
                    "noise_sum": noise,
                    "sum_rule_total": eta ** 2 + 2 * chi_in ** 2 + chi ** 2})
    _grid_outputs(args, out, "cat_output", grid, metrics, sc)
    return EXIT_OK


def _prescribed_channels(sc):
    eta = sc.number("channels", "eta")
    raw = sc.get("channels", "couplings", [])
    if not isinstance(raw, list):
        raise ConfigError("field [channels] couplings must be a list")
    cps = []
    for i, item in enumerate(raw):
        if not isinstance(item, dict) or "chi" not in item:
            raise ConfigError(f"field [channels] couplings[{i}] needs 'chi'")
        cps.append(ChannelCoupling(str(item.get("label", f"c{i}")),
                                   _as_complex(item["chi"], f"[channels] couplings[{i}].chi"),
                                   state_from(item.get("state", "vacuum"),
                                              f"[channels] couplings[{i}].state")))
    return _guard("[channels]", ChannelConfig, eta, tuple(cps), "prescribed")


def _derived_channels(sc):
    geom = geometry_from(sc)
    mode = _single_mode(sc, geom)
    ts = _time_grid(sc, mode)
    result = extract(mode, settings_from(sc, ts[-1]))
    states = {}
    for ch in ("in", "cav", "+", "-"):
        key = f"state_{ch}".replace("+", "plus").replace("-", "minus")
        if sc.has("channels", key):
            states[ch] = state_from(sc.get("channels", key), f"[channels] {key}")
    floor = sc.number("channels", "min_abs_chi", 1e-6)
    return ChannelConfig.from_extraction(result, states, min_abs=floor)


def run_wigner_map(sc: Scenario, out: Path, args):
    cav = cavity_state(sc)
    mode = sc.get("channels", "mode", "none") if sc.has("channels") else "none"
    if mode == "none":
        grid = wigner_of(cav, grid_spec(sc, default_center=cav.displacement))
    elif mode in ("prescribed", "derived"):
        ch = _prescribed_channels(sc) if mode == "prescribed" else _derived_channels(sc)
        method = sc.get("channels", "method", "auto")
        if mode == "derived" and not ch.all_gaussian:
            raise ConfigError("derived channels must be vacuum/coherent/thermal")
        grid = _guard("[channels] method", output_wigner, cav, ch, grid_spec(sc), method)
    else:
        raise ConfigError("field [channels] mode must be none, prescribed or derived")
    _grid_outputs(args, out, "wigner", grid, _grid_metrics(grid), sc)
    return EXIT_OK


COMMANDS = {
    "resonances": run_resonances,
    "extraction": run_extraction,
    "cat-demo": run_cat_demo,
    "wigner-map": run_wigner_map,
}


def _formats(text):
    items = [t.strip() for t in text.split(",") if t.strip()]
    bad = [t for t in items if t not in FORMATS]
    if bad or not items:
        raise argparse.ArgumentTypeError(f"formats must be drawn from {', '.join(FORMATS)}")
    return tuple(items)


def build_parser():
    p = argparse.ArgumentParser(prog="cavityio", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        s = sub.add_parser(name)
        src = s.add_mutually_exclusive_group()
        src.add_argument("--config", help="scenario INI file")
        src.add_argument("--preset", help="bundled scenario name")
        s.add_argument("--out", default=".", help="output directory")
        s.add_argument("--format", dest="formats", type=_formats, default=FORMATS,
                       help="comma-separated subset of csv,json,grid (default: all)")
    sub.add_parser("presets", help="list bundled scenarios")
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    if args.command == "presets":
        print("\n".join(list_presets()))
        return EXIT_OK
    try:
        sc = load_scenario(args)
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        with warnings.catch_warnings():
            warnings.simplefilter("default")
            return COMMANDS[args.command](sc, out, args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ResonanceError, ValueError, FloatingPointError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
