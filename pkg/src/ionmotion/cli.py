"""Command-line front end.

The CLI speaks Hz, um, us and T/m; everything past ``_Config`` is SI with
angular frequencies.  Exit codes: 0 ok, 1 usage, 2 numeric/truncation
failure, 3 parse error.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from . import io, oracle, params, presets
from .constants import TWO_PI
from .dynamics import DriveConfig, detuning_scan, p_up_thermal, trajectory
from .errors import DomainError, IntegrationError, ParseError, TruncationError
from .spectroscopy import (
    LineshapeModel,
    fit,
    sideband_spectrum,
    simulate_shots,
    two_ion_spectrum,
)

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC, EXIT_PARSE = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# Experiment preset; every key can be overridden from --config.
DEFAULTS = {
    "species": "171Yb+",
    "nu_z_hz": "268e3",
    "gradient_t_per_m": "23.3",
    "bias_field_t": "0",
    "wavelength_nm": "369.5",
    "counterpropagating": "true",
    "rabi_hz": "40e3",
    "detuning_hz": "0",
    "duration_us": "180",
    "phase_sum_rad": "0",
    "pulse_us": "40",
    "nbar": "0",
    "scan_kind": "frequency",
    "scan_start": "-400e3",
    "scan_stop": "400e3",
    "scan_points": "81",
}

KNOWN_KEYS = set(DEFAULTS) | {"eta_eff", "shots", "seed", "out"}


class _Config:
    def __init__(self, raw, path=None):
        unknown = set(raw) - KNOWN_KEYS
        if unknown:
            raise UsageError(f"unknown config keys: {', '.join(sorted(unknown))}")
        self.raw = {**DEFAULTS, **raw}
        self.path = path

    def num(self, key):
        val = self.raw[key]
        try:
            v = float(val)
        except ValueError:
            raise UsageError(f"{key} must be a number, got {val!r}") from None
        if not math.isfinite(v):
            raise UsageError(f"{key} must be finite")
        return v

    def flag(self, key):
        return self.raw[key].strip().lower() in ("1", "true", "yes", "on")

    def species(self):
        return params.load_species(self.raw["species"])

    def trap(self):
        try:
            return params.TrapEnvironment(
                nu_z=TWO_PI * self.num("nu_z_hz"),
                gradient=self.num("gradient_t_per_m"),
                bias_field=self.num("bias_field_t"),
            )
        except DomainError as exc:
            raise UsageError(str(exc)) from None

    def eta_eff(self):
        if "eta_eff" in self.raw:
            return self.num("eta_eff")
        return params.effective_lamb_dicke(self.species(), self.trap())

    def drive(self):
        try:
            return DriveConfig(
                rabi=TWO_PI * self.num("rabi_hz"),
                detuning=TWO_PI * self.num("detuning_hz"),
                duration=self.num("duration_us") * 1e-6,
                phase_sum=self.num("phase_sum_rad"),
            )
        except DomainError as exc:
            raise UsageError(str(exc)) from None

    def lineshape(self):
        try:
            return LineshapeModel(
                rabi=TWO_PI * self.num("rabi_hz"),
                pulse_time=self.num("pulse_us") * 1e-6,
                nu_z=TWO_PI * self.num("nu_z_hz"),
                eta_eff=self.eta_eff(),
                nbar=self.num("nbar"),
            )
        except DomainError as exc:
            raise UsageError(str(exc)) from None

    def grid(self):
        n = int(self.num("scan_points"))
        if n < 2:
            raise UsageError("scan_points must be >= 2")
        lo, hi = self.num("scan_start"), self.num("scan_stop")
        if lo == hi:
            raise UsageError("scan_start and scan_stop must differ")
        return np.linspace(lo, hi, n)


def _load_config(args):
    raw = {}
    if getattr(args, "config", None):
        raw = io.read_config(args.config)
    return _Config(raw, args.config)


def _emit(text, out):
    if out:
        Path(out).write_bytes(text.encode("utf-8"))
    else:
        sys.stdout.write(text)


def params_report(cfg):
    """Numbers printed by ``params``, in CLI units."""
    sp, trap = cfg.species(), cfg.trap()
    wl = cfg.num("wavelength_nm") * 1e-9
    dq = params.derive(sp, trap, wavelength=wl, counterpropagating=cfg.flag("counterpropagating"))
    rabi = TWO_PI * cfg.num("rabi_hz")
    report = {
        "species": sp.label,
        "z0_um": dq.z0 * 1e6,
        "eta_eff": dq.eta_eff,
        "eta_laser": dq.eta_laser,
        "ion_separation_um": dq.ion_separation * 1e6,
        "splitting_hz": dq.splitting / TWO_PI,
        "gradient_round_trip_t_per_m": params.gradient_from_splitting(
            sp, dq.splitting, dq.ion_separation
        ),
    }
    if dq.splitting != 0:
        report["crosstalk_bound"] = params.crosstalk_bound(rabi, dq.splitting)
    else:
        report["crosstalk_bound"] = None
    return report


def cmd_params(args):
    cfg = _load_config(args)
    report = params_report(cfg)
    if args.format == "json":
        _emit(io.dumps_json(report), args.out)
    else:
        lines = ["quantity,value"]
        for k, v in report.items():
            if isinstance(v, float):
                v = io.fmt(v)
            lines.append(f"{k},{'' if v is None else v}")
        _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def reproduce(figure, shots=0, seed=None):
    """Return {filename: csv text} for one figure preset."""
    if figure not in presets.FIGURES:
        raise UsageError(f"unknown figure {figure!r}; choose from {', '.join(presets.FIGURES)}")
    out = {}
    if figure == "fig5":
        fig = presets.FIG5
        scan = detuning_scan(fig.drive(), fig.eta_eff, fig.nbar, fig.grid())
        out["fig5_theory.csv"] = io.detuning_scan_to_csv(scan)
        if shots:
            coarse = detuning_scan(fig.drive(), fig.eta_eff, fig.nbar, fig.data_grid())
            out["fig5_data.csv"] = io.scan_to_csv(simulate_shots(coarse, shots, seed))
        return out
    fig = presets.FIGURES[figure]
    model = fig.model()
    if figure == "fig4":
        theory = sideband_spectrum(model, fig.grid())
        data_grid = fig.data_grid()
    else:
        theory = _two_ion(model, fig.grid())
        data_grid = fig.grid()
    out[f"{figure}_theory.csv"] = io.scan_to_csv(theory)
    if shots:
        curve = sideband_spectrum(model, data_grid) if figure == "fig4" else _two_ion(model, data_grid)
        out[f"{figure}_data.csv"] = io.scan_to_csv(simulate_shots(curve, shots, seed))
    return out


def _two_ion(model, grid):
    f1, f2 = model.carrier_freqs
    return two_ion_spectrum(f1, f2, model.rabi, model.pulse_time, grid, model.observable)


def cmd_reproduce(args):
    files = reproduce(args.figure, shots=args.shots or 0, seed=args.seed)
    outdir = Path(args.out or ".")
    outdir.mkdir(parents=True, exist_ok=True)
    for name, text in files.items():
        (outdir / name).write_bytes(text.encode("utf-8"))
        print(outdir / name)
    return EXIT_OK


def cmd_scan(args):
    cfg = _load_config(args)
    shots = args.shots if args.shots is not None else int(cfg.raw.get("shots", 0))
    seed = args.seed if args.seed is not None else _opt_int(cfg.raw.get("seed"))
    out = args.out or cfg.raw.get("out")
    kind = cfg.raw["scan_kind"]
    grid = cfg.grid()
    if kind == "frequency":
        scan = sideband_spectrum(cfg.lineshape(), TWO_PI * grid)
        if shots:
            scan = simulate_shots(scan, shots, seed)
        text = io.scan_to_csv(scan)
    elif kind == "detuning":
        scan = detuning_scan(cfg.drive(), cfg.eta_eff(), cfg.num("nbar"), TWO_PI * grid)
        if shots:
            text = io.scan_to_csv(simulate_shots(scan, shots, seed))
        else:
            text = io.detuning_scan_to_csv(scan)
    elif kind == "time":
        t = grid * 1e-6
        if np.any(t < 0):
            raise UsageError("time scan bounds must be >= 0 us")
        p = p_up_thermal(cfg.drive(), cfg.eta_eff(), t, cfg.num("nbar"))
        text = io.format_csv(("t_s", "p_f1"), (t, p))
    elif kind == "trajectory":
        n = int(cfg.num("scan_points"))
        t, alpha = trajectory(cfg.drive(), cfg.eta_eff(), n)
        text = io.trajectory_to_csv(t, alpha)
    else:
        raise UsageError(f"unknown scan_kind {kind!r}")
    _emit(text, out)
    return EXIT_OK


def _opt_int(v):
    return None if v in (None, "") else int(v)


_HZ_PARAMS = {"rabi", "nu_z", "f1", "f2"}


def _parse_bounds(items):
    out = {}
    for item in items or ():
        try:
            name, rng = item.split("=", 1)
            lo, hi = (float(v) for v in rng.split(":", 1))
        except ValueError:
            raise UsageError(f"bad bound {item!r}; expected name=low:high") from None
        if name in _HZ_PARAMS:
            lo, hi = TWO_PI * lo, TWO_PI * hi
        out[name] = (lo, hi)
    return out


def fit_template(model_key, cfg):
    """Model template and default bounds (SI) for ``fit``."""
    if model_key == "sideband":
        if cfg is None:
            template = presets.FIG4.model()
        else:
            template = cfg.lineshape()
        return template, {"nbar": (0.0, 1000.0)}
    if model_key == "two-ion":
        fig = presets.FIG3
        template = fig.model()
        w = 2.5 * fig.rabi
        f2 = template.carrier_freqs[1]
        return template, {
            "f1": (-w, w),
            "f2": (f2 - w, f2 + w),
            "rabi": (0.5 * fig.rabi, 2.0 * fig.rabi),
        }
    raise UsageError(f"unknown model {model_key!r}")


def cmd_fit(args):
    data = io.read_scan(args.data)
    cfg = _Config(io.read_config(args.config), args.config) if args.config else None
    template, free = fit_template(args.model, cfg)
    free.update(_parse_bounds(args.bounds))
    weighting = "model" if args.shots else "data"
    result = fit(template, free, data, weighting=weighting, shots=args.shots)
    report = result.to_dict()
    report["params"] = {
        (f"{k}_hz" if k in _HZ_PARAMS else k): (v / TWO_PI if k in _HZ_PARAMS else v)
        for k, v in report["params"].items()
    }
    report["model"] = args.model
    report["weighting"] = weighting
    report["seed"] = args.seed
    if args.model == "two-ion":
        p = result.params
        split = abs(p["f2"] - p["f1"])
        d = params.two_ion_separation(params.YB171, presets.NU_Z)
        report["splitting_hz"] = split / TWO_PI
        report["gradient_t_per_m"] = params.gradient_from_splitting(params.YB171, split, d)
    _emit(io.dumps_json(report), args.out)
    return EXIT_OK


def cmd_oracle_check(args):
    profile = oracle.PROFILES[args.profile]
    if args.integrator_tol is not None:
        profile = oracle.Profile(
            **{**profile.__dict__, "name": profile.name + "+tol", "integrator_atol": args.integrator_tol}
        )
    ok, report = oracle.run_checks(profile)
    _emit(io.dumps_json(report), args.out)
    if not ok:
        print(f"oracle-check failed: {', '.join(report['failed'])}", file=sys.stderr)
    return EXIT_OK if ok else EXIT_NUMERIC


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH")
    common.add_argument("--seed", type=int)
    common.add_argument("--shots", type=int)
    common.add_argument("--out", metavar="PATH")
    common.add_argument("--format", choices=("csv", "json"), default="json")

    p = _Parser(prog="ionmotion", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("params", parents=[common], help="derived trap quantities")
    s.set_defaults(func=cmd_params)

    s = sub.add_parser("reproduce", parents=[common], help="theory curves for fig3/fig4/fig5")
    s.add_argument("figure")
    s.set_defaults(func=cmd_reproduce)

    s = sub.add_parser("scan", parents=[common], help="frequency/detuning/time scan from a config")
    s.set_defaults(func=cmd_scan)

    s = sub.add_parser("fit", parents=[common], help="fit a spectrum CSV (x,p,sigma)")
    s.add_argument("data")
    s.add_argument("--model", choices=("sideband", "two-ion"), default="sideband")
    s.add_argument("--bounds", nargs="*", metavar="NAME=LO:HI")
    s.set_defaults(func=cmd_fit)

    s = sub.add_parser("oracle-check", parents=[common], help="analytic vs numerical self-checks")
    s.add_argument("--profile", choices=sorted(oracle.PROFILES), default="default")
    s.add_argument("--integrator-tol", type=float)
    s.set_defaults(func=cmd_oracle_check)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"ionmotion: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ParseError as exc:
        print(f"ionmotion: parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (TruncationError, IntegrationError, DomainError) as exc:
        print(f"ionmotion: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"ionmotion: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
