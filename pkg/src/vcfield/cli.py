"""Command line entry point: check | steady | evolve | report.

Configs are JSON; the resolved config (user values merged over defaults) is
echoed to the output directory before any compute, and all emitted floats use
one fixed format, so a rerun on the echoed config reproduces every output
file byte for byte.

Exit codes: 0 ok, 1 requested check failed, 2 usage or config error,
3 numerical failure.
"""

from __future__ import annotations

import argparse
import copy
import json
import sys
from pathlib import Path

import numpy as np

from . import coeffs as cf
from .virial import write_diagnostics_csv
from .driver import run_simulation
from .evolve import BlowUpError, CFLError, Grid, SpongeProfile, initial_data
from .fmt import dump_json, dumps_compact, read_csv
from .greensolve import GreenSolveError, construct_steady_state, verify_decay
from .potentials import PotentialError, make_potential, vacuum_info


class ConfigError(ValueError):
    pass


DEFAULT_CONFIG = {
    "scenario": None,
    "potential": {"family": "sine-gordon"},
    "coefficients": {"family": "zero"},
    "xi": 0.0,
    "grid": {"L": 80.0, "dy": 0.01},
    "time": {"T": 60.0, "cfl": 0.4, "diag_every": 0.5, "snap_every": 5.0},
    "virial": {"lam": 13.0},
    "initial_data": {"family": "sech-bump", "epsilon": 0.01, "parity": "none",
                     "component": "both", "width": 1.0, "center": 0.0},
    "sponge": {"enabled": True, "width_fraction": 0.2, "gamma_max": 1.0},
    "conservation_mode": False,
    "intervals": [[-5.0, 5.0]],
    "checks": ["orbital", "signs"],
    "steady": {"decay_k": 0.9, "tol": 1e-12, "max_iter": 100},
    "use_steady_reference": True,
    "track_parity": False,
    "snapshot_stride": 20,
    "seed": 0,
}

# the lam > 12 explicit family; dy here must resolve the oscillation frequency
# sqrt(1 + 8 lam^4) ~ 478 that the huge well injects, hence 0.002 instead of
# the generic 0.01 default
SCENARIOS = {
    "flat": {
        "coefficients": {"family": "zero"},
        "xi": 0.0,
        "initial_data": {"family": "sech-bump", "epsilon": 0.01,
                         "component": "both", "width": 5.0},
    },
    "paper-example-vacuum": {
        "coefficients": {"family": "paper-example", "lam": 13.0},
        "xi": 0.0,
        "grid": {"L": 80.0, "dy": 0.002},
        "time": {"T": 60.0, "cfl": 0.9, "diag_every": 0.5, "snap_every": 10.0},
        "virial": {"lam": 13.0},
        "initial_data": {"family": "sech-bump", "epsilon": 0.01,
                         "component": "velocity", "width": 1.0},
        "checks": ["vacuum", "orbital", "decay"],
        "snapshot_stride": 100,
    },
    "odd-near-2pi": {
        "coefficients": {"family": "zero"},
        "xi": 6.283185307179586,
        "virial": {"lam": 100.0},
        "initial_data": {"family": "odd-pair", "epsilon": 0.01, "parity": "odd",
                         "component": "both", "width": 1.0},
        "checks": ["signs", "orbital"],
        "track_parity": True,
    },
}


def _merge(base: dict, override: dict) -> dict:
    out = copy.deepcopy(base)
    for k, v in override.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = _merge(out[k], v)
        else:
            out[k] = copy.deepcopy(v)
    return out


def resolve_config(user: dict) -> dict:
    cfg = DEFAULT_CONFIG
    scenario = user.get("scenario")
    if scenario is not None:
        if scenario not in SCENARIOS:
            raise ConfigError(f"unknown scenario {scenario!r}; "
                              f"known: {sorted(SCENARIOS)}")
        cfg = _merge(cfg, SCENARIOS[scenario])
    cfg = _merge(cfg, user)
    cfg["scenario"] = scenario
    validate_config(cfg)
    return cfg


def validate_config(cfg: dict) -> None:
    g = cfg["grid"]
    t = cfg["time"]
    if not (g["L"] > 0 and g["dy"] > 0 and g["dy"] < g["L"]):
        raise ConfigError(f"bad grid: {g}")
    if not (t["T"] > 0 and 0 < t["cfl"] <= 1.0):
        raise ConfigError(f"bad time block: {t}")
    if not (t["diag_every"] > 0 and t["snap_every"] > 0):
        raise ConfigError(f"bad output cadence: {t}")
    if not cfg["virial"]["lam"] > 2:
        raise ConfigError(f"virial lam must exceed 2: {cfg['virial']}")
    idata = cfg["initial_data"]
    if idata["epsilon"] < 0:
        raise ConfigError("initial_data.epsilon must be nonnegative")
    if idata.get("parity", "none") not in ("none", "odd", "even"):
        raise ConfigError(f"bad parity: {idata.get('parity')}")
    if idata.get("component", "both") not in ("both", "velocity", "displacement"):
        raise ConfigError(f"bad component: {idata.get('component')}")
    sp = cfg["sponge"]
    if sp["enabled"] and not (0 < sp["width_fraction"] <= 0.4 and sp["gamma_max"] >= 0):
        raise ConfigError(f"bad sponge block: {sp}")
    for iv in cfg["intervals"]:
        if len(iv) != 2 or not iv[0] < iv[1]:
            raise ConfigError(f"bad interval: {iv}")
    if not isinstance(cfg["seed"], int):
        raise ConfigError("seed must be an integer")


def _build(cfg: dict):
    grid = Grid.from_spacing(cfg["grid"]["L"], cfg["grid"]["dy"])
    coeffs = cf.make_coefficients(cfg["coefficients"], grid.y)
    potential = make_potential(cfg["potential"])
    return grid, coeffs, potential


def _echo_config(cfg: dict, out: Path) -> None:
    out.mkdir(parents=True, exist_ok=True)
    dump_json(cfg, out / "config.resolved.json")


def cmd_check(cfg: dict, out: Path) -> int:
    grid, coeffs, potential = _build(cfg)
    _echo_config(cfg, out)
    results, all_passed = {}, True
    for name in cfg["checks"]:
        if name == "vacuum":
            rep = cf.check_vacuum_admissible(coeffs, cfg["virial"]["lam"])
            results[name] = rep.to_dict()
            all_passed &= rep.passed
        elif name == "signs":
            rep = cf.check_sign_conditions(coeffs)
            results[name] = rep.to_dict()
            all_passed &= rep.passed
        elif name == "orbital":
            vac = vacuum_info(potential, cfg["xi"])
            rep = cf.check_orbital(coeffs, potential, vac.xi)
            results[name] = rep.to_dict()
            all_passed &= rep.passed
        elif name == "decay":
            fit = cf.fit_decay(coeffs)
            results[name] = fit.to_dict()
            all_passed &= fit.holds
        else:
            raise ConfigError(f"unknown check: {name!r}")
    dump_json({"checks": results, "all_passed": bool(all_passed)},
              out / "check_report.json")
    return 0 if all_passed else 1


def _steady_csv(out: Path, steady, coeffs, potential) -> None:
    from .fmt import write_csv
    U = steady.U()
    h = coeffs.dy
    res = np.zeros_like(U)
    lap = (U[2:] - 2 * U[1:-1] + U[:-2]) / h**2
    d1 = (U[2:] - U[:-2]) / (2 * h)
    res[1:-1] = (-lap - coeffs.b[1:-1] * d1 - coeffs.c[1:-1] * U[1:-1]
                 + potential.df(U[1:-1]))
    write_csv(out / "steady.csv", ["y", "U", "U_prime", "residual"],
              [steady.y, U, steady.U_delta_prime, res])


def cmd_steady(cfg: dict, out: Path) -> int:
    grid, coeffs, potential = _build(cfg)
    _echo_config(cfg, out)
    steady = construct_steady_state(coeffs, potential, cfg["xi"],
                                    tol=cfg["steady"]["tol"],
                                    max_iter=cfg["steady"]["max_iter"])
    _steady_csv(out, steady, coeffs, potential.shifted(steady.xi))
    summary = steady.summary()
    summary["decay_check"] = verify_decay(steady, cfg["steady"]["decay_k"]).to_dict()
    dump_json(summary, out / "steady_summary.json")
    return 0 if steady.converged else 3


def cmd_evolve(cfg: dict, out: Path) -> int:
    grid, coeffs, potential = _build(cfg)
    _echo_config(cfg, out)
    vac = vacuum_info(potential, cfg["xi"])
    reference = None
    steady_summary = None
    if cfg["use_steady_reference"]:
        steady = construct_steady_state(coeffs, potential, cfg["xi"],
                                        tol=cfg["steady"]["tol"],
                                        max_iter=cfg["steady"]["max_iter"])
        steady_summary = steady.summary()
        if not steady.converged:
            dump_json({"error": "steady state did not converge",
                       "steady": steady_summary}, out / "summary.json")
            return 3
        reference = steady.U()
    rng = np.random.default_rng(cfg["seed"])
    v1_0, v2_0 = initial_data(grid, cfg["initial_data"], rng)
    sponge = (SpongeProfile.build(grid, cfg["sponge"]["width_fraction"],
                                  cfg["sponge"]["gamma_max"])
              if cfg["sponge"]["enabled"] else None)
    track_parity = cfg["track_parity"] or cfg["initial_data"].get("parity") == "odd"
    try:
        result = run_simulation(
            grid, coeffs, potential, vac.xi, v1_0, v2_0,
            T=cfg["time"]["T"], cfl=cfg["time"]["cfl"],
            lam=cfg["virial"]["lam"], sponge=sponge,
            intervals=[tuple(iv) for iv in cfg["intervals"]],
            diag_every=cfg["time"]["diag_every"],
            snap_every=cfg["time"]["snap_every"],
            snapshot_stride=cfg["snapshot_stride"],
            reference=reference, track_parity=track_parity,
            conservation_mode=cfg["conservation_mode"])
    except BlowUpError as e:
        dump_json({"error": str(e), "blowup_time": e.t}, out / "summary.json")
        return 3
    write_diagnostics_csv(out / "diagnostics.csv", result.records,
                          result.intervals)
    with open(out / "snapshots.ndjson", "w", encoding="utf-8") as f:
        for snap in result.snapshots:
            f.write(dumps_compact(snap) + "\n")
    summary = result.summary()
    if steady_summary is not None:
        summary["steady"] = steady_summary
    dump_json(summary, out / "summary.json")
    return 0


def summarize_diagnostics(path: Path) -> dict:
    """Recompute the decay/floor/cumulative summary from a diagnostics CSV."""
    header, data = read_csv(path)
    t = data["t"]
    if len(t) == 0:
        raise ConfigError(f"no rows in {path}")
    interior = t > 0
    rate = data["dIdt_formula"]
    H1w = data["H1w_v1"]
    valid = interior & (H1w > 1e-250)
    floor = float(np.min(-rate[valid] / H1w[valid])) if np.any(valid) else np.nan
    out = {
        "t_final": float(t[-1]),
        "I0": float(data["I"][0]),
        "I_final": float(data["I"][-1]),
        "minus_dIdt_min": float(np.min(-rate[interior])) if np.any(interior) else np.nan,
        "floor": floor,
        "cum_integral_final": float(data["cum_integral"][-1]),
        "intervals": {},
    }
    for col in header:
        if col.startswith("local_"):
            series = data[col]
            peak = float(np.nanmax(series))
            final = float(series[-1])
            out["intervals"][col] = {
                "peak": peak, "final": final,
                "decay_factor": peak / final if final > 0 else np.inf,
            }
    return out


def cmd_report(diag_path: Path, out: Path, baseline: Path | None) -> int:
    summary = summarize_diagnostics(diag_path)
    if baseline is not None:
        base = summarize_diagnostics(baseline)
        ratios = {}
        for k in ("floor", "cum_integral_final", "minus_dIdt_min"):
            if base.get(k) not in (None, 0.0) and np.isfinite(base[k]):
                ratios[k] = summary[k] / base[k]
        for lb, iv in summary["intervals"].items():
            if lb in base["intervals"]:
                bf = base["intervals"][lb]["decay_factor"]
                if np.isfinite(bf) and bf != 0:
                    ratios[f"{lb}_decay_factor"] = iv["decay_factor"] / bf
        summary["comparison"] = {"baseline": str(baseline), "ratios": ratios}
    out.mkdir(parents=True, exist_ok=True)
    dump_json(summary, out / "report_summary.json")
    return 0


def _run_single(args_tuple):
    cmd, cfg, out = args_tuple
    return {"check": cmd_check, "steady": cmd_steady,
            "evolve": cmd_evolve}[cmd](cfg, out)


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(
        prog="vcfield",
        description="Steady states, evolution and virial diagnostics for "
                    "variable-coefficient scalar-field equations on the line")
    ap.add_argument("command", choices=["check", "steady", "evolve", "report"])
    ap.add_argument("--config", type=Path, help="JSON config path")
    ap.add_argument("--out", type=Path, default=Path("out"),
                    help="output directory")
    ap.add_argument("--sweep", type=Path,
                    help="NDJSON of config overrides, one run per line")
    ap.add_argument("--seed", type=int, help="override the config seed")
    ap.add_argument("--diagnostics", type=Path,
                    help="diagnostics CSV (report command)")
    ap.add_argument("--baseline", type=Path,
                    help="baseline diagnostics CSV for comparison (report)")
    args = ap.parse_args(argv)

    try:
        if args.command == "report":
            if args.diagnostics is None:
                print("report requires --diagnostics", file=sys.stderr)
                return 2
            return cmd_report(args.diagnostics, args.out, args.baseline)

        user = {}
        if args.config is not None:
            try:
                user = json.loads(args.config.read_text())
            except (OSError, json.JSONDecodeError) as e:
                print(f"cannot read config: {e}", file=sys.stderr)
                return 2
        if args.seed is not None:
            user["seed"] = args.seed

        if args.sweep is not None:
            overrides = [json.loads(line) for line in
                         args.sweep.read_text().splitlines() if line.strip()]
            jobs = []
            for i, ov in enumerate(overrides):
                cfg_i = resolve_config(_merge(user, ov))
                jobs.append((args.command, cfg_i, args.out / f"sweep_{i:03d}"))
            import concurrent.futures as cfut
            with cfut.ProcessPoolExecutor() as ex:
                codes = list(ex.map(_run_single, jobs))
            return max(codes) if codes else 0

        cfg = resolve_config(user)
        return _run_single((args.command, cfg, args.out))
    except (ConfigError, PotentialError, cf.CoefficientError, CFLError,
            ValueError) as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2
    except (GreenSolveError, BlowUpError) as e:
        print(f"numerical failure: {e}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
