"""Command-line driver: bounds, sweeps, single-point runs and calibrations.

Every command reads an optional JSON config, applies flag overrides on
top, and writes result.csv plus summary.json (with the fully resolved
config) into the output directory. All randomness flows from one seed, so
outputs are byte-stable across runs and thread counts.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import fitkit
from .analytic import classical_bound, ideal_error_exponent, optimal_gain, quantum_bounds
from .detector import DEFAULT_NU, PhotocountModel, error_exponent_categorical, optimize_nu, outcome_distribution
from .gaussian_core import RadarParams, gain_for_signal, receiver_means, tmsv_generate
from .montecarlo import TrialConfig, estimate_error_exponent, run_trials
from .uncertainty import Measured, delta_q


class ConfigError(Exception):
    pass


def _fmt(x) -> str:
    if isinstance(x, str):
        return x
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{float(x):.8e}"


def write_csv(path: Path, columns: list[str], rows, comment: str = "") -> None:
    lines = []
    if comment:
        lines.append(f"# {comment}")
    lines.append(f"# columns: {', '.join(columns)}")
    lines.append(",".join(columns))
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    path.write_text("\n".join(lines) + "\n")


def write_summary(path: Path, command: str, config: dict, results: dict) -> None:
    doc = {"command": command, "config": config, "results": results}
    path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


def _load_config(path: str | None) -> dict:
    if path is None:
        return {}
    p = Path(path)
    if not p.exists():
        raise ConfigError(f"config file not found: {path}")
    try:
        doc = json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")
    return doc


def _resolve(defaults: dict, file_cfg: dict, overrides: dict, required=()) -> dict:
    cfg = dict(defaults)
    for key, val in file_cfg.items():
        if key not in defaults and key not in required:
            raise ConfigError(f"unknown config field: {key}")
        cfg[key] = val
    for key, val in overrides.items():
        if val is not None:
            cfg[key] = val
    for key in required:
        if cfg.get(key) is None:
            raise ConfigError(f"missing required field: {key}")
    return cfg


def _radar_params(cfg: dict, g_rx: float) -> RadarParams:
    try:
        return RadarParams(
            g0=cfg["g0"],
            nth_s=cfg["nth_s"],
            nth_i=cfg["nth_i"],
            kappa_yes=cfg["kappa"],
            kappa_no=cfg["kappa_no"],
            n_noise=cfg["n_noise"],
            g_rx=g_rx,
            delta_phi=cfg["delta_phi"],
            eta_idler=cfg["eta_idler"],
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _point_seed(master: int, index: int) -> int:
    return int(np.random.SeedSequence(master, spawn_key=(index,)).generate_state(1)[0])


def golden_section_max(fn, lo: float, hi: float, tol: float = 1e-5) -> tuple[float, float]:
    """Maximize a unimodal function on [lo, hi]."""
    inv = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - inv * (b - a)
    d = a + inv * (b - a)
    fc, fd = fn(c), fn(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - inv * (b - a)
            fc = fn(c)
        else:
            a, c, fc = c, d, fd
            d = a + inv * (b - a)
            fd = fn(d)
    x = (a + b) / 2.0
    return x, max(fc, fd)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

_RADAR_DEFAULTS = {
    "g0": 1.0353,
    "nth_s": 0.0,
    "nth_i": 0.0,
    "kappa": 3.02e-2,
    "kappa_no": 0.0,
    "n_noise": 10.8,
    "delta_phi": 0.0,
    "eta_idler": 1.0,
    "eps_pi": 0.0,
    "eps_ro": 0.0,
    "nu": list(DEFAULT_NU),
}


def cmd_bounds(file_cfg: dict, args, out: Path) -> int:
    cfg = _resolve(
        {"kappa": None, "n_sig": None, "n_noise": None},
        file_cfg,
        {"kappa": args.kappa, "n_sig": args.n_sig, "n_noise": args.n_noise},
        required=("kappa", "n_sig", "n_noise"),
    )
    bounds = quantum_bounds(cfg["kappa"], cfg["n_sig"], cfg["n_noise"])
    g_opt = optimal_gain(cfg["n_sig"], cfg["n_noise"], cfg["kappa"])
    columns = ["e_cl", "e_pair", "e_max", "q_max", "g_opt"]
    row = [bounds.e_cl, bounds.e_pair, bounds.e_max, bounds.q_max, g_opt]
    write_csv(out / "result.csv", columns, [row], "detection bounds and optimal gain")
    results = dict(zip(columns, (float(v) for v in row)))
    write_summary(out / "summary.json", "bounds", cfg, results)
    for name, val in results.items():
        print(f"{name:8s} {val:.6e}")
    return 0


def cmd_fig3(file_cfg: dict, args, out: Path) -> int:
    defaults = dict(_RADAR_DEFAULTS)
    defaults.update(
        {"g_min": 1.005, "g_max": 1.05, "g_steps": 10, "m_trials": 500_000,
         "chunk": 500_000, "seed": 0, "threads": 1}
    )
    cfg = _resolve(defaults, file_cfg, {"seed": args.seed, "threads": args.threads})
    model = PhotocountModel.with_errors(cfg["eps_pi"], cfg["eps_ro"])
    nu = np.asarray(cfg["nu"], dtype=float)
    gains = np.linspace(cfg["g_min"], cfg["g_max"], int(cfg["g_steps"]))
    n_sig = tmsv_generate(cfg["g0"], cfg["nth_s"], cfg["nth_i"]).n_sig
    e_cl = classical_bound(cfg["kappa"], n_sig, cfg["n_noise"])

    def point(idx_g):
        idx, g = idx_g
        params = _radar_params(cfg, float(g))
        mu_yes, mu_no = receiver_means(params)
        e_model = error_exponent_categorical(
            outcome_distribution(mu_yes, model), outcome_distribution(mu_no, model), nu
        )
        tally = run_trials(params, model, TrialConfig(int(cfg["m_trials"]), _point_seed(int(cfg["seed"]), idx), int(cfg["chunk"])))
        est = estimate_error_exponent(tally, nu)
        return [g, e_model, est.value, est.sigma, e_cl, est.value / e_cl]

    jobs = list(enumerate(gains))
    threads = int(cfg["threads"])
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(point, jobs))
    else:
        rows = [point(j) for j in jobs]
    columns = ["g", "e_model", "e_mc", "e_mc_sigma", "e_cl", "q"]
    write_csv(out / "result.csv", columns, rows,
              "error exponent vs recombination gain; e_cl is the classical bound")
    peak = max(rows, key=lambda r: r[2])
    results = {"peak_g": float(peak[0]), "peak_e_mc": float(peak[2]), "e_cl": float(e_cl),
               "peak_q": float(peak[5])}
    write_summary(out / "summary.json", "fig3", cfg, results)
    print(f"peak e_mc {results['peak_e_mc']:.4e} at g {results['peak_g']:.4f} (q {results['peak_q']:.3f})")
    return 0


def _q_at_point(n_sig, n_noise, kappa, nth_s, nth_i, model, g_hi=1.2):
    """Advantage of the tuned truncated counter at one parameter point."""
    g0 = gain_for_signal(n_sig, nth_s, nth_i)
    if g0 <= 1.0:
        return 0.0, 0.0, 1.0  # brightness below the thermal floor is unreachable
    e_cl = classical_bound(kappa, n_sig, n_noise)

    def e_star(g):
        params = RadarParams(g0=g0, nth_s=nth_s, nth_i=nth_i, kappa_yes=kappa,
                             kappa_no=0.0, n_noise=n_noise, g_rx=g)
        mu_yes, mu_no = receiver_means(params)
        _, e = optimize_nu(outcome_distribution(mu_yes, model), outcome_distribution(mu_no, model))
        return e

    g_best, e_best = golden_section_max(e_star, 1.0, g_hi, tol=1e-5)
    return e_best / e_cl, e_best, g_best


def cmd_fig4(file_cfg: dict, args, out: Path) -> int:
    defaults = {
        "mode": "curves",
        "kappa": 3.02e-2,
        "n_noise": 10.0,
        "nth_i": 0.0,
        "nth_s_list": [0.0, 2e-3, 5e-3],
        "ns_min": 1e-3,
        "ns_max": 1e-1,
        "ns_steps": 30,
        "nn_min": 2.0,
        "nn_max": 20.0,
        "nn_steps": 15,
        "nth_s": 0.0,
        "threads": 1,
    }
    cfg = _resolve(defaults, file_cfg, {"threads": args.threads, "mode": args.mode})
    if cfg["mode"] not in ("curves", "contour"):
        raise ConfigError("mode must be curves or contour")
    model = PhotocountModel.ideal()
    ns_grid = np.logspace(math.log10(cfg["ns_min"]), math.log10(cfg["ns_max"]), int(cfg["ns_steps"]))
    threads = int(cfg["threads"])

    if cfg["mode"] == "curves":
        jobs = [(ns, nth_s) for nth_s in cfg["nth_s_list"] for ns in ns_grid]

        def point(job):
            ns, nth_s = job
            q, e, g = _q_at_point(ns, cfg["n_noise"], cfg["kappa"], nth_s, cfg["nth_i"], model)
            return [ns, nth_s, q, e, g]

        columns = ["n_sig", "nth_s", "q", "e_model", "g_opt"]
        comment = "tuned-counter advantage vs signal brightness, one curve per nth_s"
    else:
        nn_grid = np.linspace(cfg["nn_min"], cfg["nn_max"], int(cfg["nn_steps"]))
        jobs = [(ns, nn) for ns in ns_grid for nn in nn_grid]

        def point(job):
            ns, nn = job
            q, e, g = _q_at_point(ns, nn, cfg["kappa"], cfg["nth_s"], cfg["nth_i"], model)
            return [ns, nn, q]

        columns = ["n_sig", "n_noise", "q"]
        comment = "tuned-counter advantage over the brightness/noise grid"

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(point, jobs))
    else:
        rows = [point(j) for j in jobs]
    write_csv(out / "result.csv", columns, rows, comment)
    qs = [r[2] for r in rows]
    results = {"q_min": float(min(qs)), "q_max": float(max(qs)), "points": len(rows)}
    write_summary(out / "summary.json", "fig4", cfg, results)
    print(f"{len(rows)} grid points, q in [{results['q_min']:.3f}, {results['q_max']:.3f}]")
    return 0


def cmd_simulate(file_cfg: dict, args, out: Path) -> int:
    defaults = dict(_RADAR_DEFAULTS)
    defaults.update({"g_rx": 1.015, "m_trials": 500_000, "chunk": 500_000,
                     "seed": 0, "threads": 1, "tune_nu": False})
    cfg = _resolve(defaults, file_cfg,
                   {"seed": args.seed, "threads": args.threads, "tune_nu": args.tune_nu})
    params = _radar_params(cfg, cfg["g_rx"])
    model = PhotocountModel.with_errors(cfg["eps_pi"], cfg["eps_ro"])
    mu_yes, mu_no = receiver_means(params)
    dist_yes = outcome_distribution(mu_yes, model)
    dist_no = outcome_distribution(mu_no, model)
    if cfg["tune_nu"]:
        nu, e_model = optimize_nu(dist_yes, dist_no)
    else:
        nu = np.asarray(cfg["nu"], dtype=float)
        e_model = error_exponent_categorical(dist_yes, dist_no, nu)
    tally = run_trials(params, model, TrialConfig(int(cfg["m_trials"]), int(cfg["seed"]), int(cfg["chunk"])),
                       threads=int(cfg["threads"]))
    est = estimate_error_exponent(tally, nu)
    n_sig = tmsv_generate(cfg["g0"], cfg["nth_s"], cfg["nth_i"]).n_sig
    e_cl = classical_bound(cfg["kappa"], n_sig, cfg["n_noise"])
    q = delta_q(Measured(est.value, est.sigma), Measured(e_cl, 0.0))
    frac_yes, frac_no = tally.fractions()
    scalars = {
        "mu_yes": mu_yes,
        "mu_no": mu_no,
        "e_ideal": ideal_error_exponent(params),
        "e_model": e_model,
        "e_mc": est.value,
        "e_mc_sigma": est.sigma,
        "e_cl": e_cl,
        "q_mc": q.value,
        "q_mc_sigma": q.sigma,
        "g_opt": optimal_gain(n_sig, cfg["n_noise"], cfg["kappa"]),
    }
    for i, name in enumerate(("gg", "ge", "eg", "ee")):
        scalars[f"frac_yes_{name}"] = frac_yes[i]
        scalars[f"frac_no_{name}"] = frac_no[i]
    rows = [[k, v] for k, v in scalars.items()]
    write_csv(out / "result.csv", ["name", "value"], rows, "single-point simulation")
    cfg_out = dict(cfg)
    cfg_out["nu"] = [float(v) for v in nu]
    write_summary(out / "summary.json", "simulate", cfg_out, {k: float(v) for k, v in scalars.items()})
    print(f"e_mc {est.value:.4e} +- {est.sigma:.4e} (q {q.value:.3f} +- {q.sigma:.3f})")
    return 0


def cmd_calibrate(file_cfg: dict, args, out: Path) -> int:
    defaults = {
        "which": "ramsey",
        "seed": 0,
        "ramsey_ni": 0.104,
        "ramsey_noise": 0.01,
        "relax_n": 8.6,
        "relax_nth": 0.01,
        "relax_shots": 10_000,
        "cosine_offset": 1.0,
        "cosine_amp": 0.25,
        "cosine_phi0": -1.898,
        "cosine_noise": 0.02,
        "kappa_true": 3.02e-2,
        "kappa_amps": [0.8, 1.0, 1.2],
        "kappa_noise": 2e-3,
    }
    cfg = _resolve(defaults, file_cfg, {"which": getattr(args, "which", None), "seed": args.seed})
    which = cfg["which"]
    rng = np.random.default_rng(int(cfg["seed"]))
    out_rows: list
    if which == "ramsey":
        model = fitkit.RamseyModel()
        t, y = fitkit.make_ramsey_data(cfg["ramsey_ni"], model, cfg["ramsey_noise"], rng)
        res = fitkit.fit_ramsey(t, y, model)
        recovered, err = res.params[1], res.stderr[1]
        truth = cfg["ramsey_ni"]
        fit_curve = res.params[0] * fitkit.ramsey_signal(t, recovered, fitkit.RamseyModel(t2=res.params[2]))
        out_rows = zip(t, y, fit_curve)
        columns = ["t", "signal", "fit"]
    elif which == "relaxation":
        model = fitkit.RelaxationModel(nth=cfg["relax_nth"])
        t, y, sigma = fitkit.make_relaxation_data(cfg["relax_n"], model, int(cfg["relax_shots"]), rng)
        res = fitkit.fit_relaxation(t, y, sigma=sigma)
        recovered, err = res.params[0], res.stderr[0]
        truth = cfg["relax_n"]
        fit_curve = fitkit.relaxation_signal(t, res.params[0], fitkit.RelaxationModel(t1=res.params[1], nth=res.params[2]))
        out_rows = zip(t, y, fit_curve)
        columns = ["t", "p_ground", "fit"]
    elif which == "cosine":
        phi, y = fitkit.make_interference_data(cfg["cosine_offset"], cfg["cosine_amp"],
                                               cfg["cosine_phi0"], cfg["cosine_noise"], rng)
        res = fitkit.fit_interference(phi, y)
        recovered, err = res.params[2], res.stderr[2]
        truth = cfg["cosine_phi0"]
        fit_curve = res.params[0] + res.params[1] * np.cos(phi - res.params[2])
        out_rows = zip(phi, y, fit_curve)
        columns = ["phi", "ratio", "fit"]
    elif which == "kappa":
        pairs = [fitkit.make_wigner_pair(a, cfg["kappa_true"], cfg["kappa_noise"], rng)
                 for a in cfg["kappa_amps"]]
        windows = [fitkit.pair_window(a, math.sqrt(cfg["kappa_true"]) * a) for a in cfg["kappa_amps"]]
        per_amp = [fitkit.kappa_with_uncertainty(p[0], p[1], w, cfg["kappa_noise"])
                   for p, w in zip(pairs, windows)]
        combined = fitkit.estimate_kappa(pairs, windows, cfg["kappa_noise"])
        recovered, err = combined.value, combined.sigma
        truth = cfg["kappa_true"]
        out_rows = [[a, m.value, m.sigma] for a, m in zip(cfg["kappa_amps"], per_amp)]
        columns = ["amp", "kappa", "kappa_sigma"]
        res = None
    else:
        raise ConfigError(f"unknown calibration: {which}")

    if res is not None and not res.converged:
        print("fit did not converge", file=sys.stderr)
        return 3
    write_csv(out / "result.csv", columns, out_rows, f"{which} calibration data and fit")
    results = {
        "recovered": float(recovered),
        "stderr": float(err),
        "truth": float(truth),
        "within_2_stderr": bool(abs(recovered - truth) <= 2.0 * err),
    }
    write_summary(out / "summary.json", f"calibrate:{which}", cfg, results)
    print(f"{which}: recovered {recovered:.6g} +- {err:.2g} (truth {truth:.6g})")
    return 0


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qradar", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", default=None, help="JSON config file")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--out", default="qradar-out")
        p.add_argument("--threads", type=int, default=None)

    p = sub.add_parser("bounds", help="closed-form bounds and optimal gain")
    common(p)
    p.add_argument("--kappa", type=float, default=None)
    p.add_argument("--n-sig", dest="n_sig", type=float, default=None)
    p.add_argument("--n-noise", dest="n_noise", type=float, default=None)

    p = sub.add_parser("fig3", help="Monte Carlo gain sweep")
    common(p)

    p = sub.add_parser("fig4", help="advantage over parameter grids")
    common(p)
    p.add_argument("--mode", choices=("curves", "contour"), default=None)

    p = sub.add_parser("simulate", help="single-point simulation")
    common(p)
    # default None so a config-file value survives when the flag is absent
    p.add_argument("--tune-nu", dest="tune_nu", action="store_const", const=True,
                   default=None, help="optimize outcome labels instead of using nu")

    p = sub.add_parser("calibrate", help="synthetic calibration demos")
    common(p)
    p.add_argument("--which", choices=("ramsey", "relaxation", "cosine", "kappa"), default=None)
    return parser


_COMMANDS = {
    "bounds": cmd_bounds,
    "fig3": cmd_fig3,
    "fig4": cmd_fig4,
    "simulate": cmd_simulate,
    "calibrate": cmd_calibrate,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        file_cfg = _load_config(args.config)
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        return _COMMANDS[args.command](file_cfg, args, out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, ArithmeticError, np.linalg.LinAlgError, fitkit.FitError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
