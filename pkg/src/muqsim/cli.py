"""``muqsim`` command line.

Exit codes: 0 success, 2 configuration error, 3 data error, 4 resource limit.
The default worker count comes from ``MUQSIM_WORKERS`` when ``--workers`` is
not given.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from dataclasses import asdict
from pathlib import Path

from . import __version__
from .evolution import bound_report
from .hamiltonians import system_hamiltonian
from .io import (ConfigError, DataError, RunConfig, ingest_dataset, load_config, write_manifest,
                 write_report, write_series_csv)
from .kernel.state import ResourceLimitError, preflight

EXIT_OK, EXIT_CONFIG, EXIT_DATA, EXIT_RESOURCE = 0, 2, 3, 4
WORKERS_ENV = "MUQSIM_WORKERS"

log = logging.getLogger("muqsim")


def _workers(args, cfg: RunConfig) -> int:
    if args.workers is not None:
        return args.workers
    env = os.environ.get(WORKERS_ENV)
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ConfigError(f"{WORKERS_ENV} must be an integer, got {env!r}") from None
    return cfg.workers


def _load(args) -> RunConfig:
    if args.config is None:
        raise ConfigError("--config is required for this command")
    cfg = load_config(args.config, getattr(args, "seed", None))
    if getattr(args, "out", None) is not None:
        cfg.out_dir = Path(args.out)
    if getattr(args, "allow_large_memory", False):
        cfg.allow_large_memory = True
    return cfg


def _hamiltonian(cfg: RunConfig):
    system = cfg.system()
    H = system_hamiltonian(system, cfg.magnetic_field, cfg.efg or None, cfg.nuclear_nuclear)
    return system, H


def _preflight(cfg: RunConfig, n_qubits: int):
    dense = cfg.method in ("exact-diag", "exact-mixed", "noisy")
    preflight(n_qubits, "density" if dense else "pure", cfg.allow_large_memory)


def cmd_simulate(args) -> int:
    from .mitigation import mitigated_polarisation
    from .polarisation import angular_average, polarisation, polarisation_exact_diag

    cfg = _load(args)
    system, H = _hamiltonian(cfg)
    _preflight(cfg, H.n_qubits)
    axes = ("x", "y", "z") if cfg.angular_average else ("z",)
    series = {}
    if cfg.method == "exact-diag":
        for a in axes:
            series[a] = polarisation_exact_diag(H, cfg.times, system, axis=a)
    elif cfg.method == "noisy":
        for a in axes:
            low, high, ext = mitigated_polarisation(H, cfg.times, cfg.plan, cfg.noise_p, cfg.noise_lam,
                                                    system, a)
            series[a] = low
            series[f"{a}_boosted"] = high
            series[f"{a}_extrapolated"] = ext
    else:
        series = polarisation(H, cfg.times, cfg.method_config(), cfg.seed, system, _workers(args, cfg))
    if cfg.angular_average and "average" not in series:
        series["average"] = angular_average(series["x"], series["y"], series["z"])
    out = cfg.out_dir
    paths = [write_series_csv(s, out / f"{cfg.prefix}_{name}.csv") for name, s in series.items()]
    write_manifest(out / f"{cfg.prefix}_manifest.json", cfg, "simulate", paths,
                   {"n_qubits": H.n_qubits, "terms": len(H.terms)})
    for p in paths:
        print(p)
    return EXIT_OK


def cmd_fit(args) -> int:
    from .fitting import FitProblem, default_simplex, exact_diag_model, fit_nelder_mead, sampled_model

    cfg = _load(args)
    data_path = args.data or cfg.fit.get("data")
    if data_path is None:
        raise ConfigError("fit needs --data or fit.data")
    if cfg.particles:
        raise ConfigError("fits move fluorine shells; use a [geometry] config")
    dataset = ingest_dataset(data_path)
    free = tuple(cfg.fit.get("free", ("nn",)))
    axes = ("x", "y", "z") if cfg.angular_average else ("z",)
    if cfg.method == "exact-diag":
        model = exact_diag_model(cfg.shell_count, cfg.lattice_constant, axes)
    elif cfg.method == "noisy":
        raise ConfigError("noisy runs cannot be fitted")
    else:
        model = sampled_model(cfg.shell_count, cfg.method_config(), cfg.lattice_constant, _workers(args, cfg))
    fixed = {k: v for k, v in cfg.displacements.items() if k not in free}
    problem = FitProblem(dataset.to_series(), free, model, fixed)
    x0 = cfg.fit.get("x0", [cfg.displacements.get(g, 0.0) for g in free])
    if len(x0) != len(free):
        raise ConfigError("fit.x0 needs one value per free group")
    simplex = default_simplex(x0, float(cfg.fit.get("step", 0.05)))
    result = fit_nelder_mead(problem, initial_simplex=simplex, seed=cfg.seed,
                             xatol=float(cfg.fit.get("xatol", 1e-4)), fatol=float(cfg.fit.get("fatol", 1e-4)),
                             maxiter=int(cfg.fit.get("maxiter", 500)))
    out = cfg.out_dir
    out.mkdir(parents=True, exist_ok=True)
    report = out / f"{cfg.prefix}_fit.txt"
    report.write_text(result.report())
    trace = out / f"{cfg.prefix}_fit_trace.csv"
    with open(trace, "w") as fh:
        fh.write("iteration,chi2_reduced," + ",".join(free) + "\n")
        for it, chi2, x in result.trace:
            fh.write(f"{it},{chi2:.17g}," + ",".join(f"{v:.17g}" for v in x) + "\n")
    write_manifest(out / f"{cfg.prefix}_manifest.json", cfg, "fit", [report, trace],
                   {"data": str(data_path), "rows": len(dataset)})
    sys.stdout.write(result.report())
    return EXIT_OK


def cmd_resources(args) -> int:
    from .evolution import trotter_circuit
    from .resources import PRESETS, SurfaceCodeParams, preset_report, solve_distance, summarize

    out = Path(args.out) if args.out else None
    cfg = None if args.preset else _load(args)
    preset = args.preset or cfg.resources.get("preset")
    if preset:
        if preset not in PRESETS:
            raise ConfigError(f"unknown preset {preset!r}; choose from {sorted(PRESETS)}")
        report, quoted = preset_report(preset)
        values = {f"{k}": v for k, v in asdict(report).items()}
        values.update({f"quoted_{k}": v for k, v in quoted.items()})
        name = preset
    else:
        r = cfg.resources
        params = SurfaceCodeParams(float(r.get("p", 1e-3)), float(r.get("eps", 0.01)),
                                   int(r.get("t_per_rotation", 100)), float(r.get("cycle_time_us", 1.0)),
                                   int(r.get("distillation_tiles", 11)), int(r.get("cycles_per_magic_state", 11)))
        if "t_count" in r:
            n_qubits = int(r.get("n_qubits", 0)) or cfg.system().n_qubits
            values = {}
            t_count = float(r["t_count"])
        else:
            _, H = _hamiltonian(cfg)
            n_qubits = H.n_qubits
            gates = trotter_circuit(H, cfg.plan.at(float(cfg.times[-1])))
            summary = summarize(gates, n_qubits)
            values = {f"nisq_{k}": v for k, v in asdict(summary).items()}
            values["nisq_expected_errors"] = summary.expected_errors(cfg.noise_p) if cfg.noise_p else 0.0
            t_count = summary.rotations * params.t_per_rotation
        report = solve_distance(t_count, n_qubits, params)
        values.update(asdict(report))
        name = cfg.prefix
    if cfg is not None:
        out = out or cfg.out_dir
    text = "".join(f"{k} = {v}\n" for k, v in values.items())
    sys.stdout.write(text)
    if out is not None:
        path = write_report(out / f"{name}_resources.txt", values)
        write_manifest(out / f"{name}_manifest.json", cfg, "resources", [path])
    return EXIT_OK


def cmd_bounds(args) -> int:
    cfg = _load(args)
    _, H = _hamiltonian(cfg)
    b = cfg.bounds
    orders = b.get("orders", [1 if cfg.plan.method == "trotter1" else 2])
    steps = b.get("steps", [cfg.plan.steps])
    times = b.get("times", [float(cfg.times[-1])])
    norms = b.get("norms", "inside")
    out = cfg.out_dir
    out.mkdir(parents=True, exist_ok=True)
    path = out / f"{cfg.prefix}_bounds.csv"
    rows = ["order,steps,time_us,loose,tight,L,Lambda,lambda,exact_norm"]
    for order in orders:
        for n in steps:
            for t in times:
                r = bound_report(int(order), H, float(t), int(n), norms)
                rows.append(f"{r.order},{r.n},{r.t:.17g},{r.loose:.17g},{r.tight:.17g},{r.L},"
                            f"{r.Lambda:.17g},{r.lam:.17g},{str(r.exact_norm).lower()}")
    path.write_text("\n".join(rows) + "\n")
    write_manifest(out / f"{cfg.prefix}_manifest.json", cfg, "bounds", [path])
    print(path)
    return EXIT_OK


def cmd_validate(args) -> int:
    cfg = _load(args)
    n = cfg.system().n_qubits
    if args.data:
        ds = ingest_dataset(args.data)
        print(f"data ok: {len(ds)} rows")
    print(f"config ok: {n} qubits, method {cfg.method}, {cfg.times.size} times")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="muqsim", description="Muon spin polarisation on simulated qubits.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, data=False):
        p.add_argument("--config", type=Path, help="TOML run configuration")
        p.add_argument("--out", type=Path, help="output directory (overrides output.dir)")
        p.add_argument("--seed", type=int, help="overrides the config seed")
        p.add_argument("--workers", type=int, help=f"worker processes (default: ${WORKERS_ENV} or config)")
        p.add_argument("--allow-large-memory", action="store_true",
                       help="permit states above 1 GiB")
        if data:
            p.add_argument("--data", type=Path, help="delimited asymmetry data")
        return p

    common(sub.add_parser("simulate", help="polarisation series")).set_defaults(func=cmd_simulate)
    common(sub.add_parser("fit", help="Nelder-Mead geometry fit"), data=True).set_defaults(func=cmd_fit)
    p = common(sub.add_parser("resources", help="gate counts and surface-code estimate"))
    p.add_argument("--preset", help="named scenario instead of a config")
    p.set_defaults(func=cmd_resources)
    common(sub.add_parser("bounds", help="Trotter error bound table")).set_defaults(func=cmd_bounds)
    common(sub.add_parser("validate-config", help="check a config (and optionally a dataset)"),
           data=True).set_defaults(func=cmd_validate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except ResourceLimitError as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        return EXIT_RESOURCE


if __name__ == "__main__":
    sys.exit(main())
