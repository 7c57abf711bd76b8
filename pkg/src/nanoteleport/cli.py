"""Command-line entry point.

Exit codes: 0 success, 1 usage or parse error, 2 physics-constraint failure.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import math
import os
import sys
import warnings

import numpy as np

from . import circuit, detector, oracle, protocol
from . import gaussian as g
from .config import ConfigError, RunConfig, dump_config, load_config

EXIT_OK, EXIT_USAGE, EXIT_PHYSICS = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _fmt(value, precision: int) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (float, np.floating)):
        return f"{value:.{precision}g}"
    return str(value)


def write_csv(path, header, rows, precision: int = 9) -> None:
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v, precision) for v in row])


def _derived(cfg: RunConfig) -> circuit.DerivedCircuit:
    d = circuit.derive(cfg.device)
    overrides = {k: getattr(cfg.env, k) for k in ("lambda_ab", "lambda_bc") if getattr(cfg.env, k) is not None}
    return dataclasses.replace(d, **overrides) if overrides else d


def _noise(cfg: RunConfig, d: circuit.DerivedCircuit) -> protocol.NoiseAmplitudes:
    env = cfg.env
    if env.delta_x is not None or env.delta_p is not None:
        if env.delta_x is None or env.delta_p is None:
            raise UsageError("set both delta_x and delta_p, or neither")
        return protocol.NoiseAmplitudes.from_deltas(env.delta_x, env.delta_p, env.tau_m)
    return detector.noise_amplitudes(cfg.detector, env.tau_m, d)


def _env(cfg: RunConfig) -> protocol.EnvSpec:
    e = cfg.env
    return protocol.EnvSpec.at_temperature(e.T, cfg.device.omega_nr, e.r_2, e.tau_m, e.coherent_input)


def cmd_derive(cfg: RunConfig, out) -> int:
    d = _derived(cfg)
    report = circuit.check_hierarchy(d, cfg.device, cfg.env.tau_m, cfg.env.margin)
    print(f"C_Sigma    = {d.C_Sigma:.6g} F", file=out)
    print(f"E_C        = {d.E_C:.6g} Hz", file=out)
    print(f"E_J_eff    = {d.E_J_eff:.6g} Hz", file=out)
    print(f"omega_phi  = {d.omega_phi:.6g} Hz", file=out)
    print(f"delta_x0   = {d.delta_x0:.6g} m", file=out)
    print(f"lambda_ab  = {d.lambda_ab:.6g} Hz", file=out)
    print(f"lambda_bc  = {d.lambda_bc:.6g} Hz", file=out)
    print(f"omega_d    = {d.omega_d_squeeze:.6g} Hz (squeeze), {d.omega_d_beamsplit:.6g} Hz (beam splitter)", file=out)
    print(f"hierarchy (margin {cfg.env.margin:g}):", file=out)
    for item in report.items:
        mark = "ok  " if item.passed else "FAIL"
        print(f"  {mark} {item.name:13s} {item.small_label:>10s} / {item.large_label:<9s} = {item.ratio:.3g}", file=out)
    return EXIT_OK if report.passed else EXIT_PHYSICS


def cmd_schedule(cfg: RunConfig, out, out_dir=None) -> int:
    d = _derived(cfg)
    sched = circuit.schedule(d, cfg.env.r_2, cfg.env.tau_m)
    for row in sched.rows:
        print(f"{row.operation:22s} ({row.modes[0]},{row.modes[1]})  {row.duration * 1e9:.4g} ns", file=out)
    print(f"total                  {sched.total_duration * 1e9:.4g} ns", file=out)
    if out_dir:
        rows = [(r.operation, f"{r.modes[0]}-{r.modes[1]}", r.duration) for r in sched.rows]
        write_csv(os.path.join(out_dir, "schedule.csv"), ["operation", "modes", "duration_s"], rows,
                  cfg.output.precision)
    return EXIT_OK


TELEPORT_HEADER = ["F_closed", "F_analytic", "F_mc", "F_mc_sigma", "mu_x", "mu_p", "eta", "delta_x", "delta_p",
                   "theta_a1", "theta_a2", "n_samples", "seed"]


def cmd_teleport(cfg: RunConfig, out, out_dir=None) -> int:
    d = _derived(cfg)
    env = _env(cfg)
    noise = _noise(cfg, d)
    res = protocol.run_pipeline(d, env, noise, (cfg.env.input_x, cfg.env.input_p), seed=cfg.seed,
                                n_samples=cfg.env.n_samples)
    p = cfg.output.precision
    row = [res.fidelity_closed, res.fidelity_analytic, res.fidelity_mc, res.fidelity_mc_sigma,
           res.channel.mu_x, res.channel.mu_p, env.eta, noise.delta_x, noise.delta_p,
           env.theta_a1, env.theta_a2, res.n_samples, cfg.seed]
    print(f"F_closed = {res.fidelity_closed:.{p}g}", file=out)
    print(f"F_mc     = {res.fidelity_mc:.{p}g} +/- {res.fidelity_mc_sigma:.3g} ({res.n_samples} records, seed {cfg.seed})",
          file=out)
    print(f"mu       = ({res.channel.mu_x:.{p}g}, {res.channel.mu_p:.{p}g})", file=out)
    print(f"eta      = {env.eta:.{p}g}", file=out)
    print(f"delta    = ({noise.delta_x:.{p}g}, {noise.delta_p:.{p}g})", file=out)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(TELEPORT_HEADER)
    w.writerow([_fmt(v, p) for v in row])
    print(buf.getvalue(), end="", file=out)
    if out_dir:
        write_csv(os.path.join(out_dir, "teleport.csv"), TELEPORT_HEADER, [row], p)
    return EXIT_OK


def _tau_grid(cfg: RunConfig) -> np.ndarray:
    s = cfg.sweep
    if s.tau_points < 1:
        raise UsageError("empty tau grid")
    return np.logspace(math.log10(s.tau_min), math.log10(s.tau_max), s.tau_points)


def cmd_sweep(cfg: RunConfig, which: str, out, out_dir: str) -> int:
    d = _derived(cfg)
    noise = _noise(cfg, d)
    constants = (noise.c_x, noise.c_p)
    p = cfg.output.precision
    os.makedirs(out_dir, exist_ok=True)
    checks = []
    if which == "fig2":
        taus = _tau_grid(cfg)
        main, inset = protocol.sweep_fig2(constants, taus)
        write_csv(os.path.join(out_dir, "fig2_main.csv"), ["tau_m_s", "log10_tau_m", "eta_c"],
                  [(t, math.log10(t), e) for t, e in main], p)
        write_csv(os.path.join(out_dir, "fig2_inset.csv"), ["tau_m_s", "F_eta0", "F_eta1", "F_eta5"], inset, p)
        etas = [e for _, e in main]
        checks.append(("eta_c nonnegative", all(e >= 0 for e in etas)))
        checks.append(("eta_c nondecreasing", all(b >= a - 1e-9 for a, b in zip(etas, etas[1:]))))
        checks.append(("inset ordered eta=0 > 1 > 5", all(r[1] > r[2] > r[3] for r in inset)))
        print(f"tau_m^c = {protocol.tau_critical(constants):.{p}g} s", file=out)
    else:
        s = cfg.sweep
        if s.theta_points < 1 or not s.r2_list:
            raise UsageError("empty theta grid")
        thetas = np.linspace(s.theta_min, s.theta_max, s.theta_points)
        rows = protocol.sweep_fig3(cfg.env.tau_m, s.r2_list, thetas, constants)
        header = ["theta"] + [f"F_r2_{r:g}" for r in s.r2_list]
        write_csv(os.path.join(out_dir, "fig3.csv"), header, rows, p)
        cols = np.array(rows)[:, 1:]
        checks.append(("F increasing in theta", bool(np.all(np.diff(cols, axis=0) > 0))))
        order = np.argsort(s.r2_list)[::-1]
        checks.append(("columns ordered by r_2", bool(np.all(np.diff(cols[:, order], axis=1) < 0))))
    for name, ok in checks:
        print(f"{'ok  ' if ok else 'FAIL'} {name}", file=out)
    return EXIT_OK if all(ok for _, ok in checks) else EXIT_PHYSICS


def cmd_detector(cfg: RunConfig, out) -> int:
    d = _derived(cfg)
    r = detector.detector_report(cfg.detector, cfg.env.tau_m, d)
    print(f"sqrt_S_x = {r.sqrt_S_x:.6g} m/sqrt(Hz)", file=out)
    print(f"sqrt_S_p = {r.sqrt_S_p:.6g} e/sqrt(Hz)", file=out)
    print(f"Delta_x  = {r.delta_x_phys:.6g} m", file=out)
    print(f"Delta_p  = {r.delta_p_phys:.6g} e", file=out)
    print(f"delta_x  = {r.noise.delta_x:.6g}", file=out)
    print(f"delta_p  = {r.noise.delta_p:.6g}", file=out)
    print(f"c_x      = {r.noise.c_x:.6g} sqrt(s)", file=out)
    print(f"c_p      = {r.noise.c_p:.6g} sqrt(s)", file=out)
    if not cfg.detector.check_bandwidth(cfg.device.omega_nr):
        print("warning: detector bandwidth not below 2*omega_nr", file=out)
    return EXIT_OK


def cmd_oracle(cfg: RunConfig, out) -> int:
    d = _derived(cfg)
    env = _env(cfg)
    noise = _noise(cfg, d)
    inp = g.displace(g.thermal_state(env.theta_a1), 0, cfg.env.input_x, cfg.env.input_p)
    grid = oracle.teleport_integral(inp, env.r_2, env.theta_a2, (noise.delta_x, noise.delta_p))
    _, cov = grid.moments()
    ch = protocol.channel_mu(env.r_2, env.theta_a2, noise)
    added = np.diag(cov) - np.diag(inp.cov)
    expected = np.array([ch.mu_x, ch.mu_p]) / 2
    rel = np.abs(added - expected) / expected
    print(f"added variance (grid)   = ({added[0]:.6g}, {added[1]:.6g})", file=out)
    print(f"added variance (closed) = ({expected[0]:.6g}, {expected[1]:.6g})", file=out)
    print(f"relative deviation      = ({rel[0]:.3g}, {rel[1]:.3g})", file=out)
    return EXIT_OK if np.all(rel < 0.02) else EXIT_PHYSICS


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="nanoteleport", description=__doc__.splitlines()[0])
    parser.add_argument("--config", help="config file (defaults to the reference device)")
    parser.add_argument("--seed", type=int, help="override the config seed")
    parser.add_argument("--out", help="output directory for CSV files")
    parser.add_argument("--dump-defaults", action="store_true", help="print the default config and exit")
    sub = parser.add_subparsers(dest="command")
    for name in ("derive", "schedule", "teleport", "detector", "oracle"):
        sub.add_parser(name)
    sw = sub.add_parser("sweep")
    sw.add_argument("which", choices=["fig2", "fig3"])
    return parser


def main(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.dump_defaults:
        print(dump_config(RunConfig()), end="", file=out)
        return EXIT_OK
    if args.command is None:
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    try:
        cfg = load_config(args.config) if args.config else RunConfig()
    except (OSError, ConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.seed is not None:
        cfg = dataclasses.replace(cfg, seed=args.seed)
    out_dir = args.out
    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", RuntimeWarning)
            code = _dispatch(args, cfg, out, out_dir)
        for w in caught:
            print(f"warning: {w.message}", file=sys.stderr)
        return code
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"physics error: {exc}", file=sys.stderr)
        return EXIT_PHYSICS


def _dispatch(args, cfg: RunConfig, out, out_dir) -> int:
    if args.command == "derive":
        return cmd_derive(cfg, out)
    if args.command == "schedule":
        return cmd_schedule(cfg, out, out_dir)
    if args.command == "teleport":
        return cmd_teleport(cfg, out, out_dir)
    if args.command == "sweep":
        return cmd_sweep(cfg, args.which, out, out_dir or cfg.output.directory)
    if args.command == "detector":
        return cmd_detector(cfg, out)
    return cmd_oracle(cfg, out)


if __name__ == "__main__":
    sys.exit(main())
