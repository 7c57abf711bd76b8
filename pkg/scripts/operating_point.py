"""Full chain at the default operating point: circuit, schedule, detector, channel, pipeline and oracle.

Usage: python3 scripts/operating_point.py [--samples N] [--seed S]
"""

import argparse

import numpy as np

from nanoteleport import circuit, detector, oracle, protocol
from nanoteleport import gaussian as g


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--samples", type=int, default=100_000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    p = circuit.DeviceParams()
    d = circuit.derive(p)
    tau_m = 50e-9
    print(f"omega_phi = {d.omega_phi / 1e9:.3f} GHz, lambda_ab = {d.lambda_ab / 1e6:.3f} MHz, "
          f"lambda_bc = {d.lambda_bc / 1e9:.4f} GHz")
    report = circuit.check_hierarchy(d, p, tau_m)
    print(f"hierarchy: {'all pass' if report.passed else f'{len(report.failures)} failing'}")
    for row in circuit.schedule(d, 1.5, tau_m).rows:
        print(f"  {row.operation:22s} {row.duration * 1e9:7.3f} ns")

    noise = detector.noise_amplitudes(detector.DetectorSpec(), tau_m, d)
    env = protocol.EnvSpec.at_temperature(p.T, p.omega_nr, 1.5, tau_m)
    print(f"Theta_a2 = {env.theta_a2:.4f}, eta = {env.eta:.4f}, delta = ({noise.delta_x:.4f}, {noise.delta_p:.4f})")

    res = protocol.run_pipeline(d, env, noise, seed=args.seed, n_samples=args.samples)
    print(f"F closed form = {res.fidelity_closed:.5f}")
    print(f"F pipeline    = {res.fidelity_analytic:.5f} (analytic), "
          f"{res.fidelity_mc:.5f} +/- {res.fidelity_mc_sigma:.1e} (Monte Carlo)")

    grid = oracle.teleport_integral(g.vacuum(), env.r_2, env.theta_a2, (noise.delta_x, noise.delta_p))
    _, cov = grid.moments()
    added = np.diag(cov) - 0.25
    print(f"oracle added variance = ({added[0]:.5f}, {added[1]:.5f}), "
          f"closed form = ({res.channel.mu_x / 2:.5f}, {res.channel.mu_p / 2:.5f})")


if __name__ == "__main__":
    main()
