"""Fidelity for thermal input states versus the thermal index, one curve per squeezing r_2.

Usage: python3 scripts/reproduce_fig3.py [--out DIR] [--tau-m SECONDS]
"""

import argparse
import os

import numpy as np

from nanoteleport import circuit, detector, protocol
from nanoteleport.cli import write_csv

R2_LIST = (2.0, 0.5, 0.0)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="results")
    ap.add_argument("--tau-m", type=float, default=50e-9)
    args = ap.parse_args()

    d = circuit.derive(circuit.DeviceParams())
    noise = detector.noise_amplitudes(detector.DetectorSpec(), args.tau_m, d)
    thetas = np.linspace(1, 5, 81)
    rows = protocol.sweep_fig3(args.tau_m, R2_LIST, thetas, (noise.c_x, noise.c_p))
    write_csv(os.path.join(args.out, "fig3.csv"), ["theta"] + [f"F_r2_{r:g}" for r in R2_LIST], rows)
    for theta in (1.0, 3.0, 5.0):
        row = rows[int(np.argmin(np.abs(thetas - theta)))]
        print(f"theta = {theta:.0f}: " + "  ".join(f"F(r2={r:g}) = {f:.4f}" for r, f in zip(R2_LIST, row[1:])))
    print(f"wrote {args.out}/fig3.csv")


if __name__ == "__main__":
    main()
