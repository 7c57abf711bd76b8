"""Critical index eta_c versus measurement time, plus the fidelity-vs-tau_m inset curves.

Usage: python3 scripts/reproduce_fig2.py [--out DIR] [--points N]
"""

import argparse
import math
import os

import numpy as np

from nanoteleport import circuit, detector, protocol
from nanoteleport.cli import write_csv


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="results")
    ap.add_argument("--points", type=int, default=81)
    args = ap.parse_args()

    d = circuit.derive(circuit.DeviceParams())
    noise = detector.noise_amplitudes(detector.DetectorSpec(), 50e-9, d)
    constants = (noise.c_x, noise.c_p)
    taus = np.logspace(-9, -5, args.points)
    main_rows, inset = protocol.sweep_fig2(constants, taus)
    write_csv(os.path.join(args.out, "fig2_main.csv"), ["tau_m_s", "log10_tau_m", "eta_c"],
              [(t, math.log10(t), e) for t, e in main_rows])
    write_csv(os.path.join(args.out, "fig2_inset.csv"), ["tau_m_s", "F_eta0", "F_eta1", "F_eta5"], inset)

    tau_c = protocol.tau_critical(constants)
    op = protocol.EnvSpec.at_temperature(50e-3, 1e9, 1.5, 50e-9)
    print(f"tau_m^c          = {tau_c * 1e9:.3f} ns")
    print(f"eta_c(50 ns)     = {protocol.eta_critical(50e-9, constants):.4f}")
    print(f"operating eta    = {op.eta:.4f}")
    print(f"wrote {args.out}/fig2_main.csv and {args.out}/fig2_inset.csv")


if __name__ == "__main__":
    main()
