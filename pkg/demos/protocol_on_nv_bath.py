"""Two-preparation protocol on a simulated NV-centre carbon-13 bath.

Builds a bath at 20 mT with the inner spins polarized, evaluates the
coherence difference along the diagonal tau = t, and prints a coarse profile.
Run with ``python3 demos/protocol_on_nv_bath.py [seed]``.
"""

import sys

import numpy as np

from qeewitness import LatticeConfig, TimeGrid, build_bath, protocol_trace

seed = int(sys.argv[1]) if len(sys.argv) > 1 else 0
bath = build_bath(LatticeConfig(bath_radius=4.0, seed=seed), b_z=0.02, r_p=0.9)
print(f"{len(bath)} carbon-13 spins, {int(np.sum(bath.polarization != 0))} polarized")

trace = protocol_trace(bath, TimeGrid(0, 40, 200, diagonal=True))
imag = trace.delta_norm.imag
print(f"largest |Im delta| = {np.max(np.abs(imag)):.3f} at tau = t = {trace.tau_grid[np.argmax(np.abs(imag))]:.2f} us")
for tau, value in zip(trace.tau_grid[::20], imag[::20]):
    bar = "#" * int(round(40 * abs(value)))
    print(f"{tau:6.2f} us  {value:+.3f}  {bar}")
