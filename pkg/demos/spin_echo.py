"""Hahn-echo signal and the commuting blind spot.

A bath whose couplings are purely longitudinal commutes with the qubit, so the
echo stays at 1/2 and the protocol signal vanishes.  Turning on transverse
couplings makes the echo decay.
"""

import numpy as np

from qeewitness import Bath, echo_trace

rng = np.random.default_rng(3)
n = 30
positions = rng.normal(size=(n, 3))
couplings = rng.uniform(-0.3, 0.3, (n, 3))
taus = np.linspace(0, 40, 9)

longitudinal = couplings.copy()
longitudinal[:, :2] = 0.0
for label, a in (("longitudinal only", longitudinal), ("full coupling", couplings)):
    echo = echo_trace(Bath(positions, a, np.zeros(n), 1.346), taus)
    print(label)
    for tau, e in zip(taus, echo):
        print(f"  tau = {tau:5.1f} us   |echo| = {abs(e):.4f}")
