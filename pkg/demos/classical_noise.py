"""Classical dephasing noise cannot produce a preparation-dependent signal.

Samples Ornstein-Uhlenbeck and random-telegraph trajectories and shows that
the averaged coherence is the same for both preparations, and that the
quasi-static Gaussian limit matches exp(-sigma^2 t^2 / 2).
"""

import numpy as np

from qeewitness import NoiseProcess, noise_coherence, sample_trajectories

for kind in ("ornstein-uhlenbeck", "random-telegraph"):
    ens = sample_trajectories(NoiseProcess(kind=kind, sigma=1.0, corr_time=2.0, seed=1), 0.02, 4.0, 20000)
    c0, c1 = noise_coherence(ens, 0, 0.0), noise_coherence(ens, 1, 3.0)
    print(f"{kind}: max |rho0 - rho1| = {np.max(np.abs(c0 - c1)):.1e}, |rho(4 us)| = {abs(c0[-1]):.4f}")

static = sample_trajectories(NoiseProcess(sigma=1.0, corr_time=1e9, seed=2), 0.02, 3.0, 50000)
c = noise_coherence(static)
expected = 0.5 * np.exp(-static.times ** 2 / 2)
print(f"quasi-static limit: max deviation from Gaussian decay {np.max(np.abs(c.real - expected)):.4f}")
