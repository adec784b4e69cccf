"""Entanglement criterion on a small dense model and on a product bath.

For two carbon spins the dense criterion and the protocol signal agree: a
polarized environment with transverse coupling gives a non-zero distance,
while the maximally mixed state gives none.
"""

import numpy as np

from qeewitness import Bath, bath_qee_criterion, polarized_product_state, qee_criterion, spin_bath_model

couplings = np.array([[0.4, 0.1, 0.7], [0.0, 0.3, -0.5]])
model = spin_bath_model(1.346, couplings)
polarized = polarized_product_state([0.9, 0.9])
mixed = np.eye(model.dim) / model.dim
for tau in (0.5, 2.0, 5.0):
    r_pol = qee_criterion(model, polarized, tau)
    r_mix = qee_criterion(model, mixed, tau)
    print(f"tau = {tau:3.1f} us: polarized distance {r_pol.distance:.4f} (entangling: {r_pol.qee_detected}), "
          f"mixed distance {r_mix.distance:.1e}")

bath = Bath(np.ones((2, 3)), couplings, [0.9, 0.9], 1.346)
print(f"product-bath relative distance at tau = 2 us: {bath_qee_criterion(bath, 2.0).distance:.4f}")
