"""Qubit-only detection of qubit-environment entanglement under pure dephasing."""

from .dephasing import (
    EntanglementReport,
    PureDephasingModel,
    commutator_norm,
    conditional_propagators,
    echo_coherence,
    joint_oracle,
    polarized_product_state,
    protocol_coherence,
    qee_criterion,
    spin_bath_model,
)
from .errors import CapacityError, NumericalError, ValidationError
from .linalg import frobenius_distance, kron, propagator
from .noise import NoiseProcess, noise_coherence, sample_trajectories
from .nvbath import (
    Bath,
    BathSpin,
    ContactModel,
    LatticeConfig,
    apply_polarization,
    build_bath,
    compute_couplings,
    generate_sites,
    read_bath,
    sample_bath,
    write_bath,
)
from .protocol import (
    ProtocolTrace,
    TimeGrid,
    bath_coherence,
    bath_qee_criterion,
    delta_L_analytic,
    echo_trace,
    protocol_trace,
    spin_factor,
)

__version__ = "0.1.0"
