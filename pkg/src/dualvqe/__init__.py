"""Statevector simulator and training harness for variational quantum
eigensolvers on a dual-core architecture with a limited interconnect budget.
"""

from .ansatz import (
    AnsatzSpec,
    LayerTemplate,
    ParameterVector,
    build_all_to_all,
    build_dual_core,
    evaluate,
    fidelity_gradient,
    param_count,
    parameter_layout,
    stage_prefix,
)
from .hamiltonians import (
    GroundStateSolution,
    Hamiltonian,
    PauliString,
    build_spin1_heisenberg,
    build_tfim,
    build_xyz,
    expectation,
    ground_state,
    matvec,
    spin1_direct_ed,
)
from .schmidt import (
    SchmidtDecomposition,
    discarded_weight,
    schmidt_decompose,
    schmidt_rank,
    truncate_to_state,
)
from .statevector import (
    SingleQubitGate,
    StateVector,
    apply_single_qubit,
    apply_zz,
    fidelity,
    inner_product,
    rotation_gate,
    zero_state,
)
from .trainer import (
    StageResult,
    TrainingConfig,
    TrainingResult,
    epsilon,
    stage_targets,
    train_full,
    train_stage,
)

__version__ = "0.1.0"
