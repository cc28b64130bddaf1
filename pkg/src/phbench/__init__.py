"""Benchmark problems with a guaranteed reachable ground state.

Generates local Hamiltonians whose exact zero-energy ground state is
producible by a fixed low-depth translation-invariant circuit, then
measures how classical optimizers converge as a function of the initial
parameters' distance from the hidden solution.
"""

from .circuit import (
    AnsatzSpec,
    Gate,
    build_ansatz,
    energy,
    expectation,
    gradient_finite_difference,
    gradient_parameter_shift,
    simulate,
)
from .mps import (
    PeriodicMPS,
    ansatz_to_mps,
    gamma_map_rank,
    injectivity_length,
    mps_to_statevector,
    reduced_density,
    transfer_operator,
)
from .parent import (
    EmptyKernelError,
    LocalTerm,
    ParentHamiltonian,
    PauliTerm,
    build_parent_hamiltonian,
    dense_hamiltonian,
    exact_spectrum,
    kernel_projector,
    minimal_support,
    pauli_decomposition,
)
from .optim import (
    ObjectiveHandle,
    OptimizationTrace,
    OptimizerConfig,
    minimize,
    wolfe_line_search,
)
from .bench import (
    ExperimentConfig,
    SummaryRow,
    TrialRecord,
    locality_scan,
    run_sweep,
    run_trial,
    sample_initial,
    sample_theta_ans,
    summarize,
)
from . import linalg

__version__ = "0.1.0"
