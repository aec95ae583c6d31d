"""Super dense coding capacity over noisy unital quantum channels."""

from .analysis import (
    RootReport,
    SweepResult,
    find_classical_limit_crossing,
    find_threshold_alpha,
    sweep_figure3,
    sweep_figure4,
    sweep_figure5,
)
from .capacity import (
    CapacityResult,
    Ensemble,
    EncodingKind,
    EncodingScheme,
    brute_force_best_encoding,
    capacity_alpha,
    capacity_bell_one_sided_dep2,
    capacity_bell_one_sided_pauli,
    capacity_bell_two_sided_dep2,
    capacity_noiseless,
    capacity_unital,
    capacity_werner_one_sided_pauli,
    check_entropy_condition,
    classical_dep2_capacity,
    holevo,
    preprocessing_capacity,
    weyl_scheme,
)
from .channels import (
    BipartiteChannel,
    KrausChannel,
    PauliSpec,
    apply,
    depolarizing_spec,
    lift,
    one_sided_pauli,
    pauli_channel,
    two_sided_depolarizing,
    two_sided_pauli,
    verify_covariance,
)
from .errors import (
    BracketError,
    ChannelError,
    ConditionViolatedError,
    DenseCodingError,
    InvalidStateError,
    NotHermitianError,
)
from .linalg import (
    DensityMatrix,
    Spectrum,
    hermitian_eigenvalues,
    partial_trace,
    relative_entropy,
    shannon_entropy,
    tensor,
    von_neumann_entropy,
)
from .qops import (
    WeylIndex,
    bell_density,
    bell_state,
    random_unitary,
    schmidt_density,
    schmidt_state,
    su_generators,
    weyl_operator,
    werner_state,
)

__version__ = "0.1.0"
