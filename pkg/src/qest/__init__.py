"""Quantum Fisher information for one-parameter channels and the qubit
ancilla-assisted enhancement factor, which is always between 1 and 3/2."""

from .catalog import depolarizing, gad, random_low_noise, rotation_unitary
from .channels import (
    ChannelFamily,
    KrausChannel,
    LowNoiseChannel,
    apply_channel,
    extend_family,
    extend_with_ancilla,
    family_from_low_noise,
    from_noise_operators,
    identity_channel,
    instantiate,
    validate_first_order,
    validate_trace_preserving,
)
from .errors import (
    ConvergenceError,
    DegenerateChannelError,
    DegenerateFamilyError,
    DegenerateFamilyWarning,
    ParameterRangeError,
    QestError,
    SchemaError,
    SingularGeometryError,
    ValidationError,
)
from .estimation import (
    EstimationResult,
    SearchConfig,
    channel_qfi,
    maximize_qfi_pure,
    optimal_estimator,
    qfi,
    sld,
)
from .linalg import (
    bloch_to_density,
    check_density,
    check_pure,
    dagger,
    density_to_bloch,
    fibonacci_sphere,
    hermitian_eig,
    partial_trace,
    pauli_decompose,
    pure_to_density,
    tensor_product,
)
from .lownoise import (
    EnhancementReport,
    NoiseGeometry,
    enhancement_factor,
    eta_bruteforce,
    leading_qfi_coefficient,
    min_quadratic_on_sphere,
    noise_geometry,
    optimal_input_states,
    quadratic_form,
)
from .unitary import (
    UnitaryFamily,
    log_hamiltonian,
    no_enhancement_check,
    unitary_channel_family,
    unitary_qfi,
    unitary_qfi_max,
)

__version__ = "0.1.0"

__all__ = [
    "ChannelFamily",
    "ConvergenceError",
    "DegenerateChannelError",
    "DegenerateFamilyError",
    "DegenerateFamilyWarning",
    "EnhancementReport",
    "EstimationResult",
    "KrausChannel",
    "LowNoiseChannel",
    "NoiseGeometry",
    "ParameterRangeError",
    "QestError",
    "SchemaError",
    "SearchConfig",
    "SingularGeometryError",
    "UnitaryFamily",
    "ValidationError",
    "apply_channel",
    "bloch_to_density",
    "channel_qfi",
    "check_density",
    "check_pure",
    "dagger",
    "density_to_bloch",
    "depolarizing",
    "enhancement_factor",
    "eta_bruteforce",
    "extend_family",
    "extend_with_ancilla",
    "family_from_low_noise",
    "fibonacci_sphere",
    "from_noise_operators",
    "gad",
    "hermitian_eig",
    "identity_channel",
    "instantiate",
    "leading_qfi_coefficient",
    "log_hamiltonian",
    "maximize_qfi_pure",
    "min_quadratic_on_sphere",
    "no_enhancement_check",
    "noise_geometry",
    "optimal_estimator",
    "optimal_input_states",
    "partial_trace",
    "pauli_decompose",
    "pure_to_density",
    "qfi",
    "quadratic_form",
    "random_low_noise",
    "rotation_unitary",
    "sld",
    "tensor_product",
    "unitary_channel_family",
    "unitary_qfi",
    "unitary_qfi_max",
    "validate_first_order",
    "validate_trace_preserving",
]
