"""Tripartite-information diagnostics of information scrambling in small quantum systems."""
from .errors import (ConfigurationError, DimensionError, DomainError, LabelCollisionError, LayoutError,
                     MeasurementError, PartitionError, RegistryError, ScrambleError, ValidationError)
from .measures import (JointDistribution, classical_mi, classical_tripartite_info, qmi, shannon_entropy,
                       tripartite_info, tripartite_info_symmetric, von_neumann_entropy)
from .states import (double_arm_i3, double_arm_state, example_registry, get_example, perfect_tensor_unitary,
                     single_arm_i3, single_arm_state)
from .tensor import (DensityMatrix, Isometry, Ket, SubsystemLayout, apply_isometry, maximally_entangled_state,
                     partial_trace, projector, tensor_product)

__version__ = "0.1.0"

__all__ = [
    "ConfigurationError",
    "DimensionError",
    "DomainError",
    "LabelCollisionError",
    "LayoutError",
    "MeasurementError",
    "PartitionError",
    "RegistryError",
    "ScrambleError",
    "ValidationError",
    "JointDistribution",
    "classical_mi",
    "classical_tripartite_info",
    "qmi",
    "shannon_entropy",
    "tripartite_info",
    "tripartite_info_symmetric",
    "von_neumann_entropy",
    "double_arm_i3",
    "double_arm_state",
    "example_registry",
    "get_example",
    "perfect_tensor_unitary",
    "single_arm_i3",
    "single_arm_state",
    "DensityMatrix",
    "Isometry",
    "Ket",
    "SubsystemLayout",
    "apply_isometry",
    "maximally_entangled_state",
    "partial_trace",
    "projector",
    "tensor_product",
]
