"""Accessible information: induced channels, encodings, measurement optimisation."""
from .accessible import (SWEEP_QUANTITIES, AccessibleInfoResult, SweepResult, TripartiteAccessibleResult,
                         accessible_info_channel, accessible_info_fixed_encoding, basis_sweep, i3_acc,
                         j3_acc_fixed_encoding, j3_acc_optimized, worker_count)
from .capacity import CapacityResult, ClassicalChannel, blahut_arimoto, z_channel_capacity
from .channels import (ClassicalQuantumEnsemble, InducedChannel, apply_channel, dephase, joint_distribution,
                       square_root_factors, stinespring_tensor)
from .encoding import EncodingBasis, ProjectiveMeasurement, bloch_basis, givens_parameters, givens_unitary
from .optimize import OptimizerSettings
from .oracle import OracleCheck, check_result, random_channel_oracle, random_measurement_oracle

__all__ = [
    "SWEEP_QUANTITIES", "AccessibleInfoResult", "SweepResult", "TripartiteAccessibleResult",
    "accessible_info_channel", "accessible_info_fixed_encoding", "basis_sweep", "i3_acc",
    "j3_acc_fixed_encoding", "j3_acc_optimized", "worker_count",
    "CapacityResult", "ClassicalChannel", "blahut_arimoto", "z_channel_capacity",
    "ClassicalQuantumEnsemble", "InducedChannel", "apply_channel", "dephase", "joint_distribution",
    "square_root_factors", "stinespring_tensor",
    "EncodingBasis", "ProjectiveMeasurement", "bloch_basis", "givens_parameters", "givens_unitary",
    "OptimizerSettings",
    "OracleCheck", "check_result", "random_channel_oracle", "random_measurement_oracle",
]
