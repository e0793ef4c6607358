"""Pure-exploration bandits: Top-Two sampling with a slack, GLR stopping, allocation oracles."""

from .instances import (BanditInstance, Family, GapStructure, InstanceSpec, InvalidParameterError,
                        eps_good_set, gap_index, gap_structure, generate_instance)
from .oracle import (Allocation, HardnessConstants, hardness_constants, modified_instance, phi_value,
                     psi_value, solve_bai, solve_bai_beta, solve_eps, solve_eps_multiplicative)
from .stopping import StopDecision, glr_check, glr_check_multiplicative
from .thresholds import Threshold, c_gaussian, heuristic, lambert_wbar, proven, threshold_value

__version__ = "0.1.0"

__all__ = [
    "Allocation", "BanditInstance", "Family", "GapStructure", "HardnessConstants", "InstanceSpec",
    "InvalidParameterError", "StopDecision", "Threshold", "c_gaussian", "eps_good_set", "gap_index",
    "gap_structure", "generate_instance", "glr_check", "glr_check_multiplicative",
    "hardness_constants", "heuristic", "lambert_wbar", "modified_instance", "phi_value", "proven",
    "psi_value", "solve_bai", "solve_bai_beta", "solve_eps", "solve_eps_multiplicative",
    "threshold_value",
]
