"""Heat-bath algorithmic cooling on diagonal qubit states."""

__version__ = "0.1.0"
__all__ = [
    "BathSpec",
    "DiagonalState",
    "Error",
    "NoeConfig",
    "PpaConfig",
    "RunReport",
    "SolomonParams",
    "add_compare_cmd",
    "add_noe_cmd",
    "add_ppa_cmd",
    "add_solomon_cmd",
    "add_version_arg",
    "apply_permutation",
    "enhancement_report",
    "integrate",
    "maximally_mixed",
    "noe_round",
    "parse_config",
    "polarizations",
    "ppa_round",
    "print_error",
    "qubit_polarization",
    "refresh_reset",
    "run_noe",
    "run_ppa",
    "run_scenario",
    "saturate",
    "solomon_rhs",
    "sort_step",
    "state_reset",
    "steady_state_saturated",
    "tensor",
    "thermal_qubit",
    "thermal_state",
    "trace_out",
]

from .channels import (
    apply_permutation,
    refresh_reset,
    saturate,
    sort_step,
    state_reset,
)
from .cli import (
    add_compare_cmd,
    add_noe_cmd,
    add_ppa_cmd,
    add_solomon_cmd,
    add_version_arg,
)
from .error import Error
from .noe import NoeConfig, enhancement_report, noe_round, run_noe
from .output import print_error
from .ppa import PpaConfig, RunReport, ppa_round, run_ppa
from .scenario import parse_config, run_scenario
from .solomon import SolomonParams, integrate, solomon_rhs, steady_state_saturated
from .state import (
    BathSpec,
    DiagonalState,
    maximally_mixed,
    polarizations,
    qubit_polarization,
    tensor,
    thermal_qubit,
    thermal_state,
    trace_out,
)
