"""Minimal state-space realisations of dynamical structure functions.

Submodules
----------
polymat   scalar polynomials and rational functions
tfmat     rational matrices: poles, residues, zeros, McMillan degree
sslib     partitioned state space, PBH tests, realisation
dsf       ``[Q, P]`` extraction and reconstruction
minreal   minimal-order ``[Q, P]`` realisation
bip       exact selection solvers
cli       command-line front end
"""

from .config import Tolerances, get_tolerances, set_tolerances, tolerances
from .errors import (AssumptionViolation, ContractError, DimensionError, DomainError, DsfError,
                     PoleHitError, ProbingError, RankDeficiencyError, SelectionError)
from .polymat import Polynomial, RationalFunction
from .tfmat import (PoleMode, TransferMatrix, ZeroMode, mcmillan_degree, normal_rank,
                    poles_with_residues, transmission_zeros)
from .sslib import StateSpace, hidden_controllable, hidden_observable, pbh_controllable, pbh_observable
from .dsf import (DiagonalRational, Dsf, WvPair, dsf_from_ss, final_value_checks, realize_wv,
                  tf_from_dsf, wv_from_r)
from .minreal import (CancellationPlan, build_n_star, cancellation_table, capacity_vector,
                      minimal_dsf_realization, special_case_constant_r)

__version__ = "0.1.0"

__all__ = [
    "Tolerances", "get_tolerances", "set_tolerances", "tolerances",
    "AssumptionViolation", "ContractError", "DimensionError", "DomainError", "DsfError",
    "PoleHitError", "ProbingError", "RankDeficiencyError", "SelectionError",
    "Polynomial", "RationalFunction",
    "PoleMode", "TransferMatrix", "ZeroMode", "mcmillan_degree", "normal_rank",
    "poles_with_residues", "transmission_zeros",
    "StateSpace", "hidden_controllable", "hidden_observable", "pbh_controllable", "pbh_observable",
    "DiagonalRational", "Dsf", "WvPair", "dsf_from_ss", "final_value_checks", "realize_wv",
    "tf_from_dsf", "wv_from_r",
    "CancellationPlan", "build_n_star", "cancellation_table", "capacity_vector",
    "minimal_dsf_realization", "special_case_constant_r",
]
