"""Query-complexity laboratory for subset-cover problems over random functions."""
from .errors import InstanceInfeasible, NotFound, ResourceError, StateError
from .hashfamily import FunctionFamily, derive_seed
from .witness import (RepetitionWitness, RestrictedSCWitness, SubsetCoverWitness,
                      verify_rsc, verify_sc, verify_repetition)
from .grover import QueryLedger, SearchInstance
from .algorithms import OneKParams, RKParams, solve_1k, solve_rk

__all__ = [
    "FunctionFamily", "derive_seed",
    "SubsetCoverWitness", "RestrictedSCWitness", "RepetitionWitness",
    "verify_sc", "verify_rsc", "verify_repetition",
    "QueryLedger", "SearchInstance", "OneKParams", "RKParams", "solve_1k", "solve_rk",
    "InstanceInfeasible", "NotFound", "ResourceError", "StateError",
]
