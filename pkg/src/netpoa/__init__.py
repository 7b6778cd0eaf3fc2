"""Exact price of anarchy and optimal utility design over information networks."""

from .index_sets import CapacityError, IndexSet, IndexTuple, TupleStats, enumerate_I, enumerate_IR, tuple_stats
from .lp import LpProblem, LpSolution, Status, solve
from .mechanisms import (
    BasisFunction,
    Mechanism,
    basis_power,
    basis_set_covering,
    marginal_contribution,
    validate_mechanism,
)
from .network import (
    ClassPartition,
    InformationNetwork,
    blind_network,
    complete_network,
    isolated_network,
    partition_into_classes,
    validate_network,
    validate_partition,
)
from .poa import (
    OptimalDesign,
    PoaResult,
    cross_check_blind_vs_general,
    optimize_blind,
    optimize_isolated,
    optimize_mechanism,
    poa_blind,
    poa_dual,
    poa_isolated,
    poa_primal,
)

__version__ = "0.1.0"
