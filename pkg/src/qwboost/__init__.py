"""
Coined quantum-walk search with internal-state measurement.

Simulates Grover-coin, flip-flop-shift search on regular graphs, measures
both the position-only and the boosted (position then coin direction)
success probabilities, and derives the reduced arc-type operator for
symmetric instances.
"""

from ._backend import available as available_backends
from .errors import (ConsistencyError, DegenerateSolverError, DimensionError, InvalidFamilyError,
                     InvalidParameterError, QWBoostError)
from .graphs import (Family, MarkedSet, RegularGraph, antipodal_marks, build_complete,
                     build_complete_bipartite, build_family, build_hypercube, build_torus,
                     from_adjacency, read_adjacency)
from .quotient import (ReducedBasis, ReducedOperator, Reduction, TypePartition, compute_partition,
                       embed, initial_in_basis, project, reduced_basis, reduced_operator)
from .walk import (MeasurementReport, SimulationSeries, initial_state, measure_boosted_success,
                   oracle_perturbation_norm, position_distribution, simulate, step)

__version__ = "0.1.0"


def active_backend() -> str:
    from . import _backend

    return _backend.kernels.BACKEND
