"""Lower-bound graph constructions for MaxIS in CONGEST, with exact oracles and a
blackboard simulation harness."""

from .codegadget import CodeParams, Codeword, encode, make_params, min_pairwise_distance
from .construct import (
    LowerBoundGraph,
    NodeId,
    build_linear_instance,
    build_quadratic_instance,
    expand_unweighted,
)
from .instances import DisjointnessInstance, make_intersecting, make_pairwise_disjoint, verify_promise
from .oracle import mwis_exact
from .simulate import multiparty_simulate, reduction_protocol, run_congest

__version__ = "0.1.0"

__all__ = [
    "CodeParams",
    "Codeword",
    "encode",
    "make_params",
    "min_pairwise_distance",
    "LowerBoundGraph",
    "NodeId",
    "build_linear_instance",
    "build_quadratic_instance",
    "expand_unweighted",
    "DisjointnessInstance",
    "make_intersecting",
    "make_pairwise_disjoint",
    "verify_promise",
    "mwis_exact",
    "multiparty_simulate",
    "reduction_protocol",
    "run_congest",
]
