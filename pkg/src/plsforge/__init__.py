"""Local-search games in exact arithmetic.

Node-Max-Cut and cut games, weighted congestion games on series-parallel
and multi-commodity networks, the BridgeGaps approximate-equilibrium
algorithm, compilers between these problems (including the NOR-circuit
gadget construction), a brute-force oracle that checks all of it, and the
file formats and command line that tie it together.
"""

from .bridgegaps import BridgeGaps, BridgeGapsResult, run_bridgegaps
from .circuit import Circuit, eval_circuit, is_flip_local_opt
from .congestion import BestResponseDynamics, CongestionGame, br_dynamics
from .errors import (InvalidArgument, InvalidInstance, NotCanonical, ParseError, PlsForgeError,
                     StepCapExceeded, TooLarge)
from .games_core import (EdgeWeightedGraph, VertexWeightedGraph, flip_dynamics,
                         is_approx_equilibrium_nmc, is_local_optimum)
from .oracle import brute_local_optima, brute_pne, check_gadget_lemma, verify_reduction

__version__ = "0.1.0"

__all__ = [
    "BridgeGaps", "BridgeGapsResult", "run_bridgegaps",
    "Circuit", "eval_circuit", "is_flip_local_opt",
    "BestResponseDynamics", "CongestionGame", "br_dynamics",
    "InvalidArgument", "InvalidInstance", "NotCanonical", "ParseError", "PlsForgeError",
    "StepCapExceeded", "TooLarge",
    "EdgeWeightedGraph", "VertexWeightedGraph", "flip_dynamics",
    "is_approx_equilibrium_nmc", "is_local_optimum",
    "brute_local_optima", "brute_pne", "check_gadget_lemma", "verify_reduction",
]
