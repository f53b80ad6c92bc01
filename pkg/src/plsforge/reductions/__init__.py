"""Instance compilers paired with solution maps."""

from .cf2nmc import (expected_vertex_count, intended_configuration, map_back_cf, n_min,
                     prepare_circuits, reduce_cf_to_nmc)
from .common import SolutionMap
from .leverage import build_leverage, leverage_biases, leverage_weights
from .mc2sp import embed_cut_to_sp, map_back_sp, reduce_mc_to_sp
from .nmc2multi import (complementary_on_middle, embed_cut_to_multi, map_back_multi,
                        reduce_nmc_to_multi)

__all__ = [
    "SolutionMap",
    "reduce_mc_to_sp", "embed_cut_to_sp", "map_back_sp",
    "reduce_nmc_to_multi", "embed_cut_to_multi", "map_back_multi", "complementary_on_middle",
    "reduce_cf_to_nmc", "map_back_cf", "n_min", "prepare_circuits", "intended_configuration",
    "expected_vertex_count",
    "build_leverage", "leverage_weights", "leverage_biases",
]
