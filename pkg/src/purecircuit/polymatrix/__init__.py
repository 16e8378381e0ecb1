"""Polymatrix games and the circuit reductions into them."""

from .game import (
    EquilibriumVerdict,
    GameError,
    NormalizationData,
    PolymatrixGame,
    algo_third_wsne,
    check_profile,
    is_bipartite,
    is_normalized,
    max_degree,
    normalize_game,
    payoff_vector,
    verify_ne,
    verify_wsne,
)
from .oracles import CASE_KINDS, gadget_case_check, grid_search_equilibrium, iter_grid_equilibria
from .reductions import (
    NEGadgetParams,
    chain_gaps,
    choose_delta,
    decode_ne_profile,
    decode_winlose_profile,
    decode_wsne_profile,
    gap_step,
    ne_params,
    reduce_pc_to_ne,
    reduce_pc_to_winlose,
    reduce_pc_to_wsne,
    win_lose_values,
)
