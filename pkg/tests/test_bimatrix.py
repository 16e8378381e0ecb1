import random
from fractions import Fraction as F

import pytest

from purecircuit.bimatrix import (
    BETA,
    EPS_TARGET,
    LAMBDA,
    BimatrixGame,
    BimatrixReductionParams,
    decode_bimatrix,
    grid_search_relative_wsne,
    mass_interval,
    node_masses,
    params_chain_ok,
    reduce_polymatrix_to_bimatrix,
    simplex_grid,
    verify_relative_wsne,
)
from purecircuit.core import PureCircuitError, is_solution
from purecircuit.generators import random_pc_instance, random_polymatrix_game
from purecircuit.polymatrix import decode_wsne_profile, reduce_pc_to_wsne

I2 = ((F(1), F(0)), (F(0), F(1)))


def test_identity_game():
    g = BimatrixGame(I2, I2)
    pure = ((F(1), F(0)), (F(1), F(0)))
    assert verify_relative_wsne(g, pure, 0).ok
    v = verify_relative_wsne(g, ((F(1, 2), F(1, 2)), (F(1), F(0))), F(1, 2))
    assert not v.row_ok and v.col_ok


def test_relative_tolerance_is_multiplicative():
    g = BimatrixGame(((F(10),), (F(9),)), ((F(1),), (F(1),)))
    s = ((F(1, 2), F(1, 2)), (F(1),))
    assert verify_relative_wsne(g, s, F(1, 10)).ok
    assert not verify_relative_wsne(g, s, F(1, 11)).ok


def test_game_rejects_negative_and_ragged():
    with pytest.raises(PureCircuitError):
        BimatrixGame(((F(-1),),), ((F(0),),))
    with pytest.raises(PureCircuitError):
        BimatrixGame(I2, ((F(0),),))


def test_simplex_grid_counts():
    assert list(simplex_grid(2, 2)) == [(2, 0), (1, 1), (0, 2)]
    assert len(list(simplex_grid(4, 20))) == 1771


def test_constants():
    assert BETA * EPS_TARGET < F(1, 3)
    assert params_chain_ok(BimatrixReductionParams())
    assert LAMBDA < (1 - EPS_TARGET) / 2
    with pytest.raises(PureCircuitError):
        BimatrixReductionParams(lam=F(1, 2))


def test_shapes_on_reduced_games():
    rng = random.Random(5)
    for _ in range(20):
        game, _ = reduce_pc_to_wsne(random_pc_instance(rng, rng.randint(3, 8)), prepare=True)
        bm, bmap = reduce_polymatrix_to_bimatrix(game)
        size = 2 * bmap.n
        assert bm.shape == (size, size)
        assert len(bmap.rows) == len(bmap.cols) == bmap.n
        for m in (bm.R, bm.C):
            assert all(0 <= z <= 1 + LAMBDA for r in m for z in r)
        # the matching bonus sits on the diagonal blocks of R
        assert all(bm.R[2 * k][2 * k] >= 1 for k in range(bmap.n))


def test_embedding_needs_bipartite_two_action():
    tri = random_polymatrix_game(random.Random(0), 3, 1.0)
    with pytest.raises(PureCircuitError):
        reduce_polymatrix_to_bimatrix(tri)


def test_n2_grid_equilibrium(ex1):
    game, _ = reduce_pc_to_wsne(ex1)
    bm, bmap = reduce_polymatrix_to_bimatrix(game)
    assert bmap.n == 2 and len(bmap.dummies) == 1
    eps = F(1, 10)
    s = grid_search_relative_wsne(bm, eps, F(1, 20))
    assert s is not None and verify_relative_wsne(bm, s, eps).ok
    lo, hi = mass_interval(2, eps, LAMBDA)
    assert (lo, hi) == (F(3117, 10000), F(2500, 3117))
    for side in node_masses(bmap, s):
        assert all(lo <= m <= hi for m in side)
    marg = decode_bimatrix(bmap, s)
    assert set(marg) == set(game.players)
    assert all(sum(p) == 1 for p in marg.values())


def test_marginals_decode_to_circuit_solution(ex1):
    game, rmap = reduce_pc_to_wsne(ex1)
    bm, bmap = reduce_polymatrix_to_bimatrix(game)
    s = grid_search_relative_wsne(bm, F(1, 10), F(1, 20))
    assert is_solution(ex1, decode_wsne_profile(rmap, decode_bimatrix(bmap, s)))


def test_target_eps_finds_nothing_on_coarse_grid(ex1):
    game, _ = reduce_pc_to_wsne(ex1)
    bm, _ = reduce_polymatrix_to_bimatrix(game)
    assert grid_search_relative_wsne(bm, EPS_TARGET, F(1, 10)) is None


def test_zero_mass_node_is_rejected(ex1):
    game, _ = reduce_pc_to_wsne(ex1)
    _, bmap = reduce_polymatrix_to_bimatrix(game)
    x = (F(1), F(0), F(0), F(0))
    with pytest.raises(PureCircuitError):
        decode_bimatrix(bmap, (x, x))
