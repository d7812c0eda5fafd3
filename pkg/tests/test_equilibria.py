import random
import warnings
from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given
from hypothesis import strategies as st

from tfne.crypto import ToyOWP, make_scheme, owp_brute_invert
from tfne.equilibria import (
    bimatrix_ne_enumerate,
    ce_hull_dominated,
    is_bimatrix_ne,
    is_epsilon_ne,
    is_epsilon_safe,
    is_spe,
    is_weakly_pareto_optimal,
    spe_backward_induction,
    worst_ne_for,
)
from tfne.errors import ProfileNotInConstraints
from tfne.game import (
    ConstraintSet,
    ExtensiveGame,
    NormalFormGame,
    StrategyProfile,
    expected_payoffs,
    leaf,
    node,
    pure_strategy,
)
from tfne.oracles import all_pure_profiles, tree_walk_payoff
from tfne.protocols import coinflip, owp
from tfne.protocols.base import strategic_representation, tractable_set
from tfne.random_games import random_bimatrix, random_constraint_set, random_game

F = Fraction


def test_coinflip_honest_is_constrained_ne():
    s = make_scheme("ideal", 2)
    g, m1, m2 = coinflip.build_coinflip_game(2, s)
    f1, f2 = coinflip.filters(s)
    t = ConstraintSet(tractable_set(f1, coinflip.p1_family(s), 2, 0), tractable_set(f2, coinflip.p2_family(s), 2, 0))
    p = StrategyProfile(f1(m1, 2, 0).strategy, f2(m2, 2, 0).strategy)
    assert is_epsilon_ne(g, t, p, 0)


def test_owp_game_uniform_pair_is_constrained_ne():
    f = ToyOWP.random(2, seed=1)
    g = owp.build_owp_game(2, f)
    proto = owp.OWPProtocol(f)
    rep = lambda m: strategic_representation(m, 2, g, view=proto.view)
    t1 = tuple(rep(m) for m in owp.p1_family(f))
    t2 = tuple(rep(m) for m in [owp.p2_uniform(f)] + [owp.p2_constant(f, z) for z in f.strings()])
    t = ConstraintSet(t1, t2)
    p = StrategyProfile(rep(owp.p1_uniform(f)), rep(owp.p2_uniform(f)))
    assert is_epsilon_ne(g, t, p, 0)
    # with the inverter allowed, player 2 has a profitable deviation
    t_inv = ConstraintSet(t1, t2 + (rep(owp.p2_invert(f)),))
    v = is_epsilon_ne(g, t_inv, p, 0)
    assert not v and v.witness[0] == 2 and v.witness[2] == F(3, 2)


def test_better_reply_in_constraints_is_witnessed():
    g = ExtensiveGame.from_tree(node(1, {"a": leaf(0, 0), "b": leaf(1, 0)}))
    a, b = pure_strategy(1, {(): "a"}), pure_strategy(1, {(): "b"})
    s2 = pure_strategy(2, {})
    t = ConstraintSet((a, b), (s2,))
    v = is_epsilon_ne(g, t, StrategyProfile(a, s2), 0)
    assert not v and v.witness == (1, b, 1)
    assert is_epsilon_ne(g, t, StrategyProfile(a, s2), 1)
    with pytest.raises(ProfileNotInConstraints):
        is_epsilon_ne(g, ConstraintSet((b,), (s2,)), StrategyProfile(a, s2), 0)


def test_one_shot_spe_is_argmax():
    g = ExtensiveGame.from_tree(node(2, {"a": leaf(0, 1), "b": leaf(0, 3), "c": leaf(0, 2)}))
    p = spe_backward_induction(g)
    assert p.s2.action(()) == "b"
    assert is_spe(g, p, 0)


def test_modified_owp_spe():
    f = ToyOWP.random(2, seed=1)
    g = owp.build_modified_owp_game(2, f)
    p = spe_backward_induction(g)
    assert p.s2.action(("00",)) == "00"
    for y in f.strings():
        if y != "00":
            assert p.s2.action((y,)) == owp_brute_invert(f, y)
    assert p.s1.action(()) == "00"
    assert expected_payoffs(g, p) == (2, 2)


def _brute_spe(g):
    """Pure full profiles meeting the subgame-perfection inequality at every history."""
    profiles = list(all_pure_profiles(g))
    own = {i: {p[i] for p in profiles} for i in (1, 2)}
    out = []
    for p in profiles:
        ok = True
        for h in g.nonterminals():
            i = g.player(h)
            base = tree_walk_payoff(g, p, i, h)
            if any(tree_walk_payoff(g, p.replace(i, s), i, h) > base for s in own[i]):
                ok = False
                break
        if ok:
            out.append(p)
    return out


@pytest.mark.parametrize("seed", range(15))
def test_spe_matches_exhaustive_enumeration(seed):
    rng = random.Random(seed)
    g = random_game(rng, depth=3, branching=2)
    found = _brute_spe(g)
    assert found == [spe_backward_induction(g)]


def test_matching_pennies():
    nf = NormalFormGame.from_matrices([[1, -1], [-1, 1]], [[-1, 1], [1, -1]])
    eqs = bimatrix_ne_enumerate(nf)
    assert len(eqs) == 1
    e = eqs[0]
    assert e.row == (F(1, 2), F(1, 2)) and e.col == (F(1, 2), F(1, 2)) and e.payoffs == (0, 0)


def test_battle_of_the_sexes():
    nf = NormalFormGame.from_matrices([[2, 0], [0, 1]], [[1, 0], [0, 2]])
    eqs = bimatrix_ne_enumerate(nf)
    assert [(e.row, e.col) for e in eqs] == [
        ((1, 0), (1, 0)),
        ((0, 1), (0, 1)),
        ((F(2, 3), F(1, 3)), (F(1, 3), F(2, 3))),
    ]
    assert all(is_bimatrix_ne(nf, e.row, e.col) for e in eqs)
    assert worst_ne_for(nf, 1, eqs) is eqs[2]
    assert eqs[2].payoffs == (F(2, 3), F(2, 3))


def test_dominant_strategy_game():
    nf = NormalFormGame.from_matrices([[3, 0], [5, 1]], [[3, 5], [0, 1]])
    eqs = bimatrix_ne_enumerate(nf)
    assert len(eqs) == 1 and eqs[0].row == (0, 1) and eqs[0].col == (0, 1)


def test_degenerate_game_is_flagged():
    nf = NormalFormGame.from_matrices([[1, 1], [1, 1]], [[1, 1], [1, 1]])
    with warnings.catch_warnings(record=True):
        warnings.simplefilter("always")
        eqs = bimatrix_ne_enumerate(nf)
    assert eqs.degenerate
    assert all(is_bimatrix_ne(nf, e.row, e.col) for e in eqs)


@given(st.integers(0, 10**6))
def test_enumerated_equilibria_are_mutual_best_responses(seed):
    rng = random.Random(seed)
    nf = random_bimatrix(rng, rng.randint(1, 3), rng.randint(1, 3))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        eqs = bimatrix_ne_enumerate(nf)
    for e in eqs:
        assert is_bimatrix_ne(nf, e.row, e.col)
        assert e.payoffs == nf.expected(e.row, e.col)
    if not eqs.degenerate:
        assert len(eqs) >= 1


def test_hull_dominance_examples():
    nf = NormalFormGame.from_matrices([[2, 0], [0, 1]], [[1, 0], [0, 2]])
    eqs = bimatrix_ne_enumerate(nf)
    assert not ce_hull_dominated(nf, eqs, (F(3, 2), F(3, 2)))
    dom = ce_hull_dominated(nf, eqs, (F(2, 3), F(2, 3)))
    assert dom and dom.weights[2] == 0
    assert not ce_hull_dominated(nf, eqs[:1], eqs[0].payoffs)


@given(st.integers(0, 10**6))
def test_hull_dominance_agrees_with_grid_search(seed):
    rng = random.Random(seed)
    nf = random_bimatrix(rng, rng.randint(2, 3), rng.randint(2, 3))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        eqs = bimatrix_ne_enumerate(nf)
    target = (F(rng.randint(-9, 9), 2), F(rng.randint(-9, 9), 2))
    res = ce_hull_dominated(nf, eqs, target)
    if res:
        u1 = sum(w * e.payoffs[0] for w, e in zip(res.weights, eqs))
        u2 = sum(w * e.payoffs[1] for w, e in zip(res.weights, eqs))
        assert u1 > target[0] and u2 > target[1]
    else:
        # no grid point with denominator 12 may dominate either
        n = len(eqs)
        for c in product(range(13), repeat=n):
            if sum(c) != 12:
                continue
            u1 = sum(F(x, 12) * e.payoffs[0] for x, e in zip(c, eqs))
            u2 = sum(F(x, 12) * e.payoffs[1] for x, e in zip(c, eqs))
            assert not (u1 > target[0] and u2 > target[1])


def _sets(seed):
    rng = random.Random(seed)
    g = random_game(rng, depth=rng.randint(1, 3), branching=3, generic=False)
    t = random_constraint_set(rng, g, rng.randint(1, 4), rng.randint(1, 4))
    return g, t


def test_pareto_examples():
    g = ExtensiveGame.from_tree(node(1, {"a": leaf(0, 0), "b": leaf(1, 1), "c": leaf(2, -1)}))
    s2 = pure_strategy(2, {})
    a, b, c = (pure_strategy(1, {(): x}) for x in "abc")
    t = ConstraintSet((a, b, c), (s2,))
    assert is_weakly_pareto_optimal(g, t, StrategyProfile(c, s2))
    v = is_weakly_pareto_optimal(g, t, StrategyProfile(a, s2))
    assert not v and v.witness[1] == (1, 1)


def test_safety_examples():
    const = ExtensiveGame.from_tree(node(1, {"a": leaf(1, 1), "b": leaf(1, 1)}))
    a, b = pure_strategy(1, {(): "a"}), pure_strategy(1, {(): "b"})
    s2 = pure_strategy(2, {})
    assert is_epsilon_safe(const, ConstraintSet((a, b), (s2,)), StrategyProfile(a, s2), 0)
    spite = ExtensiveGame.from_tree(node(1, {"a": leaf(1, 1), "b": leaf(1, 0)}))
    v = is_epsilon_safe(spite, ConstraintSet((a, b), (s2,)), StrategyProfile(a, s2), F(1, 2))
    assert not v and v.witness == (1, b, 1)


@given(st.integers(0, 10**6))
def test_zero_sum_profiles_are_pareto_optimal(seed):
    rng = random.Random(seed)
    g = random_game(rng, depth=3, branching=2, zero_sum=True)
    t = random_constraint_set(rng, g, 3, 3)
    for p in t.profiles():
        assert is_weakly_pareto_optimal(g, t, p)


@given(st.integers(0, 10**6))
def test_zero_sum_equilibria_are_safe(seed):
    rng = random.Random(seed)
    g = random_game(rng, depth=3, branching=2, zero_sum=True)
    t = random_constraint_set(rng, g, 3, 3)
    eps = F(rng.randint(0, 3), 4)
    for p in t.profiles():
        if is_epsilon_ne(g, t, p, eps):
            assert is_epsilon_safe(g, t, p, eps)


@given(st.integers(0, 10**6), st.integers(0, 8), st.integers(0, 8))
def test_ne_is_monotone_in_epsilon(seed, a, b):
    g, t = _sets(seed)
    lo, hi = sorted((F(a, 4), F(b, 4)))
    for p in t.profiles():
        if is_epsilon_ne(g, t, p, lo):
            assert is_epsilon_ne(g, t, p, hi)


@given(st.integers(0, 10**6))
def test_backward_induction_is_spe(seed):
    rng = random.Random(seed)
    g = random_game(rng, depth=rng.randint(1, 4), branching=3)
    p = spe_backward_induction(g)
    assert is_spe(g, p, 0)
    assert is_epsilon_ne(g, None, p, 0)
