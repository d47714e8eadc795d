from fractions import Fraction as F

import pytest

from sspengine import procs
from sspengine.casestudies import (
    ATTPROT_RENAME,
    IDEAL,
    REAL,
    build_attprot,
    build_sigprim_stack,
    build_sigprot,
    forger_strategy,
    seuf_forger,
    seuf_replayer,
    signature_config,
    toy_config,
)
from sspengine.checks import bernoulli, biased_coin_game, flip_games, flip_outcomes
from sspengine.command import FAIL, Ok, procedure, sample
from sspengine.exactdist import BOOL, UNIT
from sspengine.game import (
    Game,
    GameError,
    Guess,
    Query,
    advantage,
    ask,
    check_strategy,
    count_strategies,
    enumerate_strategies,
    reduction_advantages,
    reduction_equality_check,
    run_game,
    seuf_experiment,
    triangle_check,
)
from sspengine.package import Package, ProcSig, identity_package
from sspengine.schemes import mk_toy_symmetric

SIG_CFG = signature_config(mk_toy_symmetric(3))
RA_CFG = toy_config(2, 2)
COIN = ProcSig(1, "coin", UNIT, BOOL)


def coin_game(p=F(1, 2), name="Coin"):
    @procedure
    def coin(_):
        b = yield sample(bernoulli(p))
        return b

    return Game(Package(name, [], [(COIN, coin)]), name)


def guess_coin():
    return Query(1, (), {Ok(True): Guess(True), Ok(False): Guess(False)})


def test_immediate_guess():
    assert run_game(Guess(True), coin_game()) == 1
    assert run_game(Guess(False), coin_game()) == 0


def test_guessing_a_fair_coin():
    assert run_game(guess_coin(), coin_game()) == F(1, 2)


def test_forger_against_ideal_stack():
    assert run_game(forger_strategy(SIG_CFG), build_sigprim_stack(SIG_CFG, IDEAL)) == 0
    assert run_game(forger_strategy(SIG_CFG), build_sigprim_stack(SIG_CFG, REAL)) == 1


def test_advantage_report():
    r = advantage(guess_coin(), coin_game(F(1, 3)), coin_game(F(2, 3)))
    assert (r.pr_true_left, r.pr_true_right, r.advantage) == (F(1, 3), F(2, 3), F(1, 3))
    assert r.transcripts == 4


def test_advantage_identity_and_forger():
    g = build_sigprot(SIG_CFG, REAL)
    a = Query(procs.PROT, 1, lambda o: Guess(o is not FAIL and o.value[0] == 0))
    assert advantage(a, g, g).advantage == 0
    adv = advantage(forger_strategy(SIG_CFG), build_sigprim_stack(SIG_CFG, REAL), build_sigprim_stack(SIG_CFG, IDEAL))
    assert adv.advantage == 1


def test_sigprot_depth_two_strategies_have_zero_advantage():
    real, ideal = build_sigprot(SIG_CFG, REAL), build_sigprot(SIG_CFG, IDEAL)
    queries = [(procs.PROT, m) for m in range(3)]
    outs = lambda p, m: sorted({o for _, o in real.step(p, m, real.initial_heap()).support()}, key=repr)
    n = 0
    for a in enumerate_strategies(queries, outs, 2):
        n += 1
        assert advantage(a, real, ideal).advantage == 0
        if n > 3000:
            break


def test_interface_mismatch():
    with pytest.raises(GameError):
        advantage(Guess(True), coin_game(), build_sigprot(SIG_CFG, REAL))


def test_query_errors():
    with pytest.raises(GameError):
        run_game(Query(42, (), {}), coin_game())
    with pytest.raises(GameError):
        run_game(Query(1, 5, {}), coin_game())
    with pytest.raises(GameError, match="boolean"):
        run_game(Query(1, (), lambda o: Guess("maybe")), coin_game())
    with pytest.raises(GameError, match="no branch"):
        run_game(Query(1, (), {Ok(True): Guess(True)}), coin_game())


def test_games_have_no_imports():
    with pytest.raises(GameError):
        Game(identity_package([COIN]))


def test_check_strategy():
    # the branch table must also cover an aborted call
    assert check_strategy(Query(1, (), {Ok(True): Guess(True)}, default=Guess(False)), [COIN], 1) == []
    problems = check_strategy(Query(1, (), {Ok(True): Guess(True)}), [COIN], 1)
    assert any("no branch" in p for p in problems)
    assert check_strategy(Query(1, (), lambda o: guess_coin()), [COIN], 1)


def test_ask_helper():
    s = ask(1, (), lambda o: Guess(o == Ok(True)), name="asker")
    assert run_game(s, coin_game(F(1, 4))) == F(1, 4)


def test_strategy_counts():
    queries = [(1, a) for a in range(3)]
    assert count_strategies(queries, flip_outcomes, 1) == 26
    assert count_strategies(queries, flip_outcomes, 2) == 52730
    assert len(list(enumerate_strategies(queries, flip_outcomes, 1))) == 26


def test_triangle_examples():
    g = coin_game()
    assert triangle_check(guess_coin(), g, g, g)
    real, ideal = build_sigprot(SIG_CFG, REAL), build_sigprot(SIG_CFG, IDEAL)
    a = Query(procs.PROT, 0, lambda o: Guess(True))
    assert triangle_check(a, real, ideal, real)
    # coin biases 1/4, 1/2, 1/3: legs 1/4 + 1/6 versus direct 1/12
    g1, g2, g3 = coin_game(F(1, 4)), coin_game(F(1, 2)), coin_game(F(1, 3))
    a = guess_coin()
    direct = advantage(a, g1, g3).advantage
    legs = advantage(a, g1, g2).advantage + advantage(a, g2, g3).advantage
    assert (direct, legs) == (F(1, 12), F(5, 12))
    assert triangle_check(a, g1, g2, g3)


def test_advantage_laws_on_flip_games_depth_one():
    g1, g2, g3 = flip_games()
    for a in enumerate_strategies([(1, x) for x in range(3)], flip_outcomes, 1):
        assert advantage(a, g1, g1).advantage == 0
        assert advantage(a, g1, g2).advantage == advantage(a, g2, g1).advantage
        assert triangle_check(a, g1, g2, g3)


def test_reduction_with_identity_wrapper():
    g1, g2 = coin_game(F(1, 3), "C1"), coin_game(F(1, 2), "C2")
    p = identity_package([COIN])
    assert reduction_equality_check(guess_coin(), p, g1, g2)
    assert reduction_advantages(guess_coin(), p, g1, g2) == (F(1, 6), F(1, 6))


def test_reduction_through_attprot():
    a = Query(procs.PROT, 1, lambda o: Guess(o.value[2]))
    p = build_attprot(RA_CFG)
    sig_pair = (build_sigprot(RA_CFG, REAL), build_sigprot(RA_CFG, IDEAL))
    assert reduction_advantages(a, p, *sig_pair, ATTPROT_RENAME) == (0, 0)
    coins = (biased_coin_game(RA_CFG, F(1, 3)), biased_coin_game(RA_CFG, F(2, 3)))
    assert reduction_advantages(a, p, *coins, ATTPROT_RENAME) == (F(1, 3), F(1, 3))
    assert reduction_equality_check(a, p, *coins, ATTPROT_RENAME)


def test_seuf_examples():
    s = SIG_CFG.scheme
    assert seuf_experiment(s, seuf_replayer(), 1) == 0
    assert seuf_experiment(s, seuf_forger(SIG_CFG), 1) == 1
    assert seuf_experiment(s, seuf_forger(SIG_CFG), 1, ideal=True) == 0
    assert seuf_experiment(s, seuf_replayer(), 1, ideal=True) == 0


def test_seuf_query_bound():
    with pytest.raises(GameError, match="query bound"):
        seuf_experiment(SIG_CFG.scheme, seuf_forger(SIG_CFG), 0)


def test_seuf_leaf_shape():
    with pytest.raises(GameError):
        seuf_experiment(SIG_CFG.scheme, Guess(True), 1)
