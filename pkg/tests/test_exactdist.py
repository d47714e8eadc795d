from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sspengine.exactdist import (
    BOOL,
    Dist,
    FinType,
    FiniteTypeError,
    Option,
    Product,
    SetOf,
    canon_key,
    dist_bind,
    dist_equal,
    mk_uniform,
    z_mod,
)


def test_uniform_over_six_points():
    d = mk_uniform(range(6))
    assert d.items() == tuple((v, F(1, 6)) for v in range(6))


def test_uniform_singleton_is_point_mass():
    assert mk_uniform([7]) == Dist.point(7)


def test_uniform_over_small_primes():
    primes = [x for x in range(6) if x > 1 and all(x % d for d in range(2, x))]
    assert primes == [2, 3, 5]
    assert mk_uniform(primes).items() == ((2, F(1, 3)), (3, F(1, 3)), (5, F(1, 3)))


def test_uniform_merges_duplicates():
    d = mk_uniform([1, 1, 2, 1])
    assert d[1] == F(3, 4) and d[2] == F(1, 4)


def test_uniform_rejects_empty():
    with pytest.raises(ValueError, match="empty sample space"):
        mk_uniform([])


def test_bind_identities():
    k = lambda v: mk_uniform([v, v + 1])
    assert dist_bind(Dist.point("a"), lambda _: k(0)) == k(0)
    d = mk_uniform([0, 1, 2])
    assert dist_bind(d, Dist.point) == d


def test_bind_expands_all_branches():
    # hand expansion: 0 -> {0, 2}, 1 -> {1, 3}, each branch 1/2 * 1/2
    d = dist_bind(mk_uniform([0, 1]), lambda b: mk_uniform([b, b + 2]))
    assert d.items() == tuple((v, F(1, 4)) for v in range(4))


def test_dist_equal():
    assert dist_equal(mk_uniform([0, 1]), mk_uniform([1, 0]))
    assert not dist_equal(mk_uniform([0, 1]), Dist({0: F(1, 3), 1: F(2, 3)}))


def test_bind_vs_direct_construction():
    # two dice summed, by bind and by counting the 36 outcomes directly
    die = mk_uniform(range(1, 7))
    via_bind = dist_bind(die, lambda a: dist_bind(die, lambda b: Dist.point(a + b)))
    direct = mk_uniform([a + b for a in range(1, 7) for b in range(1, 7)])
    assert dist_equal(via_bind, direct)
    assert via_bind[7] == F(6, 36)


def test_dist_validation():
    with pytest.raises(ValueError):
        Dist({0: F(1, 2)})
    with pytest.raises(ValueError):
        Dist({0: F(3, 2), 1: F(-1, 2)})
    assert Dist({0: 1, 1: 0}).support() == (0,)


def test_rationals_are_canonical():
    w = mk_uniform(range(4))[0]
    assert (w.numerator, w.denominator) == (1, 4)


def test_condition_and_map():
    d = mk_uniform(range(6))
    assert d.condition(lambda v: v % 2 == 0) == mk_uniform([0, 2, 4])
    assert d.map(lambda v: v % 2) == mk_uniform([0, 1])
    assert d.prob(lambda v: v < 2) == F(1, 3)


def test_canon_key_orders_mixed_values():
    vals = [(1, 2), None, frozenset({3}), "x", 2, True]
    assert sorted(vals, key=canon_key)[0] is None
    with pytest.raises(TypeError):
        canon_key(1.5)


def test_fin_types():
    z = z_mod(3)
    assert z.values() == (0, 1, 2) and z.size == 3 and z.index(2) == 2
    assert not z.contains(True) and not z.contains(3)
    assert Product(z, BOOL).size == 6
    assert Option(z).contains(None) and Option(z).size == 4
    assert SetOf(z).size == 8 and len(SetOf(z).values()) == 8
    assert SetOf(z).contains(frozenset({0, 2})) and not SetOf(z).contains({0})
    with pytest.raises(FiniteTypeError):
        FinType("empty", [])
    with pytest.raises(FiniteTypeError):
        FinType("dup", [1, 1])
    with pytest.raises(FiniteTypeError):
        z.index(5)


def test_lazy_fin_type():
    calls = []

    def factory():
        calls.append(1)
        return [10, 20]

    t = FinType("lazy", factory, member=lambda v: v in (10, 20))
    assert t.contains(10) and not calls
    assert t.size == 2 and calls == [1]


# property tests ------------------------------------------------------------

small_dists = st.lists(st.integers(0, 5), min_size=1, max_size=6).map(mk_uniform)
kernels = st.lists(small_dists, min_size=6, max_size=6).map(lambda ds: (lambda v: ds[v]))


@settings(max_examples=150, deadline=None)
@given(small_dists, kernels)
def test_bind_normalized(d, k):
    out = dist_bind(d, k)
    assert out.total() == 1
    assert all(w > 0 for _, w in out.items())


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 5), kernels)
def test_left_identity(v, k):
    assert dist_bind(Dist.point(v), k) == k(v)


@settings(max_examples=150, deadline=None)
@given(small_dists)
def test_right_identity(d):
    assert dist_bind(d, Dist.point) == d


@settings(max_examples=150, deadline=None)
@given(small_dists, kernels, kernels)
def test_associativity(d, f, g):
    assert dist_bind(dist_bind(d, f), g) == dist_bind(d, lambda x: dist_bind(f(x), g))


@settings(max_examples=100, deadline=None)
@given(small_dists)
def test_normalization_idempotent(d):
    once = d.normalized()
    assert once.normalized() == once == d
    assert once.items() == d.items()
