import itertools

import pytest

from sspengine.exactdist import Option, Product, SetOf, z_mod
from sspengine.heap import (
    Conjunction,
    FunctionLink,
    HeapError,
    Ignore,
    Location,
    heap_ignore,
    heap_init,
    relation_holds,
)

Z3 = z_mod(3)
PAIRS = SetOf(Product(Z3, Z3))
SIG = Location("SigPrim.SIG", PAIRS, frozenset())
SK = Location("KeyGen.SK", Option(Z3), None)
PK = Location("KeyGen.PK", Option(Z3), None)


def test_heap_init_examples():
    assert heap_init([SIG])[SIG] == frozenset()
    assert heap_init([]).ids == frozenset()
    h = heap_init([SK, PK])
    assert h["KeyGen.SK"] is None and h[PK] is None


def test_heap_init_rejects_duplicates():
    with pytest.raises(HeapError, match="duplicate"):
        heap_init([SK, Location("KeyGen.SK", Z3, 0)])


def test_location_checks_initial_value():
    with pytest.raises(HeapError):
        Location("X.Y", Z3, 5)


def test_heap_updates_are_typed_and_persistent():
    h = heap_init([SK, PK])
    h2 = h.set(SK, 2)
    assert h[SK] is None and h2[SK] == 2
    assert h2.ids == h.ids
    with pytest.raises(HeapError):
        h.set(SK, 7)
    with pytest.raises(HeapError):
        h.set("Nope.X", 1)
    with pytest.raises(HeapError):
        h["Nope.X"]


def test_heap_ignore_examples():
    h = heap_init([SK, PK, SIG]).set(SK, 1)
    r = heap_ignore({"SigPrim.SIG"})
    assert r(h, h)
    assert r(h, h.set(SIG, frozenset({(0, 1)})))
    assert not r(h, h.set(SK, 2))


def test_heap_ignore_empty_set_is_equality():
    base = heap_init([SK, PK])
    heaps = [base.set(SK, a).set(PK, b) for a in (None, 0, 1) for b in (None, 0, 1)]
    r = heap_ignore([])
    for x, y in itertools.product(heaps, repeat=2):
        assert r(x, y) == (x == y)


def test_heap_ignore_only_compares_shared_locations():
    left = heap_init([SK])
    right = heap_init([SK, PK]).set(PK, 1)
    assert heap_ignore([])(left, right)


@pytest.mark.parametrize("ignored", [[], ["A"], ["B"], ["A", "B"]])
def test_heap_ignore_equivalence_laws(ignored):
    a, b = Location("A", Z3, 0), Location("B", Z3, 0)
    base = heap_init([a, b])
    heaps = [base.set(a, x).set(b, y) for x in range(3) for y in range(3)]
    r = heap_ignore(ignored)
    for x in heaps:
        assert r(x, x)
    for x, y in itertools.product(heaps, repeat=2):
        assert r(x, y) == r(y, x)
    for x, y, z in itertools.product(heaps, repeat=3):
        if r(x, y) and r(y, z):
            assert r(x, z)


def test_empty_conjunction_holds():
    h1, h2 = heap_init([SK]), heap_init([PK]).set(PK, 2)
    assert relation_holds(Conjunction([]), h1, h2)


ST = Location("Platform.ST", z_mod(2), 1)
Z = Location("AttPrim.Z", SetOf(Product(z_mod(2), Z3)), frozenset())
SIG4 = Location("SigPrim.SIG", SetOf(Product(z_mod(4), Z3)), frozenset())


def H(s, c):
    return s * 2 + c


def z_to_sig(z, s):
    return frozenset((H(s, c), a) for c, a in z)


def test_z_to_sig_link():
    link = FunctionLink([Z, ST], z_to_sig, SIG4)
    right = heap_init([Z, ST, SIG4]).set(Z, frozenset({(1, 2)}))
    left = heap_init([SIG4])
    # s = 1, c = 1 hashes to message 3
    assert relation_holds(link, left.set(SIG4, frozenset({(3, 2)})), right)
    assert not relation_holds(link, left, right)


def test_conjunction_with_ignore():
    r = Ignore([Z]) & FunctionLink([Z, ST], z_to_sig, SIG4)
    assert isinstance(r, Conjunction) and len(r.parts) == 2
    right = heap_init([Z, ST, SIG4]).set(Z, frozenset({(0, 1)})).set(SIG4, frozenset({(2, 1)}))
    left = heap_init([SIG4, ST]).set(SIG4, frozenset({(2, 1)}))
    assert r(left, right)
    assert not r(left.set(ST, 0), right)


def test_ignore_requires_declared_ids():
    with pytest.raises(HeapError):
        Ignore(["Ghost.X"])(heap_init([SK]), heap_init([SK]))


def test_link_errors_surface_as_heap_errors():
    link = FunctionLink([SK], lambda v: v + 1, PK)
    with pytest.raises(HeapError):
        link(heap_init([SK, PK]), heap_init([SK, PK]))
