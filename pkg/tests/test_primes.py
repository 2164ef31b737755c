import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from sympy import isprime, nextprime

import oracles as O
from sl2param.errors import BadModulus, EvenPlace, NotPrimitive, NotResidue, SearchExhausted, TooLarge
from sl2param.primes import (
    PrimeConstraints,
    ResidueField,
    canonical_associate,
    epsilon,
    factor_elem,
    hasse_search,
    hilbert_odd,
    is_prime_elem,
    is_prime_int,
    mth_power_residue,
    mth_root_mod,
    prime_hits,
    primes_above,
    unit_count,
)
from sl2param.ring import CLASS_NUMBER_ONE, ideal_norm, iter_by_norm, ring

D = st.sampled_from(CLASS_NUMBER_ONE)


@st.composite
def nonunits(draw, d=None, lim=30):
    d = d if d is not None else draw(D)
    R = ring(d)
    xy = st.tuples(st.integers(-lim, lim), st.integers(-lim, lim))
    return R(*draw(xy.filter(lambda t: R(*t).norm() > 1)))


def oracle_is_field(F, q):
    Rs = O.Residues(F, q)
    return int(Rs.unit_mask().sum()) == Rs.size - 1


# -- rational primes -------------------------------------------------------


def test_is_prime_int_small_range():
    assert [n for n in range(3000) if is_prime_int(n)] == [n for n in range(3000) if isprime(n)]
    # signs are ignored, so norms and rational integers share one test
    assert all(is_prime_int(-n) == is_prime_int(n) for n in range(50))


def test_is_prime_int_large():
    rng = random.Random(7)
    for bits in (63, 64, 65, 128, 512):
        for _ in range(20):
            n = rng.getrandbits(bits) | 1
            assert is_prime_int(n) == isprime(n)
        p = nextprime(1 << bits)
        assert is_prime_int(p) and not is_prime_int(p * nextprime(p))
    # strong pseudoprime to several small bases
    assert not is_prime_int(3215031751)
    assert not is_prime_int(nextprime(1 << 70) * nextprime(1 << 71), rounds=4)


# -- prime elements ----------------------------------------------------------


def test_is_prime_elem_examples():
    R = ring(-1)
    assert tuple(is_prime_elem(R(1, 1))) == ("ramified", 2)
    assert tuple(is_prime_elem(R(3))) == ("inert-deg2", 3)
    assert not is_prime_elem(R(5)).is_prime
    assert tuple(is_prime_elem(R(2, 1))) == ("split-deg1", 5)
    assert not is_prime_elem(R(1)).is_prime and not is_prime_elem(R(0)).is_prime
    R7 = ring(-7)
    assert tuple(is_prime_elem(R7.omega)) == ("split-deg1", 2)
    assert tuple(is_prime_elem(ring(-3)(2))) == ("inert-deg2", 2)


@pytest.mark.parametrize("d", CLASS_NUMBER_ONE)
def test_is_prime_elem_matches_field_oracle(d):
    F, R = O.Field(d), ring(d)
    for q in O.ideals_up_to(F, 400):
        kind = is_prime_elem(R(*q))
        assert kind.is_prime == oracle_is_field(F, q), q
        if kind.is_prime:
            assert kind.char ** kind.degree == F.norm(q)
            disc = d if d % 4 == 1 else 4 * d
            assert (kind.tag == "ramified") == (disc % kind.char == 0)


def test_factor_examples():
    R = ring(-1)
    f = factor_elem(R(2))
    assert f.unit == R(0, -1) and f.factors == ((R(1, 1), 2),)
    R7 = ring(-7)
    f = factor_elem(R7(2))
    assert {p for p, _ in f.factors} == {R7.omega, R7(1, -1)}
    assert all(e == 1 for _, e in f.factors)
    with pytest.raises(ValueError):
        factor_elem(R(0))


@given(nonunits(lim=200))
def test_factor_properties(q):
    f = factor_elem(q)
    assert f.value() == q
    assert f.unit.is_unit()
    ps = [p for p, _ in f.factors]
    assert len(set(ps)) == len(ps)
    for p in ps:
        assert is_prime_elem(p).is_prime
        assert canonical_associate(p) == p
    for i, p in enumerate(ps):
        for p2 in ps[i + 1:]:
            assert not p.divides(p2)


@pytest.mark.parametrize("d", CLASS_NUMBER_ONE)
def test_primes_above(d):
    R = ring(d)
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31):
        ps = primes_above(R, p)
        total = 1
        for pi in ps:
            total *= pi.norm()
        # p splits, ramifies or stays inert; the norms account for p^2 accordingly
        assert total in (p, p * p)
        if len(ps) == 2:
            assert ps[0].norm() == ps[1].norm() == p
        elif ps[0].norm() == p:
            assert R.disc % p == 0
        else:
            assert ps == [R(p)]


# -- unit groups -------------------------------------------------------------


def test_epsilon_examples():
    R = ring(-1)
    assert epsilon(R(1, 2)) == 4
    assert epsilon(R(3)) == 8
    assert epsilon(R(2)) == 2
    with pytest.raises(ValueError):
        epsilon(R(0, 1))
    with pytest.raises(TooLarge):
        epsilon(R(3) ** 4, local_max=1000)


@pytest.mark.parametrize("d", [-1, -2, -3, -7, -11])
def test_unit_group_vs_oracle(d):
    F, R = O.Field(d), ring(d)
    for q in O.ideals_up_to(F, 250):
        Rs = O.Residues(F, q)
        mask = Rs.unit_mask()
        e = R(*q)
        assert unit_count(e) == int(mask.sum())
        assert epsilon(e) == Rs.exponent(mask)


# -- prime searches ----------------------------------------------------------


def test_hasse_examples():
    R = ring(-1)
    hit = hasse_search(R(1), R(2))
    assert (hit.n, hit.q, hit.trials) == (R(0, -1), R(1, -2), 3)
    with pytest.raises(NotPrimitive):
        hasse_search(R(1, 1), R(2))
    with pytest.raises(SearchExhausted):
        hasse_search(R(1), R(4), PrimeConstraints(predicate=lambda q, k: False), budget=50)


@settings(max_examples=40)
@given(st.data())
def test_hasse_first_in_order(data):
    d = data.draw(D)
    R = ring(d)
    base = data.draw(nonunits(d, 20))
    mod = data.draw(nonunits(d, 10))
    try:
        hit = hasse_search(base, mod)
    except NotPrimitive:
        assert ideal_norm([base, mod]) != 1
        return
    F = O.Field(d)
    assert hit.q == base + mod * hit.n
    assert oracle_is_field(F, hit.q.coords()) if hit.q.norm() < 5000 else hit.kind.is_prime
    # everything before n in the enumeration is rejected
    earlier = []
    for n in iter_by_norm(R):
        if n == hit.n:
            break
        earlier.append(n)
    assert len(earlier) + 1 == hit.trials
    for n in earlier:
        assert not is_prime_elem(base + mod * n).is_prime


def test_prime_hits_constraints():
    R = ring(-3)
    cons = PrimeConstraints(avoid_divisors=[R(7)], char_coprime_to=3, field_size_mod=(8, 1))
    hits = []
    for h in prime_hits(R(1), R(4), cons):
        hits.append(h)
        if len(hits) == 15:
            break
    for h in hits:
        F = h.kind.char ** h.kind.degree
        assert F % 8 == 1 and h.kind.char != 3
        assert not h.q.divides(R(7))
        assert R(4).divides(h.q - 1)
    # trials count candidates between hits, so they add up to the position of the last one
    pos = next(i for i, n in enumerate(iter_by_norm(R)) if n == hits[-1].n)
    assert sum(h.trials for h in hits) == pos + 1


# -- residue fields, powers and roots --------------------------------------


def test_residue_field_basics():
    R = ring(-1)
    K = ResidueField(R(3))
    assert K.size == 9
    for i in range(1, 9):
        a = K.element(i)
        assert K.mul(a, K.inv(a)) == K.one
        o = K.order(a)
        assert K.pow(a, o) == K.one and 8 % o == 0
    assert sorted(K.unit_roots(4), key=K.index) == sorted({K.of(u) for u in R.units()}, key=K.index)
    with pytest.raises(ValueError):
        ResidueField(R(5))


def test_power_residue_examples():
    R = ring(-1)
    q = R(1, -2)
    assert mth_power_residue(4, q, 2)
    assert not mth_power_residue(2, q, 2)
    assert mth_root_mod(4, q, 2) == R(2)
    with pytest.raises(BadModulus):
        mth_power_residue(2, q, 3)
    with pytest.raises(NotResidue):
        mth_power_residue(q, q, 2)
    with pytest.raises(NotResidue):
        mth_root_mod(2, q, 2)


def _prime_moduli(d, lo, hi):
    F = O.Field(d)
    return [q for q in O.ideals_up_to(F, hi) if F.norm(q) >= lo and is_prime_elem(ring(d)(*q)).is_prime]


@pytest.mark.parametrize("d", [-1, -3, -7])
def test_roots_vs_brute(d):
    F, R = O.Field(d), ring(d)
    for q in _prime_moduli(d, 20, 400):
        Rs = O.Residues(F, q)
        size = Rs.size
        for m in (2, 3, 4, 5, 6):
            if (size - 1) % m:
                continue
            PX, PY = Rs.mth_powers(m)
            for i in range(1, size):
                s = R(int(Rs.X[i]), int(Rs.Y[i]))
                hit = np.nonzero((PX == Rs.X[i]) & (PY == Rs.Y[i]))[0]
                assert mth_power_residue(s, R(*q), m) == bool(hit.size)
                for bm in (0, 10**4):
                    if hit.size:
                        r = mth_root_mod(s, R(*q), m, brute_max=bm)
                        assert Rs.index_of(r.coords()) == int(hit[0])
                    else:
                        with pytest.raises(NotResidue):
                            mth_root_mod(s, R(*q), m, brute_max=bm)


def test_roots_large_field():
    R = ring(-1)
    rng = random.Random(3)
    q = R(10**6 + 3)  # inert prime, field of size about 10^12
    assert is_prime_elem(q).tag == "inert-deg2"
    for m in (2, 4, 8, 12):
        for _ in range(5):
            a = R(rng.randrange(10**6), rng.randrange(10**6))
            s = a**m
            r = mth_root_mod(s, q, m)
            assert q.divides(r**m - s)


# -- tame symbols ----------------------------------------------------------


def test_hilbert_examples():
    R = ring(-1)
    q = R(2, 1)
    assert hilbert_odd(q, q, q) == 1
    with pytest.raises(EvenPlace):
        hilbert_odd(R(3), R(5), R(1, 1))
    with pytest.raises(ValueError):
        hilbert_odd(R(0), R(5), q)


@settings(max_examples=80)
@given(st.data())
def test_hilbert_properties(data):
    d = data.draw(D)
    R = ring(d)
    qs = _prime_moduli(d, 3, 200)
    qs = [q for q in qs if O.Field(d).norm(q) % 2]
    q = R(*data.draw(st.sampled_from(qs)))
    a, b, c = (data.draw(nonunits(d, 15)) for _ in range(3))
    h = lambda x, y: hilbert_odd(x, y, q)
    assert h(a * b, c) == h(a, c) * h(b, c)
    assert h(a, b) == h(b, a)
    assert h(a, -a) == 1
    if (1 - a):
        assert h(a, 1 - a) == 1
    assert h(a, b * b) == 1
    # a unit at q that is a square mod q pairs trivially with everything
    if not q.divides(a) and mth_power_residue(a, q, 2) and not q.divides(b):
        assert h(a, b) == 1
    if not q.divides(a):
        F = O.Field(d)
        assert h(a, q) == (1 if O.is_square_mod_prime(F, a.coords(), q.coords()) else -1)
