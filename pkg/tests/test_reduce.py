import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles as O
from sl2param.cli import random_matrix
from sl2param.errors import DegenerateTrace, NotDegenerate, NotPrimitive
from sl2param.families import E12, eval_word, factor_to_json
from sl2param.primes import epsilon, is_prime_elem, mth_power_residue
from sl2param.reduce import (
    PairState,
    PipelineConfig,
    RunStats,
    _exponents,
    ck_lemma4_search,
    factorize_matrix,
    factorize_row,
    make_mth_power,
    normalize_degenerate,
    pair_shift,
    reduce_b,
    reduce_mth,
    reduce_power,
    reduce_square,
    run_moves,
    unwind,
)
from sl2param.ring import CLASS_NUMBER_ONE, ResidueRing, ideal_norm, ring
from sl2param.sl2 import Matrix2, complete_row, e12, e21, power_matrix


def oracle_replay(st):
    """Replay every step with tuple arithmetic and compare to the recorded matrices."""
    F = O.Field(st.ring.d)
    tup = lambda M: tuple(tuple(e.coords() for e in row) for row in ((M.a, M.b), (M.c, M.d)))
    cur = tup(st.start)
    for step in st.steps:
        for f in reversed(step.left):
            cur = F.mmul(O.eval_json_factor(F, factor_to_json(f)), cur)
        for f in step.right:
            cur = F.mmul(cur, O.eval_json_factor(F, factor_to_json(f)))
        assert cur == tup(step.after)
        assert F.det(cur) == O.ONE
    return cur


def state(pair):
    return PairState(complete_row(*pair))


# -- single moves ------------------------------------------------------------


def test_pair_shift_examples():
    R = ring(-1)
    st = PairState(Matrix2.identity(R))
    pair_shift(st, "second", R(0))
    assert st.steps == [] and st.pair == (1, 0)
    b = R(2, 3)
    pair_shift(st, "second", b)
    assert st.pair == (1, b) and st.steps[-1].right == [E12(b, "shift")]
    st = state((R(3), R(1, 1)))
    t = R(1, -2)
    pair_shift(st, "first", t)
    pair_shift(st, "first", -t)
    assert st.pair == (R(3), R(1, 1))
    assert eval_word(st.steps[0].right + st.steps[1].right, R).is_identity()
    with pytest.raises(ValueError):
        pair_shift(st, "third", t)
    oracle_replay(st)


def test_reduce_square_examples():
    R = ring(-1)
    # unit first coordinate
    st = state((R(1), R(5) * R(2) ** 2))
    reduce_square(st, R(0), R(2), R(5))
    assert st.pair == (1, 5)
    # b = 1 leaves the pair alone but still runs the chain; (2, w) itself is
    # not primitive since w divides 2, so c = 1 + 2w stands in
    R7 = ring(-7)
    c = R7(1, 2)
    st = state((R7(2), c))
    reduce_square(st, R7(1), R7(1), c)
    assert st.pair == (2, c)
    oracle_replay(st)
    # (3, 4) -> (3, 1) over Z[i]
    st = state((R(3), R(4)))
    reduce_square(st, R(1), R(2), R(1))
    assert st.pair == (3, 1)
    assert oracle_replay(st) == tuple(tuple(e.coords() for e in row) for row in ((st.matrix.a, st.matrix.b), (st.matrix.c, st.matrix.d)))


@settings(max_examples=40)
@given(st.data())
def test_reduce_square_random(data):
    d = data.draw(st.sampled_from(CLASS_NUMBER_ONE))
    R = ring(d)
    el = lambda: R(data.draw(st.integers(-4, 4)), data.draw(st.integers(-4, 4)))
    a, b, c = el(), el(), el()
    if not b:
        b = R(1)
    A = 1 + a * b
    if not A or ideal_norm([A, b * b * c]) != 1 or ideal_norm([A, b * c]) != 1:
        return
    st_ = state((A, b * b * c))
    reduce_square(st_, a, b, c)
    assert st_.pair == (A, c)
    oracle_replay(st_)


def test_reduce_b_examples():
    R = ring(-1)
    st = state((R(1), R(3) * R(2, 1)))
    reduce_b(st, R(0), R(3), R(2, 1))
    assert st.pair == (1, R(2, 1))
    # unit b
    st = state((R(1, 1) + 1, R(0, 1) * R(3)))
    reduce_b(st, R(1, -1), R(0, 1), R(3))
    assert st.pair == (R(2, 1), R(3))
    oracle_replay(st)


@pytest.mark.parametrize("d,a,b,c", [(-7, (1, 0), (2, 0), (0, 1)), (-1, (1, 1), (3, 0), (2, 0)), (-3, (0, 1), (2, 0), (5, 1))])
def test_reduce_b_general(d, a, b, c):
    R = ring(d)
    a, b, c = R(*a), R(*b), R(*c)
    stats = RunStats()
    st = PairState(complete_row(1 + a * b, b * c), stats=stats)
    reduce_b(st, a, b, c)
    assert st.pair == (1 + a * b, c)
    assert stats.reduce_b_calls == 1
    assert stats.roots and stats.roots[-1].ok
    assert sum(1 for r in stats.roots if r.ok) == 1
    F = O.Field(d)
    for r in stats.roots:
        # r^2 = -4q mod p has a solution exactly when the root step succeeded
        assert O.is_square_mod_prime(F, (-4 * r.q).coords(), r.p.coords()) == r.ok
    oracle_replay(st)


def test_run_moves_backward_inverts():
    R = ring(-1)
    st = state((R(3), R(4)))
    moves = [("s1", R(1, 1)), ("neg",), ("s2", R(2)), ("sq", R(1), R(2), R(1))]
    st0 = st.pair
    run_moves(st, moves[:3])
    run_moves(st, moves[:3], backward=True)
    assert st.pair == st0
    # (3, 4) -> (3, 1) by the square step, and back
    run_moves(st, moves[3:])
    assert st.pair == (3, 1)
    run_moves(st, moves[3:], backward=True)
    assert st.pair == st0
    with pytest.raises(ValueError):
        run_moves(st, [("bogus",)])


# -- powers ------------------------------------------------------------------


def test_reduce_power_examples():
    R = ring(-1)
    alpha = Matrix2.from_ints(R, ((1, 1), (1, 2)))
    st = state((R(1), R(1)))
    reduce_power(st, alpha, 1)
    assert st.steps == []
    reduce_power(st, alpha, 2)
    sq = alpha * alpha
    assert st.pair == (sq.a, sq.b) == (2, 3)
    oracle_replay(st)
    # a unit diagonal always has a trace in {0, +-1, +-2}
    u = Matrix2(R(0, 1), R(5), R(0), R(0, -1))
    with pytest.raises(DegenerateTrace):
        reduce_power(state((u.a ** 2, u.b)), u, 2)


@pytest.mark.parametrize("d,n", [(-2, 3), (-3, 4), (-7, 5), (-11, 2)])
def test_reduce_power_general(d, n):
    R = ring(d)
    alpha = e12(R, R(1, 1)) * e21(R, R(1)) * e12(R, R(0, 1))
    assert not (alpha.trace().y == 0 and alpha.trace().x in (0, 1, -1, 2, -2))
    a, b = alpha.first_row()
    st = state((a ** n, b))
    reduce_power(st, alpha, n)
    P = power_matrix(alpha, n)
    assert st.pair == (P.a, P.b)
    oracle_replay(st)


# -- companion primes and m-th powers ----------------------------------------------


def test_exponents_vs_brute():
    for ob in range(1, 25):
        for oc in range(1, 25):
            for m in (2, 4, 6):
                got = _exponents(ob, oc, m)
                brute = next((t for t in range(m + 1, ob * oc * m + m + 2) if t % ob == 0 and (t - m) % oc == 0), None)
                assert (got is None and brute is None) or got == (brute, brute - m)


def test_ck_lemma4_search():
    R = ring(-7)
    b = next(R(x, y) for x in range(-10, 10) for y in range(-10, 10) if R(x, y).norm() == 11)
    c = ck_lemma4_search(R(3), b, R(-1))
    F = O.Field(-7)
    assert is_prime_elem(c).is_prime
    assert ResidueRing(R(3)).congruent(b * c, R(-1))
    assert math.gcd(epsilon(b), epsilon(c)) == 2
    # the search window holds some prime of norm <= 500 with the same properties
    cands = [e for e in F.elements_up_to(500) if is_prime_elem(R(*e)).is_prime
             and ResidueRing(R(3)).congruent(b * R(*e), R(-1))
             and math.gcd(10, F.norm(e) - 1) == 2]
    assert cands
    if c.norm() <= 500:
        assert c.coords() in cands
    # residue characteristic 2 divides m = 2
    with pytest.raises(ValueError):
        ck_lemma4_search(R(3), R.omega, R(-1))


def test_make_mth_power_example():
    R = ring(-1)
    st = state((R(3), R(1)))
    a, q = make_mth_power(st)
    kind = is_prime_elem(q)
    F = kind.char ** kind.degree
    assert kind.is_prime and F % 4 == 1 and math.gcd(F, 16) == 1
    assert R(3).divides(q - 1)
    assert mth_power_residue(3, q, 4)
    assert q.divides(a ** 4 - 3)
    assert st.pair == (a ** 4, q)
    oracle_replay(st)
    # no det-1 matrix has first row (2, 2), so plant the row directly
    bad = PairState(Matrix2.identity(R))
    bad.matrix = Matrix2(R(2), R(2), R(0), R(0))
    with pytest.raises(NotPrimitive):
        make_mth_power(bad)


def test_reduce_mth_small():
    R = ring(-7)
    b = next(e for e in (R(x, y) for x in range(8) for y in range(8)) if e.norm() in range(12, 51) and is_prime_elem(e).is_prime
             and math.gcd(is_prime_elem(e).char, 2 * 7) == 1)
    a = R(2, 1)
    assert ideal_norm([a, b]) == 1
    st = state((a ** 2, b))
    reduce_mth(st, a, b)
    assert st.matrix.is_identity()
    oracle_replay(st)
    with pytest.raises(ValueError):
        reduce_mth(state((R(1), R(0))), R(1), R(0))


# -- degenerate pairs and whole rows -----------------------------------------


def test_normalize_degenerate():
    R = ring(-1)
    st = state((R(0), R(0, 1)))
    normalize_degenerate(st)
    assert st.pair == (1, 0)
    oracle_replay(st)
    u = R(0, 1)
    st = state((u, R(7, 3)))
    normalize_degenerate(st)
    assert st.pair == (1, 0)
    oracle_replay(st)
    F = O.Field(-1)
    D = F.mmul(F.mmul(F.mmul(O.e12(u.coords()), O.e21((0, 1))), O.e12(u.coords())), ((O.ZERO, (-1, 0)), (O.ONE, O.ZERO)))
    assert D == ((u.coords(), O.ZERO), (O.ZERO, (0, -1)))
    with pytest.raises(NotDegenerate):
        normalize_degenerate(state((R(3), R(2, 1))))


def test_factorize_row_trivial():
    R = ring(-1)
    st = factorize_row((R(1), R(0)))
    assert st.pair == (1, 0) and st.steps == []
    st = factorize_row((R(0), R(1)))
    assert st.pair == (1, 0)
    assert all(f.family in ("ZWORD", "E12", "E21") for s in st.steps for f in s.left + s.right)


def _check_row(st):
    S = st.matrix
    assert S.a == 1 and not S.b and S.d == 1
    oracle_replay(st)
    assert eval_word(unwind(st), st.ring) == st.start


@pytest.mark.parametrize("d", CLASS_NUMBER_ONE)
def test_factorize_row_seeded(d):
    # first rows of the seeded corpus generator
    R = ring(d)
    for i in range(3):
        M = random_matrix(R, 11, i, word_len=10, param_max_norm=30)
        _check_row(factorize_row(M.first_row()))


@pytest.mark.parametrize("d", [-1, -2, -3, -7, -11])
def test_factorize_row_random_pairs(d):
    # arbitrary primitive pairs; nearest-quotient descent always reaches a
    # small pivot in the norm-Euclidean fields
    R = ring(d)
    rng = random.Random(d)
    done = 0
    while done < 4:
        s = R(rng.randint(-60, 60), rng.randint(-60, 60))
        t = R(rng.randint(-60, 60), rng.randint(-60, 60))
        if not s or not t or ideal_norm([s, t]) != 1:
            continue
        _check_row(factorize_row((s, t)))
        done += 1


def test_factorize_matrix_examples():
    R = ring(-1)
    cert = factorize_matrix(Matrix2.identity(R))
    assert all(eval_word([f], R).is_identity() for f in cert.factors)
    b = R(3, -2)
    cert = factorize_matrix(e12(R, b))
    assert [(f.family, f.params, f.inverse) for f in cert.factors] == [("E12", (b,), False)]
    with pytest.raises(ValueError):
        factorize_matrix(Matrix2.from_ints(R, ((2, 0), (0, 1))))


def test_pipeline_config_defaults():
    cfg = PipelineConfig()
    assert cfg.check and cfg.simplify and cfg.retries >= 1
    assert cfg.pivots >= 1 and cfg.width >= 1
