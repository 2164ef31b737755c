"""Reduction of primitive rows to (1, 0) with an explicit factor trail.

A :class:`PairState` holds a det-1 matrix S whose first row is the pair
being reduced. Every step replaces S by X * S * Y where X and Y are words in
the registry; pair moves only ever right-multiply, while fixups to a
specific matrix with the same first row enter on the left as one E21.
At the end S is lower unitriangular and the trail unwinds into a word for
the original matrix.

Each reduction is compiled to a list of moves first and executed
afterwards, so a chain can be run in either direction:

    ("s1", t)         (x, y) -> (x + y t, y)       right E21(t)
    ("s2", t)         (x, y) -> (x, y + x t)       right E12(t)
    ("neg",)          (x, y) -> (-x, -y)           right ZWORD(-I)
    ("sq", a, b, c)   (1+ab, b^2 c) -> (1+ab, c)   the MAGIC step
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator, Optional

from . import families as fam
from .errors import (
    DegenerateTrace,
    NotDegenerate,
    NotPrimitive,
    NotResidue,
    SearchExhausted,
    VerificationFailed,
)
from .families import E12, E21, MAGIC, ZWORD, Certificate, Factor
from .primes import (
    DEFAULT_BUDGET,
    PrimeConstraints,
    ResidueField,
    epsilon,
    hasse_search,
    hilbert_odd,
    is_prime_elem,
    mth_power_residue,
    mth_root_mod,
    prime_hits,
)
from .ring import CLASS_NUMBER_ONE, Elem, ResidueRing, crt_pair, div_exact, ideal_norm, residue_invert
from .sl2 import Matrix2, complete_row, power_first_row, power_matrix, row_fixup, vw_split

J1 = fam.J_INV  # [[0, 1], [-1, 0]]
J2 = fam.J  # [[0, -1], [1, 0]]


@dataclass
class PipelineConfig:
    budget: int = DEFAULT_BUDGET  # trials per prime search
    rounds: int = 4  # pseudoprime rounds in pipeline searches; results are verified anyway
    width: int = 24  # companion primes compared in reduce_mth
    pivots: int = 16  # pivot primes compared in make_mth_power
    pivot_budget: int = 20_000  # trials for those before moving to another pivot
    retries: int = 16  # extra primes tried after a failed square root
    check: bool = True  # assert the expected pair after every move
    simplify: bool = True
    seed: int = 0
    pre_steps: int = 24  # nearest-quotient shifts allowed before the main chain
    pivot_norm: int = 16  # stop shifting once the smaller entry is this small


@dataclass
class RootAttempt:
    q: Elem
    p: Elem
    ok: bool


@dataclass
class RunStats:
    trials: int = 0
    max_t: int = 0
    roots: list = field(default_factory=list)
    reduce_b_calls: int = 0

    def add_trials(self, n: int) -> None:
        self.trials += n


@dataclass
class Step:
    left: list
    right: list
    after: Matrix2
    origin: str = ""


class PairState:
    """A det-1 matrix and the steps that led to it."""

    def __init__(self, matrix: Matrix2, cfg: PipelineConfig | None = None, stats: RunStats | None = None):
        assert matrix.det() == 1, "state matrix must have determinant 1"
        self.start = matrix
        self.matrix = matrix
        self.steps: list[Step] = []
        self.cfg = cfg or PipelineConfig()
        self.stats = stats if stats is not None else RunStats()

    @property
    def ring(self):
        return self.matrix.ring

    @property
    def pair(self) -> tuple[Elem, Elem]:
        return self.matrix.first_row()

    def apply(self, left: list, right: list, origin: str = "") -> None:
        left = [f for f in left if not fam._is_identity(f)]
        right = [f for f in right if not fam._is_identity(f)]
        if not left and not right:
            return
        R = self.ring
        M = fam.eval_word(left, R) * self.matrix * fam.eval_word(right, R)
        assert M.det() == 1
        if self.cfg.check:
            x, y = M.first_row()
            assert ideal_norm([x, y]) == 1, "pair lost primitivity"
        self.matrix = M
        self.steps.append(Step(left, right, M, origin))

    def fix_to(self, target: Matrix2, origin: str = "fixup") -> None:
        """Left-multiply by the E21 that turns S into target (same first row)."""
        r = row_fixup(self.matrix, target)
        self.apply([E21(r, origin)], [], origin)
        assert self.matrix == target

    def word(self) -> list[Factor]:
        """Factors whose product is the current matrix, given start = I."""
        out: list[Factor] = []
        for st in reversed(self.steps):
            out.extend(st.left)
        for st in self.steps:
            out.extend(st.right)
        return out


def _expect(st: PairState, pair) -> None:
    if st.cfg.check:
        assert st.pair == pair, f"expected pair {pair}, state has {st.pair}"


# -- single moves ------------------------------------------------------------


def pair_shift(st: PairState, which: str, t: Elem, origin: str = "shift") -> PairState:
    x, y = st.pair
    if which == "first":
        st.apply([], [E21(t, origin)], origin)
        _expect(st, (x + y * t, y))
    elif which == "second":
        st.apply([], [E12(t, origin)], origin)
        _expect(st, (x, y + x * t))
    else:
        raise ValueError("which must be 'first' or 'second'")
    return st


def _square_data(a: Elem, b: Elem, c: Elem):
    A = 1 + a * b
    z3 = ResidueRing(A).reduce(residue_invert(ResidueRing(A), b * c) * a)
    z4 = div_exact(b * c * z3 - a, A)
    assert a + z4 + b * (a * z4 - c * z3) == 0, "z-constraint violated"
    G1 = Matrix2(A, b * b * c, z3, 1 + b * z4)
    G2T = Matrix2(A, c, b * b * z3, 1 + b * z4)
    return (a, c, z3, z4, b), G1, G2T


def _run_square(st: PairState, a: Elem, b: Elem, c: Elem, backward: bool) -> None:
    A = 1 + a * b
    src, dst = (A, b * b * c), (A, c)
    if backward:
        src, dst = dst, src
    _expect(st, src)
    if A.is_unit():
        t = A.unit_inverse() * (dst[1] - src[1])
        st.apply([], [E12(t, "square")], "square")
        _expect(st, dst)
        return
    z, G1, G2T = _square_data(a, b, c)
    if not backward:
        r = row_fixup(st.matrix, G1)
        st.apply([ZWORD(J1, "square"), MAGIC(z, inverse=True, origin="square"), E21(r, "square")],
                 [ZWORD(J2, "square")], "square")
        assert st.matrix == G2T
    else:
        r = row_fixup(st.matrix, G2T)
        st.apply([MAGIC(z, origin="square"), ZWORD(J2, "square"), E21(r, "square")],
                 [ZWORD(J1, "square")], "square")
        assert st.matrix == G1
    _expect(st, dst)


def reduce_square(st: PairState, a: Elem, b: Elem, c: Elem) -> PairState:
    """(1+ab, b^2 c) -> (1+ab, c)."""
    _run_square(st, a, b, c, backward=False)
    return st


def run_moves(st: PairState, moves: list, backward: bool = False, origin: str = "") -> PairState:
    seq = reversed(moves) if backward else moves
    sign = -1 if backward else 1
    for mv in seq:
        kind = mv[0]
        if kind == "s1":
            if mv[1]:
                pair_shift(st, "first", mv[1] * sign, origin or "shift")
        elif kind == "s2":
            if mv[1]:
                pair_shift(st, "second", mv[1] * sign, origin or "shift")
        elif kind == "neg":
            x, y = st.pair
            st.apply([], [ZWORD(fam.MINUS_I, origin or "sign")], origin or "sign")
            _expect(st, (-x, -y))
        elif kind == "sq":
            _run_square(st, *mv[1:], backward=backward)
        elif kind == "sq_back":
            _run_square(st, *mv[1:], backward=not backward)
        else:
            raise ValueError(f"unknown move {kind!r}")
    return st


# -- dividing the second entry by b --------------------------------------------------


def plan_reduce_b(a: Elem, b: Elem, c: Elem, cfg: PipelineConfig, stats: RunStats) -> list:
    """Moves taking (1+ab, bc) to (1+ab, c)."""
    R = a.ring
    A = 1 + a * b
    if b == 1 or not c:
        return []
    if A.is_unit():
        return [("s2", A.unit_inverse() * (c - b * c))]
    stats.reduce_b_calls += 1
    two = R(2)
    # (i) c1 = c + A d1 prime, not dividing 2a
    cr = ResidueRing(A).reduce_small(c)
    hit = hasse_search(cr, A, PrimeConstraints(avoid_divisors=(two * a,)), cfg.budget, cfg.rounds)
    stats.add_trials(hit.trials)
    c1 = hit.q
    d1 = hit.n + div_exact(cr - c, A)
    # (ii) a + c1 e = 4q with q prime of odd residue characteristic
    four = ResidueRing(R(4))
    e0 = four.reduce(-a * residue_invert(four, c1))
    base2 = div_exact(a + c1 * e0, R(4))
    br = ResidueRing(c1).reduce_small(base2)
    hit = hasse_search(br, c1, PrimeConstraints(char_coprime_to=2), cfg.budget, cfg.rounds)
    stats.add_trials(hit.trials)
    q = hit.q
    e = e0 + 4 * (hit.n + div_exact(br - base2, c1))
    assert a + c1 * e == 4 * q
    a2 = 4 * q
    A2 = A + b * c1 * e
    assert A2 == 1 + a2 * b
    # (iii) p = c1 mod A2, p = 1 mod 8q, and -a2 a square mod p
    mod3 = 8 * q
    base3 = crt_pair(A2, c1, mod3, R(1))
    hits = prime_hits(base3, A2 * mod3, None, cfg.budget, cfg.rounds)
    for _ in range(cfg.retries + 1):
        hit = next(hits)
        stats.add_trials(hit.trials)
        p = hit.q
        try:
            r = mth_root_mod(-a2, p, 2)
        except NotResidue:
            stats.roots.append(RootAttempt(q, p, False))
            continue
        stats.roots.append(RootAttempt(q, p, True))
        break
    else:
        raise SearchExhausted(f"no square root of {-a2} after {cfg.retries + 1} primes")
    f = div_exact(p - c1, A2)
    k4 = div_exact(-(r * r + a2), p)
    return [
        ("s2", b * d1),
        ("s1", e),
        ("s2", b * f),
        ("s1", k4),
        ("s2", -b * p),
        ("sq", -r, r * b, p),
        ("s1", -b * k4),
        ("s2", -f),
        ("s1", -b * e),
        ("s2", -d1),
    ]


def reduce_b(st: PairState, a: Elem, b: Elem, c: Elem) -> PairState:
    """(1+ab, bc) -> (1+ab, c)."""
    _expect(st, (1 + a * b, b * c))
    run_moves(st, plan_reduce_b(a, b, c, st.cfg, st.stats), origin="reduce-b")
    _expect(st, (1 + a * b, c))
    return st


# -- powers ------------------------------------------------------------------

DEGENERATE_TRACES = (0, 1, -1, 2, -2)


def _degenerate(tau: Elem) -> bool:
    return tau.y == 0 and tau.x in DEGENERATE_TRACES


def reduce_power(st: PairState, alpha: Matrix2, n: int) -> PairState:
    """(a^n, b) -> (a_n, b_n), the first row of alpha^n."""
    a, b = alpha.a, alpha.b
    an_pow = a**n
    _expect(st, (an_pow, b))
    if n == 1:
        return st
    tau = alpha.trace()
    if _degenerate(tau):
        raise DegenerateTrace(f"trace {tau} is degenerate")
    an, bn, un, unm1 = power_first_row(alpha, n)
    if not b:
        return st
    pair_shift(st, "first", div_exact(an - an_pow, b), "power")
    if an.is_unit():
        pair_shift(st, "second", an.unit_inverse() * (bn - b), "power")
        _expect(st, (an, bn))
        return st
    v, w = vw_split(tau, n)
    moves = [("neg",)]
    moves += _reversed_plan(plan_reduce_b(div_exact(-an - 1, v), v, -b, st.cfg, st.stats))
    moves += [("neg",)]
    moves += _reversed_plan(plan_reduce_b(div_exact(an - 1, w), w, b * v, st.cfg, st.stats))
    run_moves(st, moves, origin="power")
    _expect(st, (an, bn))
    return st


def _reversed_plan(moves: list) -> list:
    """The same chain walked backwards, as forward moves."""
    out = []
    for mv in reversed(moves):
        if mv[0] in ("s1", "s2"):
            out.append((mv[0], -mv[1]))
        elif mv[0] == "sq":
            out.append(("sq_back",) + mv[1:])
        else:
            out.append(mv)
    return out


# -- companion primes -----------------------------------------------------------------


def ck_candidates(
    aa: Elem, b: Elem, u: Elem, target: int, cfg: PipelineConfig, stats: RunStats, base: Elem | None = None
) -> Iterator[tuple[Elem, int]]:
    """Primes c = u/b mod aa with gcd(eps(b), eps(c)) == target, in search order."""
    eb = epsilon(b)
    rr = ResidueRing(aa)
    c0 = rr.reduce(u * residue_invert(rr, b)) if base is None else base
    cons = PrimeConstraints(predicate=lambda x, k: math.gcd(eb, _eps_prime(x, k)) == target)
    for hit in prime_hits(c0, aa, cons, cfg.budget, cfg.rounds):
        stats.add_trials(hit.trials)
        yield hit.q, _eps_prime(hit.q, hit.kind)


def _eps_prime(x: Elem, kind) -> int:
    return kind.char**kind.degree - 1


def ck_lemma4_search(
    aa: Elem, b: Elem, u: Elem, gamma_target: int = 1, cfg: PipelineConfig | None = None
) -> Elem:
    """Prime c with b c = u mod aa and gcd(eps(b), eps(c)) = m * gamma_target.

    The first ``cfg.width`` candidates are compared and the one with the
    smallest eps(c) is returned.
    """
    cfg = cfg or PipelineConfig()
    R = b.ring
    kind = is_prime_elem(b)
    if not kind.is_prime or math.gcd(kind.char, R.m) != 1:
        raise ValueError(f"{b} must be a prime of residue characteristic prime to {R.m}")
    target = R.m * gamma_target
    best = None
    gen = ck_candidates(aa, b, u, target, cfg, RunStats())
    for _ in range(cfg.width):
        c, ec = next(gen)
        if best is None or ec < best[1]:
            best = (c, ec)
    c = best[0]
    assert ResidueRing(aa).congruent(b * c, u)
    assert math.gcd(epsilon(b), epsilon(c)) == target
    return c


# -- m-th powers -------------------------------------------------------------


def _exponents(ob: int, oc: int, m: int) -> tuple[int, int] | None:
    """Least t > m with ob | t and oc | t - m."""
    g = math.gcd(ob, oc)
    if m % g:
        return None
    mod = oc // g
    i = (m // g) * pow(ob // g, -1, mod) % mod if mod > 1 else 0
    t = ob * i
    while t <= m:
        t += ob * mod
    return t, t - m


@dataclass
class MthPlan:
    c: Elem
    N: Matrix2
    t: int
    s: int
    cost: float


def plan_mth(a: Elem, b: Elem, cfg: PipelineConfig, stats: RunStats) -> MthPlan:
    """Pick a prime c for N = [[a, b], [c, d']] keeping u_t small.

    Primes c = -1/b mod a are taken in canonical order from the least-norm
    residue; each one fixes the orders of a mod b and mod c and hence the
    least (t, s). Among the first cfg.width usable ones the smallest
    t * log|tr N| wins.
    """
    R = a.ring
    m = R.m
    Kb = ResidueField(b)
    ob = Kb.order(Kb.of(a))
    rr = ResidueRing(a)
    c0 = rr.reduce_small(-residue_invert(rr, b))
    best: Optional[MthPlan] = None
    seen = usable = 0
    for hit in prime_hits(c0, a, PrimeConstraints(), cfg.budget, cfg.rounds):
        stats.add_trials(hit.trials)
        seen += 1
        c = hit.q
        dp = div_exact(1 + b * c, a)
        N = Matrix2(a, b, c, dp)
        tau = N.trace()
        if not _degenerate(tau):
            Kc = ResidueField(c)
            ts = _exponents(ob, Kc.order(Kc.of(a)), m)
            if ts is not None:
                usable += 1
                t, s_ = ts
                cost = t * math.log2(max(tau.norm(), 2))
                if best is None or cost < best.cost:
                    best = MthPlan(c, N, t, s_, cost)
        if usable >= cfg.width or seen >= cfg.width * 8:
            break
    if best is None:
        raise SearchExhausted(f"no usable companion prime for ({a}, {b})")
    return best


def _round_quotient(x: Elem, y: Elem) -> Elem:
    """Nearest lattice point to x / y."""
    num = x * y.conj()
    n = y.norm()
    return x.ring((2 * num.x + n) // (2 * n), (2 * num.y + n) // (2 * n))


def power_word(alpha: Matrix2, n: int, cfg: PipelineConfig, stats: RunStats, origin: str) -> list[Factor]:
    """A registry word for alpha^n, built from I by reduce_power.

    Needs a^n = 1 mod b for the first row (a, b) of alpha.
    """
    R = alpha.ring
    sub = PairState(Matrix2.identity(R), cfg, stats)
    a, b = alpha.a, alpha.b
    pair_shift(sub, "second", b, origin)
    pair_shift(sub, "first", div_exact(a**n - 1, b), origin)
    reduce_power(sub, alpha, n)
    sub.fix_to(power_matrix(alpha, n), origin)
    word = [f.tagged(origin) for f in sub.word()]
    return word


def reduce_mth(st: PairState, a: Elem, b: Elem) -> PairState:
    """(a^m, b) -> (1, 0) for a prime b."""
    R = st.ring
    if R.d not in CLASS_NUMBER_ONE:
        raise NotImplementedError("only class number one rings are supported")
    m = R.m
    if not a or not b:
        raise ValueError("reduce_mth needs a b != 0")
    am = a**m
    _expect(st, (am, b))
    if am.is_unit():
        return normalize_degenerate(st)
    cfg, stats = st.cfg, st.stats
    plan = plan_mth(a, b, cfg, stats)
    N = plan.N
    stats.max_t = max(stats.max_t, plan.t)
    Wt = power_word(N, plan.t, cfg, stats, "mth-t")
    Ws = power_word(N.transpose(), plan.s, cfg, stats, "mth-s")
    # N^-s = J1 (N^T)^s J2, so N^m = W_t J1 W_s J2
    neg_s = [ZWORD(J1, "mth-s")] + Ws + [ZWORD(J2, "mth-s")]
    Nm = power_matrix(N, m)
    if cfg.check:
        assert fam.eval_word(Wt, R) * fam.eval_word(neg_s, R) == Nm
    reduce_power(st, N, m)
    st.fix_to(Nm, "mth")
    st.apply([f.inv() for f in reversed(Wt)], [f.inv() for f in reversed(neg_s)], "mth")
    assert st.matrix.is_identity()
    return st


def _least_root(s: Elem, q: Elem, m: int) -> Elem:
    a0 = mth_root_mod(s, q, m)
    rq = ResidueRing(q)
    return min((rq.reduce_small(a0 * u) for u in q.ring.units()), key=lambda e: (e.norm(), e.x, e.y))


def make_mth_power(st: PairState) -> tuple[Elem, Elem]:
    """(s, t) -> (a^m, q) with q prime of residue field size 1 mod m.

    The first cfg.pivots primes of the progression are compared by the
    cost of the chain that follows, and the cheapest is kept.
    """
    R = st.ring
    m = R.m
    s, t = st.pair
    if not s or not t or s.is_unit():
        raise ValueError("make_mth_power needs s, t non-zero and s not a unit")
    if ideal_norm([s, t]) != 1:
        raise NotPrimitive(f"({s}, {t}) is not primitive")
    cfg = st.cfg
    rr = ResidueRing(s)
    t0 = rr.reduce_small(t)
    cons = PrimeConstraints(
        norm_coprime_to=m * abs(R.disc),
        field_size_mod=(m, 1),
        predicate=lambda q, k: mth_power_residue(s, q, m),
    )
    best = None
    hits = prime_hits(t0, s, cons, min(cfg.budget, cfg.pivot_budget), cfg.rounds)
    for i in range(cfg.pivots):
        try:
            hit = next(hits)
        except SearchExhausted:
            if best is None:
                raise
            break
        st.stats.add_trials(hit.trials)
        a = _least_root(s, hit.q, m)
        try:
            cost = plan_mth(a, hit.q, cfg, RunStats()).cost if cfg.pivots > 1 else 0.0
        except SearchExhausted:
            cost = math.inf
        if best is None or cost < best[0]:
            best = (cost, hit, a)
    _, hit, a = best
    q = hit.q
    pair_shift(st, "second", hit.n + div_exact(t0 - t, s), "mth-power")
    k = div_exact(a**m - s, q)
    pair_shift(st, "first", k, "mth-power")
    _expect(st, (a**m, q))
    return a, q


def _diag_word(u: Elem, origin: str) -> list[Factor]:
    """diag(u, 1/u) = E12(u) E21(-1/u) E12(u) J for a unit u."""
    if u == 1:
        return []
    if u == -1:
        return [ZWORD(fam.MINUS_I, origin)]
    ui = u.unit_inverse()
    return [E12(u, origin), E21(-ui, origin), E12(u, origin), ZWORD(J2, origin)]


def normalize_degenerate(st: PairState) -> PairState:
    """Pairs with a zero or unit entry go straight to (1, 0)."""
    x, y = st.pair
    if not x.is_unit():
        if not y.is_unit():
            raise NotDegenerate(f"({x}, {y}) has no unit entry")
        pair_shift(st, "first", -x * y.unit_inverse(), "unit")
        st.apply([], [ZWORD(J2, "unit")], "unit")
        x, y = st.pair
    u = x
    if y:
        pair_shift(st, "second", -y * u.unit_inverse(), "unit")
    st.apply([], _diag_word(u.unit_inverse(), "unit"), "unit")
    _expect(st, (st.ring.one, st.ring.zero))
    return st


def is_degenerate(pair) -> bool:
    x, y = pair
    return x.is_unit() or y.is_unit()


def pre_reduce(st: PairState) -> PairState:
    """Shrink the pair with at most cfg.pre_steps nearest-quotient shifts.

    Stops early on a degenerate pair, once the smaller entry has norm at
    most cfg.pivot_norm, or when a shift no longer lowers the larger norm
    (which can happen outside the norm-Euclidean fields).
    """
    cfg = st.cfg
    for _ in range(cfg.pre_steps):
        x, y = st.pair
        if is_degenerate((x, y)) or min(x.norm(), y.norm()) <= cfg.pivot_norm:
            break
        if y.norm() >= x.norm():
            r = ResidueRing(x).reduce_small(y)
            if r.norm() >= y.norm():
                break
            pair_shift(st, "second", div_exact(r - y, x), "pre")
        else:
            r = ResidueRing(y).reduce_small(x)
            if r.norm() >= x.norm():
                break
            pair_shift(st, "first", div_exact(r - x, y), "pre")
    return st


def factorize_row(pair, cfg: PipelineConfig | None = None, start: Matrix2 | None = None,
                  stats: RunStats | None = None) -> PairState:
    """Reduce a primitive row to (1, 0)."""
    cfg = cfg or PipelineConfig()
    x, y = pair
    if start is None:
        start = complete_row(x, y)
    st = PairState(start, cfg, stats)
    pre_reduce(st)
    if is_degenerate(st.pair):
        return normalize_degenerate(st)
    for attempt in range(cfg.retries + 1):
        s, t = st.pair
        if t.norm() < s.norm():
            # the modulus of the prime search should be the smaller entry
            st.apply([], [ZWORD(J2, "swap")], "swap")
        try:
            a, q = make_mth_power(st)
            break
        except SearchExhausted:
            # some progressions carry no usable prime at all (a residue
            # symbol fixed by reciprocity); move to a different pivot
            if attempt == cfg.retries:
                raise
            _perturb(st)
            if is_degenerate(st.pair):
                return normalize_degenerate(st)
    reduce_mth(st, a, q)
    return st


def _perturb(st: PairState) -> None:
    """(s, t) -> (s + r, r) with r the least-norm residue of t mod s."""
    s, t = st.pair
    r = ResidueRing(s).reduce_small(t)
    pair_shift(st, "second", div_exact(r - t, s), "retry")
    pair_shift(st, "first", st.ring.one, "retry")


def unwind(st: PairState) -> list[Factor]:
    """Word for st.start, given that st.matrix is lower unitriangular."""
    S = st.matrix
    assert S.a == 1 and not S.b and S.d == 1, "state did not reach (1, 0)"
    out: list[Factor] = []
    for step in st.steps:
        out.extend(f.inv() for f in reversed(step.left))
    if S.c:
        out.append(E21(S.c, "end"))
    for step in reversed(st.steps):
        out.extend(f.inv() for f in reversed(step.right))
    return out


def factorize_matrix(M: Matrix2, cfg: PipelineConfig | None = None, stats: RunStats | None = None) -> Certificate:
    if M.det() != 1:
        raise ValueError("matrix must have determinant 1")
    cfg = cfg or PipelineConfig()
    st = factorize_row(M.first_row(), cfg, start=M, stats=stats)
    word = unwind(st)
    if cfg.simplify:
        word = fam.simplify_word(word)
    cert = Certificate(M.ring, M, word)
    res = fam.verify_certificate(cert)
    if not res.ok:
        raise VerificationFailed(res.report())
    return cert


def reciprocity_consistent(q: Elem, p: Elem, root_ok: bool) -> bool:
    """Tame symbols of (-q, p) at q and p against the observed square root.

    p = 1 mod 8q makes p a square at every place over 2 and at q, so the
    symbol at p must be +1, which is exactly solvability of r^2 = -4q mod p.
    """
    hq = hilbert_odd(-q, p, q)
    hp = hilbert_odd(-q, p, p)
    return hq * hp == 1 and (hp == 1) == root_ok
