"""Primes of O_d: classification, factorization, unit exponents, prime
searches along progressions, power residues and roots, tame symbols."""

from __future__ import annotations

import random
from dataclasses import dataclass
from functools import lru_cache
from math import gcd, isqrt, lcm
from typing import Callable, Iterator, NamedTuple, Optional, Sequence

import gmpy2
from sympy import factorint
from sympy.ntheory import sqrt_mod

from . import kernels
from .errors import (
    BadModulus,
    EvenPlace,
    NotDivisible,
    NotPrimitive,
    NotResidue,
    SearchExhausted,
    TooLarge,
)
from .ring import Elem, ResidueRing, div_exact, ideal_generator, ideal_norm, iter_by_norm

DEFAULT_ROUNDS = 40
DEFAULT_BUDGET = 200_000
LOCAL_MAX = 10**6
BRUTE_MAX = 10**4

# trial division by every prime below 10**5 in one gcd; on thousand-bit
# candidates this rejects about 40% more composites than a 1000 bound
_SMALL_PRIMORIAL = gmpy2.primorial(10**5)


def is_prime_int(n: int, rounds: int = DEFAULT_ROUNDS) -> bool:
    """Rational primality: BPSW below 2**64 (no counterexamples exist there),
    strong-pseudoprime rounds with seeded random bases above."""
    n = abs(n)
    if n < 2:
        return False
    if n < 1 << 64:
        return bool(gmpy2.is_bpsw_prp(n))
    if gmpy2.gcd(n, _SMALL_PRIMORIAL) != 1:
        return False
    rng = random.Random(n)
    for _ in range(rounds):
        a = rng.randrange(2, n - 1)
        if gcd(a, n) != 1 or not gmpy2.is_strong_prp(n, a):
            return False
    return True


class PrimeKind(NamedTuple):
    tag: str  # split-deg1 | inert-deg2 | ramified | not-prime
    char: int

    @property
    def is_prime(self) -> bool:
        return self.tag != "not-prime"

    @property
    def degree(self) -> int:
        return 2 if self.tag == "inert-deg2" else 1


NOT_PRIME = PrimeKind("not-prime", 0)


def is_inert(d: int, p: int) -> bool:
    if p == 2:
        return d % 8 == 5
    return gmpy2.legendre(d % p, p) == -1


def is_prime_elem(q: Elem, rounds: int = DEFAULT_ROUNDS) -> PrimeKind:
    R = q.ring
    N = q.norm()
    if N <= 1:
        return NOT_PRIME
    if is_prime_int(N, rounds):
        return PrimeKind("ramified" if R.disc % N == 0 else "split-deg1", N)
    p = isqrt(N)
    if p * p != N or not is_prime_int(p, rounds):
        return NOT_PRIME
    try:
        u = div_exact(q, R(p))
    except NotDivisible:
        return NOT_PRIME
    if u.is_unit() and is_inert(R.d, p):
        return PrimeKind("inert-deg2", p)
    return NOT_PRIME


# -- factorization -------------------------------------------------------


@dataclass(frozen=True)
class Factorization:
    unit: Elem
    factors: tuple[tuple[Elem, int], ...]

    def value(self) -> Elem:
        out = self.unit
        for pi, e in self.factors:
            out = out * pi**e
        return out


def canonical_associate(e: Elem) -> Elem:
    """The unit multiple of ``e`` with the largest (x, y)."""
    return max((u * e for u in e.ring.units()), key=lambda a: (a.x, a.y))


def primes_above(R, p: int) -> list[Elem]:
    """Prime elements over the rational prime p (one per prime ideal)."""
    if is_inert(R.d, p):
        return [R(p)]
    h = 1 if R.half else 0
    if p == 2:
        roots = [x for x in range(2) if (x * x - h * x - R.k) % 2 == 0]
    else:
        inv2 = pow(2, -1, p)
        roots = sorted({(h + s) * inv2 % p for s in sqrt_mod(R.disc % p, p, all_roots=True)})
    found = []
    for rho in roots:
        pi = canonical_associate(ideal_generator(R(p), R(-rho, 1)))
        if pi not in found:
            found.append(pi)
    return found


def factor_elem(q: Elem) -> Factorization:
    R = q.ring
    if not q:
        raise ValueError("cannot factor zero")
    rest = q
    out = []
    for p in sorted(factorint(q.norm())):
        for pi in primes_above(R, p):
            e = 0
            while True:
                try:
                    nxt = div_exact(rest, pi)
                except NotDivisible:
                    break
                rest, e = nxt, e + 1
            if e:
                out.append((pi, e))
    assert rest.is_unit(), f"leftover {rest} factoring {q}"
    fac = Factorization(rest, tuple(out))
    assert fac.value() == q
    return fac


# -- unit exponents ------------------------------------------------------


def residue_constants(rr: ResidueRing) -> tuple[int, int, int, int, int]:
    R = rr.ring
    return rr.n1, rr.b, rr.n2, 1 if R.half else 0, R.k


def brute_unit_exponent(rr: ResidueRing) -> int:
    """Exponent of (O/q)^x straight from the group elements."""
    if rr.size == 1:
        return 1
    order = unit_count(rr.modulus)
    return kernels.unit_exponent(*residue_constants(rr), order, sorted(factorint(order).items()))


def unit_count(q: Elem) -> int:
    """|(O/q)^x|, the ideal-theoretic Euler function."""
    n = 1
    for pi, e in factor_elem(q).factors:
        F = pi.norm()
        n *= (F - 1) * F ** (e - 1)
    return n


def epsilon(q: Elem, local_max: int = LOCAL_MAX) -> int:
    """Exponent of the unit group of O/q."""
    if q.norm() <= 1:
        raise ValueError("epsilon needs a non-zero non-unit")
    out = 1
    for pi, e in factor_elem(q).factors:
        F = pi.norm()
        if e == 1:
            out = lcm(out, F - 1)
            continue
        if F**e > local_max:
            raise TooLarge(f"local ring of size {F**e} above {local_max}")
        out = lcm(out, brute_unit_exponent(ResidueRing(pi**e)))
    return out


# -- prime searches --------------------------------------------------------


@dataclass
class PrimeConstraints:
    avoid_divisors: Sequence[Elem] = ()
    char_coprime_to: int = 1
    norm_coprime_to: int = 1
    field_size_mod: Optional[tuple[int, int]] = None  # (modulus, residue) for |O/q|
    predicate: Optional[Callable[[Elem, PrimeKind], bool]] = None

    def accepts(self, q: Elem, kind: PrimeKind) -> bool:
        if self.char_coprime_to != 1 and gcd(kind.char, self.char_coprime_to) != 1:
            return False
        F = kind.char**kind.degree
        if self.norm_coprime_to != 1 and gcd(F, self.norm_coprime_to) != 1:
            return False
        if self.field_size_mod is not None:
            mod, res = self.field_size_mod
            if (F - res) % mod:
                return False
        for a in self.avoid_divisors:
            if q.divides(a):
                return False
        if self.predicate is not None and not self.predicate(q, kind):
            return False
        return True


class HasseHit(NamedTuple):
    n: Elem
    q: Elem
    kind: PrimeKind
    trials: int


def prime_hits(
    base: Elem,
    modulus: Elem,
    constraints: PrimeConstraints | None = None,
    budget: int = DEFAULT_BUDGET,
    rounds: int = DEFAULT_ROUNDS,
) -> Iterator[HasseHit]:
    """All admissible primes ``base + modulus*n`` in search order.

    ``trials`` on each hit counts candidates since the previous hit; the
    whole enumeration stops with SearchExhausted after ``budget`` of them.
    """
    R = base.ring
    if isinstance(modulus, int):
        modulus = R(modulus)
    if ideal_norm([base, modulus]) != 1:
        raise NotPrimitive(f"({base}, {modulus}) is not primitive")
    cons = constraints or PrimeConstraints()
    total = since = 0
    for n in iter_by_norm(R):
        if total >= budget:
            break
        total += 1
        since += 1
        q = base + modulus * n
        kind = is_prime_elem(q, rounds)
        if kind.is_prime and cons.accepts(q, kind):
            yield HasseHit(n, q, kind, since)
            since = 0
        if not modulus:
            break
    raise SearchExhausted(f"no prime {base} + ({modulus})n within {budget} trials")


def hasse_search(
    base: Elem,
    modulus: Elem,
    constraints: PrimeConstraints | None = None,
    budget: int = DEFAULT_BUDGET,
    rounds: int = DEFAULT_ROUNDS,
) -> HasseHit:
    """First prime ``q = base + modulus*n`` with n in ascending (norm, x, y)."""
    return next(prime_hits(base, modulus, constraints, budget, rounds))


# -- residue fields ----------------------------------------------------------


class ResidueField:
    """O/q for a prime q; elements are canonical (x, y) coordinate pairs."""

    def __init__(self, q: Elem, kind: PrimeKind | None = None) -> None:
        kind = kind or is_prime_elem(q)
        if not kind.is_prime:
            raise ValueError(f"{q} is not prime")
        self.q = q
        self.kind = kind
        self.rr = ResidueRing(q)
        self.size = self.rr.size
        self.n1, self.b, self.n2, self.half, self.k = residue_constants(self.rr)
        self.one = (1 % self.n1, 0)
        self._gen_cache: dict[int, tuple] = {}
        self._fac: dict | None = None

    def of(self, e: Elem | int) -> tuple[int, int]:
        r = self.rr.reduce(e)
        return (r.x, r.y)

    def lift(self, a: tuple[int, int]) -> Elem:
        return self.q.ring(*a)

    def index(self, a: tuple[int, int]) -> int:
        return a[0] + self.n1 * a[1]

    def mul(self, a, b):
        if self.n2 == 1:
            return (a[0] * b[0] % self.n1, 0)
        yy = a[1] * b[1]
        X = a[0] * b[0] + self.k * yy
        Y = a[0] * b[1] + a[1] * b[0] + self.half * yy
        t = Y // self.n2
        return ((X - t * self.b) % self.n1, Y - t * self.n2)

    def pow(self, a, e: int):
        if e < 0:
            a, e = self.inv(a), -e
        if self.n2 == 1:
            return (int(gmpy2.powmod(a[0], e, self.n1)), 0)
        r = self.one
        while e:
            if e & 1:
                r = self.mul(r, a)
            e >>= 1
            if e:
                a = self.mul(a, a)
        return r

    def inv(self, a):
        if a == (0, 0):
            raise ZeroDivisionError("zero in residue field")
        return self.pow(a, self.size - 2)

    def order(self, a) -> int:
        """Multiplicative order of a non-zero a."""
        n = self.size - 1
        if self._fac is None:
            self._fac = factorint(n)
        for ell, e in self._fac.items():
            for _ in range(e):
                if self.pow(a, n // ell) != self.one:
                    break
                n //= ell
        return n

    def element(self, i: int):
        return (i % self.n1, i // self.n1)

    def candidates(self):
        """Non-zero residues in the search order of iter_by_norm, starting at 2."""
        seen = set()
        for e in iter_by_norm(self.q.ring, 2):
            a = self.of(e)
            if a != (0, 0) and a not in seen:
                seen.add(a)
                yield a

    def non_residue(self, ell: int):
        """First candidate that is not an ell-th power."""
        if ell not in self._gen_cache:
            e = (self.size - 1) // ell
            for z in self.candidates():
                if self.pow(z, e) != self.one:
                    self._gen_cache[ell] = z
                    break
        return self._gen_cache[ell]

    def unit_roots(self, m: int) -> list:
        """The m-th roots of unity (m divides size - 1)."""
        if m == 1:
            return [self.one]
        if -m in self._gen_cache:
            return self._gen_cache[-m]
        zeta = None
        for z in self.candidates():
            c = self.pow(z, (self.size - 1) // m)
            if all(self.pow(c, m // ell) != self.one for ell in factorint(m)):
                zeta = c
                break
        out, c = [], self.one
        for _ in range(m):
            out.append(c)
            c = self.mul(c, zeta)
        self._gen_cache[-m] = out  # negative keys hold root lists, positive ones non-residues
        return out

    def prime_root(self, s, ell: int):
        """One ell-th root of s (ell prime, s an ell-th power, s != 0)."""
        F1 = self.size - 1
        if F1 % ell:
            # x -> x^ell is a bijection
            return self.pow(s, pow(ell, -1, F1))
        e, t = 0, F1
        while t % ell == 0:
            e, t = e + 1, t // ell
        g = self.pow(self.non_residue(ell), t)  # generates the ell-Sylow subgroup
        u = pow(ell, -1, t) if t > 1 else 0
        x = self.pow(s, u)
        # x^ell / s lies in the Sylow subgroup; cancel it with a power of g
        err = self.mul(self.pow(x, ell), self.inv(s))
        k = self._sylow_log(self.inv(err), g, ell, e)
        if k % ell:
            raise NotResidue("not an ell-th power")
        return self.mul(x, self.pow(g, k // ell))

    def _sylow_log(self, h, g, ell: int, e: int) -> int:
        """k with g^k = h, g of order ell^e (Pohlig-Hellman on one prime)."""
        top = self.pow(g, ell ** (e - 1))  # order ell
        table = {}
        c = self.one
        for j in range(ell):
            table[c] = j
            c = self.mul(c, top)
        k = 0
        ginv = self.inv(g)
        for i in range(e):
            probe = self.pow(self.mul(h, self.pow(ginv, k)), ell ** (e - 1 - i))
            j = table.get(probe)
            if j is None:
                raise NotResidue("element outside the Sylow subgroup")
            k += j * ell**i
        return k


@lru_cache(maxsize=128)
def residue_field(q: Elem) -> ResidueField:
    # fields are immutable apart from their root caches, so sharing them is safe
    return ResidueField(q)


def _field_and_check(s: Elem, q: Elem, m: int) -> tuple[ResidueField, tuple]:
    if isinstance(s, int):
        s = q.ring(s)
    K = residue_field(q)
    if (K.size - 1) % m:
        raise BadModulus(f"{m} does not divide |O/q| - 1 = {K.size - 1}")
    sv = K.of(s)
    if sv == (0, 0):
        raise NotResidue(f"{s} is zero modulo {q}")
    return K, sv


def mth_power_residue(s: Elem | int, q: Elem, m: int) -> bool:
    K, sv = _field_and_check(s, q, m)
    return K.pow(sv, (K.size - 1) // m) == K.one


def mth_root_mod(s: Elem | int, q: Elem, m: int, brute_max: int = BRUTE_MAX) -> Elem:
    """The m-th root of s modulo the prime q with the least canonical index."""
    if isinstance(s, int):
        s = q.ring(s)
    K = residue_field(q)
    sv = K.of(s)
    if sv == (0, 0):
        raise NotResidue(f"{s} is zero modulo {q}")
    if K.size <= brute_max:
        i = kernels.first_root(K.n1, K.b, K.n2, K.half, K.k, sv[0], sv[1], m)
        if i < 0:
            raise NotResidue(f"{s} is not an {m}-th power modulo {q}")
        r = K.element(i)
    else:
        r = _algebraic_root(K, sv, m)
        ms = gcd(m, K.size - 1)
        r = min((K.mul(r, z) for z in K.unit_roots(ms)), key=K.index)
    if K.pow(r, m) != sv:
        raise NotResidue(f"root check failed for {s} modulo {q}")
    return K.lift(r)


def _algebraic_root(K: ResidueField, sv, m: int):
    F1 = K.size - 1
    if K.pow(sv, F1 // gcd(m, F1)) != K.one:
        raise NotResidue("not an m-th power")
    ells = []
    for ell, a in sorted(factorint(m).items()):
        ells += [ell] * a
    return _root_chain(K, sv, ells)


def _root_chain(K: ResidueField, sv, ells: list[int]):
    if not ells:
        return sv
    ell, rest = ells[0], ells[1:]
    r = K.prime_root(sv, ell)
    if not rest:
        return r
    m_rest = 1
    for x in rest:
        m_rest *= x
    F1 = K.size - 1
    cands = K.unit_roots(gcd(ell, F1))
    for z in cands:
        c = K.mul(r, z)
        if K.pow(c, F1 // gcd(m_rest, F1)) == K.one:
            return _root_chain(K, c, rest)
    raise NotResidue("no branch of the root is a further power")


# -- tame symbols ----------------------------------------------------------


def valuation(a: Elem, q: Elem) -> tuple[int, Elem]:
    v = 0
    while True:
        try:
            nxt = div_exact(a, q)
        except NotDivisible:
            return v, a
        a, v = nxt, v + 1


def hilbert_odd(alpha: Elem, beta: Elem, q: Elem) -> int:
    """Hilbert symbol at the odd prime q via the tame symbol."""
    K = residue_field(q)
    if K.kind.char == 2:
        raise EvenPlace(f"{q} lies over 2")
    if not alpha or not beta:
        raise ValueError("symbol arguments must be non-zero")
    a, a0 = valuation(alpha, q)
    b, b0 = valuation(beta, q)
    t = K.mul(K.pow(K.of(a0), b), K.pow(K.inv(K.of(b0)), a))
    if (a * b) % 2:
        t = K.mul(t, K.of(-1))
    leg = K.pow(t, (K.size - 1) // 2)
    return 1 if leg == K.one else -1
