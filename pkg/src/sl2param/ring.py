"""Exact arithmetic in the ring of integers O_d of Q(sqrt(d)), d < 0.

Elements are stored as integer coordinates ``x + y*w`` in the integral basis
``(1, w)`` with ``w = (1 + sqrt(d))/2`` when ``d = 1 mod 4`` and ``w = sqrt(d)``
otherwise. All operations are exact; nothing here touches floating point.
"""

from __future__ import annotations

from functools import lru_cache
from math import isqrt
from typing import Iterator, Union

from gmpy2 import gcdext

from .errors import NonPrincipal, NotCoprime, NotDivisible, NotInvertible
from .intlinalg import lattice_hnf, solve_integer

CLASS_NUMBER_ONE = (-1, -2, -3, -7, -11, -19, -43, -67, -163)


def _squarefree(n: int) -> bool:
    n = abs(n)
    p = 2
    while p * p <= n:
        if n % (p * p) == 0:
            return False
        p += 1
    return True


class QuadRing:
    """The ring O_d. Use :func:`ring` to get the shared instance for ``d``."""

    __slots__ = ("d", "half", "disc", "k", "_units", "__weakref__")

    def __init__(self, d: int) -> None:
        if d >= 0 or not _squarefree(d):
            raise ValueError(f"d must be a squarefree negative integer, got {d}")
        self.d = d
        self.half = d % 4 == 1
        self.disc = d if self.half else 4 * d
        # w^2 = w + k (half basis) or w^2 = k (otherwise)
        self.k = (d - 1) // 4 if self.half else d
        self._units: tuple[Elem, ...] | None = None

    def __repr__(self) -> str:
        return f"QuadRing({self.d})"

    def __eq__(self, other: object) -> bool:
        return isinstance(other, QuadRing) and other.d == self.d

    def __hash__(self) -> int:
        return hash(("QuadRing", self.d))

    def __reduce__(self):
        return (ring, (self.d,))

    def __call__(self, x: int = 0, y: int = 0) -> "Elem":
        return Elem(self, int(x), int(y))

    @property
    def zero(self) -> "Elem":
        return Elem(self, 0, 0)

    @property
    def one(self) -> "Elem":
        return Elem(self, 1, 0)

    @property
    def omega(self) -> "Elem":
        return Elem(self, 0, 1)

    @property
    def m(self) -> int:
        return len(self.units())

    def norm_form(self, x: int, y: int) -> int:
        if self.half:
            return x * x + x * y - self.k * y * y
        return x * x - self.k * y * y

    def units(self) -> tuple["Elem", ...]:
        """All elements of norm 1: 1 and -1 first, the rest in (x, y) order."""
        if self._units is None:
            found = [
                Elem(self, x, y)
                for x in range(-2, 3)
                for y in range(-2, 3)
                if self.norm_form(x, y) == 1
            ]
            found.sort(key=lambda e: (e.y != 0, -e.x, -e.y))
            self._units = tuple(found)
        return self._units


@lru_cache(maxsize=None)
def ring(d: int) -> QuadRing:
    return QuadRing(d)


Scalar = Union[int, "Elem"]


class Elem:
    __slots__ = ("ring", "x", "y")

    def __init__(self, R: QuadRing, x: int, y: int) -> None:
        self.ring = R
        self.x = x
        self.y = y

    # -- conversions -----------------------------------------------------
    def _lift(self, other: Scalar) -> "Elem":
        if isinstance(other, Elem):
            if other.ring.d != self.ring.d:
                raise ValueError("operands belong to different rings")
            return other
        if isinstance(other, int):
            return Elem(self.ring, other, 0)
        return NotImplemented

    def __repr__(self) -> str:
        return f"Elem(d={self.ring.d}, {self.x}, {self.y})"

    def __str__(self) -> str:
        if self.y == 0:
            return str(self.x)
        sym = "w" if self.ring.half else "r"
        yv = "" if self.y == 1 else "-" if self.y == -1 else str(self.y)
        if self.x == 0:
            return f"{yv}{sym}"
        return f"{self.x}{'+' if self.y > 0 else ''}{yv}{sym}"

    def __eq__(self, other: object) -> bool:
        if isinstance(other, Elem):
            return self.x == other.x and self.y == other.y and self.ring.d == other.ring.d
        if isinstance(other, int):
            return self.y == 0 and self.x == other
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.ring.d, self.x, self.y))

    def __bool__(self) -> bool:
        return bool(self.x or self.y)

    # -- ring operations -------------------------------------------------
    def __add__(self, other: Scalar) -> "Elem":
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return Elem(self.ring, self.x + o.x, self.y + o.y)

    __radd__ = __add__

    def __sub__(self, other: Scalar) -> "Elem":
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return Elem(self.ring, self.x - o.x, self.y - o.y)

    def __rsub__(self, other: Scalar) -> "Elem":
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return Elem(self.ring, o.x - self.x, o.y - self.y)

    def __neg__(self) -> "Elem":
        return Elem(self.ring, -self.x, -self.y)

    def __mul__(self, other: Scalar) -> "Elem":
        if isinstance(other, int):
            return Elem(self.ring, self.x * other, self.y * other)
        o = self._lift(other)
        if o is NotImplemented:
            return o
        R = self.ring
        x1, y1, x2, y2 = self.x, self.y, o.x, o.y
        yy = y1 * y2
        if R.half:
            return Elem(R, x1 * x2 + R.k * yy, x1 * y2 + x2 * y1 + yy)
        return Elem(R, x1 * x2 + R.k * yy, x1 * y2 + x2 * y1)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "Elem":
        if n < 0:
            raise ValueError("negative exponent")
        result = self.ring.one
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def conj(self) -> "Elem":
        if self.ring.half:
            return Elem(self.ring, self.x + self.y, -self.y)
        return Elem(self.ring, self.x, -self.y)

    def norm(self) -> int:
        return self.ring.norm_form(self.x, self.y)

    def trace(self) -> int:
        return 2 * self.x + self.y if self.ring.half else 2 * self.x

    def is_unit(self) -> bool:
        return self.norm() == 1

    def is_rational(self) -> bool:
        return self.y == 0

    def coords(self) -> tuple[int, int]:
        return (self.x, self.y)

    def divides(self, other: Scalar) -> bool:
        try:
            div_exact(self._lift(other), self)
        except NotDivisible:
            return False
        return True

    def unit_inverse(self) -> "Elem":
        if not self.is_unit():
            raise NotInvertible(f"{self} is not a unit")
        return self.conj()


def elem_arith(a: Elem, b: Elem | None, op: str) -> Elem:
    """Dispatch form of the basic operations (add, sub, mul, neg, conj)."""
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "neg":
        return -a
    if op == "conj":
        return a.conj()
    raise ValueError(f"unknown op {op!r}")


def norm_trace(e: Elem) -> tuple[int, int]:
    return e.norm(), e.trace()


def div_exact(a: Scalar, b: Scalar) -> Elem:
    """Return ``c`` with ``b * c == a``; raises ``NotDivisible`` otherwise."""
    if isinstance(a, int):
        a = b.ring(a)
    if isinstance(b, int):
        b = a.ring(b)
    n = b.norm()
    if n == 0:
        raise ZeroDivisionError("division by zero element")
    num = a * b.conj()
    qx, rx = divmod(num.x, n)
    qy, ry = divmod(num.y, n)
    if rx or ry:
        raise NotDivisible(f"{b} does not divide {a}")
    return Elem(a.ring, qx, qy)


def units(R: QuadRing) -> tuple[Elem, ...]:
    return R.units()


# -- lattices ------------------------------------------------------------


def _ideal_vectors(gens: list[Elem]) -> list[tuple[int, int]]:
    vecs = []
    for g in gens:
        if g:
            vecs.append(g.coords())
            vecs.append((g * g.ring.omega).coords())
    return vecs


def _round_div(num: int, den: int) -> int:
    """Nearest integer to num/den (den > 0), halves rounded up."""
    return (2 * num + den) // (2 * den)


def _bilinear2(R: QuadRing, v: tuple[int, int], w: tuple[int, int]) -> int:
    # twice the bilinear form attached to the norm form
    if R.half:
        return 2 * v[0] * w[0] + v[0] * w[1] + v[1] * w[0] - 2 * R.k * v[1] * w[1]
    return 2 * v[0] * w[0] - 2 * R.k * v[1] * w[1]


def gauss_reduce(R: QuadRing, v, w):
    """Lagrange-Gauss reduction of a planar basis under the norm form."""
    qv, qw = R.norm_form(*v), R.norm_form(*w)
    if qv > qw:
        v, w, qv, qw = w, v, qw, qv
    while True:
        mu = _round_div(_bilinear2(R, v, w), 2 * qv)
        if mu == 0:
            return v, w
        w = (w[0] - mu * v[0], w[1] - mu * v[1])
        qw = R.norm_form(*w)
        if qw >= qv:
            return v, w
        v, w, qv, qw = w, v, qw, qv


class ResidueRing:
    """The finite ring O_d/(q), with canonical representatives.

    The lattice qO_d is kept in column Hermite normal form with basis
    ``(n1, 0), (b, n2)``; a canonical representative has ``0 <= x < n1`` and
    ``0 <= y < n2``.
    """

    def __init__(self, q: Elem) -> None:
        if not q:
            raise ValueError("modulus must be non-zero")
        self.ring = q.ring
        self.modulus = q
        self.n1, self.b, self.n2 = lattice_hnf(_ideal_vectors([q]))
        self.size = self.n1 * self.n2
        assert self.size == abs(q.norm())
        self._short: tuple | None = None

    def __repr__(self) -> str:
        return f"ResidueRing({self.modulus!s}, basis=[[{self.n1},{self.b}],[0,{self.n2}]])"

    @property
    def basis(self) -> tuple[tuple[int, int], tuple[int, int]]:
        return ((self.n1, self.b), (0, self.n2))

    def reduce(self, e: Scalar) -> Elem:
        if isinstance(e, int):
            e = self.ring(e)
        k = e.y // self.n2
        x = (e.x - k * self.b) % self.n1
        return Elem(self.ring, x, e.y - k * self.n2)

    def index(self, e: Elem) -> int:
        r = self.reduce(e)
        return r.x + self.n1 * r.y

    def from_index(self, i: int) -> Elem:
        return Elem(self.ring, i % self.n1, i // self.n1)

    def elements(self) -> Iterator[Elem]:
        for i in range(self.size):
            yield self.from_index(i)

    def is_zero(self, e: Elem) -> bool:
        return not self.reduce(e)

    def congruent(self, a: Scalar, b: Scalar) -> bool:
        return self.is_zero(self.ring(0) + a - b)

    def reduce_small(self, e: Scalar) -> Elem:
        """Representative of ``e`` of least norm (ties broken by (x, y))."""
        if isinstance(e, int):
            e = self.ring(e)
        if self._short is None:
            self._short = gauss_reduce(self.ring, (self.n1, 0), (self.b, self.n2))
        v, w = self._short
        det = v[0] * w[1] - v[1] * w[0]
        if det < 0:
            w, det = (-w[0], -w[1]), -det
        # coordinates of e in the reduced basis, rounded
        c1 = _round_div(e.x * w[1] - e.y * w[0], det)
        c2 = _round_div(v[0] * e.y - v[1] * e.x, det)
        R = self.ring
        best = None
        for i in (-1, 0, 1):
            for j in (-1, 0, 1):
                a1, a2 = c1 + i, c2 + j
                x = e.x - a1 * v[0] - a2 * w[0]
                y = e.y - a1 * v[1] - a2 * w[1]
                key = (R.norm_form(x, y), x, y)
                if best is None or key < best:
                    best = key
        return Elem(R, best[1], best[2])


def residue_reduce(rr: ResidueRing, e: Scalar) -> Elem:
    return rr.reduce(e)


def _solve_combination(gens: list[Elem], target: Elem) -> list[Elem] | None:
    """Integer solution of sum(g_i * r_i) = target, coordinates via SNF."""
    R = target.ring
    cols = []
    for g in gens:
        cols.append(g.coords())
        cols.append((g * R.omega).coords())
    A = [[c[0] for c in cols], [c[1] for c in cols]]
    z = solve_integer(A, [target.x, target.y])
    if z is None:
        return None
    return [Elem(R, z[2 * i], z[2 * i + 1]) for i in range(len(gens))]


def _norm_combination(a: Elem, b: Elem, tries: int = 32):
    # x N(a + b k) + y N(b) = 1 gives a solution without any lattice work;
    # a handful of small shifts k usually makes the norms coprime
    nb = b.norm()
    g, x, y = gcdext(a.norm(), nb)
    if g == 1:
        return a.conj() * int(x), b.conj() * int(y)
    if ideal_norm([a, b]) != 1:
        raise NotCoprime(f"({a}, {b}) is not the unit ideal")
    for i, k in enumerate(iter_by_norm(a.ring, 1)):
        if i >= tries:
            return None
        ak = a + b * k
        g, x, y = gcdext(ak.norm(), nb)
        if g == 1:
            u = ak.conj() * int(x)
            return u, b.conj() * int(y) + u * k


def bezout(a: Elem, b: Elem) -> tuple[Elem, Elem]:
    """Return ``(u, v)`` with ``a*u + b*v == 1``.

    When ``b`` is non-zero, ``u`` is the least-norm representative of its
    class modulo ``b``, which makes the answer canonical.
    """
    if not a and not b:
        raise NotCoprime("bezout(0, 0)")
    sol = _norm_combination(a, b)
    if sol is None:
        sol = _solve_combination([a, b], a.ring.one)
    if sol is None:
        raise NotCoprime(f"({a}, {b}) is not the unit ideal")
    u, v = sol
    if b:
        u = ResidueRing(b).reduce_small(u)
        v = div_exact(1 - a * u, b)
    assert a * u + b * v == 1
    return u, v


def residue_invert(rr: ResidueRing, e: Scalar) -> Elem:
    if isinstance(e, int):
        e = rr.ring(e)
    try:
        sol = _norm_combination(e, rr.modulus) or _solve_combination([e, rr.modulus], rr.ring.one)
    except NotCoprime:
        sol = None
    if sol is None:
        raise NotInvertible(f"{e} is not invertible modulo {rr.modulus}")
    return rr.reduce(sol[0])


def crt_pair(m1: Elem, r1: Scalar, m2: Elem, r2: Scalar) -> Elem:
    """``x`` with ``x = r1 mod m1`` and ``x = r2 mod m2``, the least-norm one mod m1*m2."""
    u, v = bezout(m1, m2)
    x = r1 * m2 * v + r2 * m1 * u
    if isinstance(x, int):
        x = m1.ring(x)
    return ResidueRing(m1 * m2).reduce_small(x)


def ideal_norm(gens: list[Elem]) -> int:
    n1, _, n2 = lattice_hnf(_ideal_vectors(gens))
    return n1 * n2


def ideal_generator(g1: Elem, g2: Elem) -> Elem:
    """A generator of the ideal (g1, g2), or ``NonPrincipal``.

    The ideal lattice is Gauss-reduced under the norm form; the shortest
    vector generates iff its norm equals the index of the ideal.
    """
    R = g1.ring
    if not g1 and not g2:
        raise ValueError("zero ideal")
    n1, b, n2 = lattice_hnf(_ideal_vectors([g1, g2]))
    v, _ = gauss_reduce(R, (n1, 0), (b, n2))
    g = Elem(R, *v)
    if g.norm() != n1 * n2:
        raise NonPrincipal(f"ideal ({g1}, {g2}) of norm {n1 * n2} is not principal")
    return g


def iter_by_norm(R: QuadRing, start: int = 0) -> Iterator[Elem]:
    """All elements in ascending (norm, x, y) order, beginning at norm ``start``."""
    lo = start
    hi = max(8, 2 * start)
    ad = -R.d
    while True:
        shell = []
        # norm >= |d|/4 * y^2 in either basis
        ymax = isqrt(4 * hi // ad) + 1
        for y in range(-ymax, ymax + 1):
            if R.half:
                # norm = (x + y/2)^2 + |d| y^2 / 4
                rem4 = 4 * hi - ad * y * y
                if rem4 < 0:
                    continue
                s = isqrt(rem4)
                xs = range((-y - s) // 2 - 1, (-y + s) // 2 + 2)
            else:
                rem = hi - ad * y * y
                if rem < 0:
                    continue
                s = isqrt(rem)
                xs = range(-s - 1, s + 2)
            for x in xs:
                n = R.norm_form(x, y)
                if lo <= n < hi:
                    shell.append((n, x, y))
        shell.sort()
        for _, x, y in shell:
            yield Elem(R, x, y)
        lo, hi = hi, 2 * hi
