"""2x2 matrices over O_d and the Chebyshev-type sequences Q_n(t), u_n.

With u_i = Q_i(tr A) every det-1 matrix satisfies A^i = u_i A - u_{i-1} I,
so first rows of huge powers come from two big integers per step of a
fast-doubling ladder.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Iterable

from .errors import DegenerateTrace, NotCoprime, NotDivisible, NotPrimitive, RowMismatch
from .ring import Elem, QuadRing, bezout, div_exact

Q_POLY_CAP = 200


class Matrix2:
    """[[a, b], [c, d]] over one ring; immutable."""

    __slots__ = ("a", "b", "c", "d")

    def __init__(self, a: Elem, b: Elem, c: Elem, d: Elem) -> None:
        R = next(e.ring for e in (a, b, c, d) if isinstance(e, Elem))
        self.a, self.b, self.c, self.d = (e if isinstance(e, Elem) else R(e) for e in (a, b, c, d))

    @classmethod
    def identity(cls, R: QuadRing) -> "Matrix2":
        return cls(R.one, R.zero, R.zero, R.one)

    @classmethod
    def from_ints(cls, R: QuadRing, rows) -> "Matrix2":
        (a, b), (c, d) = rows
        return cls(R(a), R(b), R(c), R(d))

    @property
    def ring(self) -> QuadRing:
        return self.a.ring

    def entries(self) -> tuple[Elem, Elem, Elem, Elem]:
        return (self.a, self.b, self.c, self.d)

    def __repr__(self) -> str:
        return f"[[{self.a}, {self.b}], [{self.c}, {self.d}]]"

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Matrix2) and self.entries() == other.entries()

    def __hash__(self) -> int:
        return hash(self.entries())

    def __mul__(self, o: "Matrix2") -> "Matrix2":
        return Matrix2(
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
        )

    def scale(self, s) -> "Matrix2":
        return Matrix2(self.a * s, self.b * s, self.c * s, self.d * s)

    def __add__(self, o: "Matrix2") -> "Matrix2":
        return Matrix2(self.a + o.a, self.b + o.b, self.c + o.c, self.d + o.d)

    def __sub__(self, o: "Matrix2") -> "Matrix2":
        return Matrix2(self.a - o.a, self.b - o.b, self.c - o.c, self.d - o.d)

    def det(self) -> Elem:
        return self.a * self.d - self.b * self.c

    def trace(self) -> Elem:
        return self.a + self.d

    def adjugate(self) -> "Matrix2":
        return Matrix2(self.d, -self.b, -self.c, self.a)

    def inv(self) -> "Matrix2":
        # only valid for det 1, which is all we ever invert
        return self.adjugate()

    def transpose(self) -> "Matrix2":
        return Matrix2(self.a, self.c, self.b, self.d)

    def __pow__(self, n: int) -> "Matrix2":
        if n < 0:
            return self.inv() ** (-n)
        out = Matrix2.identity(self.ring)
        base = self
        while n:
            if n & 1:
                out = out * base
            n >>= 1
            if n:
                base = base * base
        return out

    def is_identity(self) -> bool:
        return self.a == 1 and self.d == 1 and not self.b and not self.c

    def first_row(self) -> tuple[Elem, Elem]:
        return (self.a, self.b)


def e12(R: QuadRing, r) -> Matrix2:
    return Matrix2(R.one, R(0) + r, R.zero, R.one)


def e21(R: QuadRing, r) -> Matrix2:
    return Matrix2(R.one, R.zero, R(0) + r, R.one)


def product(mats: Iterable[Matrix2], R: QuadRing) -> Matrix2:
    out = Matrix2.identity(R)
    for m in mats:
        out = out * m
    return out


def mat_ops(A: Matrix2, B: Matrix2 | None, op: str, n: int = 0) -> Matrix2:
    if op == "mul":
        return A * B
    if op == "inv":
        return A.inv()
    if op == "pow":
        if n < 0:
            raise ValueError("pow needs n >= 0")
        return A**n
    raise ValueError(f"unknown op {op!r}")


# -- Q-polynomials ---------------------------------------------------------


class IntPoly(tuple):
    """Integer polynomial, coefficients from the constant term up."""

    def __new__(cls, coeffs: Iterable[int] = ()):
        c = list(coeffs)
        while c and c[-1] == 0:
            c.pop()
        return super().__new__(cls, c)

    @property
    def degree(self) -> int:
        return len(self) - 1

    def __add__(self, o):
        n = max(len(self), len(o))
        return IntPoly((self[i] if i < len(self) else 0) + (o[i] if i < len(o) else 0) for i in range(n))

    def __neg__(self):
        return IntPoly(-c for c in self)

    def __sub__(self, o):
        return self + (-o)

    def __mul__(self, o):
        if not self or not o:
            return IntPoly()
        out = [0] * (len(self) + len(o) - 1)
        for i, a in enumerate(self):
            if a:
                for j, b in enumerate(o):
                    out[i + j] += a * b
        return IntPoly(out)

    def shift(self, k: int = 1):
        return IntPoly([0] * k + list(self)) if self else IntPoly()

    def __call__(self, x):
        acc = 0
        for c in reversed(self):
            acc = acc * x + c
        return acc

    def __repr__(self) -> str:
        return f"IntPoly({list(self)})"


@lru_cache(maxsize=None)
def q_poly(n: int, cap: int = Q_POLY_CAP) -> IntPoly:
    if n < -1:
        raise ValueError("Q_n is defined for n >= -1")
    if n > cap:
        raise ValueError(f"n={n} above cap {cap}")
    if n == -1:
        return IntPoly([-1])
    if n == 0:
        return IntPoly()
    return q_poly(n - 1, cap).shift() - q_poly(n - 2, cap)


# -- u-sequences -----------------------------------------------------------


def u_pair(tau, k: int):
    """(u_k, u_{k+1}) for k >= -1."""
    if k == -1:
        return tau * 0 - 1, tau * 0
    if k == 0:
        return tau * 0, tau * 0 + 1
    lo, hi = tau * 0 + 1, tau  # (u_1, u_2)
    for bit in bin(k)[3:]:
        u2j = lo * (hi * 2 - tau * lo)
        u2j1 = hi * hi - lo * lo
        if bit == "1":
            lo, hi = u2j1, tau * u2j1 - u2j
        else:
            lo, hi = u2j, u2j1
    return lo, hi


def u_seq(tau, n: int, with_trace: bool = False):
    """(u_{n-1}, u_n), plus u_{k+1} - u_{k-1} for k = n // 2 when asked."""
    if n < 0:
        raise ValueError("n must be >= 0")
    prev, cur = u_pair(tau, n - 1)
    if not with_trace:
        return prev, cur, None
    k = n // 2
    km1, kk = u_pair(tau, k - 1)
    return prev, cur, tau * kk - km1 * 2


def _check_divides(a, b) -> None:
    if isinstance(a, int) and isinstance(b, int):
        if a == 0:
            raise ZeroDivisionError("zero divisor")
        if b % a:
            raise NotDivisible(f"{a} does not divide {b}")
    else:
        div_exact(b, a)


def vw_split(tau, n: int) -> tuple:
    """u_n = v*w with v | u_{n-1} - 1 and w | u_{n-1} + 1."""
    if n < 2:
        raise ValueError("vw_split needs n >= 2")
    k = n // 2
    uk, uk1 = u_pair(tau, k)
    if n % 2 == 0:
        ukm1 = tau * uk - uk1
        v, w = uk1 - ukm1, uk
    else:
        v, w = uk1 - uk, uk1 + uk
    prev, cur = u_pair(tau, n - 1)
    if not cur:
        raise DegenerateTrace(f"u_{n} vanishes at trace {tau}")
    try:
        if v * w != cur:
            raise DegenerateTrace("v*w != u_n")
        _check_divides(v, prev - 1)
        _check_divides(w, prev + 1)
    except (NotDivisible, ZeroDivisionError) as exc:
        raise DegenerateTrace(f"split check failed at trace {tau}, n={n}") from exc
    return v, w


def power_first_row(alpha: Matrix2, n: int, check_max: int = 64):
    """(a_n, b_n, u_n, u_{n-1}) for the first row (a_n, b_n) of alpha^n."""
    if n < 1:
        raise ValueError("n must be >= 1")
    prev, cur = u_pair(alpha.trace(), n - 1)
    an = alpha.a * cur - prev
    bn = alpha.b * cur
    if n <= check_max:
        P = alpha**n
        assert (P.a, P.b) == (an, bn), "Cayley-Hamilton cross-check failed"
    return an, bn, cur, prev


def power_matrix(alpha: Matrix2, n: int) -> Matrix2:
    """alpha^n = u_n alpha - u_{n-1} I."""
    if n == 0:
        return Matrix2.identity(alpha.ring)
    if n < 0:
        return power_matrix(alpha.inv(), -n)
    prev, cur = u_pair(alpha.trace(), n - 1)
    return Matrix2(alpha.a * cur - prev, alpha.b * cur, alpha.c * cur, alpha.d * cur - prev)


def complete_row(a: Elem, b: Elem) -> Matrix2:
    try:
        u, v = bezout(a, b)
    except NotCoprime as exc:
        raise NotPrimitive(str(exc)) from None
    M = Matrix2(a, b, -v, u)
    assert M.det() == 1
    return M


def row_fixup(M: Matrix2, M2: Matrix2) -> Elem:
    """r with M2 = E21(r) * M."""
    X = M2 * M.inv()
    if not (X.a == 1 and not X.b and X.d == 1):
        raise RowMismatch(f"first rows differ: {M.first_row()} vs {M2.first_row()}")
    return X.c
