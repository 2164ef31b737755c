"""Factor families, certificates, their JSON form and the verifier.

Registry:
    E12(r)      [[1, r], [0, 1]]
    E21(r)      [[1, 0], [r, 1]]
    ZWORD(A)    a fixed integer matrix of determinant 1
    MAGIC(z)    five-parameter family built from W(x) = N M N J, conjugated
                by diag(z5, 1)

Every family hits the identity at some parameter, and an inverse flag
turns a factor into its adjugate.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .errors import MagicNotIntegral, NotDivisible
from .ring import Elem, QuadRing, div_exact, ring
from .sl2 import Matrix2, e12, e21, product

FAMILIES = ("E12", "E21", "ZWORD", "MAGIC")
PARAM_COUNT = {"E12": 1, "E21": 1, "MAGIC": 5}

J = ((0, -1), (1, 0))
J_INV = ((0, 1), (-1, 0))
MINUS_I = ((-1, 0), (0, -1))
ID_Z = ((1, 0), (0, 1))


def _zadj(m):
    (a, b), (c, d) = m
    return ((d, -b), (-c, a))


class MalformedCertificate(ValueError):
    pass


@dataclass(frozen=True)
class Factor:
    family: str
    params: tuple = ()
    matrix: Optional[tuple] = None  # ZWORD only: ((a, b), (c, d)) integers
    inverse: bool = False
    origin: Optional[str] = None

    def inv(self) -> "Factor":
        if self.family in ("E12", "E21"):
            return Factor(self.family, (-self.params[0],), inverse=self.inverse, origin=self.origin)
        if self.family == "ZWORD":
            return Factor("ZWORD", matrix=_zadj(self.matrix), inverse=self.inverse, origin=self.origin)
        return Factor(self.family, self.params, inverse=not self.inverse, origin=self.origin)

    def tagged(self, origin: str | None) -> "Factor":
        return Factor(self.family, self.params, self.matrix, self.inverse, origin)


def E12(r: Elem, origin: str | None = None) -> Factor:
    return Factor("E12", (r,), origin=origin)


def E21(r: Elem, origin: str | None = None) -> Factor:
    return Factor("E21", (r,), origin=origin)


def ZWORD(m, origin: str | None = None) -> Factor:
    (a, b), (c, d) = m
    return Factor("ZWORD", matrix=((int(a), int(b)), (int(c), int(d))), origin=origin)


def MAGIC(z: Sequence[Elem], inverse: bool = False, origin: str | None = None) -> Factor:
    return Factor("MAGIC", tuple(z), inverse=inverse, origin=origin)


# -- evaluation ------------------------------------------------------------


def _mn_block(R: QuadRing, p: Elem, q: Elem) -> Matrix2:
    # I + [[-pq, p^2], [-q^2, pq]]; determinant one since the update has rank one
    pq = p * q
    return Matrix2(1 - pq, p * p, -(q * q), 1 + pq)


def wfam(x1: Elem, x2: Elem, x3: Elem, x4: Elem) -> Matrix2:
    """W(x) = N M N J with M built from (x1, x3) and N from (x2, x4)."""
    R = x1.ring
    M = _mn_block(R, x1, x3)
    N = _mn_block(R, x2, x4)
    return N * M * N * Matrix2.from_ints(R, J)


def wfam_check(x1: Elem, x2: Elem, x3: Elem, x4: Elem) -> Matrix2:
    W = wfam(x1, x2, x3, x4)
    A = Matrix2(x1, x2, x3, x4)
    if A.det() == 1:
        assert W == A * A.transpose(), "W(entries of A) != A A^T"
    return W


def magic_matrix(z: Sequence[Elem]) -> Matrix2:
    z1, z2, z3, z4, z5 = z
    W = wfam(1 + z5 * z1, z5 * z2, z5 * z3, 1 + z5 * z4)
    if not z5:
        return W
    try:
        c = div_exact(W.c, z5)
    except NotDivisible:
        raise MagicNotIntegral(f"z5={z5} does not divide {W.c}") from None
    return Matrix2(W.a, W.b * z5, c, W.d)


def eval_factor(f: Factor, R: QuadRing) -> Matrix2:
    if f.family == "E12":
        M = e12(R, f.params[0])
    elif f.family == "E21":
        M = e21(R, f.params[0])
    elif f.family == "ZWORD":
        M = Matrix2.from_ints(R, f.matrix)
    elif f.family == "MAGIC":
        M = magic_matrix(f.params)
    else:
        raise ValueError(f"unknown family {f.family!r}")
    return M.inv() if f.inverse else M


@dataclass
class Certificate:
    ring: QuadRing
    target: Matrix2
    factors: list = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.factors)


def eval_word(factors: Sequence[Factor], R: QuadRing) -> Matrix2:
    return product((eval_factor(f, R) for f in factors), R)


def eval_certificate(c: Certificate) -> Matrix2:
    return eval_word(c.factors, c.ring)


@dataclass
class VerifyResult:
    ok: bool
    mismatches: list = field(default_factory=list)  # 1-based (row, col) of differing entries
    problems: list = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.ok

    def report(self) -> str:
        if self.ok:
            return "ok"
        lines = [f"entry ({i},{j}) differs" for i, j in self.mismatches]
        return "\n".join(lines + self.problems)


def _factor_problem(f: Factor, R: QuadRing) -> str | None:
    if f.family not in FAMILIES:
        return f"unknown family {f.family!r}"
    if f.family == "ZWORD":
        if f.matrix is None or f.params:
            return "ZWORD needs an explicit matrix and no params"
        (a, b), (c, d) = f.matrix
        if not all(isinstance(v, int) for v in (a, b, c, d)):
            return "ZWORD entries must be rational integers"
        if a * d - b * c != 1:
            return f"ZWORD matrix {f.matrix} has determinant {a * d - b * c}"
        return None
    if f.matrix is not None or len(f.params) != PARAM_COUNT[f.family]:
        return f"{f.family} takes {PARAM_COUNT[f.family]} ring parameters"
    if any(not isinstance(p, Elem) or p.ring.d != R.d for p in f.params):
        return f"{f.family} parameter outside O_{R.d}"
    return None


def verify_certificate(c: Certificate) -> VerifyResult:
    problems = []
    R = c.ring
    acc = Matrix2.identity(R)
    for i, f in enumerate(c.factors):
        msg = _factor_problem(f, R)
        if msg is None:
            try:
                M = eval_factor(f, R)
            except MagicNotIntegral as exc:
                msg = str(exc)
            else:
                if M.det() != 1:
                    msg = "determinant is not 1"
        if msg is not None:
            problems.append(f"factor {i}: {msg}")
            continue
        acc = acc * M
    if problems:
        return VerifyResult(False, [], problems)
    got, want = acc.entries(), c.target.entries()
    cells = [(1, 1), (1, 2), (2, 1), (2, 2)]
    mism = [cells[k] for k in range(4) if got[k] != want[k]]
    return VerifyResult(not mism, mism, [])


# -- word simplification -----------------------------------------------------


def _plain(f: Factor) -> Factor:
    """Drop inverse flags where the family has a direct inverse."""
    if not f.inverse or f.family == "MAGIC":
        return f
    if f.family == "ZWORD":
        return Factor("ZWORD", matrix=_zadj(f.matrix), origin=f.origin)
    return Factor(f.family, (-f.params[0],), origin=f.origin)


def _is_identity(f: Factor) -> bool:
    if f.family in ("E12", "E21"):
        return not f.params[0]
    if f.family == "ZWORD":
        return f.matrix == ID_Z
    return not f.params[4]


def _zmul(A, B):
    (a, b), (c, d) = A
    (e, f), (g, h) = B
    return ((a * e + b * g, a * f + b * h), (c * e + d * g, c * f + d * h))


def simplify_word(factors: Sequence[Factor]) -> list[Factor]:
    """Shorter word with the same product.

    Adjacent shifts of one kind and adjacent integer words are merged,
    identities dropped, and -I factors (central) cancelled in pairs; an odd
    one left over is folded into some integer word or appended.
    """
    word = [_plain(f) for f in factors]
    while True:
        negs = sum(1 for f in word if f.family == "ZWORD" and f.matrix == MINUS_I)
        out: list[Factor] = []
        for f in word:
            if f.family == "ZWORD" and f.matrix == MINUS_I:
                continue
            if _is_identity(f):
                continue
            if out and out[-1].family == f.family and f.family in ("E12", "E21", "ZWORD"):
                g = out.pop()
                if f.family == "ZWORD":
                    merged = Factor("ZWORD", matrix=_zmul(g.matrix, f.matrix), origin=g.origin)
                else:
                    merged = Factor(f.family, (g.params[0] + f.params[0],), origin=g.origin)
                if not _is_identity(merged):
                    out.append(merged)
                continue
            out.append(f)
        if negs % 2:
            for k, f in enumerate(out):
                if f.family == "ZWORD":
                    (a, b), (c, d) = f.matrix
                    out[k] = Factor("ZWORD", matrix=((-a, -b), (-c, -d)), origin=f.origin)
                    break
            else:
                out.append(ZWORD(MINUS_I, origin="sign"))
        changed = out != word
        word = out
        if not changed:
            return word


# -- JSON ------------------------------------------------------------------


def _elem_json(e: Elem) -> list[str]:
    return [str(e.x), str(e.y)]


def _int(v) -> int:
    if isinstance(v, bool) or not isinstance(v, (str, int)):
        raise MalformedCertificate(f"expected a decimal integer, got {v!r}")
    try:
        return int(v)
    except ValueError:
        raise MalformedCertificate(f"expected a decimal integer, got {v!r}") from None


def _elem_from(R: QuadRing, v) -> Elem:
    if not isinstance(v, list) or len(v) != 2:
        raise MalformedCertificate(f"expected [x, y], got {v!r}")
    return R(_int(v[0]), _int(v[1]))


def matrix_to_json(M: Matrix2) -> list:
    return [[_elem_json(M.a), _elem_json(M.b)], [_elem_json(M.c), _elem_json(M.d)]]


def matrix_from_json(R: QuadRing, obj) -> Matrix2:
    if not isinstance(obj, list) or len(obj) != 2 or any(not isinstance(r, list) or len(r) != 2 for r in obj):
        raise MalformedCertificate("matrix must be a 2x2 nested list")
    return Matrix2(*(_elem_from(R, obj[i][j]) for i in range(2) for j in range(2)))


def factor_to_json(f: Factor) -> dict:
    out: dict = {"family": f.family}
    if f.family == "ZWORD":
        out["matrix"] = [[str(v) for v in row] for row in f.matrix]
    else:
        out["params"] = [_elem_json(p) for p in f.params]
    if f.inverse:
        out["inverse"] = True
    if f.origin:
        out["origin"] = f.origin
    return out


def factor_from_json(R: QuadRing, obj) -> Factor:
    if not isinstance(obj, dict) or "family" not in obj:
        raise MalformedCertificate(f"bad factor {obj!r}")
    fam = obj["family"]
    inverse = obj.get("inverse", False)
    if not isinstance(inverse, bool):
        raise MalformedCertificate("inverse must be a boolean")
    origin = obj.get("origin")
    if fam == "ZWORD":
        m = obj.get("matrix")
        if not isinstance(m, list) or len(m) != 2 or any(not isinstance(r, list) or len(r) != 2 for r in m):
            raise MalformedCertificate("ZWORD needs a 2x2 integer matrix")
        return Factor("ZWORD", matrix=tuple(tuple(_int(v) for v in row) for row in m), inverse=inverse, origin=origin)
    params = obj.get("params")
    if not isinstance(params, list):
        raise MalformedCertificate(f"{fam} needs params")
    return Factor(str(fam), tuple(_elem_from(R, p) for p in params), inverse=inverse, origin=origin)


def certificate_to_json(c: Certificate) -> str:
    obj = {
        "ring": {"d": c.ring.d},
        "target": matrix_to_json(c.target),
        "factors": [factor_to_json(f) for f in c.factors],
    }
    return json.dumps(obj, separators=(",", ":")) + "\n"


def certificate_from_json(text: str) -> Certificate:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedCertificate(f"invalid JSON: {exc}") from None
    if not isinstance(obj, dict) or not {"ring", "target", "factors"} <= obj.keys():
        raise MalformedCertificate("certificate needs ring, target and factors")
    try:
        R = ring(_int(obj["ring"]["d"]))
    except (TypeError, KeyError, ValueError) as exc:
        raise MalformedCertificate(f"bad ring: {exc}") from None
    if not isinstance(obj["factors"], list):
        raise MalformedCertificate("factors must be a list")
    return Certificate(R, matrix_from_json(R, obj["target"]), [factor_from_json(R, f) for f in obj["factors"]])
