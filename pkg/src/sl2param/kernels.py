"""Brute-force kernels over small residue rings O_d/(q).

A residue ring is described by the column HNF ``(n1, b, n2)`` of the lattice
qO_d plus the multiplication constants ``half`` (1 for the (1+sqrt d)/2 basis)
and ``k`` (w^2 = half*w + k). Element ``i`` is ``x + y*w`` with
``x = i % n1``, ``y = i // n1``. Coordinates stay below 10**6, so every
intermediate product fits in int64.

The numba versions are used unless ``SL2PARAM_DISABLE_NUMBA`` is set to a
non-empty value other than ``0`` (or numba is missing); the numpy versions
vectorize over all ring elements at once.
"""

from __future__ import annotations

import os

import numpy as np

_flag = os.environ.get("SL2PARAM_DISABLE_NUMBA", "")
try:
    if _flag not in ("", "0"):
        raise ImportError
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised via the env flag
    numba = None
    HAVE_NUMBA = False


# -- numba path ------------------------------------------------------------

if HAVE_NUMBA:

    @numba.njit(cache=True, nogil=True)
    def _mul_j(x1, y1, x2, y2, n1, b, n2, half, k):
        yy = y1 * y2
        X = x1 * x2 + k * yy
        Y = x1 * y2 + x2 * y1 + half * yy
        q = Y // n2
        X = (X - q * b) % n1
        return X, Y - q * n2

    @numba.njit(cache=True, nogil=True)
    def _pow_j(x, y, e, n1, b, n2, half, k):
        rx, ry = 1 % n1, 0
        while e > 0:
            if e & 1:
                rx, ry = _mul_j(rx, ry, x, y, n1, b, n2, half, k)
            e >>= 1
            if e > 0:
                x, y = _mul_j(x, y, x, y, n1, b, n2, half, k)
        return rx, ry

    @numba.njit(cache=True, nogil=True)
    def _unit_exponent_nb(n1, b, n2, half, k, order, primes, exps):
        size = n1 * n2
        nprime = primes.shape[0]
        best = np.zeros(nprime, dtype=np.int64)
        one_x = 1 % n1
        for i in range(size):
            x = i % n1
            y = i // n1
            gx, gy = _pow_j(x, y, order, n1, b, n2, half, k)
            if gx != one_x or gy != 0:
                continue
            for t in range(nprime):
                ell = primes[t]
                cof = order
                for _ in range(exps[t]):
                    cof //= ell
                hx, hy = _pow_j(x, y, cof, n1, b, n2, half, k)
                j = 0
                while hx != one_x or hy != 0:
                    hx, hy = _pow_j(hx, hy, ell, n1, b, n2, half, k)
                    j += 1
                if j > best[t]:
                    best[t] = j
        result = 1
        for t in range(nprime):
            for _ in range(best[t]):
                result *= primes[t]
        return result

    @numba.njit(cache=True, nogil=True)
    def _first_root_nb(n1, b, n2, half, k, sx, sy, m):
        size = n1 * n2
        for i in range(size):
            x = i % n1
            y = i // n1
            px, py = _pow_j(x, y, m, n1, b, n2, half, k)
            if px == sx and py == sy:
                return i
        return -1


# -- numpy path --------------------------------------------------------------


def _mul_np(X1, Y1, X2, Y2, n1, b, n2, half, k):
    YY = Y1 * Y2
    X = X1 * X2 + k * YY
    Y = X1 * Y2 + X2 * Y1 + half * YY
    q = Y // n2
    return (X - q * b) % n1, Y - q * n2


def _pow_np(X, Y, e, n1, b, n2, half, k):
    RX = np.full_like(X, 1 % n1)
    RY = np.zeros_like(Y)
    while e > 0:
        if e & 1:
            RX, RY = _mul_np(RX, RY, X, Y, n1, b, n2, half, k)
        e >>= 1
        if e > 0:
            X, Y = _mul_np(X, Y, X, Y, n1, b, n2, half, k)
    return RX, RY


def _all_elements(n1, n2):
    idx = np.arange(n1 * n2, dtype=np.int64)
    return idx % n1, idx // n1


def unit_exponent_numpy(n1, b, n2, half, k, order, primes, exps):
    X, Y = _all_elements(n1, n2)
    one_x = 1 % n1
    GX, GY = _pow_np(X, Y, order, n1, b, n2, half, k)
    units = (GX == one_x) & (GY == 0)
    X, Y = X[units], Y[units]
    result = 1
    for ell, a in zip(primes, exps):
        ell, a = int(ell), int(a)
        HX, HY = _pow_np(X, Y, order // ell**a, n1, b, n2, half, k)
        j = 0
        while True:
            pending = (HX != one_x) | (HY != 0)
            if not pending.any():
                break
            HX, HY = _pow_np(HX, HY, ell, n1, b, n2, half, k)
            j += 1
        result *= ell**j
    return result


def first_root_numpy(n1, b, n2, half, k, sx, sy, m):
    X, Y = _all_elements(n1, n2)
    PX, PY = _pow_np(X, Y, m, n1, b, n2, half, k)
    hits = np.flatnonzero((PX == sx) & (PY == sy))
    return int(hits[0]) if hits.size else -1


if HAVE_NUMBA:
    unit_exponent_numba = _unit_exponent_nb
    first_root_numba = _first_root_nb
else:  # pragma: no cover
    unit_exponent_numba = None
    first_root_numba = None


def unit_exponent(n1, b, n2, half, k, order, factored):
    """Exponent of the unit group of a residue ring of known unit count.

    ``factored`` is a list of ``(prime, exponent)`` pairs for ``order``.
    """
    primes = np.array([p for p, _ in factored], dtype=np.int64)
    exps = np.array([e for _, e in factored], dtype=np.int64)
    args = (np.int64(n1), np.int64(b), np.int64(n2), np.int64(half), np.int64(k), np.int64(order))
    if HAVE_NUMBA:
        return int(_unit_exponent_nb(*args, primes, exps))
    return int(unit_exponent_numpy(*args, primes, exps))


def first_root(n1, b, n2, half, k, sx, sy, m):
    """Index of the first element (canonical order) whose m-th power is (sx, sy)."""
    args = tuple(np.int64(v) for v in (n1, b, n2, half, k, sx, sy, m))
    if HAVE_NUMBA:
        return int(_first_root_nb(*args))
    return first_root_numpy(*args)
