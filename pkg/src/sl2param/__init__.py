"""Exact SL2 factorization certificates over imaginary quadratic integers.

Factor a det-1 matrix over O_d into a bounded word of polynomial matrix
families and check the resulting certificate by exact multiplication::

    >>> from sl2param import ring, Matrix2, factorize_matrix, verify_certificate
    >>> R = ring(-19)
    >>> M = Matrix2.from_ints(R, ((2, 3), (3, 5)))
    >>> verify_certificate(factorize_matrix(M)).ok
    True
"""

from .errors import SL2ParamError, SearchExhausted, VerificationFailed
from .families import Certificate, Factor, certificate_from_json, certificate_to_json, verify_certificate
from .reduce import PipelineConfig, RunStats, factorize_matrix, factorize_row
from .ring import CLASS_NUMBER_ONE, Elem, QuadRing, ring
from .sl2 import Matrix2

__all__ = [
    "CLASS_NUMBER_ONE",
    "Certificate",
    "Elem",
    "Factor",
    "Matrix2",
    "PipelineConfig",
    "QuadRing",
    "RunStats",
    "SL2ParamError",
    "SearchExhausted",
    "VerificationFailed",
    "certificate_from_json",
    "certificate_to_json",
    "factorize_matrix",
    "factorize_row",
    "ring",
    "verify_certificate",
]

__version__ = "0.1.0"
