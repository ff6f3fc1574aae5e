"""Central numerical tolerances and size limits."""

from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    physics: float = 1e-10        # physical identities, cross-representation agreement
    linalg: float = 1e-12         # trace, Hermiticity, normalization
    eigenvalue_floor: float = -1e-10
    alpha_degenerate: float = 1e-12
    alpha_radicand: float = -1e-10
    violation: float = 1e-9       # margin above which a bound counts as violated
    sector_leakage: float = 1e-10


TOL = Tolerances()

DEFAULT_DENSE_CAP = 12
MAX_SYMMETRIC_N = 10_000
MAX_BRUTEFORCE_N = 14
