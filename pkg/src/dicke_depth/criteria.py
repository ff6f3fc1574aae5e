"""Entanglement-depth criteria built from collective-spin moments.

``xi`` compares the transverse moments ``<Jx^2> + <Jy^2>`` with the Jz
variance. ``chi`` and ``alpha`` summarize the Jz statistics and sharpen the
threshold ``f(m, chi)`` that ``xi`` has to beat before genuine m-qubit
entanglement is certified.
"""

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .config import TOL
from .errors import InputError, NumericalConsistencyError
from .spin_core import MomentSet


@dataclass(frozen=True)
class GroupPartition:
    """Block sizes of one division of N qubits."""

    parts: tuple
    cap: int = None

    def __post_init__(self):
        parts = tuple(int(p) for p in self.parts)
        object.__setattr__(self, "parts", parts)
        if not parts or min(parts) < 1:
            raise InputError("parts must be positive integers")
        if self.cap is not None and max(parts) > self.cap:
            raise InputError(f"part {max(parts)} exceeds cap {self.cap}")

    @property
    def k(self):
        return len(self.parts)

    @property
    def n_qubits(self):
        return sum(self.parts)

    def objective(self, chi):
        """``sum_i m_i (m_i + 2) / 4 - chi / k``."""
        return sum(m * (m + 2) for m in self.parts) / 4 - chi / self.k


def xi(moments):
    """``(<Jx^2> + <Jy^2>) / (N (1/4 + Var Jz)) - 1``."""
    n = moments.n_qubits
    return moments.transverse / (n * (0.25 + moments.jz_variance)) - 1


def alpha(moments):
    """``sqrt((<Jz^4> - <Jz>^4) / (<Jz^4> - <Jz^2>^2))``.

    Returns ``None`` when the Jz^2 fluctuation ``<Jz^4> - <Jz^2>^2`` vanishes
    (below 1e-12); the chi correction it multiplies is then zero anyway.
    """
    denom = moments.jz4 - moments.jz2**2
    if denom < TOL.alpha_degenerate:
        if denom < TOL.alpha_radicand:
            raise NumericalConsistencyError(f"<Jz^4> - <Jz^2>^2 = {denom:.3g} < 0")
        return None
    numer = moments.jz4 - moments.jz_mean**4
    ratio = numer / denom
    if ratio < 0:
        if ratio < TOL.alpha_radicand:
            raise NumericalConsistencyError(f"negative radicand {ratio:.3g} in alpha")
        ratio = 0.0
    return math.sqrt(ratio)


def chi(moments):
    """``<Jz^2> - (<Jz^4> - <Jz^2>^2)(1 + 2 alpha) / (1/4 + Var Jz)``."""
    a = alpha(moments)
    if a is None:
        return moments.jz2
    correction = moments.jz2_variance * (1 + 2 * a) / (0.25 + moments.jz_variance)
    return moments.jz2 - correction


def _check_m(n_qubits, m):
    if n_qubits < 1:
        raise InputError("n_qubits must be positive")
    if not 2 <= m <= n_qubits + 1:
        raise InputError(f"m must lie in 2..N+1, got m={m} for N={n_qubits}")


def extremal_partition(n_qubits, k, cap):
    """Partition of ``n_qubits`` into exactly ``k`` parts of size at most ``cap``
    that maximizes ``sum m_i**2``: fill parts to the cap, put the remainder in a
    single part, leave the rest at 1."""
    if not (k <= n_qubits and k * cap >= n_qubits and k >= 1):
        raise InputError(f"no partition of {n_qubits} into {k} parts with cap {cap}")
    excess = n_qubits - k
    if cap == 1:
        return GroupPartition((1,) * k, cap)
    full, rest = divmod(excess, cap - 1)
    parts = [cap] * full
    if rest:
        parts.append(1 + rest)
    parts += [1] * (k - len(parts))
    return GroupPartition(tuple(parts), cap)


def optimal_partition(n_qubits, m, chi_value):
    """Partition attaining the maximum in ``partition_bound``."""
    _check_m(n_qubits, m)
    cap = min(m - 1, n_qubits)
    best, best_val = None, None
    for k in range(-(-n_qubits // cap), n_qubits + 1):
        part = extremal_partition(n_qubits, k, cap)
        val = part.objective(chi_value)
        if best_val is None or val > best_val:
            best, best_val = part, val
    return best, best_val


def _extremal_objectives(n_qubits, cap, chi_value):
    """Objective of :func:`extremal_partition` for every feasible k at once."""
    k = np.arange(-(-n_qubits // cap), n_qubits + 1)
    if cap == 1:
        total = 3 * k
    else:
        full, rest = np.divmod(n_qubits - k, cap - 1)
        has_rest = rest > 0
        total = (full * cap * (cap + 2) + has_rest * (1 + rest) * (3 + rest)
                 + 3 * (k - full - has_rest))
    return k, total / 4 - chi_value / k


def partition_bound(n_qubits, m, chi_value):
    """Threshold ``f(m, chi)`` that ``xi`` must exceed to certify genuine
    m-qubit entanglement.

    At fixed part count k the objective only depends on ``sum m_i**2``, which
    is convex, so the extremal partition is optimal; the outer maximum over k
    is taken explicitly.

    >>> partition_bound(6, 3, 0)
    3.0
    """
    _check_m(n_qubits, m)
    _, values = _extremal_objectives(n_qubits, min(m - 1, n_qubits), chi_value)
    return float(4 * values.max() / n_qubits - 1)


def partition_bound_approx(n_qubits, m, jz_twice):
    """Closed-form ``m - (m - 1) n**2 / N**2`` for a Dicke level ``n``.

    This is the equal-block candidate with ``chi = n**2 / 4``, so it matches
    :func:`partition_bound` when ``(m - 1) | N`` and that candidate wins;
    used only as a cross-check.
    """
    _check_m(n_qubits, m)
    return m - (m - 1) * jz_twice**2 / n_qubits**2


def criterion1_threshold_depth(xi_value, n_qubits):
    """Largest integer m <= N with ``xi > m``, or 1."""
    if not np.isfinite(xi_value) or xi_value <= 1:
        return 1
    m = math.ceil(xi_value) - 1
    return int(min(max(m, 1), n_qubits))


def simple_bound(n_qubits, m0, jz_variance, which="eq9"):
    """Partition-free upper bounds for states with blocks of at most ``m0`` qubits.

    ``which="eq8"`` bounds ``<Jx^2>`` alone by ``(1 + 4 Var Jz) m0 N / 4``;
    ``which="eq9"`` bounds ``<Jx^2> + <Jy^2>`` by ``(1 + 4 Var Jz) N (m0 + 2) / 4``.
    """
    if not 1 <= m0 <= n_qubits:
        raise InputError("m0 must lie in 1..N")
    scale = 1 + 4 * jz_variance
    if which == "eq8":
        return scale * m0 * n_qubits / 4
    if which == "eq9":
        return scale * n_qubits * (m0 + 2) / 4
    raise InputError(f"which must be 'eq8' or 'eq9', got {which!r}")


@dataclass
class CriteriaResult:
    xi: float
    chi: float
    alpha: float
    bounds: dict
    certified_depth: int
    criterion1_depth: int
    inputs: MomentSet
    notes: list = field(default_factory=list)

    @property
    def alpha_degenerate(self):
        return self.alpha is None

    def as_dict(self):
        return {
            "xi": self.xi,
            "chi": self.chi,
            "alpha": self.alpha,
            "alpha_degenerate": self.alpha_degenerate,
            "bounds": {str(m): f for m, f in self.bounds.items()},
            "certified_depth": self.certified_depth,
            "criterion1": {"xi": self.xi, "depth": self.criterion1_depth},
            "notes": list(self.notes),
        }


def bounds_table(n_qubits, chi_value):
    return {m: partition_bound(n_qubits, m, chi_value) for m in range(2, n_qubits + 1)}


def certify_depth(moments):
    """Evaluate both criteria for a moment set and certify an entanglement depth."""
    n = moments.n_qubits
    x = xi(moments)
    a = alpha(moments)
    c = chi(moments)
    table = bounds_table(n, c)
    depth = 1
    for m in range(n, 1, -1):
        if x > table[m]:
            depth = m
            break
    notes = []
    if a is None:
        notes.append("alpha degenerate: Jz^2 fluctuation vanishes, chi = <Jz^2>")
    return CriteriaResult(
        xi=x,
        chi=c,
        alpha=a,
        bounds=table,
        certified_depth=depth,
        criterion1_depth=criterion1_threshold_depth(x, n),
        inputs=moments,
        notes=notes,
    )


def partition_bound_exact(n_qubits, m, chi_value):
    """Rational-arithmetic ``f(m, chi)`` through the extremal partitions."""
    _check_m(n_qubits, m)
    chi_value = Fraction(chi_value)
    cap = min(m - 1, n_qubits)
    best = max(
        Fraction(sum(p * (p + 2) for p in part.parts), 4) - chi_value / part.k
        for part in (
            extremal_partition(n_qubits, k, cap)
            for k in range(-(-n_qubits // cap), n_qubits + 1)
        )
    )
    return Fraction(4, n_qubits) * best - 1
