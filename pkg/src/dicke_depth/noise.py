"""Independent single-qubit noise and closed-form estimates of its effect on xi.

Channels act on dense density matrices only, in a fixed order: dephasing
first, then bit flips. Both are diagonal-preserving up to relabeling, so the
order does not matter on states diagonal in the computational basis.

Dephasing with rate ``p`` means full single-qubit decoherence with
probability ``p`` (off-diagonal factor ``1 - p``). A phase-flip channel with
flip probability ``q`` (factor ``1 - 2q``) is the same map with ``p = 2q``.
"""

from dataclasses import dataclass

import numpy as np
from scipy.stats import binom

from .errors import DomainError, InputError
from .spin_core import (
    QubitEnsembleState,
    Representation,
    _basis_indices,
    _bit,
    convert_representation,
)


@dataclass(frozen=True)
class NoiseModel:
    dephasing_rate: float = 0.0
    bitflip_rate: float = 0.0

    def __post_init__(self):
        for name in ("dephasing_rate", "bitflip_rate"):
            v = float(getattr(self, name))
            if not 0.0 <= v <= 1.0:
                raise InputError(f"{name} must lie in [0, 1], got {v}")
            object.__setattr__(self, name, v)

    @classmethod
    def from_phase_flip(cls, flip_probability, bitflip_rate=0.0):
        return cls(min(1.0, 2 * flip_probability), bitflip_rate)

    @property
    def is_identity(self):
        return self.dephasing_rate == 0 and self.bitflip_rate == 0

    def as_dict(self):
        return {"dephasing_rate": self.dephasing_rate, "bitflip_rate": self.bitflip_rate}


def _popcount(x):
    out = np.zeros_like(x)
    while np.any(x):
        out += x & 1
        x = x >> 1
    return out


def dephase(rho, n_qubits, p):
    """Multiply each coherence by ``(1 - p)`` per qubit on which the two basis
    labels differ."""
    if p == 0:
        return rho
    idx = _basis_indices(n_qubits)
    distance = _popcount(idx[:, None] ^ idx[None, :])
    return rho * (1 - p) ** distance


def bitflip(rho, n_qubits, p):
    if p == 0:
        return rho
    idx = _basis_indices(n_qubits)
    for q in range(n_qubits):
        flip = idx ^ _bit(n_qubits, q)
        rho = (1 - p) * rho + p * rho[np.ix_(flip, flip)]
    return rho


def apply_noise(state, model, dense_cap=None):
    """Apply i.i.d. dephasing then bit-flip noise; the result is always dense."""
    dense = convert_representation(state, Representation.DENSE, dense_cap)
    n = dense.n_qubits
    rho = dephase(dense.density_matrix(), n, model.dephasing_rate)
    rho = bitflip(rho, n, model.bitflip_rate)
    return QubitEnsembleState(n, (rho + rho.conj().T) / 2, Representation.DENSE)


def xi_dephasing_sum(n_qubits, p):
    """Binomial-average estimate of xi for a dephased ``|N/2, 0>`` Dicke state,
    summed term by term over the number ``i`` of decohered qubits."""
    _check_rate(p)
    n = int(n_qubits)
    i = np.arange(n + 1)
    weights = binom.pmf(i, n, p)
    contribution = i / 2 + ((n - i) * (n - i + 2) / 4 - i / 4)
    return float(4 / n * np.dot(weights, contribution) - 1)


def xi_dephasing_estimate(n_qubits, p):
    """Closed form of :func:`xi_dephasing_sum`: ``N (1 - p)**2 + 1 - p**2``."""
    _check_rate(p)
    return n_qubits * (1 - p) ** 2 + 1 - p**2


def xi_dephasing_printed(n_qubits, p):
    """The linear form ``(1 - p) N + 1 - p**2`` as it is commonly quoted.

    It does not equal the binomial sum; kept only for side-by-side reports.
    """
    _check_rate(p)
    return (1 - p) * n_qubits + 1 - p**2


def xi_dephasing_exact(n_qubits, p):
    """Exact xi of ``|N/2, 0>`` after dephasing: ``1 + N (1 - p)**2``."""
    _check_rate(p)
    return 1 + n_qubits * (1 - p) ** 2


def jz_variance_bitflip(n_qubits, p_b):
    """``N p_b (1 - p_b)``; exact for ``|N/2, 0>`` under the bit-flip channel."""
    _check_rate(p_b)
    return n_qubits * p_b * (1 - p_b)


def xi_bitflip_estimate(n_qubits, p_b):
    """Large-N estimate ``1 / (4 p_b (1 - p_b)) - 1``, meaningful when
    ``N p_b (1 - p_b) >> 1/4``; ``n_qubits`` only documents that regime."""
    if not 0.0 < p_b < 1.0:
        raise DomainError("bit-flip estimate needs 0 < p_b < 1; simulate exactly instead")
    return 1 / (4 * p_b * (1 - p_b)) - 1


def xi_bitflip_finite(n_qubits, p_b):
    """xi of ``|N/2, 0>`` with transverse moments kept ideal and the Jz variance
    inflated to ``N p_b (1 - p_b)``; reduces to :func:`xi_bitflip_estimate` as N grows."""
    _check_rate(p_b)
    n = n_qubits
    return (n * (n + 2) / 4) / (n * (0.25 + n * p_b * (1 - p_b))) - 1


def _check_rate(p):
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"rate must lie in [0, 1], got {p}")
