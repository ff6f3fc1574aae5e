"""Collective spin operators and exact moments of N-qubit states.

Two state encodings are supported:

* dense: a ``2**N x 2**N`` density matrix in the computational basis, qubit 0
  being the most significant bit and ``|0>`` the spin-up (``sigma_z = +1``) level;
* symmetric: the ``N + 1`` dimensional maximal-spin ladder ``|N/2, N/2 - r>``,
  ``r = 0..N``, either as a pure vector or as a density matrix.

Dense operators are never formed as full matrices here; ``J_axis`` acts on the
leading axis of an array through bit-flip permutations.
"""

from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

import numpy as np
from scipy.linalg import eigh_tridiagonal
from scipy.special import gammaln

from .config import DEFAULT_DENSE_CAP, MAX_SYMMETRIC_N, TOL
from .errors import ConversionError, InputError, SizeError

AXES = ("x", "y", "z")


class Representation(str, Enum):
    DENSE = "dense"
    SYMMETRIC_PURE = "symmetric_pure"
    SYMMETRIC_MIXED = "symmetric_mixed"

    @property
    def symmetric(self):
        return self is not Representation.DENSE


def _check_axis(axis):
    if axis not in AXES:
        raise InputError(f"axis must be one of {AXES}, got {axis!r}")


def _check_dense_cap(n_qubits, dense_cap):
    cap = DEFAULT_DENSE_CAP if dense_cap is None else dense_cap
    if n_qubits > cap:
        raise SizeError(f"dense representation limited to {cap} qubits, got N={n_qubits}")


def _as_representation(tag):
    try:
        return Representation(tag)
    except ValueError:
        if tag == "symmetric":
            return Representation.SYMMETRIC_MIXED
        raise InputError(f"unknown representation {tag!r}") from None


@dataclass(frozen=True, eq=False)
class QubitEnsembleState:
    """An N-qubit state in one of the supported encodings.

    Instances are validated on construction and treated as immutable; the
    underlying array is flagged read-only.
    """

    n_qubits: int
    data: np.ndarray
    representation: Representation

    def __post_init__(self):
        rep = _as_representation(self.representation)
        object.__setattr__(self, "representation", rep)
        n = int(self.n_qubits)
        if n < 1:
            raise InputError("n_qubits must be positive")
        object.__setattr__(self, "n_qubits", n)
        data = np.array(self.data, dtype=complex)
        dim = 2**n if rep is Representation.DENSE else n + 1
        expected = (dim,) if rep is Representation.SYMMETRIC_PURE else (dim, dim)
        if data.shape != expected:
            raise InputError(
                f"{rep.value} state for N={n} needs shape {expected}, got {data.shape}"
            )
        if rep is Representation.SYMMETRIC_PURE:
            norm = np.linalg.norm(data)
            if abs(norm - 1.0) > TOL.linalg:
                raise InputError(f"state vector norm {norm} differs from 1")
        else:
            _check_density_matrix(data)
        data.setflags(write=False)
        object.__setattr__(self, "data", data)

    @property
    def dim(self):
        return self.data.shape[0]

    def density_matrix(self):
        if self.representation is Representation.SYMMETRIC_PURE:
            return np.outer(self.data, self.data.conj())
        return np.array(self.data)

    def __repr__(self):
        return f"QubitEnsembleState(N={self.n_qubits}, {self.representation.value})"


def _check_density_matrix(rho):
    tr = np.trace(rho)
    if abs(tr - 1.0) > TOL.linalg:
        raise InputError(f"trace {tr.real:.3g} differs from 1")
    scale = max(1.0, np.abs(rho).max())
    if np.abs(rho - rho.conj().T).max() > TOL.linalg * scale:
        raise InputError("density matrix is not Hermitian")
    if rho.shape[0] <= 1024:
        lowest = np.linalg.eigvalsh(rho)[0]
        if lowest < TOL.eigenvalue_floor:
            raise InputError(f"density matrix has negative eigenvalue {lowest:.3g}")


# ---------------------------------------------------------------------------
# symmetric ladder
# ---------------------------------------------------------------------------

def _ladder_m(n_qubits):
    return n_qubits / 2 - np.arange(n_qubits + 1)


def _raising_elements(n_qubits):
    """<m+1|J+|m> for the ladder levels r = 1..N (m = N/2 - r)."""
    j = n_qubits / 2
    m = _ladder_m(n_qubits)[1:]
    return np.sqrt(j * (j + 1) - m * (m + 1))


def symmetric_operator(n_qubits, axis):
    """Dense ``(N+1) x (N+1)`` matrix of ``J_axis`` on the maximal-spin ladder."""
    _check_axis(axis)
    if n_qubits > MAX_SYMMETRIC_N:
        raise SizeError(f"symmetric ladder limited to N={MAX_SYMMETRIC_N}")
    if axis == "z":
        return np.diag(_ladder_m(n_qubits)).astype(complex)
    jp = np.diag(_raising_elements(n_qubits), k=1).astype(complex)
    if axis == "x":
        return (jp + jp.T) / 2
    return (jp - jp.T) / 2j


# ---------------------------------------------------------------------------
# dense, matrix-free action
# ---------------------------------------------------------------------------

@lru_cache(maxsize=32)
def _basis_indices(n_qubits):
    idx = np.arange(2**n_qubits)
    idx.setflags(write=False)
    return idx


@lru_cache(maxsize=32)
def dense_jz_diagonal(n_qubits):
    """Jz eigenvalue of every computational basis state."""
    idx = _basis_indices(n_qubits)
    ones = np.zeros(idx.shape, dtype=np.int64)
    for q in range(n_qubits):
        ones += (idx >> q) & 1
    diag = n_qubits / 2 - ones
    diag.setflags(write=False)
    return diag


def _bit(n_qubits, qubit):
    return 1 << (n_qubits - 1 - qubit)


def apply_collective(n_qubits, axis, array):
    """Return ``J_axis @ array`` for a dense vector or matrix, matrix-free."""
    _check_axis(axis)
    if axis == "z":
        diag = dense_jz_diagonal(n_qubits)
        return diag.reshape((-1,) + (1,) * (array.ndim - 1)) * array
    idx = _basis_indices(n_qubits)
    out = np.zeros_like(array, dtype=complex)
    shape = (-1,) + (1,) * (array.ndim - 1)
    for q in range(n_qubits):
        bit = _bit(n_qubits, q)
        flipped = array[idx ^ bit]
        if axis == "x":
            out += flipped
        else:
            # <a|Y|a^bit> = -i if qubit is 0 in a, +i otherwise
            phase = np.where(idx & bit, 1j, -1j).reshape(shape)
            out += phase * flipped
    return out / 2


def dense_operator(n_qubits, axis, dense_cap=None):
    _check_dense_cap(n_qubits, dense_cap)
    return apply_collective(n_qubits, axis, np.eye(2**n_qubits, dtype=complex))


def collective_operator(n_qubits, axis, representation="symmetric", dense_cap=None):
    """Matrix of ``J_axis`` for ``n_qubits`` in the requested representation.

    >>> collective_operator(2, "z", "symmetric").real.diagonal()
    array([ 1.,  0., -1.])
    """
    if n_qubits < 1:
        raise InputError("n_qubits must be positive")
    _check_axis(axis)
    rep = _as_representation(representation)
    if rep is Representation.DENSE:
        return dense_operator(n_qubits, axis, dense_cap)
    return symmetric_operator(n_qubits, axis)


# ---------------------------------------------------------------------------
# moments
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MomentSet:
    """Collective-spin moments in units of hbar = 1."""

    jx2: float
    jy2: float
    jz_mean: float
    jz2: float
    jz4: float
    n_qubits: int

    @property
    def jz_variance(self):
        return self.jz2 - self.jz_mean**2

    @property
    def jz2_variance(self):
        return self.jz4 - self.jz2**2

    @property
    def transverse(self):
        return self.jx2 + self.jy2

    def check(self, tol=1e-9):
        """Raise if the moments cannot come from a physical N-qubit state."""
        n = self.n_qubits
        for name in ("jx2", "jy2", "jz2", "jz4"):
            if getattr(self, name) < -tol:
                raise InputError(f"{name} is negative")
        if self.jz_variance < -tol:
            raise InputError("negative Jz variance")
        if self.jz2_variance < -tol * max(1.0, self.jz4):
            raise InputError("jz4 < jz2**2")
        if self.jx2 + self.jy2 + self.jz2 > n * (n + 2) / 4 + tol:
            raise InputError("total spin exceeds N(N+2)/4")
        return self

    def as_dict(self):
        return {
            "n_qubits": self.n_qubits,
            "jx2": self.jx2,
            "jy2": self.jy2,
            "jz_mean": self.jz_mean,
            "jz2": self.jz2,
            "jz4": self.jz4,
            "jz_variance": self.jz_variance,
        }


def _expect_sq(state, axis):
    """<J_axis^2> for a state."""
    n = state.n_qubits
    rep = state.representation
    if rep is Representation.DENSE:
        applied = apply_collective(n, axis, state.data)
        return float(np.real(np.trace(apply_collective(n, axis, applied))))
    op = symmetric_operator(n, axis)
    if rep is Representation.SYMMETRIC_PURE:
        v = op @ state.data
        return float(np.real(np.vdot(v, v)))
    return float(np.real(np.trace(op @ op @ state.data)))


def jz_distribution(state):
    """Probabilities of the Jz eigenvalues ``N/2 - r`` for ``r = 0..N``."""
    n = state.n_qubits
    if state.representation is Representation.DENSE:
        diag = np.real(np.diagonal(state.data))
        levels = (n / 2 - dense_jz_diagonal(n)).astype(np.int64)
        probs = np.bincount(levels, weights=diag, minlength=n + 1)
    elif state.representation is Representation.SYMMETRIC_PURE:
        probs = np.abs(state.data) ** 2
    else:
        probs = np.real(np.diagonal(state.data)).copy()
    probs = np.clip(probs, 0.0, None)
    return probs / probs.sum()


def compute_moments(state):
    """Exact ``<Jx^2>``, ``<Jy^2>``, ``<Jz>``, ``<Jz^2>``, ``<Jz^4>`` of a state."""
    if not isinstance(state, QubitEnsembleState):
        raise InputError("compute_moments expects a QubitEnsembleState")
    n = state.n_qubits
    levels = _ladder_m(n)
    if state.representation is Representation.DENSE:
        diag = np.real(np.diagonal(state.data))
        jz = dense_jz_diagonal(n)
        jz_mean, jz2, jz4 = (float(np.dot(diag, jz**k)) for k in (1, 2, 4))
    else:
        if state.representation is Representation.SYMMETRIC_PURE:
            probs = np.abs(state.data) ** 2
        else:
            probs = np.real(np.diagonal(state.data))
        jz_mean, jz2, jz4 = (float(np.dot(probs, levels**k)) for k in (1, 2, 4))
    return MomentSet(
        jx2=_expect_sq(state, "x"),
        jy2=_expect_sq(state, "y"),
        jz_mean=jz_mean,
        jz2=jz2,
        jz4=jz4,
        n_qubits=n,
    )


def total_spin_expectation(state):
    m = compute_moments(state)
    return m.jx2 + m.jy2 + m.jz2


# ---------------------------------------------------------------------------
# rotations
# ---------------------------------------------------------------------------

def _single_qubit_rotation(axis, angle):
    c, s = np.cos(angle / 2), np.sin(angle / 2)
    if axis == "x":
        return np.array([[c, -1j * s], [-1j * s, c]])
    if axis == "y":
        return np.array([[c, -s], [s, c]], dtype=complex)
    return np.diag([np.exp(-0.5j * angle), np.exp(0.5j * angle)])


def _apply_local(n_qubits, unitary, array):
    """Apply the same 2x2 unitary to every qubit along the leading axis of array."""
    rest = array.shape[1:]
    t = array.reshape((2,) * n_qubits + rest)
    for q in range(n_qubits):
        t = np.moveaxis(np.tensordot(unitary, t, axes=([1], [q])), 0, q)
    return t.reshape(array.shape)


def _symmetric_rotation(n_qubits, axis, angle):
    if axis == "z":
        return np.diag(np.exp(-1j * angle * _ladder_m(n_qubits)))
    # J_x and J_y are tridiagonal on the ladder; J_y = D J_x D^dagger with D = diag(i^-r)
    off = _raising_elements(n_qubits) / 2
    evals, evecs = eigh_tridiagonal(np.zeros(n_qubits + 1), off)
    u = (evecs * np.exp(-1j * angle * evals)) @ evecs.T
    if axis == "y":
        d = 1j ** np.arange(n_qubits + 1)
        u = d[:, None] * u * d.conj()[None, :]
    return u


def rotation_operator(n_qubits, axis, angle, representation="symmetric", dense_cap=None):
    """``exp(-i angle J_axis)`` as an explicit matrix."""
    _check_axis(axis)
    rep = _as_representation(representation)
    if rep is Representation.DENSE:
        _check_dense_cap(n_qubits, dense_cap)
        return _apply_local(
            n_qubits, _single_qubit_rotation(axis, angle), np.eye(2**n_qubits, dtype=complex)
        )
    return _symmetric_rotation(n_qubits, axis, angle)


def rotate_collective(state, axis, angle):
    """Conjugate the state by ``exp(-i angle J_axis)``; representation is kept."""
    _check_axis(axis)
    if angle == 0:
        return state
    n = state.n_qubits
    rep = state.representation
    if rep is Representation.DENSE:
        u = _single_qubit_rotation(axis, angle)
        left = _apply_local(n, u, state.data)
        rotated = _apply_local(n, u, left.conj().T).conj().T
        rotated = (rotated + rotated.conj().T) / 2
    else:
        u = _symmetric_rotation(n, axis, angle)
        if rep is Representation.SYMMETRIC_PURE:
            rotated = u @ state.data
            rotated = rotated / np.linalg.norm(rotated)
        else:
            rotated = u @ state.data @ u.conj().T
            rotated = (rotated + rotated.conj().T) / 2
    return QubitEnsembleState(n, rotated, rep)


# ---------------------------------------------------------------------------
# representation changes
# ---------------------------------------------------------------------------

def _log_binom(n, k):
    return gammaln(n + 1) - gammaln(k + 1) - gammaln(n - k + 1)


def symmetric_embedding(n_qubits, dense_cap=None):
    """Isometry ``V`` (``2**N x (N+1)``) mapping ladder level r to the normalized
    uniform superposition of basis states with r spins down."""
    _check_dense_cap(n_qubits, dense_cap)
    r = (n_qubits / 2 - dense_jz_diagonal(n_qubits)).astype(np.int64)
    v = np.zeros((2**n_qubits, n_qubits + 1))
    v[np.arange(2**n_qubits), r] = np.exp(-0.5 * _log_binom(n_qubits, r))
    return v


def convert_representation(state, target, dense_cap=None):
    """Re-express a state in another encoding.

    Symmetric to dense always succeeds. Dense to symmetric requires the state
    to live in the maximal-spin sector; otherwise a :class:`ConversionError`
    carrying the leaked weight is raised.
    """
    target = _as_representation(target)
    rep = state.representation
    n = state.n_qubits
    if target is rep:
        return state
    if rep.symmetric and target.symmetric:
        if target is Representation.SYMMETRIC_MIXED:
            return QubitEnsembleState(n, state.density_matrix(), target)
        return QubitEnsembleState(n, _pure_from_mixed(state.data), target)
    v = symmetric_embedding(n, dense_cap)
    if target is Representation.DENSE:
        if rep is Representation.SYMMETRIC_PURE:
            psi = v @ state.data
            return QubitEnsembleState(n, np.outer(psi, psi.conj()), target)
        return QubitEnsembleState(n, v @ state.data @ v.T, target)
    projected = v.T @ state.data @ v
    leakage = 1.0 - float(np.real(np.trace(projected)))
    if leakage > TOL.sector_leakage:
        raise ConversionError(
            f"state leaks {leakage:.3g} of its weight outside the maximal-spin sector",
            leakage=leakage,
        )
    projected = (projected + projected.conj().T) / 2
    projected /= np.trace(projected).real
    if target is Representation.SYMMETRIC_PURE:
        return QubitEnsembleState(n, _pure_from_mixed(projected), target)
    return QubitEnsembleState(n, projected, target)


def _pure_from_mixed(rho):
    evals, evecs = np.linalg.eigh(rho)
    if evals[-1] < 1 - TOL.physics:
        raise ConversionError(f"state is mixed (purity {np.sum(evals**2):.6g})")
    vec = evecs[:, -1]
    # fix global phase on the largest component
    k = np.argmax(np.abs(vec))
    return vec * np.exp(-1j * np.angle(vec[k]))
