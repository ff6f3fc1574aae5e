"""Reference states: Dicke states, product states, mixtures, and random
block-product (biseparable) states used to probe the separability bounds."""

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .config import TOL
from .errors import InputError
from .spin_core import (
    QubitEnsembleState,
    Representation,
    _check_dense_cap,
    convert_representation,
)

STATE_KINDS = ("dicke", "product", "superposition", "mixture", "biseparable_random")


def make_dicke(n_qubits, jz_twice):
    """Dicke state with ``Jz = jz_twice / 2`` on the maximal-spin ladder.

    ``jz_twice`` plays the role of the integer ``n``: ``|n| <= N`` and ``N - n``
    must be even.
    """
    n_qubits, jz_twice = int(n_qubits), int(jz_twice)
    if n_qubits < 1:
        raise InputError("n_qubits must be positive")
    if abs(jz_twice) > n_qubits or (n_qubits - jz_twice) % 2:
        raise InputError(
            f"jz_twice={jz_twice} incompatible with N={n_qubits} (need |n| <= N, N - n even)"
        )
    vec = np.zeros(n_qubits + 1, dtype=complex)
    vec[(n_qubits - jz_twice) // 2] = 1.0
    return QubitEnsembleState(n_qubits, vec, Representation.SYMMETRIC_PURE)


def _qubit_vector(theta, phi):
    return np.array([np.cos(theta / 2), np.exp(1j * phi) * np.sin(theta / 2)])


def product_vector(bloch_angles):
    vec = np.ones(1, dtype=complex)
    for theta, phi in bloch_angles:
        vec = np.kron(vec, _qubit_vector(theta, phi))
    return vec


def make_product(bloch_angles, dense_cap=None):
    """Dense pure product state from one ``(theta, phi)`` pair per qubit."""
    angles = [tuple(map(float, a)) for a in bloch_angles]
    if not angles or any(len(a) != 2 for a in angles):
        raise InputError("need one (theta, phi) pair per qubit")
    _check_dense_cap(len(angles), dense_cap)
    vec = product_vector(angles)
    return QubitEnsembleState(len(angles), np.outer(vec, vec.conj()), Representation.DENSE)


def make_superposition(states, amplitudes):
    """Normalized coherent sum of pure states given in the same representation."""
    if len(states) != len(amplitudes) or not states:
        raise InputError("need matching, non-empty lists of states and amplitudes")
    n = states[0].n_qubits
    if any(s.n_qubits != n for s in states):
        raise InputError("all components must have the same N")
    vecs = []
    for s in states:
        if s.representation is Representation.SYMMETRIC_PURE:
            vecs.append(s.data)
        else:
            raise InputError("superposition components must be symmetric pure states")
    vec = np.tensordot(np.asarray(amplitudes, dtype=complex), np.array(vecs), axes=1)
    norm = np.linalg.norm(vec)
    if norm < TOL.linalg:
        raise InputError("superposition vanishes")
    return QubitEnsembleState(n, vec / norm, Representation.SYMMETRIC_PURE)


def make_mixture(states, weights, dense_cap=None):
    """Convex mixture; symmetric output when every component is symmetric."""
    weights = np.asarray(weights, dtype=float)
    if len(states) != len(weights) or not states:
        raise InputError("need matching, non-empty lists of states and weights")
    if np.any(weights < 0) or abs(weights.sum() - 1) > TOL.linalg:
        raise InputError("mixture weights must be non-negative and sum to 1")
    n = states[0].n_qubits
    if any(s.n_qubits != n for s in states):
        raise InputError("all components must have the same N")
    if all(s.representation.symmetric for s in states):
        rep = Representation.SYMMETRIC_MIXED
    else:
        rep = Representation.DENSE
    rho = sum(
        w * convert_representation(s, rep, dense_cap).density_matrix()
        for w, s in zip(weights, states)
    )
    return QubitEnsembleState(n, rho, rep)


# ---------------------------------------------------------------------------
# biseparable states
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def composition_count(n, cap):
    """Number of ordered compositions of ``n`` with parts in ``1..cap``."""
    if n == 0:
        return 1
    return sum(composition_count(n - p, cap) for p in range(1, min(cap, n) + 1))


def sample_composition(n, cap, rng):
    """Uniformly random composition of ``n`` into parts no larger than ``cap``."""
    parts = []
    while n:
        counts = np.array(
            [composition_count(n - p, cap) for p in range(1, min(cap, n) + 1)], dtype=float
        )
        p = int(rng.choice(len(counts), p=counts / counts.sum())) + 1
        parts.append(p)
        n -= p
    return parts


def haar_vector(dim, rng):
    vec = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return vec / np.linalg.norm(vec)


@dataclass
class BlockProduct:
    """One pure component: a tensor product of block states.

    ``blocks[i]`` lists the qubits of block i and ``amplitudes[i]`` holds its
    ``2**len(blocks[i])`` state vector (qubit order as listed).
    """

    blocks: list
    amplitudes: list

    @property
    def n_qubits(self):
        return sum(len(b) for b in self.blocks)

    @property
    def sizes(self):
        return [len(b) for b in self.blocks]

    def vector(self):
        n = self.n_qubits
        vec = np.ones(1, dtype=complex)
        order = []
        for qubits, amp in zip(self.blocks, self.amplitudes):
            vec = np.kron(vec, amp / np.linalg.norm(amp))
            order.extend(qubits)
        # tensor axis j currently holds qubit order[j]
        t = vec.reshape((2,) * n)
        return np.transpose(t, np.argsort(order)).reshape(-1)

    def as_dict(self):
        return {
            "blocks": [list(map(int, b)) for b in self.blocks],
            "amplitudes": [
                [[float(z.real), float(z.imag)] for z in amp] for amp in self.amplitudes
            ],
        }


@dataclass
class BiseparableSpec:
    """Mixture ``sum_mu p_mu rho_mu`` of block-product pure states."""

    weights: np.ndarray
    components: list = field(default_factory=list)

    @property
    def n_qubits(self):
        return self.components[0].n_qubits

    @property
    def max_block(self):
        return max(max(c.sizes) for c in self.components)

    def density_matrix(self):
        w = np.asarray(self.weights, dtype=float)
        w = w / w.sum()
        vecs = np.array([c.vector() for c in self.components])
        return (vecs.T * w) @ vecs.conj()

    def state(self, dense_cap=None):
        _check_dense_cap(self.n_qubits, dense_cap)
        return QubitEnsembleState(self.n_qubits, self.density_matrix(), Representation.DENSE)

    def as_dict(self):
        return {
            "weights": [float(w) for w in self.weights],
            "components": [c.as_dict() for c in self.components],
        }


def random_biseparable_spec(n_qubits, block_cap, n_components, rng):
    """Random layouts (uniform compositions, random qubit assignment), Haar block
    states, and Dirichlet(1, ..., 1) weights."""
    if not 1 <= block_cap <= n_qubits:
        raise InputError(f"block cap must lie in 1..{n_qubits}")
    if n_components < 1:
        raise InputError("need at least one component")
    components = []
    for _ in range(n_components):
        sizes = sample_composition(n_qubits, block_cap, rng)
        perm = rng.permutation(n_qubits)
        blocks, start = [], 0
        for s in sizes:
            blocks.append(tuple(int(q) for q in sorted(perm[start:start + s])))
            start += s
        amps = [haar_vector(2 ** len(b), rng) for b in blocks]
        components.append(BlockProduct(blocks, amps))
    weights = rng.dirichlet(np.ones(n_components))
    return BiseparableSpec(weights, components)


def make_biseparable_random(n_qubits, block_cap, n_components, seed, dense_cap=None):
    """Seeded random dense state with no block larger than ``block_cap`` qubits."""
    _check_dense_cap(n_qubits, dense_cap)
    rng = np.random.default_rng(seed)
    return random_biseparable_spec(n_qubits, block_cap, n_components, rng).state(dense_cap)


# ---------------------------------------------------------------------------
# declarative specs
# ---------------------------------------------------------------------------

@dataclass
class StateSpec:
    """Declarative recipe for a state, as read from a run configuration.

    ``parameters`` by kind:

    * ``dicke``: ``jz_twice``
    * ``product``: ``bloch_angles`` (list of ``[theta, phi]``); defaults to all up
    * ``superposition``: ``components`` (list of spec dicts), ``amplitudes``
      (reals or ``[re, im]`` pairs)
    * ``mixture``: ``components``, ``weights``
    * ``biseparable_random``: ``block_cap``, ``n_components``, ``seed``
    """

    kind: str
    n_qubits: int
    parameters: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in STATE_KINDS:
            raise InputError(f"unknown state kind {self.kind!r}")
        self.n_qubits = int(self.n_qubits)
        if self.n_qubits < 1:
            raise InputError("n_qubits must be positive")
        self.parameters = dict(self.parameters)
        if self.kind == "mixture":
            w = np.asarray(self.parameters.get("weights", []), dtype=float)
            if np.any(w < 0) or abs(w.sum() - 1) > TOL.linalg:
                raise InputError("mixture weights must be non-negative and sum to 1")
        if self.kind == "biseparable_random":
            cap = int(self.parameters.get("block_cap", 1))
            if not 1 <= cap <= self.n_qubits:
                raise InputError("block_cap must lie in 1..N")

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        try:
            kind = d.pop("kind")
            n = d.pop("n_qubits")
        except KeyError as exc:
            raise InputError(f"state spec is missing {exc.args[0]!r}") from None
        params = d.pop("parameters", {})
        params.update(d)
        return cls(kind, n, params)

    def to_dict(self):
        return {"kind": self.kind, "n_qubits": self.n_qubits, "parameters": self.parameters}

    @property
    def needs_dense(self):
        if self.kind in ("product", "biseparable_random"):
            return True
        if self.kind in ("superposition", "mixture"):
            return any(StateSpec.from_dict(c).needs_dense for c in self.parameters["components"])
        return False

    def build(self, dense_cap=None):
        p = self.parameters
        n = self.n_qubits
        if self.kind == "dicke":
            return make_dicke(n, p.get("jz_twice", 0))
        if self.kind == "product":
            angles = p.get("bloch_angles", [[0.0, 0.0]] * n)
            if len(angles) != n:
                raise InputError(f"expected {n} Bloch angle pairs, got {len(angles)}")
            return make_product(angles, dense_cap)
        if self.kind == "biseparable_random":
            return make_biseparable_random(
                n,
                int(p.get("block_cap", 1)),
                int(p.get("n_components", 1)),
                int(p.get("seed", 0)),
                dense_cap,
            )
        comps = [StateSpec.from_dict(c).build(dense_cap) for c in p["components"]]
        if any(c.n_qubits != n for c in comps):
            raise InputError("component N does not match spec N")
        if self.kind == "superposition":
            amps = [complex(*a) if isinstance(a, (list, tuple)) else a for a in p["amplitudes"]]
            return make_superposition(comps, amps)
        return make_mixture(comps, p["weights"], dense_cap)
