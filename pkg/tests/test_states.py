import numpy as np
import pytest

from conftest import kron_collective
from dicke_depth.criteria import chi, partition_bound, xi
from dicke_depth.errors import InputError, SizeError
from dicke_depth.spin_core import Representation, compute_moments, convert_representation
from dicke_depth.states import (
    BiseparableSpec,
    BlockProduct,
    StateSpec,
    composition_count,
    make_biseparable_random,
    make_dicke,
    make_mixture,
    make_product,
    make_superposition,
    random_biseparable_spec,
    sample_composition,
)


def test_dicke_n4_center():
    m = compute_moments(make_dicke(4, 0))
    assert m.jz2 == pytest.approx(0, abs=1e-12)
    assert m.jx2 + m.jy2 == pytest.approx(6, abs=1e-12)


def test_dicke_w_class_against_dense():
    dense = convert_representation(make_dicke(4, -2), "dense").data
    jx, jy, jz = (kron_collective(4, a) for a in "xyz")
    assert np.trace(jz @ dense).real == pytest.approx(-1, abs=1e-12)
    assert np.trace((jx @ jx + jy @ jy) @ dense).real == pytest.approx(5, abs=1e-12)
    m = compute_moments(make_dicke(4, -2))
    assert (m.jz_mean, m.jx2 + m.jy2) == pytest.approx((-1, 5), abs=1e-12)


def test_single_qubit_up():
    s = make_dicke(1, 1)
    np.testing.assert_allclose(s.data, [1, 0])


@pytest.mark.parametrize("n,jz_twice", [(4, 1), (4, 6), (3, 0), (2, -4)])
def test_dicke_rejects(n, jz_twice):
    with pytest.raises(InputError):
        make_dicke(n, jz_twice)


@pytest.mark.parametrize("n", [1, 4, 9])
def test_dicke_exact_eigenstate(n):
    for jz_twice in range(-n, n + 1, 2):
        m = compute_moments(make_dicke(n, jz_twice))
        assert m.jz_variance == pytest.approx(0, abs=1e-12)
        dense = convert_representation(make_dicke(n, jz_twice), "dense").data if n <= 4 else None
        if dense is not None:
            j2 = sum(np.linalg.matrix_power(kron_collective(n, a), 2) for a in "xyz")
            var = np.trace(j2 @ j2 @ dense).real - np.trace(j2 @ dense).real ** 2
            assert var == pytest.approx(0, abs=1e-12)


def test_product_states():
    m = compute_moments(make_product([(0, 0)] * 4))
    assert m.jz_mean == pytest.approx(2)
    state = make_product([(np.pi / 2, 0)] * 2)
    m = compute_moments(state)
    assert m.jx2 == pytest.approx(1)
    # Kronecker oracle: <Jx^2> + <Jy^2> = 1 + 1/2, Var Jz = 1/2 -> xi = 1.5 / 1.5 - 1
    jx, jy, jz = (kron_collective(2, a) for a in "xyz")
    rho = state.data
    transverse = np.trace((jx @ jx + jy @ jy) @ rho).real
    var = np.trace(jz @ jz @ rho).real - np.trace(jz @ rho).real ** 2
    assert (transverse, var) == pytest.approx((1.5, 0.5), abs=1e-12)
    assert xi(m) == pytest.approx(transverse / (2 * (0.25 + var)) - 1, abs=1e-12)
    assert xi(m) == pytest.approx(0, abs=1e-12)
    m = compute_moments(make_product([(np.pi, 0)]))
    assert m.jz_mean == pytest.approx(-0.5)
    with pytest.raises(SizeError):
        make_product([(0, 0)] * 13)


def test_composition_count_matches_enumeration():
    from itertools import product

    for n in range(1, 8):
        for cap in range(1, n + 1):
            brute = sum(
                1
                for k in range(1, n + 1)
                for parts in product(range(1, cap + 1), repeat=k)
                if sum(parts) == n
            )
            assert composition_count(n, cap) == brute


def test_sample_composition_uniform(rng):
    # compositions of 5 with parts <= 2: there are 8, each should appear ~1/8
    counts = {}
    for _ in range(8000):
        c = tuple(sample_composition(5, 2, rng))
        assert max(c) <= 2 and sum(c) == 5
        counts[c] = counts.get(c, 0) + 1
    assert len(counts) == composition_count(5, 2) == 8
    assert all(abs(v / 8000 - 1 / 8) < 0.02 for v in counts.values())


def test_biseparable_cap_one_is_pure_product():
    s = make_biseparable_random(4, 1, 1, seed=3)
    rho = s.data
    assert np.trace(rho @ rho).real == pytest.approx(1, abs=1e-12)
    # each single-qubit reduced state is pure
    t = rho.reshape((2,) * 8)
    for q in range(4):
        axes = [i for i in range(4) if i != q]
        keep = t
        for i in sorted(axes, reverse=True):
            keep = np.trace(keep, axis1=i, axis2=i + keep.ndim // 2)
        assert np.trace(keep @ keep).real == pytest.approx(1, abs=1e-12)


def test_biseparable_single_block_is_pure():
    s = make_biseparable_random(4, 4, 1, seed=5)
    assert np.trace(s.data @ s.data).real == pytest.approx(1, abs=1e-12)


def test_biseparable_deterministic():
    a = make_biseparable_random(5, 2, 3, seed=11)
    b = make_biseparable_random(5, 2, 3, seed=11)
    c = make_biseparable_random(5, 2, 3, seed=12)
    np.testing.assert_array_equal(a.data, b.data)
    assert not np.allclose(a.data, c.data)


def test_biseparable_respects_bound():
    for seed in range(20):
        m = compute_moments(make_biseparable_random(6, 2, 8, seed))
        assert xi(m) <= partition_bound(6, 3, chi(m)) + 1e-9


def test_block_layout_and_weights(rng):
    spec = random_biseparable_spec(7, 3, 5, rng)
    assert spec.max_block <= 3
    assert np.all(spec.weights >= 0) and spec.weights.sum() == pytest.approx(1)
    for comp in spec.components:
        assert sorted(q for b in comp.blocks for q in b) == list(range(7))


def test_block_product_qubit_order():
    up, down = np.array([1, 0]), np.array([0, 1])
    bp = BlockProduct([(2,), (0,), (1,)], [down, up, up])
    vec = bp.vector()
    # qubit 2 down, qubits 0 and 1 up -> |001>
    assert abs(vec[0b001]) == pytest.approx(1)
    spec = BiseparableSpec(np.array([1.0]), [bp])
    assert spec.state().n_qubits == 3


def test_mixture_and_superposition():
    mix = make_mixture([make_dicke(4, 2), make_dicke(4, -2)], [0.5, 0.5])
    assert mix.representation is Representation.SYMMETRIC_MIXED
    m = compute_moments(mix)
    assert (m.jz_mean, m.jz2, m.jz4) == pytest.approx((0, 1, 1))
    sup = make_superposition([make_dicke(2, 2), make_dicke(2, -2)], [1, 1])
    assert compute_moments(sup).jz2 == pytest.approx(1)
    with pytest.raises(InputError):
        make_mixture([make_dicke(2, 0)], [0.7])


def test_state_spec_build():
    spec = StateSpec.from_dict(
        {
            "kind": "mixture",
            "n_qubits": 4,
            "weights": [0.5, 0.5],
            "components": [
                {"kind": "dicke", "n_qubits": 4, "jz_twice": 2},
                {"kind": "product", "n_qubits": 4},
            ],
        }
    )
    assert spec.needs_dense
    state = spec.build()
    assert state.representation is Representation.DENSE
    assert compute_moments(state).jz_mean == pytest.approx(1.5)
    assert not StateSpec("dicke", 100, {"jz_twice": 0}).needs_dense
    with pytest.raises(InputError):
        StateSpec("ghz", 3)
    with pytest.raises(InputError):
        StateSpec("mixture", 3, {"weights": [0.2, 0.2], "components": []})
