import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import comb

from conftest import PAULI
from dicke_depth.criteria import xi
from dicke_depth.errors import DomainError, InputError
from dicke_depth.noise import (
    NoiseModel,
    apply_noise,
    xi_bitflip_estimate,
    xi_bitflip_finite,
    xi_dephasing_estimate,
    xi_dephasing_exact,
    xi_dephasing_printed,
    xi_dephasing_sum,
)
from dicke_depth.spin_core import QubitEnsembleState, compute_moments, convert_representation
from dicke_depth.states import make_biseparable_random, make_dicke


def local(op, q, n):
    out = np.ones((1, 1), dtype=complex)
    for j in range(n):
        out = np.kron(out, op if j == q else np.eye(2))
    return out


def kraus_oracle(rho, n, p, pb):
    """Explicit per-qubit Kraus maps: dephasing {sqrt(1-p) I, sqrt(p) P0, sqrt(p) P1},
    then bit flip {sqrt(1-pb) I, sqrt(pb) X}."""
    p0, p1 = np.diag([1.0, 0.0]), np.diag([0.0, 1.0])
    for q in range(n):
        a, b = local(p0, q, n), local(p1, q, n)
        rho = (1 - p) * rho + p * (a @ rho @ a + b @ rho @ b)
    for q in range(n):
        x = local(PAULI["x"], q, n)
        rho = (1 - pb) * rho + pb * x @ rho @ x
    return rho


def random_dense(n, seed):
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((2**n, 2)) + 1j * rng.standard_normal((2**n, 2))
    rho = g @ g.conj().T
    return QubitEnsembleState(n, rho / np.trace(rho), "dense")


def test_identity_channel():
    s = convert_representation(make_dicke(4, 0), "dense")
    np.testing.assert_allclose(apply_noise(s, NoiseModel()).data, s.data, atol=1e-15)


def test_full_dephasing_gives_xi_one():
    out = apply_noise(make_dicke(4, 0), NoiseModel(1.0, 0.0))
    assert xi(compute_moments(out)) == pytest.approx(1, abs=1e-12)


def test_bitflip_variance_n8():
    m = compute_moments(apply_noise(make_dicke(8, 0), NoiseModel(0, 0.05)))
    assert m.jz_variance == pytest.approx(0.38, abs=1e-10)


@pytest.mark.parametrize("p,pb", [(0.3, 0), (0, 0.2), (0.25, 0.1), (1, 1)])
def test_matches_kraus_oracle(p, pb):
    state = random_dense(3, 7)
    expected = kraus_oracle(state.data, 3, p, pb)
    np.testing.assert_allclose(apply_noise(state, NoiseModel(p, pb)).data, expected, atol=1e-13)


@settings(max_examples=30, deadline=None)
@given(
    p=st.floats(0, 1),
    pb=st.floats(0, 1),
    seed=st.integers(0, 2**32 - 1),
)
def test_trace_and_positivity(p, pb, seed):
    out = apply_noise(random_dense(3, seed), NoiseModel(p, pb))
    assert np.trace(out.data).real == pytest.approx(1, abs=1e-12)
    assert np.linalg.eigvalsh(out.data)[0] >= -1e-10


@settings(max_examples=20, deadline=None)
@given(p=st.floats(0, 1), seed=st.integers(0, 2**32 - 1))
def test_dephasing_keeps_jz_statistics(p, seed):
    state = make_biseparable_random(4, 4, 2, seed)
    before = compute_moments(state)
    after = compute_moments(apply_noise(state, NoiseModel(p, 0)))
    for k in ("jz_mean", "jz2", "jz4"):
        assert getattr(after, k) == pytest.approx(getattr(before, k), abs=1e-12)


@pytest.mark.parametrize("n", [2, 4, 6, 8, 10])
@pytest.mark.parametrize("pb", [0.01, 0.05, 0.2, 0.5])
def test_bitflip_variance_exact(n, pb):
    m = compute_moments(apply_noise(make_dicke(n, 0), NoiseModel(0, pb)))
    assert m.jz_variance == pytest.approx(n * pb * (1 - pb), abs=1e-10)


def test_dephasing_monotone():
    values = [
        xi(compute_moments(apply_noise(make_dicke(8, 0), NoiseModel(p, 0))))
        for p in np.linspace(0, 1, 11)
    ]
    assert all(b <= a + 1e-12 for a, b in zip(values, values[1:]))


@pytest.mark.parametrize("n", [4, 6])
def test_channel_order_commutes_on_dicke(n):
    model = NoiseModel(0.3, 0.15)
    dense = convert_representation(make_dicke(n, 0), "dense").data
    forward = kraus_oracle(dense, n, model.dephasing_rate, model.bitflip_rate)
    # bit flip first, then dephasing
    rho = kraus_oracle(dense, n, 0, model.bitflip_rate)
    backward = kraus_oracle(rho, n, model.dephasing_rate, 0)
    a = compute_moments(QubitEnsembleState(n, forward, "dense"))
    b = compute_moments(QubitEnsembleState(n, backward, "dense"))
    for k in ("jx2", "jy2", "jz_mean", "jz2", "jz4"):
        assert getattr(a, k) == pytest.approx(getattr(b, k), abs=1e-10)


def test_exact_dephasing_formula():
    for n in (4, 6, 8):
        for p in (0, 0.1, 0.37, 1):
            m = compute_moments(apply_noise(make_dicke(n, 0), NoiseModel(p, 0)))
            assert xi(m) == pytest.approx(xi_dephasing_exact(n, p), abs=1e-10)


def term_by_term(n, p):
    total = 0.0
    for i in range(n + 1):
        w = comb(n, i, exact=True) * p**i * (1 - p) ** (n - i)
        total += w * (i / 2 + ((n - i) * (n - i + 2) / 4 - i / 4))
    return 4 / n * total - 1


class TestEstimates:
    @pytest.mark.parametrize("n", [1, 4, 10, 57])
    def test_ideal(self, n):
        assert xi_dephasing_estimate(n, 0) == pytest.approx(n + 1)

    def test_full_dephasing_sum_is_zero(self):
        assert term_by_term(8, 1.0) == pytest.approx(0, abs=1e-12)
        assert xi_dephasing_estimate(8, 1.0) == pytest.approx(0, abs=1e-12)

    def test_n10_p01(self):
        assert term_by_term(10, 0.1) == pytest.approx(9.09, abs=1e-12)
        assert xi_dephasing_estimate(10, 0.1) == pytest.approx(9.09, abs=1e-12)

    @pytest.mark.parametrize("n", [1, 3, 10, 25])
    @pytest.mark.parametrize("p", [0, 0.05, 0.3, 0.71, 1])
    def test_closed_form_equals_sum(self, n, p):
        assert xi_dephasing_sum(n, p) == pytest.approx(term_by_term(n, p), abs=1e-10)
        assert xi_dephasing_estimate(n, p) == pytest.approx(term_by_term(n, p), abs=1e-10)

    def test_printed_linear_form_differs(self):
        assert xi_dephasing_printed(10, 0.1) == pytest.approx(9.99)
        assert abs(xi_dephasing_printed(10, 0.1) - term_by_term(10, 0.1)) > 0.5

    def test_bitflip_percent(self):
        assert xi_bitflip_estimate(10_000, 0.01) == pytest.approx(1 / 0.0396 - 1, abs=1e-9)
        assert xi_bitflip_estimate(10_000, 0.01) > 20

    def test_bitflip_half(self):
        assert xi_bitflip_estimate(100, 0.5) == pytest.approx(0)

    def test_bitflip_domain(self):
        for p in (0.0, 1.0):
            with pytest.raises(DomainError):
                xi_bitflip_estimate(8, p)

    def test_bitflip_n8_against_simulation(self):
        from conftest import kron_moments

        dense = convert_representation(make_dicke(8, 0), "dense").data
        km = kron_moments(kraus_oracle(dense, 8, 0, 0.05), 8)
        oracle_xi = (km["jx2"] + km["jy2"]) / (8 * (0.25 + km["jz2"] - km["jz_mean"] ** 2)) - 1
        exact = xi(compute_moments(apply_noise(make_dicke(8, 0), NoiseModel(0, 0.05))))
        assert exact == pytest.approx(oracle_xi, abs=1e-10)
        estimate = xi_bitflip_estimate(8, 0.05)
        assert estimate == pytest.approx(1 / 0.19 - 1)
        # N p (1-p) = 0.38 is not >> 1/4: the large-N formula overshoots at N = 8
        assert exact < estimate < exact + 2.0

    def test_bitflip_finite_converges(self):
        for pb in (0.01, 0.05):
            assert xi_bitflip_finite(10**7, pb) == pytest.approx(xi_bitflip_estimate(10**7, pb), rel=1e-4)


def test_noise_model_validation():
    with pytest.raises(InputError):
        NoiseModel(1.2, 0)
    with pytest.raises(InputError):
        NoiseModel(0, -0.1)
    assert NoiseModel.from_phase_flip(0.1).dephasing_rate == pytest.approx(0.2)


def test_phase_flip_mapping():
    # phase flip with probability q: rho -> (1-q) rho + q Z rho Z, coherence factor 1-2q
    n, q = 2, 0.15
    dense = convert_representation(make_dicke(n, 0), "dense").data
    z0, z1 = local(PAULI["z"], 0, n), local(PAULI["z"], 1, n)
    rho = (1 - q) * dense + q * z0 @ dense @ z0
    rho = (1 - q) * rho + q * z1 @ rho @ z1
    ours = apply_noise(make_dicke(n, 0), NoiseModel.from_phase_flip(q)).data
    np.testing.assert_allclose(ours, rho, atol=1e-14)
