import numpy as np
import pytest

PAULI = {
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]]),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def kron_collective(n, axis):
    """J_axis built from explicit Kronecker products; independent of the
    matrix-free kernels in the package."""
    total = np.zeros((2**n, 2**n), dtype=complex)
    for q in range(n):
        op = np.ones((1, 1), dtype=complex)
        for j in range(n):
            op = np.kron(op, PAULI[axis] if j == q else np.eye(2))
        total += op
    return total / 2


def kron_moments(rho, n):
    jx, jy, jz = (kron_collective(n, a) for a in "xyz")

    def ev(op):
        return float(np.real(np.trace(op @ rho)))

    return {
        "jx2": ev(jx @ jx),
        "jy2": ev(jy @ jy),
        "jz_mean": ev(jz),
        "jz2": ev(jz @ jz),
        "jz4": ev(np.linalg.matrix_power(jz, 4)),
    }


def dicke_vector(n, jz_twice):
    """Dicke state as an explicit normalized sum over basis states with the right
    number of spins down (|1> = down)."""
    down = (n - jz_twice) // 2
    vec = np.zeros(2**n, dtype=complex)
    for idx in range(2**n):
        if bin(idx).count("1") == down:
            vec[idx] = 1
    return vec / np.linalg.norm(vec)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


_ACCEPTANCE = pytest.StashKey[list]()


@pytest.fixture
def criterion(request):
    """Record one acceptance line; printed together at the end of the run."""
    lines = request.config.stash.setdefault(_ACCEPTANCE, [])

    def record(number, ok, detail):
        line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}"
        lines.append((number, line))
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_ACCEPTANCE, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(lines):
            terminalreporter.write_line(line)
