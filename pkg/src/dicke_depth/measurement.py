"""Finite-shot collective-spin measurements and moment estimation.

A measurement of ``J_axis`` is emulated by rotating the state so that the
axis maps onto z and sampling the Jz eigenvalue distribution. Only the
eigenvalue is recorded, as in a collective-spin experiment.

Record sets serialize to a small CSV format::

    # n_qubits=4
    # source=lab run 7
    axis,outcome,count
    z,0,1000
    x,-1.5,12
"""

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from .criteria import chi as chi_of
from .criteria import xi as xi_of
from .errors import InputError, NumericalConsistencyError, ParseError, ValidationError
from .spin_core import (
    AXES,
    MomentSet,
    _check_axis,
    jz_distribution,
    rotate_collective,
    _check_dense_cap,
    Representation,
)

GENERATOR = "numpy.random.PCG64"

# rotations taking J_x (J_y) onto J_z
_TO_Z = {"x": ("y", -np.pi / 2), "y": ("x", np.pi / 2)}


def rng_stream(seed, *key):
    """Independent PCG64 stream for ``seed`` and a spawn key such as
    ``(axis_index, sweep_point)``."""
    ss = np.random.SeedSequence(int(seed) % 2**64, spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.PCG64(ss))


def generator_info():
    return {"generator": GENERATOR, "numpy": np.__version__}


def format_outcome(value):
    twice = int(round(2 * value))
    if twice % 2 == 0:
        return str(twice // 2)
    return f"{twice / 2:.1f}"


@dataclass(frozen=True)
class MeasurementRecordSet:
    """Outcome tallies ``(axis, outcome, count)`` of collective-spin measurements."""

    entries: tuple
    n_qubits: int
    metadata: str = ""

    def __post_init__(self):
        entries = tuple((str(a), float(o), int(c)) for a, o, c in self.entries)
        object.__setattr__(self, "entries", entries)
        n = int(self.n_qubits)
        for axis, outcome, count in entries:
            _check_axis(axis)
            _validate_outcome(outcome, n)
            if count < 0:
                raise ValidationError(f"negative count {count}")

    def axes(self):
        return sorted({a for a, _, c in self.entries if c > 0})

    def tally(self, axis):
        """``(outcomes, counts)`` arrays for one axis."""
        rows = [(o, c) for a, o, c in self.entries if a == axis]
        if not rows:
            return np.zeros(0), np.zeros(0, dtype=np.int64)
        o, c = zip(*rows)
        return np.array(o, dtype=float), np.array(c, dtype=np.int64)

    def shots(self, axis):
        return int(self.tally(axis)[1].sum())

    def __add__(self, other):
        if other.n_qubits != self.n_qubits:
            raise InputError("cannot merge record sets with different N")
        meta = "; ".join(m for m in (self.metadata, other.metadata) if m)
        return MeasurementRecordSet(self.entries + other.entries, self.n_qubits, meta)

    def to_csv(self, path=None):
        buf = io.StringIO(newline="")
        buf.write(f"# n_qubits={self.n_qubits}\n")
        for line in self.metadata.splitlines():
            if line.strip():
                buf.write(f"# {line.strip()}\n")
        buf.write("axis,outcome,count\n")
        for axis, outcome, count in self.entries:
            buf.write(f"{axis},{format_outcome(outcome)},{count}\n")
        text = buf.getvalue()
        if path is not None:
            with open(path, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
        return text


def _validate_outcome(outcome, n_qubits, line=None):
    shifted = outcome + n_qubits / 2
    if abs(shifted - round(shifted)) > 1e-9:
        raise ValidationError(
            f"outcome {outcome} is not a Jz eigenvalue for N={n_qubits}", line
        )
    if not 0 <= round(shifted) <= n_qubits:
        raise ValidationError(f"outcome {outcome} outside [-N/2, N/2] for N={n_qubits}", line)


def outcome_distribution(state, axis):
    """Exact probabilities of the ``J_axis`` eigenvalues ``N/2 - r``, r = 0..N."""
    _check_axis(axis)
    if axis != "z":
        rot_axis, angle = _TO_Z[axis]
        state = rotate_collective(state, rot_axis, angle)
    return jz_distribution(state)


def sample_shots(state, axis, shots, seed, dense_cap=None, stream=()):
    """Draw ``shots`` outcomes of ``J_axis`` with a generator seeded by ``seed``.

    Each axis gets its own stream; ``stream`` extends the spawn key, e.g. with
    a sweep-point index. A ``numpy.random.Generator`` may be passed instead.
    """
    if shots < 1:
        raise InputError("shots must be positive")
    if state.representation is Representation.DENSE:
        _check_dense_cap(state.n_qubits, dense_cap)
    rng = (
        seed
        if isinstance(seed, np.random.Generator)
        else rng_stream(seed, AXES.index(axis), *stream)
    )
    n = state.n_qubits
    probs = outcome_distribution(state, axis)
    counts = rng.multinomial(int(shots), probs)
    levels = n / 2 - np.arange(n + 1)
    entries = [(axis, levels[r], int(counts[r])) for r in range(n, -1, -1) if counts[r]]
    meta = f"sampled axis={axis} shots={shots} seed={seed if isinstance(seed, int) else 'rng'}"
    return MeasurementRecordSet(tuple(entries), n, meta)


def sample_all_axes(state, shots, seed, dense_cap=None, stream=()):
    records = [sample_shots(state, a, shots, seed, dense_cap, stream) for a in AXES]
    return records[0] + records[1] + records[2]


def exact_records(state, total=10**12):
    """Records whose counts are the exact outcome probabilities scaled by ``total``."""
    n = state.n_qubits
    levels = n / 2 - np.arange(n + 1)
    entries = []
    for axis in AXES:
        probs = outcome_distribution(state, axis)
        entries += [(axis, levels[r], int(round(p * total))) for r, p in enumerate(probs) if p > 0]
    return MeasurementRecordSet(tuple(entries), n, f"exact distribution x {total}")


# ---------------------------------------------------------------------------
# estimation
# ---------------------------------------------------------------------------

@dataclass
class MomentEstimate:
    """Plug-in moments with first-order standard errors."""

    moments: MomentSet
    stderr: dict
    xi: float
    xi_stderr: float
    chi: float
    chi_stderr: float
    shots: dict
    covariance: np.ndarray = field(repr=False, default=None)
    method: str = "delta"

    def as_dict(self):
        return {
            "method": self.method,
            "shots": dict(self.shots),
            "moments": self.moments.as_dict(),
            "stderr": dict(self.stderr),
            "xi": self.xi,
            "xi_stderr": self.xi_stderr,
            "chi": self.chi,
            "chi_stderr": self.chi_stderr,
        }


_PARAMS = ("jx2", "jy2", "jz_mean", "jz2", "jz4")


def _weighted_cov(columns, counts):
    s = counts.sum()
    mean = counts @ columns / s
    centered = columns - mean
    if s < 2:
        return mean, np.zeros((columns.shape[1],) * 2)
    cov = (centered.T * counts) @ centered / (s - 1)
    return mean, cov / s


def _moments_from(theta, n):
    return MomentSet(*map(float, theta), n_qubits=n)


def _gradient(fun, theta, active):
    grad = np.zeros_like(theta)
    for i in np.flatnonzero(active):
        h = 1e-6 * max(1.0, abs(theta[i]))
        up, down = theta.copy(), theta.copy()
        up[i] += h
        down[i] -= h
        try:
            grad[i] = (fun(up) - fun(down)) / (2 * h)
        except NumericalConsistencyError:
            # backward step left the physical region; fall back to a forward difference
            grad[i] = (fun(up) - fun(theta)) / h
    return grad


def _statistics(records):
    n = records.n_qubits
    theta = np.zeros(5)
    cov = np.zeros((5, 5))
    shots = {}
    for axis in AXES:
        outcomes, counts = records.tally(axis)
        if counts.sum() == 0:
            raise InputError(f"no {axis}-axis records")
        shots[axis] = int(counts.sum())
        if axis == "z":
            cols = np.stack([outcomes, outcomes**2, outcomes**4], axis=1)
            mean, c = _weighted_cov(cols, counts)
            theta[2:] = mean
            cov[2:, 2:] = c
        else:
            i = 0 if axis == "x" else 1
            mean, c = _weighted_cov((outcomes**2)[:, None], counts)
            theta[i] = mean[0]
            cov[i, i] = c[0, 0]
    return theta, cov, shots, n


def estimate_moments(records, bootstrap=0, seed=0):
    """Estimate moments, xi and chi from records covering all three axes.

    Standard errors come from the delta method on the empirical moments. The
    three z-moments share samples, so their full covariance is used. Passing
    ``bootstrap=B`` replaces the xi/chi errors by the spread of ``B``
    multinomial resamples.
    """
    if not isinstance(records, MeasurementRecordSet):
        raise InputError("estimate_moments expects a MeasurementRecordSet")
    theta, cov, shots, n = _statistics(records)
    moments = _moments_from(theta, n)
    active = np.diag(cov) > 0

    d = 0.25 + moments.jz_variance
    t = moments.transverse
    grad_xi = np.array(
        [1 / (n * d), 1 / (n * d), 2 * moments.jz_mean * t / (n * d * d), -t / (n * d * d), 0.0]
    )
    xi_se = float(np.sqrt(max(grad_xi @ cov @ grad_xi, 0.0)))

    def chi_fun(th):
        return chi_of(_moments_from(th, n))

    if active.any():
        grad_chi = _gradient(chi_fun, theta, active)
        chi_se = float(np.sqrt(max(grad_chi @ cov @ grad_chi, 0.0)))
    else:
        chi_se = 0.0

    est = MomentEstimate(
        moments=moments,
        stderr={p: float(np.sqrt(cov[i, i])) for i, p in enumerate(_PARAMS)},
        xi=xi_of(moments),
        xi_stderr=xi_se,
        chi=chi_fun(theta),
        chi_stderr=chi_se,
        shots=shots,
        covariance=cov,
    )
    if bootstrap:
        est.xi_stderr, est.chi_stderr = _bootstrap(records, int(bootstrap), seed)
        est.method = f"bootstrap({int(bootstrap)})"
    return est


def _bootstrap(records, n_resamples, seed):
    rng = rng_stream(seed, 99)
    n = records.n_qubits
    tallies = {a: records.tally(a) for a in AXES}
    xis, chis = [], []
    for _ in range(n_resamples):
        entries = []
        for axis, (outcomes, counts) in tallies.items():
            s = counts.sum()
            redraw = rng.multinomial(s, counts / s)
            entries += [(axis, o, int(c)) for o, c in zip(outcomes, redraw)]
        theta, _, _, _ = _statistics(MeasurementRecordSet(tuple(entries), n))
        m = _moments_from(theta, n)
        xis.append(xi_of(m))
        chis.append(chi_of(m))
    return float(np.std(xis, ddof=1)), float(np.std(chis, ddof=1))


# ---------------------------------------------------------------------------
# CSV ingestion
# ---------------------------------------------------------------------------

def parse_csv(text, n_qubits=None):
    """Parse measurement CSV text; see :func:`ingest_csv`."""
    meta_lines = []
    declared = None
    header_seen = False
    entries = []
    rows = []
    for lineno, raw in enumerate(text.split("\n"), start=1):
        line = raw.rstrip("\r")
        if not line.strip():
            continue
        if line.lstrip().startswith("#"):
            body = line.lstrip()[1:].strip()
            key, sep, value = body.partition("=")
            if sep and key.strip() == "n_qubits":
                try:
                    declared = int(value.strip())
                except ValueError:
                    raise ParseError(f"bad n_qubits value {value.strip()!r}", lineno) from None
            elif body:
                meta_lines.append(body)
            continue
        if not header_seen:
            if [c.strip() for c in line.split(",")] != ["axis", "outcome", "count"]:
                raise ParseError("expected header 'axis,outcome,count'", lineno)
            header_seen = True
            continue
        rows.append((lineno, line))

    if n_qubits is None:
        n_qubits = declared
    elif declared is not None and declared != n_qubits:
        raise ValidationError(f"file declares n_qubits={declared}, caller expects {n_qubits}")
    if n_qubits is None:
        raise ParseError("missing '# n_qubits=<N>' comment")
    if not header_seen:
        raise ParseError("missing header line")

    for lineno, line in rows:
        fields = next(csv.reader([line]))
        if len(fields) != 3:
            raise ParseError(f"expected 3 fields, got {len(fields)}", lineno)
        axis, outcome_s, count_s = (f.strip() for f in fields)
        if axis not in AXES:
            raise ParseError(f"unknown axis {axis!r}", lineno)
        try:
            outcome = float(outcome_s)
        except ValueError:
            raise ParseError(f"outcome {outcome_s!r} is not a number", lineno) from None
        try:
            count = int(count_s)
        except ValueError:
            raise ParseError(f"count {count_s!r} is not an integer", lineno) from None
        if count < 0:
            raise ValidationError(f"negative count {count}", lineno)
        _validate_outcome(outcome, n_qubits, lineno)
        entries.append((axis, outcome, count))
    return MeasurementRecordSet(tuple(entries), n_qubits, "\n".join(meta_lines))


def ingest_csv(path, n_qubits=None):
    """Read a measurement CSV file into a :class:`MeasurementRecordSet`.

    ``n_qubits`` may come from the ``# n_qubits=<N>`` comment, the argument,
    or both (they must agree).
    """
    with open(path, encoding="utf-8", newline="") as fh:
        return parse_csv(fh.read(), n_qubits)
