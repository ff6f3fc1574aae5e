"""Brute-force checks of the separability bounds and of the analytic noise
estimates against exact simulation."""

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .config import MAX_BRUTEFORCE_N, TOL
from .criteria import chi, partition_bound, xi
from .errors import InputError, SizeError
from .noise import (
    NoiseModel,
    apply_noise,
    jz_variance_bitflip,
    xi_bitflip_estimate,
    xi_dephasing_estimate,
    xi_dephasing_printed,
    xi_dephasing_sum,
)
from .spin_core import _check_dense_cap, compute_moments
from .states import BiseparableSpec, BlockProduct, make_dicke, random_biseparable_spec


# ---------------------------------------------------------------------------
# partitions
# ---------------------------------------------------------------------------

def integer_partitions(n, cap):
    """Yield the partitions of ``n`` with parts ``<= cap`` as non-increasing tuples."""
    if n == 0:
        yield ()
        return
    for first in range(min(n, cap), 0, -1):
        for rest in integer_partitions(n - first, first):
            yield (first,) + rest


def partition_bruteforce(n_qubits, m, chi_value):
    """Exact maximum of ``sum m_i (m_i + 2) / 4 - chi / k`` over all partitions
    of N with parts ``<= m - 1``, as a :class:`~fractions.Fraction`."""
    if n_qubits > MAX_BRUTEFORCE_N:
        raise SizeError(f"enumeration limited to N <= {MAX_BRUTEFORCE_N}")
    if n_qubits < 1 or m < 2:
        raise InputError("need N >= 1 and m >= 2")
    chi_value = Fraction(chi_value)
    return max(
        Fraction(sum(p * (p + 2) for p in parts), 4) - chi_value / len(parts)
        for parts in integer_partitions(n_qubits, m - 1)
    )


def bruteforce_bound(n_qubits, m, chi_value):
    """``f(m, chi)`` from full enumeration."""
    return Fraction(4, n_qubits) * partition_bruteforce(n_qubits, m, chi_value) - 1


def partition_cross_check(n_max=12, chis=None):
    """Compare the extremal-partition optimizer with enumeration for all
    ``N <= n_max`` and ``m = 2..N``. Returns ``(max_abs_diff, n_cases)``."""
    worst, cases = 0.0, 0
    for n in range(1, n_max + 1):
        chi_grid = chis if chis is not None else (-2, 0, 0.5, 1, Fraction(n * n, 8))
        for m in range(2, n + 1):
            for c in chi_grid:
                diff = abs(float(bruteforce_bound(n, m, c)) - partition_bound(n, m, float(c)))
                worst = max(worst, diff)
                cases += 1
    return worst, cases


# ---------------------------------------------------------------------------
# violation search
# ---------------------------------------------------------------------------

def bound_margin(state, bound_m):
    """``xi - f(bound_m, chi)`` for a state."""
    mom = compute_moments(state)
    return xi(mom) - partition_bound(state.n_qubits, bound_m, chi(mom))


def _spec_margin(spec, bound_m):
    return bound_margin(spec.state(dense_cap=spec.n_qubits), bound_m)


def _coordinates(spec):
    coords = [(i, j) for i, c in enumerate(spec.components) for j in range(len(c.blocks))]
    if len(spec.components) > 1:
        coords.append(None)
    return coords


def _perturb(spec, coord, step, rng):
    """Copy of ``spec`` with one block amplitude (or the weight vector) moved."""
    comps = list(spec.components)
    weights = np.asarray(spec.weights, dtype=float)
    if coord is None:
        logw = np.log(np.maximum(weights, 1e-300)) + step * rng.standard_normal(len(weights))
        w = np.exp(logw - logw.max())
        return BiseparableSpec(w / w.sum(), comps)
    i, j = coord
    amps = list(comps[i].amplitudes)
    a = amps[j] + step * (rng.standard_normal(amps[j].shape) + 1j * rng.standard_normal(amps[j].shape))
    amps[j] = a / np.linalg.norm(a)
    comps[i] = BlockProduct(comps[i].blocks, amps)
    return BiseparableSpec(weights, comps)


def hill_climb(spec, bound_m, rng, iterations=200, step=0.5, shrink=0.95, grow=1.1):
    """Derivative-free coordinate ascent of the bound margin.

    Each iteration perturbs one block state (or the mixture weights) of the
    current best point; the step grows on success and shrinks on failure. The
    block layout is held fixed.
    """
    best = spec
    best_margin = _spec_margin(spec, bound_m)
    coords = _coordinates(spec)
    for _ in range(iterations):
        coord = coords[rng.integers(len(coords))]
        trial = _perturb(best, coord, step, rng)
        margin = _spec_margin(trial, bound_m)
        if margin > best_margin:
            best, best_margin = trial, margin
            step = min(step * grow, 2.0)
        else:
            step = max(step * shrink, 1e-3)
    return best, best_margin


@dataclass
class ViolationReport:
    n_qubits: int
    block_cap: int
    bound_m: int
    trials: int
    optimized: int
    seed: int
    max_margin: float
    argmax_trial: int
    margins: np.ndarray = field(repr=False)
    optimized_margins: list = field(default_factory=list)
    offending_spec: BiseparableSpec = field(default=None, repr=False)
    sanity: bool = False
    reference: dict = field(default_factory=dict)

    @property
    def violated(self):
        return (not self.sanity) and self.max_margin > TOL.violation

    def as_dict(self):
        out = {
            "kind": "violation_search",
            "sanity": self.sanity,
            "n_qubits": self.n_qubits,
            "block_cap": self.block_cap,
            "bound_m": self.bound_m,
            "trials": self.trials,
            "optimized": self.optimized,
            "seed": self.seed,
            "max_margin": self.max_margin,
            "argmax_trial": self.argmax_trial,
            "mean_margin": float(np.mean(self.margins)) if len(self.margins) else None,
            "max_optimized_margin": max(self.optimized_margins) if self.optimized_margins else None,
            "tolerance": TOL.violation,
            "violated": self.violated,
        }
        if self.reference:
            out["reference"] = dict(self.reference)
        if self.offending_spec is not None and self.max_margin > TOL.violation:
            out["offending_state"] = self.offending_spec.as_dict()
        return out


def bound_violation_search(
    n_qubits,
    block_cap,
    trials,
    seed,
    optimize=False,
    n_components=4,
    optimize_starts=1,
    iterations=200,
    bound_m=None,
    dense_cap=None,
):
    """Sample block-product mixtures with blocks of at most ``block_cap`` qubits
    and record the largest ``xi - f(bound_m, chi)`` (``bound_m`` defaults to
    ``block_cap + 1``). With ``optimize`` the best ``optimize_starts`` samples
    are refined by :func:`hill_climb`.

    Trial ``t`` draws from its own stream spawned from ``seed``, so the report
    does not depend on evaluation order; ties resolve to the lower trial index.
    """
    _check_dense_cap(n_qubits, dense_cap)
    if not 1 <= block_cap <= n_qubits:
        raise InputError("block_cap must lie in 1..N")
    bound_m = block_cap + 1 if bound_m is None else bound_m
    streams = np.random.SeedSequence(int(seed) % 2**64).spawn(trials)
    specs, margins = [], np.empty(trials)
    for t, ss in enumerate(streams):
        rng = np.random.default_rng(ss)
        spec = random_biseparable_spec(n_qubits, block_cap, n_components, rng)
        specs.append(spec)
        margins[t] = _spec_margin(spec, bound_m)

    order = np.argsort(-margins, kind="stable")
    best_t = int(order[0])
    best_margin, best_spec = float(margins[best_t]), specs[best_t]
    optimized = []
    if optimize:
        opt_streams = np.random.SeedSequence([int(seed) % 2**64, 1]).spawn(optimize_starts)
        for start, ss in zip(order[:optimize_starts], opt_streams):
            spec, margin = hill_climb(specs[start], bound_m, np.random.default_rng(ss), iterations)
            optimized.append(float(margin))
            if margin > best_margin:
                best_margin, best_spec, best_t = float(margin), spec, int(start)
    return ViolationReport(
        n_qubits=n_qubits,
        block_cap=block_cap,
        bound_m=bound_m,
        trials=trials,
        optimized=len(optimized),
        seed=int(seed),
        max_margin=best_margin,
        argmax_trial=best_t,
        margins=margins,
        optimized_margins=optimized,
        offending_spec=best_spec,
    )


def sanity_search(n_qubits, trials, seed, optimize=True, **kwargs):
    """Unconstrained states tested against the ``(N-1)``-block bound.

    Positive margins are expected here and are not violations. The ideal
    ``|N/2, 0>`` Dicke margin is attached for reference.
    """
    report = bound_violation_search(
        n_qubits, n_qubits, trials, seed, optimize=optimize, bound_m=n_qubits, **kwargs
    )
    report.sanity = True
    if n_qubits % 2 == 0:
        dicke_margin = bound_margin(make_dicke(n_qubits, 0), n_qubits)
        report.reference = {"dicke_margin": dicke_margin}
        report.max_margin = max(report.max_margin, dicke_margin)
    return report


# ---------------------------------------------------------------------------
# analytic estimates vs exact channels
# ---------------------------------------------------------------------------

def estimate_vs_exact(n_qubits, noise_grid, dense_cap=None):
    """Exact xi of the noisy ``|N/2, 0>`` Dicke state next to the analytic
    estimates, one row per noise model."""
    if n_qubits % 2:
        raise InputError("|N/2, 0> needs even N")
    _check_dense_cap(n_qubits, dense_cap)
    dicke = make_dicke(n_qubits, 0)
    rows = []
    for model in noise_grid:
        p, pb = model.dephasing_rate, model.bitflip_rate
        mom = compute_moments(apply_noise(dicke, model, dense_cap))
        exact = xi(mom)
        row = {
            "n_qubits": n_qubits,
            "dephasing_rate": p,
            "bitflip_rate": pb,
            "xi_exact": exact,
            "jz_variance_exact": mom.jz_variance,
            "jz_variance_formula": jz_variance_bitflip(n_qubits, pb),
        }
        if pb == 0:
            row["xi_dephasing_sum"] = xi_dephasing_sum(n_qubits, p)
            row["xi_dephasing_closed"] = xi_dephasing_estimate(n_qubits, p)
            row["xi_dephasing_printed"] = xi_dephasing_printed(n_qubits, p)
            row["abs_dev_sum"] = abs(exact - row["xi_dephasing_sum"])
            row["rel_dev_sum"] = row["abs_dev_sum"] / max(abs(exact), 1e-300)
            row["abs_dev_printed"] = abs(exact - row["xi_dephasing_printed"])
        if 0 < pb < 1:
            est = xi_bitflip_estimate(n_qubits, pb)
            row["xi_bitflip_estimate"] = est
            row["abs_dev_bitflip"] = abs(exact - est)
            row["rel_dev_bitflip"] = abs(exact - est) / max(abs(exact), 1e-300)
            row["large_n_regime"] = bool(n_qubits * pb * (1 - pb) > 0.25)
        rows.append(row)
    return rows


def dephasing_grid(step=0.1):
    return [NoiseModel(float(p), 0.0) for p in np.round(np.arange(0, 1 + step / 2, step), 10)]
