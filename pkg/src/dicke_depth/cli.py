"""Command-line front end: ``certify``, ``certify-data``, ``sweep`` and ``oracle``.

Configuration is a JSON document (a previously written report also works, its
``config`` block is reused); command-line flags override file values. Reports
are JSON with a fixed key order, or flat CSV.
"""

import argparse
import csv
import io
import json
import platform
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np
import scipy

from . import __version__
from .config import DEFAULT_DENSE_CAP
from .criteria import certify_depth
from .errors import ConfigError, DickeDepthError, SizeError
from .measurement import estimate_moments, generator_info, ingest_csv, sample_all_axes
from .noise import (
    NoiseModel,
    apply_noise,
    xi_bitflip_estimate,
    xi_dephasing_estimate,
)
from .oracle import (
    bound_violation_search,
    dephasing_grid,
    estimate_vs_exact,
    partition_cross_check,
    sanity_search,
)
from .spin_core import compute_moments
from .states import StateSpec, make_dicke

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_PARSE = 3
EXIT_SIZE = 4
EXIT_VIOLATION = 5
FORMATS = ("json", "csv")


@dataclass
class RunConfig:
    state: StateSpec = field(default_factory=lambda: StateSpec("dicke", 4, {"jz_twice": 0}))
    noise: NoiseModel = field(default_factory=NoiseModel)
    shots: int = 0
    seed: int = 0
    dense_cap: int = DEFAULT_DENSE_CAP
    output: str = None
    format: str = None
    sweep: dict = field(default_factory=dict)
    oracle: dict = field(default_factory=dict)
    workers: int = 1

    def validate(self):
        if self.shots < 0:
            raise ConfigError("shots must be non-negative")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must be an unsigned 64-bit integer")
        if self.dense_cap < 1:
            raise ConfigError("dense_cap must be positive")
        if self.format is not None and self.format not in FORMATS:
            raise ConfigError(f"format must be one of {FORMATS}")
        if self.workers < 1:
            raise ConfigError("workers must be positive")
        return self

    def needs_dense(self):
        return self.state.needs_dense or not self.noise.is_identity

    def check_size(self):
        n = self.state.n_qubits
        if self.needs_dense() and n > self.dense_cap:
            raise SizeError(
                f"N={n} needs the dense engine (state kind {self.state.kind!r}"
                f"{', noise' if not self.noise.is_identity else ''}) but dense_cap={self.dense_cap}"
            )

    def as_dict(self):
        return {
            "state": self.state.to_dict(),
            "noise": self.noise.as_dict(),
            "shots": self.shots,
            "seed": self.seed,
            "dense_cap": self.dense_cap,
            "format": self.format,
            "sweep": self.sweep,
            "oracle": self.oracle,
        }

    @classmethod
    def from_dict(cls, d):
        d = dict(d.get("config", d)) if "report" in d else dict(d)
        known = {"state", "noise", "shots", "seed", "dense_cap", "output", "format",
                 "sweep", "oracle", "workers"}
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        try:
            kwargs = {}
            if "state" in d:
                kwargs["state"] = StateSpec.from_dict(d["state"])
            if "noise" in d:
                kwargs["noise"] = NoiseModel(**d["noise"])
            for key in ("shots", "seed", "dense_cap", "workers"):
                if key in d:
                    kwargs[key] = int(d[key])
            for key in ("output", "format"):
                if key in d:
                    kwargs[key] = d[key]
            for key in ("sweep", "oracle"):
                if key in d:
                    kwargs[key] = dict(d[key])
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad config: {exc}") from None
        return cls(**kwargs)


def provenance(seed=None):
    info = {
        "package": "dicke_depth",
        "version": __version__,
        "python": platform.python_version(),
        "scipy": scipy.__version__,
    }
    info.update(generator_info())
    if seed is not None:
        info["seed"] = seed
    return info


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def _certificate(n_qubits, moments, result, estimate=None):
    out = {
        "n_qubits": n_qubits,
        "moments_are_estimates": estimate is not None,
        "moments": moments.as_dict(),
    }
    if estimate is not None:
        out["estimate"] = estimate.as_dict()
    out["criteria"] = result.as_dict()
    out["certified_depth"] = {
        "criterion1": result.criterion1_depth,
        "criterion2": result.certified_depth,
    }
    if estimate is not None:
        out["criteria"]["notes"].append(
            f"certified on point estimates; xi = {estimate.xi:.6g} +/- {estimate.xi_stderr:.3g}, "
            f"chi = {estimate.chi:.6g} +/- {estimate.chi_stderr:.3g}"
        )
    return out


def cmd_certify(config):
    """State -> noise -> exact or sampled moments -> certificate."""
    config.validate()
    config.check_size()
    state = config.state.build(config.dense_cap)
    if not config.noise.is_identity:
        state = apply_noise(state, config.noise, config.dense_cap)
    estimate = None
    if config.shots:
        records = sample_all_axes(state, config.shots, config.seed, config.dense_cap)
        estimate = estimate_moments(records)
        moments = estimate.moments
    else:
        moments = compute_moments(state)
    result = certify_depth(moments)
    return {
        "report": "certificate",
        "config": config.as_dict(),
        "provenance": provenance(config.seed),
        **_certificate(state.n_qubits, moments, result, estimate),
    }


def cmd_certify_data(path, n_qubits=None, bootstrap=0, seed=0):
    """Certificate from measured records in the CSV exchange format."""
    records = ingest_csv(path, n_qubits)
    estimate = estimate_moments(records, bootstrap=bootstrap, seed=seed)
    result = certify_depth(estimate.moments)
    return {
        "report": "certificate",
        "source": {"csv": str(path), "metadata": records.metadata},
        "provenance": provenance(),
        **_certificate(records.n_qubits, estimate.moments, result, estimate),
    }


def _grid(sweep):
    def values(key, default):
        v = sweep.get(key, default)
        return list(v) if isinstance(v, (list, tuple)) else [v]

    points = []
    for n in values("n_qubits", [8]):
        for p in values("dephasing_rate", [0.0]):
            for pb in values("bitflip_rate", [0.0]):
                for shots in values("shots", [0]):
                    points.append((int(n), float(p), float(pb), int(shots)))
    return points


def _sweep_point(args):
    (n, p, pb, shots), jz_twice, seed, index, dense_cap = args
    model = NoiseModel(p, pb)
    state = make_dicke(n, jz_twice)
    if not model.is_identity:
        state = apply_noise(state, model, dense_cap)
    exact = compute_moments(state)
    result = certify_depth(exact)
    row = {
        "n_qubits": n,
        "dephasing_rate": p,
        "bitflip_rate": pb,
        "shots": shots,
        "xi_exact": result.xi,
        "xi_estimate": "",
        "chi": result.chi,
        "depth": result.certified_depth,
    }
    if jz_twice == 0:
        if pb == 0:
            row["xi_estimate"] = xi_dephasing_estimate(n, p)
        elif p == 0 and pb < 1:
            row["xi_estimate"] = xi_bitflip_estimate(n, pb)
    if shots:
        records = sample_all_axes(state, shots, seed, dense_cap, stream=(index,))
        est = estimate_moments(records)
        sampled = certify_depth(est.moments)
        row.update(chi=sampled.chi, depth=sampled.certified_depth,
                   xi_measured=est.xi, xi_stderr=est.xi_stderr)
    return row


def cmd_sweep(config):
    """One row per grid point of exact xi, estimates, chi and certified depth."""
    config.validate()
    sweep = config.sweep
    points = _grid(sweep)
    jz_twice = int(sweep.get("jz_twice", 0))
    too_big = [
        pt for pt in points if (pt[1] or pt[2]) and pt[0] > config.dense_cap
    ]
    if too_big:
        raise SizeError(f"grid points exceed dense_cap={config.dense_cap}: {too_big}")
    jobs = [(pt, jz_twice, config.seed, i, config.dense_cap) for i, pt in enumerate(points)]
    if config.workers > 1:
        with ProcessPoolExecutor(config.workers) as pool:
            rows = list(pool.map(_sweep_point, jobs))
    else:
        rows = [_sweep_point(j) for j in jobs]
    if any(r["shots"] for r in rows):
        for r in rows:
            r.setdefault("xi_measured", "")
            r.setdefault("xi_stderr", "")
    return {
        "report": "sweep",
        "config": config.as_dict(),
        "provenance": provenance(config.seed),
        "rows": rows,
    }


def cmd_oracle(config):
    """Dispatch to the oracle checks; ``violated`` is set when a bound fails."""
    config.validate()
    spec = dict(config.oracle)
    mode = spec.get("mode", "violation")
    n = int(spec.get("n_qubits", 6))
    body = {"mode": mode}
    violated = False
    if mode in ("violation", "sanity"):
        kwargs = dict(
            trials=int(spec.get("trials", 1000)),
            seed=config.seed,
            optimize=bool(spec.get("optimize", False)),
            n_components=int(spec.get("n_components", 4)),
            optimize_starts=int(spec.get("optimize_starts", 1)),
            iterations=int(spec.get("iterations", 200)),
            dense_cap=config.dense_cap,
        )
        if mode == "sanity":
            report = sanity_search(n, **kwargs)
        else:
            report = bound_violation_search(n, int(spec.get("block_cap", 2)), **kwargs)
        body.update(report.as_dict())
        violated = report.violated
    elif mode == "partition":
        n_max = int(spec.get("n_max", 12))
        worst, cases = partition_cross_check(n_max)
        violated = worst > 1e-12
        body.update({"n_max": n_max, "cases": cases, "max_abs_diff": worst,
                     "tolerance": 1e-12, "violated": violated})
    elif mode == "estimates":
        step = float(spec.get("step", 0.1))
        grid = [NoiseModel(**g) for g in spec["grid"]] if "grid" in spec else dephasing_grid(step)
        rows = estimate_vs_exact(n, grid, config.dense_cap)
        body.update({
            "n_qubits": n,
            "rows": rows,
            "notes": [
                "xi_dephasing_sum evaluates the binomial average term by term; it equals "
                "N(1-p)^2 + 1 - p^2, while exact dephasing of |N/2,0> gives 1 + N(1-p)^2",
                "at p = 1 the exact value is 1 and the binomial sum gives 0",
                "xi_dephasing_printed is the linear form (1-p)N + 1 - p^2, which matches neither",
            ],
        })
    else:
        raise ConfigError(f"unknown oracle mode {mode!r}")
    return {
        "report": "oracle",
        "config": config.as_dict(),
        "provenance": provenance(config.seed),
        **body,
    }


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------

def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    return obj


def _flatten(obj, prefix=""):
    if isinstance(obj, dict):
        for k, v in obj.items():
            yield from _flatten(v, f"{prefix}.{k}" if prefix else str(k))
    elif isinstance(obj, list) and obj and isinstance(obj[0], (dict, list)):
        for i, v in enumerate(obj):
            yield from _flatten(v, f"{prefix}[{i}]")
    else:
        yield prefix, obj


def render(report, fmt):
    report = _jsonable(report)
    if fmt == "json":
        return json.dumps(report, indent=2, allow_nan=True) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    if report.get("report") == "sweep" or "rows" in report:
        rows = report["rows"]
        writer.writerow(list(rows[0]))
        for r in rows:
            writer.writerow([r[k] for k in rows[0]])
    else:
        writer.writerow(["key", "value"])
        for k, v in _flatten(report):
            writer.writerow([k, json.dumps(v) if isinstance(v, (list, dict)) else v])
    return buf.getvalue()


def emit(report, fmt, out=None):
    text = render(report, fmt)
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return text


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def build_parser():
    parser = argparse.ArgumentParser(
        prog="dicke-depth",
        description="Certify entanglement depth near Dicke states from collective-spin moments.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON run configuration (or an earlier report)")
    common.add_argument("--seed", type=int)
    common.add_argument("--shots", type=int)
    common.add_argument("--dense-cap", type=int)
    common.add_argument("--out")
    common.add_argument("--format", choices=FORMATS)
    common.add_argument("--workers", type=int)

    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("certify", parents=[common], help="certify a simulated state")
    p.add_argument("--n-qubits", type=int, help="shortcut: Dicke state with this N")
    p.add_argument("--jz-twice", type=int, default=None, help="shortcut: Dicke level n")
    p.add_argument("--dephasing", type=float)
    p.add_argument("--bitflip", type=float)

    p = sub.add_parser("certify-data", parents=[common], help="certify measured CSV records")
    p.add_argument("csv")
    p.add_argument("--n-qubits", type=int)
    p.add_argument("--bootstrap", type=int, default=0, help="bootstrap resamples for errors")

    sub.add_parser("sweep", parents=[common], help="noise sweep table")

    p = sub.add_parser("oracle", parents=[common], help="brute-force bound checks")
    p.add_argument("--mode", choices=("violation", "sanity", "partition", "estimates"))
    p.add_argument("--n-qubits", type=int)
    p.add_argument("--block-cap", type=int)
    p.add_argument("--trials", type=int)
    p.add_argument("--optimize", action="store_true", default=None)
    p.add_argument("--optimize-starts", type=int)
    p.add_argument("--n-max", type=int)
    return parser


def load_config(args):
    data = {}
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                data = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from None
    config = RunConfig.from_dict(data)
    overrides = {
        k: getattr(args, a)
        for k, a in (("seed", "seed"), ("shots", "shots"), ("dense_cap", "dense_cap"),
                     ("output", "out"), ("format", "format"), ("workers", "workers"))
        if getattr(args, a, None) is not None
    }
    config = replace(config, **overrides)
    if args.command == "certify":
        if args.n_qubits is not None or args.jz_twice is not None:
            n = args.n_qubits if args.n_qubits is not None else config.state.n_qubits
            config.state = StateSpec("dicke", n, {"jz_twice": args.jz_twice or 0})
        if args.dephasing is not None or args.bitflip is not None:
            config.noise = NoiseModel(
                args.dephasing if args.dephasing is not None else config.noise.dephasing_rate,
                args.bitflip if args.bitflip is not None else config.noise.bitflip_rate,
            )
    if args.command == "oracle":
        for key in ("mode", "n_qubits", "block_cap", "trials", "optimize",
                    "optimize_starts", "n_max"):
            v = getattr(args, key, None)
            if v is not None:
                config.oracle[key] = v
    return config.validate()


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = load_config(args)
        if args.command == "certify":
            report = cmd_certify(config)
        elif args.command == "certify-data":
            report = cmd_certify_data(args.csv, args.n_qubits, args.bootstrap, config.seed)
        elif args.command == "sweep":
            report = cmd_sweep(config)
        else:
            report = cmd_oracle(config)
        fmt = config.format or ("csv" if args.command == "sweep" else "json")
        emit(report, fmt, config.output)
    except DickeDepthError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    if report.get("violated"):
        print("bound violation found", file=sys.stderr)
        return EXIT_VIOLATION
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
