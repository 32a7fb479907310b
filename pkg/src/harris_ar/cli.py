"""Command-line front end.

    harris-ar pmf "harris(a=2,k=2)" --n-max 5
    harris-ar eval "harris_max_id(H=frechet(alpha=1),k=2)" --at 0.5,1,2
    harris-ar sample "harris(a=2,k=2)" --n 10 --seed 1
    harris-ar simulate --config model3.cfg --out traj.csv
    harris-ar verify identities
    harris-ar verify trajectory --input traj.csv --target "exponential()"

Exit codes: 0 success, 1 a verification failed, 2 usage or config error.
The seed is taken from --seed, else HARRIS_AR_SEED, else the config file.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from pathlib import Path
from typing import Optional

import numpy as np

from . import ar_sim as A
from . import catalog as C
from . import dist_core as dc
from . import samplers as S
from . import suites as U
from . import verify as V
from .errors import ConfigError, HarrisARError

SEED_ENV = "HARRIS_AR_SEED"
EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


# -- config files ------------------------------------------------------------


def read_config(path: str | Path) -> dict[str, str]:
    """Flat ``key = value`` lines; blank lines and ``#`` comments are skipped."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc.strerror}") from exc
    items: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        key = key.strip()
        if not sep or not key:
            raise ConfigError(key or f"line {lineno}", f"expected key = value on line {lineno}")
        if key in items:
            raise ConfigError(key, f"duplicate key on line {lineno}")
        items[key] = value.strip()
    return items


def _parse_seed(text: str, source: str) -> int:
    try:
        seed = int(text, 0)
    except ValueError as exc:
        raise ConfigError("seed", f"{source} value {text!r} is not an integer") from exc
    if not 0 <= seed < 2**64:
        raise ConfigError("seed", f"{source} value must be an unsigned 64-bit integer")
    return seed


def resolve_seed(flag: Optional[int], config: Optional[dict] = None, default: int = 0) -> int:
    if flag is not None:
        return _parse_seed(str(flag), "--seed")
    env = os.environ.get(SEED_ENV)
    if env not in (None, ""):
        return _parse_seed(env, SEED_ENV)
    if config and "seed" in config:
        return _parse_seed(config["seed"], "config")
    return default


# -- output ------------------------------------------------------------------


def emit(text: str, out: Optional[str]):
    """Write to ``out`` atomically (temp file + rename), or to stdout."""
    if out is None:
        sys.stdout.write(text)
        return
    target = Path(out)
    fd, tmp = tempfile.mkstemp(dir=target.parent if str(target.parent) else ".", prefix=f".{target.name}.")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, target)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise


def _num(x) -> str:
    return repr(float(x))


def _table(header: list[str], rows, fmt: str) -> str:
    if fmt == "json":
        return json.dumps([dict(zip(header, r)) for r in rows]) + "\n"
    lines = [",".join(header)] + [",".join(str(v) for v in r) for r in rows]
    return "\n".join(lines) + "\n"


# -- commands ----------------------------------------------------------------


def cmd_pmf(args) -> int:
    law = C.resolve(args.descriptor)
    if args.n_max < 0:
        raise UsageError("--n-max must be >= 0")
    rows = []
    if args.n_max > 0:
        coefs = dc.pgf_coefficients(law.need("pgf"), args.n_max).coefficients
        rows = [(n, _num(c)) for n, c in enumerate(coefs) if c != 0]
    else:
        law.need("pgf")
    emit(_table(["n", "probability"], rows, args.format), args.out)
    return EXIT_OK


def _points(args) -> np.ndarray:
    if args.at is not None:
        try:
            return np.array([float(v) for v in args.at.split(",")])
        except ValueError as exc:
            raise UsageError(f"--at expects comma-separated numbers, got {args.at!r}") from exc
    lo, hi, n = args.grid
    return np.linspace(float(lo), float(hi), int(n))


def cmd_eval(args) -> int:
    law = C.resolve(args.descriptor)
    kind = args.kind
    if kind is None:
        kind = next((k for k in ("df", "pgf", "lt", "cf") if getattr(law, k) is not None), None)
        if kind is None:
            raise UsageError(f"{law.descriptor} has nothing to evaluate")
    fn = law.need(kind)
    x = _points(args)
    vals = np.asarray(fn(x))
    if np.iscomplexobj(vals):
        rows = [(_num(a), _num(v.real), _num(v.imag)) for a, v in zip(x, vals)]
        header = ["x", "real", "imag"]
    else:
        rows = [(_num(a), _num(v)) for a, v in zip(x, vals)]
        header = ["x", kind]
    emit(_table(header, rows, args.format), args.out)
    return EXIT_OK


def cmd_sample(args) -> int:
    law = C.resolve(args.descriptor)
    sampler = law.need("sampler")
    seed = resolve_seed(args.seed)
    x = sampler.draw(S.RngStream(seed), args.n)
    fmt = (lambda v: str(int(v))) if sampler.integer else _num
    emit(_table(["index", "value"], [(i, fmt(v)) for i, v in enumerate(x)], args.format), args.out)
    return EXIT_OK


def load_model_config(path: str, seed_flag: Optional[int]) -> A.ModelConfig:
    items = read_config(path)
    items["seed"] = str(resolve_seed(seed_flag, items))
    return A.ModelConfig.from_mapping(items)


def cmd_simulate(args) -> int:
    config = load_model_config(args.config, args.seed)
    trajs = A.simulate(config)
    if args.format == "json":
        payload = {
            "config": config.as_mapping(),
            "trajectories": [
                {
                    "replicate": t.replicate,
                    "values": [_num(v) for v in t.values],
                    "selector": t.selector.tolist(),
                }
                for t in trajs
            ],
        }
        text = json.dumps(payload) + "\n"
    else:
        text = A.trajectories_to_csv(trajs, config.k)
    emit(text, args.out)
    return EXIT_OK


def verify_trajectory(path: str, target: str, time: Optional[int], seed: Optional[int]):
    """One-sample KS of the cross-replicate values at ``time`` (default: last) against ``target``."""
    try:
        trajs = A.trajectories_from_csv(Path(path).read_text())
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from exc
    except (KeyError, ValueError) as exc:
        raise UsageError(f"{path} is not a trajectory CSV: {exc}") from exc
    n = min(t.n_steps for t in trajs) - 1 if time is None else time
    x = A.pooled_at(trajs, n)
    return [V.ks_one_sample(x, C.resolve(target).need("df"), seed, f"trajectory_ks:n={n}")]


def cmd_verify(args) -> int:
    if args.suite == "trajectory":
        if not args.input or not args.target:
            raise UsageError("verify trajectory needs --input and --target")
        results = verify_trajectory(args.input, args.target, args.time, args.seed)
        emit("".join(r.to_json() + "\n" for r in results), args.out)
        return EXIT_OK if all(r.passed for r in results) else EXIT_FAIL
    if args.suite not in U.SUITE_NAMES:
        raise UsageError(f"unknown suite {args.suite!r}; choose from {', '.join(U.SUITE_NAMES)}")
    items = read_config(args.config) if args.config else {}
    unknown = set(items) - {"seed", "quick", "workers"}
    if unknown:
        raise ConfigError(sorted(unknown)[0], "unknown key for verify")
    seed = resolve_seed(args.seed, items)
    quick = args.quick or items.get("quick", "false").lower() in ("1", "true", "yes")
    results = U.run_suite(args.suite, seed=seed, quick=quick, workers=args.workers)
    if args.format == "csv":
        header = ["test_id", "statistic", "threshold", "n_samples", "pass", "seed", "notes"]
        rows = [
            (r.test_id, _num(r.statistic), _num(r.threshold), r.n_samples, str(r.passed).lower(), r.seed, json.dumps(r.notes))
            for r in results
        ]
        text = _table(header, rows, "csv")
    else:
        text = "".join(r.to_json() + "\n" for r in results)
    emit(text, args.out)
    return EXIT_OK if all(r.passed for r in results) else EXIT_FAIL


# -- parser ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="harris-ar", description="Harris AR(1) simulation and verification toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, fmt="csv"):
        p.add_argument("--out", help="output path (default stdout)")
        p.add_argument("--format", choices=("csv", "json"), default=fmt)

    p = sub.add_parser("pmf", help="probabilities P(N = n), n <= n_max, of a PGF law")
    p.add_argument("descriptor")
    p.add_argument("--n-max", type=int, default=10)
    common(p)
    p.set_defaults(func=cmd_pmf)

    p = sub.add_parser("eval", help="evaluate a law's d.f., PGF, LT or CF")
    p.add_argument("descriptor")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--at", help="comma-separated points")
    g.add_argument("--grid", nargs=3, metavar=("LO", "HI", "N"))
    p.add_argument("--kind", choices=("df", "pgf", "lt", "cf"))
    common(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("sample", help="draw variates from a law")
    p.add_argument("descriptor")
    p.add_argument("--n", type=int, default=10)
    p.add_argument("--seed", type=int)
    common(p)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("simulate", help="simulate trajectories from a model config")
    p.add_argument("--config", required=True)
    p.add_argument("--seed", type=int)
    common(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("verify", help="run a verification suite")
    p.add_argument("suite", help=f"one of {', '.join(U.SUITE_NAMES)}, or trajectory")
    p.add_argument("--config")
    p.add_argument("--seed", type=int)
    p.add_argument("--quick", action="store_true", help="reduced sample sizes")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--input", help="trajectory CSV (suite 'trajectory')")
    p.add_argument("--target", help="target d.f. descriptor (suite 'trajectory')")
    p.add_argument("--time", type=int, help="time index to pool (suite 'trajectory', default last)")
    common(p, fmt="json")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"harris-ar: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except HarrisARError as exc:
        print(f"harris-ar: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
