"""Command-line runner.  Every subcommand writes one JSON or CSV file (or
stdout) carrying the package version, the seed and all parameters.

Thread count: ``--threads``, else ``$WEBDIST_THREADS``, else 1.  Results do
not depend on it.
"""

from __future__ import annotations

import argparse
import json
import os
import shlex
import subprocess
import sys
from dataclasses import dataclass, field

THREADS_ENV = "WEBDIST_THREADS"
_CHILD_ENV = "_WEBDIST_POOL_SIZED"

SUBCOMMANDS = ("disk-boundary", "distance-field", "fluctuations", "shape", "horizontal-scan",
               "lpp-law", "crosscheck", "blpp-check")


class UsageError(Exception):
    pass


def _pair_list(text: str, length: int | None = None) -> list[int]:
    try:
        vals = [int(x) for x in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")
    if length is not None and len(vals) != length:
        raise argparse.ArgumentTypeError(f"expected {length} integers, got {text!r}")
    return vals


def _int_list(text: str) -> list[int]:
    if ":" in text:
        lo, hi = (int(x) for x in text.split(":"))
        return [2 ** e for e in range(lo, hi + 1)]
    return _pair_list(text)


def _target_args(p: argparse.ArgumentParser) -> None:
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--point", type=lambda s: _pair_list(s, 2), metavar="J,N",
                   help="point target {J} x {N}")
    g.add_argument("--interval", type=lambda s: _pair_list(s, 3), metavar="J,U,V",
                   help="target {J} x [U, V]")
    g.add_argument("--half-line", type=lambda s: _pair_list(s, 2), metavar="J,V",
                   help="target {J} x (-inf, V]")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="webdist", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def add(name, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--output", "-o", default=None, help="file path (default: stdout)")
        p.add_argument("--format", choices=("json", "csv"), default="json")
        p.add_argument("--threads", type=int, default=None)
        return p

    p = add("disk-boundary", "boundary curves r_k^-/r_k^+ for k = 0..radius")
    _target_args(p)
    p.add_argument("--radius", type=int, required=True)
    p.add_argument("--depth", type=int, default=64,
                   help="follow curves at most this far back (required for half-lines)")

    p = add("distance-field", "web distance of every even point in a window")
    _target_args(p)
    p.add_argument("--window", type=lambda s: _pair_list(s, 3), required=True,
                   metavar="T_MIN,N_MIN,N_MAX", help="the window ends at the target time")

    p = add("fluctuations", "standardized D(0,0; n, (-inf, -eta n)) samples")
    p.add_argument("--eta", type=float, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--samples", type=int, required=True)
    p.add_argument("--engine", choices=("web", "sj"), default="web")

    p = add("shape", "mean D(0,0; n, (-inf, -eta n)) / n, or the disk-shape sweep")
    p.add_argument("--eta", type=float, default=None)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--samples", type=int, required=True)
    p.add_argument("--sweep", action="store_true",
                   help="ball boundary of the point (n, 0) at radius n/10 instead")

    p = add("horizontal-scan", "D(0,0; n,0) quantiles against log n")
    p.add_argument("--n-list", type=_int_list, required=True,
                   help="comma-separated even n, or A:B for 2^A..2^B")
    p.add_argument("--samples", type=int, required=True)

    p = add("lpp-law", "web curve values against the SJ last-passage map")
    p.add_argument("--radii", type=_pair_list, required=True)
    p.add_argument("--depth", type=int, required=True)
    p.add_argument("--samples", type=int, required=True)
    p.add_argument("--v", type=int, default=0)

    p = add("crosscheck", "oracle / local rule / recursion ball agreement")
    p.add_argument("--window", type=int, default=8, help="columns (exhaustive) or size (random)")
    mode = p.add_mutually_exclusive_group(required=True)
    mode.add_argument("--exhaustive", action="store_true")
    mode.add_argument("--random", type=int, metavar="TRIALS")
    p.add_argument("--widths", type=_pair_list, default=[0, 2, 4],
                   help="target interval widths for --exhaustive")

    p = add("blpp-check", "Brownian LPP: chain DP against iterated reflection")
    p.add_argument("--grids", type=int, default=1000)
    p.add_argument("--points", type=int, default=1000)
    p.add_argument("--levels", type=int, default=10)
    return parser


@dataclass
class RunConfig:
    subcommand: str
    params: dict = field(default_factory=dict)
    seed: int = 0
    output: str | None = None
    format: str = "json"
    threads: int | None = None

    @classmethod
    def from_argv(cls, argv: list[str]) -> RunConfig:
        ns = vars(build_parser().parse_args(argv))
        sub = ns.pop("subcommand")
        common = {k: ns.pop(k) for k in ("seed", "output", "format", "threads")}
        return cls(sub, ns, **common)

    def to_argv(self) -> list[str]:
        argv = [self.subcommand, "--seed", str(self.seed), "--format", self.format]
        if self.output is not None:
            argv += ["--output", self.output]
        if self.threads is not None:
            argv += ["--threads", str(self.threads)]
        for key, val in self.params.items():
            flag = "--" + key.replace("_", "-")
            if val is None or val is False:
                continue
            if val is True:
                argv.append(flag)
            elif isinstance(val, list):
                argv += [flag, ",".join(str(x) for x in val)]
            else:
                argv += [flag, repr(val) if isinstance(val, float) else str(val)]
        return argv

    def to_text(self) -> str:
        return shlex.join(self.to_argv())

    @classmethod
    def from_text(cls, text: str) -> RunConfig:
        return cls.from_argv(shlex.split(text))


def _target(params):
    from .oracle import TargetSpec
    if params.get("point"):
        j, n = params["point"]
        return TargetSpec.point(j, n)
    if params.get("interval"):
        return TargetSpec.interval(*params["interval"])
    j, v = params["half_line"]
    return TargetSpec.half_line(j, v)


def _disk_boundary(cfg: RunConfig):
    from .boundary import boundaries
    from .stats import ExperimentResult
    from .web import DomainError, SignField
    p = cfg.params
    if p["radius"] < 0 or p["depth"] < 1:
        raise DomainError("radius must be >= 0 and depth >= 1")
    target = _target(p)
    pairs = boundaries(SignField(cfg.seed), target, p["radius"], horizon=target.time - p["depth"])
    cols = {"k": [], "i": [], "r_minus": [], "r_plus": []}
    for pair in pairs:
        for i in pair.times:
            cols["k"].append(pair.k)
            cols["i"].append(i)
            cols["r_minus"].append(None if pair.lower is None else pair.r_minus(i))
            cols["r_plus"].append(pair.r_plus(i))
    meets = {pair.k: pair.meet_time for pair in pairs}
    return ExperimentResult("disk-boundary", _provenance(p), cfg.seed, len(pairs),
                            {"meet_times": meets}, cols)


def _distance_field(cfg: RunConfig):
    from .oracle import Window, distance_field
    from .stats import ExperimentResult
    from .web import SignField
    p = cfg.params
    target = _target(p)
    t_min, n_min, n_max = p["window"]
    dfield = distance_field(SignField(cfg.seed), target, Window(t_min, target.time, n_min, n_max))
    cols = {"i": [], "n": [], "distance": []}
    for i, n, d in dfield.rows():
        cols["i"].append(i)
        cols["n"].append(n)
        cols["distance"].append(d if d != float("inf") else "inf")
    return ExperimentResult("distance-field", _provenance(p), cfg.seed, len(cols["i"]), {}, cols)


def _provenance(params: dict) -> dict:
    return {k: v for k, v in params.items() if v is not None}


def execute(cfg: RunConfig):
    """Run the experiment; returns (result, exit status)."""
    from . import crosscheck, stats
    from .web import DomainError
    p = cfg.params
    t = cfg.threads
    sub = cfg.subcommand
    if sub == "disk-boundary":
        return _disk_boundary(cfg), 0
    if sub == "distance-field":
        return _distance_field(cfg), 0
    if sub == "fluctuations":
        return stats.tw_fluctuation_experiment(p["eta"], p["n"], p["samples"], cfg.seed,
                                               p["engine"], threads=t), 0
    if sub == "shape":
        if p["sweep"]:
            return stats.disk_shape_sweep(p["n"], p["samples"], cfg.seed, threads=t), 0
        if p["eta"] is None:
            raise DomainError("--eta is required unless --sweep is given")
        return stats.shape_experiment(p["eta"], p["n"], p["samples"], cfg.seed, threads=t), 0
    if sub == "horizontal-scan":
        return stats.horizontal_scan(p["n_list"], p["samples"], cfg.seed, threads=t), 0
    if sub == "lpp-law":
        return stats.lpp_law_experiment(p["radii"], p["depth"], p["samples"], cfg.seed,
                                        v=p["v"], threads=t), 0
    if sub == "crosscheck":
        if p["exhaustive"]:
            reports = [crosscheck.exhaustive_crosscheck(0, w, p["window"]) for w in p["widths"]]
        else:
            reports = [crosscheck.random_crosscheck(p["random"], cfg.seed, p["window"])]
        body = [r.as_dict() for r in reports]
        ok = all(r.ok for r in reports)
        res = stats.ExperimentResult("crosscheck", _provenance(p), cfg.seed,
                                     sum(r.configurations for r in reports),
                                     {"reports": body, "ok": ok})
        return res, 0 if ok else 1
    if sub == "blpp-check":
        res = stats.blpp_check(p["grids"], p["points"], p["levels"], cfg.seed)
        return res, 0 if res.statistics["max_abs_diff"] <= 1e-9 else 1
    raise UsageError(f"unknown subcommand {sub}")


def _summary_line(res) -> str:
    keys = ("mean", "sd", "ks", "abs_error", "r_squared", "max_ks", "max_abs_diff",
            "max_rel_error", "ok")
    bits = [f"{k}={res.statistics[k]:.6g}" if isinstance(res.statistics[k], float)
            else f"{k}={res.statistics[k]}" for k in keys if k in res.statistics]
    return f"{res.name}: seed={res.seed} samples={res.n_samples} " + " ".join(bits)


def _resolve_threads(cfg: RunConfig) -> int:
    if cfg.threads is not None:
        return cfg.threads
    env = os.environ.get(THREADS_ENV)
    if env is None:
        return 1
    try:
        return int(env)
    except ValueError:
        raise UsageError(f"{THREADS_ENV} must be an integer, got {env!r}")


def _writable(path: str) -> bool:
    parent = os.path.dirname(os.path.abspath(path))
    if os.path.isdir(path) or not os.path.isdir(parent):
        return False
    return os.access(path if os.path.exists(path) else parent, os.W_OK)


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        cfg = RunConfig.from_argv(argv)
    except SystemExit as exc:  # argparse already printed the diagnostic
        return int(exc.code or 0)
    try:
        if cfg.output is not None and not _writable(cfg.output):
            # fail before a long run rather than after it
            print(f"webdist: cannot write {cfg.output}", file=sys.stderr)
            return 3
        cfg.threads = _resolve_threads(cfg)
        if cfg.threads < 1:
            raise UsageError("thread count must be positive")
        import numba
        if cfg.threads > numba.config.NUMBA_NUM_THREADS and not os.environ.get(_CHILD_ENV):
            # the worker pool size is fixed when numba loads; size it in a child
            env = dict(os.environ, NUMBA_NUM_THREADS=str(cfg.threads), **{_CHILD_ENV: "1"})
            return subprocess.call([sys.executable, "-m", "webdistance", *cfg.to_argv()], env=env)
        result, status = execute(cfg)
    except (UsageError, ValueError) as exc:
        print(f"webdist: error: {exc}", file=sys.stderr)
        return 2
    text = result.to_json() if cfg.format == "json" else result.to_csv()
    if cfg.output is None:
        sys.stdout.write(text)
        print(_summary_line(result), file=sys.stderr)
    else:
        try:
            with open(cfg.output, "w", newline="") as fh:
                fh.write(text)
        except OSError as exc:
            print(f"webdist: cannot write {cfg.output}: {exc.strerror}", file=sys.stderr)
            return 3
        print(_summary_line(result))
    return status


if __name__ == "__main__":
    sys.exit(main())
