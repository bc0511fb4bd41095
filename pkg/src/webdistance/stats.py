"""Monte Carlo experiments over many independent sign fields.

Sample s of an experiment with seed S always uses the field (or SJ weight
table) keyed by ``derive_seed(S, s)``, and compiled batches write one output
slot per sample, so results are identical for any thread count.
"""

from __future__ import annotations

import csv
import io
import json
import math
from contextlib import contextmanager
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numba
import numpy as np
from scipy import stats as sps

from . import _kernels, _rng
from .lpp import BrownianGrid, brownian_lpp_dp, brownian_lpp_skorokhod
from .tracy_widom import TWReference, tw_reference
from .web import DomainError

SCHEMA_VERSION = 1
ENGINES = ("web", "sj")


@dataclass
class ExperimentResult:
    name: str
    parameters: dict
    seed: int
    n_samples: int
    statistics: dict
    samples: dict[str, list] = field(default_factory=dict)

    def to_dict(self) -> dict:
        from . import __version__
        return {
            "schema": SCHEMA_VERSION,
            "version": __version__,
            "name": self.name,
            "seed": self.seed,
            "parameters": self.parameters,
            "n_samples": self.n_samples,
            "statistics": self.statistics,
            "samples": self.samples,
        }

    def to_json(self) -> str:
        return json.dumps(_plain(self.to_dict()), sort_keys=True, indent=2) + "\n"

    def to_csv(self) -> str:
        """Sample columns in insertion order (or statistic/value rows when there are
        no samples), after two ``#`` provenance lines."""
        from . import __version__
        buf = io.StringIO()
        buf.write(f"# name={self.name} version={__version__} seed={self.seed}\n")
        buf.write("# parameters=" + json.dumps(_plain(self.parameters), sort_keys=True) + "\n")
        writer = csv.writer(buf, lineterminator="\n")
        if self.samples:
            cols = list(self.samples)
            writer.writerow(cols)
            for row in zip(*(self.samples[c] for c in cols)):
                writer.writerow([_cell(x) for x in _plain(list(row))])
        else:
            writer.writerow(["statistic", "value"])
            for key, val in sorted(_flatten(_plain(self.statistics)).items()):
                writer.writerow([key, _cell(val)])
        return buf.getvalue()


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_plain(v) for v in obj.tolist()]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return x if math.isfinite(x) else str(x)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def _flatten(d, prefix=""):
    out = {}
    for k, v in d.items():
        name = f"{prefix}{k}"
        if isinstance(v, dict):
            out.update(_flatten(v, name + "."))
        elif isinstance(v, list):
            out[name] = json.dumps(v)
        else:
            out[name] = v
    return out


def _cell(x):
    return repr(x) if isinstance(x, float) else x


@dataclass
class RunningMoments:
    """Count, mean and sum of squared deviations; ``merge`` is order-insensitive
    up to float rounding, so callers merge chunks in a fixed order."""

    count: int = 0
    mean: float = 0.0
    m2: float = 0.0

    def push(self, values) -> RunningMoments:
        x = np.asarray(values, dtype=float)
        if x.size:
            self.merge(RunningMoments(x.size, float(x.mean()), float(((x - x.mean()) ** 2).sum())))
        return self

    def merge(self, other: RunningMoments) -> RunningMoments:
        n = self.count + other.count
        if n == 0:
            return self
        delta = other.mean - self.mean
        self.mean += delta * other.count / n
        self.m2 += other.m2 + delta * delta * self.count * other.count / n
        self.count = n
        return self

    @property
    def variance(self) -> float:
        return self.m2 / (self.count - 1) if self.count > 1 else math.nan

    @property
    def sd(self) -> float:
        return math.sqrt(self.variance)


def ks_distance(samples, reference) -> float:
    """Sup distance between the empirical CDF of ``samples`` and ``reference``.

    ``reference`` is a TWReference (continuous CDF) or another sample set
    (two-sample statistic).
    """
    x = np.asarray(samples, dtype=float)
    if x.size == 0:
        raise DomainError("empty sample set")
    if isinstance(reference, TWReference):
        return float(sps.kstest(x, reference.cdf).statistic)
    y = np.asarray(reference, dtype=float)
    if y.size == 0:
        raise DomainError("empty reference sample")
    return float(sps.ks_2samp(x, y).statistic)


@contextmanager
def thread_budget(threads: int | None):
    """Run compiled batches on ``threads`` workers (capped at the launched pool)."""
    if threads is None:
        yield
        return
    if threads < 1:
        raise DomainError("thread count must be positive")
    prev = numba.get_num_threads()
    numba.set_num_threads(min(threads, numba.config.NUMBA_NUM_THREADS))
    try:
        yield
    finally:
        numba.set_num_threads(prev)


def _summary(x) -> dict:
    m = RunningMoments().push(x)
    return {"mean": m.mean, "sd": m.sd}


# ----- half-line distance from the origin ------------------------------------

def kappa(eta: float) -> float:
    return (1 - math.sqrt(1 - eta * eta)) / 2


def fluctuation_prefactor(eta: float) -> float:
    return (1 - eta * eta) ** (1 / 6) / (eta / 2) ** (2 / 3)


def halfline_threshold(eta: float, n: int) -> int:
    """Largest v < -eta*n with (n, v) even: the open half-line (-inf, -eta*n)."""
    bound = -Fraction(str(eta)) * n
    v = math.ceil(bound) - 1
    if (n + v) % 2:
        v -= 1
    return v


def _check_eta(eta, n, count):
    if not 0 < eta < 1:
        raise DomainError("eta must lie in (0, 1)")
    if n < 1:
        raise DomainError("n must be positive")
    if count < 1:
        raise DomainError("need at least one sample")


def halfline_distances(eta: float, n: int, count: int, seed: int, engine: str = "web") -> np.ndarray:
    """D(0,0; n, (-inf, -eta n)) for ``count`` independent environments."""
    _check_eta(eta, n, count)
    v = halfline_threshold(eta, n)
    if engine == "web":
        keys = _rng.sample_keys(seed, count, _rng.STREAM_SIGN)
        return _kernels.batch_halfline_distance(keys, n, v, 0, 0)
    if engine == "sj":
        keys = _rng.sample_keys(seed, count, _rng.STREAM_SJ)
        return _kernels.batch_sj_halfline_distance(keys, n, v, 0, 0)
    raise DomainError(f"unknown engine {engine!r}; expected one of {ENGINES}")


def standardize_distance(d, eta: float, n: int) -> np.ndarray:
    return fluctuation_prefactor(eta) * n ** (-1 / 3) * (kappa(eta) * n - np.asarray(d, dtype=float))


def unstandardize(s, eta: float, n: int) -> np.ndarray:
    """Inverse of ``standardize_distance``."""
    return kappa(eta) * n - np.asarray(s, dtype=float) * n ** (1 / 3) / fluctuation_prefactor(eta)


def tw_fluctuation_experiment(eta: float, n: int, count: int, seed: int, engine: str = "web",
                              threads: int | None = None,
                              reference: TWReference | None = None) -> ExperimentResult:
    ref = reference or tw_reference()
    with thread_budget(threads):
        d = halfline_distances(eta, n, count, seed, engine)
    s = standardize_distance(d, eta, n)
    st = _summary(s)
    st.update({
        "ks": ks_distance(s, ref),
        "tw_mean": ref.mean,
        "tw_sd": ref.sd,
        "distance_mean": float(d.mean()),
        "kappa": kappa(eta),
        "prefactor": fluctuation_prefactor(eta),
    })
    params = {"eta": eta, "n": n, "engine": engine, "threshold": halfline_threshold(eta, n)}
    return ExperimentResult("fluctuations", params, seed, count, st,
                            {"distance": d.tolist(), "standardized": s.tolist()})


def engine_ks(eta: float, n: int, count: int, seed: int, threads: int | None = None) -> float:
    """Two-sample KS between web and SJ standardized fluctuations."""
    with thread_budget(threads):
        a = halfline_distances(eta, n, count, seed, "web")
        b = halfline_distances(eta, n, count, seed, "sj")
    return ks_distance(a, b)


def shape_experiment(eta: float, n: int, count: int, seed: int,
                     threads: int | None = None) -> ExperimentResult:
    with thread_budget(threads):
        d = halfline_distances(eta, n, count, seed, "web")
    ratio = d / n
    st = _summary(ratio)
    half = 1.96 * st["sd"] / math.sqrt(count) if count > 1 else math.inf
    st.update({
        "ci95": [st["mean"] - half, st["mean"] + half],
        "kappa": kappa(eta),
        "abs_error": abs(st["mean"] - kappa(eta)),
    })
    params = {"eta": eta, "n": n, "threshold": halfline_threshold(eta, n)}
    return ExperimentResult("shape", params, seed, count, st, {"distance": d.tolist()})


def disk_shape_sweep(n: int, count: int, seed: int, fractions: Sequence[float] = (0.3, 0.5, 0.7, 1.0),
                     radius: int | None = None, threads: int | None = None) -> ExperimentResult:
    """Radius-k ball boundary of the point target (n, 0) at times n - t, t = f * n.

    The asymptotic half-width is sqrt(4 k t - 4 k^2), i.e. the disk
    t - sqrt(t^2 - x^2) <= 2k in unscaled coordinates.
    """
    k = n // 10 if radius is None else radius
    if n < 2 or count < 1 or not fractions:
        raise DomainError("need n >= 2, a sample and at least one fraction")
    ts = np.array(sorted({int(round(f * n)) for f in fractions}), dtype=np.int64)
    if ts.min() < 2 * k or ts.max() > n:
        raise DomainError("fractions must give 2k <= t <= n")
    keys = _rng.sample_keys(seed, count, _rng.STREAM_SIGN)
    with thread_budget(threads):
        up, lo, meet = _kernels.batch_interval_curves(keys, n, 0, 0, 0, k, n - ts)
    rows = []
    for q, t in enumerate(ts.tolist()):
        predicted = math.sqrt(4 * k * t - 4 * k * k)
        width = (up[:, q] - lo[:, q]) / 2
        rows.append({
            "t": t, "predicted": predicted, "mean_half_width": float(width.mean()),
            "rel_error": abs(width.mean() - predicted) / predicted,
            "eta": predicted / t,
        })
    st = {"radius": k, "rows": rows, "max_rel_error": max(r["rel_error"] for r in rows),
          "met_before_horizon": int(np.sum(meet >= 0))}
    return ExperimentResult("disk-shape", {"n": n, "radius": k, "times": ts.tolist()}, seed, count, st)


# ----- horizontal distance -----------------------------------------------------

def horizontal_distances(n: int, count: int, seed: int) -> np.ndarray:
    """D(0,0; n,0) for ``count`` environments; n must be even."""
    if n < 1 or n % 2:
        raise DomainError("n must be a positive even integer")
    keys = _rng.sample_keys(seed, count, _rng.STREAM_SIGN)
    return _kernels.batch_interval_distance(keys, n, 0, 0, 0, 0)


def horizontal_scan(n_list: Sequence[int], count: int, seed: int,
                    threads: int | None = None) -> ExperimentResult:
    if not n_list:
        raise DomainError("empty n_list")
    if count < 1:
        raise DomainError("need at least one sample")
    rows = []
    samples = {}
    with thread_budget(threads):
        for idx, n in enumerate(n_list):
            d = horizontal_distances(n, count, _rng.derive_seed(seed, idx))
            samples[f"n={n}"] = d.tolist()
            q1, med, q3 = np.percentile(d, [25, 50, 75])
            ratio = d / math.log(n)
            spread = q3 - q1
            z = (d - med) / spread if spread > 0 else np.zeros(len(d))
            rows.append({
                "n": n, "median": float(med), "q1": float(q1), "q3": float(q3),
                "mean": float(d.mean()), "min": int(d.min()), "max": int(d.max()),
                "zero_fraction": float(np.mean(d == 0)),
                "min_ratio": float(ratio.min()), "max_ratio": float(ratio.max()),
                "skew": float(sps.skew(z)) if len(d) > 2 else math.nan,
                "excess_kurtosis": float(sps.kurtosis(z)) if len(d) > 3 else math.nan,
            })
    logs = np.log(np.asarray(n_list, dtype=float))
    meds = np.array([r["median"] for r in rows])
    st = {"rows": rows}
    if len(rows) >= 2 and np.ptp(logs) > 0:
        fit = sps.linregress(logs, meds)
        r2 = fit.rvalue ** 2 if np.ptp(meds) > 0 else 0.0
        st.update({"slope": fit.slope, "intercept": fit.intercept, "r_squared": r2})
        # diagnostic only: the sample means are not quantized like the medians
        means = np.array([r["mean"] for r in rows])
        st["mean_r_squared"] = sps.linregress(logs, means).rvalue ** 2
    st["min_ratio"] = min(r["min_ratio"] for r in rows)
    st["max_ratio"] = max(r["max_ratio"] for r in rows)
    st["medians_nondecreasing"] = bool(np.all(np.diff(meds) >= 0))
    return ExperimentResult("horizontal-scan", {"n_list": list(n_list)}, seed, count, st, samples)


# ----- distributional identity with the SJ model -----------------------------

def lpp_law_experiment(radii: Sequence[int], depth: int, count: int, seed: int, v: int = 0,
                       threads: int | None = None) -> ExperimentResult:
    """r_k^+(i) from the web vs 2T(j-k-i, k) + v + 2k + i - j + 1 from SJ samples.

    Target (-inf, v] at time j = depth, evaluation time i = 0.
    """
    j = depth
    if (j + v) % 2:
        raise DomainError("depth + v must be even")
    rows = []
    samples = {}
    with thread_budget(threads):
        for idx, k in enumerate(radii):
            if not 0 <= k <= j:
                raise DomainError("need 0 <= k <= depth")
            sub = _rng.derive_seed(seed, idx)
            web = _kernels.batch_halfline_value(
                _rng.sample_keys(sub, count, _rng.STREAM_SIGN), j, v, 0, k)
            t = _kernels.batch_sj_last_passage(
                _rng.sample_keys(sub, count, _rng.STREAM_SJ), j - k, k)
            sj = 2 * t + v + 2 * k - j + 1
            samples[f"web_k={k}"] = web.tolist()
            samples[f"sj_k={k}"] = sj.tolist()
            rows.append({"k": k, "ks": ks_distance(web, sj),
                         "web_mean": float(web.mean()), "sj_mean": float(sj.mean())})
    st = {"rows": rows, "max_ks": max(r["ks"] for r in rows)}
    return ExperimentResult("lpp-law", {"radii": list(radii), "depth": depth, "v": v},
                            seed, count, st, samples)


# ----- Brownian last passage ------------------------------------------------

def blpp_check(grids: int, points: int, n_max: int, seed: int) -> ExperimentResult:
    """Max |DP - Skorokhod| over random grids and all levels 1..n_max.

    Boundaries alternate between an independent Brownian path and a
    Brownian path plus a random drift and a random step, to exercise
    general f.
    """
    if grids < 1 or points < 1 or n_max < 1:
        raise DomainError("grids, points and n_max must be positive")
    worst = 0.0
    step = 1.0 / max(points - 1, 1)
    for g in range(grids):
        sub = _rng.derive_seed(seed, g)
        grid = BrownianGrid.sample(n_max, points, step, sub)
        if g % 2:
            rng = np.random.default_rng(sub + 1)
            t = np.arange(points) * step
            f = grid.boundary + rng.normal() * t + rng.normal() * (t > rng.random())
            grid = BrownianGrid(step, grid.lines, f)
        for n in range(1, n_max + 1):
            diff = np.max(np.abs(brownian_lpp_dp(grid, n) - brownian_lpp_skorokhod(grid, n)))
            worst = max(worst, float(diff))
    return ExperimentResult("blpp-check", {"grids": grids, "points": points, "n_max": n_max},
                            seed, grids, {"max_abs_diff": worst})
