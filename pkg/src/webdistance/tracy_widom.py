"""Tracy-Widom GUE distribution F_2.

Primary route: det(I - K_Airy) on L^2(s, inf) by Gauss-Legendre
discretization of the Fredholm determinant.  Independent route for
checking: the Hastings-McLeod solution of Painleve II,
F_2(s) = exp(-int_s^inf (x - s) q(x)^2 dx).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import integrate, special

from .web import DomainError

TABLE_LO = -6.0
TABLE_HI = 4.0
TABLE_STEP = 0.01

# quadrature settings for the determinant; Ai(s + 16) is below 1e-30 for s >= -8
_SPAN = 16.0
_NODES = 80


@lru_cache(maxsize=None)
def _legendre(m: int):
    return np.polynomial.legendre.leggauss(m)


def _airy_kernel(x: np.ndarray) -> np.ndarray:
    ai, aip, _, _ = special.airy(x)
    dx = x[:, None] - x[None, :]
    same = np.abs(dx) < 1e-12
    with np.errstate(divide="ignore", invalid="ignore"):
        k = (ai[:, None] * aip[None, :] - aip[:, None] * ai[None, :]) / dx
    diag = aip ** 2 - x * ai ** 2
    k[same] = np.broadcast_to(diag[:, None], k.shape)[same]
    return k


def f2_fredholm(s, nodes: int = _NODES) -> np.ndarray:
    """F_2(s) for each s, via an m-point Gauss-Legendre Fredholm determinant."""
    t, w = _legendre(nodes)
    out = []
    for s0 in np.atleast_1d(np.asarray(s, dtype=float)):
        x = s0 + (t + 1) * _SPAN / 2
        sw = np.sqrt(w * _SPAN / 2)
        mat = np.eye(nodes) - sw[:, None] * _airy_kernel(x) * sw[None, :]
        out.append(np.linalg.det(mat))
    return np.clip(np.array(out), 0.0, 1.0)


def f2_painleve(s, start: float = 8.0) -> np.ndarray:
    """F_2(s) from Painleve II integrated backwards from Ai initial data at ``start``.

    Accurate to about 1e-9 for s >= -8; the Hastings-McLeod solution is
    unstable under backward integration much further than that.
    """
    s = np.atleast_1d(np.asarray(s, dtype=float))
    if s.min() < -10:
        raise DomainError("Painleve route is unreliable below -10")
    ai, aip, _, _ = special.airy(start)

    def rhs(x, y):
        q, dq, _, _ = y
        return [dq, x * q + 2 * q ** 3, -q * q, -x * q * q]

    # y[2] = int_x^start q^2, y[3] = int_x^start x q^2 (integrating downwards flips sign)
    order = np.sort(np.unique(s))[::-1]
    evals = [x for x in order if x < start]
    sol = integrate.solve_ivp(rhs, (start, min(order.min(), start)), [ai, aip, 0.0, 0.0],
                              method="DOP853", rtol=1e-12, atol=1e-16,
                              t_eval=evals if evals else None, dense_output=False)
    vals = {}
    for x, i2, i3 in zip(sol.t, sol.y[2], sol.y[3]):
        vals[x] = np.exp(-(i3 - x * i2))
    return np.array([vals.get(x, 1.0) for x in s])


@dataclass(frozen=True, eq=False)
class TWReference:
    """Tabulated F_2 with interpolation, moments and inverse-transform sampling."""

    x: np.ndarray
    cdf_values: np.ndarray
    mean: float
    sd: float

    def __post_init__(self):
        if np.any(np.diff(self.cdf_values) < 0):
            raise DomainError("reference CDF must be nondecreasing")

    def cdf(self, x) -> np.ndarray:
        """Piecewise-linear F_2; 0 below and 1 above the table."""
        return np.interp(x, self.x, self.cdf_values, left=0.0, right=1.0)

    def ppf(self, p) -> np.ndarray:
        # the table is strictly increasing on its range, so the inverse is a plain interp
        return np.interp(p, self.cdf_values, self.x)

    def sample(self, count: int, seed: int) -> np.ndarray:
        u = np.random.default_rng(seed).random(count)
        return self.ppf(u)

    def table(self) -> list[tuple[float, float]]:
        return list(zip(self.x.tolist(), self.cdf_values.tolist()))


def _moments(lo: float = -9.0, hi: float = 7.0, nodes: int = 400) -> tuple[float, float]:
    # E[X] = hi - int_lo^hi F, E[X^2] = hi^2 - 2 int_lo^hi x F, up to tails below 1e-15
    t, w = _legendre(nodes)
    x = lo + (t + 1) * (hi - lo) / 2
    w = w * (hi - lo) / 2
    f = f2_fredholm(x)
    mean = hi - np.sum(w * f)
    second = hi ** 2 - 2 * np.sum(w * x * f)
    return float(mean), float(np.sqrt(second - mean ** 2))


@lru_cache(maxsize=1)
def tw_reference() -> TWReference:
    """The default table on [-6, 4] at step 0.01 (built once per process)."""
    n = int(round((TABLE_HI - TABLE_LO) / TABLE_STEP)) + 1
    x = np.linspace(TABLE_LO, TABLE_HI, n)
    f = np.maximum.accumulate(f2_fredholm(x))
    mean, sd = _moments()
    return TWReference(x, f, mean, sd)
