"""Rolling-particle (continuous-time) value functions.

Time is measured as *time remaining*: ``alpha(t)`` is the expected weight an
algorithm collects from the last ``t`` units of the unit interval when it has
not yet taken a cycle edge, and ``beta(t)`` is the extra weight it can still
collect after taking one.  Jackpot weight accrues at rate ``lam`` while the
particle keeps rolling and important agents arrive at rate ``theta``.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np


def beta(t, theta):
    """Probability that the opposite edge shows up within ``t``: 1 - exp(-theta t / 2)."""
    out = 1.0 - np.exp(-theta * np.asarray(t, dtype=float) / 2.0)
    return float(out) if out.ndim == 0 else out


def stop_value(t, theta):
    """Value of stopping on an important agent with ``t`` left: 1 + beta(t)."""
    return 1.0 + beta(t, theta)


def s_star(lam: float, theta: float) -> float:
    """First crossing of alpha and 1 + beta, (2/theta) ln((theta + sqrt(4 lam^2 + theta^2)) / (2 lam)).

    Callers must check the result is below 1 before treating it as a crossing.
    """
    if lam <= 0 or theta <= 0:
        raise ValueError("lam and theta must be positive")
    return 2.0 / theta * math.log((theta + math.sqrt(4 * lam * lam + theta * theta)) / (2 * lam))


def _alpha_before(t, lam, theta):
    return lam / theta * (1 - np.exp(-theta * t)) + 2 * (1 - np.exp(-theta * t / 2))


def alpha_closed(t, lam: float, theta: float):
    """Closed-form alpha: the pre-crossing expression up to s*, linear with slope lam after."""
    sc = min(s_star(lam, theta), 1.0)
    t_arr = np.asarray(t, dtype=float)
    before = _alpha_before(np.minimum(t_arr, sc), lam, theta)
    out = np.where(t_arr <= sc, before, _alpha_before(sc, lam, theta) + lam * (t_arr - sc))
    return float(out) if out.ndim == 0 else out


def alpha_one(lam: float, theta: float) -> float:
    """alpha(1) = 2 - exp(-theta s*/2) + lam (1 - s*), valid when s* < 1."""
    sc = s_star(lam, theta)
    if sc >= 1:
        raise ValueError(f"s* = {sc} is not below 1 for lam={lam}, theta={theta}")
    return 2 - math.exp(-theta * sc / 2) + lam * (1 - sc)


@dataclass
class AlphaSolution:
    grid: np.ndarray
    alpha_values: np.ndarray
    s_star: float
    lam: float
    theta: float

    @property
    def one_plus_beta(self) -> np.ndarray:
        return stop_value(self.grid, self.theta)

    def at(self, t: float) -> float:
        return float(np.interp(t, self.grid, self.alpha_values))

    def to_csv(self, path=None) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t", "alpha", "one_plus_beta"])
        for t, a, b in zip(self.grid, self.alpha_values, self.one_plus_beta):
            w.writerow([repr(float(t)), repr(float(a)), repr(float(b))])
        text = buf.getvalue()
        if path is not None:
            with open(path, "w", newline="") as fh:
                fh.write(text)
        return text


def alpha_rhs(t: float, a: float, lam: float, theta: float) -> float:
    # differentiated integral equation: alpha' = lam + theta (max(alpha, 1 + beta) - alpha)
    return lam + theta * (max(a, 2.0 - math.exp(-theta * t / 2.0)) - a)


def _rk4(t: float, a: float, h: float, lam: float, theta: float) -> float:
    f = alpha_rhs
    k1 = f(t, a, lam, theta)
    k2 = f(t + h / 2, a + h / 2 * k1, lam, theta)
    k3 = f(t + h / 2, a + h / 2 * k2, lam, theta)
    k4 = f(t + h, a + h * k3, lam, theta)
    return a + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)


def alpha_numeric(lam: float, theta: float, step: float = 1e-4, split_kink: bool = True) -> AlphaSolution:
    """Integrate alpha on [0, 1] with classical fixed-step RK4 from alpha(0) = 0.

    The right-hand side has a kink where alpha meets 1 + beta.  With
    ``split_kink`` the single step containing the crossing is split at the
    root (found by bisection on the sub-step length), which keeps the
    fourth-order global error; the output grid is unchanged.  The crossing
    is reported as the first grid point with alpha >= 1 + beta (1.0 if none).
    """
    if not 0 < step <= 1e-2:
        raise ValueError(f"step must lie in (0, 1e-2], got {step}")
    n = int(round(1.0 / step))
    h = 1.0 / n
    grid = np.linspace(0.0, 1.0, n + 1)
    values = np.empty(n + 1)
    a = 0.0
    values[0] = a
    crossed = False
    for i in range(n):
        t = i * h
        nxt = _rk4(t, a, h, lam, theta)
        if split_kink and not crossed and nxt >= 2.0 - math.exp(-theta * (t + h) / 2.0):
            crossed = True
            gap = lambda tau: _rk4(t, a, tau, lam, theta) - (2.0 - math.exp(-theta * (t + tau) / 2.0))
            lo, hi = 0.0, h
            for _ in range(60):
                mid = (lo + hi) / 2
                if gap(mid) >= 0:
                    hi = mid
                else:
                    lo = mid
            mid_value = _rk4(t, a, hi, lam, theta)
            nxt = _rk4(t + hi, mid_value, h - hi, lam, theta) if hi < h else mid_value
        a = nxt
        if not math.isfinite(a):
            raise FloatingPointError(f"alpha became non-finite at t={t + h}")
        values[i + 1] = a
    hit = np.nonzero(values >= stop_value(grid, theta))[0]
    sc = float(grid[hit[0]]) if hit.size else 1.0
    return AlphaSolution(grid, values, sc, lam, theta)


def single_choice_value(lam: float, T: float | None = None) -> float:
    """Expected online weight of the single-item rolling particle.

    The important agent is taken iff it arrives at time >= T, giving
    lam T + lam (1 - T^2) / 2 + 1 - T.  The default T* = 1 - 1/lam is the
    maximizer, where the value is lam + 1/(2 lam).
    """
    if lam < 1:
        raise ValueError(f"lam must be at least 1, got {lam}")
    if T is None:
        return lam + 1 / (2 * lam)
    if not 0 <= T <= 1:
        raise ValueError(f"T must lie in [0,1], got {T}")
    return lam * T + lam * (1 - T * T) / 2 + 1 - T


def single_choice_threshold(lam: float) -> float:
    return 1 - 1 / lam
