"""
Grid Module
Maturity-time and running-time discretizations, index maps and the Simpson grid scaling
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Tuple

import numpy as np

from src.errors import ConfigError, NonCommensurateGrid, OutOfRange, StepOrderViolation

GRID_TOLERANCE = 1e-9
ROUNDING_MODES = ("nearest", "ceil")


def _snap_floor(q: float) -> int:
    """floor(q), except values within tolerance of an integer snap onto it"""
    nearest = round(q)
    if abs(q - nearest) <= GRID_TOLERANCE * max(1.0, abs(q)):
        return int(nearest)
    return math.floor(q)


def _integer_ratio(span: float, step: float, what: str) -> int:
    count = round(span / step)
    if count < 1 or abs(count * step - span) > GRID_TOLERANCE * span:
        raise NonCommensurateGrid(
            f"{what} step {step!r} does not divide the interval length {span!r}"
        )
    return int(count)


@dataclass(frozen=True)
class MaturityGrid:
    """Uniform T-grid T_i = t0 + i*delta, extended to N_prime nodes past T_star"""

    t0: float
    T_star: float
    delta: float
    N: int
    N_prime: int

    def __post_init__(self):
        if self.N_prime < self.N:
            raise ConfigError(f"N_prime={self.N_prime} is below N={self.N}")

    def node(self, i: int) -> float:
        return self.t0 + i * self.delta

    @property
    def nodes(self) -> np.ndarray:
        return self.t0 + np.arange(self.N_prime + 1) * self.delta


@dataclass(frozen=True)
class TimeGrid:
    """Uniform t-grid t_k = t0 + k*h with t_M = t_star"""

    t0: float
    t_star: float
    h: float
    M: int

    def node(self, k: int) -> float:
        return self.t0 + k * self.h

    @property
    def nodes(self) -> np.ndarray:
        return self.t0 + np.arange(self.M + 1) * self.h


@dataclass(frozen=True)
class GridPair:
    """Maturity grid, time grid and the precomputed index tables l(t_k), rho(t_k)"""

    maturity: MaturityGrid
    time: TimeGrid
    ell_k: Tuple[int, ...]
    rho_k: Tuple[int, ...] = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "rho_k", tuple(l + 1 for l in self.ell_k))

    @property
    def delta(self) -> float:
        return self.maturity.delta

    @property
    def h(self) -> float:
        return self.time.h

    @property
    def M(self) -> int:
        return self.time.M

    @property
    def N(self) -> int:
        return self.maturity.N

    @property
    def N_prime(self) -> int:
        return self.maturity.N_prime

    def crossed(self, k: int) -> bool:
        """True when a maturity node is passed during [t_k, t_{k+1}]"""
        return self.ell_k[k + 1] != self.ell_k[k]

    def gap(self, i: int, k: float) -> float:
        """Delta_{i,k} = T_i - t_k; k may be fractional (k + 1/2)"""
        return self.maturity.node(i) - (self.time.t0 + k * self.time.h)

    def node_index(self, s: float) -> int:
        """Index of the maturity node equal to s"""
        q = (s - self.maturity.t0) / self.delta
        i = round(q)
        if abs(q - i) > GRID_TOLERANCE * max(1.0, abs(q)) or not 0 <= i <= self.N_prime:
            raise ConfigError(f"date {s!r} is not a node of the maturity grid (step {self.delta!r})")
        return int(i)


def _index_table(M: int, h: float, delta: float) -> Tuple[int, ...]:
    # exact integer arithmetic when h/delta is a small rational, snapping otherwise
    ratio = h / delta
    exact = Fraction(ratio).limit_denominator(1_000_000)
    if abs(float(exact) - ratio) <= 1e-12 * ratio:
        return tuple((k * exact.numerator) // exact.denominator for k in range(M + 1))
    return tuple(_snap_floor(k * ratio) for k in range(M + 1))


def build_grid_pair(
    t0: float,
    t_star: float,
    T_star: float,
    delta: float,
    h: float,
    stencil_reach: int,
) -> GridPair:
    """
    Build the maturity/time grid pair for one pricing run

    Args:
        t0: Initial time
        t_star: Set date of the contract (end of the time grid)
        T_star: Last payment date (end of the unextended maturity grid)
        delta: Maturity step
        h: Time step, at most delta
        stencil_reach: Lookahead of the chosen algorithm's rules

    Returns:
        GridPair with N_prime = max(N, l(t*) + stencil_reach)
    """
    if not t0 < t_star <= T_star:
        raise ConfigError(f"need t0 < t* <= T*, got {t0!r}, {t_star!r}, {T_star!r}")
    if delta <= 0 or h <= 0:
        raise ConfigError(f"steps must be positive, got delta={delta!r}, h={h!r}")
    if h > delta * (1 + GRID_TOLERANCE):
        raise StepOrderViolation(f"time step h={h!r} exceeds maturity step delta={delta!r}")

    N = _integer_ratio(T_star - t0, delta, "maturity")
    M = _integer_ratio(t_star - t0, h, "time")
    delta = (T_star - t0) / N
    h = (t_star - t0) / M

    ell_k = _index_table(M, h, delta)
    N_prime = max(N, ell_k[M] + stencil_reach)

    return GridPair(
        maturity=MaturityGrid(t0=t0, T_star=T_star, delta=delta, N=N, N_prime=N_prime),
        time=TimeGrid(t0=t0, t_star=t_star, h=h, M=M),
        ell_k=ell_k,
    )


def ell(t: float, grid: MaturityGrid) -> int:
    """max{i : t >= T_i}"""
    span = grid.T_star - grid.t0
    if t < grid.t0 - GRID_TOLERANCE * span or t > grid.T_star + GRID_TOLERANCE * span:
        raise OutOfRange(f"t={t!r} lies outside [{grid.t0!r}, {grid.T_star!r}]")
    return max(0, _snap_floor((t - grid.t0) / grid.delta))


def rho(t: float, grid: MaturityGrid) -> int:
    """min{i : t < T_i}"""
    return ell(t, grid) + 1


def snapped_node_count(span: float, base: float, rounding: str = "nearest") -> int:
    """Node count n with span/n close to base, rounding span/base as requested"""
    if rounding not in ROUNDING_MODES:
        raise ConfigError(f"unknown rounding {rounding!r}; expected one of {ROUNDING_MODES}")
    r = span / base
    whole = _snap_floor(r)
    if rounding == "ceil":
        count = whole if abs(r - whole) <= GRID_TOLERANCE * max(1.0, r) else whole + 1
    else:
        count = whole + 1 if r - whole >= 0.5 else whole
    return max(1, count)


def alpha_for_simpson(h: float, t0: float, T_star: float, rounding: str = "nearest") -> float:
    """
    Scaling alpha such that delta = alpha * h**(1/4) divides T* - t0

    Args:
        h: Time step
        t0: Initial time
        T_star: End of the maturity grid
        rounding: "nearest" rounds the node count half-up, "ceil" always rounds it up

    Returns:
        alpha
    """
    if h <= 0 or T_star <= t0:
        raise ConfigError(f"need h > 0 and T* > t0, got h={h!r}, t0={t0!r}, T*={T_star!r}")
    base = h ** 0.25
    n = snapped_node_count(T_star - t0, base, rounding)
    return (T_star - t0) / (n * base)


def maturity_step(
    law: str,
    h: float,
    t0: float,
    T_star: float,
    rounding: str = "nearest",
) -> Tuple[float, float]:
    """
    Maturity step for a step law

    Returns:
        (delta, alpha) with delta = alpha * h**q for q = 1, 1/2, 1/4
    """
    span = T_star - t0
    if law == "h":
        return h, 1.0
    if law == "sqrt":
        base = math.sqrt(h)
        n = snapped_node_count(span, base, rounding)
        return span / n, span / (n * base)
    if law == "quartic":
        alpha = alpha_for_simpson(h, t0, T_star, rounding)
        return span / snapped_node_count(span, h ** 0.25, rounding), alpha
    raise ConfigError(f"unknown step law {law!r}; expected h, sqrt or quartic")
