"""
Simulate Module
Weak and mean-square Euler stepping of the forward curve and discount integral
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence

import numpy as np

from src.errors import ConfigError
from src.grid import GridPair
from src.models import VolatilityModel
from src.quadrature import (
    AlgorithmOrder,
    discount_increment,
    step_drift,
    terminal_bond_integral,
)


class NoiseKind(Enum):
    WEAK_BERNOULLI = "weak"
    GAUSSIAN = "gaussian"

    @classmethod
    def from_label(cls, label: str) -> "NoiseKind":
        try:
            return cls(label.lower())
        except ValueError:
            raise ConfigError(f"unknown noise {label!r}; expected weak or gaussian") from None


@dataclass
class ForwardState:
    """Forward rates f_k^i over nodes 0..N' (last axis); entries below frozen_below are frozen"""

    k: int
    rates: np.ndarray
    frozen_below: int

    @classmethod
    def initial(cls, model: VolatilityModel, grid: GridPair, n_paths: Optional[int] = None) -> "ForwardState":
        curve = np.asarray(model.f0(grid.maturity.nodes), dtype=float)
        rates = curve.copy() if n_paths is None else np.tile(curve, (n_paths, 1))
        return cls(k=0, rates=rates, frozen_below=grid.ell_k[0])


@dataclass
class PathAccumulator:
    y_bar: np.ndarray
    k: int = 0

    @classmethod
    def initial(cls, n_paths: Optional[int] = None) -> "PathAccumulator":
        return cls(y_bar=np.zeros(() if n_paths is None else (n_paths,)))


@dataclass
class PathOutcome:
    """Terminal discount integral and log-bond integrals (one column per payment date)"""

    y_bar: np.ndarray
    s_z: np.ndarray
    terminal_rates: Optional[np.ndarray] = None
    cap_engaged: bool = False

    @property
    def n_paths(self) -> int:
        return int(np.shape(self.y_bar)[0]) if np.ndim(self.y_bar) else 1


def derive_stream(seed: int, path_index: int) -> np.random.Generator:
    """Independent counter-based stream fixed by (seed, index)"""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(path_index,))))


def draw_noise(stream: np.random.Generator, kind: NoiseKind, shape) -> np.ndarray:
    if kind is NoiseKind.WEAK_BERNOULLI:
        return stream.integers(0, 2, size=shape).astype(float) * 2.0 - 1.0
    return stream.standard_normal(shape)


class StreamNoise:
    """Draws the noise of step k for a block of paths from one stream"""

    def __init__(self, stream: np.random.Generator, kind: NoiseKind, n_paths: int, d: int):
        self.stream = stream
        self.kind = kind
        self.shape = (n_paths, d)

    def draw(self, k: int) -> np.ndarray:
        return draw_noise(self.stream, self.kind, self.shape)


class IncrementNoise:
    """
    Gaussian noise from a stored Brownian path, standardized per step

    Coarsening by r sums r consecutive fine draws and divides by sqrt(r),
    so refinements of one grid see the same Wiener path.
    """

    kind = NoiseKind.GAUSSIAN

    def __init__(self, draws: np.ndarray):
        self.draws = np.asarray(draws, dtype=float)

    @classmethod
    def sample(cls, stream: np.random.Generator, M: int, n_paths: int, d: int) -> "IncrementNoise":
        return cls(stream.standard_normal((M, n_paths, d)))

    @property
    def M(self) -> int:
        return self.draws.shape[0]

    def coarsen(self, factor: int) -> "IncrementNoise":
        if factor < 1 or self.M % factor:
            raise ConfigError(f"cannot coarsen {self.M} steps by {factor}")
        M, n, d = self.draws.shape
        summed = self.draws.reshape(M // factor, factor, n, d).sum(axis=1)
        return IncrementNoise(summed / np.sqrt(factor))

    def draw(self, k: int) -> np.ndarray:
        return self.draws[k]


def euler_step(
    order: AlgorithmOrder,
    state: ForwardState,
    acc: PathAccumulator,
    model: VolatilityModel,
    grid: GridPair,
    noise: np.ndarray,
    kind: NoiseKind,
    rough_discount: bool = False,
):
    """
    Advance the forward curve and the discount integral from t_k to t_{k+1}

    Args:
        order: Algorithm order
        state: Forward state at t_k
        acc: Discount accumulator at t_k
        model: Volatility model
        grid: Grid pair
        noise: Draws of shape (..., d); +-1 for weak noise, standard normal otherwise
        kind: Noise law the draws come from
        rough_discount: Diagnostic discount shortcut h * f_k at l_k

    Returns:
        (ForwardState, PathAccumulator) at t_{k+1}
    """
    k = state.k
    if k >= grid.M:
        raise ConfigError(f"state is already at the set date (k={k}, M={grid.M})")
    xi = np.asarray(noise, dtype=float)
    if xi.shape[-1] != model.d:
        raise ConfigError(f"expected {model.d} {kind.value} draws per path, got shape {xi.shape}")

    L = grid.ell_k[k + 1]
    sqrt_h = np.sqrt(grid.h)
    # one volatility row shared by all paths unless it reads the rates
    levels = state.rates if model.state_dependent else None
    sig = model.sigma_matrix(grid.time.node(k), grid.maturity.nodes, levels)

    # only nodes L.. move; the rest stay frozen
    increment = None
    for j in range(model.d):
        drift = step_drift(order, k, grid, sig[..., j])[..., L:]
        term = sig[..., j][..., L:] * (drift + sqrt_h * xi[..., j][..., None])
        increment = term if increment is None else increment + term

    rates = state.rates.copy()
    rates[..., L:] += increment
    new_state = ForwardState(k=k + 1, rates=rates, frozen_below=L)

    y_bar = acc.y_bar + discount_increment(order, k, state, new_state, grid, rough=rough_discount)
    return new_state, PathAccumulator(y_bar=y_bar, k=k + 1)


def simulate_paths(
    order: AlgorithmOrder,
    model: VolatilityModel,
    grid: GridPair,
    payment_dates: Sequence[float],
    noise_source,
    n_paths: int,
    rough_discount: bool = False,
    keep_terminal: bool = False,
) -> PathOutcome:
    """Run M Euler steps for a block of paths and evaluate the terminal log-bond integrals"""
    nodes = [grid.node_index(s) for s in payment_dates]
    state = ForwardState.initial(model, grid, n_paths)
    acc = PathAccumulator.initial(n_paths)
    kind = getattr(noise_source, "kind", NoiseKind.WEAK_BERNOULLI)
    cap_engaged = False

    for k in range(grid.M):
        state, acc = euler_step(
            order, state, acc, model, grid, noise_source.draw(k), kind, rough_discount
        )
        cap_engaged = cap_engaged or model.cap_engaged(state.rates[..., state.frozen_below:])

    s_z = np.stack([terminal_bond_integral(order, state.rates, grid, n) for n in nodes], axis=-1)
    return PathOutcome(
        y_bar=acc.y_bar,
        s_z=s_z,
        terminal_rates=state.rates if keep_terminal else None,
        cap_engaged=cap_engaged,
    )


def simulate_path(
    order: AlgorithmOrder,
    model: VolatilityModel,
    grid: GridPair,
    contract_dates: Sequence[float],
    stream: np.random.Generator,
    kind: NoiseKind,
    n_paths: int = 1,
    rough_discount: bool = False,
    keep_terminal: bool = False,
) -> PathOutcome:
    """Simulate paths whose noise comes from a single stream"""
    noise = StreamNoise(stream, kind, n_paths, model.d)
    return simulate_paths(
        order, model, grid, contract_dates, noise, n_paths, rough_discount, keep_terminal
    )
