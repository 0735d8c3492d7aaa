"""
Pricing Module
Payoffs, per-path discounting and the deterministic parallel Monte Carlo estimator
"""
from __future__ import annotations

import asyncio
import math
from dataclasses import dataclass
from enum import Enum
from functools import partial
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from rich.console import Console

import sys
from pathlib import Path
sys.path.append(str(Path(__file__).parent.parent))
from config import HALF_WIDTH_C, MAX_CONCURRENT_BLOCKS, PATH_BLOCK_SIZE
from src.errors import ConfigError, InsufficientPaths, NumericalError
from src.grid import GridPair
from src.models import VolatilityModel
from src.parallel_processor import ParallelProcessor
from src.quadrature import AlgorithmOrder
from src.simulate import NoiseKind, PathOutcome, derive_stream, simulate_path

console = Console()


class ContractKind(Enum):
    CAPLET = "caplet"
    PAYER_SWAPTION = "swaption"
    GENERIC = "generic"

    @classmethod
    def from_label(cls, label: str) -> "ContractKind":
        try:
            return cls(label.lower())
        except ValueError:
            raise ConfigError(f"unknown contract {label!r}; expected caplet or swaption") from None


@dataclass(frozen=True)
class Contract:
    """
    Interest-rate contract set at t* with unit nominal

    A caplet pays at payment_dates[0]; a payer swaption exchanges fixed K on the
    schedule (set_date, *payment_dates); a generic contract applies payoff_fn to the
    bond prices at the payment dates.
    """

    kind: ContractKind
    set_date: float
    payment_dates: Tuple[float, ...]
    strike: float
    nominal: float = 1.0
    payoff_fn: Optional[Callable[[np.ndarray], np.ndarray]] = None

    def __post_init__(self):
        dates = (self.set_date,) + tuple(self.payment_dates)
        if len(dates) < 2 or any(b <= a for a, b in zip(dates, dates[1:])):
            raise ConfigError(f"payment dates must follow the set date strictly increasing, got {dates}")
        if self.nominal != 1.0:
            raise ConfigError("contracts carry unit nominal")
        if self.kind is ContractKind.CAPLET and len(self.payment_dates) != 1:
            raise ConfigError("a caplet has exactly one payment date")
        if self.kind is ContractKind.GENERIC and self.payoff_fn is None:
            raise ConfigError("a generic contract needs payoff_fn")

    @property
    def last_payment(self) -> float:
        return self.payment_dates[-1]

    def payoff(self, outcome: PathOutcome) -> np.ndarray:
        if self.kind is ContractKind.CAPLET:
            return caplet_payoff(outcome, self.strike, self.set_date, self.payment_dates[0])
        if self.kind is ContractKind.PAYER_SWAPTION:
            return swaption_payoff(outcome, self.strike, (self.set_date,) + tuple(self.payment_dates))
        return np.asarray(self.payoff_fn(np.exp(-outcome.s_z)), dtype=float)


def caplet_payoff(outcome: PathOutcome, K: float, t_star: float, s: float) -> np.ndarray:
    """[1 - (1 + K(s - t*)) P(t*, s)]+ with the bond read from the last log-bond column"""
    bond = np.exp(-outcome.s_z[..., -1])
    return np.maximum(1.0 - (1.0 + K * (s - t_star)) * bond, 0.0)


def swaption_payoff(outcome: PathOutcome, K: float, schedule: Sequence[float]) -> np.ndarray:
    """Payer swaption on the schedule s_k..s_i; log-bond columns follow s_{k+1}..s_i"""
    accruals = np.diff(np.asarray(schedule, dtype=float))
    bonds = np.exp(-outcome.s_z)
    if bonds.shape[-1] != accruals.size:
        raise ConfigError(f"schedule has {accruals.size} periods but {bonds.shape[-1]} bonds were simulated")
    fixed_leg = bonds @ accruals
    return np.maximum(1.0 - bonds[..., -1] - K * fixed_leg, 0.0)


def mc_half_width(std_err: float, c: int = HALF_WIDTH_C) -> float:
    if c not in (1, 2, 3):
        raise ValueError(f"c must be 1, 2 or 3, got {c!r}")
    return c * std_err


@dataclass(frozen=True)
class BlockStats:
    """Count, mean and sum of squared deviations of one group of samples"""

    count: int
    mean: float
    m2: float

    @classmethod
    def from_samples(cls, samples: np.ndarray) -> "BlockStats":
        # shifted by the first sample so equal samples give mean == x0 and m2 == 0 exactly
        x0 = float(samples.flat[0])
        shifted = samples - x0
        offset = float(np.mean(shifted))
        return cls(count=int(samples.size), mean=x0 + offset, m2=float(np.sum((shifted - offset) ** 2)))

    def merge(self, other: "BlockStats") -> "BlockStats":
        count = self.count + other.count
        diff = other.mean - self.mean
        return BlockStats(
            count=count,
            mean=self.mean + diff * other.count / count,
            m2=self.m2 + other.m2 + diff * diff * self.count * other.count / count,
        )


def pairwise_reduce(stats: List[BlockStats]) -> BlockStats:
    """Merge in a fixed binary tree over block index"""
    if len(stats) == 1:
        return stats[0]
    mid = len(stats) // 2
    return pairwise_reduce(stats[:mid]).merge(pairwise_reduce(stats[mid:]))


@dataclass(frozen=True)
class McEstimate:
    mean: float
    std_err: float
    n_paths: int
    cap_engaged: bool = False

    def half_width(self, c: int = HALF_WIDTH_C) -> float:
        return mc_half_width(self.std_err, c)


def _price_block(
    block: int,
    n_paths: int,
    order: AlgorithmOrder,
    model: VolatilityModel,
    grid: GridPair,
    contract: Contract,
    seed: int,
    kind: NoiseKind,
    rough_discount: bool,
) -> Tuple[BlockStats, bool]:
    outcome = simulate_path(
        order, model, grid, contract.payment_dates, derive_stream(seed, block), kind,
        n_paths=n_paths, rough_discount=rough_discount,
    )
    discounted = np.exp(-outcome.y_bar) * contract.payoff(outcome)
    return BlockStats.from_samples(discounted), outcome.cap_engaged


async def mc_price_async(
    order: AlgorithmOrder,
    model: VolatilityModel,
    grid: GridPair,
    contract: Contract,
    L: int,
    seed: int,
    kind: NoiseKind = NoiseKind.WEAK_BERNOULLI,
    threads: int = MAX_CONCURRENT_BLOCKS,
    block_size: int = PATH_BLOCK_SIZE,
    rough_discount: bool = False,
    show_progress: bool = False,
) -> McEstimate:
    """
    Monte Carlo price with per-path discounting

    Args:
        order: Algorithm order
        model: Volatility model
        grid: Grid pair covering the contract dates
        contract: Contract to price
        L: Path count, at least 2
        seed: Root seed; block b draws from derive_stream(seed, b)
        kind: Noise law
        threads: Concurrent path blocks; does not change the result
        block_size: Paths per stream block
        rough_discount: Diagnostic discount shortcut
        show_progress: Show a progress bar over blocks

    Returns:
        McEstimate
    """
    if L < 2:
        raise InsufficientPaths(f"need at least 2 paths, got {L}")
    if block_size < 1:
        raise ConfigError(f"block size must be positive, got {block_size}")
    if abs(grid.time.t_star - contract.set_date) > 1e-9 * max(1.0, abs(contract.set_date)):
        raise ConfigError(f"time grid ends at {grid.time.t_star!r}, contract is set at {contract.set_date!r}")

    sizes = [min(block_size, L - start) for start in range(0, L, block_size)]
    jobs = [
        partial(_price_block, b, n, order, model, grid, contract, seed, kind, rough_discount)
        for b, n in enumerate(sizes)
    ]
    processor = ParallelProcessor(max_concurrent=threads, show_progress=show_progress)
    results = await processor.process_all(jobs, label=f"{L} paths")

    total = pairwise_reduce([stats for stats, _ in results])
    cap_engaged = any(engaged for _, engaged in results)
    if cap_engaged:
        console.print("[yellow]⚠️ Volatility cap was reached on some paths; the estimate depends on it[/yellow]")
    if not math.isfinite(total.mean) or not math.isfinite(total.m2):
        raise NumericalError(f"non-finite Monte Carlo estimate {total.mean!r}")

    std_err = math.sqrt(max(total.m2, 0.0) / (total.count - 1)) / math.sqrt(total.count)
    return McEstimate(mean=total.mean, std_err=std_err, n_paths=total.count, cap_engaged=cap_engaged)


def mc_price(*args, **kwargs) -> McEstimate:
    """Synchronous mc_price_async"""
    return asyncio.run(mc_price_async(*args, **kwargs))
