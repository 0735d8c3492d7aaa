"""
Study Module
Pricing runs, convergence studies and cached reference prices
"""
from __future__ import annotations

import asyncio
import json
import math
import time
from dataclasses import dataclass, replace
from pathlib import Path
from typing import List, Optional, Tuple

import numpy as np
from rich.console import Console

import sys
sys.path.append(str(Path(__file__).parent.parent))
from config import REFERENCE_FILE, REFERENCE_H
from src.config_loader import RunConfig
from src.models import vasicek_caplet_price, VasicekParams
from src.pricing import ContractKind, mc_price_async
from src.quadrature import AlgorithmOrder

console = Console()


@dataclass(frozen=True)
class StudyRow:
    h: float
    delta: float
    alpha: float
    L: int
    estimate: float
    reference: Optional[float]
    bias: Optional[float]
    half_width: float
    seconds: float


def reference_price(config: RunConfig) -> Optional[float]:
    """Closed form for Vasicek caplets, else the configured or cached reference"""
    if config.reference is not None:
        return config.reference
    if config.model_family == "vasicek" and config.contract_kind is ContractKind.CAPLET:
        return vasicek_caplet_price(
            VasicekParams(**config.model_params),
            config.t0, config.set_date, config.payment_dates[0], config.strike,
        )
    if config.reference_file is not None and Path(config.reference_file).exists():
        cached = json.loads(Path(config.reference_file).read_text())
        return float(cached["estimate"])
    return None


async def run_price_async(
    config: RunConfig,
    h: Optional[float] = None,
    reference: Optional[float] = None,
    show_progress: bool = False,
) -> StudyRow:
    """
    Price one configuration at one time step

    Args:
        config: Run configuration
        h: Time step; the first configured step when omitted
        reference: Reference price; looked up when omitted
        show_progress: Show block progress

    Returns:
        StudyRow with bias against the reference when one is available
    """
    h = config.h_values[0] if h is None else h
    grid, delta, alpha = config.grid_for(h)
    model = config.build_model()
    contract = config.build_contract()
    if reference is None:
        reference = reference_price(config)

    start = time.perf_counter()
    estimate = await mc_price_async(
        config.algo, model, grid, contract, config.paths, config.seed, config.noise,
        threads=config.threads, rough_discount=config.rough_discount, show_progress=show_progress,
    )
    seconds = time.perf_counter() - start

    return StudyRow(
        h=grid.h,
        delta=delta,
        alpha=alpha,
        L=estimate.n_paths,
        estimate=estimate.mean,
        reference=reference,
        bias=None if reference is None else estimate.mean - reference,
        half_width=estimate.half_width(2),
        seconds=seconds,
    )


def run_price(config: RunConfig, h: Optional[float] = None) -> StudyRow:
    return asyncio.run(run_price_async(config, h))


def fitted_order(rows: List[StudyRow]) -> Optional[float]:
    """Least-squares slope of log|bias| against log h"""
    points = [(r.h, abs(r.bias)) for r in rows if r.bias is not None and r.bias != 0.0]
    if len(points) < 2:
        return None
    h, bias = np.log(np.array(points)).T
    return float(np.polyfit(h, bias, 1)[0])


async def run_convergence_study_async(
    config: RunConfig,
    show_progress: bool = False,
) -> Tuple[List[StudyRow], Optional[float]]:
    """One row per configured time step plus the fitted order"""
    if len(config.h_values) < 3:
        console.print("[yellow]⚠️ Fewer than three time steps; the fitted order is unreliable[/yellow]")
    reference = reference_price(config)
    rows = []
    for h in config.h_values:
        rows.append(await run_price_async(config, h, reference, show_progress))
    return rows, fitted_order(rows)


def run_convergence_study(config: RunConfig) -> Tuple[List[StudyRow], Optional[float]]:
    return asyncio.run(run_convergence_study_async(config))


async def run_comparison_async(
    config: RunConfig,
    h: Optional[float] = None,
    show_progress: bool = False,
) -> List[Tuple[AlgorithmOrder, StudyRow]]:
    """Price one configuration with every algorithm at the same time step"""
    reference = reference_price(config)
    pairs = []
    for order in AlgorithmOrder:
        row = await run_price_async(replace(config, algo=order), h, reference, show_progress)
        pairs.append((order, row))
    return pairs


def run_comparison(config: RunConfig, h: Optional[float] = None) -> List[Tuple[AlgorithmOrder, StudyRow]]:
    return asyncio.run(run_comparison_async(config, h))


async def compute_reference_async(
    config: RunConfig,
    h: float = REFERENCE_H,
    path: Optional[Path] = None,
    show_progress: bool = False,
) -> dict:
    """
    Fine-step reference price with the Simpson algorithm, cached as JSON

    Returns:
        The cached record
    """
    fine = replace(config, algo=AlgorithmOrder.SIMPSON4, step_law=None, delta=None, reference=None)
    row = await run_price_async(fine, h, reference=math.nan, show_progress=show_progress)
    record = {
        "estimate": row.estimate,
        "half_width": row.half_width,
        "h": row.h,
        "delta": row.delta,
        "paths": row.L,
        "seed": config.seed,
        "model": config.model_family,
        "params": {k: list(v) if isinstance(v, tuple) else v for k, v in config.model_params.items()},
    }
    target = Path(path or config.reference_file or REFERENCE_FILE)
    target.parent.mkdir(parents=True, exist_ok=True)
    target.write_text(json.dumps(record, indent=2))
    console.print(f"[green]✅ Reference {row.estimate!r} ± {row.half_width:.2e} saved to {target}[/green]")
    return record
