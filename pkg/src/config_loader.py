"""
Config Loader Module
Loads flat KEY=value run files and validates them into a RunConfig
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Mapping, Optional, Tuple

from dotenv import dotenv_values
from rich.console import Console

import sys
sys.path.append(str(Path(__file__).parent.parent))
from config import (
    ALPHA_ROUNDING,
    CAPLET_DEFAULTS,
    DEFAULT_H_LADDER,
    DEFAULT_PATHS,
    DEFAULT_SEED,
    GAMMA_CAP,
    MAX_CONCURRENT_BLOCKS,
    PROPORTIONAL_PARAMS,
    REFERENCE_FILE,
    STEP_LAWS,
    VASICEK_LOW_PARAMS,
    VASICEK_PARAMS,
)
from src.errors import ConfigError
from src.grid import GridPair, build_grid_pair, maturity_step
from src.models import (
    ProportionalParams,
    VasicekParams,
    VolatilityModel,
    proportional_model,
    vasicek_model,
)
from src.pricing import Contract, ContractKind
from src.quadrature import AlgorithmOrder
from src.simulate import NoiseKind

console = Console()

KNOWN_KEYS = {
    "MODEL", "VARIANT", "SIGMA", "KAPPA", "R0", "THETA", "FACTORS", "GAMMA_CAP",
    "CONTRACT", "T0", "SET_DATE", "PAYMENT_DATES", "STRIKE",
    "ALGO", "STEP_LAW", "DELTA", "H", "PATHS", "SEED", "NOISE", "THREADS", "OUT",
    "REFERENCE", "REFERENCE_FILE", "ALPHA_ROUNDING", "ROUGH_DISCOUNT",
}
FACTOR_KEY = re.compile(r"^(SIGMA|KAPPA)_(\d+)$")


def _floats(text: str, key: str) -> Tuple[float, ...]:
    try:
        return tuple(float(part) for part in str(text).split(",") if part.strip())
    except ValueError:
        raise ConfigError(f"{key} must be a comma-separated list of numbers, got {text!r}") from None


def _number(values: Mapping[str, str], key: str, cast=float, default=None):
    if key not in values or values[key] in (None, ""):
        return default
    try:
        return cast(values[key])
    except ValueError:
        raise ConfigError(f"{key} must be a {cast.__name__}, got {values[key]!r}") from None


def _flag(values: Mapping[str, str], key: str) -> bool:
    return str(values.get(key, "")).strip().lower() in ("1", "true", "yes", "on")


@dataclass(frozen=True)
class RunConfig:
    """One validated experiment: model, contract, algorithm, grids and Monte Carlo settings"""

    model_family: str = "vasicek"
    model_params: Dict[str, object] = field(default_factory=lambda: dict(VASICEK_PARAMS))
    contract_kind: ContractKind = ContractKind.CAPLET
    t0: float = CAPLET_DEFAULTS["t0"]
    set_date: float = CAPLET_DEFAULTS["set_date"]
    payment_dates: Tuple[float, ...] = CAPLET_DEFAULTS["payment_dates"]
    strike: float = CAPLET_DEFAULTS["strike"]
    algo: AlgorithmOrder = AlgorithmOrder.RECT1
    step_law: Optional[str] = None
    delta: Optional[float] = None
    h_values: Tuple[float, ...] = DEFAULT_H_LADDER
    paths: int = DEFAULT_PATHS
    seed: int = DEFAULT_SEED
    noise: NoiseKind = NoiseKind.WEAK_BERNOULLI
    threads: int = MAX_CONCURRENT_BLOCKS
    out: Optional[Path] = None
    reference: Optional[float] = None
    reference_file: Optional[Path] = None
    alpha_rounding: str = ALPHA_ROUNDING
    rough_discount: bool = False

    def __post_init__(self):
        if self.model_family not in ("vasicek", "proportional"):
            raise ConfigError(f"unknown model {self.model_family!r}; expected vasicek or proportional")
        if not self.h_values or min(self.h_values) <= 0:
            raise ConfigError(f"H must list positive time steps, got {self.h_values}")
        if self.threads < 1:
            raise ConfigError(f"THREADS must be at least 1, got {self.threads}")
        if self.delta is None and self.law not in ("h", "sqrt", "quartic"):
            raise ConfigError(f"unknown STEP_LAW {self.law!r}; expected h, sqrt or quartic")

    @property
    def law(self) -> str:
        return self.step_law or STEP_LAWS[self.algo.label]

    def build_model(self) -> VolatilityModel:
        if self.model_family == "vasicek":
            return vasicek_model(VasicekParams(**self.model_params), t0=self.t0)
        return proportional_model(ProportionalParams(**self.model_params))

    def build_contract(self) -> Contract:
        return Contract(
            kind=self.contract_kind,
            set_date=self.set_date,
            payment_dates=tuple(self.payment_dates),
            strike=self.strike,
        )

    def grid_for(self, h: float) -> Tuple[GridPair, float, float]:
        """Grid pair for time step h, with the maturity step and its alpha"""
        T_star = self.payment_dates[-1]
        if self.delta is not None:
            delta, alpha = self.delta, float("nan")
        else:
            delta, alpha = maturity_step(self.law, h, self.t0, T_star, self.alpha_rounding)
        grid = build_grid_pair(self.t0, self.set_date, T_star, delta, h, self.algo.stencil_reach)
        return grid, grid.delta, alpha


def _model_spec(values: Mapping[str, str]) -> Tuple[str, Dict[str, object]]:
    family = str(values.get("MODEL", "vasicek")).lower()
    if family == "vasicek":
        variant = str(values.get("VARIANT", "standard")).lower()
        if variant not in ("standard", "low"):
            raise ConfigError(f"unknown VARIANT {variant!r}; expected standard or low")
        params = dict(VASICEK_LOW_PARAMS if variant == "low" else VASICEK_PARAMS)
        for key, name in (("SIGMA", "sigma"), ("KAPPA", "kappa"), ("R0", "r0"), ("THETA", "theta")):
            params[name] = _number(values, key, default=params[name])
        return family, params

    if family == "proportional":
        factors = _number(values, "FACTORS", int, default=len(PROPORTIONAL_PARAMS["sigmas"]))
        sigmas, kappas = [], []
        for j in range(1, factors + 1):
            fallback = j - 1 < len(PROPORTIONAL_PARAMS["sigmas"])
            sigma = _number(values, f"SIGMA_{j}", default=PROPORTIONAL_PARAMS["sigmas"][j - 1] if fallback else None)
            kappa = _number(values, f"KAPPA_{j}", default=PROPORTIONAL_PARAMS["kappas"][j - 1] if fallback else None)
            if sigma is None or kappa is None:
                raise ConfigError(f"factor {j} needs SIGMA_{j} and KAPPA_{j}")
            sigmas.append(sigma)
            kappas.append(kappa)
        gamma = _number(values, "GAMMA_CAP", default=GAMMA_CAP)
        return family, {"sigmas": tuple(sigmas), "kappas": tuple(kappas), "gamma_cap": gamma}

    raise ConfigError(f"unknown model {family!r}; expected vasicek or proportional")


def build_run_config(values: Mapping[str, str]) -> RunConfig:
    """
    Validate a flat key-value mapping into a RunConfig

    Args:
        values: Upper-case keys as in run files; missing keys fall back to config.py

    Returns:
        RunConfig
    """
    values = {k.upper(): v for k, v in values.items() if v is not None}
    unknown = sorted(k for k in values if k not in KNOWN_KEYS and not FACTOR_KEY.match(k))
    if unknown:
        raise ConfigError(f"unknown config key(s): {', '.join(unknown)}")

    family, params = _model_spec(values)
    algo = AlgorithmOrder.from_label(str(values.get("ALGO", "5.1")))
    payment_dates = (
        _floats(values["PAYMENT_DATES"], "PAYMENT_DATES")
        if values.get("PAYMENT_DATES") else CAPLET_DEFAULTS["payment_dates"]
    )
    reference_file = values.get("REFERENCE_FILE")
    if reference_file is None and family == "proportional":
        reference_file = REFERENCE_FILE

    return RunConfig(
        model_family=family,
        model_params=params,
        contract_kind=ContractKind.from_label(str(values.get("CONTRACT", "caplet"))),
        t0=_number(values, "T0", default=CAPLET_DEFAULTS["t0"]),
        set_date=_number(values, "SET_DATE", default=CAPLET_DEFAULTS["set_date"]),
        payment_dates=payment_dates,
        strike=_number(values, "STRIKE", default=CAPLET_DEFAULTS["strike"]),
        algo=algo,
        step_law=values.get("STEP_LAW") or None,
        delta=_number(values, "DELTA"),
        h_values=_floats(values["H"], "H") if values.get("H") else DEFAULT_H_LADDER,
        paths=_number(values, "PATHS", int, default=DEFAULT_PATHS),
        seed=_number(values, "SEED", int, default=DEFAULT_SEED),
        noise=NoiseKind.from_label(str(values.get("NOISE", "weak"))),
        threads=_number(values, "THREADS", int, default=MAX_CONCURRENT_BLOCKS),
        out=Path(values["OUT"]) if values.get("OUT") else None,
        reference=_number(values, "REFERENCE"),
        reference_file=Path(reference_file) if reference_file else None,
        alpha_rounding=str(values.get("ALPHA_ROUNDING", ALPHA_ROUNDING)).lower(),
        rough_discount=_flag(values, "ROUGH_DISCOUNT"),
    )


class ConfigLoader:
    """Loads run files and merges command-line overrides"""

    def __init__(self, path: Optional[Path] = None):
        self.path = Path(path) if path else None

    def read(self) -> Dict[str, str]:
        """Read the run file as a flat mapping"""
        if self.path is None:
            return {}
        if not self.path.exists():
            raise FileNotFoundError(f"Config file not found: {self.path}")
        values = dotenv_values(self.path)
        console.print(f"[cyan]📁 Loaded {len(values)} key(s) from {self.path}[/cyan]")
        return {k: v for k, v in values.items() if v is not None}

    def load(self, overrides: Optional[Mapping[str, object]] = None) -> RunConfig:
        """
        Load the run file, apply overrides and validate

        Args:
            overrides: Command-line values keyed like the file; None entries are ignored

        Returns:
            RunConfig
        """
        values = self.read()
        for key, value in (overrides or {}).items():
            if value is not None:
                values[key.upper()] = value if isinstance(value, str) else str(value)
        return build_run_config(values)
