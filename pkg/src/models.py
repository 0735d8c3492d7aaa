"""
Models Module
Volatility models, initial forward curves and the Vasicek closed-form caplet oracle
"""
from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import ClassVar, Tuple

import numpy as np
from scipy.special import erfc

from src.errors import ConfigError, DegenerateVolatility

NORMAL_CDF_CLAMP = 8.0


class VolatilityModel(ABC):
    """d-factor volatility sigma_j(t, T, z) with an initial forward curve f0(T); factors are 0-based"""

    d: int = 1
    state_dependent: ClassVar[bool] = True

    @abstractmethod
    def sigma(self, j: int, t: float, T, z) -> np.ndarray:
        """Factor-j volatility at running time t for maturities T and forward levels z (None unless state_dependent)"""

    @abstractmethod
    def f0(self, T) -> np.ndarray:
        """Initial forward curve"""

    def sigma_matrix(self, t: float, T, z) -> np.ndarray:
        """All factors stacked on a trailing axis"""
        return np.stack([self.sigma(j, t, T, z) for j in range(self.d)], axis=-1)

    def cap_engaged(self, z) -> bool:
        return False


@dataclass(frozen=True)
class VasicekParams:
    """Vasicek volatility sigma*exp(-kappa*(T-t)); sigma = 0 is the deterministic limit"""

    sigma: float
    kappa: float
    r0: float
    theta: float

    def __post_init__(self):
        if self.sigma < 0 or self.kappa <= 0:
            raise ConfigError(f"Vasicek needs sigma >= 0 and kappa > 0, got {self}")


@dataclass(frozen=True)
class ProportionalParams:
    sigmas: Tuple[float, ...]
    kappas: Tuple[float, ...]
    gamma_cap: float = 1.0

    def __post_init__(self):
        if len(self.sigmas) != len(self.kappas) or not self.sigmas:
            raise ConfigError("proportional model needs one kappa per sigma")
        if min(self.sigmas) <= 0 or min(self.kappas) <= 0 or self.gamma_cap <= 0:
            raise ConfigError(f"proportional parameters must be positive, got {self}")


@dataclass(frozen=True)
class VasicekModel(VolatilityModel):
    params: VasicekParams
    t0: float = 0.0
    d: int = 1
    state_dependent: ClassVar[bool] = False

    def sigma(self, j: int, t: float, T, z) -> np.ndarray:
        p = self.params
        vol = p.sigma * np.exp(-p.kappa * (np.asarray(T, dtype=float) - t))
        if z is None:
            return vol
        return vol + np.zeros_like(np.asarray(z, dtype=float))

    def f0(self, T) -> np.ndarray:
        p = self.params
        decay = np.exp(-p.kappa * (np.asarray(T, dtype=float) - self.t0))
        return (
            decay * p.r0
            + (1.0 - decay) * p.theta
            - p.sigma ** 2 / (2.0 * p.kappa ** 2) * (1.0 - decay) ** 2
        )


@dataclass(frozen=True)
class ProportionalModel(VolatilityModel):
    params: ProportionalParams

    @property
    def d(self) -> int:
        return len(self.params.sigmas)

    def sigma(self, j: int, t: float, T, z) -> np.ndarray:
        p = self.params
        level = np.clip(np.asarray(z, dtype=float), 0.0, p.gamma_cap)
        return p.sigmas[j] * np.exp(-p.kappas[j] * (np.asarray(T, dtype=float) - t)) * level

    def f0(self, T) -> np.ndarray:
        return np.log(150.0 + 48.0 * np.asarray(T, dtype=float)) / 100.0

    def cap_engaged(self, z) -> bool:
        return bool(np.any(np.asarray(z) >= self.params.gamma_cap))


def vasicek_model(p: VasicekParams, t0: float = 0.0) -> VasicekModel:
    return VasicekModel(params=p, t0=t0)


def proportional_model(p: ProportionalParams) -> ProportionalModel:
    return ProportionalModel(params=p)


def vasicek_log_bond(p: VasicekParams, t0: float, T: float) -> float:
    """Closed-form integral of f0 over [t0, T]"""
    tau = T - t0
    k = p.kappa
    b = -math.expm1(-k * tau) / k
    b2 = -math.expm1(-2.0 * k * tau) / (2.0 * k)
    return p.r0 * b + p.theta * (tau - b) - p.sigma ** 2 / (2.0 * k ** 2) * (tau - 2.0 * b + b2)


def vasicek_bond_price(p: VasicekParams, t0: float, T: float) -> float:
    """P(t0, T) = exp(-integral of f0)"""
    if T < t0:
        raise ConfigError(f"bond maturity {T!r} precedes t0={t0!r}")
    return math.exp(-vasicek_log_bond(p, t0, T))


def normal_cdf(x: float) -> float:
    if x > NORMAL_CDF_CLAMP:
        return 1.0
    if x < -NORMAL_CDF_CLAMP:
        return 0.0
    return 0.5 * float(erfc(-x / math.sqrt(2.0)))


def vasicek_caplet_price(
    p: VasicekParams,
    t0: float,
    t_star: float,
    T_star: float,
    K: float,
) -> float:
    """
    Caplet set at t_star paying at T_star as a put on the zero-coupon bond

    Args:
        p: Vasicek parameters
        t0: Valuation time
        t_star: Set date
        T_star: Payment date
        K: Strike rate

    Returns:
        Caplet price with unit nominal
    """
    if not t0 <= t_star < T_star:
        raise ConfigError(f"need t0 <= t* < T*, got {t0!r}, {t_star!r}, {T_star!r}")
    k = p.kappa
    accrual = 1.0 + K * (T_star - t_star)
    bond_set = vasicek_bond_price(p, t0, t_star)
    bond_pay = vasicek_bond_price(p, t0, T_star)

    sigma_p = (
        p.sigma / k
        * math.sqrt(-math.expm1(-2.0 * k * (t_star - t0)) / (2.0 * k))
        * -math.expm1(-2.0 * k * (T_star - t_star))
    )
    if not math.isfinite(sigma_p) or sigma_p < 0:
        raise DegenerateVolatility(f"bond option volatility {sigma_p!r}")
    if sigma_p == 0.0:
        return max(bond_set - accrual * bond_pay, 0.0)

    c_p = math.log(accrual * bond_pay / bond_set) / sigma_p + sigma_p / 2.0
    return bond_set * normal_cdf(-c_p + sigma_p) - accrual * bond_pay * normal_cdf(-c_p)
