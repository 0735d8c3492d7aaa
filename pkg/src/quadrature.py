"""
Quadrature Module
Maturity-direction integration rules: drift quadratures, their one-step time integrals,
terminal log-bond integrals, short-rate interpolants and discount increments.

Rows are numpy arrays whose last axis runs over maturity nodes 0..N'; leading axes
(paths, factors) broadcast through every rule.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import TYPE_CHECKING, Optional

import numpy as np
from numpy.polynomial import polynomial as P

from src.errors import ConfigError, MissingFictitiousNode, StencilOutOfRange
from src.grid import GridPair, MaturityGrid, ell, rho

if TYPE_CHECKING:
    from src.simulate import ForwardState


class AlgorithmOrder(Enum):
    """Quadrature order of an algorithm: (label, p, theta, stencil_reach)"""

    RECT1 = ("5.1", 1, 0, 1)
    TRAP2 = ("5.2", 2, 1, 1)
    SIMPSON4 = ("5.3", 4, 3, 3)

    def __init__(self, label: str, p: int, theta: int, stencil_reach: int):
        self.label = label
        self.p = p
        self.theta = theta
        self.stencil_reach = stencil_reach

    @classmethod
    def from_label(cls, label: str) -> "AlgorithmOrder":
        for order in cls:
            if order.label == label or order.name == label.upper():
                return order
        raise ConfigError(f"unknown algorithm {label!r}; expected 5.1, 5.2 or 5.3")


# Simpson edge weights as quadratics in x = (T_rho - s)/delta, ascending coefficients.
# Rows: target l(s), rho(s), rho(s)+1; columns: nodes l, rho, rho+1.
EDGE_TARGETS = ("ell", "rho", "rho+1")
EDGE_OFFSETS = (-1.0, 0.0, 1.0)
BETA = np.array([
    [[5 / 12, 5 / 12, 1 / 6], [2 / 3, -1 / 3, -1 / 3], [-1 / 12, -1 / 12, 1 / 6]],
    [[0.0, 1 / 4, 1 / 6], [1.0, 0.0, -1 / 3], [0.0, -1 / 4, 1 / 6]],
    [[-1 / 12, 1 / 12, 1 / 6], [2 / 3, 1 / 3, -1 / 3], [5 / 12, -5 / 12, 1 / 6]],
])

# Cubic Lagrange weights on nodes 0..3 in u = (s - T_l)/delta, ascending coefficients
CUBIC = np.array([
    [1.0, -11 / 6, 1.0, -1 / 6],
    [0.0, 3.0, -5 / 2, 1 / 2],
    [0.0, -3 / 2, 2.0, -1 / 2],
    [0.0, 1 / 3, -1 / 2, 1 / 6],
])

# Coefficient axis first so one polyval call evaluates every entry
EDGE_MOMENT = np.moveaxis(
    np.array([[P.polymul([c, 1.0], BETA[t, m]) for m in range(3)] for t, c in enumerate(EDGE_OFFSETS)]), -1, 0
)
EDGE_ANTI = np.moveaxis(
    np.array([[P.polyint(EDGE_MOMENT[:, t, m]) for m in range(3)] for t in range(3)]), -1, 0
)
CUBIC_ANTI = np.array([P.polyint(c) for c in CUBIC]).T

# Simpson drift goes through a dense per-step operator up to this many maturity nodes
DENSE_OPERATOR_NODES = 64


@dataclass(frozen=True)
class SimpsonEdgeWeights:
    beta1: float
    beta2: float
    beta3: float
    target: str


def simpson_edge_weights(s: float, grid: MaturityGrid, target: str) -> SimpsonEdgeWeights:
    """Edge weights on nodes l(s), rho(s), rho(s)+1 for the integral from s to the target node"""
    if target not in EDGE_TARGETS:
        raise ConfigError(f"unknown edge target {target!r}; expected one of {EDGE_TARGETS}")
    if s >= grid.node(grid.N):
        raise StencilOutOfRange(f"s={s!r} is not below T_N={grid.node(grid.N)!r}")
    x = (grid.node(rho(s, grid)) - s) / grid.delta
    b = [float(P.polyval(x, BETA[EDGE_TARGETS.index(target), m])) for m in range(3)]
    return SimpsonEdgeWeights(b[0], b[1], b[2], target)


def _edge_point(x: float, width: float, delta: float) -> np.ndarray:
    """Weights E[target, node] of width * S(s, T_target) at one point s"""
    return width * delta * P.polyval(x, EDGE_MOMENT)


def _edge_exact(x_lo: float, x_hi: float, delta: float) -> np.ndarray:
    """Weights E[target, node] of the s-integral of S(s, T_target) over x in [x_lo, x_hi]"""
    return delta ** 2 * (P.polyval(x_hi, EDGE_ANTI) - P.polyval(x_lo, EDGE_ANTI))


def composite_from(values: np.ndarray, start: int, delta: float) -> np.ndarray:
    """
    Composite rule from T_start to T_i for every i >= start + 2

    Even offsets use composite Simpson; odd offsets use Simpson up to i - 3
    and the 3/8 rule on the last three intervals. Entries below start + 2 are zero.
    """
    out = np.zeros(values.shape)
    seg = values[..., start:]
    n = seg.shape[-1]
    if n < 3:
        return out

    count = (n - 1) // 2
    panels = delta / 3.0 * (
        seg[..., 0:2 * count:2] + 4.0 * seg[..., 1:2 * count:2] + seg[..., 2:2 * count + 1:2]
    )
    simpson = np.cumsum(panels, axis=-1)
    out[..., start + 2:start + 2 * count + 1:2] = simpson

    odd = (n - 2) // 2
    if odd > 0:
        prefix = np.concatenate([np.zeros(simpson.shape[:-1] + (1,)), simpson], axis=-1)[..., :odd]
        tail = 3.0 * delta / 8.0 * (
            seg[..., 0:2 * odd:2]
            + 3.0 * seg[..., 1:2 * odd:2]
            + 3.0 * seg[..., 2:2 * odd + 1:2]
            + seg[..., 3:2 * odd + 2:2]
        )
        out[..., start + 3:start + 2 * odd + 2:2] = prefix + tail
    return out


def _require(node: int, grid: GridPair, what: str):
    if node > grid.N_prime:
        raise StencilOutOfRange(f"{what} needs node {node} beyond N'={grid.N_prime}")


def _simpson_assemble(l: int, E: np.ndarray, comp_weight: float, v: np.ndarray, delta: float) -> np.ndarray:
    row = np.zeros(v.shape)
    stencil = v[..., l:l + 3]
    for t in range(3):
        row[..., l + t] = stencil @ E[t]
    row[..., l + 3:] = (
        row[..., l + 1:l + 2] + comp_weight * composite_from(v, l + 1, delta)[..., l + 3:]
    )
    return row


def _point_row(order: AlgorithmOrder, s: float, l: int, v: np.ndarray, grid: GridPair, width: float) -> np.ndarray:
    """width * S(s, T_i) for i >= l(s) = l, zero below"""
    T = grid.maturity.nodes
    delta = grid.delta
    R = l + 1
    if order is AlgorithmOrder.SIMPSON4:
        _require(l + 2, grid, "Simpson edge rule")
        return _simpson_assemble(l, _edge_point((T[R] - s) / delta, width, delta), width, v, delta)

    _require(R, grid, "maturity quadrature")
    row = np.zeros(v.shape)
    row[..., l] = (T[l] - s) * v[..., l]
    row[..., R] = (T[R] - s) * v[..., R]
    if order is AlgorithmOrder.RECT1:
        tail = delta * np.cumsum(v[..., R + 1:], axis=-1)
    else:
        tail = delta / 2.0 * np.cumsum(v[..., R:-1] + v[..., R + 1:], axis=-1)
    row[..., R + 1:] = row[..., R:R + 1] + tail
    return width * row


def maturity_quadrature(order: AlgorithmOrder, s: float, values: np.ndarray, grid: GridPair) -> np.ndarray:
    """S(s, T_i) approximating the integral of values over [s, T_i], for every i >= l(s)"""
    return _point_row(order, s, ell(s, grid.maturity), np.asarray(values, dtype=float), grid, 1.0)


def integrated_drift(
    order: AlgorithmOrder,
    k: int,
    grid: GridPair,
    sigma_row: np.ndarray,
    i: Optional[int] = None,
) -> np.ndarray:
    """
    Drift quadrature integrated over [t_k, t_{k+1}] with volatility frozen at t_k

    Args:
        order: Algorithm order
        k: Time index, 0 <= k < M
        grid: Grid pair
        sigma_row: Volatility at every maturity node (last axis), one factor
        i: Single maturity index; the whole row is returned when omitted

    Returns:
        Row over maturity nodes, valid for i >= l(t_{k+1}) and zero below
    """
    v = np.asarray(sigma_row, dtype=float)
    T = grid.maturity.nodes
    delta, h = grid.delta, grid.h
    t_k = grid.time.node(k)
    l0, L = grid.ell_k[k], grid.ell_k[k + 1]
    R = L + 1

    if i is not None and not L <= i <= grid.N_prime:
        raise StencilOutOfRange(f"maturity index {i} outside [{L}, {grid.N_prime}] at step {k}")

    if not grid.crossed(k):
        row = _point_row(order, t_k, l0, v, grid, h)
    elif order is AlgorithmOrder.SIMPSON4:
        _require(L + 2, grid, "Simpson edge rule")
        a = T[L] - t_k
        b = grid.time.node(k + 1) - T[L]
        left = _simpson_assemble(l0, _edge_exact(0.0, a / delta, delta), a, v, delta)
        right = _simpson_assemble(L, _edge_point(1.0, b, delta), b, v, delta)
        row = left + right
    else:
        _require(R, grid, "maturity quadrature")
        gap_l = grid.gap(L, k)
        row = np.zeros(v.shape)
        row[..., L] = h * gap_l * v[..., L]
        if order is AlgorithmOrder.RECT1:
            row[..., R] = row[..., L] + h * delta * v[..., R]
            tail = h * delta * np.cumsum(v[..., R + 1:], axis=-1)
        else:
            row[..., R] = (
                gap_l * grid.gap(R, k) / 2.0 * v[..., L]
                - grid.gap(L, k + 2) * delta / 2.0 * v[..., R]
            )
            tail = h * delta / 2.0 * np.cumsum(v[..., R:-1] + v[..., R + 1:], axis=-1)
        row[..., R + 1:] = row[..., R:R + 1] + tail

    row[..., :L] = 0.0
    return row if i is None else row[..., i]


@lru_cache(maxsize=1024)
def drift_operator(order: AlgorithmOrder, grid: GridPair, k: int) -> np.ndarray:
    """Matrix W with integrated_drift(order, k, grid, v) == v @ W for every row v"""
    W = integrated_drift(order, k, grid, np.eye(grid.N_prime + 1))
    W.flags.writeable = False
    return W


def step_drift(order: AlgorithmOrder, k: int, grid: GridPair, sigma_row: np.ndarray) -> np.ndarray:
    """integrated_drift, applied as a cached operator for Simpson on small grids"""
    if order is AlgorithmOrder.SIMPSON4 and grid.N_prime < DENSE_OPERATOR_NODES:
        return np.asarray(sigma_row, dtype=float) @ drift_operator(order, grid, k)
    return integrated_drift(order, k, grid, sigma_row)


@lru_cache(maxsize=256)
def terminal_weights(order: AlgorithmOrder, grid: GridPair, n: int) -> np.ndarray:
    """Node weights of the log-bond integral from t* to T_n"""
    l = grid.ell_k[grid.M]
    if not l < n <= grid.N_prime:
        raise StencilOutOfRange(f"payment node {n} outside ({l}, {grid.N_prime}]")
    w = _point_row(order, grid.time.t_star, l, np.eye(grid.N_prime + 1), grid, 1.0)[:, n].copy()
    w.flags.writeable = False
    return w


def terminal_bond_integral(
    order: AlgorithmOrder,
    f_row: np.ndarray,
    grid: GridPair,
    n: Optional[int] = None,
) -> np.ndarray:
    """Log-bond integral of the terminal forward curve from t* to T_n (default T_N)"""
    n = grid.N if n is None else n
    # row-wise sums keep equal paths bit-equal
    return (np.asarray(f_row, dtype=float) * terminal_weights(order, grid, n)).sum(axis=-1)


def short_rate(order: AlgorithmOrder, t: float, f_values: np.ndarray, grid: MaturityGrid) -> np.ndarray:
    """Short-rate interpolant from forward values at nodes l(t)..l(t)+theta (last axis)"""
    f = np.asarray(f_values, dtype=float)
    if f.shape[-1] != order.theta + 1:
        raise ConfigError(f"{order.name} interpolates {order.theta + 1} nodes, got {f.shape[-1]}")
    l = ell(t, grid)
    if order is AlgorithmOrder.RECT1:
        return f[..., 0]
    u = (t - grid.node(l)) / grid.delta
    if order is AlgorithmOrder.TRAP2:
        return (1.0 - u) * f[..., 0] + u * f[..., 1]
    return f @ np.array([P.polyval(u, CUBIC[j]) for j in range(4)])


def _cubic_integrals(u_lo: float, u_hi: float, delta: float) -> np.ndarray:
    return delta * (P.polyval(u_hi, CUBIC_ANTI) - P.polyval(u_lo, CUBIC_ANTI))


def discount_increment(
    order: AlgorithmOrder,
    k: int,
    f_k: "ForwardState",
    f_k1: "ForwardState",
    grid: GridPair,
    rough: bool = False,
) -> np.ndarray:
    """
    One-step increment of the discount integral over [t_k, t_{k+1}]

    Args:
        order: Algorithm order
        k: Time index
        f_k: Forward state at t_k
        f_k1: Forward state at t_{k+1}, read only on crossing steps
        grid: Grid pair
        rough: Use h * f_k at l_k regardless of grid alignment (diagnostic only)

    Returns:
        Increment per path
    """
    l0, L = grid.ell_k[k], grid.ell_k[k + 1]
    if f_k.frozen_below > l0 or f_k1.frozen_below > L:
        raise MissingFictitiousNode(
            f"step {k} interpolates from node {l0}, but rates below "
            f"{max(f_k.frozen_below, f_k1.frozen_below)} are frozen"
        )
    _require(L + order.theta, grid, "short-rate interpolation")

    fk, fk1 = f_k.rates, f_k1.rates
    h, delta = grid.h, grid.delta
    if rough:
        return h * fk[..., l0]

    crossed = grid.crossed(k)
    a = grid.gap(L, k) if crossed else h
    b = h - a

    if order is AlgorithmOrder.RECT1:
        if not crossed:
            return h * fk[..., l0]
        return a * fk[..., l0] + b * fk1[..., L]

    if order is AlgorithmOrder.TRAP2:
        if not crossed:
            return h * (
                grid.gap(L + 1, k + 0.5) / delta * fk[..., L]
                - grid.gap(L, k + 0.5) / delta * fk[..., L + 1]
            )
        return (
            a * a / (2 * delta) * fk[..., L - 1]
            + a * (2 * delta - a) / (2 * delta) * fk[..., L]
            + b * (2 * delta - b) / (2 * delta) * fk1[..., L]
            + b * b / (2 * delta) * fk1[..., L + 1]
        )

    u0 = -grid.gap(l0, k) / delta
    if not crossed:
        return (fk[..., l0:l0 + 4] * _cubic_integrals(u0, u0 + h / delta, delta)).sum(axis=-1)
    return (
        (fk[..., l0:l0 + 4] * _cubic_integrals(u0, 1.0, delta)).sum(axis=-1)
        + (fk1[..., L:L + 4] * _cubic_integrals(0.0, b / delta, delta)).sum(axis=-1)
    )
