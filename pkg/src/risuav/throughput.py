"""Rate metrics: per-link spectral efficiencies, population totals, the
per-capita ratio deviation used by the joint search, and Jain's fairness
index.

Rates are spectral efficiencies in bps/Hz (no bandwidth multiplier).  All
totals are accumulated left-to-right so that identical positions evaluated
through any code path compare exactly.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .channel import ChannelBuilder, ChannelState, beta_table, eta_all, lambda_all
from .geometry import Position3
from .scenario import Scenario

log = logging.getLogger(__name__)

REPORT_CSV_HEADER = "seed,scheme,M,N,obstacles,K,x,y,d2d_total,cu_total,net,jain"


@dataclass(frozen=True)
class RateReport:
    """Per-entity rates and their totals at one UAV position."""

    per_pair_rates: tuple
    per_cu_rates: tuple
    d2d_total: float
    cu_total: float
    net: float

    def per_entity_rates(self) -> list:
        """One rate per D2D pair followed by one per CU (the fairness population)."""
        return list(self.per_pair_rates) + list(self.per_cu_rates)

    def csv_row(self, seed: int, scheme: str, scn: Scenario, position: Position3) -> str:
        """Single CSV row matching REPORT_CSV_HEADER."""
        fields = [
            seed,
            scheme,
            scn.num_pairs,
            scn.num_cus,
            len(scn.obstacles),
            scn.radio.rician_k,
            position.x,
            position.y,
            self.d2d_total,
            self.cu_total,
            self.net,
            jain_index(self.per_entity_rates()),
        ]
        return ",".join(repr(v) if isinstance(v, float) else str(v) for v in fields)


def _d2d_eval(r: Position3, state: ChannelState, scn: Scenario):
    beta = beta_table(scn.radio)
    eta = eta_all(state, scn)
    b1 = beta[state.hop1_class.astype(np.intp)]
    b2 = beta[state.hop2_class.astype(np.intp)]
    return _kernels.d2d_eval(r.x, r.y, r.z, scn.tx_array, scn.rx_array, eta, b1, b2)


def _cu_eval(r: Position3, state: ChannelState, scn: Scenario):
    beta = beta_table(scn.radio)
    lam = lambda_all(state, scn)
    b = beta[state.cu_class.astype(np.intp)]
    return _kernels.cu_eval(r.x, r.y, r.z, scn.cu_array, lam, b)


def d2d_rate(m: int, r: Position3, state: ChannelState, scn: Scenario) -> float:
    """Rate of pair m at position r with the state's (frozen) hop classes."""
    beta = beta_table(scn.radio)
    eta = eta_all(state, scn)[m : m + 1]
    b1 = beta[[int(state.hop1_class[m])]]
    b2 = beta[[int(state.hop2_class[m])]]
    rates, _, _, _ = _kernels.d2d_eval(
        r.x, r.y, r.z, scn.tx_array[m : m + 1], scn.rx_array[m : m + 1], eta, b1, b2
    )
    return float(rates[0])


def cu_rate(n: int, r: Position3, state: ChannelState, scn: Scenario) -> float:
    """Rate of CU n at position r with the state's (frozen) link class."""
    beta = beta_table(scn.radio)
    lam = lambda_all(state, scn)[n : n + 1]
    b = beta[[int(state.cu_class[n])]]
    rates, _, _, _ = _kernels.cu_eval(r.x, r.y, r.z, scn.cu_array[n : n + 1], lam, b)
    return float(rates[0])


def total_d2d(r: Position3, state: ChannelState, scn: Scenario) -> float:
    """Sum of all D2D pair rates at position r."""
    if scn.num_pairs == 0:
        return 0.0
    _, total, _, _ = _d2d_eval(r, state, scn)
    return total


def total_cu(r: Position3, state: ChannelState, scn: Scenario) -> float:
    """Sum of all CU rates at position r."""
    if scn.num_cus == 0:
        return 0.0
    _, total, _, _ = _cu_eval(r, state, scn)
    return total


def net_throughput(r: Position3, state: ChannelState, scn: Scenario) -> RateReport:
    """Full rate report at position r; net is the sum of the two totals."""
    if scn.num_pairs:
        pair_rates, d2d_t, _, _ = _d2d_eval(r, state, scn)
    else:
        pair_rates, d2d_t = np.empty(0), 0.0
    if scn.num_cus:
        cu_rates, cu_t, _, _ = _cu_eval(r, state, scn)
    else:
        cu_rates, cu_t = np.empty(0), 0.0
    return RateReport(
        per_pair_rates=tuple(pair_rates.tolist()),
        per_cu_rates=tuple(cu_rates.tolist()),
        d2d_total=d2d_t,
        cu_total=cu_t,
        net=d2d_t + cu_t,
    )


def ratio_from_totals(d2d_total: float, cu_total: float, m: int, n: int) -> float:
    """Per-capita CU-to-D2D throughput ratio; +inf when D2D carries nothing.

    Shared by the joint-search objective and its callers so that identical
    inputs produce bit-identical ratios.
    """
    if m < 1 or n < 1:
        raise ValueError("ratio needs at least one pair and one CU")
    if d2d_total == 0.0:
        return math.inf
    return (cu_total / n) / (d2d_total / m)


def ratio_deviation(s: Position3, phi: float, builder: ChannelBuilder, scn: Scenario) -> float:
    """Absolute deviation of the per-capita throughput ratio at s from phi.

    Rebuilds the channel at s (classes depend on position) from the
    builder's frozen fading draw.  Returns +inf when the D2D population
    carries zero throughput at s, so searches skip such positions instead
    of dividing by zero.
    """
    state = builder.at(s)
    report = net_throughput(s, state, scn)
    ratio = ratio_from_totals(report.d2d_total, report.cu_total, scn.num_pairs, scn.num_cus)
    if math.isinf(ratio):
        return math.inf
    return abs(ratio - phi)


def jain_index(rates) -> float:
    """Jain's fairness index (sum x)^2 / (n * sum x^2), in [0, 1].

    Equals 1 iff all entries are equal.  An all-zero population is defined
    as perfectly equal (index 1) and flagged in the log.
    """
    arr = np.asarray(rates, dtype=np.float64)
    if arr.size < 1:
        raise ValueError("jain_index needs at least one rate")
    if np.any(arr < 0):
        raise ValueError("rates must be >= 0")
    sq_sum = float(np.sum(arr * arr))
    if sq_sum == 0.0:
        log.warning("jain_index over all-zero rates; reporting 1.0")
        return 1.0
    total = float(np.sum(arr))
    return total * total / (arr.size * sq_sum)
