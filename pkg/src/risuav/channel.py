"""mmWave link budget: path loss, Rician/Rayleigh fading, SNR prefactors.

Fading amplitudes are normalized to unit mean-square power so that all
large-scale effects live in the path-loss term.  A channel draw is frozen
per trial (one coherence block): the underlying complex normals are drawn
once per seed, and only the LoS/NLoS transformation applied to them changes
when the UAV moves across a shadow boundary.  That makes rebuilding the
channel at a new candidate position both cheap and consistent with "same
trial, same fading".
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import TYPE_CHECKING

import numpy as np

from . import _kernels
from .geometry import LinkClass, Position3

if TYPE_CHECKING:
    from .scenario import Scenario

# Rician K values above this are treated as pure LoS; avoids overflow in
# the k/(k+1) terms while leaving any physically plausible K untouched.
K_FACTOR_CAP = 1.0e6


@dataclass(frozen=True)
class PathLossLaw:
    """PL(d) = alpha_db + 10 * beta * log10(d), d in meters."""

    alpha_db: float
    beta: float

    def __post_init__(self):
        if not self.beta > 0:
            raise ValueError(f"beta must be > 0, got {self.beta}")

    def to_dict(self) -> dict:
        return {"alpha_db": self.alpha_db, "beta": self.beta}

    @classmethod
    def from_dict(cls, d: dict) -> "PathLossLaw":
        return cls(float(d["alpha_db"]), float(d["beta"]))


@dataclass(frozen=True)
class RadioConfig:
    """Radio constants; defaults are the standard 28 GHz benchmark set."""

    tx_power_d2d_dbm: float = 30.0
    tx_power_cu_dbm: float = 30.0
    gain_tx_dbi: float = 24.5
    gain_rx_dbi: float = 24.5
    gain_uav_dbi: float = 24.5
    noise_dbm: float = -100.0
    ris_elements: int = 250
    pl_los: PathLossLaw = PathLossLaw(61.2, 2.0)
    pl_nlos: PathLossLaw = PathLossLaw(72.0, 2.92)
    rician_k: float = 10.0
    carrier_ghz: float = 28.0

    def __post_init__(self):
        if self.ris_elements < 1:
            raise ValueError(f"ris_elements must be >= 1, got {self.ris_elements}")
        if self.rician_k < 0:
            raise ValueError(f"rician_k must be >= 0, got {self.rician_k}")
        if not math.isfinite(self.noise_dbm):
            raise ValueError("noise_dbm must be finite")

    def law(self, link_class: LinkClass) -> PathLossLaw:
        return self.pl_los if link_class is LinkClass.LOS else self.pl_nlos

    def to_dict(self) -> dict:
        return {
            "tx_power_d2d_dbm": self.tx_power_d2d_dbm,
            "tx_power_cu_dbm": self.tx_power_cu_dbm,
            "gain_tx_dbi": self.gain_tx_dbi,
            "gain_rx_dbi": self.gain_rx_dbi,
            "gain_uav_dbi": self.gain_uav_dbi,
            "noise_dbm": self.noise_dbm,
            "ris_elements": self.ris_elements,
            "pl_los": self.pl_los.to_dict(),
            "pl_nlos": self.pl_nlos.to_dict(),
            "rician_k": self.rician_k,
            "carrier_ghz": self.carrier_ghz,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "RadioConfig":
        return cls(
            tx_power_d2d_dbm=float(d["tx_power_d2d_dbm"]),
            tx_power_cu_dbm=float(d["tx_power_cu_dbm"]),
            gain_tx_dbi=float(d["gain_tx_dbi"]),
            gain_rx_dbi=float(d["gain_rx_dbi"]),
            gain_uav_dbi=float(d["gain_uav_dbi"]),
            noise_dbm=float(d["noise_dbm"]),
            ris_elements=int(d["ris_elements"]),
            pl_los=PathLossLaw.from_dict(d["pl_los"]),
            pl_nlos=PathLossLaw.from_dict(d["pl_nlos"]),
            rician_k=float(d["rician_k"]),
            carrier_ghz=float(d["carrier_ghz"]),
        )


class ChannelMode(Enum):
    """EXPECTED pins all fading amplitudes at 1; SAMPLED freezes one random
    draw per seed."""

    EXPECTED = "expected"
    SAMPLED = "sampled"


def dbm_to_watt(v: float) -> float:
    """Convert a dBm level to Watts."""
    return 10.0 ** ((v - 30.0) / 10.0)


def watt_to_dbm(w: float) -> float:
    """Convert Watts to dBm; w must be positive."""
    if w <= 0:
        raise ValueError(f"power must be > 0 W, got {w}")
    return 10.0 * math.log10(w) + 30.0


def path_loss_db(d: float, link_class: LinkClass, radio: RadioConfig) -> float:
    """Path loss alpha + 10*beta*log10(d) with constants chosen by class."""
    if d <= 0:
        raise ValueError(f"distance must be > 0, got {d}")
    law = radio.law(link_class)
    return law.alpha_db + 10.0 * law.beta * math.log10(d)


def _complex_normal(rng: np.random.Generator, shape) -> np.ndarray:
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / math.sqrt(2.0)


def _rician_amp(c: np.ndarray, k: float) -> np.ndarray:
    # |sqrt(k/(k+1)) + c*sqrt(1/(k+1))| with c a unit complex normal;
    # k=0 reduces to Rayleigh.  Unit mean-square by construction.
    k = min(k, K_FACTOR_CAP)
    return np.abs(math.sqrt(k / (k + 1.0)) + c * math.sqrt(1.0 / (k + 1.0)))


def sample_fading_amp(link_class: LinkClass, k: float, rng: np.random.Generator, size=None):
    """Draw fading amplitudes: Rician(k) on LoS links, Rayleigh on NLoS.

    The NLoS branch ignores k entirely (it is the k=0 case).  Returns a
    scalar when size is None, else an ndarray of that shape.
    """
    if k < 0:
        raise ValueError(f"k must be >= 0, got {k}")
    k_eff = k if link_class is LinkClass.LOS else 0.0
    c = _complex_normal(rng, size)
    amp = _rician_amp(c, k_eff)
    return float(amp) if size is None else amp


@dataclass(frozen=True, eq=False)
class FadingTable:
    """One frozen fading draw, resolved for every possible hop class.

    kappa_table has one row per D2D pair and four columns indexed
    hop1_class*2 + hop2_class holding the squared coherent sum over RIS
    elements; f_sq_table has one row per CU and columns [LoS, NLoS].
    """

    kappa_table: np.ndarray
    f_sq_table: np.ndarray
    mode: ChannelMode
    seed: int

    def __post_init__(self):
        self.kappa_table.setflags(write=False)
        self.f_sq_table.setflags(write=False)


def draw_fading(scn: "Scenario", mode: ChannelMode, seed: int) -> FadingTable:
    """Draw the per-trial fading aggregates for every class combination."""
    m = scn.num_pairs
    n = scn.num_cus
    r = scn.radio.ris_elements
    if mode is ChannelMode.EXPECTED:
        kappa = np.full((m, 4), float(r) ** 2)
        f_sq = np.ones((n, 2))
        return FadingTable(kappa, f_sq, mode, seed)
    rng = np.random.default_rng(seed)
    c_h = _complex_normal(rng, (m, r))
    c_g = _complex_normal(rng, (m, r))
    c_f = _complex_normal(rng, (n,))
    k = scn.radio.rician_k
    amp_h = (_rician_amp(c_h, k), np.abs(c_h))
    amp_g = (_rician_amp(c_g, k), np.abs(c_g))
    kappa = np.empty((m, 4))
    for c1 in (0, 1):
        for c2 in (0, 1):
            kappa[:, c1 * 2 + c2] = np.sum(amp_h[c1] * amp_g[c2], axis=1) ** 2
    f_amp = (_rician_amp(c_f, k), np.abs(c_f))
    f_sq = np.stack([f_amp[0] ** 2, f_amp[1] ** 2], axis=1).reshape(n, 2)
    return FadingTable(kappa, f_sq, mode, seed)


@dataclass(frozen=True, eq=False)
class ChannelState:
    """Per-link classes and fading aggregates resolved at one UAV position.

    hop1/hop2 are the transmitter-to-RIS and RIS-to-receiver hops of each
    D2D pair.  Class arrays hold LinkClass values (0=LoS, 1=NLoS).  kappa
    and f_sq are the aggregates at those classes, taken from the trial's
    frozen FadingTable, which travels along so the state can be rebuilt at
    other positions within the same coherence block.
    """

    position: Position3
    mode: ChannelMode
    seed: int
    hop1_class: np.ndarray
    hop2_class: np.ndarray
    kappa: np.ndarray
    cu_class: np.ndarray
    f_sq: np.ndarray
    table: FadingTable

    def __post_init__(self):
        for arr in (self.hop1_class, self.hop2_class, self.kappa, self.cu_class, self.f_sq):
            arr.setflags(write=False)

    def hop_classes(self, m: int) -> tuple[LinkClass, LinkClass]:
        return LinkClass(int(self.hop1_class[m])), LinkClass(int(self.hop2_class[m]))

    def cu_link_class(self, n: int) -> LinkClass:
        return LinkClass(int(self.cu_class[n]))


class ChannelBuilder:
    """Rebuilds the channel state at arbitrary UAV positions from one frozen
    fading draw (one builder = one trial = one coherence block)."""

    def __init__(self, scn: "Scenario", mode: ChannelMode = ChannelMode.EXPECTED, seed: int = 0):
        self.scenario = scn
        self.mode = mode
        self.seed = seed
        self.table = draw_fading(scn, mode, seed)

    def at(self, r: Position3) -> ChannelState:
        scn = self.scenario
        if r.z != scn.uav_height:
            raise ValueError(f"position height {r.z} != uav_height {scn.uav_height}")
        boxes = scn.obstacle_array
        c1 = _kernels.classify_to_point(scn.tx_array, r.x, r.y, r.z, boxes).astype(np.intp)
        c2 = _kernels.classify_to_point(scn.rx_array, r.x, r.y, r.z, boxes).astype(np.intp)
        cn = _kernels.classify_to_point(scn.cu_array, r.x, r.y, r.z, boxes).astype(np.intp)
        kappa = self.table.kappa_table[np.arange(scn.num_pairs), c1 * 2 + c2]
        f_sq = self.table.f_sq_table[np.arange(scn.num_cus), cn]
        return ChannelState(
            position=r,
            mode=self.mode,
            seed=self.seed,
            hop1_class=c1.astype(np.uint8),
            hop2_class=c2.astype(np.uint8),
            kappa=kappa,
            cu_class=cn.astype(np.uint8),
            f_sq=f_sq,
            table=self.table,
        )


def build_channel_state(
    scn: "Scenario", r: Position3, mode: ChannelMode = ChannelMode.EXPECTED, seed: int = 0
) -> ChannelState:
    """One-shot channel state at position r (draws fading from scratch)."""
    return ChannelBuilder(scn, mode, seed).at(r)


def d2d_prefactors(radio: RadioConfig) -> np.ndarray:
    """Linear SNR prefactors per hop-class combination, excluding kappa.

    eta_m = kappa_m * d2d_prefactors(radio)[c1*2 + c2]; the entries fold the
    transmit power, both antenna gains, both path-loss intercepts, the
    dBm-to-Watt linearization, and the noise power.
    """
    gains_db = radio.tx_power_d2d_dbm + radio.gain_tx_dbi + radio.gain_rx_dbi - 30.0
    alpha = (radio.pl_los.alpha_db, radio.pl_nlos.alpha_db)
    n0 = dbm_to_watt(radio.noise_dbm)
    out = np.empty(4)
    for c1 in (0, 1):
        for c2 in (0, 1):
            out[c1 * 2 + c2] = 10.0 ** ((gains_db - alpha[c1] - alpha[c2]) / 10.0) / n0
    return out


def cu_prefactors(radio: RadioConfig) -> np.ndarray:
    """Linear SNR prefactors per link class, excluding |f|^2.

    lambda_n = f_sq_n * cu_prefactors(radio)[class].
    """
    gains_db = radio.tx_power_cu_dbm + radio.gain_tx_dbi + radio.gain_uav_dbi - 30.0
    alpha = (radio.pl_los.alpha_db, radio.pl_nlos.alpha_db)
    n0 = dbm_to_watt(radio.noise_dbm)
    return np.array(
        [10.0 ** ((gains_db - alpha[c]) / 10.0) / n0 for c in (0, 1)]
    )


def beta_table(radio: RadioConfig) -> np.ndarray:
    """Path-loss exponents indexed by class value (0=LoS, 1=NLoS)."""
    return np.array([radio.pl_los.beta, radio.pl_nlos.beta])


def eta_m(m: int, state: ChannelState, scn: "Scenario") -> float:
    """Linearized SNR prefactor of D2D pair m at the state's classes."""
    cc = int(state.hop1_class[m]) * 2 + int(state.hop2_class[m])
    return float(state.kappa[m] * d2d_prefactors(scn.radio)[cc])


def lambda_n(n: int, state: ChannelState, scn: "Scenario") -> float:
    """Linearized SNR prefactor of CU n at the state's class."""
    return float(state.f_sq[n] * cu_prefactors(scn.radio)[int(state.cu_class[n])])


def eta_all(state: ChannelState, scn: "Scenario") -> np.ndarray:
    """eta for every pair; index-aligned with the scenario's pair list."""
    cc = state.hop1_class.astype(np.intp) * 2 + state.hop2_class.astype(np.intp)
    return state.kappa * d2d_prefactors(scn.radio)[cc]


def lambda_all(state: ChannelState, scn: "Scenario") -> np.ndarray:
    """lambda for every CU; index-aligned with the scenario's CU list."""
    return state.f_sq * cu_prefactors(scn.radio)[state.cu_class.astype(np.intp)]
