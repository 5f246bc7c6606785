"""Jump operators for local decay and the dressed-decay (Lambda-system) analysis.

Every site carries one decay channel |r> -> |g| at its per-site rate; the
enhanced reservoir rate is produced by dressing the long-lived level with a
rapidly decaying auxiliary state, analysed here through the two coupled
coherence equations

    d/dt s_ge = (-gamma_e + i Delta_d) s_ge + i Omega_d s_gr
    d/dt s_gr = -gamma_r s_gr + i Omega_d s_ge

with gamma_x = Gamma_x / 2.  Dressing-module quantities are expressed in
units of the bare decay rate of the long-lived level.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .hamiltonians import DriveConfig
from .states import BasisIndexer

__all__ = [
    "DressingConfig",
    "Jump",
    "lindblad_jumps",
    "effective_decay_rate",
    "integrate_bloch",
    "fit_decay_rate",
]


@dataclass(frozen=True)
class DressingConfig:
    """Dressing field parameters in units of the bare decay rate."""

    omega_d: float
    delta_d: float = 0.0
    gamma_e: float = 1e4

    def __post_init__(self) -> None:
        if self.omega_d < 0:
            raise ValueError(f"omega_d must be non-negative, got {self.omega_d}")
        if not self.gamma_e > 0:
            raise ValueError(f"gamma_e must be positive, got {self.gamma_e}")


@dataclass(frozen=True)
class Jump:
    """One decay channel: amplitude map src -> dst at the given rate.

    The operator is sum_e |dst_e><src_e| and enters the evolution in the
    trace-preserving form rate * (L rho L^dag - {L^dag L, rho} / 2).
    """

    rate: float
    src: np.ndarray
    dst: np.ndarray

    def __post_init__(self) -> None:
        if self.rate < 0:
            raise ValueError(f"jump rate must be non-negative, got {self.rate}")

    def dense(self, dim: int) -> np.ndarray:
        l = np.zeros((dim, dim), dtype=complex)
        l[self.dst, self.src] = 1.0
        return l


def lindblad_jumps(drive: DriveConfig, indexer: BasisIndexer) -> list[Jump]:
    """One |g><r| channel per site in the full 2^N basis."""
    n = indexer.n_sites
    rates = drive.gamma_site(n)
    jumps = []
    for k in range(n):
        src = np.nonzero((np.arange(indexer.dim) >> k) & 1)[0].astype(np.int64)
        dst = src & ~(1 << k)
        jumps.append(Jump(rate=float(rates[k]), src=src, dst=dst))
    return jumps


def effective_decay_rate(cfg: DressingConfig) -> float:
    """Dressed decay rate 2*(gamma_r + gamma_e |Omega_d|^2 / (Delta_d^2 + gamma_e^2)).

    Units of the bare rate, so gamma_r = 1/2 internally; omega_d = 0 returns 1.
    """
    gamma_e = cfg.gamma_e / 2.0
    gamma_r = 0.5
    g_eff = gamma_r + gamma_e * cfg.omega_d**2 / (cfg.delta_d**2 + gamma_e**2)
    return 2.0 * g_eff


def integrate_bloch(cfg: DressingConfig, t_final: float, dt: float) -> dict[str, np.ndarray]:
    """Fixed-step RK4 integration of the coherence pair from s_gr(0)=1.

    Returns sampled series including the population envelope |s_gr|^2.
    The step must resolve the fastest scale: dt * max(gamma_e, omega_d) < 0.1.
    """
    if not t_final > 0:
        raise ValueError(f"t_final must be positive, got {t_final}")
    fastest = max(cfg.gamma_e / 2.0, cfg.omega_d, abs(cfg.delta_d), 0.5)
    if not dt > 0 or dt * fastest >= 0.1:
        raise ValueError(
            f"dt={dt} too coarse: need dt * max(gamma_e/2, omega_d) < 0.1"
        )
    gamma_e = cfg.gamma_e / 2.0
    gamma_r = 0.5
    m = np.array(
        [
            [-gamma_e + 1j * cfg.delta_d, 1j * cfg.omega_d],
            [1j * cfg.omega_d, -gamma_r],
        ],
        dtype=complex,
    )
    n_steps = int(np.ceil(t_final / dt))
    t = np.linspace(0.0, n_steps * dt, n_steps + 1)
    out = np.empty((n_steps + 1, 2), dtype=complex)
    y = np.array([0.0, 1.0], dtype=complex)  # (s_ge, s_gr)
    out[0] = y
    for k in range(n_steps):
        k1 = m @ y
        k2 = m @ (y + 0.5 * dt * k1)
        k3 = m @ (y + 0.5 * dt * k2)
        k4 = m @ (y + dt * k3)
        y = y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        out[k + 1] = y
    return {
        "t": t,
        "sigma_ge": out[:, 0],
        "sigma_gr": out[:, 1],
        "population": np.abs(out[:, 1]) ** 2,
    }


def fit_decay_rate(t: np.ndarray, y: np.ndarray, skip_fraction: float = 0.02) -> float:
    """Log-linear least-squares decay rate of a positive envelope."""
    t = np.asarray(t, dtype=float)
    y = np.asarray(y, dtype=float)
    lo = int(len(t) * skip_fraction)
    mask = y > 0
    mask[:lo] = False
    if mask.sum() < 2:
        raise ValueError("not enough positive samples to fit a decay rate")
    slope, _ = np.polyfit(t[mask], np.log(y[mask]), 1)
    return float(-slope)
