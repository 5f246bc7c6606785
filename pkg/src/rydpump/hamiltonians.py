"""Microscopic chain Hamiltonian, effective single-excitation model and
excitation-spectrum diagnostics.

The microscopic model couples every site to a uniform drive (Rabi frequency
``omega``, detuning ``delta``) and pairs of excited sites through the
power-law shift from :mod:`rydpump.lattice`.  Adiabatic elimination of the
n = 0 and n = 2 manifolds at ``delta`` = half the nearest-neighbour shift
yields an XY exchange model in the single-excitation sector plus a resonant
two-photon pump between the ground state and nearest-neighbour doubles.

Sign note: the per-site second-order light shift enters the n = 1 sector
Hamiltonian diagonal with a plus sign, i.e. diag_i = delta_ls(i).  This is
what second-order perturbation theory gives and it is the convention under
which the documented boundary-node dark eigenstates exist.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .lattice import LatticeSpec, calibrate_cp, nearest_shift, pair_shift_table
from .states import BasisIndexer

__all__ = [
    "ModelValidityError",
    "DriveConfig",
    "EffectiveModel",
    "RydbergSpectrum",
    "power_linewidth",
    "prepare",
    "build_full_hamiltonian",
    "f_factor",
    "effective_j",
    "methods_exchange",
    "effective_light_shift",
    "methods_light_shift",
    "build_effective_model",
    "build_h2_operator",
    "rydberg_spectrum",
]

_POLE_GUARD = 1e-9


class ModelValidityError(ValueError):
    """The requested parameters sit on a resonance pole of the effective model."""


@dataclass(frozen=True)
class DriveConfig:
    """Laser and decay parameters in units of the enhanced reservoir rate.

    ``delta=None`` resolves to half the nearest-neighbour shift (the
    two-photon resonance).  ``reservoir=None`` defaults to the chain edges.
    ``gamma`` is the enhanced per-site decay; it equals 1 in internal units
    and is exposed only so tests can rescale.
    """

    omega: float
    gamma_r: float = 1e-4
    delta: float | None = None
    reservoir: tuple[int, ...] | None = None
    gamma: float = 1.0

    def __post_init__(self) -> None:
        if not self.omega > 0:
            raise ValueError(f"omega must be positive, got {self.omega}")
        if not self.gamma_r > 0:
            raise ValueError(f"gamma_r must be positive, got {self.gamma_r}")
        if not self.gamma > 0:
            raise ValueError(f"gamma must be positive, got {self.gamma}")

    @property
    def w_d(self) -> float:
        """Power-broadened linewidth sqrt(gamma_r^2/4 + 2 omega^2)."""
        return float(np.sqrt(self.gamma_r**2 / 4.0 + 2.0 * self.omega**2))

    def reservoir_sites(self, n_sites: int) -> tuple[int, ...]:
        if self.reservoir is None:
            return (0, n_sites - 1)
        sites = tuple(sorted(set(int(s) for s in self.reservoir)))
        if sites and (sites[0] < 0 or sites[-1] >= n_sites):
            raise ValueError(f"reservoir sites {sites} out of range for N={n_sites}")
        return sites

    def gamma_site(self, n_sites: int) -> np.ndarray:
        res = self.reservoir_sites(n_sites)
        g = np.full(n_sites, self.gamma_r)
        g[list(res)] = self.gamma
        return g


def power_linewidth(drive: DriveConfig) -> float:
    return drive.w_d


def prepare(spec: LatticeSpec, drive: DriveConfig) -> tuple[LatticeSpec, float]:
    """Calibrate the interaction coefficient and resolve the detuning.

    Returns the spec with ``cp`` fixed by the linewidth and the working
    detuning (half the nearest-neighbour shift unless overridden).
    """
    cal = spec if spec.cp is not None else calibrate_cp(spec, drive.w_d)
    delta = drive.delta if drive.delta is not None else 0.5 * nearest_shift(cal)
    return cal, delta


def build_full_hamiltonian(
    spec: LatticeSpec, drive: DriveConfig, max_sites: int = 12
) -> np.ndarray:
    """Dense 2^N microscopic Hamiltonian.

    H = sum_i (delta |r><r|_i + omega sigma_x^(i))
        - sum_{i<j} shift_ij |r><r|_i |r><r|_j
    """
    if spec.n_sites > max_sites:
        raise ValueError(f"{spec.n_sites} sites exceeds dense limit {max_sites}")
    cal, delta = prepare(spec, drive)
    n = cal.n_sites
    dim = 1 << n
    shifts = pair_shift_table(cal).shifts
    idx = BasisIndexer(n)
    bits = ((np.arange(dim)[:, None] >> np.arange(n)[None, :]) & 1).astype(float)
    diag = delta * idx.popcounts.astype(float)
    diag -= 0.5 * np.einsum("bi,ij,bj->b", bits, shifts, bits)
    h = np.diag(diag).astype(complex)
    for b in range(dim):
        for k in range(n):
            h[b ^ (1 << k), b] += drive.omega
    return h


def _shift_ratio(cal: LatticeSpec, shifts: np.ndarray, i: int, j: int,
                 truncation: str) -> float:
    """Pair shift over the nearest shift; 0 beyond range under truncation."""
    if truncation == "next_nearest" and abs(i - j) > 2:
        return 0.0
    return float(shifts[i, j] / nearest_shift(cal))


def _check_truncation(truncation: str) -> None:
    if truncation not in ("full", "next_nearest"):
        raise ValueError(f"truncation must be 'full' or 'next_nearest', got {truncation!r}")


def f_factor(spec: LatticeSpec, drive: DriveConfig, i: int, j: int,
             truncation: str = "full") -> float:
    """f_ij = [1 - shift_ij / (nearest_shift/2)]^(-1); 1 for truncated pairs."""
    _check_truncation(truncation)
    cal, _ = prepare(spec, drive)
    shifts = pair_shift_table(cal).shifts
    ratio = _shift_ratio(cal, shifts, i, j, truncation)
    denom = 1.0 - 2.0 * ratio
    if abs(denom) < _POLE_GUARD:
        raise ModelValidityError(f"pair ({i},{j}) sits on the two-photon pole")
    return 1.0 / denom


def _pole_checked_term(omega: float, delta: float, dp: float, w_d: float) -> float:
    if abs(delta - dp) < _POLE_GUARD * w_d:
        raise ModelValidityError(
            f"detuning {delta} within pole guard of pair shift {dp}"
        )
    return omega**2 / (delta - dp)


def effective_j(spec: LatticeSpec, drive: DriveConfig, i: int, j: int,
                truncation: str = "full") -> float:
    """Exchange rate J_ij = omega^2/delta - omega^2/(delta - shift_ij).

    Evaluated in the factored form -omega^2 shift / (delta (delta - shift)),
    which is the same rational function without the catastrophic
    cancellation the written difference suffers for far pairs.
    """
    _check_truncation(truncation)
    if i == j:
        raise ValueError("exchange needs two distinct sites")
    cal, delta = prepare(spec, drive)
    if abs(delta) < _POLE_GUARD * drive.w_d:
        raise ModelValidityError("detuning too close to zero for the effective model")
    if truncation == "next_nearest" and abs(i - j) > 2:
        return 0.0
    shifts = pair_shift_table(cal).shifts
    dp = float(shifts[i, j])
    _pole_checked_term(drive.omega, delta, dp, drive.w_d)
    return -drive.omega**2 * dp / (delta * (delta - dp))


def methods_exchange(spec: LatticeSpec, drive: DriveConfig, i: int, j: int,
                     truncation: str = "full") -> float:
    """Exchange rate in the interference-factor form (2 omega^2/nn)(1 - f_ij).

    The factor 1 - f = -2r/(1 - 2r) (r the shift ratio) is grouped to stay
    exact for far pairs; at the resonant detuning this must agree with
    :func:`effective_j` identically.
    """
    _check_truncation(truncation)
    cal, _ = prepare(spec, drive)
    shifts = pair_shift_table(cal).shifts
    ratio = _shift_ratio(cal, shifts, i, j, truncation)
    denom = 1.0 - 2.0 * ratio
    if abs(denom) < _POLE_GUARD:
        raise ModelValidityError(f"pair ({i},{j}) sits on the two-photon pole")
    one_minus_f = -2.0 * ratio / denom
    return (2.0 * drive.omega**2 / nearest_shift(cal)) * one_minus_f


def effective_light_shift(spec: LatticeSpec, drive: DriveConfig, i: int,
                          truncation: str = "full") -> float:
    """Per-site shift omega^2/delta - sum_{j != i} omega^2/(delta - shift_ij).

    Under next-nearest truncation, pairs beyond range enter with zero shift
    (their f factor tends to 1), which reproduces the sparse-model table of
    :func:`methods_light_shift` at the resonant detuning.
    """
    _check_truncation(truncation)
    cal, delta = prepare(spec, drive)
    if abs(delta) < _POLE_GUARD * drive.w_d:
        raise ModelValidityError("detuning too close to zero for the effective model")
    shifts = pair_shift_table(cal).shifts
    total = drive.omega**2 / delta
    for j in range(cal.n_sites):
        if j == i:
            continue
        dp = nearest_shift(cal) * _shift_ratio(cal, shifts, i, j, truncation)
        total -= _pole_checked_term(drive.omega, delta, dp, drive.w_d)
    return total


def methods_light_shift(xi: float, n_sites: int, i: int, j_unit: float) -> float:
    """Piecewise light-shift table of the truncated model, in absolute units.

    j_unit is the nearest-neighbour exchange 4 omega^2 / nearest_shift.
    """
    x6 = xi**6
    if i in (0, n_sites - 1):
        coeff = 4.0 + 2.0 / (2.0 - x6) - n_sites
    elif i in (1, n_sites - 2):
        coeff = 6.0 + 2.0 / (2.0 - x6) - n_sites
    else:
        coeff = 6.0 + 4.0 / (2.0 - x6) - n_sites
    return 0.5 * j_unit * coeff


@dataclass(frozen=True)
class EffectiveModel:
    """Single-excitation-sector couplings plus the pair-pump amplitude."""

    n_sites: int
    j: np.ndarray
    delta_ls: np.ndarray
    h2_amp: float
    truncation: str
    delta: float
    j_unit: float

    def to_json(self) -> str:
        return json.dumps(
            {
                "n_sites": self.n_sites,
                "truncation": self.truncation,
                "delta": self.delta,
                "j_unit": self.j_unit,
                "h2_amp": self.h2_amp,
                "j": self.j.tolist(),
                "delta_ls": self.delta_ls.tolist(),
            },
            indent=2,
        )

    @classmethod
    def from_json(cls, text: str) -> "EffectiveModel":
        doc = json.loads(text)
        return cls(
            n_sites=int(doc["n_sites"]),
            j=np.asarray(doc["j"], dtype=float),
            delta_ls=np.asarray(doc["delta_ls"], dtype=float),
            h2_amp=float(doc["h2_amp"]),
            truncation=str(doc["truncation"]),
            delta=float(doc["delta"]),
            j_unit=float(doc["j_unit"]),
        )


def build_effective_model(spec: LatticeSpec, drive: DriveConfig,
                          truncation: str = "full") -> EffectiveModel:
    _check_truncation(truncation)
    cal, delta = prepare(spec, drive)
    n = cal.n_sites
    j = np.zeros((n, n))
    for i in range(n):
        for k in range(i + 1, n):
            j[i, k] = j[k, i] = effective_j(cal, drive, i, k, truncation)
    dls = np.asarray(
        [effective_light_shift(cal, drive, i, truncation) for i in range(n)]
    )
    dnn = nearest_shift(cal)
    return EffectiveModel(
        n_sites=n,
        j=j,
        delta_ls=dls,
        h2_amp=2.0 * drive.omega**2 / dnn,
        truncation=truncation,
        delta=delta,
        j_unit=4.0 * drive.omega**2 / dnn,
    )


def build_h2_operator(model: EffectiveModel, indexer: BasisIndexer) -> np.ndarray:
    """Dense pair-pump operator coupling |G> to nearest-neighbour doubles only."""
    if indexer.n_sites != model.n_sites:
        raise ValueError("indexer and model disagree on the number of sites")
    dim = indexer.dim
    h2 = np.zeros((dim, dim), dtype=complex)
    for i in range(model.n_sites - 1):
        pair = (1 << i) | (1 << (i + 1))
        h2[pair, 0] = model.h2_amp
        h2[0, pair] = model.h2_amp
    return h2


@dataclass(frozen=True)
class RydbergSpectrum:
    """Maximally-shifted configuration energies and two-photon diagnostics.

    ``v[n]`` is the interaction energy of the n leftmost sites excited;
    ``anharmonicity[n]`` the stated closed form shift_{0,n+1} + shift_{0,n+2}
    (0-based sites).  The drive-dependent fields are None when no drive is
    supplied.
    """

    v: np.ndarray
    anharmonicity: np.ndarray
    delta2: np.ndarray | None = None
    omega2: np.ndarray | None = None
    w2: np.ndarray | None = None
    blockaded: np.ndarray | None = None


def rydberg_spectrum(spec: LatticeSpec, drive: DriveConfig | None = None) -> RydbergSpectrum:
    if spec.cp is None:
        if drive is None:
            raise ValueError("spectrum needs a calibrated spec or a drive")
        spec, _ = prepare(spec, drive)
    n = spec.n_sites
    shifts = pair_shift_table(spec).shifts
    v = np.zeros(n + 1)
    for m in range(2, n + 1):
        sub = shifts[:m, :m]
        v[m] = 0.5 * float(sub.sum())
    n_anh = max(n - 2, 0)
    anh = np.asarray([shifts[0, m + 1] + shifts[0, m + 2] for m in range(n_anh)])
    if drive is None:
        return RydbergSpectrum(v=v, anharmonicity=anh)
    delta2 = np.asarray([(v[m + 2] - v[m]) / 2.0 for m in range(n_anh)])
    omega2 = 2.0 * drive.omega**2 / delta2
    w2 = np.sqrt(drive.gamma_r**2 + 2.0 * np.abs(omega2) ** 2)
    return RydbergSpectrum(
        v=v, anharmonicity=anh, delta2=delta2, omega2=omega2, w2=w2,
        blockaded=anh > w2,
    )
