"""Geometry of the 1D staggered triangular chain and power-law pair shifts.

Unit system used throughout the package: lengths are measured in units of
the blockade radius (the distance at which the pair shift equals the
power-broadened linewidth), and rates/energies in units of the enhanced
reservoir decay rate.  Site indices are 0-based; bit k of a computational
basis label addresses site k.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

__all__ = [
    "LatticeSpec",
    "PairShiftTable",
    "build_positions",
    "pair_distance",
    "pair_shift",
    "pair_shift_table",
    "nearest_shift",
    "blockade_radius",
    "calibrate_cp",
]


@dataclass(frozen=True)
class LatticeSpec:
    """Staggered triangular chain with aspect ratio ``xi = a1/a0``.

    ``a0`` is the nearest-neighbour distance, ``a1 = xi*a0`` the
    next-nearest one (both rows of the zig-zag).  ``cp`` is the power-law
    interaction coefficient in units of energy * length^p; it is derived
    from the drive via :func:`calibrate_cp`, never a free input.
    """

    n_sites: int
    a0: float
    xi: float
    p: int = 6
    cp: float | None = None

    def __post_init__(self) -> None:
        if self.n_sites < 2:
            raise ValueError(f"need at least 2 sites, got n_sites={self.n_sites}")
        if not self.a0 > 0:
            raise ValueError(f"a0 must be positive, got {self.a0}")
        # cos(theta) = xi/2, so xi >= 2 degenerates the triangle into a line.
        if not 0.0 < self.xi < 2.0:
            raise ValueError(f"xi must lie in (0, 2), got {self.xi}")
        if self.p < 1:
            raise ValueError(f"interaction exponent must be >= 1, got {self.p}")
        if self.cp is not None and not self.cp > 0:
            raise ValueError(f"cp must be positive when set, got {self.cp}")

    @property
    def a1(self) -> float:
        return self.xi * self.a0


@dataclass(frozen=True)
class PairShiftTable:
    """Symmetric table of pair shifts; diagonal entries are zero."""

    shifts: np.ndarray


def build_positions(spec: LatticeSpec) -> np.ndarray:
    """Site coordinates of the staggered chain, shape (n_sites, 2).

    Even sites sit on the bottom row with spacing a1; each odd site sits at
    offset a0*(cos t, sin t) from the preceding even site, cos t = xi/2.
    Every |i-j| = 1 pair is then at distance a0 and every |i-j| = 2 pair at
    distance a1.
    """
    cos_t = spec.xi / 2.0
    sin_t = np.sqrt(1.0 - cos_t * cos_t)
    pos = np.empty((spec.n_sites, 2))
    for i in range(spec.n_sites):
        k, odd = divmod(i, 2)
        if odd:
            pos[i] = (k * spec.a1 + spec.a0 * cos_t, spec.a0 * sin_t)
        else:
            pos[i] = (k * spec.a1, 0.0)
    return pos


def _check_pair(spec: LatticeSpec, i: int, j: int) -> None:
    n = spec.n_sites
    if not (0 <= i < n and 0 <= j < n):
        raise IndexError(f"site index out of range: ({i}, {j}) for n_sites={n}")
    if i == j:
        raise ValueError(f"self-interaction is undefined (i = j = {i})")


def pair_distance(spec: LatticeSpec, i: int, j: int) -> float:
    _check_pair(spec, i, j)
    pos = build_positions(spec)
    return float(np.hypot(*(pos[i] - pos[j])))


def pair_shift(spec: LatticeSpec, i: int, j: int) -> float:
    """Power-law shift cp * |x_i - x_j|^(-p) between two distinct sites."""
    _check_pair(spec, i, j)
    if spec.cp is None:
        raise ValueError("spec.cp is unset; calibrate it from the drive first")
    return spec.cp * pair_distance(spec, i, j) ** (-spec.p)


def pair_shift_table(spec: LatticeSpec) -> PairShiftTable:
    if spec.cp is None:
        raise ValueError("spec.cp is unset; calibrate it from the drive first")
    pos = build_positions(spec)
    diff = pos[:, None, :] - pos[None, :, :]
    dist = np.hypot(diff[..., 0], diff[..., 1])
    np.fill_diagonal(dist, np.inf)
    return PairShiftTable(shifts=spec.cp * dist ** (-float(spec.p)))


def nearest_shift(spec: LatticeSpec) -> float:
    """Shift of a nearest-neighbour pair, cp / a0^p."""
    if spec.cp is None:
        raise ValueError("spec.cp is unset; calibrate it from the drive first")
    return spec.cp * spec.a0 ** (-spec.p)


def blockade_radius(cp: float, w_d: float, p: int = 6) -> float:
    """Distance at which the pair shift equals the linewidth: (cp/w_d)^(1/p)."""
    if not (cp > 0 and w_d > 0 and p >= 1):
        raise ValueError("blockade_radius needs positive cp, w_d and p >= 1")
    return (cp / w_d) ** (1.0 / p)


def calibrate_cp(spec: LatticeSpec, w_d: float) -> LatticeSpec:
    """Fix cp so the blockade radius is exactly one length unit.

    With lengths in blockade radii this means cp = w_d, which pins the
    nearest-neighbour shift to w_d * (1/a0)^p and removes the circular
    dependence between the radius, the linewidth and the coefficient.
    """
    if not w_d > 0:
        raise ValueError(f"w_d must be positive, got {w_d}")
    return replace(spec, cp=float(w_d))
