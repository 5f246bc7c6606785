"""Pure states and density matrices on N two-level atoms.

Basis convention (shared by every module): computational basis label b has
bit k set when atom k occupies the excited level |r>, bit 0 is the least
significant bit.  Dense representations are limited to MAX_DENSE_SITES.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "MAX_DENSE_SITES",
    "BasisIndexer",
    "QuantumState",
    "partial_trace",
    "excitation_statistics",
    "make_w_state",
    "state_to_json",
    "state_from_json",
]

MAX_DENSE_SITES = 12

_NORM_TOL = 1e-9
_HERM_TOL = 1e-9
_TRACE_TOL = 1e-9
_EIG_TOL = -1e-9


@dataclass(frozen=True)
class BasisIndexer:
    """Excitation-number bookkeeping for the 2^N computational basis."""

    n_sites: int
    popcounts: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        if not 1 <= self.n_sites <= MAX_DENSE_SITES:
            raise ValueError(
                f"dense basis supports 1..{MAX_DENSE_SITES} sites, got {self.n_sites}"
            )
        masks = np.arange(1 << self.n_sites, dtype=np.int64)
        pop = np.zeros_like(masks)
        for k in range(self.n_sites):
            pop += (masks >> k) & 1
        object.__setattr__(self, "popcounts", pop)

    @property
    def dim(self) -> int:
        return 1 << self.n_sites

    def subspace(self, n: int) -> np.ndarray:
        """Basis labels with exactly n excitations, in ascending order."""
        return np.nonzero(self.popcounts == n)[0]

    def n1_indices(self) -> np.ndarray:
        """Single-excitation labels ordered by site: [1, 2, 4, ...]."""
        return np.asarray([1 << k for k in range(self.n_sites)], dtype=np.int64)


class QuantumState:
    """Pure state vector or density matrix over the 2^N basis."""

    def __init__(self, kind: str, data: np.ndarray, n_sites: int):
        if kind not in ("pure", "mixed"):
            raise ValueError(f"kind must be 'pure' or 'mixed', got {kind!r}")
        dim = 1 << n_sites
        data = np.asarray(data, dtype=complex)
        want = (dim,) if kind == "pure" else (dim, dim)
        if data.shape != want:
            raise ValueError(f"state shape {data.shape} != {want} for {n_sites} sites")
        self.kind = kind
        self.data = data
        self.n_sites = n_sites

    @classmethod
    def pure(cls, vec, n_sites: int) -> "QuantumState":
        return cls("pure", np.asarray(vec, dtype=complex), n_sites)

    @classmethod
    def mixed(cls, mat, n_sites: int) -> "QuantumState":
        return cls("mixed", np.asarray(mat, dtype=complex), n_sites)

    @classmethod
    def ground(cls, n_sites: int) -> "QuantumState":
        vec = np.zeros(1 << n_sites, dtype=complex)
        vec[0] = 1.0
        return cls("pure", vec, n_sites)

    def density(self) -> np.ndarray:
        if self.kind == "pure":
            return np.outer(self.data, self.data.conj())
        return self.data

    def purity(self) -> float:
        rho = self.density()
        return float(np.real(np.trace(rho @ rho)))

    def validate(self) -> None:
        if self.kind == "pure":
            norm = float(np.linalg.norm(self.data))
            if abs(norm - 1.0) > _NORM_TOL:
                raise ValueError(f"pure state norm {norm} deviates from 1")
            return
        rho = self.data
        herm = float(np.max(np.abs(rho - rho.conj().T)))
        if herm > _HERM_TOL:
            raise ValueError(f"density matrix hermiticity defect {herm}")
        tr = complex(np.trace(rho))
        if abs(tr - 1.0) > _TRACE_TOL:
            raise ValueError(f"density matrix trace {tr} deviates from 1")
        # Integrators introduce round-off; tolerate slightly negative spectrum.
        evals = np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))
        if evals.min() < _EIG_TOL:
            raise ValueError(f"density matrix has negative eigenvalue {evals.min()}")


def _kept_axes(n_sites: int, keep: list[int]) -> list[int]:
    # Row axis a of the reshaped (2,)*N tensor addresses site n-1-a; the new
    # register orders bit j <-> keep[j], so the leading axes must run over
    # kept sites in descending new-bit order.
    return [n_sites - 1 - s for s in reversed(keep)]


def partial_trace(state: QuantumState, keep) -> QuantumState:
    """Reduced density matrix on the ``keep`` subset (ascending site order)."""
    keep = sorted(set(int(s) for s in keep))
    if not keep:
        raise ValueError("keep set must be non-empty")
    if keep[0] < 0 or keep[-1] >= state.n_sites:
        raise IndexError(f"keep sites {keep} out of range for {state.n_sites} sites")
    n = state.n_sites
    m = len(keep)
    axes = _kept_axes(n, keep)
    if state.kind == "pure":
        tensor = state.data.reshape((2,) * n)
        mat = np.moveaxis(tensor, axes, range(m)).reshape(1 << m, -1)
        red = mat @ mat.conj().T
    else:
        tensor = state.data.reshape((2,) * (2 * n))
        row = [0] * n
        col = [0] * n
        nxt = 0
        out = []
        for a in range(n):
            site = n - 1 - a
            if site in keep:
                row[a] = nxt
                col[a] = nxt + 1
                nxt += 2
            else:
                row[a] = col[a] = nxt
                nxt += 2
        # trace axes share a label; kept axes keep distinct row/col labels
        for a in range(n):
            site = n - 1 - a
            if site not in keep:
                col[a] = row[a]
        out_rows = [row[n - 1 - s] for s in reversed(keep)]
        out_cols = [col[n - 1 - s] for s in reversed(keep)]
        red = np.einsum(tensor, row + col, out_rows + out_cols).reshape(1 << m, 1 << m)
    return QuantumState.mixed(red, m)


def excitation_statistics(state: QuantumState) -> dict[str, float]:
    """Probabilities of total excitation number 0, 1 and >= 2."""
    idx = BasisIndexer(state.n_sites)
    if state.kind == "pure":
        probs = np.abs(state.data) ** 2
    else:
        probs = np.real(np.diag(state.data))
    p0 = float(probs[idx.popcounts == 0].sum())
    p1 = float(probs[idx.popcounts == 1].sum())
    pge2 = float(probs[idx.popcounts >= 2].sum())
    return {"p0": p0, "p1": p1, "p_ge2": pge2}


def make_w_state(n_sites: int, sites, coeffs=None) -> QuantumState:
    """Normalized single-excitation state over ``sites``, ground elsewhere."""
    sites = sorted(set(int(s) for s in sites))
    if not sites:
        raise ValueError("W state needs a non-empty site subset")
    if sites[0] < 0 or sites[-1] >= n_sites:
        raise IndexError(f"sites {sites} out of range for {n_sites} sites")
    if coeffs is None:
        coeffs = np.ones(len(sites), dtype=complex)
    else:
        coeffs = np.asarray(coeffs, dtype=complex)
        if coeffs.shape != (len(sites),):
            raise ValueError("coefficient list length must match the subset size")
    norm = np.linalg.norm(coeffs)
    if norm == 0:
        raise ValueError("coefficient vector must be non-zero")
    vec = np.zeros(1 << n_sites, dtype=complex)
    for s, c in zip(sites, coeffs):
        vec[1 << s] = c / norm
    return QuantumState.pure(vec, n_sites)


def state_to_json(state: QuantumState) -> dict:
    """JSON-ready document; complex data stored as separate re/im arrays."""
    return {
        "kind": state.kind,
        "n_sites": state.n_sites,
        "basis": "bit k of the basis label is site k; bit 0 least significant",
        "re": np.real(state.data).tolist(),
        "im": np.imag(state.data).tolist(),
    }


def state_from_json(doc: dict) -> QuantumState:
    data = np.asarray(doc["re"], dtype=float) + 1j * np.asarray(doc["im"], dtype=float)
    return QuantumState(doc["kind"], data, int(doc["n_sites"]))
