"""Open-system time evolution: dense master-equation integration, stochastic
wavefunction trajectories, and steady-state extraction.

Two simulation tiers share one interface:

* the *full* tier evolves the microscopic 2^N Hamiltonian (tractable only
  for small N and short horizons because the drive sets a fast timescale);
* the *effective* tier evolves the exchange model plus the pair pump on the
  truncated basis {ground} + {singles} + {nearest-neighbour doubles}
  (dimension 2N), which is what the long-horizon scenarios use.

The trajectory unraveling uses the norm-threshold method with an exact
propagator ladder (see _kernels) and per-trajectory Philox substreams keyed
by (seed, trajectory index), so results are independent of worker count and
bit-reproducible for a fixed seed.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from . import _kernels
from .dissipation import Jump, lindblad_jumps
from .hamiltonians import DriveConfig, EffectiveModel, build_effective_model
from .lattice import LatticeSpec
from .states import BasisIndexer, QuantumState

__all__ = [
    "EvolutionProblem",
    "TrajectoryEnsemble",
    "EffectiveBasis",
    "TrajectoryCollapseError",
    "StepSizeError",
    "NonUniqueSteadyStateError",
    "build_effective_hamiltonian",
    "effective_jumps",
    "build_effective_problem",
    "build_full_problem",
    "evolve_master",
    "evolve_trajectories",
    "liouvillian_matrix",
    "liouvillian_spectrum",
    "steady_state",
    "trace_distance",
]

MASTER_MAX_SITES = 8  # dense master equation limit for the full tier
SUPEROP_MAX_DIM = 64  # dense Liouvillian assembly limit


class TrajectoryCollapseError(RuntimeError):
    pass


class StepSizeError(RuntimeError):
    pass


class NonUniqueSteadyStateError(RuntimeError):
    pass


@dataclass(frozen=True)
class EffectiveBasis:
    """Truncated n <= 2 register: [ground, r_0..r_{N-1}, d_0..d_{N-2}].

    Double d_i hosts excitations on sites (i, i+1); the pump only reaches
    those and decay only leaves them, so the space is closed.
    """

    n_sites: int

    @property
    def dim(self) -> int:
        return 2 * self.n_sites

    def single(self, site: int) -> int:
        return 1 + site

    def double(self, bond: int) -> int:
        return 1 + self.n_sites + bond

    def full_labels(self) -> np.ndarray:
        """Computational-basis label of each truncated basis state."""
        n = self.n_sites
        labels = [0]
        labels += [1 << s for s in range(n)]
        labels += [(1 << b) | (1 << (b + 1)) for b in range(n - 1)]
        return np.asarray(labels, dtype=np.int64)

    def excitation_numbers(self) -> np.ndarray:
        n = self.n_sites
        return np.asarray([0] + [1] * n + [2] * (n - 1))

    def embed_vector(self, vec: np.ndarray) -> QuantumState:
        full = np.zeros(1 << self.n_sites, dtype=complex)
        full[self.full_labels()] = vec
        return QuantumState.pure(full, self.n_sites)

    def embed_matrix(self, mat: np.ndarray) -> QuantumState:
        full = np.zeros((1 << self.n_sites,) * 2, dtype=complex)
        lab = self.full_labels()
        full[np.ix_(lab, lab)] = mat
        return QuantumState.mixed(full, self.n_sites)

    def n1_block(self, mat: np.ndarray) -> np.ndarray:
        n = self.n_sites
        return mat[1 : n + 1, 1 : n + 1]


@dataclass(frozen=True)
class EvolutionProblem:
    """Hamiltonian, jump channels and sampling grid for one evolution run."""

    hamiltonian: np.ndarray
    jumps: list[Jump]
    t_final: float
    sample_times: np.ndarray
    basis: EffectiveBasis | None = None
    indexer: BasisIndexer | None = None

    def __post_init__(self) -> None:
        h = self.hamiltonian
        if h.ndim != 2 or h.shape[0] != h.shape[1]:
            raise ValueError(f"hamiltonian must be square, got {h.shape}")
        ts = np.asarray(self.sample_times, dtype=float)
        if ts.size == 0 or ts[0] < 0 or ts[-1] > self.t_final + 1e-12:
            raise ValueError("sample_times must lie inside [0, t_final]")
        if np.any(np.diff(ts) <= 0):
            raise ValueError("sample_times must be strictly increasing")
        object.__setattr__(self, "sample_times", ts)
        dim = h.shape[0]
        for jump in self.jumps:
            if jump.src.max(initial=-1) >= dim or jump.dst.max(initial=-1) >= dim:
                raise ValueError("jump index outside the state space")

    @property
    def dim(self) -> int:
        return self.hamiltonian.shape[0]

    def decay_diagonal(self) -> np.ndarray:
        """Diagonal of sum_k rate_k L_k^dag L_k (the channels are index maps)."""
        w = np.zeros(self.dim)
        for jump in self.jumps:
            w[jump.src] += jump.rate
        return w

    def effective_hamiltonian(self) -> np.ndarray:
        return self.hamiltonian - 0.5j * np.diag(self.decay_diagonal())


@dataclass
class TrajectoryEnsemble:
    n_traj: int
    seed: int
    sample_times: np.ndarray
    states: np.ndarray  # (n_traj, n_samples, dim) normalized pure states
    mean_rho: np.ndarray = field(init=False)  # (n_samples, dim, dim)

    def __post_init__(self) -> None:
        n_samples, dim = self.states.shape[1], self.states.shape[2]
        mean = np.zeros((n_samples, dim, dim), dtype=complex)
        # fixed summation order by trajectory index keeps the reduction
        # independent of how trajectories were scheduled
        for t in range(self.n_traj):
            for s in range(n_samples):
                psi = self.states[t, s]
                mean[s] += np.outer(psi, psi.conj())
        mean /= self.n_traj
        self.mean_rho = mean


def build_effective_hamiltonian(model: EffectiveModel) -> np.ndarray:
    """Exchange block plus resonant pump on the truncated n <= 2 register."""
    basis = EffectiveBasis(model.n_sites)
    n = model.n_sites
    h = np.zeros((basis.dim, basis.dim), dtype=complex)
    h[1 : n + 1, 1 : n + 1] = model.j + np.diag(model.delta_ls)
    for b in range(n - 1):
        h[basis.double(b), 0] = model.h2_amp
        h[0, basis.double(b)] = model.h2_amp
    return h


def effective_jumps(drive: DriveConfig, n_sites: int) -> list[Jump]:
    """Per-site decay channels expressed on the truncated register."""
    basis = EffectiveBasis(n_sites)
    rates = drive.gamma_site(n_sites)
    jumps = []
    for k in range(n_sites):
        src = [basis.single(k)]
        dst = [0]
        if k + 1 < n_sites:  # double (k, k+1) decays into the single at k+1
            src.append(basis.double(k))
            dst.append(basis.single(k + 1))
        if k - 1 >= 0:  # double (k-1, k) decays into the single at k-1
            src.append(basis.double(k - 1))
            dst.append(basis.single(k - 1))
        jumps.append(Jump(rate=float(rates[k]),
                          src=np.asarray(src, dtype=np.int64),
                          dst=np.asarray(dst, dtype=np.int64)))
    return jumps


def build_effective_problem(spec: LatticeSpec, drive: DriveConfig,
                            t_final: float, sample_times,
                            truncation: str = "full") -> EvolutionProblem:
    model = build_effective_model(spec, drive, truncation)
    return EvolutionProblem(
        hamiltonian=build_effective_hamiltonian(model),
        jumps=effective_jumps(drive, spec.n_sites),
        t_final=t_final,
        sample_times=np.asarray(sample_times, dtype=float),
        basis=EffectiveBasis(spec.n_sites),
    )


def build_full_problem(spec: LatticeSpec, drive: DriveConfig,
                       t_final: float, sample_times) -> EvolutionProblem:
    from .hamiltonians import build_full_hamiltonian

    if spec.n_sites > MASTER_MAX_SITES:
        raise ValueError(
            f"full tier master equation limited to {MASTER_MAX_SITES} sites"
        )
    indexer = BasisIndexer(spec.n_sites)
    return EvolutionProblem(
        hamiltonian=build_full_hamiltonian(spec, drive),
        jumps=lindblad_jumps(drive, indexer),
        t_final=t_final,
        sample_times=np.asarray(sample_times, dtype=float),
        indexer=indexer,
    )


# ---------------------------------------------------------------------------
# Master equation
# ---------------------------------------------------------------------------

# Dormand-Prince 5(4) tableau
_DP_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_DP_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_DP_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_DP_B4 = np.array(
    [5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40]
)


def _make_rhs(problem: EvolutionProblem):
    """Vectorized Lindblad right-hand side acting on rho.ravel().

    Small problems use the dense superoperator (one gemv per stage); larger
    ones fall back to matrix products with precomputed scatter indices.
    """
    d = problem.dim
    if d <= SUPEROP_MAX_DIM:
        sup = liouvillian_matrix(problem)

        def rhs(flat: np.ndarray) -> np.ndarray:
            return sup @ flat

        return rhs

    h = problem.hamiltonian
    w = problem.decay_diagonal()
    scatter = [(np.ix_(j.dst, j.dst), np.ix_(j.src, j.src), j.rate)
               for j in problem.jumps]

    def rhs(flat: np.ndarray) -> np.ndarray:
        rho = flat.reshape(d, d)
        out = -1j * (h @ rho - rho @ h)
        out -= 0.5 * (w[:, None] * rho + rho * w[None, :])
        for dst, src, rate in scatter:
            out[dst] += rate * rho[src]
        return out.reshape(-1)

    return rhs


def _check_physical(rho: np.ndarray, t: float) -> None:
    tr = complex(np.trace(rho))
    if abs(tr - 1.0) > 1e-9:
        raise StepSizeError(f"trace drifted to {tr} at t={t}")
    herm = float(np.max(np.abs(rho - rho.conj().T)))
    if herm > 1e-9:
        raise StepSizeError(f"hermiticity defect {herm} at t={t}")
    evals = np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))
    if evals.min() < -1e-7:
        raise StepSizeError(f"negative eigenvalue {evals.min()} at t={t}")


def evolve_master(problem: EvolutionProblem, rho0, tol: float = 1e-8,
                  check: bool = True) -> np.ndarray:
    """Adaptive Dormand-Prince integration of the master equation.

    ``rho0`` may be a QuantumState (full tier) or a dense matrix in the
    problem basis.  Returns the density matrices at the sample times; each
    sample is validated for trace, hermiticity and positivity.
    """
    if isinstance(rho0, QuantumState):
        rho = rho0.density().astype(complex)
    else:
        rho = np.asarray(rho0, dtype=complex)
        if rho.ndim == 1:
            rho = np.outer(rho, rho.conj())
    if rho.shape != (problem.dim, problem.dim):
        raise ValueError(f"initial state shape {rho.shape} != dim {problem.dim}")

    samples = np.empty((len(problem.sample_times), problem.dim, problem.dim),
                       dtype=complex)
    rhs = _make_rhs(problem)
    scale = max(
        float(np.max(np.abs(problem.hamiltonian))),
        float(np.max(problem.decay_diagonal(), initial=0.0)),
        1e-12,
    )
    if scale * problem.t_final > 5e7:
        raise StepSizeError(
            "horizon too stiff for explicit integration "
            f"(scale * t_final = {scale * problem.t_final:.2e}); the full "
            "register at strong drive is only feasible over short horizons"
        )
    t = 0.0
    dt = min(0.1 / scale, problem.t_final or 1.0)
    dt_min = 1e-14 * max(problem.t_final, 1.0)
    y = rho.reshape(-1).copy()
    k = [np.empty_like(y) for _ in range(7)]
    out_idx = 0
    targets = problem.sample_times
    while out_idx < len(targets):
        target = targets[out_idx]
        if target - t <= 1e-12 * max(1.0, target):
            mat = y.reshape(problem.dim, problem.dim)
            samples[out_idx] = mat
            if check:
                _check_physical(mat, target)
            out_idx += 1
            continue
        clipped = dt >= target - t
        step = target - t if clipped else dt
        k[0] = rhs(y)
        for stage in range(1, 7):
            acc = y.copy()
            for j, a in enumerate(_DP_A[stage]):
                if a != 0.0:
                    acc += (step * a) * k[j]
            k[stage] = rhs(acc)
        y5 = y.copy()
        for j in range(7):
            if _DP_B5[j] != 0.0:
                y5 += (step * _DP_B5[j]) * k[j]
        err = np.zeros_like(y)
        for j in range(7):
            diff = _DP_B5[j] - _DP_B4[j]
            if diff != 0.0:
                err += (step * diff) * k[j]
        err_norm = float(np.max(np.abs(err)))
        if err_norm <= tol:
            t = target if clipped else t + step
            # the exact flow preserves hermiticity; project out the
            # accumulated antisymmetric round-off (trace and positivity are
            # left untouched and remain genuine accuracy checks)
            mat = y5.reshape(problem.dim, problem.dim)
            y = (0.5 * (mat + mat.conj().T)).reshape(-1)
            grow = 0.9 * (tol / err_norm) ** 0.2 if err_norm > 0 else 5.0
            new_dt = step * min(5.0, max(0.2, grow))
            dt = max(dt, new_dt) if clipped else new_dt
        else:
            dt = step * max(0.2, 0.9 * (tol / err_norm) ** 0.25)
            if dt < dt_min:
                raise StepSizeError(
                    f"step underflow at t={t}: cannot meet tolerance {tol}"
                )
    return samples


# ---------------------------------------------------------------------------
# Trajectories
# ---------------------------------------------------------------------------


def _propagator_ladder(problem: EvolutionProblem, dt: float, levels: int = 24) -> np.ndarray:
    h_eff = problem.effective_hamiltonian()
    ladder = np.empty((levels + 1, problem.dim, problem.dim), dtype=complex)
    for j in range(levels + 1):
        ladder[j] = scipy.linalg.expm(-1j * h_eff * (dt / (1 << j)))
    return ladder


def _channel_arrays(jumps: list[Jump]):
    ptr = [0]
    src: list[int] = []
    dst: list[int] = []
    rates = []
    for jump in jumps:
        src.extend(jump.src.tolist())
        dst.extend(jump.dst.tolist())
        ptr.append(len(src))
        rates.append(jump.rate)
    return (np.asarray(ptr, dtype=np.int64), np.asarray(src, dtype=np.int64),
            np.asarray(dst, dtype=np.int64), np.asarray(rates, dtype=np.float64))


def _traj_uniforms(seed: int, traj: int, n: int) -> np.ndarray:
    gen = np.random.Generator(np.random.Philox(key=np.array([seed, traj], dtype=np.uint64)))
    return gen.random(n)


def evolve_trajectories(problem: EvolutionProblem, psi0, n_traj: int, seed: int,
                        dt: float | None = None, workers: int | None = None,
                        keep_states: bool = True,
                        initial_draws: int | None = None) -> TrajectoryEnsemble:
    """Monte-Carlo wavefunction ensemble with deterministic substreams."""
    if isinstance(psi0, QuantumState):
        if psi0.kind != "pure":
            raise ValueError("trajectories need a pure initial state")
        vec = psi0.data.astype(complex)
    else:
        vec = np.asarray(psi0, dtype=complex)
    if vec.shape != (problem.dim,):
        raise ValueError(f"psi0 shape {vec.shape} != dim {problem.dim}")
    if n_traj < 1:
        raise ValueError("need at least one trajectory")

    ts = problem.sample_times
    if ts[0] != 0.0:
        raise ValueError("trajectory sampling must start at t = 0")
    spacing = np.diff(ts)
    base = float(spacing.min())
    if np.max(np.abs(spacing / base - np.round(spacing / base))) > 1e-9:
        raise ValueError("sample times must be commensurate for trajectories")
    rate_scale = max(float(np.sum([j.rate for j in problem.jumps])), 1e-12)
    h_scale = max(float(np.max(np.abs(problem.hamiltonian))), 1e-12)
    if dt is None:
        dt = min(0.05 / rate_scale, 0.2 / h_scale, base)
    steps_per_base = max(1, int(np.ceil(base / dt - 1e-9)))
    dt = base / steps_per_base
    # sample grid must be a subset of an equispaced base grid
    ratios = np.round(spacing / base).astype(int)
    if not np.all(ratios == ratios[0]):
        raise ValueError("trajectory sample times must be equispaced")
    steps_per_sample = steps_per_base * int(ratios[0])
    if steps_per_sample * (len(ts) - 1) * n_traj > 5e9:
        raise ValueError(
            "trajectory workload too stiff for this horizon; reduce t_final, "
            "increase dt, or use the effective tier"
        )

    if workers is not None:
        _kernels.set_num_threads(workers)

    ladder = _propagator_ladder(problem, dt)
    ch_ptr, ch_src, ch_dst, ch_rate = _channel_arrays(problem.jumps)
    n_samples = len(ts) - 1
    states = np.empty((n_traj, n_samples + 1, problem.dim), dtype=complex)
    status = np.empty(n_traj, dtype=np.int64)

    expected_jumps = problem.t_final * rate_scale
    n_draws = initial_draws if initial_draws else int(3 * expected_jumps + 64)
    uniforms = np.empty((n_traj, n_draws))
    for t in range(n_traj):
        uniforms[t] = _traj_uniforms(seed, t, n_draws)

    _kernels.mcwf_ensemble(vec, ladder, n_samples, steps_per_sample,
                           ch_ptr, ch_src, ch_dst, ch_rate, uniforms, states, status)

    # retry exhausted streams with longer, prefix-identical draws
    for t in range(n_traj):
        draws = n_draws
        while status[t] == -1:
            draws *= 2
            if draws > 10**8:
                raise TrajectoryCollapseError(
                    f"trajectory {t} exceeded the random-draw budget"
                )
            u = _traj_uniforms(seed, t, draws)
            status[t] = _kernels.mcwf_trajectory(
                vec, ladder, n_samples, steps_per_sample,
                ch_ptr, ch_src, ch_dst, ch_rate, u, states[t],
            )
        if status[t] == -2:
            raise TrajectoryCollapseError(f"trajectory {t} collapsed to zero norm")

    ensemble = TrajectoryEnsemble(n_traj=n_traj, seed=seed,
                                  sample_times=ts, states=states)
    if not keep_states:
        ensemble.states = np.empty((0, 0, 0), dtype=complex)
    return ensemble


# ---------------------------------------------------------------------------
# Steady state and Liouvillian diagnostics
# ---------------------------------------------------------------------------


def liouvillian_matrix(problem: EvolutionProblem) -> np.ndarray:
    """Dense superoperator acting on row-major vectorized density matrices."""
    d = problem.dim
    if d > SUPEROP_MAX_DIM:
        raise ValueError(f"dense superoperator limited to dim {SUPEROP_MAX_DIM}")
    eye = np.eye(d)
    h = problem.hamiltonian
    sup = -1j * (np.kron(h, eye) - np.kron(eye, h.T))
    w = problem.decay_diagonal()
    sup -= 0.5 * np.kron(np.diag(w), eye)
    sup -= 0.5 * np.kron(eye, np.diag(w))
    for jump in problem.jumps:
        l = jump.dense(d)
        sup += jump.rate * np.kron(l, l.conj())
    return sup


def liouvillian_spectrum(problem: EvolutionProblem) -> np.ndarray:
    return np.linalg.eigvals(liouvillian_matrix(problem))


def steady_state(problem: EvolutionProblem, gap_tol: float = 1e-10) -> np.ndarray:
    """Kernel vector of the Liouvillian, hermitized and trace-normalized.

    Raises NonUniqueSteadyStateError when a second eigenvalue sits within
    ``gap_tol`` of zero.  The result is the density matrix in the problem
    basis; a residual fixed-point check guards against a defective kernel.
    """
    sup = liouvillian_matrix(problem)
    evals, evecs = np.linalg.eig(sup)
    order = np.argsort(np.abs(evals))
    if len(evals) > 1 and abs(evals[order[1]]) < gap_tol:
        raise NonUniqueSteadyStateError(
            f"second Liouvillian eigenvalue {evals[order[1]]} within {gap_tol} of zero"
        )
    d = problem.dim
    rho = evecs[:, order[0]].reshape(d, d)
    rho = 0.5 * (rho + rho.conj().T)
    tr = np.trace(rho)
    if abs(tr) < 1e-14:
        raise NonUniqueSteadyStateError("steady-state candidate has zero trace")
    rho = rho / tr
    resid = float(np.max(np.abs(sup @ rho.reshape(-1))))
    if resid > 1e-6:
        raise NonUniqueSteadyStateError(f"steady-state residual {resid} too large")
    return rho


def trace_distance(rho_a: np.ndarray, rho_b: np.ndarray) -> float:
    diff = rho_a - rho_b
    diff = 0.5 * (diff + diff.conj().T)
    return float(0.5 * np.sum(np.abs(np.linalg.eigvalsh(diff))))
