"""Hot inner loops: stochastic-wavefunction stepping and Walsh-basis searches.

Each kernel exists twice: a numba @njit build and a pure-numpy twin running
the identical algorithm (same control flow, same random-stream consumption).
Set RYDPUMP_PURE_NUMPY=1 to force the numpy path; it is also selected
automatically when numba is unavailable.  The two paths agree to floating
round-off (BLAS vs explicit summation), not bitwise; each path on its own is
bit-reproducible for a fixed seed.
"""

from __future__ import annotations

import os

import numpy as np

__all__ = [
    "USING_NUMBA",
    "mcwf_trajectory",
    "mcwf_ensemble",
    "fwht",
    "best_subset_score_exact",
    "subset_scores",
    "local_search_subset",
    "set_num_threads",
]

_FORCE_NUMPY = os.environ.get("RYDPUMP_PURE_NUMPY", "").strip() not in ("", "0")

if not _FORCE_NUMPY:
    try:
        import numba
        from numba import njit, prange

        USING_NUMBA = True
    except ImportError:  # pragma: no cover - numba is a declared dependency
        USING_NUMBA = False
else:
    USING_NUMBA = False


def set_num_threads(n: int) -> None:
    if USING_NUMBA and n >= 1:
        numba.set_num_threads(min(n, numba.config.NUMBA_NUM_THREADS))


# ---------------------------------------------------------------------------
# Monte-Carlo wavefunction trajectory
# ---------------------------------------------------------------------------
# The propagator ladder holds U[j] = expm(-i H_eff dt / 2^j), j = 0..B, so a
# norm-threshold crossing inside a step is bisected down to dt / 2^B without
# extra matrix exponentials.  Status codes: >= 0 number of uniforms consumed,
# -1 random stream exhausted (caller retries with a longer prefix-identical
# stream), -2 zero-norm collapse.


def _traj_core(psi0, ladder, n_samples, steps_per_sample,
               ch_ptr, ch_src, ch_dst, ch_rate, uniforms, out_states):
    d = psi0.shape[0]
    b_top = ladder.shape[0] - 1
    full = 1 << b_top
    n_ch = ch_ptr.shape[0] - 1
    n_draws = uniforms.shape[0]

    psi = psi0.copy()
    weights = np.empty(n_ch, np.float64)
    iu = 0
    if iu >= n_draws:
        return -1
    r = uniforms[iu]
    iu += 1
    if r < 1e-300:
        r = 1e-300
    out_states[0, :] = psi
    for s in range(n_samples):
        for _ in range(steps_per_sample):
            remaining = full
            lvl = 0
            while remaining > 0:
                while (1 << (b_top - lvl)) > remaining:
                    lvl += 1
                trial = ladder[lvl] @ psi
                nrm = np.real(np.vdot(trial, trial))
                if nrm > r:
                    psi = trial
                    remaining -= 1 << (b_top - lvl)
                elif lvl < b_top:
                    lvl += 1
                else:
                    # jump inside the finest slice; channel weights use the
                    # pre-slice state
                    total = 0.0
                    for k in range(n_ch):
                        acc = 0.0
                        for e in range(ch_ptr[k], ch_ptr[k + 1]):
                            z = psi[ch_src[e]]
                            acc += z.real * z.real + z.imag * z.imag
                        weights[k] = ch_rate[k] * acc
                        total += weights[k]
                    if total <= 0.0:
                        return -2
                    if iu + 1 >= n_draws:
                        return -1
                    target = uniforms[iu] * total
                    iu += 1
                    k_sel = n_ch - 1
                    acc = 0.0
                    for k in range(n_ch):
                        acc += weights[k]
                        if target <= acc:
                            k_sel = k
                            break
                    jumped = np.zeros(d, np.complex128)
                    for e in range(ch_ptr[k_sel], ch_ptr[k_sel + 1]):
                        jumped[ch_dst[e]] = psi[ch_src[e]]
                    nrm2 = np.real(np.vdot(jumped, jumped))
                    if nrm2 <= 0.0:
                        return -2
                    psi = jumped / np.sqrt(nrm2)
                    r = uniforms[iu]
                    iu += 1
                    if r < 1e-300:
                        r = 1e-300
                    remaining -= 1
                    lvl = 0  # fresh threshold: restart from the coarsest chunk
        nrm3 = np.real(np.vdot(psi, psi))
        if nrm3 <= 0.0:
            return -2
        out_states[s + 1, :] = psi / np.sqrt(nrm3)
    return iu


_traj_numpy = _traj_core
if USING_NUMBA:
    _traj_numba = njit(cache=True)(_traj_core)

    @njit(parallel=True, cache=True)
    def _ensemble_numba(psi0, ladder, n_samples, steps_per_sample,
                        ch_ptr, ch_src, ch_dst, ch_rate, uniforms, out, status):
        for t in prange(uniforms.shape[0]):
            status[t] = _traj_numba(
                psi0, ladder, n_samples, steps_per_sample,
                ch_ptr, ch_src, ch_dst, ch_rate, uniforms[t], out[t],
            )


def mcwf_trajectory(psi0, ladder, n_samples, steps_per_sample,
                    ch_ptr, ch_src, ch_dst, ch_rate, uniforms, out_states) -> int:
    fn = _traj_numba if USING_NUMBA else _traj_numpy
    return int(fn(psi0, ladder, n_samples, steps_per_sample,
                  ch_ptr, ch_src, ch_dst, ch_rate, uniforms, out_states))


def mcwf_ensemble(psi0, ladder, n_samples, steps_per_sample,
                  ch_ptr, ch_src, ch_dst, ch_rate, uniforms, out, status) -> None:
    """Run one trajectory per row of ``uniforms`` into preallocated buffers."""
    if USING_NUMBA:
        _ensemble_numba(psi0, ladder, n_samples, steps_per_sample,
                        ch_ptr, ch_src, ch_dst, ch_rate, uniforms, out, status)
    else:
        for t in range(uniforms.shape[0]):
            status[t] = _traj_numpy(
                psi0, ladder, n_samples, steps_per_sample,
                ch_ptr, ch_src, ch_dst, ch_rate, uniforms[t], out[t],
            )


# ---------------------------------------------------------------------------
# Walsh-Hadamard transform and balanced-subset searches
# ---------------------------------------------------------------------------


def _fwht_core(x):
    n = x.shape[0]
    h = 1
    while h < n:
        for start in range(0, n, 2 * h):
            for k in range(start, start + h):
                a = x[k]
                b = x[k + h]
                x[k] = a + b
                x[k + h] = a - b
        h *= 2
    return x


_fwht_numpy = _fwht_core
if USING_NUMBA:
    _fwht_numba = njit(cache=True)(_fwht_core)


def fwht(x: np.ndarray) -> np.ndarray:
    """In-place unnormalized Walsh-Hadamard transform (length a power of two)."""
    n = x.shape[0]
    if n & (n - 1):
        raise ValueError(f"length must be a power of two, got {n}")
    fn = _fwht_numba if USING_NUMBA else _fwht_numpy
    return fn(x)


def _hadamard(n: int) -> np.ndarray:
    h = np.ones((1, 1))
    while h.shape[0] < n:
        h = np.block([[h, h], [h, -h]])
    return h


if USING_NUMBA:
    @njit(cache=True)
    def _exact_numba(n, q):
        # max over all q-subsets and sign patterns of sum_i F_i^4 with
        # F = WHT(signed indicator); first sign fixed +1 (global phase).
        best = 0.0
        v = np.empty(n, np.float64)
        pos = np.empty(n, np.int64)
        for mask in range(1 << n):
            m = mask
            c = 0
            while m:
                m &= m - 1
                c += 1
            if c != q:
                continue
            idx = 0
            for b in range(n):
                if (mask >> b) & 1:
                    pos[idx] = b
                    idx += 1
            for smask in range(1 << (q - 1)):
                for a in range(n):
                    v[a] = 0.0
                v[pos[0]] = 1.0
                for e in range(1, q):
                    if (smask >> (e - 1)) & 1:
                        v[pos[e]] = -1.0
                    else:
                        v[pos[e]] = 1.0
                _fwht_numba(v)
                s4 = 0.0
                for a in range(n):
                    s4 += v[a] ** 4
                if s4 > best:
                    best = s4
        return best


def _exact_numpy(n, q):
    # vectorized twin: enumerate subsets, batch the sign patterns
    from itertools import combinations

    had = _hadamard(n)
    signs = np.ones((1 << (q - 1), q))
    for smask in range(1 << (q - 1)):
        for e in range(1, q):
            if (smask >> (e - 1)) & 1:
                signs[smask, e] = -1.0
    best = 0.0
    for subset in combinations(range(n), q):
        f = signs @ had[:, list(subset)].T
        s4 = float(np.sum(f**4, axis=1).max())
        if s4 > best:
            best = s4
    return best


def best_subset_score_exact(n: int, q: int) -> float:
    """Exhaustive max of sum(F^4) over subsets of size q and sign patterns."""
    if q < 1 or q > n:
        raise ValueError(f"subset size {q} out of range for register {n}")
    if USING_NUMBA:
        return float(_exact_numba(n, q))
    return float(_exact_numpy(n, q))


def subset_scores(members: np.ndarray) -> np.ndarray:
    """sum(F^4) of the all-plus indicator for each 0/1 membership row."""
    n = members.shape[1]
    f = members.astype(float) @ _hadamard(n).T
    return np.sum(f**4, axis=1)


if USING_NUMBA:
    @njit(cache=True)
    def _local_numba(n, member, score, max_iters):
        v = np.empty(n, np.float64)
        for _ in range(max_iters):
            best_gain = 0.0
            best_in = -1
            best_out = -1
            for site_out in range(n):
                if member[site_out] == 0:
                    continue
                for site_in in range(n):
                    if member[site_in] == 1:
                        continue
                    for a in range(n):
                        v[a] = float(member[a])
                    v[site_out] = 0.0
                    v[site_in] = 1.0
                    _fwht_numba(v)
                    s4 = 0.0
                    for a in range(n):
                        s4 += v[a] ** 4
                    if s4 - score > best_gain:
                        best_gain = s4 - score
                        best_in = site_in
                        best_out = site_out
            if best_in < 0:
                break
            member[best_out] = 0
            member[best_in] = 1
            score += best_gain
        return score


def _local_numpy(n, member, score, max_iters):
    had = _hadamard(n)
    for _ in range(max_iters):
        best_gain = 0.0
        best_in = -1
        best_out = -1
        base = member.astype(float)
        for site_out in range(n):
            if member[site_out] == 0:
                continue
            for site_in in range(n):
                if member[site_in] == 1:
                    continue
                v = base.copy()
                v[site_out] = 0.0
                v[site_in] = 1.0
                s4 = float(np.sum((had @ v) ** 4))
                if s4 - score > best_gain:
                    best_gain = s4 - score
                    best_in = site_in
                    best_out = site_out
        if best_in < 0:
            break
        member[best_out] = 0
        member[best_in] = 1
        score += best_gain
    return score


def local_search_subset(n: int, member: np.ndarray, score: float,
                        max_iters: int = 64) -> float:
    """Improve an all-plus subset score by single-site swaps; mutates member."""
    if USING_NUMBA:
        return float(_local_numba(n, member, score, max_iters))
    return float(_local_numpy(n, member, score, max_iters))
