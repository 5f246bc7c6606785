import numpy as np
import pytest

from rydpump import _kernels


def hadamard(n):
    h = np.ones((1, 1))
    while h.shape[0] < n:
        h = np.block([[h, h], [h, -h]])
    return h


def test_fwht_matches_matrix_transform():
    rng = np.random.default_rng(0)
    for n in (2, 8, 32, 128):
        x = rng.normal(size=n)
        got = _kernels.fwht(x.copy())
        assert np.allclose(got, hadamard(n) @ x, atol=1e-10)
    with pytest.raises(ValueError):
        _kernels.fwht(np.zeros(3))


def test_exact_search_backends_agree():
    for n in (4, 8):
        for q in range(1, n + 1):
            assert _kernels._exact_numpy(n, q) == pytest.approx(
                _kernels.best_subset_score_exact(n, q), rel=1e-12
            )


def test_exact_search_known_values():
    # an aligned dyadic q-block transforms to n/q entries of size q,
    # so its fourth-power sum is n * q^3 (and that is the optimum)
    for n in (4, 8, 16):
        q = 1
        while q <= n:
            assert _kernels.best_subset_score_exact(n, q) == pytest.approx(
                float(n * q**3), rel=1e-12
            )
            q *= 2
    # three of four sites: 84 (exhaustive hand count)
    assert _kernels.best_subset_score_exact(4, 3) == pytest.approx(84.0)


def test_subset_scores_vectorized():
    n = 16
    members = np.zeros((3, n), dtype=np.int64)
    members[0, :4] = 1
    members[1, 4:8] = 1
    members[2, 3:7] = 1
    scores = _kernels.subset_scores(members)
    # both aligned 4-blocks score n q^3; the straddling window scores less
    assert scores[0] == pytest.approx(16.0 * 64.0)
    assert scores[1] == pytest.approx(16.0 * 64.0)
    assert scores[2] < scores[0]


def test_local_search_recovers_aligned_block():
    n = 16
    member = np.zeros(n, dtype=np.int64)
    member[3:7] = 1  # misaligned window
    start = float(_kernels.subset_scores(member[None, :])[0])
    best = _kernels.local_search_subset(n, member, start)
    assert best == pytest.approx(16.0 * 64.0)
    assert member.sum() == 4
