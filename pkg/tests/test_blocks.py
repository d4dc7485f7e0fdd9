"""Block-contraction matrix: structure, spike identities, locality diagnostic."""

import numpy as np
import pytest

import spikedtensor as st
from spikedtensor.blocks import check_block_matrix


def _spiked(dims, beta, seed):
    comps = st.random_unit_vectors(dims, seed + 31)
    model = st.SpikeModel(snr=beta, components=tuple(comps))
    return st.build_spiked_tensor(model, seed), comps


def test_pure_spike_blocks():
    comps = st.random_unit_vectors((4, 5, 6), 3)
    t = st.rank_one_tensor(1.0, comps)
    bm = st.block_contraction_matrix(t, comps)
    u, v, w = comps
    assert np.max(np.abs(bm.block(0, 1) - np.outer(u, v))) < 1e-12
    assert np.max(np.abs(bm.block(0, 2) - np.outer(u, w))) < 1e-12
    assert np.max(np.abs(bm.block(1, 2) - np.outer(v, w))) < 1e-12


def test_blocks_match_contraction_oracle():
    rng = np.random.default_rng(0)
    t = rng.standard_normal((4, 5, 6))
    vs = [v / np.linalg.norm(v) for v in (rng.standard_normal(n) for n in (4, 5, 6))]
    bm = st.block_contraction_matrix(t, vs)
    check_block_matrix(bm)
    for i in range(3):
        for j in range(i + 1, 3):
            assert np.max(np.abs(bm.block(i, j) - st.contract_all_but_two(t, vs, (i, j)))) < 1e-12


def test_linearity_in_tensor():
    rng = np.random.default_rng(9)
    a = rng.standard_normal((3, 3, 3))
    b = rng.standard_normal((3, 3, 3))
    vs = [v / np.linalg.norm(v) for v in rng.standard_normal((3, 3))]
    lhs = st.block_contraction_matrix(2.0 * a - 0.5 * b, vs).data
    rhs = 2.0 * st.block_contraction_matrix(a, vs).data - 0.5 * st.block_contraction_matrix(b, vs).data
    assert np.max(np.abs(lhs - rhs)) < 1e-12


def test_stacked_vector_canonical():
    e = [np.eye(3)[0], np.eye(4)[0], np.eye(5)[0]]
    h = st.stacked_singular_vector(e)
    assert abs(np.linalg.norm(h) - 1.0) < 1e-12
    expected = np.zeros(12)
    expected[[0, 3, 7]] = 1.0 / np.sqrt(3)
    assert np.max(np.abs(h - expected)) < 1e-15


@pytest.mark.parametrize("dims,beta", [((30, 30, 30), 3.0), ((30, 30, 30), 0.0)])
def test_spike_eigenvalue_order3(dims, beta):
    # the stacked singular vectors carry eigenvalue 2*lambda, spike included
    # even at zero SNR
    t, comps = _spiked(dims, beta, 5)
    res = st.power_iteration(t, init=st.RandomInit(17), tol=1e-12, max_sweeps=3000)
    assert res.converged
    bm = st.block_contraction_matrix(t, res.vectors)
    h = st.stacked_singular_vector(res.vectors)
    resid = np.linalg.norm(bm.data @ (h * np.sqrt(3)) - 2 * res.value * (h * np.sqrt(3)))
    assert resid < 1e-8
    top = np.linalg.eigvalsh(bm.data)[-1]
    assert abs(top - 2 * res.value) < 1e-8


def test_spike_eigenvalue_order4():
    t, comps = _spiked((12, 12, 12, 12), 2.0, 3)
    res = st.power_iteration(t, init=st.PlantedInit(components=comps), tol=1e-12, max_sweeps=3000)
    assert res.converged
    bm = st.block_contraction_matrix(t, res.vectors)
    top = np.linalg.eigvalsh(bm.data)[-1]
    assert abs(top - 3 * res.value) < 1e-8


def test_hessian_locality_candidate():
    t, comps = _spiked((30, 30, 30), 3.0, 11)
    res = st.power_iteration(t, init=st.PlantedInit(components=comps), tol=1e-12, max_sweeps=2000)
    diag = st.hessian_locality_check(t, res)
    assert diag.is_local_max_candidate
    assert abs(diag.top_two[0] - 2 * res.value) < 1e-8
    assert diag.top_two[1] <= res.value + 1e-8


def test_hessian_rejects_non_critical():
    t, comps = _spiked((10, 10, 10), 2.0, 2)
    fake = st.SingularTuple(value=1.0, vectors=tuple(comps),
                            residuals=np.ones(3), iterations=0, converged=False)
    with pytest.raises(ValueError):
        st.hessian_locality_check(t, fake)
    neg = st.SingularTuple(value=-1.0, vectors=tuple(comps),
                           residuals=np.zeros(3), iterations=0, converged=True)
    with pytest.raises(ValueError):
        st.hessian_locality_check(t, neg)


def _observed_rank(dims, seed=14):
    rng = np.random.default_rng(seed)
    t = rng.standard_normal(dims)
    vs = [v / np.linalg.norm(v) for v in (rng.standard_normal(n) for n in dims)]
    bm = st.block_contraction_matrix(t, vs)
    eig = np.linalg.eigvalsh(bm.data)
    return int(np.count_nonzero(np.abs(eig) > 1e-8))


def test_generic_rank_full_rank_regime():
    # a.s. rank sum_i min(n_i, N - n_i) = N whenever every mode is strictly
    # dominated by the rest
    for dims in [(3, 4, 5), (2, 3, 4), (4, 4, 4), (3, 3, 4, 4)]:
        n = sum(dims)
        want = sum(min(ni, n - ni) for ni in dims)
        assert want == n
        assert _observed_rank(dims) == want


def test_matrix_structure_rank():
    # two-block symmetrisation of an m x n matrix has rank 2 min(m, n)
    rng = np.random.default_rng(15)
    m, n = 4, 9
    x = rng.standard_normal((m, n))
    sym = np.zeros((m + n, m + n))
    sym[:m, m:] = x
    sym[m:, :m] = x.T
    eig = np.linalg.eigvalsh(sym)
    assert np.count_nonzero(np.abs(eig) > 1e-8) == 2 * min(m, n)


def test_generic_rank_dominant_mode_deviation():
    # when one mode dominates the others the count formula overshoots: the
    # stacked vector (a, -b, 0) is always annihilated by the last block row
    # since both halves contract to the same vector.  Frozen counterexample:
    # dims (2, 3, 9) give rank 9, one below the formula's 10.
    assert _observed_rank((2, 3, 9)) == 9
    n = sum((2, 3, 9))
    assert sum(min(ni, n - ni) for ni in (2, 3, 9)) == 10


def test_block_matrix_exports(tmp_path):
    rng = np.random.default_rng(3)
    t = rng.standard_normal((3, 4, 5))
    vs = [v / np.linalg.norm(v) for v in (rng.standard_normal(n) for n in (3, 4, 5))]
    bm = st.block_contraction_matrix(t, vs)
    from spikedtensor.blocks import save_matrix_csv
    csv_path = tmp_path / "m.csv"
    save_matrix_csv(csv_path, bm.data)
    back = np.loadtxt(csv_path, delimiter=",")
    assert np.max(np.abs(back - bm.data)) < 1e-15
    # binary export shares the tensor header convention (order-2 payload)
    bin_path = tmp_path / "m.bin"
    st.save_tensor(bin_path, bm.data)
    assert np.array_equal(st.load_tensor(bin_path), bm.data)


def test_order2_embedding_structure():
    rng = np.random.default_rng(8)
    m = rng.standard_normal((4, 6))
    a = rng.standard_normal(4)
    a /= np.linalg.norm(a)
    b = rng.standard_normal(6)
    b /= np.linalg.norm(b)
    bm = st.block_contraction_matrix(m, [a, b])
    assert bm.block_dims == (4, 6, 1)
    # leading (m+n) square carries the symmetrised matrix
    assert np.max(np.abs(bm.block(0, 1) - m)) < 1e-15
    assert np.max(np.abs(bm.data[:4, :4])) == 0.0
    # border blocks are the partial contractions
    assert np.max(np.abs(bm.block(0, 2).ravel() - m @ b)) < 1e-12
    assert np.max(np.abs(bm.block(1, 2).ravel() - m.T @ a)) < 1e-12
