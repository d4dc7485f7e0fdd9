"""Tensor core: sampling statistics, contractions vs oracles, model assembly."""

import numpy as np
import pytest

import spikedtensor as st


def test_sampling_deterministic():
    a = st.sample_gaussian_tensor((2, 2, 2), 7)
    b = st.sample_gaussian_tensor((2, 2, 2), 7)
    assert np.array_equal(a, b)
    assert a.shape == (2, 2, 2)


def test_sampling_mean_clt_bound():
    # CLT: |mean| <= 3.5 / sqrt(count) for 50^3 entries
    t = st.sample_gaussian_tensor((50, 50, 50), 1)
    assert abs(t.mean()) <= 3.5 / np.sqrt(t.size)


def test_sampling_variance_concentration():
    t = st.sample_gaussian_tensor((30, 40, 50), 3)
    assert 0.97 <= t.var() <= 1.03


def test_sampling_rejects_bad_dims():
    with pytest.raises(ValueError):
        st.sample_gaussian_tensor((0, 3), 1)
    with pytest.raises(ValueError):
        st.sample_gaussian_tensor((3, -1, 2), 1)


def test_spike_model_invariants():
    comps = st.random_unit_vectors((5, 6, 7), 0)
    m = st.SpikeModel(snr=2.0, components=tuple(comps))
    assert m.dims == (5, 6, 7)
    assert m.noise_scale == 1.0 / np.sqrt(18)
    with pytest.raises(ValueError):
        st.SpikeModel(snr=-1.0, components=tuple(comps))
    with pytest.raises(ValueError):
        st.SpikeModel(snr=1.0, components=(comps[0] * 2.0, comps[1], comps[2]))


def test_build_spiked_zero_snr_is_scaled_noise():
    comps = st.random_unit_vectors((4, 4, 4), 5)
    model = st.SpikeModel(snr=0.0, components=tuple(comps))
    t = st.build_spiked_tensor(model, 11)
    noise = st.sample_gaussian_tensor((4, 4, 4), 11)
    assert np.array_equal(t, noise / np.sqrt(12))


def test_build_spiked_noise_hook_pure_rank_one():
    comps = st.random_unit_vectors((6, 5, 4), 2)
    model = st.SpikeModel(snr=5.0, components=tuple(comps))
    t = st.build_spiked_tensor(model, 0, noise=np.zeros((6, 5, 4)))
    assert abs(st.contract_full(t, comps) - 5.0) < 1e-12


def test_build_spiked_entry_formula_exact():
    comps = st.random_unit_vectors((3, 4, 5), 9)
    model = st.SpikeModel(snr=2.0, components=tuple(comps))
    noise = st.sample_gaussian_tensor((3, 4, 5), 13)
    t = st.build_spiked_tensor(model, 13)
    want = 2.0 * np.einsum("i,j,k->ijk", *comps) + noise / np.sqrt(12)
    assert np.max(np.abs(t - want)) < 1e-15


def test_spiked_contraction_mean_near_snr():
    # contraction of the noise along fixed units is N(0,1)/sqrt(N)
    dims, beta = (20, 20, 20), 2.0
    comps = st.random_unit_vectors(dims, 11)
    model = st.SpikeModel(snr=beta, components=tuple(comps))
    vals = [st.contract_full(st.build_spiked_tensor(model, s), comps) for s in range(100)]
    assert abs(np.mean(vals) - beta) <= 5.0 / np.sqrt(60)


def test_contract_full_rank_one_identity():
    comps = st.random_unit_vectors((5, 6, 7), 3)
    t = st.rank_one_tensor(1.0, comps)
    assert abs(st.contract_full(t, comps) - 1.0) < 1e-12


def test_contract_full_matrix_picks_entry():
    t = np.ones((2, 2))
    e1 = np.array([1.0, 0.0])
    e2 = np.array([0.0, 1.0])
    assert abs(st.contract_full(t, [e1, e2]) - 1.0) < 1e-15


def test_contract_full_brute_force():
    rng = np.random.default_rng(4)
    t = rng.standard_normal((5, 5, 5))
    vs = [v / np.linalg.norm(v) for v in rng.standard_normal((3, 5))]
    acc = 0.0
    for i in range(5):
        for j in range(5):
            for k in range(5):
                acc += t[i, j, k] * vs[0][i] * vs[1][j] * vs[2][k]
    assert abs(st.contract_full(t, vs) - acc) < 1e-12


def test_contract_all_but_one():
    comps = st.random_unit_vectors((4, 5, 6), 8)
    t = st.rank_one_tensor(1.0, comps)
    out = st.contract_all_but_one(t, comps, 0)
    assert np.max(np.abs(out - comps[0])) < 1e-12
    # definitional consistency with the full contraction
    rng = np.random.default_rng(0)
    t = rng.standard_normal((4, 5, 6))
    vs = [v / np.linalg.norm(v) for v in (rng.standard_normal(n) for n in (4, 5, 6))]
    for hole in range(3):
        dot = st.contract_all_but_one(t, vs, hole) @ vs[hole]
        assert abs(dot - st.contract_full(t, vs)) < 1e-12
    with pytest.raises(ValueError):
        st.contract_all_but_one(t, vs, 3)


def test_contract_all_but_two():
    comps = st.random_unit_vectors((4, 5, 6), 21)
    t = st.rank_one_tensor(1.0, comps)
    m = st.contract_all_but_two(t, comps, (0, 1))
    assert np.max(np.abs(m - np.outer(comps[0], comps[1]))) < 1e-12
    # applying the free matrix to vs[j] reproduces the one-hole contraction
    rng = np.random.default_rng(2)
    t = rng.standard_normal((3, 4, 5, 6))
    vs = [v / np.linalg.norm(v) for v in (rng.standard_normal(n) for n in (3, 4, 5, 6))]
    m = st.contract_all_but_two(t, vs, (1, 3))
    assert np.max(np.abs(m @ vs[3] - st.contract_all_but_one(t, vs, 1))) < 1e-12
    with pytest.raises(ValueError):
        st.contract_all_but_two(t, vs, (2, 2))


def test_multilinearity():
    rng = np.random.default_rng(6)
    t = rng.standard_normal((4, 4, 4))
    vs = [v / np.linalg.norm(v) for v in rng.standard_normal((3, 4))]
    w = rng.standard_normal(4)
    w /= np.linalg.norm(w)
    a, b = 0.3, -1.7
    lhs = sum(t[i, j, k] * (a * vs[0] + b * w)[i] * vs[1][j] * vs[2][k]
              for i in range(4) for j in range(4) for k in range(4))
    rhs = a * st.contract_full(t, vs) + b * st.contract_full(t, [w, vs[1], vs[2]])
    assert abs(lhs - rhs) < 1e-12


def test_permutation_consistency():
    rng = np.random.default_rng(7)
    t = rng.standard_normal((3, 4, 5))
    vs = [v / np.linalg.norm(v) for v in (rng.standard_normal(n) for n in (3, 4, 5))]
    perm = (2, 0, 1)
    tp = np.transpose(t, perm)
    vsp = [vs[p] for p in perm]
    assert abs(st.contract_full(t, vs) - st.contract_full(tp, vsp)) < 1e-12


def test_spectral_norm_bound_shape():
    # closed form at dims=[1], delta=1 (the tail term is log 2, not zero)
    val = st.spectral_norm_bound([1], 1.0)
    assert abs(val - np.sqrt(2.0 * (np.log(2.0 / np.log(1.5)) + np.log(2.0)))) < 1e-14
    # monotone in total dimension and decreasing in delta
    assert st.spectral_norm_bound([10, 10], 0.1) < st.spectral_norm_bound([10, 20], 0.1)
    assert st.spectral_norm_bound([10, 10], 0.01) > st.spectral_norm_bound([10, 10], 0.5)
    with pytest.raises(ValueError):
        st.spectral_norm_bound([3, 3], 0.0)


def test_spectral_norm_bound_dominates_samples():
    bound = st.spectral_norm_bound((10, 10, 10), 0.01)
    worst = 0.0
    for seed in range(50):
        x = st.sample_gaussian_tensor((10, 10, 10), 1000 + seed)
        res = st.power_iteration(x, init=st.RandomInit(seed), tol=1e-8, max_sweeps=300)
        worst = max(worst, res.value)
    assert worst < bound


def test_binary_roundtrip(tmp_path):
    t = st.sample_gaussian_tensor((3, 4, 5), 17)
    path = tmp_path / "t.bin"
    st.save_tensor(path, t)
    back = st.load_tensor(path)
    assert np.array_equal(t, back)
    raw = path.read_bytes()
    assert raw[:8] == b"SPKTNSR\x00"
    with pytest.raises(ValueError):
        st.load_tensor(__file__)


def test_csv_dump(tmp_path):
    t = st.sample_gaussian_tensor((2, 3), 1)
    path = tmp_path / "t.csv"
    st.dump_tensor_csv(path, t)
    lines = path.read_text().strip().splitlines()
    assert lines[0] == "i1,i2,value"
    assert len(lines) == 1 + t.size
    i, j, val = lines[1 + 3].split(",")  # row-major: entry (1, 0)
    assert (int(i), int(j)) == (1, 0)
    assert abs(float(val) - t[1, 0]) < 1e-15
