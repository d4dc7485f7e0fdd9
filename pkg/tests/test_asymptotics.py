"""Predictions: closed forms vs the generic solver, thresholds, inverse map."""

import numpy as np
import pytest

import spikedtensor as st
from spikedtensor.asymptotics import CUBIC_BETA_S, CUBIC_EDGE

C3 = np.full(3, 1 / 3)
C136 = np.array([1 / 6, 1 / 3, 1 / 2])


def test_predict_matches_cubic_closed_forms():
    for beta in (1.2, 1.5, 2.0, 3.0, 5.0):
        pred = st.predict(beta, C3)
        lam, align = st.predict_cubic_d3(beta)
        assert abs(pred.lambda_inf - lam) < 1e-8
        assert np.max(np.abs(pred.alignments - align)) < 1e-8
        assert pred.above_threshold


def test_predict_below_threshold():
    pred = st.predict(0.5, C136)
    assert not pred.above_threshold
    assert np.all(pred.alignments == 0)
    assert pred.lambda_inf == pred.right_edge


def test_predict_large_snr_asymptote():
    pred = st.predict(50.0, C3)
    assert 0.999 <= pred.lambda_inf / 50.0 <= 1.001
    assert np.all(pred.alignments >= 0.999)


def test_predict_self_consistency():
    for beta in (1.3, 2.0, 4.0):
        pred = st.predict(beta, C136)
        assert abs(st.dispersion(C136, pred.lambda_inf, beta)) < 1e-9
        sol = st.solve_fixed_point(C136, pred.lambda_inf)
        lhs = pred.lambda_inf + sol.g.real
        assert abs(lhs - beta * np.prod(pred.alignments)) < 1e-8


def test_predict_monotone_in_snr():
    betas = np.linspace(CUBIC_BETA_S + 0.05, 10, 40)
    preds = [st.predict(float(b), C3) for b in betas]
    lam = [p.lambda_inf for p in preds]
    ali = [p.alignments[0] for p in preds]
    assert np.all(np.diff(lam) > 0)
    assert np.all(np.diff(ali) > 0)


def test_compute_beta_s_values():
    assert abs(st.compute_beta_s(C3) - CUBIC_BETA_S) < 1e-6
    assert abs(st.compute_beta_s(C136) - 1.1134) < 5e-3
    c4 = np.array([0.1, 1 / 6, 0.25, 29 / 60])
    assert abs(st.compute_beta_s(c4) - 1.234) < 1e-2


def test_hypercubic_threshold_closed_form():
    bs, align = st.hypercubic_beta_s(3)
    assert abs(bs - CUBIC_BETA_S) < 1e-14
    assert abs(align - np.sqrt(0.5)) < 1e-14
    bs4, _ = st.hypercubic_beta_s(4)
    assert abs(bs4 - np.sqrt(3.0 / 4.0) * (2.0 / 3.0) ** -1.0) < 1e-14
    with pytest.raises(ValueError):
        st.hypercubic_beta_s(2)


def test_hypercubic_threshold_matches_generic():
    for d in (3, 4, 5, 6):
        bs, _ = st.hypercubic_beta_s(d)
        assert abs(st.compute_beta_s(np.full(d, 1 / d)) - bs) < 1e-6


def test_hypercubic_threshold_trend():
    rows = [st.hypercubic_beta_s(d) for d in range(3, 21)]
    bs = [r[0] for r in rows]
    al = [r[1] for r in rows]
    assert np.all(np.diff(bs) > 0)
    assert np.all(np.diff(al) > 0)
    assert 1.55 < bs[-1] < 1.65  # approaches ~ e^(1/2)
    assert al[-1] > 0.97


def test_cubic_closed_form_at_threshold():
    lam, align = st.predict_cubic_d3(CUBIC_BETA_S)
    assert abs(lam - CUBIC_EDGE) < 1e-12
    assert abs(align - np.sqrt(0.5)) < 1e-12
    lam0, align0 = st.predict_cubic_d3(0.5)
    assert lam0 == pytest.approx(CUBIC_EDGE)
    assert align0 == 0.0


def test_cubic_expansion_accuracy():
    for db in (0.005, 0.01, 0.02):
        lam_s, align_s = st.cubic_d3_expansion(CUBIC_BETA_S + db)
        lam_c, align_c = st.predict_cubic_d3(CUBIC_BETA_S + db)
        assert abs(lam_s - lam_c) <= 5e-5
        # alignment series carries a sqrt term; remainder is o(db^2)
        assert abs(align_s - align_c) <= 60 * db ** 2.5 + 1e-12


def test_alignment_formula_equivalence():
    # Theorem-8 form against the alpha-product form on random interior ratios
    rng = np.random.default_rng(3)
    for d in (3, 4, 5):
        raw = rng.uniform(0.5, 2.0, d)
        c = raw / raw.sum()
        edge = st.right_edge(c)
        for lam in (edge + 0.3, edge + 1.0):
            beta = st.snr_of_lambda(c, lam)
            q_thm = st.alignments_at(c, lam)
            q_alpha = st.alignments_alpha_form(c, lam, beta)
            assert np.max(np.abs(q_thm - q_alpha)) < 1e-8


def test_matrix_case_values():
    lam, ax, ay, bs = st.predict_matrix(1.0, 0.5)
    assert abs(bs - 0.25 ** 0.25) < 1e-15  # (c(1-c))^(1/4) at c=1/2 is 2^(-1/2)
    assert abs(bs - 1 / np.sqrt(2)) < 1e-15
    assert abs(lam - 1.5) < 1e-12
    assert abs(ax - 1 / np.sqrt(2)) < 1e-10
    assert abs(ay - 1 / np.sqrt(2)) < 1e-10


def test_matrix_alignment_against_alpha_oracle():
    # independent route: alpha-form alignments on the (c, 1-c, 0) embedding
    for c, beta in ((0.5, 1.0), (0.3, 1.2), (0.1, 0.9)):
        lam, ax, ay, bs = st.predict_matrix(beta, c)
        q = st.alignments_alpha_form(np.array([c, 1 - c, 0.0]), lam, beta)
        assert abs(ax - q[0]) < 1e-9
        assert abs(ay - q[1]) < 1e-9
        assert abs(q[2] - 1.0) < 1e-9  # singleton direction aligns fully


def test_matrix_continuity_at_threshold():
    for c in (0.1, 0.3, 0.5):
        bs = st.matrix_beta_s(c)
        lam, ax, ay, _ = st.predict_matrix(bs, c)
        _, outer = st.matrix_case_support(c)
        assert abs(lam - outer) < 1e-9
        assert ax == 0.0 and ay == 0.0
        lam_up, ax_up, _, _ = st.predict_matrix(bs + 1e-5, c)
        assert abs(lam_up - outer) < 1e-4   # continuous transition
        assert ax_up < 0.1


def test_tensor_alignment_discontinuity():
    # orders >= 3 jump to a positive alignment at the threshold
    for d in (3, 4, 5):
        _, a_s = st.hypercubic_beta_s(d)
        assert abs(a_s - np.sqrt((d - 2.0) / (d - 1.0))) < 1e-14
        assert a_s > 0.7


def test_snr_roundtrip_identity():
    for c in (C3, C136, np.array([0.2, 0.3, 0.5])):
        edge = st.right_edge(c)
        bs = st.compute_beta_s(c, edge=edge)
        for beta in np.linspace(bs + 0.05, 10.0, 12):
            pred = st.predict(float(beta), c, edge=edge, beta_s=bs)
            back = st.estimate_snr_from_lambda(pred.lambda_inf, c, edge=edge)
            assert abs(back - beta) < 1e-8


def test_snr_estimate_near_edge():
    edge = st.right_edge(C3)
    bhat = st.estimate_snr_from_lambda(edge + 1e-9, C3, edge=edge)
    assert abs(bhat - CUBIC_BETA_S) < 1e-3


def test_snr_below_edge_rejected():
    with pytest.raises(st.BelowEdgeError):
        st.estimate_snr_from_lambda(1.0, C3)


def test_remark5_form_equals_general_inverse():
    # order-3 special form sqrt(prod(lam+g-g_i) / (lam+g))
    edge = st.right_edge(C136)
    for lam in (edge + 0.2, edge + 1.0, edge + 3.0):
        sol = st.solve_fixed_point(C136, lam)
        g, gi = sol.g.real, sol.g_parts.real
        special = np.sqrt(np.prod(lam + g - gi) / (lam + g))
        assert abs(special - st.snr_of_lambda(C136, lam)) < 1e-10


def test_unfolding_threshold():
    val = st.unfolding_threshold((100, 100, 100))
    assert abs(val - 1e6 ** 0.25 / np.sqrt(300)) < 1e-12
    # matrix-threshold consistency at n=50, d=3
    n = 50
    c = n / (n + n ** 2)
    lhs = st.matrix_beta_s(c)
    rhs = (n ** 1 / (1 + n ** 1) ** 2) ** 0.25
    assert abs(lhs - rhs) < 1e-10
    # monotone in each dimension
    base = st.unfolding_threshold((50, 50, 50))
    assert st.unfolding_threshold((60, 50, 50)) > base
    assert st.unfolding_threshold((50, 50, 60)) > base
    with pytest.raises(ValueError):
        st.unfolding_threshold((10, 10))


def test_predict_rejects_bad_input():
    with pytest.raises(ValueError):
        st.predict(1.0, [0.5, 0.5])
    with pytest.raises(ValueError):
        st.predict(-1.0, C3)
    with pytest.raises(ValueError):
        st.predict(1.0, [0.5, 0.5, 0.0])
