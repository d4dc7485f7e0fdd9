"""Numerical laboratory for asymmetric spiked random tensor models.

Theory side: limiting Stieltjes transforms (fixed point and closed forms),
support edges, SNR thresholds, limiting singular values and alignments.
Simulation side: seeded tensor sampling, block-contraction spectra, tensor
power iteration, unfolding and deflation, plus a reproducible Monte-Carlo
harness pairing the two.
"""

from .tensors import (
    SpikeModel,
    build_spiked_tensor,
    contract_all_but_one,
    contract_all_but_two,
    contract_full,
    dump_tensor_csv,
    load_tensor,
    rank_one_tensor,
    random_unit_vector,
    random_unit_vectors,
    sample_gaussian_tensor,
    save_tensor,
    spectral_norm_bound,
)
from .blocks import (
    BlockMatrix,
    block_contraction_matrix,
    hessian_locality_check,
    stacked_singular_vector,
)
from .spectra import (
    EmpiricalMeasure,
    PoleError,
    Spectrum,
    block_trace,
    eig_sym,
    empirical_measure,
    empirical_stieltjes,
    ks_distance,
)
from .stieltjes import (
    DomainError,
    LimitingMeasure,
    StieltjesSolution,
    cubic_d3_measure,
    g_cubic_d3,
    g_hypercubic,
    g_matrix_case,
    generic_measure,
    hypercubic_measure,
    limiting_density,
    matrix_case_measure,
    matrix_case_support,
    measure_for_ratios,
    plain_real_iteration,
    right_edge,
    solve_fixed_point,
)
from .asymptotics import (
    AsymptoticPrediction,
    BelowEdgeError,
    alignments_alpha_form,
    alignments_at,
    compute_beta_s,
    cubic_d3_expansion,
    dispersion,
    estimate_snr_from_lambda,
    hypercubic_beta_s,
    kappa,
    matrix_beta_s,
    predict,
    predict_cubic_d3,
    predict_matrix,
    snr_of_lambda,
    unfolding_threshold,
)
from .estimation import (
    PlantedInit,
    RandomInit,
    SingularTuple,
    WarmInit,
    annealed_power_iteration,
    critical_point_residuals,
    deflate_orthogonal,
    power_iteration,
    refold,
    top_singular_triple,
    unfold,
)
from .harness import (
    ExperimentConfig,
    ExperimentResult,
    run_alignment_sweep,
    run_experiment,
    run_phase_diagram,
    run_rank_r,
    run_snr_roundtrip,
    run_spectrum_compare,
    run_unfolding_compare,
)
from . import kernels

__version__ = "0.1.0"
