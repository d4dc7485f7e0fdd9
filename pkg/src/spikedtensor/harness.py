"""Reproducible Monte-Carlo experiments pairing theory against simulation.

Every experiment resolves an ExperimentConfig into per-trial records plus an
aggregated summary with theory overlay columns, and can write them as CSV
(with the resolved config as JSON) into an output directory.  Trial t uses
seed base_seed + t; inside a trial, derived streams (planted components,
random initialisation) use fixed documented offsets of that seed, so reruns
are bit-identical.  Trials may execute on a small thread pool; records are
sorted before aggregation and writing, making output independent of
completion order.
"""

from __future__ import annotations

import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, asdict
from pathlib import Path

import numpy as np

from .asymptotics import (
    compute_beta_s,
    estimate_snr_from_lambda,
    hypercubic_beta_s,
    predict,
    predict_matrix,
    unfolding_threshold,
    BelowEdgeError,
)
from .blocks import BlockMatrix, block_contraction_matrix
from .estimation import (
    PlantedInit,
    RandomInit,
    WarmInit,
    deflate_orthogonal,
    power_iteration,
    top_singular_triple,
    unfold,
)
from .spectra import ks_distance, eig_sym, empirical_measure
from .stieltjes import measure_for_ratios, right_edge
from .tensors import (
    SpikeModel,
    build_spiked_tensor,
    random_unit_vector,
    rank_one_tensor,
    sample_gaussian_tensor,
)

# per-trial derived stream offsets (documented contract, do not change)
_COMPONENT_STRIDE = 500009
_INIT_OFFSET = 900007
_QR_OFFSET = 700003


@dataclass
class ExperimentConfig:
    kind: str
    dims: tuple = (50, 50, 50)
    beta_grid: tuple = (2.0,)
    trials: int = 10
    base_seed: int = 1
    strategy: str = "planted"          # planted | random | annealed
    bins: int = 100
    variant: str = "both"              # spectrum_compare: independent | dependent | both
    snrs: tuple = (4.0, 2.5)           # rank_r component strengths
    orders: tuple = tuple(range(3, 13))  # phase_diagram
    mode: int = 0                      # unfolding mode
    tol: float = 1e-10
    max_sweeps: int = 2000
    threads: int = 1
    output_dir: str | None = None

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if len(self.beta_grid) == 0:
            raise ValueError("beta grid must be nonempty")
        self.dims = tuple(int(n) for n in self.dims)
        self.beta_grid = tuple(float(b) for b in self.beta_grid)


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    records: list = field(default_factory=list)
    summary: list = field(default_factory=list)
    theory: list = field(default_factory=list)
    measures: dict = field(default_factory=dict)   # name -> EmpiricalMeasure
    densities: dict = field(default_factory=dict)  # name -> (xs, values)
    wallclock: float = 0.0
    failures: int = 0

    def write(self, outdir, svg: bool = False) -> Path:
        out = Path(outdir)
        out.mkdir(parents=True, exist_ok=True)
        cfg = asdict(self.config)
        cfg["wallclock_seconds"] = round(self.wallclock, 3)
        cfg["failures"] = self.failures
        (out / "config.json").write_text(json.dumps(cfg, indent=2, default=_jsonable) + "\n")
        _write_csv(out / "records.csv", self.records)
        _write_csv(out / "summary.csv", self.summary)
        if self.theory:
            _write_csv(out / "theory.csv", self.theory)
        for name, em in self.measures.items():
            rows = [{"bin_left": l, "bin_right": r, "density": d}
                    for l, r, d in zip(em.bin_edges[:-1], em.bin_edges[1:], em.densities)]
            _write_csv(out / f"measure_{name}.csv", rows)
        for name, (xs, vals) in self.densities.items():
            rows = [{"x": x, "density": v} for x, v in zip(xs, vals)]
            _write_csv(out / f"density_{name}.csv", rows)
        if svg:
            self._render_svg(out)
        return out

    def _render_svg(self, out: Path) -> None:
        from .svgplot import SvgFigure

        for name, em in self.measures.items():
            fig = SvgFigure(xlabel="eigenvalue", ylabel="density")
            fig.add_hist(em.bin_edges, em.densities, label="empirical")
            if name in self.densities:
                xs, vals = self.densities[name]
                fig.add_line(xs, vals, label="limit")
            fig.write(out / f"measure_{name}.svg")
        if self.summary and "beta" in self.summary[0]:
            for col in ("lambda", "alignment"):
                cols = [k for k in self.summary[0] if k.startswith(f"mean_{col}")]
                if not cols:
                    continue
                fig = SvgFigure(xlabel="snr", ylabel=col)
                betas = [row["beta"] for row in self.summary]
                for k in cols:
                    fig.add_line(betas, [row[k] for row in self.summary], label=k, dots=True)
                for k in (k for k in self.summary[0] if k.startswith(f"theory_{col}")):
                    fig.add_line(betas, [row[k] for row in self.summary], label=k)
                fig.write(out / f"sweep_{col}.svg")


def _jsonable(v):
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.floating,)):
        return float(v)
    if isinstance(v, (tuple, set)):
        return list(v)
    raise TypeError(f"not JSON-serialisable: {type(v)}")


def _fmt(v) -> str:
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.15g}"
    return str(v)


def _write_csv(path, rows) -> None:
    if not rows:
        Path(path).write_text("")
        return
    cols = list(rows[0].keys())
    for row in rows[1:]:
        cols.extend(k for k in row.keys() if k not in cols)
    lines = [",".join(cols)]
    for row in rows:
        lines.append(",".join(_fmt(row[k]) if k in row else "" for k in cols))
    Path(path).write_text("\n".join(lines) + "\n")


def _planted_components(dims, trial_seed: int) -> list[np.ndarray]:
    return [random_unit_vector(n, trial_seed + _COMPONENT_STRIDE * (i + 1))
            for i, n in enumerate(dims)]


def _run_trials(worker, trials: int, threads: int) -> list:
    if threads <= 1:
        return [worker(t) for t in range(trials)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(worker, range(trials)))


def _ratios(dims) -> np.ndarray:
    n = sum(dims)
    return np.array([d / n for d in dims])


# ----------------------------------------------------------- spectrum compare

def run_spectrum_compare(cfg: ExperimentConfig) -> ExperimentResult:
    """Empirical spectra of the scaled block matrix against the limiting law.

    independent: tensor noise contracted on fresh random unit vectors;
    dependent: contracted on its own power-iteration singular vectors (the
    observable isolated eigenvalue sits at (d-1) * singular value).
    """
    t0 = time.time()
    dims = cfg.dims
    d = len(dims)
    n_total = sum(dims)
    c = _ratios(dims)
    beta = cfg.beta_grid[0]
    limit = measure_for_ratios(c)
    variants = ["independent", "dependent"] if cfg.variant == "both" else [cfg.variant]

    pooled: dict[str, list] = {v: [] for v in variants}

    def one_trial(t: int):
        seed = cfg.base_seed + t
        rows = []
        for variant in variants:
            if variant == "independent":
                noise = sample_gaussian_tensor(dims, seed)
                vs = [random_unit_vector(n, seed + _COMPONENT_STRIDE * (i + 1))
                      for i, n in enumerate(dims)]
                bm = block_contraction_matrix(noise, vs)
                spec = eig_sym(BlockMatrix(data=bm.data / np.sqrt(n_total),
                                           block_dims=bm.block_dims))
                rows.append({
                    "variant": variant, "trial": t, "seed": seed, "beta": 0.0,
                    "ks": ks_distance(spec, limit),
                    "top_eigenvalue": float(spec.eigenvalues[-1]),
                    "lambda_hat": float("nan"), "spike_gap": float("nan"),
                    "converged": 1,
                })
                pooled[variant].append(spec.eigenvalues)
            else:
                comps = _planted_components(dims, seed)
                model = SpikeModel(snr=beta, components=tuple(comps))
                tens = build_spiked_tensor(model, seed)
                res = power_iteration(tens, init=RandomInit(seed + _INIT_OFFSET),
                                      tol=cfg.tol, max_sweeps=cfg.max_sweeps)
                bm = block_contraction_matrix(tens, res.vectors)
                spec = eig_sym(bm)
                top = float(spec.eigenvalues[-1])
                rows.append({
                    "variant": variant, "trial": t, "seed": seed, "beta": beta,
                    "ks": ks_distance(spec, limit),
                    "top_eigenvalue": top,
                    "lambda_hat": res.value,
                    "spike_gap": abs(top - (d - 1) * res.value),
                    "converged": int(res.converged),
                })
                pooled[variant].append(spec.eigenvalues)
        return rows

    nested = _run_trials(one_trial, cfg.trials, cfg.threads)
    records = sorted((r for rows in nested for r in rows),
                     key=lambda r: (r["variant"], r["trial"]))

    result = ExperimentResult(config=cfg)
    result.records = records
    for variant in variants:
        ks_vals = [r["ks"] for r in records if r["variant"] == variant]
        row = {"variant": variant, "trials": len(ks_vals),
               "mean_ks": float(np.mean(ks_vals)), "max_ks": float(np.max(ks_vals))}
        if variant == "dependent":
            gaps = [r["spike_gap"] for r in records if r["variant"] == variant]
            row["max_spike_gap"] = float(np.max(gaps))
            row["spike_target_multiple"] = d - 1
        result.summary.append(row)
        eig_pool = np.concatenate(pooled[variant])
        result.measures[variant] = empirical_measure(eig_pool, bins=cfg.bins)
    xs = np.linspace(limit.support_min - 0.3, limit.support_max + 0.3, 400)
    result.densities["limit"] = (xs, np.array([limit.density(x) for x in xs]))
    result.failures = sum(1 for r in records if not r["converged"])
    result.wallclock = time.time() - t0
    return result


# ----------------------------------------------------------- alignment sweep

def run_alignment_sweep(cfg: ExperimentConfig) -> ExperimentResult:
    """Estimated singular value and |alignments| against the limits over an
    SNR grid.  Order-2 dims go through the SVD path; annealed strategy walks
    the grid top-down per trial with shared noise."""
    t0 = time.time()
    dims = cfg.dims
    d = len(dims)
    result = ExperimentResult(config=cfg)
    if d == 2:
        _matrix_sweep(cfg, result)
        result.wallclock = time.time() - t0
        return result

    c = _ratios(dims)
    edge = right_edge(c)
    beta_s = compute_beta_s(c, edge=edge)
    theory = {}
    for beta in cfg.beta_grid:
        pred = predict(beta, c, edge=edge, beta_s=beta_s)
        theory[beta] = pred
        result.theory.append({
            "beta": beta, "lambda": pred.lambda_inf,
            **{f"alignment_{i+1}": pred.alignments[i] for i in range(d)},
            "above_threshold": int(pred.above_threshold),
            "beta_s": beta_s, "right_edge": edge,
        })

    grid_desc = tuple(sorted(cfg.beta_grid, reverse=True))

    def one_trial(t: int):
        seed = cfg.base_seed + t
        comps = _planted_components(dims, seed)
        noise = sample_gaussian_tensor(dims, seed)
        rows = []
        init = RandomInit(seed + _INIT_OFFSET)
        for beta in grid_desc:
            model = SpikeModel(snr=beta, components=tuple(comps))
            tens = build_spiked_tensor(model, seed, noise=noise)
            if cfg.strategy == "planted":
                use = PlantedInit(components=tuple(comps))
            elif cfg.strategy == "random":
                use = RandomInit(seed + _INIT_OFFSET)
            elif cfg.strategy == "annealed":
                use = init
            else:
                raise ValueError(f"unknown strategy {cfg.strategy!r}")
            res = power_iteration(tens, init=use, tol=cfg.tol, max_sweeps=cfg.max_sweeps)
            if cfg.strategy == "annealed":
                init = WarmInit(vectors=res.vectors)
            aligns = [abs(float(res.vectors[i] @ comps[i])) for i in range(d)]
            rows.append({
                "trial": t, "seed": seed, "beta": beta, "strategy": cfg.strategy,
                "lambda_hat": res.value,
                **{f"alignment_{i+1}": aligns[i] for i in range(d)},
                "iterations": res.iterations, "converged": int(res.converged),
            })
        return rows

    nested = _run_trials(one_trial, cfg.trials, cfg.threads)
    records = sorted((r for rows in nested for r in rows), key=lambda r: (r["beta"], r["trial"]))
    result.records = records
    for beta in cfg.beta_grid:
        ok = [r for r in records if r["beta"] == beta and r["converged"]]
        pred = theory[beta]
        row = {"beta": beta, "trials": len(ok),
               "failures": sum(1 for r in records if r["beta"] == beta and not r["converged"])}
        if ok:
            row["mean_lambda"] = float(np.mean([r["lambda_hat"] for r in ok]))
            row["std_lambda"] = float(np.std([r["lambda_hat"] for r in ok]))
            for i in range(d):
                vals = [r[f"alignment_{i+1}"] for r in ok]
                row[f"mean_alignment_{i+1}"] = float(np.mean(vals))
                row[f"std_alignment_{i+1}"] = float(np.std(vals))
        row["theory_lambda"] = pred.lambda_inf
        for i in range(d):
            row[f"theory_alignment_{i+1}"] = pred.alignments[i]
        result.summary.append(row)
    result.failures = sum(1 for r in records if not r["converged"])
    result.wallclock = time.time() - t0
    return result


def _matrix_sweep(cfg: ExperimentConfig, result: ExperimentResult) -> None:
    m, n = cfg.dims
    c = m / (m + n)

    for beta in cfg.beta_grid:
        lam, ax, ay, bs = predict_matrix(beta, c)
        result.theory.append({"beta": beta, "lambda": lam, "alignment_1": ax,
                              "alignment_2": ay, "beta_s": bs})

    def one_trial(t: int):
        seed = cfg.base_seed + t
        comps = _planted_components(cfg.dims, seed)
        noise = sample_gaussian_tensor(cfg.dims, seed)
        rows = []
        for beta in cfg.beta_grid:
            model = SpikeModel(snr=beta, components=tuple(comps))
            mat = build_spiked_tensor(model, seed, noise=noise)
            sigma, u, v = top_singular_triple(mat)
            rows.append({
                "trial": t, "seed": seed, "beta": beta, "strategy": "svd",
                "lambda_hat": sigma,
                "alignment_1": abs(float(u @ comps[0])),
                "alignment_2": abs(float(v @ comps[1])),
                "iterations": 1, "converged": 1,
            })
        return rows

    nested = _run_trials(one_trial, cfg.trials, cfg.threads)
    records = sorted((r for rows in nested for r in rows), key=lambda r: (r["beta"], r["trial"]))
    result.records = records
    theory_by_beta = {row["beta"]: row for row in result.theory}
    for beta in cfg.beta_grid:
        rows = [r for r in records if r["beta"] == beta]
        th = theory_by_beta[beta]
        result.summary.append({
            "beta": beta, "trials": len(rows), "failures": 0,
            "mean_lambda": float(np.mean([r["lambda_hat"] for r in rows])),
            "std_lambda": float(np.std([r["lambda_hat"] for r in rows])),
            "mean_alignment_1": float(np.mean([r["alignment_1"] for r in rows])),
            "std_alignment_1": float(np.std([r["alignment_1"] for r in rows])),
            "mean_alignment_2": float(np.mean([r["alignment_2"] for r in rows])),
            "std_alignment_2": float(np.std([r["alignment_2"] for r in rows])),
            "theory_lambda": th["lambda"],
            "theory_alignment_1": th["alignment_1"],
            "theory_alignment_2": th["alignment_2"],
        })


# ------------------------------------------------------------- phase diagram

def run_phase_diagram(cfg: ExperimentConfig) -> ExperimentResult:
    """Equal-ratio thresholds, edge values and threshold alignments vs order,
    with generic-solver cross-checks on small orders."""
    t0 = time.time()
    result = ExperimentResult(config=cfg)
    for d in cfg.orders:
        bs, align = hypercubic_beta_s(d)
        edge = 2.0 * np.sqrt((d - 1.0) / d)
        row = {"order": d, "beta_s": bs, "right_edge": edge,
               "alignment_at_beta_s": align}
        if d <= 6:
            c = np.full(d, 1.0 / d)
            row["beta_s_generic"] = compute_beta_s(c)
            row["beta_s_agreement"] = abs(row["beta_s_generic"] - bs)
        result.summary.append(row)
    result.wallclock = time.time() - t0
    return result


# -------------------------------------------------------------- snr roundtrip

def run_snr_roundtrip(cfg: ExperimentConfig) -> ExperimentResult:
    """SNR estimation from the fitted singular value, theory and Monte-Carlo."""
    t0 = time.time()
    dims = cfg.dims
    c = _ratios(dims)
    edge = right_edge(c)
    beta_s = compute_beta_s(c, edge=edge)
    result = ExperimentResult(config=cfg)
    for beta in cfg.beta_grid:
        pred = predict(beta, c, edge=edge, beta_s=beta_s)
        row = {"beta": beta, "theory_lambda": pred.lambda_inf}
        if pred.above_threshold:
            row["theory_beta_roundtrip"] = estimate_snr_from_lambda(pred.lambda_inf, c, edge=edge)
            row["roundtrip_error"] = abs(row["theory_beta_roundtrip"] - beta)
        else:
            row["theory_beta_roundtrip"] = float("nan")
            row["roundtrip_error"] = float("nan")
        result.theory.append(row)

    def one_trial(t: int):
        seed = cfg.base_seed + t
        comps = _planted_components(dims, seed)
        rows = []
        for beta in cfg.beta_grid:
            model = SpikeModel(snr=beta, components=tuple(comps))
            tens = build_spiked_tensor(model, seed)
            use = PlantedInit(components=tuple(comps)) if cfg.strategy == "planted" \
                else RandomInit(seed + _INIT_OFFSET)
            res = power_iteration(tens, init=use, tol=cfg.tol, max_sweeps=cfg.max_sweeps)
            try:
                bhat = estimate_snr_from_lambda(res.value, c, edge=edge)
                below = 0
            except BelowEdgeError:
                bhat = float("nan")
                below = 1
            rows.append({"trial": t, "seed": seed, "beta": beta,
                         "lambda_hat": res.value, "beta_hat": bhat,
                         "below_edge": below, "converged": int(res.converged)})
        return rows

    nested = _run_trials(one_trial, cfg.trials, cfg.threads)
    records = sorted((r for rows in nested for r in rows), key=lambda r: (r["beta"], r["trial"]))
    result.records = records
    for beta in cfg.beta_grid:
        rows = [r for r in records if r["beta"] == beta]
        est = [r["beta_hat"] for r in rows if not r["below_edge"]]
        result.summary.append({
            "beta": beta, "trials": len(rows),
            "below_edge_fraction": float(np.mean([r["below_edge"] for r in rows])),
            "mean_beta_hat": float(np.mean(est)) if est else float("nan"),
            "std_beta_hat": float(np.std(est)) if est else float("nan"),
            "bias": float(np.mean(est) - beta) if est else float("nan"),
        })
    result.failures = sum(1 for r in records if not r["converged"])
    result.wallclock = time.time() - t0
    return result


# -------------------------------------------------------------------- rank r

def _orthogonal_components(dims, rank: int, seed: int) -> list[np.ndarray]:
    """Per mode: `rank` orthonormal columns from a QR of a seeded Gaussian."""
    comps = []
    for i, n in enumerate(dims):
        raw = sample_gaussian_tensor((n, rank), seed + _QR_OFFSET * (i + 1))
        q, r = np.linalg.qr(raw)
        q = q * np.sign(np.diag(r))  # deterministic sign convention
        comps.append(q)
    return comps


def run_rank_r(cfg: ExperimentConfig) -> ExperimentResult:
    """Sequential deflation on an orthogonal multi-spike model; every
    recovered component is compared against its own rank-one limit."""
    t0 = time.time()
    dims = cfg.dims
    d = len(dims)
    snrs = tuple(sorted((float(b) for b in cfg.snrs), reverse=True))
    rank = len(snrs)
    c = _ratios(dims)
    edge = right_edge(c)
    beta_s = compute_beta_s(c, edge=edge)
    preds = [predict(b, c, edge=edge, beta_s=beta_s) for b in snrs]
    result = ExperimentResult(config=cfg)
    for ell, (b, p) in enumerate(zip(snrs, preds)):
        result.theory.append({
            "component": ell, "beta": b, "lambda": p.lambda_inf,
            **{f"alignment_{i+1}": p.alignments[i] for i in range(d)},
            "above_threshold": int(p.above_threshold)})

    def one_trial(t: int):
        seed = cfg.base_seed + t
        per_mode = _orthogonal_components(dims, rank, seed)
        noise = sample_gaussian_tensor(dims, seed)
        tens = noise / np.sqrt(sum(dims))
        for ell, b in enumerate(snrs):
            tens = tens + rank_one_tensor(b, [per_mode[i][:, ell] for i in range(d)])
        found = deflate_orthogonal(tens, rank, init=RandomInit(seed + _INIT_OFFSET),
                                   tol=cfg.tol, max_sweeps=cfg.max_sweeps)
        rows = []
        for ell, res in enumerate(found):
            own = [abs(float(res.vectors[i] @ per_mode[i][:, ell])) for i in range(d)]
            cross = 0.0
            for other in range(rank):
                if other == ell:
                    continue
                cross = max(cross, max(abs(float(res.vectors[i] @ per_mode[i][:, other]))
                                       for i in range(d)))
            rows.append({
                "trial": t, "seed": seed, "component": ell, "beta": snrs[ell],
                "lambda_hat": res.value,
                **{f"alignment_{i+1}": own[i] for i in range(d)},
                "max_cross_alignment": cross,
                "converged": int(res.converged)})
        return rows

    nested = _run_trials(one_trial, cfg.trials, cfg.threads)
    records = sorted((r for rows in nested for r in rows),
                     key=lambda r: (r["component"], r["trial"]))
    result.records = records
    for ell, (b, p) in enumerate(zip(snrs, preds)):
        rows = [r for r in records if r["component"] == ell and r["converged"]]
        row = {"component": ell, "beta": b, "trials": len(rows)}
        if rows:
            row["mean_lambda"] = float(np.mean([r["lambda_hat"] for r in rows]))
            for i in range(d):
                row[f"mean_alignment_{i+1}"] = float(np.mean([r[f"alignment_{i+1}"] for r in rows]))
            row["mean_cross_alignment"] = float(np.mean([r["max_cross_alignment"] for r in rows]))
        row["theory_lambda"] = p.lambda_inf
        for i in range(d):
            row[f"theory_alignment_{i+1}"] = p.alignments[i]
        result.summary.append(row)
    result.failures = sum(1 for r in records if not r["converged"])
    result.wallclock = time.time() - t0
    return result


# --------------------------------------------------------- unfolding compare

def run_unfolding_compare(cfg: ExperimentConfig) -> ExperimentResult:
    """Unfold + SVD recovery against the induced matrix-case limit.

    Mode-k unfolding of the order-d observation is a spiked matrix with rows
    n_k, columns prod of the rest; matching the matrix normalisation gives
    the effective SNR beta * sqrt(sum(dims) / (rows + cols)).
    """
    t0 = time.time()
    dims = cfg.dims
    if len(dims) < 3:
        raise ValueError("unfolding compare needs order >= 3")
    mode = cfg.mode
    rows_n = dims[mode]
    cols_n = int(np.prod([n for i, n in enumerate(dims) if i != mode]))
    c_mat = rows_n / (rows_n + cols_n)
    scale = np.sqrt(sum(dims) / (rows_n + cols_n))
    result = ExperimentResult(config=cfg)
    thr = unfolding_threshold(dims)
    for beta in cfg.beta_grid:
        lam, ax, ay, bs = predict_matrix(beta * scale, c_mat)
        result.theory.append({
            "beta": beta, "beta_effective": beta * scale,
            "theory_alignment_row": ax, "theory_alignment_col": ay,
            "matrix_beta_s": bs, "unfolding_threshold": thr})

    def one_trial(t: int):
        seed = cfg.base_seed + t
        comps = _planted_components(dims, seed)
        # column factor of the unfolded spike: flattened outer product of the
        # non-mode components in original order (unit norm by construction)
        others = [comps[i] for i in range(len(dims)) if i != mode]
        col_factor = others[0]
        for v in others[1:]:
            col_factor = np.multiply.outer(col_factor, v)
        col_factor = col_factor.ravel()
        noise = sample_gaussian_tensor(dims, seed)
        rows = []
        for beta in cfg.beta_grid:
            model = SpikeModel(snr=beta, components=tuple(comps))
            tens = build_spiked_tensor(model, seed, noise=noise)
            sigma, u, v = top_singular_triple(unfold(tens, mode))
            rows.append({"trial": t, "seed": seed, "beta": beta,
                         "sigma_hat": sigma,
                         "alignment_row": abs(float(u @ comps[mode])),
                         "alignment_col": abs(float(v @ col_factor))})
        return rows

    nested = _run_trials(one_trial, cfg.trials, cfg.threads)
    records = sorted((r for rows in nested for r in rows), key=lambda r: (r["beta"], r["trial"]))
    result.records = records
    theory_by_beta = {row["beta"]: row for row in result.theory}
    for beta in cfg.beta_grid:
        rows = [r for r in records if r["beta"] == beta]
        th = theory_by_beta[beta]
        result.summary.append({
            "beta": beta, "trials": len(rows),
            "mean_alignment_row": float(np.mean([r["alignment_row"] for r in rows])),
            "mean_alignment_col": float(np.mean([r["alignment_col"] for r in rows])),
            "theory_alignment_row": th["theory_alignment_row"],
            "theory_alignment_col": th["theory_alignment_col"],
            "unfolding_threshold": thr,
        })
    result.wallclock = time.time() - t0
    return result


_RUNNERS = {
    "spectrum_compare": run_spectrum_compare,
    "alignment_sweep": run_alignment_sweep,
    "phase_diagram": run_phase_diagram,
    "snr_roundtrip": run_snr_roundtrip,
    "rank_r": run_rank_r,
    "unfolding_compare": run_unfolding_compare,
}


def run_experiment(cfg: ExperimentConfig) -> ExperimentResult:
    try:
        runner = _RUNNERS[cfg.kind]
    except KeyError:
        raise ValueError(f"unknown experiment kind {cfg.kind!r}; "
                         f"expected one of {sorted(_RUNNERS)}") from None
    return runner(cfg)
