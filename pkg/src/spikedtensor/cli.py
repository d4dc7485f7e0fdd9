"""Command-line front end.

Subcommands: predict, spectrum, simulate, estimate-snr, unfold, phase,
reproduce-figure.  Exit codes: 0 success, 1 numeric failure, 2 usage error.
All numbers are printed with 15 significant digits; CSV output uses the dot
decimal separator regardless of locale.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np


def _default_outdir() -> str:
    return os.environ.get("SPIKEDTENSOR_OUTDIR", "spikedtensor-out")


def _fmt(v: float) -> str:
    return f"{float(v):.15g}"


def _parse_ratios(args) -> np.ndarray:
    if args.cubic is not None:
        d = int(args.cubic)
        if d < 2:
            raise ValueError("--cubic order must be >= 2")
        return np.full(d, 1.0 / d)
    if args.c is None:
        raise ValueError("one of --c or --cubic is required")
    c = np.array([float(x) for x in args.c.split(",")])
    if np.any(c < 0) or np.any(c > 1):
        raise ValueError("ratios must lie in [0, 1]")
    s = c.sum()
    if abs(s - 1.0) > 1e-9:
        print(f"warning: ratios sum to {s:.12g}; renormalising", file=sys.stderr)
    return c / s


def _parse_grid(spec: str) -> list[float]:
    """'a:b:step' inclusive grid, or a comma-separated list."""
    if ":" in spec:
        a, b, step = (float(x) for x in spec.split(":"))
        if step <= 0:
            raise ValueError("grid step must be positive")
        n = int(np.floor((b - a) / step + 1e-9)) + 1
        return [a + k * step for k in range(max(n, 1))]
    return [float(x) for x in spec.split(",")]


def _parse_dims(spec: str) -> tuple[int, ...]:
    return tuple(int(x) for x in spec.split(","))


# ------------------------------------------------------------------ predict

def _cmd_predict(args) -> int:
    from .asymptotics import compute_beta_s, predict, predict_matrix
    from .stieltjes import right_edge

    c = _parse_ratios(args)
    betas = _parse_grid(args.beta_grid) if args.beta_grid else [args.beta]
    if betas[0] is None:
        raise ValueError("one of --beta or --beta-grid is required")
    rows = []
    if c.size == 2:
        beta_s = None
        for beta in betas:
            lam, ax, ay, beta_s = predict_matrix(beta, float(c[0]))
            rows.append({"beta": beta, "lambda_inf": lam, "q_1": ax, "q_2": ay,
                         "above_threshold": int(beta > beta_s)})
        from .stieltjes import matrix_case_support
        edge = matrix_case_support(float(c[0]))[1]
    else:
        edge = right_edge(c)
        beta_s = compute_beta_s(c, edge=edge)
        for beta in betas:
            pred = predict(beta, c, edge=edge, beta_s=beta_s)
            row = {"beta": beta, "lambda_inf": pred.lambda_inf}
            row.update({f"q_{i+1}": pred.alignments[i] for i in range(c.size)})
            row["above_threshold"] = int(pred.above_threshold)
            rows.append(row)
    if args.out:
        cols = list(rows[0].keys())
        with open(args.out, "w") as fh:
            fh.write(",".join(cols) + "\n")
            for row in rows:
                fh.write(",".join(_fmt(row[k]) if k != "above_threshold" else str(row[k])
                                  for k in cols) + "\n")
    print(json.dumps({"beta_s": float(beta_s), "right_edge": float(edge),
                      "c": [float(x) for x in c]},
                     default=float))
    return 0


# ------------------------------------------------------------------ spectrum

def _cmd_spectrum(args) -> int:
    from .harness import ExperimentConfig, run_spectrum_compare

    dims = _parse_dims(args.dims)
    variant = "dependent" if args.dependent else "independent"
    cfg = ExperimentConfig(kind="spectrum_compare", dims=dims,
                           beta_grid=(args.beta,), trials=args.trials,
                           base_seed=args.seed, bins=args.bins, variant=variant,
                           threads=args.threads)
    res = run_spectrum_compare(cfg)
    out = res.write(args.out or _default_outdir(), svg=args.svg)
    print(json.dumps({"output_dir": str(out),
                      "summary": res.summary}, default=float))
    return 0


# ------------------------------------------------------------------ simulate

def _cmd_simulate(args) -> int:
    from .harness import ExperimentConfig, run_experiment

    overrides = {}
    if args.config:
        overrides.update(json.loads(Path(args.config).read_text()))
    if args.experiment:
        overrides["kind"] = args.experiment
    if "kind" not in overrides:
        raise ValueError("an experiment kind is required (--experiment or config file)")
    for key, attr in (("dims", "dims"), ("trials", "trials"), ("base_seed", "base_seed"),
                      ("strategy", "strategy"), ("bins", "bins"), ("threads", "threads")):
        v = getattr(args, attr, None)
        if v is not None:
            overrides[key] = v
    if args.beta_grid:
        overrides["beta_grid"] = tuple(_parse_grid(args.beta_grid))
    if args.dims:
        overrides["dims"] = _parse_dims(args.dims)
    outdir = overrides.pop("output_dir", None) or args.out or _default_outdir()
    cfg = ExperimentConfig(**overrides)
    res = run_experiment(cfg)
    out = res.write(outdir, svg=args.svg)
    print(json.dumps({"output_dir": str(out), "failures": res.failures,
                      "wallclock_seconds": round(res.wallclock, 3)}, default=float))
    return 0


# --------------------------------------------------------------- estimate-snr

def _cmd_estimate_snr(args) -> int:
    from .asymptotics import estimate_snr_from_lambda

    c = _parse_ratios(args)
    try:
        beta_hat = estimate_snr_from_lambda(args.lambda_obs, c)
    except ValueError as exc:
        print(json.dumps({"error": str(exc), "below_edge": True}))
        return 1
    print(json.dumps({"beta_hat": float(beta_hat), "lambda": args.lambda_obs}))
    return 0


# -------------------------------------------------------------------- unfold

def _cmd_unfold(args) -> int:
    from .harness import ExperimentConfig, run_unfolding_compare

    dims = _parse_dims(args.dims)
    cfg = ExperimentConfig(kind="unfolding_compare", dims=dims,
                           beta_grid=tuple(_parse_grid(args.beta_grid)) if args.beta_grid
                           else (args.beta,),
                           trials=args.trials, base_seed=args.seed, mode=args.mode,
                           threads=args.threads)
    res = run_unfolding_compare(cfg)
    out = res.write(args.out or _default_outdir(), svg=args.svg)
    print(json.dumps({"output_dir": str(out), "summary": res.summary}, default=float))
    return 0


# --------------------------------------------------------------------- phase

def _cmd_phase(args) -> int:
    from .harness import ExperimentConfig, run_phase_diagram

    orders = tuple(int(x) for x in args.orders.split(","))
    cfg = ExperimentConfig(kind="phase_diagram", orders=orders)
    res = run_phase_diagram(cfg)
    out = res.write(args.out or _default_outdir(), svg=args.svg)
    print(json.dumps({"output_dir": str(out), "rows": res.summary}, default=float))
    return 0


# ----------------------------------------------------------- reproduce-figure

def _figure_presets() -> dict[int, dict]:
    # canned desk-scale experiment presets, keyed by figure number (see README)
    return {
        2: dict(kind="spectrum_compare", dims=(300, 300, 300), beta_grid=(0.0,),
                trials=1, variant="independent", bins=60),
        3: dict(kind="spectrum_compare", dims=(100, 100, 100), beta_grid=(0.0,),
                trials=1, variant="dependent", bins=60),
        4: dict(kind="theory_sweep", c=(1 / 6, 1 / 3, 1 / 2)),
        5: dict(kind="theory_sweep", c=(1 / 3, 1 / 3, 1 / 3)),
        6: dict(kind="matrix_densities", ratios=(0.5, 0.25, 0.1)),
        7: dict(kind="matrix_theory_sweep", ratios=(0.5, 0.1, 0.02)),
        8: dict(kind="alignment_sweep", dims=(400, 400),
                beta_grid=tuple(np.round(np.arange(0.2, 2.61, 0.2), 10)), trials=8),
        9: dict(kind="phase_diagram", orders=tuple(range(3, 13))),
        10: dict(kind="spectrum_compare", dims=(80, 80, 80, 80), beta_grid=(0.0,),
                 trials=1, variant="independent", bins=60),
        11: dict(kind="spectrum_compare", dims=(50, 50, 50, 50), beta_grid=(0.0,),
                 trials=1, variant="dependent", bins=60),
    }


def _theory_sweep_rows(c, betas):
    from .asymptotics import compute_beta_s, predict
    from .stieltjes import right_edge

    c = np.asarray(c, float)
    edge = right_edge(c)
    beta_s = compute_beta_s(c, edge=edge)
    rows = []
    for beta in betas:
        pred = predict(float(beta), c, edge=edge, beta_s=beta_s)
        row = {"beta": float(beta), "lambda_inf": pred.lambda_inf}
        row.update({f"q_{i+1}": pred.alignments[i] for i in range(c.size)})
        rows.append(row)
    return rows


def _cmd_reproduce_figure(args) -> int:
    from .harness import ExperimentConfig, run_experiment

    presets = _figure_presets()
    if args.figure not in presets:
        raise ValueError(f"--figure must be one of {sorted(presets)}")
    preset = dict(presets[args.figure])
    outdir = Path(args.out or _default_outdir()) / f"figure{args.figure}"
    kind = preset.pop("kind")
    outdir.mkdir(parents=True, exist_ok=True)
    if kind == "theory_sweep":
        betas = np.arange(0.0, 4.0001, 0.02)
        rows = _theory_sweep_rows(preset["c"], betas)
        _write_rows(outdir / "theory.csv", rows)
    elif kind == "matrix_densities":
        from .stieltjes import matrix_case_measure
        for c in preset["ratios"]:
            meas = matrix_case_measure(c)
            xs = np.linspace(-1.8, 1.8, 600)
            rows = [{"x": float(x), "density": meas.density(float(x))} for x in xs]
            _write_rows(outdir / f"density_c{c:g}.csv", rows)
    elif kind == "matrix_theory_sweep":
        from .asymptotics import predict_matrix
        for c in preset["ratios"]:
            rows = []
            for beta in np.arange(0.0, 3.0001, 0.02):
                lam, ax, ay, _ = predict_matrix(float(beta), c)
                rows.append({"beta": float(beta), "lambda_inf": lam, "q_1": ax, "q_2": ay})
            _write_rows(outdir / f"theory_c{c:g}.csv", rows)
    else:
        cfg = ExperimentConfig(kind=kind, base_seed=args.seed,
                               threads=args.threads, **preset)
        res = run_experiment(cfg)
        res.write(outdir, svg=args.svg)
    print(json.dumps({"output_dir": str(outdir), "figure": args.figure}))
    return 0


def _write_rows(path, rows) -> None:
    cols = list(rows[0].keys())
    with open(path, "w") as fh:
        fh.write(",".join(cols) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(row[k]) for k in cols) + "\n")


# ---------------------------------------------------------------------- main

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="spikedtensor",
                                description="Spiked random tensor laboratory")
    sub = p.add_subparsers(dest="command", required=True)

    q = sub.add_parser("predict", help="limiting singular value and alignments")
    q.add_argument("--beta", type=float, default=None)
    q.add_argument("--beta-grid", type=str, default=None, metavar="A:B:STEP")
    q.add_argument("--c", type=str, default=None, help="comma-separated ratios")
    q.add_argument("--cubic", type=int, default=None, help="equal ratios of this order")
    q.add_argument("--out", type=str, default=None, help="prediction CSV path")
    q.set_defaults(func=_cmd_predict)

    q = sub.add_parser("spectrum", help="empirical spectrum vs limiting law")
    q.add_argument("--dims", type=str, required=True)
    q.add_argument("--beta", type=float, default=0.0)
    q.add_argument("--seed", type=int, default=1)
    grp = q.add_mutually_exclusive_group()
    grp.add_argument("--dependent", action="store_true")
    grp.add_argument("--independent", action="store_true")
    q.add_argument("--bins", type=int, default=100)
    q.add_argument("--trials", type=int, default=1)
    q.add_argument("--threads", type=int, default=1)
    q.add_argument("--out", type=str, default=None)
    q.add_argument("--svg", action="store_true")
    q.set_defaults(func=_cmd_spectrum)

    q = sub.add_parser("simulate", help="run a configured experiment")
    q.add_argument("--experiment", type=str, default=None,
                   choices=["spectrum_compare", "alignment_sweep", "phase_diagram",
                            "snr_roundtrip", "rank_r", "unfolding_compare"])
    q.add_argument("--config", type=str, default=None, help="JSON config file")
    q.add_argument("--dims", type=str, default=None)
    q.add_argument("--beta-grid", type=str, default=None)
    q.add_argument("--trials", type=int, default=None)
    q.add_argument("--base-seed", dest="base_seed", type=int, default=None)
    q.add_argument("--strategy", type=str, default=None,
                   choices=["planted", "random", "annealed"])
    q.add_argument("--bins", type=int, default=None)
    q.add_argument("--threads", type=int, default=None)
    q.add_argument("--out", type=str, default=None)
    q.add_argument("--svg", action="store_true")
    q.set_defaults(func=_cmd_simulate)

    q = sub.add_parser("estimate-snr", help="SNR from an observed singular value")
    q.add_argument("--lambda", dest="lambda_obs", type=float, required=True)
    q.add_argument("--c", type=str, default=None)
    q.add_argument("--cubic", type=int, default=None)
    q.set_defaults(func=_cmd_estimate_snr)

    q = sub.add_parser("unfold", help="unfolding + SVD recovery vs matrix limit")
    q.add_argument("--dims", type=str, required=True)
    q.add_argument("--beta", type=float, default=None)
    q.add_argument("--beta-grid", type=str, default=None)
    q.add_argument("--mode", type=int, default=0)
    q.add_argument("--seed", type=int, default=1)
    q.add_argument("--trials", type=int, default=5)
    q.add_argument("--threads", type=int, default=1)
    q.add_argument("--out", type=str, default=None)
    q.add_argument("--svg", action="store_true")
    q.set_defaults(func=_cmd_unfold)

    q = sub.add_parser("phase", help="thresholds and edges vs tensor order")
    q.add_argument("--orders", type=str, default="3,4,5,6,7,8,9,10,11,12")
    q.add_argument("--out", type=str, default=None)
    q.add_argument("--svg", action="store_true")
    q.set_defaults(func=_cmd_phase)

    q = sub.add_parser("reproduce-figure", help="canned desk-scale experiment presets")
    q.add_argument("--figure", type=int, required=True)
    q.add_argument("--seed", type=int, default=1)
    q.add_argument("--threads", type=int, default=1)
    q.add_argument("--out", type=str, default=None)
    q.add_argument("--svg", action="store_true")
    q.set_defaults(func=_cmd_reproduce_figure)

    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse exits 2 on usage errors already
        return int(exc.code) if exc.code is not None else 2
    try:
        return args.func(args)
    except (ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ArithmeticError, RuntimeError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
