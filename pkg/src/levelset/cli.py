"""Command-line interface: one subcommand per pipeline, uniform flags.

Every subcommand accepts ``--seed``, ``--out`` and ``--config``; flags
override config-file values, which override defaults.  Results land in a
report bundle directory whose ``result.json`` is byte-reproducible for a
fixed config and seed (timestamps go to ``run_meta.json``).  Exit codes:
0 success, 1 input or validation error, 2 numerical failure.  Errors are
also printed to stderr as JSON lines.

The heavy imports happen inside the handlers so that ``LEVELSET_THREADS``
can cap the linear-algebra thread pools before numpy loads.
"""

from __future__ import annotations

import argparse
import json
import os
import sys


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _configure_threads() -> None:
    raw = os.environ.get("LEVELSET_THREADS", "").strip()
    if raw and raw != "0":
        for var in (
            "OMP_NUM_THREADS",
            "OPENBLAS_NUM_THREADS",
            "MKL_NUM_THREADS",
            "NUMEXPR_NUM_THREADS",
        ):
            os.environ.setdefault(var, raw)


def _common_flags(sp) -> None:
    sp.add_argument("--seed", type=int, default=None, help="master random seed (default 0)")
    sp.add_argument("--out", default=None, help="report bundle directory (default ./out)")
    sp.add_argument("--config", default=None, help="JSON config file; flags override it")


def build_parser() -> _Parser:
    p = _Parser(prog="levelset", description="bandlimited zero-set recovery toolkit")
    sub = p.add_subparsers(dest="task", metavar="task")

    sp = sub.add_parser("bounds", help="sample-count bounds for given bandwidths")
    sp.add_argument("--k1", type=int, default=None)
    sp.add_argument("--k2", type=int, default=None)
    sp.add_argument("--factors", type=int, default=None, help="number of irreducible factors")
    sp.add_argument(
        "--factor",
        action="append",
        default=None,
        metavar="K1,K2",
        help="per-factor bandwidth, repeatable",
    )
    sp.add_argument("--l1", type=int, default=None, help="oversized support, axis 1")
    sp.add_argument("--l2", type=int, default=None, help="oversized support, axis 2")
    _common_flags(sp)

    sp = sub.add_parser("sample-curve", help="sample points on a curve's zero set")
    sp.add_argument("--count", type=int, default=None, required=False)
    sp.add_argument("--k1", type=int, default=None)
    sp.add_argument("--k2", type=int, default=None)
    sp.add_argument("--coeffs", default=None, help="coefficient JSON instead of a random curve")
    sp.add_argument("--grid-res", dest="grid_resolution", type=int, default=None)
    _common_flags(sp)

    sp = sub.add_parser("recover", help="recover curve coefficients from points")
    sp.add_argument("--points", default=None)
    sp.add_argument("--k1", type=int, default=None)
    sp.add_argument("--k2", type=int, default=None)
    sp.add_argument("--rank-tol", dest="rank_tol", type=float, default=None)
    sp.add_argument("--sos-res", dest="sos_resolution", type=int, default=None)
    _common_flags(sp)

    sp = sub.add_parser("nullspace", help="nullspace basis and sum-of-squares field")
    sp.add_argument("--points", default=None)
    sp.add_argument("--l1", type=int, default=None)
    sp.add_argument("--l2", type=int, default=None)
    sp.add_argument("--rank-tol", dest="rank_tol", type=float, default=None)
    sp.add_argument("--sos-res", dest="sos_resolution", type=int, default=None)
    _common_flags(sp)

    sp = sub.add_parser("rank", help="numerical rank of a kernel matrix vs the bound")
    sp.add_argument("--points", default=None)
    sp.add_argument("--kernel", choices=["dirichlet", "gaussian"], default=None)
    sp.add_argument("--l1", type=int, default=None)
    sp.add_argument("--l2", type=int, default=None)
    sp.add_argument("--sigma", type=float, default=None)
    sp.add_argument("--k1", type=int, default=None, help="true bandwidth for the rank bound")
    sp.add_argument("--k2", type=int, default=None)
    sp.add_argument("--rank-tol", dest="rank_tol", type=float, default=None)
    _common_flags(sp)

    sp = sub.add_parser("denoise", help="kernel low-rank point-cloud denoising")
    sp.add_argument("--points", default=None)
    sp.add_argument("--lam", type=float, default=None)
    sp.add_argument("--sigma", type=float, default=None)
    sp.add_argument("--gamma0", type=float, default=None)
    sp.add_argument("--gamma-decay", dest="gamma_decay", type=float, default=None)
    sp.add_argument("--gamma-min", dest="gamma_min", type=float, default=None)
    sp.add_argument("--max-iters", dest="max_iters", type=int, default=None)
    sp.add_argument("--conv-tol", dest="conv_tol", type=float, default=None)
    sp.add_argument(
        "--clamp-weights",
        dest="clamp_weights",
        action="store_const",
        const=True,
        default=None,
        help="floor graph weights at zero (off by default)",
    )
    _common_flags(sp)

    sp = sub.add_parser("phase-transition", help="recovery success-rate sweep")
    sp.add_argument("--k-min", dest="k_min", type=int, default=None)
    sp.add_argument("--k-max", dest="k_max", type=int, default=None)
    sp.add_argument("--n-min", dest="n_min", type=int, default=None)
    sp.add_argument("--n-max", dest="n_max", type=int, default=None)
    sp.add_argument("--trials", type=int, default=None)
    sp.add_argument("--grid-res", dest="grid_resolution", type=int, default=None)
    sp.add_argument("--threshold", dest="success_threshold", type=float, default=None)
    _common_flags(sp)

    return p


_TASK_KEYS = {
    "bounds": ("k1", "k2", "factors", "factor_bandwidths", "l1", "l2"),
    "sample-curve": ("count", "k1", "k2", "coeffs", "grid_resolution"),
    "recover": ("points", "k1", "k2", "rank_tol", "sos_resolution"),
    "nullspace": ("points", "l1", "l2", "rank_tol", "sos_resolution"),
    "rank": ("points", "kernel", "l1", "l2", "sigma", "k1", "k2", "rank_tol"),
    "denoise": (
        "points",
        "lam",
        "sigma",
        "gamma0",
        "gamma_decay",
        "gamma_min",
        "max_iters",
        "conv_tol",
        "clamp_weights",
    ),
    "phase-transition": (
        "k_min",
        "k_max",
        "n_min",
        "n_max",
        "trials",
        "grid_resolution",
        "success_threshold",
    ),
}


def _resolve_config(task: str, args) -> tuple[dict, int, str]:
    """Merge config file and CLI flags; returns (task config, seed, out dir)."""
    from .config import load_config_file, validate_config
    from .errors import ConfigError

    file_cfg = load_config_file(args.config) if args.config else {}
    seed = file_cfg.pop("seed", 0)
    out = file_cfg.pop("out", "out")
    if args.seed is not None:
        seed = args.seed
    if args.out is not None:
        out = args.out

    cfg = dict(file_cfg)
    for key in _TASK_KEYS[task]:
        value = getattr(args, key, None)
        if value is not None:
            cfg[key] = value
    if task == "bounds" and getattr(args, "factor", None):
        try:
            cfg["factor_bandwidths"] = [
                [int(v) for v in item.split(",")] for item in args.factor
            ]
        except ValueError:
            raise ConfigError("--factor expects K1,K2 integer pairs") from None
    validate_config(task, cfg)
    return cfg, int(seed), str(out)


# ---------------------------------------------------------------------------
# task handlers


def _run_bounds(cfg: dict, seed: int, bundle) -> dict:
    from .errors import ConfigError
    from .supports import min_samples

    k1, k2 = cfg["k1"], cfg["k2"]
    factors = cfg.get("factor_bandwidths")
    n_factors = cfg.get("factors", 1 if not factors else len(factors))
    if factors and len(factors) != n_factors:
        raise ConfigError("--factors disagrees with the number of --factor entries")
    if not factors and n_factors > 1:
        raise ConfigError("per-factor bandwidths are required when factors > 1")
    gamma = None
    if ("l1" in cfg) != ("l2" in cfg):
        raise ConfigError("--l1 and --l2 must be given together")
    if "l1" in cfg:
        gamma = (cfg["l1"], cfg["l2"])
    bounds = min_samples(factors, (k1, k2), gamma)
    return {
        "per_factor_bound": list(bounds.per_factor_bound),
        "per_factor_min": list(bounds.per_factor_min),
        "total_bound": bounds.total_bound,
        "total_min_N": bounds.total_min,
    }


def _load_cloud(path):
    from .cloud import load_csv

    return load_csv(path)


def _run_sample_curve(cfg: dict, seed: int, bundle) -> dict:
    import numpy as np

    from .cloud import save_csv
    from .errors import ConfigError, InputError
    from .harness import CurveInstance, random_curve, sample_curve
    from .report import load_coefficients, save_coefficients
    from .supports import FourierSupport

    res = cfg.get("grid_resolution", 256)
    if "coeffs" in cfg:
        coeffs = load_coefficients(cfg["coeffs"])
        if not coeffs.conj_symmetric:
            raise InputError("zero-set sampling needs conjugate-symmetric coefficients")
        inst = CurveInstance(coeffs, seed=None, grid_resolution=res)
    elif "k1" in cfg and "k2" in cfg:
        inst = random_curve(FourierSupport.rect(cfg["k1"], cfg["k2"]), seed, res)
        save_coefficients(inst.coefficients, bundle.file("coefficients.json"))
    else:
        raise ConfigError("either --coeffs or --k1/--k2 is required")
    cloud = sample_curve(inst, cfg["count"])
    save_csv(cloud, bundle.file("points.csv"))
    residual = float(np.max(np.abs(inst.field_at(cloud.coordinates))))
    return {
        "count": cloud.count,
        "dims": cloud.dims,
        "grid_resolution": res,
        "max_abs_field": residual,
    }


def _run_recover(cfg: dict, seed: int, bundle) -> dict:
    import warnings

    import numpy as np

    from .errors import AmbiguityWarning
    from .features import build_gram_q, evaluate_psi, psi_grid, recover_coefficients
    from .contours import lattice_axis
    from .report import coefficients_to_payload, save_coefficients
    from .supports import FourierSupport

    cloud = _load_cloud(cfg["points"])
    support = FourierSupport.rect(cfg["k1"], cfg["k2"])
    rank_tol = cfg.get("rank_tol", 1e-8)
    q = build_gram_q(cloud, support)
    nullity = 1
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", AmbiguityWarning)
        coeffs = recover_coefficients(q, rank_tol)
    for w in caught:
        if isinstance(w.message, AmbiguityWarning):
            nullity = w.message.nullity
    eigs = np.linalg.eigvalsh(q.matrix)
    residuals = np.abs(evaluate_psi(coeffs, cloud.coordinates))
    save_coefficients(coeffs, bundle.file("coefficients.json"))
    results = {
        "coefficients": coefficients_to_payload(coeffs),
        "ambiguous": nullity > 1,
        "bottom_multiplicity": nullity,
        "smallest_eigenvalue": float(eigs[0]),
        "largest_eigenvalue": float(eigs[-1]),
        "residual_max": float(residuals.max()),
        "residual_mean": float(residuals.mean()),
    }
    sos_res = cfg.get("sos_resolution", 256)
    if sos_res:
        axes = (lattice_axis(sos_res), lattice_axis(sos_res))
        vals = psi_grid(coeffs, axes)
        field = vals.real**2 + vals.imag**2
        bundle.write_csv("sos_field.csv", field)
        results["sos_field"] = {
            "resolution": sos_res,
            "min": float(field.min()),
            "max": float(field.max()),
        }
    return results


def _run_nullspace(cfg: dict, seed: int, bundle) -> dict:
    import numpy as np

    from .contours import lattice_axis
    from .features import (
        build_gram_q,
        nullspace_basis,
        sum_of_squares_at,
        sum_of_squares_field,
    )
    from .supports import FourierSupport

    cloud = _load_cloud(cfg["points"])
    support = FourierSupport.rect(cfg["l1"], cfg["l2"])
    rank_tol = cfg.get("rank_tol", 1e-8)
    q = build_gram_q(cloud, support)
    basis = nullspace_basis(q, rank_tol)
    eigs = np.linalg.eigvalsh(q.matrix)
    results = {
        "nullity": len(basis),
        "rank_tol": rank_tol,
        "eigenvalues_smallest": [float(v) for v in eigs[: min(8, eigs.size)]],
        "largest_eigenvalue": float(eigs[-1]),
    }
    if basis:
        sos_samples = sum_of_squares_at(basis, cloud.coordinates)
        results["annihilation_max"] = float(np.sqrt(np.max(sos_samples)))
        stacked = np.stack([c.values for c in basis])
        bundle.write_csv("basis_real.csv", stacked.real)
        bundle.write_csv("basis_imag.csv", stacked.imag)
        sos_res = cfg.get("sos_resolution", 256)
        if sos_res:
            axes = (lattice_axis(sos_res), lattice_axis(sos_res))
            field = sum_of_squares_field(basis, axes)
            bundle.write_csv("sos_field.csv", field)
            results["sos_field"] = {
                "resolution": sos_res,
                "min": float(field.min()),
                "max": float(field.max()),
            }
    return results


def _run_rank(cfg: dict, seed: int, bundle) -> dict:
    import numpy as np

    from .errors import ConfigError
    from .kernels import (
        DirichletKernel,
        GaussianKernel,
        effective_bandwidth,
        gram_matrix,
        numerical_rank,
    )
    from .supports import FourierSupport, rank_bound

    cloud = _load_cloud(cfg["points"])
    rank_tol = cfg.get("rank_tol", 1e-8)
    results: dict = {"kernel": cfg["kernel"], "rank_tol": rank_tol}
    if cfg["kernel"] == "dirichlet":
        if "l1" not in cfg or "l2" not in cfg:
            raise ConfigError("dirichlet kernel needs --l1 and --l2")
        outer = FourierSupport.rect(cfg["l1"], cfg["l2"])
        kernel = DirichletKernel(outer)
        results["support_sizes"] = [cfg["l1"], cfg["l2"]]
    else:
        if "sigma" not in cfg:
            raise ConfigError("gaussian kernel needs --sigma")
        kernel = GaussianKernel(cfg["sigma"], cloud.dims)
        cutoff, size_estimate = effective_bandwidth(cfg["sigma"], cloud.dims)
        results["sigma"] = cfg["sigma"]
        results["effective_cutoff"] = cutoff
        results["effective_support_size"] = size_estimate
    gram = gram_matrix(cloud, kernel)
    rank = numerical_rank(gram, rank_tol)
    results["numerical_rank"] = rank
    results["points"] = cloud.count
    eigs = np.linalg.eigvalsh(gram.matrix)
    results["largest_eigenvalue"] = float(eigs[-1])
    if cfg["kernel"] == "dirichlet" and "k1" in cfg and "k2" in cfg:
        inner = FourierSupport.rect(cfg["k1"], cfg["k2"])
        bound = rank_bound(inner, outer)
        results["rank_bound"] = bound
        results["tight"] = rank == bound
    return results


def _run_denoise(cfg: dict, seed: int, bundle) -> dict:
    from .cloud import save_csv
    from .denoise import IrlsConfig, irls_denoise

    cloud = _load_cloud(cfg["points"])
    irls_cfg = IrlsConfig(
        lam=cfg["lam"],
        sigma=cfg["sigma"],
        gamma0=cfg.get("gamma0"),
        gamma_decay=cfg.get("gamma_decay", 0.8),
        gamma_min=cfg.get("gamma_min"),
        max_iters=cfg.get("max_iters", 50),
        conv_tol=cfg.get("conv_tol", 1e-6),
        clamp_nonnegative=cfg.get("clamp_weights", False),
    )
    denoised, trace = irls_denoise(cloud, irls_cfg)
    save_csv(denoised, bundle.file("denoised.csv"))
    last_change = trace.rel_change[-1] if trace.rel_change else 0.0
    return {
        "points": cloud.count,
        "iterations": trace.iterations,
        "converged": bool(last_change < irls_cfg.conv_tol),
        "trace": {
            "surrogate": trace.surrogate,
            "data_term": trace.data_term,
            "trace_term": trace.trace_term,
            "nuclear_estimate": trace.nuclear_estimate,
            "gamma": trace.gamma,
            "step_fraction": trace.step_fraction,
            "rel_change": trace.rel_change,
        },
    }


def _run_phase_transition(cfg: dict, seed: int, bundle) -> dict:
    from .errors import ConfigError
    from .harness import PhaseTransitionConfig, run_phase_transition
    from .svg import emit_heatmap

    k_min = cfg.get("k_min", 2)
    k_max = cfg.get("k_max", 4)
    n_min = cfg.get("n_min", 4)
    n_max = cfg.get("n_max", 80)
    if k_max < k_min or n_max < n_min:
        raise ConfigError("sweep ranges must be non-empty")
    pt_cfg = PhaseTransitionConfig(
        k_values=tuple(range(k_min, k_max + 1)),
        n_values=tuple(range(n_min, n_max + 1)),
        trials=cfg.get("trials", 10),
        master_seed=seed,
        grid_resolution=cfg.get("grid_resolution", 256),
        success_threshold=cfg.get("success_threshold", 0.99),
    )
    result = run_phase_transition(pt_cfg)
    bundle.write_csv("rates.csv", result.rates)
    overlays = [
        {
            "x": list(result.theory_min_n),
            "y": list(pt_cfg.k_values),
            "color": "#cc0000",
            "label": "sufficient N",
        },
        {
            "x": list(result.lambda_sizes),
            "y": list(pt_cfg.k_values),
            "color": "#0033cc",
            "label": "N = support size",
        },
    ]
    emit_heatmap(
        result.rates,
        pt_cfg.n_values,
        pt_cfg.k_values,
        bundle.file("heatmap.svg"),
        overlays=overlays,
        title="recovery success rate",
        x_label="sample count N",
        y_label="bandwidth K",
    )
    return {
        "k_values": list(pt_cfg.k_values),
        "n_values": list(pt_cfg.n_values),
        "trials": pt_cfg.trials,
        "grid_resolution": pt_cfg.grid_resolution,
        "success_threshold": pt_cfg.success_threshold,
        "rates": [[float(v) for v in row] for row in result.rates],
        "theory_min_n": list(result.theory_min_n),
        "support_sizes": list(result.lambda_sizes),
    }


_HANDLERS = {
    "bounds": _run_bounds,
    "sample-curve": _run_sample_curve,
    "recover": _run_recover,
    "nullspace": _run_nullspace,
    "rank": _run_rank,
    "denoise": _run_denoise,
    "phase-transition": _run_phase_transition,
}


def _emit_error(kind: str, message: str, **extra) -> None:
    payload = {"error": kind, "message": message}
    payload.update(extra)
    print(json.dumps(payload, sort_keys=True), file=sys.stderr)


def main(argv=None) -> int:
    _configure_threads()
    if argv is None:
        argv = sys.argv[1:]
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        _emit_error("usage", str(exc))
        parser.print_usage(sys.stderr)
        return 1
    if args.task is None:
        parser.print_help()
        return 1

    from .errors import InputError, NumericalError
    from .report import ReportBundle

    task = args.task
    try:
        cfg, seed, out = _resolve_config(task, args)
    except InputError as exc:
        _emit_error(type(exc).__name__, str(exc), task=task)
        return 1

    try:
        bundle = ReportBundle(out)
    except OSError as exc:
        _emit_error("OutputError", str(exc), task=task)
        return 1

    echo = dict(cfg)
    echo["seed"] = seed
    try:
        results = _HANDLERS[task](cfg, seed, bundle)
    except InputError as exc:
        bundle.write_error(task, echo, exc)
        bundle.write_meta(argv)
        _emit_error(type(exc).__name__, str(exc), task=task)
        return 1
    except NumericalError as exc:
        bundle.write_error(task, echo, exc)
        bundle.write_meta(argv)
        _emit_error(type(exc).__name__, str(exc), task=task)
        return 2
    bundle.write_result(task, echo, results)
    bundle.write_meta(argv)
    print(f"{task}: report bundle written to {bundle.path}")
    return 0


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
