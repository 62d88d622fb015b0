"""Batch driver: config parsing, the full two-solution pipeline, reports.

Subcommands
-----------
check-model    validate a built-in nonlinearity against the assumption set
sigma          build the singular vortex background and verify its identities
subsolution    construct and verify the obstacle field for (lambda, eps)
probe          sweep a (lambda, eps) grid for verified subsolutions
solve          full pipeline: background, subsolution, local min, mountain
               pass, system certification; writes fields, traces, report.json
continuation   local-min family along eps_schedule down to eps = 0
verify         recompute all reported metrics from a dumped field file

Configs are TOML; reports are JSON split into "metrics" (deterministic
numbers), "flags" (booleans that gate the exit code) and "meta" (timings,
versions — excluded from determinism comparisons).  All outputs are written
atomically under the output directory.  Exit code 0 iff every flag is true.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import time
from dataclasses import dataclass, field as dc_field, replace

import numpy as np
import scipy
import tomli

from . import __version__
from .grid import Field, Grid, make_grid, norms, read_field, write_field
from .model import VortexModel, builtin, check_assumptions
from .singular import SingularBackground, VortexSet, build_sigma, verify_singular_identities
from .functional import Problem, energy, gradient, residual_fourth
from .subsolution import build_subsolution, default_delta, probe_parameters, verify_subsolution
from .solvers import (
    SolveOptions,
    comparison_diagnostic,
    continuation,
    minimize_constrained,
    mountain_pass,
)
from .system import certify

__all__ = ["RunConfig", "parse_config", "serialize_config", "main"]

DISTINCT_TOL = 1e-3
RESIDUAL_SCALE_TOL = 1e-6
FLUX_REL_TOL = 1e-6


@dataclass(frozen=True)
class RunConfig:
    """Fully-resolved run description; round-trips through TOML."""

    n: int
    length: float
    model_name: str
    s: float | None = None
    alpha: float | None = None
    points: tuple = ()
    core_scale: float | None = None
    lam: float = 1.0
    eps: float = 1e-3
    delta: float | None = None
    eps_schedule: tuple | None = None
    dealias: bool = False
    probe_lambdas: tuple | None = None
    probe_epsilons: tuple | None = None
    solver: SolveOptions = dc_field(default_factory=SolveOptions)
    outdir: str = "out"


def _get(section: dict, key: str, kind, where: str, default=None, required=False):
    if key not in section:
        if required:
            raise ValueError(f"config error: missing key '{key}' in [{where}]")
        return default
    val = section[key]
    try:
        if kind is float and isinstance(val, (int, float)) and not isinstance(val, bool):
            return float(val)
        if kind is int and isinstance(val, int) and not isinstance(val, bool):
            return int(val)
        if kind is bool and isinstance(val, bool):
            return val
        if kind is str and isinstance(val, str):
            return val
        if kind is list and isinstance(val, list):
            return val
    except (TypeError, ValueError):
        pass
    raise ValueError(f"config error: key '{key}' in [{where}] must be {kind.__name__}, got {val!r}")


def parse_config(text: str) -> RunConfig:
    """Parse a TOML config document into a RunConfig."""
    try:
        doc = tomli.loads(text)
    except tomli.TOMLDecodeError as exc:
        raise ValueError(f"config parse error: {exc}") from exc

    grid_sec = doc.get("grid")
    if grid_sec is None:
        raise ValueError("config error: missing [grid] section")
    model_sec = doc.get("model")
    if model_sec is None:
        raise ValueError("config error: missing [model] section")

    n = _get(grid_sec, "n", int, "grid", required=True)
    length = _get(grid_sec, "length", float, "grid", required=True)

    name = _get(model_sec, "name", str, "model", required=True)
    s = _get(model_sec, "s", float, "model")
    alpha = _get(model_sec, "alpha", float, "model")

    vort_sec = doc.get("vortices", {})
    raw_pts = _get(vort_sec, "points", list, "vortices", default=[])
    points = []
    for i, item in enumerate(raw_pts):
        if not (isinstance(item, list) and len(item) == 3):
            raise ValueError(
                f"config error: vortices.points[{i}] must be [x, y, multiplicity], got {item!r}"
            )
        points.append((float(item[0]), float(item[1]), int(item[2])))
    core_scale = _get(vort_sec, "core_scale", float, "vortices")

    prob_sec = doc.get("problem", {})
    lam = _get(prob_sec, "lambda", float, "problem", default=1.0)
    eps = _get(prob_sec, "eps", float, "problem", default=1e-3)
    delta = _get(prob_sec, "delta", float, "problem")
    dealias = _get(prob_sec, "dealias", bool, "problem", default=False)
    schedule = _get(prob_sec, "eps_schedule", list, "problem")
    eps_schedule = tuple(float(e) for e in schedule) if schedule is not None else None

    solver_sec = doc.get("solver", {})
    solver_kwargs = {}
    for key, kind in (
        ("max_iters", int),
        ("grad_tol", float),
        ("path_nodes", int),
        ("deform_iters", int),
        ("deform_tol", float),
        ("polish_tol", float),
        ("newton_iters", int),
        ("far_offset", float),
        ("seed", int),
    ):
        val = _get(solver_sec, key, kind, "solver")
        if val is not None:
            solver_kwargs[key] = val
    unknown = set(solver_sec) - {k for k, _ in (
        ("max_iters", 0), ("grad_tol", 0), ("path_nodes", 0), ("deform_iters", 0),
        ("deform_tol", 0), ("polish_tol", 0), ("newton_iters", 0), ("far_offset", 0),
        ("seed", 0),
    )}
    if unknown:
        raise ValueError(f"config error: unknown keys in [solver]: {sorted(unknown)}")
    solver = SolveOptions(**solver_kwargs)

    probe_sec = doc.get("probe", {})
    lambdas = _get(probe_sec, "lambdas", list, "probe")
    epsilons = _get(probe_sec, "epsilons", list, "probe")

    out_sec = doc.get("output", {})
    outdir = _get(out_sec, "directory", str, "output", default="out")

    return RunConfig(
        n=n,
        length=length,
        model_name=name,
        s=s,
        alpha=alpha,
        points=tuple(points),
        core_scale=core_scale,
        lam=lam,
        eps=eps,
        delta=delta,
        eps_schedule=eps_schedule,
        dealias=dealias,
        probe_lambdas=tuple(float(x) for x in lambdas) if lambdas is not None else None,
        probe_epsilons=tuple(float(x) for x in epsilons) if epsilons is not None else None,
        solver=solver,
        outdir=outdir,
    )


def _toml_value(val) -> str:
    if isinstance(val, bool):
        return "true" if val else "false"
    if isinstance(val, int):
        return str(val)
    if isinstance(val, float):
        return repr(val)
    if isinstance(val, str):
        return json.dumps(val)
    if isinstance(val, (list, tuple)):
        return "[" + ", ".join(_toml_value(v) for v in val) + "]"
    raise TypeError(f"cannot serialize {val!r}")


def serialize_config(cfg: RunConfig) -> str:
    """Emit a TOML document that parses back to an equal RunConfig."""
    out = io.StringIO()

    def section(name: str, items: list[tuple[str, object]]) -> None:
        pairs = [(k, v) for k, v in items if v is not None]
        if not pairs:
            return
        out.write(f"[{name}]\n")
        for k, v in pairs:
            out.write(f"{k} = {_toml_value(v)}\n")
        out.write("\n")

    section("grid", [("n", cfg.n), ("length", cfg.length)])
    section("model", [("name", cfg.model_name), ("s", cfg.s), ("alpha", cfg.alpha)])
    section(
        "vortices",
        [
            ("points", [[x, y, m] for x, y, m in cfg.points] if cfg.points else None),
            ("core_scale", cfg.core_scale),
        ],
    )
    section(
        "problem",
        [
            ("lambda", cfg.lam),
            ("eps", cfg.eps),
            ("delta", cfg.delta),
            ("dealias", cfg.dealias),
            ("eps_schedule", list(cfg.eps_schedule) if cfg.eps_schedule else None),
        ],
    )
    defaults = SolveOptions()
    solver_items = [
        (k, getattr(cfg.solver, k))
        for k in ("max_iters", "grad_tol", "path_nodes", "deform_iters", "deform_tol",
                  "polish_tol", "newton_iters", "far_offset", "seed")
        if getattr(cfg.solver, k) != getattr(defaults, k)
    ]
    section("solver", solver_items)
    section("probe", [("lambdas", cfg.probe_lambdas), ("epsilons", cfg.probe_epsilons)])
    section("output", [("directory", cfg.outdir)])
    return out.getvalue()


# ---------------------------------------------------------------------------
# pipeline assembly


def _build_model(cfg: RunConfig) -> VortexModel:
    kwargs = {}
    if cfg.s is not None:
        kwargs["s"] = cfg.s
    if cfg.alpha is not None:
        kwargs["alpha"] = cfg.alpha
    return builtin(cfg.model_name, **kwargs)


def _build_background(cfg: RunConfig, grid: Grid) -> SingularBackground:
    if not cfg.points:
        raise ValueError("config error: [vortices] points must list at least one vortex")
    vortices = VortexSet.from_triples(cfg.points)
    return build_sigma(grid, vortices, core_scale=cfg.core_scale)


def _build_problem(cfg: RunConfig, dealias_flag: bool) -> Problem:
    grid = make_grid(cfg.n, cfg.length)
    model = _build_model(cfg)
    background = _build_background(cfg, grid)
    return Problem(
        grid=grid,
        model=model,
        background=background,
        lam=cfg.lam,
        eps=cfg.eps,
        dealias=cfg.dealias or dealias_flag,
    )


def _atomic_write_text(path: str, text: str) -> None:
    tmp = path + ".tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        fh.write(text)
    os.replace(tmp, path)


def _write_report(outdir: str, metrics: dict, flags: dict, meta: dict, name: str = "report.json") -> str:
    path = os.path.join(outdir, name)
    doc = {"metrics": metrics, "flags": flags, "meta": meta}
    _atomic_write_text(path, json.dumps(doc, indent=2, sort_keys=True) + "\n")
    return path


def _write_trace(outdir: str, name: str, rows) -> str:
    path = os.path.join(outdir, name)
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["iter", "energy", "grad_norm", "min_gap", "contact_fraction"])
    for row in rows:
        writer.writerow([row.iter] + [f"{x:.17g}" for x in row[1:]])
    _atomic_write_text(path, buf.getvalue())
    return path


def _meta(cfg_path: str, args) -> dict:
    return {
        "config": cfg_path,
        "package_version": __version__,
        "numpy_version": np.__version__,
        "scipy_version": scipy.__version__,
        "seed": args.seed,
        "dealias": bool(args.dealias),
    }


def _breakdown_metrics(prefix: str, bd) -> dict:
    return {
        f"{prefix}_energy_total": bd.total,
        f"{prefix}_energy_biharmonic": bd.biharmonic,
        f"{prefix}_energy_dirichlet": bd.dirichlet,
        f"{prefix}_energy_cross": bd.cross,
        f"{prefix}_energy_potential": bd.potential,
        f"{prefix}_energy_linear": bd.linear,
    }


def _load_config(args) -> tuple[RunConfig, str]:
    if not args.config:
        raise ValueError("config error: --config PATH is required")
    with open(args.config, "r", encoding="utf-8") as fh:
        text = fh.read()
    cfg = parse_config(text)
    if args.out:
        cfg = replace(cfg, outdir=args.out)
    if args.seed is not None:
        cfg = replace(cfg, solver=replace(cfg.solver, seed=args.seed))
    return cfg, args.config


# ---------------------------------------------------------------------------
# subcommands


def _cmd_check_model(args) -> int:
    cfg, _ = _load_config(args)
    try:
        model = _build_model(cfg)
    except ValueError as exc:
        print(str(exc))
        return 2
    report = check_assumptions(model)
    for line in report.summary_lines():
        print(line)
    return 0 if report.ok else 1


def _cmd_sigma(args) -> int:
    cfg, cfg_path = _load_config(args)
    t0 = time.perf_counter()
    grid = make_grid(cfg.n, cfg.length)
    background = _build_background(cfg, grid)
    report = verify_singular_identities(background)
    os.makedirs(cfg.outdir, exist_ok=True)
    write_field(os.path.join(cfg.outdir, "sigma.vfd"), background.sigma)
    write_field(os.path.join(cfg.outdir, "w.vfd"), background.w)
    write_field(os.path.join(cfg.outdir, "q.vfd"), background.q)
    metrics = {
        "residual_max": report.residual_max,
        "residual_rel": report.residual_rel,
        "sigma_integral": report.sigma_integral,
        "solvability_defect": report.solvability_defect,
        "source_flux_rel": report.source_flux_rel,
        "w_max": report.w_max,
        "w_min": report.w_min,
        "q_min": report.q_min,
        "coefficient_A": background.A,
        "core_scale": background.core_scale,
    }
    flags = {"identities_ok": bool(report.passed)}
    meta = _meta(cfg_path, args)
    meta["elapsed_s"] = time.perf_counter() - t0
    _write_report(cfg.outdir, metrics, flags, meta)
    for line in report.summary_lines():
        print(line)
    return 0 if report.passed else 1


def _cmd_subsolution(args) -> int:
    cfg, cfg_path = _load_config(args)
    t0 = time.perf_counter()
    p = _build_problem(cfg, args.dealias)
    res = verify_subsolution(p, build_subsolution(p, cfg.delta))
    os.makedirs(cfg.outdir, exist_ok=True)
    write_field(os.path.join(cfg.outdir, "phi.vfd"), res.phi)
    write_field(os.path.join(cfg.outdir, "u_tilde.vfd"), res.u_tilde)
    write_field(os.path.join(cfg.outdir, "u_lower.vfd"), res.u_lower)
    write_field(os.path.join(cfg.outdir, "margin.vfd"), res.margin)
    metrics = {
        "shift_k": res.k,
        "delta": res.delta,
        "sign_margin": res.sign_margin,
        "inner_margin_max": res.inner_max,
        "outer_margin_max": res.outer_max,
        "lambda": res.lam,
        "eps": res.eps,
    }
    flags = {"subsolution_verified": bool(res.verified), "sign_condition": res.sign_margin >= 0.0}
    meta = _meta(cfg_path, args)
    meta["elapsed_s"] = time.perf_counter() - t0
    _write_report(cfg.outdir, metrics, flags, meta)
    print(
        f"subsolution: verified={res.verified} inner_max={res.inner_max:.3e} "
        f"outer_max={res.outer_max:.3e} sign_margin={res.sign_margin:.3e} k={res.k:.6g}"
    )
    return 0 if res.verified else 1


def _cmd_probe(args) -> int:
    cfg, cfg_path = _load_config(args)
    if not cfg.probe_lambdas or not cfg.probe_epsilons:
        raise ValueError("config error: probe needs [probe] lambdas and epsilons")
    t0 = time.perf_counter()
    p0 = _build_problem(cfg, args.dealias)
    result = probe_parameters(p0, cfg.delta, cfg.probe_lambdas, cfg.probe_epsilons)
    os.makedirs(cfg.outdir, exist_ok=True)
    _atomic_write_text(os.path.join(cfg.outdir, "feasible.csv"), "\n".join(result.csv_lines()) + "\n")
    metrics = {
        "lambda0": result.lam0 if result.lam0 is not None else float("nan"),
        "eps_lambda": result.eps_lam if result.eps_lam is not None else float("nan"),
        "feasible_cells": int(sum(sum(row) for row in result.table)),
    }
    flags = {"feasible_nonempty": result.lam0 is not None}
    meta = _meta(cfg_path, args)
    meta["elapsed_s"] = time.perf_counter() - t0
    _write_report(cfg.outdir, metrics, flags, meta)
    for line in result.csv_lines():
        print(line)
    if result.lam0 is not None:
        print(f"lambda0={result.lam0:g} eps_lambda={result.eps_lam:g}")
    else:
        print("no feasible (lambda, eps) cell")
    return 0 if result.lam0 is not None else 1


def _cmd_solve(args) -> int:
    cfg, cfg_path = _load_config(args)
    t0 = time.perf_counter()
    os.makedirs(cfg.outdir, exist_ok=True)
    meta = _meta(cfg_path, args)
    metrics: dict = {}
    flags: dict = {}
    manifest: list[str] = []

    model = _build_model(cfg)
    assumption = check_assumptions(model)
    flags["assumptions_ok"] = bool(assumption.ok)
    if not assumption.ok:
        meta["elapsed_s"] = time.perf_counter() - t0
        _write_report(cfg.outdir, metrics, flags, meta)
        print("model assumptions failed:")
        for line in assumption.summary_lines():
            print("  " + line)
        return 1

    p = _build_problem(cfg, args.dealias)
    sigma_report = verify_singular_identities(p.background)
    flags["sigma_ok"] = bool(sigma_report.passed)
    metrics["sigma_residual_rel"] = sigma_report.residual_rel
    metrics["sigma_integral"] = sigma_report.sigma_integral

    sub = verify_subsolution(p, build_subsolution(p, cfg.delta))
    flags["subsolution_verified"] = bool(sub.verified)
    flags["sign_condition"] = sub.sign_margin >= 0.0
    metrics["subsolution_inner_max"] = sub.inner_max
    metrics["subsolution_outer_max"] = sub.outer_max
    metrics["subsolution_sign_margin"] = sub.sign_margin
    metrics["subsolution_shift_k"] = sub.k
    if not sub.verified and not args.force:
        meta["elapsed_s"] = time.perf_counter() - t0
        _write_report(cfg.outdir, metrics, flags, meta)
        print("subsolution not verified; rerun with --force to solve anyway")
        return 3

    grad_tol = cfg.solver.resolved_grad_tol(cfg.lam)
    metrics["grad_tol"] = grad_tol

    outcome_min = minimize_constrained(p, sub.u_lower, cfg.solver)
    flags["min_converged"] = bool(outcome_min.converged)
    flags["strict_comparison"] = bool(outcome_min.min_gap is not None and outcome_min.min_gap > 0.0)
    metrics.update(_breakdown_metrics("min", outcome_min.energy))
    metrics["min_grad_norm"] = outcome_min.grad_norm
    metrics["min_gap"] = outcome_min.min_gap
    metrics["min_contact_fraction"] = outcome_min.contact_fraction
    metrics["min_iterations"] = outcome_min.iterations
    manifest.append(_write_trace(cfg.outdir, "trace_min.csv", outcome_min.trace))
    write_field(os.path.join(cfg.outdir, "u_min.vfd"), outcome_min.u)
    manifest.append(os.path.join(cfg.outdir, "u_min.vfd"))

    comparison = comparison_diagnostic(p, outcome_min.u, sub.u_lower)
    flags["comparison_ok"] = bool(comparison.ok)
    metrics["comparison_defect"] = comparison.defect
    metrics["comparison_min_gap_w"] = comparison.min_gap_w

    try:
        outcome_mp = mountain_pass(p, outcome_min.u, cfg.solver)
    except RuntimeError as exc:
        meta["elapsed_s"] = time.perf_counter() - t0
        flags["mp_converged"] = False
        _write_report(cfg.outdir, metrics, flags, meta)
        print(f"mountain pass failed: {exc}")
        return 1
    flags["mp_converged"] = bool(outcome_mp.converged)
    metrics.update(_breakdown_metrics("mp", outcome_mp.energy))
    metrics["mp_grad_norm"] = outcome_mp.grad_norm
    metrics["mp_deformation_sweeps"] = outcome_mp.iterations
    metrics["mp_near_degenerate"] = int(outcome_mp.near_degenerate)
    write_field(os.path.join(cfg.outdir, "u_mp.vfd"), outcome_mp.u)
    manifest.append(os.path.join(cfg.outdir, "u_mp.vfd"))
    path_csv = os.path.join(cfg.outdir, "path_energies.csv")
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["node", "energy"])
    for i, val in enumerate(outcome_mp.path_energies or ()):
        writer.writerow([i, f"{val:.17g}"])
    _atomic_write_text(path_csv, buf.getvalue())
    manifest.append(path_csv)

    distinct = float(np.abs(outcome_mp.u.values - outcome_min.u.values).max())
    metrics["solution_distance_inf"] = distinct
    metrics["energy_ordering_gap"] = outcome_mp.energy.total - outcome_min.energy.total
    flags["two_solutions"] = bool(
        outcome_min.converged
        and outcome_mp.converged
        and distinct >= DISTINCT_TOL
        and outcome_mp.energy.total >= outcome_min.energy.total
    )

    scale = 1.0 + cfg.lam**2
    for label, outcome in (("min", outcome_min), ("mp", outcome_mp)):
        pair = certify(p, outcome.u)
        write_field(os.path.join(cfg.outdir, f"v_{label}.vfd"), pair.v)
        manifest.append(os.path.join(cfg.outdir, f"v_{label}.vfd"))
        metrics[f"{label}_flux"] = pair.flux
        metrics[f"{label}_flux_rel_err"] = pair.flux_rel_err
        metrics[f"{label}_ra_norm"] = pair.ra_norm
        metrics[f"{label}_rb_norm"] = pair.rb_norm
        metrics[f"{label}_rb_rescaled"] = pair.rb_rescaled_norm
        flags[f"{label}_equivalence"] = bool(pair.rb_rescaled_norm <= RESIDUAL_SCALE_TOL * scale)
        flags[f"{label}_quantization"] = bool(pair.flux_rel_err <= FLUX_REL_TOL)
    metrics["flux_target"] = 4.0 * np.pi * p.background.count

    meta["elapsed_s"] = time.perf_counter() - t0
    meta["files"] = sorted(os.path.basename(f) for f in manifest)
    _write_report(cfg.outdir, metrics, flags, meta)

    ok = all(flags.values())
    print(
        f"solve: min E={outcome_min.energy.total:.10g} |g|={outcome_min.grad_norm:.3e} "
        f"gap={outcome_min.min_gap:.3e}; mp E={outcome_mp.energy.total:.10g} "
        f"|g|={outcome_mp.grad_norm:.3e} dist={distinct:.3e}"
    )
    print(f"flags: {' '.join(k + '=' + str(v) for k, v in sorted(flags.items()))}")
    return 0 if ok else 1


def _cmd_continuation(args) -> int:
    cfg, cfg_path = _load_config(args)
    if not cfg.eps_schedule:
        raise ValueError("config error: continuation needs problem.eps_schedule")
    t0 = time.perf_counter()
    p0 = _build_problem(cfg, args.dealias)
    report = continuation(p0, cfg.eps_schedule, cfg.delta, cfg.solver)
    os.makedirs(cfg.outdir, exist_ok=True)

    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["eps", "eps_lap_norm", "cross_term", "h1_distance", "energy_gap", "tilde_h2"])
    for row in zip(report.eps, report.eps_lap_norm, report.cross_term,
                   report.h1_distance, report.energy_gap, report.tilde_h2):
        writer.writerow([f"{x:.17g}" for x in row])
    _atomic_write_text(os.path.join(cfg.outdir, "continuation.csv"), buf.getvalue())

    metrics = {
        "h2_slope": report.h2_slope,
        "energy_zero": report.energy_zero,
        "final_gap_rel": report.final_gap_rel,
    }
    for i, eps in enumerate(report.eps):
        metrics[f"eps_{i}"] = eps
        metrics[f"eps_lap_norm_{i}"] = report.eps_lap_norm[i]
        metrics[f"cross_term_{i}"] = report.cross_term[i]
        metrics[f"h1_distance_{i}"] = report.h1_distance[i]
        metrics[f"energy_gap_{i}"] = report.energy_gap[i]
    flags = {
        "all_converged": bool(all(report.converged) and report.outcome_zero.converged),
        "trend_eps_lap": report.trend_eps_lap,
        "trend_cross": report.trend_cross,
        "trend_h1": report.trend_h1,
        "trend_gap": report.trend_gap,
        "h2_slope_ok": bool(abs(report.h2_slope - 2.0) <= 0.1),
        "final_gap_ok": bool(report.final_gap_rel <= 1e-3),
    }
    meta = _meta(cfg_path, args)
    meta["elapsed_s"] = time.perf_counter() - t0
    if report.failure:
        meta["failure"] = report.failure
    _write_report(cfg.outdir, metrics, flags, meta)
    print(
        f"continuation: slope={report.h2_slope:.3f} final_gap_rel={report.final_gap_rel:.3e} "
        f"trends={'ok' if report.all_trends_ok else 'violated'}"
    )
    return 0 if all(flags.values()) else 1


def _cmd_verify(args) -> int:
    cfg, cfg_path = _load_config(args)
    p = _build_problem(cfg, args.dealias)
    u = read_field(args.field, grid=p.grid)
    bd = energy(p, u)
    g = gradient(p, u)
    r4 = residual_fourth(p, u)
    nm = norms(g)
    metrics = _breakdown_metrics("field", bd)
    metrics["field_grad_norm"] = nm.l2
    metrics["field_residual_norm"] = norms(r4).l2
    if p.eps > 0:
        pair = certify(p, u)
        metrics["field_flux"] = pair.flux
        metrics["field_flux_rel_err"] = pair.flux_rel_err
        metrics["field_ra_norm"] = pair.ra_norm
        metrics["field_rb_norm"] = pair.rb_norm
        metrics["field_rb_rescaled"] = pair.rb_rescaled_norm
    flags = {"loaded": True}
    meta = _meta(cfg_path, args)
    meta["field"] = args.field
    os.makedirs(cfg.outdir, exist_ok=True)
    _write_report(cfg.outdir, metrics, flags, meta, name="verify_report.json")
    for key in sorted(metrics):
        print(f"{key} = {metrics[key]:.17g}")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="mcsvortex",
        description="Two-solution solver for the generalized vortex equation on a flat torus",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn in (
        ("check-model", _cmd_check_model),
        ("sigma", _cmd_sigma),
        ("subsolution", _cmd_subsolution),
        ("probe", _cmd_probe),
        ("solve", _cmd_solve),
        ("continuation", _cmd_continuation),
        ("verify", _cmd_verify),
    ):
        cmd = sub.add_parser(name)
        cmd.add_argument("--config", required=True, help="TOML config path")
        cmd.add_argument("--out", default=None, help="output directory (overrides config)")
        cmd.add_argument("--seed", type=int, default=None, help="override solver seed")
        cmd.add_argument("--dealias", action="store_true", help="enable 3/2-rule dealiasing")
        if name == "solve":
            cmd.add_argument("--force", action="store_true", help="solve even if subsolution unverified")
        if name == "verify":
            cmd.add_argument("field", help="path to a .vfd field dump")
        cmd.set_defaults(fn=fn)

    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
