"""Session fixtures: the two shipped example problems solved end to end.

The full pipelines (background, subsolution, constrained minimum,
mountain pass) are expensive, so they run once per session and are shared
by the solver, system and acceptance tests.  Each case is built from its
shipped config file so the tests certify exactly what ``mcsvortex solve``
would run.
"""

from __future__ import annotations

import pathlib
import sys
import time
from types import SimpleNamespace

import pytest

sys.path.insert(0, str(pathlib.Path(__file__).parent))

from mcsvortex import build_subsolution, minimize_constrained, mountain_pass, verify_subsolution
from mcsvortex.cli import _build_problem, parse_config

REPO = pathlib.Path(__file__).resolve().parents[1]
CONFIGS = REPO / "configs"


def run_pipeline(config_path: pathlib.Path) -> SimpleNamespace:
    cfg = parse_config(config_path.read_text())
    problem = _build_problem(cfg, dealias_flag=False)
    opts = cfg.solver

    sub = verify_subsolution(problem, build_subsolution(problem, cfg.delta), cfg.delta)
    t0 = time.perf_counter()
    minimum = minimize_constrained(problem, sub.u_lower, opts)
    t_min = time.perf_counter() - t0
    t0 = time.perf_counter()
    saddle = mountain_pass(problem, minimum.u, opts)
    t_mp = time.perf_counter() - t0
    return SimpleNamespace(
        cfg=cfg,
        problem=problem,
        sub=sub,
        minimum=minimum,
        saddle=saddle,
        seconds_min=t_min,
        seconds_mp=t_mp,
    )


@pytest.fixture(scope="session")
def u1_case() -> SimpleNamespace:
    return run_pipeline(CONFIGS / "u1_single.cfg")


@pytest.fixture(scope="session")
def cp1_case() -> SimpleNamespace:
    return run_pipeline(CONFIGS / "cp1_single.cfg")


@pytest.fixture(scope="session", params=["u1", "cp1"])
def solved_case(request, u1_case, cp1_case) -> SimpleNamespace:
    return u1_case if request.param == "u1" else cp1_case
