"""Shared test utilities: seeded band-limited random fields and tiny problems."""

from __future__ import annotations

import numpy as np

from mcsvortex import (
    Field,
    Grid,
    Problem,
    VortexSet,
    build_sigma,
    builtin,
    make_grid,
)


def smooth_field(
    grid: Grid,
    seed: int,
    amplitude: float = 1.0,
    kcut: int | None = None,
    offset: float = 0.0,
) -> Field:
    """Random smooth field: white noise low-passed to mode number <= kcut.

    Deterministic in ``seed``; normalized so max|f - offset| = amplitude.
    """
    rng = np.random.default_rng(seed)
    raw = rng.standard_normal(grid.shape)
    spec = np.fft.rfft2(raw)
    cut = grid.n // 6 if kcut is None else int(kcut)
    k_edge = cut * 2.0 * np.pi / grid.length
    spec[grid.k2 > k_edge**2] = 0.0
    vals = np.fft.irfft2(spec, s=grid.shape)
    peak = np.abs(vals).max()
    if peak > 0:
        vals *= amplitude / peak
    return Field(grid, vals + offset)


def single_vortex_problem(
    n: int = 64,
    length: float = 2.0 * np.pi,
    model_name: str = "u1",
    lam: float = 6.0,
    eps: float = 1e-2,
    **model_params,
) -> Problem:
    """One unit vortex at the center of a small torus; quick to evaluate."""
    grid = make_grid(n, length)
    vortices = VortexSet.from_triples([[length / 2.0, length / 2.0, 1]])
    background = build_sigma(grid, vortices)
    model = builtin(model_name, **model_params)
    return Problem(grid=grid, model=model, background=background, lam=lam, eps=eps)
