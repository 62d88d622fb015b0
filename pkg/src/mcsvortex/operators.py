"""Spectral differential operators and inverses on the periodic grid.

Everything here is a Fourier multiplier: derivatives multiply the rfft2
spectrum by powers of (i kx, i ky), inverses divide by symbols that are
strictly positive away from the zero mode.  The smoother G_eps =
(-eps^2 lap + 1)^{-1} and the mean-zero inverse Laplacian factorize the
fourth-order operator eps^2 lap^2 - lap = (-eps^2 lap + 1)(-lap), which is
how the linear solve behind the subsolution is carried out.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import Field, Grid

#: Relative mean tolerance accepted by :func:`inv_neg_laplacian`.
MEAN_TOL = 1e-10


@dataclass(frozen=True)
class SpectralMultiplier:
    """A diagonal operator in Fourier space: (Mf)^ = symbol * f^.

    ``symbol`` is a real array laid out like the grid's rfft2 spectrum.
    """

    grid: Grid
    symbol: np.ndarray

    def __post_init__(self) -> None:
        sym = np.asarray(self.symbol, dtype=np.float64)
        if sym.shape != self.grid.k2.shape:
            raise ValueError("symbol shape does not match the grid's spectral layout")
        if not np.all(np.isfinite(sym)):
            raise ValueError("symbol contains non-finite entries")
        object.__setattr__(self, "symbol", sym)

    def apply(self, f: Field) -> Field:
        if f.grid != self.grid:
            raise ValueError("field lives on a different grid")
        return Field.from_spectrum(self.grid, self.symbol * f.spectrum)


def neg_lap_symbol(grid: Grid) -> np.ndarray:
    return grid.k2


def fourth_order_symbol(grid: Grid, eps: float) -> np.ndarray:
    """Symbol of eps^2 lap^2 - lap."""
    return eps * eps * grid.k4 + grid.k2


def laplacian(f: Field) -> Field:
    """Spectral Laplacian."""
    return Field.from_spectrum(f.grid, -f.grid.k2 * f.spectrum)


def bilaplacian(f: Field) -> Field:
    """Spectral biharmonic operator lap^2."""
    return Field.from_spectrum(f.grid, f.grid.k4 * f.spectrum)


def grad(f: Field) -> tuple[np.ndarray, np.ndarray]:
    """Spectral gradient, returned as a pair of plain arrays (gx, gy)."""
    grid = f.grid
    spec = f.spectrum
    gx = np.fft.irfft2(1j * grid.kx * spec, s=grid.shape)
    gy = np.fft.irfft2(1j * grid.ky * spec, s=grid.shape)
    return gx, gy


def div(grid: Grid, vx: np.ndarray, vy: np.ndarray) -> Field:
    """Spectral divergence of a vector field given by component arrays."""
    sx = np.fft.rfft2(np.asarray(vx, dtype=np.float64))
    sy = np.fft.rfft2(np.asarray(vy, dtype=np.float64))
    return Field.from_spectrum(grid, 1j * grid.kx * sx + 1j * grid.ky * sy)


def grad_squared(f: Field) -> np.ndarray:
    """|grad f|^2 as a plain array."""
    gx, gy = grad(f)
    return gx * gx + gy * gy


def green_eps(f: Field, eps: float) -> Field:
    """Apply the smoother G_eps = (-eps^2 lap + 1)^{-1}.

    The symbol 1/(1 + eps^2 k^2) lies in (0, 1], so the operator contracts
    in L2 mode-wise and preserves the mean exactly.  At eps = 0 it is the
    identity.
    """
    if eps < 0.0:
        raise ValueError(f"eps must be nonnegative, got {eps}")
    if eps == 0.0:
        return f
    grid = f.grid
    return Field.from_spectrum(grid, f.spectrum / (1.0 + eps * eps * grid.k2))


def inv_helmholtz(f: Field, alpha: float = 1.0) -> Field:
    """Apply (alpha id - lap)^{-1} for alpha > 0."""
    if alpha <= 0.0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    grid = f.grid
    return Field.from_spectrum(grid, f.spectrum / (grid.k2 + alpha))


def inv_neg_laplacian(f: Field) -> Field:
    """Solve -lap u = f with int u = 0, for zero-mean right-hand sides.

    Raises if |mean(f)| exceeds ``MEAN_TOL * ||f||_2``: the periodic problem
    is only solvable for zero-mean data, so a non-negligible mean signals an
    ill-posed right-hand side rather than round-off.
    """
    grid = f.grid
    mean_val = float(f.values.mean())
    l2 = float(np.sqrt((f.values**2).sum()) * grid.spacing)
    if abs(mean_val) > MEAN_TOL * max(l2, 1e-300):
        raise ValueError(
            f"right-hand side has mean {mean_val:.3e} (L2 norm {l2:.3e}); "
            "-lap is singular on constants"
        )
    spec = f.spectrum.copy()
    spec[0, 0] = 0.0
    k2 = grid.k2.copy()
    k2[0, 0] = 1.0  # avoid 0/0 on the (zeroed) mean mode
    return Field.from_spectrum(grid, spec / k2)


def solve_fourth_linear(phi: Field, eps: float) -> Field:
    """Solve eps^2 lap^2 u - lap u = phi with int u = 0 (mean-zero phi).

    Uses the factorization eps^2 lap^2 - lap = (-eps^2 lap + 1)(-lap):
    first smooth with G_eps, then invert -lap.  At eps = 0 this degenerates
    to the plain inverse Laplacian.
    """
    return inv_neg_laplacian(green_eps(phi, eps))


def _band_indices(n: int) -> np.ndarray:
    """FFT indices of the modes |k| < n/2 (Nyquist excluded) of an n-grid."""
    half = n // 2
    return np.r_[0:half, -(half - 1) : 0]


def spectral_upsample(values: np.ndarray, m: int) -> np.ndarray:
    """Resample an n x n periodic array onto an m x m grid (m > n) spectrally.

    The Nyquist row/column of the source is dropped (treated as zero), so the
    result is exactly the trigonometric interpolant of the sub-Nyquist modes.
    Together with :func:`spectral_downsample` this forms an (injection,
    adjoint) pair for the 3/2-rule dealiased evaluation of nonlinear terms.
    """
    n = values.shape[0]
    if values.shape != (n, n) or m <= n:
        raise ValueError("expected a square array and m > n")
    spec = np.fft.fft2(values)
    idx_n = _band_indices(n)
    big = np.zeros((m, m), dtype=complex)
    big[np.ix_(idx_n, idx_n)] = spec[np.ix_(idx_n, idx_n)]
    return np.fft.ifft2(big).real * (m / n) ** 2


def spectral_downsample(values: np.ndarray, n: int) -> np.ndarray:
    """Adjoint of :func:`spectral_upsample`: restrict to the n-grid's sub-Nyquist band.

    For any pair of fields a (on the m-grid) and b (on the n-grid):
    h_m^2 sum a * upsample(b) == h_n^2 sum downsample(a) * b, exactly in
    exact arithmetic.
    """
    m = values.shape[0]
    if values.shape != (m, m) or n >= m:
        raise ValueError("expected a square array and n < m")
    spec = np.fft.fft2(values)
    idx_n = _band_indices(n)
    small = np.zeros((n, n), dtype=complex)
    small[np.ix_(idx_n, idx_n)] = spec[np.ix_(idx_n, idx_n)]
    return np.fft.ifft2(small).real * (n / m) ** 2
