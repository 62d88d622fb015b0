"""Uniform periodic grid on the flat square 2-torus, and fields living on it.

The domain is [0, L) x [0, L) with N x N equispaced samples.  All derivative
and inverse operators elsewhere in the package act through the real FFT of a
field, so the grid carries the wavenumber arrays in rfft2 layout together
with the Parseval mode weights needed for spectral norms.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

#: Fields are rejected below this resolution: the vortex cores span a few
#: cells and nothing useful can be represented on coarser grids.
MIN_POINTS = 16

#: Magic line prefix of the field dump format.
VFD_MAGIC = "vortexfield"
VFD_VERSION = "v1"


@dataclass(frozen=True)
class Grid:
    """Immutable N x N periodic grid on [0, L)^2.

    Parameters
    ----------
    n : int
        Samples per direction.  Must be even and at least ``MIN_POINTS``.
    length : float
        Period L of the torus in both directions.

    Notes
    -----
    Derived arrays are attached in ``__post_init__`` and are not dataclass
    fields, so equality and hashing compare ``(n, length)`` only.
    """

    n: int
    length: float

    def __post_init__(self) -> None:
        if not isinstance(self.n, (int, np.integer)):
            raise ValueError(f"N must be an integer, got {self.n!r}")
        if self.n % 2 != 0:
            raise ValueError("N must be even")
        if self.n < MIN_POINTS:
            raise ValueError(f"N must be at least {MIN_POINTS}, got {self.n}")
        if not (self.length > 0.0) or not np.isfinite(self.length):
            raise ValueError(f"L must be positive and finite, got {self.length}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "length", float(self.length))

        n, length = self.n, self.length
        h = length / n
        x = np.arange(n) * h
        mesh_x, mesh_y = np.meshgrid(x, x, indexing="ij")
        kx = 2.0 * np.pi * np.fft.fftfreq(n, d=h)[:, None]
        ky = 2.0 * np.pi * np.fft.rfftfreq(n, d=h)[None, :]
        k2 = kx * kx + ky * ky
        # Parseval weights for the half spectrum: interior ky columns count
        # twice, the ky = 0 and Nyquist columns once.
        weight = np.full(n // 2 + 1, 2.0)
        weight[0] = 1.0
        weight[-1] = 1.0

        object.__setattr__(self, "spacing", h)
        object.__setattr__(self, "area", length * length)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "mesh_x", mesh_x)
        object.__setattr__(self, "mesh_y", mesh_y)
        object.__setattr__(self, "kx", kx)
        object.__setattr__(self, "ky", ky)
        object.__setattr__(self, "k2", k2)
        object.__setattr__(self, "k4", k2 * k2)
        object.__setattr__(self, "mode_weight", weight[None, :])

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n, self.n)

    def wrap_delta(self, coord: float, axis_mesh: np.ndarray) -> np.ndarray:
        """Periodic displacement ``axis_mesh - coord`` folded into [-L/2, L/2)."""
        half = 0.5 * self.length
        return (axis_mesh - coord + half) % self.length - half


def make_grid(n: int, length: float) -> Grid:
    """Build a :class:`Grid` with ``n`` samples per direction and period ``length``."""
    return Grid(n, length)


class Field:
    """Real scalar field sampled on a :class:`Grid`.

    Values are stored read-only; the rfft2 spectrum is computed lazily and
    cached (safe because instances are immutable).  Arithmetic with other
    fields on the same grid, scalars, or raw arrays returns new fields.
    """

    __slots__ = ("grid", "values", "_spectrum")

    def __init__(self, grid: Grid, values: np.ndarray, *, _spectrum: np.ndarray | None = None):
        arr = np.asarray(values, dtype=np.float64)
        if arr.shape != grid.shape:
            raise ValueError(f"field shape {arr.shape} does not match grid {grid.shape}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("field contains non-finite values")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "values", arr)
        object.__setattr__(self, "_spectrum", _spectrum)

    def __setattr__(self, name, value):  # pragma: no cover - guard
        raise AttributeError("Field is immutable")

    @classmethod
    def from_spectrum(cls, grid: Grid, spectrum: np.ndarray) -> "Field":
        values = np.fft.irfft2(spectrum, s=grid.shape)
        return cls(grid, values)

    @property
    def spectrum(self) -> np.ndarray:
        """Cached ``np.fft.rfft2`` of the values."""
        if self._spectrum is None:
            object.__setattr__(self, "_spectrum", np.fft.rfft2(self.values))
        return self._spectrum

    # -- arithmetic ---------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, Field):
            if other.grid != self.grid:
                raise ValueError("fields live on different grids")
            return other.values
        return other

    def __add__(self, other):
        return Field(self.grid, self.values + self._coerce(other))

    __radd__ = __add__

    def __sub__(self, other):
        return Field(self.grid, self.values - self._coerce(other))

    def __rsub__(self, other):
        return Field(self.grid, self._coerce(other) - self.values)

    def __mul__(self, other):
        return Field(self.grid, self.values * self._coerce(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return Field(self.grid, self.values / self._coerce(other))

    def __neg__(self):
        return Field(self.grid, -self.values)

    def __repr__(self) -> str:
        v = self.values
        return f"Field(n={self.grid.n}, L={self.grid.length:g}, min={v.min():.3g}, max={v.max():.3g})"


class FieldNorms(NamedTuple):
    """Norm bundle returned by :func:`norms` (all but ``linf`` spectral)."""

    l2: float
    h1: float
    lap: float
    linf: float


def constant_field(grid: Grid, value: float) -> Field:
    return Field(grid, np.full(grid.shape, float(value)))


def integrate(f: Field) -> float:
    """Integral of ``f`` over the torus with the uniform h^2 quadrature."""
    return float(f.values.sum()) * f.grid.spacing**2


def mean(f: Field) -> float:
    return integrate(f) / f.grid.area


def spectral_inner(f: Field, g: Field) -> float:
    """L2 inner product int f g evaluated through the half spectrum (Parseval)."""
    if f.grid != g.grid:
        raise ValueError("fields live on different grids")
    grid = f.grid
    prod = grid.mode_weight * (f.spectrum * np.conj(g.spectrum)).real
    return float(prod.sum()) * grid.spacing**2 / grid.n**2


def norms(f: Field) -> FieldNorms:
    """(L2, H1 seminorm, L2 of Laplacian, Linf) of a field.

    The first three are evaluated mode-wise from the spectrum; ``linf`` is
    the max over grid samples.
    """
    grid = f.grid
    power = grid.mode_weight * np.abs(f.spectrum) ** 2
    scale = grid.spacing**2 / grid.n**2
    l2 = np.sqrt(power.sum() * scale)
    h1 = np.sqrt((grid.k2 * power).sum() * scale)
    lap = np.sqrt((grid.k4 * power).sum() * scale)
    linf = np.abs(f.values).max()
    return FieldNorms(float(l2), float(h1), float(lap), float(linf))


def h2_norm(f: Field) -> float:
    """Full H2 norm sqrt(||f||^2 + ||grad f||^2 + ||lap f||^2)."""
    n = norms(f)
    return float(np.sqrt(n.l2**2 + n.h1**2 + n.lap**2))


# -- field dumps ------------------------------------------------------------


def write_field(path: str | os.PathLike, f: Field) -> None:
    """Dump a field as text: header ``vortexfield v1 N L``, then N rows of N values.

    Values use %.17g so float64 round-trips exactly.  The write is atomic
    (temp file + rename).
    """
    path = os.fspath(path)
    tmp = path + ".tmp"
    with open(tmp, "w") as fh:
        fh.write(f"{VFD_MAGIC} {VFD_VERSION} {f.grid.n} {f.grid.length:.17g}\n")
        np.savetxt(fh, f.values, fmt="%.17g")
    os.replace(tmp, path)


def read_field(path: str | os.PathLike, grid: Grid | None = None) -> Field:
    """Read a field dump written by :func:`write_field`.

    If ``grid`` is given the header must match it (L to 1e-12 relative);
    otherwise a fresh grid is constructed from the header.
    """
    path = os.fspath(path)
    with open(path) as fh:
        header = fh.readline().split()
        if len(header) != 4 or header[0] != VFD_MAGIC:
            raise ValueError(f"{path}: not a field dump (bad header)")
        if header[1] != VFD_VERSION:
            raise ValueError(f"{path}: unsupported format version {header[1]!r}")
        n = int(header[2])
        length = float(header[3])
        values = np.loadtxt(fh, ndmin=2)
    if grid is None:
        grid = make_grid(n, length)
    else:
        if grid.n != n or abs(grid.length - length) > 1e-12 * max(1.0, abs(length)):
            raise ValueError(
                f"{path}: dump is {n} x {n} on L={length!r}, expected "
                f"{grid.n} x {grid.n} on L={grid.length!r}"
            )
    if values.shape != (n, n):
        raise ValueError(f"{path}: expected {n} x {n} values, got {values.shape}")
    return Field(grid, values)
