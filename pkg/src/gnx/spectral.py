"""Periodic grids, complex fields and Fourier multipliers.

Coordinates run over ``x_j = -L/2 + j*h`` on each axis, so the origin is a
grid node. Frequency coefficients are stored in FFT order and approximate the
continuum transform ``f^(xi) = int f(x) exp(-i xi.x) dx``; the inverse carries
the matching ``1/L^d`` weight so Plancherel reads
``h^d sum |f|^2 == L^-d sum |f^|^2``.
"""
from __future__ import annotations

import functools
import math
import numbers
import struct
from dataclasses import dataclass, field as dc_field
from pathlib import Path

import numpy as np
import scipy.fft as sfft

from ._accel import thread_count

PHYSICAL = "physical"
FREQUENCY = "frequency"

GNFLD_MAGIC = b"GNFLD1"


@dataclass(frozen=True)
class Grid:
    """Uniform periodic box with ``n`` points per axis in ``d`` dimensions."""

    d: int
    n: int
    L: tuple

    @property
    def shape(self):
        return (self.n,) * self.d

    @property
    def size(self):
        return self.n ** self.d

    @property
    def h(self):
        return tuple(Li / self.n for Li in self.L)

    @property
    def cell_volume(self):
        return math.prod(self.h)

    @property
    def isotropic(self):
        return all(Li == self.L[0] for Li in self.L)

    def axis(self, i):
        """Physical coordinates along axis ``i``."""
        return -self.L[i] / 2 + np.arange(self.n) * (self.L[i] / self.n)

    def frequencies(self, i):
        """Angular frequencies along axis ``i`` in FFT order."""
        return 2.0 * np.pi * np.fft.fftfreq(self.n, d=self.L[i] / self.n)

    def mesh(self):
        return np.meshgrid(*(self.axis(i) for i in range(self.d)), indexing="ij")

    def radius(self):
        """``|x|`` at every node."""
        return _radius(self)

    def xi_abs(self):
        """``|xi|`` on the frequency lattice (FFT order)."""
        return _xi_abs(self)

    def doubled(self):
        """Same box, twice the points per axis."""
        return Grid(self.d, 2 * self.n, self.L)


@functools.lru_cache(maxsize=32)
def _radius(grid):
    r2 = sum(x ** 2 for x in grid.mesh())
    out = np.sqrt(r2)
    out.setflags(write=False)
    return out


@functools.lru_cache(maxsize=32)
def _xi_abs(grid):
    ks = np.meshgrid(*(grid.frequencies(i) for i in range(grid.d)), indexing="ij")
    out = np.sqrt(sum(k ** 2 for k in ks))
    out.setflags(write=False)
    return out


def _fft_friendly(n):
    if n % 2:
        return False
    for p in (2, 3, 5):
        while n % p == 0:
            n //= p
    return n == 1


def make_grid(d, n, L=2 * np.pi):
    """Build a :class:`Grid`; ``L`` may be a scalar or one value per axis."""
    if d not in (1, 2, 3):
        raise ValueError(f"dimension must be 1, 2 or 3, got {d!r}")
    if int(n) != n or n < 8 or not _fft_friendly(int(n)):
        raise ValueError(
            f"points per axis must be an even 5-smooth size >= 8 "
            f"(powers of two preferred), got {n!r}")
    if np.ndim(L) == 0:
        Ls = (float(L),) * d
    else:
        Ls = tuple(float(v) for v in L)
        if len(Ls) != d:
            raise ValueError(f"expected {d} box lengths, got {len(Ls)}")
    if not all(np.isfinite(v) and v > 0 for v in Ls):
        raise ValueError(f"box length must be positive, got {L!r}")
    return Grid(int(d), int(n), Ls)


@dataclass(frozen=True, eq=False)
class Field:
    """Complex samples on a grid, in physical or frequency space."""

    grid: Grid
    values: np.ndarray = dc_field(repr=False)
    space: str = PHYSICAL

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.complex128)
        if vals.size != self.grid.size:
            raise ValueError(
                f"field has {vals.size} samples, grid needs {self.grid.size}")
        if self.space not in (PHYSICAL, FREQUENCY):
            raise ValueError(f"unknown space flag {self.space!r}")
        object.__setattr__(self, "values", vals.reshape(self.grid.shape))

    def to_frequency(self):
        if self.space == FREQUENCY:
            return self
        return Field(self.grid, forward(self.values, self.grid), FREQUENCY)

    def to_physical(self):
        if self.space == PHYSICAL:
            return self
        return Field(self.grid, inverse(self.values, self.grid), PHYSICAL)

    def physical(self):
        """Physical-space samples as an array."""
        return self.to_physical().values

    def spectrum(self):
        """Frequency coefficients as an array."""
        return self.to_frequency().values

    def with_values(self, values, space=None):
        return Field(self.grid, values, self.space if space is None else space)

    def __mul__(self, c):
        if not isinstance(c, numbers.Number):
            return NotImplemented
        return Field(self.grid, self.values * c, self.space)

    __rmul__ = __mul__

    def __add__(self, other):
        _check_same_grid(self, other)
        if self.space == other.space:
            return Field(self.grid, self.values + other.values, self.space)
        return Field(self.grid, self.physical() + other.physical(), PHYSICAL)

    def __sub__(self, other):
        return self + (-1.0) * other

    def __neg__(self):
        return (-1.0) * self


def _check_same_grid(a, b):
    if a.grid != b.grid:
        raise ValueError("fields live on different grids")


def forward(values, grid):
    """Physical samples -> frequency coefficients (FFT order)."""
    shifted = sfft.ifftshift(values)
    return grid.cell_volume * sfft.fftn(shifted, workers=thread_count())


def inverse(coeffs, grid):
    """Frequency coefficients (FFT order) -> physical samples."""
    vals = sfft.ifftn(coeffs, workers=thread_count()) / grid.cell_volume
    return sfft.fftshift(vals)


def plancherel_norm(f):
    """L2 norm computed from the frequency coefficients."""
    c = f.spectrum()
    return math.sqrt(float(np.sum(np.abs(c) ** 2).real) / math.prod(f.grid.L))


def inner(f, g):
    """``<f, g> = h^d sum conj(f) g`` in physical space."""
    _check_same_grid(f, g)
    return complex(f.grid.cell_volume * np.vdot(f.physical().ravel(), g.physical().ravel()))


@dataclass(frozen=True)
class MultiplierSpec:
    """Symbol ``|xi|**order``; ``zero_mode_policy`` governs negative orders."""

    order: float
    zero_mode_policy: str = "zero"

    def __post_init__(self):
        if self.zero_mode_policy not in ("zero", "error"):
            raise ValueError(f"unknown zero-mode policy {self.zero_mode_policy!r}")
        if not np.isfinite(self.order):
            raise ValueError("multiplier order must be finite")


def symbol(grid, order):
    """``|xi|**order`` on the lattice with ``0**order`` read as 0 (order > 0),
    1 (order == 0); negative orders get 0 at the zero mode."""
    k = grid.xi_abs()
    if order == 0:
        return np.ones_like(k)
    if order > 0:
        return k ** order
    out = np.zeros_like(k)
    nz = k > 0
    out[nz] = k[nz] ** order
    return out


def apply_multiplier(f, m):
    """Apply ``D**m.order`` (``D = sqrt(-Laplacian)``) to ``f``."""
    if isinstance(m, (int, float)):
        m = MultiplierSpec(float(m))
    if not np.all(np.isfinite(f.values)):
        raise ValueError("field has non-finite samples")
    if m.order == 0:
        return Field(f.grid, f.values.copy(), f.space)
    coeffs = f.spectrum()
    if m.order < 0 and m.zero_mode_policy == "error":
        scale = max(float(np.max(np.abs(coeffs))), np.finfo(float).tiny)
        if abs(coeffs.flat[0]) > 1e-12 * scale:
            raise ValueError("negative-order multiplier needs a mean-zero field")
    out = Field(f.grid, coeffs * symbol(f.grid, m.order), FREQUENCY)
    return out if f.space == FREQUENCY else out.to_physical()


def _lattice_shift(grid, a):
    """Integer cell offsets if ``a`` is on the lattice, else ``None``."""
    steps = []
    for ai, hi in zip(a, grid.h):
        m = round(ai / hi)
        if abs(ai - m * hi) > 1e-12 * max(hi, abs(ai)):
            return None
        steps.append(int(m))
    return tuple(steps)


def translate(f, a):
    """Return ``x -> f(x - a)``; on-lattice shifts are exact index rolls."""
    a = np.atleast_1d(np.asarray(a, dtype=float))
    if a.shape != (f.grid.d,):
        raise ValueError(f"shift must have {f.grid.d} components")
    steps = _lattice_shift(f.grid, a)
    if steps is not None:
        if not any(steps):
            return Field(f.grid, f.values.copy(), f.space)
        vals = np.roll(f.physical(), steps, axis=tuple(range(f.grid.d)))
        out = Field(f.grid, vals, PHYSICAL)
        return out if f.space == PHYSICAL else out.to_frequency()
    phase = np.ones(f.grid.shape, dtype=np.complex128)
    for i in range(f.grid.d):
        shape = [1] * f.grid.d
        shape[i] = f.grid.n
        phase = phase * np.exp(-1j * f.grid.frequencies(i) * a[i]).reshape(shape)
    out = Field(f.grid, f.spectrum() * phase, FREQUENCY)
    return out if f.space == FREQUENCY else out.to_physical()


def spectral_weights(grid, exponent):
    """``(1 + |xi|^2)^(-exponent/2)``: smooth decay used for random profiles."""
    return (1.0 + grid.xi_abs() ** 2) ** (-exponent / 2.0)


def make_profile(grid, kind, **params):
    """Deterministic test and initialisation profiles.

    ``gaussian`` (``sigma``, ``center``): ``exp(-|x-c|^2 / (2 sigma^2))``.
    ``sech`` (``width``, ``center``): ``sech(|x-c| / width)``.
    ``fourier_bump`` (``delta``, d=1 only): coefficients equal to the indicator
    of the open interval ``(1-delta, 1+delta)``, returned in frequency space
    so the coefficients stay exact.
    ``random`` (``seed``, ``decay``): complex Gaussian coefficients damped by
    ``(1+|xi|^2)^(-decay/2)``, scaled to unit peak modulus.
    """
    if kind == "gaussian":
        sigma = float(params.get("sigma", 1.0))
        if sigma <= 0:
            raise ValueError("gaussian width must be positive")
        r2 = _shifted_r2(grid, params.get("center"))
        return Field(grid, np.exp(-r2 / (2 * sigma ** 2)))
    if kind == "sech":
        width = float(params.get("width", 1.0))
        if width <= 0:
            raise ValueError("sech width must be positive")
        r = np.sqrt(_shifted_r2(grid, params.get("center")))
        return Field(grid, 1.0 / np.cosh(r / width))
    if kind == "fourier_bump":
        delta = float(params["delta"])
        if grid.d != 1:
            raise ValueError("fourier_bump is defined for d = 1 only")
        if not 0 < delta < 1:
            raise ValueError("fourier_bump needs 0 < delta < 1")
        # compare integer mode numbers so endpoints that fall on the lattice are
        # excluded regardless of rounding in xi = 2 pi k / L
        k = np.fft.fftfreq(grid.n, d=1.0 / grid.n)
        scale = grid.L[0] / (2 * np.pi)
        lo, hi = (1 - delta) * scale, (1 + delta) * scale
        guard = 1e-9 * hi
        coeffs = ((k > lo + guard) & (k < hi - guard)).astype(np.complex128)
        return Field(grid, coeffs, FREQUENCY)
    if kind == "random":
        seed = params.get("seed", 0)
        decay = float(params.get("decay", grid.d / 2 + 2))
        rng = np.random.default_rng(seed)
        z = rng.standard_normal(grid.shape) + 1j * rng.standard_normal(grid.shape)
        vals = inverse(z * spectral_weights(grid, decay), grid)
        return Field(grid, vals / np.max(np.abs(vals)))
    raise ValueError(f"unknown profile kind {kind!r}")


def _shifted_r2(grid, center):
    xs = grid.mesh()
    if center is None:
        return sum(x ** 2 for x in xs)
    c = np.atleast_1d(np.asarray(center, dtype=float))
    if c.shape != (grid.d,):
        raise ValueError(f"center must have {grid.d} components")
    return sum((x - ci) ** 2 for x, ci in zip(xs, c))


def write_field(path, f):
    """Write ``f`` (physical space) in the GNFLD1 binary layout."""
    g = f.grid
    vals = np.ascontiguousarray(f.physical(), dtype="<c16")
    header = GNFLD_MAGIC + struct.pack("<I", g.d)
    header += struct.pack(f"<{g.d}I", *([g.n] * g.d))
    header += struct.pack(f"<{g.d}d", *g.L)
    Path(path).write_bytes(header + vals.tobytes(order="C"))


def read_field(path):
    """Read a GNFLD1 file back into a physical-space :class:`Field`."""
    raw = Path(path).read_bytes()
    if raw[:6] != GNFLD_MAGIC:
        raise ValueError(f"{path}: not a GNFLD1 file")
    pos = 6
    try:
        (d,) = struct.unpack_from("<I", raw, pos)
        pos += 4
        if d not in (1, 2, 3):
            raise ValueError(f"{path}: bad dimension {d}")
        ns = struct.unpack_from(f"<{d}I", raw, pos)
        pos += 4 * d
        Ls = struct.unpack_from(f"<{d}d", raw, pos)
        pos += 8 * d
    except struct.error as exc:
        raise ValueError(f"{path}: truncated header") from exc
    if len(set(ns)) != 1:
        raise ValueError(f"{path}: unequal points per axis are not supported")
    grid = make_grid(d, ns[0], Ls)
    body = raw[pos:]
    if len(body) != 16 * grid.size:
        raise ValueError(f"{path}: expected {grid.size} samples")
    vals = np.frombuffer(body, dtype="<c16").astype(np.complex128)
    return Field(grid, vals.reshape(grid.shape))
