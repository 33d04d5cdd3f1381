"""Riesz kernel tables and the pair-sum kernels behind the energy functional.

The kernel is ``|x|**-lam`` sampled at lattice offsets, with the zero offset
replaced by the average of ``|x|**-lam`` over one cell. Two evaluation routes
share that table:

* ``convolve``: zero-padded FFT convolution on a doubled grid (no periodic
  images), ``O(N log N)``;
* ``pair_sum``: the literal double sum over cell pairs, ``O(N^2)``. This is
  the hot loop; it runs under numba unless ``GNX_NUMBA=0``.
"""
from __future__ import annotations

import functools
import math

import numpy as np
import scipy.fft as sfft
from scipy import integrate

from ._accel import njit, numba, prange, thread_count, use_numba

DIRECT_MAX_CELLS = 2 ** 15


@functools.lru_cache(maxsize=64)
def singular_cell_average(h, lam):
    """Mean of ``|x|**-lam`` over the box ``prod [-h_i/2, h_i/2]``.

    The orthant integral is split by which scaled coordinate is largest; along
    that coordinate the singular factor integrates in closed form, leaving a
    smooth ``(d-1)``-dimensional integral for adaptive quadrature.
    """
    h = tuple(float(v) for v in h)
    d = len(h)
    if not 0 < lam < d:
        raise ValueError(f"need 0 < lam < d, got lam={lam}, d={d}")
    a = [hi / 2 for hi in h]
    total = 0.0
    for k in range(d):
        rest = [a[i] for i in range(d) if i != k]
        if d == 1:
            smooth = a[k] ** -lam
        elif d == 2:
            smooth, _ = integrate.quad(
                lambda u: (a[k] ** 2 + rest[0] ** 2 * u * u) ** (-lam / 2),
                0.0, 1.0, epsabs=0.0, epsrel=1e-13, limit=200)
        else:
            smooth, _ = integrate.dblquad(
                lambda v, u: (a[k] ** 2 + rest[0] ** 2 * u * u
                              + rest[1] ** 2 * v * v) ** (-lam / 2),
                0.0, 1.0, 0.0, 1.0, epsabs=0.0, epsrel=1e-12)
        total += smooth
    orthant = math.prod(a) * total / (d - lam)
    return (2 ** d) * orthant / math.prod(h)


@functools.lru_cache(maxsize=32)
def offset_table(grid, lam):
    """Kernel at non-negative offsets ``(m_1 h_1, ..., m_d h_d)``, ``0 <= m_i < n``."""
    axes = [np.arange(grid.n) * hi for hi in grid.h]
    mesh = np.meshgrid(*axes, indexing="ij")
    r = np.sqrt(sum(m ** 2 for m in mesh))
    table = np.empty_like(r)
    nz = r > 0
    table[nz] = r[nz] ** -lam
    table[(0,) * grid.d] = singular_cell_average(grid.h, lam)
    table.setflags(write=False)
    return table


@functools.lru_cache(maxsize=16)
def _padded_kernel_hat(grid, lam):
    """FFT of the kernel laid out on the doubled (zero-padding) lattice."""
    n = grid.n
    m = np.abs(np.fft.fftfreq(2 * n, d=1.0 / (2 * n))).astype(int)
    m = np.minimum(m, n - 1)
    table = offset_table(grid, lam)
    idx = np.ix_(*([m] * grid.d))
    padded = table[idx]
    # the -n offset never enters a length-n linear convolution; clamping it
    # keeps the padded kernel even
    khat = sfft.rfftn(padded, workers=thread_count())
    khat.setflags(write=False)
    return khat


def convolve(values, grid, lam):
    """``(K * v)(x_i) = h^d sum_j K(x_i - x_j) v_j`` via zero-padded FFT."""
    n = grid.n
    khat = _padded_kernel_hat(grid, lam)
    size = (2 * n,) * grid.d
    region = tuple(slice(0, n) for _ in range(grid.d))
    workers = thread_count()
    if np.iscomplexobj(values) and np.any(values.imag != 0):
        re = convolve(np.ascontiguousarray(values.real), grid, lam)
        im = convolve(np.ascontiguousarray(values.imag), grid, lam)
        return re + 1j * im
    v = np.real(values)
    vh = sfft.rfftn(v, s=size, workers=workers)
    out = sfft.irfftn(vh * khat, s=size, workers=workers)[region]
    return grid.cell_volume * out


def _index_arrays(grid):
    idx = np.indices(grid.shape).reshape(grid.d, -1).T.astype(np.int64)
    strides = np.array([grid.n ** (grid.d - 1 - k) for k in range(grid.d)],
                       dtype=np.int64)
    return np.ascontiguousarray(idx), strides


@njit(parallel=True)
def _row_sums_numba(a, b, table):
    # a, b, table are 3-d (leading axes of length 1 for d < 3); each row is
    # summed by one worker in a fixed order, so results ignore the thread count
    n0, n1, n2 = a.shape
    out = np.zeros(n0 * n1 * n2)
    for k in prange(n0 * n1 * n2):
        i0 = k // (n1 * n2)
        i1 = (k // n2) % n1
        i2 = k % n2
        ai = a[i0, i1, i2]
        if ai == 0.0:
            continue
        s = 0.0
        c = 0.0
        for j0 in range(n0):
            d0 = abs(i0 - j0)
            for j1 in range(n1):
                d1 = abs(i1 - j1)
                part = 0.0
                for j2 in range(n2):
                    part += table[d0, d1, abs(i2 - j2)] * b[j0, j1, j2]
                t = s + part
                if abs(s) >= abs(part):
                    c += (s - t) + part
                else:
                    c += (part - t) + s
                s = t
        out[k] = ai * (s + c)
    return out


def _row_sums_numpy(a, b, idx, strides, table, block=64):
    npts = idx.shape[0]
    flat = table.ravel()
    out = np.zeros(npts)
    for start in range(0, npts, block):
        rows = slice(start, min(start + block, npts))
        off = np.abs(idx[rows, None, :] - idx[None, :, :]) @ strides
        out[rows] = a[rows] * (flat[off] @ b)
    return out


def _as3d(x, grid):
    return np.ascontiguousarray(x.reshape((1,) * (3 - grid.d) + grid.shape))


def _real_pair_sum(a, b, grid, lam):
    table = offset_table(grid, lam)
    if use_numba():
        rows = _row_sums_numba(_as3d(a, grid), _as3d(b, grid), _as3d(table, grid))
    else:
        idx, strides = _index_arrays(grid)
        rows = _row_sums_numpy(a.ravel(), b.ravel(), idx, strides, table)
    return math.fsum(rows.ravel())


def pair_sum(a, b, grid, lam):
    """``h^{2d} sum_i sum_j conj(a_i) b_j K(x_i - x_j)`` by direct summation.

    Row sums are formed independently and combined with ``math.fsum``, so the
    result does not depend on how rows are scheduled.
    """
    if grid.size > DIRECT_MAX_CELLS:
        raise ValueError(
            f"direct summation limited to {DIRECT_MAX_CELLS} cells, grid has {grid.size}")
    a = np.asarray(a).reshape(grid.shape)
    b = np.asarray(b).reshape(grid.shape)
    ar, ai = np.real(a).astype(float), np.imag(a).astype(float)
    br, bi = np.real(b).astype(float), np.imag(b).astype(float)
    a_cplx, b_cplx = np.any(ai != 0), np.any(bi != 0)
    re = _real_pair_sum(ar, br, grid, lam)
    im = 0.0
    if a_cplx and b_cplx:
        re += _real_pair_sum(ai, bi, grid, lam)
    if b_cplx:
        im += _real_pair_sum(ar, bi, grid, lam)
    if a_cplx:
        im -= _real_pair_sum(ai, br, grid, lam)
    w = grid.cell_volume ** 2
    return complex(w * re, w * im)


def set_threads(count):
    """Apply a worker count to numba's pool when numba is active."""
    if use_numba() and numba is not None:
        numba.set_num_threads(max(1, min(int(count), numba.config.NUMBA_NUM_THREADS)))
