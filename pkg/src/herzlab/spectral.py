"""FFT helpers on the periodic extension of a grid, plus zero-padded linear convolution.

Spectral profiles throughout the package are convolution multipliers:
``phi * f = F^{-1}[m F f]`` with ``m`` the profile sampled on the frequency lattice.
"""

from __future__ import annotations

import numpy as np

from .grid import GridSpec, SampledFunction

__all__ = [
    "apply_multiplier",
    "spatial_kernel",
    "linear_convolve",
    "radial_lattice",
    "shift_half_cell",
]


def _values(f) -> np.ndarray:
    return f.values if isinstance(f, SampledFunction) else np.asarray(f)


def apply_multiplier(f, mult: np.ndarray) -> np.ndarray:
    """Periodic convolution with the kernel whose multiplier is ``mult``."""
    v = _values(f)
    out = np.fft.ifftn(np.fft.fftn(v) * mult)
    if not np.iscomplexobj(v) and np.isrealobj(mult):
        # real, even multipliers keep real inputs real
        return out.real
    return out


def radial_lattice(spec: GridSpec, scale: float = 1.0) -> np.ndarray:
    """``|scale * xi|`` on the frequency lattice."""
    return scale * spec.freq_radius


def _phase(spec: GridSpec, offset: float) -> np.ndarray:
    xi = spec.freq_axis
    p = np.exp(1j * xi * offset)
    if spec.dimension == 1:
        return p
    return np.multiply.outer(p, p)


def spatial_kernel(spec: GridSpec, mult: np.ndarray) -> np.ndarray:
    """Samples ``k(x_i)`` of the kernel with multiplier ``mult`` (periodised)."""
    first = -spec.halfwidth + 0.5 * spec.step
    return np.fft.ifftn(mult * _phase(spec, first)) / spec.cell_volume


def shift_half_cell(spec: GridSpec, values: np.ndarray, sign: float = 1.0) -> np.ndarray:
    """Band-limited interpolation of ``values`` at ``x_i + sign * h/2`` (per axis)."""
    return np.fft.ifftn(np.fft.fftn(values) * _phase(spec, sign * 0.5 * spec.step))


def linear_convolve(spec: GridSpec, values: np.ndarray, kernel_on_lags) -> np.ndarray:
    """Non-periodic discrete convolution ``sum_j K(x_i - y_j) v_j h^n``.

    ``kernel_on_lags(d)`` receives integer lag arrays (one per axis, in cells)
    and returns kernel values already multiplied by ``h^n``.
    """
    N = spec.samples_per_axis
    M = 2 * N
    lag = np.fft.fftfreq(M, d=1.0 / M).astype(int)  # 0..N-1, -N..-1
    if spec.dimension == 1:
        K = kernel_on_lags(lag)
    else:
        a, b = np.meshgrid(lag, lag, indexing="ij")
        K = kernel_on_lags(a, b)
    pad = np.zeros((M,) * spec.dimension, dtype=np.result_type(values, K))
    pad[(slice(0, N),) * spec.dimension] = values
    out = np.fft.ifftn(np.fft.fftn(pad) * np.fft.fftn(K))
    out = out[(slice(0, N),) * spec.dimension]
    if np.isrealobj(values) and np.isrealobj(K):
        return out.real
    return out
