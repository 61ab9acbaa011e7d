"""Maximal operators, size-condition operators and vector-valued combinations."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .grid import GridSpec, SampledFunction
from .herz import HerzParams, herz_norm
from .lebesgue import weighted_norm
from .report import ConstantReport
from .spectral import apply_multiplier, linear_convolve

__all__ = [
    "WindowFamily",
    "VectorFunction",
    "dyadic_windows",
    "all_windows",
    "maximal",
    "maximal_t",
    "size_condition_operator",
    "size_operator_at",
    "size_majorant",
    "vector_ell_r",
    "discrete_convolution_bound",
    "geometric_ratio",
    "convolution_vs_maximal",
    "vector_maximal_lebesgue",
    "vector_herz_sides",
    "SIZE_OPERATORS",
]


@dataclass(frozen=True)
class WindowFamily:
    """Cell-aligned windows around each evaluation point.

    In 1-D a window ``(a, b)`` covers cells ``i - a .. i + b``, i.e. the interval
    ``[x_i - (a + 1/2) h, x_i + (b + 1/2) h]``; ``(0, 0)`` is the cell itself.
    In 2-D a window ``(a, b, c, d)`` is the rectangle of cells
    ``[i - a, i + b] x [j - c, j + d]``.
    """

    offsets: np.ndarray
    dimension: int = 1

    def __post_init__(self):
        off = np.atleast_2d(np.asarray(self.offsets, dtype=int))
        if off.shape[1] != 2 * self.dimension:
            raise ValueError("window offsets do not match the dimension")
        if np.any(off < 0):
            raise ValueError("window offsets must be nonnegative")
        if self.dimension == 1:
            # closed under swapping left/right
            off = np.unique(np.concatenate([off, off[:, ::-1]]), axis=0)
        object.__setattr__(self, "offsets", off)

    def __len__(self):
        return len(self.offsets)

    def union(self, other: "WindowFamily") -> "WindowFamily":
        return WindowFamily(np.concatenate([self.offsets, other.offsets]), self.dimension)


def _dyadic_offsets(N: int) -> np.ndarray:
    return np.array([0] + [2**i for i in range(int(np.log2(N)) + 1)])


def dyadic_windows(spec: GridSpec) -> WindowFamily:
    """Offsets in {0, 1, 2, 4, ..., N} cells on each side (squares with five anchor positions in 2-D)."""
    N = spec.samples_per_axis
    d = _dyadic_offsets(N)
    if spec.dimension == 1:
        a, b = np.meshgrid(d, d, indexing="ij")
        return WindowFamily(np.stack([a.ravel(), b.ravel()], 1), 1)
    rows = []
    for L in [1] + [2**i for i in range(1, int(np.log2(N)) + 1)]:
        anchors = sorted({0, L // 4, L // 2, (3 * L) // 4, L - 1})
        for ox in anchors:
            for oy in anchors:
                rows.append((ox, L - 1 - ox, oy, L - 1 - oy))
    return WindowFamily(np.array(rows), 2)


def all_windows(spec: GridSpec, max_cells: int) -> WindowFamily:
    """Every window with at most ``max_cells`` cells on each side (1-D)."""
    if spec.dimension != 1:
        raise ValueError("exhaustive windows are only provided in 1-D")
    d = np.arange(max_cells + 1)
    a, b = np.meshgrid(d, d, indexing="ij")
    return WindowFamily(np.stack([a.ravel(), b.ravel()], 1), 1)


def _abs(f) -> np.ndarray:
    return f.abs if isinstance(f, SampledFunction) else np.abs(np.asarray(f))


def _maximal_array(a: np.ndarray, windows: WindowFamily) -> np.ndarray:
    # prefix sums in extended precision; differences of large partial sums
    # otherwise lose the tails.  Starting from |f| keeps Mf >= |f| exact.
    ld = np.longdouble
    if a.ndim == 1:
        N = a.size
        S = np.concatenate([[ld(0)], np.cumsum(a, dtype=ld)])
        i = np.arange(N)
        out = a.astype(ld)
        for lo_off, hi_off in windows.offsets:
            lo = np.maximum(i - lo_off, 0)
            hi = np.minimum(i + hi_off, N - 1)
            avg = (S[hi + 1] - S[lo]) / (lo_off + hi_off + 1)
            np.maximum(out, avg, out=out)
        return out.astype(float)
    N = a.shape[0]
    S = np.zeros((N + 1, N + 1), dtype=ld)
    S[1:, 1:] = a.astype(ld).cumsum(0).cumsum(1)
    i = np.arange(N)
    out = a.astype(ld)
    for l, r, d, u in windows.offsets:
        x0 = np.maximum(i - l, 0)[:, None]
        x1 = np.minimum(i + r, N - 1)[:, None] + 1
        y0 = np.maximum(i - d, 0)[None, :]
        y1 = np.minimum(i + u, N - 1)[None, :] + 1
        tot = S[x1, y1] - S[x0, y1] - S[x1, y0] + S[x0, y0]
        np.maximum(out, tot / ((l + r + 1) * (d + u + 1)), out=out)
    return out.astype(float)


def maximal(f, windows: WindowFamily | None = None) -> SampledFunction:
    """Uncentred maximal function over the window family, via prefix sums.

    Values outside the grid are zero, so windows crossing the boundary are
    averaged over their full length.
    """
    spec = f.spec
    windows = dyadic_windows(spec) if windows is None else windows
    return SampledFunction(spec, _maximal_array(f.abs, windows), f"M[{f.label}]")


def maximal_t(f, t: float, windows: WindowFamily | None = None) -> SampledFunction:
    """``(M(|f|^t))^(1/t)``."""
    if not t > 0:
        raise ValueError(f"t must be positive, got {t}")
    spec = f.spec
    windows = dyadic_windows(spec) if windows is None else windows
    return SampledFunction(spec, _maximal_array(f.abs**t, windows) ** (1.0 / t), f"M_{t:g}[{f.label}]")


# kernels on integer lags (cells), already multiplied by h^n
def _kernel_power(spec: GridSpec):
    n = spec.dimension

    def k(*d):
        r = np.sqrt(sum(np.asarray(x, dtype=float) ** 2 for x in d))
        with np.errstate(divide="ignore"):
            return np.where(r > 2.0, r ** (-n), 0.0)

    return k


def _riesz(spec: GridSpec):
    n = spec.dimension

    def k(*d):
        r = np.sqrt(sum(np.asarray(x, dtype=float) ** 2 for x in d))
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(r > 2.0, np.asarray(d[0], dtype=float) / r ** (n + 1), 0.0)

    return k


SIZE_OPERATORS = {"kernel_power": _kernel_power, "riesz_truncated": _riesz}


def size_condition_operator(kind: str, f: SampledFunction) -> SampledFunction:
    """Truncated singular operators obeying ``|Tf(x)| <= int |x-y|^-n |f(y)| dy`` off supp f.

    ``riesz_truncated``: kernel ``(x-y)_1 / |x-y|^{n+1}``; ``kernel_power``: ``|x-y|^-n``;
    both restricted to ``|x - y| > 2h``.
    """
    if kind not in SIZE_OPERATORS:
        raise ValueError(f"unknown operator {kind!r}")
    spec = f.spec
    # in cell units |d h|^-n h^n = |d|^-n, so h drops out of both kernels
    out = linear_convolve(spec, f.values, SIZE_OPERATORS[kind](spec))
    return SampledFunction(spec, out, f"{kind}[{f.label}]")


def size_majorant(f: SampledFunction) -> SampledFunction:
    """``int_{|x-y|>2h} |x-y|^-n |f(y)| dy`` on the grid."""
    spec = f.spec
    out = linear_convolve(spec, f.abs, _kernel_power(spec))
    return SampledFunction(spec, out, f"majorant[{f.label}]")


def size_operator_at(kind: str, f: SampledFunction, x) -> float | complex:
    """Direct quadrature of the size-condition operator at an arbitrary point ``x``."""
    spec = f.spec
    h, n = spec.step, spec.dimension
    x = np.atleast_1d(np.asarray(x, dtype=float))
    diff = [x[i] - c for i, c in enumerate(spec.coords)]
    r = np.sqrt(sum(d**2 for d in diff))
    mask = r > 2 * h
    with np.errstate(divide="ignore", invalid="ignore"):
        if kind == "kernel_power":
            k = np.where(mask, r ** (-n), 0.0)
        elif kind == "riesz_truncated":
            k = np.where(mask, diff[0] / r ** (n + 1), 0.0)
        else:
            raise ValueError(f"unknown operator {kind!r}")
    return np.sum(k * f.values) * h**n


@dataclass(frozen=True)
class VectorFunction:
    members: tuple
    r: float

    def __post_init__(self):
        m = tuple(self.members)
        if not m:
            raise ValueError("a vector function needs at least one member")
        spec = m[0].spec
        if any(g.spec != spec for g in m):
            raise ValueError("members must share one grid")
        if not self.r > 0:
            raise ValueError("r must be positive")
        object.__setattr__(self, "members", m)

    @property
    def spec(self) -> GridSpec:
        return self.members[0].spec

    def __len__(self):
        return len(self.members)


def _ell_r(arrays: Sequence[np.ndarray], r: float) -> np.ndarray:
    if np.isinf(r):
        return np.max(np.stack(arrays), axis=0)
    acc = np.zeros_like(arrays[0], dtype=float)
    m = np.max(np.stack(arrays), axis=0)
    scale = np.where(m > 0, m, 1.0)
    for a in arrays:
        acc += (a / scale) ** r
    return scale * acc ** (1.0 / r)


def vector_ell_r(vf: VectorFunction, op: Callable | None = None, strict: bool = False) -> SampledFunction:
    """Pointwise ``(sum_j |op(f_j)|^r)^(1/r)``; ``op=None`` is the identity."""
    if strict and not vf.r > 1:
        raise ValueError("strict mode needs r > 1")
    parts = [(_abs(op(g)) if op is not None else g.abs) for g in vf.members]
    return SampledFunction(vf.spec, _ell_r(parts, vf.r), f"l{vf.r:g}")


def geometric_ratio(n_levels: int, k0: int, delta_prime: float, beta: float) -> float:
    """``||{2^{-|j - k0| delta'}}_{j=0..n-1}||_{l^beta}``: the exact single-shell ratio."""
    if np.isinf(beta):
        return 1.0
    j = np.arange(n_levels)
    return float(np.sum(np.exp2(-np.abs(j - k0) * delta_prime * beta)) ** (1.0 / beta))


def discrete_convolution_bound(
    g: Sequence,
    delta_prime: float,
    beta: float,
    params: HerzParams,
    report: ConstantReport | None = None,
    label: str = "",
) -> ConstantReport:
    """Compare the Herz norms of ``||{G_j}||_{l^beta}`` and ``||{g_k}||_{l^beta}``.

    ``G_j = sum_k 2^{-|k-j| delta'} g_k`` over the finite index range of ``g``.
    """
    if not delta_prime > 0:
        raise ValueError("delta' must be positive")
    raw = [np.asarray(x.values if isinstance(x, SampledFunction) else x) for x in g]
    if any(np.iscomplexobj(x) or np.any(x < 0) for x in raw):
        raise ValueError("g_k must be nonnegative")
    arrs = [x.astype(float) for x in raw]
    J = len(arrs)
    idx = np.arange(J)
    coef = np.exp2(-np.abs(idx[:, None] - idx[None, :]) * delta_prime)
    stack = np.stack(arrs)
    G = np.tensordot(coef, stack, axes=1)
    lhs = herz_norm(_ell_r(list(G), beta), params)
    rhs = herz_norm(_ell_r(arrs, beta), params)
    report = report or ConstantReport("tt-L1", meta={"delta_prime": delta_prime, "beta": beta})
    report.add(label or f"sample{len(report.labels)}", lhs, rhs)
    return report


def convolution_vs_maximal(
    f: SampledFunction,
    dilations: Sequence[float],
    omega_hat: Callable | None = None,
    windows: WindowFamily | None = None,
    floor: float = 1e-12,
) -> float:
    """Worst pointwise ``|omega_N * f| / Mf`` over the dilations, where ``Mf > floor * max Mf``."""
    spec = f.spec
    omega_hat = omega_hat or (lambda r: np.exp(-(r**2) / 4.0))
    Mf = maximal(f, windows).values
    keep = Mf > floor * Mf.max()
    worst = 0.0
    for N in dilations:
        conv = np.abs(apply_multiplier(f, omega_hat(spec.freq_radius / N)))
        if keep.any():
            worst = max(worst, float(np.max(conv[keep] / Mf[keep])))
    return worst


def vector_maximal_lebesgue(vf: VectorFunction, q, w=None, windows=None) -> tuple[float, float]:
    """Both sides of the vector-valued maximal inequality in ``L^q(w)``."""
    lhs = weighted_norm(vector_ell_r(vf, lambda g: maximal(g, windows)), q, w)
    rhs = weighted_norm(vector_ell_r(vf), q, w)
    return lhs, rhs


def vector_herz_sides(vf: VectorFunction, op: Callable, params: HerzParams) -> tuple[float, float]:
    """Herz norms of ``l^r(op f_j)`` and ``l^r(f_j)``."""
    lhs = herz_norm(vector_ell_r(vf, op), params)
    rhs = herz_norm(vector_ell_r(vf), params)
    return lhs, rhs
