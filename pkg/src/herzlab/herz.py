"""Weighted grand Herz-Morrey norms with variable exponents.

The norm is a double supremum over the grand parameter ``delta`` and the
Morrey truncation level ``k0``.  Shell norms are the expensive part (one
Luxemburg root per dyadic annulus, solved jointly); the sweep over
``(delta, k0)`` runs in log space on the precomputed shell norms, which keeps
``p(1+delta)`` up to ~1e8 well inside floating point range.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from functools import cached_property

import numpy as np

from .exponents import ExponentFunction, Weight, constant_exponent, unit_weight
from .grid import GridSpec, SampledFunction, shell_index
from .lebesgue import luxemburg_rows

__all__ = [
    "HerzParams",
    "HerzNormBreakdown",
    "default_delta_grid",
    "make_herz_params",
    "shell_norms",
    "grand_herz_morrey_norm",
    "herz_norm",
    "split_norm",
]

LN2 = np.log(2.0)


def default_delta_grid(n: int = 97, log2_range: float = 24.0) -> np.ndarray:
    return np.logspace(-log2_range, log2_range, n, base=2.0)


@dataclass(frozen=True, eq=False)
class HerzParams:
    alpha: ExponentFunction
    p: float
    q: ExponentFunction
    lam: float
    theta: float
    w: Weight
    delta_grid: np.ndarray = field(default_factory=default_delta_grid)
    k0_range: tuple[int, int] | None = None

    def __post_init__(self):
        spec = self.q.spec
        if self.alpha.spec != spec or self.w.spec != spec:
            raise ValueError("alpha, q and w must share one grid")
        if not self.p > 1:
            raise ValueError(f"p must exceed 1, got {self.p}")
        if not self.theta > 0:
            raise ValueError(f"theta must be positive, got {self.theta}")
        if not self.lam >= 0:
            raise ValueError(f"lambda must be nonnegative, got {self.lam}")
        dg = np.asarray(self.delta_grid, dtype=float)
        if dg.size == 0 or np.any(dg <= 0) or np.any(np.diff(dg) <= 0):
            raise ValueError("delta_grid must be positive and strictly increasing")
        object.__setattr__(self, "delta_grid", dg)
        k0 = (spec.k_min, spec.k_max) if self.k0_range is None else tuple(int(k) for k in self.k0_range)
        if not spec.k_min <= k0[0] <= k0[1] <= spec.k_max:
            raise ValueError(f"k0_range {k0} outside the grid range")
        object.__setattr__(self, "k0_range", k0)

    @property
    def spec(self) -> GridSpec:
        return self.q.spec

    @property
    def ks(self) -> np.ndarray:
        return self.spec.k_range

    def with_(self, **changes) -> "HerzParams":
        return replace(self, **changes)

    @cached_property
    def _layout(self):
        """Row id per grid point (shell k -> row k - k_min) and the in-range selection."""
        spec = self.spec
        k = shell_index(spec).ravel()
        sel = np.nonzero((k >= spec.k_min) & (k <= spec.k_max))[0]
        return sel, k[sel] - spec.k_min, k[sel]

    @cached_property
    def _factors(self):
        sel, _, k = self._layout
        w = self.w.array.ravel()[sel]
        a = self.alpha.values.ravel()[sel]
        with_alpha = w * np.exp2(k * a)
        return w, with_alpha, self.q.values.ravel()[sel]

    def describe(self) -> dict:
        return {
            "alpha": self.alpha.label,
            "alpha0": self.alpha.value_at_origin,
            "alpha_inf": self.alpha.value_at_infinity,
            "p": self.p,
            "q": self.q.label,
            "lambda": self.lam,
            "theta": self.theta,
            "w": self.w.label,
            "delta_grid": [float(self.delta_grid[0]), float(self.delta_grid[-1]), int(self.delta_grid.size)],
            "k0_range": list(self.k0_range),
        }


def make_herz_params(
    spec: GridSpec,
    alpha: ExponentFunction | float = 0.0,
    p: float = 2.0,
    q: ExponentFunction | float = 2.0,
    lam: float = 0.0,
    theta: float = 1.0,
    w: Weight | None = None,
    delta_grid=None,
    k0_range=None,
) -> HerzParams:
    if not isinstance(alpha, ExponentFunction):
        alpha = constant_exponent(spec, alpha)
    if not isinstance(q, ExponentFunction):
        q = constant_exponent(spec, q)
    return HerzParams(
        alpha,
        float(p),
        q,
        float(lam),
        float(theta),
        unit_weight(spec) if w is None else w,
        default_delta_grid() if delta_grid is None else delta_grid,
        k0_range,
    )


def _abs_array(f, spec: GridSpec) -> np.ndarray:
    if isinstance(f, SampledFunction):
        if f.spec != spec:
            raise ValueError("function and parameters live on different grids")
        return f.abs.ravel()
    a = np.abs(np.asarray(f)).ravel()
    if a.size != spec.size:
        raise ValueError("array size does not match the grid")
    return a


def shell_norms(f, params: HerzParams, with_alpha: bool = True) -> np.ndarray:
    """``||2^{k alpha(.)} f chi_k||_{L^q(w)}`` for k = k_min..k_max.

    With ``with_alpha=False`` the factor ``2^{k alpha}`` is dropped (the split form
    applies it outside the norm).
    """
    spec = params.spec
    sel, rows, _ = params._layout
    w, wa, q = params._factors
    vals = _abs_array(f, spec)[sel] * (wa if with_alpha else w)
    return luxemburg_rows(vals, q, rows, len(params.ks), spec.cell_volume)


@dataclass
class HerzNormBreakdown:
    value: float
    argmax_delta: float
    argmax_k0: int
    shell_norms: np.ndarray
    k_values: np.ndarray
    split_value: float | None = None

    def as_dict(self) -> dict:
        return {
            "value": self.value,
            "argmax_delta": self.argmax_delta,
            "argmax_k0": self.argmax_k0,
            "split_value": self.split_value,
            "shells": [
                {"k": int(k), "norm": float(s)} for k, s in zip(self.k_values, self.shell_norms)
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), sort_keys=True)


def _sweep(log_terms_by_k0: np.ndarray, params: HerzParams, k0_mask: np.ndarray):
    """Max over (delta, k0) given ``log_terms[k0_variant][k]``.

    ``log_terms_by_k0`` has shape (n_variants, n_k); variant ``v`` is used for the
    k0 indices where ``k0_mask[v]`` is set.  Returns (log value, delta index, k0 index).
    """
    ks = params.ks
    d = params.delta_grid
    P = params.p * (1.0 + d)  # (nd,)
    best = (-np.inf, 0, 0)
    grid = np.full((d.size, ks.size), -np.inf)
    for v in range(log_terms_by_k0.shape[0]):
        lt = log_terms_by_k0[v]
        with np.errstate(invalid="ignore"):
            a = P[:, None] * lt[None, :]
        a = np.where(np.isneginf(lt)[None, :], -np.inf, a)
        cum = np.logaddexp.accumulate(a, axis=1)
        val = (params.theta * np.log(d)[:, None] + cum) / P[:, None] - (ks * params.lam * LN2)[None, :]
        val = np.where(np.isneginf(cum), -np.inf, val)
        grid = np.where(k0_mask[v][None, :], val, grid)
    lo, hi = params.k0_range
    allowed = (ks >= lo) & (ks <= hi)
    grid[:, ~allowed] = -np.inf
    flat = int(np.argmax(grid))  # first maximum: smallest delta, then smallest k0
    i, j = np.unravel_index(flat, grid.shape)
    best = (float(grid[i, j]), int(i), int(j))
    return best


def _log(x: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore"):
        return np.log(x)


def grand_herz_morrey_norm(f, params: HerzParams, with_split: bool = False) -> HerzNormBreakdown:
    """Norm value, maximising (delta, k0), and the shell table."""
    s = shell_norms(f, params)
    ks = params.ks
    logv, i, j = _sweep(_log(s)[None, :], params, np.ones((1, ks.size), dtype=bool))
    if np.isneginf(logv):
        out = HerzNormBreakdown(0.0, float(params.delta_grid[0]), int(params.k0_range[0]), s, ks)
    else:
        out = HerzNormBreakdown(float(np.exp(logv)), float(params.delta_grid[i]), int(ks[j]), s, ks)
    if with_split:
        out.split_value = split_norm(f, params)
    return out


def herz_norm(f, params: HerzParams) -> float:
    return grand_herz_morrey_norm(f, params).value


def split_norm(f, params: HerzParams) -> float:
    """Max of the two suprema with ``2^{k alpha(0)}`` (k < 0) and ``2^{k alpha_inf}`` (k >= 0) outside the norms."""
    t = shell_norms(f, params, with_alpha=False)
    ks = params.ks
    lt = _log(t)
    a0 = params.alpha.value_at_origin
    ainf = params.alpha.value_at_infinity
    near = lt + ks * a0 * LN2
    far = np.where(ks < 0, near, lt + ks * ainf * LN2)
    mask = np.stack([ks <= 0, ks > 0])
    logv, _, _ = _sweep(np.stack([near, far]), params, mask)
    return 0.0 if np.isneginf(logv) else float(np.exp(logv))
