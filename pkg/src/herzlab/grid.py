"""Uniform cell-centred grids on [-2^K, 2^K]^n, dyadic shells and quadrature."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

__all__ = [
    "GridSpec",
    "SampledFunction",
    "make_grid",
    "annulus_mask",
    "ball_mask",
    "modified_mask",
    "dyadic_mask",
    "integrate",
]


def _is_power_of_two(n: int) -> bool:
    return n > 0 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class GridSpec:
    dimension: int
    halfwidth_log2: int
    samples_per_axis: int
    k_min: int
    k_max: int

    def __post_init__(self):
        if self.dimension not in (1, 2):
            raise ValueError(f"dimension must be 1 or 2, got {self.dimension}")
        if not _is_power_of_two(self.samples_per_axis):
            raise ValueError(
                f"samples_per_axis must be a power of two, got {self.samples_per_axis}"
            )
        if self.k_max > self.halfwidth_log2:
            raise ValueError(
                f"k_max={self.k_max} exceeds halfwidth_log2={self.halfwidth_log2}"
            )
        if not self.k_min < 0 < self.k_max:
            raise ValueError(f"need k_min < 0 < k_max, got ({self.k_min}, {self.k_max})")

    @property
    def n(self) -> int:
        return self.dimension

    @property
    def halfwidth(self) -> float:
        return float(2.0**self.halfwidth_log2)

    @property
    def length(self) -> float:
        return 2.0 * self.halfwidth

    @property
    def step(self) -> float:
        return self.length / self.samples_per_axis

    @property
    def cell_volume(self) -> float:
        return self.step**self.dimension

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.samples_per_axis,) * self.dimension

    @property
    def size(self) -> int:
        return self.samples_per_axis**self.dimension

    @property
    def k_range(self) -> np.ndarray:
        return np.arange(self.k_min, self.k_max + 1)

    @property
    def axis(self) -> np.ndarray:
        h = self.step
        return -self.halfwidth + (np.arange(self.samples_per_axis) + 0.5) * h

    @property
    def coords(self) -> tuple[np.ndarray, ...]:
        return _coords(self)

    @property
    def radius(self) -> np.ndarray:
        """|x| at every grid point."""
        return _radius(self)

    @property
    def nyquist(self) -> float:
        """Largest resolved angular frequency pi/h."""
        return np.pi / self.step

    @property
    def freq_axis(self) -> np.ndarray:
        return 2.0 * np.pi * np.fft.fftfreq(self.samples_per_axis, d=self.step)

    @property
    def freq_radius(self) -> np.ndarray:
        return _freq_radius(self)

    def nearest_index(self, x) -> tuple[int, ...]:
        """Index of the grid point closest to ``x`` (scalar in 1-D, pair in 2-D)."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        idx = np.floor((x + self.halfwidth) / self.step).astype(int)
        idx = np.clip(idx, 0, self.samples_per_axis - 1)
        return tuple(int(i) for i in idx)


# caches keyed on the (hashable, frozen) spec
_COORD_CACHE: dict[GridSpec, tuple[np.ndarray, ...]] = {}
_RADIUS_CACHE: dict[GridSpec, np.ndarray] = {}
_FREQ_CACHE: dict[GridSpec, np.ndarray] = {}


def _coords(spec: GridSpec) -> tuple[np.ndarray, ...]:
    if spec not in _COORD_CACHE:
        ax = spec.axis
        if spec.dimension == 1:
            out = (ax,)
        else:
            out = tuple(np.meshgrid(ax, ax, indexing="ij"))
        for a in out:
            a.setflags(write=False)
        _COORD_CACHE[spec] = out
    return _COORD_CACHE[spec]


def _radius(spec: GridSpec) -> np.ndarray:
    if spec not in _RADIUS_CACHE:
        c = _coords(spec)
        r = np.abs(c[0]) if spec.dimension == 1 else np.hypot(c[0], c[1])
        r.setflags(write=False)
        _RADIUS_CACHE[spec] = r
    return _RADIUS_CACHE[spec]


def _freq_radius(spec: GridSpec) -> np.ndarray:
    if spec not in _FREQ_CACHE:
        xi = spec.freq_axis
        if spec.dimension == 1:
            r = np.abs(xi)
        else:
            a, b = np.meshgrid(xi, xi, indexing="ij")
            r = np.hypot(a, b)
        r.setflags(write=False)
        _FREQ_CACHE[spec] = r
    return _FREQ_CACHE[spec]


def make_grid(dimension: int, K: int, N: int, k_min: int, k_max: int) -> GridSpec:
    """Validated grid with step ``2^(K+1)/N`` on ``[-2^K, 2^K]^dimension``."""
    return GridSpec(int(dimension), int(K), int(N), int(k_min), int(k_max))


@dataclass(frozen=True, eq=False)
class SampledFunction:
    """Function values at the cell centres of ``spec``.

    Values outside the truncated domain are taken to be zero.
    """

    spec: GridSpec
    values: np.ndarray
    label: str = ""
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        v = np.asarray(self.values)
        if v.size != self.spec.size:
            raise ValueError(f"expected {self.spec.size} values, got {v.size}")
        v = v.reshape(self.spec.shape)
        if not np.all(np.isfinite(v)):
            raise ValueError(f"non-finite values in sampled function {self.label!r}")
        if not (np.iscomplexobj(v) or v.dtype == np.float64):
            v = v.astype(np.float64)
        v = v.copy()
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @classmethod
    def from_callable(cls, spec: GridSpec, func, label: str = "") -> "SampledFunction":
        return cls(spec, func(*spec.coords), label)

    @cached_property
    def abs(self) -> np.ndarray:
        a = np.abs(self.values)
        a.setflags(write=False)
        return a

    def with_values(self, values, label: str | None = None) -> "SampledFunction":
        return SampledFunction(self.spec, values, self.label if label is None else label)

    def __mul__(self, other):
        o = other.values if isinstance(other, SampledFunction) else other
        return self.with_values(self.values * o)

    __rmul__ = __mul__

    def __add__(self, other):
        o = other.values if isinstance(other, SampledFunction) else other
        return self.with_values(self.values + o)

    def __neg__(self):
        return self.with_values(-self.values)

    def __sub__(self, other):
        return self + (-other)


def _check_k(spec: GridSpec, k: int) -> None:
    if not spec.k_min <= k <= spec.k_max:
        raise ValueError(f"k={k} outside [{spec.k_min}, {spec.k_max}]")


def ball_mask(spec: GridSpec, k: int) -> SampledFunction:
    """Indicator of B_k = {|x| <= 2^k}; k may be one below k_min (residual ball)."""
    if not spec.k_min - 1 <= k <= spec.k_max:
        raise ValueError(f"k={k} outside [{spec.k_min - 1}, {spec.k_max}]")
    return SampledFunction(spec, (spec.radius <= 2.0**k).astype(float), f"ball[{k}]")


def annulus_mask(spec: GridSpec, k: int) -> SampledFunction:
    """Indicator of D_k = {2^(k-1) < |x| <= 2^k}."""
    _check_k(spec, k)
    r = spec.radius
    m = (r > 2.0 ** (k - 1)) & (r <= 2.0**k)
    return SampledFunction(spec, m.astype(float), f"annulus[{k}]")


def modified_mask(spec: GridSpec, m: int) -> SampledFunction:
    """chi~_m: the annulus for m >= 1 and the unit ball for m = 0."""
    if m < 0:
        raise ValueError("modified masks are indexed by m >= 0")
    return ball_mask(spec, 0) if m == 0 else annulus_mask(spec, m)


def dyadic_mask(spec: GridSpec, k: int, kind: str = "annulus") -> SampledFunction:
    if kind == "annulus":
        return annulus_mask(spec, k)
    if kind == "ball":
        return ball_mask(spec, k)
    if kind == "modified":
        return modified_mask(spec, k)
    raise ValueError(f"unknown mask kind {kind!r}")


def shell_index(spec: GridSpec) -> np.ndarray:
    """Integer k with x in D_k at each grid point; k_min - 1 marks the residual ball."""
    r = spec.radius
    with np.errstate(divide="ignore"):
        k = np.ceil(np.log2(r)).astype(int)
    # guard exact powers of two against log2 rounding
    k = np.where(r > 2.0**k, k + 1, k)
    k = np.where(r <= 2.0 ** (k - 1), k - 1, k)
    return np.clip(k, spec.k_min - 1, None)


def integrate(f) -> float | complex:
    """Rectangle rule ``h^n * sum(values)``."""
    if isinstance(f, SampledFunction):
        return f.values.sum() * f.spec.cell_volume
    raise TypeError("integrate expects a SampledFunction")
