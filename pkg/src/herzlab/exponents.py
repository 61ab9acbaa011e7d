"""Variable exponents, weights, and their log-Hoelder diagnostics."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .grid import GridSpec, SampledFunction, annulus_mask

__all__ = [
    "ExponentFunction",
    "Weight",
    "LogHolderConstants",
    "constant_exponent",
    "exponent_from_callable",
    "parse_exponent",
    "parse_weight",
    "power_weight",
    "unit_weight",
    "conjugate_exponent",
    "log_holder_diagnostics",
]

log = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class ExponentFunction:
    """A variable exponent sampled on a grid.

    ``func`` (when known) evaluates the exponent at arbitrary points and is
    used for the value at the origin, which is never a cell centre.
    """

    spec: GridSpec
    values: np.ndarray
    value_at_origin: float
    value_at_infinity: float
    label: str = ""
    func: Callable | None = None

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float).reshape(self.spec.shape).copy()
        if not np.all(np.isfinite(v)):
            raise ValueError("exponent has non-finite values")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def q_minus(self) -> float:
        return float(self.values.min())

    @property
    def q_plus(self) -> float:
        return float(self.values.max())

    @property
    def is_constant(self) -> bool:
        return self.q_minus == self.q_plus

    def in_P(self) -> bool:
        return self.q_minus > 1 and np.isfinite(self.q_plus)

    def in_P0(self) -> bool:
        return self.q_minus > 0 and np.isfinite(self.q_plus)

    def __call__(self, *x):
        if self.func is None:
            raise ValueError(f"exponent {self.label!r} has no closed form")
        return self.func(*x)


def _tail_mean(spec: GridSpec, values: np.ndarray) -> float:
    mask = annulus_mask(spec, spec.k_max).values > 0
    return float(values[mask].mean())


def exponent_from_callable(
    spec: GridSpec,
    func: Callable,
    label: str = "",
    at_infinity: float | None = None,
) -> ExponentFunction:
    """Sample ``func`` on the grid.

    The value at infinity defaults to the mean over the outermost annulus
    D_{k_max}, since a truncated grid never sees the actual limit.
    """
    values = np.broadcast_to(np.asarray(func(*spec.coords), dtype=float), spec.shape)
    zero = (0.0,) * spec.dimension
    at_origin = float(np.asarray(func(*[np.float64(z) for z in zero])))
    at_inf = _tail_mean(spec, values) if at_infinity is None else float(at_infinity)
    return ExponentFunction(spec, values, at_origin, at_inf, label, func)


def constant_exponent(spec: GridSpec, p: float) -> ExponentFunction:
    p = float(p)
    return ExponentFunction(
        spec, np.full(spec.shape, p), p, p, f"const:{p:g}", lambda *x: np.full(np.shape(x[0]), p)
    )


def _norm(x):
    return np.abs(x[0]) if len(x) == 1 else np.hypot(x[0], x[1])


def log_perturbed(spec: GridSpec, a0: float, a_inf: float, c: float) -> ExponentFunction:
    """``a_inf + (a0 - a_inf) / (1 + c log(1 + |x|))``.

    Lipschitz near the origin, log-Hoelder at infinity with limit ``a_inf``.
    """
    if c < 0:
        raise ValueError("log-perturbed exponent needs c >= 0")

    def func(*x):
        return a_inf + (a0 - a_inf) / (1.0 + c * np.log1p(_norm(x)))

    return exponent_from_callable(spec, func, f"log-perturbed:{a0:g},{a_inf:g},{c:g}")


def _split_preset(text: str) -> tuple[str, list[float]]:
    name, _, rest = text.strip().partition(":")
    args = [float(a) for a in rest.split(",") if a.strip()] if rest else []
    return name.strip().lower(), args


def parse_exponent(spec: GridSpec, text: str) -> ExponentFunction:
    """Parse ``const:p`` or ``log-perturbed:a0,a_inf,c``."""
    name, args = _split_preset(text)
    if name == "const" and len(args) == 1:
        return constant_exponent(spec, args[0])
    if name == "log-perturbed" and len(args) == 3:
        return log_perturbed(spec, *args)
    raise ValueError(f"cannot parse exponent preset {text!r}")


@dataclass(frozen=True, eq=False)
class Weight:
    values: SampledFunction
    gamma: float | None = None
    label: str = ""

    def __post_init__(self):
        v = self.values.values
        if np.iscomplexobj(v) or np.any(v < 0):
            raise ValueError("weights must be real and nonnegative")
        if np.any(v == 0):
            log.warning("weight %s vanishes at some grid points", self.label)

    @property
    def spec(self) -> GridSpec:
        return self.values.spec

    @property
    def array(self) -> np.ndarray:
        return self.values.values

    @property
    def is_unit(self) -> bool:
        return bool(np.all(self.array == 1.0))

    def inverse(self) -> "Weight":
        g = None if self.gamma is None else -self.gamma
        return Weight(self.values.with_values(1.0 / self.array), g, f"1/({self.label})")

    def power(self, e) -> "Weight":
        """Pointwise ``w^e`` with ``e`` a scalar or an exponent."""
        ev = e.values if isinstance(e, ExponentFunction) else e
        return Weight(self.values.with_values(self.array**ev), None, f"({self.label})^e")

    def scaled(self, c: float) -> "Weight":
        return Weight(self.values.with_values(c * self.array), self.gamma, f"{c:g}*{self.label}")


def unit_weight(spec: GridSpec) -> Weight:
    return Weight(SampledFunction(spec, np.ones(spec.shape), "one"), 0.0, "one")


def power_weight(spec: GridSpec, gamma: float) -> Weight:
    v = spec.radius ** float(gamma)
    return Weight(SampledFunction(spec, v, f"|x|^{gamma:g}"), float(gamma), f"power:{gamma:g}")


def parse_weight(spec: GridSpec, text: str) -> Weight:
    """Parse ``one``, ``const:c`` or ``power:gamma``."""
    name, args = _split_preset(text)
    if name in ("one", "unit"):
        return unit_weight(spec)
    if name == "const" and len(args) == 1:
        if args[0] <= 0:
            raise ValueError("constant weight must be positive")
        return Weight(
            SampledFunction(spec, np.full(spec.shape, args[0])), 0.0, f"const:{args[0]:g}"
        )
    if name == "power" and len(args) == 1:
        return power_weight(spec, args[0])
    raise ValueError(f"cannot parse weight preset {text!r}")


def conjugate_exponent(q: ExponentFunction) -> ExponentFunction:
    """Pointwise ``q' = q / (q - 1)``."""
    if q.q_minus <= 1:
        raise ValueError(f"conjugate exponent needs q^- > 1, got {q.q_minus}")

    def conj(v):
        return v / (v - 1.0)

    func = None if q.func is None else (lambda *x: conj(np.asarray(q.func(*x), dtype=float)))
    return ExponentFunction(
        q.spec,
        conj(q.values),
        conj(q.value_at_origin),
        conj(q.value_at_infinity),
        f"({q.label})'",
        func,
    )


@dataclass(frozen=True)
class LogHolderConstants:
    C_local: float
    C_origin: float
    C_infinity: float

    def as_dict(self) -> dict:
        return {"C_local": self.C_local, "C_origin": self.C_origin, "C_infinity": self.C_infinity}


def _lag_vectors(spec: GridSpec, max_dist: float) -> list[tuple[int, ...]]:
    h = spec.step
    m = int(np.ceil(max_dist / h))
    if spec.dimension == 1:
        return [(d,) for d in range(1, m + 1) if d * h < max_dist]
    lags = []
    for a in range(0, m + 1):
        for b in range(-m, m + 1):
            if a == 0 and b <= 0:
                continue
            if np.hypot(a, b) * h < max_dist:
                lags.append((a, b))
    return lags


def _shift_pairs(values: np.ndarray, lag: tuple[int, ...]):
    """Aligned views (v(x), v(x + lag)) over the overlap of the grid."""
    src, dst = [], []
    for axis, d in enumerate(lag):
        n = values.shape[axis]
        if d >= 0:
            src.append(slice(0, n - d))
            dst.append(slice(d, None))
        else:
            src.append(slice(-d, None))
            dst.append(slice(0, n + d))
    return values[tuple(src)], values[tuple(dst)]


def log_holder_diagnostics(a: ExponentFunction) -> LogHolderConstants:
    """Smallest constants that make the three log-Hoelder bounds hold on the grid."""
    spec = a.spec
    v = a.values
    h = spec.step
    c_local = 0.0
    for lag in _lag_vectors(spec, 0.5):
        dist = float(np.linalg.norm(lag)) * h
        x, y = _shift_pairs(v, lag)
        if x.size:
            c_local = max(c_local, float(np.abs(x - y).max()) * np.log(np.e + 1.0 / dist))
    r = spec.radius
    c_origin = float(np.max(np.abs(v - a.value_at_origin) * np.log(np.e + 1.0 / r)))
    c_inf = float(np.max(np.abs(v - a.value_at_infinity) * np.log(np.e + r)))
    return LogHolderConstants(c_local, c_origin, c_inf)
