"""Dyadic filter banks, the Calderon reproducing formula and Peetre maximal functions.

Every bank stores spectral samples ``m_j(xi)`` on the grid's frequency lattice,
one array per level, with the convention ``phi_j * f = F^-1[m_j F f]``.  Level 0
is the low-pass element (phi_0, Phi, Psi or k_0); level ``j >= 1`` is the
``2^j``-dilated band-pass element.
"""

from __future__ import annotations

import base64
import json
import math
from dataclasses import dataclass, field

import numpy as np

from ._peetre import peetre_sup
from .grid import GridSpec, SampledFunction
from .operators import maximal_t
from .report import ConstantReport
from .spectral import _phase, apply_multiplier, linear_convolve, spatial_kernel

__all__ = [
    "FilterBank",
    "PeetreParams",
    "CalderonResult",
    "smooth_step",
    "resolved_jmax",
    "build_resolution_of_unity",
    "build_admissible_pair",
    "build_admissible_dual",
    "build_kernel_family",
    "kernel_hat",
    "convolve_levels",
    "calderon_reconstruct",
    "calderon_sampled",
    "peetre_maximal",
    "kernel_peetre",
    "eta_convolve",
    "eta_majorization_check",
    "kernel_moments",
]

KINDS = ("resolution_of_unity", "admissible_pair", "admissible_dual", "kernel_family")


def smooth_step(s: np.ndarray) -> np.ndarray:
    """C-infinity step: 0 for s <= 0, 1 for s >= 1, ``e^{-1/s} / (e^{-1/s} + e^{-1/(1-s)})`` between."""
    s = np.asarray(s, dtype=float)
    out = np.where(s >= 1.0, 1.0, 0.0)
    mid = (s > 0) & (s < 1)
    if np.any(mid):
        t = s[mid]
        a = np.exp(-1.0 / t)
        b = np.exp(-1.0 / (1.0 - t))
        out[mid] = a / (a + b)
    return out


def resolved_jmax(spec: GridSpec) -> int:
    """``ceil(log2(xi_Nyquist)) - 1``; the levels' partition is exact for ``|xi| <= 2^jmax``."""
    return int(math.ceil(math.log2(spec.nyquist))) - 1


@dataclass(frozen=True, eq=False)
class FilterBank:
    kind: str
    spec: GridSpec
    levels: np.ndarray  # (j_max + 1, *spec.shape)
    j_max: int
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown bank kind {self.kind!r}")
        lv = np.asarray(self.levels)
        if lv.shape != (self.j_max + 1, *self.spec.shape):
            raise ValueError("levels do not match the grid and j_max")
        lv = lv.copy()
        lv.setflags(write=False)
        object.__setattr__(self, "levels", lv)

    def __len__(self):
        return self.j_max + 1

    def __getitem__(self, j: int) -> np.ndarray:
        return self.levels[j]

    def band(self) -> np.ndarray:
        """Frequencies where the bank's identities are claimed (``|xi| <= band_limit``)."""
        return self.spec.freq_radius <= self.meta.get("band_limit", self.spec.nyquist / 2)

    def to_json(self) -> str:
        """Spectral samples as JSON; float64 bytes are base64-encoded so the round trip is bit-exact."""
        lv = np.ascontiguousarray(self.levels)
        payload = {
            "kind": self.kind,
            "spec": {
                "dimension": self.spec.dimension,
                "halfwidth_log2": self.spec.halfwidth_log2,
                "samples_per_axis": self.spec.samples_per_axis,
                "k_min": self.spec.k_min,
                "k_max": self.spec.k_max,
            },
            "j_max": self.j_max,
            "dtype": lv.dtype.str,
            "shape": list(lv.shape),
            "data": base64.b64encode(lv.tobytes()).decode("ascii"),
            "meta": self.meta,
        }
        return json.dumps(payload, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "FilterBank":
        d = json.loads(text)
        spec = GridSpec(**d["spec"])
        lv = np.frombuffer(base64.b64decode(d["data"]), dtype=np.dtype(d["dtype"])).reshape(d["shape"])
        return cls(d["kind"], spec, lv, int(d["j_max"]), d.get("meta", {}))


@dataclass(frozen=True)
class PeetreParams:
    a: float = 4.0
    t_integrability: float = 0.5
    m: float = 2.0

    def __post_init__(self):
        if not self.a > 0:
            raise ValueError("a must be positive")
        if not self.t_integrability > 0:
            raise ValueError("t must be positive")

    def hypothesis_ok(self, n: int) -> bool:
        return self.a * self.t_integrability > n


def _check_levels(spec: GridSpec) -> int:
    j_max = resolved_jmax(spec)
    if j_max < 3:
        raise ValueError(f"grid too coarse: j_max = {j_max} < 3")
    return j_max


def build_resolution_of_unity(spec: GridSpec, transition=(1.0, 2.0)) -> FilterBank:
    """``phi_0`` is 1 below ``transition[0]`` and 0 above ``transition[1]``; ``phi_j = phi_0(2^-j .) - phi_0(2^{1-j} .)``.

    The default transition gives the classical bump on ``[1, 2]``; another
    transition inside ``[1, 2]`` gives a second, distinct resolution of unity.
    """
    lo, hi = transition
    if not 1.0 <= lo < hi <= 2.0:
        raise ValueError("transition must lie inside [1, 2]")
    j_max = _check_levels(spec)
    r = spec.freq_radius

    def low(scale):
        return 1.0 - smooth_step((r / scale - lo) / (hi - lo))

    levels = [low(1.0)]
    prev = levels[0]
    for j in range(1, j_max + 1):
        cur = low(2.0**j)
        levels.append(cur - prev)
        prev = cur
    meta = {"transition": [lo, hi], "band_limit": float(2.0**j_max * lo)}
    return FilterBank("resolution_of_unity", spec, np.stack(levels), j_max, meta)


def _bump(u: np.ndarray) -> np.ndarray:
    """``exp(1 - 1/(1 - u^2))`` on ``|u| < 1``, 0 elsewhere; equals 1 at u = 0."""
    out = np.zeros_like(u, dtype=float)
    m = np.abs(u) < 1
    out[m] = np.exp(1.0 - 1.0 / (1.0 - u[m] ** 2))
    return out


def _phi_hat(r: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore"):
        u = np.where(r > 0, np.log2(np.where(r > 0, r, 1.0)), -np.inf)
    return _bump(u)


def _Phi_hat(r: np.ndarray) -> np.ndarray:
    return _bump(r / 2.0)


def build_admissible_pair(spec: GridSpec) -> FilterBank:
    """Band-pass ``phi^`` supported in ``1/2 <= |xi| <= 2`` and low-pass ``Phi^`` in ``|xi| <= 2``.

    Both are real, radial and even, so ``phi~ = phi``.  Lower bounds on the
    admissibility sets are measured on the lattice and stored in ``meta``.
    """
    j_max = _check_levels(spec)
    r = spec.freq_radius
    levels = [_Phi_hat(r)] + [_phi_hat(r / 2.0**v) for v in range(1, j_max + 1)]
    # lower bounds over the continuous admissibility sets (profiles are radial and monotone there)
    c_phi = float(min(_phi_hat(np.array([3 / 5, 5 / 3]))))
    c_Phi = float(_Phi_hat(np.array([5 / 3]))[0])
    meta = {
        "c_phi": c_phi,
        "c_Phi": c_Phi,
        "c": min(c_phi, c_Phi),
        "phi_support": [0.5, 2.0],
        "Phi_support": [0.0, 2.0],
        "band_limit": float(spec.nyquist / 2),
    }
    return FilterBank("admissible_pair", spec, np.stack(levels), j_max, meta)


def build_admissible_dual(pair: FilterBank, floor: float | None = None) -> FilterBank:
    """Duals making ``conj(Phi^) Psi^ + sum_v conj(phi^_v) psi^_v = 1`` on the band.

    ``G = |Phi^|^2 + sum_v |phi^(2^-v .)|^2`` and each level is divided by ``G``:
    ``Psi^ = Phi^ / G``, ``psi^_v = phi^(2^-v .) / G``.  Outside the band (where
    ``G`` may vanish) the duals are set to 0 and the identity is not claimed.
    """
    if pair.kind != "admissible_pair":
        raise ValueError("dual needs an admissible pair")
    lv = pair.levels
    G = np.sum(np.abs(lv) ** 2, axis=0)
    band = pair.band()
    c = pair.meta.get("c", 0.0)
    floor = 0.5 * c**2 if floor is None else floor
    g_min = float(G[band].min())
    if not g_min >= floor or g_min <= 0:
        raise ValueError(f"G not bounded below on the band (min {g_min:.3g} < {floor:.3g})")
    keep = G >= floor
    duals = np.where(keep, lv / np.where(keep, G, 1.0), 0.0)
    meta = dict(pair.meta, G_min=g_min, G_floor=floor)
    return FilterBank("admissible_dual", pair.spec, duals, pair.j_max, meta)


def convolve_levels(f, bank: FilterBank, conj: bool = False) -> np.ndarray:
    """``phi_j * f`` for all levels, shape ``(j_max + 1, *shape)``."""
    v = f.values if isinstance(f, SampledFunction) else np.asarray(f)
    F = np.fft.fftn(v)
    lv = np.conj(bank.levels) if conj else bank.levels
    axes = tuple(range(1, v.ndim + 1))
    out = np.fft.ifftn(lv * F[None], axes=axes)
    if np.isrealobj(v) and np.isrealobj(bank.levels):
        return out.real
    return out


@dataclass
class CalderonResult:
    reconstruction: SampledFunction
    rel_error: float
    spillover: float  # fraction of spectral energy outside the band


def _spillover(F: np.ndarray, band: np.ndarray) -> float:
    tot = float(np.sum(np.abs(F) ** 2))
    return float(np.sum(np.abs(F[~band]) ** 2) / tot) if tot > 0 else 0.0


def calderon_reconstruct(f: SampledFunction, pair: FilterBank, dual: FilterBank) -> CalderonResult:
    """``Phi~ * Psi * f + sum_k phi~_k * psi_k * f`` evaluated spectrally."""
    F = np.fft.fftn(f.values)
    mult = np.sum(np.conj(pair.levels) * dual.levels, axis=0)
    v = np.fft.ifftn(F * mult)
    if np.isrealobj(f.values):
        v = v.real
    rec = f.with_values(v, label=f"calderon[{f.label}]")
    den = np.linalg.norm(f.values)
    err = float(np.linalg.norm(v - f.values) / den) if den > 0 else float(np.linalg.norm(v))
    return CalderonResult(rec, err, _spillover(F, pair.band()))


def calderon_sampled(f: SampledFunction, pair: FilterBank, dual: FilterBank) -> CalderonResult:
    """Reconstruction from sampled coefficients ``phi~_k * f(2^-k m)`` (low-pass sampled at the integers).

    The coefficient grid ``2^-k Z^n`` sits on cell edges, so each convolution is
    first moved by half a cell (exactly, for band-limited data).  Levels finer
    than the grid are sampled at every edge.
    """
    spec = f.spec
    h, n = spec.step, spec.dimension
    F = np.fft.fftn(f.values)
    to_edges = _phase(spec, 0.5 * h)
    back = _phase(spec, -0.5 * h)
    total = np.zeros(spec.shape, dtype=complex)
    for k in range(len(pair)):
        spacing = max(1.0 if k == 0 else 2.0**-k, h)
        stride = int(round(spacing / h))
        coef = np.fft.ifftn(F * np.conj(pair.levels[k]) * to_edges)
        # edge e_i = -2^K + (i + 1) h lies on the coefficient lattice iff (i + 1) % stride == 0
        keep = (np.arange(spec.samples_per_axis) + 1) % stride == 0
        sel = keep if n == 1 else np.logical_and.outer(keep, keep)
        sparse = np.where(sel, coef, 0.0) * stride**n
        total += np.fft.ifftn(np.fft.fftn(sparse) * dual.levels[k] * back)
    v = total.real if np.isrealobj(f.values) else total
    rec = f.with_values(v, label=f"calderon_sampled[{f.label}]")
    den = np.linalg.norm(f.values)
    err = float(np.linalg.norm(v - f.values) / den) if den > 0 else float(np.linalg.norm(v))
    return CalderonResult(rec, err, _spillover(F, pair.band()))


def peetre_maximal(f, bank: FilterBank, j: int, a: float) -> SampledFunction:
    """``sup_y |phi_j * f(y)| (1 + 2^j |x - y|)^-a`` over grid points ``y``."""
    if not a > 0:
        raise ValueError("a must be positive")
    spec = bank.spec
    g = np.abs(apply_multiplier(f, bank.levels[j]))
    out = peetre_sup(g, spec.step, 2.0**j, a)
    return SampledFunction(spec, out, f"peetre[{j}]")


def kernel_hat(r: np.ndarray, m0: int, epsilon: float) -> np.ndarray:
    """``|xi/eps|^{2 m0} exp(1 - |xi/eps|^2)``."""
    u2 = (np.asarray(r, dtype=float) / epsilon) ** 2
    return u2**m0 * np.exp(1.0 - u2)


def _kernel0_hat(r: np.ndarray, epsilon: float) -> np.ndarray:
    return np.exp(-((np.asarray(r, dtype=float) / epsilon) ** 2))


def build_kernel_family(spec: GridSpec, S: int = 1, epsilon: float = 0.5) -> FilterBank:
    """``k_0`` (level 0) and ``k_j = k_{2^-j}`` (levels 1..j_max) with moments vanishing to order S."""
    if S < -1:
        raise ValueError("S must be at least -1")
    j_max = _check_levels(spec)
    if not 0 < epsilon <= spec.nyquist / 8:
        raise ValueError(f"epsilon {epsilon} too close to the Nyquist frequency")
    m0 = max(0, math.ceil((S + 1) / 2))
    r = spec.freq_radius
    levels = [_kernel0_hat(r, epsilon)] + [kernel_hat(r / 2.0**j, m0, epsilon) for j in range(1, j_max + 1)]
    meta = {"S": S, "epsilon": epsilon, "m0": m0, "band_limit": float(spec.nyquist / 2)}
    return FilterBank("kernel_family", spec, np.stack(levels), j_max, meta)


def kernel_t(family: FilterBank, t: float) -> np.ndarray:
    """Multiplier of ``k_t = t^-n k(./t)``, i.e. ``k^(t xi)``."""
    return kernel_hat(t * family.spec.freq_radius, family.meta["m0"], family.meta["epsilon"])


def kernel_moments(family: FilterBank, order: int, level: int = 1) -> np.ndarray:
    """``int x^a k_level(x) dx`` for a = 0..order (1-D quadrature on the sampled kernel)."""
    spec = family.spec
    if spec.dimension != 1:
        raise ValueError("moment quadrature is provided in 1-D")
    k = spatial_kernel(spec, family.levels[level]).real
    x = spec.axis
    return np.array([np.sum(x**a * k) * spec.step for a in range(order + 1)])


def kernel_peetre(f, family: FilterBank, j: int | None = None, a: float = 4.0, t: float | None = None) -> SampledFunction:
    """``sup_y |k_j * f(x + y)| / (1 + 2^j |y|)^a`` (or ``(1 + |y|/t)^a`` with ``k_t`` for continuous t)."""
    if not a > 0:
        raise ValueError("a must be positive")
    spec = family.spec
    if t is not None:
        mult, scale = kernel_t(family, t), 1.0 / t
    else:
        mult, scale = family.levels[j], 2.0**j
    g = np.abs(apply_multiplier(f, mult))
    return SampledFunction(spec, peetre_sup(g, spec.step, scale, a), f"kpeetre[{j if t is None else t}]")


def eta_convolve(g, N: float, m: float, r: float) -> np.ndarray:
    """``(eta_{N,m} * |g|^r)^{1/r}`` with ``eta_{N,m} = N^n (1 + N|x|)^-m`` (linear convolution)."""
    spec = g.spec if isinstance(g, SampledFunction) else None
    if spec is None:
        raise TypeError("eta_convolve needs a SampledFunction")
    h, n = spec.step, spec.dimension

    def kern(*d):
        rr = np.sqrt(sum(np.asarray(x, dtype=float) ** 2 for x in d)) * h
        return N**n * (1.0 + N * rr) ** (-m) * h**n

    out = linear_convolve(spec, g.abs**r, kern)
    return np.maximum(out, 0.0) ** (1.0 / r)


def eta_majorization_check(
    f: SampledFunction,
    bank: FilterBank,
    j: int,
    r: float,
    m: float,
    j_outer: int | None = None,
    report: ConstantReport | None = None,
    floor: float = 1e-10,
) -> ConstantReport:
    """Largest ``|theta_R * omega_N * f| / (max(1, (N/R)^m) (eta_{N,m} * |omega_N * f|^r)^{1/r})``.

    ``omega = theta = phi`` from ``bank`` at levels ``j`` (N = 2^j) and
    ``j_outer`` (R = 2^j_outer, default j).  Points where the right side falls
    below ``floor`` times its maximum are ignored.
    """
    if not m > bank.spec.dimension:
        raise ValueError("m must exceed the dimension")
    if not r > 0:
        raise ValueError("r must be positive")
    jo = j if j_outer is None else j_outer
    N, R = 2.0**j, 2.0**jo
    inner = f.with_values(apply_multiplier(f, bank.levels[j]))
    lhs = np.abs(apply_multiplier(inner, bank.levels[jo]))
    rhs = max(1.0, (N / R) ** m) * eta_convolve(inner, N, m, r)
    report = report or ConstantReport("eta_majorization", meta={"r": r, "m": m})
    top = float(rhs.max()) if rhs.size else 0.0
    label = f"{f.label}|j={j},j'={jo}"
    if top <= 0:
        report.add(label, 0.0, 0.0, flag="zero")
        return report
    keep = rhs > floor * top
    ratio = np.where(keep, lhs / np.where(keep, rhs, 1.0), 0.0)
    i = int(np.argmax(ratio))
    report.add(label, float(lhs.ravel()[i]), float(rhs.ravel()[i]))
    return report


def eta_vs_maximal(f: SampledFunction, bank: FilterBank, j: int, r: float, m: float, floor: float = 1e-10) -> float:
    """Largest ``(eta_{N,m} * |omega_N f|^r)^{1/r} / M_r(omega_N f)`` on the grid."""
    inner = f.with_values(apply_multiplier(f, bank.levels[j]))
    eta = eta_convolve(inner, 2.0**j, m, r)
    mr = maximal_t(inner, r).values
    keep = mr > floor * mr.max() if mr.max() > 0 else np.zeros_like(mr, dtype=bool)
    return float(np.max(eta[keep] / mr[keep])) if keep.any() else 0.0
