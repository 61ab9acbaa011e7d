"""Triebel-Lizorkin type norms over the grand Herz-Morrey scale and their equivalents."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np

from .grid import SampledFunction
from .herz import HerzParams, herz_norm
from .littlewood_paley import (
    FilterBank,
    PeetreParams,
    convolve_levels,
    kernel_peetre,
    kernel_t,
    peetre_maximal,
)
from .report import ConstantReport
from .spectral import apply_multiplier, linear_convolve

__all__ = [
    "TLParams",
    "NormComparison",
    "default_t_grid",
    "t_weights",
    "tl_integrand",
    "tl_norm",
    "tl_norm_admissible",
    "tl_norm_peetre",
    "kernel_norms",
    "kernel_integrands",
    "equivalence_experiment",
    "KERNEL_NORMS",
]

log = logging.getLogger(__name__)

KERNEL_NORMS = ("norm1", "norm2", "norm3", "norm4", "norm5")


def default_t_grid(j_max: int, per_octave: int = 4) -> np.ndarray:
    """``t = 2^{-j - i/per_octave}`` for j = 0..j_max, i = 0..per_octave-1 (decreasing from 1)."""
    e = np.arange((j_max + 1) * per_octave) / per_octave
    return 2.0**-e


def t_weights(t_grid: np.ndarray) -> np.ndarray:
    """Trapezoid weights for ``int f(t) dt/t`` in the variable ``ln t``."""
    u = np.log(np.asarray(t_grid, dtype=float))
    if u.size < 2:
        return np.ones_like(u)
    du = np.abs(np.diff(u))
    w = np.zeros_like(u)
    w[:-1] += du / 2
    w[1:] += du / 2
    return w


def _per_octave(t_grid: np.ndarray) -> float:
    u = np.abs(np.diff(np.log2(t_grid)))
    return float(1.0 / u.max()) if u.size else 0.0


@dataclass(frozen=True, eq=False)
class TLParams:
    herz: HerzParams
    s: float
    beta: float
    bank: FilterBank
    peetre: PeetreParams = field(default_factory=PeetreParams)
    t_grid: np.ndarray | None = None

    def __post_init__(self):
        if not math.isfinite(self.s):
            raise ValueError("s must be finite")
        if not self.beta > 0:
            raise ValueError("beta must be positive")
        if self.bank.spec != self.herz.spec:
            raise ValueError("bank and Herz parameters live on different grids")
        tg = default_t_grid(self.bank.j_max) if self.t_grid is None else np.asarray(self.t_grid, dtype=float)
        if np.any(tg <= 0) or np.any(tg > 1):
            raise ValueError("t_grid must lie in (0, 1]")
        object.__setattr__(self, "t_grid", tg)

    @property
    def spec(self):
        return self.herz.spec

    def with_(self, **changes) -> "TLParams":
        return replace(self, **changes)

    def peetre_hypothesis(self) -> dict:
        """``a t > n`` with ``t < min(q^-, beta)``."""
        n = self.spec.dimension
        t = self.peetre.t_integrability
        ok_t = t < min(self.herz.q.q_minus, self.beta)
        ok_at = self.peetre.a * t > n
        return {"a_t_gt_n": ok_at, "t_below_min": ok_t, "ok": ok_at and ok_t}


def _combine(level_abs: Sequence[np.ndarray], factors: np.ndarray, beta: float) -> np.ndarray:
    """``(sum_j c_j^beta |g_j|^beta)^{1/beta}`` pointwise, or ``max_j c_j |g_j|`` for beta = inf.

    Computed after scaling by the pointwise maximum so large ``2^{js}`` and
    ``beta`` stay in range.
    """
    scaled = [c * g for c, g in zip(factors, level_abs)]
    top = np.max(np.stack(scaled), axis=0)
    if np.isinf(beta):
        return top
    safe = np.where(top > 0, top, 1.0)
    acc = np.zeros_like(top)
    for g in scaled:
        acc += (g / safe) ** beta
    return np.where(top > 0, safe * acc ** (1.0 / beta), 0.0)


def tl_integrand(f, params: TLParams, bank: FilterBank | None = None) -> np.ndarray:
    """``(sum_j 2^{j s beta} |phi_j * f|^beta)^{1/beta}`` on the grid."""
    bank = params.bank if bank is None else bank
    conv = np.abs(convolve_levels(f, bank))
    factors = 2.0 ** (np.arange(len(bank)) * params.s)
    return _combine(list(conv), factors, params.beta)


def tl_norm(f, params: TLParams) -> float:
    if params.bank.kind != "resolution_of_unity":
        raise ValueError("tl_norm needs a resolution of unity")
    return herz_norm(tl_integrand(f, params), params.herz)


def tl_norm_admissible(f, params: TLParams) -> float:
    """Same expression with an admissible pair; level 0 is the low-pass ``Phi``."""
    if params.bank.kind != "admissible_pair":
        raise ValueError("tl_norm_admissible needs an admissible pair")
    return herz_norm(tl_integrand(f, params), params.herz)


def peetre_integrand(f, params: TLParams) -> np.ndarray:
    bank = params.bank
    a = params.peetre.a
    levels = [peetre_maximal(f, bank, j, a).values for j in range(len(bank))]
    factors = 2.0 ** (np.arange(len(bank)) * params.s)
    return _combine(levels, factors, params.beta)


def tl_norm_peetre(f, params: TLParams, with_flags: bool = False):
    """Norm with the Peetre maximal functions ``phi*_j^a f`` in place of ``|phi_j * f|``.

    A violated ``a t > n`` hypothesis is reported in the flags (callers decide
    whether to warn), and the norm is still computed.
    """
    hyp = params.peetre_hypothesis()
    if not hyp["ok"]:
        log.debug("Peetre hypothesis fails: a=%g, t=%g", params.peetre.a, params.peetre.t_integrability)
    value = herz_norm(peetre_integrand(f, params), params.herz)
    flags = {"hypothesis_violated": not hyp["ok"], **hyp}
    return (value, flags) if with_flags else value


# ---------------------------------------------------------------- kernel norms


def _local_mean_kernel(spec, t: float):
    """Lag weights ``|cell(d) ∩ B(0, t)|`` (cells partially inside weighted by overlap)."""
    h, n = spec.step, spec.dimension
    if n == 1:

        def k(d):
            c = np.asarray(d, dtype=float) * h
            return np.clip(np.minimum(c + h / 2, t) - np.maximum(c - h / 2, -t), 0.0, None)

        return k
    sub = (np.arange(8) + 0.5) / 8 - 0.5

    def k2(a, b):
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        out = np.zeros(a.shape)
        near = np.hypot(np.abs(a) - 1, np.abs(b) - 1) * h < t  # only cells that can touch the disc
        aa, bb = a[near], b[near]
        frac = np.zeros(aa.shape)
        for u in sub:
            for v in sub:
                frac += np.hypot((aa + u) * h, (bb + v) * h) < t
        out[near] = frac / sub.size**2 * h * h
        return out

    return k2


def kernel_integrands(f, params: TLParams) -> dict:
    """Pointwise integrands of the five kernel norms (low-pass terms kept separate)."""
    fam = params.bank
    if fam.kind != "kernel_family":
        raise ValueError("kernel norms need a kernel family")
    spec = fam.spec
    n = spec.dimension
    s, beta, a = params.s, params.beta, params.peetre.a
    tg = params.t_grid
    wt = t_weights(tg)

    low = np.abs(apply_multiplier(f, fam.levels[0]))
    low_peetre = kernel_peetre(f, fam, j=0, a=a).values

    conv_t, peet_t, local_t = [], [], []
    for t in tg:
        g = np.abs(apply_multiplier(f, kernel_t(fam, t)))
        conv_t.append(g)
        peet_t.append(kernel_peetre(f, fam, a=a, t=t).values)
        gb = g if np.isinf(beta) else g**beta
        loc = linear_convolve(spec, gb, _local_mean_kernel(spec, t)) / t**n
        loc = np.maximum(loc, 0.0)
        local_t.append(loc if np.isinf(beta) else loc ** (1.0 / beta))

    def t_integral(levels):
        if np.isinf(beta):
            return np.max(np.stack([t**-s * g for t, g in zip(tg, levels)]), axis=0)
        return _combine(levels, (wt ** (1.0 / beta)) * tg**-s, beta)

    # level 0 of the discrete sums is the low-pass kernel k_0
    disc_conv = [low] + [np.abs(apply_multiplier(f, fam.levels[j])) for j in range(1, len(fam))]
    disc_peet = [low_peetre] + [kernel_peetre(f, fam, j=j, a=a).values for j in range(1, len(fam))]
    factors = 2.0 ** (np.arange(len(fam)) * s)
    return {
        "low": low,
        "low_peetre": low_peetre,
        "cont1": t_integral(conv_t),
        "cont2": t_integral(peet_t),
        "cont3": t_integral(local_t),
        "disc4": _combine(disc_peet, factors, beta),
        "disc5": _combine(disc_conv, factors, beta),
    }


@dataclass
class NormComparison:
    names: list
    values: dict
    pairwise_ratios: np.ndarray
    flags: dict = field(default_factory=dict)
    corpus_worst: dict = field(default_factory=dict)

    def table(self) -> str:
        lines = [f"{'norm':<16}{'value':>24}"]
        for k in self.names:
            lines.append(f"{k:<16}{self.values[k]:>24.16g}")
        if len(self.names) > 1:
            lines.append("")
            lines.append("ratios (row / column)")
            lines.append(" " * 16 + "".join(f"{k:>12}" for k in self.names))
            for i, k in enumerate(self.names):
                lines.append(f"{k:<16}" + "".join(f"{v:>12.5g}" for v in self.pairwise_ratios[i]))
        for k, v in sorted(self.flags.items()):
            lines.append(f"# {k} = {v}")
        return "\n".join(lines)

    def as_dict(self) -> dict:
        return {
            "names": self.names,
            "values": self.values,
            "pairwise_ratios": self.pairwise_ratios.tolist(),
            "flags": self.flags,
            "corpus_worst": self.corpus_worst,
        }


def _ratio_matrix(vals: Sequence[float]) -> np.ndarray:
    v = np.asarray(vals, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(v[None, :] > 0, v[:, None] / np.where(v[None, :] > 0, v[None, :], 1.0), np.nan)


def kernel_norms(f, params: TLParams, tol: float = 1e-12) -> NormComparison:
    """All five kernel characterisations, their ratios and the hypothesis/ordering flags.

    Ordering checks compare integrands pointwise before the outer norm:
    ``cont2 >= cont1``, ``disc4 >= disc5`` and ``low_peetre >= low``.
    """
    fam = params.bank
    I = kernel_integrands(f, params)
    H = params.herz
    low = herz_norm(I["low"], H)
    low_p = herz_norm(I["low_peetre"], H)
    values = {
        "norm1": low + herz_norm(I["cont1"], H),
        "norm2": low_p + herz_norm(I["cont2"], H),
        "norm3": low + herz_norm(I["cont3"], H),
        "norm4": herz_norm(I["disc4"], H),
        "norm5": herz_norm(I["disc5"], H),
    }

    def dominates(big, small):
        scale = max(float(np.max(small)), 1e-300)
        return bool(np.all(big - small >= -tol * scale))

    n = fam.spec.dimension
    S = fam.meta.get("S", -1)
    hyp = params.peetre_hypothesis()
    flags = {
        "order_2_ge_1": dominates(I["cont2"], I["cont1"]) and dominates(I["low_peetre"], I["low"]),
        "order_4_ge_5": dominates(I["disc4"], I["disc5"]),
        "s_lt_S_plus_1": params.s < S + 1,
        "a_r_gt_n": params.peetre.a * params.peetre.t_integrability > n,
        "peetre_hypothesis_ok": hyp["ok"],
        "t_grid_per_octave_ok": _per_octave(params.t_grid) >= 4 - 1e-9,
        "k0_peetre_reading": "peetre of k0*f at scale 1",
        "kernel_peetre_weight": "(1+2^j|y|)^-a for levels, (1+|y|/t)^-a for continuous t",
    }
    names = list(KERNEL_NORMS)
    return NormComparison(names, values, _ratio_matrix([values[k] for k in names]), flags)


def equivalence_experiment(
    corpus: Sequence[SampledFunction],
    norm_pair: tuple[Callable, Callable],
    name: str = "equivalence",
    meta: dict | None = None,
) -> ConstantReport:
    """Ratios ``A(f) / B(f)`` over the corpus; the spread is the empirical equivalence constant.

    Members where either norm vanishes are recorded with flag ``zero`` and
    excluded from the statistics.
    """
    if len(corpus) == 0:
        raise ValueError("empty corpus")
    A, B = norm_pair
    rep = ConstantReport(name, meta=dict(meta or {}))
    for i, f in enumerate(corpus):
        a, b = float(A(f)), float(B(f))
        if a <= 0 or b <= 0:
            rep.add(f.label or f"f{i}", a, 0.0, flag="zero")
        else:
            rep.add(f.label or f"f{i}", a, b)
    return rep
