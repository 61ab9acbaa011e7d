"""Muckenhoupt-type weight constants and decay exponents over finite ball families."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .exponents import ExponentFunction, Weight, conjugate_exponent
from .grid import GridSpec
from .lebesgue import luxemburg_rows

__all__ = [
    "BallFamily",
    "WeightClassReport",
    "DeltaFit",
    "default_ball_family",
    "nested_ball_family",
    "muckenhoupt_constant",
    "estimate_delta_exponents",
    "check_index_hypotheses",
]

log = logging.getLogger(__name__)

MAX_FIT_CONSTANT = 10.0
N_WITNESSES = 5


@dataclass(frozen=True)
class BallFamily:
    centers: np.ndarray  # (m, n)
    radii: np.ndarray

    def __post_init__(self):
        c = np.atleast_2d(np.asarray(self.centers, dtype=float))
        r = np.asarray(self.radii, dtype=float).ravel()
        if c.size == 0 or r.size == 0:
            raise ValueError("ball family must be nonempty")
        if np.any(r <= 0):
            raise ValueError("radii must be positive")
        object.__setattr__(self, "centers", c)
        object.__setattr__(self, "radii", r)

    def balls(self):
        for c in self.centers:
            for r in self.radii:
                yield c, r

    def __len__(self):
        return len(self.centers) * len(self.radii)

    def describe(self) -> dict:
        return {
            "n_centers": int(len(self.centers)),
            "radii": [float(r) for r in self.radii],
        }


def default_ball_family(spec: GridSpec, stride: int = 64) -> BallFamily:
    """Centres on every ``stride``-th grid point plus the origin; radii ``2^j h`` up to ``2^K``."""
    ax = spec.axis[stride // 2 :: stride]
    if spec.dimension == 1:
        centers = np.concatenate([[0.0], ax])[:, None]
    else:
        a, b = np.meshgrid(ax, ax, indexing="ij")
        centers = np.concatenate([[[0.0, 0.0]], np.stack([a.ravel(), b.ravel()], 1)])
    h = spec.step
    j_top = spec.halfwidth_log2 - int(round(np.log2(h)))
    radii = h * 2.0 ** np.arange(2, j_top + 1)
    return BallFamily(centers, radii)


def _ball_members(spec: GridSpec, center, radius) -> np.ndarray:
    """Flat indices of grid points with |x - c| <= r."""
    if spec.dimension == 1:
        ax = spec.axis
        lo = np.searchsorted(ax, center[0] - radius, side="left")
        hi = np.searchsorted(ax, center[0] + radius, side="right")
        return np.arange(lo, hi)
    x, y = spec.coords
    ax = spec.axis
    lo0 = np.searchsorted(ax, center[0] - radius, side="left")
    hi0 = np.searchsorted(ax, center[0] + radius, side="right")
    lo1 = np.searchsorted(ax, center[1] - radius, side="left")
    hi1 = np.searchsorted(ax, center[1] + radius, side="right")
    ii, jj = np.meshgrid(np.arange(lo0, hi0), np.arange(lo1, hi1), indexing="ij")
    inside = np.hypot(ax[ii] - center[0], ax[jj] - center[1]) <= radius
    return np.ravel_multi_index((ii[inside], jj[inside]), spec.shape)


def _norms_over_sets(values: np.ndarray, exps: np.ndarray, index_sets, vol: float) -> np.ndarray:
    """Luxemburg norms of ``values * chi_S`` for each index set ``S``."""
    v = values.ravel()
    e = exps.ravel()
    idx = np.concatenate(index_sets) if index_sets else np.zeros(0, dtype=int)
    rows = np.repeat(np.arange(len(index_sets)), [len(s) for s in index_sets])
    return luxemburg_rows(v[idx], e[idx], rows, len(index_sets), vol)


@dataclass
class WeightClassReport:
    constant: float
    constant_tilde: float
    witnesses: list = field(default_factory=list)
    delta1: float | None = None
    delta2: float | None = None
    fit_residual: float | None = None
    family: dict = field(default_factory=dict)
    flags: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "constant": self.constant,
            "constant_tilde": self.constant_tilde,
            "witnesses": self.witnesses,
            "delta1": self.delta1,
            "delta2": self.delta2,
            "fit_residual": self.fit_residual,
            "family": self.family,
            "flags": self.flags,
        }


def _class_quantity(spec, w1, e1, w2, e2, family: BallFamily, chunk: int = 4096):
    """(1/|B|) ||w1 chi_B||_{e1} ||w2 chi_B||_{e2} for every ball in the family."""
    vol = spec.cell_volume
    balls = list(family.balls())
    out = np.empty(len(balls))
    for start in range(0, len(balls), chunk):
        part = balls[start : start + chunk]
        sets = [_ball_members(spec, c, r) for c, r in part]
        sizes = np.array([len(s) for s in sets], dtype=float)
        n1 = _norms_over_sets(w1, e1, sets, vol)
        n2 = _norms_over_sets(w2, e2, sets, vol)
        with np.errstate(invalid="ignore", divide="ignore"):
            out[start : start + len(part)] = np.where(sizes > 0, n1 * n2 / (sizes * vol), 0.0)
    return balls, out


def muckenhoupt_constant(
    w: Weight,
    q: ExponentFunction,
    family: BallFamily | None = None,
    with_deltas: bool = False,
) -> WeightClassReport:
    """Largest ball quantity of the A_q(.) and A~_q(.) conditions over ``family``.

    A finite family only bounds the true supremum from below; the family is
    recorded in the report.
    """
    spec = q.spec
    family = default_ball_family(spec) if family is None else family
    if np.any(w.array <= 0):
        raise ValueError("weight must be positive on the grid")
    qc = conjugate_exponent(q)
    wv = w.array
    balls, vals = _class_quantity(spec, wv, q.values, 1.0 / wv, qc.values, family)
    _, vals_t = _class_quantity(
        spec, wv ** (1.0 / q.values), q.values, wv ** (-1.0 / q.values), qc.values, family
    )
    order = np.argsort(-vals, kind="stable")[:N_WITNESSES]
    witnesses = [
        {"center": [float(c) for c in balls[i][0]], "radius": float(balls[i][1]), "value": float(vals[i])}
        for i in order
    ]
    report = WeightClassReport(
        constant=float(vals.max()),
        constant_tilde=float(vals_t.max()),
        witnesses=witnesses,
        family=family.describe(),
    )
    if with_deltas:
        fit = estimate_delta_exponents(w, q)
        report.delta1, report.delta2 = fit.delta1, fit.delta2
        report.fit_residual = max(fit.residual1, fit.residual2)
        report.flags.update(fit.flags)
    return report


def nested_ball_family(spec: GridSpec, n_levels: int = 8) -> BallFamily:
    """Outer balls whose ``2^-n_levels`` shrinks still hold a few cells and stay inside the domain."""
    h = spec.step
    r_min = 4.0 * h * 2.0**n_levels
    radii = [2.0**j for j in range(-30, spec.halfwidth_log2 + 1) if r_min <= 2.0**j <= spec.halfwidth / 2]
    if not radii:
        raise ValueError("grid too coarse for a nested ball family")
    if spec.dimension == 1:
        centers = np.array([[0.0], [1.0], [-3.0]])
    else:
        centers = np.array([[0.0, 0.0], [1.0, 0.0], [-1.0, 2.0]])
    centers = centers[np.max(np.abs(centers), 1) + max(radii) <= spec.halfwidth]
    return BallFamily(centers, np.array(radii))


@dataclass
class DeltaFit:
    delta1: float
    delta2: float
    residual1: float
    residual2: float
    constant1: float
    constant2: float
    flags: dict = field(default_factory=dict)


def _fit_decay(log_rho: np.ndarray, log_ratio: np.ndarray, group: np.ndarray):
    """Common slope of log(rho) against log(|S|/|B|) with one intercept per outer ball."""
    flags = {}
    y = log_rho.copy()
    x = log_ratio.copy()
    for g in np.unique(group):
        m = group == g
        y[m] -= y[m].mean()
        x[m] -= x[m].mean()
    if np.ptp(log_rho) == 0 or np.dot(x, x) == 0:
        flags["degenerate"] = True
        return 1.0, 0.0, 1.0, flags
    slope = float(np.dot(x, y) / np.dot(x, x))
    resid = float(np.sqrt(np.mean((y - slope * x) ** 2)))
    # largest delta <= slope with rho <= C (|S|/|B|)^delta, C <= MAX_FIT_CONSTANT
    bound = float(np.min((np.log(MAX_FIT_CONSTANT) - log_rho) / (-log_ratio)))
    delta = min(slope, bound)
    if delta <= 0:
        flags["nonpositive"] = True
        delta = min(max(delta, 1e-12), 1.0)
    if delta > 1:
        flags["clipped"] = True
        delta = 1.0
    const = float(np.exp(np.max(log_rho - delta * log_ratio)))
    return delta, resid, const, flags


def estimate_delta_exponents(
    w: Weight,
    q: ExponentFunction,
    family: BallFamily | None = None,
    n_levels: int = 8,
) -> DeltaFit:
    """Fit the decay exponents of ``||chi_S|| / ||chi_B||`` for concentric S in B.

    delta1 uses the ``L^q(w)`` norm, delta2 the ``L^q'(w^-1)`` norm; inner balls
    shrink by ``2^-m`` for ``m = 1..n_levels``.
    """
    spec = q.spec
    if family is None:
        # coarse grids cannot hold 2^-8 shrinks; use as many as fit (at least 2)
        fit_levels = int(np.floor(np.log2(spec.halfwidth / (8.0 * spec.step))))
        n_levels = max(2, min(n_levels, fit_levels))
        family = nested_ball_family(spec, n_levels)
    qc = conjugate_exponent(q)
    sets, groups, outer = [], [], []
    for g, (c, R) in enumerate(family.balls()):
        outer.append(len(sets))
        sets.append(_ball_members(spec, c, R))
        groups.append(g)
        for m in range(1, n_levels + 1):
            sets.append(_ball_members(spec, c, R * 2.0**-m))
            groups.append(g)
    groups = np.array(groups)
    sizes = np.array([len(s) for s in sets], dtype=float)
    if np.any(sizes == 0):
        raise ValueError("nested family has balls without grid points")
    vol = spec.cell_volume
    n1 = _norms_over_sets(w.array, q.values, sets, vol)
    n2 = _norms_over_sets(1.0 / w.array, qc.values, sets, vol)
    outer = np.array(outer)
    inner = np.setdiff1d(np.arange(len(sets)), outer)
    outer_of = outer[groups[inner]]
    log_ratio = np.log(sizes[inner] / sizes[outer_of])
    fits = []
    for nn in (n1, n2):
        log_rho = np.log(nn[inner] / nn[outer_of])
        fits.append(_fit_decay(log_rho, log_ratio, groups[inner]))
    (d1, r1, c1, f1), (d2, r2, c2, f2) = fits
    flags = {f"delta1_{k}": v for k, v in f1.items()}
    flags.update({f"delta2_{k}": v for k, v in f2.items()})
    return DeltaFit(d1, d2, r1, r2, c1, c2, flags)


def check_index_hypotheses(alpha: ExponentFunction, delta1: float, delta2: float) -> dict:
    """Whether ``-n delta1 < alpha(0), alpha_inf < n delta2``."""
    n = alpha.spec.dimension
    lo, hi = -n * delta1, n * delta2
    a0, ainf = alpha.value_at_origin, alpha.value_at_infinity
    ok0 = lo < a0 < hi
    okinf = lo < ainf < hi
    if not (ok0 and okinf):
        log.warning(
            "index hypothesis fails: need %.3f < alpha(0)=%.3f, alpha_inf=%.3f < %.3f",
            lo, a0, ainf, hi,
        )
    return {"alpha0_ok": ok0, "alpha_inf_ok": okinf, "lower": lo, "upper": hi, "ok": ok0 and okinf}
