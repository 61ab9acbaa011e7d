"""Variable-exponent modular, Luxemburg norm and weighted norms.

All norms are computed by bisection on ``log(lambda)``; many norms that share
a grid are solved together in one vectorised bisection (``luxemburg_rows``),
which is what the Herz shells and the weight-class ball families use.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exponents import ExponentFunction, Weight, conjugate_exponent
from .grid import SampledFunction

__all__ = [
    "LuxemburgResult",
    "LuxemburgError",
    "modular",
    "luxemburg_norm",
    "luxemburg_rows",
    "weighted_norm",
    "holder_check",
    "HOLDER_CONSTANT",
]

HOLDER_CONSTANT = 2.0
REL_TOL = 1e-12
MAX_ITER = 200


class LuxemburgError(RuntimeError):
    def __init__(self, msg, bracket=None):
        super().__init__(msg)
        self.bracket = bracket


@dataclass(frozen=True)
class LuxemburgResult:
    norm: float
    iterations: int
    bracket: tuple[float, float]
    modular_at_norm: float


def _exponent_values(q, shape) -> np.ndarray:
    if isinstance(q, ExponentFunction):
        v = q.values
    else:
        v = np.asarray(q, dtype=float)
    return np.broadcast_to(v, shape)


def _abs_values(f) -> tuple[np.ndarray, float]:
    if not isinstance(f, SampledFunction):
        raise TypeError("expected a SampledFunction")
    return f.abs, f.spec.cell_volume


def modular(f: SampledFunction, q, lam: float) -> float:
    """Quadrature of ``(|f|/lam)^q``; ``0^q = 0``."""
    if not lam > 0:
        raise ValueError(f"lambda must be positive, got {lam}")
    a, vol = _abs_values(f)
    qv = _exponent_values(q, a.shape)
    nz = a > 0
    with np.errstate(over="ignore"):
        return float(vol * np.sum((a[nz] / lam) ** qv[nz]))


def luxemburg_rows(
    absvals: np.ndarray,
    exps: np.ndarray,
    row_ids: np.ndarray,
    n_rows: int,
    cell_volume: float,
    tol: float = REL_TOL,
    max_iter: int = MAX_ITER,
    return_details: bool = False,
):
    """Luxemburg norms of several functions given as flat (value, exponent, row) triples.

    Row ``r`` collects the entries with ``row_ids == r``; its norm is the
    ``lambda`` where ``cell_volume * sum((|v|/lambda)^q) = 1``. Rows without a
    nonzero entry get norm 0.
    """
    absvals = np.asarray(absvals, dtype=float).ravel()
    exps = np.asarray(exps, dtype=float).ravel()
    row_ids = np.asarray(row_ids).ravel()
    if not np.all(np.isfinite(absvals)):
        raise ValueError("non-finite values in Luxemburg norm input")
    nz = absvals > 0
    L = np.log(absvals[nz])
    qq = exps[nz]
    rid = row_ids[nz]
    if np.any(qq <= 0):
        raise ValueError("exponent must be positive")

    active = np.bincount(rid, minlength=n_rows) > 0
    norms = np.zeros(n_rows)
    iters = np.zeros(n_rows, dtype=int)
    lo = np.full(n_rows, -np.inf)
    hi = np.full(n_rows, -np.inf)
    if not active.any():
        if return_details:
            return norms, iters, np.zeros((n_rows, 2)), np.zeros(n_rows)
        return norms

    def mod(u):
        with np.errstate(over="ignore", invalid="ignore"):
            t = np.exp(qq * (L - u[rid]))
        return cell_volume * np.bincount(rid, weights=t, minlength=n_rows)

    # lambda_0 = max |f| per row
    u0 = np.full(n_rows, -np.inf)
    np.maximum.at(u0, rid, L)
    u0[~active] = 0.0
    m0 = mod(u0)
    up = active & (m0 > 1.0)
    lo = np.where(up, u0, -np.inf)
    hi = np.where(active & ~up, u0, np.inf)
    step = np.full(n_rows, np.log(2.0))
    it = 0
    # expand: rows needing larger lambda move hi up, the others move lo down
    need = active & (~np.isfinite(lo) | ~np.isfinite(hi))
    while need.any():
        it += 1
        if it > max_iter:
            raise LuxemburgError("bracketing did not terminate", (np.exp(lo), np.exp(hi)))
        cand = np.where(np.isfinite(lo), lo + step, hi - step)
        cand[~need] = 0.0
        m = mod(cand)
        ok = m <= 1.0
        move_hi = need & np.isfinite(lo)
        move_lo = need & ~np.isfinite(lo)
        hi = np.where(move_hi & ok, cand, hi)
        lo = np.where(move_hi & ~ok, cand, lo)
        lo = np.where(move_lo & ~ok, cand, lo)
        hi = np.where(move_lo & ok, cand, hi)
        step = np.where(need, 2.0 * step, step)
        iters += need
        need = active & (~np.isfinite(lo) | ~np.isfinite(hi))
    # bisection on log(lambda); hi - lo is the relative lambda tolerance
    lo = np.where(active, lo, 0.0)
    hi = np.where(active, hi, 0.0)
    eps = np.log1p(tol)
    need = active & (hi - lo > eps)
    while need.any():
        it += 1
        if it > max_iter:
            raise LuxemburgError("bisection iteration cap exceeded", (np.exp(lo), np.exp(hi)))
        mid = 0.5 * (lo + hi)
        m = mod(mid)
        ok = m <= 1.0
        hi = np.where(need & ok, mid, hi)
        lo = np.where(need & ~ok, mid, lo)
        iters += need
        need = active & (hi - lo > eps)
    u = 0.5 * (lo + hi)
    norms = np.where(active, np.exp(u), 0.0)
    if not return_details:
        return norms
    bracket = np.stack([np.where(active, np.exp(lo), 0.0), np.where(active, np.exp(hi), 0.0)], 1)
    mod_at = np.where(active, mod(np.where(active, u, 0.0)), 0.0)
    return norms, iters, bracket, mod_at


def luxemburg_norm(f: SampledFunction, q, tol: float = REL_TOL, max_iter: int = MAX_ITER):
    """Luxemburg norm ``inf{lam > 0 : modular(f, q, lam) <= 1}``."""
    a, vol = _abs_values(f)
    qv = _exponent_values(q, a.shape)
    norms, iters, bracket, mod_at = luxemburg_rows(
        a, qv, np.zeros(a.size, dtype=int), 1, vol, tol, max_iter, return_details=True
    )
    return LuxemburgResult(
        float(norms[0]), int(iters[0]), (float(bracket[0, 0]), float(bracket[0, 1])), float(mod_at[0])
    )


def weighted_norm(f: SampledFunction, q, w: Weight | None = None) -> float:
    """``||f w||_{L^q}``."""
    if w is None:
        return luxemburg_norm(f, q).norm
    return luxemburg_norm(f.with_values(f.values * w.array), q).norm


@dataclass(frozen=True)
class HolderCheck:
    lhs: float
    rhs: float
    ratio: float


def holder_check(
    f: SampledFunction, g: SampledFunction, q: ExponentFunction, constant: float = HOLDER_CONSTANT
) -> HolderCheck:
    """Compare ``int |fg|`` with ``constant * ||f||_q * ||g||_q'``."""
    qc = conjugate_exponent(q)
    lhs = float(np.sum(f.abs * g.abs) * f.spec.cell_volume)
    rhs = constant * luxemburg_norm(f, q).norm * luxemburg_norm(g, qc).norm
    ratio = 0.0 if lhs == 0 else lhs / rhs
    return HolderCheck(lhs, rhs, ratio)
