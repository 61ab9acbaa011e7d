"""Compiled sup kernels for Peetre-type maximal functions.

For every grid point ``i`` the kernels return ``max_y g[y] * W(|i - y|)`` with a
nonincreasing distance weight ``W``.  The scan starts at ``i`` and moves outward
in blocks; a block is skipped when its maximum times the weight at its nearest
cell cannot beat the running best, and the scan stops once the global maximum
times the weight at the current distance cannot either.  The result is the exact
grid supremum (up to rounding in the lower bound carried from the neighbour).
"""

import numpy as np
from numba import njit

BLOCK = 32


@njit(cache=True)
def _block_max(g, block):
    nb = (g.size + block - 1) // block
    out = np.zeros(nb)
    for b in range(nb):
        m = 0.0
        for y in range(b * block, min(g.size, (b + 1) * block)):
            if g[y] > m:
                m = g[y]
        out[b] = m
    return out


@njit(cache=True)
def _scan_block(g, wtab, i, lo, hi, best):
    for y in range(lo, hi):
        d = i - y if i >= y else y - i
        v = g[y] * wtab[d]
        if v > best:
            best = v
    return best


@njit(cache=True)
def sup_1d(g, wtab, block):
    N = g.size
    bmax = _block_max(g, block)
    nb = bmax.size
    gmax = 0.0
    for b in range(nb):
        if bmax[b] > gmax:
            gmax = bmax[b]
    out = np.empty(N)
    for i in range(N):
        bi = i // block
        # W(d + 1) >= W(d) W(1), so the previous sup decayed by one cell is a lower bound
        best = g[i] * wtab[0]
        if i > 0 and out[i - 1] * wtab[1] > best:
            best = out[i - 1] * wtab[1]
        best = _scan_block(g, wtab, i, bi * block, min(N, (bi + 1) * block), best)
        for step in range(1, nb):
            left = bi - step
            right = bi + step
            if left < 0 and right >= nb:
                break
            # every cell in the remaining blocks is at least this far away
            dmin = (step - 1) * block + 1
            if dmin < N and gmax * wtab[dmin] <= best:
                break
            if left >= 0:
                d = i - ((left + 1) * block - 1)
                if bmax[left] * wtab[d] > best:
                    best = _scan_block(g, wtab, i, left * block, (left + 1) * block, best)
            if right < nb:
                d = right * block - i
                if bmax[right] * wtab[d] > best:
                    best = _scan_block(g, wtab, i, right * block, min(N, (right + 1) * block), best)
        out[i] = best
    return out


@njit(cache=True)
def sup_2d(g, wtab, block):
    """Same sup on an (N, N) grid; ``wtab[dx, dy]`` holds the weight by cell offsets."""
    N = g.shape[0]
    nb = (N + block - 1) // block
    bmax = np.zeros((nb, nb))
    for bx in range(nb):
        for by in range(nb):
            m = 0.0
            for x in range(bx * block, min(N, (bx + 1) * block)):
                for y in range(by * block, min(N, (by + 1) * block)):
                    if g[x, y] > m:
                        m = g[x, y]
            bmax[bx, by] = m
    out = np.empty((N, N))
    for i in range(N):
        for j in range(N):
            best = g[i, j] * wtab[0, 0]
            for bx in range(nb):
                lo = bx * block
                hi = min(N, (bx + 1) * block) - 1
                dx = 0 if lo <= i <= hi else (lo - i if lo > i else i - hi)
                for by in range(nb):
                    lo2 = by * block
                    hi2 = min(N, (by + 1) * block) - 1
                    dy = 0 if lo2 <= j <= hi2 else (lo2 - j if lo2 > j else j - hi2)
                    if bmax[bx, by] * wtab[dx, dy] <= best:
                        continue
                    for x in range(lo, hi + 1):
                        ax = x - i if x >= i else i - x
                        for y in range(lo2, hi2 + 1):
                            ay = y - j if y >= j else j - y
                            v = g[x, y] * wtab[ax, ay]
                            if v > best:
                                best = v
            out[i, j] = best
    return out


def weight_table(shape, step: float, scale: float, a: float) -> np.ndarray:
    """``(1 + scale * h * |d|)^-a`` for cell offsets ``d`` (per axis in 2-D)."""
    d = np.arange(shape[0], dtype=float)
    if len(shape) == 1:
        r = d
    else:
        r = np.hypot(d[:, None], d[None, :])
    return (1.0 + scale * step * r) ** (-a)


def peetre_sup(g: np.ndarray, step: float, scale: float, a: float) -> np.ndarray:
    g = np.ascontiguousarray(g, dtype=float)
    wtab = weight_table(g.shape, step, scale, a)
    if g.ndim == 1:
        return sup_1d(g, wtab, BLOCK)
    return sup_2d(g, wtab, 8)
