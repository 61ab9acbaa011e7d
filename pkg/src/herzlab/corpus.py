"""Deterministic test-function corpora.

Sample ``i`` of a corpus with seed ``s`` is drawn from its own stream
keyed by ``(s, i)``, so a corpus of 128 members starts with the 64-member
corpus of the same seed, and parallel evaluation cannot change any sample.
"""

from __future__ import annotations

import numpy as np

from .grid import GridSpec, SampledFunction
from .littlewood_paley import resolved_jmax

__all__ = [
    "FAMILIES",
    "BOUNDARY_TOL",
    "sample",
    "make_corpus",
    "band_limited_corpus",
    "vector_sample",
    "boundary_max",
    "check_decay",
]

FAMILIES = ("packet", "mixture", "annulus")
BOUNDARY_TOL = 1e-12


def _rng(seed: int, index: int, salt: int = 0) -> np.random.Generator:
    return np.random.default_rng([int(seed), int(index), int(salt)])


def _center(rng, spec: GridSpec, spread: float) -> np.ndarray:
    return rng.uniform(-spread, spread, spec.dimension)


def _limits(spec: GridSpec, center_cap: float) -> tuple[float, float]:
    """Centre spread and largest width that keep Gaussians below the decay contract."""
    L = spec.halfwidth
    c = min(center_cap, L / 8)
    return c, (L - c) / 8


def _dist2(spec: GridSpec, c) -> np.ndarray:
    return sum((x - ci) ** 2 for x, ci in zip(spec.coords, c))


def wave_packet(spec: GridSpec, rng, level: int | None = None) -> SampledFunction:
    """Gaussian-windowed plane wave whose spectrum sits inside the octave of ``level``."""
    j_max = resolved_jmax(spec)
    level = int(rng.integers(1, max(2, j_max - 1))) if level is None else level
    freq = 2.0**level * rng.uniform(1.1, 1.6)
    # spectral width 1/sigma kept below a quarter of the octave
    spread, s_max = _limits(spec, 4.0)
    sigma = min(max(4.0 / 2.0**level, 0.5) * rng.uniform(1.0, 2.0), s_max)
    direction = rng.normal(size=spec.dimension)
    direction /= np.linalg.norm(direction)
    c = _center(rng, spec, spread)
    phase = rng.uniform(0, 2 * np.pi)
    arg = sum(d * (x - ci) for d, x, ci in zip(direction, spec.coords, c))
    env = np.exp(-_dist2(spec, c) / (2 * sigma**2))
    amp = rng.uniform(0.5, 2.0)
    return SampledFunction(spec, amp * env * np.cos(freq * arg + phase), f"packet(l={level})")


def gaussian_mixture(spec: GridSpec, rng) -> SampledFunction:
    k = int(rng.integers(1, 5))
    spread, s_max = _limits(spec, 8.0)
    v = np.zeros(spec.shape)
    for _ in range(k):
        c = _center(rng, spec, spread)
        sigma = float(np.exp(rng.uniform(np.log(0.05), np.log(min(5.0, s_max)))))
        v = v + rng.uniform(-2.0, 2.0) * np.exp(-_dist2(spec, c) / (2 * sigma**2))
    if not np.any(v):
        v = np.exp(-_dist2(spec, np.zeros(spec.dimension)))
    return SampledFunction(spec, v, f"mixture({k})")


def annulus_bump(spec: GridSpec, rng) -> SampledFunction:
    """Smooth radial bump concentrated on ``|x| = 2^k`` for a random shell k."""
    top = min(spec.k_max, spec.halfwidth_log2 - 2)
    lo = max(spec.k_min, -4)
    k = int(rng.integers(lo, top + 1))
    R = 2.0**k
    width = R * rng.uniform(0.08, 0.3)
    v = np.exp(-((spec.radius - R) ** 2) / (2 * width**2))
    return SampledFunction(spec, rng.uniform(0.5, 2.0) * v, f"annulus(k={k})")


def sample(spec: GridSpec, seed: int, index: int, families=FAMILIES) -> SampledFunction:
    """Member ``index`` of the corpus; the family cycles with the index."""
    rng = _rng(seed, index)
    fam = families[index % len(families)]
    if fam == "packet":
        f = wave_packet(spec, rng)
    elif fam == "mixture":
        f = gaussian_mixture(spec, rng)
    elif fam == "annulus":
        f = annulus_bump(spec, rng)
    else:
        raise ValueError(f"unknown corpus family {fam!r}")
    check_decay(f)
    return SampledFunction(spec, f.values, f"{index}:{f.label}")


def make_corpus(spec: GridSpec, n: int = 64, seed: int = 0, families=FAMILIES) -> list[SampledFunction]:
    return [sample(spec, seed, i, families) for i in range(n)]


def band_limited_corpus(spec: GridSpec, n: int = 32, seed: int = 0) -> list[SampledFunction]:
    """Wave packets at levels 1..j_max-2 (cycled), for reconstruction tests."""
    j_max = resolved_jmax(spec)
    out = []
    for i in range(n):
        level = 1 + i % max(1, j_max - 2)
        f = wave_packet(spec, _rng(seed, i, 1), level)
        check_decay(f)
        out.append(SampledFunction(spec, f.values, f"{i}:{f.label}"))
    return out


def vector_sample(spec: GridSpec, seed: int, index: int, J: int = 3) -> list[SampledFunction]:
    """``J`` members drawn from the streams ``(seed, index, 2 + m)``."""
    out = []
    for m in range(J):
        rng = _rng(seed, index, 2 + m)
        fam = FAMILIES[(index + m) % len(FAMILIES)]
        f = {"packet": wave_packet, "mixture": gaussian_mixture, "annulus": annulus_bump}[fam](spec, rng)
        check_decay(f)
        out.append(SampledFunction(spec, f.values, f"{index}.{m}:{f.label}"))
    return out


def boundary_max(f: SampledFunction, cells: int = 1) -> float:
    """Largest ``|f|`` on the outermost ``cells`` layers of the grid."""
    a = f.abs
    if a.ndim == 1:
        return float(max(a[:cells].max(), a[-cells:].max()))
    return float(max(a[:cells].max(), a[-cells:].max(), a[:, :cells].max(), a[:, -cells:].max()))


def check_decay(f: SampledFunction, tol: float = BOUNDARY_TOL) -> None:
    b = boundary_max(f)
    if b > tol:
        raise ValueError(f"{f.label}: boundary value {b:.3g} exceeds the decay contract {tol:g}")
