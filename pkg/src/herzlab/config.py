"""INI experiment configuration.

Grammar: standard INI sections with ``key = value`` lines; ``#`` and ``;``
start comments.  Unknown sections or keys are rejected so typos surface.
Every key has a default, so an empty file is a valid configuration::

    [grid]        dimension, K, N, k_min, k_max
    [herz]        alpha, p, q, lambda, theta, w, delta_points, delta_log2_range
    [operators]   kind, r, J
    [spaces]      s, beta, a, t, m, S, epsilon, transition, transition2
    [convolution] delta_prime, beta
    [corpus]      seed, samples, families
    [output]      dir
    [thresholds]  one float per gate (see DEFAULTS)

Exponents are ``const:p`` or ``log-perturbed:a0,a_inf,c``; weights are
``one``, ``const:c`` or ``power:gamma``.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field
from pathlib import Path

from .exponents import parse_exponent, parse_weight
from .grid import GridSpec, make_grid
from .herz import HerzParams, default_delta_grid, make_herz_params

__all__ = ["ConfigError", "ExperimentConfig", "DEFAULTS", "load_config"]

DEFAULTS = {
    "grid": {"dimension": "1", "K": "6", "N": "16384", "k_min": "-20", "k_max": "6"},
    "herz": {
        "alpha": "log-perturbed:0.2,-0.1,1",
        "p": "2",
        "q": "const:2",
        "lambda": "0",
        "theta": "1",
        "w": "one",
        "delta_points": "97",
        "delta_log2_range": "24",
    },
    "operators": {"kind": "both", "r": "2", "J": "3"},
    "spaces": {
        "s": "0.5",
        "beta": "2",
        "a": "4",
        "t": "0.5",
        "m": "2",
        "S": "1",
        "epsilon": "0.5",
        "transition": "1,2",
        "transition2": "1.25,1.75",
    },
    "convolution": {"delta_prime": "1", "beta": "2"},
    "corpus": {"seed": "0", "samples": "64", "families": "packet,mixture,annulus"},
    "output": {"dir": "herzlab-out"},
    "thresholds": {
        "lebesgue_rel_err": "1e-8",
        "homogeneity_rel": "1e-9",
        "unit_modular": "1e-10",
        "delta_fit": "0.02",
        "a_q_limit": "100",
        "ghm_spread": "16",
        "ghm_constant_alpha": "1e-9",
        "growth": "0.10",
        "calderon_err": "1e-8",
        "calderon_sampled_err": "1e-6",
        "tl_spread": "16",
        "peetre_spread": "16",
        "five_norm_spread": "64",
        "pointwise_tol": "1e-12",
        "closed_form": "1e-9",
        "young_bound": "6",
        "tt_l3_growth": "0.2",
    },
}


class ConfigError(ValueError):
    pass


def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(x) for x in text.split(",") if x.strip())


@dataclass
class ExperimentConfig:
    raw: dict
    source: str = "<defaults>"
    _cache: dict = field(default_factory=dict, repr=False)

    def get(self, section: str, key: str) -> str:
        return self.raw[section][key]

    def f(self, section: str, key: str) -> float:
        try:
            return float(self.raw[section][key])
        except ValueError as e:
            raise ConfigError(f"[{section}] {key}: {e}") from None

    def i(self, section: str, key: str) -> int:
        try:
            return int(self.raw[section][key])
        except ValueError as e:
            raise ConfigError(f"[{section}] {key}: {e}") from None

    def threshold(self, key: str) -> float:
        if key not in self.raw["thresholds"]:
            raise ConfigError(f"missing threshold {key!r}")
        return self.f("thresholds", key)

    @property
    def seed(self) -> int:
        return self.i("corpus", "seed")

    @property
    def samples(self) -> int:
        return self.i("corpus", "samples")

    @property
    def families(self) -> tuple[str, ...]:
        return tuple(x.strip() for x in self.get("corpus", "families").split(",") if x.strip())

    @property
    def spec(self) -> GridSpec:
        if "spec" not in self._cache:
            g = self.raw["grid"]
            try:
                self._cache["spec"] = make_grid(
                    int(g["dimension"]), int(g["K"]), int(g["N"]), int(g["k_min"]), int(g["k_max"])
                )
            except ValueError as e:
                raise ConfigError(f"[grid] {e}") from None
        return self._cache["spec"]

    def herz(self, **overrides) -> HerzParams:
        """Herz parameters from the ``[herz]`` section; overrides take preset strings or objects."""
        spec = self.spec
        h = dict(self.raw["herz"])
        h.update({k: v for k, v in overrides.items() if isinstance(v, str)})
        objs = {k: v for k, v in overrides.items() if not isinstance(v, str)}
        try:
            alpha = objs.get("alpha") or parse_exponent(spec, h["alpha"])
            q = objs.get("q") or parse_exponent(spec, h["q"])
            w = objs.get("w") or parse_weight(spec, h["w"])
            return make_herz_params(
                spec,
                alpha=alpha,
                p=float(h["p"]),
                q=q,
                lam=float(h["lambda"]),
                theta=float(h["theta"]),
                w=w,
                delta_grid=default_delta_grid(int(h["delta_points"]), float(h["delta_log2_range"])),
            )
        except ValueError as e:
            raise ConfigError(f"[herz] {e}") from None

    def with_overrides(self, **kv) -> "ExperimentConfig":
        """Copy with ``section__key=value`` overrides."""
        raw = {s: dict(v) for s, v in self.raw.items()}
        for k, v in kv.items():
            sec, _, key = k.partition("__")
            if sec not in raw or key not in raw[sec]:
                raise ConfigError(f"unknown setting {sec}.{key}")
            raw[sec][key] = str(v)
        return ExperimentConfig(raw, self.source)

    def validate(self) -> None:
        self.spec
        self.herz()
        for sec in ("spaces", "convolution"):
            for k, v in self.raw[sec].items():
                if k.startswith("transition"):
                    if len(_floats(v)) != 2:
                        raise ConfigError(f"[{sec}] {k} needs two numbers")
                else:
                    self.f(sec, k)
        for k in self.raw["thresholds"]:
            self.threshold(k)
        if self.samples < 1:
            raise ConfigError("[corpus] samples must be positive")
        if self.get("operators", "kind") not in ("kernel_power", "riesz_truncated", "both"):
            raise ConfigError("[operators] kind must be kernel_power, riesz_truncated or both")

    def transition(self, key: str = "transition") -> tuple[float, float]:
        return _floats(self.get("spaces", key))

    def dump(self) -> dict:
        return {s: dict(v) for s, v in self.raw.items()}


def load_config(path: str | Path | None = None) -> ExperimentConfig:
    raw = {s: dict(v) for s, v in DEFAULTS.items()}
    source = "<defaults>"
    if path is not None:
        cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
        cp.optionxform = str  # keys are case-sensitive (K, N, S)
        try:
            with open(path, encoding="utf-8") as fh:
                cp.read_file(fh)
        except (OSError, configparser.Error) as e:
            raise ConfigError(f"cannot read config {path}: {e}") from None
        for sec in cp.sections():
            if sec not in raw:
                raise ConfigError(f"unknown section [{sec}]")
            for k, v in cp.items(sec):
                if k not in raw[sec]:
                    raise ConfigError(f"unknown key {k!r} in [{sec}]")
                raw[sec][k] = v
        source = str(path)
    cfg = ExperimentConfig(raw, source)
    cfg.validate()
    return cfg
