"""Verification suites and constant estimates.

Each experiment returns a :class:`ConstantReport` plus a list of gates
``(name, value, threshold, ok)``.  A suite merges its experiments into one
report (the ``experiment`` column tells them apart) and passes iff every gate
does.  Hypothesis checks are recorded but never stop a run.
"""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import corpus as corpus_mod
from .config import ConfigError, ExperimentConfig
from .exponents import constant_exponent, log_perturbed, unit_weight
from .grid import integrate
from .herz import grand_herz_morrey_norm, herz_norm, split_norm
from .lebesgue import luxemburg_norm, modular, weighted_norm
from .littlewood_paley import (
    PeetreParams,
    build_admissible_dual,
    build_admissible_pair,
    build_kernel_family,
    build_resolution_of_unity,
    calderon_reconstruct,
    calderon_sampled,
    convolve_levels,
    peetre_maximal,
)
from .operators import (
    VectorFunction,
    convolution_vs_maximal,
    discrete_convolution_bound,
    dyadic_windows,
    geometric_ratio,
    maximal,
    size_condition_operator,
    vector_ell_r,
)
from .report import ConstantReport
from .spaces import KERNEL_NORMS, TLParams, kernel_norms, tl_integrand, tl_norm_peetre
from .weights import (
    check_index_hypotheses,
    default_ball_family,
    estimate_delta_exponents,
    muckenhoupt_constant,
)

__all__ = ["SUITES", "ESTIMATES", "SuiteResult", "run_suite", "estimate_constant", "set_workers"]

log = logging.getLogger(__name__)

_WORKERS = 1


def set_workers(n: int) -> None:
    global _WORKERS
    _WORKERS = max(1, int(n))


@dataclass
class SuiteResult:
    name: str
    report: ConstantReport
    gates: list = field(default_factory=list)
    info: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(g["ok"] for g in self.gates if g.get("gated", True))

    def summary(self) -> dict:
        s = self.report.summary()
        s.update({"suite": self.name, "passed": self.passed, "gates": self.gates, **self.info})
        return s

    def write(self, outdir) -> dict:
        extra = {"suite": self.name, "passed": self.passed, "gates": self.gates, **self.info}
        return self.report.write(outdir, self.name, extra)


def _gate(name, value, threshold, ok=None, gated=True) -> dict:
    value = float(value)
    ok = bool(value <= threshold) if ok is None else bool(ok)
    return {"name": name, "value": value, "threshold": float(threshold), "ok": ok, "gated": gated}


def _merge(name: str, parts: list[tuple[str, ConstantReport]], meta=None) -> ConstantReport:
    out = ConstantReport(name, meta=dict(meta or {}))
    for exp, rep in parts:
        for lab, a, b, fl, ex in zip(rep.labels, rep.lhs, rep.rhs, rep.flags, rep.extra):
            out.add(lab, a, b, fl, experiment=exp, **ex)
    return out


class _Guard:
    """Per-sample task wrapper: a numerical failure yields ``fallback(args)`` instead of aborting."""

    def __init__(self, func, fallback):
        self.func, self.fallback = func, fallback

    def __call__(self, a):
        try:
            return self.func(a)
        except (ArithmeticError, ValueError, RuntimeError) as e:
            if self.fallback is None:
                raise
            log.warning("%s failed on sample %s: %s", self.func.__name__, a[1], e)
            return self.fallback(a)


def _pmap(func, args: list, fallback=None):
    """Ordered map, optionally over a process pool (results do not depend on the pool)."""
    g = _Guard(func, fallback)
    if _WORKERS <= 1 or len(args) < 2:
        return [g(a) for a in args]
    with ProcessPoolExecutor(max_workers=_WORKERS) as ex:
        return list(ex.map(g, args, chunksize=max(1, len(args) // (4 * _WORKERS))))


@lru_cache(maxsize=4)
def _cfg_from_items(items: tuple) -> ExperimentConfig:
    return ExperimentConfig({s: dict(kv) for s, kv in items})


def _freeze(cfg: ExperimentConfig) -> tuple:
    return tuple((s, tuple(sorted(v.items()))) for s, v in sorted(cfg.raw.items()))


def _corpus(cfg: ExperimentConfig, n: int | None = None):
    return corpus_mod.make_corpus(cfg.spec, cfg.samples if n is None else n, cfg.seed, cfg.families)


# ------------------------------------------------------------------ lebesgue


def exp_lebesgue_oracle(cfg: ExperimentConfig):
    rep = ConstantReport("lebesgue_oracle")
    worst = 0.0
    for p in (1.0, 1.5, 2.0, 4.0):
        for f in _corpus(cfg):
            lhs = luxemburg_norm(f, p).norm
            rhs = integrate(f.with_values(f.abs**p)).real ** (1.0 / p)
            worst = max(worst, abs(lhs - rhs) / lhs)
            rep.add(f"p={p:g}|{f.label}", lhs, rhs, p=p)
    return rep, [_gate("oracle_rel_err", worst, cfg.threshold("lebesgue_rel_err"))]


def _random_exponent(spec, rng):
    a0, ainf = rng.uniform(1.1, 4.0, 2)
    return log_perturbed(spec, float(a0), float(ainf), float(rng.uniform(0.0, 2.0)))


def exp_lebesgue_invariants(cfg: ExperimentConfig, n_triples: int = 100):
    spec = cfg.spec
    corp = _corpus(cfg)
    hom = ConstantReport("homogeneity")
    unit = ConstantReport("unit_modular")
    w_h = w_u = 0.0
    for t in range(n_triples):
        rng = np.random.default_rng([cfg.seed, t, 99])
        f = corp[t % len(corp)]
        q = _random_exponent(spec, rng)
        c = float(np.exp(rng.uniform(np.log(1e-3), np.log(1e3)))) * (1 if rng.random() < 0.5 else -1)
        nf = luxemburg_norm(f, q).norm
        ncf = luxemburg_norm(f * c, q).norm
        hom.add(f"{t}|{f.label}|{q.label}|c={c:.6g}", ncf, abs(c) * nf)
        w_h = max(w_h, abs(ncf - abs(c) * nf) / (abs(c) * nf))
        m = modular(f, q, nf)
        unit.add(f"{t}|{f.label}|{q.label}", m, 1.0)
        w_u = max(w_u, abs(m - 1.0))
    gates = [
        _gate("homogeneity_rel", w_h, cfg.threshold("homogeneity_rel")),
        _gate("unit_modular", w_u, cfg.threshold("unit_modular")),
    ]
    return [("homogeneity", hom), ("unit_modular", unit)], gates


def suite_lebesgue(cfg):
    r1, g1 = exp_lebesgue_oracle(cfg)
    parts, g2 = exp_lebesgue_invariants(cfg)
    return SuiteResult("lebesgue", _merge("lebesgue", [("oracle", r1)] + parts), g1 + g2)


# ------------------------------------------------------------------- weights


def hypothesis_checks(cfg: ExperimentConfig, herz=None) -> dict:
    """Weight class, decay exponents and the index condition for the configured (alpha, q, w)."""
    spec = cfg.spec
    H = cfg.herz() if herz is None else herz
    info = {"q": H.q.label, "w": H.w.label, "alpha": H.alpha.label}
    try:
        wc = muckenhoupt_constant(H.w, H.q, default_ball_family(spec, stride=max(1, spec.samples_per_axis // 32)))
        fit = estimate_delta_exponents(H.w, H.q)
    except ValueError as e:
        info.update({"hypothesis_violated": True, "error": str(e)})
        return info
    idx = check_index_hypotheses(H.alpha, fit.delta1, fit.delta2)
    limit = cfg.threshold("a_q_limit")
    a_ok = wc.constant <= limit
    if not a_ok:
        log.warning("A_q(.) constant %.3g exceeds %.3g: weight treated as outside the class", wc.constant, limit)
    info.update(
        {
            "a_q_constant": wc.constant,
            "a_q_tilde_constant": wc.constant_tilde,
            "a_q_finite": a_ok,
            "delta1": fit.delta1,
            "delta2": fit.delta2,
            "delta_fit_residual": max(fit.residual1, fit.residual2),
            "index_condition": idx,
            "hypothesis_violated": not (a_ok and idx["ok"]),
        }
    )
    return info


def exp_delta_fit(cfg: ExperimentConfig):
    spec = cfg.spec
    rep = ConstantReport("delta_fit")
    worst = 0.0
    for p in (2.0, 4.0):
        fit = estimate_delta_exponents(unit_weight(spec), constant_exponent(spec, p))
        for name, got, want in (("delta1", fit.delta1, 1 / p), ("delta2", fit.delta2, 1 - 1 / p)):
            rep.add(f"{name}|p={p:g}", got, want, p=p)
            worst = max(worst, abs(got - want))
    return rep, [_gate("delta_fit_abs_err", worst, cfg.threshold("delta_fit"))]


def suite_weights(cfg):
    r1, g1 = exp_delta_fit(cfg)
    info = hypothesis_checks(cfg)
    r2 = ConstantReport("weight_class")
    if "a_q_constant" in info:
        r2.add("A_q", info["a_q_constant"], 1.0)
        r2.add("A~_q", info["a_q_tilde_constant"], 1.0)
    gates = g1 + [_gate("a_q_finite", info.get("a_q_constant", np.inf), cfg.threshold("a_q_limit"), gated=False)]
    return SuiteResult("weights", _merge("weights", [("delta_fit", r1), ("weight_class", r2)]), gates, {"hypotheses": info})


# ---------------------------------------------------------------------- herz


def _ghm_task(args):
    items, index = args
    cfg = _cfg_from_items(items)
    H = _herz_cached(items, ())
    Hc = H.with_(alpha=constant_exponent(cfg.spec, H.alpha.value_at_origin))
    f = corpus_mod.sample(cfg.spec, cfg.seed, index, cfg.families)
    b = grand_herz_morrey_norm(f, H)
    return f.label, split_norm(f, H), b.value, b.argmax_delta, b.argmax_k0, split_norm(f, Hc), herz_norm(f, Hc)


def _ghm_failed(args):
    return (f"{args[1]}:failed",) + (np.nan,) * 6


def exp_ghm(cfg: ExperimentConfig):
    items = _freeze(cfg)
    rows = _pmap(_ghm_task, [(items, i) for i in range(cfg.samples)], _ghm_failed)
    rep = ConstantReport("ghm-L1")
    const = ConstantReport("ghm-L1-constant-alpha")
    worst_c = 0.0
    for lab, sp, v, d, k0, sc, vc in rows:
        rep.add(lab, sp, v, argmax_delta=d, argmax_k0=k0)
        const.add(lab, sc, vc)
        if np.isfinite(sc / vc):
            worst_c = max(worst_c, abs(sc / vc - 1))
    gates = [
        _gate("ghm_spread", rep.spread, cfg.threshold("ghm_spread")),
        _gate("constant_alpha_ratio", worst_c, cfg.threshold("ghm_constant_alpha")),
    ]
    return [("split/ghm", rep), ("constant_alpha", const)], gates


def suite_herz(cfg):
    parts, gates = exp_ghm(cfg)
    return SuiteResult("herz", _merge("herz", parts), gates)


# ------------------------------------------------- vector-valued boundedness


def _operator(name: str, spec):
    if name == "maximal":
        W = dyadic_windows(spec)
        return lambda g: maximal(g, W)
    return lambda g: size_condition_operator(name, g)


def _vector_task(args):
    items, index, op_name, herz_overrides, with_lebesgue = args
    cfg = _cfg_from_items(items)
    spec = cfg.spec
    H = _herz_cached(items, herz_overrides)
    J, r = cfg.i("operators", "J"), cfg.f("operators", "r")
    vf = VectorFunction(tuple(corpus_mod.vector_sample(spec, cfg.seed, index, J)), r)
    op = _operator(op_name, spec)
    lhs_f = vector_ell_r(vf, op)
    rhs_f = vector_ell_r(vf)
    out = (herz_norm(lhs_f, H), herz_norm(rhs_f, H))
    if with_lebesgue:
        out = out + (weighted_norm(lhs_f, H.q, H.w), weighted_norm(rhs_f, H.q, H.w))
    return out


def _vector_failed(args):
    return (np.nan,) * (4 if args[4] else 2)


@lru_cache(maxsize=8)
def _herz_cached(items, overrides):
    return _cfg_from_items(items).herz(**dict(overrides))


def exp_vector(cfg: ExperimentConfig, op_name: str, name: str, herz_overrides=(), with_lebesgue=False):
    """Ratios over ``2 * samples`` vector samples; the growth gate compares the two halves."""
    n = cfg.samples
    items = _freeze(cfg)
    tasks = [(items, i, op_name, tuple(herz_overrides), with_lebesgue) for i in range(2 * n)]
    res = _pmap(_vector_task, tasks, _vector_failed)
    rep = ConstantReport(name, meta={"operator": op_name, "r": cfg.f("operators", "r"), "J": cfg.i("operators", "J")})
    leb = ConstantReport("vL13")
    for i, row in enumerate(res):
        rep.add(f"v{i}", row[0], row[1], proxy=i)
        if with_lebesgue:
            leb.add(f"v{i}", row[2], row[3], proxy=i)
    r = rep.ratios
    first = float(np.nanmax(r[:n]))
    full = float(np.nanmax(r))
    growth = full / first - 1.0
    info = {"max_ratio_first_half": first, "max_ratio_all": full, "growth": growth}
    return rep, leb, growth, info


def _vector_suite(cfg: ExperimentConfig, suite: str, ops: list[str], with_lebesgue=False):
    hyp = hypothesis_checks(cfg)
    violated = bool(hyp.get("hypothesis_violated"))
    parts, gates, info = [], [], {"hypotheses": hyp, "hypothesis_violated": violated}
    for op in ops:
        rep, leb, growth, gi = exp_vector(cfg, op, f"{suite}:{op}", with_lebesgue=with_lebesgue)
        parts.append((op, rep))
        if with_lebesgue:
            parts.append(("vL13", leb))
            gates.append(_gate("vL13_finite", leb.max_ratio, np.inf, ok=np.isfinite(leb.max_ratio), gated=not violated))
        info[op] = gi
        gates.append(_gate(f"{op}_finite", rep.max_ratio, np.inf, ok=np.isfinite(rep.max_ratio), gated=not violated))
        gates.append(_gate(f"{op}_growth", abs(growth), cfg.threshold("growth"), gated=not violated))
    return SuiteResult(suite, _merge(suite, parts), gates, info)


def suite_sublinear(cfg):
    kind = cfg.get("operators", "kind")
    ops = ["kernel_power", "riesz_truncated"] if kind == "both" else [kind]
    return _vector_suite(cfg, "sublinear", ops)


def suite_maximal_vector(cfg):
    return _vector_suite(cfg, "maximal_vector", ["maximal"], with_lebesgue=True)


# ------------------------------------------------------------ spectral suites


@lru_cache(maxsize=4)
def _banks(items):
    cfg = _cfg_from_items(items)
    spec = cfg.spec
    pair = build_admissible_pair(spec)
    return {
        "rou": build_resolution_of_unity(spec, cfg.transition("transition")),
        "rou2": build_resolution_of_unity(spec, cfg.transition("transition2")),
        "pair": pair,
        "dual": build_admissible_dual(pair),
        "kernels": build_kernel_family(spec, cfg.i("spaces", "S"), cfg.f("spaces", "epsilon")),
    }


def _tl_params(cfg: ExperimentConfig, bank, **peetre) -> TLParams:
    pp = PeetreParams(
        a=peetre.get("a", cfg.f("spaces", "a")), t_integrability=cfg.f("spaces", "t"), m=cfg.f("spaces", "m")
    )
    return TLParams(_herz_cached(_freeze(cfg), ()), cfg.f("spaces", "s"), cfg.f("spaces", "beta"), bank, pp)


def exp_calderon(cfg: ExperimentConfig):
    b = _banks(_freeze(cfg))
    spec = cfg.spec
    rep, samp = ConstantReport("calderon"), ConstantReport("calderon_sampled")
    spill = 0.0
    for f in corpus_mod.band_limited_corpus(spec, max(1, cfg.samples // 2), cfg.seed):
        res = calderon_reconstruct(f, b["pair"], b["dual"])
        rep.add(f.label, res.rel_error, 1.0, spillover=res.spillover)
        spill = max(spill, res.spillover)
        rs = calderon_sampled(f, b["pair"], b["dual"])
        samp.add(f.label, rs.rel_error, 1.0)
    gates = [
        _gate("calderon_rel_err", rep.max_ratio, cfg.threshold("calderon_err")),
        _gate("calderon_sampled_rel_err", samp.max_ratio, cfg.threshold("calderon_sampled_err")),
    ]
    return [("spectral", rep), ("sampled", samp)], gates, {"max_spillover": spill}


def suite_calderon(cfg):
    parts, gates, info = exp_calderon(cfg)
    return SuiteResult("calderon", _merge("calderon", parts), gates, info)


def _tl_task(args):
    items, index, low_a = args
    cfg = _cfg_from_items(items)
    b = _banks(items)
    f = corpus_mod.sample(cfg.spec, cfg.seed, index, cfg.families)
    H = _herz_cached(items, ())
    P = _tl_params(cfg, b["rou"])
    Pa = P.with_(bank=b["pair"])
    g1 = tl_integrand(f, P)
    tl1 = herz_norm(g1, H)
    tl2 = herz_norm(tl_integrand(f, P.with_(bank=b["rou2"])), H)
    tla = herz_norm(tl_integrand(f, Pa), H)
    # pointwise |phi_j * f| <= phi*_j^a f, checked level by level
    conv = np.abs(convolve_levels(f, b["pair"]))
    a = Pa.peetre.a
    pw = 0.0
    for j in range(len(b["pair"])):
        pm = peetre_maximal(f, b["pair"], j, a).values
        pw = max(pw, float(np.max(conv[j] - pm)))
    tlp = tl_norm_peetre(f, Pa)
    low = tl_norm_peetre(f, _tl_params(cfg, b["pair"], a=low_a)) if low_a else np.nan
    return f.label, tl1, tl2, tla, tlp, pw, low


def _tl_failed(args):
    return (f"{args[1]}:failed",) + (np.nan,) * 6


def exp_tl(cfg: ExperimentConfig, low_a: float | None = 1.5):
    items = _freeze(cfg)
    n = cfg.spec.dimension
    if not _tl_params(cfg, _banks(items)["pair"]).peetre_hypothesis()["ok"]:
        log.warning("Peetre hypothesis a t > n fails for the configured (a, t)")
    if low_a:
        log.info("comparison run with a = %g (a t < n) documents degradation; it is not gated", low_a)
    rows = _pmap(_tl_task, [(items, i, low_a) for i in range(cfg.samples)], _tl_failed)
    res, adm, pee, low = (ConstantReport(n) for n in ("rou1/rou2", "vT2", "peetre", "peetre_low_a"))
    pw = 0.0
    for lab, tl1, tl2, tla, tlp, d, lo in rows:
        res.add(lab, tl1, tl2)
        adm.add(lab, tla, tl1)
        pee.add(lab, tlp, tla)
        if np.isfinite(lo):
            low.add(lab, lo, tla)
        pw = max(pw, d)
    th = cfg.threshold("tl_spread")
    gates = [
        _gate("resolution_spread", res.spread, th),
        _gate("admissible_spread", adm.spread, th),
        _gate("peetre_pointwise_excess", pw, 0.0),
        _gate("peetre_spread", pee.spread, cfg.threshold("peetre_spread")),
    ]
    info = {"a_t": cfg.f("spaces", "a") * cfg.f("spaces", "t"), "n": n}
    parts = [("rou1/rou2", res), ("admissible/tl", adm), ("peetre/admissible", pee)]
    if low.labels:
        parts.append(("peetre_low_a/admissible", low))
        # documented, not asserted: a t < n
        gates.append(_gate("peetre_low_a_spread", low.spread, np.inf, ok=True, gated=False))
        info["low_a"] = low_a
    return parts, gates, info


def suite_peetre(cfg):
    parts, gates, info = exp_tl(cfg)
    return SuiteResult("peetre", _merge("peetre", parts), gates, info)


def _five_task(args):
    items, index = args
    cfg = _cfg_from_items(items)
    b = _banks(items)
    f = corpus_mod.sample(cfg.spec, cfg.seed, index, cfg.families)
    nc = kernel_norms(f, _tl_params(cfg, b["kernels"]), tol=cfg.threshold("pointwise_tol"))
    return f.label, nc.values, nc.flags


def _five_failed(args):
    return f"{args[1]}:failed", {k: np.nan for k in KERNEL_NORMS}, {"failed": True}


def exp_five(cfg: ExperimentConfig):
    items = _freeze(cfg)
    rows = _pmap(_five_task, [(items, i) for i in range(cfg.samples)], _five_failed)
    pairs = [(a, b) for i, a in enumerate(KERNEL_NORMS) for b in KERNEL_NORMS[i + 1 :]]
    reps = {p: ConstantReport(f"{p[0]}/{p[1]}") for p in pairs}
    order_ok, nonzero = True, True
    for lab, vals, flags in rows:
        if flags.get("failed"):
            for p in pairs:
                reps[p].add(lab, np.nan, np.nan, flag="failed")
            continue
        order_ok &= flags["order_2_ge_1"] and flags["order_4_ge_5"]
        nonzero &= all(v > 0 for v in vals.values())
        for p in pairs:
            reps[p].add(lab, vals[p[0]], vals[p[1]])
    worst = max(r.spread for r in reps.values())
    th = cfg.threshold("five_norm_spread")
    gates = [_gate(f"spread_{a}/{b}", reps[(a, b)].spread, th) for a, b in pairs]
    gates += [
        _gate("ordering_pointwise", 0.0 if order_ok else 1.0, 0.0, ok=order_ok),
        _gate("all_nonzero", 0.0 if nonzero else 1.0, 0.0, ok=nonzero),
    ]
    info = {"worst_spread": worst, "flags_first_sample": rows[0][2] if rows else {}}
    return [(f"{a}/{b}", reps[(a, b)]) for a, b in pairs], gates, info


def suite_five_norms(cfg):
    parts, gates, info = exp_five(cfg)
    return SuiteResult("five_norms", _merge("five_norms", parts), gates, info)


# ----------------------------------------------------------- convolution lemma


def exp_convolution(cfg: ExperimentConfig, n_levels: int = 8):
    spec = cfg.spec
    H = cfg.herz()
    dp, beta = cfg.f("convolution", "delta_prime"), cfg.f("convolution", "beta")
    corp = _corpus(cfg)
    single = ConstantReport("single_shell")
    rand = ConstantReport("random")
    worst_cf = 0.0
    for i, f in enumerate(corp):
        rng = np.random.default_rng([cfg.seed, i, 77])
        k0 = int(rng.integers(0, n_levels))
        g = [f.abs if k == k0 else np.zeros(spec.shape) for k in range(n_levels)]
        discrete_convolution_bound(g, dp, beta, H, single, label=f"{f.label}|k0={k0}")
        closed = geometric_ratio(n_levels, k0, dp, beta)
        worst_cf = max(worst_cf, abs(single.ratios[-1] - closed) / closed)
        single.extra[-1]["closed_form"] = closed
        idx = rng.integers(0, len(corp), n_levels)
        scales = np.exp(rng.uniform(-2, 2, n_levels))
        g = [corp[j].abs * s for j, s in zip(idx, scales)]
        discrete_convolution_bound(g, dp, beta, H, rand, label=f"{f.label}|mix")
    gates = [
        _gate("closed_form_rel_err", worst_cf, cfg.threshold("closed_form")),
        _gate("young_bound", rand.max_ratio, cfg.threshold("young_bound")),
    ]
    return [("single_shell", single), ("random", rand)], gates, {"delta_prime": dp, "beta": beta}


def suite_convolution_lemma(cfg):
    parts, gates, info = exp_convolution(cfg)
    return SuiteResult("convolution_lemma", _merge("convolution_lemma", parts), gates, info)


def exp_tt_l3(cfg: ExperimentConfig):
    """``|omega_N * f| <= C Mf`` over N = 2^0..2^10; C is compared across corpus halves."""
    spec = cfg.spec
    W = dyadic_windows(spec)
    dil = [2.0**j for j in range(11)]
    rep = ConstantReport("tt-L3")
    n = cfg.samples
    for i, f in enumerate(_corpus(cfg, 2 * n)):
        rep.add(f.label, convolution_vs_maximal(f, dil, windows=W), 1.0, proxy=i)
    r = rep.ratios
    growth = float(np.max(r) / np.max(r[:n]) - 1.0)
    return rep, [_gate("tt_l3_growth", growth, cfg.threshold("tt_l3_growth"))], {"growth": growth}


# ---------------------------------------------------------------- registries

SUITES = {
    "lebesgue": suite_lebesgue,
    "weights": suite_weights,
    "herz": suite_herz,
    "sublinear": suite_sublinear,
    "maximal_vector": suite_maximal_vector,
    "calderon": suite_calderon,
    "peetre": suite_peetre,
    "five_norms": suite_five_norms,
    "convolution_lemma": suite_convolution_lemma,
}


def run_suite(name: str, cfg: ExperimentConfig) -> SuiteResult:
    if name not in SUITES:
        raise ConfigError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    return SUITES[name](cfg)


def _est_vector(cfg, op, name, lebesgue=False):
    hyp = hypothesis_checks(cfg)
    rep, leb, growth, info = exp_vector(cfg, op, name, with_lebesgue=lebesgue)
    violated = bool(hyp.get("hypothesis_violated"))
    target = leb if lebesgue else rep
    gates = [_gate("growth", abs(growth), cfg.threshold("growth"), gated=not violated)]
    if lebesgue:
        r = leb.ratios
        n = cfg.samples
        g2 = float(np.nanmax(r) / np.nanmax(r[:n]) - 1.0)
        gates = [_gate("growth", abs(g2), cfg.threshold("growth"), gated=not violated)]
        info["growth"] = g2
    target.name = name
    return SuiteResult(name, target, gates, {**info, "hypotheses": hyp, "hypothesis_violated": violated})


def _est_vt1(cfg):
    kind = cfg.get("operators", "kind")
    if kind == "both":
        kind = "kernel_power"
    return _est_vector(cfg, kind, "vT1")


def _est_tt_l1(cfg):
    parts, gates, info = exp_convolution(cfg)
    return SuiteResult("tt-L1", _merge("tt-L1", parts), gates, info)


def _est_tt_l3(cfg):
    rep, gates, info = exp_tt_l3(cfg)
    return SuiteResult("tt-L3", rep, gates, info)


def _est_ghm(cfg):
    parts, gates = exp_ghm(cfg)
    rep = parts[0][1]
    rep.name = "ghm-L1"
    return SuiteResult("ghm-L1", rep, [g for g in gates if g["name"] == "ghm_spread"])


def _est_vt2(cfg):
    parts, gates, info = exp_tl(cfg, low_a=None)
    rep = dict(parts)["admissible/tl"]
    rep.name = "vT2"
    return SuiteResult("vT2", rep, [g for g in gates if g["name"] == "admissible_spread"], info)


def _est_peetre(cfg):
    parts, gates, info = exp_tl(cfg, low_a=None)
    rep = dict(parts)["peetre/admissible"]
    rep.name = "peetre"
    keep = [g for g in gates if g["name"].startswith("peetre")]
    return SuiteResult("peetre", rep, keep, info)


def _est_five(cfg, pair: str):
    a, _, b = pair.partition("/")
    names = {str(i + 1): k for i, k in enumerate(KERNEL_NORMS)}
    if a not in names or b not in names or a == b:
        raise ConfigError(f"five_norms pair must look like five_norms:i/j with 1 <= i != j <= 5, got {pair!r}")
    A, B = names[a], names[b]
    items = _freeze(cfg)
    rows = _pmap(_five_task, [(items, i) for i in range(cfg.samples)], _five_failed)
    rep = ConstantReport(f"five_norms:{a}/{b}")
    for lab, vals, _ in rows:
        rep.add(lab, vals[A], vals[B])
    return SuiteResult(f"five_norms_{a}_{b}", rep, [_gate("spread", rep.spread, cfg.threshold("five_norm_spread"))])


ESTIMATES = {
    "vT1": _est_vt1,
    "vC1": lambda cfg: _est_vector(cfg, "maximal", "vC1"),
    "vL13": lambda cfg: _est_vector(cfg, "maximal", "vL13", lebesgue=True),
    "tt-L1": _est_tt_l1,
    "tt-L3": _est_tt_l3,
    "ghm-L1": _est_ghm,
    "vT2": _est_vt2,
    "peetre": _est_peetre,
}


def estimate_constant(inequality_id: str, cfg: ExperimentConfig) -> SuiteResult:
    if inequality_id.startswith("five_norms:"):
        return _est_five(cfg, inequality_id.split(":", 1)[1])
    if inequality_id not in ESTIMATES:
        known = ", ".join(list(ESTIMATES) + ["five_norms:i/j"])
        raise ConfigError(f"unknown inequality id {inequality_id!r}; choose from {known}")
    return ESTIMATES[inequality_id](cfg)
