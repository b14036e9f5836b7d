"""Check runners: one seeded trial per call, dispatched by check name.

Every trial is isolated; a raising trial becomes a failed report row
rather than aborting the sweep.  Reports carry pass=True/False only where
a hard bound exists (theorems with explicit constants or exact
properties); empirical-constant rows leave pass empty.
"""

import time

import numpy as np

from .bsplines import stability_check
from .config import ExperimentConfig
from .envelopes import build_envelopes, greedy_allocation, verify_envelopes
from .errors import InvalidConfig, SplinegaleError
from .generators import (gen_adapted, gen_allocation_instance, gen_filtration,
                         gen_functions, gen_interval_union,
                         gen_polynomial_piece, observed_gamma, random_spline,
                         substream, trial_seed)
from .kernels import (KernelOperator, domination_constants, jensen_gap,
                      kernel_product_min_constant, tower_constant)
from .martingales import (DeltaSequence, SquareFunction, burkholder_ratio,
                          doob_checks, lepingle_check, main_duality_check,
                          orthogonality_gap, pairing_check, stein_check)
from .piecewise import remez_bound_check, remez_level_measure
from .projection import get_projector, make_martingale
from .reports import CheckReport

SEED_SCHEME = "trial_seed = splitmix64 chain of (master_seed, trial_index, axis_index)"


def _rep(cfg: ExperimentConfig, seed: int, check: str, gamma: float,
         level_count: int, lhs: float, rhs: float, ratio: float,
         passed: bool | None, **extra) -> CheckReport:
    return CheckReport(check=check, seed=seed, k=cfg.k, kprime=cfg.kprime,
                       gamma=float(gamma), level_count=level_count,
                       lhs=float(lhs), rhs=float(rhs), ratio=float(ratio),
                       passed=None if passed is None else bool(passed),
                       extra=extra)


def run_shadrin(cfg, seed):
    filt = gen_filtration(cfg, seed)
    gamma = observed_gamma(filt, cfg.k)
    norm = get_projector(filt.finest, cfg.k).l1_opnorm()
    passed = abs(norm - 1.0) <= 1e-10 if cfg.k == 1 else None
    return [_rep(cfg, seed, "shadrin", gamma, len(filt),
                 norm, 1.0, norm, passed)]


def run_doob(cfg, seed):
    filt = gen_filtration(cfg, seed)
    gamma = observed_gamma(filt, cfg.k)
    terminal = random_spline(filt.finest, cfg.k, substream(seed, 2))
    ms = make_martingale(filt, cfg.k, terminal)
    sup_l1 = max(m.to_piecewise().lp_norm(1.0) for m in ms.members)
    lambdas = [c * sup_l1 for c in (0.5, 1.0, 2.0, 4.0)]
    p_eff = cfg.p if cfg.p > 1.0 else 2.0
    rep = doob_checks(ms, p_eff, lambdas)
    return [
        _rep(cfg, seed, "doob.weak", gamma, len(filt),
             rep.weak_max, 1.0, rep.weak_max, None,
             lambdas=[float(x) for x in lambdas]),
        _rep(cfg, seed, "doob.lp", gamma, len(filt),
             rep.lp_ratio, 1.0, rep.lp_ratio, None, p=float(p_eff)),
    ]


def run_stein(cfg, seed):
    filt = gen_filtration(cfg, seed)
    gamma = observed_gamma(filt, cfg.k)
    fs = gen_functions(cfg, filt, seed)
    res_p = stein_check(fs, filt, cfg.k, cfg.p, cfg.r, mode="P")
    res_t = stein_check(fs, filt, cfg.k, cfg.p, cfg.r, mode="T", decay=cfg.q)
    hard = cfg.k == 1 and cfg.p == cfg.r and cfg.p in (1.0, 2.0)
    passed = res_p.ratio <= 1.0 + 1e-9 if hard else None
    return [
        _rep(cfg, seed, "stein", gamma, len(filt),
             res_p.lhs, res_p.rhs, res_p.ratio, passed,
             p=float(cfg.p), r=float(cfg.r)),
        _rep(cfg, seed, "stein.kernel", gamma, len(filt),
             res_t.lhs, res_t.rhs, res_t.ratio, None,
             p=float(cfg.p), r=float(cfg.r), q=cfg.q),
    ]


def run_lepingle(cfg, seed):
    filt = gen_filtration(cfg, seed)
    gamma = observed_gamma(filt, cfg.k)
    adapted = gen_adapted(cfg, filt, seed)
    res = lepingle_check(adapted, cfg.kprime)
    hard = cfg.k == 1 and cfg.kprime == 1
    passed = res.ratio <= 2.0 + 1e-8 if hard else None
    return [_rep(cfg, seed, "lepingle", gamma, len(filt),
                 res.lhs, res.rhs, res.ratio, passed)]


_TOWER_SIGMA = 0.5
_TOWER_TAU = 0.5


def run_tower(cfg, seed):
    filt = gen_filtration(cfg, seed)
    gamma = observed_gamma(filt, cfg.k)
    coarse = filt.levels[len(filt) // 2]
    fine = filt.finest
    f = gen_functions(cfg, filt, seed, count=1)[0]
    res = tower_constant(coarse, fine, cfg.k, cfg.kprime,
                         _TOWER_SIGMA, _TOWER_TAU, cfg.q, f)
    s_op = KernelOperator(coarse, cfg.k, _TOWER_SIGMA)
    t_op = KernelOperator(fine, cfg.kprime, _TOWER_TAU)
    prod = kernel_product_min_constant(s_op, t_op, cfg.q)
    return [
        _rep(cfg, seed, "tower", gamma, len(filt),
             res.c_hat, 1.0, res.c_hat, None,
             sigma=_TOWER_SIGMA, tau=_TOWER_TAU, q=cfg.q),
        _rep(cfg, seed, "tower.kernel_product", gamma, len(filt),
             prod.c_min, 1.0, prod.c_min, None, q=cfg.q),
    ]


def run_jensen(cfg, seed):
    filt = gen_filtration(cfg, seed)
    gamma = observed_gamma(filt, cfg.k)
    op = KernelOperator(filt.finest, cfg.k, cfg.q)
    f = random_spline(filt.finest, cfg.k, substream(seed, 2)).to_piecewise()
    out = [
        _rep(cfg, seed, "jensen.kernel_bounds", gamma, len(filt),
             op.kx_slack, 0.0, op.kx_slack, op.kx_slack >= -1e-12, q=cfg.q)
    ]
    for name in ("square", "abs", "exp-capped"):
        gap = jensen_gap(op, f, name)
        out.append(
            _rep(cfg, seed, f"jensen.{name}", gamma, len(filt),
                 gap, 0.0, gap, gap <= 1e-10, q=cfg.q)
        )
    return out


def run_domination(cfg, seed):
    filt = gen_filtration(cfg, seed)
    gamma = observed_gamma(filt, cfg.k)
    f = random_spline(filt.finest, cfg.k, substream(seed, 2)).to_piecewise()
    rep = domination_constants(filt.finest, cfg.k, cfg.q, f, cfg.grid_size)
    return [
        _rep(cfg, seed, "domination.c1", gamma, len(filt),
             rep.c1_hat, 1.0, rep.c1_hat, None, q=cfg.q),
        _rep(cfg, seed, "domination.c2", gamma, len(filt),
             rep.c2_hat, 1.0, rep.c2_hat, None, q=cfg.q,
             upper_estimate=True),
    ]


def run_duality(cfg, seed):
    filt = gen_filtration(cfg, seed)
    gamma = observed_gamma(filt, cfg.k)
    adapted = gen_adapted(cfg, filt, seed)
    hs = gen_functions(cfg, filt, seed)
    res = main_duality_check(adapted, hs, tol_quad=cfg.tol_quad)
    return [
        _rep(cfg, seed, "duality", gamma, len(filt),
             res.lhs, res.rhs, res.ratio, None),
        _rep(cfg, seed, "duality.sigma1", gamma, len(filt),
             res.cs_term_f, res.term_f_bound,
             res.cs_term_f / res.term_f_bound if res.term_f_bound > 0 else 0.0,
             res.term_f_ok),
    ]


def run_h1bmo(cfg, seed):
    filt = gen_filtration(cfg, seed)
    gamma = observed_gamma(filt, cfg.k)
    f = random_spline(filt.finest, cfg.k, substream(seed, 2)).to_piecewise()
    h = random_spline(filt.finest, cfg.k, substream(seed, 4)).to_piecewise()
    res = pairing_check(f, h, filt, cfg.k, decay=cfg.q)
    if res.ratio is None:
        passed = res.degenerate_consistent
        ratio = 0.0
    else:
        passed = None
        ratio = res.ratio
    return [_rep(cfg, seed, "h1bmo", gamma, len(filt),
                 abs(res.pairing), res.bound, ratio, passed, q=cfg.q)]


def run_g_props(cfg, seed):
    filt = gen_filtration(cfg, seed)
    gamma = observed_gamma(filt, cfg.k)
    adapted = gen_adapted(cfg, filt, seed)
    seq = build_envelopes(filt, cfg.k, adapted.members, verify=False)
    rep = verify_envelopes(seq)
    ratios = rep.ratios
    return [
        _rep(cfg, seed, "g_props.monotone", gamma, len(filt),
             -rep.monotone_gap, 1e-10, -rep.monotone_gap,
             rep.monotone_gap >= -1e-10),
        _rep(cfg, seed, "g_props.dominates", gamma, len(filt),
             -rep.domination_gap, 1e-10, -rep.domination_gap,
             rep.domination_gap >= -1e-10),
        _rep(cfg, seed, "g_props.expectation", gamma, len(filt),
             seq.expectations[-1], seq.sqrt_expectations[-1],
             float(np.max(ratios)), None,
             skipped_levels=len(rep.skipped)),
    ]


def run_phi(cfg, seed):
    filt = gen_filtration(cfg, seed)
    gamma = observed_gamma(filt, cfg.k)
    inst = gen_allocation_instance(cfg, filt, seed)
    mapping = greedy_allocation(inst)
    size_err = 0.0
    outside = 0.0
    for j, phi_j in enumerate(mapping):
        target = inst.c1 * (inst.atoms[j][1] - inst.atoms[j][0])
        size_err = max(size_err, abs(phi_j.measure - target))
        outside = max(outside, phi_j.subtract(inst.subsets[j]).measure)
    overlap = 0.0
    for i in range(len(mapping)):
        for j in range(i + 1, len(mapping)):
            overlap = max(overlap, mapping[i].overlap(mapping[j]))
    worst = max(size_err, outside, overlap)
    return [_rep(cfg, seed, "phi", gamma, len(filt),
                 worst, 1e-12, worst, worst <= 1e-12,
                 requests=len(mapping), c1=inst.c1)]


def run_remez(cfg, seed):
    rng = substream(seed, 5)
    pp, (lo, hi) = gen_polynomial_piece(cfg.k, rng)
    e_set = gen_interval_union(rng, lo, hi)
    bound = remez_bound_check(pp, (lo, hi), e_set, cfg.k)
    level = remez_level_measure(pp, (lo, hi), cfg.k)
    return [
        _rep(cfg, seed, "remez.bound", 1.0, 1,
             bound.lhs, bound.rhs, bound.lhs / bound.rhs if bound.rhs > 0
             else np.inf, bound.passed),
        _rep(cfg, seed, "remez.level", 1.0, 1,
             level.measure, 0.5 * (hi - lo),
             level.measure / (0.5 * (hi - lo)), level.passed),
    ]


def run_burkholder(cfg, seed):
    filt = gen_filtration(cfg, seed)
    gamma = observed_gamma(filt, cfg.k)
    f = random_spline(filt.finest, cfg.k, substream(seed, 2)).to_piecewise()
    g = random_spline(filt.finest, cfg.k, substream(seed, 4)).to_piecewise()
    p_eff = cfg.p if 1.0 < cfg.p < np.inf else 2.0
    res = burkholder_ratio(filt, cfg.k, f, p_eff)
    ds_f = DeltaSequence.from_function(filt, cfg.k, f)
    sf = SquareFunction(ds_f)
    s2 = sf.norm(2.0)
    p2 = ds_f.terminal_projection.to_piecewise().lp_norm(2.0)
    parseval_ok = abs(s2 - p2) <= 1e-9 * max(p2, 1e-30)
    ds_g = DeltaSequence.from_function(filt, cfg.k, g)
    ortho = orthogonality_gap(ds_f, ds_g)
    return [
        _rep(cfg, seed, "burkholder", gamma, len(filt),
             res.lhs, res.rhs, res.ratio,
             abs(res.ratio - 1.0) <= 1e-9 if p_eff == 2.0 else None,
             p=float(p_eff)),
        _rep(cfg, seed, "burkholder.parseval", gamma, len(filt),
             s2, p2, s2 / p2 if p2 > 0 else 0.0, parseval_ok),
        _rep(cfg, seed, "burkholder.orthogonality", gamma, len(filt),
             ortho, 1e-10, ortho, ortho <= 1e-10),
    ]


def run_stability(cfg, seed):
    filt = gen_filtration(cfg, seed)
    gamma = observed_gamma(filt, cfg.k)
    s = random_spline(filt.finest, cfg.k, substream(seed, 2))
    rep = stability_check(s, cfg.p)
    return [
        _rep(cfg, seed, "stability.coeff", gamma, len(filt),
             rep.coeff_ratio, 1.0, rep.coeff_ratio, None, p=float(cfg.p)),
        _rep(cfg, seed, "stability.norm", gamma, len(filt),
             rep.norm_ratio, rep.norm_ratio_reciprocal,
             max(rep.norm_ratio, rep.norm_ratio_reciprocal), None,
             p=float(cfg.p)),
    ]


def run_decay(cfg, seed):
    filt = gen_filtration(cfg, seed)
    gamma = observed_gamma(filt, cfg.k)
    fit = get_projector(filt.finest, cfg.k).decay_fit()
    return [_rep(cfg, seed, "decay", gamma, len(filt),
                 fit.c_hat, 1.0, fit.q_hat, None,
                 geometric=bool(fit.geometric))]


CHECKS = {
    "shadrin": run_shadrin,
    "doob": run_doob,
    "stein": run_stein,
    "lepingle": run_lepingle,
    "tower": run_tower,
    "jensen": run_jensen,
    "domination": run_domination,
    "duality": run_duality,
    "h1bmo": run_h1bmo,
    "g_props": run_g_props,
    "phi": run_phi,
    "remez": run_remez,
    "burkholder": run_burkholder,
    "stability": run_stability,
    "decay": run_decay,
}


def run_trial(cfg: ExperimentConfig, trial_index: int,
              axis_index: int = 0) -> list:
    """One isolated trial; exceptions become failed report rows."""
    seed = trial_seed(cfg.master_seed, trial_index, axis_index)
    start = time.perf_counter()
    try:
        reports = CHECKS[cfg.check](cfg, seed)
    except SplinegaleError as exc:
        reports = [CheckReport(
            check=f"{cfg.check}.error", seed=seed, k=cfg.k, kprime=cfg.kprime,
            gamma=float("nan"), level_count=0, lhs=float("nan"),
            rhs=float("nan"), ratio=float("nan"), passed=False,
            extra={"error": f"{type(exc).__name__}: {exc}"},
        )]
    wall_ms = (time.perf_counter() - start) * 1e3
    for rep in reports:
        rep.wall_ms = wall_ms / len(reports)
    return reports


def run_check(cfg: ExperimentConfig) -> list:
    """All trials of the configured check."""
    if cfg.check is None:
        raise InvalidConfig("config carries no check name")
    reports = []
    for trial in range(cfg.trials):
        reports.extend(run_trial(cfg, trial))
    return reports


_INT_AXES = {"k", "levels"}


def sweep(cfg: ExperimentConfig, axis: str | None = None,
          values=None) -> list:
    """Cross product of axis values and trials, one report row per trial."""
    axis = axis if axis is not None else cfg.axis
    values = values if values is not None else cfg.axis_values
    if axis is None:
        raise InvalidConfig("sweep needs an axis")
    if not values:
        raise InvalidConfig("sweep needs a nonempty axis value list")
    reports = []
    for ai, value in enumerate(values):
        cast = int(value) if axis in _INT_AXES else float(value)
        sub = cfg.replace(**{axis: cast}, axis=None, axis_values=())
        for trial in range(cfg.trials):
            for rep in run_trial(sub, trial, axis_index=ai):
                rep.axis = axis
                rep.axis_value = float(cast)
                reports.append(rep)
    return reports
