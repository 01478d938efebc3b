"""Trial drivers for every experiment kind.

Each driver maps a validated :class:`~polyfloat.config.ExperimentConfig` to
``(rows, columns, summary)``.  Rows are plain dicts, one per trial (or per
trial and grid cell), and every summary number is recomputed from the rows
by :func:`summarize`, so summaries add nothing that the CSV does not hold.
Trial ``k`` only uses streams ``derive_seed(seed, k, tag)``, which makes the
rows independent of ``jobs``.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import assumptions, inclusion, recovery
from .bodies import closed_form_floating_body
from .config import ExperimentConfig
from .errors import UnsupportedError
from .floating import estimate_floating_body
from .l1opt import basis_pursuit
from .samplers import sample_matrix, sphere_directions
from .seeding import derive_seed


def _map_trials(fn, trials, jobs):
    if jobs is None or jobs <= 1:
        out = [fn(k) for k in range(trials)]
    else:
        with ThreadPoolExecutor(max_workers=jobs) as ex:
            out = list(ex.map(fn, range(trials)))
    rows = []
    for part in out:
        rows.extend(part if isinstance(part, list) else [part])
    return rows


def _body(spec, p, cfg, k):
    """Closed-form floating body if available, else an estimate on M directions."""
    try:
        return closed_form_floating_body(spec, p).body, "closed-form"
    except UnsupportedError:
        dirs = sphere_directions(spec.dim, cfg.M, derive_seed(cfg.seed, k, "body/directions"))
        est = estimate_floating_body(spec, p, dirs, cfg.m, derive_seed(cfg.seed, k, "body/samples"))
        return est.body, "estimated"


# ---------------------------------------------------------------- kinds ---

def _floating_body(cfg: ExperimentConfig, jobs):
    spec, p = cfg.spec, cfg.p_value
    try:
        exact = closed_form_floating_body(spec, p)
        exact = exact.body if exact.tag == "exact" else None
    except UnsupportedError:
        exact = None
    conf = cfg.option("conf")

    def trial(k):
        dirs = sphere_directions(spec.dim, cfg.M, derive_seed(cfg.seed, k, "floating/directions"))
        est = estimate_floating_body(spec, p, dirs, cfg.m, derive_seed(cfg.seed, k, "floating/samples"),
                                     conf=conf)
        rows = []
        for j in range(len(dirs)):
            ref = inclusion.radials(exact, dirs[j:j + 1])[0] if exact is not None else math.nan
            rows.append({"trial": k, "direction": j, "p": p, "m": cfg.m, "radial": est.body.radii[j],
                         "band_lower": est.band_lower[j], "band_upper": est.band_upper[j],
                         "closed_form": ref, "rel_err": abs(est.body.radii[j] / ref - 1.0)
                         if exact is not None else math.nan})
        return rows

    cols = ["trial", "direction", "p", "m", "radial", "band_lower", "band_upper", "closed_form", "rel_err"]
    return _map_trials(trial, cfg.trials, jobs), cols


def _inclusion_sweep(cfg, jobs):
    spec, p = cfg.spec, cfg.p_value
    c, variant = cfg.option("threshold"), cfg.option("variant")

    def trial(k):
        body, src = _body(spec, p, cfg, k)
        G = sample_matrix(spec, cfg.N, derive_seed(cfg.seed, k, "inclusion/matrix"))
        rep = inclusion.boundary_sweep(G, body, cfg.M, c, derive_seed(cfg.seed, k, "inclusion/directions"),
                                       variant)
        return {"trial": k, "seed": cfg.seed, "n": cfg.n, "N": cfg.N, "p": p, "c": c,
                "min_sup_norm": rep.min_sup_norm, "pass": rep.passed, "body": src}

    cols = ["trial", "seed", "n", "N", "p", "c", "min_sup_norm", "pass", "body"]
    return _map_trials(trial, cfg.trials, jobs), cols


def _certify(cfg, jobs):
    spec, p = cfg.spec, cfg.p_value
    c, variant, measure = cfg.option("c"), cfg.option("variant"), cfg.option("measure")

    def trial(k):
        body, src = _body(spec, p, cfg, k)
        A = sample_matrix(spec, cfg.N, derive_seed(cfg.seed, k, "certify/matrix")).T
        dseed = derive_seed(cfg.seed, k, "certify/directions")
        if measure == "quotient-constant":
            qc = recovery.quotient_constant(A, body, cfg.M, dseed)
            return {"trial": k, "seed": cfg.seed, "n": cfg.n, "N": cfg.N, "p": p, "c": c,
                    "max_quotient": qc.d_hat, "pass": bool(qc.d_hat <= 1.0 / c), "body": src}
        rep = inclusion.certify_points(A, body, c, cfg.M, dseed, variant, tol=cfg.tol("feas"))
        return {"trial": k, "seed": cfg.seed, "n": cfg.n, "N": cfg.N, "p": p, "c": c,
                "max_quotient": rep.max_quotient, "pass": rep.passed, "body": src}

    cols = ["trial", "seed", "n", "N", "p", "c", "max_quotient", "pass", "body"]
    return _map_trials(trial, cfg.trials, jobs), cols


def _scaling_fit(cfg, jobs):
    spec = cfg.spec
    q = 2.0 if spec.family == "gaussian" else float(spec.q)
    ratios = [float(r) for r in cfg.option("ratios")]

    def ratio_rows(idx):
        scales, rho = inclusion.scaling_trial_scales(q, cfg.alpha, ratios[idx], cfg.trials, cfg.seed,
                                                     cfg.n, cfg.option("variant"))
        return [{"ratio": ratios[idx], "trial": t, "scale": scales[t], "polar_radial": rho}
                for t in range(cfg.trials)]

    cols = ["ratio", "trial", "scale", "polar_radial"]
    return _map_trials(ratio_rows, len(ratios), jobs), cols


def _assumptions(cfg, jobs):
    spec = cfg.spec
    gamma, r, nq, qg = cfg.option("gamma"), cfg.option("r"), cfg.option("norm_q"), cfg.option("q_grid")

    def trial(k):
        seed = derive_seed(cfg.seed, k, "assumptions").seed
        dirs = assumptions.default_directions(spec.dim, derive_seed(cfg.seed, k, "assumptions/dirs"),
                                              cfg.M)
        sb = assumptions.estimate_small_ball(spec, nq, gamma, dirs, cfg.m, seed)
        row = {"trial": k, "gamma": gamma, "delta_hat": sb.value, "delta_halfwidth": sb.halfwidth,
               "r": r, "L_hat": math.nan, "D_hat": math.nan}
        if r < spec.moment_barrier:
            row["L_hat"] = assumptions.estimate_Lr(spec, nq, r, dirs, cfg.m, seed).value
        if 2 * max(qg) < spec.moment_barrier:
            row["D_hat"] = assumptions.regularity_constant(spec, qg, dirs, cfg.m, seed).value
        return row

    cols = ["trial", "gamma", "delta_hat", "delta_halfwidth", "r", "L_hat", "D_hat"]
    return _map_trials(trial, cfg.trials, jobs), cols


def _nsp(cfg, jobs):
    spec = cfg.spec
    s, n_sig, budget = cfg.option("s"), cfg.option("signals"), cfg.option("budget")

    def trial(k):
        A = sample_matrix(spec, cfg.n, derive_seed(cfg.seed, k, "nsp/matrix"))
        res = recovery.nsp_constant(A, s, budget)
        gen = derive_seed(cfg.seed, k, "nsp/signals").generator()
        errs = []
        for _ in range(n_sig):
            x = recovery.sparse_signal(cfg.N, s, gen)
            errs.append(float(np.abs(basis_pursuit(A, A @ x, cfg.tol("feas")) - x).sum()))
        witness_ok = math.nan
        if res.rho >= 1 and res.witness is not None:
            v = res.witness
            x = np.zeros(cfg.N)
            x[list(res.support)] = v[list(res.support)]
            witness_ok = bool(np.abs(x - v).sum() <= np.abs(x).sum() + 1e-9)
        return {"trial": k, "rho": res.rho, "lp_count": res.lp_count, "max_err": max(errs),
                "recovered_all": bool(max(errs) <= 1e-6), "witness_ok": witness_ok}

    cols = ["trial", "rho", "lp_count", "max_err", "recovered_all", "witness_ok"]
    return _map_trials(trial, cfg.trials, jobs), cols


def _recovery(cfg, jobs):
    spec = cfg.spec

    def trial(k):
        return recovery.recovery_experiment(spec, cfg.n, cfg.option("s"), cfg.option("noise_levels"), 1,
                                            cfg.seed, cfg.option("noise"), cfg.option("mode"), start=k)

    return _map_trials(trial, cfg.trials, jobs), list(recovery.RECOVERY_COLUMNS)


def _domination(cfg, jobs):
    X, Y = cfg.spec, cfg.spec_Y
    l1, l2, ug = cfg.option("lambda1"), cfg.option("lambda2"), cfg.option("u_grid")

    def trial(k):
        dirs = assumptions.default_directions(X.dim, derive_seed(cfg.seed, k, "domination/dirs"), cfg.M)
        rep = assumptions.domination_check(X, Y, l1, l2, dirs, ug, cfg.m,
                                           derive_seed(cfg.seed, k, "domination").seed)
        return {"trial": k, "comparisons": rep.comparisons, "n_violations": len(rep.violations),
                "max_deficit": rep.max_deficit, "ok": rep.ok}

    cols = ["trial", "comparisons", "n_violations", "max_deficit", "ok"]
    return _map_trials(trial, cfg.trials, jobs), cols


DRIVERS = {"floating-body": _floating_body, "inclusion-sweep": _inclusion_sweep, "certify": _certify,
           "scaling-fit": _scaling_fit, "assumptions": _assumptions, "nsp": _nsp,
           "recovery": _recovery, "domination": _domination}


# ------------------------------------------------------------ summaries ---

def _col(rows, name):
    return np.array([float(r[name]) for r in rows], dtype=float)


def _rate(rows, name):
    return float(np.mean([bool(r[name]) for r in rows])) if rows else math.nan


def summarize(kind: str, rows, cfg: ExperimentConfig) -> dict:
    """Summary statistics computed only from ``rows`` (and the config)."""
    out = {"kind": kind, "rows": len(rows)}
    if kind == "floating-body":
        rel = _col(rows, "rel_err")
        out["max_rel_err"] = float(np.max(rel)) if np.all(np.isfinite(rel)) else math.nan
        out["within_5pct_rate"] = float(np.mean(rel <= 0.05)) if np.all(np.isfinite(rel)) else math.nan
        inside = [(r["band_lower"] <= r["closed_form"] <= r["band_upper"]) for r in rows]
        out["band_coverage"] = float(np.mean(inside)) if np.all(np.isfinite(rel)) else math.nan
    elif kind in ("inclusion-sweep", "certify"):
        out["pass_rate"] = _rate(rows, "pass")
        key = "min_sup_norm" if kind == "inclusion-sweep" else "max_quotient"
        v = _col(rows, key)
        out[f"{key}_min"], out[f"{key}_median"], out[f"{key}_max"] = (
            float(v.min()), float(np.median(v)), float(v.max()))
    elif kind == "scaling-fit":
        ratios = sorted({r["ratio"] for r in rows})
        rate = cfg.option("rate")
        cs, raw = [], []
        for ratio in ratios:
            sub = [r for r in rows if r["ratio"] == ratio]
            c = inclusion.largest_passing_scale(_col(sub, "scale"), rate)
            cs.append(c)
            raw.append(c * sub[0]["polar_radial"])
        x = np.log(ratios)
        out["ratios"], out["c_star"], out["raw_radius"] = ratios, cs, raw
        if len(ratios) >= 2:
            out["slope"] = float(np.polyfit(x, np.log(cs), 1)[0])
            out["raw_slope"] = float(np.polyfit(x, np.log(raw), 1)[0])
        out["target_slope"] = cfg.alpha / (2.0 if cfg.spec.family == "gaussian" else cfg.spec.q)
    elif kind == "assumptions":
        out["delta_hat_min"] = float(np.min(_col(rows, "delta_hat")))
        out["L_hat_max"] = float(np.max(_col(rows, "L_hat")))
        out["D_hat_max"] = float(np.max(_col(rows, "D_hat")))
    elif kind == "nsp":
        rho = _col(rows, "rho")
        good = [r for r in rows if r["rho"] < 1]
        bad = [r for r in rows if r["rho"] >= 1]
        out["instances_rho_below_1"] = len(good)
        out["nsp_implies_recovery"] = all(bool(r["recovered_all"]) for r in good)
        witnessed = [r for r in bad if not (isinstance(r["witness_ok"], float) and math.isnan(r["witness_ok"]))]
        out["converse_witness_rate"] = _rate(witnessed, "witness_ok") if witnessed else math.nan
        out["rho_median"] = float(np.median(rho))
    elif kind == "recovery":
        out.update(recovery.summarize_recovery(rows))
    elif kind == "domination":
        out["violation_free_rate"] = _rate(rows, "ok")
        out["violations_total"] = int(sum(int(r["n_violations"]) for r in rows))
    return out


def run_kind(cfg: ExperimentConfig, jobs: int = 1):
    rows, cols = DRIVERS[cfg.kind](cfg, jobs)
    return rows, cols, summarize(cfg.kind, rows, cfg)

