"""End-to-end certification pipeline and companion reports.

certify() chains: parameter validation -> occurrence tables -> error ledger
-> separate-monotonicity verdicts -> exclusion spiral -> trace verification
-> reference root -> rectangle-mode rate bound.  The verdict is true only if
every stage passes and the rate (prefactors and unbalancing factor included)
stays below 1 with the documented slack.  Interval mode reruns the ledger,
the trace sign checks, and the rate with outward-rounded arithmetic.

The monotone decrease of the satisfiability probability in the density c is
recorded as an external assumption: it transports the per-density verdict to
every larger density but is not itself computed here.
"""

from __future__ import annotations

import datetime as _dt
import itertools
import json
import math
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import distribution as dist
from . import ledger as lg
from . import monotone as mo
from . import rootbox as rb
from . import stationarity as st
from .errors import GuardError, SingularPointError, SpiralSeedError
from .formulas import (Assignment, Formula, clause_count, deviation_budget,
                       generate, is_pps, measure_omega, pps_bitmap,
                       run_omega_campaign, solution_bitmap, variable_type)
from .intervals import Interval, upper
from .params import DELTA_NUM, ModelParams

VERSION = "0.1.0"
SCHEMA = "typsat-certificate/1"

#: Headline targets the certificate's constants table is compared against.
TARGETS = {
    "rate": 0.9999885,
    "prefactor": 1.0 + 1e-7,
    "unbalancing": 1.0 + 1e-14,
    "v_min2": 1.126983,
    "uv_max2": 1.64966,
    "tangent_phi": (2.4427, -1.8194),
    "tangent_beta": (2.2377, -1.7173),
    "a_bound": 1.894,
    "b_bound_phi": 4.2269,
    "b_bound_beta": 3.643,
    "extra_beta": 0.566,
    "total_phi": 6.125,
    "total_beta": 6.103,
    "lambda_phi_min": 7.1,
    "eq1_star": -0.157,
    "m_bands": (-0.051, -0.051, -0.062, -0.055),
    "rectangle": (0.56383217, 0.56383249, 0.44651403, 0.44651478),
}


def _dec(x, direction: str = "nearest") -> dict:
    return {"v": f"{float(x):.17g}", "dir": direction}


def _dec_entry(entry: dict) -> dict:
    out = dict(entry)
    out["v"] = f"{float(entry['value']):.17g}"
    out["dir"] = entry.get("direction", "upper")
    del out["value"]
    out.pop("direction", None)
    return out


@dataclass
class Certificate:
    params: dict
    mode: str
    seed: int
    stages: list = field(default_factory=list)   # (name, ok, detail)
    ledger: dict = field(default_factory=dict)
    constants: dict = field(default_factory=dict)
    monotone: list = field(default_factory=list)
    trace: dict = field(default_factory=dict)
    trace_verified: bool = False
    rectangle: tuple | None = None
    rate: float | None = None
    point_rate: float | None = None
    reference_root: dict = field(default_factory=dict)
    interval_report: dict = field(default_factory=dict)
    assumptions: list = field(default_factory=list)
    verdict: bool = False
    failing_stage: str | None = None

    def stage(self, name: str, ok: bool, detail: str = ""):
        self.stages.append({"name": name, "ok": bool(ok), "detail": detail})
        if not ok and self.failing_stage is None:
            self.failing_stage = name

    def as_dict(self) -> dict:
        return {
            "schema": SCHEMA,
            "version": VERSION,
            "timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat(),
            "mode": self.mode,
            "seed": self.seed,
            "params": self.params,
            "stages": self.stages,
            "ledger": {k: (_dec_entry(v) if isinstance(v, dict) and "value" in v else v)
                       for k, v in self.ledger.items()},
            "constants": self.constants,
            "monotone": self.monotone,
            "trace": self.trace,
            "trace_verified": self.trace_verified,
            "rectangle": [_dec(v) for v in self.rectangle] if self.rectangle else None,
            "rate": _dec(self.rate, "upper") if self.rate is not None else None,
            "point_rate": _dec(self.point_rate) if self.point_rate is not None else None,
            "reference_root": self.reference_root,
            "interval_report": self.interval_report,
            "assumptions": self.assumptions,
            "verdict": self.verdict,
            "failing_stage": self.failing_stage,
        }

    def dumps(self) -> str:
        return json.dumps(self.as_dict(), indent=1)

    def dump(self, path) -> None:
        Path(path).write_text(self.dumps())


def _equation_closures(consts, params):
    box = params.a_priori

    def eq1f(phi, beta1):
        return st.eq1(st.derive_point(phi, beta1, box), consts, params)

    def eq2f(phi, beta1):
        return st.eq2(st.derive_point(phi, beta1, box), consts, params)

    return eq1f, eq2f


def _interval_closures(ivt, params):
    """Outward-rounded Eq1/Eq2 evaluators over exact float points."""
    lam, c = ivt["lam"], ivt["c"]
    strict = (ivt["ps"] >= 1) & (ivt["w"] > 0)
    pmask = ivt["ps"] >= 1
    kt1, w1, p1 = ivt["kt"][strict], ivt["w"][strict], ivt["ps"][strict]
    kt2, w2, p2 = ivt["kt"][pmask], ivt["w"][pmask], ivt["ps"][pmask]

    def quantities(phi: float, beta1: float):
        phi_iv, b1_iv = Interval(phi), Interval(beta1)
        beta2 = 3.0 * (1.0 - phi_iv) - 2.0 * b1_iv
        beta3 = b1_iv - 2.0 + 3.0 * phi_iv
        y = 3.0 * phi_iv - b1_iv
        u = 9.0 * (1.0 - phi_iv) * beta3 / (y * beta2)
        v = 1.0 + beta2 * beta2 / (3.0 * y * beta3)
        return u, v

    def eq1f(phi, beta1):
        u, v = quantities(phi, beta1)
        return st._eq1_core(phi, u, v, lam, ivt["K_tilde"], kt1, w1, p1)

    def eq2f(phi, beta1):
        u, v = quantities(phi, beta1)
        return st._eq2_core_mod2(phi, beta1, u, v, lam, c, kt2, w2, p2)

    return eq1f, eq2f, quantities


def _log_base_constant_intervals(ivt) -> Interval:
    lam, c = ivt["lam"], ivt["c"]
    kt, w = ivt["kt"], ivt["w"]
    log2, log3, log6 = (Interval.log_of_int(k) for k in (2, 3, 6))
    sum_strict = kt[w > 0].sum()
    denom = (kt * (ivt["log_pfact"] + kt.log())).sum()
    return c * log3 + lam * (lam.log() - log6 - 1.0) + sum_strict * log2 - denom


def certify(c: float = 4.506, x_max: int = 56, eps: float = 1e-15,
            mode: str = "float", seed: int = 0, width_target: float = 4e-7) -> Certificate:
    """Run the full pipeline; raises ConfigurationError for invalid parameters."""
    if mode not in ("float", "interval"):
        raise ValueError(f"mode must be 'float' or 'interval', got {mode!r}")
    params = ModelParams(c=c, x_max=x_max, epsilon=eps)
    cert = Certificate(params=params.as_dict(), mode=mode, seed=seed)
    cert.assumptions.append(
        "the satisfiability probability is nonincreasing in the clause density c; "
        "recorded as an external assumption, not computed")
    cert.stage("config", True, f"c={c}, x_max={x_max}, eps={eps}")

    typical, unbalanced, consts = dist.build_tables(params)
    row_err = max(
        abs(typical.row_sum(x) - math.exp(dist.poisson_log_pmf(x, params.lam)))
        / math.exp(dist.poisson_log_pmf(x, params.lam))
        for x in range(params.x_max + 1))
    mass_err = abs(unbalanced.triangle_sum() - typical.triangle_sum()) / typical.triangle_sum()
    tables_ok = row_err < 1e-12 and mass_err < 1e-12
    cert.stage("tables", tables_ok,
               f"row_err={row_err:.3e}, mass_err={mass_err:.3e}, rho={consts.rho:.3e}")

    budget = lg.build_budget(params, consts, mode="float")
    cert.ledger = budget.as_dict()
    ledger_ok = upper(budget.prefactor) < 1.01 and math.isfinite(upper(budget.prefactor))
    cert.stage("ledger", ledger_ok, f"prefactor={upper(budget.prefactor):.12g}")

    monotone_ok = False
    mono_detail = ""
    star_majorant = math.nan
    m_values: list[float] = []
    verdict_phi = None
    try:
        verdict_phi = mo.eq2_monotone_verdict("fixed_phi", consts, params)
        verdict_beta = mo.eq2_monotone_verdict("fixed_beta1", consts, params)
        cert.monotone = [verdict_phi.as_dict(), verdict_beta.as_dict()]
        star_majorant = mo.eq1_star_majorant(consts, params)
        box = params.a_priori
        bands_cover = (mo.M_BANDS[0][0] <= box.beta1_min
                       and mo.M_BANDS[-1][1] >= box.beta1_max
                       and all(a[1] >= b[0] for a, b in zip(mo.M_BANDS, mo.M_BANDS[1:])))
        m_values = [mo.m_bound(lo, hi, consts, params) for lo, hi in mo.M_BANDS]
        monotone_ok = (verdict_phi.verdict and verdict_beta.verdict
                       and star_majorant < -DELTA_NUM and bands_cover
                       and all(v < -DELTA_NUM for v in m_values))
        mono_detail = (f"eq2 totals=({verdict_phi.total():.4f}, {verdict_beta.total():.4f}) "
                       f"vs {verdict_phi.threshold:.4f}; eq1*={star_majorant:.4f}; "
                       f"M={['%.4f' % v for v in m_values]}")
    except Exception as exc:  # infeasible polygon, singularities, ...
        mono_detail = f"{type(exc).__name__}: {exc}"
    cert.stage("monotone", monotone_ok, mono_detail)
    cert.constants = {
        "v_min2": verdict_phi.v_min2 if verdict_phi is not None else None,
        "uv_max2": verdict_phi.uv_max2 if verdict_phi is not None else None,
        "eq1_star_majorant": star_majorant,
        "m_bands": [{"band": list(b), "value": v} for b, v in zip(mo.M_BANDS, m_values)],
        "lambda_phi_min": params.lambda_phi_min(),
        "K_tilde": consts.K_tilde,
        "rho": consts.rho,
        "delta": consts.delta,
        "D": consts.D,
        "N": consts.N,
        "n_dependent_factor": "(6 n^3)^(1/n), excluded from the rate by design",
        "targets": {k: (list(v) if isinstance(v, tuple) else v) for k, v in TARGETS.items()},
    }

    eq1f, eq2f = _equation_closures(consts, params)
    trace = None
    if monotone_ok:
        try:
            trace = rb.spiral_localize(eq1f, eq2f, params.a_priori, width_target)
            cert.trace = trace.to_jsonable()
            rect = trace.rectangle
            tight = (rect[1] - rect[0] <= width_target and rect[3] - rect[2] <= width_target)
            cert.stage("spiral", tight,
                       f"K={trace.K}, L={trace.L}, rectangle={rect}" +
                       (f"; {trace.diagnostic}" if trace.diagnostic else ""))
        except (SpiralSeedError, SingularPointError) as exc:
            cert.stage("spiral", False, str(exc))
    else:
        cert.stage("spiral", False, "skipped: monotonicity certificates failed")

    if trace is not None:
        try:
            report = rb.verify_exclusion(trace, eq1f, eq2f, params.a_priori)
            cert.trace_verified = report.ok
            cert.stage("verify_exclusion", report.ok,
                       f"{report.checks} sign checks, {len(report.failures)} failures")
        except Exception as exc:
            cert.stage("verify_exclusion", False, f"{type(exc).__name__}: {exc}")
    else:
        cert.stage("verify_exclusion", False, "no trace")

    if trace is not None and cert.trace_verified:
        cert.rectangle = trace.rectangle
        ref = rb.solve_reference(eq1f, eq2f, trace.rectangle)
        cert.reference_root = {
            k: (_dec(v) if isinstance(v, float) else v) for k, v in ref.items()}
        cert.stage("reference_root", bool(ref.get("found") and ref.get("inside_rectangle")),
                   f"residuals=({ref.get('residual_eq1')}, {ref.get('residual_eq2')})")

        rect = trace.rectangle
        try:
            rate = st.rate_bound_rectangle(rect[0], rect[1], rect[2], rect[3],
                                           consts, params, budget)
            cert.rate = float(rate)
            center = st.derive_point(0.5 * (rect[0] + rect[1]), 0.5 * (rect[2] + rect[3]),
                                     params.a_priori)
            cert.point_rate = st.rate_bound_point(center, consts, params, budget)
            rate_ok = cert.rate + DELTA_NUM < 1.0
            cert.stage("rate", rate_ok, f"rectangle rate={cert.rate:.9f}")
        except Exception as exc:
            cert.stage("rate", False, f"{type(exc).__name__}: {exc}")
    else:
        cert.stage("rate", False, "no verified rectangle")

    cert.verdict = all(s["ok"] for s in cert.stages)

    if mode == "interval":
        cert.interval_report = _interval_pass(cert, params, trace)
        cert.stage("interval_reverify", cert.interval_report.get("ok", False),
                   cert.interval_report.get("detail", ""))
        cert.verdict = cert.verdict and cert.interval_report.get("ok", False)
    return cert


def _interval_pass(cert: Certificate, params: ModelParams, trace) -> dict:
    """Outward-rounded re-verification of ledger, trace signs, and the rate."""
    out: dict = {"ok": False, "detail": ""}
    _, _, consts = dist.build_tables(params)
    budget_iv = lg.build_budget(params, consts, mode="interval")
    out["prefactor_upper"] = upper(budget_iv.prefactor)
    out["unbalancing_upper"] = upper(budget_iv.unbalancing)

    if trace is None:
        out["detail"] = "no trace to re-verify"
        return out
    ivt = dist.kappa_tilde_intervals(params.x_max, repr(params.c))
    eq1_iv, eq2_iv, _ = _interval_closures(ivt, params)
    failures = 0
    checks = 0
    pm, bp, pp, bm = (trace.phi_minus, trace.beta_plus, trace.phi_plus, trace.beta_minus)
    for i, (f, b) in enumerate(zip(pm, bp)):
        checks += 1
        if not eq1_iv(f, b).surely_gt(DELTA_NUM):
            failures += 1
    for i in range(len(pm) - 1):
        checks += 1
        if not eq2_iv(pm[i], bp[i + 1]).surely_lt(-DELTA_NUM):
            failures += 1
    for j, (f, b) in enumerate(zip(pp, bm)):
        checks += 1
        if not eq1_iv(f, b).surely_lt(-DELTA_NUM):
            failures += 1
    for j in range(len(pp) - 1):
        checks += 1
        if not eq2_iv(pp[j], bm[j + 1]).surely_gt(DELTA_NUM):
            failures += 1
    out["sign_checks"] = checks
    out["sign_failures"] = failures

    rect = trace.rectangle
    rate_iv = st.rate_bound_rectangle(
        rect[0], rect[1], rect[2], rect[3], consts, params, budget_iv,
        kt=ivt["kt"], w=ivt["w"], ps=ivt["ps"], xs=ivt["xs"],
        k_tilde=ivt["K_tilde"], lam=ivt["lam"], c=ivt["c"],
        log_base=_log_base_constant_intervals(ivt))
    out["rate_upper"] = upper(rate_iv)
    out["rate_lower"] = rate_iv.lower()
    ok = failures == 0 and upper(rate_iv) + DELTA_NUM < 1.0
    if cert.rate is not None:
        out["float_vs_interval_gap"] = abs(cert.rate - upper(rate_iv))
    out["ok"] = ok
    out["detail"] = (f"{checks} interval sign checks ({failures} failures), "
                     f"rate upper={out['rate_upper']:.9f}")
    return out


def replay(cert_data: dict) -> dict:
    """Re-run the stored trace and rectangle of a certificate and compare."""
    p = cert_data["params"]
    params = ModelParams(c=p["c"], x_max=p["x_max"], epsilon=p["epsilon"])
    _, _, consts = dist.build_tables(params)
    budget = lg.build_budget(params, consts)
    eq1f, eq2f = _equation_closures(consts, params)
    trace = rb.ExclusionTrace.from_jsonable(cert_data["trace"])
    report = rb.verify_exclusion(trace, eq1f, eq2f, params.a_priori)
    rect = tuple(float(v["v"]) for v in cert_data["rectangle"])
    rate = st.rate_bound_rectangle(rect[0], rect[1], rect[2], rect[3],
                                   consts, params, budget)
    stored_rate = float(cert_data["rate"]["v"])
    verdict = report.ok and rate + DELTA_NUM < 1.0
    return {
        "trace_ok": report.ok,
        "rate": rate,
        "stored_rate": stored_rate,
        "rate_agrees": abs(rate - stored_rate) < 1e-12,
        "verdict": verdict,
        "verdict_agrees": verdict == cert_data["verdict"] or cert_data["mode"] == "interval",
    }


# -- curves -------------------------------------------------------------------------

def emit_curves(params: ModelParams, grid_density: int) -> tuple[list[dict], str]:
    """Sample the loci eq1 = 0 and eq2 = 0 as phi(beta1) by per-column bisection."""
    _, _, consts = dist.build_tables(params)
    eq1f, eq2f = _equation_closures(consts, params)
    box = params.a_priori
    rows = []
    for b1 in np.linspace(box.beta1_min, box.beta1_max, grid_density):
        row = {"beta1": float(b1)}
        for name, fn in (("phi_eq1", eq1f), ("phi_eq2", eq2f)):
            lo = max(box.phi_min, (2.0 - b1) / 3.0 + 1e-9)
            hi = box.phi_max
            try:
                flo, fhi = fn(lo, b1), fn(hi, b1)
            except SingularPointError:
                row[name] = math.nan
                continue
            if flo * fhi > 0:
                row[name] = math.nan
                continue
            for _ in range(80):
                mid = 0.5 * (lo + hi)
                fm = fn(mid, b1)
                if flo * fm <= 0:
                    hi = mid
                else:
                    lo, flo = mid, fm
            row[name] = 0.5 * (lo + hi)
        rows.append(row)
    lines = ["beta1,phi_eq1,phi_eq2"]
    lines += [f"{r['beta1']:.12g},{r['phi_eq1']:.12g},{r['phi_eq2']:.12g}" for r in rows]
    return rows, "\n".join(lines) + "\n"


# -- empirical report ----------------------------------------------------------------

def empirical_report(n: int, c: float, formulas: int, seed: int, x_cap: int = 8,
                     confidence: float = 0.999, time_budget_s: float | None = None,
                     pps_sub: tuple[int, int] | None = None) -> dict:
    """Cell-by-cell empirical means against the limiting masses, with the
    large-deviation budget at the requested confidence; optional exhaustive
    locally-maximal-solution subreport at a small n.  Exceeding the time
    budget truncates the campaign and flags the report partial."""
    lam = 3.0 * c
    campaign = run_omega_campaign(n, c, formulas, seed, x_cap,
                                  time_budget_s=time_budget_s)
    cells = (x_cap + 1) * (x_cap + 2) // 2
    samples = n * campaign.completed
    rows = []
    worst = 0.0
    over_budget = 0
    for x in range(x_cap + 1):
        for p in range(x + 1):
            k = dist.kappa(x, p, lam)
            dev = abs(campaign.mean[x, p] - k)
            budget_t = deviation_budget(k, samples, confidence, cells)
            worst = max(worst, dev)
            over_budget += dev >= budget_t
            rows.append({
                "x": x, "p": p, "kappa": k,
                "mean_omega": float(campaign.mean[x, p]),
                "std_omega": float(campaign.std[x, p]),
                "deviation": dev, "budget": budget_t,
                "within_budget": bool(dev < budget_t),
            })
    report = {
        "n": n, "c": c, "formulas": campaign.completed, "seed": seed, "x_cap": x_cap,
        "requested_formulas": formulas, "partial": campaign.partial,
        "confidence": confidence, "generator": campaign.generator,
        "max_abs_deviation": worst, "cells_over_budget": over_budget,
        "ok": over_budget == 0 and not campaign.partial, "rows": rows,
    }
    if pps_sub is not None:
        sub_n, sub_formulas = pps_sub
        sat = with_pps = 0
        children = np.random.SeedSequence((seed, 0xAC)).spawn(sub_formulas)
        for child in children:
            formula = generate(sub_n, c, child)
            bitmap = pps_bitmap(formula)
            satisfiable = bool(solution_bitmap(formula).any())
            sat += satisfiable
            with_pps += satisfiable and bool(bitmap.any())
        report["pps_subreport"] = {
            "n": sub_n, "formulas": sub_formulas,
            "satisfiable": sat, "satisfiable_with_pps": with_pps,
            "ok": sat == with_pps,
        }
    return report


def empirical_csv(report: dict) -> str:
    lines = ["x,p,kappa,mean_omega,std_omega,n,formulas,seed"]
    for r in report["rows"]:
        lines.append(f"{r['x']},{r['p']},{r['kappa']:.17g},{r['mean_omega']:.17g},"
                     f"{r['std_omega']:.17g},{report['n']},{report['formulas']},"
                     f"{report['seed']}")
    return "\n".join(lines) + "\n"


# -- exhaustive counting oracle --------------------------------------------------------

def _pair_signature(formula: Formula, assignment: Assignment) -> tuple[tuple, bool]:
    """(gamma, theta, mu) signature of a pair, plus a typability flag.

    The type (x, p, j) encodes the variable's value through the sign of
    p - j.  A variable at 1 whose flip is blocked only by clauses holding
    several of its own occurrences gets j = p (no unique-satisfier cells),
    which the type system reads as value 0: such pairs are outside the
    constructive counting scheme and are censused separately.
    """
    truth = assignment.literal_truth(formula.lits)
    ntrue = truth.sum(axis=1)
    gamma = (int((ntrue == 1).sum()), int((ntrue == 2).sum()), int((ntrue == 3).sum()))
    total, pos = formula.occurrence_counts()
    theta = Counter()
    mu = Counter()
    typable = True
    for v in range(1, formula.n + 1):
        x, p = int(total[v - 1]), int(pos[v - 1])
        theta[(x, p)] += 1
        typ = variable_type(formula, assignment, v)
        typable &= (typ[2] != typ[1]) or not assignment.values[v - 1]
        mu[typ] += 1
    return (gamma, tuple(sorted(theta.items())), tuple(sorted(mu.items()))), typable


def _pair_bound(sig: tuple, n: int, m: int) -> int:
    """Exact integer upper bound on the number of (formula, solution) pairs
    sharing one signature: cell-type placement x variable typing x per-group
    cell fillings (all sigma/tau terms vanish below the occurrence cap)."""
    (k1, k2, k3), theta_items, mu_items = sig
    fact = math.factorial
    a_n = fact(m) // (fact(k1) * fact(k2) * fact(k3)) * 3 ** (k1 + k2)
    b_n = fact(n)
    for _, cnt in mu_items:
        b_n //= fact(cnt)
    true_cells = k1 + 2 * k2 + 3 * k3
    false_cells = 3 * m - true_cells
    unique_cells = sum(abs(p - j) * cnt for (x, p, j), cnt in mu_items)
    if unique_cells != k1:
        raise AssertionError("unique-satisfier cells must match type-1 clause count")
    m1 = fact(k1)
    m2 = fact(true_cells - k1)
    m3 = fact(false_cells)
    for (x, p, j), cnt in mu_items:
        if j < p:
            inner1, inner2, inner3 = p - j, j, x - p
        else:
            inner1, inner2, inner3 = j - p, x - j, p
        m1 //= fact(inner1) ** cnt
        m2 //= fact(inner2) ** cnt
        m3 //= fact(inner3) ** cnt
    return a_n * b_n * m1 * m2 * m3


def counting_oracle(n: int, c: float) -> dict:
    """Exhaust all formulas and assignments of a tiny instance and compare the
    exact per-signature census of locally-maximal pairs to the counting bound."""
    m = clause_count(n, c)
    if n > 3 or m > 2:
        raise GuardError(f"counting oracle limited to n <= 3 and m <= 2, got ({n}, {m})")
    literals = [l for v in range(1, n + 1) for l in (v, -v)]
    groups: Counter = Counter()
    pps_by_formula = 0
    pps_by_assignment = Counter()
    untypable = 0
    n_formulas = 0
    for cells in itertools.product(literals, repeat=3 * m):
        lits = np.array(cells, dtype=np.int64).reshape(m, 3)
        formula = Formula(n=n, lits=lits)
        n_formulas += 1
        for bits in range(1 << n):
            assignment = Assignment.from_bits(bits, n)
            if not is_pps(formula, assignment):
                continue
            pps_by_formula += 1
            pps_by_assignment[bits] += 1
            sig, typable = _pair_signature(formula, assignment)
            if typable:
                groups[sig] += 1
            else:
                untypable += 1
    records = []
    violations = 0
    for sig, count in sorted(groups.items()):
        bound = _pair_bound(sig, n, m)
        ok = count <= bound
        violations += not ok
        records.append({"signature": repr(sig), "count": count, "bound": bound, "ok": ok})
    return {
        "n": n, "c": c, "m": m,
        "formulas": n_formulas,
        "pairs": pps_by_formula,
        "typed_pairs": pps_by_formula - untypable,
        "untypable_pairs": untypable,
        "pairs_by_assignment": sum(pps_by_assignment.values()),
        "double_count_identity": pps_by_formula == sum(pps_by_assignment.values()),
        "signatures": len(groups),
        "violations": violations,
        "ok": violations == 0 and pps_by_formula == sum(pps_by_assignment.values()),
        "records": records,
    }


def oracle_csv(result: dict) -> str:
    lines = ["n,m,count,bound,ok,signature"]
    for r in result["records"]:
        sig = r["signature"].replace(",", ";")
        lines.append(f"{result['n']},{result['m']},{r['count']},{r['bound']},"
                     f"{int(r['ok'])},\"{sig}\"")
    return "\n".join(lines) + "\n"
