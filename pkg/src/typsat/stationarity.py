"""Two-variable reduction of the constrained entropy maximization.

The stationary proportions mu_(x,p,j) of a locally maximal solution can all
be expressed through two aggregates of themselves,

    U = 9(1-phi) b3 / ((3 phi - b1) b2),
    V = 1 + b2^2 / (3 (3 phi - b1) b3) = (b1 + 6 phi - 3)^2 / (3 b3 (3 phi - b1)),

with b2 = 3(1-phi) - 2 b1 and b3 = b1 - 2 + 3 phi, which turns the full
N-dimensional Lagrange system into two scalar equations Eq1(phi, b1) = 0 and
Eq2(phi, b1) = 0 over the occurrence triangle.  This module evaluates those
equations, the closed-form mu and alpha, the normalizing product g2, the
objective and its gradient, and the per-variable expectation-rate bound in
point and rectangle (corner-majorized) modes.

All triangle products are log-domain sums accumulated with exact (fsum)
summation; the same code paths run on outward-rounded intervals for the
certified pass.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .distribution import DerivedConstants, log_comb, log_factorial
from .errors import DomainError, SingularPointError
from .intervals import Interval, lower, upper, xexp, xlog, xsum
from .ledger import ErrorBudget, FeasibleBox

LOG2 = math.log(2.0)


# -- the (phi, beta1) point ----------------------------------------------------

@dataclass(frozen=True)
class PhiBetaPoint:
    phi: float
    beta1: float
    beta2: float
    beta3: float
    X: float
    Y: float
    Z: float
    U: float
    V: float
    feasible: bool


def point_fields(phi, beta1):
    """Derived fields shared by the float and interval paths."""
    beta2 = 3.0 * (1.0 - phi) - 2.0 * beta1
    beta3 = beta1 - 2.0 + 3.0 * phi
    Y = 3.0 * phi - beta1
    return beta2, beta3, Y


def derive_point(phi: float, beta1: float, box: FeasibleBox) -> PhiBetaPoint:
    """Compute all derived fields; raises SingularPointError where U/V is undefined."""
    beta2, beta3, Y = point_fields(phi, beta1)
    if Y <= 0.0 or beta2 <= 0.0 or beta3 <= 0.0:
        raise SingularPointError(
            f"U/V undefined at (phi={phi}, beta1={beta1}): "
            f"Y={Y:.6g}, beta2={beta2:.6g}, beta3={beta3:.6g}"
        )
    U = 9.0 * (1.0 - phi) * beta3 / (Y * beta2)
    V = 1.0 + beta2 * beta2 / (3.0 * Y * beta3)
    feasible = box.contains(phi, beta1)
    return PhiBetaPoint(
        phi=phi, beta1=beta1, beta2=beta2, beta3=beta3,
        X=3.0 * phi - 1.0, Y=Y, Z=1.0 - beta1, U=U, V=V, feasible=feasible,
    )


def v_alternate_form(pt: PhiBetaPoint) -> float:
    """V as (b1 + 6 phi - 3)^2 / (3 b3 (3 phi - b1)); must agree with pt.V."""
    t = pt.beta1 + 6.0 * pt.phi - 3.0
    return t * t / (3.0 * pt.beta3 * pt.Y)


# -- the two stationarity equations ---------------------------------------------

def _strict_arrays(consts: DerivedConstants, include_diagonal: bool):
    if include_diagonal:
        mask = consts.ps >= 1
    else:
        mask = (consts.ps >= 1) & (consts.w > 0)
    return consts.kt[mask], consts.w[mask], consts.ps[mask]


def _eq1_core(phi, U, V, lam, k_tilde, kt, w, p):
    logUV = xlog(U) - xlog(V)
    logV = xlog(V)
    E = xexp(w * logUV) * (1.0 - xexp(-(p * logV)))
    s = xsum(kt * w * (1.0 - 1.0 / (1.0 + E)))
    return k_tilde - lam * phi - s


def eq1(pt: PhiBetaPoint, consts: DerivedConstants, params, *, include_diagonal: bool = False) -> float:
    """Residual of the first stationarity equation (diagonal terms vanish identically)."""
    kt, w, p = _strict_arrays(consts, include_diagonal)
    return float(_eq1_core(pt.phi, pt.U, pt.V, params.lam, consts.K_tilde, kt, w, p))


def _eq2_core_mod2(phi, beta1, U, V, lam, c, kt, w, p):
    logUV = xlog(U) - xlog(V)
    logV = xlog(V)
    vmp = xexp(-(p * logV))          # V^-p
    E = xexp(w * logUV) * (1.0 - vmp)
    vp_minus_1 = xexp(p * logV) - 1.0
    terms = p * kt * ((V - 1.0) / (V * vp_minus_1)) * (1.0 - 1.0 / (1.0 + E))
    return -beta1 * c + lam * phi * (1.0 - 1.0 / V) + xsum(terms)


def _eq2_core_eqb1(phi, beta1, U, V, lam, c, kt, w, p):
    logUV = xlog(U) - xlog(V)
    logV = xlog(V)
    uvw = xexp(w * logUV)
    d = 1.0 + uvw * (1.0 - xexp(-(p * logV)))
    s = xsum(kt * (p * uvw + (w + p)) / d)
    return -beta1 * c + ((V - 1.0) / V) * s


def eq2(pt: PhiBetaPoint, consts: DerivedConstants, params, *, form: str = "mod2") -> float:
    """Residual of the second stationarity equation.

    form "mod2" is the production expression (p >= 1 terms only); form "eqb1"
    is the raw elimination output over the full triangle, equivalent whenever
    eq1 vanishes.
    """
    if pt.V <= 1.0:
        raise SingularPointError(f"eq2 needs V > 1, got V = {pt.V}")
    if form == "mod2":
        mask = consts.ps >= 1
        kt, w, p = consts.kt[mask], consts.w[mask], consts.ps[mask]
        return float(_eq2_core_mod2(pt.phi, pt.beta1, pt.U, pt.V, params.lam, params.c, kt, w, p))
    if form == "eqb1":
        return float(_eq2_core_eqb1(
            pt.phi, pt.beta1, pt.U, pt.V, params.lam, params.c, consts.kt, consts.w, consts.ps))
    raise ValueError(f"unknown eq2 form {form!r}")


# -- closed-form mu, alpha, g2 ---------------------------------------------------

@lru_cache(maxsize=4)
def mu_index(x_max: int):
    """Flattened (x, p, j) triples over 0 <= 2p <= x <= x_max, row-aligned with
    the DerivedConstants triangle order."""
    tx, tp, tj, row = [], [], [], []
    r = 0
    for x in range(x_max + 1):
        for p in range(x // 2 + 1):
            for j in range(x + 1):
                tx.append(x)
                tp.append(p)
                tj.append(j)
                row.append(r)
            r += 1
    tx = np.array(tx, dtype=np.int64)
    tp = np.array(tp, dtype=np.int64)
    tj = np.array(tj, dtype=np.int64)
    row = np.array(row, dtype=np.int64)
    lt = tj < tp
    log_h = np.where(
        lt,
        [log_comb(int(p), int(j)) for p, j in zip(tp, tj)],
        [log_comb(int(x - p), int(j - p)) if j >= p else 0.0 for x, p, j in zip(tx, tp, tj)],
    )
    row_starts = np.flatnonzero(np.r_[1, np.diff(row)])
    return {
        "x": tx, "p": tp, "j": tj, "row": row, "lt": lt,
        "pmj": np.abs(tp - tj), "w": tx - 2 * tp, "log_h": log_h,
        "row_starts": row_starts, "n_rows": r,
    }


def h_weight(x: int, p: int, j: int) -> int:
    """Ways to pick the flip-preventing true literals of a type-(x, p, j) variable."""
    return math.comb(p, j) if j < p else math.comb(x - p, j - p)


def _log_den_rows(consts: DerivedConstants, U: float, V: float) -> np.ndarray:
    """log(U^(x-2p) (V^p - 1) + V^(x-p)) per triangle row."""
    logU, logV = math.log(U), math.log(V)
    w, p, x = consts.w, consts.ps, consts.xs
    with np.errstate(divide="ignore"):
        a = w * logU + np.log(np.expm1(p * logV))  # -inf at p = 0
    b = (x - p) * logV
    return np.logaddexp(a, b)


def mu_closed_form(x: int, p: int, j: int, pt: PhiBetaPoint) -> float:
    """Stationary proportion of type-(x, p, j) variables at the point pt."""
    if not (0 <= 2 * p <= x) or not (0 <= j <= x):
        raise DomainError(f"mu needs 0 <= 2p <= x and 0 <= j <= x, got {(x, p, j)}")
    if pt.V <= 1.0:
        raise DomainError(f"mu closed form needs V > 1, got V = {pt.V}")
    logU, logV = math.log(pt.U), math.log(pt.V)
    if p == 0:
        log_den = x * logV
    else:
        log_den = np.logaddexp((x - 2 * p) * logU + math.log(math.expm1(p * logV)),
                               (x - p) * logV)
    logv1 = math.log(pt.V - 1.0)
    if j < p:
        return math.exp(log_comb(p, j) + (x - 2 * p) * logU + (p - j) * logv1 - log_den)
    return math.exp(log_comb(x - p, j - p) + (j - p) * logv1 - log_den)


def alpha_closed_form(x: int, p: int, pt: PhiBetaPoint) -> float:
    """sum_{j<p} mu in closed form: U^(x-2p)(V^p-1) / (U^(x-2p)(V^p-1)+V^(x-p))."""
    if p == 0:
        return 0.0
    logU, logV = math.log(pt.U), math.log(pt.V)
    a = (x - 2 * p) * logU + math.log(math.expm1(p * logV))
    b = (x - p) * logV
    return math.exp(a - np.logaddexp(a, b))


@dataclass(frozen=True)
class MuTable:
    """Stationary mu over the flattened triple index, with row aggregates."""

    x_max: int
    mu: np.ndarray      # per (x, p, j) triple
    alpha: np.ndarray   # per (x, p) row: sum_{j<p} mu
    log_h: np.ndarray

    def row_sums(self) -> np.ndarray:
        idx = mu_index(self.x_max)
        return np.add.reduceat(self.mu, idx["row_starts"])

    def value(self, x: int, p: int, j: int) -> float:
        idx = mu_index(self.x_max)
        sel = (idx["x"] == x) & (idx["p"] == p) & (idx["j"] == j)
        (k,) = np.flatnonzero(sel)
        return float(self.mu[k])


def mu_table(pt: PhiBetaPoint, consts: DerivedConstants) -> MuTable:
    idx = mu_index(consts.x_max)
    logU, logV = math.log(pt.U), math.log(pt.V)
    logv1 = math.log(pt.V - 1.0)
    log_den_rows = _log_den_rows(consts, pt.U, pt.V)
    logmu = (idx["log_h"] + np.where(idx["lt"], idx["w"] * logU, 0.0)
             + idx["pmj"] * logv1 - log_den_rows[idx["row"]])
    mu = np.exp(logmu)
    alpha = np.array([
        alpha_closed_form(int(x), int(p), pt) for x, p in zip(consts.xs, consts.ps)
    ])
    return MuTable(x_max=consts.x_max, mu=mu, alpha=alpha, log_h=idx["log_h"])


def _log_g2_core(phi, beta1, U, V, lam, c, k_tilde, kt, w, p, xmp):
    logU, logV = xlog(U), xlog(V)
    d = 1.0 + xexp(w * (logU - logV)) * (1.0 - xexp(-(p * logV)))
    log_den = xmp * logV + xlog(d)
    return xsum(kt * log_den) - (k_tilde - lam * phi) * logU - beta1 * c * xlog(V - 1.0)


def log_g2(pt: PhiBetaPoint, consts: DerivedConstants, params) -> float:
    """log of the normalizing product prod Den^kt / (U^(K-lam phi) (V-1)^(b1 c))."""
    if pt.V <= 1.0:
        raise DomainError(f"g2 needs V > 1, got V = {pt.V}")
    return float(_log_g2_core(
        pt.phi, pt.beta1, pt.U, pt.V, params.lam, params.c, consts.K_tilde,
        consts.kt, consts.w, consts.ps, consts.xs - consts.ps))


def g2(pt: PhiBetaPoint, consts: DerivedConstants, params) -> float:
    return math.exp(log_g2(pt, consts, params))


# -- expectation-rate bound ------------------------------------------------------

def log_base_constant(consts: DerivedConstants, params) -> float:
    """n-free constant: 3^c (lam/6e)^lam 2^(sum_{x>2p} kt) / prod [p!(x-p)! kt]^kt."""
    lam, c = params.lam, params.c
    kt, xs, ps, w = consts.kt, consts.xs, consts.ps, consts.w
    sum_strict = math.fsum(kt[w > 0].tolist())
    log_fact = np.array([log_factorial(int(p)) + log_factorial(int(x - p))
                         for x, p in zip(xs, ps)])
    with np.errstate(divide="ignore", invalid="ignore"):
        log_kt = np.where(kt > 0.0, np.log(np.maximum(kt, 1e-300)), 0.0)
    denom = math.fsum((kt * (log_fact + log_kt)).tolist())
    return c * math.log(3.0) + lam * (math.log(lam) - math.log(6.0) - 1.0) \
        + sum_strict * LOG2 - denom


def rate_bound_point(pt: PhiBetaPoint, consts: DerivedConstants, params,
                     budget: ErrorBudget) -> float:
    """Point-mode expectation rate: the n-independent factor, prefactors included,
    unbalancing factor excluded.  Exploratory only."""
    if not pt.feasible:
        raise DomainError("rate bound requires a feasible point")
    y, phi_c = pt.Y, pt.phi
    f = (y * math.log(y) + 3.0 * (1.0 - phi_c) * math.log(3.0 * (1.0 - phi_c))
         - pt.beta2 * math.log(pt.beta2) - pt.beta3 * math.log(3.0 * pt.beta3))
    log_rate = (log_base_constant(consts, params) + math.log(upper(budget.prefactor))
                + log_g2(pt, consts, params) + params.c * f)
    return math.exp(log_rate)


def _xmax2(a, b):
    if isinstance(a, Interval) or isinstance(b, Interval):
        a = a if isinstance(a, Interval) else Interval(a)
        b = b if isinstance(b, Interval) else Interval(b)
        return Interval(np.maximum(a.lo, b.lo), np.maximum(a.hi, b.hi))
    return max(a, b)


def _max_xlogx(lo, hi):
    """max of t*log(t) over [lo, hi] (attained at an endpoint)."""
    return _xmax2(lo * xlog(lo), hi * xlog(hi))


def _max_neg_xlogsx(lo, hi, s: float):
    """max of -t*log(s*t) over [lo, hi]; interior peak at t = 1/(s*e)."""
    best = _xmax2(-(lo * xlog(s * lo)), -(hi * xlog(s * hi)))
    t_star = 1.0 / (s * math.e)
    if lower(lo) < t_star < upper(hi):
        best = _xmax2(best, t_star)
    return best


def _pow_box_max_log(alo, ahi, blo, bhi):
    """max of b*log(a) over the box [alo, ahi] x [blo, bhi] (corner-attained)."""
    la, lb = xlog(alo), xlog(ahi)
    return _xmax2(_xmax2(blo * la, blo * lb), _xmax2(bhi * la, bhi * lb))


def rate_bound_rectangle(phi_lo: float, phi_hi: float, b1_lo: float, b1_hi: float,
                         consts: DerivedConstants, params, budget: ErrorBudget,
                         *, kt=None, w=None, ps=None, xs=None, k_tilde=None,
                         lam=None, c=None, log_base=None) -> float:
    """Uniform upper bound of the point rate over a feasibility rectangle.

    Corner monotonicity: the triangle product grows in U and V, so it is
    evaluated at (U_max, V_max); the U- and (V-1)-powers and the four
    x^x-style factors are majorized over their induced ranges corner by
    corner.  The unbalancing factor 2^(rho + eps*Delta) is included.
    Passing interval-table keywords reruns the whole bound outward-rounded.
    """
    box = params.a_priori
    for corner in ((phi_lo, b1_lo), (phi_lo, b1_hi), (phi_hi, b1_lo), (phi_hi, b1_hi)):
        if not box.contains(*corner):
            raise DomainError(f"rectangle corner {corner} is outside the feasible box")

    kt = consts.kt if kt is None else kt
    w = consts.w if w is None else w
    ps = consts.ps if ps is None else ps
    xs = consts.xs if xs is None else xs
    k_tilde = consts.K_tilde if k_tilde is None else k_tilde
    lam = params.lam if lam is None else lam
    c = params.c if c is None else c
    log_base = log_base_constant(consts, params) if log_base is None else log_base

    # U increases, V decreases in each variable
    def uv(phi, beta1):
        beta2, beta3, y = point_fields(phi, beta1)
        u = 9.0 * (1.0 - phi) * beta3 / (y * beta2)
        v = 1.0 + beta2 * beta2 / (3.0 * y * beta3)
        return u, v

    u_max, v_min = uv(phi_hi, b1_hi)
    u_min, v_max = uv(phi_lo, b1_lo)

    logU, logV = xlog(u_max), xlog(v_max)
    d = 1.0 + xexp(w * (logU - logV)) * (1.0 - xexp(-(ps * logV)))
    log_big = xsum(kt * ((xs - ps) * logV + xlog(d)))

    e_upow = _pow_box_max_log(u_min, u_max, lam * phi_lo - k_tilde, lam * phi_hi - k_tilde)
    e_vpow = _pow_box_max_log(v_min - 1.0, v_max - 1.0, -(c * b1_hi), -(c * b1_lo))

    y_lo, y_hi = 3.0 * phi_lo - b1_hi, 3.0 * phi_hi - b1_lo
    t_y = _max_xlogx(y_lo, y_hi)
    t_m = _max_xlogx(3.0 * (1.0 - phi_hi), 3.0 * (1.0 - phi_lo))
    b2_lo, b2_hi = 3.0 * (1.0 - phi_hi) - 2.0 * b1_hi, 3.0 * (1.0 - phi_lo) - 2.0 * b1_lo
    t_b2 = _max_neg_xlogsx(b2_lo, b2_hi, 1.0)
    b3_lo, b3_hi = b1_lo - 2.0 + 3.0 * phi_lo, b1_hi - 2.0 + 3.0 * phi_hi
    t_b3 = _max_neg_xlogsx(b3_lo, b3_hi, 3.0)

    log_rate = (log_base + xlog(budget.prefactor) + log_big + e_upow + e_vpow
                + c * (t_y + t_m + t_b2 + t_b3) + xlog(budget.unbalancing))
    return xexp(log_rate)


def rate_bound(target, consts: DerivedConstants, params, budget: ErrorBudget):
    """Point mode for a PhiBetaPoint, rectangle mode for a 4-tuple of bounds."""
    if isinstance(target, PhiBetaPoint):
        return rate_bound_point(target, consts, params, budget)
    phi_lo, phi_hi, b1_lo, b1_hi = target
    return rate_bound_rectangle(phi_lo, phi_hi, b1_lo, b1_hi, consts, params, budget)


# -- objective and gradient -------------------------------------------------------

def beta1_of_mu(mu: np.ndarray, consts: DerivedConstants) -> float:
    idx = mu_index(consts.x_max)
    kt_tri = consts.kt[idx["row"]]
    return math.fsum((kt_tri * idx["pmj"] * mu).tolist()) / (consts.lam / 3.0)


def phi_of_mu(mu: np.ndarray, consts: DerivedConstants) -> float:
    """phi through the alpha form: (K - sum (x-2p) kt alpha) / lambda."""
    idx = mu_index(consts.x_max)
    alpha_terms = np.where(idx["lt"], mu, 0.0)
    alpha = np.add.reduceat(alpha_terms, idx["row_starts"])
    s = math.fsum((consts.w * consts.kt * alpha).tolist())
    return (consts.K_tilde - s) / consts.lam


def objective_f1(mu: np.ndarray, consts: DerivedConstants, params) -> float:
    """Entropy-style objective whose maximum bounds the expectation exponent."""
    if np.any(mu <= 0.0):
        raise DomainError("objective is only evaluated at strictly positive mu")
    idx = mu_index(consts.x_max)
    kt_tri = consts.kt[idx["row"]]
    ent = math.fsum((kt_tri * mu * (idx["log_h"] - np.log(mu))).tolist())
    phi, beta1 = phi_of_mu(mu, consts), beta1_of_mu(mu, consts)
    beta2, beta3, y = point_fields(phi, beta1)
    if min(y, beta2, beta3, 1.0 - phi) <= 0.0:
        raise DomainError(f"derived point infeasible: phi={phi}, beta1={beta1}")
    f = (y * math.log(y) + 3.0 * (1.0 - phi) * math.log(3.0 * (1.0 - phi))
         - beta2 * math.log(beta2) - beta3 * math.log(3.0 * beta3))
    return ent + params.c * f


def gradient_f1(mu: np.ndarray, consts: DerivedConstants, params) -> np.ndarray:
    """Per-(x, p, j) partials: kt [log(h/mu) - 1 + (x-2p) log U (j < p branch)
    + |p-j| log(V-1)]."""
    if np.any(mu <= 0.0):
        raise DomainError("gradient undefined at a null coordinate")
    idx = mu_index(consts.x_max)
    kt_tri = consts.kt[idx["row"]]
    phi, beta1 = phi_of_mu(mu, consts), beta1_of_mu(mu, consts)
    beta2, beta3, y = point_fields(phi, beta1)
    if min(y, beta2, beta3, 1.0 - phi) <= 0.0:
        raise DomainError(f"derived point infeasible: phi={phi}, beta1={beta1}")
    u = 9.0 * (1.0 - phi) * beta3 / (y * beta2)
    v1 = beta2 * beta2 / (3.0 * y * beta3)  # V - 1 > 0
    return kt_tri * (idx["log_h"] - np.log(mu) - 1.0
                     + np.where(idx["lt"], idx["w"] * math.log(u), 0.0)
                     + idx["pmj"] * math.log(v1))


def projected_gradient(mu: np.ndarray, consts: DerivedConstants, params) -> np.ndarray:
    """Gradient minus its per-row mean; vanishes at Lagrange-stationary mu."""
    g = gradient_f1(mu, consts, params)
    idx = mu_index(consts.x_max)
    starts = idx["row_starts"]
    sums = np.add.reduceat(g, starts)
    counts = np.add.reduceat(np.ones_like(g), starts)
    return g - (sums / counts)[idx["row"]]
