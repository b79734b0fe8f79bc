"""Separate-monotonicity certificates for the two stationarity equations.

Eq2 decreases strictly in each variable over the whole feasibility box; this
is certified by summing explicit per-cell derivative bounds (A and B below)
and comparing against lambda * phi_min.  Eq1 decreases wherever it is
positive; the exceptional index families (x = 2p+1 and x = 2p+2) are removed
to form Eq1* and Eq1**, which are then shown negative past the closed-form
turning points beta1*(phi) and phi*(beta1).  Every numeric bound produced
here feeds the certificate's constants table.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .distribution import DerivedConstants
from .errors import ConfigurationError, DomainError, SingularPointError
from .ledger import FeasibleBox
from .params import DELTA_NUM
from . import stationarity as st

SQRT3 = math.sqrt(3.0)


# -- the two R-functions of V and their tangents --------------------------------

def R_fixed_phi(V: float) -> float:
    """Logarithmic-derivative combination R for fixed phi, as a function of V alone:
    (3V^2 - 1 + 3V*sqrt(V(V-1))) / (3V + 1); concave, -> 1/2 as V -> 1+."""
    if V <= 1.0:
        raise DomainError(f"R is defined for V > 1, got {V}")
    s = math.sqrt(V * (V - 1.0))
    return (3.0 * V * V - 1.0 + 3.0 * V * s) / (3.0 * V + 1.0)


def dR_fixed_phi(V: float) -> float:
    if V <= 1.0:
        raise DomainError(f"R' is defined for V > 1, got {V}")
    s = math.sqrt(V * (V - 1.0))
    ds = (2.0 * V - 1.0) / (2.0 * s)
    num = 3.0 * V * V - 1.0 + 3.0 * V * s
    dnum = 6.0 * V + 3.0 * s + 3.0 * V * ds
    return (dnum * (3.0 * V + 1.0) - 3.0 * num) / (3.0 * V + 1.0) ** 2


def S_fixed_beta(V: float) -> float:
    """Upper bound S for R at fixed beta1: 1/2 + 3(V-1)[V-2+sqrt(V(V-1))]/(3V-4).

    The apparent pole at V = 4/3 is removable; below |3V-4| = 1e-4 the
    rationalized equivalent 1/2 + 3W/(sqrt(W(W+1)) + 1 - W), W = V-1, is used.
    """
    if V <= 1.0:
        raise DomainError(f"S is defined for V > 1, got {V}")
    w = V - 1.0
    if abs(3.0 * V - 4.0) < 1e-4:
        return 0.5 + 3.0 * w / (math.sqrt(w * (w + 1.0)) + 1.0 - w)
    return 0.5 + 3.0 * w * (w - 1.0 + math.sqrt(w * (w + 1.0))) / (3.0 * w - 1.0)


def dS_fixed_beta(V: float) -> float:
    if V <= 1.0:
        raise DomainError(f"S' is defined for V > 1, got {V}")
    w = V - 1.0
    t = math.sqrt(w * (w + 1.0))
    dt = (2.0 * w + 1.0) / (2.0 * t)
    if abs(3.0 * V - 4.0) < 1e-4:
        den = t + 1.0 - w
        return 3.0 * (den - w * (dt - 1.0)) / (den * den)
    num = 3.0 * w * (w - 1.0 + t)
    dnum = 3.0 * (w - 1.0 + t) + 3.0 * w * (1.0 + dt)
    return (dnum * (3.0 * w - 1.0) - 3.0 * num) / (3.0 * w - 1.0) ** 2


def tangent_fixed_phi(V0: float) -> tuple[float, float]:
    """Tangent line a1*V + b1 to R at V0; dominates R for V >= V0 by concavity."""
    a1 = dR_fixed_phi(V0)
    return a1, R_fixed_phi(V0) - a1 * V0


def tangent_fixed_beta(V0: float) -> tuple[float, float]:
    a1 = dS_fixed_beta(V0)
    return a1, S_fixed_beta(V0) - a1 * V0


def vfrac(V: float, p: int) -> float:
    """[p V^(p+1) - (p+1) V^p + 1] / (V^p - 1)^2; decreasing in V > 1,
    -> (1 + 1/p)/2 as V -> 1+."""
    if p < 1:
        raise DomainError("vfrac needs p >= 1")
    if V <= 1.0:
        raise DomainError("vfrac needs V > 1")
    vp = V**p
    return (p * vp * V - (p + 1) * vp + 1.0) / (vp - 1.0) ** 2


# -- the A and B derivative-sum bounds -------------------------------------------

def a_sum(v_low: float, uv_high: float, consts: DerivedConstants) -> tuple[float, np.ndarray]:
    """Bound on the A part of -dEq2: sum over p >= 1, x >= 2p of
    p * kt * vfrac(v_low, p) * [1 - 1/(1 + uv_high^(x-2p))]."""
    mask = consts.ps >= 1
    p, w, kt = consts.ps[mask], consts.w[mask], consts.kt[mask]
    vf = np.array([vfrac(v_low, int(q)) for q in p])
    terms = p * kt * vf * (1.0 - 1.0 / (1.0 + uv_high**w.astype(float)))
    return math.fsum(terms.tolist()), terms


def b_sum(a1: float, b1: float, v_low: float, consts: DerivedConstants) -> tuple[float, np.ndarray]:
    """Bound on the B part of -dEq2 via the tangent a1*V + b1 >= R and
    r/(1+rs)^2 <= 1/(4s): sum over p >= 1, x >= 2p+1 of
    p (x-2p) kt (a1 v_low - |b1|) / (4 (v_low^p - 1))."""
    if not a1 > abs(b1):
        raise DomainError(
            f"homographic-monotonicity reduction needs a1 > |b1|, got ({a1}, {b1})")
    mask = (consts.ps >= 1) & (consts.w >= 1)
    p, w, kt = consts.ps[mask], consts.w[mask], consts.kt[mask]
    coeff = (a1 * v_low - abs(b1)) / 4.0
    terms = p * w * kt * coeff / (v_low**p.astype(float) - 1.0)
    return math.fsum(terms.tolist()), terms


@dataclass
class MonotoneCertificate:
    """One direction of the Eq2 separate-monotonicity proof, fully evaluated."""

    direction: str          # "eq2_fixed_phi" | "eq2_fixed_beta1"
    A_bound: float
    B_bound: float
    extra_bound: float
    threshold: float        # lambda * phi_min
    verdict: bool
    v_min2: float
    uv_max2: float
    tangent: tuple[float, float]
    trace: dict = field(default_factory=dict)

    def total(self) -> float:
        return self.A_bound + self.B_bound + self.extra_bound

    def as_dict(self) -> dict:
        return {
            "direction": self.direction,
            "A_bound": self.A_bound,
            "B_bound": self.B_bound,
            "extra_bound": self.extra_bound,
            "total": self.total(),
            "threshold": self.threshold,
            "verdict": self.verdict,
            "v_min2": self.v_min2,
            "uv_max2": self.uv_max2,
            "tangent": list(self.tangent),
        }


def eq2_monotone_verdict(which: str, consts: DerivedConstants, params,
                         box: FeasibleBox | None = None) -> MonotoneCertificate:
    """Certify that Eq2 strictly decreases in one variable over the feasible set."""
    box = params.a_priori if box is None else box
    v_min2, _ = polygon_extremize("V_min", box)
    uv_max2, _ = polygon_extremize("UoverV_max", box)
    a_bound, a_terms = a_sum(v_min2, uv_max2, consts)
    if which == "fixed_phi":
        a1, b1 = tangent_fixed_phi(v_min2)
        extra = 0.0
    elif which == "fixed_beta1":
        a1, b1 = tangent_fixed_beta(v_min2)
        extra = params.lam * (1.0 - box.beta1_min) / 16.0
    else:
        raise ValueError(f"unknown direction {which!r}")
    b_bound, b_terms = b_sum(a1, b1, v_min2, consts)
    threshold = params.lam * box.phi_min
    verdict = a_bound + b_bound + extra + DELTA_NUM < threshold
    return MonotoneCertificate(
        direction=f"eq2_{which}",
        A_bound=a_bound, B_bound=b_bound, extra_bound=extra,
        threshold=threshold, verdict=verdict,
        v_min2=v_min2, uv_max2=uv_max2, tangent=(a1, b1),
        trace={"A_terms": a_terms.tolist(), "B_terms": b_terms.tolist()},
    )


# -- polygon extremization --------------------------------------------------------

def polygon_vertices(box: FeasibleBox) -> list[tuple[float, float]]:
    """Vertices of the feasibility polygon in the (phi, beta1) plane."""
    # each constraint as a line a*phi + b*beta1 = d
    lines = [
        (1.0, 0.0, box.phi_min), (1.0, 0.0, box.phi_max),
        (0.0, 1.0, box.beta1_min), (0.0, 1.0, box.beta1_max),
        (-3.0, -2.0, box.beta2_min - 3.0), (-3.0, -2.0, box.beta2_max - 3.0),
        (3.0, 1.0, box.beta3_min + 2.0), (3.0, 1.0, box.beta3_max + 2.0),
    ]
    tol = 1e-11
    out: list[tuple[float, float]] = []
    for i in range(len(lines)):
        for j in range(i + 1, len(lines)):
            a1, b1, d1 = lines[i]
            a2, b2, d2 = lines[j]
            det = a1 * b2 - a2 * b1
            if abs(det) < 1e-12:
                continue
            phi = (d1 * b2 - d2 * b1) / det
            beta1 = (a1 * d2 - a2 * d1) / det
            beta2 = 3.0 * (1.0 - phi) - 2.0 * beta1
            beta3 = beta1 - 2.0 + 3.0 * phi
            if (box.phi_min - tol <= phi <= box.phi_max + tol
                    and box.beta1_min - tol <= beta1 <= box.beta1_max + tol
                    and box.beta2_min - tol <= beta2 <= box.beta2_max + tol
                    and box.beta3_min - tol <= beta3 <= box.beta3_max + tol):
                if not any(abs(phi - f) < 1e-10 and abs(beta1 - b) < 1e-10 for f, b in out):
                    out.append((phi, beta1))
    return out


def _uv_on(phi: np.ndarray, beta1: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    beta2 = 3.0 * (1.0 - phi) - 2.0 * beta1
    beta3 = beta1 - 2.0 + 3.0 * phi
    y = 3.0 * phi - beta1
    u = 9.0 * (1.0 - phi) * beta3 / (y * beta2)
    v = 1.0 + beta2 * beta2 / (3.0 * y * beta3)
    return u, v


def polygon_extremize(target: str, box: FeasibleBox,
                      edge_samples: int = 4000) -> tuple[float, tuple[float, float]]:
    """Extremize V (min) or U/V (max) over the feasibility polygon.

    Double-entry evaluation: the closed-form value at the (beta2_min,
    beta3_max) vertex versus dense boundary sampling including all exact
    vertices; disagreement beyond 1e-7 aborts.
    """
    b2m, b3M = box.beta2_min, box.beta3_max
    if target == "V_min":
        analytic = 1.0 + b2m**2 / (3.0 * b3M * (2.0 * b2m + 3.0 * b3M))
    elif target == "UoverV_max":
        analytic = 9.0 * (2.0 * (1.0 - b3M) - b2m) * b3M**2 / (b2m * (b2m + 3.0 * b3M) ** 2)
    else:
        raise ValueError(f"unknown extremization target {target!r}")

    verts = polygon_vertices(box)
    if len(verts) < 3:
        raise ConfigurationError("feasibility polygon is degenerate")
    pts_phi, pts_b = [], []
    for (f1, b1), (f2, b2) in zip(verts, verts[1:] + verts[:1]):
        # vertex order is arbitrary; chords still sample the boundary region
        t = np.linspace(0.0, 1.0, edge_samples // len(verts))
        pts_phi.append(f1 + (f2 - f1) * t)
        pts_b.append(b1 + (b2 - b1) * t)
    phi = np.concatenate([np.array([f for f, _ in verts])] + pts_phi)
    beta1 = np.concatenate([np.array([b for _, b in verts])] + pts_b)
    u, v = _uv_on(phi, beta1)
    if target == "V_min":
        k = int(np.argmin(v))
        sampled = float(v[k])
    else:
        k = int(np.argmax(u / v))
        sampled = float((u / v)[k])
    if abs(sampled - analytic) > 1e-7:
        raise ConfigurationError(
            f"{target}: vertex formula {analytic!r} disagrees with boundary "
            f"sampling {sampled!r}")
    return analytic, (float(phi[k]), float(beta1[k]))


# -- Eq1 exceptional-family analysis ----------------------------------------------

def beta1_star(phi: float) -> float:
    """Turning point of the x = 2p+1 terms at fixed phi: sqrt(3) - 3(sqrt(3)-1) phi."""
    return SQRT3 - 3.0 * (SQRT3 - 1.0) * phi


def phi_star(beta1: float) -> float:
    """Turning point of the 2p+1 <= x <= 2p+2 terms at fixed beta1; decreases
    from 3/4 at beta1 = 0 to 1/3 at beta1 = 1."""
    t = 2.0 - beta1
    return (15.0 - 9.0 / t - 2.0 * beta1
            - SQRT3 * (1.0 - beta1) * math.sqrt(4.0 * beta1 * beta1 + 4.0 * beta1 + 3.0) / t) / 12.0


def uv_star(beta1: float) -> tuple[float, float]:
    """(U, V) evaluated on the curve phi = phi_star(beta1), in closed form.

    With A = 9 - sqrt(3) sqrt(3 + 4 b1 + 4 b1^2) and B = 4 - 2 b1:
    V* = (4/3) A^2 / ((A-B)(A+3B)) and
    U*/V* = (3/8) (A-B)^2 [3(1+2 b1) + (9-A)] / (A (1-b1) (3B-A)).
    V* decreases and U*/V* increases over b1 in [0, 1].
    """
    a = 9.0 - SQRT3 * math.sqrt(3.0 + 4.0 * beta1 + 4.0 * beta1 * beta1)
    b = 4.0 - 2.0 * beta1
    v = (4.0 / 3.0) * a * a / ((a - b) * (a + 3.0 * b))
    if beta1 >= 1.0:
        return math.inf, v
    uv = (3.0 / 8.0) * (a - b) ** 2 * (3.0 * (1.0 + 2.0 * beta1) + (9.0 - a)) \
        / (a * (1.0 - beta1) * (3.0 * b - a))
    return uv * v, v


def eq1_partial(variant: str, pt: st.PhiBetaPoint, consts: DerivedConstants, params) -> float:
    """Eq1 with the non-monotone index families removed; always >= eq1.

    "star" drops x = 2p+1; "star_star" drops 2p+1 <= x <= 2p+2.
    """
    if variant == "star":
        keep = consts.w != 1
    elif variant == "star_star":
        keep = (consts.w < 1) | (consts.w > 2)
    else:
        raise ValueError(f"unknown variant {variant!r}")
    keep &= (consts.ps >= 1) & (consts.w > 0)
    kt, w, p = consts.kt[keep], consts.w[keep], consts.ps[keep]
    return float(st._eq1_core(pt.phi, pt.U, pt.V, params.lam, consts.K_tilde, kt, w, p))


def eq1_star_majorant(consts: DerivedConstants, params, box: FeasibleBox | None = None) -> float:
    """Upper bound of Eq1* along beta1 = beta1_star(phi), uniform in phi.

    There U = 3(1-phi)/(3phi-1) and V = 2/sqrt(3), so U/V decreases in phi and
    is bounded below by its value at phi_max; the negative sum is evaluated
    with that floor and lambda*phi with phi_min.
    """
    box = params.a_priori if box is None else box
    q = (3.0 * SQRT3 / 2.0) * (1.0 - box.phi_max) / (3.0 * box.phi_max - 1.0)
    r = SQRT3 / 2.0  # 1/V at beta1_star
    mask = (consts.ps >= 1) & (consts.w >= 2)
    kt, w, p = consts.kt[mask], consts.w[mask], consts.ps[mask]
    bracket = 1.0 - 1.0 / (1.0 + q**w.astype(float) * (1.0 - r**p.astype(float)))
    s = math.fsum((kt * w * bracket).tolist())
    return consts.K_tilde - params.lam * box.phi_min - s


def m_bound(b1_low: float, b1_high: float, consts: DerivedConstants, params) -> float:
    """Upper bound of Eq1** on the band b1_low <= beta1 <= b1_high along phi_star:
    K - lambda phi*(b1_high) - sum_{p>=1, x>=2p+3} kt (x-2p)
    [1 - 1/(1 + (U*/V*)(b1_low)^(x-2p) (1 - V*(b1_high)^-p))]."""
    u_lo, v_lo = uv_star(b1_low)
    _, v_hi = uv_star(b1_high)
    uv_floor = u_lo / v_lo
    mask = (consts.ps >= 1) & (consts.w >= 3)
    kt, w, p = consts.kt[mask], consts.w[mask], consts.ps[mask]
    bracket = 1.0 - 1.0 / (1.0 + uv_floor**w.astype(float) * (1.0 - (1.0 / v_hi)**p.astype(float)))
    s = math.fsum((kt * w * bracket).tolist())
    return consts.K_tilde - params.lam * phi_star(b1_high) - s


#: Bands whose M-bounds certify Eq1** < 0 across the certification beta1 range.
M_BANDS = ((0.33, 0.39), (0.39, 0.428), (0.428, 0.468), (0.468, 0.529))


# -- grid certifications ------------------------------------------------------------

def monotone_grid_report(consts: DerivedConstants, params, n: int = 40,
                         box: FeasibleBox | None = None) -> dict:
    """Finite-difference monotonicity certification on an n x n feasible grid.

    Checks, on adjacent feasible pairs: eq2 strictly decreasing in each
    variable; eq1 decreasing wherever positive; U increasing and V decreasing
    in each variable.  Returns the booleans plus the worst margins.
    """
    box = params.a_priori if box is None else box
    phis = np.linspace(box.phi_min, box.phi_max, n)
    b1s = np.linspace(box.beta1_min, box.beta1_max, n)
    e1 = np.full((n, n), np.nan)
    e2 = np.full((n, n), np.nan)
    uu = np.full((n, n), np.nan)
    vv = np.full((n, n), np.nan)
    feas = np.zeros((n, n), dtype=bool)
    for i, f in enumerate(phis):
        for j, b in enumerate(b1s):
            if not box.contains(f, b):
                continue
            try:
                pt = st.derive_point(f, b, box)
            except SingularPointError:
                continue
            feas[i, j] = True
            e1[i, j] = st.eq1(pt, consts, params)
            e2[i, j] = st.eq2(pt, consts, params)
            uu[i, j] = pt.U
            vv[i, j] = pt.V

    def paired(mat, axis):
        a = mat[:-1, :] if axis == 0 else mat[:, :-1]
        b = mat[1:, :] if axis == 0 else mat[:, 1:]
        ok = (feas[:-1, :] & feas[1:, :]) if axis == 0 else (feas[:, :-1] & feas[:, 1:])
        return a[ok], b[ok]

    report: dict = {"n": n, "feasible_points": int(feas.sum())}
    worst: dict = {}
    oks: dict = {}
    for name, mat, want in (("eq2", e2, "dec"), ("U", uu, "inc"), ("V", vv, "dec")):
        flags = []
        for axis in (0, 1):
            a, b = paired(mat, axis)
            diff = b - a
            if want == "dec":
                flags.append(bool(np.all(diff < -DELTA_NUM)))
                worst[f"{name}_axis{axis}"] = float(diff.max()) if diff.size else math.nan
            else:
                flags.append(bool(np.all(diff > DELTA_NUM)))
                worst[f"{name}_axis{axis}"] = float(diff.min()) if diff.size else math.nan
        oks[name] = all(flags)
    # eq1: wherever positive, next value along either axis must be lower
    flags = []
    for axis in (0, 1):
        a, b = paired(e1, axis)
        sel = a > 0.0
        diff = (b - a)[sel]
        flags.append(bool(np.all(diff < -DELTA_NUM)))
        worst[f"eq1_axis{axis}"] = float(diff.max()) if diff.size else math.nan
    oks["eq1_where_positive"] = all(flags)
    report.update(oks)
    report["worst_margins"] = worst
    report["ok"] = all(oks.values())
    return report
