"""Finite-size error budget: every multiplicative slack factor of the certificate.

The asymptotic analysis replaces the unknown finite-n occurrence proportions
by their limiting values.  The cost of each replacement is a factor >= 1:
the tail/accuracy bounds R1, R2, R3, the x^x-replacement helper L, and the
grouped factors G1 (sigma/tau elimination) and G2 = GA*GB*GC (powers-and-
factorials product).  Everything here is monotone nondecreasing in the
accuracy radius eps and is computed in the log domain with exact integer
factorials; passing Interval inputs re-derives the whole budget with outward
rounding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .distribution import big_d, p2, p3, rho_tail_interval
from .errors import ConfigurationError, DomainError
from .intervals import Interval, upper, xexp, xlog


@dataclass(frozen=True)
class FeasibleBox:
    """The eight interval bounds confining (beta1, beta2, beta3, phi)."""

    beta1_min: float
    beta1_max: float
    beta2_min: float
    beta2_max: float
    beta3_min: float
    beta3_max: float
    phi_min: float
    phi_max: float

    def contains(self, phi: float, beta1: float) -> bool:
        beta2 = 3.0 * (1.0 - phi) - 2.0 * beta1
        beta3 = beta1 - 2.0 + 3.0 * phi
        return (
            self.phi_min <= phi <= self.phi_max
            and self.beta1_min <= beta1 <= self.beta1_max
            and self.beta2_min <= beta2 <= self.beta2_max
            and self.beta3_min <= beta3 <= self.beta3_max
        )

    def in_rectangle(self, phi: float, beta1: float) -> bool:
        return self.phi_min <= phi <= self.phi_max and self.beta1_min <= beta1 <= self.beta1_max

    def as_dict(self) -> dict:
        return {k: getattr(self, k) for k in (
            "beta1_min", "beta1_max", "beta2_min", "beta2_max",
            "beta3_min", "beta3_max", "phi_min", "phi_max")}


def L(eta):
    """(2*eta)^(-2*eta), valid for 0 < eta <= 0.05; sandwiches y^y/x^x for |x-y| <= eta."""
    if upper(eta) > 0.05 or not (0.0 < upper(eta)):
        raise DomainError(f"L is only available for eta in (0, 0.05], got {eta}")
    if isinstance(eta, Interval) and eta.lower() <= 0.0:
        raise DomainError("L of an interval reaching down to 0")
    two_eta = 2.0 * eta
    return xexp(-(two_eta) * xlog(two_eta))


def _L_or_limit(eta, record: list | None = None):
    """L(eta) with the eta -> 0+ limit value 1 (used only for eps = 0 probes)."""
    if upper(eta) == 0.0:
        return 1.0
    val = L(eta)
    if record is not None:
        record.append((eta, val))
    return val


def _log_factorial(n: int, as_interval: bool):
    if as_interval:
        return Interval.log_of_int(math.factorial(n)) if n > 1 else Interval(0.0)
    return math.log(math.factorial(n)) if n > 1 else 0.0


def _ln_int(n: int, as_interval: bool):
    return Interval.log_of_int(n) if as_interval else math.log(n)


def _euler(as_interval: bool):
    if as_interval:
        import numpy as np
        return Interval(float(np.nextafter(math.e, 0.0)), float(np.nextafter(math.e, 4.0)))
    return math.e


def r1(eps, x_max: int, lam_max):
    """Tail bound on the heavy-variable proportion tau."""
    as_iv = isinstance(lam_max, Interval) or isinstance(eps, Interval)
    tail = xexp((x_max + 1) * xlog(lam_max) - _log_factorial(x_max + 1, as_iv))
    return tail + eps * float(big_d(x_max))


def r2(eps, x_max: int, lam_max):
    """Bound on the heavy-occurrence proportion sigma."""
    as_iv = isinstance(lam_max, Interval) or isinstance(eps, Interval)
    tail = xexp((x_max + 1) * xlog(lam_max) - _log_factorial(x_max, as_iv))
    return tail + eps * p2(x_max)


def r3(eps, x_max: int, lam_min, lam_max):
    """Accuracy radius transferred to (phi, beta_j): |phi - psi| <= R3 etc."""
    as_iv = isinstance(lam_max, Interval) or isinstance(eps, Interval)
    tail = xexp(x_max * xlog(lam_max) - _log_factorial(x_max, as_iv))
    return tail + (eps / lam_min) * (p2(x_max) + p3(x_max))


def widen_intervals(gamma_psi: dict, r3_value: float) -> FeasibleBox:
    """Shift the a-priori (gamma, psi) intervals outward by their R3 multiples.

    gamma_psi maps "gamma1"/"gamma2"/"gamma3"/"psi" to (lo, hi) pairs; the
    transfer constants are 3*R3, 9*R3, 6*R3 and R3 respectively.
    """
    g1, g2_, g3, psi = (gamma_psi[k] for k in ("gamma1", "gamma2", "gamma3", "psi"))
    r = float(upper(r3_value))
    return FeasibleBox(
        beta1_min=g1[0] - 3.0 * r, beta1_max=g1[1] + 3.0 * r,
        beta2_min=g2_[0] - 9.0 * r, beta2_max=g2_[1] + 9.0 * r,
        beta3_min=g3[0] - 6.0 * r, beta3_max=g3[1] + 6.0 * r,
        phi_min=psi[0] - r, phi_max=psi[1] + r,
    )


@dataclass
class GFactors:
    ga: object
    gb: object
    gc: object
    g1: object
    g2: object


def g_factors(eps, x_max: int, lam_min, lam_max, c_max, record: list | None = None) -> GFactors:
    """The five multiplicative slack factors, each >= 1, in the log domain.

    Raises ConfigurationError when an R argument falls outside L's domain
    (the accuracy radius is then too coarse for this x_max).
    """
    R1 = r1(eps, x_max, lam_max)
    R2 = r2(eps, x_max, lam_max)
    R3 = r3(eps, x_max, lam_min, lam_max)
    try:
        return _g_factors_inner(eps, x_max, lam_min, lam_max, c_max, R1, R2, R3, record)
    except DomainError as exc:
        raise ConfigurationError(f"slack-factor domain violated: {exc}") from exc


def _g_factors_inner(eps, x_max, lam_min, lam_max, c_max, R1, R2, R3,
                     record: list | None) -> GFactors:
    as_iv = isinstance(R3, Interval)
    ln2 = _ln_int(2, as_iv)
    g1 = (
        xexp(R1 * ln2)
        * _L_or_limit(R1, record)
        * _L_or_limit(R2, record)
        * xexp(R2 * (_ln_int(18, as_iv) + 1.0 - xlog(lam_min)))
        * xpow6(_L_or_limit(R2 / 6.0, record))
        * xpow_c(
            _L_or_limit(3.0 * eps * p3(x_max) / lam_min, record)
            * _L_or_limit(6.0 * eps * p3(x_max) / lam_min, record),
            c_max,
        )
        * xpow_c(
            _L_or_limit(3.0 * R3, record) * _L_or_limit(3.0 * R3, record)
            * _L_or_limit(9.0 * R3, record) * _L_or_limit(6.0 * R3, record)
            * xexp(R3 * _ln_int(3, as_iv)),
            c_max,
        )
    )

    ga = (
        xexp(eps * _ln_int(12, as_iv))
        * xexp((x_max / 8.0) * (x_max**2 + 2 * x_max - 1) * eps * ln2)
        * xpow_c(_L_or_limit(eps, record), (x_max / 4.0) * (x_max + 3))
    )
    gb = xexp((x_max / 4.0) * (x_max + 1) * xlog1p_generic(eps))

    # inner bracket of GC evaluated at lam_max: e^-lam (lam/2)^x_max grows in lam
    # as long as x_max > lam_max
    log_inner = -lam_max + x_max * (xlog(lam_max) - ln2)
    log_gc = eps * (
        ((x_max + 2) / 2.0) * _ln_int(x_max + 1, as_iv)
        + (x_max / 24.0) * (x_max + 1) * (x_max - 7) * ln2
        + ((x_max + 1) / 4.0) * ((x_max + 4) * ln2 + (x_max + 8) * log_inner)
    )
    gc = xexp(log_gc)
    return GFactors(ga=ga, gb=gb, gc=gc, g1=g1, g2=ga * gb * gc)


def xpow6(z):
    return z * z * z * z * z * z


def xpow_c(z, c):
    return xexp(c * xlog(z))


def xlog1p_generic(eps):
    if isinstance(eps, Interval):
        return (1.0 + eps).log()
    return math.log1p(eps)


#: Human-readable formula text per ledger symbol, emitted alongside values.
LEDGER_FORMULAS = {
    "r1": "lam_max^(x_max+1)/(x_max+1)! + eps*D(x_max)",
    "r2": "lam_max^(x_max+1)/x_max! + eps*P2(x_max)",
    "r3": "lam_max^x_max/x_max! + (eps/lam_min)*(P2(x_max)+P3(x_max))",
    "ga": "12^eps * 2^((x_max/8)(x_max^2+2x_max-1)eps) * L(eps)^((x_max/4)(x_max+3))",
    "gb": "(1+eps)^((x_max/4)(x_max+1))  [dominates prod_x (1+eps)^floor(x/2)]",
    "gc": "[(x_max+1)^((x_max+2)/2) 2^((x_max/24)(x_max+1)(x_max-7)) "
          "(2^(x_max+4) [e^-lam (lam/2)^x_max]^(x_max+8))^((x_max+1)/4)]^eps at lam_max",
    "g1": "2^R1 L(R1) L(R2) (18e/lam_min)^R2 L(R2/6)^6 "
          "[L(3 eps P3/lam_min) L(6 eps P3/lam_min)]^c_max "
          "[L(3R3)^2 L(9R3) L(6R3) 3^R3]^c_max",
    "g2": "GA * GB * GC",
    "prefactor": "G1 * G2 * exp(2 eps D / e)",
    "unbalancing": "2^(rho + eps*Delta)",
}

#: Upper targets the certified configuration is compared against.
LEDGER_TARGETS = {"prefactor": 1.0 + 1e-7, "unbalancing": 1.0 + 1e-14}


@dataclass
class ErrorBudget:
    """Full ledger: bounds, slack factors, prefactors, and the widened intervals.

    All stored values are upper bounds ("pessimistic direction"); multiplying
    certificate factors by them composes pessimistically.
    """

    eps: float
    x_max: int
    lam_min: float
    lam_max: float
    r1: object
    r2: object
    r3: object
    ga: object
    gb: object
    gc: object
    g1: object
    g2: object
    prefactor: object       # G1 * G2 * exp(2*eps*D/e)
    unbalancing: object     # 2^(rho + eps*Delta)
    interval_bounds: FeasibleBox
    mode: str = "float"
    L_log: list = field(default_factory=list)
    direction: str = "upper"

    def as_dict(self) -> dict:
        out = {
            "mode": self.mode,
            "direction": self.direction,
            "eps": self.eps,
            "x_max": self.x_max,
            "lam_min": self.lam_min,
            "lam_max": self.lam_max,
            "interval_bounds": self.interval_bounds.as_dict(),
        }
        for key in ("r1", "r2", "r3", "ga", "gb", "gc", "g1", "g2", "prefactor", "unbalancing"):
            value = upper(getattr(self, key))
            entry = {"value": value, "formula": LEDGER_FORMULAS[key], "direction": "upper"}
            if key in LEDGER_TARGETS:
                entry["target"] = LEDGER_TARGETS[key]
                entry["margin"] = LEDGER_TARGETS[key] - value
            out[key] = entry
        return out


def build_budget(params, consts, mode: str = "float") -> ErrorBudget:
    """Assemble the ledger for one parameter configuration.

    mode "interval" reruns every formula with outward-rounded enclosures; the
    stored values are then Interval objects whose upper endpoints bound the
    true factors.
    """
    if mode == "interval":
        eps = Interval(params.epsilon)
        lam_min = 3.0 * Interval.from_decimal(repr(params.c_min))
        lam_max = 3.0 * Interval.from_decimal(repr(params.c_max))
        rho = rho_tail_interval(params.x_max, 3.0 * Interval.from_decimal(repr(params.c)))
    else:
        eps = params.epsilon
        lam_min, lam_max = params.lam_min, params.lam_max
        rho = consts.rho

    as_iv = mode == "interval"
    record: list = []
    gf = g_factors(eps, params.x_max, lam_min, lam_max, params.c_max, record)
    d = big_d(params.x_max)
    prefactor = gf.g1 * gf.g2 * xexp(2.0 * eps * d / _euler(as_iv))
    unbalancing = xexp((rho + eps * consts.delta) * _ln_int(2, as_iv))
    return ErrorBudget(
        eps=params.epsilon,
        x_max=params.x_max,
        lam_min=params.lam_min,
        lam_max=params.lam_max,
        r1=r1(eps, params.x_max, lam_max),
        r2=r2(eps, params.x_max, lam_max),
        r3=r3(eps, params.x_max, lam_min, lam_max),
        ga=gf.ga,
        gb=gf.gb,
        gc=gf.gc,
        g1=gf.g1,
        g2=gf.g2,
        prefactor=prefactor,
        unbalancing=unbalancing,
        interval_bounds=params.a_priori,
        mode=mode,
        L_log=record,
    )
