import math

import numpy as np
import pytest

from typsat import distribution as dist
from typsat.errors import ConfigurationError, DomainError
from typsat.params import ModelParams

LAM = 3 * 4.506

# oracle: exact rational binomial times a 50-digit exponential (mpmath), frozen
KAPPA_3_1 = 0.00020788566223329597
# oracle: 50-digit partial sum of the Poisson mass beyond x = 56, frozen
POISSON_TAIL_56 = 1.25329244645e-18


def test_kappa_at_origin_is_poisson_mass():
    assert dist.kappa(0, 0, LAM) == pytest.approx(math.exp(-LAM), rel=1e-15)


def test_kappa_symmetry_bit_exact():
    for x in range(57):
        for p in range(x + 1):
            assert dist.kappa(x, p, LAM) == dist.kappa(x, x - p, LAM)


def test_kappa_3_1_against_high_precision_oracle():
    assert dist.kappa(3, 1, LAM) == pytest.approx(KAPPA_3_1, rel=1e-13)
    mp = pytest.importorskip("mpmath")
    mp.mp.dps = 30
    lam = mp.mpf(13518) / 1000
    oracle = mp.mpf(3) / 8 * mp.e ** (-lam) * lam**3 / 6
    assert dist.kappa(3, 1, LAM) == pytest.approx(float(oracle), rel=1e-13)


def test_kappa_domain_errors():
    with pytest.raises(DomainError):
        dist.kappa(3, 4, LAM)
    with pytest.raises(DomainError):
        dist.kappa(-1, 0, LAM)
    with pytest.raises(DomainError):
        dist.kappa(3, 1, 0.0)


def test_kappa_tilde_cases():
    assert dist.kappa_tilde(4, 1, LAM) == 2.0 * dist.kappa(4, 1, LAM)
    assert dist.kappa_tilde(4, 2, LAM) == dist.kappa(4, 2, LAM)
    assert dist.kappa_tilde(4, 3, LAM) == 0.0


def test_row_sums_match_poisson(tables):
    typical = tables[0]
    for x in range(57):
        mass = math.exp(dist.poisson_log_pmf(x, LAM))
        assert abs(typical.row_sum(x) - mass) / mass < 1e-12


def test_mass_conservation_under_unbalancing(tables):
    typical, unbalanced, _ = tables
    s1, s2 = typical.triangle_sum(), unbalanced.triangle_sum()
    assert abs(s1 - s2) / s1 < 1e-12


def test_triangle_sum_vs_explicit_poisson_tail(tables, consts):
    # the triangle holds everything except the Poisson tail beyond x_max
    typical = tables[0]
    s = typical.triangle_sum()
    assert 1.0 - POISSON_TAIL_56 - 1e-13 < s < 1.0 + 1e-13


def test_unbalanced_column_pattern(tables):
    _, unbalanced, _ = tables
    for p in (0, 1, 2):
        assert unbalanced.value(6, p) == 2.0 * dist.kappa(6, p, LAM)
    assert unbalanced.value(6, 3) == dist.kappa(6, 3, LAM)
    for p in (4, 5, 6):
        assert unbalanced.value(6, p) == 0.0


def test_derived_constants(consts):
    assert consts.D == 1653
    assert consts.N == 32103
    assert consts.delta == 14.5
    assert 0.0 < consts.rho < 1e-14
    # oracle value from a 50-digit evaluation of the full double sum, frozen
    assert consts.K_tilde == pytest.approx(8.212023535312346, rel=1e-13)


def test_rho_monotone_in_x_max():
    rhos = [dist.rho_tail(x, LAM) for x in range(40, 62, 2)]
    assert all(a > b for a, b in zip(rhos, rhos[1:]))


def test_rho_matches_partial_sum_oracle():
    # independent oracle: plain 200-term partial sum plus nothing
    partial = sum(dist.kappa(2 * p, p, LAM) for p in range(29, 229))
    rho = dist.rho_tail(56, LAM)
    assert partial <= rho <= partial * (1.0 + 1e-10)


def test_build_tables_config_errors():
    with pytest.raises(ConfigurationError, match="xmaxlb2"):
        ModelParams(c=4.506, x_max=2)
    with pytest.raises(ConfigurationError, match="even"):
        ModelParams(c=4.506, x_max=57)
    with pytest.raises(ConfigurationError):
        ModelParams(c=2.0)


def test_h_tilde_and_polynomials(consts):
    assert consts.h_tilde(5, 1) == 3 * dist.kappa_tilde(5, 1, LAM)
    assert dist.p2(56) == 56 * 57 * 58 / 3
    assert dist.p3(56) == 56 * 58 * 115 / 8


def test_interval_tables_enclose_float_tables(tables, consts):
    ivt = dist.kappa_tilde_intervals(56, "4.506")
    assert np.all(ivt["kt"].lo <= consts.kt)
    assert np.all(consts.kt <= ivt["kt"].hi)
    assert ivt["K_tilde"].contains(consts.K_tilde)
    assert ivt["K_tilde"].width < 1e-10


def test_rho_interval_encloses_float(consts):
    from typsat.intervals import Interval
    rho_iv = dist.rho_tail_interval(56, 3.0 * Interval.from_decimal("4.506"))
    assert rho_iv.contains(consts.rho)


def test_table_json_serialization(tables):
    typical = tables[0]
    data = typical.to_jsonable()
    assert data["kind"] == "typical"
    assert data["x_max"] == 56
    assert len(data["entries"]) == 57 * 58 // 2
    cell = next(e for e in data["entries"] if e["x"] == 3 and e["p"] == 1)
    assert cell["value"] == typical.value(3, 1)
