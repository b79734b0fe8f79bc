import math

import numpy as np
import pytest

from typsat import stationarity as st
from typsat.errors import DomainError, SingularPointError
from typsat.params import DELTA_NUM

LAM = 3 * 4.506


# -- points ----------------------------------------------------------------------

def test_final_rectangle_point_is_feasible(box, consts, params):
    pt = st.derive_point(0.56383233, 0.44651440, box)
    assert pt.feasible


def test_beta_partition_identity(box):
    pt = st.derive_point(0.57, 0.45, box)
    assert pt.beta1 + pt.beta2 + pt.beta3 == pytest.approx(1.0, abs=1e-14)


def test_singular_point_raises(box):
    with pytest.raises(SingularPointError):
        st.derive_point(0.12, 0.36, box)  # beta1 = 3 phi: Y = 0
    with pytest.raises(SingularPointError):
        st.derive_point(box.phi_min, box.beta1_min, box)  # beta3 < 0 corner


def test_v_at_polygon_vertex(box):
    # vertex beta2 = beta2_min, beta3 = beta3_max
    beta1 = 1.0 - box.beta2_min - box.beta3_max
    phi = (box.beta3_max + 2.0 - beta1) / 3.0
    pt = st.derive_point(phi, beta1, box)
    assert pt.V == pytest.approx(1.126983, abs=1e-6)


def test_v_alternate_form_agrees(box, rng):
    for _ in range(200):
        phi = rng.uniform(box.phi_min, box.phi_max)
        b1 = rng.uniform(box.beta1_min, box.beta1_max)
        try:
            pt = st.derive_point(phi, b1, box)
        except SingularPointError:
            continue
        assert abs(st.v_alternate_form(pt) - pt.V) / pt.V < 1e-12


def test_uv_bounds_on_feasible_set(box, rng):
    u_poly_max, v_poly_min, uv_poly_max, uvm1_max = 0.0, math.inf, 0.0, 0.0
    hits = 0
    for _ in range(6000):
        phi = rng.uniform(box.phi_min, box.phi_max)
        b1 = rng.uniform(box.beta1_min, box.beta1_max)
        try:
            pt = st.derive_point(phi, b1, box)
        except SingularPointError:
            continue
        if not pt.feasible:
            continue
        hits += 1
        u_poly_max = max(u_poly_max, pt.U)
        v_poly_min = min(v_poly_min, pt.V)
        uv_poly_max = max(uv_poly_max, pt.U / pt.V)
        uvm1_max = max(uvm1_max, pt.U * (pt.V - 1.0))
    assert hits > 1000
    assert u_poly_max <= 2.69268 + 1e-5          # U_max1
    assert v_poly_min >= 1.109255 - 1e-5         # V_min1 (crude)
    assert v_poly_min >= 1.126983 - 1e-6         # V_min2 (sharp)
    assert uv_poly_max <= 1.64966 + 1e-5         # (U/V)_max2
    assert uvm1_max <= 0.687424 + 1e-5           # U <= U_max2 / (V - 1)


# -- mu and alpha -------------------------------------------------------------------

def test_mu_p0_is_binomial_mass(root_point):
    pt = root_point
    q = (pt.V - 1.0) / pt.V
    for x in (1, 4, 9):
        for j in range(x + 1):
            expect = math.comb(x, j) * q**j * (1.0 - q) ** (x - j)
            assert st.mu_closed_form(x, 0, j, pt) == pytest.approx(expect, rel=1e-12)


def test_mu_row_sum_oracle_5_2(box):
    # independent oracle: plain summation against the closed denominator identity
    pt = st.derive_point(0.56383233, 0.44651440, box)
    x, p = 5, 2
    total = sum(st.mu_closed_form(x, p, j, pt) for j in range(x + 1))
    assert total == pytest.approx(1.0, abs=1e-12)
    num = pt.U ** (x - 2 * p) * (pt.V**p - 1.0)
    den = num + pt.V ** (x - p)
    alpha_direct = sum(st.mu_closed_form(x, p, j, pt) for j in range(p))
    assert alpha_direct == pytest.approx(num / den, rel=1e-12)
    assert st.alpha_closed_form(x, p, pt) == pytest.approx(num / den, rel=1e-12)


def test_mu_rows_sum_to_one_everywhere(root_point, consts):
    table = st.mu_table(root_point, consts)
    sums = table.row_sums()
    assert np.max(np.abs(sums - 1.0)) < 1e-10
    assert table.alpha[0] == 0.0  # (x, p) = (0, 0)


def test_mu_domain_errors(root_point):
    with pytest.raises(DomainError):
        st.mu_closed_form(3, 2, 0, root_point)  # 2p > x
    with pytest.raises(DomainError):
        st.mu_closed_form(4, 1, 5, root_point)  # j > x


def test_h_weights_are_branch_binomials(root_point, consts):
    # h(x, p, j) = C(p, j) below the branch point, C(x-p, j-p) at and above
    table = st.mu_table(root_point, consts)
    idx = st.mu_index(consts.x_max)
    for k in (0, 50, 500, 5000, 20000):
        x, p, j = int(idx["x"][k]), int(idx["p"][k]), int(idx["j"][k])
        want = math.comb(p, j) if j < p else math.comb(x - p, j - p)
        assert st.h_weight(x, p, j) == want
        assert table.log_h[k] == pytest.approx(math.log(want) if want > 1 else 0.0, abs=1e-12)


def test_alpha_zero_at_p0(root_point, consts):
    table = st.mu_table(root_point, consts)
    p0_rows = np.flatnonzero(consts.ps == 0)
    assert np.all(table.alpha[p0_rows] == 0.0)


# -- the two equations ---------------------------------------------------------------

def test_eq1_diagonal_terms_vanish(root_point, consts, params):
    with_diag = st.eq1(root_point, consts, params, include_diagonal=True)
    without = st.eq1(root_point, consts, params)
    assert with_diag == pytest.approx(without, abs=1e-15)


def test_eq1_sign_change_across_rectangle(eqfs, trace):
    # bisection oracle at fixed beta1 = 0.44651440
    eq1f, _ = eqfs
    b1 = 0.44651440
    lo, hi = trace.rectangle[0] - 1e-5, trace.rectangle[1] + 1e-5
    flo, fhi = eq1f(lo, b1), eq1f(hi, b1)
    assert flo > 0.0 > fhi
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if eq1f(mid, b1) > 0:
            lo = mid
        else:
            hi = mid
    assert trace.rectangle[0] - 1e-5 <= lo <= trace.rectangle[1] + 1e-5


def test_corner_sign_seeds(eqfs, box):
    eq1f, eq2f = eqfs
    assert eq1f(box.phi_min, box.beta1_max) > 0.0
    assert eq1f(box.phi_max, box.beta1_min) < 0.0
    assert eq2f(box.phi_min, box.beta1_min + 0.095) > 0.0  # feasible stand-in corner
    assert eq2f(box.phi_max, box.beta1_max) < 0.0


def test_eq2_seed_signs_spec_corners(eqfs, box):
    # the exact spec corners: (phi_min, beta1_min) is singular (beta3 < 0), so
    # the nearest feasible boundary point carries the sign
    _, eq2f = eqfs
    b_floor = (2.0 - 3.0 * box.phi_min) + 1e-6
    assert eq2f(box.phi_min, b_floor) > 0.0
    assert eq2f(box.phi_max, box.beta1_max) < 0.0


def test_eq2_form_equivalence_at_root(root, box, consts, params):
    pt = st.derive_point(root["phi"], root["beta1"], box)
    assert abs(st.eq1(pt, consts, params)) < 1e-10
    mod2 = st.eq2(pt, consts, params, form="mod2")
    eqb1 = st.eq2(pt, consts, params, form="eqb1")
    assert abs(mod2 - eqb1) < 1e-8


def test_eq2_form_equivalence_across_grid(box, consts, params, rng):
    for _ in range(150):
        phi = rng.uniform(box.phi_min, box.phi_max)
        b1 = rng.uniform(box.beta1_min, box.beta1_max)
        try:
            pt = st.derive_point(phi, b1, box)
        except SingularPointError:
            continue
        e1 = st.eq1(pt, consts, params)
        gap = abs(st.eq2(pt, consts, params, form="eqb1")
                  - st.eq2(pt, consts, params, form="mod2"))
        assert gap <= 1e-6 + 10.0 * abs(e1)


# -- g2 ---------------------------------------------------------------------------

def test_g2_finite_and_positive(root_point, consts, params):
    val = st.log_g2(root_point, consts, params)
    assert math.isfinite(val)
    assert st.g2(root_point, consts, params) > 0.0


def test_g2_origin_factor_is_one(root_point, consts):
    log_dens = st._log_den_rows(consts, root_point.U, root_point.V)
    assert log_dens[0] == pytest.approx(0.0, abs=1e-15)  # (x, p) = (0, 0)


def test_g2_consistency_with_mu_product(root, root_point, consts, params):
    # plug the closed-form mu into exp(sum kt sum_j mu log(mu/h)); must invert g2
    idx = st.mu_index(consts.x_max)
    table = st.mu_table(root_point, consts)
    kt_tri = consts.kt[idx["row"]]
    s = math.fsum((kt_tri * table.mu * (np.log(table.mu) - idx["log_h"])).tolist())
    assert s == pytest.approx(-st.log_g2(root_point, consts, params), abs=1e-9)


# -- objective and gradient ----------------------------------------------------------

def _uniform_rows_mu(consts):
    idx = st.mu_index(consts.x_max)
    return 1.0 / (idx["x"] + 1.0)


def _feasible_mu(rng, consts, root_mu, t):
    """Mixture of the stationary mu with row-uniform noise; components stay
    bounded away from 0 so central differences at step 1e-6 are safe."""
    idx = st.mu_index(consts.x_max)
    starts = idx["row_starts"]
    noise = rng.uniform(0.5, 1.5, size=root_mu.shape) * _uniform_rows_mu(consts)
    sums = np.add.reduceat(noise, starts)
    noise = noise / sums[idx["row"]]
    return (1.0 - t) * root_mu + t * noise


def _objective_oracle_parts(mu, consts, params):
    """Independent transcription of the objective for the FD oracle."""
    idx = st.mu_index(consts.x_max)
    kt_tri = consts.kt[idx["row"]]
    ent = float(np.sum(kt_tri * mu * (idx["log_h"] - np.log(mu))))
    phi = st.phi_of_mu(mu, consts)
    b1 = st.beta1_of_mu(mu, consts)
    return ent, phi, b1


def _f_part(phi, b1, c):
    y = 3.0 * phi - b1
    b2 = 3.0 * (1.0 - phi) - 2.0 * b1
    b3 = b1 - 2.0 + 3.0 * phi
    return c * (y * math.log(y) + 3.0 * (1.0 - phi) * math.log(3.0 * (1.0 - phi))
                - b2 * math.log(b2) - b3 * math.log(3.0 * b3))


def _fd_gradient(mu, consts, params, step=1e-6):
    """Central finite differences of the objective, one coordinate at a time.

    phi and beta1 are affine in mu, so each perturbation shifts them by an
    exactly known amount (the affinity itself is cross-checked in
    test_affine_coordinates below); the entropy term updates locally.
    """
    idx = st.mu_index(consts.x_max)
    kt_tri = consts.kt[idx["row"]]
    lam, c = params.lam, params.c
    dphi = np.where(idx["lt"], -(idx["w"] * kt_tri) / lam, 0.0)
    db1 = idx["pmj"] * kt_tri / c
    _, phi0, b10 = _objective_oracle_parts(mu, consts, params)

    def ent_term(vals):
        return kt_tri * vals * (idx["log_h"] - np.log(vals))

    up = ent_term(mu + step)
    dn = ent_term(mu - step)
    grad = np.empty_like(mu)
    for k in range(mu.size):
        f_up = up[k] + _f_part(phi0 + dphi[k] * step, b10 + db1[k] * step, c)
        f_dn = dn[k] + _f_part(phi0 - dphi[k] * step, b10 - db1[k] * step, c)
        grad[k] = (f_up - f_dn) / (2.0 * step)
    return grad


def test_affine_coordinates(root_point, consts, params, rng):
    # phi_of_mu and beta1_of_mu shift linearly under coordinate perturbations
    idx = st.mu_index(consts.x_max)
    table = st.mu_table(root_point, consts)
    mu = table.mu
    kt_tri = consts.kt[idx["row"]]
    for k in rng.integers(0, mu.size, 40):
        step = 1e-4
        bumped = mu.copy()
        bumped[k] += step
        dphi = st.phi_of_mu(bumped, consts) - st.phi_of_mu(mu, consts)
        db1 = st.beta1_of_mu(bumped, consts) - st.beta1_of_mu(mu, consts)
        want_dphi = (-(idx["w"][k] * kt_tri[k]) / params.lam if idx["lt"][k] else 0.0) * step
        want_db1 = idx["pmj"][k] * kt_tri[k] / params.c * step
        assert dphi == pytest.approx(want_dphi, abs=1e-15)
        assert db1 == pytest.approx(want_db1, abs=1e-15)


def test_gradient_matches_fd_at_random_feasible_mu(root_point, consts, params, rng):
    table = st.mu_table(root_point, consts)
    mu = _feasible_mu(rng, consts, table.mu, t=0.12)
    grad = st.gradient_f1(mu, consts, params)
    fd = _fd_gradient(mu, consts, params)
    assert np.max(np.abs(grad - fd)) < 1e-5


def test_gradient_matches_naive_fd_subset(root_point, consts, params, rng):
    # deepest cross-check: plain objective re-evaluation on a coordinate subset
    table = st.mu_table(root_point, consts)
    mu = _feasible_mu(rng, consts, table.mu, t=0.12)
    grad = st.gradient_f1(mu, consts, params)
    step = 1e-6
    for k in rng.integers(0, mu.size, 120):
        up, dn = mu.copy(), mu.copy()
        up[k] += step
        dn[k] -= step
        fd = (st.objective_f1(up, consts, params)
              - st.objective_f1(dn, consts, params)) / (2.0 * step)
        assert grad[k] == pytest.approx(fd, abs=2e-5)


def test_gradient_rejects_null_coordinate(root_point, consts, params):
    table = st.mu_table(root_point, consts)
    mu = table.mu.copy()
    mu[5] = 0.0
    with pytest.raises(DomainError):
        st.gradient_f1(mu, consts, params)
    with pytest.raises(DomainError):
        st.objective_f1(mu, consts, params)


def test_projected_gradient_vanishes_at_root(root, root_point, consts, params):
    table = st.mu_table(root_point, consts)
    proj = st.projected_gradient(table.mu, consts, params)
    assert np.max(np.abs(proj)) < 1e-7


def test_row_perturbation_directional_derivative(root_point, consts, params, rng):
    # moving mass between two j's of one row changes f1 by the two-coordinate
    # directional derivative to first order
    table = st.mu_table(root_point, consts)
    mu = _feasible_mu(rng, consts, table.mu, t=0.1)
    grad = st.gradient_f1(mu, consts, params)
    idx = st.mu_index(consts.x_max)
    row = int(np.flatnonzero((idx["x"] == 7) & (idx["p"] == 2) & (idx["j"] == 0))[0])
    other = row + 3  # (7, 2, 3)
    for eps in (1e-5, 1e-6):
        bumped = mu.copy()
        bumped[row] += eps
        bumped[other] -= eps
        df = st.objective_f1(bumped, consts, params) - st.objective_f1(mu, consts, params)
        first_order = (grad[row] - grad[other]) * eps
        assert df == pytest.approx(first_order, abs=50 * eps * eps)


def test_objective_equals_log_g2_plus_cF_at_stationary_mu(root_point, consts, params):
    # three independently coded paths must agree at the stationary point:
    # the entropy objective at the closed-form mu, the normalizing product g2,
    # and the four-term F assembly
    pt = root_point
    table = st.mu_table(pt, consts)
    f1 = st.objective_f1(table.mu, consts, params)
    F = (pt.Y * math.log(pt.Y) + 3 * (1 - pt.phi) * math.log(3 * (1 - pt.phi))
         - pt.beta2 * math.log(pt.beta2) - pt.beta3 * math.log(3 * pt.beta3))
    assert f1 == pytest.approx(st.log_g2(pt, consts, params) + params.c * F, abs=1e-12)


def test_stationary_mu_dominates_random_feasible(root_point, consts, params, rng):
    # the confined root carries the constrained maximum: no sampled feasible
    # perturbation improves the objective
    table = st.mu_table(root_point, consts)
    f_star = st.objective_f1(table.mu, consts, params)
    idx = st.mu_index(consts.x_max)
    starts = idx["row_starts"]
    tried = 0
    for _ in range(30):
        noise = rng.uniform(0.3, 1.7, size=table.mu.shape) * table.mu
        sums = np.add.reduceat(noise, starts)
        mu2 = noise / sums[idx["row"]]
        try:
            val = st.objective_f1(mu2, consts, params)
        except DomainError:
            continue
        tried += 1
        assert val <= f_star + 1e-12
    assert tried >= 20


def test_stationarity_closure(root, root_point, consts, params):
    # the elimination argument: plugging the closed-form mu back into the
    # affine coordinate maps reproduces (phi, beta1) at a solution
    table = st.mu_table(root_point, consts)
    assert st.phi_of_mu(table.mu, consts) == pytest.approx(root["phi"], abs=1e-8)
    assert st.beta1_of_mu(table.mu, consts) == pytest.approx(root["beta1"], abs=1e-8)


# -- monotonicity of U and V ----------------------------------------------------------

def test_u_increasing_v_decreasing_50x50(box):
    phis = np.linspace(box.phi_min, box.phi_max, 50)
    b1s = np.linspace(box.beta1_min, box.beta1_max, 50)
    u = np.full((50, 50), np.nan)
    v = np.full((50, 50), np.nan)
    feas = np.zeros((50, 50), dtype=bool)
    for i, f in enumerate(phis):
        for j, b in enumerate(b1s):
            if not box.contains(f, b):
                continue
            pt = st.derive_point(f, b, box)
            u[i, j], v[i, j], feas[i, j] = pt.U, pt.V, True
    for axis in (0, 1):
        a_u = u[:-1, :] if axis == 0 else u[:, :-1]
        b_u = u[1:, :] if axis == 0 else u[:, 1:]
        a_v = v[:-1, :] if axis == 0 else v[:, :-1]
        b_v = v[1:, :] if axis == 0 else v[:, 1:]
        ok = (feas[:-1, :] & feas[1:, :]) if axis == 0 else (feas[:, :-1] & feas[:, 1:])
        assert np.all((b_u - a_u)[ok] > 0.0)
        assert np.all((b_v - a_v)[ok] < 0.0)


# -- rate bound --------------------------------------------------------------------

def test_rate_point_mode_continuous_and_dominated(trace, box, consts, params, budget, rng):
    rect = trace.rectangle
    rate_rect = st.rate_bound_rectangle(*rect, consts, params, budget)
    samples = []
    for _ in range(25):
        phi = rng.uniform(rect[0], rect[1])
        b1 = rng.uniform(rect[2], rect[3])
        pt = st.derive_point(phi, b1, box)
        samples.append(st.rate_bound_point(pt, consts, params, budget))
    samples = np.array(samples)
    # rectangle mode dominates every interior sample (after adding the
    # unbalancing factor the point mode deliberately omits)
    unb = float(np.exp(math.log(2.0) * (consts.rho + params.epsilon * consts.delta)))
    assert np.all(samples * unb <= rate_rect + 1e-12)
    assert samples.max() - samples.min() < 1e-4  # continuity at rectangle scale


def test_rate_bound_dispatch(root_point, trace, consts, params, budget):
    r1 = st.rate_bound(root_point, consts, params, budget)
    r2 = st.rate_bound(trace.rectangle, consts, params, budget)
    assert 0.99 < r1 < 1.0
    assert 0.99 < r2 < 1.0


def test_rate_on_target_rectangle(consts, params, budget):
    # the headline constant: the corner bound over the target rectangle lands
    # just below 0.9999885 (computed: 0.99998840690...)
    from typsat.pipeline import TARGETS
    r = TARGETS["rectangle"]
    rate = st.rate_bound_rectangle(r[0], r[1], r[2], r[3], consts, params, budget)
    assert 0.99998 < rate < TARGETS["rate"]
    assert rate == pytest.approx(0.9999884069006912, rel=1e-10)


def test_rate_rejects_infeasible(box, consts, params, budget):
    # nonsingular but outside the polygon: beta2 below its floor
    pt = st.derive_point(box.phi_max - 1e-4, box.beta1_max - 1e-4, box)
    assert not pt.feasible
    with pytest.raises(DomainError):
        st.rate_bound_point(pt, consts, params, budget)
    with pytest.raises(DomainError):
        st.rate_bound_rectangle(box.phi_max - 2e-4, box.phi_max - 1e-4,
                                box.beta1_max - 2e-4, box.beta1_max - 1e-4,
                                consts, params, budget)
