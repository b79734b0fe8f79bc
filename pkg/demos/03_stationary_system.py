"""The two-variable stationarity system and its confined root.

The entropy maximization behind the expectation bound collapses to two
equations in (phi, beta1).  This script samples their zero loci, runs the
sign-exclusion spiral that pens every feasible common root into a tiny
rectangle, and cross-checks with a plain nested-bisection root.
"""

from typsat import ModelParams, build_tables, derive_point, eq1, eq2
from typsat.pipeline import emit_curves
from typsat.rootbox import solve_reference, spiral_localize, verify_exclusion

params = ModelParams.certification()
_, _, consts = build_tables(params)
box = params.a_priori


def eq1f(phi, b1):
    return eq1(derive_point(phi, b1, box), consts, params)


def eq2f(phi, b1):
    return eq2(derive_point(phi, b1, box), consts, params)


print("-- the two zero loci, phi as a function of beta1 " + "-" * 20)
rows, _ = emit_curves(params, 9)
print("   beta1      phi[eq1=0]   phi[eq2=0]")
for r in rows:
    print(f"   {r['beta1']:.5f}    {r['phi_eq1']:.6f}     {r['phi_eq2']:.6f}")

print()
print("-- exclusion spiral " + "-" * 49)
trace = spiral_localize(eq1f, eq2f, box, width_target=4e-7)
rect = trace.rectangle
print(f"   witness sequences: K = {trace.K}, L = {trace.L}")
print(f"   confining rectangle: [{rect[0]:.8f}, {rect[1]:.8f}] x [{rect[2]:.8f}, {rect[3]:.8f}]")
report = verify_exclusion(trace, eq1f, eq2f, box)
print(f"   independent re-verification: {report.checks} sign checks, ok = {report.ok}")

print()
print("-- reference root (sanity oracle, never feeds the certificate) " + "-" * 6)
ref = solve_reference(eq1f, eq2f, rect)
pt = derive_point(ref["phi"], ref["beta1"], box)
print(f"   root = ({ref['phi']:.10f}, {ref['beta1']:.10f})")
print(f"   residuals = ({ref['residual_eq1']:.2e}, {ref['residual_eq2']:.2e})")
print(f"   U = {pt.U:.8f}, V = {pt.V:.8f}")
