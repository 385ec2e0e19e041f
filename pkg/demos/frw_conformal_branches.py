"""Two reductions of the heat equation on a spatially flat FRW-like
metric, and why only one of them has hidden symmetries.

The metric d sigma^2 - sigma^2 (dx^2 + dy^2 + dz^2) carries the gradient
homothety sigma d_sigma, which lifts to two time-dependent heat
symmetries.  Both reductions eliminate t and land on static equations
that the engine recognizes as Laplace equations of conformally rescaled
metrics.  The conformal algebra of the two rescaled metrics is the same
ten-dimensional family, but the symmetry factory only admits conformal
vectors whose factor is harmonic:

* reduction by 2t d_t + sigma d_sigma gives the rescaling exp(phi^2/4),
  the special conformal factors stop being harmonic, and nothing beyond
  the source algebra survives;
* reduction by t^2 d_t + t sigma d_sigma - (sigma^2/4 + 2t) u d_u gives
  the bare metric, the factors are harmonic, and four Type II hidden
  symmetries appear.
"""

from symred import catalog, geometry as geo
from symred.cli import run_case
from symred.reduction import invariants_for, laplace_form_detect, reduce_pde
from symred import expr as ex

case = catalog.get_case("gradient_hv_flat_frw")
run = run_case(case)

pde = geo.heat_pde(case.metric)
for rc in case.reductions:
    Z = run.algebra.named(rc.by)
    invch = invariants_for(Z, names=rc.invariant_names)
    red = reduce_pde(pde, Z, invch)
    conf, omega = laplace_form_detect(red.pde)
    print(f"reduction by {rc.by}: conformal factor {ex.print_expr(omega)}")

for red, rep in zip(run.report["reductions"], run.reduction_reports):
    print(f"\nreduction by {red['by']}:")
    if red["type2_hidden"]:
        for name, gen in rep.type2_hidden:
            print(f"  Type II hidden {name} = {gen.pretty()}")
    else:
        print("  no Type II hidden symmetries")
    for cav in red["caveats"]:
        print(f"  {cav}")

print("\nexpectations met" if not run.failures else
      "\nUNMET: " + "; ".join(run.failures))
