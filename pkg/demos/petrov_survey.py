"""Survey of the vacuum Petrov-type metrics with a nongradient homothety.

Each metric admits three or four Killing vectors plus one proper
homothety, so the heat equation gains the dilation 2t d_t + H and the
Killing translations, but no squared-time generators.  Reducing along
the dilation produces a static equation in similarity variables; a
finite polynomial ansatz (degree 3, plus the metric's own function
kernels) then searches the reduced equation for point symmetries.  The
survey shows how much of the source algebra survives each reduction:
everything found is a descendant of a commuting Killing vector, and no
Type II hidden symmetries appear on this route.

Run with a case name to restrict to one case; the full survey takes a
few minutes because of the reduced-equation ansatz searches.
"""

import sys
import time

from symred import catalog
from symred.cli import run_case

names = sys.argv[1:] or ["petrov_N", "petrov_D", "petrov_II", "petrov_III"]

for name in names:
    case = catalog.get_case(name)
    t0 = time.time()
    run = run_case(case)
    table, _ = run.algebra.structure_constants()
    print(f"\n== {name} ({time.time() - t0:.1f}s) ==")
    print("nonzero brackets with the dilation:")
    for (n1, n2), coeffs in sorted(table.items()):
        if n2 == "H" and coeffs:
            txt = " + ".join(f"({c})*{k}" for k, c in coeffs.items())
            print(f"  [{n1}, H] = {txt}")
    for red in run.report["reductions"]:
        survivors = [g["name"] for g in red["inherited"]
                     if g["name"] not in ("X_u", "X_b")]
        print(f"reduction by {red['by']}: survivors "
              f"{survivors or 'none'}, "
              f"Type II {[g['name'] for g in red['type2_hidden']] or 'none'}")
    for d in run.report["discrepancies"]:
        print(f"discrepancy: {d}")
    print("expectations met" if not run.failures else
          "UNMET: " + "; ".join(run.failures))
