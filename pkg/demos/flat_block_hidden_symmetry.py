"""Hidden symmetries of the heat equation on a 1+2 decomposable space.

The space is flat, written as a line times a flat 2-d block, and the
distinguished gradient Killing vector is d_x.  Reducing the heat
equation along d_x just drops a coordinate and every symmetry survives.
Reducing along the squared-time descendant t d_x - (x/2) u d_u is more
interesting: the reduced equation picks up the flux term w/(2 tau) and a
genuinely new point symmetry appears, one that no source symmetry
projects onto.
"""

from symred import catalog
from symred.cli import run_case

case = catalog.get_case("decomposable_flat_1p2")
run = run_case(case)

print("heat symmetries on the full space:")
for g in run.report["heat_symmetries"]:
    coeffs = dict(zip(g["basis"], g["coefficients"]))
    terms = " + ".join(f"({c})*{b}" for b, c in coeffs.items() if c != "0")
    print(f"  {g['name']} = {terms or '0'}")

for red in run.report["reductions"]:
    print(f"\nreduction by {red['by']}:")
    for name, inv in red["invariants"].items():
        print(f"  invariant {name} = {inv}")
    print(f"  similarity factor nu = {red['nu']}")
    print(f"  reduced source term f = {red['reduced_pde']['f']}")
    print("  inherited:", ", ".join(g["name"] for g in red["inherited"]))
    print("  lost (Type I):", ", ".join(red["type1_hidden"]) or "none")
    if red["type2_hidden"]:
        for g in red["type2_hidden"]:
            coeffs = dict(zip(g["basis"], g["coefficients"]))
            terms = " + ".join(f"({c})*{b}"
                               for b, c in coeffs.items() if c != "0")
            print(f"  Type II hidden: {g['name']} = {terms}")
    else:
        print("  Type II hidden: none")

print("\nexpectations met" if not run.failures else
      "\nUNMET: " + "; ".join(run.failures))
