"""Command line interface and the end-to-end case pipeline.

The pipeline functions (``run_case``, ``run_reduction``, the serializers
and the metric-file loader) are plain importable functions; the argparse
layer on top of them maps subcommands to exit codes: 0 on success, 1 on
error, 2 when a declared expectation is not met.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field

import sympy as sp

try:
    import tomllib
except ModuleNotFoundError:  # pragma: no cover - python < 3.11
    import tomli as tomllib

from . import catalog as cat
from . import expr as ex
from . import geometry as geo
from .classify import classify_reduction
from .geometry import (Chart, CollineationClass, CollineationKind, Metric,
                       VectorField)
from .numcheck import SampleConfig, max_abs_residual
from .pde import DEP, TIME, PointGenerator, SymmetryAlgebra
from .reduction import invariants_for, laplace_form_detect, reduce_pde
from .symmetry import (AlgebraEntry, ansatz_solve_collineation,
                       ansatz_solve_determining,
                       flux_symmetries_from_homothetic,
                       heat_symmetries_from_homothetic,
                       laplace_symmetries_from_ckv, monomial_basis,
                       symmetry_residuals)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_UNMET = 2


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------

def serialize_generator(name: str, gen: PointGenerator) -> dict:
    """Coefficient list of the generator over its printed basis fields
    ``d_t, d_x..., u*d_u, d_u``."""
    fields = ["d_t"] + [f"d_{n}" for n in gen.chart.names] + ["u*d_u", "d_u"]
    b = "b(t,x)" if gen.has_marker else ex.print_expr(gen.b)
    coeffs = [ex.print_expr(gen.xi_t)]
    coeffs += [ex.print_expr(c) for c in gen.xi]
    coeffs += [ex.print_expr(gen.a), b]
    return {"name": name, "basis": fields, "coefficients": coeffs}


def serialize_metric(m: Metric) -> dict:
    return {
        "coords": list(m.chart.names),
        "components": [[ex.print_expr(m.g[i, j]) for j in range(m.dim)]
                       for i in range(m.dim)],
    }


def serialize_pde(pde) -> dict:
    return {
        "coords": list(pde.chart.names),
        "A": [[ex.print_expr(pde.A[i, j]) for j in range(pde.dim)]
              for i in range(pde.dim)],
        "B": [ex.print_expr(b) for b in pde.B],
        "f": ex.print_expr(pde.f),
        "has_ut": pde.has_ut,
    }


def report_schema() -> dict:
    from importlib import resources
    text = resources.files("symred").joinpath("report_schema.json").read_text()
    return json.loads(text)


def validate_report(report: dict) -> None:
    """Schema-check a report; jsonschema is optional at runtime."""
    try:
        import jsonschema
    except ModuleNotFoundError:  # pragma: no cover
        return
    jsonschema.validate(report, report_schema())


# ---------------------------------------------------------------------------
# Metric definition files
# ---------------------------------------------------------------------------

_KINDS = {k.value: k for k in CollineationKind}


@dataclass
class MetricFile:
    metric: Metric
    vectors: list[cat.DeclaredVector]
    reduce_by: str | None = None
    invariant_names: tuple[str, ...] | None = None
    route: str = "ansatz"
    degree: int = 2
    kernels: tuple[str, ...] = ()


def load_metric_file(path: str) -> MetricFile:
    with open(path, "rb") as fh:
        data = tomllib.load(fh)
    space = data["space"]
    coords = tuple(sp.Symbol(c) for c in space["coords"])
    box = {c: tuple(v) for c, v in space.get("box", {}).items()}
    chart = Chart(coords, box)
    rows = data["metric"]["rows"]
    g = sp.ImmutableMatrix([[ex.parse_expr(e) for e in row] for row in rows])
    metric = Metric(chart, g)
    vectors = []
    for name, spec in data.get("vector", {}).items():
        comps = tuple(ex.parse_expr(c) for c in spec["components"])
        kind = _KINDS[spec.get("kind", "KV")]
        vectors.append(cat.DeclaredVector(
            name, comps, kind,
            psi=ex.parse_expr(str(spec.get("psi", "0"))),
            gradient=bool(spec.get("gradient", False)),
            potential=(ex.parse_expr(spec["potential"])
                       if "potential" in spec else None)))
    red = data.get("reduce", {})
    return MetricFile(
        metric=metric,
        vectors=vectors,
        reduce_by=red.get("by"),
        invariant_names=(tuple(red["invariants"])
                        if "invariants" in red else None),
        route=red.get("route", "ansatz"),
        degree=int(red.get("degree", 2)),
        kernels=tuple(red.get("kernels", ())),
    )


# ---------------------------------------------------------------------------
# Pipeline
# ---------------------------------------------------------------------------

@dataclass
class CaseRun:
    report: dict
    #: unmet expectations (empty on a clean run)
    failures: list[str] = field(default_factory=list)
    #: in-memory artifacts for callers that want more than the report
    algebra: SymmetryAlgebra | None = None
    entries: list[AlgebraEntry] = field(default_factory=list)
    reduction_reports: list = field(default_factory=list)


def _classes_match(cls: CollineationClass, dv: cat.DeclaredVector) -> bool:
    if cls.kind is not dv.kind:
        return False
    if cls.psi is None:
        return False
    return ex.normalize(cls.psi - sp.sympify(dv.psi)) == 0


def repair_homothety(m: Metric, degree: int = 1
                     ) -> tuple[VectorField, sp.Expr]:
    """Recover the homothety of ``m`` from a polynomial ansatz, scaled to
    conformal factor 1; deterministic pick when KV admixtures appear."""
    basis = monomial_basis(m.chart.coords, degree)
    sols = [(v.scale(1 / psi), sp.Integer(1))
            for v, psi in ansatz_solve_collineation(m, CollineationKind.HV,
                                                    basis)
            if psi != 0]
    if not sols:
        raise geo.GeometryError("no homothety found by the ansatz solver")
    def size(item):
        v, _ = item
        terms = sum(len(sp.Add.make_args(sp.expand(c)))
                    for c in v.components if c != 0)
        return (terms, tuple(sp.sstr(c) for c in v.components))
    sols.sort(key=size)
    return sols[0]


def verified_entries(case_vectors, m: Metric, tolerated=(), failures=None,
                     discrepancies=None):
    """Classify each declared vector against the metric; returns the
    factory entries and the serialized collineation records.

    A mismatch on a tolerated vector is repaired through the ansatz
    solver and recorded as a discrepancy; any other mismatch is an unmet
    expectation."""
    failures = failures if failures is not None else []
    discrepancies = discrepancies if discrepancies is not None else []
    entries, records = [], []
    for dv in case_vectors:
        v = VectorField(m.chart, tuple(sp.sympify(c) for c in dv.components))
        cls = geo.classify_collineation(v, m)
        ok = _classes_match(cls, dv)
        note = dv.discrepancy or ""
        if not ok:
            tid = f"vector:{dv.name}"
            if tid in tolerated and dv.kind is CollineationKind.HV:
                v, _ = repair_homothety(m)
                cls = geo.classify_collineation(v, m)
                comps = ", ".join(ex.print_expr(c) for c in v.components)
                discrepancies.append(
                    f"{dv.name}: declared components fail the "
                    f"{dv.kind.value} equations; engine derives ({comps})")
            else:
                failures.append(
                    f"{dv.name}: declared {dv.kind.value} with psi = "
                    f"{sp.sstr(dv.psi)}, engine finds {cls.kind.value} with "
                    f"psi = {sp.sstr(cls.psi)}")
        records.append({
            "name": dv.name,
            "components": [ex.print_expr(c) for c in v.components],
            "kind": cls.kind.value,
            "psi": None if cls.psi is None else ex.print_expr(cls.psi),
            "gradient": cls.gradient_flag,
            "potential": (ex.print_expr(sp.sympify(dv.potential))
                          if dv.potential is not None else None),
            "verified": ok or bool(dv.discrepancy),
            "note": note,
        })
        entries.append(AlgebraEntry(
            dv.name, v,
            CollineationClass(cls.kind, cls.psi, dv.factory_flag()),
            potential=(sp.sympify(dv.potential)
                       if dv.potential is not None else None)))
    return entries, records


def _check_commutators(case: cat.CaseStudy, algebra: SymmetryAlgebra,
                       failures, discrepancies):
    table, exceptions = algebra.structure_constants()
    for n1, n2 in exceptions:
        failures.append(f"bracket [{n1}, {n2}] leaves the computed algebra")
    for (n1, n2), want in case.expected_commutators.items():
        got = table.get((n1, n2))
        if got is None:
            failures.append(f"bracket [{n1}, {n2}] not computed")
            continue
        same = (set(got) == {k for k, v in want.items() if v != 0}
                and all(sp.sympify(want[k]) == got[k] for k in got))
        if same:
            continue
        gtxt = " + ".join(f"({sp.sstr(c)})*{k}" for k, c in got.items()) \
            or "0"
        msg = (f"bracket [{n1}, {n2}]: expected "
               + (" + ".join(f"({sp.sstr(c)})*{k}" for k, c in want.items())
                  or "0")
               + f", engine finds {gtxt}")
        if f"bracket:{n1},{n2}" in case.tolerated:
            discrepancies.append(msg)
        else:
            failures.append(msg)
    return table


def run_reduction(case: cat.CaseStudy, rc: cat.ReductionCase,
                  algebra: SymmetryAlgebra, *,
                  degree: int | None = None, failures=None,
                  discrepancies=None):
    """Reduce the heat equation by one named generator and classify the
    outcome against the case expectations."""
    failures = failures if failures is not None else []
    discrepancies = discrepancies if discrepancies is not None else []
    m = case.metric
    pde = geo.heat_pde(m)
    Z = algebra.named(rc.by)
    invch = invariants_for(Z, names=rc.invariant_names)
    red = reduce_pde(pde, Z, invch)

    basis_note = ""
    if rc.route in ("heat", "flux"):
        block = Metric(invch.chart, case.block.g)
        bentries = [
            AlgebraEntry(v.name,
                         VectorField(invch.chart,
                                     tuple(sp.sympify(c)
                                           for c in v.components)),
                         CollineationClass(v.kind, sp.sympify(v.psi),
                                           v.factory_flag()),
                         potential=(sp.sympify(v.potential)
                                    if v.potential is not None else None))
            for v in case.block_vectors]
        factory = (heat_symmetries_from_homothetic if rc.route == "heat"
                   else flux_symmetries_from_homothetic)
        rsyms = factory(block, bentries)
        basis_note = "block homothetic-algebra factory"
    elif rc.route == "laplace":
        det = laplace_form_detect(red.pde)
        if det is None:
            failures.append(
                f"reduction by {rc.by}: reduced equation not recognized as "
                "a conformal Laplace equation")
            rsyms = SymmetryAlgebra({})
        else:
            conf, _ = det
            ckvs = []
            for name, comps in case.ckv_candidates.get(rc.by, ()):
                v = VectorField(invch.chart,
                                tuple(sp.sympify(c) for c in comps))
                cls = geo.classify_collineation(v, conf)
                if cls.kind is CollineationKind.NOT_CONFORMAL:
                    failures.append(
                        f"reduction by {rc.by}: candidate {name} is not "
                        "conformal for the detected metric")
                    continue
                ckvs.append((name, v, cls.psi))
            rsyms = laplace_symmetries_from_ckv(conf, ckvs)
            basis_note = "conformal-algebra factory on the detected metric"
    elif rc.route == "ansatz":
        deg = rc.degree if degree is None else degree
        kernels = tuple(ex.parse_expr(k) for k in rc.kernels)
        basis = monomial_basis(invch.chart.coords, deg, kernels=kernels)
        rsyms = ansatz_solve_determining(red.pde, basis)
        kern = ", ".join(rc.kernels) if rc.kernels else "none"
        basis_note = (f"polynomial ansatz of degree {deg}, kernels: {kern}")
    else:
        raise ValueError(f"unknown reduction route {rc.route!r}")

    report = classify_reduction(algebra, rc.by, red, rsyms,
                                basis_note=basis_note)

    if rc.expected_flux is not None:
        want = ex.parse_expr(rc.expected_flux)
        if ex.normalize(red.pde.f - want) != 0:
            failures.append(
                f"reduction by {rc.by}: expected flux {rc.expected_flux}, "
                f"got {ex.print_expr(red.pde.f)}")
    background = {"X_u", "X_b"}
    if rc.expected_survivors is not None:
        got = {n for n, _ in report.inherited} - background
        want = set(rc.expected_survivors)
        if got != want:
            failures.append(
                f"reduction by {rc.by}: expected surviving set "
                f"{sorted(want)}, got {sorted(got)}")
        if report.type2_hidden:
            names = [n for n, _ in report.type2_hidden]
            failures.append(
                f"reduction by {rc.by}: expected no Type II hidden "
                f"symmetries, got {names}")
    else:
        got = {n for n, _ in report.type2_hidden}
        want = set(rc.expected_type2)
        if got != want:
            failures.append(
                f"reduction by {rc.by}: expected Type II set "
                f"{sorted(want)}, got {sorted(got)}")
    return report


def serialize_reduction(report) -> dict:
    invch = report.reduced.chart
    return {
        "by": report.by,
        "invariants": {str(c): ex.print_expr(inv)
                       for c, inv in zip(invch.chart.coords,
                                         invch.invariants)},
        "nu": ex.print_expr(invch.nu),
        "reduced_pde": serialize_pde(report.reduced.pde),
        "inherited": [serialize_generator(n, g)
                      for n, g in report.inherited],
        "type1_hidden": list(report.type1_hidden),
        "type2_hidden": [serialize_generator(n, g)
                         for n, g in report.type2_hidden],
        "basis": report.basis,
        "caveats": list(report.caveats),
    }


def _numeric_section(pde_boxes, seed: int, tol: float) -> dict:
    """Worst sampled residual across (residual list, box) groups."""
    worst = 0.0
    for exprs, box in pde_boxes:
        if not exprs:
            continue
        cfg = SampleConfig(seed=seed, samples=100, intervals=box,
                           tolerance=tol)
        w, _ = max_abs_residual(exprs, cfg)
        worst = max(worst, w)
    return {"seed": seed, "tol": tol, "max_residual": worst}


def _residual_group(pde, algebra: SymmetryAlgebra):
    exprs = []
    for _, gen in algebra.explicit_items():
        exprs.extend(r for r in symmetry_residuals(pde, gen)
                     if ex.normalize(r) != 0)
    box = dict(pde.chart.intervals())
    box.setdefault("t", (0.5, 2.0))
    box.setdefault("u", (0.5, 2.0))
    return exprs, box


def run_case(case: cat.CaseStudy, *, seed: int = 0, tol: float = 1e-9,
             degree: int | None = None,
             reductions: bool = True) -> CaseRun:
    """Full pipeline on one case: verify collineations, build the heat
    algebra, check the commutator table, run every reduction and collect
    the schema-shaped report."""
    failures: list[str] = []
    discrepancies: list[str] = list(case.discrepancies)
    m = case.metric
    entries, records = verified_entries(
        case.vectors, m, tolerated=case.tolerated, failures=failures,
        discrepancies=discrepancies)
    algebra = heat_symmetries_from_homothetic(m, entries)
    extra = set(algebra.generators) - {"X_t", "X_u", "X_b"}
    if extra != set(case.expected_extra):
        failures.append(
            f"extra heat symmetries: expected {sorted(case.expected_extra)},"
            f" got {sorted(extra)}")
    _check_commutators(case, algebra, failures, discrepancies)

    pde = geo.heat_pde(m)
    groups = [_residual_group(pde, algebra)]
    red_reports = []
    red_json = []
    if reductions:
        for rc in case.reductions:
            rep = run_reduction(case, rc, algebra, degree=degree,
                                failures=failures,
                                discrepancies=discrepancies)
            red_reports.append(rep)
            red_json.append(serialize_reduction(rep))
            sub = SymmetryAlgebra(
                dict(rep.inherited) | dict(rep.type2_hidden))
            groups.append(_residual_group(rep.reduced.pde, sub))

    report = {
        "case": case.name,
        "metric": serialize_metric(m),
        "collineations": records,
        "heat_symmetries": [serialize_generator(n, g)
                            for n, g in algebra.generators.items()],
        "reductions": red_json,
        "discrepancies": discrepancies,
        "numeric": _numeric_section(groups, seed, tol),
    }
    if report["numeric"]["max_residual"] > tol:
        failures.append(
            f"numeric residual {report['numeric']['max_residual']:.3e} "
            f"exceeds tolerance {tol:.1e}")
    validate_report(report)
    return CaseRun(report=report, failures=failures, algebra=algebra,
                   entries=entries, reduction_reports=red_reports)


# ---------------------------------------------------------------------------
# Rendering
# ---------------------------------------------------------------------------

def _gen_text(g: dict) -> str:
    parts = [f"({c})*{b}" for b, c in zip(g["basis"], g["coefficients"])
             if c not in ("0",)]
    return " + ".join(parts) if parts else "0"


def render_markdown(report: dict) -> str:
    lines = [f"# Case {report['case']}", ""]
    lines.append("## Metric")
    lines.append("coordinates: " + ", ".join(report["metric"]["coords"]))
    for row in report["metric"]["components"]:
        lines.append("    [" + ", ".join(row) + "]")
    lines.append("")
    lines.append("## Collineations")
    for c in report["collineations"]:
        psi = c["psi"] if c["psi"] is not None else "-"
        flag = "ok" if c["verified"] else "MISMATCH"
        lines.append(f"- {c['name']}: {c['kind']}, psi = {psi}, "
                     f"gradient = {c['gradient']} [{flag}]")
    lines.append("")
    lines.append("## Heat symmetries")
    for g in report["heat_symmetries"]:
        lines.append(f"- {g['name']} = {_gen_text(g)}")
    for red in report["reductions"]:
        lines.append("")
        lines.append(f"## Reduction by {red['by']}")
        invs = ", ".join(f"{k} = {v}" for k, v in red["invariants"].items())
        lines.append(f"invariants: {invs}; nu = {red['nu']}")
        pde = red["reduced_pde"]
        lines.append(f"reduced equation on ({', '.join(pde['coords'])}), "
                     f"f = {pde['f']}, evolution = {pde['has_ut']}")
        lines.append("inherited: "
                     + (", ".join(g["name"] for g in red["inherited"])
                        or "none"))
        lines.append("type I hidden: "
                     + (", ".join(red["type1_hidden"]) or "none"))
        if red["type2_hidden"]:
            lines.append("type II hidden:")
            for g in red["type2_hidden"]:
                lines.append(f"- {g['name']} = {_gen_text(g)}")
        else:
            lines.append("type II hidden: none")
        if red["basis"]:
            lines.append(f"basis: {red['basis']}")
        for cav in red["caveats"]:
            lines.append(f"caveat: {cav}")
    lines.append("")
    lines.append("## Discrepancies")
    for d in report["discrepancies"] or ["none"]:
        lines.append(f"- {d}")
    num = report["numeric"]
    lines.append("")
    lines.append(f"numeric check: seed {num['seed']}, tol {num['tol']}, "
                 f"max residual {num['max_residual']:.3e}")
    return "\n".join(lines) + "\n"


def _emit(args, report: dict) -> None:
    if args.json:
        print(json.dumps(report, indent=2))
    else:
        print(render_markdown(report), end="")


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def _case_from_args(args) -> cat.CaseStudy:
    params = {}
    for p in args.param or ():
        key, _, val = p.partition("=")
        params[key] = int(val)
    return cat.get_case(args.case, **params)


def _file_case(args) -> cat.CaseStudy:
    """Wrap a metric file in a minimal anonymous case."""
    mf = load_metric_file(args.file)
    reductions = ()
    if mf.reduce_by:
        reductions = (cat.ReductionCase(
            mf.reduce_by, mf.invariant_names or (), mf.route,
            degree=mf.degree, kernels=mf.kernels,
            expected_survivors=None, expected_type2=()),)
    return cat.CaseStudy(
        name=args.file, description="metric file", metric=mf.metric,
        vectors=tuple(mf.vectors), reductions=reductions,
        expected_extra=(), expected_commutators={})


def _target(args) -> cat.CaseStudy:
    return _case_from_args(args) if args.case else _file_case(args)


def cmd_validate(args) -> int:
    case = _target(args)
    failures: list[str] = []
    discrepancies: list[str] = []
    _, records = verified_entries(case.vectors, case.metric,
                                  tolerated=case.tolerated,
                                  failures=failures,
                                  discrepancies=discrepancies)
    for r in records:
        psi = r["psi"] if r["psi"] is not None else "-"
        status = "ok" if r["verified"] else "MISMATCH"
        print(f"{r['name']}: {r['kind']}, psi = {psi}, "
              f"gradient = {r['gradient']} [{status}]")
    for d in discrepancies:
        print(f"discrepancy: {d}")
    for f in failures:
        print(f"unmet: {f}", file=sys.stderr)
    return EXIT_UNMET if failures else EXIT_OK


def cmd_collineations(args) -> int:
    case = _target(args)
    m = case.metric
    basis = monomial_basis(m.chart.coords, args.ansatz_degree)
    kind = CollineationKind[args.kind]
    for k, (v, psi) in enumerate(ansatz_solve_collineation(m, kind, basis)):
        comps = ", ".join(ex.print_expr(c) for c in v.components)
        print(f"V{k + 1}: ({comps}), psi = {ex.print_expr(psi)}")
    return EXIT_OK


def cmd_heat_symmetries(args) -> int:
    case = _target(args)
    failures: list[str] = []
    entries, _ = verified_entries(case.vectors, case.metric,
                                  tolerated=case.tolerated,
                                  failures=failures)
    algebra = heat_symmetries_from_homothetic(case.metric, entries)
    out = {"case": case.name,
           "heat_symmetries": [serialize_generator(n, g)
                               for n, g in algebra.generators.items()],
           "notes": algebra.notes}
    if args.json:
        print(json.dumps(out, indent=2))
    else:
        for n, g in algebra.generators.items():
            print(f"{n} = {g.pretty()}")
        for note in algebra.notes:
            print(f"note: {note}")
    return EXIT_UNMET if failures else EXIT_OK


def cmd_laplace_symmetries(args) -> int:
    case = _target(args)
    m = case.metric
    ckvs = []
    for dv in case.vectors:
        v = VectorField(m.chart, tuple(sp.sympify(c) for c in dv.components))
        cls = geo.classify_collineation(v, m)
        if cls.kind is CollineationKind.NOT_CONFORMAL:
            print(f"{dv.name}: not conformal, skipped")
            continue
        ckvs.append((dv.name, v, cls.psi))
    algebra = laplace_symmetries_from_ckv(m, ckvs)
    for n, g in algebra.generators.items():
        print(f"{n} = {g.pretty()}")
    for note in algebra.notes:
        print(f"note: {note}")
    return EXIT_OK


def cmd_reduce(args) -> int:
    case = _target(args)
    failures: list[str] = []
    entries, _ = verified_entries(case.vectors, case.metric,
                                  tolerated=case.tolerated,
                                  failures=failures)
    algebra = heat_symmetries_from_homothetic(case.metric, entries)
    by = args.by or (case.reductions[0].by if case.reductions else None)
    if by is None:
        print("no reduction generator given (--by)", file=sys.stderr)
        return EXIT_ERROR
    names = None
    for rc in case.reductions:
        if rc.by == by:
            names = rc.invariant_names
    Z = algebra.named(by)
    invch = invariants_for(Z, names=names)
    red = reduce_pde(geo.heat_pde(case.metric), Z, invch)
    for c, inv in zip(invch.chart.coords, invch.invariants):
        print(f"{c} = {ex.print_expr(inv)}")
    print(f"nu = {ex.print_expr(invch.nu)}")
    print(json.dumps(serialize_pde(red.pde), indent=2))
    return EXIT_OK


def cmd_classify(args) -> int:
    case = _target(args)
    failures: list[str] = []
    discrepancies: list[str] = []
    entries, _ = verified_entries(case.vectors, case.metric,
                                  tolerated=case.tolerated,
                                  failures=failures,
                                  discrepancies=discrepancies)
    algebra = heat_symmetries_from_homothetic(case.metric, entries)
    targets = [rc for rc in case.reductions
               if args.by is None or rc.by == args.by]
    if not targets:
        print("no matching reduction target", file=sys.stderr)
        return EXIT_ERROR
    for rc in targets:
        rep = run_reduction(case, rc, algebra,
                            degree=args.ansatz_degree,
                            failures=failures, discrepancies=discrepancies)
        out = serialize_reduction(rep)
        if args.json:
            print(json.dumps(out, indent=2))
        else:
            print(f"reduction by {rc.by}")
            print("  inherited: "
                  + (", ".join(n for n, _ in rep.inherited) or "none"))
            print("  type I hidden: "
                  + (", ".join(rep.type1_hidden) or "none"))
            if rep.type2_hidden:
                print("  type II hidden:")
                for n, g in rep.type2_hidden:
                    print(f"    {n} = {g.pretty()}")
            else:
                print("  type II hidden: none")
            for cav in rep.caveats:
                print(f"  caveat: {cav}")
    for f in failures:
        print(f"unmet: {f}", file=sys.stderr)
    return EXIT_UNMET if failures else EXIT_OK


def cmd_commutators(args) -> int:
    case = _target(args)
    failures: list[str] = []
    entries, _ = verified_entries(case.vectors, case.metric,
                                  tolerated=case.tolerated,
                                  failures=failures)
    algebra = heat_symmetries_from_homothetic(case.metric, entries)
    table, exceptions = algebra.structure_constants()
    seen = set()
    for (n1, n2), coeffs in table.items():
        if (n2, n1) in seen or not coeffs:
            continue
        seen.add((n1, n2))
        txt = " + ".join(f"({sp.sstr(c)})*{n}" for n, c in coeffs.items())
        print(f"[{n1}, {n2}] = {txt}")
    for n1, n2 in exceptions:
        print(f"[{n1}, {n2}]: outside the computed algebra")
    return EXIT_OK


def cmd_paper_suite(args) -> int:
    names = [args.case] if args.case else list(cat.case_names())
    any_failed = False
    for name in names:
        case = cat.get_case(name)
        run = run_case(case, seed=args.seed, tol=args.tol,
                       degree=args.ansatz_degree)
        _emit(args, run.report)
        for f in run.failures:
            print(f"unmet [{name}]: {f}", file=sys.stderr)
        any_failed = any_failed or bool(run.failures)
    return EXIT_UNMET if any_failed else EXIT_OK


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------

def _add_target(p, file_ok=True):
    p.add_argument("--case", choices=cat.case_names(),
                   help="built-in case study")
    if file_ok:
        p.add_argument("file", nargs="?",
                       help="metric definition file (TOML)")
    p.add_argument("--param", action="append",
                   help="case parameter NAME=INT (repeatable)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="symred",
        description="Lie point symmetries of the heat equation on "
                    "Riemannian manifolds, reductions and hidden-symmetry "
                    "classification")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate",
                       help="verify declared collineations against the "
                            "metric")
    _add_target(p)
    p.set_defaults(fn=cmd_validate)

    p = sub.add_parser("collineations",
                       help="search for collineations by polynomial ansatz")
    _add_target(p)
    p.add_argument("--kind", choices=("KV", "HV", "CKV"), default="HV")
    p.add_argument("--ansatz-degree", type=int, default=2)
    p.set_defaults(fn=cmd_collineations)

    p = sub.add_parser("heat-symmetries",
                       help="heat-equation symmetries from the homothetic "
                            "algebra")
    _add_target(p)
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=cmd_heat_symmetries)

    p = sub.add_parser("laplace-symmetries",
                       help="Laplace-equation symmetries from the conformal "
                            "algebra")
    _add_target(p)
    p.set_defaults(fn=cmd_laplace_symmetries)

    p = sub.add_parser("reduce",
                       help="reduce the heat equation by a named generator")
    _add_target(p)
    p.add_argument("--by", help="generator name")
    p.set_defaults(fn=cmd_reduce)

    p = sub.add_parser("classify",
                       help="classify inherited and hidden symmetries of a "
                            "reduction")
    _add_target(p)
    p.add_argument("--by", help="generator name (default: all targets)")
    p.add_argument("--json", action="store_true")
    p.add_argument("--ansatz-degree", type=int, default=None)
    p.set_defaults(fn=cmd_classify)

    p = sub.add_parser("commutators",
                       help="commutator table of the heat symmetry algebra")
    _add_target(p)
    p.set_defaults(fn=cmd_commutators)

    p = sub.add_parser("paper-suite",
                       help="run the full golden suite of built-in cases")
    p.add_argument("--case", choices=cat.case_names(),
                   help="restrict to one case")
    p.add_argument("--json", action="store_true")
    p.add_argument("--md", action="store_true",
                   help="markdown output (default)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--ansatz-degree", type=int, default=None)
    p.set_defaults(fn=cmd_paper_suite)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    if getattr(args, "case", None) is None \
            and getattr(args, "file", None) is None \
            and args.command != "paper-suite":
        ap.error("either --case or a metric file is required")
    try:
        return args.fn(args)
    except (ex.ExprError, geo.GeometryError, OSError, KeyError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
