"""Inheritance analysis and hidden-symmetry classification.

A reduction by a generator Z partitions the source symmetries: those
whose bracket with Z stays in span{Z} (modulo the always-present
u-scaling and arbitrary-solution family) project to point symmetries of
the reduced equation; the rest are lost (Type I hidden relative to the
reduced equation).  Symmetries of the reduced equation that are not
images of source symmetries are Type II hidden.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import sympy as sp

from . import expr as ex
from .expr import Expression
from .geometry import GeometryError
from .pde import (ARBITRARY_SOLUTION, DEP, TIME, PointGenerator,
                  QuasiLinearPDE, SymmetryAlgebra, commutator,
                  express_in_span)
from .reduction import InvariantChart, ReducedPDE, _surely_zero
from .symmetry import Verdict, is_symmetry


class ClassificationError(GeometryError):
    """An inheriting generator's image failed symmetry verification."""


def _is_background(gen: PointGenerator) -> bool:
    """u-scaling and marker generators: present for every linear equation
    and excluded from the inheritance bookkeeping."""
    if gen.has_marker:
        return True
    return (gen.xi_t == 0 and all(c == 0 for c in gen.xi)
            and gen.b == 0 and not gen.a.free_symbols)


def inheritance_map(algebra: SymmetryAlgebra, Z: PointGenerator
                    ) -> dict[str, str]:
    """Per-generator verdict ``inheriting`` / ``non-inheriting`` /
    ``undetermined`` against the reduction generator Z.

    X inherits iff [X, Z] lies in span{Z} modulo the u-scaling/marker
    ideal; a bracket that leaves the recorded algebra is flagged as
    undetermined rather than guessed.
    """
    items = algebra.explicit_items()
    z_names = {n for n, g in items if g.same_line(Z)}
    allowed = z_names | {n for n, g in items if _is_background(g)}
    out: dict[str, str] = {}
    basis = dict(items)
    for name, g in items:
        if name in z_names or _is_background(g):
            continue
        br = commutator(g, Z)
        if br.is_zero():
            out[name] = "inheriting"
            continue
        coeffs = express_in_span(br, basis)
        if coeffs is None:
            out[name] = "undetermined"
            continue
        bad = [n for n, c in coeffs.items() if c != 0 and n not in allowed]
        out[name] = "non-inheriting" if bad else "inheriting"
    return out


def pushforward(gen: PointGenerator, invch: InvariantChart
                ) -> PointGenerator | None:
    """Image of ``gen`` in the invariant chart, or None when some
    component cannot be expressed in the invariants (the generator does
    not project to a point transformation of the reduced space)."""
    new_syms = list(invch.chart.coords)
    comps = [gen.apply(inv) for inv in invch.invariants]
    if invch.has_time:
        xi_t = gen.xi_t
        if xi_t.free_symbols - {TIME}:
            return None
    else:
        xi_t = sp.Integer(0)
        if gen.xi_t != 0:
            # t is eliminated; a nonzero xi^t must not reappear elsewhere
            pass
    a_new = gen.a + gen.apply(invch.nu) / invch.nu
    if gen.has_marker:
        b_new: Expression | object = ARBITRARY_SOLUTION
    else:
        b_new = gen.b * invch.nu

    def to_new(e):
        e = sp.sympify(e).subs(invch.inverse, simultaneous=True)
        e = sp.cancel(sp.together(sp.expand(e)))
        return ex.normalize(e)

    box = dict(invch.chart.intervals())
    box[str(invch.eliminated)] = (0.5, 2.0)
    if invch.has_time:
        box.setdefault("t", (0.5, 2.0))

    out_parts = []
    parts = comps + [a_new] + ([] if gen.has_marker else [b_new])
    for e in parts:
        e = to_new(e)
        if e.has(invch.eliminated):
            if not _surely_zero(sp.diff(e, invch.eliminated), box):
                return None
            e = ex.normalize(e.subs(invch.eliminated, 1))
        out_parts.append(e)
    comps = out_parts[:len(new_syms)]
    a_new = out_parts[len(new_syms)]
    if not gen.has_marker:
        b_new = out_parts[len(new_syms) + 1]
    return PointGenerator(invch.chart, tuple(comps), xi_t=xi_t,
                          a=a_new, b=b_new)


@dataclass
class ReductionReport:
    """Outcome of classifying one reduction."""

    by: str
    generator: PointGenerator
    reduced: ReducedPDE
    #: (source name, image in the reduced chart)
    inherited: list[tuple[str, PointGenerator]] = field(default_factory=list)
    #: Type I hidden: source symmetries lost in this reduction.
    type1_hidden: list[str] = field(default_factory=list)
    #: Type II hidden: reduced-equation symmetries with no source origin.
    type2_hidden: list[tuple[str, PointGenerator]] = field(
        default_factory=list)
    basis: str = ""
    caveats: list[str] = field(default_factory=list)


def classify_reduction(
    algebra: SymmetryAlgebra,
    z_name: str,
    reduced: ReducedPDE,
    reduced_syms: SymmetryAlgebra,
    *,
    basis_note: str = "",
) -> ReductionReport:
    """Partition the source algebra and the reduced-equation algebra.

    Inheriting generators are pushed through the invariant chart and must
    verify as symmetries of the reduced equation (hard error otherwise).
    A generator satisfying the bracket criterion whose components are not
    expressible in the invariants is demoted to lost, with a caveat.
    """
    Z = algebra.named(z_name)
    invch = reduced.chart
    report = ReductionReport(by=z_name, generator=Z, reduced=reduced,
                             basis=basis_note)
    inh = inheritance_map(algebra, Z)
    images: list[PointGenerator] = []
    for name, gen in algebra.generators.items():
        if gen.same_line(Z):
            continue
        if gen.has_marker:
            report.inherited.append(
                (name, PointGenerator(invch.chart,
                                      (sp.Integer(0),) * invch.chart.dim,
                                      b=ARBITRARY_SOLUTION)))
            continue
        verdict = inh.get(name)
        if verdict is None and _is_background(gen):
            verdict = "inheriting"
        push = pushforward(gen, invch)
        if push is None:
            report.type1_hidden.append(name)
            if verdict == "inheriting":
                report.caveats.append(
                    f"{name}: bracket criterion satisfied but the generator "
                    "does not project to the invariant chart; counted lost")
            continue
        sym, _ = is_symmetry(reduced.pde, push)
        if sym is Verdict.NO:
            if verdict == "inheriting":
                raise ClassificationError(
                    f"{name}: projects but its image fails the symmetry "
                    "check on the reduced equation")
            report.type1_hidden.append(name)
            continue
        if sym is Verdict.UNKNOWN:
            report.caveats.append(
                f"{name}: image symmetry check undecided, counted inherited")
        report.inherited.append((name, push.canonical()))
        images.append(push)
        if verdict == "undetermined":
            report.caveats.append(
                f"{name}: bracket leaves the recorded algebra; projected "
                "image verified directly")

    for name, gen in reduced_syms.generators.items():
        if gen.has_marker or _is_background(gen):
            continue
        if any(gen.same_line(img) for img in images):
            continue
        report.type2_hidden.append((name, gen.canonical()))
    report.caveats.extend(n for n in reduced_syms.notes if n)
    return report
