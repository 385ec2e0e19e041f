"""Splitting symbolic identities into exact linear conditions.

An identity ``E(x; c) == 0`` that must hold for all chart coordinates
``x`` and is linear in unknown constants ``c`` is turned into a finite
list of linear conditions on ``c`` by writing E over a common
denominator, extracting transcendental kernels (``ln``/``exp`` atoms,
fractional powers) as fresh symbols and collecting the numerator as a
polynomial in coordinates and kernels.

Kernels are treated as algebraically independent.  That is sound (no
false solutions slip through, callers re-verify solutions anyway) but can
over-constrain when kernels are secretly dependent; completeness claims
downstream are therefore always stated relative to the ansatz basis.
"""

from __future__ import annotations

import itertools
from typing import Iterable, Sequence

import sympy as sp
from sympy.polys.domains import QQ
from sympy.polys.matrices import DomainMatrix

from .expr import NotPolynomialError


def _extract_exp_kernels(e: sp.Expr, reps: dict) -> sp.Expr:
    groups: list[tuple[sp.Expr, sp.Symbol]] = []  # (primitive arg, symbol)
    for atom in sorted(e.atoms(sp.exp), key=sp.default_sort_key):
        arg = atom.args[0]
        repl = None
        for parg, sym in groups:
            ratio = sp.cancel(arg / parg)
            if ratio.is_Rational:
                repl = sym ** ratio
                break
        if repl is None:
            sym = sp.Dummy(f"Kexp{len(reps)}", positive=True)
            groups.append((arg, sym))
            reps[sym] = atom
            repl = sym
        e = e.subs(atom, repl)
    return e


def _extract_log_kernels(e: sp.Expr, reps: dict) -> sp.Expr:
    for atom in sorted(e.atoms(sp.log), key=sp.default_sort_key):
        sym = sp.Dummy(f"Klog{len(reps)}")
        reps[sym] = atom
        e = e.subs(atom, sym)
    return e


def _clear_fractional_powers(e: sp.Expr, gens: list[sp.Symbol],
                             reps: dict) -> sp.Expr:
    """Substitute s -> q**d so every rational power becomes integral."""
    denoms: dict[sp.Symbol, int] = {}
    extra_kernels = []
    for atom in e.atoms(sp.Pow):
        expo = atom.exp
        if expo.is_Rational and not expo.is_Integer:
            if atom.base.is_Symbol:
                d = denoms.get(atom.base, 1)
                denoms[atom.base] = sp.ilcm(d, expo.q)
            else:
                extra_kernels.append(atom)
    for atom in sorted(set(extra_kernels), key=sp.default_sort_key):
        sym = sp.Dummy(f"Kpow{len(reps)}", positive=True)
        reps[sym] = atom
        e = e.subs(atom, sym)
    for s, d in denoms.items():
        if d == 1:
            continue
        q = sp.Dummy(f"Q{s}", positive=True)
        reps[q] = s ** sp.Rational(1, d)
        e = e.subs(s, q ** d)
        if s in gens:
            gens[gens.index(s)] = q
        else:
            gens.append(q)
    return e


def split_identity(e: sp.Expr, wrt: Sequence[sp.Symbol]) -> list[sp.Expr]:
    """Conditions whose joint vanishing forces ``e == 0`` identically in
    the symbols ``wrt`` (other symbols ride along inside coefficients)."""
    e = sp.sympify(e)
    if e == 0:
        return []
    e = sp.expand_log(sp.expand(e), force=True)
    e = sp.powsimp(e, deep=True, combine="exp")
    reps: dict = {}
    e = _extract_exp_kernels(e, reps)
    e = _extract_log_kernels(e, reps)
    e = sp.together(sp.expand(e))
    num, _den = sp.fraction(sp.cancel(e))
    gens = [s for s in wrt] + [s for s in reps if num.has(s)]
    num = _clear_fractional_powers(sp.expand(num), gens, reps)
    gens = [g for g in gens if num.has(g)]
    if not gens:
        return [num] if num != 0 else []
    try:
        poly = sp.Poly(num, *gens)
    except sp.PolynomialError as exc:
        raise NotPolynomialError(
            f"identity is not polynomial in {gens} after kernel "
            f"extraction: {exc}") from exc
    return [sp.expand(c) for c in poly.coeffs()]


def _linear_rows(conditions: Iterable[sp.Expr],
                 params: Sequence[sp.Symbol]) -> list[list[sp.Rational]]:
    """Each condition must be linear homogeneous in ``params`` with
    rational coefficients; returns the coefficient rows."""
    rows = []
    pset = set(params)
    for cond in conditions:
        cond = sp.expand(cond)
        if cond == 0:
            continue
        row = [sp.Integer(0)] * len(params)
        rest = cond
        for k, p in enumerate(params):
            coeff = cond.coeff(p, 1)
            if coeff.free_symbols & pset:
                raise NotPolynomialError(
                    f"condition not linear in parameters: {cond}")
            if not coeff.is_Rational:
                raise NotPolynomialError(
                    f"non-rational coefficient {coeff} of {p} in {cond}")
            row[k] = coeff
            rest -= coeff * p
        if sp.expand(rest) != 0:
            raise NotPolynomialError(
                f"condition has a parameter-free part: {cond}")
        rows.append(row)
    return rows


def nullspace(conditions: Iterable[sp.Expr],
              params: Sequence[sp.Symbol]) -> list[dict[sp.Symbol, sp.Rational]]:
    """Exact rational nullspace of a homogeneous linear system given as
    symbolic conditions.  Returns one ``{param: value}`` map per basis
    vector of the solution space."""
    params = list(params)
    rows = _linear_rows(conditions, params)
    if not rows:
        return [{p: sp.Integer(1 if i == k else 0)
                 for i, p in enumerate(params)}
                for k in range(len(params))]
    dm = DomainMatrix([[QQ.convert(v) for v in row] for row in rows],
                      (len(rows), len(params)), QQ)
    ns = dm.nullspace().to_Matrix()
    out = []
    for r in range(ns.rows):
        vec = [sp.nsimplify(ns[r, c]) for c in range(ns.cols)]
        # scale to a canonical leading coefficient of 1
        lead = next((v for v in vec if v != 0), sp.Integer(1))
        vec = [sp.Rational(v / lead) for v in vec]
        out.append({p: v for p, v in zip(params, vec)})
    out.sort(key=lambda sol: sp.default_sort_key(tuple(sol.values())))
    return out


def solve_affine(equations: Iterable[sp.Expr],
                 params: Sequence[sp.Symbol]) -> dict[sp.Symbol, sp.Expr] | None:
    """Solve a small (possibly inhomogeneous) linear system exactly;
    None when inconsistent.  Underdetermined systems pin the free
    parameters to 0."""
    params = list(params)
    eqs = [sp.expand(e) for e in equations if sp.expand(e) != 0]
    if not eqs:
        return {p: sp.Integer(0) for p in params}
    sol = sp.linsolve(eqs, params)
    if not sol:
        return None
    vec = next(iter(sol))
    free = set().union(*[v.free_symbols for v in vec]) & set(params)
    subs = {f: 0 for f in free}
    return {p: sp.simplify(v.subs(subs)) for p, v in zip(params, vec)}
