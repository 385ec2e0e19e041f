import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from symred.linsys import nullspace, solve_affine, split_identity

x, y, t = sp.symbols("x y t")
a, b, c = sp.symbols("a b c", cls=sp.Dummy)


class TestSplitIdentity:
    def test_polynomial(self):
        conds = split_identity(a * x ** 2 + (b - 1) * x + a + c, [x])
        sol = solve_affine(conds, [a, b, c])
        assert sol[a] == 0 and sol[b] == 1 and sol[c] == 0

    def test_exponential_kernel(self):
        conds = split_identity(a * sp.exp(x) + b * x, [x])
        sol = solve_affine(conds, [a, b])
        assert sol[a] == 0 and sol[b] == 0

    def test_log_kernel(self):
        conds = split_identity((a - b) * sp.log(x) + b * x ** 2, [x])
        sol = solve_affine(conds, [a, b])
        assert sol == {a: 0, b: 0}

    def test_fractional_power_kernel(self):
        conds = split_identity(a * x ** sp.Rational(1, 3) + b, [x])
        sol = solve_affine(conds, [a, b])
        assert sol == {a: 0, b: 0}

    def test_nonlinear_unknowns_unsatisfiable(self):
        # an unknown inside a kernel argument cannot cancel; the split
        # yields an inconsistent condition instead of a bogus solution
        conds = split_identity(sp.exp(a * x), [x])
        assert solve_affine(conds, [a]) is None


class TestNullspace:
    def test_one_dimensional(self):
        sols = nullspace([a - 2 * b], [a, b])
        assert len(sols) == 1
        s = sols[0]
        # canonical scaling: leading coefficient one
        assert s[a] / s[b] == 2

    def test_full_rank_is_empty(self):
        assert nullspace([a, b], [a, b]) == []

    def test_deterministic_order(self):
        sols1 = nullspace([], [a, b])
        sols2 = nullspace([], [a, b])
        assert [tuple(s.items()) for s in sols1] == \
            [tuple(s.items()) for s in sols2]
        assert len(sols1) == 2


class TestSolveAffine:
    def test_inconsistent(self):
        assert solve_affine([a, a - 1], [a]) is None

    def test_free_parameters_pinned(self):
        sol = solve_affine([a - b], [a, b, c])
        assert sol[c] == 0
        assert sol[a] == sol[b]


@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(-5, 5), min_size=4, max_size=4))
def test_nullspace_members_satisfy_conditions(coeffs):
    m11, m12, m21, m22 = coeffs
    conds = [m11 * a + m12 * b, m21 * a + m22 * b]
    for sol in nullspace(conds, [a, b]):
        for cond in conds:
            assert sp.simplify(cond.subs(sol)) == 0
