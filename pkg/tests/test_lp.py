from fractions import Fraction

from hypothesis import given, strategies as st
from scipy.optimize import linprog

from invsem.decide.lp import Constraint, check_certificate, check_solution, solve_feasibility


@st.composite
def systems(draw):
    n = draw(st.integers(1, 5))
    m = draw(st.integers(1, 5))
    rows = [[draw(st.integers(-3, 3)) for _ in range(n)] for _ in range(m)]
    rhs = [draw(st.integers(-3, 3)) for _ in range(m)]
    return n, rows, rhs


def to_constraints(rows, rhs):
    return [Constraint(f"r{i}", {j: Fraction(a) for j, a in enumerate(r) if a}, Fraction(b))
            for i, (r, b) in enumerate(zip(rows, rhs))]


@given(systems())
def test_feasibility_agrees_with_floating_point_solver(system):
    n, rows, rhs = system
    res = solve_feasibility(n, to_constraints(rows, rhs))
    oracle = linprog([0] * n, A_eq=rows, b_eq=rhs, bounds=[(0, None)] * n, method="highs")
    assert oracle.status in (0, 2)
    assert res.feasible == (oracle.status == 0)
    assert res.verify()


@given(systems())
def test_answers_are_self_certifying(system):
    n, rows, rhs = system
    cons = to_constraints(rows, rhs)
    res = solve_feasibility(n, cons)
    if res.feasible:
        assert check_solution(cons, res.values)
    else:
        assert check_certificate(n, cons, res.certificate)


def test_duplicate_rows_and_simple_cases():
    cons = [Constraint("a", {0: Fraction(1), 1: Fraction(1)}, Fraction(1)),
            Constraint("b", {0: Fraction(2), 1: Fraction(2)}, Fraction(2)),
            Constraint("c", {0: Fraction(1), 1: Fraction(-1)}, Fraction(0))]
    res = solve_feasibility(2, cons)
    assert res.feasible and res.values == [Fraction(1, 2), Fraction(1, 2)]
    bad = [Constraint("a", {0: Fraction(1)}, Fraction(-1))]
    res = solve_feasibility(1, bad)
    assert not res.feasible and res.verify()


def test_tampered_certificate_is_rejected():
    cons = [Constraint("a", {0: Fraction(1)}, Fraction(1)),
            Constraint("b", {0: Fraction(1)}, Fraction(2))]
    res = solve_feasibility(1, cons)
    assert not res.feasible and res.verify()
    assert not check_certificate(1, cons, [("a", Fraction(1))])
    assert not check_certificate(1, cons, [("zz", Fraction(1))])
