from fractions import Fraction

from hypothesis import given, settings
from hypothesis import strategies as st

from cse_kit.gaussq import QQi
from cse_kit.nondegeneracy import Status, has_multiple_root, is_nondegenerate, poly_gcd
from cse_kit.polyparse import SparsePolynomial, parse_poly


def verdict(text, n=2):
    return is_nondegenerate(parse_poly(text, n))


def test_example_is_nondegenerate():
    assert verdict("z1^4 + z1^2*z2 + z1*z2^2 + z2^4").status is Status.NONDEGENERATE


def test_square_is_degenerate_on_the_edge():
    v = verdict("z1^2 + 2 z1 z2 + z2^2")
    assert v.status is Status.DEGENERATE
    assert set(v.face.vertices) == {(2, 0), (0, 2)}
    assert "degenerate on face" in v.describe()


def test_sum_of_squares():
    assert verdict("z1^2 + z2^2").ok


def test_inexact_coefficients_use_root_test():
    f = parse_poly("z1^2 + 2 z1 z2 + z2^2", 2).to_inexact()
    assert not f.exact
    assert is_nondegenerate(f).status is Status.DEGENERATE
    assert is_nondegenerate(parse_poly("z1^2 + 2.5 z1 z2 + z2^2", 2).to_inexact()).ok


def test_one_variable_always_decidable():
    for k in range(1, 6):
        assert verdict(f"z1^{k}", 1).ok


def test_monomials_and_vertices():
    assert verdict("z1^2 z2^3").ok
    assert verdict("z1 z2 z3", 3).ok


def test_three_variables():
    # degenerate edge inside a 3-dimensional polyhedron
    assert verdict("z1^2 + 2 z1 z2 + z2^2 + z3^2", 3).status is Status.DEGENERATE
    # a torus critical point on a 2-face found by the search
    v = verdict("z1^2 + z2^2 + z3^2 + 2 z1 z2 + 2 z2 z3 + 2 z1 z3", 3)
    assert v.status is Status.DEGENERATE
    # generic quadric: the search finds nothing and says so
    v = verdict("z1^2 + z2^2 + z3^2 + 3 z1 z2", 3)
    assert v.status is Status.UNKNOWN and v.face.dim == 2
    # affinely independent face points cannot be degenerate
    assert verdict("z1^2 + z2^2 + z3^2", 3).ok


def test_univariate_helpers():
    one = QQi(1)
    assert poly_gcd([one, 2 * one, one], [2 * one, 2 * one]) == [one, one]
    assert has_multiple_root([one, 2 * one, one], True)
    assert not has_multiple_root([one, 3 * one, one], True)
    assert has_multiple_root([1, 2, 1], False)


coef = st.builds(QQi, st.builds(Fraction, st.integers(-5, 5), st.integers(1, 3)), st.integers(-2, 2)).filter(bool)
pt = st.tuples(st.integers(0, 5), st.integers(0, 5)).filter(any)
polys = st.dictionaries(pt, coef, min_size=1, max_size=6).map(lambda d: SparsePolynomial(2, d))


@settings(max_examples=100, deadline=None)
@given(polys, coef)
def test_scaling_invariance(f, c):
    assert is_nondegenerate(f).status is is_nondegenerate(f.scale(c)).status


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 4), st.integers(1, 4), coef)
def test_perfect_powers_of_binomials_are_degenerate(a, b, c):
    z1, z2 = (SparsePolynomial.variable(2, k) for k in (1, 2))
    f = (z1 ** a - (z2 ** b).scale(c)) ** 2
    assert is_nondegenerate(f).status is Status.DEGENERATE
