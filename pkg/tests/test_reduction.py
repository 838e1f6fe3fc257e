import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from abelode.core import build_equation
from abelode.reduction import (
    NotASolutionError,
    WrongDegreeError,
    reduce_about,
    roundtrip_check,
    to_second_kind,
)

CASE1_SOURCES = ["1", "-3", "1", "1"]


def case1():
    return build_equation(CASE1_SOURCES, 0.0)


class TestReduceAbout:
    def test_shift_about_unit_equilibrium(self):
        red = reduce_about(case1(), 1.0)
        assert tuple(red.c(k, 0.0) for k in (1, 2, 3)) == (2.0, 4.0, 1.0)
        assert red.coefficients(0.0) == [2.0, 4.0, 1.0]
        assert red.degree == 3

    def test_shifted_equation_has_matching_slope(self):
        # du/dx at u must equal dy/dx at y = pivot + u
        red = reduce_about(case1(), 1.0)
        from abelode.core import eval_rhs
        for u in (-0.3, 0.1, 0.8):
            assert red.rhs(0.5, u) == pytest.approx(
                eval_rhs(case1(), 0.5, 1.0 + u), rel=1e-12, abs=1e-12)

    @settings(max_examples=40, deadline=None)
    @given(g=st.floats(-3, 3, allow_nan=False),
           c0=st.floats(-4, 4, allow_nan=False),
           c1=st.floats(-4, 4, allow_nan=False),
           c2=st.floats(-4, 4, allow_nan=False),
           u=st.floats(-2, 2, allow_nan=False))
    def test_shift_identity_for_arbitrary_polynomials(self, g, c0, c1, c2, u):
        # composition check: P(u + g) as a polynomial in u, evaluated at u,
        # must agree with P evaluated at u + g; the pivot is forced to be a
        # root so that the shifted equation is well defined
        base = np.polynomial.polynomial.Polynomial((c0, c1, c2, 1.0))
        c0_adjusted = float(c0 - base(g))  # make g an exact root
        eq = build_equation(
            [repr(c0_adjusted), repr(c1), repr(c2), "1"], 0.0)
        red = reduce_about(eq, g)
        shifted = sum(red.c(k, 0.0) * u ** k for k in (1, 2, 3))
        direct = np.polynomial.polynomial.Polynomial(
            (c0_adjusted, c1, c2, 1.0))(g + u)
        assert shifted == pytest.approx(direct, rel=1e-9, abs=1e-9)

    def test_pivot_must_be_a_root(self):
        with pytest.raises(NotASolutionError):
            reduce_about(case1(), 0.5)

    def test_constant_pivot_must_stay_a_root_along_x(self):
        eq = build_equation(["3 - 2*exp(-2*x)", "-4", "0", "1"], 0.0)
        with pytest.raises(NotASolutionError):
            reduce_about(eq, 1.0)  # a root only in the x -> infinity limit

    def test_solution_pivot_accepted(self):
        riccati = build_equation(["1", "0", "-1"], 0.0)
        red = reduce_about(riccati, math.tanh, kind="solution")
        assert red.degree == 2
        # shifted linear coefficient is -2*tanh(x)
        assert red.c(1, 1.0) == pytest.approx(-2.0 * math.tanh(1.0), rel=1e-12)

    def test_non_solution_pivot_rejected(self):
        riccati = build_equation(["1", "0", "-1"], 0.0)
        with pytest.raises(NotASolutionError):
            reduce_about(riccati, lambda x: x, kind="solution")


class TestSecondKind:
    def test_coefficient_triple(self):
        form = to_second_kind(reduce_about(case1(), 1.0))
        assert (form.c1(0.0), form.c2(0.0), form.c3(0.0)) == (2.0, 4.0, 1.0)

    def test_zero_state_rejected(self):
        form = to_second_kind(reduce_about(case1(), 1.0))
        with pytest.raises(ZeroDivisionError):
            form.rhs(0.0, 0.0)

    def test_only_cubic_equations_transform(self):
        riccati = build_equation(["1", "0", "-1"], 0.0)
        red = reduce_about(riccati, math.tanh, kind="solution")
        with pytest.raises(WrongDegreeError):
            to_second_kind(red)


class TestRoundTrip:
    def test_equilibrium_pivot_round_trip(self):
        worst, original, shifted = roundtrip_check(case1(), 1.0, 0.0, 5.0)
        assert worst <= 1e-6
        assert original.completed and shifted.completed
        assert original.final_x == shifted.final_x == 5.0

    def test_solution_pivot_round_trip(self):
        riccati = build_equation(["1", "0", "-1"], 0.0)
        worst, _, _ = roundtrip_check(riccati, math.tanh, 0.5, 3.0, kind="solution")
        assert worst <= 1e-6
