from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from scalecascade.arith import JetQ, PolyQ, poly_eval, poly_mul
from scalecascade.cascade import (
    Closure,
    Rule,
    branch_jet,
    branch_poly_pair,
    build_branch,
    cascade_levels,
    eta_level,
    make_schedule,
    normalization_constant,
    offsets_at_zero,
    telescoping_product,
)
from scalecascade.errors import DomainError, ResourceError

TENTH, THIRD = F(1, 10), F(1, 3)
ONE_MINUS_X = PolyQ((1, -1))

small_eps = st.fractions(min_value=0, max_value=F(9, 10), max_denominator=40)


# --- schedule ------------------------------------------------------------------

def test_power_tower_first_level_is_epsilon():
    s = make_schedule(TENTH, 3)
    assert [s.eps(n) for n in range(4)] == [0, F(1, 10), F(1, 100), F(1, 10000)]
    assert s.alpha(2) == F(101, 100)


def test_unscaled_schedule():
    s = make_schedule(0, 5)
    assert all(e == 0 and a == 1 for e, a in s.table())


def test_generation_two_delays_scaling():
    s = make_schedule(TENTH, 4, generation=2)
    assert [s.eps(n) for n in range(5)] == [0, 0, F(1, 10), F(1, 100), F(1, 10000)]


def test_literal_rule_squares_first():
    s = make_schedule(TENTH, 3, rule="literal")
    assert [s.eps(n) for n in range(3)] == [0, F(1, 100), F(1, 10000)]


def test_explicit_rule():
    s = make_schedule(depth=2, rule=Rule.EXPLICIT, values=["0", "1/5", "1/7"])
    assert s.eps(2) == F(1, 7)
    with pytest.raises(DomainError):
        s.eps(3)


@pytest.mark.parametrize("kwargs", [
    dict(epsilon=1), dict(epsilon=F(-1, 5)), dict(epsilon=TENTH, generation=7, depth=6),
    dict(epsilon=TENTH, depth=0), dict(rule="explicit", values=[0, F(1, 2)], depth=3),
    dict(rule="explicit", values=[0, F(3, 2), 0], depth=2),
])
def test_schedule_domain_errors(kwargs):
    with pytest.raises(DomainError):
        make_schedule(**kwargs)


def test_explicit_schedule_may_carry_nonzero_base():
    # left for the verifier to flag
    s = make_schedule(depth=1, rule="explicit", values=[TENTH, TENTH])
    assert s.eps(0) == TENTH


# --- levels ----------------------------------------------------------------------

def test_eta_prime_first_level():
    lvl = eta_level(make_schedule(TENTH, 3), 1)
    assert lvl.eta_prime == PolyQ((F(-1, 11), 0, 1))
    assert poly_eval(lvl.eta_prime, 0) == F(-1, 11)


def test_level_zero_is_the_variable():
    lvl = eta_level(make_schedule(TENTH, 3), 0)
    assert lvl.eta_prime == PolyQ.variable()
    assert lvl.t_plus == PolyQ((1, 1)) and lvl.t_minus == ONE_MINUS_X
    assert lvl.scaled_offset == PolyQ.variable()


@pytest.mark.parametrize("eps", [0, TENTH, THIRD, F(7, 8)])
def test_degrees_and_flat_linear_terms(eps):
    levels = cascade_levels(make_schedule(eps, 6), 7)
    for lvl in levels:
        assert lvl.eta_prime.degree == 2**lvl.n
        if lvl.n:
            assert lvl.eta_prime[1] == 0


def test_generation_two_factors_closed_forms():
    e = TENTH
    levels = cascade_levels(make_schedule(e, 4, generation=2), 4)
    x4 = PolyQ.monomial(4)
    assert levels[1].t_plus == 1 + PolyQ.monomial(2)
    assert levels[2].t_plus == (1 - e) + (1 + e) * x4
    inner = (1 + e) * x4 - e
    assert levels[3].t_plus == (1 - e**2) + (1 + e**2) * inner * inner


def test_poly_cap():
    s = make_schedule(TENTH, 6)
    with pytest.raises(ResourceError):
        eta_level(s, 4, poly_cap=3)
    assert eta_level(s, 3, poly_cap=3).eta_prime.degree == 8


def test_jet_levels_have_no_depth_cap():
    lvl = eta_level(make_schedule(0, 20), 20, form=4)
    assert lvl.eta_prime.order == 4 and lvl.t_plus[0] == 1


@given(small_eps, st.integers(1, 7))
def test_scalar_recursion_matches_level_constants(eps, count):
    s = make_schedule(eps, count)
    levels = cascade_levels(s, count, 3)
    assert offsets_at_zero(s, count) == [lvl.t_plus[0] - 1 for lvl in levels]


# --- branch -------------------------------------------------------------------------

def test_standard_solution_linear_closure():
    num, den = branch_poly_pair(build_branch(make_schedule(0, 3), closure="linear"))
    assert num == poly_mul(ONE_MINUS_X, den)


def test_one_closure_rational_pair_at_zero_epsilon():
    num, den = branch_poly_pair(build_branch(make_schedule(0, 2)))
    # (1 - x)/(1 - x^4) == 1/((1 + x)(1 + x^2))
    assert num == PolyQ.const(1)
    assert poly_mul(den, ONE_MINUS_X) == PolyQ((1, 0, 0, 0, -1))


def test_normalization_constant_examples():
    assert build_branch(make_schedule(TENTH, 2)).normalization == F(90009, 100000)
    assert normalization_constant(build_branch(make_schedule(TENTH, 1))) == F(9, 10)
    for n in range(1, 6):
        assert build_branch(make_schedule(0, n)).normalization == 1


def test_normalization_constant_from_factor_values():
    # oracle: evaluate each factor polynomial at eta = 0 separately
    s = make_schedule(TENTH, 2)
    levels = cascade_levels(s, 3)
    c = poly_eval(levels[1].t_plus, 0) * poly_eval(levels[2].t_plus, 0)
    assert c == (1 - TENTH) * (1 + F(1, 100) ** 2) == F(90009, 100000)


@given(small_eps, st.integers(1, 6))
def test_C_is_one_iff_unscaled(eps, n):
    assert (build_branch(make_schedule(eps, n)).normalization == 1) == (eps == 0)


def test_branch_jet_standard():
    tau = branch_jet(build_branch(make_schedule(0, 5), closure="linear"), 40)
    assert tau == JetQ(40, (1, -1))


def test_branch_jet_unscaled_one_closure():
    tau = branch_jet(build_branch(make_schedule(0, 2)), 5)
    assert tau.coeffs == (1, -1, 0, 0, 1, -1)


@pytest.mark.parametrize("eps", [0, TENTH, THIRD, F(9, 10)])
@pytest.mark.parametrize("depth", [1, 2, 4, 6])
@pytest.mark.parametrize("generation", [1, 2])
@pytest.mark.parametrize("closure", ["one", "linear"])
def test_normalized_and_c1_matched(eps, depth, generation, closure):
    if generation > depth:
        pytest.skip("generation beyond depth")
    tau = branch_jet(build_branch(make_schedule(eps, depth, generation), closure=closure), 3)
    assert tau[0] == 1 and tau[1] == -1


def test_plus_branch():
    b = build_branch(make_schedule(TENTH, 3))
    assert b.plus_branch("poly") == PolyQ((1, 1))
    assert b.plus_branch(3) == JetQ(3, (1, 1))


def test_minus_factors_level_zero_is_t_plus():
    b = build_branch(make_schedule(THIRD, 3))
    facs = b.minus_factors()
    assert len(facs) == 3 and facs[0] == PolyQ((1, 1))


@pytest.mark.parametrize("depth", range(1, 9))
def test_unscaled_linear_closure_is_exact(depth):
    num, den = branch_poly_pair(build_branch(make_schedule(0, depth), closure="linear"))
    assert num == poly_mul(ONE_MINUS_X, den)


@pytest.mark.parametrize("eps", [TENTH, THIRD, F(3, 4)])
@pytest.mark.parametrize("depth", [1, 3, 5])
def test_linear_closure_telescopes_for_every_epsilon(eps, depth):
    # t'_{k+} t'_{k-} = t_{(k+1)-} and t'_{(k+1)-} = alpha_{k+1} t_{(k+1)-}
    num, den = branch_poly_pair(build_branch(make_schedule(eps, depth), closure="linear"))
    assert num == poly_mul(ONE_MINUS_X, den)


@pytest.mark.parametrize("eps", [0, TENTH, THIRD])
@pytest.mark.parametrize("depth", [1, 2, 3])
@pytest.mark.parametrize("closure", ["one", "linear"])
def test_poly_and_jet_pipelines_agree(eps, depth, closure):
    b = build_branch(make_schedule(eps, depth), closure=closure)
    tau = branch_jet(b, 16)
    num, den = branch_poly_pair(b)
    assert num.to_jet(16) == den.to_jet(16) * tau


@pytest.mark.parametrize("eps, depth, closure, generation", [
    (TENTH, 3, "one", 1), (THIRD, 4, "linear", 1), (TENTH, 4, "one", 2), (F(1, 4), 3, "one", 3),
])
def test_branch_jet_against_symbolic_oracle(eps, depth, closure, generation):
    b = build_branch(make_schedule(eps, depth, generation), closure=closure)
    expected = oracles.taylor(oracles.branch_expr(eps, depth, closure, generation), 8)
    assert list(branch_jet(b, 8).coeffs) == expected


def test_second_coefficient_at_depth_six():
    # frozen from the sympy oracle (second derivative of the symbolic product)
    total = F(
        "12798719360051203840064121598078207923199999232038411519360025617920832044801919103891195519936"
        "/900000000000000000000000000000000000000719999985599999927992802880288000000000017971197839999972997120000007201620288021600720009")
    assert 2 * branch_jet(build_branch(make_schedule(TENTH, 6)), 2)[2] == total


def test_telescoping_product():
    for n in range(1, 7):
        assert telescoping_product(n) == PolyQ.const(1) - PolyQ.monomial(2**n)


def test_closure_enum_round_trip():
    assert build_branch(make_schedule(TENTH, 2), closure=Closure.LINEAR).closure is Closure.LINEAR
    with pytest.raises(ValueError):
        build_branch(make_schedule(TENTH, 2), closure="quadratic")


@settings(max_examples=30, deadline=None)
@given(small_eps, st.integers(1, 5), st.sampled_from(["one", "linear"]))
def test_branch_normalization_property(eps, depth, closure):
    tau = branch_jet(build_branch(make_schedule(eps, depth), closure=closure), 4)
    assert (tau[0], tau[1]) == (1, -1)
