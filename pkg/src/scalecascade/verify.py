"""The invariant suite behind ``scalecascade verify``."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction

from .analysis import (
    convergence_diagnostics,
    generation_deviation,
    jump_decomposition,
    log_derivative_sum,
    ode_residual,
    parity_analysis,
    phi_residual,
    poly_second_derivative,
    selfsimilar_identity,
)
from .arith import JetQ, PolyQ, ratio_str
from .cascade import (
    Closure,
    Rule,
    ScaleSchedule,
    branch_jet,
    branch_poly_pair,
    build_branch,
    cascade_levels,
    make_schedule,
    offsets_at_zero,
    telescoping_product,
)

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    expected: str
    actual: str
    anchor: str

    @property
    def status(self) -> str:
        return "pass" if self.passed else "fail"


@dataclass
class VerifyReport:
    checks: list = field(default_factory=list)
    skipped: list = field(default_factory=list)
    observations: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def exit_code(self) -> int:
        return 0 if self.passed else 1

    def add(self, name, expected, actual, anchor, passed=None):
        if passed is None:
            passed = expected == actual
        self.checks.append(Check(name, bool(passed), _fmt(expected), _fmt(actual), anchor))
        log.info("%s: %s", name, "pass" if passed else "FAIL")


def _fmt(value) -> str:
    if isinstance(value, Fraction):
        return ratio_str(value)
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (JetQ, PolyQ)):
        return "[" + ", ".join(ratio_str(c) for c in value.coeffs) + "]"
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(_fmt(v) for v in value) + "]"
    if value is None:
        return "none"
    return str(value)


def run_verify_suite(schedule: ScaleSchedule, depth: int, order: int,
                     closure=Closure.ONE, phi_epsilon=None) -> VerifyReport:
    """Run every cascade and analysis invariant at one configuration.

    Raises ResourceError when the polynomial cross-checks would exceed the
    configured depth cap.
    """
    closure = Closure(closure)
    rep = VerifyReport()
    N, K, k = depth, order, schedule.generation
    eps_levels = [schedule.eps(n) for n in range(N + 1)]
    unscaled = all(e == 0 for e in eps_levels)
    # the linear closure telescopes back to tau_s = t for every schedule
    linear = closure is Closure.LINEAR

    # schedule
    rep.add("schedule.eps0_zero", Fraction(0), eps_levels[0], "eps_0 = 0 at the base level")
    rep.add("schedule.range", True, all(0 <= e < 1 for e in eps_levels),
            "0 <= eps_n < 1 for every level")

    # cascade levels
    branch = build_branch(schedule, N, closure)
    poly_levels = branch.levels("poly")
    rep.add("cascade.level0_plus", PolyQ((1, 1)), poly_levels[0].t_plus,
            "t'_+ = t_+ at level 0 since alpha_0 = 1")
    rep.add("cascade.degree", [2**n for n in range(N + 1)],
            [lvl.eta_prime.degree for lvl in poly_levels],
            "eta_n' is a polynomial of degree 2^n")
    jet_levels = cascade_levels(schedule, N + 1, max(K, 1))
    rep.add("cascade.linear_coefficient", [Fraction(0)] * N,
            [lvl.eta_prime[1] for lvl in jet_levels[1:]],
            "d eta_n'/d eta_0 = 0 at eta_0 = 0 for n >= 1")
    rep.add("cascade.constant_terms", [1 + x for x in offsets_at_zero(schedule, N + 1)],
            [lvl.t_plus[0] for lvl in jet_levels],
            "factor values at eta_0 = 0: scalar recursion vs jet cascade")

    # branch
    tau = branch_jet(branch, K)
    rep.add("branch.normalization", Fraction(1), tau[0], "initial condition tau(1) = 1")
    rep.add("branch.c1_continuity", [Fraction(1), Fraction(1)],
            [-tau[1] if K >= 1 else None, branch.plus_branch(1)[1]],
            "dtau/dt = 1 on both sides of t = 1")
    rep.add("branch.C_trivial_iff_unscaled", unscaled, branch.normalization == 1,
            "C = 1 exactly when every eps_n vanishes")
    num, den = branch_poly_pair(branch)
    rep.add("branch.poly_vs_jet", num.to_jet(K), den.to_jet(K) * tau,
            "product solution: polynomial pair vs truncated series")

    # first derivative: direct vs logarithmic sum
    S = log_derivative_sum(branch, K)
    if K >= 1:
        lhs = tau.derive() + tau.truncate(K - 1) * S.truncate(K - 1)
        rep.add("analysis.log_derivative_two_path", JetQ(K - 1), lhs,
                "dtau_-/d eta_0 = -tau_- * S, direct vs summed")
    rep.add("analysis.S_at_zero", Fraction(1), S[0], "first derivative continuous")

    # second derivative
    jd = jump_decomposition(branch)
    rep.add("analysis.jump_identity",
            2 - sum(jd.terms, Fraction(0)) - jd.closure_term, jd.total,
            "second derivative = 2 - sum of level terms")
    rep.add("analysis.jump_vs_poly", poly_second_derivative(branch), jd.total,
            "second derivative: quotient rule on polynomials vs series")
    if k == 1 and schedule.rule is not Rule.EXPLICIT and N >= 2:
        e1 = eps_levels[1]
        rep.add("analysis.T1", 2 * (1 + e1) / (1 - e1), jd.terms[0],
                "first level term 2(1 + eps_1)/(1 - eps_1)")
    else:
        rep.skipped.append("analysis.T1")
    if linear or (unscaled and N >= 2):
        rep.add("analysis.jump_standard", Fraction(0), jd.total,
                "no second-derivative jump for the standard solution")
    else:
        rep.skipped.append("analysis.jump_standard")
    rep.observations["jump_total"] = ratio_str(jd.total)
    rep.observations["jump_terms"] = [ratio_str(t) for t in jd.terms]

    # self-similar identity
    rep.add("analysis.selfsimilar_base", True, selfsimilar_identity(schedule, 0).holds,
            "t'_-/t'_+ - t'_- f'/f = 1 at the base level")
    rep.observations["selfsimilar_scaled"] = [
        selfsimilar_identity(schedule, n).holds for n in range(1, N)]
    rep.observations["selfsimilar_unscaled"] = [
        selfsimilar_identity(schedule, n, "unscaled").holds for n in range(1, N)]

    # parity
    par = parity_analysis(branch, max(K, 1))
    if linear or (unscaled and max(K, 1) < 2**N):
        rep.add("analysis.parity_standard", Fraction(0), par.asymmetry,
                "standard solution is parity symmetric")
    else:
        rep.skipped.append("analysis.parity_standard")
    rep.add("analysis.parity_residual_order", par.residual_order,
            par.reflected_residual_order,
            "reflected solution has the same truncation residual order")
    rep.observations["parity_asymmetry"] = ratio_str(par.asymmetry)

    # standard reduction and telescoping
    m = 2**N
    rep.add("analysis.telescoping", PolyQ.const(1) - PolyQ.monomial(m),
            telescoping_product(N), "(1-eta)(1+eta)(1+eta^2)... = 1 - eta^(2^N)")
    std = build_branch(make_schedule(0, N), N, Closure.LINEAR)
    snum, sden = branch_poly_pair(std)
    rep.add("analysis.standard_reduction", snum, PolyQ((1, -1)) * sden,
            "eps = 0 reduces to the standard solution tau = t")
    if linear:
        rep.add("analysis.linear_closure_exact", num, PolyQ((1, -1)) * den,
                "exact level-N closure telescopes to tau = t")

    if linear:
        res = ode_residual(branch, K)
        rep.add("analysis.residual_law", None, res.leading_order,
                "exact closure leaves no residual")
    elif unscaled:
        res = ode_residual(branch, K)
        if m - 1 <= K:
            rep.add("analysis.residual_law", [m - 1, Fraction(-m)],
                    [res.leading_order, res.leading_coefficient],
                    "eps = 0 residual leading term -2^N eta^(2^N - 1)")
        else:
            rep.add("analysis.residual_law", None, res.leading_order,
                    "eps = 0 residual vanishes below order 2^N - 1")
    else:
        rep.skipped.append("analysis.residual_law")
        res = ode_residual(branch, max(K, 1))
    rep.observations["residual_leading_order"] = res.leading_order
    rep.observations["residual_leading_coefficient"] = (
        None if res.leading_coefficient is None else ratio_str(res.leading_coefficient))

    if 2**k <= K and schedule.rule is not Rule.EXPLICIT:
        dev = generation_deviation(branch, K)
        if linear:
            expect = None
        elif not unscaled:
            expect = 2**k
        else:
            # pure truncation effect: -ln(1 - eta^(2^N)) for the one closure
            expect = m if m <= K else None
        rep.add("analysis.generation_order", expect, dev.leading_order,
                "generation-k deviation from tau_s starts at order 2^k")
    else:
        rep.skipped.append("analysis.generation_order")

    phi_eps = schedule.epsilon if phi_epsilon is None else phi_epsilon
    if K >= 1:
        phi = phi_residual(phi_eps, branch, K)
        rep.add("analysis.phi_law", phi.expected, phi.residual,
                "t dphi/dt = (eps/t) r for phi = eps tau / t")
        rep.add("analysis.phi_at_zero", phi_eps, phi.phi[0], "phi(0) = eps")

    conv = convergence_diagnostics(schedule, N)
    rep.add("analysis.partial_product", branch.normalization, conv.partial_products[-1],
            "C is the product of factor values at eta_0 = 0")
    rep.add("analysis.first_deviation", eps_levels[1], conv.deviations[0],
            "|t'_1+(0) - 1| = eps_1")
    return rep
