"""
Measurements on built branches: ODE residuals, the logarithmic-derivative
sum, the second-derivative jump, the base self-similar identity, parity,
generation deviation orders, the phi family, product convergence, and the
long-horizon float comparison.

Sign conventions. On the minus branch t = 1 - eta, so d/dt = -d/d(eta) and
the residual of ``t * dtau/dt = tau`` is ``r = (1 - eta) * (-tau') - tau``.
On the plus branch t = 1 + eta and d/dt = d/d(eta).
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .arith import JetQ, PolyQ, abs_sum, as_ratio, poly_mul
from .bigfloat import BigFloat
from .cascade import (
    BranchSolution,
    Closure,
    ScaleSchedule,
    branch_jet,
    branch_poly_pair,
    cascade_levels,
    offsets_at_zero,
)
from .errors import DomainError


@dataclass(frozen=True)
class ResidualReport:
    residual_jet: JetQ
    leading_order: Optional[int]  # None: zero through residual_jet.order
    leading_coefficient: Optional[Fraction]

    @property
    def vanishes(self) -> bool:
        return self.leading_order is None


def residual_of(tau: JetQ, side: str = "minus") -> JetQ:
    """Residual jet of t*dtau/dt - tau; known to one order less than ``tau``."""
    d = tau.derive()
    x = JetQ.variable(d.order)
    if side == "minus":
        return (1 - x) * (-d) - tau
    if side == "plus":
        return (1 + x) * d - tau
    raise ValueError(f"side must be 'minus' or 'plus', got {side!r}")


def _report(jet: JetQ) -> ResidualReport:
    lead = jet.leading_term()
    if lead is None:
        return ResidualReport(jet, None, None)
    return ResidualReport(jet, lead[0], lead[1])


def ode_residual(branch: BranchSolution, order: int) -> ResidualReport:
    if order < 1:
        raise ValueError("residual order must be >= 1")
    return _report(residual_of(branch_jet(branch, order + 1)))


def log_derivative_sum(branch: BranchSolution, order: int) -> JetQ:
    """S with dtau_-/d(eta) = -tau_- * S.

    Sum over the product factors of t'_{k+}'/t'_{k+}, plus -f'/f for a
    non-constant closure.
    """
    levels = branch.levels(order + 1)
    terms = [lvl.t_plus.derive() * lvl.t_plus.truncate(order).recip()
             for lvl in levels[: branch.depth]]
    if branch.closure is Closure.LINEAR:
        last = levels[-1]
        t_minus = (1 - last.eta).truncate(order)
        terms.append(last.eta.derive() * t_minus.recip())
    total = terms[0]
    for t in terms[1:]:
        total = total + t
    return total


@dataclass(frozen=True)
class JumpDecomposition:
    total: Fraction  # d^2 tau_-/d eta^2 at 0
    terms: tuple  # T_k, k = 1..N-1
    closure_term: Fraction  # nonzero only for the linear closure
    plus_second_derivative: Fraction = Fraction(0)

    @property
    def identity_holds(self) -> bool:
        return self.total == 2 - sum(self.terms, Fraction(0)) - self.closure_term

    @property
    def jump(self) -> Fraction:
        return self.total - self.plus_second_derivative


def jump_decomposition(branch: BranchSolution) -> JumpDecomposition:
    """Split the one-sided second derivative of tau_- at the origin.

    With S(0) = 1 and tau_-(0) = 1, tau'' = S^2 - S' gives
    ``total = 2 - sum_k T_k - closure_term`` where
    ``T_k = alpha_k * eta_k''(0) / (1 + alpha_k * eta_k'(0))``.
    """
    total = 2 * branch_jet(branch, 2)[2]
    levels = branch.levels(2)
    terms = []
    for lvl in levels[1: branch.depth]:
        second = 2 * lvl.eta_prime[2]
        terms.append(lvl.alpha * second / (1 + lvl.alpha * lvl.eta_prime[0]))
    closure_term = Fraction(0)
    if branch.closure is Closure.LINEAR:
        last = levels[-1]
        closure_term = 2 * last.eta[2] / (1 - last.eta[0])
    return JumpDecomposition(total, tuple(terms), closure_term)


def poly_second_derivative(branch: BranchSolution) -> Fraction:
    """tau_-''(0) by the quotient rule on the exact polynomial pair."""
    num, den = branch_poly_pair(branch)
    n0, n1, n2 = num[0], num[1], 2 * num[2]
    d0, d1, d2 = den[0], den[1], 2 * den[2]
    return (n2 * d0 * d0 - 2 * n1 * d1 * d0 - n0 * d2 * d0 + 2 * n0 * d1 * d1) / d0**3


@dataclass(frozen=True)
class IdentityVerdict:
    level: int
    variable: str
    numerator: PolyQ
    denominator: PolyQ

    @property
    def holds(self) -> bool:
        return self.numerator.is_zero()


def selfsimilar_identity(schedule: ScaleSchedule, level: int = 0,
                         variable: str = "scaled") -> IdentityVerdict:
    """Check t'_-/t'_+ - t'_- * f'/f == 1 between ``level`` and ``level + 1``.

    ``f`` is the exact linear solution ``1 - eta_{level+1}`` of the next
    self-similar equation. ``variable`` picks what f' differentiates by:
    ``"scaled"`` uses alpha_n * eta_n', ``"unscaled"`` uses eta_n'. The
    result is the exact rational function ``LHS - 1`` as a polynomial pair.
    """
    levels = cascade_levels(schedule, level + 2, "poly")
    cur, nxt = levels[level], levels[level + 1]
    a, b = cur.t_minus, cur.t_plus
    f = 1 - nxt.eta
    if variable == "scaled":
        g = cur.scaled_offset.derive()
    elif variable == "unscaled":
        g = cur.eta_prime.derive()
    else:
        raise ValueError(f"variable must be 'scaled' or 'unscaled', got {variable!r}")
    fd = f.derive()
    # a/b - a*fd/(g*f) - 1 over the common denominator b*f*g
    fg = poly_mul(f, g)
    num = poly_mul(a, fg) - poly_mul(poly_mul(a, fd), b) - poly_mul(b, fg)
    return IdentityVerdict(level, variable, num, poly_mul(b, fg))


@dataclass(frozen=True)
class ParityReport:
    tau_minus: JetQ
    tau_plus: JetQ
    reflected_minus: JetQ
    reflected_plus: JetQ
    asymmetry: Fraction
    residual_order: Optional[int]
    reflected_residual_order: Optional[int]


def parity_analysis(branch: BranchSolution, order: int,
                    reflect_all: bool = False) -> ParityReport:
    """Compare the branch pair with its reflection P: eta -> -eta.

    P swaps the branches: the reflected minus branch is P tau_+ = 1 - eta
    and the reflected plus branch is P tau_-. By default only the level-0
    factor is reflected (the higher factors are even in eta); with
    ``reflect_all`` every factor and the closure are reflected.
    """
    if order < 1:
        raise ValueError("parity order must be >= 1")
    reflect = {0}
    if reflect_all:
        reflect = set(range(branch.depth)) | {"closure"}
    big = order + 1
    tau_m = branch_jet(branch, big)
    refl_p = branch_jet(branch, big, reflect_levels=reflect)
    x = JetQ.variable(big)
    tau_p = 1 + x
    refl_m = 1 - x
    k = order
    asym = abs_sum(tau_m.truncate(k) - refl_m.truncate(k)) \
        + abs_sum(tau_p.truncate(k) - refl_p.truncate(k))
    r = residual_of(tau_m, "minus").leading_term()
    rp = residual_of(refl_p, "plus").leading_term()
    return ParityReport(tau_m.truncate(k), tau_p.truncate(k), refl_m.truncate(k),
                        refl_p.truncate(k), asym,
                        None if r is None else r[0], None if rp is None else rp[0])


@dataclass(frozen=True)
class DeviationReport:
    generation: int
    log_ratio: JetQ  # ln(tau_- / (1 - eta))
    leading_order: Optional[int]
    leading_coefficient: Optional[Fraction]


def generation_deviation(branch: BranchSolution, order: int) -> DeviationReport:
    """First nonzero order of ln(tau_- / tau_s) with tau_s = 1 - eta."""
    k = branch.schedule.generation
    if order < 2**k:
        raise DomainError(f"order {order} cannot resolve generation {k} (needs >= {2**k})")
    tau = branch_jet(branch, order)
    ratio = tau * (1 - JetQ.variable(order)).recip()
    log = ratio.log()
    lead = log.leading_term()
    if lead is None:
        return DeviationReport(k, log, None, None)
    return DeviationReport(k, log, lead[0], lead[1])


@dataclass(frozen=True)
class PhiReport:
    phi: JetQ
    residual: JetQ  # t * dphi/dt on the minus branch
    expected: JetQ  # (eps/t) * r

    @property
    def matches(self) -> bool:
        return self.residual == self.expected


def phi_residual(epsilon, branch: BranchSolution, order: int) -> PhiReport:
    """t * dphi/dt for phi = eps * tau/t on the minus branch."""
    epsilon = as_ratio(epsilon)
    big = order + 1
    tau = branch_jet(branch, big)
    inv_t = (1 - JetQ.variable(big)).recip()
    phi = tau * inv_t * epsilon
    res = (1 - JetQ.variable(order)) * (-phi.derive())
    r = residual_of(tau, "minus")
    expected = r * inv_t.truncate(order) * epsilon
    return PhiReport(phi.truncate(order), res, expected)


@dataclass(frozen=True)
class ConvergenceReport:
    deviations: tuple  # |t'_{n+}(0) - 1|, n = 1..N
    partial_products: tuple  # C_n = prod_{k<=n} t'_{k+}(0)

    def strictly_decreasing_after_first(self) -> bool:
        d = self.deviations
        return all(d[i] > d[i + 1] for i in range(1, len(d) - 1))


def convergence_diagnostics(schedule: ScaleSchedule, depth: int) -> ConvergenceReport:
    if depth < 1:
        raise DomainError("depth must be >= 1")
    offsets = offsets_at_zero(schedule, depth + 1)[1:]
    prods, acc = [], Fraction(1)
    for x in offsets:
        acc *= 1 + x
        prods.append(acc)
    return ConvergenceReport(tuple(abs(x) for x in offsets), tuple(prods))


@dataclass(frozen=True)
class CompareRow:
    t: BigFloat
    tau_s: BigFloat
    tau_g: BigFloat
    abs_dev: BigFloat
    rel_dev: BigFloat


def compare_grid(t_lo, t_hi, steps: int) -> list:
    """Exact, evenly spaced grid including both endpoints."""
    t_lo, t_hi = as_ratio(t_lo), as_ratio(t_hi)
    if t_lo <= 0:
        raise DomainError("t_lo must be > 0")
    if steps < 2:
        raise DomainError("steps must be >= 2")
    if t_hi < t_lo:
        raise DomainError("t_hi must be >= t_lo")
    h = (t_hi - t_lo) / (steps - 1)
    return [t_lo + i * h for i in range(steps)]


def long_horizon_compare(epsilon, t_range: Sequence, steps: int,
                         precision: int = 256) -> list:
    """tau_g = t + eps*tau(t) against tau_s = t, with tau(t) = t globally."""
    eps = BigFloat.from_ratio(epsilon, precision)
    rows = []
    for t in compare_grid(t_range[0], t_range[1], steps):
        tb = BigFloat.from_ratio(t, precision)
        tau_g = tb + eps * tb
        dev = abs(tau_g - tb)
        rows.append(CompareRow(tb, tb, tau_g, dev, dev / abs(tb)))
    return rows
