"""
Scale schedules, the recursive cascade of shifted variables, and the
truncated product solution on the t < 1 branch.

With ``eta`` the distance from t = 1 (t- = 1 - eta, t+ = 1 + eta), level 0 is
``eta_0' = eta - eps_0/alpha_0`` and each further level squares the previous
one::

    eta_{n+1}  = alpha_n**2 * eta_n'**2
    eta_{n+1}' = eta_{n+1} - eps_{n+1}/alpha_{n+1}
    t'_{n+-}   = 1 +- alpha_n * eta_n'

A depth-N branch is

    tau_-(eta) = C * f_N / (t'_{0+} t'_{1+} ... t'_{(N-1)+}),
    C          = t'_{1+}(0) t'_{2+}(0) ... t'_{N+}(0),

where ``f_N`` is the closure standing in for the unknown level-N factor. Both
closures take the value ``1/t'_{N+}(0)`` at the origin (the tail of the
normalizing product), so ``tau_-(0) = 1`` holds exactly.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence, Union

from .arith import JetQ, PolyQ, as_ratio, jet_product, poly_mul
from .errors import DomainError, ResourceError

DEFAULT_POLY_CAP = 12

Form = Union[str, int]


class Rule(str, enum.Enum):
    POWER_TOWER = "power-tower"  # eps_n = eps**(2**(n-k)) from level k on
    LITERAL = "literal"  # eps_n = eps**(2**(n-k+1)) from level k on
    EXPLICIT = "explicit"


class Closure(str, enum.Enum):
    ONE = "one"
    LINEAR = "linear"


@dataclass(frozen=True)
class ScaleSchedule:
    epsilon: Fraction
    depth: int
    generation: int = 1
    rule: Rule = Rule.POWER_TOWER
    values: Optional[tuple] = None

    def eps(self, n: int) -> Fraction:
        if n < 0:
            raise ValueError(f"level index must be >= 0, got {n}")
        if self.rule is Rule.EXPLICIT:
            if n >= len(self.values):
                raise DomainError(
                    f"explicit schedule has {len(self.values)} entries, level {n} requested")
            return self.values[n]
        if n < self.generation:
            return Fraction(0)
        shift = n - self.generation + (1 if self.rule is Rule.LITERAL else 0)
        return self.epsilon ** (2**shift)

    def alpha(self, n: int) -> Fraction:
        return 1 + self.eps(n)

    def table(self, upto: Optional[int] = None) -> list:
        """``[(eps_n, alpha_n)]`` for n = 0..upto (default: depth)."""
        upto = self.depth if upto is None else upto
        return [(self.eps(n), self.alpha(n)) for n in range(upto + 1)]


def make_schedule(epsilon=0, depth: int = 6, generation: int = 1,
                  rule: Union[Rule, str] = Rule.POWER_TOWER,
                  values: Optional[Sequence] = None) -> ScaleSchedule:
    """Validate parameters and build a :class:`ScaleSchedule`.

    An explicit ``values`` list is indexed from level 0 and must cover levels
    0..depth. Its entries are range-checked, but ``eps_0 = 0`` is deliberately
    not enforced here so that a corrupted schedule can reach the verifier.
    """
    rule = Rule(rule)
    if depth < 1:
        raise DomainError(f"depth must be >= 1, got {depth}")
    if generation < 1:
        raise DomainError(f"generation must be >= 1, got {generation}")
    if generation > depth:
        raise DomainError(f"generation {generation} exceeds depth {depth}")
    if rule is Rule.EXPLICIT:
        if values is None:
            raise DomainError("explicit rule needs a list of values")
        vals = tuple(as_ratio(v) for v in values)
        if len(vals) < depth + 1:
            raise DomainError(
                f"explicit schedule needs entries for levels 0..{depth}, got {len(vals)}")
        for n, v in enumerate(vals):
            if not 0 <= v < 1:
                raise DomainError(f"eps_{n} = {v} lies outside [0, 1)")
        eps = vals[1] if len(vals) > 1 else Fraction(0)
        return ScaleSchedule(eps, depth, generation, rule, vals)
    epsilon = as_ratio(epsilon)
    if not 0 <= epsilon < 1:
        raise DomainError(f"epsilon = {epsilon} lies outside [0, 1)")
    return ScaleSchedule(epsilon, depth, generation, rule, None)


@dataclass(frozen=True)
class CascadeLevel:
    n: int
    eps: Fraction
    alpha: Fraction
    eta: Union[PolyQ, JetQ]  # eta_n (unshifted)
    eta_prime: Union[PolyQ, JetQ]
    t_plus: Union[PolyQ, JetQ]
    t_minus: Union[PolyQ, JetQ]

    @property
    def scaled_offset(self):
        """alpha_n * eta_n', the variable in which level n is self-similar."""
        return self.eta_prime * self.alpha


def _variable(form: Form, poly_cap: int, levels: int):
    if form == "poly":
        if levels - 1 > poly_cap:
            raise ResourceError(
                f"full polynomial form capped at level {poly_cap} "
                f"(degree {2**poly_cap}); level {levels - 1} requested")
        return PolyQ.variable()
    if isinstance(form, int) and not isinstance(form, bool) and form >= 0:
        return JetQ.variable(form)
    raise ValueError(f"form must be 'poly' or a jet order, got {form!r}")


def cascade_levels(schedule: ScaleSchedule, count: int, form: Form = "poly",
                   poly_cap: int = DEFAULT_POLY_CAP) -> list:
    """Levels 0..count-1 of the cascade in polynomial or jet form."""
    x = _variable(form, poly_cap, count)
    levels = []
    eta = x
    for n in range(count):
        if n:
            prev = levels[-1]
            sq = prev.eta_prime * prev.eta_prime
            eta = sq * (prev.alpha * prev.alpha)
        eps, alpha = schedule.eps(n), schedule.alpha(n)
        eta_prime = eta - eps / alpha
        shifted = eta_prime * alpha
        levels.append(CascadeLevel(n, eps, alpha, eta, eta_prime, 1 + shifted, 1 - shifted))
    return levels


def eta_level(schedule: ScaleSchedule, n: int, form: Form = "poly",
              poly_cap: int = DEFAULT_POLY_CAP) -> CascadeLevel:
    if n < 0:
        raise ValueError(f"level index must be >= 0, got {n}")
    return cascade_levels(schedule, n + 1, form, poly_cap)[-1]


def offsets_at_zero(schedule: ScaleSchedule, count: int) -> list:
    """``alpha_n * eta_n'(0)`` for n < count by scalar recursion.

    Shares no code with the polynomial/jet path, which makes it a cheap
    independent check of their constant terms.
    """
    out = []
    prev = None
    for n in range(count):
        eps, alpha = schedule.eps(n), schedule.alpha(n)
        eta = Fraction(0) if prev is None else prev * prev
        out.append(alpha * eta - eps)
        prev = out[-1]
    return out


@dataclass(frozen=True)
class BranchSolution:
    """Unevaluated product form of the minus branch plus the trivial plus branch."""

    schedule: ScaleSchedule
    depth: int
    closure: Closure
    normalization: Fraction
    factor_values: tuple  # t'_{k+}(0) for k = 0..depth
    poly_cap: int = field(default=DEFAULT_POLY_CAP, compare=False)

    @property
    def tail(self) -> Fraction:
        """t'_{N+}(0); the closure evaluates to its reciprocal at the origin."""
        return self.factor_values[self.depth]

    def levels(self, form: Form) -> list:
        """Cascade levels 0..depth (the last one feeds the closure)."""
        return cascade_levels(self.schedule, self.depth + 1, form, self.poly_cap)

    def minus_factors(self, form: Form = "poly") -> list:
        """[t'_{0+}, t'_{1+}, ..., t'_{(N-1)+}] whose reciprocals multiply."""
        return [lvl.t_plus for lvl in self.levels(form)[: self.depth]]

    def plus_branch(self, form: Form = "poly"):
        """tau_+ = t_+ = 1 + eta."""
        x = _variable(form, self.poly_cap, 1)
        return 1 + x

    def closure_factor(self, last: CascadeLevel):
        """The level-N stand-in ``f_N`` in the representation of ``last``."""
        if self.closure is Closure.ONE:
            return 0 * last.eta + 1 / self.tail
        t_minus = 1 - last.eta
        return t_minus * (1 / (t_minus[0] * self.tail))


def build_branch(schedule: ScaleSchedule, depth: Optional[int] = None,
                 closure: Union[Closure, str] = Closure.ONE,
                 poly_cap: int = DEFAULT_POLY_CAP) -> BranchSolution:
    closure = Closure(closure)
    depth = schedule.depth if depth is None else depth
    if depth < 1:
        raise DomainError(f"depth must be >= 1, got {depth}")
    values = tuple(1 + x for x in offsets_at_zero(schedule, depth + 1))
    for k, v in enumerate(values):
        if v == 0:
            raise DomainError(f"factor t'_{k}+ vanishes at eta = 0")
    norm = Fraction(1)
    for v in values[1:]:
        norm *= v
    # linear closure divides by t_{N-}(0) = 1 - (alpha_{N-1} eta'_{N-1}(0))**2
    if closure is Closure.LINEAR and values[depth - 1] - 1 in (1, -1):
        raise DomainError("linear closure vanishes at eta = 0")
    return BranchSolution(schedule, depth, closure, norm, values, poly_cap)


def normalization_constant(branch: BranchSolution) -> Fraction:
    return branch.normalization


def branch_jet(branch: BranchSolution, order: int, reflect_levels=()) -> JetQ:
    """Exact Taylor coefficients of tau_- at eta = 0 up to ``order``.

    ``reflect_levels`` lists cascade levels whose factor is evaluated at
    ``-eta`` (the parity transform); ``"closure"`` may be included too.
    """
    if order < 0:
        raise ValueError("order must be >= 0")
    levels = branch.levels(order)
    factors = []
    for lvl in levels[: branch.depth]:
        t = lvl.t_plus.reflect() if lvl.n in reflect_levels else lvl.t_plus
        factors.append(t.recip())
    f = branch.closure_factor(levels[-1])
    if "closure" in reflect_levels:
        f = f.reflect()
    factors.append(f)
    return jet_product(factors) * branch.normalization


def branch_poly_pair(branch: BranchSolution) -> tuple:
    """tau_- as an exact ``(numerator, denominator)`` polynomial pair.

    This route never forms a series reciprocal, so it serves as the
    independent side of the jet-vs-polynomial cross-check.
    """
    levels = branch.levels("poly")
    den = PolyQ.const(1)
    for lvl in levels[: branch.depth]:
        den = poly_mul(den, lvl.t_plus)
    num = branch.closure_factor(levels[-1]) * branch.normalization
    return num, den


def telescoping_product(depth: int) -> PolyQ:
    """(1 - eta)(1 + eta)(1 + eta^2)...(1 + eta^(2^(depth-1)))."""
    p = PolyQ((1, -1))
    for j in range(depth):
        p = poly_mul(p, PolyQ.const(1) + PolyQ.monomial(2**j))
    return p
