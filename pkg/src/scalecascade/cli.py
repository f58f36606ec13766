"""Command-line front end.

Exit codes: 0 success, 1 invariant failure, 2 usage error, 3 resource
limit, 4 I/O error.
"""
from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from . import __version__
from .analysis import (
    compare_grid,
    convergence_diagnostics,
    generation_deviation,
    jump_decomposition,
    log_derivative_sum,
    long_horizon_compare,
    ode_residual,
    parity_analysis,
)
from .arith import PolyQ, as_ratio, ratio_str
from .cascade import (
    DEFAULT_POLY_CAP,
    Closure,
    Rule,
    branch_jet,
    branch_poly_pair,
    build_branch,
    make_schedule,
    offsets_at_zero,
    telescoping_product,
)
from .errors import DomainError, ResourceError
from .report import exact, exact_list, to_csv, to_json
from .verify import run_verify_suite

log = logging.getLogger("scalecascade")

COMMANDS = ("jets", "verify", "residual", "jump-scan", "parity", "generation",
            "telescope", "compare", "schedule")

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_RESOURCE, EXIT_IO = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    command: str
    epsilon: Fraction = Fraction(1, 10)
    levels: int = 6
    jet_order: int = 16
    generation: int = 1
    closure: str = "one"
    rule: str = "power-tower"
    schedule_values: Optional[tuple] = None
    precision: int = 256
    format: str = "json"
    output: Optional[str] = None
    verbosity: int = 0
    decimal: bool = False
    poly_cap: int = DEFAULT_POLY_CAP
    epsilons: Optional[tuple] = None
    grid: Optional[tuple] = None
    t_range: tuple = (Fraction(1), Fraction(1000))
    steps: int = 1000
    reflect_all: bool = False
    argv: tuple = field(default=(), compare=False)

    def header(self) -> dict:
        """Every field, with rationals as exact strings."""
        def enc(v):
            if isinstance(v, Fraction):
                return ratio_str(v)
            if isinstance(v, tuple):
                return [enc(x) for x in v]
            return v
        cfg = {k: enc(v) for k, v in asdict(self).items() if k != "argv"}
        return {"tool": "scalecascade", "version": __version__,
                "argv": list(self.argv), "config": cfg}


def _ratio(flag: str, text: str) -> Fraction:
    try:
        return as_ratio(text)
    except ValueError:
        raise UsageError(f"{flag}: malformed rational {text!r} (expected p/q)") from None


def _ratio_list(flag: str, text: str) -> tuple:
    parts = [p for p in text.split(",") if p.strip()]
    if not parts:
        raise UsageError(f"{flag}: empty list")
    return tuple(_ratio(flag, p) for p in parts)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--epsilon", default="1/10", help="scaling parameter p/q in [0, 1)")
    common.add_argument("--levels", "-N", type=int, default=6, help="cascade depth N")
    common.add_argument("--jet-order", "-K", type=int, default=16, help="series order K")
    common.add_argument("--generation", "-k", type=int, default=1)
    common.add_argument("--closure", choices=[c.value for c in Closure], default="one")
    common.add_argument("--rule", choices=[r.value for r in Rule], default="power-tower")
    common.add_argument("--schedule-values", default=None,
                        help="comma-separated eps_0,eps_1,... for --rule explicit")
    common.add_argument("--precision", type=int, default=256, help="float precision in bits")
    common.add_argument("--format", choices=["json", "csv"], default="json")
    common.add_argument("--output", "-o", default=None, help="output path (default stdout)")
    common.add_argument("--verbose", "-v", action="count", default=0)
    common.add_argument("--decimal", action="store_true",
                        help="attach decimal renderings next to exact values")
    common.add_argument("--poly-cap", type=int, default=DEFAULT_POLY_CAP,
                        help="deepest level expanded as a full polynomial")

    parser = argparse.ArgumentParser(
        prog="scalecascade",
        description="Exact scale-cascade solutions of t dtau/dt = tau.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "jets": "Taylor coefficients of both branches",
        "verify": "run the invariant suite; exit 1 on any failure",
        "residual": "ODE residual of the truncated branch",
        "jump-scan": "second-derivative decomposition over a grid of epsilon",
        "parity": "reflection asymmetry",
        "generation": "deviation order of generations 1..k",
        "telescope": "epsilon = 0 telescoping identities",
        "compare": "long-horizon tau_g vs tau_s table",
        "schedule": "scaling schedule and product convergence",
    }
    subs = {name: sub.add_parser(name, parents=[common], help=helps[name])
            for name in COMMANDS}
    scan = subs["jump-scan"]
    scan.add_argument("--epsilons", default=None, help="explicit list a,b,c")
    scan.add_argument("--grid", default=None, help="lo,hi,steps")
    subs["compare"].add_argument("--t-range", default="1,1000", help="t_lo,t_hi")
    subs["compare"].add_argument("--steps", type=int, default=1000)
    subs["parity"].add_argument("--reflect-all", action="store_true",
                                help="reflect every factor, not only level 0")
    return parser


def parse_config(argv: Sequence[str]) -> RunConfig:
    """Parse and validate; raises UsageError (or exits 2 via argparse)."""
    ns = build_parser().parse_args(list(argv))
    eps = _ratio("--epsilon", ns.epsilon)
    if not 0 <= eps < 1:
        raise UsageError(f"--epsilon: {ratio_str(eps)} violates the constraint 0 <= epsilon < 1")
    if ns.levels < 1:
        raise UsageError("--levels must be >= 1")
    if ns.jet_order < 1:
        raise UsageError("--jet-order must be >= 1")
    if ns.generation < 1 or ns.generation > ns.levels:
        raise UsageError("--generation must satisfy 1 <= k <= --levels")
    if ns.precision < 2:
        raise UsageError("--precision must be >= 2 bits")
    if ns.poly_cap < 0:
        raise UsageError("--poly-cap must be >= 0")
    values = None
    if ns.rule == "explicit":
        if ns.schedule_values is None:
            raise UsageError("--rule explicit needs --schedule-values")
        values = _ratio_list("--schedule-values", ns.schedule_values)
        if len(values) < ns.levels + 1:
            raise UsageError(
                f"--schedule-values needs {ns.levels + 1} entries (levels 0..{ns.levels})")
        for n, v in enumerate(values):
            if not 0 <= v < 1:
                raise UsageError(f"--schedule-values: eps_{n} violates 0 <= eps < 1")
    elif ns.schedule_values is not None:
        raise UsageError("--schedule-values is only meaningful with --rule explicit")

    extra = {}
    if ns.command == "jump-scan":
        if ns.epsilons and ns.grid:
            raise UsageError("give either --epsilons or --grid, not both")
        if ns.grid:
            parts = ns.grid.split(",")
            if len(parts) != 3:
                raise UsageError("--grid expects lo,hi,steps")
            lo, hi = _ratio("--grid", parts[0]), _ratio("--grid", parts[1])
            try:
                steps = int(parts[2])
            except ValueError:
                raise UsageError("--grid: steps must be an integer") from None
            if steps < 1 or hi < lo:
                raise UsageError("--grid needs steps >= 1 and lo <= hi")
            extra["grid"] = (lo, hi, steps)
        else:
            extra["epsilons"] = _ratio_list("--epsilons", ns.epsilons or "1/100,1/10,1/4")
    if ns.command == "compare":
        t_range = _ratio_list("--t-range", ns.t_range)
        if len(t_range) != 2:
            raise UsageError("--t-range expects t_lo,t_hi")
        if t_range[0] <= 0 or t_range[1] < t_range[0]:
            raise UsageError("--t-range needs 0 < t_lo <= t_hi")
        if ns.steps < 2:
            raise UsageError("--steps must be >= 2")
        extra.update(t_range=t_range, steps=ns.steps)
    if ns.command == "parity":
        extra["reflect_all"] = ns.reflect_all

    return RunConfig(
        command=ns.command, epsilon=eps, levels=ns.levels, jet_order=ns.jet_order,
        generation=ns.generation, closure=ns.closure, rule=ns.rule,
        schedule_values=values, precision=ns.precision, format=ns.format,
        output=ns.output, verbosity=ns.verbose, decimal=ns.decimal,
        poly_cap=ns.poly_cap, argv=tuple(argv), **extra)


# ----------------------------------------------------------------------------
# commands; each returns (text, exit_code)
# ----------------------------------------------------------------------------

def _schedule(cfg: RunConfig, epsilon=None, generation=None):
    return make_schedule(cfg.epsilon if epsilon is None else epsilon, cfg.levels,
                         cfg.generation if generation is None else generation,
                         cfg.rule, cfg.schedule_values)


def _branch(cfg: RunConfig, **kw):
    return build_branch(_schedule(cfg, **kw), cfg.levels, cfg.closure, cfg.poly_cap)


def _dec(cfg):
    return cfg.precision if cfg.decimal else None


def _emit(cfg, body, columns, rows, extra_header=None):
    header = cfg.header()
    if extra_header:
        header.update(extra_header)
    if cfg.format == "csv":
        return to_csv(header, columns, rows)
    return to_json(header, body)


def cmd_jets(cfg):
    branch = _branch(cfg)
    K = cfg.jet_order
    tau = branch_jet(branch, K)
    plus = branch.plus_branch(K)
    S = log_derivative_sum(branch, K)
    body = {
        "normalization": exact(branch.normalization, _dec(cfg)),
        "tau_minus": exact_list(tau.coeffs, _dec(cfg)),
        "tau_plus": exact_list(plus.coeffs, _dec(cfg)),
        "log_derivative_sum": exact_list(S.coeffs, _dec(cfg)),
    }
    rows = [(i, ratio_str(tau[i]), ratio_str(plus[i]), ratio_str(S[i]))
            for i in range(K + 1)]
    return _emit(cfg, body, ["order", "tau_minus", "tau_plus", "log_derivative_sum"], rows), 0


def cmd_verify(cfg):
    rep = run_verify_suite(_schedule(cfg), cfg.levels, cfg.jet_order, cfg.closure)
    body = {
        "overall": "pass" if rep.passed else "fail",
        "checks": [{"name": c.name, "status": c.status, "expected": c.expected,
                    "actual": c.actual, "anchor": c.anchor} for c in rep.checks],
        "skipped": rep.skipped,
        "observations": rep.observations,
    }
    rows = [(c.name, c.status, c.expected, c.actual, c.anchor) for c in rep.checks]
    text = _emit(cfg, body, ["name", "status", "expected", "actual", "anchor"], rows)
    return text, rep.exit_code


def cmd_residual(cfg):
    rep = ode_residual(_branch(cfg), cfg.jet_order)
    body = {
        "residual": exact_list(rep.residual_jet.coeffs, _dec(cfg)),
        "leading_order": rep.leading_order,
        "leading_coefficient": (None if rep.leading_coefficient is None
                                else exact(rep.leading_coefficient, _dec(cfg))),
    }
    rows = [(i, ratio_str(c)) for i, c in enumerate(rep.residual_jet.coeffs)]
    return _emit(cfg, body, ["order", "residual"], rows), 0


def _scan_values(cfg) -> list:
    if cfg.grid is not None:
        lo, hi, steps = cfg.grid
        vals = [lo] if steps == 1 else [lo + i * (hi - lo) / (steps - 1) for i in range(steps)]
    else:
        vals = list(cfg.epsilons)
    for v in vals:
        if not 0 <= v < 1:
            raise UsageError(f"scan value {ratio_str(v)} violates 0 <= epsilon < 1")
    return sorted(set(vals))


def cmd_jump_scan(cfg):
    if cfg.rule == "explicit":
        raise UsageError("jump-scan varies epsilon; it cannot use --rule explicit")
    rows, records = [], []
    linear = cfg.closure == "linear"
    for eps in _scan_values(cfg):
        log.info("jump-scan epsilon=%s", ratio_str(eps))
        jd = jump_decomposition(_branch(cfg, epsilon=eps))
        row = [ratio_str(eps), ratio_str(jd.total)] + [ratio_str(t) for t in jd.terms]
        if linear:
            row.append(ratio_str(jd.closure_term))
        rows.append(row)
        records.append({"epsilon": exact(eps, _dec(cfg)),
                        "total": exact(jd.total, _dec(cfg)),
                        "terms": exact_list(jd.terms, _dec(cfg)),
                        "closure_term": exact(jd.closure_term, _dec(cfg)),
                        "identity_holds": jd.identity_holds})
    cols = ["epsilon", "total"] + [f"T{k}" for k in range(1, cfg.levels)]
    if linear:
        cols.append("closure_term")
    return _emit(cfg, {"rows": records}, cols, rows), 0


def cmd_parity(cfg):
    rep = parity_analysis(_branch(cfg), cfg.jet_order, cfg.reflect_all)
    d = _dec(cfg)
    body = {
        "tau_minus": exact_list(rep.tau_minus.coeffs, d),
        "tau_plus": exact_list(rep.tau_plus.coeffs, d),
        "reflected_minus": exact_list(rep.reflected_minus.coeffs, d),
        "reflected_plus": exact_list(rep.reflected_plus.coeffs, d),
        "asymmetry": exact(rep.asymmetry, d),
        "residual_order": rep.residual_order,
        "reflected_residual_order": rep.reflected_residual_order,
    }
    rows = [(i, ratio_str(rep.tau_minus[i]), ratio_str(rep.reflected_minus[i]),
             ratio_str(rep.tau_plus[i]), ratio_str(rep.reflected_plus[i]))
            for i in range(cfg.jet_order + 1)]
    cols = ["order", "tau_minus", "reflected_minus", "tau_plus", "reflected_plus"]
    return _emit(cfg, body, cols, rows), 0


def cmd_generation(cfg):
    if cfg.rule == "explicit":
        raise UsageError("generation builds its own schedules; it cannot use --rule explicit")
    if 2**cfg.generation > cfg.jet_order:
        raise UsageError(
            f"--jet-order {cfg.jet_order} cannot resolve generation {cfg.generation} "
            f"(needs >= {2**cfg.generation})")
    records, rows = [], []
    for g in range(1, cfg.generation + 1):
        dev = generation_deviation(_branch(cfg, generation=g), cfg.jet_order)
        coef = dev.leading_coefficient
        records.append({"generation": g, "leading_order": dev.leading_order,
                        "leading_coefficient": None if coef is None else exact(coef, _dec(cfg)),
                        "log_ratio": exact_list(dev.log_ratio.coeffs, _dec(cfg))})
        rows.append((g, dev.leading_order, None if coef is None else ratio_str(coef)))
    return _emit(cfg, {"rows": records}, ["generation", "leading_order",
                                          "leading_coefficient"], rows), 0


def cmd_telescope(cfg):
    N = cfg.levels
    if N > cfg.poly_cap:
        raise ResourceError(f"telescoping product at depth {N} exceeds --poly-cap {cfg.poly_cap}")
    prod = telescoping_product(N)
    target = PolyQ.const(1) - PolyQ.monomial(2**N)
    std = build_branch(make_schedule(0, N), N, Closure.LINEAR, cfg.poly_cap)
    num, den = branch_poly_pair(std)
    reduced = num == PolyQ((1, -1)) * den
    body = {
        "depth": N,
        "product": exact_list(prod.coeffs),
        "expected": exact_list(target.coeffs),
        "telescoping_equal": prod == target,
        "standard_reduction_equal": reduced,
    }
    rows = [("telescoping", str(prod == target).lower()),
            ("standard_reduction", str(reduced).lower())]
    ok = prod == target and reduced
    return _emit(cfg, body, ["identity", "equal"], rows), 0 if ok else 1


COMPARE_NOTE = ("tau inside phi is the standard branch tau(t) = t extended globally; "
                "the local cascade product is only valid near t = 1")


def cmd_compare(cfg):
    rows_bf = long_horizon_compare(cfg.epsilon, cfg.t_range, cfg.steps, cfg.precision)
    ts = compare_grid(cfg.t_range[0], cfg.t_range[1], cfg.steps)
    records, rows = [], []
    for t, r in zip(ts, rows_bf):
        vals = [r.t.decimal(), r.tau_s.decimal(), r.tau_g.decimal(),
                r.abs_dev.decimal(), r.rel_dev.decimal()]
        rows.append(vals)
        records.append({"t_exact": ratio_str(t), "t": vals[0], "tau_s": vals[1],
                        "tau_g": vals[2], "abs_dev": vals[3], "rel_dev": vals[4]})
    extra = {"convention": COMPARE_NOTE, "precision_bits": cfg.precision}
    return _emit(cfg, {"rows": records}, ["t", "tau_s", "tau_g", "abs_dev", "rel_dev"],
                 rows, extra), 0


def cmd_schedule(cfg):
    sched = _schedule(cfg)
    N = cfg.levels
    offsets = offsets_at_zero(sched, N + 1)
    conv = convergence_diagnostics(sched, N)
    records, rows = [], []
    d = _dec(cfg)
    for n in range(N + 1):
        eps, alpha = sched.eps(n), sched.alpha(n)
        tz = 1 + offsets[n]
        dev = conv.deviations[n - 1] if n else None
        prod = conv.partial_products[n - 1] if n else Fraction(1)
        records.append({"n": n, "eps": exact(eps, d), "alpha": exact(alpha, d),
                        "t_plus_at_zero": exact(tz, d),
                        "deviation": None if dev is None else exact(dev, d),
                        "partial_product": exact(prod, d)})
        rows.append((n, ratio_str(eps), ratio_str(alpha), ratio_str(tz),
                     None if dev is None else ratio_str(dev), ratio_str(prod)))
    body = {"levels": records,
            "strictly_decreasing_after_first": conv.strictly_decreasing_after_first()}
    cols = ["n", "eps", "alpha", "t_plus_at_zero", "deviation", "partial_product"]
    return _emit(cfg, body, cols, rows), 0


HANDLERS = {
    "jets": cmd_jets, "verify": cmd_verify, "residual": cmd_residual,
    "jump-scan": cmd_jump_scan, "parity": cmd_parity, "generation": cmd_generation,
    "telescope": cmd_telescope, "compare": cmd_compare, "schedule": cmd_schedule,
}


def run(cfg: RunConfig) -> tuple:
    """Execute a parsed config; returns ``(text, exit_code)``."""
    return HANDLERS[cfg.command](cfg)


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        cfg = parse_config(argv)
    except UsageError as exc:
        print(f"scalecascade: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # argparse usage errors and --help
        return int(exc.code or 0)

    logging.basicConfig(level=logging.WARNING - 10 * min(cfg.verbosity, 2),
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        text, code = run(cfg)
    except UsageError as exc:
        print(f"scalecascade: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ResourceError as exc:
        print(f"scalecascade: resource limit: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except DomainError as exc:
        print(f"scalecascade: error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    try:
        if cfg.output is None:
            sys.stdout.write(text)
            sys.stdout.flush()
        else:
            with open(cfg.output, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
    except OSError as exc:
        print(f"scalecascade: cannot write output: {exc}", file=sys.stderr)
        return EXIT_IO
    return code
