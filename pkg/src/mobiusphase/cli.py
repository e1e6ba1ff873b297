"""Command line driver for every operation in the package.

Subcommands: mobius-sum, correlation, bias, approx-ml, approx-poly,
gowers-inverse, variety, cascade, decay, verify.  Exit codes: 0 on
success, 2 on invalid configuration or a failed hypothesis, 3 on budget
refusal.  Structured inputs (--q, --form, --w) accept inline JSON (any
string starting with '{') or a path to a JSON file; --w additionally
accepts the ':'-joined little-endian coefficient cell.  All artifacts are
UTF-8 with LF line endings, identical runs produce identical bytes, and
the default enumeration budget can be overridden with the HOFF_BUDGET
environment variable (an explicit --budget wins over the environment).
"""

import argparse
import os
import random
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from . import acceptance
from .budget import BudgetExceededError, HypothesisError
from .ffpoly import _is_prime
from .forms import PolynomialFn
from .phaseapprox import (
    approximate_multilinear_phase,
    approximate_polynomial_phase,
    gowers_inverse_polynomial,
)
from .pipeline import (
    bias_cascade_report,
    decay_experiment,
    mobius_correlation,
    mobius_sum,
    random_phase_polynomial,
)
from .serialize import (
    SerializationError,
    combination_to_json,
    dumps,
    fiber_report_to_json,
    form_from_json,
    form_to_json,
    fraction_to_text,
    loads,
    poly_from_csv_cell,
    poly_from_json,
    poly_to_json,
    polynomial_fn_from_json,
    polynomial_fn_to_json,
)
from .varieties import biased_fiber_variety

SUBCOMMANDS = ("mobius-sum", "correlation", "bias", "approx-ml", "approx-poly",
               "gowers-inverse", "variety", "cascade", "decay", "verify")


@dataclass(frozen=True)
class RunConfig:
    """Validated shared configuration of a single invocation."""

    command: str
    p: Optional[int] = None
    k: Optional[int] = None
    n: Optional[str] = None
    m: Optional[int] = None
    d: Optional[int] = None
    eps: Optional[float] = None
    seed: int = 0
    budget: Optional[int] = None
    out: Optional[str] = None
    fmt: Optional[str] = None
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.p is not None and not _is_prime(self.p):
            raise ValueError(f"--p must be prime, got {self.p}")
        if self.budget is not None and self.budget <= 0:
            raise ValueError(f"--budget must be positive, got {self.budget}")

    def require_phase_hypothesis(self, p: int, k: int) -> None:
        """Polynomial-phase commands need p prime and strictly above k."""
        if not _is_prime(p):
            raise ValueError(f"modulus {p} is not prime")
        if p <= k:
            raise ValueError(
                f"polynomial-phase commands need p > k, got p = {p}, k = {k}")

    def plain_n(self) -> Optional[int]:
        if self.n is None:
            return None
        try:
            return int(self.n)
        except ValueError:
            raise ValueError(f"--n must be an integer here, got {self.n!r}") from None

    def n_range(self) -> range:
        if self.n is None:
            raise ValueError("--n is required (an integer or lo..hi)")
        text = self.n
        if ".." in text:
            lo_text, hi_text = text.split("..", 1)
            try:
                lo, hi = int(lo_text), int(hi_text)
            except ValueError:
                raise ValueError(f"bad range {text!r}, expected lo..hi") from None
            if lo > hi:
                raise ValueError(f"empty range {text!r}")
            return range(lo, hi + 1)
        value = int(text)
        return range(value, value + 1)


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    shared = {"p", "k", "n", "m", "d", "eps", "seed", "budget", "out", "format"}
    params = {key: value for key, value in vars(args).items()
              if key not in shared and key != "command"}
    return RunConfig(
        command=args.command,
        p=getattr(args, "p", None), k=getattr(args, "k", None),
        n=getattr(args, "n", None), m=getattr(args, "m", None),
        d=getattr(args, "d", None), eps=getattr(args, "eps", None),
        seed=getattr(args, "seed", 0), budget=getattr(args, "budget", None),
        out=getattr(args, "out", None), fmt=getattr(args, "format", None),
        params=params)


# ------------------------------------------------------------- I/O helpers

def _load_doc(text: str, what: str):
    """Inline JSON if the argument starts with '{', else a file path."""
    if text.lstrip().startswith("{"):
        return loads(text)
    if not os.path.exists(text):
        raise ValueError(f"{what}: no such file {text!r} "
                         "(inline JSON must start with '{')")
    with open(text, encoding="utf-8") as fh:
        return loads(fh.read())


def _complex_doc(z: complex) -> dict:
    return {"re": z.real, "im": z.imag}


def _require(value, flag: str):
    if value is None:
        raise ValueError(f"{flag} is required for this command")
    return value


def _check_format(config: RunConfig, allowed: tuple) -> str:
    fmt = config.fmt or allowed[0]
    if fmt not in allowed:
        raise ValueError(
            f"--format {fmt} is not available here (choose from {'|'.join(allowed)})")
    return fmt


def _resolve_polynomial(config: RunConfig) -> PolynomialFn:
    """A polynomial from --q, or a seeded random one from --p/--n/--k."""
    q_text = config.params.get("q")
    if q_text is not None:
        q = polynomial_fn_from_json(_load_doc(q_text, "--q"))
        if config.p is not None and q.p != config.p:
            raise ValueError(f"--p {config.p} disagrees with the polynomial's {q.p}")
        return q
    p = _require(config.p, "--p (when --q is omitted)")
    n = _require(config.plain_n(), "--n (when --q is omitted)")
    k = _require(config.k, "--k (when --q is omitted)")
    config.require_phase_hypothesis(p, k)
    return random_phase_polynomial(random.Random(config.seed), p, n, k)


# ------------------------------------------------------------ subcommands

def _cmd_mobius_sum(config: RunConfig):
    p = _require(config.p, "--p")
    n = _require(config.plain_n(), "--n")
    value = mobius_sum(p, n, monic_only=config.params.get("monic", False),
                       budget=config.budget)
    return f"{value}\n", 0


def _cmd_correlation(config: RunConfig):
    _check_format(config, ("json",))
    q = _resolve_polynomial(config)
    k = config.k if config.k is not None else max(q.degree, 1)
    config.require_phase_hypothesis(q.p, k)
    rep = mobius_correlation(q, n=config.plain_n(), budget=config.budget,
                             seed=config.seed)
    doc = {
        "p": rep.p, "n": rep.n, "k": rep.k,
        "q": polynomial_fn_to_json(q), "q_text": rep.q_text,
        "value": _complex_doc(rep.value), "magnitude": rep.magnitude,
        "constant_part": _complex_doc(rep.constant_part),
        "nonconstant_part": _complex_doc(rep.nonconstant_part),
        "permuted_delta": rep.permuted_delta,
    }
    return dumps(doc), 0


def _cmd_bias(config: RunConfig):
    _check_format(config, ("json",))
    form = form_from_json(_load_doc(_require(config.params.get("form"), "--form"),
                                    "--form"))
    value = form.bias(config.budget)
    doc = {"p": form.p, "dims": list(form.dims),
           "bias": fraction_to_text(value), "bias_float": float(value)}
    return dumps(doc), 0


def _cmd_approx_ml(config: RunConfig):
    _check_format(config, ("json",))
    form = form_from_json(_load_doc(_require(config.params.get("form"), "--form"),
                                    "--form"))
    eps = _require(config.eps, "--eps")
    comb = approximate_multilinear_phase(form, eps, config.seed,
                                         budget=config.budget)
    return dumps(combination_to_json(comb)), 0


def _cmd_approx_poly(config: RunConfig):
    _check_format(config, ("json",))
    q = _resolve_polynomial(config)
    k = config.k if config.k is not None else max(q.degree, 1)
    config.require_phase_hypothesis(q.p, k)
    eps = _require(config.eps, "--eps")
    comb = approximate_polynomial_phase(q, eps, config.seed, k=k,
                                        budget=config.budget)
    return dumps(combination_to_json(comb)), 0


def _cmd_gowers_inverse(config: RunConfig):
    _check_format(config, ("json",))
    q = _resolve_polynomial(config)
    k = config.k if config.k is not None else max(q.degree, 1)
    config.require_phase_hypothesis(q.p, k)
    witness, corr = gowers_inverse_polynomial(q, k, config.seed,
                                              budget=config.budget)
    doc = {"p": q.p, "k": k, "q": polynomial_fn_to_json(q),
           "witness": polynomial_fn_to_json(witness),
           "witness_degree": witness.degree,
           "correlation": _complex_doc(corr), "magnitude": abs(corr)}
    return dumps(doc), 0


def _cmd_variety(config: RunConfig):
    _check_format(config, ("json",))
    form = form_from_json(_load_doc(_require(config.params.get("form"), "--form"),
                                    "--form"))
    k = _require(config.k, "--k")
    try:
        c = Fraction(_require(config.params.get("c"), "--c"))
    except (ValueError, ZeroDivisionError):
        raise ValueError(f"--c must be an exact fraction, got "
                         f"{config.params.get('c')!r}") from None
    rep = biased_fiber_variety(form, k, c, config.seed,
                               draws=config.params.get("draws", 64),
                               budget=config.budget)
    return dumps(fiber_report_to_json(rep)), 0


def _cascade_doc(rep) -> dict:
    rows = []
    for row in rep.rows:
        plan = None
        if row.plan is not None:
            plan = {"l": list(row.plan.l), "a": list(row.plan.a),
                    "multiplicity": row.plan.multiplicity,
                    "l_stabilizer": row.plan.l_stabilizer}
        rows.append({"position": row.position,
                     "index": list(row.index_tuple),
                     "bias": fraction_to_text(row.bias),
                     "bound": fraction_to_text(row.bound),
                     "is_head": row.is_head, "is_sorted": row.is_sorted,
                     "plan": plan,
                     "reduced_positions": list(row.reduced_positions)})
    return {
        "p": rep.p, "n": rep.n, "k": rep.k, "d": rep.d, "m": rep.m,
        "g": rep.g, "s": rep.s, "w": poly_to_json(rep.w),
        "c": fraction_to_text(rep.c),
        "premise": [{"index": list(idx), "bias": fraction_to_text(b)}
                    for idx, b in rep.premise],
        "rows": rows,
        "main_bias": fraction_to_text(rep.main_bias),
        "main_bound": fraction_to_text(rep.main_bound),
        "final_bias": fraction_to_text(rep.final_bias),
        "final_bound": fraction_to_text(rep.final_bound),
        "removal_factor": fraction_to_text(rep.removal_factor),
        "preconditions": [{"name": c.name, "holds": c.holds}
                          for c in rep.preconditions],
        "identities_checked": rep.identities_checked,
    }


def _cmd_cascade(config: RunConfig):
    _check_format(config, ("json",))
    q_text = _require(config.params.get("q"), "--q")
    q = polynomial_fn_from_json(_load_doc(q_text, "--q"))
    k = config.k if config.k is not None else max(q.degree, 1)
    config.require_phase_hypothesis(q.p, k)
    w_text = _require(config.params.get("w"), "--w")
    if w_text.lstrip().startswith("{"):
        w = poly_from_json(loads(w_text))
    else:
        w = poly_from_csv_cell(w_text, q.p)
    d = _require(config.d, "--d")
    m = _require(config.m, "--m")
    rep = bias_cascade_report(q, w, d, m, n=config.plain_n(),
                              budget=config.budget, k=config.k)
    return dumps(_cascade_doc(rep)), 0


def _cmd_decay(config: RunConfig):
    fmt = _check_format(config, ("csv", "json"))
    p = _require(config.p, "--p")
    k = _require(config.k, "--k")
    config.require_phase_hypothesis(p, k)
    rep = decay_experiment(p, k, config.n_range(),
                           samples=config.params.get("samples", 50),
                           seed=config.seed, budget=config.budget)
    if fmt == "csv":
        return rep.csv_text(), 0
    doc = {"p": rep.p, "k": rep.k, "samples": rep.samples, "seed": rep.seed,
           "slope": rep.slope, "epsilon_hat": rep.epsilon_hat,
           "monotone": rep.monotone,
           "rows": [{"n": row.n, "max_abs_S": row.max_abs,
                     "mean_abs_S": row.mean_abs} for row in rep.rows]}
    return dumps(doc), 0


def _cmd_verify(config: RunConfig):
    only = config.params.get("only")
    results = acceptance.run_all(only if only else None)
    text = acceptance.format_table(results)
    return text, 0 if all(r.passed for r in results) else 2


_HANDLERS = {
    "mobius-sum": _cmd_mobius_sum,
    "correlation": _cmd_correlation,
    "bias": _cmd_bias,
    "approx-ml": _cmd_approx_ml,
    "approx-poly": _cmd_approx_poly,
    "gowers-inverse": _cmd_gowers_inverse,
    "variety": _cmd_variety,
    "cascade": _cmd_cascade,
    "decay": _cmd_decay,
    "verify": _cmd_verify,
}


# ------------------------------------------------------------- the parser

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mobiusphase",
        description="Exact bias, phase approximation, and sign-correlation "
                    "experiments over F_p[t].")
    subs = parser.add_subparsers(dest="command", required=True,
                                 metavar="|".join(SUBCOMMANDS))

    def sub(name, help_text):
        s = subs.add_parser(name, help=help_text)
        s.add_argument("--p", type=int, help="prime modulus")
        s.add_argument("--k", type=int, help="degree / front-slot count")
        s.add_argument("--n", type=str,
                       help="degree window (an integer; decay accepts lo..hi)")
        s.add_argument("--m", type=int, help="multiplier degree")
        s.add_argument("--d", type=int, help="chunk size")
        s.add_argument("--eps", type=float, help="target L2 error")
        s.add_argument("--seed", type=int, default=0, help="RNG seed")
        s.add_argument("--budget", type=int,
                       help="max enumerated points (default: HOFF_BUDGET or 2^20)")
        s.add_argument("--out", type=str, help="also write the artifact here")
        s.add_argument("--format", type=str, choices=("json", "csv"),
                       help="artifact format (default depends on the command)")
        return s

    s = sub("mobius-sum", "exact sum of the squarefree sign over a stratum")
    s.add_argument("--monic", action="store_true",
                   help="sum over monic degree-n polynomials instead of all "
                        "polynomials of degree below n")

    s = sub("correlation", "normalized sign-phase correlation over G_n")
    s.add_argument("--q", type=str, help="phase polynomial (JSON or path); "
                                         "omit to sample one from --p/--n/--k")

    s = sub("bias", "exact bias of a multilinear form")
    s.add_argument("--form", type=str, required=True,
                   help="multilinear form (JSON or path)")

    s = sub("approx-ml", "L2-approximate a biased multilinear phase")
    s.add_argument("--form", type=str, required=True,
                   help="multilinear form (JSON or path)")

    s = sub("approx-poly", "approximate a degree-k phase by lower-degree ones")
    s.add_argument("--q", type=str, help="phase polynomial (JSON or path)")

    s = sub("gowers-inverse", "lower-degree witness correlating with a phase")
    s.add_argument("--q", type=str, help="phase polynomial (JSON or path)")

    s = sub("variety", "biased-fiber variety search with certification")
    s.add_argument("--form", type=str, required=True,
                   help="front/back split multilinear form (JSON or path)")
    s.add_argument("--c", type=str, required=True,
                   help="bias threshold, an exact fraction like 1/2")
    s.add_argument("--draws", type=int, default=64,
                   help="dependent-random-choice draws")

    s = sub("cascade", "stepwise bias cascade for a progression substitution")
    s.add_argument("--q", type=str, required=True,
                   help="phase polynomial (JSON or path)")
    s.add_argument("--w", type=str, required=True,
                   help="base polynomial, ':'-joined coefficients or JSON")

    s = sub("decay", "seeded max-correlation decay table over a degree range")
    s.add_argument("--samples", type=int, default=50,
                   help="random polynomials per degree")

    s = sub("verify", "run the numbered acceptance criteria")
    s.add_argument("--only", type=int, action="append",
                   help="restrict to this criterion number (repeatable)")

    return parser


def run(argv=None) -> int:
    """Parse, dispatch, and emit; returns the process exit status."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        config = _config_from_args(args)
        text, status = _HANDLERS[config.command](config)
    except BudgetExceededError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (HypothesisError, SerializationError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    sys.stdout.write(text)
    if config.out:
        with open(config.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    return status


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
