"""Command-line interface.

Exit codes: 0 success, 2 invalid usage or parameters, 3 a size cap was
exceeded, 4 an invariant check failed.
"""

from __future__ import annotations

import argparse
import os
import sys
from fractions import Fraction

from tensorclt import checks, clt, limit_law, partitions, tensor_trace
from tensorclt.errors import CapExceededError, DomainError, TensorCLTError
from tensorclt.free_moments import CumulantSpec, catalan
from tensorclt.output import OutputRecord
from tensorclt.rmt_sim import DIM_CAP, SimConfig, empirical_moments

EXIT_OK, EXIT_USAGE, EXIT_CAP, EXIT_INVARIANT = 0, 2, 3, 4


def rational(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None


def rational_list(text: str) -> list[Fraction]:
    return [rational(tok) for tok in text.split(",") if tok.strip()]


def int_list(text: str) -> list[int]:
    try:
        return [int(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a list of integers: {text!r}") from None


def _spec_from_list(kappas: list[Fraction], order: int, strict: bool) -> CumulantSpec:
    spec = CumulantSpec(tuple(kappas))
    return spec if strict else spec.padded(order)


def _resolve_q(args) -> tuple[Fraction, dict]:
    if args.q is not None:
        if args.lam is not None or args.sigma2 is not None:
            raise DomainError("give either --q or --lambda/--sigma2, not both")
        return limit_law.check_q(args.q), {"q": args.q}
    if args.lam is None or args.sigma2 is None:
        raise DomainError("need --q, or both --lambda and --sigma2")
    q = limit_law.q_from_params(args.lam, args.sigma2)
    return q, {"lambda": args.lam, "sigma2": args.sigma2, "q": q}


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_moments(args) -> OutputRecord:
    q, params = _resolve_q(args)
    rows = []
    for order in range(2, args.max_order + 1, 2):
        direct = limit_law.mu_q_moment_direct(order, q, cap=args.cap)
        fast = limit_law.mu_q_moment_fast(order, q, cap=args.cap)
        rows.append({"order": order, "direct": direct, "fast": fast, "agree": direct == fast})
    return OutputRecord("moments", dict(params, max_order=args.max_order), rows)


def cmd_cumulants(args) -> OutputRecord:
    q, params = _resolve_q(args)
    rows = []
    for n in range(1, args.max_order + 1):
        counted = limit_law.mu_q_cumulant(n, q, cap=args.cap)
        additive = limit_law.mu_q_cumulant_additive(n, q)
        rows.append({"order": n, "counting": counted, "additive": additive, "agree": counted == additive})
    return OutputRecord("cumulants", dict(params, max_order=args.max_order), rows)


def cmd_tau(args) -> OutputRecord:
    pi = partitions.as_pairing(partitions.Partition.parse(args.pairing))
    spec = None
    if args.cumulants is not None:
        spec = _spec_from_list(args.cumulants, 2, strict=True)
        for given, own, name in ((args.lam, spec.mean, "--lambda"), (args.sigma2, spec.variance, "--sigma2")):
            if given is not None and given != own:
                raise DomainError(f"{name} disagrees with the cumulant list")
        params = tensor_trace.TensorParams.from_spec(spec)
    else:
        lam = args.lam if args.lam is not None else Fraction(1)
        sigma2 = args.sigma2 if args.sigma2 is not None else Fraction(1)
        params = tensor_trace.TensorParams(lam, sigma2)
    closed = tensor_trace.tau_closed_form(pi, params)
    reduced = tensor_trace.tau_reduce(pi, params)
    row = {"pairing": str(pi), "q": params.q, "closed_form": closed, "reduced": reduced}
    agree = closed == reduced
    if spec is not None:
        oracle = tensor_trace.tau_oracle(pi, spec)
        row["oracle"] = oracle
        agree = agree and oracle == closed
    row["agree"] = agree
    parameters = {"pairing": args.pairing, "lambda": params.lam, "sigma2": params.sigma2}
    if spec is not None:
        parameters["cumulants"] = [str(k) for k in spec.kappas]
    return OutputRecord("tau", parameters, [row])


def cmd_converge(args) -> OutputRecord:
    spec = _spec_from_list(args.cumulants, args.pmax, args.strict)
    rows = []
    for r in clt.convergence_table(args.pmax, args.n_list, spec, cap=args.cap):
        rows.append({"p": r.p, "n": r.n, "value": r.value, "limit": r.limit, "gap": r.gap,
                     "n_gap": r.gap * r.n})
    params = {"pmax": args.pmax, "n_list": args.n_list,
              "cumulants_used": [str(k) for k in spec.kappas],
              "q": tensor_trace.TensorParams.from_spec(spec).q}
    return OutputRecord("converge", params, rows)


def cmd_simulate(args) -> OutputRecord:
    config = SimConfig(d=args.d, n=args.n, lam=args.lam, sigma=args.sigma, trials=args.trials,
                       seed=args.seed, pmax=args.pmax, centering=args.centering,
                       normalization=args.normalization, dim_cap=args.dim_cap)
    result = empirical_moments(config, workers=args.threads or os.cpu_count() or 1)
    rows = [
        {"p": r["p"], "empirical_mean": r["empirical_mean"], "std_error": r["std_error"],
         "reference": r["reference"], "z_score": r["z_score"]}
        for r in result.rows()
    ]
    params = {k: getattr(config, k) for k in ("d", "n", "lam", "sigma", "trials", "seed", "pmax",
                                              "centering", "normalization")}
    params.update(q=config.q, generator=result.generator)
    return OutputRecord("simulate", params, rows,
                        approximate_fields=["empirical_mean", "std_error", "z_score"])


def cmd_counts(args) -> OutputRecord:
    rows = []
    workers = args.threads or os.cpu_count() or 1
    for p in range(2, args.max + 1, 2):
        by_graph = partitions.count_connected(p, cap=args.cap)
        by_interval = partitions.count_connected_by_intervals(p, cap=args.cap)
        profile = partitions.bipartite_profile(p, cap=args.cap, workers=workers)
        rows.append({
            "p": p,
            "pairings": sum(1 for _ in partitions.enumerate_pair_partitions(p, args.cap)),
            "noncrossing": catalan(p // 2),
            "connected": by_graph,
            "connected_by_intervals": by_interval,
            "bipartite": sum(profile.values()),
            "bipartite_connected": partitions.count_bipartite_connected(p, cap=args.cap),
            "agree": by_graph == by_interval,
        })
    return OutputRecord("counts", {"max": args.max}, rows)


def cmd_check(args) -> OutputRecord:
    results = checks.run_checks(args.level)
    rows = [{"check": r.name, "passed": r.passed, "seconds": round(r.seconds, 3), "detail": r.detail}
            for r in results]
    return OutputRecord("check", {"level": args.level}, rows, approximate_fields=["seconds"])


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def _add_common(sp, fmt_default="csv"):
    sp.add_argument("--format", choices=("csv", "json"), default=fmt_default)
    sp.add_argument("--cap", type=int, default=partitions.PAIR_CAP,
                    help="enumeration cap (largest ground-set size enumerated)")


def _add_q(sp):
    sp.add_argument("--q", type=rational)
    sp.add_argument("--lambda", dest="lam", type=rational)
    sp.add_argument("--sigma2", type=rational)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tensorclt", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("moments", help="moments of mu_q by both routes")
    _add_q(sp)
    sp.add_argument("--max-order", type=int, default=8)
    _add_common(sp)
    sp.set_defaults(func=cmd_moments)

    sp = sub.add_parser("cumulants", help="free cumulants of mu_q by both routes")
    _add_q(sp)
    sp.add_argument("--max-order", type=int, default=8)
    _add_common(sp)
    sp.set_defaults(func=cmd_cumulants)

    sp = sub.add_parser("tau", help="tau x tau of one pairing")
    sp.add_argument("--pairing", required=True, help='e.g. "1,3|2,4"')
    sp.add_argument("--lambda", dest="lam", type=rational)
    sp.add_argument("--sigma2", type=rational)
    sp.add_argument("--cumulants", type=rational_list,
                    help="comma-separated free cumulants k_1,k_2,...; enables the oracle")
    _add_common(sp)
    sp.set_defaults(func=cmd_tau)

    sp = sub.add_parser("converge", help="exact finite-n moments of S_n and their gaps")
    sp.add_argument("--pmax", type=int, default=4)
    sp.add_argument("--n-list", type=int_list, default=[10, 20, 40])
    sp.add_argument("--cumulants", type=rational_list, required=True)
    sp.add_argument("--strict", action="store_true",
                    help="do not zero-pad the cumulant list up to --pmax")
    _add_common(sp)
    sp.set_defaults(func=cmd_converge, cap=partitions.SET_CAP)

    sp = sub.add_parser("simulate", help="Monte Carlo moments of the random matrix model")
    sp.add_argument("--d", type=int, default=50)
    sp.add_argument("--n", type=int, default=100)
    sp.add_argument("--lambda", dest="lam", type=float, default=1.0)
    sp.add_argument("--sigma", type=float, default=1.0)
    sp.add_argument("--trials", type=int, default=20)
    sp.add_argument("--seed", type=int, default=SimConfig.seed)
    sp.add_argument("--pmax", type=int, default=4)
    sp.add_argument("--centering", choices=("exact", "limit"), default="exact")
    sp.add_argument("--normalization", choices=("ensemble", "limit"), default="ensemble")
    sp.add_argument("--dim-cap", type=int, default=DIM_CAP)
    sp.add_argument("--threads", type=int, default=None, help="default: available cores")
    sp.add_argument("--format", choices=("csv", "json"), default="csv")
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("counts", help="connected / bipartite connected pairing counts")
    sp.add_argument("--max", type=int, default=8)
    sp.add_argument("--threads", type=int, default=None, help="default: available cores")
    _add_common(sp)
    sp.set_defaults(func=cmd_counts)

    sp = sub.add_parser("check", help="run the invariant suites")
    sp.add_argument("--level", choices=("quick", "full"), default="quick")
    sp.add_argument("--format", choices=("csv", "json"), default="csv")
    sp.set_defaults(func=cmd_check)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        record = args.func(args)
    except CapExceededError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (DomainError, TensorCLTError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    sys.stdout.write(record.render(args.format))
    if args.format == "json":
        sys.stdout.write("\n")
    if args.command == "check":
        failed = [r for r in record.rows if not r["passed"]]
        for r in failed:
            print(f"FAILED {r['check']}: {r['detail']}", file=sys.stderr)
        return EXIT_INVARIANT if failed else EXIT_OK
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
