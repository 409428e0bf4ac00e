"""Command-line entry point.

Exit codes: 0 success, 1 invalid input or usage, 2 cap exceeded or request
infeasible (e.g. the DP on a partial-propagation society).
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import cascade, exact, gadget, strategy
from .model import (
    InfeasibleError,
    ValidationError,
    expand_types,
    parse_schedule,
    parse_society,
    parse_types,
    serialize_schedule,
    serialize_society,
)
from .reproduce import TARGETS, fmt, reproduce, tup


class UsageError(Exception):
    pass


class Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc.strerror}") from exc


def _load_pair(args):
    society = parse_society(_read(args.society))
    schedule = parse_schedule(_read(args.schedule))
    schedule.check_against(society)
    return society, schedule


def cmd_simulate(args, out):
    society, schedule = _load_pair(args)
    run = cascade.run_random(society, schedule, args.seed)
    for t, v in enumerate(schedule.order, start=1):
        out.write(f"{t} {v} {run.decisions[v]} {run.trajectory[t - 1]}\n")
    out.write(f"adopters={run.adopters}\n")


def cmd_evaluate(args, out):
    society, schedule = _load_pair(args)
    if args.method == "dp":
        out.write(f"value={fmt(exact.evaluate_dp(society, schedule))}\n")
    elif args.method == "bruteforce":
        out.write(f"value={fmt(exact.evaluate_bruteforce(society, schedule, args.cap))}\n")
    else:
        mean, stderr = cascade.monte_carlo(society, schedule, args.trials, args.seed)
        out.write(f"value={fmt(mean)} stderr={fmt(stderr)} trials={args.trials} seed={args.seed}\n")


def cmd_distribution(args, out):
    society, schedule = _load_pair(args)
    matrix = exact.distribution_dp(society, schedule)
    lines = ["k,x,prob"]
    for k in range(1, matrix.n + 1):
        for x in range(-matrix.n, matrix.n + 1):
            lines.append(f"{k},{x},{matrix.prob(k, x):.12g}")
    text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
        out.write(f"wrote {args.out}\n")
    else:
        out.write(text)


def cmd_optimize_adaptive(args, out):
    profiles = parse_types(_read(args.types))
    value, policy = strategy.optimal_adaptive(profiles, max_types=args.max_types, keep_policy=bool(args.policy_out))
    out.write(f"value={fmt(value)}\n")
    if args.policy_out:
        t = len(profiles)
        with open(args.policy_out, "w", encoding="utf-8") as fh:
            fh.write(",".join(f"n_{i + 1}" for i in range(t)) + ",k,choice,value\n")
            for remaining, k, choice, v in policy.rows():
                fh.write(",".join(map(str, remaining)) + f",{k},{choice},{v:.12g}\n")
        out.write(f"wrote {args.policy_out}\n")


def cmd_optimize_nonadaptive(args, out):
    profiles = parse_types(_read(args.types))
    if args.method in ("sorted", "greedy"):
        society = expand_types(profiles)
        if args.method == "sorted":
            schedule = strategy.sorted_strategy(society)
        else:
            schedule = strategy.greedy_strategy(society, args.criterion)
        seq, value = strategy.schedule_types(profiles, schedule), exact.evaluate_dp(society, schedule)
    elif args.method == "exhaustive":
        seq, value = strategy.exhaustive_nonadaptive(profiles, args.cap)
    else:
        if args.sigma is None:
            raise ValidationError("--sigma is required for --method switch", "sigma")
        seq, value = strategy.best_sigma_switch(profiles, args.sigma, args.cap)
    out.write(f"sequence={tup(seq)}\nvalue={fmt(value)}\n")


def cmd_gadget(args, out):
    inst = gadget.parse_dag(_read(args.dag))
    g = gadget.build_gadget(inst)
    society_path = Path(f"{args.out_prefix}.society.json")
    schedule_path = Path(f"{args.out_prefix}.schedule.json")
    society_path.write_text(serialize_society(g.society), encoding="utf-8")
    schedule_path.write_text(serialize_schedule(g.schedule), encoding="utf-8")
    out.write(f"areas={g.society.n}\nwrote {society_path}\nwrote {schedule_path}\n")
    if not args.verify:
        return
    accept = exact.acceptance_probabilities_bruteforce(g.society, g.schedule, args.cap)
    reliability = gadget.reliability_all(inst, source_operates_randomly=True)
    failures = 0
    for v in range(inst.m):
        a, r = float(accept[g.prime(v)]), float(reliability[v])
        ok = abs(a - r) <= 1e-9
        failures += not ok
        out.write(f"{'PASS' if ok else 'FAIL'} v={v} area={g.prime(v)} accept={fmt(a)} reliability={fmt(r)}\n")
    if inst.p > 0:
        total, alpha = gadget.lambda_decomposition(g, args.cap)
        out.write(f"PASS lambda={fmt(total)} alpha={fmt(alpha)}\n")
    return 1 if failures else 0


def cmd_reproduce(args, out):
    report = reproduce(args.name, args.seed)
    out.write(report.text())
    return 0 if report.ok else 1


def build_parser() -> Parser:
    parser = Parser(prog="cascade-sched", description="Schedule cascades with opposing influences.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=Parser)

    def pair(p):
        p.add_argument("--society", required=True)
        p.add_argument("--schedule", required=True)

    p = sub.add_parser("simulate", help="run the process once and print its trace")
    pair(p)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("evaluate", help="expected number of adopters")
    pair(p)
    p.add_argument("--method", choices=("dp", "bruteforce", "montecarlo"), required=True)
    p.add_argument("--trials", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--cap", type=int, default=exact.BRUTEFORCE_CAP)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("distribution", help="Pr(I_k = x) as CSV")
    pair(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_distribution)

    p = sub.add_parser("optimize", help="search for good schedules")
    opt = p.add_subparsers(dest="mode", required=True, parser_class=Parser)
    a = opt.add_parser("adaptive")
    a.add_argument("--types", required=True)
    a.add_argument("--policy-out")
    a.add_argument("--max-types", type=int, default=strategy.MAX_ADAPTIVE_TYPES)
    a.set_defaults(func=cmd_optimize_adaptive)
    na = opt.add_parser("nonadaptive")
    na.add_argument("--types", required=True)
    na.add_argument("--method", choices=("sorted", "greedy", "exhaustive", "switch"), required=True)
    na.add_argument("--sigma", type=int)
    na.add_argument("--criterion", choices=("unconditional", "positional"), default="unconditional")
    na.add_argument("--cap", type=int, default=strategy.ENUMERATION_CAP)
    na.set_defaults(func=cmd_optimize_nonadaptive)

    p = sub.add_parser("gadget", help="build the reliability reduction")
    p.add_argument("--dag", required=True)
    p.add_argument("--verify", action="store_true")
    p.add_argument("--out-prefix", default="gadget")
    p.add_argument("--cap", type=int, default=exact.BRUTEFORCE_CAP)
    p.set_defaults(func=cmd_gadget)

    p = sub.add_parser("reproduce", help="rerun a worked example")
    p.add_argument("name", choices=tuple(TARGETS))
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_reproduce)
    return parser


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        return args.func(args, out) or 0
    except UsageError as exc:
        err.write(f"{exc}\n")
        return 1
    except ValidationError as exc:
        err.write(f"error: {exc}\n")
        return 1
    except InfeasibleError as exc:
        err.write(f"error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
