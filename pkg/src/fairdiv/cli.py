"""Command-line interface.

Subcommands: ``gen`` (random instances), ``run`` (online policies with bound
checks), ``mms`` (exact values/bounds report), ``adversary run`` (adaptive
lower-bound games), ``stacking replay`` (re-verify a stacking trace file).

Exit codes: 0 all checks pass, 1 a theoretical-bound check failed, 2 usage
error.
"""

from __future__ import annotations

import argparse
import json
import sys

from .adversary import (
    check_O1_O2,
    make_recursive_adversary,
    play_game,
    TwoAgentAdversary,
    verify_certificate,
)
from .allocator import make_policy, run_online
from .core import (
    FairdivError,
    allocation_to_json,
    instance_to_json,
    load_instance,
    parse_rational,
)
from .harness import GeneratorConfig, generate_instance, run_experiment
from .mms import mms_report, mms_report_to_obj
from .stacking import replay_stacking_trace


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read()


def _write(path: str, text: str) -> None:
    if path == "-":
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def cmd_gen(args) -> int:
    cfg = GeneratorConfig(
        n=args.n,
        m=args.m,
        k=args.k,
        D=parse_rational(args.D),
        value_grid=args.grid,
        seed=args.seed,
    )
    inst = generate_instance(cfg)
    _write(args.out, instance_to_json(inst) + "\n")
    return 0


def cmd_run(args) -> int:
    inst = load_instance(_read(args.infile))
    policy = make_policy(args.policy)
    alloc, trace = run_online(inst, policy)
    if args.out:
        _write(args.out, allocation_to_json(alloc) + "\n")
    if args.trace:
        _write(args.trace, trace.to_jsonl())
    report = run_experiment(inst, policies=[make_policy(args.policy)])
    if args.report:
        text = report.to_csv() if args.format == "csv" else report.to_json() + "\n"
        _write(args.report, text)
    else:
        sys.stdout.write(report.to_csv() if args.format == "csv" else report.to_json() + "\n")
    return 0 if report.passed else 1


def cmd_mms(args) -> int:
    inst = load_instance(_read(args.infile))
    obj = mms_report_to_obj(mms_report(inst))
    _write(args.out, json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n")
    return 0


def cmd_adversary_run(args) -> int:
    eps = parse_rational(args.eps)
    policy = make_policy(args.policy)
    if args.n == 2:
        adv = TwoAgentAdversary(eps)
    else:
        adv = make_recursive_adversary(args.n, eps, pin_horizon=args.budget)
    result = play_game(adv, policy, budget=args.budget)
    ok = verify_certificate(result.instance, result.allocation, result.certificate)
    if args.out_instance:
        _write(args.out_instance, instance_to_json(result.instance) + "\n")
    if args.out_allocation:
        _write(args.out_allocation, allocation_to_json(result.allocation) + "\n")
    cert_obj = result.certificate.to_obj()
    cert_obj["certified"] = result.certified
    cert_obj["budget_exhausted"] = result.budget_exhausted
    cert_obj["rounds"] = result.rounds
    cert_obj["sound"] = ok
    if result.record is not None:
        o1o2 = check_O1_O2(result.record)
        cert_obj["o1_ok"] = o1o2.o1_ok
        cert_obj["o2_ok"] = o1o2.o2_ok
        ok = ok and o1o2.o1_ok and o1o2.o2_ok
    _write(args.out_certificate, json.dumps(cert_obj, sort_keys=True, separators=(",", ":")) + "\n")
    return 0 if ok else 1


def cmd_stacking_replay(args) -> int:
    report = replay_stacking_trace(_read(args.infile))
    summary = {"steps": report.steps, "passed": report.passed, "failures": list(report.failures)}
    sys.stdout.write(json.dumps(summary, sort_keys=True, separators=(",", ":")) + "\n")
    return 0 if report.passed else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fairdiv", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a random instance")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--D", default="1", help='max value spread, "p" or "p/q"')
    p.add_argument("--grid", default="powers-of-two",
                   choices=["powers-of-two", "uniform-rational", "adversarial-near-threshold"])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="-")
    p.set_defaults(fn=cmd_gen)

    p = sub.add_parser("run", help="run an online policy over an instance file")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--policy", default="pressure-greedy")
    p.add_argument("--out", help="allocation file")
    p.add_argument("--trace", help="JSONL trace file")
    p.add_argument("--report", help="experiment report file")
    p.add_argument("--format", default="json", choices=["json", "csv"])
    p.set_defaults(fn=cmd_run)

    p = sub.add_parser("mms", help="exact MMS / certified bounds per agent")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", default="-")
    p.set_defaults(fn=cmd_mms)

    adv = sub.add_parser("adversary", help="adaptive lower-bound games")
    advsub = adv.add_subparsers(dest="subcommand", required=True)
    p = advsub.add_parser("run", help="play an adversary against a policy")
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--eps", default="1/2")
    p.add_argument("--policy", default="pressure-greedy")
    p.add_argument("--budget", type=int, default=10000)
    p.add_argument("--out-instance")
    p.add_argument("--out-allocation")
    p.add_argument("--out-certificate", default="-")
    p.set_defaults(fn=cmd_adversary_run)

    st = sub.add_parser("stacking", help="stacking-game utilities")
    stsub = st.add_subparsers(dest="subcommand", required=True)
    p = stsub.add_parser("replay", help="re-verify a stacking trace file")
    p.add_argument("--in", dest="infile", required=True)
    p.set_defaults(fn=cmd_stacking_replay)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return args.fn(args)
    except FairdivError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
