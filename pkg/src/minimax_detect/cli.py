"""Command line front-end.

Exit status: 0 on success, 2 for unreadable or invalid input, 3 when the
evaluation itself cannot be carried out (for instance a group with no
fooling samples).
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys

from . import io as mio
from .capacity import SolverConfig, solve_capacity
from .core import Channel, MinimaxDetectError, ParseError
from .detector import aggregate, detect, score_records
from .losses import LOSSES, evaluate_loss
from .mead import evaluate

LN2 = math.log(2.0)


def _solver_config(args) -> SolverConfig:
    return SolverConfig(tolerance=args.tol, max_iterations=args.max_iter)


def _add_solver_flags(p):
    p.add_argument("--tol", type=float, default=1e-10, help="stopping gap in nats (default 1e-10)")
    p.add_argument("--max-iter", type=int, default=10_000, help="iteration cap (default 10000)")


def _vector(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise ParseError(f"malformed probability vector {text!r}") from None


def _dump(obj):
    print(json.dumps(obj, indent=2))


def cmd_capacity(args):
    channel = mio.parse_rows(args.rows) if args.rows is not None else mio.read_channel(args.channel)
    res = solve_capacity(channel, _solver_config(args))
    scale = 1.0 / LN2 if args.bits else 1.0
    _dump({
        "weights": res.weights.to_list(),
        "capacity": res.capacity * scale,
        "units": "bits" if args.bits else "nats",
        "iterations": res.iterations,
        "converged": res.converged,
        "final_gap": res.final_gap * scale,
    })
    return 0


def cmd_aggregate(args):
    config = _solver_config(args)
    if args.values is not None:
        score = aggregate(Channel.from_scores(_vector(args.values)), config)
        _dump({
            "p_adversarial": score.p_adversarial,
            "weights": score.weights.to_list(),
            "capacity": score.capacity,
            "converged": score.converged,
            "gamma": args.gamma,
            "adversarial": detect(score, args.gamma),
        })
        return 0
    records = mio.read_scores(args.scores, args.format)
    scored = score_records(records, config)
    out = open(args.out, "w", encoding="utf-8", newline="") if args.out else sys.stdout
    try:
        w = csv.writer(out, lineterminator="\n")
        k = records[0].K if records else 0
        w.writerow(["sample_id", "role", "attack", "fooled", "p_adversarial", "capacity",
                    "converged", "detected"] + [f"w_{i}" for i in range(k)])
        for rec, s in zip(records, scored):
            w.writerow([rec.sample_id, rec.role.value, "" if rec.attack is None else str(rec.attack),
                        "true" if rec.fooled else "false", repr(s.p_adversarial), repr(s.capacity),
                        "true" if s.converged else "false",
                        "true" if detect(s, args.gamma) else "false"]
                       + [repr(x) for x in s.weights.to_list()])
    finally:
        if out is not sys.stdout:
            out.close()
    return 0


def cmd_evaluate(args):
    records = mio.read_scores(args.scores, args.format)
    groups = mio.read_groups(args.groups)
    report = evaluate(records, groups, _solver_config(args), baselines=args.baselines,
                      roc=args.roc_dump is not None, target_tpr=args.target_tpr)
    print(mio.format_report(report))
    if args.out:
        mio.write_report(args.out, report)
    if args.roc_dump:
        mio.write_roc_dump(args.roc_dump, report)
    return 0


def cmd_losses(args):
    if args.file:
        try:
            with open(args.file, encoding="utf-8") as fh:
                doc = json.load(fh)
            clean, adv = doc["clean"], doc["adv"]
        except (OSError, json.JSONDecodeError, KeyError, TypeError) as exc:
            raise ParseError(f"cannot read loss inputs: {exc}", path=args.file) from None
    else:
        if args.adv is None or (args.clean is None and args.loss.lower() != "gini"):
            raise ParseError("give --clean and --adv, or --file")
        adv = _vector(args.adv)
        clean = _vector(args.clean) if args.clean is not None else adv
    names = list(LOSSES) if args.loss == "all" else [args.loss]
    _dump({name: evaluate_loss(name, clean, adv) for name in names})
    return 0


def cmd_synth(args):
    config = mio.read_synthetic_config(args.config)
    if args.seed is not None:
        config = mio.SyntheticConfig(**{**config.__dict__, "seed": args.seed})
    records = mio.generate_synthetic(config)
    fmt = args.format or mio.guess_format(args.out)
    mio.write_scores(args.out, records, fmt, header=mio.synthetic_header(config))
    print(f"wrote {len(records)} records to {args.out} (seed {config.seed})")
    return 0


def cmd_groups_check(args):
    groups = mio.read_groups(args.groups)
    census = mio.group_census(groups)
    if args.json:
        _dump(census)
        return 0
    for cell in census["cells"]:
        eps = "-" if cell["epsilon"] is None else f"{cell['epsilon']:g}"
        line = f"{cell['norm']:<5} {eps:>8} {cell['n_members']:>3}"
        if args.verbose:
            line += "  " + " ".join(cell["members"])
        print(line)
    print(f"{census['n_cells']} cells, {census['n_variants']} attack variants")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="minimax-detect",
        description="Minimax aggregation of adversarial-example detectors.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("capacity", help="optimal weights and capacity for one channel")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--channel", help="channel file (JSON rows or 'a,b' lines)")
    src.add_argument("--rows", help="inline rows, e.g. '0.9,0.1;0.1,0.9'")
    _add_solver_flags(p)
    p.add_argument("--bits", action="store_true", help="report capacity in bits")
    p.set_defaults(func=cmd_capacity)

    p = sub.add_parser("aggregate", help="mixture score for one input or a score file")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--scores", help="score file (csv_wide or jsonl)")
    src.add_argument("--values", help="inline detector scores P(adversarial), e.g. '0.9,0.1'")
    p.add_argument("--format", choices=mio.FORMATS)
    p.add_argument("--gamma", type=float, default=0.5,
                   help="decision threshold; the 0.5 default is arbitrary")
    p.add_argument("--out", help="CSV output (default: standard output)")
    _add_solver_flags(p)
    p.set_defaults(func=cmd_aggregate)

    p = sub.add_parser("evaluate", help="simultaneous-attack evaluation of a score file")
    p.add_argument("--scores", required=True)
    p.add_argument("--groups", help="group config JSON (default: shipped attack table)")
    p.add_argument("--format", choices=mio.FORMATS)
    p.add_argument("--out", help="write the JSON report here")
    p.add_argument("--roc-dump", help="directory for per-group ROC point files")
    p.add_argument("--baselines", action="store_true",
                   help="also evaluate each detector alone (one-hot weights)")
    p.add_argument("--target-tpr", type=float, default=0.95)
    _add_solver_flags(p)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("losses", help="evaluate attacker objective losses")
    p.add_argument("--loss", default="all", choices=["all"] + list(LOSSES))
    p.add_argument("--clean", help="clean (or, for ACE, true-label) distribution, e.g. '0.5,0.5'")
    p.add_argument("--adv", help="adversarial distribution")
    p.add_argument("--file", help='JSON file {"clean": [...], "adv": [...]}')
    p.set_defaults(func=cmd_losses)

    p = sub.add_parser("synth", help="generate a synthetic score file")
    p.add_argument("--seed", type=int, help="overrides the config seed")
    p.add_argument("--config", help="synthetic config JSON (default: shipped scenario)")
    p.add_argument("--out", required=True)
    p.add_argument("--format", choices=mio.FORMATS)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("groups-check", help="expand a group config and print its census")
    p.add_argument("--groups", help="group config JSON (default: shipped attack table)")
    p.add_argument("--verbose", action="store_true", help="list every member")
    p.add_argument("--json", action="store_true", help="machine-readable census")
    p.set_defaults(func=cmd_groups_check)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except MinimaxDetectError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
