"""``congest-lb``: build, verify, solve, simulate and reduce from the command line.

Every run prints a ``config:`` line first; re-running with the same flags
reproduces the output exactly.  All randomness derives from ``--seed``.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from itertools import combinations

from .codegadget import CodeError, codebook, hamming_distance, load_table, make_params, min_pairwise_distance
from .construct import (
    GraphError,
    build_linear_fixed,
    build_linear_instance,
    build_quadratic_fixed,
    build_quadratic_instance,
    cut_size,
    expand_unweighted,
    to_dot,
    to_json,
    validate_family_condition1,
)
from .instances import (
    DisjointnessInstance,
    InstanceError,
    make_intersecting,
    make_pairwise_disjoint,
    verify_promise,
)
from .mwis import GuardExceeded
from .oracle import (
    CheckRecord,
    Report,
    mwis_exact,
    verify_linear_claims,
    verify_properties,
    verify_quadratic_claims,
)
from .simulate import (
    SimulationError,
    default_bits,
    flood_max_algorithm,
    gather_and_solve_algorithm,
    lower_bound_report,
    multiparty_simulate,
    reduction_protocol,
    run_congest,
    family_beta,
)

SUITES = ("code", "properties", "linear-claims", "quadratic-claims", "family")
DEFAULT_SEED = 0


def _params(args):
    backend = args.backend
    if backend == "auto":
        backend = "explicit_table" if args.alpha == 1 or args.table else "reed_solomon"
    table = load_table(args.table) if args.table else None
    return make_params(args.ell, args.alpha, backend=backend, allow_tiny=args.allow_tiny, table=table)


def _length(params, family: str) -> int:
    return params.k * params.k if family == "quadratic" else params.k


def _random_instance(params, t: int, family: str, promise: str, rng: random.Random, density=None):
    length = _length(params, family)
    k = params.k if family == "quadratic" else None
    fill = rng.random() if density is None else density
    sub = rng.randrange(2**32)
    if promise == "intersect":
        common = rng.randrange(1, length + 1)
        return make_intersecting(t, length, common, fill, seed=sub, k=k)
    return make_pairwise_disjoint(t, length, fill, seed=sub, k=k)


def _load_instance(path: str) -> DisjointnessInstance:
    with open(path) as fh:
        return DisjointnessInstance.from_json(json.load(fh))


def _instance(args, params, rng):
    if args.instance:
        return _load_instance(args.instance)
    if args.promise is None:
        return None
    return _random_instance(params, args.t, args.family, args.promise, rng, args.density)


def _graph(args, params, inst):
    if inst is None:
        build = build_quadratic_fixed if args.family == "quadratic" else build_linear_fixed
        return build(params, args.t)
    build = build_quadratic_instance if args.family == "quadratic" else build_linear_instance
    return build(params, args.t, inst)


def _emit(args, text: str) -> None:
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
        print(f"wrote {args.out}")
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _config_line(args) -> str:
    cfg = {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "family_given")}
    return "config: " + json.dumps(cfg, sort_keys=True)


# -- commands --------------------------------------------------------------------


def cmd_build(args) -> int:
    params = _params(args)
    rng = random.Random(args.seed)
    inst = _instance(args, params, rng)
    g = _graph(args, params, inst)
    if args.unweighted:
        g = expand_unweighted(g)
    print(f"nodes={g.n} edges={g.num_edges} cut={cut_size(g)} variant={g.variant}")
    if args.format == "dot":
        _emit(args, to_dot(g))
    elif args.format == "json":
        data = to_json(g)
        data["seed"] = args.seed
        _emit(args, json.dumps(data, indent=1))
    elif args.out:
        _emit(args, "\n".join(v.label() for v in g.nodes))
    return 0


def _code_report(params) -> Report:
    report = Report()
    desc = params.describe()
    report.add(CheckRecord("code_distance", desc, None, params.ell, min_pairwise_distance(params), ">="))
    words = codebook(params)
    agree = max((params.m_len - hamming_distance(a, b) for a, b in combinations(words, 2)), default=0)
    report.add(CheckRecord("code_agreement", desc, None, params.alpha, agree, "<="))
    return report


def _family_report(params, t: int, samples: int, rng: random.Random) -> Report:
    report = Report()
    for family, builder in (("linear", build_linear_instance), ("quadratic", build_quadratic_instance)):
        length = _length(params, family)
        pairs = []
        for player in range(1, t + 1):
            for _ in range(samples):
                x = _random_instance(params, t, family, rng.choice(("intersect", "disjoint")), rng)
                flip = rng.randrange(1 << length)
                pairs.append((x, x.with_string(player, flip)))
        res = validate_family_condition1(builder, t, params, pairs)
        report.add(
            CheckRecord(
                "family_condition1",
                {**params.describe(), "t": t, "family": family, "pairs": res.pairs_checked},
                None,
                0,
                len(res.violations),
                "==",
                {"violations": res.violations[:3]},
            )
        )
    return report


def _claim_instances(params, t: int, family: str, samples: int, rng: random.Random):
    out = []
    if t == 1:
        for _ in range(samples):
            out.append(_random_instance(params, 1, family, "disjoint", rng))
        return out
    for promise in ("intersect", "disjoint"):
        for _ in range(samples):
            out.append(_random_instance(params, t, family, promise, rng))
    return out


def cmd_verify(args) -> int:
    params = _params(args)
    rng = random.Random(args.seed)
    if args.suite == "code":
        report = _code_report(params)
    elif args.suite == "properties":
        report = verify_properties(build_linear_fixed(params, args.t), direct_cross_check=True)
    elif args.suite == "linear-claims":
        insts = [_load_instance(args.instance)] if args.instance else _claim_instances(
            params, args.t, "linear", args.samples, rng
        )
        tuples = []
        if 1 < args.t <= params.k:
            seen = set()
            for _ in range(args.samples * 4):
                ms = tuple(rng.sample(range(1, params.k + 1), args.t))
                if ms not in seen:
                    seen.add(ms)
                    tuples.append(ms)
                if len(tuples) == args.samples:
                    break
        report = verify_linear_claims(params, args.t, insts, tuples)
    elif args.suite == "quadratic-claims":
        insts = [_load_instance(args.instance)] if args.instance else _claim_instances(
            params, args.t, "quadratic", args.samples, rng
        )
        report = verify_quadratic_claims(params, args.t, insts, seed=args.seed)
    else:
        report = _family_report(params, args.t, args.samples, rng)
    data = report.to_json()
    data["config"] = {"suite": args.suite, "seed": args.seed, **params.describe(), "t": args.t}
    if args.format == "json":
        _emit(args, json.dumps(data, indent=1))
    else:
        _emit(args, report.summary() or "no checks run")
    print("OK" if report.passed else f"FAILED: {len(report.failures)} check(s)")
    return 0 if report.passed else 1


def cmd_solve(args) -> int:
    params = _params(args)
    rng = random.Random(args.seed)
    inst = _instance(args, params, rng)
    g = _graph(args, params, inst)
    if args.unweighted:
        g = expand_unweighted(g)
    res = mwis_exact(g)
    out = {
        "weight": res.weight,
        "witness": [v.label() for v in res.witness],
        "explored": res.explored,
        "n": g.n,
        "instance": inst.to_json() if inst else None,
        "promise": str(verify_promise(inst)) if inst is not None and inst.t > 1 else None,
        "seed": args.seed,
    }
    if args.format == "json":
        _emit(args, json.dumps(out, indent=1))
    else:
        _emit(args, f"mwis={res.weight} witness={' '.join(out['witness'])}")
    return 0


def cmd_simulate(args) -> int:
    params = _params(args)
    rng = random.Random(args.seed)
    inst = _instance(args, params, rng)
    g = _graph(args, params, inst)
    bits = args.bits_per_message or default_bits(g.n)
    if args.algorithm == "flood-max":
        alg = flood_max_algorithm(args.rounds or 4)
    else:
        beta = family_beta(params, args.t, args.family)
        alg = gather_and_solve_algorithm(beta, rounds=args.rounds or 100_000)
    tr = (multiparty_simulate if args.players else run_congest)(g, alg, bits, seed=args.seed)
    summary = tr.summary()
    summary["algorithm"] = alg.name
    summary["seed"] = args.seed
    if args.out:
        _emit(args, tr.to_jsonl())
    print(json.dumps(summary))
    return 0 if tr.completed else 1


def _report_table(rows) -> str:
    keys = ["family", "t", "n", "len", "t_log_t", "cut_measured", "cut_stated", "cut_discrepancy", "log_V", "ratio",
            "ratio_stated_cut"]
    lines = ["  ".join(f"{k:>16}" for k in keys)]
    for r in rows:
        cells = []
        for k in keys:
            v = r[k]
            cells.append(f"{v:>16.6g}" if isinstance(v, float) else f"{v!s:>16}")
        lines.append("  ".join(cells))
    return "\n".join(lines)


def cmd_reduce(args) -> int:
    params = _params(args)
    rng = random.Random(args.seed)
    g0 = _graph(args, params, None)
    report = lower_bound_report(params, args.t, g0, args.bits_per_message)
    if args.report_only:
        print(_report_table([report]))
        return 0
    results = []
    for trial in range(args.trials):
        if args.instance:
            inst = _load_instance(args.instance)
        else:
            promise = args.promise or rng.choice(("intersect", "disjoint"))
            inst = _random_instance(params, args.t, args.family, promise, rng, args.density)
        res = reduction_protocol(params, args.t, inst, args.family, bits=args.bits_per_message, seed=args.seed)
        row = {"trial": trial + 1, "instance": inst.digest(), **res.to_json()}
        results.append(row)
        print(
            f"trial {trial + 1}: verdict={res.verdict} truth={res.ground_truth} rounds={res.rounds} "
            f"blackboard_bits={res.blackboard_bits} {'ok' if res.correct else 'WRONG'}"
        )
    correct = sum(r["correct"] for r in results)
    print(f"{correct}/{len(results)} correct")
    print(_report_table([report]))
    if args.out:
        _emit(args, json.dumps({"trials": results, "lower_bound": report, "seed": args.seed}, indent=1))
    return 0 if correct == len(results) else 1


def cmd_report(args) -> int:
    params = _params(args)
    rows = []
    families = [args.family] if args.family_given else ["linear", "quadratic"]
    for family in families:
        build = build_quadratic_fixed if family == "quadratic" else build_linear_fixed
        rows.append(lower_bound_report(params, args.t, build(params, args.t), args.bits_per_message))
    if args.format == "json":
        _emit(args, json.dumps(rows, indent=1))
    else:
        _emit(args, _report_table(rows))
    return 0


# -- parser ----------------------------------------------------------------------


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--family", choices=("linear", "quadratic"), default=None)
    p.add_argument("--ell", type=int, default=2)
    p.add_argument("--alpha", type=int, default=1)
    p.add_argument("--t", type=int, default=2, help="number of players")
    p.add_argument(
        "--backend", choices=("auto", "reed_solomon", "explicit_table"), default="auto",
        help="auto: cyclic table when alpha = 1, Reed-Solomon otherwise",
    )
    p.add_argument("--table", help="JSON array-of-arrays code table (implies explicit_table)")
    p.add_argument("--allow-tiny", action="store_true", help="permit ell <= alpha")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--promise", choices=("intersect", "disjoint"), default=None)
    p.add_argument("--density", type=float, default=None, help="fill density; random per instance if omitted")
    p.add_argument("--instance", help="instance JSON file instead of a generated one")
    p.add_argument("--bits-per-message", type=int, default=None, help="B; default ceil(log2 n)")
    p.add_argument("--out", help="output file (default stdout)")
    p.add_argument("--format", choices=("json", "dot", "text"), default="text")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="congest-lb", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="write a lower-bound graph as JSON or DOT")
    _common(p)
    p.add_argument("--unweighted", action="store_true", help="replace each node of weight w by w copies")
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("verify", help="run a verification suite; exit 0 iff every check passes")
    _common(p)
    p.add_argument("--suite", choices=SUITES, default="properties")
    p.add_argument("--samples", type=int, default=10)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("solve", help="exact MWIS of a graph")
    _common(p)
    p.add_argument("--unweighted", action="store_true")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("simulate", help="run a CONGEST algorithm and dump its transcript")
    _common(p)
    p.add_argument("--algorithm", choices=("gather-and-solve", "flood-max"), default="gather-and-solve")
    p.add_argument("--rounds", type=int, default=None, help="round budget")
    p.add_argument("--players", action="store_true", help="use the blackboard simulation")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("reduce", help="decide promise disjointness through the reduction")
    _common(p)
    p.add_argument("--trials", type=int, default=1)
    p.add_argument("--report-only", action="store_true", help="only print the round lower-bound table")
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("report", help="round lower-bound quantities for the constructions")
    _common(p)
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    args.family_given = args.family is not None
    if args.family is None:
        args.family = "linear"
    if args.t < 1:
        parser.error("--t must be positive")
    print(_config_line(args))
    try:
        return args.func(args)
    except (CodeError, GraphError, InstanceError, SimulationError, GuardExceeded, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
