"""
Chip-Firing CLI

Command-line front end for the library: stabilize, recurrence checks, the
sigma / gamma edge-scanning maps, oracle enumeration and counting, corpus
verification with replayable reports, and the small helpers (dualize,
canon, equivalent, epsilon, lemma4, order).

Results go to stdout, diagnostics to stderr. Exit codes: 0 success or
certified, 1 property violated / counterexample / anomaly, 2 usage or
input error.

Usage:
  python -m chipfiring.chip_cli <command> [args...]
"""

import argparse
import json
import sys

from chipfiring import settings
from chipfiring.bijection import (
    AnomalyAction,
    AnomalyError,
    AnomalyPolicy,
    RejectionMemory,
    gamma_order,
    gamma_traced,
    sigma_traced,
)
from chipfiring.dynamics import (
    FiringStrategy,
    NegativeConfigurationError,
    StrategyKind,
    check_configuration,
    dualize,
    epsilon,
    is_recurrent,
    lemma4_check,
    recurrent_representative,
    stabilize,
    stabilize_traced,
)
from chipfiring.helper_functions import (
    format_configuration,
    format_tree,
    load_configuration,
    load_graph,
    load_model,
    load_tree,
    log_status,
)
from chipfiring.oracle import count_spanning_trees, enumerate_recurrent, enumerate_spanning_trees, equivalent
from chipfiring.verifyScripts.build_corpus import MODEL_LABELS, build_corpus, default_graphs
from chipfiring.verifyScripts.run_report import outcome_exit_code, replay
from chipfiring.verifyScripts.VerifyCorpusMain import verify_corpus_main


def _policy_from_args(args, action=None):
    return AnomalyPolicy(
        AnomalyAction(action or args.policy),
        not args.no_pivot_exemption,
        RejectionMemory(args.memory),
    )


def _print_trace(trace, trace_format, stream=None):
    stream = stream or sys.stdout
    if trace_format == "json":
        print(json.dumps(trace.to_dict(), sort_keys=True), file=stream)
    else:
        for line in trace.lines():
            print(line, file=stream)


def _nonnegative(D):
    if not D.is_nonnegative():
        raise NegativeConfigurationError(f"Configuration has negative entries: {list(D.chips)}")
    return D


def cmd_stabilize(args):
    g = load_graph(args.graph)
    h = load_model(args.model, g)
    D = load_configuration(args.config)
    check_configuration(g, D)
    strategy = FiringStrategy(StrategyKind(args.strategy), args.seed)
    stable, counts, sequence = stabilize_traced(g, h, D, strategy)
    if args.trace:
        for step, fired in enumerate(sequence, start=1):
            print(f"fire {step} S={{{','.join(str(v) for v in sorted(fired))}}}")
    print(format_configuration(stable))
    print("firings " + " ".join(str(c) for c in counts))

    if args.check_confluence:
        log_status(f"Checking confluence over {args.check_confluence} seeded strategies")
        for k in range(args.check_confluence):
            other = FiringStrategy.random(args.seed + k)
            result = stabilize(g, h, D, other)
            if result != (stable, counts):
                print(f"❌ Confluence failure with {other.describe()}: "
                      f"{format_configuration(result[0])} firings {list(result[1])}", file=sys.stderr)
                return 1
        log_status("Every strategy agreed", "✅")
    return 0


def cmd_recurrent(args):
    g = load_graph(args.graph)
    h = load_model(args.model, g)
    D = load_configuration(args.config)
    check_configuration(g, D)
    _nonnegative(D)
    recurrent = is_recurrent(g, h, D)
    lemma4 = lemma4_check(g, h, D)
    print("recurrent" if recurrent else "not-recurrent")
    print(f"lemma4 {'agree' if lemma4 == recurrent else 'disagree'}")
    if lemma4 != recurrent:
        print("❌ Criticality and the single-vertex firing check disagree", file=sys.stderr)
        return 1
    return 0 if recurrent else 1


def cmd_to_tree(args):
    g = load_graph(args.graph)
    h = load_model(args.model, g)
    D = load_configuration(args.config)
    tree, trace = sigma_traced(g, h, D, _policy_from_args(args))
    if args.trace or tree is None:
        _print_trace(trace, args.trace_format)
    if tree is None:
        print(f"❌ Anomaly: {trace.anomaly}", file=sys.stderr)
        return 1
    print(format_tree(tree))
    return 0


def cmd_from_tree(args):
    g = load_graph(args.graph)
    h = load_model(args.model, g)
    T = load_tree(args.tree)
    D, trace = gamma_traced(g, h, T, _policy_from_args(args))
    if args.trace or D is None or trace.negative_vertices:
        _print_trace(trace, args.trace_format)
    if D is None:
        print(f"❌ Anomaly: {trace.anomaly}", file=sys.stderr)
        return 1
    print(format_configuration(D))
    if trace.negative_vertices:
        print(f"⚠️ Negative reconstructed values at {trace.negative_vertices}", file=sys.stderr)
        return 1
    return 0


def cmd_enumerate(args):
    g = load_graph(args.graph)
    if args.what == "trees":
        for T in enumerate_spanning_trees(g):
            print(format_tree(T))
        return 0
    if not args.model:
        raise ValueError("enumerate --what recurrents needs a MODEL argument")
    h = load_model(args.model, g)
    for D in enumerate_recurrent(g, h):
        print(format_configuration(D))
    return 0


def cmd_count(args):
    print(count_spanning_trees(load_graph(args.graph)))
    return 0


def cmd_verify(args):
    if args.graphs:
        graphs = {path: load_graph(path) for path in args.graphs}
    elif args.max_vertices:
        graphs = default_graphs(args.max_vertices, args.seed)
    else:
        raise ValueError("verify needs graph files or --max-vertices N")

    labels = [label.strip() for label in args.models.split(",") if label.strip()]
    for label in labels:
        if label not in MODEL_LABELS:
            raise ValueError(f"Unknown model {label!r}; choose from {', '.join(MODEL_LABELS)}")
    actions = [a.value for a in AnomalyAction] if args.policy == "all" else [args.policy]
    policies = [_policy_from_args(args, action) for action in actions]

    instances = build_corpus(graphs, labels, args.orderings, args.seed)
    _, code = verify_corpus_main(instances, policies, args.workers, args.format, args.save_artifacts)
    return code


def cmd_replay(args):
    matches, saved, fresh = replay(args.artifact)
    print(fresh.text_line())
    if not matches:
        print(f"❌ Replay differs from the saved report (saved outcome: {saved.outcome})", file=sys.stderr)
        return 1
    return outcome_exit_code(fresh.outcome)


def cmd_dualize(args):
    g = load_graph(args.graph)
    print(format_configuration(dualize(g, load_configuration(args.config))))
    return 0


def cmd_canon(args):
    g = load_graph(args.graph)
    h = load_model(args.model, g)
    print(format_configuration(recurrent_representative(g, h, load_configuration(args.config))))
    return 0


def cmd_equivalent(args):
    g = load_graph(args.graph)
    same, witness = equivalent(g, load_configuration(args.config1), load_configuration(args.config2))
    if not same:
        print("not-equivalent")
        return 1
    print("equivalent f= " + " ".join(str(x) for x in witness.firing_vector))
    return 0


def cmd_epsilon(args):
    g = load_graph(args.graph)
    print(format_configuration(epsilon(g, load_model(args.model, g))))
    return 0


def cmd_lemma4(args):
    g = load_graph(args.graph)
    h = load_model(args.model, g)
    D = load_configuration(args.config)
    check_configuration(g, D)
    result = lemma4_check(g, h, _nonnegative(D))
    print(f"lemma4 {'true' if result else 'false'}")
    return 0 if result else 1


def cmd_order(args):
    g = load_graph(args.graph)
    order, stages = gamma_order(g, load_tree(args.tree), RejectionMemory(args.memory))
    print("order " + " ".join(f"v{v}" for v in order.order))
    for index, stage in enumerate(stages):
        rejected = " ".join(f"e{e}" for e in stage.rejected) or "-"
        print(f"stage {index} X={{{','.join(str(v) for v in stage.burnt)}}} rejected {rejected} "
              f"tree=e{stage.tree_edge} next=v{stage.vertex}")
    return 0


def _add_policy_flags(parser, allow_all=False):
    choices = [a.value for a in AnomalyAction] + (["all"] if allow_all else [])
    parser.add_argument("--policy", choices=choices, default="halt",
                        help="what to do when chips exceed the threshold" + (" ('all' runs each)" if allow_all else ""))
    parser.add_argument("--no-pivot-exemption", action="store_true",
                        help="debt-test the pivot vertex inside the burning fixed point")
    parser.add_argument("--memory", choices=[m.value for m in RejectionMemory], default="persistent",
                        help="keep rejected edges for the whole run, or reset them on every acceptance")


def _add_trace_flags(parser):
    parser.add_argument("--trace", action="store_true", help="print every scan decision")
    parser.add_argument("--trace-format", choices=["text", "json"], default="text")


def build_parser():
    parser = argparse.ArgumentParser(prog="python -m chipfiring.chip_cli",
                                     description="Hereditary chip-firing toolkit.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("stabilize", help="stabilize a configuration")
    p.add_argument("graph")
    p.add_argument("model", help="asm, cfm or a model file")
    p.add_argument("config")
    p.add_argument("--strategy", choices=[k.value for k in StrategyKind], default=StrategyKind.FIRST_READY_MAXIMAL.value)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--check-confluence", type=int, default=0, metavar="K",
                   help="also run K seeded random strategies and compare")
    p.add_argument("--trace", action="store_true", help="print the fired sets")
    p.set_defaults(func=cmd_stabilize)

    p = sub.add_parser("recurrent", help="recurrence verdict with the single-vertex cross-check")
    p.add_argument("graph")
    p.add_argument("model")
    p.add_argument("config")
    p.set_defaults(func=cmd_recurrent)

    p = sub.add_parser("to-tree", help="sigma: recurrent configuration to spanning tree")
    p.add_argument("graph")
    p.add_argument("model")
    p.add_argument("config")
    _add_policy_flags(p)
    _add_trace_flags(p)
    p.set_defaults(func=cmd_to_tree)

    p = sub.add_parser("from-tree", help="gamma: spanning tree to configuration")
    p.add_argument("graph")
    p.add_argument("model")
    p.add_argument("tree")
    _add_policy_flags(p)
    _add_trace_flags(p)
    p.set_defaults(func=cmd_from_tree)

    p = sub.add_parser("enumerate", help="list spanning trees or recurrent configurations")
    p.add_argument("graph")
    p.add_argument("model", nargs="?")
    p.add_argument("--what", choices=["trees", "recurrents"], default="trees")
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("count", help="number of spanning trees (= equivalence classes)")
    p.add_argument("graph")
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("verify", help="check the sigma/gamma bijection over a corpus")
    p.add_argument("graphs", nargs="*", help="graph files (default: generated corpus)")
    p.add_argument("--max-vertices", type=int, default=0)
    p.add_argument("--models", default="asm", help=f"comma-separated subset of {','.join(MODEL_LABELS)}")
    p.add_argument("--orderings", type=int, default=0, metavar="K", help="seeded edge permutations per instance")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.add_argument("--workers", type=int, default=settings.VERIFY_WORKERS)
    p.add_argument("--save-artifacts", nargs="?", const=settings.VERIFY_ARTIFACT_DIR, default=None, metavar="DIR")
    _add_policy_flags(p, allow_all=True)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("replay", help="re-run a saved report")
    p.add_argument("artifact")
    p.set_defaults(func=cmd_replay)

    p = sub.add_parser("dualize", help="K+ minus the configuration")
    p.add_argument("graph")
    p.add_argument("config")
    p.set_defaults(func=cmd_dualize)

    p = sub.add_parser("canon", help="recurrent representative of the equivalence class")
    p.add_argument("graph")
    p.add_argument("model")
    p.add_argument("config")
    p.set_defaults(func=cmd_canon)

    p = sub.add_parser("equivalent", help="chip-firing equivalence with a firing-vector witness")
    p.add_argument("graph")
    p.add_argument("config1")
    p.add_argument("config2")
    p.set_defaults(func=cmd_equivalent)

    p = sub.add_parser("epsilon", help="deg minus stabilize(deg)")
    p.add_argument("graph")
    p.add_argument("model")
    p.set_defaults(func=cmd_epsilon)

    p = sub.add_parser("lemma4", help="single-vertex firing recurrence check")
    p.add_argument("graph")
    p.add_argument("model")
    p.add_argument("config")
    p.set_defaults(func=cmd_lemma4)

    p = sub.add_parser("order", help="vertex order and rejected edges of a spanning tree scan")
    p.add_argument("graph")
    p.add_argument("tree")
    p.add_argument("--memory", choices=[m.value for m in RejectionMemory], default="persistent")
    p.set_defaults(func=cmd_order)

    return parser


def run_command(argv):
    """Parse argv, run the command and return its exit code."""
    try:
        # parser defaults come from .env
        parser = build_parser()
    except ValueError as e:
        print(f"❌ {e}", file=sys.stderr)
        return 2
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code else 0

    try:
        return args.func(args)
    except AnomalyError as e:
        _print_trace(e.trace, getattr(args, "trace_format", "text"))
        print(f"❌ {e}", file=sys.stderr)
        return 1
    except (ValueError, OSError) as e:
        print(f"❌ {e}", file=sys.stderr)
        return 2
    except RuntimeError as e:
        print(f"❌ Error: {e}", file=sys.stderr)
        return 1


def main():
    sys.exit(run_command(sys.argv[1:]))


if __name__ == "__main__":
    main()
