"""Command line interface: ``simorder {order,score,render,generate,bench}``.

Exit codes: 0 success, 1 usage error, 2 bad input data, 3 internal
invariant violation.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from pathlib import Path

from . import __version__
from .formats import (FORMAT_VERSION, DataError, dump_collection, load_collection, load_ordering,
                      render_matrix)
from .graph import GraphCollection, build_union
from .harness import (ALL_ALGORITHMS, MAIN_ALGORITHMS, PATTERN_KINDS, ComplementarySpec, PatternSpec,
                      generate_complementary, generate_pattern, run_experiment, synthetic_suite,
                      verify_report)
from .metrics import (all_measures, bandwidth, collection_crossings, crossings, linear_arrangement,
                      morans_i, profile, weighted_crossings)
from .orderers import InvariantError, OrdererConfig, compute_ordering

log = logging.getLogger("simorder")

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_INTERNAL = 0, 1, 2, 3

_GRAPH_MEASURES = {
    "moran": morans_i,
    "bandwidth": bandwidth,
    "profile": profile,
    "la": linear_arrangement,
    "crossings": crossings,
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _write(out, payload, binary=False):
    if out in (None, "-"):
        if binary:
            sys.stdout.buffer.write(payload)
            sys.stdout.buffer.flush()
        else:
            sys.stdout.write(payload)
    else:
        Path(out).write_bytes(payload) if binary else Path(out).write_text(payload)


def _pick_graphs(coll: GraphCollection, index):
    if index is None:
        return list(enumerate(coll.graphs))
    if not -coll.k <= index < coll.k:
        raise DataError(f"graph index {index} out of range (k={coll.k})")
    return [(index % coll.k, coll[index])]


def cmd_order(args) -> int:
    coll = load_collection(args.input)
    base = {}
    if args.config:
        base = json.loads(Path(args.config).read_text())
    overrides = {
        "algorithm": args.algo, "approach": args.approach, "metric": args.metric,
        "seed": args.seed, "barycenter_fixed_iters": args.fixed_iters,
        "barycenter_max_iters": args.max_iters, "two_opt_threshold": args.threshold,
        "nn_start": args.nn_start,
    }
    base.update({k: v for k, v in overrides.items() if v is not None})
    if args.nn_best_of_all:
        base["nn_best_of_all"] = True
    base.pop("name", None)
    try:
        config = OrdererConfig(**base)
    except (TypeError, ValueError) as exc:
        raise UsageError(str(exc)) from exc
    if config.algorithm == "nn2opt" and coll.k > 1 and args.graph is None:
        raise UsageError("NN-2OPT orders a single graph; choose one with --graph")
    result = compute_ordering(coll, config, graph_index=args.graph)
    doc = result.to_dict()
    doc["labels"] = [coll.labels[v] for v in result.ordering.order]
    _write(args.out, json.dumps(doc, indent=1) + "\n")
    return EXIT_OK


def cmd_score(args) -> int:
    coll = load_collection(args.input)
    ordering = load_ordering(args.ordering, coll.n)
    m = args.measure
    if m == "weighted_crossings":
        print(weighted_crossings(build_union(coll), ordering))
        return EXIT_OK
    if m == "collection_crossings":
        print(collection_crossings(coll, ordering))
        return EXIT_OK
    picked = _pick_graphs(coll, args.graph)
    for gi, g in picked:
        if m == "all":
            vals = all_measures(g, ordering)
            print(json.dumps({"graph": gi, "name": g.name, **vals}))
            continue
        value = _GRAPH_MEASURES[m](g, ordering)
        text = repr(value) if isinstance(value, float) else str(value)
        print(text if len(picked) == 1 else f"{gi}\t{g.name}\t{text}")
    return EXIT_OK


def cmd_render(args) -> int:
    coll = load_collection(args.input)
    ordering = load_ordering(args.ordering, coll.n)
    (gi, g), = _pick_graphs(coll, args.graph)
    try:
        payload = render_matrix(g, ordering, args.format, args.scale)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    _write(args.out, payload, binary=True)
    return EXIT_OK


def _parse_ints(text):
    return tuple(int(x) for x in text.split(",")) if text else None


def cmd_generate(args) -> int:
    if args.spec:
        doc = json.loads(Path(args.spec).read_text())
        kind = doc.get("kind")
    else:
        doc = None
        kind = args.kind
    if kind is None:
        raise UsageError("generate needs --kind or --spec")
    try:
        if kind == "complementary":
            if doc is None:
                doc = {"sizes": _parse_ints(args.sizes) or (8, 8), "p": args.p or 0.0,
                       "seed": args.seed, "shuffle": not args.no_shuffle}
            coll = generate_complementary(ComplementarySpec.from_dict(doc))
        else:
            if doc is None:
                if args.n is None:
                    raise UsageError("--n is required for pattern kinds")
                doc = {"kind": kind, "n": args.n, "seed": args.seed,
                       "blocks": _parse_ints(args.blocks), "centers": _parse_ints(args.centers),
                       "offsets": _parse_ints(args.offsets)}
                if args.width is not None:
                    doc["width"] = args.width
                if args.p is not None:
                    doc["p"] = args.p
                if args.no_loops:
                    doc["loops"] = False
            coll = GraphCollection([generate_pattern(PatternSpec.from_dict(doc))])
    except (TypeError, ValueError) as exc:
        if isinstance(exc, UsageError):
            raise
        raise DataError(str(exc)) from exc
    _write(args.out, dump_collection(coll) + "\n")
    return EXIT_OK


def cmd_bench(args) -> int:
    names = args.algos.split(",") if args.algos else list(
        ALL_ALGORITHMS if args.all_algos else MAIN_ALGORITHMS)
    try:
        configs = [OrdererConfig.from_name(nm) for nm in names]
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    if args.inputs:
        suite = {Path(p).stem: load_collection(p) for p in args.inputs}
    else:
        suite = synthetic_suite(args.seed)
    t0 = time.perf_counter()
    reports = []
    for name, coll in suite.items():
        report = run_experiment(coll, configs, dataset=name)
        problems = verify_report(report, coll)
        if problems:
            raise InvariantError("report does not re-score: " + "; ".join(problems[:3]))
        reports.append(report)
    elapsed = time.perf_counter() - t0
    csv_parts = [r.to_csv() for r in reports]
    csv_text = csv_parts[0] + "".join(p.split("\n", 1)[1] for p in csv_parts[1:])
    if args.out_csv:
        Path(args.out_csv).write_text(csv_text)
    if args.out_json:
        doc = {"version": __version__, "reports": [r.to_dict() for r in reports]}
        Path(args.out_json).write_text(json.dumps(doc, indent=1) + "\n")
    print(f"{'dataset':<18}{'algorithm':<16}{'I min':>8}{'I med':>8}{'I mean':>8}"
          f"{'LA min':>8}{'LA med':>8}{'LA mean':>8}")
    for r in reports:
        for alg in r.algorithms:
            mi, la = r.summary[alg]["morans_i"], r.summary[alg]["normalized_la"]
            print(f"{r.dataset:<18}{alg:<16}{mi['min']:8.3f}{mi['median']:8.3f}{mi['mean']:8.3f}"
                  f"{la['min']:8.3f}{la['median']:8.3f}{la['mean']:8.3f}")
    print(f"# {len(reports)} collections x {len(configs)} algorithms in {elapsed:.2f}s")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="simorder", description="Simultaneous matrix orderings for graph collections.")
    p.add_argument("--version", action="version",
                   version=f"simorder {__version__} (collection format {FORMAT_VERSION})")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    o = sub.add_parser("order", help="compute one ordering for every graph of a collection")
    o.add_argument("input")
    o.add_argument("--algo", choices=["leaf", "bary", "nn2opt"])
    o.add_argument("--approach", choices=["union", "aware"])
    o.add_argument("--metric", choices=["l2", "l2sq", "deltai", "deltaisq"])
    o.add_argument("--seed", type=int)
    o.add_argument("--config", help="JSON file with OrdererConfig fields (flags override it)")
    o.add_argument("--graph", type=int, help="graph index (NN-2OPT orders a single graph)")
    o.add_argument("--fixed-iters", type=int)
    o.add_argument("--max-iters", type=int)
    o.add_argument("--threshold", type=float)
    o.add_argument("--nn-start", type=int)
    o.add_argument("--nn-best-of-all", action="store_true")
    o.add_argument("--out")
    o.set_defaults(func=cmd_order)

    s = sub.add_parser("score", help="quality measures of a collection under an ordering")
    s.add_argument("input")
    s.add_argument("ordering")
    s.add_argument("--measure", default="all",
                   choices=["all", *_GRAPH_MEASURES, "weighted_crossings", "collection_crossings"])
    s.add_argument("--graph", type=int)
    s.set_defaults(func=cmd_score)

    r = sub.add_parser("render", help="draw one ordered adjacency matrix")
    r.add_argument("input")
    r.add_argument("ordering")
    r.add_argument("--format", default="pgm", choices=["pgm", "svg"])
    r.add_argument("--scale", type=int, default=1)
    r.add_argument("--graph", type=int, default=0)
    r.add_argument("--out")
    r.set_defaults(func=cmd_render)

    g = sub.add_parser("generate", help="write a synthetic collection")
    g.add_argument("--kind", choices=[*PATTERN_KINDS, "complementary"])
    g.add_argument("--spec", help="JSON generator spec")
    g.add_argument("--n", type=int)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--p", type=float)
    g.add_argument("--width", type=int)
    g.add_argument("--blocks", help="comma-separated block sizes")
    g.add_argument("--centers", help="comma-separated star centres")
    g.add_argument("--offsets", help="comma-separated band offsets")
    g.add_argument("--sizes", help="comma-separated clique sizes (complementary)")
    g.add_argument("--no-loops", action="store_true")
    g.add_argument("--no-shuffle", action="store_true")
    g.add_argument("--out")
    g.set_defaults(func=cmd_generate)

    b = sub.add_parser("bench", help="run the algorithm comparison and write CSV/JSON reports")
    b.add_argument("inputs", nargs="*", help="collection files (default: seeded synthetic suite)")
    b.add_argument("--algos", help="comma-separated names, e.g. U-LO-l2,C-LO-deltai,C-BC")
    b.add_argument("--all-algos", action="store_true", help="all ten leaf-order/barycenter variants")
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--out-csv")
    b.add_argument("--out-json")
    b.set_defaults(func=cmd_bench)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"simorder: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InvariantError as exc:
        print(f"simorder: internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except (DataError, ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"simorder: error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
