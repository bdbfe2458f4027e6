"""Command-line front end.

Exit codes: 0 route found / check passed, 1 unreachable / check failed,
2 input error, 3 improper network, 4 internal or oracle error.
"""

from __future__ import annotations

import argparse
import random
import sys
import time
from pathlib import Path

from .engine import ImproperNetworkError, SearchError, scan_trace, shortest_valid_walk
from .formats import (
    ParseError,
    load_network,
    serialize_maneuvers,
    serialize_network,
    serialize_result,
    serialize_trace,
)
from .maneuvers import INF, ManeuverSet, check_proper, format_value
from .network import InputError, RoadNetwork
from .oracle import (
    GenerationError,
    GenParams,
    OracleError,
    bellman_ford_all,
    build_state_graph,
    enumerate_all,
    is_strongly_connected,
    random_proper_network,
    within_enumeration_cap,
)

OK, FAILED, INPUT_ERROR, IMPROPER, INTERNAL = 0, 1, 2, 3, 4


def _load(args) -> RoadNetwork:
    return load_network(
        Path(args.network).read_text(encoding="utf-8"),
        Path(args.maneuvers).read_text(encoding="utf-8"),
    )


def _range(text: str) -> tuple[int, int]:
    lo, _, hi = text.partition("-")
    return int(lo), int(hi or lo)


def cmd_query(args) -> int:
    net = _load(args)
    g = net.graph
    s, t = g.vertex(args.source), g.vertex(args.target)
    skip = args.skip_properness_check
    if args.trace:
        rows, result = scan_trace(net, s, t, skip_properness_check=skip)
        sys.stderr.write(serialize_trace(net.automaton, rows))
    else:
        result = shortest_valid_walk(net, s, t, skip_properness_check=skip)
    sys.stdout.write(serialize_result(g, result))
    return OK if result.distance < INF else FAILED


def cmd_validate(args) -> int:
    report = check_proper(_load(args))
    print(report.format())
    return OK if report.proper else FAILED


def cmd_oracle(args) -> int:
    net = _load(args)
    g = net.graph
    if args.pairs == "all":
        pairs = [(s, t) for s in range(g.vertex_count) for t in range(g.vertex_count)]
    else:
        a, _, b = args.pairs.partition(",")
        pairs = [(g.vertex(a), g.vertex(b))]
    sg = build_state_graph(net)
    max_edges = args.max_edges if args.max_edges is not None else sg.state_count
    enumerate_ok = within_enumeration_cap(net)
    if not enumerate_ok:
        print("notice: instance exceeds the enumeration cap; comparing engine and Bellman-Ford only")
    sources = sorted({s for s, _ in pairs})
    bf = {s: bellman_ford_all(sg, s) for s in sources}
    en = {s: enumerate_all(net, s, max_edges) for s in sources} if enumerate_ok else {}
    agree = True
    for s, t in pairs:
        engine = shortest_valid_walk(net, s, t, skip_properness_check=args.skip_properness_check)
        values = [engine.distance, bf[s][t]]
        shown = f"engine={format_value(engine.distance)} bellman_ford={format_value(bf[s][t])}"
        if enumerate_ok:
            e = en[s].get(t, (INF, None))[0]
            values.append(e)
            shown += f" enumeration={format_value(e)}"
        same = all(v == values[0] or abs(v - values[0]) <= 1e-9 for v in values)
        agree &= same
        print(f"{g.names[s]} {g.names[t]} {shown} {'agree' if same else 'DISAGREE'}")
    return OK if agree else INTERNAL


def cmd_gen(args) -> int:
    params = GenParams(
        seed=args.seed,
        vertices=_range(args.vertices),
        edges=_range(args.edges),
        maneuvers=_range(args.maneuvers_count),
        maneuver_edges=_range(args.maneuver_edges),
    )
    log: list[str] = []
    net = random_proper_network(params, log)
    sys.stderr.write("\n".join(log) + "\n")
    Path(args.out + ".network").write_text(serialize_network(net.graph), encoding="utf-8")
    Path(args.out + ".maneuvers").write_text(
        serialize_maneuvers(net.graph, net.maneuvers), encoding="utf-8"
    )
    return OK


def cmd_connectivity(args) -> int:
    connected = is_strongly_connected(_load(args))
    print("strongly connected" if connected else "not strongly connected")
    return OK if connected else FAILED


def cmd_bench(args) -> int:
    print("size,c_M,pairs,relaxations,millis")
    for size in (int(x) for x in args.sizes.split(",")):
        params = GenParams(
            seed=args.seed,
            vertices=(size, size),
            edges=(2 * size, 3 * size),
            maneuvers=(0, 0) if args.no_maneuvers else (size // 4, size // 4),
            repair_budget=10 * size + 100,
        )
        net = random_proper_network(params)
        if args.no_maneuvers:
            net = RoadNetwork(net.graph, ManeuverSet())
        net.properness  # computed once, outside the timed queries
        rng = random.Random(args.seed)
        for _ in range(args.queries):
            s, t = rng.randrange(size), rng.randrange(size)
            start = time.perf_counter()
            r = shortest_valid_walk(net, s, t)
            millis = (time.perf_counter() - start) * 1000
            st = r.stats
            print(f"{size},{st.c_m},{st.pairs_scanned},{st.relaxations},{millis:.3f}")
    return OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="maneuver-route", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def files(p: argparse.ArgumentParser) -> None:
        p.add_argument("--network", required=True)
        p.add_argument("--maneuvers", required=True)

    p = sub.add_parser("query", help="shortest valid walk between two vertices")
    files(p)
    p.add_argument("--from", dest="source", required=True)
    p.add_argument("--to", dest="target", required=True)
    p.add_argument("--trace", action="store_true", help="write the scan trace to stderr")
    p.add_argument("--skip-properness-check", action="store_true")
    p.set_defaults(func=cmd_query)

    p = sub.add_parser("validate", help="check the properness rules")
    files(p)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("oracle", help="compare the engine against reference solvers")
    files(p)
    p.add_argument("--pairs", default="all", help="'all' or 'SOURCE,TARGET'")
    p.add_argument("--max-edges", type=int)
    p.add_argument("--skip-properness-check", action="store_true")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("gen", help="write a random proper network")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--vertices", default="3-12")
    p.add_argument("--edges", default="3-25")
    p.add_argument("--maneuvers-count", default="0-6")
    p.add_argument("--maneuver-edges", default="0-4")
    p.add_argument("--out", required=True, help="path prefix for .network/.maneuvers")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("connectivity", help="maneuver-aware strong connectivity")
    files(p)
    p.set_defaults(func=cmd_connectivity)

    p = sub.add_parser("bench", help="CSV of search statistics on random networks")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--sizes", default="50,100,200")
    p.add_argument("--queries", type=int, default=10)
    p.add_argument("--no-maneuvers", action="store_true")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ImproperNetworkError as exc:
        print(exc.report.format(), file=sys.stderr)
        return IMPROPER
    except ParseError as exc:
        for d in exc.diagnostics:
            print(f"error: {d}", file=sys.stderr)
        return INPUT_ERROR
    except (InputError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return INPUT_ERROR
    except (OracleError, SearchError, GenerationError) as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return INTERNAL


if __name__ == "__main__":
    sys.exit(main())
