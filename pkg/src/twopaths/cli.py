"""Command-line entry points.

Exit codes: 0 success, 1 parse/usage error, 2 internal invariant violation,
3 decider disagreement (with a persisted counterexample).
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

from . import harness
from .errors import (
    DivisibilityViolation,
    InvalidTerminals,
    MissingTerminals,
    OracleDisagreement,
    ParseError,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INTERNAL = 2
EXIT_DISAGREEMENT = 3


def _write_report(report: dict, json_path: str | None) -> None:
    text = harness.canonical_json(report)
    if json_path:
        Path(json_path).write_text(text)
    else:
        sys.stdout.write(text)


def _cmd_decide(args) -> int:
    g = harness.parse_graph_file(args.file)
    t0 = time.monotonic()
    decision, std = harness.decide_digraph(g, full_sweep=args.full_sweep)
    elapsed = time.monotonic() - t0
    report = {
        "format": "twopaths-report-v1",
        "command": "decide",
        "input": {"digest": harness.graph_digest(g)},
        "normalized": {"order": len(std.nodes), "size": decision.n},
        "decision": harness._decision_json(decision),
    }
    _write_report(report, args.json)
    print(f"class {decision.rank} ({decision.points_evaluated} points, {elapsed:.3f}s)", file=sys.stderr)
    return EXIT_OK


def _cmd_oracle(args) -> int:
    from .oracle import brute_force_class, maxflow_class, verify_certificate
    from .graph import normalize

    g = harness.parse_graph_file(args.file)
    norm = normalize(g)
    cert = brute_force_class(norm, budget=args.budget)
    flow = maxflow_class(norm)
    if not verify_certificate(norm, cert) or cert.kind != flow:
        raise OracleDisagreement(f"search={cert.kind} flow={flow}")
    report = {
        "format": "twopaths-report-v1",
        "command": "oracle",
        "input": {"digest": harness.graph_digest(g)},
        "classes": {"search": cert.kind, "linking_flow": flow},
        "certificate": harness._certificate_json(norm, cert),
    }
    _write_report(report, args.json)
    return EXIT_OK


def _cmd_compare(args) -> int:
    g = harness.parse_graph_file(args.file)
    report = harness.compare_digraph(
        g, full_sweep=args.full_sweep, search_budget=args.budget
    )
    report["command"] = "compare"
    _write_report(report, args.json)
    if report["disagreement"]:
        art_dir = Path(args.json).parent if args.json else Path.cwd()
        harness.persist_artifact(
            art_dir,
            f"counterexample_{report['input']['digest']}",
            g,
            {"kind": "decider_disagreement", "report": report},
        )
        return EXIT_DISAGREEMENT
    return EXIT_OK


def _cmd_fuzz(args) -> int:
    cfg = harness.CampaignConfig(
        seed=args.seed,
        count=args.count,
        max_nodes=args.max_nodes,
        max_edges=args.max_edges,
        exhaustive_up_to=args.exhaustive,
        exhaustive_max_edges=args.exhaustive_max_edges,
        full_sweep_max_branches=args.full_sweep_max_branches,
        search_budget=args.budget,
        artifact_dir=Path(args.json).parent if args.json else Path.cwd(),
    )
    t0 = time.monotonic()

    def progress(i):
        print(f"... {i} instances ({time.monotonic() - t0:.0f}s)", file=sys.stderr)

    report = harness.run_campaign(cfg, progress=progress if args.verbose else None)
    _write_report(report, args.json)
    print(
        f"{report['instances']} instances, tally {report['class_tally']}, "
        f"{len(report['disagreements'])} disagreements, "
        f"{time.monotonic() - t0:.1f}s",
        file=sys.stderr,
    )
    if report["disagreements"]:
        return EXIT_DISAGREEMENT
    return EXIT_OK


def _cmd_stats(args) -> int:
    g = harness.parse_graph_file(args.file)
    report = harness.stats_digraph(g, args.input, args.output)
    _write_report(report, args.json)
    return EXIT_OK


def _cmd_mason_check(args) -> int:
    g = harness.parse_graph_file(args.file)
    report = harness.mason_check_digraph(g, loop_cap=args.loop_cap)
    report["command"] = "mason-check"
    _write_report(report, args.json)
    if report["verdict"] == "mismatch":
        return EXIT_DISAGREEMENT
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="twopaths",
        description="Classify a two-input two-output digraph by its disjoint-path structure.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, budget=True):
        p.add_argument("--json", metavar="PATH", help="write the canonical report here")
        if budget:
            p.add_argument("--budget", type=int, default=200_000, help="search expansion budget")

    p = sub.add_parser("decide", help="rank-sweep decision only")
    p.add_argument("file")
    p.add_argument("--full-sweep", action="store_true", help="evaluate every point and record the rank table")
    common(p, budget=False)
    p.set_defaults(func=_cmd_decide)

    p = sub.add_parser("oracle", help="combinatorial deciders only")
    p.add_argument("file")
    common(p)
    p.set_defaults(func=_cmd_oracle)

    p = sub.add_parser("compare", help="run everything and flag disagreement")
    p.add_argument("file")
    p.add_argument("--full-sweep", action="store_true")
    common(p)
    p.set_defaults(func=_cmd_compare)

    p = sub.add_parser("fuzz", help="agreement campaign over generated instances")
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--count", type=int, default=1000)
    p.add_argument("--max-nodes", type=int, default=8)
    p.add_argument("--max-edges", type=int, default=10)
    p.add_argument("--exhaustive", type=int, metavar="NODES", help="exhaustive block up to this many nodes")
    p.add_argument("--exhaustive-max-edges", type=int, help="edge bound for the exhaustive block")
    p.add_argument("--full-sweep-max-branches", type=int, default=0,
                   help="full-sweep (bound-checking) instances with at most this many branches")
    p.add_argument("--verbose", action="store_true")
    common(p)
    p.set_defaults(func=_cmd_fuzz)

    p = sub.add_parser("stats", help="shortest-path series statistics for one entry")
    p.add_argument("file")
    p.add_argument("--input", type=int, default=1, choices=(1, 2))
    p.add_argument("--output", type=int, default=1, choices=(1, 2))
    common(p, budget=False)
    p.set_defaults(func=_cmd_stats)

    p = sub.add_parser("mason-check", help="gain-formula cross-identities")
    p.add_argument("file")
    p.add_argument("--loop-cap", type=int, default=10_000)
    common(p, budget=False)
    p.set_defaults(func=_cmd_mason_check)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, MissingTerminals, InvalidTerminals, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OracleDisagreement, DivisibilityViolation, AssertionError) as exc:
        print(f"internal invariant violation: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
