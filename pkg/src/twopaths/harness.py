"""File format, comparison runs, fuzz campaigns and reports.

Reports are canonical JSON: sorted keys, compact separators, and every
integer that can outgrow 2**53 rendered as a decimal string so downstream
consumers never lose precision.  Identical inputs and flags must produce
byte-identical report files; anything nondeterministic (timing) stays out
of them.
"""

from __future__ import annotations

import hashlib
import itertools
import json
import random
import re
from dataclasses import dataclass, field
from pathlib import Path

from .errors import MissingTerminals, OracleDisagreement, ParseError, SearchBudgetExceeded
from .graph import RawDigraph, build_system, digraph, normalize, split_nodes
from .oracle import (
    DEFAULT_SEARCH_BUDGET,
    ClassCertificate,
    brute_force_class,
    maxflow_class,
    verify_certificate,
)
from .points import Decision, decide

IDENT_RE = re.compile(r"^[A-Za-z0-9_]+$")

# Test-only hook: a callable (graph, classes dict) -> classes dict that lets
# the suite exercise the disagreement machinery without a real bug.
_inject_fault = None


# ---------------------------------------------------------------------------
# graph text format


def parse_graph(text: str, name: str = "<string>") -> RawDigraph:
    """Line format: `edge A B`, `inputs U1 U2`, `outputs Y1 Y2`, `#` comments.

    Duplicate edge lines collapse.  Identifiers are [A-Za-z0-9_]+.
    """
    edges: list[tuple[str, str]] = []
    seen_edges: set[tuple[str, str]] = set()
    inputs = outputs = None
    for line_no, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        directive, args = parts[0], parts[1:]
        if directive == "edge":
            if len(args) != 2:
                raise ParseError(line_no, f"edge takes 2 identifiers, got {len(args)}")
            for ident in args:
                if not IDENT_RE.match(ident):
                    raise ParseError(line_no, f"bad identifier {ident!r}")
            e = (args[0], args[1])
            if e not in seen_edges:
                seen_edges.add(e)
                edges.append(e)
        elif directive in ("inputs", "outputs"):
            if len(args) != 2:
                raise ParseError(line_no, f"{directive} takes 2 identifiers, got {len(args)}")
            for ident in args:
                if not IDENT_RE.match(ident):
                    raise ParseError(line_no, f"bad identifier {ident!r}")
            if directive == "inputs":
                if inputs is not None:
                    raise ParseError(line_no, "duplicate inputs line")
                inputs = (args[0], args[1])
            else:
                if outputs is not None:
                    raise ParseError(line_no, "duplicate outputs line")
                outputs = (args[0], args[1])
        else:
            raise ParseError(line_no, f"unknown directive {directive!r}")
    if inputs is None or outputs is None:
        raise MissingTerminals(f"{name}: missing inputs/outputs line")
    return digraph(edges, inputs, outputs)


def parse_graph_file(path) -> RawDigraph:
    p = Path(path)
    return parse_graph(p.read_text(), name=str(p))


def graph_to_text(g: RawDigraph) -> str:
    lines = [f"edge {a} {b}" for a, b in sorted(set(g.edges))]
    lines.append(f"inputs {g.inputs[0]} {g.inputs[1]}")
    lines.append(f"outputs {g.outputs[0]} {g.outputs[1]}")
    return "\n".join(lines) + "\n"


def graph_digest(g: RawDigraph) -> str:
    return hashlib.sha256(graph_to_text(g).encode()).hexdigest()[:16]


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n"


def _big(x: int) -> str:
    return str(x)


# ---------------------------------------------------------------------------
# single-graph runs


def _certificate_json(g: RawDigraph, cert: ClassCertificate) -> dict:
    out: dict = {"class": cert.kind}
    if cert.kind == 2:
        out["pairing"] = list(cert.pairing)
        out["paths"] = [list(p) for p in cert.paths]
    elif cert.kind == 1:
        out["common_node"] = cert.common_node
        out["common_node_original"] = g.original_node(cert.common_node)
    return out


def _decision_json(decision: Decision) -> dict:
    out: dict = {
        "class": decision.rank,
        "branches": decision.n,
        "points_evaluated": decision.points_evaluated,
        "structural_zero": decision.structural_zero,
        "witness": decision.witness.label if decision.witness else None,
    }
    if decision.bounds is not None:
        out["bounds"] = decision.bounds.to_json()
    if decision.table is not None:
        out["rank_table"] = [
            {
                "point": [_big(v) for v in pr.point],
                "rank": pr.rank,
                "delta": None if pr.delta is None else [_big(c) for c in pr.delta.coeffs],
            }
            for pr in decision.table
        ]
    return out


def decide_digraph(g: RawDigraph, full_sweep: bool = False):
    """Normalize, split, build and sweep; returns (Decision, normalized graph)."""
    std = split_nodes(normalize(g))
    _, structure = build_system(std)
    mode = "full-sweep" if full_sweep else "early-exit"
    return decide(structure, mode), std


def compare_digraph(
    g: RawDigraph,
    full_sweep: bool = False,
    search_budget: int = DEFAULT_SEARCH_BUDGET,
    full_sweep_max_branches: int = 0,
) -> dict:
    """Run the rank sweep and both combinatorial deciders; flag disagreement.

    The two oracles must agree with each other (their disagreement raises
    OracleDisagreement: a bug, not a finding).  Disagreement between the
    sweep and the oracles is the reportable event.
    """
    norm = normalize(g)
    std = split_nodes(norm)
    _, structure = build_system(std)
    if full_sweep_max_branches and structure.n <= full_sweep_max_branches:
        full_sweep = True
    decision = decide(structure, "full-sweep" if full_sweep else "early-exit")

    flow_class = maxflow_class(norm)
    search_status = "ok"
    cert = None
    try:
        cert = brute_force_class(norm, budget=search_budget)
        if not verify_certificate(norm, cert):
            raise OracleDisagreement(f"invalid certificate {cert} for {graph_digest(g)}")
        if cert.kind != flow_class:
            raise OracleDisagreement(
                f"search says {cert.kind}, linking flow says {flow_class} "
                f"on {graph_digest(g)}"
            )
    except SearchBudgetExceeded:
        search_status = "budget_exceeded"

    classes = {
        "rank_sweep": decision.rank,
        "search": cert.kind if cert is not None else None,
        "linking_flow": flow_class,
    }
    if _inject_fault is not None:
        classes = _inject_fault(g, classes)
    stated = [v for v in classes.values() if v is not None]
    disagreement = len(set(stated)) > 1

    report = {
        "format": "twopaths-report-v1",
        "input": {
            "digest": graph_digest(g),
            "nodes": len(g.nodes),
            "edges": len(set(g.edges)),
        },
        "normalized": {
            "order": len(std.nodes),
            "size": structure.n,
            "digest": graph_digest(std),
        },
        "classes": classes,
        "search_status": search_status,
        "disagreement": disagreement,
        "decision": _decision_json(decision),
    }
    if cert is not None:
        report["certificate"] = _certificate_json(norm, cert)
    return report


def stats_digraph(g: RawDigraph, input_index: int, output_index: int) -> dict:
    """Shortest-path statistics of one transfer entry, with the independent
    path-enumeration check."""
    from .series import relative_order, series_coeffs, verify_quadratic_signature

    std = split_nodes(normalize(g))
    _, structure = build_system(std)
    report: dict = {
        "format": "twopaths-stats-v1",
        "input": {"digest": graph_digest(g)},
        "pair": {"input": input_index, "output": output_index},
        "branches": structure.n,
    }
    d = relative_order(structure, input_index, output_index) if structure.n else None
    if d is None:
        report["relative_order"] = None
        report["note"] = "no path between the chosen input and output"
        return report
    coeffs = series_coeffs(structure, input_index, output_index)
    check = verify_quadratic_signature(structure, input_index, output_index)
    report["relative_order"] = coeffs.order
    report["shortest_paths"] = coeffs.shortest_count
    report["shortest_path_list"] = [list(p) for p in check.paths]
    report["linear_sum"] = str(coeffs.shortest_linear_sum)
    report["quadratic_signature"] = str(coeffs.quadratic_signature)
    report["walk_counts"] = {
        "order_plus_1": _big(coeffs.walk_count_next),
        "order_plus_2": _big(coeffs.walk_count_next2),
    }
    report["signature_verified"] = check.ok
    return report


def mason_check_digraph(g: RawDigraph, loop_cap: int) -> dict:
    """Cross-check the gain-formula oracle against the resolvent at the
    family-1 base point."""
    from .errors import CapExceeded
    from .mason import (
        check_determinant_factorization,
        cleared_determinant,
        enumerate_loops,
        loop_clusters,
        transfer_gain,
    )
    from .resolvent import faddeev

    std = split_nodes(normalize(g))
    sfg, structure = build_system(std)
    n = structure.n
    report: dict = {
        "format": "twopaths-mason-v1",
        "input": {"digest": graph_digest(g)},
        "branches": n,
    }
    if n == 0:
        report["verdict"] = "trivial"
        return report
    alpha = tuple(n * i for i in range(1, n + 1))
    try:
        loops = enumerate_loops(sfg, loop_cap)
    except CapExceeded as exc:
        report["verdict"] = "inapplicable"
        report["reason"] = str(exc)
        return report
    res = faddeev(structure, alpha)
    char = res.charpoly
    det = cleared_determinant(sfg, loops, alpha)
    char_ok = det == char
    transfer_ok = True
    for i in (1, 2):
        for j in (1, 2):
            num, den = transfer_gain(sfg, alpha, i, j, cap=loop_cap)
            # num/den == N_ji/char, checked by cross-multiplication
            if num * char != res.numerator[j - 1][i - 1] * den:
                transfer_ok = False
    factor_ok = check_determinant_factorization(sfg, alpha, cap=loop_cap)
    report["loops"] = len(loops)
    report["loop_clusters"] = len(loop_clusters(sfg))
    report["charpoly_identity"] = char_ok
    report["transfer_identity"] = transfer_ok
    report["factorization_identity"] = factor_ok
    report["verdict"] = "ok" if (char_ok and transfer_ok and factor_ok) else "mismatch"
    return report


# ---------------------------------------------------------------------------
# instance generators

TERMINALS = ("u1", "u2", "y1", "y2")


def random_digraph(rng: random.Random, max_nodes: int, max_edges: int) -> RawDigraph:
    """Seeded random instance; duplicates and self-loops are allowed so the
    normalization paths stay exercised."""
    n_internal = rng.randint(0, max(0, max_nodes - 4))
    nodes = list(TERMINALS) + [f"v{i}" for i in range(1, n_internal + 1)]
    pairs = [(a, b) for a in nodes for b in nodes]
    m = rng.randint(0, max_edges)
    edges = tuple(pairs[rng.randrange(len(pairs))] for _ in range(m))
    return digraph(edges, ("u1", "u2"), ("y1", "y2"), extra_nodes=nodes)


def _relabel_group(internals: list[str]):
    """Edge transformations that leave the path class unchanged: input swap,
    output swap, internal renaming, and whole-graph reversal (which swaps
    the role of inputs and outputs).  Each entry maps an edge to an edge."""
    transforms = []
    for swap_u, swap_y, reverse in itertools.product((False, True), repeat=3):
        for perm in itertools.permutations(internals):
            m = {}
            m["u1"], m["u2"] = ("u2", "u1") if swap_u else ("u1", "u2")
            m["y1"], m["y2"] = ("y2", "y1") if swap_y else ("y1", "y2")
            for a, b in zip(internals, perm):
                m[a] = b
            if reverse:
                flip = {"u1": "y1", "u2": "y2", "y1": "u1", "y2": "u2"}
                rm = {k: flip.get(v, v) for k, v in m.items()}
                transforms.append(lambda a, b, rm=rm: (rm[b], rm[a]))
            else:
                transforms.append(lambda a, b, m=m: (m[a], m[b]))
    return transforms


def exhaustive_digraphs(max_nodes: int, max_edges: int | None = None):
    """All simple digraphs on the 4 terminals plus (max_nodes - 4) interior
    nodes, one representative per relabeling orbit, in deterministic order.

    Self-loops are excluded: subdividing them never changes the class, so
    they add nothing to an exhaustive campaign.
    """
    if max_nodes < 4:
        raise ValueError("need at least the four terminals")
    internals = [f"v{i}" for i in range(1, max_nodes - 3)]
    nodes = list(TERMINALS) + internals
    pairs = sorted((a, b) for a in nodes for b in nodes if a != b)
    pair_bit = {p: i for i, p in enumerate(pairs)}
    group = []
    for tf in _relabel_group(internals):
        group.append(tuple(pair_bit[tf(a, b)] for a, b in pairs))

    def remap(mask: int, perm) -> int:
        out = 0
        while mask:
            low = mask & -mask
            out |= 1 << perm[low.bit_length() - 1]
            mask ^= low
        return out

    def is_canonical(mask: int) -> bool:
        return all(remap(mask, perm) >= mask for perm in group)

    def to_graph(mask: int) -> RawDigraph:
        edges = []
        while mask:
            low = mask & -mask
            edges.append(pairs[low.bit_length() - 1])
            mask ^= low
        return digraph(edges, ("u1", "u2"), ("y1", "y2"), extra_nodes=nodes)

    n_pairs = len(pairs)
    if max_edges is None or max_edges >= n_pairs // 2:
        if n_pairs > 24:
            raise ValueError(f"exhaustive scan over 2^{n_pairs} masks refused; set max_edges")
        for mask in range(1 << n_pairs):
            if max_edges is not None and mask.bit_count() > max_edges:
                continue
            if is_canonical(mask):
                yield to_graph(mask)
    else:
        for k in range(max_edges + 1):
            for combo in itertools.combinations(range(n_pairs), k):
                mask = 0
                for i in combo:
                    mask |= 1 << i
                if is_canonical(mask):
                    yield to_graph(mask)


# ---------------------------------------------------------------------------
# campaigns


@dataclass
class CampaignConfig:
    seed: int = 1
    count: int = 0  # random instances
    max_nodes: int = 8
    max_edges: int = 10
    exhaustive_up_to: int | None = None
    exhaustive_max_edges: int | None = None
    full_sweep_max_branches: int = 0  # full sweep (with bounds) when n <= this
    search_budget: int = DEFAULT_SEARCH_BUDGET
    artifact_dir: Path | None = None


def campaign_instances(cfg: CampaignConfig):
    """Deterministic instance stream: exhaustive block first, then the
    seeded random block."""
    if cfg.exhaustive_up_to is not None:
        yield from exhaustive_digraphs(cfg.exhaustive_up_to, cfg.exhaustive_max_edges)
    rng = random.Random(cfg.seed)
    for _ in range(cfg.count):
        yield random_digraph(rng, cfg.max_nodes, cfg.max_edges)


def minimize_disagreement(g: RawDigraph, still_bad) -> RawDigraph:
    """Greedy single-edge deletion preserving `still_bad`; deterministic."""
    current = g
    improved = True
    while improved:
        improved = False
        for e in sorted(set(current.edges)):
            edges = tuple(x for x in current.edges if x != e)
            candidate = RawDigraph(
                current.nodes, edges, current.inputs, current.outputs, dict(current.origin)
            )
            if still_bad(candidate):
                current = candidate
                improved = True
                break
    return current


def persist_artifact(directory: Path, stem: str, graph: RawDigraph | None, payload: dict) -> Path:
    directory.mkdir(parents=True, exist_ok=True)
    path = directory / f"{stem}.json"
    path.write_text(canonical_json(payload))
    if graph is not None:
        (directory / f"{stem}.graph").write_text(graph_to_text(graph))
    return path


def run_campaign(cfg: CampaignConfig, progress=None) -> dict:
    """Compare every instance; tally, digest, and persist any disagreement
    (minimized) or bound violation."""
    sha = hashlib.sha256()
    tally = {0: 0, 1: 0, 2: 0}
    fallbacks = 0
    disagreements = []
    bound_violations = []
    instances = 0
    # same graph -> same verdict; random streams repeat small graphs a lot
    cache: dict[str, tuple] = {}

    for index, g in enumerate(campaign_instances(cfg)):
        instances += 1
        digest = graph_digest(g)
        hit = cache.get(digest)
        if hit is None:
            report = compare_digraph(
                g,
                search_budget=cfg.search_budget,
                full_sweep_max_branches=cfg.full_sweep_max_branches,
            )
            classes = report["classes"]
            viols = report["decision"].get("bounds", {}).get("violations", [])
            hit = (
                classes["rank_sweep"],
                classes["search"],
                classes["linking_flow"],
                report["disagreement"],
                report["search_status"],
                tuple((v.get("point"), v.get("kind"), v.get("k"), v.get("entry"), v.get("power"), v.get("value")) for v in viols),
            )
            if len(cache) < 400_000:
                cache[digest] = hit
        c_sweep, c_search, c_flow, disagreement, search_status, viols_key = hit
        tally[c_flow] += 1
        if search_status != "ok":
            fallbacks += 1
        for v in viols_key:
            bound_violations.append(
                {
                    "index": index,
                    "digest": digest,
                    "point": v[0],
                    "kind": v[1],
                    "k": v[2],
                    "entry": v[3],
                    "power": v[4],
                    "value": v[5],
                }
            )
        line = "|".join(
            [
                str(index),
                digest,
                str(c_sweep),
                str(c_search),
                str(c_flow),
                str(int(disagreement)),
                str(len(viols_key)),
            ]
        )
        sha.update(line.encode())
        sha.update(b"\n")
        if disagreement:
            entry = _handle_disagreement(cfg, index, g)
            disagreements.append(entry)
        if progress is not None and index % 5000 == 0:
            progress(index)

    report = {
        "format": "twopaths-campaign-v1",
        "config": {
            "seed": cfg.seed,
            "count": cfg.count,
            "max_nodes": cfg.max_nodes,
            "max_edges": cfg.max_edges,
            "exhaustive_up_to": cfg.exhaustive_up_to,
            "exhaustive_max_edges": cfg.exhaustive_max_edges,
            "full_sweep_max_branches": cfg.full_sweep_max_branches,
            "search_budget": cfg.search_budget,
        },
        "instances": instances,
        "class_tally": {str(k): v for k, v in tally.items()},
        "search_fallbacks": fallbacks,
        "disagreements": disagreements,
        "bound_violations": bound_violations,
        "digest": sha.hexdigest(),
    }
    return report


def _handle_disagreement(cfg: CampaignConfig, index: int, g: RawDigraph) -> dict:
    def still_bad(candidate: RawDigraph) -> bool:
        try:
            return compare_digraph(candidate, search_budget=cfg.search_budget)["disagreement"]
        except Exception:
            return False

    small = minimize_disagreement(g, still_bad)
    small_report = compare_digraph(small, search_budget=cfg.search_budget)
    entry = {
        "index": index,
        "digest": graph_digest(g),
        "minimized_digest": graph_digest(small),
        "minimized_edges": sorted(set(small.edges)),
        "classes": small_report["classes"],
    }
    if cfg.artifact_dir is not None:
        path = persist_artifact(
            cfg.artifact_dir,
            f"counterexample_{graph_digest(small)}",
            small,
            {"kind": "decider_disagreement", "origin_index": index, "report": small_report},
        )
        entry["artifact"] = str(path)
    return entry
