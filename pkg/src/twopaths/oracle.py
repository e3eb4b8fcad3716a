"""Ground-truth path classification by combinatorial search, independent
of all algebra.

Class 2 means two node-disjoint paths covering both inputs and both
outputs under either input pairing; class 1 means some input reaches some
output but every such path crosses one common node; class 0 means no input
reaches any output.  Two deciders are kept deliberately separate: a
backtracking search that follows the definition literally, and a
unit-vertex-capacity augmenting-path computation of the maximum
vertex-disjoint linking.  They must always agree; a disagreement is a bug
in one of them, not a finding about the graph.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import SearchBudgetExceeded
from .graph import RawDigraph

DEFAULT_SEARCH_BUDGET = 200_000


@dataclass(frozen=True)
class ClassCertificate:
    kind: int  # 0, 1 or 2
    pairing: tuple[int, int] | None = None  # which input feeds output 1, 2
    paths: tuple[tuple[str, ...], ...] | None = None  # two disjoint node paths
    common_node: str | None = None  # class-1 witness


def _reachable(adj, start, banned=frozenset()):
    if start in banned:
        return set()
    seen = {start}
    stack = [start]
    while stack:
        v = stack.pop()
        for w in adj.get(v, ()):
            if w not in seen and w not in banned:
                seen.add(w)
                stack.append(w)
    return seen


def _bfs_path(adj, start, goal, banned):
    """Lexicographically well-defined shortest path, or None."""
    if start in banned or goal in banned:
        return None
    parent = {start: None}
    frontier = [start]
    while frontier:
        nxt = []
        for v in frontier:
            for w in adj.get(v, ()):
                if w not in parent and w not in banned:
                    parent[w] = v
                    if w == goal:
                        path = [w]
                        while parent[path[-1]] is not None:
                            path.append(parent[path[-1]])
                        return tuple(reversed(path))
                    nxt.append(w)
        frontier = nxt
    return None


class _Budget:
    def __init__(self, limit):
        self.limit = limit
        self.used = 0

    def spend(self):
        self.used += 1
        if self.used > self.limit:
            raise SearchBudgetExceeded(f"exceeded {self.limit} expansions")


def brute_force_class(g: RawDigraph, budget: int = DEFAULT_SEARCH_BUDGET) -> ClassCertificate:
    """Classify by backtracking over simple paths, in deterministic
    (lexicographic successor) order.

    For each input pairing, every simple path from the first input to
    output 1 is tried; the rest of the graph is then checked for a path
    from the other input to output 2.  Raises SearchBudgetExceeded when
    the expansion budget runs out.
    """
    adj = g.successors()
    u1, u2 = g.inputs
    y1, y2 = g.outputs
    meter = _Budget(budget)

    for j1, j2 in ((1, 2), (2, 1)):
        a = u1 if j1 == 1 else u2
        b = u2 if j1 == 1 else u1
        found = _search_disjoint(adj, a, y1, b, y2, meter)
        if found is not None:
            return ClassCertificate(2, (j1, j2), found)

    for u in (u1, u2):
        reach = _reachable(adj, u)
        if y1 in reach or y2 in reach:
            v = common_node_certificate(g)
            return ClassCertificate(1, common_node=v)
    return ClassCertificate(0)


def _search_disjoint(adj, a, y1, b, y2, meter):
    """First (path a->y1, path b->y2) node-disjoint pair, or None."""
    if a == y1 or b == y2:
        return None  # terminals are distinct nodes; defensive
    stack = [a]
    on_path = {a}
    iters = [iter(adj.get(a, ()))]
    while iters:
        meter.spend()
        advanced = False
        for w in iters[-1]:
            if w == y1:
                first = tuple(stack) + (y1,)
                banned = set(first)
                if b not in banned and y2 not in banned:
                    second = _bfs_path(adj, b, y2, banned)
                    if second is not None:
                        return (first, second)
            elif w not in on_path and w != y2 and w != b:
                # the first path may not consume the second pair's terminals
                stack.append(w)
                on_path.add(w)
                iters.append(iter(adj.get(w, ())))
                advanced = True
                break
        if not advanced:
            iters.pop()
            on_path.discard(stack.pop())
    return None


def maxflow_class(g: RawDigraph) -> int:
    """Size (capped at 2) of the maximum vertex-disjoint linking from the
    input set to the output set, via augmenting paths on the vertex-split
    unit-capacity network."""
    # nodes: ("in", v) and ("out", v); arcs in->out per vertex, out->in per edge
    adj: dict[tuple, list[tuple]] = {}
    cap: dict[tuple[tuple, tuple], int] = {}

    def add_arc(x, y, c):
        adj.setdefault(x, []).append(y)
        adj.setdefault(y, []).append(x)
        cap[(x, y)] = c
        cap.setdefault((y, x), 0)

    source = ("s", "")
    sink = ("t", "")
    for v in sorted(g.nodes):
        add_arc(("in", v), ("out", v), 1)
    for a, b in sorted(set(g.edges)):
        if a != b:
            add_arc(("out", a), ("in", b), 1)
    for u in g.inputs:
        add_arc(source, ("in", u), 1)
    for y in g.outputs:
        add_arc(("out", y), sink, 1)

    flow = 0
    while flow < 2:
        parent = {source: None}
        frontier = [source]
        reached = False
        while frontier and not reached:
            nxt = []
            for x in frontier:
                for y in adj.get(x, ()):
                    if y not in parent and cap[(x, y)] > 0:
                        parent[y] = x
                        if y == sink:
                            reached = True
                            break
                        nxt.append(y)
                if reached:
                    break
            frontier = nxt
        if not reached:
            break
        y = sink
        while parent[y] is not None:
            x = parent[y]
            cap[(x, y)] -= 1
            cap[(y, x)] += 1
            y = x
        flow += 1
    return flow


def common_node_certificate(g: RawDigraph) -> str | None:
    """A node lying on every input-to-output path, or None if none exists.

    Scans nodes in sorted order and returns the first whose removal (or
    exclusion, when it is itself a terminal) disconnects every input from
    every output.  By the cut duality a class-1 graph always has one.
    """
    adj = g.successors()
    outputs = set(g.outputs)

    def any_connection(banned):
        for u in g.inputs:
            if u in banned:
                continue
            if _reachable(adj, u, banned) & (outputs - banned):
                return True
        return False

    if not any_connection(frozenset()):
        return None
    for v in sorted(g.nodes):
        if not any_connection(frozenset({v})):
            # certificate must itself lie on some path
            on_path = False
            for u in g.inputs:
                if v in _reachable(adj, u):
                    on_path = True
                    break
            if on_path and not (_reachable(adj, v) & outputs):
                on_path = False
            if on_path:
                return v
    return None


def verify_certificate(g: RawDigraph, cert: ClassCertificate) -> bool:
    """Independent re-check of a certificate's validity."""
    adj = g.successors()
    if cert.kind == 2:
        if cert.paths is None or cert.pairing is None:
            return False
        p1, p2 = cert.paths
        j1, j2 = cert.pairing
        if set(p1) & set(p2):
            return False
        expect = ((g.inputs[j1 - 1], g.outputs[0]), (g.inputs[j2 - 1], g.outputs[1]))
        for path, (src, dst) in zip((p1, p2), expect):
            if path[0] != src or path[-1] != dst or len(set(path)) != len(path):
                return False
            for a, b in zip(path, path[1:]):
                if b not in adj.get(a, ()):
                    return False
        return True
    if cert.kind == 1:
        v = cert.common_node
        if v is None:
            return False
        outputs = set(g.outputs)
        connected = False
        for u in g.inputs:
            if _reachable(adj, u) & outputs:
                connected = True
        if not connected:
            return False
        for u in g.inputs:
            if u == v:
                continue
            if _reachable(adj, u, frozenset({v})) & (outputs - {v}):
                return False
        return True
    if cert.kind == 0:
        for u in g.inputs:
            if _reachable(adj, u) & set(g.outputs):
                return False
        return True
    return False
